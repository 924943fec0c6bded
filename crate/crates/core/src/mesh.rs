//! Triangle meshes of films with frame constraints, optional sheet labels and
//! piece tags.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::{Point3, Vector3};
use thiserror::Error;

use crate::geometry::FrameEdge;
use crate::group::Perm3;

type P3 = Point3<f64>;
type V3 = Vector3<f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("triangle {0} is degenerate")]
    DegenerateTriangle(usize),
    #[error("edge ({0}, {1}) is shared by {2} triangles")]
    EdgeMultiplicity(usize, usize, usize),
    #[error("vertex {0} is off its constraint segment")]
    OffSegment(usize),
    #[error("index out of range in triangle {0}")]
    BadIndex(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A straight segment the boundary of the film slides on.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub name: String,
    pub a: P3,
    pub b: P3,
}

impl Segment {
    pub fn project(&self, p: &P3) -> P3 {
        let d = self.b - self.a;
        let t = ((p - self.a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
        self.a + d * t
    }

    pub fn distance(&self, p: &P3) -> f64 {
        (p - self.project(p)).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    Free,
    OnSegment(usize),
    Pinned,
}

/// Which part of an initial film a triangle came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Piece {
    Front,
    Top,
    FrontLeft,
    FrontRight,
    Back,
    Square,
    TopLeft,
    TopRight,
    Bottom,
    LeftVertFront,
    LeftVertBack,
    RightVertTop,
    RightVertBottom,
    LeftCrescent,
    RightCrescent,
    LeftCap(FrameEdge),
    RightCap(FrameEdge),
    ConeCrescentLeft,
    ConeCrescentRight,
    ConeSheet(FrameEdge),
    SkewTop,
    SkewBottom,
    SkewFront,
    SkewBack,
}

impl Piece {
    pub fn name(&self) -> String {
        match self {
            Piece::Front => "front".into(),
            Piece::Top => "top".into(),
            Piece::FrontLeft => "front-left".into(),
            Piece::FrontRight => "front-right".into(),
            Piece::Back => "back".into(),
            Piece::Square => "square".into(),
            Piece::TopLeft => "top-left".into(),
            Piece::TopRight => "top-right".into(),
            Piece::Bottom => "bottom".into(),
            Piece::LeftVertFront => "left-vert-front".into(),
            Piece::LeftVertBack => "left-vert-back".into(),
            Piece::RightVertTop => "right-vert-top".into(),
            Piece::RightVertBottom => "right-vert-bottom".into(),
            Piece::LeftCrescent => "left-crescent".into(),
            Piece::RightCrescent => "right-crescent".into(),
            Piece::LeftCap(e) => format!("left-cap-{e}"),
            Piece::RightCap(e) => format!("right-cap-{e}"),
            Piece::ConeCrescentLeft => "cone-crescent-left".into(),
            Piece::ConeCrescentRight => "cone-crescent-right".into(),
            Piece::ConeSheet(e) => format!("cone-sheet-{e}"),
            Piece::SkewTop => "skew-top".into(),
            Piece::SkewBottom => "skew-bottom".into(),
            Piece::SkewFront => "skew-front".into(),
            Piece::SkewBack => "skew-back".into(),
        }
    }
}

impl FromStr for Piece {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let with_edge = |prefix: &str| {
            s.strip_prefix(prefix)
                .and_then(|rest| rest.parse::<FrameEdge>().ok())
        };
        if let Some(e) = with_edge("left-cap-") {
            return Ok(Piece::LeftCap(e));
        }
        if let Some(e) = with_edge("right-cap-") {
            return Ok(Piece::RightCap(e));
        }
        if let Some(e) = with_edge("cone-sheet-") {
            return Ok(Piece::ConeSheet(e));
        }
        let simple = [
            Piece::Front,
            Piece::Top,
            Piece::FrontLeft,
            Piece::FrontRight,
            Piece::Back,
            Piece::Square,
            Piece::TopLeft,
            Piece::TopRight,
            Piece::Bottom,
            Piece::LeftVertFront,
            Piece::LeftVertBack,
            Piece::RightVertTop,
            Piece::RightVertBottom,
            Piece::LeftCrescent,
            Piece::RightCrescent,
            Piece::ConeCrescentLeft,
            Piece::ConeCrescentRight,
            Piece::SkewTop,
            Piece::SkewBottom,
            Piece::SkewFront,
            Piece::SkewBack,
        ];
        simple
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown piece {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Triangle {
    pub v: [usize; 3],
    pub piece: Option<Piece>,
    pub label: Option<Perm3>,
}

pub type EdgeMap = BTreeMap<(usize, usize), Vec<usize>>;

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FilmMesh {
    pub vertices: Vec<P3>,
    pub constraints: Vec<Constraint>,
    pub triangles: Vec<Triangle>,
    pub segments: Vec<Segment>,
}

impl FilmMesh {
    pub fn new(segments: Vec<Segment>) -> Self {
        Self {
            segments,
            ..Default::default()
        }
    }

    pub fn push_vertex(&mut self, p: P3, c: Constraint) -> usize {
        self.vertices.push(p);
        self.constraints.push(c);
        self.vertices.len() - 1
    }

    pub fn push_triangle(&mut self, v: [usize; 3], piece: Option<Piece>) -> usize {
        self.triangles.push(Triangle {
            v,
            piece,
            label: None,
        });
        self.triangles.len() - 1
    }

    pub fn corners(&self, t: usize) -> [P3; 3] {
        let [a, b, c] = self.triangles[t].v;
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Unnormalised normal, twice the area in length.
    pub fn cross(&self, t: usize) -> V3 {
        let [a, b, c] = self.corners(t);
        (b - a).cross(&(c - a))
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        0.5 * self.cross(t).norm()
    }

    pub fn centroid(&self, t: usize) -> P3 {
        let [a, b, c] = self.corners(t);
        P3::from((a.coords + b.coords + c.coords) / 3.0)
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn area_where(&self, pred: impl Fn(&Triangle) -> bool) -> f64 {
        (0..self.triangles.len())
            .filter(|&t| pred(&self.triangles[t]))
            .map(|t| self.triangle_area(t))
            .sum()
    }

    pub fn edge_map(&self) -> EdgeMap {
        let mut map = EdgeMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                map.entry(edge_key(tri.v[k], tri.v[(k + 1) % 3]))
                    .or_default()
                    .push(t);
            }
        }
        map
    }

    /// Edges shared by three or more triangles.
    pub fn singular_edges(&self) -> Vec<(usize, usize)> {
        self.edge_map()
            .into_iter()
            .filter(|(_, ts)| ts.len() >= 3)
            .map(|(e, _)| e)
            .collect()
    }

    pub fn longest_edge(&self) -> f64 {
        self.edge_map()
            .keys()
            .map(|&(a, b)| (self.vertices[a] - self.vertices[b]).norm())
            .fold(0.0, f64::max)
    }

    /// Segments containing `p` to within `tol`.
    fn segments_through(&self, v: usize, tol: f64) -> Vec<usize> {
        match self.constraints[v] {
            Constraint::Free => Vec::new(),
            Constraint::OnSegment(k) => vec![k],
            Constraint::Pinned => (0..self.segments.len())
                .filter(|&k| self.segments[k].distance(&self.vertices[v]) <= tol)
                .collect(),
        }
    }

    fn tolerance(&self) -> f64 {
        let scale = self
            .vertices
            .iter()
            .map(|p| p.coords.amax())
            .fold(1.0, f64::max);
        1e-12 * scale
    }

    /// Constraint inherited by a new vertex inside the edge `(a, b)`.
    fn inherited(&self, a: usize, b: usize) -> Constraint {
        let tol = self.tolerance();
        let sa = self.segments_through(a, tol);
        let sb = self.segments_through(b, tol);
        if let Some(&k) = sa.iter().find(|k| sb.contains(k)) {
            return Constraint::OnSegment(k);
        }
        if self.constraints[a] == Constraint::Pinned && self.constraints[b] == Constraint::Pinned {
            return Constraint::Pinned;
        }
        Constraint::Free
    }

    /// Splits edge `(a, b)` at `a + t (b - a)`, replacing every incident
    /// triangle by two. Returns the new vertex.
    pub fn split_edge(&mut self, map: &mut EdgeMap, a: usize, b: usize, t: f64) -> usize {
        let c = self.inherited(a, b);
        let mut p = self.vertices[a] + (self.vertices[b] - self.vertices[a]) * t;
        if let Constraint::OnSegment(k) = c {
            p = self.segments[k].project(&p);
        }
        let m = self.push_vertex(p, c);
        let tris = map.remove(&edge_key(a, b)).unwrap_or_default();
        for t0 in tris {
            let tri = self.triangles[t0].v;
            // rotate so the split edge is (tri[0], tri[1]) in either direction
            let k = (0..3)
                .find(|&k| edge_key(tri[k], tri[(k + 1) % 3]) == edge_key(a, b))
                .expect("triangle contains edge");
            let (u, w, x) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
            self.triangles[t0].v = [u, m, x];
            let mut new_tri = self.triangles[t0].clone();
            new_tri.v = [m, w, x];
            self.triangles.push(new_tri);
            let t1 = self.triangles.len() - 1;
            if let Some(list) = map.get_mut(&edge_key(w, x)) {
                for entry in list.iter_mut() {
                    if *entry == t0 {
                        *entry = t1;
                    }
                }
            }
            map.entry(edge_key(u, m)).or_default().push(t0);
            map.entry(edge_key(m, x)).or_default().push(t0);
            map.entry(edge_key(m, x)).or_default().push(t1);
            map.entry(edge_key(m, w)).or_default().push(t1);
        }
        m
    }

    /// Bisection refinement until no edge exceeds `max_len`. Edges are marked
    /// by length alone and each triangle is split by a rule that depends only
    /// on which of its edges are marked, so the result does not depend on the
    /// vertex numbering and symmetric meshes stay symmetric.
    pub fn refine(&mut self, max_len: f64) -> usize {
        let mut splits = 0;
        loop {
            let len = |m: &FilmMesh, (a, b): (usize, usize)| (m.vertices[a] - m.vertices[b]).norm();
            let tie = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x.max(y);
            let mut marked: BTreeSet<(usize, usize)> = self
                .edge_map()
                .into_keys()
                .filter(|&e| len(self, e) > max_len)
                .collect();
            if marked.is_empty() {
                return splits;
            }
            let edges_of = |v: [usize; 3]| [0, 1, 2].map(|k| edge_key(v[k], v[(k + 1) % 3]));
            loop {
                let mut grew = false;
                for tri in &self.triangles {
                    let e = edges_of(tri.v);
                    let l = e.map(|e| len(self, e));
                    if !e.iter().any(|x| marked.contains(x)) {
                        continue;
                    }
                    let lmax = l[0].max(l[1]).max(l[2]);
                    for k in 0..3 {
                        if tie(l[k], lmax) && marked.insert(e[k]) {
                            grew = true;
                        }
                    }
                    let on: Vec<usize> = (0..3).filter(|&k| marked.contains(&e[k])).collect();
                    if on.len() == 2 && tie(l[on[0]], l[on[1]]) {
                        let third = 3 - on[0] - on[1];
                        grew |= marked.insert(e[third]);
                    }
                }
                if !grew {
                    break;
                }
            }
            let mut mid: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            for &(a, b) in &marked {
                let c = self.inherited(a, b);
                let mut p = P3::from((self.vertices[a].coords + self.vertices[b].coords) * 0.5);
                if let Constraint::OnSegment(k) = c {
                    p = self.segments[k].project(&p);
                }
                mid.insert((a, b), self.push_vertex(p, c));
            }
            splits += marked.len();
            let old = std::mem::take(&mut self.triangles);
            for tri in old {
                let v = tri.v;
                let e = edges_of(v);
                let m: Vec<Option<usize>> = e.iter().map(|x| mid.get(x).copied()).collect();
                let on: Vec<usize> = (0..3).filter(|&k| m[k].is_some()).collect();
                let mut out: Vec<[usize; 3]> = Vec::with_capacity(4);
                match on.len() {
                    0 => out.push(v),
                    1 => {
                        let k = on[0];
                        let mk = m[k].unwrap();
                        out.push([v[k], mk, v[(k + 2) % 3]]);
                        out.push([mk, v[(k + 1) % 3], v[(k + 2) % 3]]);
                    }
                    2 => {
                        let (i, j) = (on[0], on[1]);
                        let (l, o) = if len(self, e[i]) > len(self, e[j]) { (i, j) } else { (j, i) };
                        let ml = m[l].unwrap();
                        let mo = m[o].unwrap();
                        let (a, b, c) = (v[l], v[(l + 1) % 3], v[(l + 2) % 3]);
                        if o == (l + 1) % 3 {
                            out.push([a, ml, c]);
                            out.push([ml, b, mo]);
                            out.push([ml, mo, c]);
                        } else {
                            out.push([ml, b, c]);
                            out.push([a, ml, mo]);
                            out.push([ml, c, mo]);
                        }
                    }
                    _ => {
                        let (m0, m1, m2) = (m[0].unwrap(), m[1].unwrap(), m[2].unwrap());
                        out.push([v[0], m0, m2]);
                        out.push([m0, v[1], m1]);
                        out.push([m2, m1, v[2]]);
                        out.push([m0, m1, m2]);
                    }
                }
                for nv in out {
                    self.triangles.push(Triangle { v: nv, ..tri.clone() });
                }
            }
        }
    }

    /// Flips interior edges of a sheet that fail the Delaunay angle test,
    /// keeping only flips that do not raise the area or fold a triangle.
    /// Returns the number of flips.
    pub fn equiangulate(&mut self, max_passes: usize) -> usize {
        let mut total = 0;
        for _ in 0..max_passes {
            let map = self.edge_map();
            let mut touched = vec![false; self.triangles.len()];
            let mut flips = 0;
            for (&(a, b), ts) in &map {
                if ts.len() != 2 || touched[ts[0]] || touched[ts[1]] {
                    continue;
                }
                let (t1, t2) = (ts[0], ts[1]);
                if self.triangles[t1].piece != self.triangles[t2].piece
                    || self.triangles[t1].label != self.triangles[t2].label
                {
                    continue;
                }
                // orient so that t1 runs a -> b
                let tri1 = self.triangles[t1].v;
                let k = (0..3).find(|&k| tri1[k] == a).unwrap();
                let (a, b) = if tri1[(k + 1) % 3] == b { (a, b) } else { (b, a) };
                let c = *tri1.iter().find(|&&v| v != a && v != b).unwrap();
                let tri2 = self.triangles[t2].v;
                let d = *tri2.iter().find(|&&v| v != a && v != b).unwrap();
                let k2 = (0..3).find(|&k| tri2[k] == b).unwrap();
                if tri2[(k2 + 1) % 3] != a || c == d || map.contains_key(&edge_key(c, d)) {
                    continue;
                }
                if self.constraints[c] != Constraint::Free && self.constraints[d] != Constraint::Free {
                    continue;
                }
                let x = &self.vertices;
                let angle = |p: &P3, q: &P3, r: &P3| {
                    let (u, w) = (q - p, r - p);
                    u.cross(&w).norm().atan2(u.dot(&w))
                };
                if angle(&x[c], &x[a], &x[b]) + angle(&x[d], &x[b], &x[a]) <= std::f64::consts::PI + 1e-9 {
                    continue;
                }
                let cross = |p: usize, q: usize, r: usize| (x[q] - x[p]).cross(&(x[r] - x[p]));
                let (o1, o2) = (cross(a, b, c), cross(b, a, d));
                let (n1, n2) = (cross(c, a, d), cross(d, b, c));
                let old = 0.5 * (o1.norm() + o2.norm());
                let new = 0.5 * (n1.norm() + n2.norm());
                let reference = o1 + o2;
                if new > old || n1.dot(&reference) <= 0.0 || n2.dot(&reference) <= 0.0 {
                    continue;
                }
                if n1.norm() < 1e-3 * o1.norm().max(o2.norm()) || n2.norm() < 1e-3 * o1.norm().max(o2.norm()) {
                    continue;
                }
                self.triangles[t1].v = [c, a, d];
                self.triangles[t2].v = [d, b, c];
                touched[t1] = true;
                touched[t2] = true;
                flips += 1;
            }
            total += flips;
            if flips == 0 {
                break;
            }
        }
        total
    }

    /// Cuts the selected triangles along the plane `x[axis] = value` so that
    /// each of them lies on one side.
    pub fn cut_by_plane(&mut self, axis: usize, value: f64, select: impl Fn(Piece) -> bool) {
        let mut map = self.edge_map();
        let selected = |mesh: &FilmMesh, t: usize| mesh.triangles[t].piece.is_some_and(&select);
        let mut cut: Vec<(usize, usize, f64)> = Vec::new();
        for (&(a, b), ts) in &map {
            if !ts.iter().any(|&t| selected(self, t)) {
                continue;
            }
            let (da, db) = (self.vertices[a][axis] - value, self.vertices[b][axis] - value);
            if da * db < 0.0 {
                let t = da / (da - db);
                if t > 1e-6 && t < 1.0 - 1e-6 {
                    cut.push((a, b, t));
                }
            }
        }
        for (a, b, t) in cut {
            self.split_edge(&mut map, a, b, t);
        }
    }

    /// Cuts the selected triangles along the plane `x[axis] = value` and
    /// retags them by the side their centroid falls on.
    pub fn split_by_plane(
        &mut self,
        axis: usize,
        value: f64,
        select: impl Fn(Piece) -> bool,
        side: impl Fn(bool) -> Piece,
    ) {
        self.cut_by_plane(axis, value, &select);
        for t in 0..self.triangles.len() {
            if self.triangles[t].piece.is_some_and(&select) {
                let right = self.centroid(t)[axis] > value;
                self.triangles[t].piece = Some(side(right));
            }
        }
    }

    /// Moves every constrained vertex back onto its segment.
    pub fn project_constraints(&mut self) {
        for v in 0..self.vertices.len() {
            if let Constraint::OnSegment(k) = self.constraints[v] {
                self.vertices[v] = self.segments[k].project(&self.vertices[v]);
            }
        }
    }

    pub fn validate(&self, scale: f64) -> Result<(), MeshError> {
        let n = self.vertices.len();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.v.iter().any(|&i| i >= n) {
                return Err(MeshError::BadIndex(t));
            }
            if tri.v[0] == tri.v[1] || tri.v[1] == tri.v[2] || tri.v[0] == tri.v[2] {
                return Err(MeshError::DegenerateTriangle(t));
            }
            if self.triangle_area(t) <= 0.0 {
                return Err(MeshError::DegenerateTriangle(t));
            }
        }
        for ((a, b), ts) in self.edge_map() {
            if ts.len() > 3 {
                return Err(MeshError::EdgeMultiplicity(a, b, ts.len()));
            }
        }
        let tol = 1e-12 * scale.max(1.0);
        for v in 0..n {
            if let Constraint::OnSegment(k) = self.constraints[v] {
                if k >= self.segments.len() || self.segments[k].distance(&self.vertices[v]) > tol {
                    return Err(MeshError::OffSegment(v));
                }
            }
        }
        Ok(())
    }

    /// Wavefront OBJ with comment records for segments, constraints, piece
    /// tags and labels. Indices in the comment records are 1-based.
    pub fn to_obj(&self) -> String {
        let mut out = String::from("# soapfilm mesh\n");
        for s in &self.segments {
            let _ = writeln!(
                out,
                "#segment {} {} {} {} {} {} {}",
                s.name, s.a.x, s.a.y, s.a.z, s.b.x, s.b.y, s.b.z
            );
        }
        for p in &self.vertices {
            let _ = writeln!(out, "v {} {} {}", p.x, p.y, p.z);
        }
        for t in &self.triangles {
            let _ = writeln!(out, "f {} {} {}", t.v[0] + 1, t.v[1] + 1, t.v[2] + 1);
        }
        for (i, c) in self.constraints.iter().enumerate() {
            match c {
                Constraint::Free => {}
                Constraint::OnSegment(k) => {
                    let _ = writeln!(out, "#constraint v {} {}", i + 1, self.segments[*k].name);
                }
                Constraint::Pinned => {
                    let _ = writeln!(out, "#constraint v {} pinned", i + 1);
                }
            }
        }
        for (i, t) in self.triangles.iter().enumerate() {
            if let Some(p) = t.piece {
                let _ = writeln!(out, "#piece f {} {}", i + 1, p.name());
            }
        }
        for (i, t) in self.triangles.iter().enumerate() {
            if let Some(l) = t.label {
                let _ = writeln!(out, "#perm f {} {}", i + 1, l);
            }
        }
        out
    }

    /// Parses the format written by [`FilmMesh::to_obj`]. Constraint records
    /// naming a segment that has no `#segment` line resolve against
    /// `fallback`.
    pub fn from_obj(text: &str, fallback: &[Segment]) -> Result<Self, MeshError> {
        let mut mesh = FilmMesh::default();
        let mut pending: Vec<(usize, usize, String)> = Vec::new();
        let mut pieces: Vec<(usize, usize, String)> = Vec::new();
        let mut labels: Vec<(usize, usize, String)> = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line_no = ln + 1;
            let err = |msg: &str| MeshError::Parse {
                line: line_no,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<f64>().map_err(|_| err("bad number"));
            let idx = |s: &str| {
                s.parse::<usize>()
                    .ok()
                    .filter(|&i| i >= 1)
                    .map(|i| i - 1)
                    .ok_or_else(|| err("bad index"))
            };
            match fields.first().copied() {
                Some("v") => {
                    if fields.len() < 4 {
                        return Err(err("vertex needs three coordinates"));
                    }
                    let p = P3::new(num(fields[1])?, num(fields[2])?, num(fields[3])?);
                    mesh.push_vertex(p, Constraint::Free);
                }
                Some("f") => {
                    if fields.len() != 4 {
                        return Err(err("only triangular faces are supported"));
                    }
                    // accept v/vt/vn forms
                    let first = |s: &str| s.split('/').next().unwrap_or("").to_string();
                    let v = [
                        idx(&first(fields[1]))?,
                        idx(&first(fields[2]))?,
                        idx(&first(fields[3]))?,
                    ];
                    mesh.push_triangle(v, None);
                }
                Some("#segment") => {
                    if fields.len() != 8 {
                        return Err(err("segment needs a name and six coordinates"));
                    }
                    mesh.segments.push(Segment {
                        name: fields[1].to_string(),
                        a: P3::new(num(fields[2])?, num(fields[3])?, num(fields[4])?),
                        b: P3::new(num(fields[5])?, num(fields[6])?, num(fields[7])?),
                    });
                }
                Some("#constraint") | Some("#piece") | Some("#perm") => {
                    if fields.len() < 4 {
                        return Err(err("record needs a kind, an index and a value"));
                    }
                    let want = if fields[0] == "#constraint" { "v" } else { "f" };
                    if fields[1] != want {
                        return Err(err("wrong record kind"));
                    }
                    let rest = fields[3..].join(" ");
                    let entry = (line_no, idx(fields[2])?, rest);
                    match fields[0] {
                        "#constraint" => pending.push(entry),
                        "#piece" => pieces.push(entry),
                        _ => labels.push(entry),
                    }
                }
                _ => {}
            }
        }
        for (line, v, name) in pending {
            let err = |msg: String| MeshError::Parse { line, msg };
            if v >= mesh.vertices.len() {
                return Err(err("vertex index out of range".into()));
            }
            mesh.constraints[v] = if name == "pinned" {
                Constraint::Pinned
            } else {
                let k = match mesh.segments.iter().position(|s| s.name == name) {
                    Some(k) => k,
                    None => {
                        let s = fallback
                            .iter()
                            .find(|s| s.name == name)
                            .ok_or_else(|| err(format!("unknown segment {name:?}")))?;
                        mesh.segments.push(s.clone());
                        mesh.segments.len() - 1
                    }
                };
                Constraint::OnSegment(k)
            };
        }
        for (line, t, name) in pieces {
            let err = |msg: String| MeshError::Parse { line, msg };
            let p = name.parse::<Piece>().map_err(err)?;
            mesh.triangles
                .get_mut(t)
                .ok_or_else(|| err("face index out of range".into()))?
                .piece = Some(p);
        }
        for (line, t, cycle) in labels {
            let err = |msg: String| MeshError::Parse { line, msg };
            let p = cycle.parse::<Perm3>().map_err(|e| err(e.to_string()))?;
            mesh.triangles
                .get_mut(t)
                .ok_or_else(|| err("face index out of range".into()))?
                .label = Some(p);
        }
        for (t, tri) in mesh.triangles.iter().enumerate() {
            if tri.v.iter().any(|&i| i >= mesh.vertices.len()) {
                return Err(MeshError::BadIndex(t));
            }
        }
        Ok(mesh)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> FilmMesh {
        let seg = Segment {
            name: "E".into(),
            a: P3::new(0.0, 0.0, 0.0),
            b: P3::new(1.0, 0.0, 0.0),
        };
        let mut m = FilmMesh::new(vec![seg]);
        m.push_vertex(P3::new(0.0, 0.0, 0.0), Constraint::Pinned);
        m.push_vertex(P3::new(1.0, 0.0, 0.0), Constraint::Pinned);
        m.push_vertex(P3::new(1.0, 1.0, 0.0), Constraint::Free);
        m.push_vertex(P3::new(0.0, 1.0, 0.0), Constraint::Free);
        m.push_triangle([0, 1, 2], None);
        m.push_triangle([0, 2, 3], None);
        m
    }

    #[test]
    fn refinement_keeps_area_and_constraints() {
        let mut m = square();
        m.refine(0.1);
        assert!((m.area() - 1.0).abs() < 1e-12);
        assert!(m.longest_edge() <= 0.1);
        m.validate(1.0).unwrap();
        let on_edge = (0..m.vertices.len())
            .filter(|&v| m.constraints[v] == Constraint::OnSegment(0))
            .count();
        assert!(on_edge > 5);
        for v in 0..m.vertices.len() {
            if m.vertices[v].y == 0.0 {
                assert_ne!(m.constraints[v], Constraint::Free);
            }
        }
        // orientation preserved
        for t in 0..m.triangles.len() {
            assert!(m.cross(t).z > 0.0);
        }
    }

    #[test]
    fn triple_edge_split() {
        let mut m = FilmMesh::default();
        for p in [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, 1.0, 0.0], [0.5, -1.0, 0.0], [0.5, 0.0, 1.0]] {
            m.push_vertex(P3::new(p[0], p[1], p[2]), Constraint::Free);
        }
        for c in [2, 3, 4] {
            m.push_triangle([0, 1, c], None);
        }
        let mut map = m.edge_map();
        m.split_edge(&mut map, 0, 1, 0.5);
        assert_eq!(map, m.edge_map());
        assert_eq!(m.triangles.len(), 6);
        assert_eq!(m.singular_edges().len(), 2);
    }

    #[test]
    fn obj_roundtrip() {
        let mut m = square();
        m.triangles[0].piece = Some(Piece::LeftCap(FrameEdge::L3));
        m.triangles[1].label = Some(Perm3::C132);
        m.constraints[1] = Constraint::OnSegment(0);
        let text = m.to_obj();
        let back = FilmMesh::from_obj(&text, &[]).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_obj(), text);
    }

    #[test]
    fn obj_errors() {
        let bad = "v 0 0 0\nv 1 0 0\nf 1 2 3\n";
        assert!(matches!(FilmMesh::from_obj(bad, &[]), Err(MeshError::BadIndex(0))));
        let bad = "v 0 0 0\n#constraint v 1 L9\n";
        assert!(matches!(FilmMesh::from_obj(bad, &[]), Err(MeshError::Parse { line: 2, .. })));
    }

    #[test]
    fn plane_split() {
        let mut m = square();
        m.triangles[0].piece = Some(Piece::FrontLeft);
        m.triangles[1].piece = Some(Piece::FrontLeft);
        m.split_by_plane(0, 0.3, |p| matches!(p, Piece::FrontLeft | Piece::FrontRight), |r| {
            if r {
                Piece::FrontRight
            } else {
                Piece::FrontLeft
            }
        });
        let left = m.area_where(|t| t.piece == Some(Piece::FrontLeft));
        assert!((left - 0.3).abs() < 1e-12, "{left}");
        assert!((m.area() - 1.0).abs() < 1e-12);
    }
}
