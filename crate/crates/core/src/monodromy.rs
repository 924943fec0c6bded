//! Sheet labels on a film, phantom disks bounded by the wires, and loop
//! monodromy computed from signed crossings.
//!
//! A triangle labelled `σ` acts by `σ` on a loop that crosses it along its
//! normal `(b - a) × (c - a)` and by `σ⁻¹` against it. Crossings compose left
//! to right, the same order as [`monodromy_of_word`].

use std::collections::BTreeMap;

use nalgebra::{Point3, Vector3};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{point_segment_distance, wire_distance, FrameEdge, WedgeConfig};
use crate::group::{edge_loop_word, monodromy_of_word, ArcId, CoverSpec, Generator, Perm3};
use crate::mesh::{Constraint, FilmMesh, Piece};

type P3 = Point3<f64>;
type V3 = Vector3<f64>;

const MAX_PERTURBATIONS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonodromyError {
    #[error("triangle {triangle} on piece {piece} has no sheet label")]
    Unlabelable { triangle: usize, piece: String },
    #[error("{arc}: spec gives {found}, the labelling needs {expected}")]
    Inconsistent {
        arc: String,
        expected: Perm3,
        found: Perm3,
    },
    #[error("loop still degenerate after {0} perturbations")]
    Degenerate(usize),
    #[error("loop needs at least two points")]
    ShortLoop,
}

/// Labels carried by the pieces of a competitor film.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PieceLabels {
    pub main: Perm3,
    pub front: Perm3,
    pub top: Perm3,
    pub left_crescent: Perm3,
    pub right_crescent: Perm3,
    pub disk1: Perm3,
    pub disk2: Perm3,
}

fn arc_perm(spec: &CoverSpec, arc: ArcId) -> Perm3 {
    monodromy_of_word(&edge_loop_word(arc).expect("tabulated arc"), spec)
}

impl PieceLabels {
    /// Reads the labels off the arc words and checks that the remaining arcs
    /// agree with them.
    pub fn from_spec(spec: &CoverSpec) -> Result<Self, MonodromyError> {
        let l = |edge, piece| arc_perm(spec, ArcId::L { edge, piece });
        let main = l(1, 1);
        let front = l(4, 1);
        let top = l(1, 2);
        let checks = [
            (ArcId::L { edge: 2, piece: 2 }, main.inverse()),
            (ArcId::L { edge: 2, piece: 1 }, front.inverse()),
            (ArcId::L { edge: 2, piece: 3 }, top.inverse()),
            (ArcId::L { edge: 3, piece: 2 }, main.inverse()),
            (ArcId::L { edge: 3, piece: 3 }, main.inverse()),
            (ArcId::L3Outside, main.inverse()),
            (ArcId::L { edge: 4, piece: 2 }, main),
        ];
        for (arc, expected) in checks {
            let found = arc_perm(spec, arc);
            if found != expected {
                return Err(MonodromyError::Inconsistent {
                    arc: arc.to_string(),
                    expected,
                    found,
                });
            }
        }
        Ok(Self {
            main,
            front,
            top,
            left_crescent: arc_perm(spec, ArcId::S1),
            right_crescent: arc_perm(spec, ArcId::S2),
            disk1: spec.get(Generator::A),
            disk2: spec.get(Generator::E),
        })
    }

    pub fn of(&self, piece: Piece) -> Option<Perm3> {
        use FrameEdge::*;
        use Piece::*;
        Some(match piece {
            FrontRight | Back | Square | TopLeft | Bottom | LeftVertBack | RightVertBottom => self.main,
            SkewTop | SkewBottom | SkewFront | SkewBack => self.main,
            FrontLeft | LeftVertFront => self.front,
            TopRight | RightVertTop => self.top,
            LeftCap(L1 | L3) => self.main,
            LeftCap(_) => self.front,
            RightCap(L1 | L2) => self.top,
            RightCap(_) => self.main,
            LeftCrescent => self.left_crescent,
            RightCrescent => self.right_crescent,
            Front | Top | ConeCrescentLeft | ConeCrescentRight | ConeSheet(_) => return None,
        })
    }
}

/// Planar quadrilateral spanning a wire, oriented by its first three corners.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhantomDisk {
    pub name: String,
    pub corners: [[f64; 3]; 4],
    pub label: Perm3,
}

impl PhantomDisk {
    pub fn triangles(&self) -> [[P3; 3]; 2] {
        let c = self.corners.map(P3::from);
        [[c[0], c[1], c[2]], [c[0], c[2], c[3]]]
    }
}

/// The two disks: `D1` in `x = -sh` below the wire `C1` on the `y < 0` side,
/// `D2` in `x = sh` above the wire `C2`. Both are oriented along `+x`.
pub fn phantom_disks(cfg: &WedgeConfig, labels: &PieceLabels) -> Vec<PhantomDisk> {
    let w = cfg.wires();
    let r = w.c1.half_length;
    let x1 = -cfg.s * cfg.h;
    let x2 = cfg.s * cfg.h;
    vec![
        PhantomDisk {
            name: "D1".into(),
            corners: [[x1, 0.0, -r], [x1, 0.0, r], [x1, -r, r], [x1, -r, -r]],
            label: labels.disk1,
        },
        PhantomDisk {
            name: "D2".into(),
            corners: [[x2, -r, 0.0], [x2, r, 0.0], [x2, r, r], [x2, -r, r]],
            label: labels.disk2,
        },
    ]
}

/// Uniform bucket grid over triangle bounding boxes.
#[derive(Debug, Clone)]
struct Grid {
    origin: P3,
    cell: f64,
    dims: [usize; 3],
    cells: Vec<Vec<u32>>,
}

impl Grid {
    fn build(tris: &[[P3; 3]]) -> Self {
        let mut lo = P3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = P3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut edge_sum = 0.0;
        for t in tris {
            for p in t {
                lo = lo.inf(p);
                hi = hi.sup(p);
            }
            edge_sum += (t[1] - t[0]).norm() + (t[2] - t[1]).norm() + (t[0] - t[2]).norm();
        }
        if tris.is_empty() {
            return Self {
                origin: P3::origin(),
                cell: 1.0,
                dims: [1, 1, 1],
                cells: vec![Vec::new()],
            };
        }
        let extent = (hi - lo).max().max(1e-9);
        let mean_edge = edge_sum / (3 * tris.len()) as f64;
        let cell = (2.0 * mean_edge).max(extent / 96.0);
        let dims = [0, 1, 2].map(|k| (((hi[k] - lo[k]) / cell).floor() as usize + 1).max(1));
        let mut grid = Self {
            origin: lo,
            cell,
            dims,
            cells: vec![Vec::new(); dims[0] * dims[1] * dims[2]],
        };
        for (i, t) in tris.iter().enumerate() {
            let a = t[0].inf(&t[1]).inf(&t[2]);
            let b = t[0].sup(&t[1]).sup(&t[2]);
            let (ia, ib) = (grid.index(&a), grid.index(&b));
            for x in ia[0]..=ib[0] {
                for y in ia[1]..=ib[1] {
                    for z in ia[2]..=ib[2] {
                        let k = grid.flat([x, y, z]);
                        grid.cells[k].push(i as u32);
                    }
                }
            }
        }
        grid
    }

    fn index(&self, p: &P3) -> [usize; 3] {
        [0, 1, 2].map(|k| {
            let f = ((p[k] - self.origin[k]) / self.cell).floor();
            (f.max(0.0) as usize).min(self.dims[k] - 1)
        })
    }

    fn flat(&self, i: [usize; 3]) -> usize {
        (i[2] * self.dims[1] + i[1]) * self.dims[0] + i[0]
    }

    /// Triangles whose cells meet the bounding box of `p q`.
    fn candidates(&self, p: &P3, q: &P3, out: &mut Vec<u32>) {
        out.clear();
        let a = p.inf(q);
        let b = p.sup(q);
        let outside = (0..3).any(|k| {
            b[k] < self.origin[k] || a[k] > self.origin[k] + self.cell * self.dims[k] as f64
        });
        if outside {
            return;
        }
        let (ia, ib) = (self.index(&a), self.index(&b));
        for x in ia[0]..=ib[0] {
            for y in ia[1]..=ib[1] {
                for z in ia[2]..=ib[2] {
                    out.extend_from_slice(&self.cells[self.flat([x, y, z])]);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
    }
}

/// A film with a sheet label on every triangle, plus the phantom disks.
#[derive(Debug, Clone)]
pub struct LabeledSurface {
    pub mesh: FilmMesh,
    pub disks: Vec<PhantomDisk>,
    pub labels: PieceLabels,
    pub cfg: WedgeConfig,
    tris: Vec<[P3; 3]>,
    perms: Vec<Perm3>,
    grid: Grid,
}

fn is_skew(p: Piece) -> bool {
    matches!(p, Piece::SkewTop | Piece::SkewBottom | Piece::SkewFront | Piece::SkewBack)
}

fn is_crescent(p: Piece) -> bool {
    matches!(p, Piece::LeftCrescent | Piece::RightCrescent)
}

/// Labels every triangle and adds the phantom disks. Away from the crescents
/// the label only depends on which side of a disk the triangle lies: `front`
/// past `D1`, `top` past `D2`, `main` elsewhere. Skew films carry no disks
/// and a single label.
pub fn label_surface(
    mesh: &FilmMesh,
    cfg: &WedgeConfig,
    spec: &CoverSpec,
) -> Result<LabeledSurface, MonodromyError> {
    let labels = PieceLabels::from_spec(spec)?;
    let mut mesh = mesh.clone();
    let sh = cfg.s * cfg.h;
    for (i, t) in mesh.triangles.iter().enumerate() {
        let piece = t.piece.ok_or_else(|| MonodromyError::Unlabelable {
            triangle: i,
            piece: "untagged".into(),
        })?;
        if labels.of(piece).is_none() && !matches!(piece, Piece::Front | Piece::Top) {
            return Err(MonodromyError::Unlabelable {
                triangle: i,
                piece: piece.name(),
            });
        }
    }
    let skew = mesh.triangles.iter().any(|t| t.piece.is_some_and(is_skew));
    let bulk = |p: Piece| !is_crescent(p) && !is_skew(p);
    mesh.cut_by_plane(0, -sh, bulk);
    mesh.cut_by_plane(0, sh, bulk);
    mesh.split_by_plane(
        0,
        -sh,
        |p| matches!(p, Piece::Front | Piece::FrontLeft | Piece::FrontRight),
        |right| if right { Piece::FrontRight } else { Piece::FrontLeft },
    );
    mesh.split_by_plane(
        0,
        sh,
        |p| matches!(p, Piece::Top | Piece::TopLeft | Piece::TopRight),
        |right| if right { Piece::TopRight } else { Piece::TopLeft },
    );
    for i in 0..mesh.triangles.len() {
        let piece = mesh.triangles[i].piece.expect("checked above");
        let label = if bulk(piece) {
            let c = mesh.centroid(i);
            if c.x < -sh && c.y < 0.0 {
                labels.front
            } else if c.x > sh && c.z > 0.0 {
                labels.top
            } else {
                labels.main
            }
        } else {
            labels.of(piece).expect("checked above")
        };
        mesh.triangles[i].label = Some(label);
    }
    let disks = if skew { Vec::new() } else { phantom_disks(cfg, &labels) };
    Ok(LabeledSurface::assemble(mesh, disks, labels, *cfg))
}

impl LabeledSurface {
    fn assemble(mesh: FilmMesh, disks: Vec<PhantomDisk>, labels: PieceLabels, cfg: WedgeConfig) -> Self {
        let mut tris: Vec<[P3; 3]> = Vec::new();
        let mut perms = Vec::new();
        for t in &mesh.triangles {
            tris.push(t.v.map(|v| mesh.vertices[v]));
            perms.push(t.label.unwrap_or(Perm3::IDENTITY));
        }
        let grid = Grid::build(&tris);
        for d in &disks {
            for t in d.triangles() {
                tris.push(t);
                perms.push(d.label);
            }
        }
        Self {
            mesh,
            disks,
            labels,
            cfg,
            tris,
            perms,
            grid,
        }
    }

    /// Replaces the label of every triangle on `piece`.
    pub fn relabel(&self, piece: Piece, perm: Perm3) -> Self {
        let mut mesh = self.mesh.clone();
        for t in &mut mesh.triangles {
            if t.piece == Some(piece) {
                t.label = Some(perm);
            }
        }
        Self::assemble(mesh, self.disks.clone(), self.labels, self.cfg)
    }

    pub fn basepoint(&self) -> P3 {
        P3::new(0.0, 0.0, 100.0 * self.cfg.h)
    }

    fn mesh_triangles(&self) -> usize {
        self.mesh.triangles.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopPolyline {
    pub points: Vec<P3>,
    pub closed: bool,
}

impl LoopPolyline {
    pub fn closed(points: Vec<P3>) -> Self {
        Self { points, closed: true }
    }

    pub fn path(points: Vec<P3>) -> Self {
        Self { points, closed: false }
    }

    /// Joins `points` to `base` by straight segments on both ends.
    pub fn anchored(base: P3, points: &[P3]) -> Self {
        let mut pts = Vec::with_capacity(points.len() + 3);
        pts.push(base);
        pts.extend_from_slice(points);
        if let Some(&first) = points.first() {
            pts.push(first);
        }
        pts.push(base);
        Self { points: pts, closed: true }
    }

    fn segments(&self) -> Vec<(P3, P3)> {
        let mut segs: Vec<(P3, P3)> = self.points.windows(2).map(|w| (w[0], w[1])).collect();
        if self.closed {
            let (a, b) = (*self.points.last().unwrap(), self.points[0]);
            if a != b {
                segs.push((a, b));
            }
        }
        segs
    }
}

enum Hit {
    Miss,
    Cross { t: f64, positive: bool },
    Degenerate,
}

fn c3(p: &P3) -> robust::Coord3D<f64> {
    robust::Coord3D { x: p.x, y: p.y, z: p.z }
}

fn orient(a: &P3, b: &P3, c: &P3, d: &P3) -> f64 {
    robust::orient3d(c3(a), c3(b), c3(c), c3(d))
}

fn segment_hit(p: &P3, q: &P3, tri: &[P3; 3]) -> Hit {
    let [a, b, c] = tri;
    let sp = orient(a, b, c, p);
    let sq = orient(a, b, c, q);
    if (sp > 0.0 && sq > 0.0) || (sp < 0.0 && sq < 0.0) {
        return Hit::Miss;
    }
    let e = [orient(p, q, a, b), orient(p, q, b, c), orient(p, q, c, a)];
    let pos = e.iter().any(|&v| v > 0.0);
    let neg = e.iter().any(|&v| v < 0.0);
    if pos && neg {
        return Hit::Miss;
    }
    if sp == 0.0 || sq == 0.0 || e.iter().any(|&v| v == 0.0) {
        return Hit::Degenerate;
    }
    Hit::Cross {
        t: sp / (sp - sq),
        positive: sp > 0.0,
    }
}

impl LabeledSurface {
    fn segment_perm(&self, p: &P3, q: &P3, buf: &mut Vec<u32>) -> Option<Perm3> {
        self.grid.candidates(p, q, buf);
        let mut hits: Vec<(f64, Perm3)> = Vec::new();
        let n = self.mesh_triangles();
        let all = buf.iter().map(|&i| i as usize).chain(n..self.tris.len());
        for i in all {
            match segment_hit(p, q, &self.tris[i]) {
                Hit::Miss => {}
                Hit::Degenerate => return None,
                Hit::Cross { t, positive } => {
                    let g = self.perms[i];
                    hits.push((t, if positive { g } else { g.inverse() }));
                }
            }
        }
        hits.sort_by(|x, y| x.0.total_cmp(&y.0));
        Some(hits.into_iter().fold(Perm3::IDENTITY, |acc, (_, g)| acc * g))
    }

    fn polyline_perm(&self, segs: &[(P3, P3)], shift: V3) -> Option<Perm3> {
        let mut buf = Vec::new();
        let mut acc = Perm3::IDENTITY;
        for (p, q) in segs {
            acc = acc * self.segment_perm(&(p + shift), &(q + shift), &mut buf)?;
        }
        Some(acc)
    }

    /// Product of the crossings along the polyline, translating it by a tiny
    /// generic offset whenever it touches the surface non-transversally.
    pub fn loop_permutation(&self, lp: &LoopPolyline) -> Result<Perm3, MonodromyError> {
        if lp.points.len() < 2 {
            return Err(MonodromyError::ShortLoop);
        }
        let segs = lp.segments();
        if let Some(p) = self.polyline_perm(&segs, V3::zeros()) {
            return Ok(p);
        }
        let dir = V3::new(0.618, 0.414, 0.732).normalize();
        let mut eps = 1e-9 * self.cfg.h.max(1.0);
        for _ in 0..MAX_PERTURBATIONS {
            if let Some(p) = self.polyline_perm(&segs, dir * eps) {
                return Ok(p);
            }
            eps *= 10.0;
        }
        Err(MonodromyError::Degenerate(MAX_PERTURBATIONS))
    }

    /// Sheet reached from sheet 1 at the basepoint after following `path`.
    pub fn u_trace(&self, path: &[P3]) -> Result<u8, MonodromyError> {
        let mut pts = vec![self.basepoint()];
        pts.extend_from_slice(path);
        Ok(self.loop_permutation(&LoopPolyline::path(pts))?.apply(1))
    }
}

/// Regular `n`-gon of radius `r` about `center` in the plane normal to `axis`,
/// starting at `center + r·outward` and turning right-handedly about `axis`.
pub fn circle_loop(center: P3, axis: V3, outward: V3, r: f64, n: usize) -> Vec<P3> {
    let d = axis.normalize();
    let u = (outward - d * outward.dot(&d)).normalize();
    let v = d.cross(&u);
    (0..n)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / n as f64;
            center + r * (a.cos() * u + a.sin() * v)
        })
        .collect()
}

/// Square of half-width `r` with the same orientation convention, starting
/// at the midpoint of the outward side.
pub fn square_loop(center: P3, axis: V3, outward: V3, r: f64) -> Vec<P3> {
    let d = axis.normalize();
    let u = (outward - d * outward.dot(&d)).normalize();
    let v = d.cross(&u);
    [(1.0, 0.0), (1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)]
        .iter()
        .map(|&(a, b)| center + r * (a * u + b * v))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratumFailure {
    pub edge: (usize, usize),
    pub pieces: Vec<String>,
    pub perm: Perm3,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrivialityReport {
    pub checked: usize,
    pub failures: Vec<StratumFailure>,
}

impl TrivialityReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs a tiny loop around every interior edge where two or more triangles
/// meet and records those whose monodromy is not trivial. Loops stay clear of
/// the frame and the wires.
pub fn check_local_triviality(ls: &LabeledSurface) -> Result<TrivialityReport, MonodromyError> {
    let mesh = &ls.mesh;
    let mut edges: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, t) in mesh.triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t.v[k], t.v[(k + 1) % 3]);
            edges.entry((a.min(b), a.max(b))).or_default().push(i);
        }
    }
    let free = |v: usize| mesh.constraints[v] == Constraint::Free;
    let frame = ls.cfg.frame();
    let wires = ls.cfg.wires();
    let mut obstacles: Vec<(P3, P3)> = FrameEdge::ALL.iter().map(|&e| frame.edge(e)).collect();
    obstacles.push(wires.c1.endpoints());
    obstacles.push(wires.c2.endpoints());
    let todo: Vec<((usize, usize), Vec<usize>)> = edges
        .into_iter()
        .filter(|((a, b), ts)| ts.len() >= 2 && (free(*a) || free(*b)))
        .collect();
    let results: Vec<Result<Option<StratumFailure>, MonodromyError>> = todo
        .par_iter()
        .map(|((a, b), ts)| {
            let (pa, pb) = (mesh.vertices[*a], mesh.vertices[*b]);
            let axis = pb - pa;
            let len = axis.norm();
            let mid = P3::from((pa.coords + pb.coords) / 2.0);
            let mut height = len;
            let mut outward = None;
            for &t in ts {
                let tri = &mesh.triangles[t];
                let c = tri.v.iter().find(|&&v| v != *a && v != *b).copied().unwrap();
                let off = mesh.vertices[c] - pa;
                let perp = off - axis * off.dot(&axis) / (len * len);
                height = height.min(perp.norm());
                outward.get_or_insert(perp);
            }
            let clearance = obstacles
                .iter()
                .map(|(p, q)| point_segment_distance(&mid, p, q))
                .fold(f64::INFINITY, f64::min);
            let radius = (0.25 * height).min(0.5 * clearance);
            // bisect away from the first incident triangle
            let out = outward.unwrap();
            let side = axis.cross(&out);
            let lp = LoopPolyline::closed(circle_loop(mid, axis, out + side, radius, 12));
            let perm = ls.loop_permutation(&lp)?;
            Ok((!perm.is_identity()).then(|| {
                let mut pieces: Vec<String> = ts
                    .iter()
                    .map(|&t| mesh.triangles[t].piece.map_or("untagged".into(), |p| p.name()))
                    .collect();
                pieces.sort();
                pieces.dedup();
                StratumFailure {
                    edge: (*a, *b),
                    pieces,
                    perm,
                }
            }))
        })
        .collect();
    let mut failures = Vec::new();
    for r in results {
        if let Some(f) = r? {
            failures.push(f);
        }
    }
    Ok(TrivialityReport {
        checked: todo.len(),
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopSample {
    pub around: String,
    pub position: f64,
    pub radius: f64,
    pub perm: Perm3,
    pub moves_sheet1: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WettingReport {
    pub delta: f64,
    pub p1: Vec<LoopSample>,
    pub p2: Vec<LoopSample>,
    pub far_loop: Option<LoopSample>,
    pub p1_ok: bool,
    pub p2_ok: bool,
    pub far_loop_fixes_sheet1: bool,
}

impl WettingReport {
    pub fn ok(&self) -> bool {
        self.p1_ok && self.p2_ok
    }
}

fn outward_from_axis(p: &P3) -> V3 {
    V3::new(0.0, p.y, p.z)
}

/// Anchored meridian about a long edge at the point where `x = x0`.
fn long_edge_meridian(cfg: &WedgeConfig, base: P3, e: FrameEdge, x0: f64, frac: f64) -> (LoopPolyline, f64) {
    let (a, b) = cfg.frame().edge(e);
    let lambda = (x0 - a.x) / (b.x - a.x);
    let c = a + (b - a) * lambda;
    let t = x0 / cfg.h;
    let r = frac * (1.0 - t.abs()) / 2.0;
    let pts = circle_loop(c, b - a, outward_from_axis(&c), r, 16);
    (LoopPolyline::anchored(base, &pts), r)
}

/// Anchored meridian about a short edge, a square in the plane `z = w0`
/// for `S1` or `y = w0` for `S2`.
fn short_edge_meridian(cfg: &WedgeConfig, base: P3, e: FrameEdge, w0: f64, r: f64) -> LoopPolyline {
    let h = cfg.h;
    let pts = match e {
        FrameEdge::S1 => square_loop(P3::new(-h, 0.0, w0), V3::z(), -V3::x(), r),
        _ => square_loop(P3::new(h, w0, 0.0), V3::y(), V3::x(), r),
    };
    LoopPolyline::anchored(base, &pts)
}

fn sample(ls: &LabeledSurface, lp: &LoopPolyline, around: String, position: f64, radius: f64) -> Result<LoopSample, MonodromyError> {
    let perm = ls.loop_permutation(lp)?;
    Ok(LoopSample {
        around,
        position,
        radius,
        perm,
        moves_sheet1: !perm.fixes(1),
    })
}

/// Samples meridians about every long edge and about the short edges within
/// the wire distance, all of which must move sheet 1. When `tau` is set it
/// also runs a wide loop around `S1` that threads the tunnel past `C1`.
pub fn wetting_check(ls: &LabeledSurface, cfg: &WedgeConfig) -> Result<WettingReport, MonodromyError> {
    let h = cfg.h;
    let base = ls.basepoint();
    let delta = wire_distance(cfg);
    let mut p1 = Vec::new();
    for e in FrameEdge::LONG {
        for k in 1..=9 {
            let lambda = k as f64 / 10.0;
            let x0 = h - 2.0 * h * lambda;
            for frac in [0.1, 0.4, 0.8] {
                let (lp, r) = long_edge_meridian(cfg, base, e, x0, frac);
                p1.push(sample(ls, &lp, e.name().to_string(), lambda, r)?);
            }
        }
    }
    let mut p2 = Vec::new();
    for (e, planes) in [(FrameEdge::S1, vec![-0.3, 0.3]), (FrameEdge::S2, vec![-0.3, 0.0, 0.3])] {
        for w0 in planes {
            for frac in [0.1, 0.3, 0.6, 0.9] {
                let r = frac * delta;
                let lp = short_edge_meridian(cfg, base, e, w0, r);
                p2.push(sample(ls, &lp, e.name().to_string(), w0, r)?);
            }
        }
    }
    let far_loop = match cfg.tau {
        Some(tau) => {
            let z0 = -0.05;
            let (x0, x1) = (-h - 1.0, 0.5 * h * tau);
            let pts = [
                P3::new(x0, 0.0, z0),
                P3::new(x0, -1.5, z0),
                P3::new(x1, -1.5, z0),
                P3::new(x1, 1.5, z0),
                P3::new(x0, 1.5, z0),
            ];
            Some(sample(ls, &LoopPolyline::anchored(base, &pts), "S1".into(), z0, 1.5)?)
        }
        None => None,
    };
    Ok(WettingReport {
        delta,
        p1_ok: p1.iter().all(|s| s.moves_sheet1),
        p2_ok: p2.iter().all(|s| s.moves_sheet1),
        far_loop_fixes_sheet1: far_loop.as_ref().is_some_and(|s| !s.moves_sheet1),
        p1,
        p2,
        far_loop,
    })
}

/// Anchored meridian realizing `arc`, right-handed about the oriented edge.
pub fn arc_meridian(cfg: &WedgeConfig, base: P3, arc: ArcId) -> LoopPolyline {
    let h = cfg.h;
    let sh = cfg.s * h;
    let mid = |a: f64, b: f64| 0.5 * (a + b);
    let (edge, x0) = match arc {
        ArcId::S1 => return short_edge_meridian(cfg, base, FrameEdge::S1, 0.3, 0.2 * wire_distance(cfg)),
        ArcId::S2 => return short_edge_meridian(cfg, base, FrameEdge::S2, 0.3, 0.2 * wire_distance(cfg)),
        ArcId::L3Outside => (FrameEdge::L3, 0.0),
        ArcId::L { edge, piece } => {
            let cuts: Vec<f64> = match edge {
                1 => vec![-h, sh, h],
                2 => vec![-h, -sh, sh, h],
                3 => vec![-h, -0.5 * h, 0.0, 0.5 * h, h],
                _ => vec![-h, -sh, h],
            };
            let p = (piece as usize).clamp(1, cuts.len() - 1);
            let e = [FrameEdge::L1, FrameEdge::L2, FrameEdge::L3, FrameEdge::L4][(edge as usize).clamp(1, 4) - 1];
            let x = match (edge, piece) {
                (3, 2) => -0.25 * h,
                (3, 3) => 0.25 * h,
                _ => mid(cuts[p - 1], cuts[p]),
            };
            (e, x)
        }
    };
    long_edge_meridian(cfg, base, edge, x0, 0.3).0
}
