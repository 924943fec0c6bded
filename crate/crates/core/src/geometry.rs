//! The wedge frame `W(h)`, the two invisible wires, and faceted initial films.
//!
//! Frame vertices are `P± = (h, ±1, 0)` and `Q± = (-h, 0, ±1)`. The short edge
//! `S1` joins `Q-` to `Q+`, `S2` joins `P-` to `P+`; the long edges run from a
//! `P` vertex to a `Q` vertex:
//!
//! | edge | from | to  | faces          |
//! |------|------|-----|----------------|
//! | L1   | P+   | Q+  | back, top      |
//! | L2   | P-   | Q+  | front, top     |
//! | L3   | P+   | Q-  | back, bottom   |
//! | L4   | P-   | Q-  | front, bottom  |
//!
//! "Front" is the face through `S1` and `P-` (the `y < 0` side), "top" the
//! face through `S2` and `Q+`. The section of the wedge by `x = h t` is the
//! rectangle `|y| ≤ (1+t)/2`, `|z| ≤ (1-t)/2`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{Constraint, FilmMesh, MeshError, Piece, Segment};

pub type P3 = Point3<f64>;
pub type V3 = Vector3<f64>;

const TWO_MINUS_SQRT3: f64 = 0.267_949_192_431_122_7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("h must be positive, got {0}")]
    BadH(f64),
    #[error("s must lie in (0, 1), got {0}")]
    BadS(f64),
    #[error("tau must lie in (s, 1) = ({s}, 1), got {tau}")]
    BadTau { s: f64, tau: f64 },
    #[error("this construction needs tau")]
    MissingTau,
    #[error("resolution must be positive, got {0}")]
    BadResolution(f64),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FrameVertex {
    PPlus,
    PMinus,
    QPlus,
    QMinus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FrameEdge {
    S1,
    S2,
    L1,
    L2,
    L3,
    L4,
}

impl FrameEdge {
    pub const ALL: [FrameEdge; 6] = [
        FrameEdge::S1,
        FrameEdge::S2,
        FrameEdge::L1,
        FrameEdge::L2,
        FrameEdge::L3,
        FrameEdge::L4,
    ];
    pub const LONG: [FrameEdge; 4] = [FrameEdge::L1, FrameEdge::L2, FrameEdge::L3, FrameEdge::L4];
    pub const SHORT: [FrameEdge; 2] = [FrameEdge::S1, FrameEdge::S2];

    pub fn endpoints(self) -> (FrameVertex, FrameVertex) {
        use FrameVertex::*;
        match self {
            FrameEdge::S1 => (QMinus, QPlus),
            FrameEdge::S2 => (PMinus, PPlus),
            FrameEdge::L1 => (PPlus, QPlus),
            FrameEdge::L2 => (PMinus, QPlus),
            FrameEdge::L3 => (PPlus, QMinus),
            FrameEdge::L4 => (PMinus, QMinus),
        }
    }

    pub fn is_long(self) -> bool {
        !matches!(self, FrameEdge::S1 | FrameEdge::S2)
    }

    /// For a long edge, the signs `(y of its P end, z of its Q end)`.
    pub fn long_signs(self) -> Option<(f64, f64)> {
        match self {
            FrameEdge::L1 => Some((1.0, 1.0)),
            FrameEdge::L2 => Some((-1.0, 1.0)),
            FrameEdge::L3 => Some((1.0, -1.0)),
            FrameEdge::L4 => Some((-1.0, -1.0)),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FrameEdge::S1 => "S1",
            FrameEdge::S2 => "S2",
            FrameEdge::L1 => "L1",
            FrameEdge::L2 => "L2",
            FrameEdge::L3 => "L3",
            FrameEdge::L4 => "L4",
        }
    }
}

impl fmt::Display for FrameEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FrameEdge {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FrameEdge::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown frame edge {s:?}"))
    }
}

/// Frame of the wedge with half-spread `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub h: f64,
}

impl Frame {
    pub fn vertex(&self, v: FrameVertex) -> P3 {
        let h = self.h;
        match v {
            FrameVertex::PPlus => P3::new(h, 1.0, 0.0),
            FrameVertex::PMinus => P3::new(h, -1.0, 0.0),
            FrameVertex::QPlus => P3::new(-h, 0.0, 1.0),
            FrameVertex::QMinus => P3::new(-h, 0.0, -1.0),
        }
    }

    pub fn edge(&self, e: FrameEdge) -> (P3, P3) {
        let (a, b) = e.endpoints();
        (self.vertex(a), self.vertex(b))
    }

    pub fn edge_length(&self, e: FrameEdge) -> f64 {
        let (a, b) = self.edge(e);
        (b - a).norm()
    }

    /// Corner of the section `x = h t` on the long edge `e`.
    pub fn corner(&self, e: FrameEdge, t: f64) -> P3 {
        let (sy, sz) = e.long_signs().expect("corner of a long edge");
        section_corner(self.h, t, sy, sz)
    }

    /// Constraint segments in [`FrameEdge::ALL`] order.
    pub fn segments(&self) -> Vec<Segment> {
        FrameEdge::ALL
            .iter()
            .map(|&e| {
                let (a, b) = self.edge(e);
                Segment {
                    name: e.name().to_string(),
                    a,
                    b,
                }
            })
            .collect()
    }

    /// Distance from `p` to the frame edge `e`.
    pub fn distance_to_edge(&self, e: FrameEdge, p: &P3) -> f64 {
        let (a, b) = self.edge(e);
        point_segment_distance(p, &a, &b)
    }
}

fn section_corner(h: f64, t: f64, sy: f64, sz: f64) -> P3 {
    P3::new(h * t, sy * 0.5 * (1.0 + t), sz * 0.5 * (1.0 - t))
}

pub fn point_segment_distance(p: &P3, a: &P3, b: &P3) -> f64 {
    let d = b - a;
    let len2 = d.norm_squared();
    let t = if len2 == 0.0 {
        0.0
    } else {
        ((p - a).dot(&d) / len2).clamp(0.0, 1.0)
    };
    (p - (a + d * t)).norm()
}

/// A straight invisible wire, modelled as the segment `point + u dir`,
/// `|u| ≤ half_length`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wire {
    pub point: P3,
    pub dir: V3,
    pub half_length: f64,
}

impl Wire {
    pub fn endpoints(&self) -> (P3, P3) {
        (
            self.point - self.dir * self.half_length,
            self.point + self.dir * self.half_length,
        )
    }
}

/// `C1 = {(-sh, 0, t)}` near `S1` and `C2 = {(sh, t, 0)}` near `S2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wires {
    pub c1: Wire,
    pub c2: Wire,
}

/// Extent of the wires and phantom disks, in units of `h`.
pub const FAR_RADIUS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WedgeConfig {
    pub h: f64,
    pub s: f64,
    pub tau: Option<f64>,
}

impl WedgeConfig {
    pub fn frame(&self) -> Frame {
        Frame { h: self.h }
    }

    pub fn wires(&self) -> Wires {
        let (h, s) = (self.h, self.s);
        let half_length = FAR_RADIUS * h.max(1.0);
        Wires {
            c1: Wire {
                point: P3::new(-s * h, 0.0, 0.0),
                dir: V3::z(),
                half_length,
            },
            c2: Wire {
                point: P3::new(s * h, 0.0, 0.0),
                dir: V3::y(),
                half_length,
            },
        }
    }

    pub fn tau(&self) -> Result<f64, GeometryError> {
        self.tau.ok_or(GeometryError::MissingTau)
    }

    /// Whether the parameters fall in the range where the comparison
    /// bounds apply: `s < 2 - √3` and `s < tau < 2(2 - √3)`.
    pub fn in_comparison_range(&self) -> bool {
        self.s < TWO_MINUS_SQRT3
            && self
                .tau
                .is_some_and(|t| t > self.s && t < 2.0 * TWO_MINUS_SQRT3)
    }
}

pub fn make_config(h: f64, s: f64, tau: Option<f64>) -> Result<WedgeConfig, GeometryError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(GeometryError::BadH(h));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(GeometryError::BadS(s));
    }
    if let Some(tau) = tau {
        if !(tau > s && tau < 1.0) {
            return Err(GeometryError::BadTau { s, tau });
        }
    }
    Ok(WedgeConfig { h, s, tau })
}

/// L∞ distance between the short edges and the wires, `h (1 - s)`.
pub fn wire_distance(cfg: &WedgeConfig) -> f64 {
    cfg.h * (1.0 - cfg.s)
}

/// Default target edge length of the initial meshes.
pub const DEFAULT_RESOLUTION: f64 = 0.1;

/// Accumulates polygons with welded vertices and frame constraints read off
/// the geometry.
pub struct MeshBuilder {
    frame: Frame,
    mesh: FilmMesh,
    keys: std::collections::HashMap<[i64; 3], usize>,
}

impl MeshBuilder {
    pub fn new(frame: Frame) -> Self {
        let mesh = FilmMesh::new(frame.segments());
        Self {
            frame,
            mesh,
            keys: Default::default(),
        }
    }

    fn key(&self, p: &P3) -> [i64; 3] {
        let scale = 1e9 / self.frame.h.max(1.0);
        [
            (p.x * scale).round() as i64,
            (p.y * scale).round() as i64,
            (p.z * scale).round() as i64,
        ]
    }

    fn classify(&self, p: &P3) -> Constraint {
        let tol = 1e-12 * self.frame.h.max(1.0);
        let v = [
            FrameVertex::PPlus,
            FrameVertex::PMinus,
            FrameVertex::QPlus,
            FrameVertex::QMinus,
        ];
        if v.iter().any(|&fv| (self.frame.vertex(fv) - p).norm() <= tol) {
            return Constraint::Pinned;
        }
        for (i, &e) in FrameEdge::ALL.iter().enumerate() {
            if self.frame.distance_to_edge(e, p) <= tol {
                return Constraint::OnSegment(i);
            }
        }
        Constraint::Free
    }

    pub fn vertex(&mut self, p: P3) -> usize {
        let k = self.key(&p);
        if let Some(&i) = self.keys.get(&k) {
            return i;
        }
        let c = self.classify(&p);
        let i = self.mesh.push_vertex(p, c);
        self.keys.insert(k, i);
        i
    }

    /// Triangulates a planar convex polygon, fanning from its centroid when
    /// it has more than three corners; every triangle is wound so that its
    /// normal has a positive component along `plus`.
    pub fn polygon(&mut self, pts: &[P3], piece: Piece, plus: V3) {
        let push = |b: &mut Self, p: [P3; 3]| {
            let mut tri = p.map(|q| b.vertex(q));
            if (p[1] - p[0]).cross(&(p[2] - p[0])).dot(&plus) < 0.0 {
                tri.swap(1, 2);
            }
            b.mesh.push_triangle(tri, Some(piece));
        };
        if pts.len() == 3 {
            push(self, [pts[0], pts[1], pts[2]]);
            return;
        }
        let c = P3::from(pts.iter().fold(V3::zeros(), |acc, p| acc + p.coords) / pts.len() as f64);
        for k in 0..pts.len() {
            push(self, [c, pts[k], pts[(k + 1) % pts.len()]]);
        }
    }

    pub fn finish(self) -> FilmMesh {
        self.mesh
    }
}

/// Faceted competitor: front/back faces on `-h tau < x < 0`, top/bottom faces
/// on `0 < x < h tau`, the unit square at `x = 0`, the vertical pieces at
/// `x = ±h tau`, and cone caps over the rest.
pub fn build_competitor_mesh(cfg: &WedgeConfig, resolution: f64) -> Result<FilmMesh, GeometryError> {
    check_resolution(resolution)?;
    let tau = cfg.tau()?;
    if !(tau > cfg.s && tau < 1.0) {
        return Err(GeometryError::BadTau { s: cfg.s, tau });
    }
    let frame = cfg.frame();
    let h = cfg.h;
    let mut b = MeshBuilder::new(frame);
    let c = |t: f64, sy: f64, sz: f64| section_corner(h, t, sy, sz);
    let q = |sz: f64| frame.vertex(if sz > 0.0 { FrameVertex::QPlus } else { FrameVertex::QMinus });
    let p = |sy: f64| frame.vertex(if sy > 0.0 { FrameVertex::PPlus } else { FrameVertex::PMinus });
    let (x, y, z) = (V3::x(), V3::y(), V3::z());

    // left cap: cone from the origin restricted to x < -h tau
    let mid_l = |sz: f64| P3::new(-h * tau, 0.0, sz * tau);
    b.polygon(&[q(-1.0), q(1.0), mid_l(1.0), mid_l(-1.0)], Piece::LeftCrescent, y);
    for e in FrameEdge::LONG {
        let (sy, sz) = e.long_signs().unwrap();
        b.polygon(&[q(sz), c(-tau, sy, sz), mid_l(sz)], Piece::LeftCap(e), V3::new(0.0, -sy, sz));
    }
    // vertical pieces at x = -h tau: front and back regions of the cap section
    for (sy, piece) in [(-1.0, Piece::LeftVertFront), (1.0, Piece::LeftVertBack)] {
        b.polygon(&[c(-tau, sy, 1.0), c(-tau, sy, -1.0), mid_l(-1.0), mid_l(1.0)], piece, x);
    }
    // front and back faces on -h tau < x < 0
    b.polygon(&[c(-tau, -1.0, 1.0), c(-tau, -1.0, -1.0), c(0.0, -1.0, -1.0), c(0.0, -1.0, 1.0)], Piece::Front, y);
    b.polygon(&[c(-tau, 1.0, 1.0), c(-tau, 1.0, -1.0), c(0.0, 1.0, -1.0), c(0.0, 1.0, 1.0)], Piece::Back, -y);
    // central square
    b.polygon(&[c(0.0, -1.0, -1.0), c(0.0, 1.0, -1.0), c(0.0, 1.0, 1.0), c(0.0, -1.0, 1.0)], Piece::Square, -x);
    // top and bottom faces on 0 < x < h tau
    b.polygon(&[c(0.0, -1.0, 1.0), c(0.0, 1.0, 1.0), c(tau, 1.0, 1.0), c(tau, -1.0, 1.0)], Piece::Top, z);
    b.polygon(&[c(0.0, -1.0, -1.0), c(0.0, 1.0, -1.0), c(tau, 1.0, -1.0), c(tau, -1.0, -1.0)], Piece::Bottom, -z);
    // vertical pieces at x = h tau: top and bottom regions of the cap section
    let mid_r = |sy: f64| P3::new(h * tau, sy * tau, 0.0);
    for (sz, piece) in [(1.0, Piece::RightVertTop), (-1.0, Piece::RightVertBottom)] {
        b.polygon(&[c(tau, -1.0, sz), c(tau, 1.0, sz), mid_r(1.0), mid_r(-1.0)], piece, x);
    }
    // right cap
    b.polygon(&[p(-1.0), p(1.0), mid_r(1.0), mid_r(-1.0)], Piece::RightCrescent, z);
    for e in FrameEdge::LONG {
        let (sy, sz) = e.long_signs().unwrap();
        b.polygon(&[p(sy), c(tau, sy, sz), mid_r(sy)], Piece::RightCap(e), V3::new(0.0, -sy, sz));
    }
    let mut mesh = b.finish();
    mesh.refine(resolution);
    mesh.validate(h)?;
    Ok(mesh)
}

/// Piecewise-linear cone from the origin over the six frame edges. The two
/// crescents lie in `y = 0` (left) and `z = 0` (right).
pub fn build_cone_mesh(cfg: &WedgeConfig, resolution: f64) -> Result<FilmMesh, GeometryError> {
    check_resolution(resolution)?;
    let frame = cfg.frame();
    let o = P3::origin();
    let mut b = MeshBuilder::new(frame);
    let v = |fv| frame.vertex(fv);
    use FrameVertex::*;
    b.polygon(&[v(QMinus), v(QPlus), o], Piece::ConeCrescentLeft, V3::y());
    b.polygon(&[v(PMinus), v(PPlus), o], Piece::ConeCrescentRight, V3::z());
    for e in FrameEdge::LONG {
        let (sy, sz) = e.long_signs().unwrap();
        let (a, c) = frame.edge(e);
        b.polygon(&[a, c, o], Piece::ConeSheet(e), V3::new(0.0, -sy, sz));
    }
    let mut mesh = b.finish();
    mesh.refine(resolution);
    mesh.validate(cfg.h)?;
    Ok(mesh)
}

/// Faceted film on the skew quadrilateral of long edges: top and bottom faces
/// for `x < 0`, the unit square at `x = 0`, front and back faces for `x > 0`.
pub fn build_skew_mesh(cfg: &WedgeConfig, resolution: f64) -> Result<FilmMesh, GeometryError> {
    check_resolution(resolution)?;
    let frame = cfg.frame();
    let h = cfg.h;
    let c = |t: f64, sy: f64, sz: f64| section_corner(h, t, sy, sz);
    let mut b = MeshBuilder::new(frame);
    let (x, y, z) = (V3::x(), V3::y(), V3::z());
    let qp = frame.vertex(FrameVertex::QPlus);
    let qm = frame.vertex(FrameVertex::QMinus);
    let pp = frame.vertex(FrameVertex::PPlus);
    let pm = frame.vertex(FrameVertex::PMinus);
    b.polygon(&[qp, c(0.0, -1.0, 1.0), c(0.0, 1.0, 1.0)], Piece::SkewTop, -z);
    b.polygon(&[qm, c(0.0, -1.0, -1.0), c(0.0, 1.0, -1.0)], Piece::SkewBottom, z);
    b.polygon(&[c(0.0, -1.0, -1.0), c(0.0, 1.0, -1.0), c(0.0, 1.0, 1.0), c(0.0, -1.0, 1.0)], Piece::Square, -x);
    b.polygon(&[pm, c(0.0, -1.0, -1.0), c(0.0, -1.0, 1.0)], Piece::SkewFront, -y);
    b.polygon(&[pp, c(0.0, 1.0, -1.0), c(0.0, 1.0, 1.0)], Piece::SkewBack, y);
    let mut mesh = b.finish();
    // the apex vertices sit on a short edge only through their endpoints
    mesh.refine(resolution);
    mesh.validate(h)?;
    Ok(mesh)
}

/// Open cylinder of radius `radius` between the rings `z = ±separation/2`,
/// ring vertices pinned. Used as a catenoid initializer.
pub fn build_cylinder_mesh(radius: f64, separation: f64, around: usize, along: usize) -> FilmMesh {
    let mut mesh = FilmMesh::new(Vec::new());
    for j in 0..=along {
        let zc = -0.5 * separation + separation * j as f64 / along as f64;
        let ring = j == 0 || j == along;
        for i in 0..around {
            // stagger rows for a near-equilateral pattern
            let phase = if j % 2 == 0 { 0.0 } else { 0.5 };
            let th = 2.0 * std::f64::consts::PI * (i as f64 + phase) / around as f64;
            let c = if ring { Constraint::Pinned } else { Constraint::Free };
            mesh.push_vertex(P3::new(radius * th.cos(), radius * th.sin(), zc), c);
        }
    }
    for j in 0..along {
        for i in 0..around {
            let a = j * around + i;
            let b = j * around + (i + 1) % around;
            let c = (j + 1) * around + i;
            let d = (j + 1) * around + (i + 1) % around;
            if j % 2 == 0 {
                mesh.push_triangle([a, b, c], None);
                mesh.push_triangle([b, d, c], None);
            } else {
                mesh.push_triangle([a, d, c], None);
                mesh.push_triangle([a, b, d], None);
            }
        }
    }
    mesh
}

fn check_resolution(r: f64) -> Result<(), GeometryError> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(GeometryError::BadResolution(r))
    }
}
