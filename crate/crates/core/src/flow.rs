//! Area-decreasing gradient flow on film meshes.
//!
//! Each vertex moves by `-step ∇A / (m + viscosity)`, where `∇A` is the exact
//! gradient of the piecewise-linear area and `m` a third of the one-ring area.
//! A step that would raise the area or flip a triangle is halved.

use std::collections::HashMap;

use nalgebra::{Matrix3, Point3, Vector3};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::Wires;
use crate::mesh::{Constraint, FilmMesh, MeshError};

type P3 = Point3<f64>;
type V3 = Vector3<f64>;

pub const MAX_HALVINGS: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("step stalled after {MAX_HALVINGS} halvings at iteration {iter} (blocking triangle {blocking:?})")]
    StalledStep { iter: usize, blocking: Option<usize> },
    #[error("topology change at iteration {iter}: triangle {triangle} collapsed")]
    TopologyChange { iter: usize, triangle: usize },
    #[error("mesh is not symmetric under the wedge symmetry group")]
    NotSymmetric,
    #[error("invalid flow parameters: {0}")]
    BadParams(&'static str),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowParams {
    pub step: f64,
    pub viscosity: f64,
    pub max_iters: usize,
    pub area_tol: f64,
    /// Iterations between refinement passes; 0 disables refinement.
    pub refine_every: usize,
    pub target_edge: f64,
    /// Triangles smaller than this count as a collapse.
    pub min_triangle_area: f64,
    pub symmetrize: bool,
    /// Weight of the tangential relaxation at full step; 0 gives the bare
    /// gradient flow.
    pub smoothing: f64,
    /// Iterations between edge-flip passes; 0 disables them.
    pub equiangulate_every: usize,
    /// Move interior vertices along the surface normal only, and triple-curve
    /// vertices across the curve only.
    pub normal_only: bool,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self {
            step: 0.1,
            viscosity: 0.5,
            max_iters: 20_000,
            area_tol: 1e-6,
            refine_every: 0,
            target_edge: crate::geometry::DEFAULT_RESOLUTION,
            min_triangle_area: 1e-6,
            symmetrize: false,
            smoothing: 0.3,
            equiangulate_every: 10,
            normal_only: true,
        }
    }
}

impl FlowParams {
    pub fn validate(&self) -> Result<(), FlowError> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(FlowError::BadParams("step must be positive"));
        }
        if !(self.viscosity >= 0.0 && self.viscosity.is_finite()) {
            return Err(FlowError::BadParams("viscosity must be non-negative"));
        }
        if !(self.smoothing >= 0.0 && self.smoothing <= 1.0) {
            return Err(FlowError::BadParams("smoothing must lie in [0, 1]"));
        }
        if !(self.area_tol > 0.0) {
            return Err(FlowError::BadParams("area_tol must be positive"));
        }
        if self.refine_every > 0 && !(self.target_edge > 0.0) {
            return Err(FlowError::BadParams("target_edge must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowReport {
    pub initial_area: f64,
    pub final_area: f64,
    pub area_history: Vec<f64>,
    pub min_wire_distance: Option<f64>,
    pub converged: bool,
    pub iters: usize,
    pub halvings: usize,
    pub refinements: usize,
}

pub const CONVERGENCE_WINDOW: usize = 50;

pub fn mesh_area(mesh: &FilmMesh) -> Result<f64, FlowError> {
    for t in 0..mesh.triangles.len() {
        if mesh.triangle_area(t) <= 0.0 {
            return Err(MeshError::DegenerateTriangle(t).into());
        }
    }
    Ok(ordered_area(mesh))
}

fn triangle_areas(mesh: &FilmMesh) -> Vec<f64> {
    (0..mesh.triangles.len())
        .into_par_iter()
        .map(|t| mesh.triangle_area(t))
        .collect()
}

fn ordered_area(mesh: &FilmMesh) -> f64 {
    triangle_areas(mesh).iter().sum()
}

/// Exact gradient of the total area with respect to every vertex.
pub fn area_gradient(mesh: &FilmMesh) -> Vec<V3> {
    let per_tri: Vec<[V3; 3]> = (0..mesh.triangles.len())
        .into_par_iter()
        .map(|t| {
            let [a, b, c] = mesh.corners(t);
            let n = (b - a).cross(&(c - a));
            let len = n.norm();
            if len == 0.0 {
                return [V3::zeros(); 3];
            }
            let n = n / len;
            [
                0.5 * n.cross(&(c - b)),
                0.5 * n.cross(&(a - c)),
                0.5 * n.cross(&(b - a)),
            ]
        })
        .collect();
    let mut grad = vec![V3::zeros(); mesh.vertices.len()];
    for (tri, g) in mesh.triangles.iter().zip(&per_tri) {
        for k in 0..3 {
            grad[tri.v[k]] += g[k];
        }
    }
    grad
}

/// One third of the one-ring area of every vertex.
pub fn vertex_masses(mesh: &FilmMesh) -> Vec<f64> {
    let areas = triangle_areas(mesh);
    let mut m = vec![0.0; mesh.vertices.len()];
    for (tri, a) in mesh.triangles.iter().zip(&areas) {
        for &v in &tri.v {
            m[v] += a / 3.0;
        }
    }
    m
}

/// The order-8 symmetry group of the wedge, as orthogonal matrices.
pub fn wedge_symmetries() -> Vec<Matrix3<f64>> {
    let s4 = Matrix3::new(-1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0);
    let refl = Matrix3::new(1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0);
    let mut group: Vec<Matrix3<f64>> = vec![Matrix3::identity()];
    let mut i = 0;
    while i < group.len() {
        for g in [s4, refl] {
            let m = group[i] * g;
            if !group.iter().any(|x: &Matrix3<f64>| (x - m).amax() < 1e-12) {
                group.push(m);
            }
        }
        i += 1;
    }
    group
}

/// For every vertex, the index of its image under each wedge symmetry.
pub struct SymmetryOrbits {
    ops: Vec<Matrix3<f64>>,
    images: Vec<Vec<usize>>,
}

impl SymmetryOrbits {
    pub fn detect(mesh: &FilmMesh) -> Result<Self, FlowError> {
        let scale = 1e8;
        let key = |p: &P3| {
            [
                (p.x * scale).round() as i64,
                (p.y * scale).round() as i64,
                (p.z * scale).round() as i64,
            ]
        };
        let index: HashMap<[i64; 3], usize> =
            mesh.vertices.iter().enumerate().map(|(i, p)| (key(p), i)).collect();
        let ops = wedge_symmetries();
        let mut images = Vec::with_capacity(ops.len());
        for g in &ops {
            let img = mesh
                .vertices
                .iter()
                .map(|p| index.get(&key(&P3::from(g * p.coords))).copied())
                .collect::<Option<Vec<_>>>()
                .ok_or(FlowError::NotSymmetric)?;
            images.push(img);
        }
        Ok(Self { ops, images })
    }

    fn symmetrize(&self, field: &[V3]) -> Vec<V3> {
        let n = self.ops.len() as f64;
        (0..field.len())
            .map(|v| {
                let mut acc = V3::zeros();
                for (g, img) in self.ops.iter().zip(&self.images) {
                    acc += g.transpose() * field[img[v]];
                }
                acc / n
            })
            .collect()
    }

    fn symmetrize_scalar(&self, field: &[f64]) -> Vec<f64> {
        let n = self.ops.len() as f64;
        (0..field.len())
            .map(|v| self.images.iter().map(|img| field[img[v]]).sum::<f64>() / n)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub area_before: f64,
    pub area_after: f64,
    pub step_used: f64,
    pub halvings: usize,
}

fn descent_direction(
    mesh: &FilmMesh,
    viscosity: f64,
    orbits: Option<&SymmetryOrbits>,
    regularizer: Option<&Regularizer>,
) -> Vec<V3> {
    let mut grad = area_gradient(mesh);
    let mut mass = vertex_masses(mesh);
    if let Some(r) = regularizer {
        r.drop_tangential(mesh, &mut grad);
    }
    if let Some(o) = orbits {
        grad = o.symmetrize(&grad);
        mass = o.symmetrize_scalar(&mass);
    }
    (0..mesh.vertices.len())
        .map(|v| match mesh.constraints[v] {
            Constraint::Pinned => V3::zeros(),
            Constraint::Free => -grad[v] / (mass[v] + viscosity),
            Constraint::OnSegment(k) => {
                let s = &mesh.segments[k];
                let d = (s.b - s.a).normalize();
                -d * grad[v].dot(&d) / (mass[v] + viscosity)
            }
        })
        .collect()
}

enum Stencil {
    Fixed,
    Surface { tris: Vec<usize> },
    Curve(usize, usize),
}

/// Tangential relaxation of vertex positions: interior vertices drift
/// towards the centroid of their ring within the tangent plane, vertices on
/// triple curves and frame segments along the curve.
pub struct Regularizer {
    stencils: Vec<Stencil>,
}

impl Regularizer {
    pub fn new(mesh: &FilmMesh) -> Self {
        let n = mesh.vertices.len();
        let mut curve: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut border: Vec<Vec<usize>> = vec![Vec::new(); n];
        for ((a, b), ts) in mesh.edge_map() {
            let bucket = match ts.len() {
                1 => &mut border,
                2 => continue,
                _ => &mut curve,
            };
            bucket[a].push(b);
            bucket[b].push(a);
        }
        let mut tris: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (t, tri) in mesh.triangles.iter().enumerate() {
            for &v in &tri.v {
                tris[v].push(t);
            }
        }
        let stencils = (0..n)
            .map(|v| match mesh.constraints[v] {
                Constraint::Pinned => Stencil::Fixed,
                Constraint::OnSegment(_) => match (border[v].len(), curve[v].len()) {
                    (2, 0) => Stencil::Curve(border[v][0], border[v][1]),
                    _ => Stencil::Fixed,
                },
                Constraint::Free => match (border[v].len(), curve[v].len()) {
                    (0, 0) => Stencil::Surface {
                        tris: std::mem::take(&mut tris[v]),
                    },
                    (0, 2) => Stencil::Curve(curve[v][0], curve[v][1]),
                    _ => Stencil::Fixed,
                },
            })
            .collect();
        Self { stencils }
    }

    fn surface_normal(mesh: &FilmMesh, tris: &[usize]) -> Option<V3> {
        let first = mesh.cross(tris[0]);
        let n = tris.iter().fold(V3::zeros(), |acc, &t| {
            let c = mesh.cross(t);
            if c.dot(&first) >= 0.0 {
                acc + c
            } else {
                acc - c
            }
        });
        let len = n.norm();
        (len > 0.0).then(|| n / len)
    }

    /// Removes the tangential part of the area gradient at interior and
    /// triple-curve vertices, leaving placement along the surface to the
    /// relaxation term.
    pub fn drop_tangential(&self, mesh: &FilmMesh, grad: &mut [V3]) {
        let x = &mesh.vertices;
        for (v, st) in self.stencils.iter().enumerate() {
            if mesh.constraints[v] != Constraint::Free {
                continue;
            }
            match st {
                Stencil::Surface { tris, .. } => {
                    if let Some(n) = Self::surface_normal(mesh, tris) {
                        grad[v] = n * grad[v].dot(&n);
                    }
                }
                Stencil::Curve(a, b) => {
                    let d = x[*b] - x[*a];
                    let len2 = d.norm_squared();
                    if len2 > 0.0 {
                        grad[v] -= d * (grad[v].dot(&d) / len2);
                    }
                }
                Stencil::Fixed => {}
            }
        }
    }

    pub fn field(&self, mesh: &FilmMesh) -> Vec<V3> {
        let x = &mesh.vertices;
        self.stencils
            .par_iter()
            .enumerate()
            .map(|(v, st)| match st {
                Stencil::Fixed => V3::zeros(),
                Stencil::Curve(a, b) => {
                    let d = x[*b] - x[*a];
                    let len2 = d.norm_squared();
                    if len2 == 0.0 {
                        return V3::zeros();
                    }
                    let off = (x[*a].coords + x[*b].coords) * 0.5 - x[v].coords;
                    d * (off.dot(&d) / len2)
                }
                Stencil::Surface { tris, .. } => {
                    let (mut acc, mut wsum) = (V3::zeros(), 0.0);
                    for &t in tris {
                        let w = mesh.triangle_area(t);
                        acc += mesh.centroid(t).coords * w;
                        wsum += w;
                    }
                    if wsum == 0.0 {
                        return V3::zeros();
                    }
                    let off = acc / wsum - x[v].coords;
                    match Self::surface_normal(mesh, tris) {
                        Some(n) => off - n * off.dot(&n),
                        None => V3::zeros(),
                    }
                }
            })
            .collect()
    }
}

fn apply(mesh: &FilmMesh, base: &[P3], dir: &[V3], tangential: &[V3], step: f64, relax: f64) -> Vec<P3> {
    (0..base.len())
        .map(|v| {
            let mut p = base[v];
            if !dir.is_empty() {
                p += dir[v] * step;
            }
            if !tangential.is_empty() {
                p += tangential[v] * relax;
            }
            match mesh.constraints[v] {
                Constraint::OnSegment(k) => mesh.segments[k].project(&p),
                Constraint::Pinned => base[v],
                Constraint::Free => p,
            }
        })
        .collect()
}

fn first_flip(mesh: &FilmMesh, old_normals: &[V3]) -> Option<usize> {
    (0..mesh.triangles.len())
        .into_par_iter()
        .find_first(|&t| mesh.cross(t).dot(&old_normals[t]) <= 0.0)
}

struct StepContext<'a> {
    params: &'a FlowParams,
    orbits: Option<&'a SymmetryOrbits>,
    regularizer: Option<&'a Regularizer>,
}

/// Moves vertices along the regularizing field, keeping the move only if
/// the area does not grow and no triangle flips.
fn relax(mesh: &mut FilmMesh, ctx: &StepContext) {
    let Some(r) = ctx.regularizer else { return };
    if ctx.params.smoothing <= 0.0 {
        return;
    }
    let mut field = r.field(mesh);
    if let Some(o) = ctx.orbits {
        field = o.symmetrize(&field);
    }
    let area_before = ordered_area(mesh);
    let base = mesh.vertices.clone();
    let normals: Vec<V3> = (0..mesh.triangles.len()).map(|t| mesh.cross(t)).collect();
    let mut w = ctx.params.smoothing;
    for _ in 0..8 {
        mesh.vertices = apply(mesh, &base, &[], &field, 0.0, w);
        if ordered_area(mesh) <= area_before && first_flip(mesh, &normals).is_none() {
            return;
        }
        w *= 0.5;
    }
    mesh.vertices = base;
}

/// Tries `step`, halving on an area increase or a flipped triangle.
fn descend(mesh: &mut FilmMesh, step: f64, ctx: &StepContext, iter: usize) -> Result<StepInfo, FlowError> {
    let area_before = ordered_area(mesh);
    relax(mesh, ctx);
    let area_relaxed = ordered_area(mesh);
    let dir = descent_direction(
        mesh,
        ctx.params.viscosity,
        ctx.orbits,
        ctx.regularizer.filter(|_| ctx.params.normal_only),
    );
    let base = mesh.vertices.clone();
    let normals: Vec<V3> = (0..mesh.triangles.len()).map(|t| mesh.cross(t)).collect();
    let mut h = step;
    let mut blocking = None;
    for halvings in 0..=MAX_HALVINGS {
        mesh.vertices = apply(mesh, &base, &dir, &[], h, 0.0);
        let area_after = ordered_area(mesh);
        blocking = first_flip(mesh, &normals);
        if area_after <= area_relaxed && blocking.is_none() {
            return Ok(StepInfo {
                area_before,
                area_after,
                step_used: h,
                halvings,
            });
        }
        h *= 0.5;
    }
    mesh.vertices = base;
    Err(FlowError::StalledStep { iter, blocking })
}

/// A single step of the flow with the step size of `params`.
pub fn flow_step(mesh: &mut FilmMesh, params: &FlowParams) -> Result<StepInfo, FlowError> {
    params.validate()?;
    let orbits = if params.symmetrize {
        Some(SymmetryOrbits::detect(mesh)?)
    } else {
        None
    };
    let regularizer = (params.smoothing > 0.0 || params.normal_only).then(|| Regularizer::new(mesh));
    let ctx = StepContext {
        params,
        orbits: orbits.as_ref(),
        regularizer: regularizer.as_ref(),
    };
    descend(mesh, params.step, &ctx, 0)
}

fn smallest_triangle(mesh: &FilmMesh) -> (usize, f64) {
    triangle_areas(mesh)
        .into_iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (t, a)| if a < best.1 { (t, a) } else { best })
}

/// Runs the flow until the relative area change over
/// [`CONVERGENCE_WINDOW`] iterations drops below `area_tol`.
pub fn minimize(
    mesh: &mut FilmMesh,
    params: &FlowParams,
    wires: Option<&Wires>,
) -> Result<FlowReport, FlowError> {
    params.validate()?;
    let mut orbits = if params.symmetrize {
        Some(SymmetryOrbits::detect(mesh)?)
    } else {
        None
    };
    let initial_area = mesh_area(mesh)?;
    let mut regularizer = (params.smoothing > 0.0 || params.normal_only).then(|| Regularizer::new(mesh));
    let mut history = vec![initial_area];
    let mut nw = wires.map(|w| nw_distance(mesh, w));
    let mut step = params.step;
    let mut halvings = 0;
    let mut refinements = 0;
    let mut converged = false;
    let mut iters = 0;
    while iters < params.max_iters {
        iters += 1;
        let ctx = StepContext {
            params,
            orbits: orbits.as_ref(),
            regularizer: regularizer.as_ref(),
        };
        let info = descend(mesh, step, &ctx, iters)?;
        halvings += info.halvings;
        step = if info.halvings == 0 {
            (info.step_used * 1.25).min(params.step)
        } else {
            info.step_used
        };
        history.push(info.area_after);
        let (t, a) = smallest_triangle(mesh);
        if a < params.min_triangle_area {
            return Err(FlowError::TopologyChange { iter: iters, triangle: t });
        }
        let mut remeshed = false;
        if params.refine_every > 0 && iters % params.refine_every == 0 && mesh.refine(2.0 * params.target_edge) > 0 {
            refinements += 1;
            remeshed = true;
            if orbits.is_some() {
                orbits = Some(SymmetryOrbits::detect(mesh)?);
            }
        }
        if params.equiangulate_every > 0
            && !params.symmetrize
            && iters % params.equiangulate_every == 0
            && mesh.equiangulate(3) > 0
        {
            remeshed = true;
        }
        if remeshed && regularizer.is_some() {
            regularizer = Some(Regularizer::new(mesh));
        }
        if remeshed {
            *history.last_mut().unwrap() = ordered_area(mesh);
        }
        if let (Some(w), Some(d)) = (wires, nw.as_mut()) {
            if iters % CONVERGENCE_WINDOW == 0 {
                *d = d.min(nw_distance(mesh, w));
            }
        }
        if history.len() > CONVERGENCE_WINDOW {
            let old = history[history.len() - 1 - CONVERGENCE_WINDOW];
            let new = info.area_after;
            if (old - new).abs() < params.area_tol * new {
                converged = true;
                break;
            }
        }
    }
    if let (Some(w), Some(d)) = (wires, nw.as_mut()) {
        *d = d.min(nw_distance(mesh, w));
    }
    Ok(FlowReport {
        initial_area,
        final_area: *history.last().unwrap(),
        area_history: history,
        min_wire_distance: nw,
        converged,
        iters,
        halvings,
        refinements,
    })
}

/// Length of the intersection of the mesh with the plane `x = x0`.
pub fn section_length_at(mesh: &FilmMesh, x0: f64) -> f64 {
    let scale = mesh.vertices.iter().map(|p| p.x.abs()).fold(1.0, f64::max);
    let mut x = x0;
    // nudge the plane off mesh vertices
    while mesh.vertices.iter().any(|p| (p.x - x).abs() < 1e-12 * scale) {
        x += 1e-9 * scale;
    }
    let mut total = 0.0;
    for t in 0..mesh.triangles.len() {
        let c = mesh.corners(t);
        let mut pts = Vec::with_capacity(2);
        for k in 0..3 {
            let (a, b) = (c[k], c[(k + 1) % 3]);
            let (da, db) = (a.x - x, b.x - x);
            if da * db < 0.0 {
                pts.push(a + (b - a) * (da / (da - db)));
            }
        }
        if pts.len() == 2 {
            total += (pts[1] - pts[0]).norm();
        }
    }
    total
}

/// Section length at `x = h t`.
pub fn section_length(mesh: &FilmMesh, h: f64, t: f64) -> f64 {
    if t.abs() >= 1.0 {
        return 0.0;
    }
    section_length_at(mesh, h * t)
}

fn closest_on_triangle(p: &P3, a: &P3, b: &P3, c: &P3) -> P3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

pub fn point_triangle_distance(p: &P3, tri: &[P3; 3]) -> f64 {
    (p - closest_on_triangle(p, &tri[0], &tri[1], &tri[2])).norm()
}

pub fn segment_segment_distance(p1: &P3, q1: &P3, p2: &P3, q2: &P3) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let (s, t);
    if a <= f64::EPSILON && e <= f64::EPSILON {
        return r.norm();
    }
    if a <= f64::EPSILON {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= f64::EPSILON {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    ((p1 + d1 * s) - (p2 + d2 * t)).norm()
}

fn segment_hits_triangle(p: &P3, q: &P3, tri: &[P3; 3]) -> bool {
    let d = q - p;
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let h = d.cross(&e2);
    let det = e1.dot(&h);
    if det.abs() < 1e-300 {
        return false;
    }
    let inv = 1.0 / det;
    let s = p - tri[0];
    let u = s.dot(&h) * inv;
    if !(0.0..=1.0).contains(&u) {
        return false;
    }
    let qv = s.cross(&e1);
    let v = d.dot(&qv) * inv;
    if v < 0.0 || u + v > 1.0 {
        return false;
    }
    let t = e2.dot(&qv) * inv;
    (0.0..=1.0).contains(&t)
}

pub fn segment_triangle_distance(p: &P3, q: &P3, tri: &[P3; 3]) -> f64 {
    if segment_hits_triangle(p, q, tri) {
        return 0.0;
    }
    let mut best = point_triangle_distance(p, tri).min(point_triangle_distance(q, tri));
    for k in 0..3 {
        best = best.min(segment_segment_distance(p, q, &tri[k], &tri[(k + 1) % 3]));
    }
    best
}

/// Minimum distance between the mesh and the two wires.
pub fn nw_distance(mesh: &FilmMesh, wires: &Wires) -> f64 {
    let segs = [wires.c1.endpoints(), wires.c2.endpoints()];
    (0..mesh.triangles.len())
        .into_par_iter()
        .map(|t| {
            let tri = mesh.corners(t);
            segs.iter()
                .map(|(a, b)| segment_triangle_distance(a, b, &tri))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min)
}

/// Angles in degrees between consecutive sheets around every edge shared
/// by exactly three triangles.
pub fn triple_edge_angles(mesh: &FilmMesh) -> Vec<[f64; 3]> {
    let mut out = Vec::new();
    for ((a, b), ts) in mesh.edge_map() {
        if ts.len() != 3 {
            continue;
        }
        let pa = mesh.vertices[a];
        let axis = (mesh.vertices[b] - pa).normalize();
        let mut wings: Vec<V3> = ts
            .iter()
            .map(|&t| {
                let tri = mesh.triangles[t].v;
                let c = tri.iter().copied().find(|&v| v != a && v != b).unwrap();
                let w = mesh.vertices[c] - pa;
                (w - axis * w.dot(&axis)).normalize()
            })
            .collect();
        let e1 = wings[0];
        let e2 = axis.cross(&e1);
        let angle = |w: &V3| w.dot(&e2).atan2(w.dot(&e1)).rem_euclid(std::f64::consts::TAU);
        wings.sort_by(|x, y| angle(x).total_cmp(&angle(y)));
        let th: Vec<f64> = wings.iter().map(angle).collect();
        let deg = |x: f64| x.to_degrees();
        out.push([
            deg(th[1] - th[0]),
            deg(th[2] - th[1]),
            deg(std::f64::consts::TAU - th[2] + th[0]),
        ]);
    }
    out
}
