//! The `soapfilm` subcommands as library functions returning serializable
//! reports.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use soapfilm::analytics::{
    comparison_margin, competitor_central_area, cone_central_lower_bound, crossover_h,
    min_f_lower_bound, skew_faceted_area,
};
use soapfilm::covers::{enumerate_valid_covers_with, WettingMode};
use soapfilm::flow::{minimize, nw_distance, triple_edge_angles, FlowParams, FlowReport};
use soapfilm::geometry::{
    build_competitor_mesh, build_cone_mesh, build_skew_mesh, make_config, WedgeConfig,
};
use soapfilm::group::{CoverSpec, Generator, Perm3};
use soapfilm::mesh::FilmMesh;
use soapfilm::monodromy::{
    check_local_triviality, label_surface, wetting_check, MonodromyError, PieceLabels,
    TrivialityReport, WettingReport,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

fn invalid(e: impl fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

fn numerical(e: impl fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FilmKind {
    Competitor,
    Cone,
    Skew,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SpecChoice {
    Canonical,
    Alternative,
}

impl SpecChoice {
    pub fn spec(self) -> CoverSpec {
        match self {
            SpecChoice::Canonical => CoverSpec::canonical(),
            SpecChoice::Alternative => CoverSpec::alternative(),
        }
    }
}

pub fn config(h: f64, s: f64, tau: Option<f64>) -> Result<WedgeConfig, CliError> {
    make_config(h, s, tau).map_err(invalid)
}

pub fn build_film(kind: FilmKind, cfg: &WedgeConfig, resolution: f64) -> Result<FilmMesh, CliError> {
    match kind {
        FilmKind::Competitor => build_competitor_mesh(cfg, resolution),
        FilmKind::Cone => build_cone_mesh(cfg, resolution),
        FilmKind::Skew => build_skew_mesh(cfg, resolution),
    }
    .map_err(invalid)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverRow {
    pub a: Perm3,
    pub b: Perm3,
    pub c: Perm3,
    pub d: Perm3,
    pub e: Perm3,
    pub canonical: bool,
    pub alternative: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoversReport {
    pub schema_version: u32,
    pub mode: &'static str,
    pub count: usize,
    pub covers: Vec<CoverRow>,
}

pub fn run_enumerate(strong: bool) -> CoversReport {
    let mode = if strong { WettingMode::Strong } else { WettingMode::Weak };
    let covers: Vec<CoverRow> = enumerate_valid_covers_with(mode)
        .into_iter()
        .map(|s| CoverRow {
            a: s.get(Generator::A),
            b: s.get(Generator::B),
            c: s.get(Generator::C),
            d: s.get(Generator::D),
            e: s.get(Generator::E),
            canonical: s == CoverSpec::canonical(),
            alternative: s == CoverSpec::alternative(),
        })
        .collect();
    CoversReport {
        schema_version: SCHEMA_VERSION,
        mode: if strong { "strong" } else { "weak" },
        count: covers.len(),
        covers,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsRow {
    pub schema_version: u32,
    pub h: f64,
    pub s: f64,
    pub tau: f64,
    pub min_f_lower_bound: f64,
    pub skew_lower: f64,
    pub skew_upper: f64,
    pub competitor_central_area: f64,
    pub cone_central_lower_bound: f64,
    pub comparison_margin: f64,
    pub crossover_h: Option<f64>,
}

pub fn run_bounds_table(h_list: &[f64], s_list: &[f64], tau: f64) -> Result<Vec<BoundsRow>, CliError> {
    let crossover = crossover_h(tau).ok();
    let mut rows = Vec::new();
    for &h in h_list {
        for &s in s_list {
            config(h, s, None)?;
            rows.push(BoundsRow {
                schema_version: SCHEMA_VERSION,
                h,
                s,
                tau,
                min_f_lower_bound: min_f_lower_bound(h, s),
                skew_lower: 2.0 * h,
                skew_upper: skew_faceted_area(h),
                competitor_central_area: competitor_central_area(h, tau),
                cone_central_lower_bound: cone_central_lower_bound(h, tau),
                comparison_margin: comparison_margin(h, tau),
                crossover_h: crossover,
            });
        }
    }
    Ok(rows)
}

/// Competitor and conelike films evolved side by side at one `(h, resolution)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub schema_version: u32,
    pub h: f64,
    pub s: f64,
    pub tau: f64,
    pub resolution: f64,
    pub competitor_area: Option<f64>,
    pub cone_area: Option<f64>,
    /// Competitor minus cone; negative when the competitor wins.
    pub difference: Option<f64>,
    pub competitor_nw: Option<f64>,
    pub cone_nw: Option<f64>,
    pub competitor_iters: Option<usize>,
    pub cone_iters: Option<usize>,
    pub analytic_margin: f64,
    pub error: Option<String>,
}

struct Evolved {
    area: f64,
    nw: Option<f64>,
    iters: usize,
}

fn evolve_one(kind: FilmKind, cfg: &WedgeConfig, resolution: f64, params: &FlowParams) -> Result<Evolved, String> {
    let mut mesh = build_film(kind, cfg, resolution).map_err(|e| e.to_string())?;
    let report = minimize(&mut mesh, params, Some(&cfg.wires())).map_err(|e| format!("{kind:?}: {e}"))?;
    Ok(Evolved {
        area: report.final_area,
        nw: report.min_wire_distance,
        iters: report.iters,
    })
}

/// One row per `(h, level)` in input order. Flow failures are recorded in
/// the row's `error` field and do not abort the sweep.
pub fn run_compare(
    h_list: &[f64],
    s: f64,
    tau: f64,
    levels: &[f64],
    params: &FlowParams,
) -> Result<Vec<CompareRow>, CliError> {
    params.validate().map_err(invalid)?;
    let mut jobs = Vec::new();
    for &h in h_list {
        let cfg = config(h, s, Some(tau))?;
        for &res in levels {
            if !(res > 0.0 && res.is_finite()) {
                return Err(invalid(format!("resolution must be positive, got {res}")));
            }
            jobs.push((cfg, res));
        }
    }
    Ok(jobs
        .par_iter()
        .map(|(cfg, res)| {
            let (comp, cone) = rayon::join(
                || evolve_one(FilmKind::Competitor, cfg, *res, params),
                || evolve_one(FilmKind::Cone, cfg, *res, params),
            );
            let errors: Vec<String> = [&comp, &cone]
                .iter()
                .filter_map(|r| r.as_ref().err().cloned())
                .collect();
            let comp = comp.ok();
            let cone = cone.ok();
            CompareRow {
                schema_version: SCHEMA_VERSION,
                h: cfg.h,
                s,
                tau,
                resolution: *res,
                competitor_area: comp.as_ref().map(|c| c.area),
                cone_area: cone.as_ref().map(|c| c.area),
                difference: comp.as_ref().zip(cone.as_ref()).map(|(a, b)| a.area - b.area),
                competitor_nw: comp.as_ref().and_then(|c| c.nw),
                cone_nw: cone.as_ref().and_then(|c| c.nw),
                competitor_iters: comp.as_ref().map(|c| c.iters),
                cone_iters: cone.as_ref().map(|c| c.iters),
                analytic_margin: comparison_margin(cfg.h, tau),
                error: (!errors.is_empty()).then(|| errors.join("; ")),
            }
        })
        .collect())
}

/// CSV with a header row, `.` decimals and LF line endings. Missing values
/// are empty fields.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(invalid)?;
    }
    let bytes = w.into_inner().map_err(invalid)?;
    String::from_utf8(bytes).map_err(invalid)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolveReport {
    pub schema_version: u32,
    pub film: FilmKind,
    pub config: WedgeConfig,
    pub resolution: f64,
    pub params: FlowParams,
    pub triangles: usize,
    pub flow: FlowReport,
    pub nw_distance: f64,
    pub triple_edges: usize,
    /// Median over triple edges of the largest deviation from 120°, in degrees.
    pub triple_angle_median_deviation: Option<f64>,
}

pub fn run_evolve(
    kind: FilmKind,
    cfg: &WedgeConfig,
    resolution: f64,
    params: &FlowParams,
) -> Result<(EvolveReport, FilmMesh), CliError> {
    params.validate().map_err(invalid)?;
    let mut mesh = build_film(kind, cfg, resolution)?;
    let flow = minimize(&mut mesh, params, Some(&cfg.wires())).map_err(numerical)?;
    let angles = triple_edge_angles(&mesh);
    let mut devs: Vec<f64> = angles
        .iter()
        .map(|a| a.iter().map(|x| (x - 120.0).abs()).fold(0.0, f64::max))
        .collect();
    devs.sort_by(f64::total_cmp);
    let report = EvolveReport {
        schema_version: SCHEMA_VERSION,
        film: kind,
        config: *cfg,
        resolution,
        params: params.clone(),
        triangles: mesh.triangles.len(),
        nw_distance: nw_distance(&mesh, &cfg.wires()),
        triple_edges: devs.len(),
        triple_angle_median_deviation: devs.get(devs.len() / 2).copied(),
        flow,
    };
    Ok((report, mesh))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub schema_version: u32,
    pub config: WedgeConfig,
    pub spec: SpecChoice,
    pub labels: PieceLabels,
    pub local_triviality: TrivialityReport,
    pub wetting: WettingReport,
    pub wetting_ok: bool,
}

fn monodromy_error(e: MonodromyError) -> CliError {
    match e {
        MonodromyError::Degenerate(_) => numerical(e),
        _ => invalid(e),
    }
}

pub fn read_mesh(text: &str, cfg: &WedgeConfig) -> Result<FilmMesh, CliError> {
    FilmMesh::from_obj(text, &cfg.frame().segments()).map_err(invalid)
}

pub fn run_check_film(mesh: &FilmMesh, cfg: &WedgeConfig, spec: SpecChoice) -> Result<CheckReport, CliError> {
    let ls = label_surface(mesh, cfg, &spec.spec()).map_err(monodromy_error)?;
    let local_triviality = check_local_triviality(&ls).map_err(monodromy_error)?;
    let wetting = wetting_check(&ls, cfg).map_err(monodromy_error)?;
    Ok(CheckReport {
        schema_version: SCHEMA_VERSION,
        config: *cfg,
        spec,
        labels: ls.labels,
        wetting_ok: wetting.ok(),
        local_triviality,
        wetting,
    })
}

/// The initial mesh as OBJ, labelled when a spec is given.
pub fn run_export(
    kind: FilmKind,
    cfg: &WedgeConfig,
    resolution: f64,
    spec: Option<SpecChoice>,
) -> Result<String, CliError> {
    let mesh = build_film(kind, cfg, resolution)?;
    Ok(match spec {
        Some(spec) => label_surface(&mesh, cfg, &spec.spec())
            .map_err(monodromy_error)?
            .mesh
            .to_obj(),
        None => mesh.to_obj(),
    })
}
