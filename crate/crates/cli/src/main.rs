use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use soapfilm::flow::FlowParams;
use soapfilm_cli::{
    config, read_mesh, run_bounds_table, run_check_film, run_compare, run_enumerate, run_evolve,
    run_export, to_csv, CliError, FilmKind, SpecChoice,
};

#[derive(Parser)]
#[command(name = "soapfilm", version, about = "Soap films on a tetrahedral wedge")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the valid triple covers as JSON.
    EnumerateCovers {
        #[arg(long)]
        strong: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form bounds over a grid of h and s, as CSV.
    BoundsTable {
        #[arg(long, value_delimiter = ',', required = true)]
        h: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.002679491924311227")]
        s: Vec<f64>,
        #[arg(long, default_value_t = TWO_MINUS_SQRT3)]
        tau: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve competitor and conelike films for each h and resolution, as CSV.
    Compare {
        #[arg(long, value_delimiter = ',', required = true)]
        h: Vec<f64>,
        #[arg(long, default_value_t = TWO_MINUS_SQRT3 / 100.0)]
        s: f64,
        #[arg(long, default_value_t = TWO_MINUS_SQRT3)]
        tau: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.14,0.1")]
        levels: Vec<f64>,
        #[command(flatten)]
        flow: FlowArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve one film and report as JSON.
    Evolve {
        #[arg(long, value_enum)]
        film: FilmKind,
        #[command(flatten)]
        wedge: WedgeArgs,
        #[arg(long, default_value_t = 0.1)]
        resolution: f64,
        #[command(flatten)]
        flow: FlowArgs,
        /// Write the evolved mesh here as OBJ.
        #[arg(long)]
        mesh_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Label a mesh and run the local-triviality and wetting checks, as JSON.
    CheckFilm {
        #[arg(long)]
        mesh: PathBuf,
        #[command(flatten)]
        wedge: WedgeArgs,
        #[arg(long, value_enum, default_value = "canonical")]
        spec: SpecChoice,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write an initial mesh as OBJ.
    ExportMesh {
        #[arg(long, value_enum)]
        film: FilmKind,
        #[command(flatten)]
        wedge: WedgeArgs,
        #[arg(long, default_value_t = 0.1)]
        resolution: f64,
        /// Attach sheet labels for this cover.
        #[arg(long, value_enum)]
        spec: Option<SpecChoice>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const TWO_MINUS_SQRT3: f64 = 0.267_949_192_431_122_7;

#[derive(Args)]
struct WedgeArgs {
    #[arg(long)]
    h: f64,
    #[arg(long, default_value_t = TWO_MINUS_SQRT3 / 100.0)]
    s: f64,
    #[arg(long)]
    tau: Option<f64>,
}

#[derive(Args)]
struct FlowArgs {
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    #[arg(long, default_value_t = 0.5)]
    viscosity: f64,
    #[arg(long, default_value_t = 20_000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    area_tol: f64,
    #[arg(long, default_value_t = 0.3)]
    smoothing: f64,
    /// Average every step over the wedge symmetry group.
    #[arg(long)]
    symmetrize: bool,
}

impl FlowArgs {
    fn params(&self) -> FlowParams {
        FlowParams {
            step: self.step,
            viscosity: self.viscosity,
            max_iters: self.max_iters,
            area_tol: self.area_tol,
            smoothing: self.smoothing,
            symmetrize: self.symmetrize,
            ..FlowParams::default()
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Validation(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::EnumerateCovers { strong, out } => emit(&out, &json(&run_enumerate(strong))),
        Command::BoundsTable { h, s, tau, out } => emit(&out, &to_csv(&run_bounds_table(&h, &s, tau)?)?),
        Command::Compare {
            h,
            s,
            tau,
            levels,
            flow,
            out,
        } => emit(&out, &to_csv(&run_compare(&h, s, tau, &levels, &flow.params())?)?),
        Command::Evolve {
            film,
            wedge,
            resolution,
            flow,
            mesh_out,
            out,
        } => {
            let cfg = config(wedge.h, wedge.s, wedge.tau)?;
            let (report, mesh) = run_evolve(film, &cfg, resolution, &flow.params())?;
            if let Some(p) = &mesh_out {
                emit(&Some(p.clone()), &mesh.to_obj())?;
            }
            emit(&out, &json(&report))
        }
        Command::CheckFilm { mesh, wedge, spec, out } => {
            let cfg = config(wedge.h, wedge.s, wedge.tau)?;
            let text = std::fs::read_to_string(&mesh)
                .map_err(|e| CliError::Validation(format!("{}: {e}", mesh.display())))?;
            let mesh = read_mesh(&text, &cfg)?;
            emit(&out, &json(&run_check_film(&mesh, &cfg, spec)?))
        }
        Command::ExportMesh {
            film,
            wedge,
            resolution,
            spec,
            out,
        } => {
            let cfg = config(wedge.h, wedge.s, wedge.tau)?;
            emit(&out, &run_export(film, &cfg, resolution, spec)?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
