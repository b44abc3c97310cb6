//! `cosserat`: batch front end for the Cosserat plate solver.
//!
//! Exit codes: 0 on success, 1 for configuration or input errors, 2 when a
//! solve fails.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cosserat_core::mesh::{generate_plate_with_hole, generate_rectangle, HoleSpec};

use commands::CliError;
use config::{read_mesh, RunConfig, SolverMethod};

#[derive(Parser)]
#[command(name = "cosserat", version, about = "Bending of Cosserat elastic plates by P1 finite elements")]
struct Cli {
    /// Override the linear solver of the config.
    #[arg(long, global = true, value_enum)]
    solver: Option<SolverMethod>,
    /// Override the relative residual tolerance of the config.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one plate and write fields, resultants and a run report.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        /// Check that the solution at the chosen eta equals the blend of the
        /// eta = 0 and eta = 1 solutions.
        #[arg(long)]
        verify_linearity: bool,
    },
    /// Convergence study against the sinusoidal manufactured solution.
    Mms {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Stress concentration around centred holes of several radii.
    Scf {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Mesh utilities.
    #[command(subcommand)]
    Mesh(MeshCommand),
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Structured rectangle, or a rectangle with a centred hole.
    Generate {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 4)]
        nx: usize,
        #[arg(long, default_value_t = 4)]
        ny: usize,
        /// Cut a hole of this radius at the plate centre.
        #[arg(long)]
        hole_radius: Option<f64>,
        /// Target edge length of the hole mesh.
        #[arg(long, default_value_t = 0.1)]
        density: f64,
        /// `.msh` writes Gmsh 2.2, anything else the native format.
        #[arg(long)]
        output: PathBuf,
    },
    /// Uniform red refinement.
    Refine {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value_t = 1)]
        levels: usize,
    },
    /// Print mesh statistics.
    Info { input: PathBuf },
    /// Convert between Gmsh 2.2 and the native format (by extension).
    Convert { input: PathBuf, output: PathBuf },
}

fn load(run: &RunArgs, cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(&run.config)?;
    if let Some(s) = cli.solver {
        cfg.solver.method = s;
    }
    if let Some(t) = cli.tol {
        cfg.solver.tol = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Solve { run, verify_linearity } => {
            commands::solve(&load(run, cli)?, &run.out, *verify_linearity)
        }
        Command::Mms { run } => commands::mms(&load(run, cli)?, &run.out),
        Command::Scf { run } => commands::scf(&load(run, cli)?, &run.out),
        Command::Mesh(m) => mesh(m),
    }
}

fn mesh(cmd: &MeshCommand) -> Result<(), CliError> {
    let usage = |e: cosserat_core::mesh::MeshError| CliError::Usage(e.to_string());
    match cmd {
        MeshCommand::Generate { a, b, nx, ny, hole_radius, density, output } => {
            let mesh = match hole_radius {
                Some(r) => generate_plate_with_hole(&HoleSpec {
                    a: *a,
                    b: *b,
                    radius: *r,
                    center: [a / 2.0, b / 2.0],
                    density: *density,
                })
                .map_err(usage)?,
                None => generate_rectangle(*a, *b, *nx, *ny).map_err(usage)?,
            };
            commands::write_mesh(&mesh, output)
        }
        MeshCommand::Refine { input, output, levels } => {
            let mut mesh = read_mesh(input)?;
            for _ in 0..*levels {
                mesh = cosserat_core::mesh::refine_uniform(&mesh);
            }
            commands::write_mesh(&mesh, output)
        }
        MeshCommand::Info { input } => {
            print!("{}", commands::mesh_info(&read_mesh(input)?));
            Ok(())
        }
        MeshCommand::Convert { input, output } => commands::write_mesh(&read_mesh(input)?, output),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
