//! Experiment driver for the momentuq solvers.
//!
//! Subcommands: `run` executes a configured experiment and writes a moment
//! snapshot plus a per-iteration CSV; `reference` produces a dense
//! stochastic-collocation reference snapshot for the same configuration;
//! `compare` reports relative L² errors between two snapshots; `mesh-gen`
//! writes generated triangular meshes; `preset` dumps a built-in
//! configuration.
//!
//! Exit codes: 0 on success, 1 on configuration or I/O errors, 10 when an
//! iteration fails to converge, 11 on an ill-conditioned dual Hessian and
//! 12 on admissibility violations.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use momentuq::mesh::{generate_bend, generate_rect, write_mesh, BoxMask};
use momentuq_cli::config::ExperimentConfig;
use momentuq_cli::{presets, runner};

#[derive(Parser)]
#[command(name = "momentuq", version, about = "Uncertainty quantification for conservation laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigSource {
    /// Path to a TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Name of a built-in preset (see `momentuq preset --list`).
    #[arg(long)]
    preset: Option<String>,
    /// Override the worker count of the configuration.
    #[arg(long)]
    workers: Option<usize>,
}

impl ConfigSource {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut config = match (&self.config, &self.preset) {
            (Some(path), None) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                ExperimentConfig::from_toml(&text)?
            }
            (None, Some(name)) => presets::preset(name)
                .with_context(|| format!("unknown preset '{name}'; known: {:?}", presets::PRESET_NAMES))?,
            _ => bail!("exactly one of --config and --preset is required"),
        };
        if let Some(workers) = self.workers {
            config.solver.workers = workers;
        }
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment; writes moments.snap and run.csv.
    Run {
        #[command(flatten)]
        source: ConfigSource,
        /// Output directory (default: the config's output.dir or "out").
        #[arg(long)]
        output: Option<PathBuf>,
        /// Reference snapshot; enables per-iteration error columns.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Produce a dense Gauss-Legendre collocation reference snapshot.
    Reference {
        #[command(flatten)]
        source: ConfigSource,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Relative L² errors between two snapshots (CSV on stdout).
    Compare {
        result: PathBuf,
        reference: PathBuf,
        /// Project a higher-order result onto the reference's leading moments.
        #[arg(long)]
        allow_truncate: bool,
        /// Restrict the norms to a box: x0,x1,y0,y1.
        #[arg(long, value_delimiter = ',', num_args = 4)]
        mask: Option<Vec<f64>>,
    },
    /// Generate a triangular mesh file.
    MeshGen {
        #[command(subcommand)]
        shape: MeshShape,
    },
    /// Print a built-in preset configuration as TOML.
    Preset {
        name: Option<String>,
        /// List available preset names.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Subcommand)]
enum MeshShape {
    /// Structured-split rectangle.
    Rect {
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
        #[arg(long, default_value_t = 1.0)]
        x1: f64,
        #[arg(long, default_value_t = 0.0)]
        y0: f64,
        #[arg(long, default_value_t = 1.0)]
        y1: f64,
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        ny: usize,
        #[arg(long)]
        output: PathBuf,
    },
    /// Tube of the given width/length bent by `angle` radians above `y-bend`.
    Bend {
        #[arg(long, default_value_t = 1.0)]
        width: f64,
        #[arg(long, default_value_t = 3.0)]
        length: f64,
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        ny: usize,
        #[arg(long)]
        y_bend: f64,
        #[arg(long)]
        angle: f64,
        #[arg(long)]
        output: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(runner::exit_code(&err));
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { source, output, reference } => {
            let config = source.load()?;
            let dir = output
                .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("out"));
            let artifacts = runner::cmd_run(&config, &dir, reference.as_deref())?;
            println!("snapshot: {}", artifacts.snapshot_path.display());
            println!("csv: {}", artifacts.csv_path.display());
            Ok(())
        }
        Command::Reference { source, output } => {
            let config = source.load()?;
            let dir = output
                .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("out"));
            let path = runner::cmd_reference(&config, &dir)?;
            println!("reference: {}", path.display());
            Ok(())
        }
        Command::Compare { result, reference, allow_truncate, mask } => {
            let mask = mask.map(|v| BoxMask { x: [v[0], v[1]], y: [v[2], v[3]] });
            let csv = runner::cmd_compare(&result, &reference, allow_truncate, mask)?;
            print!("{csv}");
            Ok(())
        }
        Command::MeshGen { shape } => {
            let (mesh, output) = match shape {
                MeshShape::Rect { x0, x1, y0, y1, nx, ny, output } => {
                    (generate_rect([x0, x1], [y0, y1], nx, ny), output)
                }
                MeshShape::Bend { width, length, nx, ny, y_bend, angle, output } => {
                    (generate_bend(width, length, nx, ny, y_bend, angle), output)
                }
            };
            std::fs::write(&output, write_mesh(&mesh))
                .with_context(|| format!("writing {}", output.display()))?;
            println!("mesh: {} ({} cells)", output.display(), mesh.n_cells());
            Ok(())
        }
        Command::Preset { name, list } => {
            if list || name.is_none() {
                for n in presets::PRESET_NAMES {
                    println!("{n}");
                }
                return Ok(());
            }
            let name = name.unwrap();
            let config = presets::preset(&name)
                .with_context(|| format!("unknown preset '{name}'"))?;
            print!("{}", config.to_toml());
            Ok(())
        }
    }
}
