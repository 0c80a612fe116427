mod commands;
mod error;
mod scene;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Curve, Method};
use error::CliError;
use scene::SceneFile;

/// Volumes, surface measures and ellipsoidal bounds for Minkowski sums of
/// centred ellipsoids.
#[derive(Debug, Parser)]
#[command(name = "ellipsum", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Boundary points and principal curvatures as CSV.
    Boundary {
        scene: PathBuf,
        #[arg(long, default_value_t = 360)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Volume of the sum.
    Volume {
        scene: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Divergence)]
        method: Method,
        /// Sphere quadrature resolution; defaults depend on the dimension.
        #[arg(long)]
        resolution: Option<usize>,
        /// Monte-Carlo sample count.
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        /// Monte-Carlo seed (required for `--method montecarlo`).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inner and outer ellipsoidal volume bounds as JSON.
    Bounds {
        scene: PathBuf,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG figure of a planar scene.
    Plot {
        scene: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "inner,john,sum")]
        show: Vec<Curve>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force reference values.
    Oracle {
        scene: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 10_000)]
        polyline_resolution: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

fn load(path: &Path) -> Result<ellipsum::geometry::EllipsoidSum, CliError> {
    let file = SceneFile::load(path)?;
    log::debug!(
        "loaded {} ({} terms, dimension {}, modified {:?}) with ellipsum {}",
        file.path.display(),
        file.scene.len(),
        file.scene.dim(),
        file.provenance.modified,
        file.provenance.tool_version
    );
    Ok(file.scene)
}

fn run(command: Command) -> Result<(), CliError> {
    let (text, out) = match command {
        Command::Boundary { scene, samples, out } => {
            let s = load(&scene)?;
            (commands::boundary(&s, samples)?, out)
        }
        Command::Volume {
            scene,
            method,
            resolution,
            samples,
            seed,
            out,
        } => {
            let s = load(&scene)?;
            (commands::volume(&s, method, resolution, samples, seed)?, out)
        }
        Command::Bounds { scene, resolution, out } => {
            let s = load(&scene)?;
            (commands::bounds(&s, resolution)?, out)
        }
        Command::Plot { scene, show, out } => {
            let s = load(&scene)?;
            (commands::plot(&s, &show)?, out)
        }
        Command::Oracle {
            scene,
            seed,
            samples,
            polyline_resolution,
            out,
        } => {
            let s = load(&scene)?;
            (commands::oracle(&s, samples, seed, polyline_resolution)?, out)
        }
    };
    emit(&text, out.as_deref())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
