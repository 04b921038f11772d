mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("supercritical: {0}")]
    Supercritical(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<dirac_gap::Error> for CliError {
    fn from(e: dirac_gap::Error) -> Self {
        use dirac_gap::Error as E;
        match e {
            E::Domain(_) => Self::Validation(e.to_string()),
            E::Supercritical(_) => Self::Supercritical(e.to_string()),
            _ => Self::Convergence(e.to_string()),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            Self::Validation(_) => 2,
            Self::Convergence(_) => 3,
            Self::Supercritical(_) => 4,
            Self::Io(_) => 1,
        }
    }
}

/// Flag overrides applied on top of the config file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

#[derive(Parser)]
#[command(name = "dirac-gap", version, about = "Gap eigenvalues of Dirac operators with nonnegative potentials")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// JSON config for the subcommand; missing fields take defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for random initial data and Lanczos start vectors.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Eigensolver / ODE tolerance override.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Closed-form alpha_star(p) and Lambda_D curves in d = 1.
    #[command(name = "keller-1d")]
    Keller1d,
    /// Birman-Schwinger branches (Dirac and Schrodinger) for a grid potential.
    BsSpectrum,
    /// Radial shooting curves alpha_star^rad(p) and alpha -> Lambda_D^rad.
    Radial,
    /// Self-consistent optimal-potential iteration in d = 2.
    Scf,
    /// Lieb-Thirring report: Riesz mean, bound and counting chain.
    Lt,
    /// Explicit solution at lambda = -m compared with shooting.
    WpExact,
}

fn run(cli: &Cli) -> Result<Vec<String>, CliError> {
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t < 1.0) {
            return Err(CliError::Validation("--tol must lie in (0, 1)".into()));
        }
    }
    let o = Overrides { seed: cli.seed, tol: cli.tol };
    let c = cli.config.as_ref();
    let out = &cli.out;
    let run = match cli.cmd {
        Cmd::Keller1d => commands::keller_1d(&config::load(c)?, out, &o)?,
        Cmd::BsSpectrum => commands::bs_spectrum(&config::load(c)?, out, &o)?,
        Cmd::Radial => commands::radial(&config::load(c)?, out, &o)?,
        Cmd::Scf => commands::scf(&config::load(c)?, out, &o)?,
        Cmd::Lt => commands::lt(&config::load(c)?, out, &o)?,
        Cmd::WpExact => commands::wp_exact(&config::load(c)?, out, &o)?,
    };
    let mut files = run.files.clone();
    files.push("summary.json".into());
    println!("config_sha256={}", run.hash());
    Ok(files)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("DIRAC_GAP_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", cli.out.join(f).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
