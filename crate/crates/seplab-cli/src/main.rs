//! `seplab`: file-based front end to the separatrix-crossing toolkit.
//!
//! Every subcommand writes into `--out` (default `seplab-out/<command>`) and
//! finishes with a `manifest.json` listing the files it produced.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::{CliError, ErrorReport};

#[derive(Debug, Parser)]
#[command(name = "seplab", version, about = "Universal wave patterns at a semiclassical sine-Gordon separatrix crossing")]
struct Cli {
    /// Worker threads for grid fills (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Export the rational hierarchy entries and their real roots as JSON.
    Hierarchy(HierarchyArgs),
    /// Run the exact hierarchy checks and the critical-point identities.
    Identities(ProfileArgs),
    /// Inner Riemann-Hilbert solution: expansion coefficients, jumps, Lax residuals.
    Inner(InnerArgs),
    /// Region-tiling map on a (y, s) grid.
    Regions(RegionsArgs),
    /// Kink-centre curves t(z) for a range of m.
    Kinkcurves(KinkArgs),
    /// Model (cos u/2, sin u/2) on an (x, t) grid near the critical point.
    Model(ModelArgs),
    /// Direct PDE solve: binary frame dumps and energy history.
    Pde(PdeArgs),
    /// PDE-vs-model convergence table over an ε ladder.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ProfileArgs {
    /// Profile config file (TOML or JSON key-value text) or inline text; default sech with A = 3.
    #[arg(long)]
    pub profile: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct HierarchyArgs {
    /// Inclusive range of m, e.g. `-6..7`.
    #[arg(long, default_value = "-6..7", allow_hyphen_values = true)]
    pub m_range: String,
}

#[derive(Debug, Clone, Args)]
pub struct InnerArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub m: i32,
    #[arg(long, allow_negative_numbers = true)]
    pub y: f64,
    /// Extraction circle radius.
    #[arg(long, default_value_t = 12.0)]
    pub radius: f64,
    /// Samples on the extraction circle.
    #[arg(long, default_value_t = 48)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RegionsArgs {
    #[arg(long)]
    pub eps: f64,
    /// Largest |m| considered by the classifier.
    #[arg(long, default_value_t = 4)]
    pub bound: i32,
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub kappa: f64,
    /// Inclusive strip range covered by the s axis.
    #[arg(long, default_value = "-2..2", allow_hyphen_values = true)]
    pub strips: String,
    /// y interval as `lo,hi`.
    #[arg(long, default_value = "-6,6", allow_hyphen_values = true)]
    pub y_range: String,
    #[arg(long, default_value_t = 241)]
    pub ny: usize,
    #[arg(long, default_value_t = 241)]
    pub ns: usize,
}

#[derive(Debug, Clone, Args)]
pub struct KinkArgs {
    #[arg(long)]
    pub eps: f64,
    /// Direct ν override; otherwise ν comes from the profile.
    #[arg(long)]
    pub nu: Option<f64>,
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[arg(long, default_value = "-3..3", allow_hyphen_values = true)]
    pub m_range: String,
    #[arg(long, default_value = "-6,6", allow_hyphen_values = true)]
    pub z_range: String,
    #[arg(long, default_value_t = 1201)]
    pub n: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub eps: f64,
    /// `x0,x1,t0,t1`; default is x_crit ± 3ε^{2/3}, t ∈ [0, ε ln(1/ε)].
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    #[arg(long, default_value_t = 201)]
    pub nx: usize,
    #[arg(long, default_value_t = 201)]
    pub nt: usize,
    #[arg(long, default_value_t = 6)]
    pub bound: i32,
    /// Region overlap parameter; with κ > 0, points claimed by several regions go to overlaps.csv.
    #[arg(long, default_value_t = 0.0)]
    pub kappa: f64,
    #[command(flatten)]
    pub profile: ProfileArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PdeArgs {
    #[arg(long)]
    pub eps: f64,
    /// Final time; default ε ln(1/ε).
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Number of frames to dump (including t = 0).
    #[arg(long, default_value_t = 11)]
    pub frames: usize,
    /// Also write each frame as CSV.
    #[arg(long)]
    pub csv: bool,
    #[command(flatten)]
    pub profile: ProfileArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Comma-separated ε values.
    #[arg(long, default_value = "0.1875,0.09375,0.046875")]
    pub eps_ladder: String,
    /// Window half-width in units of ε^{2/3}.
    #[arg(long, default_value_t = 1.0)]
    pub window_k: f64,
    /// Window duration in units of ε ln(1/ε)/3.
    #[arg(long, default_value_t = 2.0)]
    pub window_b: f64,
    #[arg(long, default_value_t = 6)]
    pub bound: i32,
    #[command(flatten)]
    pub profile: ProfileArgs,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Hierarchy(_) => "hierarchy",
            Command::Identities(_) => "identities",
            Command::Inner(_) => "inner",
            Command::Regions(_) => "regions",
            Command::Kinkcurves(_) => "kinkcurves",
            Command::Model(_) => "model",
            Command::Pde(_) => "pde",
            Command::Compare(_) => "compare",
        }
    }
}

fn run(cli: Cli) -> Result<PathBuf, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Argument(format!("--threads {n}: {e}")))?;
    }
    let name = cli.command.name();
    let dir = cli.out.unwrap_or_else(|| PathBuf::from("seplab-out").join(name));
    let mut out = output::OutDir::create(&dir, name)?;
    match &cli.command {
        Command::Hierarchy(a) => commands::hierarchy(a, &mut out)?,
        Command::Identities(a) => commands::identities(a, &mut out)?,
        Command::Inner(a) => commands::inner(a, &mut out)?,
        Command::Regions(a) => commands::regions(a, &mut out)?,
        Command::Kinkcurves(a) => commands::kinkcurves(a, &mut out)?,
        Command::Model(a) => commands::model(a, &mut out)?,
        Command::Pde(a) => commands::pde(a, &mut out)?,
        Command::Compare(a) => commands::compare(a, &mut out)?,
    }
    out.finish()
}

fn main() -> ExitCode {
    // Usage errors exit with status 2 from inside clap.
    let cli = Cli::parse();
    let name = cli.command.name();
    match run(cli) {
        Ok(dir) => {
            eprintln!("seplab {name}: wrote {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            let report = ErrorReport { status: "error", command: name, kind: e.kind(), message: e.to_string() };
            println!("{}", serde_json::to_string_pretty(&report).unwrap_or_else(|_| e.to_string()));
            ExitCode::from(1)
        }
    }
}
