use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod error;
mod scenario;

use error::CliError;
use scenario::ModeName;

#[derive(Debug, Parser)]
#[command(name = "rcia", version, about = "Receiver-cooperation DoF regions, schedules and simulations")]
struct Cli {
    /// Worker threads for trial execution (default: available cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a DoF region or outer bound as exact fractions.
    Region(RegionArgs),
    /// Run a scheme over seeded trials and export results.
    Simulate(SimulateArgs),
    /// Run the consistency suite over pinned or listed configurations.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Antennas {
    /// Interference channel antenna counts.
    #[arg(long, num_args = 4, value_names = ["M1", "M2", "N1", "N2"], conflicts_with = "bc")]
    pub ic: Option<Vec<usize>>,
    /// Broadcast channel antenna counts.
    #[arg(long, num_args = 3, value_names = ["M", "N1", "N2"])]
    pub bc: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    /// Region name: 1..7 (or thm1..thm7) or perfect-csit.
    #[arg(long)]
    pub thm: String,
    #[command(flatten)]
    pub antennas: Antennas,
    /// Directory for region_constraints.csv and region_vertices.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON scenario file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub antennas: Antennas,
    /// rcia, equal-n, unequal, bc, point-to-point, silent, or a schedule .json file.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Block count of the unequal scheme, or slot count of the silent one.
    #[arg(long)]
    pub blocks: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeName>,
    /// Transmit power in dB; repeat for a grid.
    #[arg(long = "power-db", allow_negative_numbers = true)]
    pub power_db: Vec<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, env = "RCIA_SEED")]
    pub seed: Option<u64>,
    /// Output directory (default rcia-out).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// JSON suite file with a config list and optional sampling settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Noise-free trials per measured scheme.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, env = "RCIA_SEED")]
    pub seed: Option<u64>,
    /// Also check region containment in the outer bounds on this many sampled configs.
    #[arg(long)]
    pub sampled: Option<usize>,
    /// Restrict sampling to one family: equal-n, unequal, bc or all.
    #[arg(long = "sample-family")]
    pub sample_family: Option<String>,
    /// Largest antenna count drawn when sampling.
    #[arg(long = "max-antennas")]
    pub max_antennas: Option<usize>,
    /// Directory for verify.csv and verify.txt.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Negative control: doubles every region before the flags are evaluated.
    #[arg(long = "corrupt-region", hide = true)]
    pub corrupt_region: bool,
}

fn init_pool(jobs: Option<usize>) -> Result<(), CliError> {
    if let Some(j) = jobs {
        if j == 0 {
            return Err(CliError::Config("--jobs must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = init_pool(cli.jobs).and_then(|()| match cli.command {
        Command::Region(a) => commands::region(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Verify(a) => commands::verify(&a),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
