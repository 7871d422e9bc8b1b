//! Command-line interface for the spherecode library.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "spherecode", version, about = "Minimal-energy point configurations on the sphere")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Working precision in decimal digits.
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Base seed for random starts.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Potential: log, r1, r2 or rs:<k>.
    #[arg(long, global = true)]
    pub potential: Option<String>,
    /// File receiving the primary output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// File receiving the run manifest.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    /// Upper bound on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Descent,
    Anneal,
    /// Anneal, then polish with descent.
    Both,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Descent => "descent",
            Algo::Anneal => "anneal",
            Algo::Both => "both",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct SpecSource {
    /// Spec file.
    #[arg(long, conflicts_with = "builtin")]
    pub spec: Option<PathBuf>,
    /// Registry entry for this point count.
    #[arg(long)]
    pub builtin: Option<usize>,
    /// Parameter file; defaults to the registry seed with --builtin.
    #[arg(long)]
    pub params: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Energy of a point file.
    Energy {
        #[arg(long)]
        input: PathBuf,
        /// Project off-sphere points back onto the sphere.
        #[arg(long)]
        renormalize: bool,
    },
    /// Search for a minimal configuration.
    Minimize {
        /// Number of points for random starts.
        #[arg(long, conflicts_with = "input")]
        n: Option<usize>,
        /// Starting configuration.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Algo::Descent)]
        algo: Algo,
        /// Random restarts when starting from --n.
        #[arg(long, default_value_t = 1)]
        restarts: usize,
        /// Annealing passes per round.
        #[arg(long, default_value_t = 2000)]
        passes: usize,
        /// Annealing stops once a round improves the energy by less than this.
        #[arg(long)]
        final_precision: Option<String>,
        #[arg(long)]
        max_iters: Option<usize>,
        /// File receiving per-restart results and the energy history.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Instantiate a parameterization as a point file.
    Build {
        #[command(flatten)]
        source: SpecSource,
    },
    /// Newton-refine a parameter vector.
    Refine {
        #[command(flatten)]
        source: SpecSource,
        /// Target digits; defaults to the working precision.
        #[arg(long)]
        target: Option<u32>,
    },
    /// Tangent-space Hessian spectrum and verdict.
    Hessian {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        zero_tol: Option<String>,
    },
    /// Planes, Gram groups and regular polygons.
    Symmetry {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        tol: Option<String>,
    },
    /// Gram signature of a point file.
    Gram {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        tol: Option<String>,
    },
    /// Recover an integer polynomial with the given root.
    Algdep {
        /// File holding the value, or the value itself.
        #[arg(long, allow_hyphen_values = true)]
        value: String,
        #[arg(long, default_value_t = 8)]
        max_degree: usize,
        /// Search even polynomials only.
        #[arg(long)]
        even: bool,
        /// Recover a polynomial for exp(value), as for logarithmic energies.
        #[arg(long)]
        exp: bool,
    },
    /// Re-run the command recorded in a manifest.
    Replay { manifest_file: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let args: Vec<String> = std::env::args().skip(1).collect();
    match commands::run(cli, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<commands::UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
