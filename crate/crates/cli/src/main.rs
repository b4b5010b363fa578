use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

mod commands;

use commands::Failure;

#[derive(Parser)]
#[command(name = "hyparr", version, about = "Consistency of half-space systems on real hyperplane arrangements")]
struct Cli {
    /// Worker threads for enumerations (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Largest number of hyperplanes enumerated exhaustively.
    #[arg(long, global = true, default_value_t = hyparr_core::consistency::DEFAULT_LIMIT)]
    limit: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Check that a file describes a central essential arrangement.
    Validate { file: PathBuf },
    /// Intersection lattice, Möbius values and characteristic polynomial.
    Lattice { file: PathBuf },
    /// All chambers with witness points and walls.
    Chambers { file: PathBuf },
    /// Sizes of the filtration Σ_1 ⊇ … ⊇ Σ_ℓ with gap witnesses.
    Sigma {
        file: PathBuf,
        /// List the members of Σ_k.
        #[arg(long)]
        k: Option<usize>,
        /// List the members of every Σ_k.
        #[arg(long)]
        full_sets: bool,
    },
    /// Gaps of the filtration and the homotopy groups they force to be nonzero.
    Obstruct {
        file: PathBuf,
        /// Witness-search samples when n exceeds --limit.
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Follow the flow of a sign vector from a start chamber to a sink.
    Sink {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        eps: String,
        /// Start chamber (default: the lexicographically first chamber).
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
    },
    /// Monodromy certificate for a locally consistent, globally inconsistent sign vector.
    Certify {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        eps: String,
        /// Comma-separated rational weights a_1,…,a_n.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<String>>,
    },
    /// Sample points of the sphere spanned by a sign vector in the complexified complement.
    Sphere {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        eps: String,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print a built-in arrangement: boolean, generic4, generic, x2, cx2, braid.
    Builtin {
        name: String,
        /// Number of hyperplanes (generic) or size m (braid).
        #[arg(long)]
        n: Option<usize>,
        /// Dimension (boolean, generic).
        #[arg(long)]
        l: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Cone an affine arrangement file into a central one.
    Cone { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("could not configure worker pool: {e}");
        }
    }
    let (out, code) = match commands::run(cli.command, cli.limit) {
        Ok(out) => (out, ExitCode::SUCCESS),
        Err(Failure { kind, message }) => (json!({ "error": kind, "message": message }), ExitCode::from(1)),
    };
    emit(&out);
    code
}

fn emit(v: &Value) {
    let text = serde_json::to_string_pretty(v).expect("serializable report");
    // a closed pipe downstream is not an error worth reporting
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}
