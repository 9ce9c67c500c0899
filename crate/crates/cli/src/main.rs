//! `toric-mellin`: batch studies of twisted Mellin transforms, lattice-polytope
//! Euler–Maclaurin sums, Bargmann spectral measures and distribution laws.
//!
//! Exit codes: 0 on success, 2 on a configuration error, 3 when a numerical
//! routine fails to converge.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use toric_mellin::quadrature::DEFAULT_SEED;

use crate::output::Format;

/// Caps the number of worker threads when set.
pub const THREADS_ENV: &str = "TORIC_MELLIN_THREADS";

#[derive(Debug, Parser)]
#[command(name = "toric-mellin", version, about = "Twisted Mellin transforms and toric distribution laws")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for every Monte Carlo estimate.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Monte Carlo samples per volume estimate.
    #[arg(long, global = true, default_value_t = 1 << 20)]
    pub samples: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficients of g_0..g_K with degree and generating-function checks.
    Gk {
        #[arg(long = "max-k")]
        max_k: u32,
    },
    /// Transform by closed form or quadrature against the truncated series.
    Transform {
        #[arg(long)]
        function: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        #[arg(long = "N", alias = "n", value_delimiter = ',', required = true)]
        n: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        order: usize,
    },
    /// Fitted decay of the series truncation error.
    EmpiricalOrder {
        #[arg(long)]
        function: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        #[arg(long = "N-list", alias = "n-list", value_delimiter = ',', required = true)]
        n_list: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        order: usize,
    },
    /// Riemann sums over dilated lattice polytopes against the EM expansion.
    Em {
        #[arg(long)]
        polytope: PathBuf,
        #[arg(long)]
        function: PathBuf,
        #[arg(long = "N-list", alias = "n-list", value_delimiter = ',', required = true)]
        n_list: Vec<u64>,
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
    /// Spectral measure by lattice sum, by per-state expectations and by EM.
    Spectral {
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        function: PathBuf,
        #[arg(long = "N-list", alias = "n-list", value_delimiter = ',', required = true)]
        n_list: Vec<u64>,
        /// Overrides the level stored in the weights file.
        #[arg(long)]
        alpha: Option<u64>,
        #[arg(long = "em-order")]
        em_order: Option<usize>,
    },
    /// Exact superlevel volumes against the asymptotic predictors.
    Distlaw {
        /// JSON array `a` (or `{"a": [...]}`); `k = round(N a)`.
        #[arg(long = "weights-direction")]
        weights_direction: PathBuf,
        #[arg(long = "N-list", alias = "n-list", value_delimiter = ',', required = true)]
        n_list: Vec<u64>,
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        /// plain | power | exp:ALPHA,BETA | logn
        #[arg(long, default_value = "plain")]
        rescale: String,
        /// leading | refined | degenerate
        #[arg(long, default_value = "refined")]
        mode: String,
    },
    /// Layer-cake integral of the superlevel volumes, which should be 1.
    LayerCake {
        #[arg(long = "N", alias = "n", value_delimiter = ',', required = true)]
        n: Vec<u64>,
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u64>,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize =
        value.trim().parse().map_err(|_| format!("{THREADS_ENV} must be a positive integer, got {value:?}"))?;
    if threads == 0 {
        return Err(format!("{THREADS_ENV} must be positive"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
