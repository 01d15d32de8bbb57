//! `hawkes-granger`: simulate, estimate, build graphs, query them and check fit
//! from the command line. Exit status 0 on success, 1 on usage or parse
//! errors, 2 on numerical failures.

mod commands;
mod formats;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

/// Failure classes, mapped to exit codes 1 and 2.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<hawkes_granger::Error> for Failure {
    fn from(e: hawkes_granger::Error) -> Self {
        use hawkes_granger::Error::*;
        match e {
            NonStationary { .. }
            | SingularSystem
            | EventBudgetExceeded { .. }
            | InsufficientData(_)
            | NonMonotoneCompensator { .. }
            | TooFewEvents { .. } => Failure::Numerical(e.to_string()),
            SingularCovariance { .. } => Failure::Numerical(format!(
                "{e}; increase T, decrease k, or set --ridge to a small positive value"
            )),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "hawkes-granger", version, about = "Multivariate Hawkes processes and Granger causality graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Shared numeric and output settings. Any of them may come from a JSON file
/// given with `--config`; flags win over the file.
#[derive(Args, Debug, Default, Clone)]
pub struct Common {
    /// Bin width.
    #[arg(long, global = true)]
    pub h: Option<f64>,
    /// Autoregressive order (number of lag bins).
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Observation horizon.
    #[arg(long = "T", global = true)]
    pub horizon: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Ridge added to the lag covariance diagonal.
    #[arg(long, global = true)]
    pub ridge: Option<f64>,
    /// Threshold constant for calling a link nonzero.
    #[arg(long = "threshold-c", global = true)]
    pub threshold_c: Option<f64>,
    /// Main output file; stdout when absent for text outputs.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON file with any of: h, k, T, seed, ridge, threshold_c, out, steps_out, max_events, points.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub h: Option<f64>,
    pub k: Option<usize>,
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    pub seed: Option<u64>,
    pub ridge: Option<f64>,
    pub threshold_c: Option<f64>,
    pub out: Option<PathBuf>,
    pub steps_out: Option<PathBuf>,
    pub max_events: Option<usize>,
    pub points: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate a model spec and write an event file.
    Simulate {
        /// Model spec JSON.
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "max-events")]
        max_events: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Fit step-function link estimates to an event file.
    Estimate {
        #[arg(long)]
        events: PathBuf,
        /// Number of components, when trailing components have no events.
        #[arg(long)]
        d: Option<usize>,
        /// Clamp negative coefficients to zero.
        #[arg(long)]
        nonneg: bool,
        /// Step-function CSV; defaults to the output path with a `.steps.csv` suffix.
        #[arg(long = "steps-out")]
        steps_out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Threshold an estimate into a causality graph edge list.
    Graph {
        #[arg(long)]
        estimate: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Global Markov queries on an edge list.
    Markov {
        /// Edge-list file.
        #[arg(long)]
        graph: PathBuf,
        #[command(subcommand)]
        query: Query,
        #[command(flatten)]
        common: Common,
    },
    /// Residual quantiles and KS tests for an event file under a fitted or given model.
    Gof {
        #[arg(long)]
        events: PathBuf,
        #[arg(long, conflicts_with = "model", required_unless_present = "model")]
        estimate: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Quantile grid size.
        #[arg(long)]
        points: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

/// Vertex sets are 1-based, comma separated, e.g. `1,2,3` or `{1,2,3}`.
#[derive(Subcommand, Debug)]
pub enum Query {
    /// Is N_A Granger non-causal for N_B with respect to N_S?
    Noncausal {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        s: String,
    },
    /// Does C separate A from B in an undirected graph?
    Separated {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value = "")]
        c: String,
    },
    /// Moral graph of a directed graph.
    Moral,
    /// Vertices with a directed path into B.
    Ancestors {
        #[arg(long)]
        b: String,
    },
    /// Moral graph of the ancestral closure of S.
    Subprocess {
        #[arg(long)]
        s: String,
    },
    /// Reduction H(S); a directed input is first replaced by its subprocess graph.
    Reduce {
        #[arg(long)]
        s: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}
