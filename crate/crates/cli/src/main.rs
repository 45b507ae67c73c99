//! Command-line front end: ingest trips, cluster graphs, compare
//! partitions, synthesize benchmark graphs, and export renderings.

mod assignments;
mod commands;
mod export;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use flowclust_core::{Error, ErrorKind};

#[derive(Parser)]
#[command(
    name = "flowclust",
    version,
    about = "Cluster weighted directed graphs built from origin/destination trip data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Aggregate a trips CSV into a graph file and write an ingest report.
    Ingest {
        /// Trips CSV with a header row.
        #[arg(long)]
        trips: PathBuf,
        /// Output graph file.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "mean-travel-time")]
        weight_mode: String,
        #[arg(long, default_value = "pickup_community_area")]
        pickup_col: String,
        #[arg(long, default_value = "dropoff_community_area")]
        dropoff_col: String,
        #[arg(long, default_value = "trip_seconds")]
        duration_col: String,
        /// Report JSON path (default: <out>.report.json).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Cluster a graph file and write assignments plus a run manifest.
    Cluster {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        algorithm: Algorithm,
        /// Cluster count (required by every algorithm except leiden;
        /// optional for walktrap, which cuts at max modularity without it).
        #[arg(long)]
        k: Option<usize>,
        /// SVD latent dimension: "auto" or a positive integer.
        #[arg(long, default_value = "auto")]
        d: String,
        /// Leiden resolution (default: mean off-diagonal weight).
        #[arg(long)]
        gamma: Option<f64>,
        /// Walktrap random-walk length.
        #[arg(long, default_value_t = 4)]
        walk_length: usize,
        /// Teleport probability for cdl/randwalk.
        #[arg(long, default_value_t = 0.0)]
        teleport: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        /// Assignments CSV output.
        #[arg(long)]
        out: PathBuf,
        /// Manifest JSON path (default: <out>.manifest.json).
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Compare two assignment files (ARI, NMI).
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Report JSON output (also printed to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a directed stochastic-block-model graph with ground truth.
    Synth {
        /// Comma-separated block sizes, e.g. "40,40".
        #[arg(long)]
        blocks: String,
        #[arg(long)]
        p_in: f64,
        #[arg(long)]
        p_out: f64,
        /// Intra-block weight range "lo,hi".
        #[arg(long, default_value = "1,1")]
        w_in: String,
        /// Cross-block weight range "lo,hi".
        #[arg(long, default_value = "1,1")]
        w_out: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output graph file.
        #[arg(long)]
        out: PathBuf,
        /// Ground-truth assignments CSV.
        #[arg(long)]
        truth: PathBuf,
    },
    /// Export a clustered graph for rendering.
    Export {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        assignments: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "kebab-case")]
pub enum Algorithm {
    SpectralUnnorm,
    SpectralNorm,
    Leiden,
    Walktrap,
    SimpleSym,
    Bibliometric,
    Cdl,
    Svd,
    Randwalk,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::SpectralUnnorm => "spectral-unnorm",
            Algorithm::SpectralNorm => "spectral-norm",
            Algorithm::Leiden => "leiden",
            Algorithm::Walktrap => "walktrap",
            Algorithm::SimpleSym => "simple-sym",
            Algorithm::Bibliometric => "bibliometric",
            Algorithm::Cdl => "cdl",
            Algorithm::Svd => "svd",
            Algorithm::Randwalk => "randwalk",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "kebab-case")]
pub enum ExportFormat {
    Dot,
    Graphml,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Ingest {
            trips,
            out,
            weight_mode,
            pickup_col,
            dropoff_col,
            duration_col,
            report,
        } => commands::ingest(
            &trips,
            &out,
            &weight_mode,
            pickup_col,
            dropoff_col,
            duration_col,
            report,
        ),
        Command::Cluster {
            graph,
            algorithm,
            k,
            d,
            gamma,
            walk_length,
            teleport,
            seed,
            restarts,
            out,
            manifest,
        } => commands::cluster(commands::ClusterArgs {
            graph,
            algorithm,
            k,
            d,
            gamma,
            walk_length,
            teleport,
            seed,
            restarts,
            out,
            manifest,
        }),
        Command::Compare { a, b, out } => commands::compare(&a, &b, out),
        Command::Synth {
            blocks,
            p_in,
            p_out,
            w_in,
            w_out,
            seed,
            out,
            truth,
        } => commands::synth(&blocks, p_in, p_out, &w_in, &w_out, seed, &out, &truth),
        Command::Export {
            graph,
            assignments,
            format,
            out,
        } => commands::export(&graph, &assignments, format, &out),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> ExitCode {
    match e.kind() {
        ErrorKind::Config => ExitCode::from(2),
        ErrorKind::Numeric => ExitCode::from(3),
        ErrorKind::Io => ExitCode::from(4),
    }
}
