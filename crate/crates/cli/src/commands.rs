//! Subcommand implementations.

use std::fs::File;
use std::path::{Path, PathBuf};

use flowclust_core::community::{default_gamma, leiden, walktrap, LeidenConfig, WalktrapConfig};
use flowclust_core::eval::agreement_report;
use flowclust_core::graph::{
    bibliometric_symmetrize, build_graph, ingest_trips, isolated_nodes, read_graph_file,
    simple_symmetrize, write_graph_file, TripColumns,
};
use flowclust_core::partition::{Partition, UNASSIGNED};
use flowclust_core::spectral::{
    cdl_cluster, randwalk_cluster, spectral_cluster, svd_cluster, CdlConfig, ClusterOutput,
    LaplacianVariant, LatentDim, RandWalkConfig, SpectralConfig, SvdConfig,
};
use flowclust_core::synth::{generate_sbm, SbmSpec};
use flowclust_core::{DenseMatrix, Error, Result, WeightMode, WeightedDigraph};

use crate::assignments::{aligned_partitions, read_assignments, write_assignments};
use crate::export::{write_dot, write_graphml};
use crate::manifest::{json_line, sha256_of_file, write_json, CompareReport, IngestReport, RunManifest};
use crate::{Algorithm, ExportFormat};

/// Diagnostics go to stderr when FLOWCLUST_LOG is set (any non-empty value
/// except "0"), keeping stdout and output files byte-stable.
macro_rules! diag {
    ($($arg:tt)*) => {
        if std::env::var("FLOWCLUST_LOG").map_or(false, |v| !v.is_empty() && v != "0") {
            eprintln!($($arg)*);
        }
    };
}

#[allow(clippy::too_many_arguments)]
pub fn ingest(
    trips: &Path,
    out: &Path,
    weight_mode: &str,
    pickup_col: String,
    dropoff_col: String,
    duration_col: String,
    report: Option<PathBuf>,
) -> Result<()> {
    let mode = WeightMode::parse(weight_mode)?;
    let columns = TripColumns {
        pickup: pickup_col,
        dropoff: dropoff_col,
        duration: duration_col,
    };
    let summary = ingest_trips(File::open(trips)?, &columns)?;
    diag!(
        "ingest: {} rows read, {} dropped",
        summary.rows_read,
        summary.rows_dropped
    );
    let graph = build_graph(&summary.records, mode)?;
    write_graph_file(&graph, out)?;

    let isolated: Vec<u32> = isolated_nodes(&graph)
        .into_iter()
        .map(|i| graph.node_ids()[i])
        .collect();
    let report_data = IngestReport {
        rows_read: summary.rows_read,
        rows_dropped: summary.rows_dropped,
        nodes: graph.n(),
        edges: graph.edge_count(),
        isolated_nodes: isolated,
    };
    let report_path = report.unwrap_or_else(|| sibling(out, "report.json"));
    write_json(&report_path, &report_data)?;
    println!("{}", json_line(&report_data));
    Ok(())
}

pub struct ClusterArgs {
    pub graph: PathBuf,
    pub algorithm: Algorithm,
    pub k: Option<usize>,
    pub d: String,
    pub gamma: Option<f64>,
    pub walk_length: usize,
    pub teleport: f64,
    pub seed: u64,
    pub restarts: usize,
    pub out: PathBuf,
    pub manifest: Option<PathBuf>,
}

struct RunOutcome {
    partition: Partition,
    degenerate: bool,
    teleport_applied: Option<f64>,
    resolved_d: Option<usize>,
    resolved_gamma: Option<f64>,
}

pub fn cluster(args: ClusterArgs) -> Result<()> {
    let graph = read_graph_file(&args.graph)?;
    diag!(
        "cluster: {} with {} nodes, {} edges",
        args.algorithm.name(),
        graph.n(),
        graph.edge_count()
    );
    let digest = sha256_of_file(&args.graph)?;
    let outcome = dispatch(&graph, &args)?;
    diag!(
        "cluster: {} clusters found{}",
        outcome.partition.occupied_clusters(),
        if outcome.degenerate { " (degenerate spectrum)" } else { "" }
    );

    write_assignments(&args.out, graph.node_ids(), &outcome.partition)?;

    let isolated: Vec<u32> = outcome
        .partition
        .labels()
        .iter()
        .zip(graph.node_ids())
        .filter(|(&l, _)| l == UNASSIGNED)
        .map(|(_, &id)| id)
        .collect();
    let manifest = RunManifest {
        tool: "flowclust",
        version: env!("CARGO_PKG_VERSION"),
        command: "cluster",
        algorithm: args.algorithm.name().to_string(),
        graph: args.graph.display().to_string(),
        input_sha256: digest,
        k: args.k,
        clusters_found: outcome.partition.occupied_clusters(),
        d: outcome.resolved_d,
        gamma: outcome.resolved_gamma,
        walk_length: matches!(args.algorithm, Algorithm::Walktrap).then_some(args.walk_length),
        teleport: matches!(args.algorithm, Algorithm::Cdl | Algorithm::Randwalk)
            .then_some(args.teleport),
        teleport_applied: outcome.teleport_applied,
        seed: args.seed,
        restarts: args.restarts,
        degenerate: outcome.degenerate,
        isolated_nodes: isolated,
    };
    let manifest_path = args
        .manifest
        .clone()
        .unwrap_or_else(|| sibling(&args.out, "manifest.json"));
    write_json(&manifest_path, &manifest)?;
    println!("{}", json_line(&manifest));
    Ok(())
}

fn dispatch(graph: &WeightedDigraph, args: &ClusterArgs) -> Result<RunOutcome> {
    let alg = args.algorithm;
    match alg {
        Algorithm::SpectralUnnorm
        | Algorithm::SpectralNorm
        | Algorithm::SimpleSym
        | Algorithm::Bibliometric => {
            let k = require_k(args, alg)?;
            let wu = match alg {
                Algorithm::SimpleSym => simple_symmetrize(graph).weights().clone(),
                Algorithm::Bibliometric => bibliometric_symmetrize(graph).weights().clone(),
                _ => undirected_weights(graph),
            };
            let variant = if alg == Algorithm::SpectralUnnorm {
                LaplacianVariant::Unnormalized
            } else {
                LaplacianVariant::Normalized
            };
            let out = spectral_cluster(
                &wu,
                &SpectralConfig {
                    k,
                    variant,
                    seed: args.seed,
                    restarts: args.restarts,
                },
            )?;
            Ok(from_output(out))
        }
        Algorithm::Cdl => {
            let k = require_k(args, alg)?;
            let out = cdl_cluster(
                graph.weights(),
                &CdlConfig {
                    k,
                    teleport: args.teleport,
                    seed: args.seed,
                    restarts: args.restarts,
                },
            )?;
            Ok(from_output(out))
        }
        Algorithm::Svd => {
            let k = require_k(args, alg)?;
            let latent = parse_latent(&args.d)?;
            let out = svd_cluster(
                graph.weights(),
                &SvdConfig {
                    k,
                    latent,
                    seed: args.seed,
                    restarts: args.restarts,
                },
            )?;
            Ok(from_output(out))
        }
        Algorithm::Randwalk => {
            let k = require_k(args, alg)?;
            let out = randwalk_cluster(
                graph.weights(),
                &RandWalkConfig {
                    k,
                    teleport: args.teleport,
                    seed: args.seed,
                    restarts: args.restarts,
                },
            )?;
            Ok(from_output(out))
        }
        Algorithm::Leiden => {
            if args.k.is_some() {
                return Err(Error::Config(
                    "leiden derives its cluster count from --gamma; --k is not accepted".into(),
                ));
            }
            let wu = undirected_weights(graph);
            let active = cross_active(&wu);
            let sub = wu.submatrix(&active);
            let gamma = args.gamma.unwrap_or_else(|| default_gamma(&sub));
            let inner = leiden(
                &sub,
                &LeidenConfig {
                    gamma: Some(gamma),
                    max_levels: 20,
                    seed: args.seed,
                },
            )?;
            Ok(RunOutcome {
                partition: Partition::expand(&inner, &active, graph.n()),
                degenerate: false,
                teleport_applied: None,
                resolved_d: None,
                resolved_gamma: Some(gamma),
            })
        }
        Algorithm::Walktrap => {
            let wu = undirected_weights(graph);
            let active = cross_active(&wu);
            if let Some(k) = args.k {
                if k > active.len() {
                    return Err(Error::Config(format!(
                        "k = {k} exceeds the {} nodes that carry edges",
                        active.len()
                    )));
                }
            }
            let sub = wu.submatrix(&active);
            let (inner, _dendrogram) = walktrap(
                &sub,
                &WalktrapConfig {
                    t: args.walk_length,
                    k: args.k,
                },
            )?;
            Ok(RunOutcome {
                partition: Partition::expand(&inner, &active, graph.n()),
                degenerate: false,
                teleport_applied: None,
                resolved_d: None,
                resolved_gamma: None,
            })
        }
    }
}

fn from_output(out: ClusterOutput) -> RunOutcome {
    RunOutcome {
        partition: out.partition,
        degenerate: out.degenerate,
        teleport_applied: out.teleport_applied,
        resolved_d: out.latent_dim,
        resolved_gamma: None,
    }
}

fn require_k(args: &ClusterArgs, alg: Algorithm) -> Result<usize> {
    args.k.ok_or_else(|| {
        Error::Config(format!("--k is required for algorithm '{}'", alg.name()))
    })
}

fn parse_latent(d: &str) -> Result<LatentDim> {
    if d == "auto" {
        return Ok(LatentDim::Auto);
    }
    let value: usize = d
        .parse()
        .map_err(|_| Error::Config(format!("--d must be 'auto' or a positive integer, got '{d}'")))?;
    if value == 0 {
        return Err(Error::Config("--d must be at least 1".into()));
    }
    Ok(LatentDim::Fixed(value))
}

/// Undirected working matrix: the paper's simple transformation W + Wᵀ when
/// the stored graph is directed, the stored matrix otherwise.
fn undirected_weights(graph: &WeightedDigraph) -> DenseMatrix {
    if graph.weights().max_asymmetry() > 0.0 {
        simple_symmetrize(graph).weights().clone()
    } else {
        graph.weights().clone()
    }
}

/// Nodes of a symmetric matrix with at least one positive off-diagonal edge.
fn cross_active(wu: &DenseMatrix) -> Vec<usize> {
    let n = wu.rows();
    (0..n)
        .filter(|&i| (0..n).any(|j| j != i && wu.get(i, j) > 0.0))
        .collect()
}

pub fn compare(a: &Path, b: &Path, out: Option<PathBuf>) -> Result<()> {
    let rows_a = read_assignments(a)?;
    let rows_b = read_assignments(b)?;
    let (pa, pb) = aligned_partitions(&rows_a, &rows_b)?;
    let rep = agreement_report(&pa, &pb)?;
    let report = CompareReport {
        ari: rep.ari,
        nmi: rep.nmi,
        nodes_compared: pa.len() - rep.excluded,
        nodes_excluded: rep.excluded,
    };
    println!("{}", json_line(&report));
    if let Some(path) = out {
        write_json(&path, &report)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn synth(
    blocks: &str,
    p_in: f64,
    p_out: f64,
    w_in: &str,
    w_out: &str,
    seed: u64,
    out: &Path,
    truth: &Path,
) -> Result<()> {
    let spec = SbmSpec {
        block_sizes: parse_blocks(blocks)?,
        p_in,
        p_out,
        w_in: parse_range(w_in)?,
        w_out: parse_range(w_out)?,
        seed,
    };
    let (graph, truth_partition) = generate_sbm(&spec)?;
    write_graph_file(&graph, out)?;
    write_assignments(truth, graph.node_ids(), &truth_partition)?;
    println!(
        "{{\"nodes\":{},\"edges\":{},\"blocks\":{}}}",
        graph.n(),
        graph.edge_count(),
        spec.block_sizes.len()
    );
    Ok(())
}

pub fn export(
    graph_path: &Path,
    assignments_path: &Path,
    format: ExportFormat,
    out: &Path,
) -> Result<()> {
    let graph = read_graph_file(graph_path)?;
    let rows = read_assignments(assignments_path)?;
    let map: std::collections::HashMap<u32, i32> = rows.iter().copied().collect();
    if rows.len() != map.len() {
        return Err(Error::InvalidInput(
            "assignments file repeats a node id".into(),
        ));
    }
    let labels: Vec<i32> = graph
        .node_ids()
        .iter()
        .map(|id| {
            map.get(id).copied().ok_or_else(|| {
                Error::InvalidInput(format!("assignments are missing node id {id}"))
            })
        })
        .collect::<Result<_>>()?;
    match format {
        ExportFormat::Dot => write_dot(&graph, &labels, out),
        ExportFormat::Graphml => write_graphml(&graph, &labels, out),
    }
}

fn parse_blocks(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad block size '{tok}'")))
        })
        .collect()
}

fn parse_range(text: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::Config(format!(
            "weight range must be 'lo,hi', got '{text}'"
        )));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad weight '{}'", parts[0])))?;
    let hi: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad weight '{}'", parts[1])))?;
    Ok((lo, hi))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().map_or_else(
        || std::ffi::OsString::from("out"),
        std::ffi::OsStr::to_os_string,
    );
    name.push(".");
    name.push(suffix);
    path.with_file_name(name)
}
