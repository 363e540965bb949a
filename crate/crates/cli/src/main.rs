mod converge;
mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use modspec::clustering::{k_variance, representatives, weighted_kmeans, KMeansConfig, Partition};
use modspec::generators::{classical, expected_block_graph, generalized_random_graph, BlockModel, Classical};
use modspec::io::{load_edge_list, to_edge_list};
use modspec::quality::QualityReport;
use modspec::regularity::{regularity_certificate, CertificateOptions, Method, CUT_NORM_LIMIT};
use modspec::sampling::{dominance, DOMINANCE_FLAG};
use modspec::spectral::{decompose, SpectralDecomposition};
use modspec::{Error, WeightedGraph};
use ndarray::Array2;

use crate::report::*;

/// Largest tolerated `|M_k + Q_k − (k − 1)|` before a report is emitted.
const DUALITY_TOL: f64 = 1e-10;

#[derive(Parser)]
#[command(
    name = "modspec",
    version,
    about = "Spectral clustering and testability via the normalized modularity matrix"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum of the normalized modularity matrix.
    Spectrum(SpectrumArgs),
    /// Spectral clustering with weighted k-means.
    Cluster(ClusterArgs),
    /// Clustering plus volume-regularity measurements for every cluster pair.
    Regularity(RegularityArgs),
    /// Write a generated graph as a TSV edge list.
    Generate(GenerateArgs),
    /// Sampling and blow-up convergence sweeps, written as CSV.
    Converge(converge::ConvergeArgs),
}

#[derive(Args)]
struct InputArgs {
    /// TSV edge list.
    file: PathBuf,
    /// Analyze the largest connected component instead of failing.
    #[arg(long)]
    largest_component: bool,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Thresholds for structural counts; repeatable.
    #[arg(long = "eps", default_values_t = [0.1])]
    eps: Vec<f64>,
    /// Also report the first J eigenvalues in |μ| order.
    #[arg(long)]
    top: Option<usize>,
}

#[derive(Args)]
struct KMeansArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 300)]
    max_iter: usize,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    kmeans: KMeansArgs,
}

#[derive(Args)]
struct RegularityArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    kmeans: KMeansArgs,
    /// Pairs with |A| + |B| up to this are measured exactly.
    #[arg(long, default_value_t = CUT_NORM_LIMIT)]
    exact_max: usize,
    /// Random subset pairs for the remaining cluster pairs; 0 skips them.
    #[arg(long, default_value_t = 2000)]
    samples: usize,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(subcommand)]
    kind: GenerateKind,
}

#[derive(Subcommand)]
enum GenerateKind {
    /// Random graph with planted blocks.
    Block {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Noiseless block graph with weights p_ab.
    Expected {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Unit-weight classical graph.
    Classical {
        #[arg(long, value_enum)]
        name: ClassicalName,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        a: Option<usize>,
        #[arg(long)]
        b: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// Block sizes, comma-separated.
    #[arg(long)]
    sizes: String,
    /// Probability matrix: rows separated by ';', entries by ','.
    #[arg(long)]
    p: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassicalName {
    Complete,
    CompleteBipartite,
    Path,
    TwoCliquesBridge,
}

/// Failures mapped to exit codes.
enum Failure {
    Usage(String),
    Library(Error),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Cluster(args) => cmd_cluster(args),
        Command::Regularity(args) => cmd_regularity(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Converge(args) => converge::run(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: usage: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Library(e)) => {
            eprintln!("error: {}: {e}", e.kind());
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: NumericalFailure: {msg}");
            ExitCode::from(3)
        }
    }
}

pub(crate) fn read_graph(path: &Path) -> Result<WeightedGraph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(load_edge_list(&text)?)
}

pub(crate) fn write_output(path: Option<&Path>, text: &str) -> CmdResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Usage(format!("cannot write to stdout: {e}")))
        }
    }
}

struct Loaded {
    graph: WeightedGraph,
    input: InputBlock,
}

fn load(args: &InputArgs) -> Result<Loaded, Failure> {
    let full = read_graph(&args.file)?;
    let components = full.components().len();
    let connected = full.is_connected();
    let graph = if connected || !args.largest_component {
        full.clone()
    } else {
        full.induced_subgraph(&full.largest_component())
    };
    let dom = dominance(&graph);
    Ok(Loaded {
        input: InputBlock {
            path: args.file.display().to_string(),
            n: full.n(),
            edges: full.edge_count(),
            volume: full.total_volume(),
            connected,
            components,
            analyzed: graph.n(),
            dominance: dom,
            dominance_flagged: dom > DOMINANCE_FLAG,
        },
        graph,
    })
}

fn spectrum_block(dec: &SpectralDecomposition, eps: &[f64], top: Option<usize>) -> SpectrumBlock {
    SpectrumBlock {
        lambdas: dec.lambdas().to_vec(),
        mus: dec.mus().to_vec(),
        spectral_norm: dec.spectral_norm(),
        gap: dec.spectral_gap(),
        structural_counts: eps
            .iter()
            .map(|&e| StructuralCount {
                eps: e,
                count: dec.structural_count(e),
            })
            .collect(),
        top: top.map(|j| dec.mus().iter().take(j).copied().collect()),
    }
}

fn cmd_spectrum(args: SpectrumArgs) -> CmdResult {
    let loaded = load(&args.input)?;
    let dec = decompose(&loaded.graph)?;
    let report = AnalysisReport {
        input: loaded.input,
        spectrum: Some(spectrum_block(&dec, &args.eps, args.top)),
        clustering: None,
        regularity: None,
    };
    write_output(None, &to_json(&report))
}

struct Clustered {
    partition: Partition,
    block: ClusteringBlock,
}

fn cluster(g: &WeightedGraph, dec: &SpectralDecomposition, args: &KMeansArgs) -> Result<Clustered, Failure> {
    let n = g.n();
    if args.k == 0 || args.k > n {
        return Err(Error::BadK { k: args.k, n }.into());
    }
    let (partition, s_k2) = if args.k == 1 {
        (Partition::trivial(g), 0.0)
    } else {
        let reps = representatives(dec, g, args.k)?;
        let cfg = KMeansConfig {
            restarts: args.restarts,
            max_iter: args.max_iter,
            seed: args.seed,
        };
        let (p, _) = weighted_kmeans(reps.points.view(), &reps.weights, args.k, &cfg)?;
        let s2 = k_variance(reps.points.view(), &reps.weights, &p);
        (p, s2)
    };
    let quality = QualityReport::compute(g, dec, &partition)?;
    let gap = quality.duality_gap(args.k);
    if !(gap <= DUALITY_TOL) {
        return Err(Failure::Numerical(format!("duality violated by {gap:e}")));
    }
    let labels = g
        .vertex_ids()
        .iter()
        .cloned()
        .zip(partition.labels().iter().copied())
        .collect();
    let block = ClusteringBlock {
        k: args.k,
        seed: args.seed,
        restarts: args.restarts,
        labels,
        sizes: partition.sizes(),
        s_k2,
        m_k: quality.m_k,
        q_k: quality.q_k,
        relaxation_upper: quality.relaxation_upper,
        relaxation_lower_cut: quality.relaxation_lower_cut,
        duality_gap: gap,
    };
    Ok(Clustered { partition, block })
}

fn cmd_cluster(args: ClusterArgs) -> CmdResult {
    let loaded = load(&args.input)?;
    let dec = decompose(&loaded.graph)?;
    let clustered = cluster(&loaded.graph, &dec, &args.kmeans)?;
    let report = AnalysisReport {
        input: loaded.input,
        spectrum: Some(spectrum_block(&dec, &[0.1], None)),
        clustering: Some(clustered.block),
        regularity: None,
    };
    write_output(None, &to_json(&report))
}

fn cmd_regularity(args: RegularityArgs) -> CmdResult {
    let loaded = load(&args.input)?;
    let g = &loaded.graph;
    let dec = decompose(g)?;
    let clustered = cluster(g, &dec, &args.kmeans)?;
    let opts = CertificateOptions {
        exact_max: args.exact_max,
        samples: args.samples,
        seed: args.kmeans.seed,
    };
    let cert = regularity_certificate(g, &dec, &clustered.partition, args.kmeans.k, &opts)?;
    let ids = g.vertex_ids();
    let names = |v: &[usize]| v.iter().map(|&i| ids[i].clone()).collect::<Vec<_>>();
    let pairs = cert
        .pairs
        .iter()
        .map(|p| PairBlock {
            a: p.a,
            b: p.b,
            method: match p.method {
                Method::Exact => "exact",
                Method::Sampled => "sampled",
                Method::Skipped => "skipped",
            }
            .to_string(),
            rho: p.rho,
            alpha: p.alpha,
            ratio: p.ratio,
            vol_a: p.vol_a,
            vol_b: p.vol_b,
            witness_x: p.witness.as_ref().map(|w| names(&w.0)),
            witness_y: p.witness.as_ref().map(|w| names(&w.1)),
        })
        .collect();
    let report = AnalysisReport {
        input: loaded.input,
        spectrum: Some(spectrum_block(&dec, &[0.1], None)),
        clustering: Some(clustered.block),
        regularity: Some(RegularityBlock {
            k: cert.k,
            s: cert.s,
            eps: cert.eps,
            bound: cert.bound,
            min_cluster_fraction: cert.min_cluster_fraction,
            exact_max: args.exact_max,
            samples: args.samples,
            pairs,
        }),
    };
    write_output(None, &to_json(&report))
}

fn parse_model(args: &ModelArgs) -> Result<BlockModel, Failure> {
    let sizes = args
        .sizes
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Usage(format!("bad --sizes {:?}: {e}", args.sizes)))?;
    let rows = args
        .p
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Usage(format!("bad --p {:?}: {e}", args.p)))?;
    let k = rows.len();
    if rows.iter().any(|r| r.len() != k) {
        return Err(Failure::Usage(format!("--p must be a square matrix, got {:?}", args.p)));
    }
    let probs = Array2::from_shape_fn((k, k), |(a, b)| rows[a][b]);
    Ok(BlockModel::new(sizes, probs)?)
}

fn emit_graph(g: &WeightedGraph, output: Option<&Path>) -> CmdResult {
    write_output(output, &to_edge_list(g))?;
    eprintln!("n={} edges={}", g.n(), g.edge_count());
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> CmdResult {
    match args.kind {
        GenerateKind::Block { model, seed, output } => {
            let (g, _) = generalized_random_graph(&parse_model(&model)?, seed)?;
            emit_graph(&g, output.as_deref())
        }
        GenerateKind::Expected { model, output } => {
            emit_graph(&expected_block_graph(&parse_model(&model)?), output.as_deref())
        }
        GenerateKind::Classical {
            name,
            n,
            a,
            b,
            m,
            output,
        } => {
            let need =
                |v: Option<usize>, flag: &str| v.ok_or_else(|| Failure::Usage(format!("this graph needs --{flag}")));
            let which = match name {
                ClassicalName::Complete => Classical::Complete(need(n, "n")?),
                ClassicalName::Path => Classical::Path(need(n, "n")?),
                ClassicalName::CompleteBipartite => Classical::CompleteBipartite(need(a, "a")?, need(b, "b")?),
                ClassicalName::TwoCliquesBridge => Classical::TwoCliquesBridge(need(m, "m")?),
            };
            emit_graph(&classical(which)?, output.as_deref())
        }
    }
}
