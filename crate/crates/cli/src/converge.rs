use std::path::PathBuf;

use clap::{Args, ValueEnum};
use modspec::clustering::KMeansConfig;
use modspec::sampling::{
    k_variance_convergence, spectral_convergence, subspace_convergence, ConvergenceConfig, ConvergenceTable,
};

use crate::report::format_f64;
use crate::{read_graph, write_output, CmdResult, Failure};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Spectrum,
    Kvariance,
    Blowup,
}

#[derive(Args)]
pub struct ConvergeArgs {
    /// TSV edge list with weights in [0, 1].
    file: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Sample sizes (or blow-up factors), comma-separated and increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    schedule: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Eigenvalues tracked in spectrum mode.
    #[arg(long, conflicts_with = "k")]
    j: Option<usize>,
    /// Cluster count for kvariance and blowup modes.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    /// Cap on worker threads.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

pub fn run(args: ConvergeArgs) -> CmdResult {
    if let Some(t) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot size the thread pool: {e}")))?;
    }
    let g = read_graph(&args.file)?;
    let seed = || {
        args.seed
            .ok_or_else(|| Failure::Usage("sampling modes require --seed".into()))
    };
    let config = |seed| ConvergenceConfig {
        schedule: args.schedule.clone(),
        trials: args.trials,
        seed,
        bypass_sampling: false,
    };
    let csv = match args.mode {
        Mode::Spectrum => {
            let j = args.j.unwrap_or(1);
            spectrum_csv(&spectral_convergence(&g, &config(seed()?), j)?, j)
        }
        Mode::Kvariance => {
            let k = args
                .k
                .ok_or_else(|| Failure::Usage("kvariance mode requires --k".into()))?;
            let kmeans = KMeansConfig {
                restarts: args.restarts,
                ..Default::default()
            };
            kvariance_csv(&k_variance_convergence(&g, &config(seed()?), k, &kmeans)?)
        }
        Mode::Blowup => {
            let k = args
                .k
                .ok_or_else(|| Failure::Usage("blowup mode requires --k".into()))?;
            let rows = subspace_convergence(&g, &args.schedule, k)?;
            let mut w = writer();
            w.write_record(["kind", "t", "distance"]).expect("in-memory write");
            for r in rows {
                w.write_record(["trial".to_string(), r.t.to_string(), format_f64(r.distance)])
                    .expect("in-memory write");
            }
            finish(w)
        }
    };
    write_output(args.output.as_deref(), &csv)
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
}

fn opt(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

const COMMON: [&str; 6] = ["kind", "m", "trial", "component_size", "coverage", "flagged"];

fn spectrum_csv(t: &ConvergenceTable, j: usize) -> String {
    let mut w = writer();
    let mut header: Vec<String> = COMMON.iter().map(|s| s.to_string()).collect();
    header.extend((1..=j).map(|i| format!("mu_{i}")));
    header.extend((1..=j).map(|i| format!("err_{i}")));
    w.write_record(&header).expect("in-memory write");
    for r in &t.rows {
        let mut rec = vec![
            "trial".to_string(),
            r.m.to_string(),
            r.trial.to_string(),
            r.component_size.to_string(),
            format_f64(r.coverage),
            r.flagged.to_string(),
        ];
        rec.extend(r.mus.iter().map(|&x| format_f64(x)));
        rec.extend(r.errors.iter().map(|&x| format_f64(x)));
        w.write_record(&rec).expect("in-memory write");
    }
    for s in &t.summary {
        let mut rec = vec![
            "median".to_string(),
            s.m.to_string(),
            String::new(),
            String::new(),
            format_f64(s.median_coverage),
            s.flagged.to_string(),
        ];
        rec.extend((0..j).map(|_| String::new()));
        rec.extend(s.median_errors.iter().map(|&x| format_f64(x)));
        w.write_record(&rec).expect("in-memory write");
    }
    finish(w)
}

fn kvariance_csv(t: &ConvergenceTable) -> String {
    let mut w = writer();
    let mut header: Vec<&str> = COMMON.to_vec();
    header.extend(["k_variance", "abs_error"]);
    w.write_record(&header).expect("in-memory write");
    for r in &t.rows {
        w.write_record([
            "trial".to_string(),
            r.m.to_string(),
            r.trial.to_string(),
            r.component_size.to_string(),
            format_f64(r.coverage),
            r.flagged.to_string(),
            opt(r.k_variance),
            opt(r.k_variance_error),
        ])
        .expect("in-memory write");
    }
    for s in &t.summary {
        w.write_record([
            "median".to_string(),
            s.m.to_string(),
            String::new(),
            String::new(),
            format_f64(s.median_coverage),
            s.flagged.to_string(),
            String::new(),
            opt(s.median_k_variance_error),
        ])
        .expect("in-memory write");
    }
    finish(w)
}
