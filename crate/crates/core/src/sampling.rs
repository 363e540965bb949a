//! Degree-proportional vertex sampling and convergence experiments.
//!
//! `η(m, G)` draws `m` slots with replacement, slot `s` landing on vertex `i`
//! with probability `d_i / Vol(V)`, then joins slots `s < t` with probability
//! `w_{v(s) v(t)}`. Repeated vertices stay distinct slots; since the diagonal
//! of `W` is zero, two copies of one vertex are never joined.
//!
//! Seeding: a draw with seed `σ` takes its slots from the stream
//! `derive_seed(σ, [0])` and its pair coins from `derive_seed(σ, [1])`. Trial
//! `r` at sample size `m` of an experiment with seed `σ` uses
//! `derive_seed(σ, [m, r])`.

use ndarray::Array2;
use rand::distributions::{Distribution, WeightedIndex};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{k_variance, representatives, weighted_kmeans, KMeansConfig};
use crate::error::{Error, Result};
use crate::generators::blow_up;
use crate::graph::{default_ids, WeightedGraph};
use crate::rng::{derive_seed, rng_from_seed, PairCoins};
use crate::spectral::{decompose, symmetric_eigen, SpectralDecomposition};

/// Rows whose analyzed component holds less than this share of the slots are flagged.
pub const COVERAGE_FLAG: f64 = 0.9;
/// Instances with `max_i d_i n / Vol(V)` above this are flagged.
pub const DOMINANCE_FLAG: f64 = 10.0;
/// Smallest `|μ_{k-1}| − |μ_k|` accepted by [`subspace_convergence`].
pub const MIN_GAP: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleDraw {
    /// Original vertex behind every slot, in draw order.
    pub slots: Vec<usize>,
    pub graph: WeightedGraph,
    pub seed: u64,
}

/// One draw of `η(m, G)`.
pub fn sample_subgraph(g: &WeightedGraph, m: usize, seed: u64) -> Result<SampleDraw> {
    let max = g.max_weight();
    if max > 1.0 {
        return Err(Error::WeightsNotProbabilities(max));
    }
    let slots: Vec<usize> = if m == 0 {
        Vec::new()
    } else {
        let dist = WeightedIndex::new(g.degrees()).map_err(|_| Error::ZeroVolume)?;
        let mut rng = rng_from_seed(derive_seed(seed, &[0]));
        (0..m).map(|_| dist.sample(&mut rng)).collect()
    };
    let mut coins = PairCoins::new(derive_seed(seed, &[1]), m);
    let mut w = Array2::zeros((m, m));
    for s in 0..m {
        for (t, u) in (s + 1..m).zip(coins.row(s)) {
            if u < g.weight(slots[s], slots[t]) {
                w[[s, t]] = 1.0;
                w[[t, s]] = 1.0;
            }
        }
    }
    Ok(SampleDraw {
        slots,
        graph: WeightedGraph::from_dense(w, default_ids(m))?,
        seed,
    })
}

/// `max_i d_i · n / Vol(V)`; near 1 when no vertex dominates.
pub fn dominance(g: &WeightedGraph) -> f64 {
    let total = g.total_volume();
    if !(total > 0.0) {
        return 0.0;
    }
    g.degrees().iter().fold(0.0, |m: f64, &d| m.max(d)) * g.n() as f64 / total
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceConfig {
    /// Sample sizes, strictly increasing, each at most `n`.
    pub schedule: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Analyze `g` itself instead of samples; a diagnostic that must give
    /// zero errors.
    pub bypass_sampling: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub m: usize,
    pub trial: usize,
    /// Vertices in the analyzed (largest) component.
    pub component_size: usize,
    pub coverage: f64,
    pub flagged: bool,
    /// Leading `|μ|`-ordered eigenvalues of the sample, zero-padded.
    pub mus: Vec<f64>,
    pub errors: Vec<f64>,
    pub k_variance: Option<f64>,
    pub k_variance_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSummary {
    pub m: usize,
    pub median_errors: Vec<f64>,
    pub median_k_variance_error: Option<f64>,
    pub median_coverage: f64,
    pub flagged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub reference_mus: Vec<f64>,
    pub reference_k_variance: Option<f64>,
    pub dominance: f64,
    pub dominance_flagged: bool,
    /// Sorted by `m`, then trial.
    pub rows: Vec<ConvergenceRow>,
    pub summary: Vec<ConvergenceSummary>,
}

enum Target {
    Spectrum(usize),
    KVariance(usize, KMeansConfig),
}

/// Sampled `|μ|`-ordered spectra against the spectrum of `g`.
pub fn spectral_convergence(g: &WeightedGraph, config: &ConvergenceConfig, j: usize) -> Result<ConvergenceTable> {
    run(g, config, Target::Spectrum(j))
}

/// Sampled k-variance `S_k²(X*)` (by weighted k-means) against that of `g`.
pub fn k_variance_convergence(
    g: &WeightedGraph,
    config: &ConvergenceConfig,
    k: usize,
    kmeans: &KMeansConfig,
) -> Result<ConvergenceTable> {
    run(g, config, Target::KVariance(k, *kmeans))
}

fn check_schedule(schedule: &[usize], n: usize) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::BadSchedule("empty schedule".into()));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadSchedule(format!("{schedule:?} is not strictly increasing")));
    }
    if schedule[0] < 2 {
        return Err(Error::BadSchedule("sample sizes must be at least 2".into()));
    }
    let last = *schedule.last().expect("non-empty");
    if last > n {
        return Err(Error::BadSchedule(format!("sample size {last} exceeds n = {n}")));
    }
    Ok(())
}

fn run(g: &WeightedGraph, config: &ConvergenceConfig, target: Target) -> Result<ConvergenceTable> {
    check_schedule(&config.schedule, g.n())?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let max = g.max_weight();
    if max > 1.0 {
        return Err(Error::WeightsNotProbabilities(max));
    }
    let reference = decompose(g)?;
    let smallest = config.schedule[0];
    let (reference_mus, reference_k_variance) = match &target {
        Target::Spectrum(j) => {
            if *j == 0 || *j + 1 > smallest {
                return Err(Error::BadK { k: *j, n: smallest });
            }
            (leading(&reference, *j), None)
        }
        Target::KVariance(k, kmeans) => {
            if *k < 2 || *k > smallest {
                return Err(Error::BadK { k: *k, n: smallest });
            }
            (Vec::new(), Some(best_k_variance(g, &reference, *k, kmeans)?))
        }
    };

    let jobs: Vec<(usize, usize)> = config
        .schedule
        .iter()
        .flat_map(|&m| (0..config.trials).map(move |t| (m, t)))
        .collect();
    let mut rows = jobs
        .into_par_iter()
        .map(|(m, trial)| {
            let seed = derive_seed(config.seed, &[m as u64, trial as u64]);
            let sample = if config.bypass_sampling {
                g.clone()
            } else {
                sample_subgraph(g, m, seed)?.graph
            };
            let slots = sample.n();
            let component = sample.largest_component();
            let sub = sample.induced_subgraph(&component);
            let coverage = component.len() as f64 / slots as f64;
            let mut row = ConvergenceRow {
                m,
                trial,
                component_size: component.len(),
                coverage,
                flagged: coverage < COVERAGE_FLAG,
                mus: Vec::new(),
                errors: Vec::new(),
                k_variance: None,
                k_variance_error: None,
            };
            let dec = if sub.n() >= 2 { Some(decompose(&sub)?) } else { None };
            match &target {
                Target::Spectrum(j) => {
                    row.mus = dec.as_ref().map_or_else(|| vec![0.0; *j], |d| leading(d, *j));
                    row.errors = row.mus.iter().zip(&reference_mus).map(|(a, b)| (a - b).abs()).collect();
                }
                Target::KVariance(k, kmeans) => {
                    if let Some(d) = dec.as_ref().filter(|_| sub.n() >= *k) {
                        let cfg = KMeansConfig {
                            seed: derive_seed(seed, &[2]),
                            ..*kmeans
                        };
                        let s2 = best_k_variance(&sub, d, *k, &cfg)?;
                        row.k_variance = Some(s2);
                        row.k_variance_error = reference_k_variance.map(|r| (s2 - r).abs());
                    }
                }
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.m, r.trial));

    let summary = config
        .schedule
        .iter()
        .map(|&m| {
            let group: Vec<&ConvergenceRow> = rows.iter().filter(|r| r.m == m).collect();
            let width = group.first().map_or(0, |r| r.errors.len());
            let median_errors = (0..width)
                .map(|i| median(group.iter().map(|r| r.errors[i]).collect()).unwrap_or(f64::NAN))
                .collect();
            ConvergenceSummary {
                m,
                median_errors,
                median_k_variance_error: median(group.iter().filter_map(|r| r.k_variance_error).collect()),
                median_coverage: median(group.iter().map(|r| r.coverage).collect()).unwrap_or(f64::NAN),
                flagged: group.iter().filter(|r| r.flagged).count(),
            }
        })
        .collect();

    let dominance = dominance(g);
    Ok(ConvergenceTable {
        reference_mus,
        reference_k_variance,
        dominance,
        dominance_flagged: dominance > DOMINANCE_FLAG,
        rows,
        summary,
    })
}

/// First `j` entries of the `|μ|` order, padded with zeros.
fn leading(dec: &SpectralDecomposition, j: usize) -> Vec<f64> {
    (0..j)
        .map(|i| if i + 1 < dec.n() { dec.mus()[i] } else { 0.0 })
        .collect()
}

fn best_k_variance(g: &WeightedGraph, dec: &SpectralDecomposition, k: usize, cfg: &KMeansConfig) -> Result<f64> {
    let reps = representatives(dec, g, k)?;
    let (p, _) = weighted_kmeans(reps.points.view(), &reps.weights, k, cfg)?;
    Ok(k_variance(reps.points.view(), &reps.weights, &p))
}

/// Median of the values, averaging the middle pair; `None` when empty.
pub fn median(mut values: Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubspaceRow {
    pub t: usize,
    pub distance: f64,
}

/// Projection distances between the structural subspace of `g` and the
/// block-averaged structural subspaces of its blow-ups.
///
/// For each factor `t` the top `k-1` transformed eigenvectors `D^{-1/2} u_i`
/// of the blow-up are averaged over copy groups, orthonormalized in the
/// `d`-weighted inner product of `g`, and turned into the projection
/// `Q_t = D^{1/2} Y Yᵀ D^{1/2}`. The reported distance is `‖Q_t − Q_1‖`.
pub fn subspace_convergence(g: &WeightedGraph, factors: &[usize], k: usize) -> Result<Vec<SubspaceRow>> {
    if factors.first() != Some(&1) {
        return Err(Error::BadSchedule("blow-up factors must start at 1".into()));
    }
    if factors.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadSchedule(format!("{factors:?} is not strictly increasing")));
    }
    let n = g.n();
    if k < 2 || k > n {
        return Err(Error::BadK { k, n });
    }
    let base = decompose(g)?;
    let mus = base.mus();
    let next = if k - 1 < n - 1 { mus[k - 1].abs() } else { 0.0 };
    let gap = mus[k - 2].abs() - next;
    if gap < MIN_GAP {
        return Err(Error::NoGap { k_minus_1: k - 1, gap });
    }
    let d = g.normalized_degrees();

    let projection = |t: usize| -> Result<Array2<f64>> {
        let b = blow_up(g, t)?;
        let dec = decompose(&b.graph)?;
        let bd = b.graph.normalized_degrees();
        let mut y = Array2::<f64>::zeros((n, k - 1));
        for c in 0..k - 1 {
            let u = dec.eigenvector(c);
            for v in 0..b.graph.n() {
                y[[b.groups[v], c]] += u[v] / bd[v].sqrt() / t as f64;
            }
        }
        d_orthonormalize(&mut y, &d);
        let sqrt_d: Vec<f64> = d.iter().map(|x| x.sqrt()).collect();
        let z = Array2::from_shape_fn((n, k - 1), |(i, c)| sqrt_d[i] * y[[i, c]]);
        Ok(z.dot(&z.t()))
    };

    let reference = projection(1)?;
    factors
        .iter()
        .map(|&t| {
            let q = if t == 1 { reference.clone() } else { projection(t)? };
            Ok(SubspaceRow {
                t,
                distance: spectral_norm(&(&q - &reference))?,
            })
        })
        .collect()
}

/// Modified Gram–Schmidt in `⟨x, y⟩ = Σ d_i x_i y_i`, column by column.
fn d_orthonormalize(y: &mut Array2<f64>, d: &[f64]) {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).zip(d).map(|((x, y), w)| w * x * y).sum::<f64>();
    let cols = y.ncols();
    for c in 0..cols {
        for prev in 0..c {
            let p = y.column(prev).to_vec();
            let cur = y.column(c).to_vec();
            let coef = dot(&p, &cur);
            for (i, v) in y.column_mut(c).iter_mut().enumerate() {
                *v -= coef * p[i];
            }
        }
        let cur = y.column(c).to_vec();
        let norm = dot(&cur, &cur).sqrt();
        if norm > 0.0 {
            y.column_mut(c).mapv_inplace(|v| v / norm);
        }
    }
}

fn spectral_norm(a: &Array2<f64>) -> Result<f64> {
    let eig = symmetric_eigen(a)?;
    Ok(eig.values.iter().fold(0.0, |m: f64, v| m.max(v.abs())))
}
