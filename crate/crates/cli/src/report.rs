//! JSON reports. Floats are written with 17 significant digits so that a
//! parsed report re-serializes to the same bytes.

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{CompactFormatter, Formatter};

#[derive(Debug, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input: InputBlock,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spectrum: Option<SpectrumBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub clustering: Option<ClusteringBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub regularity: Option<RegularityBlock>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct InputBlock {
    pub path: String,
    pub n: usize,
    pub edges: usize,
    pub volume: f64,
    pub connected: bool,
    pub components: usize,
    /// Vertices actually analyzed (the largest component when requested).
    pub analyzed: usize,
    /// `max_i d_i n / Vol(V)` of the analyzed graph.
    pub dominance: f64,
    pub dominance_flagged: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StructuralCount {
    pub eps: f64,
    pub count: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SpectrumBlock {
    pub lambdas: Vec<f64>,
    pub mus: Vec<f64>,
    pub spectral_norm: f64,
    pub gap: f64,
    pub structural_counts: Vec<StructuralCount>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub top: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ClusteringBlock {
    pub k: usize,
    pub seed: u64,
    pub restarts: usize,
    /// Cluster of every analyzed vertex, keyed by its label in the input.
    pub labels: BTreeMap<String, usize>,
    pub sizes: Vec<usize>,
    pub s_k2: f64,
    pub m_k: f64,
    pub q_k: f64,
    pub relaxation_upper: f64,
    pub relaxation_lower_cut: f64,
    pub duality_gap: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RegularityBlock {
    pub k: usize,
    pub s: f64,
    pub eps: f64,
    pub bound: f64,
    pub min_cluster_fraction: f64,
    pub exact_max: usize,
    pub samples: usize,
    pub pairs: Vec<PairBlock>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PairBlock {
    pub a: usize,
    pub b: usize,
    pub method: String,
    pub rho: f64,
    pub alpha: Option<f64>,
    pub ratio: Option<f64>,
    pub vol_a: f64,
    pub vol_b: f64,
    pub witness_x: Option<Vec<String>>,
    pub witness_y: Option<Vec<String>>,
}

/// Compact JSON, every float as `d.ddddddddddddddddde±x`.
struct Digits17;

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn write_null<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        CompactFormatter.write_null(writer)
    }
}

/// 17 significant digits in scientific notation.
pub fn format_f64(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Digits17);
    value.serialize(&mut ser).expect("reports always serialize");
    let mut text = String::from_utf8(out).expect("JSON is UTF-8");
    text.push('\n');
    text
}
