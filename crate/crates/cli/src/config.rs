//! Command parameters. Every runnable command is a [`RunConfig`] variant, so
//! the exact arguments of a run can be saved as JSON and replayed.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Subcommand};
use fbx_core::TransformId;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum RunConfig {
    /// Design a pseudo-QMF prototype window by least squares.
    Design(DesignArgs),
    /// Analyze and resynthesize an audio file, reporting the reconstruction SNR.
    Roundtrip(RoundtripArgs),
    /// Score ideal binary masks over a multitrack corpus.
    Evaluate(EvaluateArgs),
    /// Emit tab-separated data for frequency-response and box plots.
    Plotdata(PlotdataArgs),
}

fn at_least_two(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if v < 2 {
        return Err(format!("must be at least 2, got {v}"));
    }
    Ok(v)
}

fn positive_usize(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if v == 0 {
        return Err("must be positive".into());
    }
    Ok(v)
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(format!("must be a positive number, got {s}"));
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DesignArgs {
    /// Number of subbands N.
    #[arg(long, value_parser = at_least_two)]
    pub subbands: usize,
    /// Overlap factor L; the window has L·N taps.
    #[arg(long, value_parser = at_least_two)]
    pub overlap: usize,
    /// Seed of the initial point (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Window file to write; the sidecar goes to `<out>.json` and the
    /// report to `<out>.report.json`.
    #[arg(long)]
    pub out: PathBuf,
    /// JSON file with design options; flags below override its fields.
    #[arg(long, value_name = "JSON")]
    pub options: Option<PathBuf>,
    #[arg(long, value_parser = positive_f64)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub passband_weight: Option<f64>,
    #[arg(long)]
    pub stopband_weight: Option<f64>,
    #[arg(long, value_parser = positive_usize)]
    pub grid_density: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RoundtripArgs {
    /// WAV file (multichannel input is averaged to mono).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "pqmf")]
    pub transform: TransformId,
    /// Prototype window for the pseudo-QMF (default: bundled window).
    #[arg(long)]
    pub window: Option<PathBuf>,
    /// Frame length M for STFT/MDCT.
    #[arg(long, default_value_t = 2048)]
    pub frame_length: usize,
    /// STFT hop size.
    #[arg(long, default_value_t = 410)]
    pub hop: usize,
    /// Where to write the reconstruction as 32-bit float WAV.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[command(group(ArgGroup::new("source").required(true).args(["corpus", "synthetic"])))]
pub struct EvaluateArgs {
    /// Corpus root (DSD100 `Sources/` tree or one directory per track).
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Generate a synthetic corpus instead of reading one.
    #[arg(long)]
    pub synthetic: bool,
    #[arg(long, default_value_t = 10)]
    pub tracks: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Synthetic track length in seconds.
    #[arg(long, default_value_t = 10.0, value_parser = positive_f64)]
    pub duration: f64,
    /// Metrics CSV to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Box statistics JSON (default: `<out>` with extension `stats.json`).
    #[arg(long)]
    pub stats: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "stft,mdct,pqmf")]
    pub transforms: Vec<TransformId>,
    /// Prototype window for the pseudo-QMF (default: bundled window).
    #[arg(long)]
    pub window: Option<PathBuf>,
    /// Truncate every track to its first seconds.
    #[arg(long, value_parser = positive_f64)]
    pub max_seconds: Option<f64>,
    #[arg(long, env = "FBX_WORKERS", value_parser = positive_usize)]
    pub workers: Option<usize>,
}

impl EvaluateArgs {
    pub fn stats_path(&self) -> PathBuf {
        self.stats
            .clone()
            .unwrap_or_else(|| self.out.with_extension("stats.json"))
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PlotdataArgs {
    #[command(subcommand)]
    pub plot: PlotKind,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PlotKind {
    /// Magnitude responses in dB of prototype windows next to Hamming and
    /// sine windows of the same length.
    Response(ResponseArgs),
    /// Five-number summaries per metric, transform and source from a
    /// metrics CSV.
    Boxplot(BoxplotArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ResponseArgs {
    /// Prototype window files (default: the bundled window). All must have
    /// the same length.
    #[arg(long)]
    pub window: Vec<PathBuf>,
    #[arg(long, default_value_t = 4096, value_parser = positive_usize)]
    pub points: usize,
    /// Upper end of the frequency axis in radians (default π).
    #[arg(long, value_parser = positive_f64)]
    pub max_omega: Option<f64>,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct BoxplotArgs {
    /// Metrics CSV written by `evaluate`.
    #[arg(long)]
    pub metrics: PathBuf,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}
