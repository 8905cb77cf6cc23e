use std::path::PathBuf;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::multitrack::{load_multitrack_as, mixtures_from_mono, mono_sources, MultiTrack, SourceLabel};
use crate::error::{invalid, Error, Result};
use crate::filterbanks::{Transform, TransformId};
use crate::masking::{gini_index, ideal_binary_mask, separation_scores};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "FBX_WORKERS";

/// Scores of one source under one transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub track_id: String,
    pub source: SourceLabel,
    pub transform: TransformId,
    pub wdo: f64,
    pub psr: f64,
    pub sir: f64,
    /// Gini index of the full mixture under this transform, shared by the
    /// four records of a track. `None` when the mixture is silent.
    pub gini: Option<f64>,
}

impl MetricRecord {
    fn sort_key(&self) -> (&str, SourceLabel, TransformId) {
        (&self.track_id, self.source, self.transform)
    }
}

fn with_context<'a>(track: &'a str, label: &str) -> impl Fn(Error) -> Error + 'a {
    let label = label.to_string();
    move |e| Error::Track {
        track: track.to_string(),
        source_label: label.clone(),
        inner: Box::new(e),
    }
}

/// Masks every source against the sum of the other three under each
/// transform and scores the result. Emits `4 × transforms.len()` records
/// sorted by source, then transform.
pub fn evaluate_track(track: &MultiTrack, transforms: &[Transform]) -> Result<Vec<MetricRecord>> {
    let id = track.track_id();
    let mono = mono_sources(track).map_err(with_context(id, "mix"))?;
    let full = mixtures_from_mono(&mono, SourceLabel::Bass)
        .map_err(with_context(id, "mix"))?
        .full_mix;
    let mut records = Vec::with_capacity(4 * transforms.len());
    for transform in transforms {
        let gini = gini_index(&transform.analyze(&full).map_err(with_context(id, "mix"))?);
        for label in SourceLabel::ALL {
            let ctx = with_context(id, label.as_str());
            let mix = mixtures_from_mono(&mono, label).map_err(&ctx)?;
            let s = transform.analyze(&mix.target_mono).map_err(&ctx)?;
            let u = transform.analyze(&mix.interference_mix).map_err(&ctx)?;
            let mask = ideal_binary_mask(&s, &u).map_err(&ctx)?;
            let scores = separation_scores(&mask, &s, &u).map_err(&ctx)?;
            records.push(MetricRecord {
                track_id: id.to_string(),
                source: label,
                transform: transform.id(),
                wdo: scores.wdo,
                psr: scores.psr,
                sir: scores.sir,
                gini,
            });
        }
    }
    records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(records)
}

/// A track to evaluate: already in memory or a directory loaded on demand
/// by the worker that picks it up.
#[derive(Debug, Clone)]
pub enum TrackJob {
    InMemory(MultiTrack),
    Directory { track_id: String, path: PathBuf },
}

impl TrackJob {
    pub fn track_id(&self) -> &str {
        match self {
            TrackJob::InMemory(t) => t.track_id(),
            TrackJob::Directory { track_id, .. } => track_id,
        }
    }

    fn load(&self) -> Result<MultiTrack> {
        match self {
            TrackJob::InMemory(t) => Ok(t.clone()),
            TrackJob::Directory { track_id, path } => load_multitrack_as(path, track_id.clone()),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct EvaluationOptions {
    /// Worker threads; `None` reads [`WORKERS_ENV`] and falls back to the
    /// number of available cores.
    pub workers: Option<usize>,
    /// Truncates every track to its first `max_seconds`.
    pub max_seconds: Option<f64>,
}

#[derive(Debug, Default)]
pub struct CorpusEvaluation {
    /// Sorted by track, source, transform.
    pub records: Vec<MetricRecord>,
    /// Tracks that failed to load or evaluate, in track order.
    pub failures: Vec<(String, Error)>,
}

/// Resolves the worker count from an explicit value, then
/// [`WORKERS_ENV`], then the available parallelism.
pub fn resolve_workers(explicit: Option<usize>) -> Result<usize> {
    let n = match explicit {
        Some(n) => n,
        None => match std::env::var(WORKERS_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| invalid(format!("{WORKERS_ENV} must be a positive integer, got `{v}`")))?,
            Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        },
    };
    if n == 0 {
        return Err(invalid("worker count must be positive"));
    }
    Ok(n)
}

/// Evaluates every job on a pool of worker threads. A failing track is
/// logged and reported in `failures`; the others still produce records.
pub fn evaluate_corpus(
    jobs: &[TrackJob],
    transforms: &[Transform],
    options: &EvaluationOptions,
) -> Result<CorpusEvaluation> {
    if let Some(s) = options.max_seconds {
        if !(s > 0.0) {
            return Err(invalid(format!("max_seconds must be positive, got {s}")));
        }
    }
    let workers = resolve_workers(options.workers)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    let total = jobs.len();
    let outcomes: Vec<(String, Result<Vec<MetricRecord>>)> = pool.install(|| {
        jobs.par_iter()
            .enumerate()
            .map(|(i, job)| {
                let id = job.track_id().to_string();
                let result = job.load().and_then(|track| {
                    let track = match options.max_seconds {
                        Some(s) => track.truncated(s),
                        None => track,
                    };
                    evaluate_track(&track, transforms)
                });
                match &result {
                    Ok(_) => info!("[{}/{total}] {id}", i + 1),
                    Err(e) => warn!("[{}/{total}] {id} failed: {e}", i + 1),
                }
                (id, result)
            })
            .collect()
    });
    let mut out = CorpusEvaluation::default();
    for (id, result) in outcomes {
        match result {
            Ok(records) => out.records.extend(records),
            Err(e) => out.failures.push((id, e)),
        }
    }
    out.records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    out.failures.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}
