//! Multitrack ingestion, the per-source mixtures, corpus evaluation under
//! each transform, and box-plot statistics of the resulting scores.

mod evaluate;
mod multitrack;
mod report;
mod stats;
mod synth;
mod wav;

pub use evaluate::{
    evaluate_corpus, evaluate_track, resolve_workers, CorpusEvaluation, EvaluationOptions,
    MetricRecord, TrackJob, WORKERS_ENV,
};
pub use multitrack::{
    discover_tracks, downmix_mono, load_multitrack, load_multitrack_as, make_mixtures,
    mono_sources, Mixtures, MultiTrack, SourceLabel, Stem,
};
pub use report::{
    read_records_csv, summarize, summary_table, write_records_csv, StatsReport, CSV_HEADER,
    MIX_SOURCE,
};
pub use stats::{box_stats, BoxStats};
pub use synth::{synth_corpus, SYNTH_SAMPLE_RATE};
pub use wav::{read_wav, write_wav, WavEncoding};
