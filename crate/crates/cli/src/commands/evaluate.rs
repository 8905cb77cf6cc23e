use std::fs::{self, File};
use std::io::BufWriter;

use fbx_core::corpus::{
    discover_tracks, evaluate_corpus, summarize, summary_table, synth_corpus, write_records_csv,
    EvaluationOptions, TrackJob,
};
use fbx_core::{Transform, TransformConfig, TransformId};
use log::{error, info};

use crate::config::EvaluateArgs;
use crate::{CliError, CliResult};

fn build_transforms(args: &EvaluateArgs) -> CliResult<Vec<Transform>> {
    let mut ids = args.transforms.clone();
    ids.sort();
    ids.dedup();
    if ids.is_empty() {
        return Err(CliError::Usage("no transforms selected".into()));
    }
    ids.into_iter()
        .map(|id| {
            let config = match id {
                TransformId::Pqmf => TransformConfig::Pqmf {
                    window: args.window.clone(),
                },
                other => TransformConfig::default_for(other),
            };
            Ok(config.build()?)
        })
        .collect()
}

fn jobs(args: &EvaluateArgs) -> CliResult<Vec<TrackJob>> {
    if let Some(root) = &args.corpus {
        let found = discover_tracks(root)?;
        info!("found {} tracks under {}", found.len(), root.display());
        Ok(found
            .into_iter()
            .map(|(track_id, path)| TrackJob::Directory { track_id, path })
            .collect())
    } else {
        if args.tracks == 0 {
            return Err(CliError::Usage("--tracks must be positive".into()));
        }
        Ok(synth_corpus(args.seed, args.tracks, args.duration)?
            .into_iter()
            .map(TrackJob::InMemory)
            .collect())
    }
}

pub fn run(args: &EvaluateArgs) -> CliResult<()> {
    let transforms = build_transforms(args)?;
    let jobs = jobs(args)?;
    if jobs.is_empty() {
        return Err(CliError::Runtime("no tracks to evaluate".into()));
    }
    let options = EvaluationOptions {
        workers: args.workers,
        max_seconds: args.max_seconds,
    };
    let outcome = evaluate_corpus(&jobs, &transforms, &options)?;
    for (id, e) in &outcome.failures {
        error!("skipped {id}: {e}");
    }
    if outcome.records.is_empty() {
        return Err(CliError::Runtime(format!(
            "all {} tracks failed",
            outcome.failures.len()
        )));
    }

    write_records_csv(BufWriter::new(File::create(&args.out)?), &outcome.records)?;
    let report = summarize(&outcome.records)?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    fs::write(args.stats_path(), json)?;

    print!("{}", summary_table(&report));
    println!(
        "{} records from {} tracks ({} failed)",
        outcome.records.len(),
        jobs.len() - outcome.failures.len(),
        outcome.failures.len()
    );
    Ok(())
}
