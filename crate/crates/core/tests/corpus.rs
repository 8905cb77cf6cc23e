use std::collections::BTreeMap;

use fbx_core::corpus::{
    discover_tracks, evaluate_corpus, evaluate_track, load_multitrack, make_mixtures,
    read_records_csv, synth_corpus, write_records_csv, write_wav, EvaluationOptions, MultiTrack,
    SourceLabel, Stem, TrackJob, WavEncoding,
};
use fbx_core::{AudioSignal, Transform, TransformConfig};

fn transforms() -> Vec<Transform> {
    TransformConfig::standard_set().iter().map(|c| c.build().unwrap()).collect()
}

#[test]
fn two_second_track_gives_twelve_bounded_records() {
    let track = synth_corpus(5, 1, 2.0).unwrap().remove(0);
    let records = evaluate_track(&track, &transforms()).unwrap();
    assert_eq!(records.len(), 12);
    for r in &records {
        assert!((0.0..=1.0).contains(&r.wdo), "{r:?}");
        assert!((0.0..=1.0).contains(&r.psr));
        assert!(r.sir >= 1.0);
        assert!(r.gini.is_some_and(f64::is_finite));
    }
    assert_eq!(records, evaluate_track(&track, &transforms()).unwrap());
}

#[test]
fn full_mix_holds_all_four_tones() {
    let rate = 8000;
    let len = 8000;
    let freqs = [(SourceLabel::Bass, 250.0), (SourceLabel::Drums, 1000.0), (SourceLabel::Other, 2000.0), (SourceLabel::Vocals, 3000.0)];
    let sources: BTreeMap<_, _> = freqs
        .iter()
        .map(|&(l, f)| {
            let x = (0..len).map(|i| (2.0 * std::f64::consts::PI * f * i as f64 / rate as f64).sin()).collect();
            (l, Stem::Mono(AudioSignal::new(x, rate).unwrap()))
        })
        .collect();
    let track = MultiTrack::new("tones", sources).unwrap();
    let mix = make_mixtures(&track, SourceLabel::Vocals).unwrap();
    let tf = TransformConfig::Stft { frame_length: 256, hop: 64 }.build().unwrap().analyze(&mix.full_mix).unwrap();
    let mags = tf.magnitudes();
    let mean: Vec<f64> = (0..128).map(|k| mags.column(k).mean().unwrap()).collect();
    let mut peaks: Vec<usize> = (1..127).filter(|&k| mean[k] > mean[k - 1] && mean[k] > mean[k + 1]).collect();
    peaks.sort_by(|a, b| mean[*b].total_cmp(&mean[*a]));
    let mut top: Vec<usize> = peaks[..4].to_vec();
    top.sort();
    // bins are 8000/256 = 31.25 Hz wide
    assert_eq!(top, vec![8, 32, 64, 96]);
    let imix = make_mixtures(&track, SourceLabel::Vocals).unwrap().interference_mix;
    let itf = TransformConfig::Stft { frame_length: 256, hop: 64 }.build().unwrap().analyze(&imix).unwrap();
    assert!(itf.magnitudes().column(96).mean().unwrap() < 1e-3 * mean[96]);
}

#[test]
fn wav_corpus_evaluates_like_in_memory() {
    let root = tempfile::tempdir().unwrap();
    let tracks = synth_corpus(21, 2, 1.0).unwrap();
    for (i, t) in tracks.iter().enumerate() {
        let dir = root.path().join(format!("Sources/Dev/track {i}"));
        std::fs::create_dir_all(&dir).unwrap();
        for (label, stem) in t.sources() {
            let Stem::Mono(x) = stem else { unreachable!() };
            write_wav(&dir.join(format!("{label}.wav")), x, WavEncoding::Float32).unwrap();
        }
    }
    let found = discover_tracks(root.path()).unwrap();
    assert_eq!(found.len(), 2);
    assert_eq!(found[0].0, "Sources/Dev/track 0");
    let loaded = load_multitrack(&found[0].1).unwrap();
    assert_eq!(loaded.len(), 44100);

    let jobs: Vec<_> = found.into_iter().map(|(track_id, path)| TrackJob::Directory { track_id, path }).collect();
    let set = vec![TransformConfig::mdct_default().build().unwrap()];
    let opts = EvaluationOptions { workers: Some(2), max_seconds: Some(0.5) };
    let out = evaluate_corpus(&jobs, &set, &opts).unwrap();
    assert!(out.failures.is_empty());
    assert_eq!(out.records.len(), 8);

    let mut a = Vec::new();
    write_records_csv(&mut a, &out.records).unwrap();
    let again = evaluate_corpus(&jobs, &set, &EvaluationOptions { workers: Some(1), ..opts }).unwrap();
    let mut b = Vec::new();
    write_records_csv(&mut b, &again.records).unwrap();
    assert_eq!(a, b);
    assert_eq!(read_records_csv(&a[..]).unwrap(), out.records);
}

#[test]
fn broken_track_is_reported_not_fatal() {
    let root = tempfile::tempdir().unwrap();
    let good = synth_corpus(2, 1, 1.0).unwrap().remove(0);
    for (name, skip) in [("a", None), ("b", Some(SourceLabel::Drums))] {
        let dir = root.path().join(name);
        std::fs::create_dir_all(&dir).unwrap();
        for (label, stem) in good.sources() {
            if Some(*label) != skip {
                write_wav(&dir.join(format!("{label}.wav")), &stem.mono().unwrap(), WavEncoding::Pcm16).unwrap();
            }
        }
    }
    let jobs: Vec<_> = discover_tracks(root.path())
        .unwrap()
        .into_iter()
        .map(|(track_id, path)| TrackJob::Directory { track_id, path })
        .collect();
    let set = vec![TransformConfig::stft_default().build().unwrap()];
    let out = evaluate_corpus(&jobs, &set, &EvaluationOptions::default()).unwrap();
    assert_eq!(out.records.len(), 4);
    assert_eq!(out.failures.len(), 1);
    assert_eq!(out.failures[0].0, "b");
    assert!(out.failures[0].1.to_string().contains("drums"));
}
