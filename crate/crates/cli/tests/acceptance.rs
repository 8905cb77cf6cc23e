//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use fbx_core::corpus::{read_records_csv, MetricRecord, SourceLabel};
use fbx_core::masking::{gini_frame, ideal_binary_mask, separation_scores};
use fbx_core::window_design::{design_pqmf_prototype, hamming_window, residual_with_weights};
use fbx_core::{
    round_trip_snr, AudioSignal, DesignOptions, FrequencyGrid, PrototypeWindow, TfValues,
    TimeFrequencyMatrix, Transform, TransformConfig, TransformId,
};
use ndarray::{Array2, Zip};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RATE: u32 = 44100;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn noise(rng: &mut ChaCha8Rng, secs: f64) -> AudioSignal {
    let len = (secs * RATE as f64) as usize;
    AudioSignal::new((0..len).map(|_| rng.random_range(-1.0..1.0)).collect(), RATE).unwrap()
}

fn min_snr(transform: &Transform, signals: &[AudioSignal]) -> f64 {
    signals
        .iter()
        .map(|x| {
            let back = transform.synthesize(&transform.analyze(x).unwrap()).unwrap();
            round_trip_snr(x, &back).unwrap()
        })
        .fold(f64::INFINITY, f64::min)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let signals: Vec<_> = (0..20).map(|_| noise(&mut rng, 5.0)).collect();
    let mdct = TransformConfig::mdct_default().build().unwrap();
    let stft = TransformConfig::stft_default().build().unwrap();
    let m = min_snr(&mdct, &signals);
    let s = min_snr(&stft, &signals);
    let elapsed = start.elapsed();
    check(
        m >= 120.0 && s >= 120.0 && elapsed < Duration::from_secs(60),
        format!("min SNR mdct {m:.1} dB, stft {s:.1} dB over 20 signals in {elapsed:.1?}"),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let signals: Vec<_> = (0..10).map(|_| noise(&mut rng, 5.0)).collect();
    let pqmf = TransformConfig::pqmf_default().build().unwrap();
    let p = min_snr(&pqmf, &signals);
    check(
        p >= 50.0,
        format!("min SNR {p:.2} dB over 10 signals, delay {} samples", pqmf.system_delay()),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let (n, l) = (8, 8);
    let options = DesignOptions {
        seed: 42,
        ..DesignOptions::default()
    };
    let (window, report) = design_pqmf_prototype(n, l, &options).unwrap();
    let dense = FrequencyGrid::for_design(n, l, options.grid_density * 10).unwrap();
    let opt = residual_with_weights(&window, &dense, 1.0, 1.0).unwrap();
    // Hamming of the same length, scaled onto the same passband condition
    let hamming = PrototypeWindow::new(hamming_window(n * l).unwrap(), n, l)
        .unwrap()
        .normalized_to_passband(&dense)
        .unwrap();
    let ham = residual_with_weights(&hamming, &dense, 1.0, 1.0).unwrap();
    let elapsed = start.elapsed();
    check(
        report.converged
            && opt.passband_max_deviation <= 1e-3
            && opt.stopband_energy < ham.stopband_energy
            && elapsed < Duration::from_secs(300),
        format!(
            "converged={} in {} iterations, dense-grid passband deviation {:.3e}, stopband energy {:.3e} vs hamming {:.3e}, {elapsed:.1?}",
            report.converged, report.iterations, opt.passband_max_deviation, opt.stopband_energy, ham.stopband_energy
        ),
    )
}

fn real_tf(rows: usize, values: Vec<f64>) -> TimeFrequencyMatrix {
    let cols = values.len() / rows;
    let layout = fbx_core::filterbanks::TfLayout {
        transform: TransformId::Mdct,
        frame_length: 2 * cols,
        hop: cols,
        num_subbands: cols,
        original_length: cols,
        sample_rate: RATE,
    };
    TimeFrequencyMatrix::new(
        layout,
        TfValues::Real(Array2::from_shape_vec((rows, cols), values).unwrap()),
    )
    .unwrap()
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    for n in [2usize, 8, 1024] {
        let mut one_hot = vec![0.0; n];
        one_hot[n - 1] = 0.7;
        let g = gini_frame(&one_hot).unwrap();
        if (g - (1.0 - 2.0 / n as f64)).abs() > 1e-12 {
            failures.push(format!("one-hot N={n}: {g}"));
        }
        let g = gini_frame(&vec![0.3; n]).unwrap();
        if (g + 1.0 / n as f64).abs() > 1e-12 {
            failures.push(format!("uniform N={n}: {g}"));
        }
    }
    let s = real_tf(1, vec![2.0, 1.0]);
    let u = real_tf(1, vec![1.0, 3.0]);
    let sc = separation_scores(&ideal_binary_mask(&s, &u).unwrap(), &s, &u).unwrap();
    if (sc.psr - 0.8).abs() > 1e-12 || (sc.sir - 4.0).abs() > 1e-12 || (sc.wdo - 0.6).abs() > 1e-12 {
        failures.push(format!("hand case: {sc:?}"));
    }
    let zero = real_tf(1, vec![0.0, 0.0]);
    let sc0 = separation_scores(&ideal_binary_mask(&s, &zero).unwrap(), &s, &zero).unwrap();
    if sc0.wdo != 1.0 {
        failures.push(format!("U = 0: WDO {}", sc0.wdo));
    }
    check(
        failures.is_empty(),
        if failures.is_empty() {
            format!("hand case PSR {} SIR {} WDO {}; U = 0 gives WDO {}", sc.psr, sc.sir, sc.wdo, sc0.wdo)
        } else {
            failures.join("; ")
        },
    )
}

fn random_pair(rng: &mut ChaCha8Rng) -> (TimeFrequencyMatrix, TimeFrequencyMatrix) {
    let rows = rng.random_range(1..6);
    let cols = rng.random_range(1..9);
    let complex = rng.random_bool(0.5);
    let draw = |rng: &mut ChaCha8Rng| {
        let scale = 10f64.powf(rng.random_range(-3.0..3.0));
        (0..rows * cols)
            .map(|_| {
                if rng.random_bool(0.2) {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
                }
            })
            .collect::<Vec<_>>()
    };
    let a = draw(rng);
    let b = draw(rng);
    let make = |v: Vec<Complex64>| {
        let mut layout = *real_tf(1, vec![0.0; cols]).layout();
        let values = if complex {
            layout.transform = TransformId::Stft;
            TfValues::Complex(Array2::from_shape_vec((rows, cols), v).unwrap())
        } else {
            TfValues::Real(Array2::from_shape_vec((rows, cols), v.iter().map(|c| c.re).collect()).unwrap())
        };
        TimeFrequencyMatrix::new(layout, values).unwrap()
    };
    (make(a), make(b))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = 0;
    let mut infinite_sir = 0;
    for _ in 0..1000 {
        let (s, u) = random_pair(&mut rng);
        let sc = separation_scores(&ideal_binary_mask(&s, &u).unwrap(), &s, &u).unwrap();
        let ok = (0.0..=1.0).contains(&sc.psr)
            && sc.sir >= 1.0
            && (0.0..=1.0).contains(&sc.wdo)
            && sc.wdo <= sc.psr;
        violations += usize::from(!ok);
        infinite_sir += usize::from(sc.sir.is_infinite());
    }
    check(
        violations == 0,
        format!("{violations} violations over 1000 pairs ({infinite_sir} with SIR = inf)"),
    )
}

fn mean_by<K: Ord>(records: &[MetricRecord], key: impl Fn(&MetricRecord) -> Option<(K, f64)>) -> BTreeMap<K, f64> {
    let mut acc: BTreeMap<K, (f64, usize)> = BTreeMap::new();
    for r in records {
        if let Some((k, v)) = key(r) {
            let e = acc.entry(k).or_default();
            e.0 += v;
            e.1 += 1;
        }
    }
    acc.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect()
}

fn criterion_6(records: &[MetricRecord], elapsed: Duration) -> Outcome {
    let wdo = mean_by(records, |r| Some(((r.source, r.transform), r.wdo)));
    let mut pass = elapsed < Duration::from_secs(600) && !records.is_empty();
    let mut parts = Vec::new();
    for label in SourceLabel::ALL {
        let get = |t| wdo.get(&(label, t)).copied().unwrap_or(f64::NAN);
        let (m, p, s) = (get(TransformId::Mdct), get(TransformId::Pqmf), get(TransformId::Stft));
        pass &= m > s && p > s;
        parts.push(format!("{label} mdct {m:.4} pqmf {p:.4} stft {s:.4}"));
    }
    check(pass, format!("mean WDO: {}; evaluate took {elapsed:.1?}", parts.join(", ")))
}

fn criterion_7(records: &[MetricRecord]) -> Outcome {
    let gi = mean_by(records, |r| {
        (r.source == SourceLabel::Bass).then_some(())?;
        r.gini.map(|g| (r.transform, g))
    });
    let get = |t| gi.get(&t).copied().unwrap_or(f64::NAN);
    let (m, p, s) = (get(TransformId::Mdct), get(TransformId::Pqmf), get(TransformId::Stft));
    check(
        m > s && p > s,
        format!("mean mixture GI: mdct {m:.4} pqmf {p:.4} stft {s:.4}"),
    )
}

fn criterion_8(dir: &Path, first_csv: &[u8]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for config in TransformConfig::standard_set() {
        let t = config.build().unwrap();
        for _ in 0..3 {
            let x = noise(&mut rng, 1.0);
            let y = noise(&mut rng, 1.0);
            let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let combo: Vec<f64> = x.samples().iter().zip(y.samples()).map(|(p, q)| a * p + b * q).collect();
            let lhs = t.analyze(&AudioSignal::new(combo, RATE).unwrap()).unwrap();
            let (tx, ty) = (t.analyze(&x).unwrap(), t.analyze(&y).unwrap());
            let (mut err, mut norm) = (0.0, 0.0);
            match (lhs.values(), tx.values(), ty.values()) {
                (TfValues::Real(l), TfValues::Real(p), TfValues::Real(q)) => {
                    Zip::from(l).and(p).and(q).for_each(|l, p, q| {
                        let r = a * p + b * q;
                        err += (l - r).powi(2);
                        norm += r * r;
                    })
                }
                (TfValues::Complex(l), TfValues::Complex(p), TfValues::Complex(q)) => {
                    Zip::from(l).and(p).and(q).for_each(|l, p, q| {
                        let r = p * a + q * b;
                        err += (l - r).norm_sqr();
                        norm += r.norm_sqr();
                    })
                }
                _ => return check(false, "value kinds differ"),
            }
            worst = worst.max((err / norm).sqrt());
        }
    }

    let replay = Command::new(env!("CARGO_BIN_EXE_fbx"))
        .current_dir(dir)
        .args(["replay", "run.json"])
        .output()
        .unwrap();
    let second = std::fs::read(dir.join("metrics.csv")).unwrap_or_default();
    let identical = replay.status.success() && second == first_csv;
    check(
        worst <= 1e-12 && identical,
        format!(
            "worst relative linearity error {worst:.2e}; replayed CSV identical: {identical} ({} bytes)",
            second.len()
        ),
    )
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut report = |n, name, o: Outcome| {
        println!(
            "criterion {n} [{name}]: {} ({})",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push((n, name, o));
    };
    report(1, "mdct/stft reconstruction", criterion_1());
    report(2, "pqmf near-perfect reconstruction", criterion_2());
    report(3, "small-scale design", criterion_3());
    report(4, "metric oracles", criterion_4());
    report(5, "mask bounds", criterion_5());

    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let eval = Command::new(env!("CARGO_BIN_EXE_fbx"))
        .current_dir(dir.path())
        .args([
            "evaluate", "--synthetic", "--tracks", "10", "--seed", "7", "--duration", "10",
            "--out", "metrics.csv", "--save-config", "run.json",
        ])
        .output()
        .unwrap();
    let elapsed = start.elapsed();
    let csv = std::fs::read(dir.path().join("metrics.csv")).unwrap_or_default();
    let records = if eval.status.success() {
        read_records_csv(&csv[..]).unwrap_or_default()
    } else {
        eprintln!("{}", String::from_utf8_lossy(&eval.stderr));
        Vec::new()
    };
    report(6, "WDO ordering", criterion_6(&records, elapsed));
    report(7, "GI ordering", criterion_7(&records));
    report(8, "linearity and determinism", criterion_8(dir.path(), &csv));

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
