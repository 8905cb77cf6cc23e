use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::multitrack::{MultiTrack, SourceLabel, Stem};
use crate::error::{invalid, Result};
use crate::filterbanks::AudioSignal;

pub const SYNTH_SAMPLE_RATE: u32 = 44100;

/// Deterministic four-stem tracks standing in for recorded multitracks.
///
/// * vocals: harmonic notes with vibrato and a spectral envelope
/// * drums: kick sweeps, snare and hi-hat noise bursts with exponential decay
/// * bass: low-passed harmonic notes on the beat
/// * other: sustained chords with a little band-limited noise
pub fn synth_corpus(seed: u64, num_tracks: usize, duration_secs: f64) -> Result<Vec<MultiTrack>> {
    if !(duration_secs >= 1.0) || !duration_secs.is_finite() {
        return Err(invalid(format!("duration must be at least 1 s, got {duration_secs}")));
    }
    (0..num_tracks)
        .map(|i| synth_track(seed, i, duration_secs))
        .collect()
}

fn synth_track(seed: u64, index: usize, duration_secs: f64) -> Result<MultiTrack> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    let len = (duration_secs * SYNTH_SAMPLE_RATE as f64).round() as usize;
    let song = Song {
        len,
        rate: SYNTH_SAMPLE_RATE as f64,
        beat: 60.0 / rng.random_range(84.0..132.0),
        root: 55.0 * 2f64.powf(rng.random_range(0..12) as f64 / 12.0),
    };
    let mut sources = BTreeMap::new();
    let stems = [
        (SourceLabel::Bass, song.bass(&mut rng)),
        (SourceLabel::Drums, song.drums(&mut rng)),
        (SourceLabel::Other, song.other(&mut rng)),
        (SourceLabel::Vocals, song.vocals(&mut rng)),
    ];
    for (label, mut samples) in stems {
        let gain_db = rng.random_range(-3.0..3.0);
        normalize_rms(&mut samples, 0.1 * 10f64.powf(gain_db / 20.0));
        sources.insert(label, Stem::Mono(AudioSignal::new(samples, SYNTH_SAMPLE_RATE)?));
    }
    MultiTrack::new(format!("synth-{seed}-{index:03}"), sources)
}

fn normalize_rms(x: &mut [f64], target: f64) {
    let rms = (x.iter().map(|v| v * v).sum::<f64>() / x.len().max(1) as f64).sqrt();
    if rms > 0.0 {
        let g = target / rms;
        x.iter_mut().for_each(|v| *v *= g);
    }
}

/// Scale degrees in semitones used for melodies and chords.
const SCALE: [i32; 7] = [0, 2, 3, 5, 7, 8, 10];

fn degree(step: i32) -> f64 {
    let octave = step.div_euclid(7);
    let semis = SCALE[step.rem_euclid(7) as usize] + 12 * octave;
    2f64.powf(semis as f64 / 12.0)
}

struct Song {
    len: usize,
    rate: f64,
    beat: f64,
    root: f64,
}

impl Song {
    fn samples(&self, secs: f64) -> usize {
        (secs * self.rate).round() as usize
    }

    /// Adds a harmonic note starting at `start` with attack/release envelope
    /// and random partial phases.
    #[allow(clippy::too_many_arguments)]
    fn add_note(
        &self,
        rng: &mut ChaCha8Rng,
        out: &mut [f64],
        start: usize,
        dur: usize,
        f0: f64,
        partials: &[f64],
        vibrato: (f64, f64),
        attack: f64,
        release: f64,
    ) {
        let end = (start + dur).min(out.len());
        let att = self.samples(attack).max(1);
        let rel = self.samples(release).max(1);
        let mut phase = 0.0;
        let nyquist = self.rate / 2.0;
        let offsets: Vec<f64> = partials.iter().map(|_| rng.random_range(0.0..TAU)).collect();
        for (i, o) in out[start.min(end)..end].iter_mut().enumerate() {
            let t = i as f64 / self.rate;
            let f = f0 * (1.0 + vibrato.1 * (TAU * vibrato.0 * t).sin());
            phase += TAU * f / self.rate;
            let env = (i as f64 / att as f64).min(1.0) * ((dur - i) as f64 / rel as f64).min(1.0);
            let mut v = 0.0;
            for (h, a) in partials.iter().enumerate() {
                let k = (h + 1) as f64;
                if k * f < nyquist {
                    v += a * (k * phase + offsets[h]).sin();
                }
            }
            *o += env * v;
        }
    }

    fn vocals(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut out = vec![0.0; self.len];
        let formant = rng.random_range(600.0..1200.0);
        let mut pos = self.samples(rng.random_range(0.0..self.beat));
        let mut step = rng.random_range(7..12);
        while pos < self.len {
            let beats = [0.5, 1.0, 1.0, 1.5, 2.0][rng.random_range(0..5)];
            let dur = self.samples(beats * self.beat);
            step = (step + rng.random_range(-2..=2)).clamp(5, 16);
            let f0 = self.root * 2.0 * degree(step);
            let partials: Vec<f64> = (1..=16)
                .map(|h| {
                    let f = f0 * h as f64;
                    let env = 1.0 / (1.0 + ((f - formant) / 400.0).powi(2));
                    (env + 0.3 / h as f64) / h as f64
                })
                .collect();
            let vib = (rng.random_range(4.5..6.5), rng.random_range(0.004..0.012));
            self.add_note(rng, &mut out, pos, dur, f0, &partials, vib, 0.04, 0.08);
            pos += dur;
            if rng.random_bool(0.25) {
                pos += self.samples(self.beat * rng.random_range(0.5..2.0));
            }
        }
        out
    }

    fn bass(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut out = vec![0.0; self.len];
        let partials: Vec<f64> = (1..=10).map(|h| 1.0 / (h * h) as f64).collect();
        let mut pos = 0;
        while pos < self.len {
            let dur = self.samples(self.beat * [1.0, 1.0, 2.0][rng.random_range(0..3)]);
            let f0 = self.root * degree([0, 0, 3, 4, 5][rng.random_range(0..5)]);
            self.add_note(rng, &mut out, pos, dur.saturating_sub(self.samples(0.02)), f0, &partials, (0.0, 0.0), 0.01, 0.05);
            pos += dur;
        }
        one_pole_lowpass(&mut out, 400.0, self.rate);
        out
    }

    fn other(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut out = vec![0.0; self.len];
        let partials: Vec<f64> = (1..=8).map(|h| 0.8f64.powi(h) / h as f64).collect();
        let mut pos = 0;
        while pos < self.len {
            let dur = self.samples(self.beat * 4.0);
            let base = [0, 3, 4, 5][rng.random_range(0..4)] + 7;
            for offset in [0, 2, 4] {
                let f0 = self.root * degree(base + offset) * (1.0 + rng.random_range(-0.002..0.002));
                self.add_note(rng, &mut out, pos, dur, f0, &partials, (0.3, 0.002), 0.15, 0.3);
            }
            pos += dur;
        }
        let mut noise: Vec<f64> = (0..self.len).map(|_| rng.random_range(-1.0..1.0)).collect();
        one_pole_lowpass(&mut noise, 3000.0, self.rate);
        one_pole_highpass(&mut noise, 1000.0, self.rate);
        normalize_rms(&mut noise, 0.05 * rms(&out));
        out.iter_mut().zip(&noise).for_each(|(o, n)| *o += n);
        out
    }

    fn drums(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut out = vec![0.0; self.len];
        let eighth = self.beat / 2.0;
        let mut slot = 0usize;
        loop {
            let start = self.samples(slot as f64 * eighth);
            if start >= self.len {
                break;
            }
            let on_beat = slot.is_multiple_of(2);
            let backbeat = slot % 4 == 2;
            if on_beat && !backbeat || rng.random_bool(0.1) {
                self.kick(&mut out, start, rng);
            }
            if backbeat {
                self.noise_burst(&mut out, start, 0.12, (200.0, 6000.0), 0.8, rng);
            }
            self.noise_burst(&mut out, start, 0.03, (6000.0, 16000.0), 0.25, rng);
            slot += 1;
        }
        out
    }

    fn kick(&self, out: &mut [f64], start: usize, rng: &mut ChaCha8Rng) {
        let dur = self.samples(0.25).min(out.len() - start);
        let mut phase = 0.0;
        let amp = rng.random_range(0.8..1.0);
        for i in 0..dur {
            let t = i as f64 / self.rate;
            let f = 50.0 + 90.0 * (-t / 0.03).exp();
            phase += TAU * f / self.rate;
            out[start + i] += amp * (-t / 0.08).exp() * phase.sin();
        }
    }

    fn noise_burst(
        &self,
        out: &mut [f64],
        start: usize,
        decay: f64,
        band: (f64, f64),
        amp: f64,
        rng: &mut ChaCha8Rng,
    ) {
        let dur = self.samples(decay * 5.0).min(out.len() - start);
        let mut burst: Vec<f64> = (0..dur).map(|_| rng.random_range(-1.0..1.0)).collect();
        one_pole_lowpass(&mut burst, band.1, self.rate);
        one_pole_highpass(&mut burst, band.0, self.rate);
        let amp = amp * rng.random_range(0.7..1.0);
        for (i, b) in burst.iter().enumerate() {
            out[start + i] += amp * (-(i as f64) / self.rate / decay).exp() * b;
        }
    }
}

fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len().max(1) as f64).sqrt()
}

fn one_pole_lowpass(x: &mut [f64], cutoff: f64, rate: f64) {
    let a = (-TAU * cutoff / rate).exp();
    let mut y = 0.0;
    for v in x.iter_mut() {
        y = (1.0 - a) * *v + a * y;
        *v = y;
    }
}

fn one_pole_highpass(x: &mut [f64], cutoff: f64, rate: f64) {
    let a = (-TAU * cutoff / rate).exp();
    let mut lp = 0.0;
    for v in x.iter_mut() {
        lp = (1.0 - a) * *v + a * lp;
        *v -= lp;
    }
}
