use std::f64::consts::PI;

use ndarray::Array2;

use super::{AudioSignal, TfLayout, TfValues, TimeFrequencyMatrix, TransformId};
use crate::error::{invalid, Result};
use crate::window_design::sine_window;

/// Sine-windowed MDCT with `N = M/2` subbands and 50% overlap.
#[derive(Debug, Clone)]
pub struct Mdct {
    frame_length: usize,
    /// `w(n)·cos(π/N (n + ½ + N/2)(k + ½))`, shape `(M, N)`.
    basis: Array2<f64>,
}

impl Mdct {
    pub fn new(frame_length: usize) -> Result<Self> {
        if frame_length < 2 || !frame_length.is_multiple_of(2) {
            return Err(invalid(format!(
                "MDCT frame length must be even and at least 2, got {frame_length}"
            )));
        }
        let n = frame_length / 2;
        let window = sine_window(frame_length)?;
        let period = 8 * n;
        let basis = Array2::from_shape_fn((frame_length, n), |(i, k)| {
            // (n + ½ + N/2)(k + ½)·π/N = π·(2n + 1 + N)(2k + 1)/(4N)
            let p = ((2 * i + 1 + n) * (2 * k + 1)) % period;
            window[i] * (PI * p as f64 / (4 * n) as f64).cos()
        });
        Ok(Self {
            frame_length,
            basis,
        })
    }

    pub fn frame_length(&self) -> usize {
        self.frame_length
    }

    pub fn num_subbands(&self) -> usize {
        self.frame_length / 2
    }

    /// `N` zeros are prepended and the tail is padded to whole hops plus
    /// another `N` zeros, so every sample lies under two frames.
    pub fn analyze(&self, signal: &AudioSignal) -> Result<TimeFrequencyMatrix> {
        signal.require_nonempty()?;
        let n = self.num_subbands();
        let blocks = signal.len().div_ceil(n) + 2;
        let mut padded = vec![0.0; blocks * n];
        padded[n..n + signal.len()].copy_from_slice(signal.samples());

        let frames = blocks - 1;
        let stacked = Array2::from_shape_fn((frames, self.frame_length), |(t, i)| padded[t * n + i]);
        let coeffs = stacked.dot(&self.basis);
        let layout = TfLayout {
            transform: TransformId::Mdct,
            frame_length: self.frame_length,
            hop: n,
            num_subbands: n,
            original_length: signal.len(),
            sample_rate: signal.sample_rate(),
        };
        TimeFrequencyMatrix::new(layout, TfValues::Real(coeffs))
    }

    /// Inverse transform, windowing and 50% overlap-add.
    pub fn synthesize(&self, tf: &TimeFrequencyMatrix) -> Result<AudioSignal> {
        let n = self.num_subbands();
        if tf.transform() != TransformId::Mdct || tf.num_subbands() != n {
            return Err(invalid(format!(
                "expected mdct coefficients with {n} subbands, got {} with {}",
                tf.transform(),
                tf.num_subbands()
            )));
        }
        let TfValues::Real(coeffs) = tf.values() else {
            return Err(invalid("mdct coefficients must be real"));
        };
        let frames = coeffs.dot(&self.basis.t());
        let t = frames.nrows();
        let mut out = vec![0.0; (t + 1) * n];
        let scale = 2.0 / n as f64;
        for (f, row) in frames.rows().into_iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                out[f * n + i] += scale * v;
            }
        }
        let len = tf.original_length();
        let mut samples = vec![0.0; len];
        let avail = out.len().saturating_sub(n).min(len);
        samples[..avail].copy_from_slice(&out[n..n + avail]);
        AudioSignal::new(samples, tf.layout().sample_rate)
    }
}

pub fn mdct_analyze(signal: &AudioSignal, frame_length: usize) -> Result<TimeFrequencyMatrix> {
    Mdct::new(frame_length)?.analyze(signal)
}

pub fn mdct_synthesize(tf: &TimeFrequencyMatrix) -> Result<AudioSignal> {
    Mdct::new(tf.layout().frame_length)?.synthesize(tf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filterbanks::round_trip_snr;

    #[test]
    fn subband_count() {
        assert_eq!(Mdct::new(2048).unwrap().num_subbands(), 1024);
        assert!(Mdct::new(7).is_err());
    }

    #[test]
    fn matches_direct_formula() {
        let m = 16;
        let n = 8;
        let x: Vec<f64> = (0..20).map(|i| ((i * 13 % 7) as f64) - 3.0).collect();
        let sig = AudioSignal::new(x.clone(), 8000).unwrap();
        let tf = mdct_analyze(&sig, m).unwrap();
        let TfValues::Real(c) = tf.values() else { panic!() };
        let w = sine_window(m).unwrap();
        let mut padded = vec![0.0; n];
        padded.extend(&x);
        padded.resize(padded.len() + 2 * m, 0.0);
        for t in 0..c.nrows() {
            for k in 0..n {
                let direct: f64 = (0..m)
                    .map(|i| {
                        w[i] * padded[t * n + i]
                            * (PI / n as f64 * (i as f64 + 0.5 + n as f64 / 2.0) * (k as f64 + 0.5)).cos()
                    })
                    .sum();
                assert!((c[[t, k]] - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn perfect_reconstruction() {
        let x: Vec<f64> = (0..5000).map(|i| ((i as f64) * 0.731).sin() * 0.7).collect();
        let sig = AudioSignal::new(x, 44100).unwrap();
        let back = mdct_synthesize(&mdct_analyze(&sig, 256).unwrap()).unwrap();
        assert!(round_trip_snr(&sig, &back).unwrap() > 250.0);
    }

    #[test]
    fn short_signal_is_padded_to_a_frame() {
        let sig = AudioSignal::new(vec![0.5, -0.25, 1.0], 8000).unwrap();
        let tf = mdct_analyze(&sig, 64).unwrap();
        assert_eq!(tf.num_frames(), 2);
        let back = mdct_synthesize(&tf).unwrap();
        assert!(round_trip_snr(&sig, &back).unwrap() > 250.0);
    }
}
