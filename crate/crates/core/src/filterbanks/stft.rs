use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{AudioSignal, TfLayout, TfValues, TimeFrequencyMatrix, TransformId};
use crate::error::{invalid, Result};
use crate::window_design::hamming_window;

/// Hamming-windowed STFT keeping `N = M/2` complex bins per frame.
///
/// DC and Nyquist are both real for a real frame, so bin 0 stores the DC
/// value in its real part and the Nyquist value in its imaginary part. The
/// representation is lossless; synthesis uses weighted overlap-add
/// normalized by the accumulated squared window.
#[derive(Clone)]
pub struct Stft {
    frame_length: usize,
    hop: usize,
    window: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Stft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Stft")
            .field("frame_length", &self.frame_length)
            .field("hop", &self.hop)
            .finish()
    }
}

impl Stft {
    pub fn new(frame_length: usize, hop: usize) -> Result<Self> {
        if frame_length < 2 || !frame_length.is_multiple_of(2) {
            return Err(invalid(format!(
                "STFT frame length must be even and at least 2, got {frame_length}"
            )));
        }
        if hop == 0 || hop > frame_length {
            return Err(invalid(format!(
                "STFT hop must be in 1..={frame_length}, got {hop}"
            )));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            frame_length,
            hop,
            window: hamming_window(frame_length)?,
            forward: planner.plan_fft_forward(frame_length),
            inverse: planner.plan_fft_inverse(frame_length),
        })
    }

    pub fn frame_length(&self) -> usize {
        self.frame_length
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn num_subbands(&self) -> usize {
        self.frame_length / 2
    }

    fn num_frames(&self, len: usize) -> usize {
        if len <= self.frame_length {
            1
        } else {
            (len - self.frame_length).div_ceil(self.hop) + 1
        }
    }

    pub fn analyze(&self, signal: &AudioSignal) -> Result<TimeFrequencyMatrix> {
        signal.require_nonempty()?;
        let m = self.frame_length;
        let n = self.num_subbands();
        let frames = self.num_frames(signal.len());
        let mut padded = signal.samples().to_vec();
        padded.resize((frames - 1) * self.hop + m, 0.0);

        let mut values = Array2::zeros((frames, n));
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for t in 0..frames {
            let start = t * self.hop;
            for (i, b) in buf.iter_mut().enumerate() {
                *b = Complex64::new(padded[start + i] * self.window[i], 0.0);
            }
            self.forward.process(&mut buf);
            let mut row = values.row_mut(t);
            row[0] = Complex64::new(buf[0].re, buf[n].re);
            for k in 1..n {
                row[k] = buf[k];
            }
        }
        let layout = TfLayout {
            transform: TransformId::Stft,
            frame_length: m,
            hop: self.hop,
            num_subbands: n,
            original_length: signal.len(),
            sample_rate: signal.sample_rate(),
        };
        TimeFrequencyMatrix::new(layout, TfValues::Complex(values))
    }

    pub fn synthesize(&self, tf: &TimeFrequencyMatrix) -> Result<AudioSignal> {
        let m = self.frame_length;
        let n = self.num_subbands();
        let layout = tf.layout();
        if layout.transform != TransformId::Stft || layout.num_subbands != n || layout.hop != self.hop
        {
            return Err(invalid(format!(
                "expected stft coefficients with {n} bins and hop {}",
                self.hop
            )));
        }
        let TfValues::Complex(values) = tf.values() else {
            return Err(invalid("stft coefficients must be complex"));
        };
        let frames = values.nrows();
        let total = (frames - 1) * self.hop + m;
        let mut out = vec![0.0; total];
        let mut norm = vec![0.0; total];
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        let scale = 1.0 / m as f64;
        for (t, row) in values.rows().into_iter().enumerate() {
            buf[0] = Complex64::new(row[0].re, 0.0);
            buf[n] = Complex64::new(row[0].im, 0.0);
            for k in 1..n {
                buf[k] = row[k];
                buf[m - k] = row[k].conj();
            }
            self.inverse.process(&mut buf);
            let start = t * self.hop;
            for i in 0..m {
                let w = self.window[i];
                out[start + i] += w * buf[i].re * scale;
                norm[start + i] += w * w;
            }
        }
        let len = layout.original_length.min(total);
        let mut samples: Vec<f64> = out[..len]
            .iter()
            .zip(&norm[..len])
            .map(|(y, w2)| if *w2 > 0.0 { y / w2 } else { 0.0 })
            .collect();
        samples.resize(layout.original_length, 0.0);
        AudioSignal::new(samples, layout.sample_rate)
    }
}

pub fn stft_analyze(signal: &AudioSignal, frame_length: usize, hop: usize) -> Result<TimeFrequencyMatrix> {
    Stft::new(frame_length, hop)?.analyze(signal)
}

pub fn stft_synthesize(tf: &TimeFrequencyMatrix) -> Result<AudioSignal> {
    let layout = tf.layout();
    Stft::new(layout.frame_length, layout.hop)?.synthesize(tf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filterbanks::round_trip_snr;

    fn noise(len: usize) -> AudioSignal {
        AudioSignal::new(
            (0..len).map(|i| ((i * 7919 % 1013) as f64 / 506.5) - 1.0).collect(),
            44100,
        )
        .unwrap()
    }

    #[test]
    fn hop_validation() {
        assert!(Stft::new(2048, 0).is_err());
        assert!(Stft::new(2048, 2049).is_err());
        assert!(Stft::new(2048, 2048).is_ok());
    }

    #[test]
    fn paper_hop_overlap() {
        let overlap: f64 = 1.0 - 410.0 / 2048.0;
        assert!((overlap - 0.7998).abs() < 1e-4);
    }

    #[test]
    fn bins_match_direct_dft() {
        let x = noise(64);
        let tf = stft_analyze(&x, 16, 8).unwrap();
        let TfValues::Complex(v) = tf.values() else { panic!() };
        let w = hamming_window(16).unwrap();
        for t in 0..v.nrows() {
            let mut frame = [0.0; 16];
            for i in 0..16 {
                frame[i] = x.samples().get(t * 8 + i).copied().unwrap_or(0.0) * w[i];
            }
            let dft = |k: usize| {
                frame.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (i, &s)| {
                    acc + Complex64::from_polar(s, -2.0 * std::f64::consts::PI * (k * i) as f64 / 16.0)
                })
            };
            assert!((v[[t, 0]].re - dft(0).re).abs() < 1e-12);
            assert!((v[[t, 0]].im - dft(8).re).abs() < 1e-12);
            for k in 1..8 {
                assert!((v[[t, k]] - dft(k)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn wola_reconstruction_for_awkward_hops() {
        let x = noise(3001);
        for hop in [1, 5, 410, 1000, 2048] {
            let back = stft_synthesize(&stft_analyze(&x, 2048, hop).unwrap()).unwrap();
            assert!(round_trip_snr(&x, &back).unwrap() > 250.0, "hop {hop}");
        }
    }

    #[test]
    fn magnitudes_follow_hop_shift() {
        let hop = 16;
        let len = 40 * hop;
        let x = noise(len);
        let shifted: Vec<f64> = (0..len).map(|i| x.samples()[(i + len - hop) % len]).collect();
        let shifted = AudioSignal::new(shifted, 44100).unwrap();
        let a = stft_analyze(&x, 64, hop).unwrap().magnitudes();
        let b = stft_analyze(&shifted, 64, hop).unwrap().magnitudes();
        // interior frames realign by one hop
        for t in 2..a.nrows() - 4 {
            for k in 0..32 {
                assert!((b[[t + 1, k]] - a[[t, k]]).abs() < 1e-12);
            }
        }
    }
}
