use std::f64::consts::PI;

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array2, Array3, Axis};

use super::{AudioSignal, TfLayout, TfValues, TimeFrequencyMatrix, TransformId};
use crate::error::{invalid, Result};
use crate::window_design::PrototypeWindow;

/// Analysis and synthesis polyphase tensors of a pseudo-QMF filterbank.
///
/// `analysis[m][n'][k]` multiplies sample `n'` of input block `t − m` into
/// subband `k` of frame `t`; `synthesis[m][k][n]` maps subband `k` of frame
/// `t − m` onto sample `n` of output block `t`.
#[derive(Debug, Clone)]
pub struct PolyphasePair {
    analysis: Array3<f64>,
    synthesis: Array3<f64>,
    window: PrototypeWindow,
    delay: usize,
}

/// `cos(π/N · (k + ½) · (j − N/2 + ½))` with the angle reduced exactly
/// modulo 2π in integer arithmetic.
pub(crate) fn modulation(k: usize, j: i64, n: usize) -> f64 {
    let period = 8 * n as i64;
    let p = ((2 * k as i64 + 1) * (2 * j - n as i64 + 1)).rem_euclid(period);
    (PI * p as f64 / (4 * n) as f64).cos()
}

/// Builds the polyphase pair of `window` and measures its system delay.
///
/// ```text
/// P^a_{N−1−n, k}(m) = h(mN + n) √(2/N) cos(π/N (k + ½)(LN − 1 − mN − n − N/2 + ½))
/// P^s_{k, n}(m)     = h(mN + n) √(2/N) cos(π/N (k + ½)(mN + n − N/2 + ½))
/// ```
pub fn build_polyphase(window: &PrototypeWindow) -> Result<PolyphasePair> {
    let n = window.num_subbands();
    let l = window.overlap_factor();
    if n == 0 || l == 0 || window.len() != n * l {
        return Err(invalid("prototype length must equal L·N"));
    }
    let h = window.coefficients();
    let gain = (2.0 / n as f64).sqrt();
    let total = (l * n) as i64;

    let mut analysis = Array3::zeros((l, n, n));
    let mut synthesis = Array3::zeros((l, n, n));
    for m in 0..l {
        for j in 0..n {
            let tap = h[m * n + j] * gain;
            let pos = (m * n + j) as i64;
            for k in 0..n {
                analysis[[m, n - 1 - j, k]] = tap * modulation(k, total - 1 - pos, n);
                synthesis[[m, k, j]] = tap * modulation(k, pos, n);
            }
        }
    }

    let mut pair = PolyphasePair {
        analysis,
        synthesis,
        window: window.clone(),
        delay: 0,
    };
    pair.delay = pair.measure_delay();
    Ok(pair)
}

impl PolyphasePair {
    pub fn num_subbands(&self) -> usize {
        self.window.num_subbands()
    }

    pub fn overlap(&self) -> usize {
        self.window.overlap_factor()
    }

    pub fn window(&self) -> &PrototypeWindow {
        &self.window
    }

    /// Tensor of shape `(L, N, N)` indexed `[m][n'][k]`.
    pub fn analysis(&self) -> &Array3<f64> {
        &self.analysis
    }

    /// Tensor of shape `(L, N, N)` indexed `[m][k][n]`.
    pub fn synthesis(&self) -> &Array3<f64> {
        &self.synthesis
    }

    /// Samples between input and reconstructed output, measured once by
    /// propagating a unit impulse through analysis and synthesis.
    pub fn delay(&self) -> usize {
        self.delay
    }

    fn measure_delay(&self) -> usize {
        let n = self.num_subbands();
        let mut block = Array2::zeros((1, n));
        block[[0, 0]] = 1.0;
        let response = self.synthesize_raw(&self.analyze_blocks(&block));
        let (idx, peak) = response
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |(bi, bv), (i, v)| {
                if v.abs() > bv {
                    (i, v.abs())
                } else {
                    (bi, bv)
                }
            });
        if peak == 0.0 {
            // degenerate prototype; use the nominal delay of the construction
            (self.overlap() - 1) * n
        } else {
            idx
        }
    }

    fn analyze_blocks(&self, blocks: &Array2<f64>) -> Array2<f64> {
        let l = self.overlap();
        let (b, n) = blocks.dim();
        let mut out = Array2::zeros((b + l - 1, n));
        for (m, pa) in self.analysis.axis_iter(Axis(0)).enumerate() {
            let mut dst = out.slice_mut(s![m..m + b, ..]);
            general_mat_mul(1.0, blocks, &pa, 1.0, &mut dst);
        }
        out
    }

    fn synthesize_raw(&self, frames: &Array2<f64>) -> Vec<f64> {
        let l = self.overlap();
        let (t, n) = frames.dim();
        let mut out = Array2::zeros((t + l - 1, n));
        for (m, ps) in self.synthesis.axis_iter(Axis(0)).enumerate() {
            let mut dst = out.slice_mut(s![m..m + t, ..]);
            general_mat_mul(1.0, frames, &ps, 1.0, &mut dst);
        }
        out.into_raw_vec_and_offset().0
    }

    /// Zero-pads to whole blocks of `N` samples and applies the analysis
    /// polyphase convolution; yields `blocks + L − 1` frames.
    pub fn analyze(&self, signal: &AudioSignal) -> Result<TimeFrequencyMatrix> {
        signal.require_nonempty()?;
        let n = self.num_subbands();
        let b = signal.len().div_ceil(n);
        let mut blocks = Array2::zeros((b, n));
        for (i, &x) in signal.samples().iter().enumerate() {
            blocks[[i / n, i % n]] = x;
        }
        let layout = TfLayout {
            transform: TransformId::Pqmf,
            frame_length: n * self.overlap(),
            hop: n,
            num_subbands: n,
            original_length: signal.len(),
            sample_rate: signal.sample_rate(),
        };
        TimeFrequencyMatrix::new(layout, TfValues::Real(self.analyze_blocks(&blocks)))
    }

    /// Synthesis polyphase convolution followed by delay compensation and
    /// trimming to the original length.
    pub fn synthesize(&self, tf: &TimeFrequencyMatrix) -> Result<AudioSignal> {
        if tf.transform() != TransformId::Pqmf {
            return Err(invalid(format!("expected pqmf coefficients, got {}", tf.transform())));
        }
        if tf.num_subbands() != self.num_subbands() {
            return Err(invalid(format!(
                "coefficients have {} subbands, filterbank has {}",
                tf.num_subbands(),
                self.num_subbands()
            )));
        }
        let TfValues::Real(frames) = tf.values() else {
            return Err(invalid("pqmf coefficients must be real"));
        };
        let raw = self.synthesize_raw(frames);
        let len = tf.original_length();
        let mut samples = vec![0.0; len];
        let avail = raw.len().saturating_sub(self.delay).min(len);
        samples[..avail].copy_from_slice(&raw[self.delay..self.delay + avail]);
        AudioSignal::new(samples, tf.layout().sample_rate)
    }
}

pub fn pqmf_analyze(signal: &AudioSignal, pair: &PolyphasePair) -> Result<TimeFrequencyMatrix> {
    pair.analyze(signal)
}

pub fn pqmf_synthesize(tf: &TimeFrequencyMatrix, pair: &PolyphasePair) -> Result<AudioSignal> {
    pair.synthesize(tf)
}
