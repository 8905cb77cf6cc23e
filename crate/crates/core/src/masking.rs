//! Ideal binary masks, masking-based source estimates, the preserved-signal
//! / signal-to-interference ratios with the W-disjoint orthogonality built
//! from them, and the Gini sparsity index.

use std::io::{Read, Write};

use ndarray::{Array2, Zip};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::filterbanks::{
    expect_len, read_container, shape_err, write_container, AudioSignal, TfLayout,
    TimeFrequencyMatrix, Transform, TransformId, ValueKind,
};

/// 0/1 gains over the cells of a [`TimeFrequencyMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryMask {
    layout: TfLayout,
    values: Array2<u8>,
}

impl BinaryMask {
    pub fn new(layout: TfLayout, values: Array2<u8>) -> Result<Self> {
        if values.iter().any(|&v| v > 1) {
            return Err(invalid("mask entries must be 0 or 1"));
        }
        if values.ncols() != layout.num_subbands {
            return Err(invalid("mask width differs from the subband count"));
        }
        Ok(Self { layout, values })
    }

    /// Mask of the same shape as `tf` with every entry set to `value`.
    pub fn filled(tf: &TimeFrequencyMatrix, value: bool) -> Self {
        Self {
            layout: *tf.layout(),
            values: Array2::from_elem((tf.num_frames(), tf.num_subbands()), value as u8),
        }
    }

    pub fn values(&self) -> &Array2<u8> {
        &self.values
    }

    pub fn layout(&self) -> &TfLayout {
        &self.layout
    }

    pub fn transform(&self) -> TransformId {
        self.layout.transform
    }

    pub fn num_subbands(&self) -> usize {
        self.layout.num_subbands
    }

    pub fn count_ones(&self) -> usize {
        self.values.iter().filter(|&&v| v == 1).count()
    }

    fn check_shape(&self, tf: &TimeFrequencyMatrix) -> Result<()> {
        if self.layout.transform != tf.transform() || self.values.dim() != (tf.num_frames(), tf.num_subbands()) {
            return Err(invalid(format!(
                "mask {:?} ({}) does not match coefficients {:?} ({})",
                self.values.dim(),
                self.layout.transform,
                (tf.num_frames(), tf.num_subbands()),
                tf.transform()
            )));
        }
        Ok(())
    }

    /// Same container as coefficient matrices with `value_kind = binary`,
    /// one byte per cell.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let payload: Vec<u8> = self.values.iter().copied().collect();
        write_container(&mut out, &self.layout, self.values.nrows(), ValueKind::Binary, &payload)
    }

    pub fn read_from<R: Read>(input: R) -> Result<Self> {
        let (header, payload) = read_container(input)?;
        if header.value_kind != ValueKind::Binary {
            return Err(Error::Format("container does not hold a binary mask".into()));
        }
        expect_len(&payload, header.num_frames * header.num_subbands)?;
        let values = Array2::from_shape_vec((header.num_frames, header.num_subbands), payload)
            .map_err(shape_err)?;
        Self::new(header.layout(), values)
    }
}

/// `1` where `|S(t,k)| ≥ |U(t,k)|`, else `0`. Ties keep the cell.
pub fn ideal_binary_mask(
    target: &TimeFrequencyMatrix,
    interference: &TimeFrequencyMatrix,
) -> Result<BinaryMask> {
    if !target.same_shape(interference) {
        return Err(invalid("target and interference coefficients differ in shape or transform"));
    }
    let s = target.magnitudes();
    let u = interference.magnitudes();
    let values = Zip::from(&s).and(&u).map_collect(|a, b| (a >= b) as u8);
    Ok(BinaryMask {
        layout: *target.layout(),
        values,
    })
}

/// `T⁻¹(mask ⊙ T(mixture))`.
pub fn separate_source(
    mixture: &AudioSignal,
    mask: &BinaryMask,
    transform: &Transform,
) -> Result<AudioSignal> {
    let tf = transform.analyze(mixture)?;
    mask.check_shape(&tf)?;
    transform.synthesize(&tf.masked(&mask.values))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationScores {
    /// Fraction of target energy kept by the mask.
    pub psr: f64,
    /// Kept target energy over kept interference energy; `+∞` when the mask
    /// admits no interference.
    pub sir: f64,
    /// `PSR − PSR/SIR`.
    pub wdo: f64,
}

impl SeparationScores {
    /// Builds the scores from the three energy sums, resolving the
    /// degenerate ratios: an interference-free estimate has `SIR = +∞`, and
    /// an estimate without target energy (or a silent target) has
    /// `PSR = WDO = 0`.
    pub fn from_energies(kept_target: f64, total_target: f64, kept_interference: f64) -> Self {
        let psr = if total_target > 0.0 {
            kept_target / total_target
        } else {
            0.0
        };
        let sir = if kept_interference > 0.0 {
            kept_target / kept_interference
        } else {
            f64::INFINITY
        };
        let wdo = if psr == 0.0 { 0.0 } else { psr - psr / sir };
        Self { psr, sir, wdo }
    }
}

/// Energy sums run over every frame and subband before the ratios are
/// formed.
pub fn separation_scores(
    mask: &BinaryMask,
    target: &TimeFrequencyMatrix,
    interference: &TimeFrequencyMatrix,
) -> Result<SeparationScores> {
    if !target.same_shape(interference) {
        return Err(invalid("target and interference coefficients differ in shape or transform"));
    }
    mask.check_shape(target)?;
    let s = target.magnitudes();
    let u = interference.magnitudes();
    let mut kept_target = 0.0;
    let mut total_target = 0.0;
    let mut kept_interference = 0.0;
    Zip::from(&mask.values).and(&s).and(&u).for_each(|&m, &s, &u| {
        let s2 = s * s;
        total_target += s2;
        if m == 1 {
            kept_target += s2;
            kept_interference += u * u;
        }
    });
    Ok(SeparationScores::from_energies(kept_target, total_target, kept_interference))
}

/// Gini index of one frame of magnitudes:
/// `1/N + 1 − 2 Σ_k (|X(k)|/‖X‖₁)·((N − k + ½)/N)` over the magnitudes
/// sorted ascending. `None` for a silent frame.
pub fn gini_frame(magnitudes: &[f64]) -> Option<f64> {
    let n = magnitudes.len();
    let l1: f64 = magnitudes.iter().sum();
    if n == 0 || l1 <= 0.0 {
        return None;
    }
    let mut sorted = magnitudes.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nf = n as f64;
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(k, x)| (x / l1) * ((nf - k as f64 + 0.5) / nf))
        .sum();
    Some(1.0 / nf + 1.0 - 2.0 * weighted)
}

/// Mean per-frame Gini index over the non-silent frames; `None` when every
/// frame is silent.
pub fn gini_index(tf: &TimeFrequencyMatrix) -> Option<f64> {
    let mags = tf.magnitudes();
    let mut sum = 0.0;
    let mut count = 0usize;
    for row in mags.rows() {
        let row = row.to_vec();
        if let Some(g) = gini_frame(&row) {
            sum += g;
            count += 1;
        }
    }
    (count > 0).then(|| sum / count as f64)
}
