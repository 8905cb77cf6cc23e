//! Closed-form windows and the least-squares design of the pseudo-QMF
//! prototype.

mod design;
mod grid;
pub(crate) mod io;
mod response;
mod windows;

pub use design::{design_pqmf_prototype, DesignOptions};
pub use grid::{FrequencyGrid, Region};
pub use io::{read_window, sidecar_path, write_window, WindowSidecar};
pub use response::{dtft_magnitude, reconstruction_residual, residual_with_weights};
pub use windows::{hamming_window, sine_window};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Length `M = L·N` prototype `h(n)` of an `N`-band cosine-modulated
/// filterbank with overlap factor `L`. Always exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeWindow {
    coefficients: Vec<f64>,
    num_subbands: usize,
    overlap_factor: usize,
}

impl PrototypeWindow {
    /// Validates and wraps `coefficients`.
    ///
    /// Windows that are symmetric up to rounding (relative asymmetry below
    /// 1e-9) are snapped to exact symmetry by mirroring the first half.
    pub fn new(coefficients: Vec<f64>, num_subbands: usize, overlap_factor: usize) -> Result<Self> {
        if num_subbands == 0 || overlap_factor == 0 {
            return Err(invalid("prototype needs N ≥ 1 and L ≥ 1"));
        }
        let m = num_subbands * overlap_factor;
        if coefficients.len() != m {
            return Err(invalid(format!(
                "prototype length {} differs from L·N = {overlap_factor}·{num_subbands} = {m}",
                coefficients.len()
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(invalid("prototype coefficients must be finite"));
        }
        let peak = coefficients.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        let asym = (0..m / 2).fold(0.0f64, |a, n| {
            a.max((coefficients[n] - coefficients[m - 1 - n]).abs())
        });
        if asym > 1e-9 * peak {
            return Err(invalid(format!(
                "prototype must be symmetric (max asymmetry {asym:e})"
            )));
        }
        Ok(Self::from_half(&coefficients[..m.div_ceil(2)], num_subbands, overlap_factor))
    }

    /// Builds the symmetric window whose first `ceil(M/2)` samples are `half`.
    pub(crate) fn from_half(half: &[f64], num_subbands: usize, overlap_factor: usize) -> Self {
        let m = num_subbands * overlap_factor;
        debug_assert_eq!(half.len(), m.div_ceil(2));
        let mut coefficients = vec![0.0; m];
        for (n, &v) in half.iter().enumerate() {
            coefficients[n] = v;
            coefficients[m - 1 - n] = v;
        }
        Self {
            coefficients,
            num_subbands,
            overlap_factor,
        }
    }

    pub fn zeros(num_subbands: usize, overlap_factor: usize) -> Self {
        Self {
            coefficients: vec![0.0; num_subbands * overlap_factor],
            num_subbands,
            overlap_factor,
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn num_subbands(&self) -> usize {
        self.num_subbands
    }

    pub fn overlap_factor(&self) -> usize {
        self.overlap_factor
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coefficients: self.coefficients.iter().map(|c| c * factor).collect(),
            ..self.clone()
        }
    }

    /// Rescales the window so that the passband condition
    /// `|H(ω)|² + |H(π/N − ω)|² = 2` holds in the least-squares sense on the
    /// passband points of `grid`. Returns the window unchanged when its
    /// passband response vanishes.
    pub fn normalized_to_passband(&self, grid: &FrequencyGrid) -> Result<Self> {
        let sums = response::passband_power_sums(self, grid)?;
        let s1: f64 = sums.iter().sum();
        let s2: f64 = sums.iter().map(|p| p * p).sum();
        if s2 == 0.0 {
            return Ok(self.clone());
        }
        Ok(self.scaled((2.0 * s1 / s2).sqrt()))
    }
}

/// Diagnostics of a prototype against the two reconstruction conditions.
///
/// Responses are taken with the `1/N` normalization `|H(ω)| = |DTFT(h)(ω)|/N`,
/// which makes the condition `|H(ω)|² + |H(π/N − ω)|² = 2` coincide with unit
/// gain of the `√(2/N)`-scaled polyphase filterbank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    /// Weighted least-squares objective.
    pub final_objective: f64,
    /// `max |(|H(ω)|² + |H(π/N − ω)|²) − 2|` over the passband points.
    pub passband_max_deviation: f64,
    /// `Σ (|H(ω)|²)²` over the stopband points (unweighted).
    pub stopband_energy: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after every accepted optimizer step, starting with the
    /// initial point. Empty for plain evaluations.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objective_trace: Vec<f64>,
}
