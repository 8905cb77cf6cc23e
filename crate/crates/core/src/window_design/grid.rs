use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Passband,
    Transition,
    Stopband,
}

/// Angular frequencies in `[0, π]` labelled by the prototype region they
/// fall into for an `N`-band filterbank.
///
/// The passband is `0 < ω < π/(2N)`, the transition band `[π/(2N), π/N]`
/// and the stopband `ω > π/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    omegas: Vec<f64>,
    regions: Vec<Region>,
    num_subbands: usize,
}

impl FrequencyGrid {
    /// Builds a grid from explicit frequencies, deriving the labels.
    pub fn new(omegas: Vec<f64>, num_subbands: usize) -> Result<Self> {
        if num_subbands < 1 {
            return Err(invalid("grid needs at least one subband"));
        }
        if omegas.is_empty() {
            return Err(invalid("empty frequency grid"));
        }
        for pair in omegas.windows(2) {
            if !(pair[0] < pair[1]) {
                return Err(invalid("grid frequencies must be strictly increasing"));
            }
        }
        let mut regions = Vec::with_capacity(omegas.len());
        for &w in &omegas {
            if !(0.0..=PI).contains(&w) {
                return Err(invalid(format!("grid frequency {w} outside [0, π]")));
            }
            match classify(w, num_subbands) {
                Some(r) => regions.push(r),
                None => return Err(invalid("ω = 0 belongs to no design region")),
            }
        }
        Ok(Self {
            omegas,
            regions,
            num_subbands,
        })
    }

    /// The grid used by the prototype design.
    ///
    /// `density` points sit at the centres of equal cells of `(0, π/(2N))`;
    /// the transition and stop bands are sampled uniformly with step
    /// `π/K`, `K = density·M/2`, so the default density 16 gives `8·M`
    /// points up to π.
    pub fn for_design(num_subbands: usize, overlap: usize, density: usize) -> Result<Self> {
        let (omegas, _) = design_layout(num_subbands, overlap, density)?;
        Self::new(omegas, num_subbands)
    }

    /// `points` cell-centred frequencies in `(0, max_omega]`.
    pub fn linear(num_subbands: usize, max_omega: f64, points: usize) -> Result<Self> {
        if points == 0 || !(max_omega > 0.0 && max_omega <= PI) {
            return Err(invalid("linear grid needs points > 0 and 0 < max_omega ≤ π"));
        }
        let step = max_omega / points as f64;
        let omegas = (0..points).map(|i| (i as f64 + 0.5) * step).collect();
        Self::new(omegas, num_subbands)
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn num_subbands(&self) -> usize {
        self.num_subbands
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn points(&self, region: Region) -> impl Iterator<Item = f64> + '_ {
        self.omegas
            .iter()
            .zip(&self.regions)
            .filter(move |(_, r)| **r == region)
            .map(|(w, _)| *w)
    }
}

fn classify(w: f64, n: usize) -> Option<Region> {
    let half = PI / (2 * n) as f64;
    let edge = PI / n as f64;
    if w <= 0.0 {
        None
    } else if w < half {
        Some(Region::Passband)
    } else if w <= edge {
        Some(Region::Transition)
    } else {
        Some(Region::Stopband)
    }
}

/// Uniform step count of the design grid: `ω_i = π·i/K`.
pub(crate) fn uniform_steps(num_subbands: usize, overlap: usize, density: usize) -> usize {
    (density * num_subbands * overlap).div_ceil(2).max(1)
}

/// Frequencies of the design grid plus the first uniform index that lies in
/// the stopband.
pub(crate) fn design_layout(
    num_subbands: usize,
    overlap: usize,
    density: usize,
) -> Result<(Vec<f64>, usize)> {
    if num_subbands < 2 || overlap < 1 || density < 1 {
        return Err(invalid(format!(
            "design grid needs N ≥ 2, L ≥ 1, density ≥ 1 (got N={num_subbands}, L={overlap}, density={density})"
        )));
    }
    let n = num_subbands as f64;
    let half = PI / (2.0 * n);
    let edge = PI / n;
    let k = uniform_steps(num_subbands, overlap, density);
    let step = PI / k as f64;

    let mut omegas: Vec<f64> = (0..density)
        .map(|j| (j as f64 + 0.5) * half / density as f64)
        .collect();
    let mut first_stop = k + 1;
    for i in 0..=k {
        let w = i as f64 * step;
        if w < half {
            continue;
        }
        if w > edge && first_stop > k {
            first_stop = i;
        }
        omegas.push(w);
    }
    Ok((omegas, first_stop))
}
