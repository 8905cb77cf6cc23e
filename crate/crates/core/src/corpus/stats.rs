use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Box-plot summary of a sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub n: usize,
    pub mean: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub lower_whisker: f64,
    pub upper_whisker: f64,
    pub outliers: Vec<f64>,
}

/// Quantile by linear interpolation between order statistics at position
/// `p·(n − 1)`.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Quartiles, mean, and 1.5·IQR whiskers with the points beyond them as
/// outliers. A whisker never ends inside the box. Values must be finite.
pub fn box_stats(values: &[f64]) -> Result<BoxStats> {
    if values.is_empty() {
        return Err(invalid("box statistics need at least one value"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(invalid("box statistics need finite values"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile(&sorted, 0.25);
    let median = quantile(&sorted, 0.5);
    let q3 = quantile(&sorted, 0.75);
    let iqr = q3 - q1;
    let lo_fence = q1 - 1.5 * iqr;
    let hi_fence = q3 + 1.5 * iqr;
    let inside = || sorted.iter().copied().filter(|&v| v >= lo_fence && v <= hi_fence);
    let lower_whisker = inside().next().map_or(q1, |v| v.min(q1));
    let upper_whisker = inside().next_back().map_or(q3, |v| v.max(q3));
    let outliers = sorted
        .iter()
        .copied()
        .filter(|&v| v < lo_fence || v > hi_fence)
        .collect();
    Ok(BoxStats {
        n: sorted.len(),
        mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
        q1,
        median,
        q3,
        lower_whisker,
        upper_whisker,
        outliers,
    })
}
