use std::f64::consts::PI;

use num_complex::Complex64;

use super::{DesignOptions, DesignReport, FrequencyGrid, PrototypeWindow, Region};
use crate::error::{invalid, Result};

/// `|Σ_n h(n) e^{−jωn}|` at every grid frequency.
pub fn dtft_magnitude(window: &[f64], grid: &FrequencyGrid) -> Result<Vec<f64>> {
    if window.is_empty() {
        return Err(invalid("DTFT of an empty window"));
    }
    Ok(grid.omegas().iter().map(|&w| dtft_at(window, w).norm()).collect())
}

// Horner evaluation of the polynomial in z = e^{-jω}.
fn dtft_at(h: &[f64], omega: f64) -> Complex64 {
    let z = Complex64::from_polar(1.0, -omega);
    h.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn normalized_power(h: &[f64], omega: f64, n: usize) -> f64 {
    dtft_at(h, omega).norm_sqr() / (n * n) as f64
}

/// `|H(ω)|² + |H(π/N − ω)|²` for each passband point of `grid`.
pub(crate) fn passband_power_sums(
    window: &PrototypeWindow,
    grid: &FrequencyGrid,
) -> Result<Vec<f64>> {
    check_grid(window, grid)?;
    let n = window.num_subbands();
    let h = window.coefficients();
    let mirror = PI / n as f64;
    Ok(grid
        .points(Region::Passband)
        .map(|w| normalized_power(h, w, n) + normalized_power(h, mirror - w, n))
        .collect())
}

fn check_grid(window: &PrototypeWindow, grid: &FrequencyGrid) -> Result<()> {
    if window.num_subbands() != grid.num_subbands() {
        return Err(invalid(format!(
            "grid built for N = {} but window has N = {}",
            grid.num_subbands(),
            window.num_subbands()
        )));
    }
    Ok(())
}

/// Evaluates both reconstruction conditions for `window` on `grid` with the
/// default region weights. No optimization takes place, so `iterations` is
/// zero and `converged` is false.
pub fn reconstruction_residual(
    window: &PrototypeWindow,
    grid: &FrequencyGrid,
) -> Result<DesignReport> {
    let d = DesignOptions::default();
    residual_with_weights(window, grid, d.passband_weight, d.stopband_weight)
}

pub fn residual_with_weights(
    window: &PrototypeWindow,
    grid: &FrequencyGrid,
    passband_weight: f64,
    stopband_weight: f64,
) -> Result<DesignReport> {
    let sums = passband_power_sums(window, grid)?;
    let n = window.num_subbands();
    let h = window.coefficients();

    let mut passband_max_deviation = 0.0f64;
    let mut passband_sq = 0.0;
    for p in &sums {
        let dev = p - 2.0;
        passband_max_deviation = passband_max_deviation.max(dev.abs());
        passband_sq += dev * dev;
    }
    let stopband_energy: f64 = grid
        .points(Region::Stopband)
        .map(|w| normalized_power(h, w, n).powi(2))
        .sum();

    Ok(DesignReport {
        final_objective: passband_weight * passband_sq + stopband_weight * stopband_energy,
        passband_max_deviation,
        stopband_energy,
        iterations: 0,
        converged: false,
        objective_trace: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::window_design::hamming_window;

    fn grid(n: usize) -> FrequencyGrid {
        FrequencyGrid::for_design(n, 4, 16).unwrap()
    }

    #[test]
    fn impulse_is_flat() {
        let mut h = vec![0.0; 16];
        h[0] = 1.0;
        for m in dtft_magnitude(&h, &grid(4)).unwrap() {
            assert!((m - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn dc_of_ones_and_hamming() {
        let dc = FrequencyGrid::new(vec![1e-300], 4).unwrap();
        let ones = vec![1.0; 64];
        assert!((dtft_magnitude(&ones, &dc).unwrap()[0] - 64.0).abs() < 1e-12);

        let w = hamming_window(2048).unwrap();
        let mut direct = 0.0;
        for n in 0..2048 {
            direct += 0.54 - 0.46 * (2.0 * PI * n as f64 / 2047.0).cos();
        }
        let got = dtft_magnitude(&w, &dc).unwrap()[0];
        assert!((got - direct).abs() < 1e-9 * direct);
    }

    #[test]
    fn zero_window_report() {
        let w = PrototypeWindow::zeros(4, 4);
        let r = reconstruction_residual(&w, &grid(4)).unwrap();
        assert_eq!(r.passband_max_deviation, 2.0);
        assert_eq!(r.stopband_energy, 0.0);
    }

    #[test]
    fn hamming_report_matches_direct_dtft() {
        let n = 4;
        let w = PrototypeWindow::new(hamming_window(16).unwrap(), n, 4).unwrap();
        let g = grid(n);
        let report = reconstruction_residual(&w, &g).unwrap();

        // direct cos/sin summation, independent of the Horner path
        let dtft2 = |om: f64| {
            let (mut re, mut im) = (0.0, 0.0);
            for (k, &c) in w.coefficients().iter().enumerate() {
                re += c * (om * k as f64).cos();
                im -= c * (om * k as f64).sin();
            }
            (re * re + im * im) / (n * n) as f64
        };
        let dev = g
            .points(Region::Passband)
            .map(|om| (dtft2(om) + dtft2(PI / n as f64 - om) - 2.0).abs())
            .fold(0.0, f64::max);
        let stop: f64 = g.points(Region::Stopband).map(|om| dtft2(om).powi(2)).sum();
        assert!((report.passband_max_deviation - dev).abs() < 1e-10 * dev.max(1.0));
        assert!((report.stopband_energy - stop).abs() < 1e-10 * stop.max(1.0));
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let w = PrototypeWindow::zeros(8, 4);
        assert!(reconstruction_residual(&w, &grid(4)).is_err());
    }
}
