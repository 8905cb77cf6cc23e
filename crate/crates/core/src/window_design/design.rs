use std::f64::consts::PI;
use std::sync::Arc;

use log::debug;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::grid::{design_layout, uniform_steps};
use super::{residual_with_weights, DesignReport, FrequencyGrid, PrototypeWindow};
use crate::error::{invalid, Result};

/// Knobs of the prototype optimizer. Accepted as JSON with the same keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignOptions {
    pub seed: u64,
    /// Maximum passband deviation for a design to count as converged.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub passband_weight: f64,
    pub stopband_weight: f64,
    /// Passband points per `π/(2N)`; the stopband gets `density·M/2` steps
    /// up to π.
    pub grid_density: usize,
}

impl Default for DesignOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            tolerance: 1e-3,
            max_iterations: 500,
            passband_weight: 1.0,
            stopband_weight: 100.0,
            grid_density: 16,
        }
    }
}

impl DesignOptions {
    pub fn from_json(text: &str) -> Result<Self> {
        let opts: Self = serde_json::from_str(text)?;
        opts.validate()?;
        Ok(opts)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(invalid("tolerance must be positive"));
        }
        if !(self.passband_weight >= 0.0 && self.stopband_weight >= 0.0)
            || !(self.passband_weight.is_finite() && self.stopband_weight.is_finite())
        {
            return Err(invalid("region weights must be finite and non-negative"));
        }
        if self.grid_density == 0 {
            return Err(invalid("grid_density must be at least 1"));
        }
        Ok(())
    }
}

const REL_DECREASE_STOP: f64 = 1e-10;
const INITIAL_DAMPING: f64 = 1e-2;
const MAX_DAMPING: f64 = 1e20;
const CG_MAX_ITERS: usize = 200;
const CG_REL_TOL: f64 = 1e-4;
const INIT_PERTURBATION: f64 = 0.1;
const SMOOTHING_PASSES: usize = 4;

/// Designs the symmetric prototype of an `N`-band, overlap-`L` pseudo-QMF
/// filterbank by damped Gauss-Newton on the residuals
///
/// ```text
/// √w_p · (|H(ω)|² + |H(π/N − ω)|² − 2)   for ω in the passband
/// √w_s · |H(ω)|²                          for ω > π/N
/// ```
///
/// so the objective is the sum of their squares. The normal equations are
/// solved matrix-free with conjugate gradients; stopband products with the
/// Jacobian go through one FFT each.
///
/// Non-convergence within `max_iterations` is not an error: the best iterate
/// is returned with `converged = false`.
pub fn design_pqmf_prototype(
    num_subbands: usize,
    overlap: usize,
    options: &DesignOptions,
) -> Result<(PrototypeWindow, DesignReport)> {
    if num_subbands < 2 || overlap < 2 {
        return Err(invalid(format!(
            "design needs N ≥ 2 and L ≥ 2 (got N={num_subbands}, L={overlap})"
        )));
    }
    options.validate()?;

    let problem = Problem::new(num_subbands, overlap, options)?;
    let mut params = problem.initial_point(options.seed);

    let mut state = problem.evaluate(&params);
    let mut objective = state.objective();
    let mut trace = vec![objective];
    let mut damping = INITIAL_DAMPING;
    let mut stopped = false;
    let mut iterations = 0;

    while iterations < options.max_iterations {
        iterations += 1;
        let gradient = problem.jt_mul(&state, &state.residuals);
        let step = problem.solve_damped(&state, &gradient, damping);
        let trial: Vec<f64> = params.iter().zip(&step).map(|(a, d)| a + d).collect();
        let trial_state = problem.evaluate(&trial);
        let trial_objective = trial_state.objective();

        if trial_objective < objective {
            let rel = (objective - trial_objective) / objective;
            params = trial;
            state = trial_state;
            objective = trial_objective;
            trace.push(objective);
            damping = (damping * 0.3).max(1e-15);
            debug!("design iter {iterations}: J = {objective:e}, λ = {damping:e}");
            if rel < REL_DECREASE_STOP {
                stopped = true;
                break;
            }
        } else {
            damping *= 10.0;
            if damping > MAX_DAMPING {
                // no descent direction left at any damping: stationary point
                stopped = true;
                break;
            }
        }
    }

    let window = PrototypeWindow::from_half(&params, num_subbands, overlap);
    let grid = FrequencyGrid::for_design(num_subbands, overlap, options.grid_density)?;
    let window = window.normalized_to_passband(&grid)?;
    let mut report = residual_with_weights(
        &window,
        &grid,
        options.passband_weight,
        options.stopband_weight,
    )?;
    report.iterations = iterations;
    report.converged = stopped && report.passband_max_deviation <= options.tolerance;
    report.objective_trace = trace;
    Ok((window, report))
}

/// Residual layout and the linear maps of the least-squares problem over the
/// free half `a` of the symmetric window.
struct Problem {
    num_subbands: usize,
    len: usize,
    half: usize,
    /// Rows `mult_j·cos(ω_p (j − c))/N` for the passband points.
    cos_pass: Vec<f64>,
    /// Same rows at the mirrored frequencies `π/N − ω_p`.
    cos_mirror: Vec<f64>,
    passband_points: usize,
    /// Stopband frequencies are `π·i/K` for `i` in `first_stop..=steps`.
    steps: usize,
    first_stop: usize,
    /// `e^{jπ i c / K}` per stopband index.
    rotation: Vec<Complex64>,
    /// 1 for the middle sample of odd-length windows, 2 otherwise.
    multiplicity: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    sqrt_wp: f64,
    sqrt_ws: f64,
}

struct State {
    residuals: Vec<f64>,
    amp_pass: Vec<f64>,
    amp_mirror: Vec<f64>,
    amp_stop: Vec<f64>,
}

impl State {
    fn objective(&self) -> f64 {
        self.residuals.iter().map(|r| r * r).sum()
    }
}

impl Problem {
    fn new(num_subbands: usize, overlap: usize, options: &DesignOptions) -> Result<Self> {
        let density = options.grid_density;
        let len = num_subbands * overlap;
        let half = len.div_ceil(2);
        let center = (len as f64 - 1.0) / 2.0;
        let nf = num_subbands as f64;

        let (omegas, first_stop) = design_layout(num_subbands, overlap, density)?;
        let steps = uniform_steps(num_subbands, overlap, density);
        let passband: Vec<f64> = omegas[..density].to_vec();

        let multiplicity: Vec<f64> = (0..half)
            .map(|j| if len % 2 == 1 && j == half - 1 { 1.0 } else { 2.0 })
            .collect();
        let rows = |freqs: &mut dyn Iterator<Item = f64>| -> Vec<f64> {
            let mut out = Vec::with_capacity(density * half);
            for w in freqs {
                for (j, m) in multiplicity.iter().enumerate() {
                    out.push(m * (w * (j as f64 - center)).cos() / nf);
                }
            }
            out
        };
        let cos_pass = rows(&mut passband.iter().copied());
        let cos_mirror = rows(&mut passband.iter().map(|w| PI / nf - w));

        // angle π·i·(M−1)/(2K), reduced exactly modulo 2π before scaling
        let period = 4 * steps as u128;
        let rotation = (first_stop..=steps)
            .map(|i| {
                let r = (i as u128 * (len as u128 - 1)) % period;
                Complex64::from_polar(1.0, PI * r as f64 / (2.0 * steps as f64))
            })
            .collect();

        let fft = FftPlanner::new().plan_fft_forward(2 * steps);
        Ok(Self {
            num_subbands,
            len,
            half,
            cos_pass,
            cos_mirror,
            passband_points: density,
            steps,
            first_stop,
            rotation,
            multiplicity,
            fft,
            sqrt_wp: options.passband_weight.sqrt(),
            sqrt_ws: options.stopband_weight.sqrt(),
        })
    }

    fn stop_points(&self) -> usize {
        self.steps + 1 - self.first_stop.min(self.steps + 1)
    }

    /// Windowed-sinc start with cutoff π/(2N), perturbed multiplicatively by
    /// smoothed uniform noise from `seed`, then scaled onto the passband
    /// condition.
    fn initial_point(&self, seed: u64) -> Vec<f64> {
        let m = self.len;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut noise: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let width = (m / 16).max(1);
        for _ in 0..SMOOTHING_PASSES {
            noise = box_smooth(&noise, width);
        }
        let peak = noise.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if peak > 0.0 {
            noise.iter_mut().for_each(|v| *v /= peak);
        }

        let center = (m as f64 - 1.0) / 2.0;
        let cutoff = 2.0 * self.num_subbands as f64;
        let mut params: Vec<f64> = (0..self.half)
            .map(|n| {
                let t = (n as f64 - center) / cutoff;
                let sinc = if t == 0.0 { 1.0 } else { (PI * t).sin() / (PI * t) };
                let taper = (PI * (n as f64 + 0.5) / m as f64).sin();
                sinc * taper * (1.0 + INIT_PERTURBATION * noise[n])
            })
            .collect();

        let state = self.evaluate(&params);
        let sums: Vec<f64> = state
            .amp_pass
            .iter()
            .zip(&state.amp_mirror)
            .map(|(p, q)| p * p + q * q)
            .collect();
        let s1: f64 = sums.iter().sum();
        let s2: f64 = sums.iter().map(|s| s * s).sum();
        if s2 > 0.0 {
            let scale = (2.0 * s1 / s2).sqrt();
            params.iter_mut().for_each(|a| *a *= scale);
        }
        params
    }

    fn rows_mul(&self, rows: &[f64], x: &[f64]) -> Vec<f64> {
        rows.chunks_exact(self.half)
            .map(|row| row.iter().zip(x).map(|(c, v)| c * v).sum())
            .collect()
    }

    fn rows_t_mul(&self, rows: &[f64], u: &[f64], out: &mut [f64]) {
        for (row, &w) in rows.chunks_exact(self.half).zip(u) {
            for (o, c) in out.iter_mut().zip(row) {
                *o += c * w;
            }
        }
    }

    /// Normalized amplitude response at the stopband points.
    fn amp_stop(&self, params: &[f64]) -> Vec<f64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * self.steps];
        for (j, &a) in params.iter().enumerate() {
            buf[j].re = a;
            buf[self.len - 1 - j].re = a;
        }
        self.fft.process(&mut buf);
        let nf = self.num_subbands as f64;
        (self.first_stop..=self.steps)
            .zip(&self.rotation)
            .map(|(i, rot)| (buf[i] * rot).re / nf)
            .collect()
    }

    /// Adjoint of [`Self::amp_stop`].
    fn amp_stop_adjoint(&self, u: &[f64], out: &mut [f64]) {
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * self.steps];
        for ((i, rot), &w) in (self.first_stop..=self.steps).zip(&self.rotation).zip(u) {
            buf[i] = rot * w;
        }
        self.fft.process(&mut buf);
        let nf = self.num_subbands as f64;
        for (j, o) in out.iter_mut().enumerate() {
            *o += self.multiplicity[j] * buf[j].re / nf;
        }
    }

    fn evaluate(&self, params: &[f64]) -> State {
        let amp_pass = self.rows_mul(&self.cos_pass, params);
        let amp_mirror = self.rows_mul(&self.cos_mirror, params);
        let amp_stop = if self.stop_points() > 0 {
            self.amp_stop(params)
        } else {
            Vec::new()
        };
        let mut residuals = Vec::with_capacity(self.passband_points + amp_stop.len());
        residuals.extend(
            amp_pass
                .iter()
                .zip(&amp_mirror)
                .map(|(p, q)| self.sqrt_wp * (p * p + q * q - 2.0)),
        );
        residuals.extend(amp_stop.iter().map(|s| self.sqrt_ws * s * s));
        State {
            residuals,
            amp_pass,
            amp_mirror,
            amp_stop,
        }
    }

    fn j_mul(&self, state: &State, v: &[f64]) -> Vec<f64> {
        let dp = self.rows_mul(&self.cos_pass, v);
        let dq = self.rows_mul(&self.cos_mirror, v);
        let mut out = Vec::with_capacity(state.residuals.len());
        for i in 0..self.passband_points {
            out.push(
                self.sqrt_wp * 2.0 * (state.amp_pass[i] * dp[i] + state.amp_mirror[i] * dq[i]),
            );
        }
        if !state.amp_stop.is_empty() {
            let ds = self.amp_stop(v);
            out.extend(
                state
                    .amp_stop
                    .iter()
                    .zip(&ds)
                    .map(|(s, d)| self.sqrt_ws * 2.0 * s * d),
            );
        }
        out
    }

    fn jt_mul(&self, state: &State, u: &[f64]) -> Vec<f64> {
        let (up, us) = u.split_at(self.passband_points);
        let mut out = vec![0.0; self.half];
        let wp: Vec<f64> = up
            .iter()
            .zip(&state.amp_pass)
            .map(|(u, a)| self.sqrt_wp * 2.0 * a * u)
            .collect();
        let wq: Vec<f64> = up
            .iter()
            .zip(&state.amp_mirror)
            .map(|(u, a)| self.sqrt_wp * 2.0 * a * u)
            .collect();
        self.rows_t_mul(&self.cos_pass, &wp, &mut out);
        self.rows_t_mul(&self.cos_mirror, &wq, &mut out);
        if !state.amp_stop.is_empty() {
            let ws: Vec<f64> = us
                .iter()
                .zip(&state.amp_stop)
                .map(|(u, s)| self.sqrt_ws * 2.0 * s * u)
                .collect();
            self.amp_stop_adjoint(&ws, &mut out);
        }
        out
    }

    /// Conjugate-gradient solve of `(JᵀJ + λI) δ = −g`.
    fn solve_damped(&self, state: &State, gradient: &[f64], damping: f64) -> Vec<f64> {
        let n = self.half;
        let mut x = vec![0.0; n];
        let mut r: Vec<f64> = gradient.iter().map(|g| -g).collect();
        let mut p = r.clone();
        let mut rr = dot(&r, &r);
        let stop = CG_REL_TOL * rr.sqrt();
        for _ in 0..CG_MAX_ITERS.min(2 * n) {
            let jp = self.j_mul(state, &p);
            let mut ap = self.jt_mul(state, &jp);
            for (a, pi) in ap.iter_mut().zip(&p) {
                *a += damping * pi;
            }
            let curvature = dot(&p, &ap);
            if curvature <= 0.0 {
                break;
            }
            let alpha = rr / curvature;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rr_next = dot(&r, &r);
            if rr_next.sqrt() <= stop {
                break;
            }
            let beta = rr_next / rr;
            for i in 0..n {
                p[i] = r[i] + beta * p[i];
            }
            rr = rr_next;
        }
        x
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Centred moving average with zero extension at both ends.
fn box_smooth(x: &[f64], width: usize) -> Vec<f64> {
    let n = x.len();
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + x[i];
    }
    let before = (width - 1) / 2;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(before);
            let hi = (i + width - before).min(n);
            (prefix[hi] - prefix[lo]) / width as f64
        })
        .collect()
}
