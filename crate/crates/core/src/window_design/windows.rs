use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Hamming window `0.54 - 0.46 cos(2πn / (M - 1))`.
pub fn hamming_window(len: usize) -> Result<Vec<f64>> {
    if len < 2 {
        return Err(Error::InvalidLength(format!(
            "hamming window needs at least 2 samples, got {len}"
        )));
    }
    let denom = (len - 1) as f64;
    Ok(mirrored(len, |n| 0.54 - 0.46 * (2.0 * PI * n as f64 / denom).cos()))
}

/// Sine window `sin(π (n + 0.5) / M)`. Satisfies the Princen-Bradley
/// condition `w(n)² + w(n + M/2)² = 1`.
pub fn sine_window(len: usize) -> Result<Vec<f64>> {
    if len < 2 || !len.is_multiple_of(2) {
        return Err(Error::InvalidLength(format!(
            "sine window needs an even length of at least 2, got {len}"
        )));
    }
    let m = len as f64;
    Ok(mirrored(len, |n| (PI * (n as f64 + 0.5) / m).sin()))
}

// Evaluates the first half and mirrors it so the result is exactly symmetric.
fn mirrored(len: usize, f: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut w = vec![0.0; len];
    for n in 0..len.div_ceil(2) {
        let v = f(n);
        w[n] = v;
        w[len - 1 - n] = v;
    }
    w
}
