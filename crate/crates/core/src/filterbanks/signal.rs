use crate::error::{invalid, Result};

/// Mono signal with its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioSignal {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl AudioSignal {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(invalid("sample rate must be positive"));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(invalid(format!("non-finite sample at index {i}")));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn silence(len: usize, sample_rate: u32) -> Self {
        Self {
            samples: vec![0.0; len],
            sample_rate: sample_rate.max(1),
        }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s * s).sum()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Keeps at most the first `max_len` samples.
    pub fn truncated(mut self, max_len: usize) -> Self {
        self.samples.truncate(max_len);
        self
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.samples.is_empty() {
            return Err(invalid("empty signal"));
        }
        Ok(())
    }
}

/// `10·log10(Σx² / Σ(x − x̂)²)` in dB.
///
/// Returns `+∞` when the two signals are identical and `−∞` when the
/// original has zero energy but the reconstruction does not.
pub fn round_trip_snr(original: &AudioSignal, reconstructed: &AudioSignal) -> Result<f64> {
    if original.len() != reconstructed.len() {
        return Err(invalid(format!(
            "length mismatch: {} vs {}",
            original.len(),
            reconstructed.len()
        )));
    }
    if original.sample_rate() != reconstructed.sample_rate() {
        return Err(invalid("sample rate mismatch"));
    }
    let signal = original.energy();
    let error: f64 = original
        .samples()
        .iter()
        .zip(reconstructed.samples())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    if error == 0.0 {
        return Ok(f64::INFINITY);
    }
    if signal == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(10.0 * (signal / error).log10())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(v: &[f64]) -> AudioSignal {
        AudioSignal::new(v.to_vec(), 44100).unwrap()
    }

    #[test]
    fn snr_sentinels_and_values() {
        let x = sig(&[1.0, -0.5, 0.25]);
        assert_eq!(round_trip_snr(&x, &x).unwrap(), f64::INFINITY);
        let zero = sig(&[0.0; 3]);
        assert!((round_trip_snr(&x, &zero).unwrap()).abs() < 1e-12);
        assert_eq!(round_trip_snr(&zero, &x).unwrap(), f64::NEG_INFINITY);

        let a = sig(&[1.0, 0.0, 0.0, 0.0]);
        let b = sig(&[0.999, 0.0, 0.0, 0.0]);
        let expected = 10.0 * (1.0f64 / (0.001f64 * 0.001)).log10();
        assert!((round_trip_snr(&a, &b).unwrap() - expected).abs() < 1e-6);
        assert!((expected - 60.0).abs() < 1e-6);
    }

    #[test]
    fn snr_rejects_length_mismatch() {
        assert!(round_trip_snr(&sig(&[1.0]), &sig(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn validation() {
        assert!(AudioSignal::new(vec![0.0], 0).is_err());
        assert!(AudioSignal::new(vec![f64::NAN], 8000).is_err());
    }
}
