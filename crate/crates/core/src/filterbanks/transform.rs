use std::path::PathBuf;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::{build_polyphase, AudioSignal, Mdct, PolyphasePair, Stft, TimeFrequencyMatrix, TransformId};
use crate::error::{invalid, Result};
use crate::window_design::{io::decode_window, read_window, PrototypeWindow, WindowSidecar};

const SHIPPED_WINDOW: &[u8] = include_bytes!("../../assets/pqmf_n1024_l8.win");
const SHIPPED_SIDECAR: &str = include_str!("../../assets/pqmf_n1024_l8.win.json");

/// The pre-optimized `N = 1024`, `L = 8` prototype bundled with the crate.
pub fn shipped_prototype() -> Result<(PrototypeWindow, WindowSidecar)> {
    let sidecar: WindowSidecar = serde_json::from_str(SHIPPED_SIDECAR)?;
    Ok((decode_window(SHIPPED_WINDOW, &sidecar)?, sidecar))
}

/// Polyphase pair of the bundled prototype, built once per process.
pub fn shipped_pqmf() -> Result<Arc<PolyphasePair>> {
    static PAIR: OnceLock<Arc<PolyphasePair>> = OnceLock::new();
    if let Some(p) = PAIR.get() {
        return Ok(p.clone());
    }
    let (window, _) = shipped_prototype()?;
    let pair = Arc::new(build_polyphase(&window)?);
    Ok(PAIR.get_or_init(|| pair).clone())
}

/// Serializable description of one transform configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TransformConfig {
    Stft { frame_length: usize, hop: usize },
    Mdct { frame_length: usize },
    Pqmf {
        /// Window file; `None` selects the bundled prototype.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window: Option<PathBuf>,
    },
}

impl TransformConfig {
    /// STFT with M = 2048 and hop 410, MDCT with M = 2048, and the bundled
    /// N = 1024 / L = 8 pseudo-QMF.
    pub fn standard_set() -> Vec<TransformConfig> {
        vec![
            TransformConfig::stft_default(),
            TransformConfig::mdct_default(),
            TransformConfig::pqmf_default(),
        ]
    }

    pub fn stft_default() -> Self {
        TransformConfig::Stft {
            frame_length: 2048,
            hop: 410,
        }
    }

    pub fn mdct_default() -> Self {
        TransformConfig::Mdct { frame_length: 2048 }
    }

    pub fn pqmf_default() -> Self {
        TransformConfig::Pqmf { window: None }
    }

    pub fn default_for(id: TransformId) -> Self {
        match id {
            TransformId::Stft => Self::stft_default(),
            TransformId::Mdct => Self::mdct_default(),
            TransformId::Pqmf => Self::pqmf_default(),
        }
    }

    pub fn id(&self) -> TransformId {
        match self {
            TransformConfig::Stft { .. } => TransformId::Stft,
            TransformConfig::Mdct { .. } => TransformId::Mdct,
            TransformConfig::Pqmf { .. } => TransformId::Pqmf,
        }
    }

    pub fn build(&self) -> Result<Transform> {
        Ok(match self {
            TransformConfig::Stft { frame_length, hop } => {
                Transform::Stft(Arc::new(Stft::new(*frame_length, *hop)?))
            }
            TransformConfig::Mdct { frame_length } => {
                Transform::Mdct(Arc::new(Mdct::new(*frame_length)?))
            }
            TransformConfig::Pqmf { window: None } => Transform::Pqmf(shipped_pqmf()?),
            TransformConfig::Pqmf { window: Some(path) } => {
                let (window, _) = read_window(path)?;
                Transform::Pqmf(Arc::new(build_polyphase(&window)?))
            }
        })
    }
}

/// A ready-to-use analysis/synthesis transform. Cheap to clone and safe to
/// share between threads.
#[derive(Debug, Clone)]
pub enum Transform {
    Stft(Arc<Stft>),
    Mdct(Arc<Mdct>),
    Pqmf(Arc<PolyphasePair>),
}

impl Transform {
    pub fn id(&self) -> TransformId {
        match self {
            Transform::Stft(_) => TransformId::Stft,
            Transform::Mdct(_) => TransformId::Mdct,
            Transform::Pqmf(_) => TransformId::Pqmf,
        }
    }

    pub fn analyze(&self, signal: &AudioSignal) -> Result<TimeFrequencyMatrix> {
        match self {
            Transform::Stft(t) => t.analyze(signal),
            Transform::Mdct(t) => t.analyze(signal),
            Transform::Pqmf(t) => t.analyze(signal),
        }
    }

    pub fn synthesize(&self, tf: &TimeFrequencyMatrix) -> Result<AudioSignal> {
        if tf.transform() != self.id() {
            return Err(invalid(format!(
                "cannot synthesize {} coefficients with {}",
                tf.transform(),
                self.id()
            )));
        }
        match self {
            Transform::Stft(t) => t.synthesize(tf),
            Transform::Mdct(t) => t.synthesize(tf),
            Transform::Pqmf(t) => t.synthesize(tf),
        }
    }

    /// Samples of delay compensated inside synthesis (non-zero only for the
    /// pseudo-QMF).
    pub fn system_delay(&self) -> usize {
        match self {
            Transform::Pqmf(p) => p.delay(),
            _ => 0,
        }
    }
}
