use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{DesignOptions, DesignReport, PrototypeWindow};
use crate::error::{Error, Result};

/// JSON metadata stored next to a raw window file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSidecar {
    pub num_subbands: usize,
    pub overlap_factor: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub objective: f64,
    /// Full option set used for the design, so the window can be
    /// regenerated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<DesignOptions>,
}

impl WindowSidecar {
    pub fn from_design(
        window: &PrototypeWindow,
        options: &DesignOptions,
        report: &DesignReport,
    ) -> Self {
        Self {
            num_subbands: window.num_subbands(),
            overlap_factor: window.overlap_factor(),
            seed: options.seed,
            tolerance: options.tolerance,
            objective: report.final_objective,
            options: Some(options.clone()),
        }
    }
}

/// `pqmf.win` -> `pqmf.win.json`
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes the coefficients as little-endian f64 to `path` and the sidecar
/// to [`sidecar_path`].
pub fn write_window(path: &Path, window: &PrototypeWindow, sidecar: &WindowSidecar) -> Result<()> {
    fs::write(path, encode_coefficients(window.coefficients()))?;
    let mut json = serde_json::to_string_pretty(sidecar)?;
    json.push('\n');
    fs::write(sidecar_path(path), json)?;
    Ok(())
}

pub fn read_window(path: &Path) -> Result<(PrototypeWindow, WindowSidecar)> {
    let bytes = fs::read(path)?;
    let side_path = sidecar_path(path);
    let sidecar: WindowSidecar = serde_json::from_slice(&fs::read(&side_path).map_err(|e| {
        Error::Load {
            path: side_path.clone(),
            reason: e.to_string(),
        }
    })?)?;
    let window = decode_window(&bytes, &sidecar).map_err(|e| Error::Load {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    Ok((window, sidecar))
}

pub(crate) fn encode_coefficients(coefficients: &[f64]) -> Vec<u8> {
    coefficients.iter().flat_map(|c| c.to_le_bytes()).collect()
}

pub(crate) fn decode_window(bytes: &[u8], sidecar: &WindowSidecar) -> Result<PrototypeWindow> {
    if !bytes.len().is_multiple_of(8) {
        return Err(Error::Format(format!(
            "window file size {} is not a multiple of 8",
            bytes.len()
        )));
    }
    let coefficients = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    PrototypeWindow::new(coefficients, sidecar.num_subbands, sidecar.overlap_factor)
}
