use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformId {
    Mdct,
    Pqmf,
    Stft,
}

impl TransformId {
    pub const ALL: [TransformId; 3] = [TransformId::Stft, TransformId::Mdct, TransformId::Pqmf];

    pub fn as_str(self) -> &'static str {
        match self {
            TransformId::Mdct => "mdct",
            TransformId::Pqmf => "pqmf",
            TransformId::Stft => "stft",
        }
    }
}

impl fmt::Display for TransformId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TransformId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mdct" => Ok(TransformId::Mdct),
            "pqmf" => Ok(TransformId::Pqmf),
            "stft" => Ok(TransformId::Stft),
            other => Err(invalid(format!("unknown transform `{other}`"))),
        }
    }
}

/// Framing metadata shared by coefficient matrices and masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TfLayout {
    pub transform: TransformId,
    /// Samples spanned by one analysis frame.
    pub frame_length: usize,
    pub hop: usize,
    pub num_subbands: usize,
    pub original_length: usize,
    pub sample_rate: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TfValues {
    Real(Array2<f64>),
    Complex(Array2<Complex64>),
}

impl TfValues {
    pub fn dim(&self) -> (usize, usize) {
        match self {
            TfValues::Real(v) => v.dim(),
            TfValues::Complex(v) => v.dim(),
        }
    }

    pub fn magnitudes(&self) -> Array2<f64> {
        match self {
            TfValues::Real(v) => v.mapv(f64::abs),
            TfValues::Complex(v) => v.mapv(|c| c.norm()),
        }
    }
}

/// Frames × subbands coefficients of one transform.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeFrequencyMatrix {
    layout: TfLayout,
    values: TfValues,
}

impl TimeFrequencyMatrix {
    pub fn new(layout: TfLayout, values: TfValues) -> Result<Self> {
        let (_, n) = values.dim();
        if n != layout.num_subbands {
            return Err(invalid(format!(
                "matrix has {n} columns but layout declares {} subbands",
                layout.num_subbands
            )));
        }
        let complex = matches!(values, TfValues::Complex(_));
        if complex != (layout.transform == TransformId::Stft) {
            return Err(invalid(format!(
                "{} coefficients must be {}",
                layout.transform,
                if complex { "real" } else { "complex" }
            )));
        }
        Ok(Self { layout, values })
    }

    pub fn layout(&self) -> &TfLayout {
        &self.layout
    }

    pub fn values(&self) -> &TfValues {
        &self.values
    }

    pub fn transform(&self) -> TransformId {
        self.layout.transform
    }

    pub fn num_frames(&self) -> usize {
        self.values.dim().0
    }

    pub fn num_subbands(&self) -> usize {
        self.layout.num_subbands
    }

    pub fn original_length(&self) -> usize {
        self.layout.original_length
    }

    pub fn magnitudes(&self) -> Array2<f64> {
        self.values.magnitudes()
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.layout.transform == other.layout.transform
            && self.values.dim() == other.values.dim()
    }

    /// Element-wise product with a 0/1 matrix of the same shape.
    pub(crate) fn masked(&self, mask: &Array2<u8>) -> Self {
        let values = match &self.values {
            TfValues::Real(v) => TfValues::Real(ndarray::Zip::from(v).and(mask).map_collect(
                |x, &m| if m == 1 { *x } else { 0.0 },
            )),
            TfValues::Complex(v) => TfValues::Complex(ndarray::Zip::from(v).and(mask).map_collect(
                |x, &m| if m == 1 { *x } else { Complex64::new(0.0, 0.0) },
            )),
        };
        Self {
            layout: self.layout,
            values,
        }
    }

    /// Binary container: `u64` LE header length, JSON header, then row-major
    /// LE f64 values (complex as interleaved re/im).
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let (kind, payload) = match &self.values {
            TfValues::Real(v) => (
                ValueKind::Real,
                v.iter().flat_map(|x| x.to_le_bytes()).collect::<Vec<u8>>(),
            ),
            TfValues::Complex(v) => (
                ValueKind::Complex,
                v.iter()
                    .flat_map(|c| c.re.to_le_bytes().into_iter().chain(c.im.to_le_bytes()))
                    .collect(),
            ),
        };
        write_container(&mut out, &self.layout, self.num_frames(), kind, &payload)
    }

    pub fn read_from<R: Read>(input: R) -> Result<Self> {
        let (header, payload) = read_container(input)?;
        let (t, n) = (header.num_frames, header.num_subbands);
        let layout = header.layout();
        let values = match header.value_kind {
            ValueKind::Real => {
                expect_len(&payload, t * n * 8)?;
                let data = payload.chunks_exact(8).map(f64_le).collect();
                TfValues::Real(Array2::from_shape_vec((t, n), data).map_err(shape_err)?)
            }
            ValueKind::Complex => {
                expect_len(&payload, t * n * 16)?;
                let data = payload
                    .chunks_exact(16)
                    .map(|c| Complex64::new(f64_le(&c[..8]), f64_le(&c[8..])))
                    .collect();
                TfValues::Complex(Array2::from_shape_vec((t, n), data).map_err(shape_err)?)
            }
            ValueKind::Binary => {
                return Err(Error::Format(
                    "container holds a binary mask, not coefficients".into(),
                ))
            }
        };
        Self::new(layout, values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub(crate) enum ValueKind {
    Real,
    Complex,
    Binary,
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct ContainerHeader {
    pub transform_id: TransformId,
    #[serde(rename = "M")]
    pub frame_length: usize,
    #[serde(rename = "N")]
    pub num_subbands: usize,
    pub hop: usize,
    #[serde(rename = "T")]
    pub num_frames: usize,
    pub original_length: usize,
    pub sample_rate: u32,
    pub value_kind: ValueKind,
}

impl ContainerHeader {
    pub fn layout(&self) -> TfLayout {
        TfLayout {
            transform: self.transform_id,
            frame_length: self.frame_length,
            hop: self.hop,
            num_subbands: self.num_subbands,
            original_length: self.original_length,
            sample_rate: self.sample_rate,
        }
    }
}

pub(crate) fn write_container<W: Write>(
    out: &mut W,
    layout: &TfLayout,
    num_frames: usize,
    value_kind: ValueKind,
    payload: &[u8],
) -> Result<()> {
    let header = ContainerHeader {
        transform_id: layout.transform,
        frame_length: layout.frame_length,
        num_subbands: layout.num_subbands,
        hop: layout.hop,
        num_frames,
        original_length: layout.original_length,
        sample_rate: layout.sample_rate,
        value_kind,
    };
    let json = serde_json::to_vec(&header)?;
    out.write_all(&(json.len() as u64).to_le_bytes())?;
    out.write_all(&json)?;
    out.write_all(payload)?;
    Ok(())
}

pub(crate) fn read_container<R: Read>(mut input: R) -> Result<(ContainerHeader, Vec<u8>)> {
    let mut len = [0u8; 8];
    input.read_exact(&mut len)?;
    let len = u64::from_le_bytes(len) as usize;
    if len > 1 << 20 {
        return Err(Error::Format(format!("implausible header length {len}")));
    }
    let mut json = vec![0u8; len];
    input.read_exact(&mut json)?;
    let header: ContainerHeader = serde_json::from_slice(&json)?;
    let mut payload = Vec::new();
    input.read_to_end(&mut payload)?;
    Ok((header, payload))
}

pub(crate) fn expect_len(payload: &[u8], want: usize) -> Result<()> {
    if payload.len() != want {
        return Err(Error::Format(format!(
            "payload has {} bytes, header implies {want}",
            payload.len()
        )));
    }
    Ok(())
}

fn f64_le(b: &[u8]) -> f64 {
    f64::from_le_bytes(b.try_into().expect("8 bytes"))
}

pub(crate) fn shape_err(e: ndarray::ShapeError) -> Error {
    Error::Format(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(transform: TransformId, n: usize) -> TfLayout {
        TfLayout {
            transform,
            frame_length: 2 * n,
            hop: n,
            num_subbands: n,
            original_length: 10,
            sample_rate: 8000,
        }
    }

    #[test]
    fn container_round_trip() {
        let real = TimeFrequencyMatrix::new(
            layout(TransformId::Mdct, 3),
            TfValues::Real(Array2::from_shape_fn((2, 3), |(t, k)| t as f64 - k as f64 * 0.5)),
        )
        .unwrap();
        let mut buf = Vec::new();
        real.write_to(&mut buf).unwrap();
        assert_eq!(TimeFrequencyMatrix::read_from(&buf[..]).unwrap(), real);

        let cplx = TimeFrequencyMatrix::new(
            layout(TransformId::Stft, 2),
            TfValues::Complex(Array2::from_shape_fn((3, 2), |(t, k)| {
                Complex64::new(t as f64, -(k as f64))
            })),
        )
        .unwrap();
        let mut buf = Vec::new();
        cplx.write_to(&mut buf).unwrap();
        let header_len = u64::from_le_bytes(buf[..8].try_into().unwrap()) as usize;
        let header: serde_json::Value = serde_json::from_slice(&buf[8..8 + header_len]).unwrap();
        assert_eq!(header["value_kind"], "complex");
        assert_eq!(header["T"], 3);
        assert_eq!(buf.len(), 8 + header_len + 3 * 2 * 16);
        assert_eq!(TimeFrequencyMatrix::read_from(&buf[..]).unwrap(), cplx);
    }

    #[test]
    fn rejects_truncated_payload() {
        let real = TimeFrequencyMatrix::new(
            layout(TransformId::Pqmf, 2),
            TfValues::Real(Array2::zeros((2, 2))),
        )
        .unwrap();
        let mut buf = Vec::new();
        real.write_to(&mut buf).unwrap();
        buf.pop();
        assert!(TimeFrequencyMatrix::read_from(&buf[..]).is_err());
    }

    #[test]
    fn value_kind_must_match_transform() {
        assert!(TimeFrequencyMatrix::new(
            layout(TransformId::Stft, 2),
            TfValues::Real(Array2::zeros((1, 2)))
        )
        .is_err());
    }
}
