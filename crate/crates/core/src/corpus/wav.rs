use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::error::{Error, Result};
use crate::filterbanks::AudioSignal;

/// Sample encoding used when writing WAV files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WavEncoding {
    Pcm16,
    #[default]
    Float32,
}

fn load_err(path: &Path, reason: impl ToString) -> Error {
    Error::Load {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

/// Decodes a PCM16, PCM24 or float32 WAV file into one signal per channel.
///
/// Integer samples are scaled by `2^-(bits-1)`, so they land in `[-1, 1)`.
pub fn read_wav(path: &Path) -> Result<Vec<AudioSignal>> {
    let reader = WavReader::open(path).map_err(|e| load_err(path, e))?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 {
        return Err(load_err(path, "no channels"));
    }
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, bits @ (16 | 24)) => {
            let scale = 1.0 / (1u32 << (bits - 1)) as f64;
            reader
                .into_samples::<i32>()
                .map(|s| s.map(|v| v as f64 * scale))
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| load_err(path, e))?
        }
        (SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| load_err(path, e))?,
        (format, bits) => {
            return Err(load_err(
                path,
                format!("unsupported encoding: {bits}-bit {format:?}"),
            ))
        }
    };
    let frames = interleaved.len() / channels;
    (0..channels)
        .map(|c| {
            let samples = (0..frames).map(|i| interleaved[i * channels + c]).collect();
            AudioSignal::new(samples, spec.sample_rate).map_err(|e| load_err(path, e))
        })
        .collect()
}

/// Writes a mono WAV file. PCM output is clamped to `[-1, 1]`.
pub fn write_wav(path: &Path, signal: &AudioSignal, encoding: WavEncoding) -> Result<()> {
    let (bits, format) = match encoding {
        WavEncoding::Pcm16 => (16, SampleFormat::Int),
        WavEncoding::Float32 => (32, SampleFormat::Float),
    };
    let spec = WavSpec {
        channels: 1,
        sample_rate: signal.sample_rate(),
        bits_per_sample: bits,
        sample_format: format,
    };
    let io_err = |e: hound::Error| match e {
        hound::Error::IoError(io) => Error::Io(io),
        other => load_err(path, other),
    };
    let mut writer = WavWriter::create(path, spec).map_err(io_err)?;
    for &s in signal.samples() {
        match encoding {
            WavEncoding::Pcm16 => {
                let v = (s.clamp(-1.0, 1.0) * 32767.0).round() as i16;
                writer.write_sample(v).map_err(io_err)?;
            }
            WavEncoding::Float32 => writer.write_sample(s as f32).map_err(io_err)?,
        }
    }
    writer.finalize().map_err(io_err)
}
