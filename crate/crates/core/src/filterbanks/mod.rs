//! Analysis/synthesis transforms: the polyphase pseudo-QMF filterbank, the
//! sine-windowed MDCT and the Hamming-windowed STFT.

mod mdct;
mod pqmf;
mod signal;
mod stft;
mod tf;
mod transform;

pub use mdct::{mdct_analyze, mdct_synthesize, Mdct};
pub use pqmf::{build_polyphase, pqmf_analyze, pqmf_synthesize, PolyphasePair};
pub use signal::{round_trip_snr, AudioSignal};
pub use stft::{stft_analyze, stft_synthesize, Stft};
pub use tf::{TfLayout, TfValues, TimeFrequencyMatrix, TransformId};
pub use transform::{shipped_pqmf, shipped_prototype, Transform, TransformConfig};

pub(crate) use tf::{expect_len, read_container, shape_err, write_container, ValueKind};
