//! Filterbank design and time-frequency disjointness evaluation.
//!
//! The crate provides three analysis/synthesis transforms (an optimized
//! pseudo-QMF filterbank built from polyphase matrices, a sine-windowed MDCT
//! and a Hamming-windowed STFT), ideal binary masking together with the
//! W-disjoint orthogonality and Gini sparsity measures, and a small corpus
//! pipeline that evaluates multitrack recordings under each transform.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod error;
pub mod filterbanks;
pub mod masking;
pub mod window_design;

pub use error::{Error, Result};
pub use filterbanks::{
    round_trip_snr, AudioSignal, PolyphasePair, TfValues, TimeFrequencyMatrix, Transform,
    TransformConfig, TransformId,
};
pub use masking::{BinaryMask, SeparationScores};
pub use window_design::{DesignOptions, DesignReport, FrequencyGrid, PrototypeWindow};
