//! Reduced-dynamics channels: superoperators, Kraus form, tomography,
//! divisibility of intermediate maps and the trace-distance backflow measure.
//!
//! Vectorisation is row-major, `vec(ρ)[i·d + j] = ρ_ij`, so that
//! `vec(A ρ B) = (A ⊗ Bᵀ) vec(ρ)`.

mod blp;
mod divisibility;
mod export;
mod kraus;
mod supermap;
mod tomography;

use thiserror::Error;

use crate::qcore::QcoreError;

pub use blp::{
    blp_measure, exhaustive_pairs, fibonacci_pairs, fibonacci_sphere, BlpOptions, BlpReport,
    StatePair, DEFAULT_DIRECTIONS,
};
pub use divisibility::{
    divide, divisibility_scan, verdict, DivisibilityOutcome, DivisibilityVerdict, DIVISIBILITY_TOL,
    MAX_CONDITION,
};
pub use export::{blp_csv, blp_summary_json, channel_json};
pub use kraus::{to_kraus, KrausChannel, KRAUS_CUTOFF};
pub use supermap::SuperMap;
pub use tomography::{standard_inputs, tomograph};

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error(transparent)]
    Qcore(#[from] QcoreError),
    #[error("input states do not span the operator space (rank {rank} of {needed})")]
    RankDeficient { rank: usize, needed: usize },
    #[error("input and output sets differ in size ({inputs} vs {outputs})")]
    MismatchedInputs { inputs: usize, outputs: usize },
    #[error("map at t={t} is singular (condition number {condition:e})")]
    Singular { t: f64, condition: f64 },
    #[error("map is not completely positive (min Choi eigenvalue {min_eig:e})")]
    NotCompletelyPositive { min_eig: f64 },
    #[error("state pair search set is empty")]
    EmptySearch,
    #[error("grid too coarse: distinguishability alternates direction at t={t}")]
    GridTooCoarse { t: f64 },
    #[error("maps and times differ in length ({maps} vs {times})")]
    LengthMismatch { maps: usize, times: usize },
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
}

pub type Result<T, E = ChannelError> = std::result::Result<T, E>;
