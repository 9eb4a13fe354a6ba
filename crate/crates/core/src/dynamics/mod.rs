//! Time evolution engines and the observables computed from them.
//!
//! Engines: exact unitary, Lindblad (adaptive Dormand-Prince), Monte Carlo
//! reset bath and the exact factorized kernel for uncoupled ancillas.

mod factorized;
mod fid;
mod grid;
mod lightcone;
mod lindblad;
mod montecarlo;
mod otoc;
mod spectrum;
mod unitary;

use thiserror::Error;

use crate::molecule::MoleculeError;
use crate::qcore::QcoreError;

pub use factorized::{evolve_factorized, single_ancilla_kernel, Ancilla, FactorizedModel, ZzPolicy};
pub use fid::{
    collapse_time, count_revivals, detect_revivals, fid, first_revival_amplitude,
    largest_revival_after_collapse, FidMeta, FidRecord, Revival, COLLAPSE_LEVEL, REVIVAL_LEVEL,
};
pub use grid::{TimeGrid, Trajectory};
pub use lightcone::{graph_distances, lightcone, LightconeRow, LightconeSpec, LIGHTCONE_EPS};
pub use lindblad::{
    evolve_lindblad, reset_terms, LindbladOptions, LindbladRun, LindbladTerm, Rate,
};
pub use montecarlo::{evolve_reset_mc, McRun, ResetModel};
pub use otoc::{otoc, OtocValue};
pub use spectrum::{spectrum, spectrum_samples, Spectrum};
pub use unitary::{evolve_unitary, evolve_unitary_reduced};

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Qcore(#[from] QcoreError),
    #[error(transparent)]
    Molecule(#[from] MoleculeError),
    #[error("time grid needs t1 > t0 and steps >= 1 (got t0={t0}, t1={t1}, steps={steps})")]
    BadGrid { t0: f64, t1: f64, steps: usize },
    #[error("samples are not on a uniform grid")]
    NonUniformGrid,
    #[error("fixed rate of term {term} must be non-negative, got {rate}")]
    NegativeRate { term: usize, rate: f64 },
    #[error("integrator step size underflow at t={t} (h={h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("state lost positivity at t={t}: min eigenvalue {min_eig:e}")]
    PositivityViolation { t: f64, min_eig: f64 },
    #[error("Hamiltonian is not diagonal in the computational basis")]
    NonDiagonalHamiltonian,
    #[error("ancillas {a} and {b} are coupled")]
    CoupledAncillas { a: String, b: String },
    #[error("ancilla {0} carries transverse coherence")]
    AncillaCoherence(usize),
    #[error("invalid reset model: {0}")]
    BadResetModel(String),
    #[error("probe site {0} is not connected to the source")]
    DisconnectedProbe(usize),
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("need at least one trajectory")]
    NoTrajectories,
}

pub type Result<T, E = DynamicsError> = std::result::Result<T, E>;
