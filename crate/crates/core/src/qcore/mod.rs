//! Dense complex operator algebra on small spin-1/2 registers.
//!
//! Site 0 is always the leftmost tensor factor. For a register of `n` sites the
//! computational basis index of site `j` is bit `n - 1 - j`, and bit value 0 is
//! spin up (`σ_z = +1`).

mod density;
mod linalg;
mod operator;
mod space;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

pub use density::{
    partial_trace, partial_trace_matrix, trace_distance, DensityMatrix, HERMITIAN_TOL,
    POSITIVITY_TOL, TRACE_TOL,
};
pub use linalg::{
    hermitian_eigen, hermitian_expm, hermitian_part, max_abs, max_abs_diff,
    min_hermitian_eigenvalue, singular_values, spectral_norm, trace_norm, HermitianEigen,
};
pub use operator::{embed, operator_norm, tensor_product, Operator};
pub use space::{SpinSpace, DEFAULT_MAX_SITES};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QcoreError {
    #[error("register of {requested} sites exceeds the dense cap of {cap}")]
    Capacity { requested: usize, cap: usize },
    #[error("a spin space needs at least one site")]
    EmptySpace,
    #[error("site index {site} out of range for {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("duplicate site {0} in selection")]
    DuplicateSite(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator is not Hermitian (max |A - A†| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("trace {trace} differs from 1")]
    BadTrace { trace: f64 },
    #[error("state is not positive (min eigenvalue {min_eig:e})")]
    NotPositive { min_eig: f64 },
    #[error("partial trace needs at least one kept site")]
    EmptyKeep,
    #[error("expected a single-site operator, found {n_sites} sites")]
    NotSingleSite { n_sites: usize },
}

pub type Result<T, E = QcoreError> = std::result::Result<T, E>;

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use rand::Rng;

    pub fn random_matrix<R: Rng>(rng: &mut R, dim: usize) -> CMatrix {
        CMatrix::from_fn(dim, dim, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    pub fn random_state<R: Rng>(rng: &mut R, space: &SpinSpace) -> DensityMatrix {
        let a = random_matrix(rng, space.dim());
        let mut m = &a * a.adjoint();
        let tr = m.trace();
        m /= tr;
        DensityMatrix::new(space.clone(), m).unwrap()
    }
}
