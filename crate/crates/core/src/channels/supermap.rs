use super::{ChannelError, Result};
use crate::qcore::{singular_values, CMatrix, DensityMatrix, QcoreError, C64};

/// Linear map on `d × d` matrices stored as a `d² × d²` matrix acting on `vec(ρ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperMap {
    pub matrix: CMatrix,
    pub t: f64,
}

impl SuperMap {
    pub fn new(matrix: CMatrix, t: f64) -> Result<Self> {
        let d2 = matrix.nrows();
        let d = (d2 as f64).sqrt().round() as usize;
        if matrix.ncols() != d2 || d * d != d2 || d == 0 {
            return Err(QcoreError::DimensionMismatch {
                expected: d * d,
                found: matrix.ncols(),
            }
            .into());
        }
        Ok(Self { matrix, t })
    }

    pub fn identity(dim: usize, t: f64) -> Self {
        Self {
            matrix: CMatrix::identity(dim * dim, dim * dim),
            t,
        }
    }

    /// Qubit map multiplying the coherence `ρ₁₀` by `factor` and relaxing
    /// populations towards `P(up) = target_up` by `population_decay`.
    pub fn qubit_coherence(factor: C64, population_decay: f64, target_up: f64, t: f64) -> Self {
        let mut m = CMatrix::zeros(4, 4);
        let relax = 1.0 - population_decay;
        // ρ00' = decay·ρ00 + (1 − decay)·target·(ρ00 + ρ11)
        m[(0, 0)] = C64::new(population_decay + relax * target_up, 0.0);
        m[(0, 3)] = C64::new(relax * target_up, 0.0);
        m[(3, 0)] = C64::new(relax * (1.0 - target_up), 0.0);
        m[(3, 3)] = C64::new(population_decay + relax * (1.0 - target_up), 0.0);
        m[(2, 2)] = factor;
        m[(1, 1)] = factor.conj();
        Self { matrix: m, t }
    }

    /// `Σ K ⊗ conj(K)`.
    pub fn from_kraus(ops: &[CMatrix], t: f64) -> Self {
        let d = ops.first().map_or(1, |k| k.nrows());
        let mut m = CMatrix::zeros(d * d, d * d);
        for k in ops {
            m += k.kronecker(&k.map(|z| z.conj()));
        }
        Self { matrix: m, t }
    }

    pub fn dim(&self) -> usize {
        (self.matrix.nrows() as f64).sqrt().round() as usize
    }

    pub fn apply_matrix(&self, rho: &CMatrix) -> CMatrix {
        let d = self.dim();
        let v = nalgebra::DVector::from_iterator(d * d, rho.transpose().iter().copied());
        let out = &self.matrix * v;
        CMatrix::from_row_slice(d, d, out.as_slice())
    }

    /// Image of a state. Physical positivity is not re-validated.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(QcoreError::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            }
            .into());
        }
        let out = self.apply_matrix(rho.matrix());
        Ok(DensityMatrix::from_matrix_unchecked(rho.space().clone(), out)?)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix,
            t: self.t,
        }
    }

    pub fn condition_number(&self) -> f64 {
        let sv = singular_values(&self.matrix);
        let max = sv.iter().copied().fold(0.0, f64::max);
        let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// Fails when the condition number exceeds `max_condition`.
    pub fn inverse(&self, max_condition: f64) -> Result<Self> {
        let condition = self.condition_number();
        if !(condition <= max_condition) {
            return Err(ChannelError::Singular { t: self.t, condition });
        }
        let inv = self
            .matrix
            .clone()
            .try_inverse()
            .ok_or(ChannelError::Singular { t: self.t, condition })?;
        Ok(Self { matrix: inv, t: self.t })
    }

    /// `C[(i,a),(j,b)] = Φ(|i⟩⟨j|)_ab`; positive semidefinite iff the map is CP.
    pub fn choi(&self) -> CMatrix {
        let d = self.dim();
        CMatrix::from_fn(d * d, d * d, |r, c| {
            let (i, a) = (r / d, r % d);
            let (j, b) = (c / d, c % d);
            self.matrix[(a * d + b, i * d + j)]
        })
    }

    pub fn min_choi_eigenvalue(&self) -> f64 {
        crate::qcore::min_hermitian_eigenvalue(&self.choi())
    }

    /// Largest `|Tr Φ(X) − Tr X|` over the matrix-unit basis.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for col in 0..d * d {
            let tr: C64 = (0..d).map(|a| self.matrix[(a * d + a, col)]).sum();
            let expect = if col / d == col % d { 1.0 } else { 0.0 };
            worst = worst.max((tr - expect).norm());
        }
        worst
    }

    /// Smallest eigenvalue of `Φ(|ψ⟩⟨ψ|)` over the given pure qubit inputs.
    pub fn min_output_eigenvalue(&self, inputs: &[[f64; 3]]) -> f64 {
        inputs
            .iter()
            .map(|&r| {
                let rho = DensityMatrix::from_bloch(r).expect("unit Bloch vector");
                crate::qcore::min_hermitian_eigenvalue(&self.apply_matrix(rho.matrix()))
            })
            .fold(f64::INFINITY, f64::min)
    }
}
