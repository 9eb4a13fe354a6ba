use super::{CMatrix, Operator, QcoreError, Result, C64};

/// Eigendecomposition `H = V diag(E) V†` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
    /// The input was exactly diagonal and `vectors` is the identity.
    pub diagonal: bool,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `e^{-iHt}`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        let phases: Vec<C64> = self
            .values
            .iter()
            .map(|&e| C64::from_polar(1.0, -e * t))
            .collect();
        if self.diagonal {
            return CMatrix::from_diagonal(&nalgebra::DVector::from_vec(phases));
        }
        let mut scaled = self.vectors.clone();
        for (j, p) in phases.iter().enumerate() {
            for z in scaled.column_mut(j).iter_mut() {
                *z *= p;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// `V† A V`.
    pub fn to_eigenbasis(&self, a: &CMatrix) -> CMatrix {
        if self.diagonal {
            a.clone()
        } else {
            self.vectors.adjoint() * a * &self.vectors
        }
    }

    /// `V A V†`.
    pub fn from_eigenbasis(&self, a: &CMatrix) -> CMatrix {
        if self.diagonal {
            a.clone()
        } else {
            &self.vectors * a * self.vectors.adjoint()
        }
    }
}

/// Eigendecomposition of a matrix that must be Hermitian within `tol`.
pub fn hermitian_eigen(mat: &CMatrix, tol: f64) -> Result<HermitianEigen> {
    let deviation = max_abs_diff(mat, &mat.adjoint());
    if deviation > tol {
        return Err(QcoreError::NotHermitian { deviation });
    }
    let n = mat.nrows();
    let is_diag = (0..n).all(|i| (0..n).all(|j| i == j || mat[(i, j)] == C64::new(0.0, 0.0)));
    if is_diag {
        return Ok(HermitianEigen {
            values: (0..n).map(|i| mat[(i, i)].re).collect(),
            vectors: CMatrix::identity(n, n),
            diagonal: true,
        });
    }
    let eig = hermitian_part(mat).symmetric_eigen();
    Ok(HermitianEigen {
        values: eig.eigenvalues.iter().copied().collect(),
        vectors: eig.eigenvectors,
        diagonal: false,
    })
}

/// `U(t) = e^{-iHt}` through the eigendecomposition of `h`.
pub fn hermitian_expm(h: &Operator, t: f64) -> Result<Operator> {
    let eig = hermitian_eigen(h.matrix(), super::HERMITIAN_TOL)?;
    Operator::new(h.space().clone(), eig.propagator(t))
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_hermitian_eigenvalue(m: &CMatrix) -> f64 {
    if m.nrows() == 2 {
        // closed form keeps the 2×2 hot paths allocation-light
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
        let mean = 0.5 * (a + d);
        let half = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        return mean - half;
    }
    hermitian_part(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    m.clone().singular_values().iter().copied().collect()
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    singular_values(m).into_iter().sum()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
