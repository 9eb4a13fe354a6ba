use std::ops::{Add, Mul, Sub};

use super::linalg::spectral_norm;
use super::{CMatrix, QcoreError, Result, SpinSpace, C64};

/// Dense square operator on a [`SpinSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: SpinSpace,
    mat: CMatrix,
}

impl Operator {
    pub fn new(space: SpinSpace, mat: CMatrix) -> Result<Self> {
        let dim = space.dim();
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(QcoreError::DimensionMismatch {
                expected: dim,
                found: if mat.nrows() != dim { mat.nrows() } else { mat.ncols() },
            });
        }
        Ok(Self { space, mat })
    }

    pub fn identity(space: &SpinSpace) -> Self {
        let dim = space.dim();
        Self {
            space: space.clone(),
            mat: CMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(space: &SpinSpace) -> Self {
        let dim = space.dim();
        Self {
            space: space.clone(),
            mat: CMatrix::zeros(dim, dim),
        }
    }

    fn single(entries: [[C64; 2]; 2]) -> Self {
        Self {
            space: SpinSpace::single(),
            mat: CMatrix::from_fn(2, 2, |i, j| entries[i][j]),
        }
    }

    pub fn identity2() -> Self {
        Self::identity(&SpinSpace::single())
    }

    pub fn pauli_x() -> Self {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self::single([[o, l], [l, o]])
    }

    pub fn pauli_y() -> Self {
        let o = C64::new(0.0, 0.0);
        Self::single([[o, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), o]])
    }

    pub fn pauli_z() -> Self {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self::single([[l, o], [o, -l]])
    }

    /// `|0⟩⟨1|`, raising `σ_z` from −1 to +1.
    pub fn sigma_plus() -> Self {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self::single([[o, l], [o, o]])
    }

    /// `|1⟩⟨0|`.
    pub fn sigma_minus() -> Self {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self::single([[o, o], [l, o]])
    }

    pub fn space(&self) -> &SpinSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Same matrix on a relabelled space of equal size.
    pub fn relabel(self, space: SpinSpace) -> Result<Self> {
        Self::new(space, self.mat)
    }

    pub fn dagger(&self) -> Self {
        Self {
            space: self.space.clone(),
            mat: self.mat.adjoint(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            space: self.space.clone(),
            mat: &self.mat * c,
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn max_abs(&self) -> f64 {
        super::max_abs(&self.mat)
    }

    /// Every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.mat[(i, j)] == C64::new(0.0, 0.0)))
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        super::max_abs_diff(&self.mat, &self.mat.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let n = self.dim();
        let prod = self.mat.adjoint() * &self.mat;
        super::max_abs_diff(&prod, &CMatrix::identity(n, n)) <= tol
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self * other - other * self
    }

    fn assert_same_dim(&self, other: &Self) {
        assert_eq!(
            self.dim(),
            other.dim(),
            "operator dimension mismatch ({} vs {})",
            self.dim(),
            other.dim()
        );
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.assert_same_dim(rhs);
        Operator {
            space: self.space.clone(),
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.assert_same_dim(rhs);
        Operator {
            space: self.space.clone(),
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl Sub for Operator {
    type Output = Operator;
    fn sub(self, rhs: Operator) -> Operator {
        &self - &rhs
    }
}

impl Add for Operator {
    type Output = Operator;
    fn add(self, rhs: Operator) -> Operator {
        &self + &rhs
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.assert_same_dim(rhs);
        Operator {
            space: self.space.clone(),
            mat: &self.mat * &rhs.mat,
        }
    }
}

/// Kronecker product `a ⊗ b`, with `a` on the leftmost sites.
pub fn tensor_product(a: &Operator, b: &Operator) -> Result<Operator> {
    let space = a.space.join(&b.space)?;
    Ok(Operator {
        space,
        mat: a.mat.kronecker(&b.mat),
    })
}

/// Lift a single-site operator to act on `site` of `space`, identity elsewhere.
pub fn embed(op: &Operator, site: usize, space: &SpinSpace) -> Result<Operator> {
    if op.space.n_sites() != 1 {
        return Err(QcoreError::NotSingleSite {
            n_sites: op.space.n_sites(),
        });
    }
    space.check_site(site)?;
    let dim = space.dim();
    let bit = space.bit(site);
    let mut mat = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        let bi = usize::from(i & bit != 0);
        for bj in 0..2 {
            let j = if bj == 1 { i | bit } else { i & !bit };
            mat[(i, j)] = op.mat[(bi, bj)];
        }
    }
    Ok(Operator {
        space: space.clone(),
        mat,
    })
}

/// Largest singular value.
pub fn operator_norm(op: &Operator) -> f64 {
    spectral_norm(&op.mat)
}
