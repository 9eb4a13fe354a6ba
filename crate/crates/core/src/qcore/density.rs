use super::linalg::{hermitian_part, max_abs_diff, singular_values};
use super::{CMatrix, Operator, QcoreError, Result, SpinSpace, C64};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues down to `-POSITIVITY_TOL` count as round-off, below it as an error.
pub const POSITIVITY_TOL: f64 = 1e-9;

/// Trace-one positive Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: SpinSpace,
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(space: SpinSpace, mat: CMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(space, mat)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Shape-checked but not validated; callers own the physical invariants.
    pub(crate) fn from_matrix_unchecked(space: SpinSpace, mat: CMatrix) -> Result<Self> {
        let op = Operator::new(space, mat)?;
        let space = op.space().clone();
        Ok(Self {
            space,
            mat: op.into_matrix(),
        })
    }

    /// Projector onto the normalised `amplitudes`.
    pub fn pure(space: SpinSpace, amplitudes: &[C64]) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(QcoreError::DimensionMismatch {
                expected: space.dim(),
                found: amplitudes.len(),
            });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let psi = nalgebra::DVector::from_iterator(
            amplitudes.len(),
            amplitudes.iter().map(|a| a / norm),
        );
        let mat = &psi * psi.adjoint();
        Self::new(space, mat)
    }

    /// `|index⟩⟨index|`.
    pub fn basis(space: SpinSpace, index: usize) -> Result<Self> {
        let dim = space.dim();
        if index >= dim {
            return Err(QcoreError::DimensionMismatch {
                expected: dim,
                found: index,
            });
        }
        let mut mat = CMatrix::zeros(dim, dim);
        mat[(index, index)] = C64::new(1.0, 0.0);
        Ok(Self { space, mat })
    }

    pub fn maximally_mixed(space: &SpinSpace) -> Self {
        let dim = space.dim();
        Self {
            space: space.clone(),
            mat: CMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0),
        }
    }

    /// Single-site state `(I + r·σ)/2`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let [x, y, z] = r;
        let mat = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.5 * (1.0 + z), 0.0),
                C64::new(0.5 * x, -0.5 * y),
                C64::new(0.5 * x, 0.5 * y),
                C64::new(0.5 * (1.0 - z), 0.0),
            ],
        );
        Self::new(SpinSpace::single(), mat)
    }

    /// Bloch vector of a single-site state.
    pub fn bloch(&self) -> Option<[f64; 3]> {
        if self.space.n_sites() != 1 {
            return None;
        }
        let m = &self.mat;
        Some([
            2.0 * m[(1, 0)].re,
            2.0 * m[(1, 0)].im,
            (m[(0, 0)] - m[(1, 1)]).re,
        ])
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

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn as_operator(&self) -> Operator {
        Operator::new(self.space.clone(), self.mat.clone()).expect("shape checked on construction")
    }

    pub fn relabel(self, space: SpinSpace) -> Result<Self> {
        Self::from_matrix_unchecked(space, self.mat)
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        max_abs_diff(&self.mat, &self.mat.adjoint())
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = hermitian_part(&self.mat)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn min_eigenvalue(&self) -> f64 {
        super::min_hermitian_eigenvalue(&self.mat)
    }

    pub fn validate(&self) -> Result<()> {
        let deviation = self.hermiticity_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(QcoreError::NotHermitian { deviation });
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(QcoreError::BadTrace { trace: tr.re });
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -POSITIVITY_TOL {
            return Err(QcoreError::NotPositive { min_eig });
        }
        Ok(())
    }

    /// Replace the matrix by its Hermitian part.
    pub fn symmetrize(&mut self) {
        self.mat = hermitian_part(&self.mat);
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let space = self.space.join(&other.space)?;
        Ok(Self {
            space,
            mat: self.mat.kronecker(&other.mat),
        })
    }

    /// `U ρ U†` for a unitary on the full space.
    pub fn conjugate_by(&self, u: &Operator) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(QcoreError::DimensionMismatch {
                expected: self.dim(),
                found: u.dim(),
            });
        }
        let mat = u.matrix() * &self.mat * u.matrix().adjoint();
        Ok(Self {
            space: self.space.clone(),
            mat,
        })
    }

    /// `U_s ρ U_s†` with a 2×2 unitary acting on `site` only.
    pub fn apply_site_unitary(&self, site: usize, u: &CMatrix) -> Result<Self> {
        self.space.check_site(site)?;
        if u.shape() != (2, 2) {
            return Err(QcoreError::DimensionMismatch {
                expected: 2,
                found: u.nrows(),
            });
        }
        let bit = self.space.bit(site);
        let dim = self.dim();
        let mut m = self.mat.clone();
        let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
        for c in 0..dim {
            for i0 in (0..dim).filter(|i| i & bit == 0) {
                let i1 = i0 | bit;
                let (a, b) = (m[(i0, c)], m[(i1, c)]);
                m[(i0, c)] = u00 * a + u01 * b;
                m[(i1, c)] = u10 * a + u11 * b;
            }
        }
        let (v00, v01, v10, v11) = (u00.conj(), u01.conj(), u10.conj(), u11.conj());
        for r in 0..dim {
            for j0 in (0..dim).filter(|j| j & bit == 0) {
                let j1 = j0 | bit;
                let (a, b) = (m[(r, j0)], m[(r, j1)]);
                m[(r, j0)] = a * v00 + b * v01;
                m[(r, j1)] = a * v10 + b * v11;
            }
        }
        Ok(Self {
            space: self.space.clone(),
            mat: m,
        })
    }

    /// Insert a single-site state as a new factor at `position`, labelled `label`.
    pub fn insert_site(&self, position: usize, single: &Self, label: &str) -> Result<Self> {
        if single.space.n_sites() != 1 {
            return Err(QcoreError::NotSingleSite {
                n_sites: single.space.n_sites(),
            });
        }
        let n = self.space.n_sites();
        if position > n {
            return Err(QcoreError::SiteOutOfRange {
                site: position,
                n_sites: n + 1,
            });
        }
        let mut labels = self.space.labels().to_vec();
        labels.insert(position, label.to_string());
        let space = SpinSpace::with_max_sites(labels, self.space.max_sites())?;
        let bit = space.bit(position);
        let low_mask = bit - 1;
        let squeeze = |idx: usize| ((idx >> 1) & !low_mask) | (idx & low_mask);
        let dim = space.dim();
        let mat = CMatrix::from_fn(dim, dim, |i, j| {
            let (si, sj) = (usize::from(i & bit != 0), usize::from(j & bit != 0));
            single.mat[(si, sj)] * self.mat[(squeeze(i), squeeze(j))]
        });
        Ok(Self { space, mat })
    }
}

/// Partial trace over every site not in `keep`. Kept sites appear in ascending
/// order in the result.
pub fn partial_trace_matrix(mat: &CMatrix, n_sites: usize, keep: &[usize]) -> Result<CMatrix> {
    if keep.is_empty() {
        return Err(QcoreError::EmptyKeep);
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    for w in kept.windows(2) {
        if w[0] == w[1] {
            return Err(QcoreError::DuplicateSite(w[0]));
        }
    }
    if let Some(&bad) = kept.iter().find(|&&s| s >= n_sites) {
        return Err(QcoreError::SiteOutOfRange { site: bad, n_sites });
    }
    let traced: Vec<usize> = (0..n_sites).filter(|s| !kept.contains(s)).collect();
    let bit = |s: usize| 1usize << (n_sites - 1 - s);
    let spread = |sites: &[usize], value: usize| -> usize {
        let k = sites.len();
        sites
            .iter()
            .enumerate()
            .filter(|(pos, _)| value & (1 << (k - 1 - pos)) != 0)
            .fold(0, |acc, (_, &s)| acc | bit(s))
    };
    let kd = 1usize << kept.len();
    let ed = 1usize << traced.len();
    let kept_idx: Vec<usize> = (0..kd).map(|a| spread(&kept, a)).collect();
    let env_idx: Vec<usize> = (0..ed).map(|e| spread(&traced, e)).collect();
    Ok(CMatrix::from_fn(kd, kd, |a, b| {
        env_idx
            .iter()
            .map(|&e| mat[(kept_idx[a] | e, kept_idx[b] | e)])
            .sum()
    }))
}

/// Reduced state on the `keep` sites.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let mat = partial_trace_matrix(&rho.mat, rho.space.n_sites(), keep)?;
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    let space = rho.space.select(&kept)?;
    Ok(DensityMatrix { space, mat })
}

/// `½‖a − b‖₁`, through the singular values of the difference.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(QcoreError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let diff = &a.mat - &b.mat;
    Ok(0.5 * singular_values(&diff).into_iter().sum::<f64>())
}
