use super::{Result, TimeGrid, Trajectory};
use crate::qcore::{
    hermitian_eigen, partial_trace_matrix, CMatrix, DensityMatrix, HermitianEigen, Operator,
    QcoreError, C64, HERMITIAN_TOL,
};

fn check_dims(rho0: &DensityMatrix, h: &Operator) -> Result<()> {
    if rho0.dim() != h.dim() {
        return Err(QcoreError::DimensionMismatch {
            expected: rho0.dim(),
            found: h.dim(),
        }
        .into());
    }
    Ok(())
}

/// `ρ(t) = U ρ̃ U†` evaluated in the eigenbasis of `h`, with `t` measured from `grid.t0()`.
fn evolve_in_eigenbasis(eig: &HermitianEigen, rho_eig: &CMatrix, tau: f64) -> CMatrix {
    let dim = eig.dim();
    let phases: Vec<C64> = eig.values.iter().map(|&e| C64::from_polar(1.0, -e * tau)).collect();
    let evolved = CMatrix::from_fn(dim, dim, |a, b| rho_eig[(a, b)] * phases[a] * phases[b].conj());
    eig.from_eigenbasis(&evolved)
}

fn hermitize(m: CMatrix) -> CMatrix {
    (&m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Exact closed-system evolution sampled on `grid`.
pub fn evolve_unitary(rho0: &DensityMatrix, h: &Operator, grid: &TimeGrid) -> Result<Trajectory> {
    check_dims(rho0, h)?;
    let eig = hermitian_eigen(h.matrix(), HERMITIAN_TOL)?;
    let rho_eig = eig.to_eigenbasis(rho0.matrix());
    let states = grid
        .points()
        .into_iter()
        .map(|t| {
            let m = hermitize(evolve_in_eigenbasis(&eig, &rho_eig, t - grid.t0()));
            DensityMatrix::from_matrix_unchecked(rho0.space().clone(), m)
        })
        .collect::<Result<_, _>>()?;
    Ok(Trajectory {
        grid: *grid,
        states,
    })
}

/// Reduced states on `keep` (ascending) without storing the full trajectory.
///
/// A diagonal `h` takes a direct path costing `O(4^k · 2^(n-k))` per grid point.
pub fn evolve_unitary_reduced(
    rho0: &DensityMatrix,
    h: &Operator,
    grid: &TimeGrid,
    keep: &[usize],
) -> Result<Trajectory> {
    check_dims(rho0, h)?;
    let space = rho0.space();
    let n = space.n_sites();
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    let reduced_space = space.select(&keep)?;
    let states = if h.is_diagonal() {
        reduced_diagonal(rho0, h, grid, &keep, n)?
    } else {
        let eig = hermitian_eigen(h.matrix(), HERMITIAN_TOL)?;
        let rho_eig = eig.to_eigenbasis(rho0.matrix());
        grid.points()
            .into_iter()
            .map(|t| {
                let full = evolve_in_eigenbasis(&eig, &rho_eig, t - grid.t0());
                partial_trace_matrix(&full, n, &keep).map(hermitize)
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    let states = states
        .into_iter()
        .map(|m| DensityMatrix::from_matrix_unchecked(reduced_space.clone(), m))
        .collect::<Result<_, _>>()?;
    Ok(Trajectory {
        grid: *grid,
        states,
    })
}

struct Term {
    row: usize,
    col: usize,
    amp: C64,
    gap: f64,
}

fn reduced_diagonal(
    rho0: &DensityMatrix,
    h: &Operator,
    grid: &TimeGrid,
    keep: &[usize],
    n: usize,
) -> Result<Vec<CMatrix>> {
    let space = rho0.space();
    let energies: Vec<f64> = (0..h.dim()).map(|i| h.matrix()[(i, i)].re).collect();
    let k = keep.len();
    let env: Vec<usize> = (0..n).filter(|s| !keep.contains(s)).collect();
    let place = |sites: &[usize], value: usize| {
        sites.iter().enumerate().fold(0, |acc, (pos, &s)| {
            if value & (1 << (sites.len() - 1 - pos)) != 0 {
                acc | space.bit(s)
            } else {
                acc
            }
        })
    };
    let kept_idx: Vec<usize> = (0..1 << k).map(|a| place(keep, a)).collect();
    let env_idx: Vec<usize> = (0..1 << env.len()).map(|e| place(&env, e)).collect();
    let mut terms = Vec::new();
    for (row, &ia) in kept_idx.iter().enumerate() {
        for (col, &ib) in kept_idx.iter().enumerate() {
            for &ie in &env_idx {
                let amp = rho0.matrix()[(ia | ie, ib | ie)];
                if amp != C64::new(0.0, 0.0) {
                    terms.push(Term {
                        row,
                        col,
                        amp,
                        gap: energies[ia | ie] - energies[ib | ie],
                    });
                }
            }
        }
    }
    let dim = 1 << k;
    Ok(grid
        .points()
        .into_iter()
        .map(|t| {
            let tau = t - grid.t0();
            let mut m = CMatrix::zeros(dim, dim);
            for term in &terms {
                m[(term.row, term.col)] += term.amp * C64::from_polar(1.0, -term.gap * tau);
            }
            hermitize(m)
        })
        .collect())
}
