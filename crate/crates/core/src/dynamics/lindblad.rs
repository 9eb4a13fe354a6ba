use std::fmt;
use std::sync::Arc;

use super::{DynamicsError, Result, TimeGrid, Trajectory};
use crate::qcore::{
    embed, min_hermitian_eigenvalue, CMatrix, DensityMatrix, Operator, QcoreError, SpinSpace, C64,
};

/// Dissipation rate of one jump operator.
#[derive(Clone)]
pub enum Rate {
    /// Constant, non-negative.
    Fixed(f64),
    /// Arbitrary `γ(t)`; may turn negative.
    TimeDependent(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Rate {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            Rate::Fixed(g) => *g,
            Rate::TimeDependent(f) => f(t),
        }
    }
}

impl fmt::Debug for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rate::Fixed(g) => write!(f, "Fixed({g})"),
            Rate::TimeDependent(_) => f.write_str("TimeDependent(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LindbladTerm {
    pub jump: Operator,
    pub rate: Rate,
}

impl LindbladTerm {
    pub fn fixed(jump: Operator, rate: f64) -> Self {
        Self {
            jump,
            rate: Rate::Fixed(rate),
        }
    }

    pub fn time_dependent(jump: Operator, rate: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            jump,
            rate: Rate::TimeDependent(Arc::new(rate)),
        }
    }
}

/// Jump operators realising a reset of `site` at `rate` towards `P(up) = p_up`.
///
/// `σ+` at `r·p_up`, `σ−` at `r·(1−p_up)` and `σ_z` at `r/4` reproduce
/// `ρ → Tr_site(ρ) ⊗ τ` exactly.
pub fn reset_terms(space: &SpinSpace, site: usize, rate: f64, p_up: f64) -> Result<Vec<LindbladTerm>> {
    let ops = [
        (Operator::sigma_plus(), rate * p_up),
        (Operator::sigma_minus(), rate * (1.0 - p_up)),
        (Operator::pauli_z(), rate / 4.0),
    ];
    ops.into_iter()
        .filter(|(_, g)| *g > 0.0)
        .map(|(op, g)| Ok(LindbladTerm::fixed(embed(&op, site, space)?, g)))
        .collect()
}

#[derive(Clone, Copy, Debug)]
pub struct LindbladOptions {
    /// Per-step absolute error bound on matrix entries.
    pub tolerance: f64,
    /// Steps changing the trace by more than this are rejected.
    pub max_trace_drift: f64,
    /// Grid states with an eigenvalue below `-positivity_tol` abort the run.
    pub positivity_tol: f64,
}

impl Default for LindbladOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            max_trace_drift: 1e-10,
            positivity_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LindbladRun {
    pub trajectory: Trajectory,
    /// `(term index, grid time)` where a time-dependent rate changed sign.
    pub sign_changes: Vec<(usize, f64)>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

struct Generator {
    h: CMatrix,
    jumps: Vec<(CMatrix, CMatrix, CMatrix, Rate)>,
}

impl Generator {
    fn apply(&self, t: f64, rho: &CMatrix) -> CMatrix {
        let i = C64::new(0.0, 1.0);
        let hr = &self.h * rho;
        let mut out = (hr.adjoint() - hr) * i;
        for (a, a_dag, a_dag_a, rate) in &self.jumps {
            let g = rate.at(t);
            if g == 0.0 {
                continue;
            }
            let ar = a * rho;
            let anti = a_dag_a * rho;
            let term = &ar * a_dag - (&anti + anti.adjoint()) * C64::new(0.5, 0.0);
            out += term * C64::new(g, 0.0);
        }
        out
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

fn trace_re(m: &CMatrix) -> f64 {
    m.trace().re
}

/// Integrate the Lindblad equation with adaptive Dormand-Prince 5(4) steps that
/// land exactly on the grid points.
pub fn evolve_lindblad(
    rho0: &DensityMatrix,
    h: &Operator,
    terms: &[LindbladTerm],
    grid: &TimeGrid,
    opts: &LindbladOptions,
) -> Result<LindbladRun> {
    let dim = rho0.dim();
    for op in std::iter::once(h).chain(terms.iter().map(|t| &t.jump)) {
        if op.dim() != dim {
            return Err(QcoreError::DimensionMismatch {
                expected: dim,
                found: op.dim(),
            }
            .into());
        }
    }
    for (term, t) in terms.iter().enumerate() {
        if let Rate::Fixed(g) = t.rate {
            if !(g >= 0.0) {
                return Err(DynamicsError::NegativeRate { term, rate: g });
            }
        }
    }
    let gen = Generator {
        h: h.matrix().clone(),
        jumps: terms
            .iter()
            .map(|t| {
                let a = t.jump.matrix().clone();
                let a_dag = a.adjoint();
                let a_dag_a = &a_dag * &a;
                (a, a_dag, a_dag_a, t.rate.clone())
            })
            .collect(),
    };
    let points = grid.points();
    let mut sign_changes = Vec::new();
    for (idx, t) in terms.iter().enumerate() {
        if let Rate::TimeDependent(f) = &t.rate {
            for w in points.windows(2) {
                if f(w[0]).signum() * f(w[1]).signum() < 0.0 {
                    sign_changes.push((idx, w[1]));
                }
            }
        }
    }

    let space = rho0.space().clone();
    let mut y = rho0.matrix().clone();
    let mut t = points[0];
    let mut k1 = gen.apply(t, &y);
    let mut step = grid.dt();
    let (mut accepted, mut rejected) = (0, 0);
    let mut states = Vec::with_capacity(points.len());
    states.push(rho0.clone());
    for &target in &points[1..] {
        while t < target {
            let h_step = step.min(target - t);
            let min_step = 1e-14 * t.abs().max(1.0);
            if h_step < min_step && target - t > min_step {
                return Err(DynamicsError::StepUnderflow { t, h: h_step });
            }
            let mut k = Vec::with_capacity(7);
            k.push(k1.clone());
            for s in 1..7 {
                let mut ys = y.clone();
                for (j, kj) in k.iter().enumerate().take(s) {
                    if A[s][j] != 0.0 {
                        ys += kj * C64::new(h_step * A[s][j], 0.0);
                    }
                }
                k.push(gen.apply(t + C[s] * h_step, &ys));
                if s == 6 {
                    // stage 7 is evaluated at the fifth-order solution
                    let y5 = ys;
                    let mut err_m = CMatrix::zeros(dim, dim);
                    for (j, kj) in k.iter().enumerate() {
                        if E[j] != 0.0 {
                            err_m += kj * C64::new(h_step * E[j], 0.0);
                        }
                    }
                    let err = err_m.iter().map(|z| z.norm()).fold(0.0, f64::max);
                    let drift = (trace_re(&y5) - trace_re(&y)).abs();
                    if err <= opts.tolerance && drift <= opts.max_trace_drift {
                        t = if h_step == target - t { target } else { t + h_step };
                        y = (&y5 + y5.adjoint()) * C64::new(0.5, 0.0);
                        k1 = k.pop().expect("seven stages");
                        accepted += 1;
                        if h_step < step {
                            // a grid-truncated step says nothing about the error-controlled size
                            break;
                        }
                    } else {
                        rejected += 1;
                    }
                    let factor = if err == 0.0 {
                        5.0
                    } else {
                        (0.9 * (opts.tolerance / err).powf(0.2)).clamp(0.2, 5.0)
                    };
                    let factor = if drift > opts.max_trace_drift { factor.min(0.5) } else { factor };
                    step = h_step * factor;
                }
            }
        }
        let min_eig = if dim == 2 {
            min_hermitian_eigenvalue(&y)
        } else {
            y.clone().symmetric_eigenvalues().min()
        };
        if min_eig < -opts.positivity_tol {
            return Err(DynamicsError::PositivityViolation { t, min_eig });
        }
        states.push(DensityMatrix::from_matrix_unchecked(space.clone(), y.clone())?);
    }
    Ok(LindbladRun {
        trajectory: Trajectory {
            grid: *grid,
            states,
        },
        sign_changes,
        accepted_steps: accepted,
        rejected_steps: rejected,
    })
}
