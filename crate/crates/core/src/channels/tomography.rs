use nalgebra::DVector;

use super::{ChannelError, Result, SuperMap};
use crate::dynamics::Trajectory;
use crate::qcore::{singular_values, CMatrix, DensityMatrix, QcoreError, C64};

const RANK_TOL: f64 = 1e-10;

/// `|0⟩, |1⟩, |+⟩, |+i⟩`: a basis of the qubit operator space.
pub fn standard_inputs() -> [DensityMatrix; 4] {
    [
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
    ]
    .map(|r| DensityMatrix::from_bloch(r).expect("unit Bloch vectors"))
}

fn vec_of(m: &CMatrix) -> DVector<C64> {
    DVector::from_iterator(m.len(), m.transpose().iter().copied())
}

/// Reconstructs the map at every grid point from reduced trajectories of
/// known inputs. More than `d²` inputs are fitted by least squares.
pub fn tomograph(inputs: &[DensityMatrix], outputs: &[Trajectory]) -> Result<Vec<SuperMap>> {
    if inputs.len() != outputs.len() {
        return Err(ChannelError::MismatchedInputs {
            inputs: inputs.len(),
            outputs: outputs.len(),
        });
    }
    let d = inputs.first().map_or(0, |r| r.dim());
    let d2 = d * d;
    if inputs.is_empty() {
        return Err(ChannelError::RankDeficient { rank: 0, needed: d2.max(1) });
    }
    let mut x = CMatrix::zeros(d2, inputs.len());
    for (k, rho) in inputs.iter().enumerate() {
        if rho.dim() != d {
            return Err(QcoreError::DimensionMismatch { expected: d, found: rho.dim() }.into());
        }
        x.set_column(k, &vec_of(rho.matrix()));
    }
    let sv = singular_values(&x);
    let top = sv.iter().copied().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > RANK_TOL * top.max(1.0)).count();
    if rank < d2 {
        return Err(ChannelError::RankDeficient { rank, needed: d2 });
    }
    let x_pinv = x
        .pseudo_inverse(RANK_TOL)
        .map_err(|_| ChannelError::RankDeficient { rank, needed: d2 })?;
    let grid = outputs[0].grid;
    let len = outputs[0].len();
    for traj in outputs {
        if traj.len() != len {
            return Err(ChannelError::MismatchedInputs { inputs: len, outputs: traj.len() });
        }
        if let Some(s) = traj.states.first() {
            if s.dim() != d {
                return Err(QcoreError::DimensionMismatch { expected: d, found: s.dim() }.into());
            }
        }
    }
    Ok((0..len)
        .map(|k| {
            let mut y = CMatrix::zeros(d2, outputs.len());
            for (col, traj) in outputs.iter().enumerate() {
                y.set_column(col, &vec_of(traj.states[k].matrix()));
            }
            SuperMap {
                matrix: y * &x_pinv,
                t: grid.point(k),
            }
        })
        .collect())
}
