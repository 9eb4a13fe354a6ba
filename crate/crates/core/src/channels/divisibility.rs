use super::{fibonacci_sphere, ChannelError, Result, SuperMap};

/// Condition number above which `Φ_s` is treated as non-invertible.
pub const MAX_CONDITION: f64 = 1e12;

/// Eigenvalues below `-DIVISIBILITY_TOL` break positivity of an intermediate map.
pub const DIVISIBILITY_TOL: f64 = 1e-6;

/// Pure inputs probed for positivity of qubit intermediate maps.
const P_PROBES: usize = 400;

/// `Φ_{t,s} = Φ_t Φ_s⁻¹`, so that `Φ_t = Φ_{t,s} ∘ Φ_s`.
pub fn divide(later: &SuperMap, earlier: &SuperMap) -> Result<SuperMap> {
    let inv = earlier.inverse(MAX_CONDITION)?;
    Ok(SuperMap {
        matrix: &later.matrix * &inv.matrix,
        t: later.t,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DivisibilityVerdict {
    pub s: f64,
    pub t: f64,
    pub min_choi_eig: f64,
    /// Smallest output eigenvalue over sampled pure inputs (qubit maps only).
    pub min_output_eig: Option<f64>,
    pub cp: bool,
    pub positive: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DivisibilityOutcome {
    Defined(DivisibilityVerdict),
    /// `Φ_s` is singular, so no intermediate map exists.
    Undefined { s: f64, t: f64, condition: f64 },
}

impl DivisibilityOutcome {
    pub fn verdict(&self) -> Option<&DivisibilityVerdict> {
        match self {
            Self::Defined(v) => Some(v),
            Self::Undefined { .. } => None,
        }
    }
}

pub fn verdict(later: &SuperMap, earlier: &SuperMap) -> Result<DivisibilityOutcome> {
    let inter = match divide(later, earlier) {
        Ok(m) => m,
        Err(ChannelError::Singular { condition, .. }) => {
            return Ok(DivisibilityOutcome::Undefined {
                s: earlier.t,
                t: later.t,
                condition,
            })
        }
        Err(e) => return Err(e),
    };
    let min_choi_eig = inter.min_choi_eigenvalue();
    let min_output_eig = (inter.dim() == 2).then(|| inter.min_output_eigenvalue(&fibonacci_sphere(P_PROBES)));
    Ok(DivisibilityOutcome::Defined(DivisibilityVerdict {
        s: earlier.t,
        t: later.t,
        min_choi_eig,
        min_output_eig,
        cp: min_choi_eig >= -DIVISIBILITY_TOL,
        positive: min_output_eig.map(|v| v >= -DIVISIBILITY_TOL),
    }))
}

/// Verdicts for `(maps[k], maps[k + stride])` over the whole sequence.
pub fn divisibility_scan(maps: &[SuperMap], stride: usize) -> Result<Vec<DivisibilityOutcome>> {
    let stride = stride.max(1);
    (0..maps.len().saturating_sub(stride))
        .map(|k| verdict(&maps[k + stride], &maps[k]))
        .collect()
}
