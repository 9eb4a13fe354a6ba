use std::f64::consts::TAU;

use super::{Molecule, MoleculeError, Result};
use crate::qcore::{CMatrix, DensityMatrix, C64};

/// Product thermal state `⊗ (I + ε_j σ_z)/2` over the active sites.
///
/// With a single polarised site this coincides with the linearised
/// high-temperature form; with several it stays positive.
pub fn thermal_state(m: &Molecule) -> Result<DensityMatrix> {
    let space = m.active_space()?;
    let eps: Vec<f64> = m.active_sites().iter().map(|&i| m.polarization(i)).collect();
    let dim = space.dim();
    let mut mat = CMatrix::zeros(dim, dim);
    for idx in 0..dim {
        let p: f64 = eps
            .iter()
            .enumerate()
            .map(|(site, e)| {
                let z = if idx & space.bit(site) == 0 { 1.0 } else { -1.0 };
                0.5 * (1.0 + e * z)
            })
            .product();
        mat[(idx, idx)] = C64::new(p, 0.0);
    }
    Ok(DensityMatrix::new(space, mat)?)
}

/// Ideal rf rotation `R(β, φ)` applied to the sites named in `targets`.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSpec {
    beta: f64,
    phi: f64,
    pub targets: Vec<String>,
}

impl PulseSpec {
    /// Angles are reduced into `[0, 2π)`; `R(β + 2π) = −R(β)` acts identically on states.
    pub fn new(beta: f64, phi: f64, targets: Vec<String>) -> Self {
        Self {
            beta: beta.rem_euclid(TAU),
            phi: phi.rem_euclid(TAU),
            targets,
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn rotation(&self) -> CMatrix {
        rotation(self.beta, self.phi)
    }
}

/// `cos(β/2) I − i sin(β/2)(cos φ σ_x + sin φ σ_y)`.
pub fn rotation(beta: f64, phi: f64) -> CMatrix {
    let (s, c) = (0.5 * beta).sin_cos();
    let off = C64::new(0.0, -s);
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(c, 0.0),
            off * C64::from_polar(1.0, -phi),
            off * C64::from_polar(1.0, phi),
            C64::new(c, 0.0),
        ],
    )
}

/// Rotate every target site. Targets are resolved against the state's register,
/// so decoupled sites are rejected.
pub fn apply_pulse(rho: &DensityMatrix, pulse: &PulseSpec) -> Result<DensityMatrix> {
    let u = pulse.rotation();
    let mut out = rho.clone();
    for label in &pulse.targets {
        let site = rho
            .space()
            .site_index(label)
            .ok_or_else(|| MoleculeError::PulseTarget(label.clone()))?;
        out = out.apply_site_unitary(site, &u)?;
    }
    Ok(out)
}

/// Rotate a single register site, ignoring `pulse.targets`.
pub fn selective_pulse(rho: &DensityMatrix, site: usize, pulse: &PulseSpec) -> Result<DensityMatrix> {
    Ok(rho.apply_site_unitary(site, &pulse.rotation())?)
}
