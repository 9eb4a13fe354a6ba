//! Exact FID for a system spin coupled through `J σ_z σ_z / 4` to independent
//! ancillas, each reset at Poisson times.
//!
//! Under a diagonal Hamiltonian ancilla-ancilla terms cancel from the system
//! coherence phase, so `S(t) = S(0) e^{-r_s t} Π_k f_k(t)` with `f_k` the
//! solution of a two-state master equation for ancilla `k`.

use super::{DynamicsError, FidMeta, FidRecord, Result, TimeGrid};
use crate::molecule::Molecule;
use crate::qcore::C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ancilla {
    /// Coupling to the system, rad/s.
    pub coupling: f64,
    pub reset_rate: f64,
    /// Probability of `z = +1` right after a reset.
    pub reset_up: f64,
    /// Probability of `z = +1` at `t = 0`.
    pub initial_up: f64,
}

impl Ancilla {
    /// Maximally mixed at `t = 0`, fair resets.
    pub fn new(coupling: f64, reset_rate: f64) -> Self {
        Self {
            coupling,
            reset_rate,
            reset_up: 0.5,
            initial_up: 0.5,
        }
    }
}

/// How [`FactorizedModel::from_molecule`] treats couplings between ancillas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZzPolicy {
    Reject,
    /// Drop them; exact for the system FID since the diagonal Hamiltonian
    /// never changes ancilla `z` values.
    IgnoreZz,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorizedModel {
    pub ancillas: Vec<Ancilla>,
    pub system_reset_rate: f64,
    pub system_reset_up: f64,
    /// System Bloch vector at `t = 0`.
    pub initial_bloch: [f64; 3],
}

impl FactorizedModel {
    /// `count` identical ancillas; system starts along `+x`.
    pub fn uniform(count: usize, coupling: f64, reset_rate: f64) -> Self {
        Self {
            ancillas: vec![Ancilla::new(coupling, reset_rate); count],
            system_reset_rate: 0.0,
            system_reset_up: 0.5,
            initial_bloch: [1.0, 0.0, 0.0],
        }
    }

    /// Ancillas are the active sites other than the system. Initial and
    /// post-reset populations follow the site polarisations. The system starts along `+x`.
    pub fn from_molecule(m: &Molecule, policy: ZzPolicy) -> Result<Self> {
        let sys = m.system_site();
        let active = m.active_sites();
        if policy == ZzPolicy::Reject {
            if let Some((j, k, _)) = m
                .couplings()
                .iter()
                .find(|&(j, k, _)| j != sys && k != sys && !m.is_decoupled(j) && !m.is_decoupled(k))
            {
                return Err(DynamicsError::CoupledAncillas {
                    a: m.sites()[j].label.clone(),
                    b: m.sites()[k].label.clone(),
                });
            }
        }
        let ancillas = active
            .into_iter()
            .filter(|&i| i != sys)
            .map(|i| Ancilla {
                coupling: m.couplings().get(sys, i),
                reset_rate: m.sites()[i].reset_rate,
                reset_up: 0.5 * (1.0 + m.polarization(i)),
                initial_up: 0.5 * (1.0 + m.polarization(i)),
            })
            .collect();
        Ok(Self {
            ancillas,
            system_reset_rate: m.sites()[sys].reset_rate,
            system_reset_up: 0.5 * (1.0 + m.polarization(sys)),
            initial_bloch: [1.0, 0.0, 0.0],
        })
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(DynamicsError::BadResetModel(what));
        for (k, a) in self.ancillas.iter().enumerate() {
            if !(a.reset_rate >= 0.0) || !a.reset_rate.is_finite() {
                return bad(format!("ancilla {k} reset rate {}", a.reset_rate));
            }
            if !(0.0..=1.0).contains(&a.reset_up) || !(0.0..=1.0).contains(&a.initial_up) {
                return bad(format!("ancilla {k} probabilities out of [0, 1]"));
            }
        }
        if !(self.system_reset_rate >= 0.0) || !(0.0..=1.0).contains(&self.system_reset_up) {
            return bad("system reset".to_string());
        }
        Ok(())
    }
}

/// `Σ_z c_z(t)` for `c' = M c`, where ancilla value `z` adds phase rate `z J/2`
/// and resets redistribute weight at rate `r`.
pub fn single_ancilla_kernel(a: &Ancilla, t: f64) -> C64 {
    let half = 0.5 * a.coupling;
    let r = a.reset_rate;
    let (pu, pd) = (a.reset_up, 1.0 - a.reset_up);
    // M = [[iJ/2 - r·pd, r·pu], [r·pd, -iJ/2 - r·pu]]
    let m00 = C64::new(-r * pd, half);
    let m01 = C64::new(r * pu, 0.0);
    let m10 = C64::new(r * pd, 0.0);
    let m11 = C64::new(-r * pu, -half);
    let mu = (m00 + m11) * 0.5;
    let (d00, d11) = (m00 - mu, m11 - mu);
    // (M - μI)² = Δ² I
    let delta = (d00 * d00 + m01 * m10).sqrt();
    let x = delta * t;
    let (ch, sh_over) = if x.norm() < 1e-6 {
        let x2 = x * x;
        (1.0 + x2 * 0.5, C64::new(t, 0.0) * (1.0 + x2 / 6.0))
    } else {
        (x.cosh(), x.sinh() / delta)
    };
    let c0 = C64::new(a.initial_up, 0.0);
    let c1 = C64::new(1.0 - a.initial_up, 0.0);
    let e = (mu * t).exp();
    let up = e * (ch * c0 + sh_over * (d00 * c0 + m01 * c1));
    let down = e * (ch * c1 + sh_over * (m10 * c0 + d11 * c1));
    up + down
}

pub fn evolve_factorized(model: &FactorizedModel, grid: &TimeGrid) -> Result<FidRecord> {
    model.validate()?;
    let [x0, y0, z0] = model.initial_bloch;
    let s0 = C64::new(x0, y0);
    let z_target = 2.0 * model.system_reset_up - 1.0;
    let mut s = Vec::with_capacity(grid.len());
    let mut trace_dist = Vec::with_capacity(grid.len());
    for t in grid.points() {
        let tau = t - grid.t0();
        let decay = (-model.system_reset_rate * tau).exp();
        let product: C64 = model
            .ancillas
            .iter()
            .map(|a| single_ancilla_kernel(a, tau))
            .product();
        let value = s0 * product * decay;
        let z = z_target + (z0 - z_target) * decay;
        s.push(value);
        trace_dist.push(0.5 * (value.norm_sqr() + z * z).sqrt());
    }
    Ok(FidRecord {
        grid: *grid,
        s,
        trace_dist,
        meta: FidMeta::engine("factorized"),
    })
}
