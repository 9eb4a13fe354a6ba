//! Stochastic reset bath: every environment site follows an independent
//! telegraph process (Poisson resets to a random `z`), and the observed spin
//! accumulates the phase fixed by the current configuration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{DynamicsError, Result, TimeGrid, Trajectory};
use crate::molecule::Molecule;
use crate::qcore::{CMatrix, DensityMatrix, Operator, QcoreError, C64};

/// Trajectories per parallel work item; fixed so reductions are order-stable.
const CHUNK: usize = 1024;

/// Per-register-site reset rates and post-reset `P(z = +1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResetModel {
    pub rates: Vec<f64>,
    pub targets_up: Vec<f64>,
}

impl ResetModel {
    /// Fair resets at the given rates.
    pub fn new(rates: Vec<f64>) -> Self {
        let targets_up = vec![0.5; rates.len()];
        Self { rates, targets_up }
    }

    /// Rates of the molecule's active sites in register order, resetting
    /// towards `P(up) = (1 + ε)/2`.
    pub fn from_molecule(m: &Molecule) -> Self {
        let active = m.active_sites();
        Self {
            rates: active.iter().map(|&i| m.sites()[i].reset_rate).collect(),
            targets_up: active.iter().map(|&i| 0.5 * (1.0 + m.polarization(i))).collect(),
        }
    }

    pub fn validate(&self, n_sites: usize) -> Result<()> {
        let bad = |msg: String| Err(DynamicsError::BadResetModel(msg));
        if self.rates.len() != n_sites || self.targets_up.len() != n_sites {
            return bad(format!("expected {n_sites} sites, got {}", self.rates.len()));
        }
        for (k, (&r, &p)) in self.rates.iter().zip(&self.targets_up).enumerate() {
            if !(r >= 0.0) || !r.is_finite() {
                return bad(format!("site {k} rate {r}"));
            }
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("site {k} target {p}"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct McRun {
    /// Reduced states of the observed site.
    pub trajectory: Trajectory,
    /// Standard error of the estimated `S(t)` (norm of the complex error).
    pub s_stderr: Vec<f64>,
    pub n_traj: usize,
    pub seed: u64,
}

struct Setup {
    /// Environment bit masks in register order.
    env_bits: Vec<usize>,
    env_rates: Vec<f64>,
    env_targets: Vec<f64>,
    total_rate: f64,
    system_bit: usize,
    energies: Vec<f64>,
    /// Cumulative `p(z)` over environment configurations (indices with system bit 0).
    cumulative: Vec<f64>,
    configs: Vec<usize>,
    weights: Vec<C64>,
}

impl Setup {
    fn omega(&self, cfg: usize) -> f64 {
        self.energies[cfg] - self.energies[cfg | self.system_bit]
    }

    fn sample_config<R: Rng>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty");
        let u = rng.random::<f64>() * total;
        self.cumulative.partition_point(|&c| c <= u).min(self.configs.len() - 1)
    }
}

/// Sample `n_traj` trajectories and average the system coherence.
///
/// Trajectory `i` draws from stream `i` of `ChaCha8Rng::seed_from_u64(seed)`, so results
/// do not depend on thread count. A reset of the observed site itself is
/// applied analytically as coherence damping and population relaxation.
pub fn evolve_reset_mc(
    rho0: &DensityMatrix,
    h_weak: &Operator,
    system: usize,
    reset: &ResetModel,
    grid: &TimeGrid,
    n_traj: usize,
    seed: u64,
) -> Result<McRun> {
    let space = rho0.space();
    if h_weak.dim() != rho0.dim() {
        return Err(QcoreError::DimensionMismatch {
            expected: rho0.dim(),
            found: h_weak.dim(),
        }
        .into());
    }
    if !h_weak.is_diagonal() {
        return Err(DynamicsError::NonDiagonalHamiltonian);
    }
    if n_traj == 0 {
        return Err(DynamicsError::NoTrajectories);
    }
    space.check_site(system)?;
    reset.validate(space.n_sites())?;

    let n = space.n_sites();
    let env: Vec<usize> = (0..n).filter(|&s| s != system).collect();
    let system_bit = space.bit(system);
    let rho = rho0.matrix();
    for i in 0..rho0.dim() {
        for j in 0..rho0.dim() {
            // the environment must be diagonal for a classical z-configuration picture
            let diff = (i ^ j) & !system_bit;
            if diff != 0 && rho[(i, j)].norm() > 1e-12 {
                let site = env.iter().copied().find(|&s| diff & space.bit(s) != 0).unwrap_or(0);
                return Err(DynamicsError::AncillaCoherence(site));
            }
        }
    }
    let mut cumulative = Vec::new();
    let mut configs = Vec::new();
    let mut weights = Vec::new();
    let mut acc = 0.0;
    for cfg in (0..rho0.dim()).filter(|i| i & system_bit == 0) {
        let p = rho[(cfg, cfg)].re + rho[(cfg | system_bit, cfg | system_bit)].re;
        if p > 0.0 {
            acc += p;
            cumulative.push(acc);
            configs.push(cfg);
            weights.push(rho[(cfg | system_bit, cfg)] / p);
        }
    }
    let setup = Setup {
        env_bits: env.iter().map(|&s| space.bit(s)).collect(),
        env_rates: env.iter().map(|&s| reset.rates[s]).collect(),
        env_targets: env.iter().map(|&s| reset.targets_up[s]).collect(),
        total_rate: env.iter().map(|&s| reset.rates[s]).sum(),
        system_bit,
        energies: (0..h_weak.dim()).map(|i| h_weak.matrix()[(i, i)].re).collect(),
        cumulative,
        configs,
        weights,
    };
    let times: Vec<f64> = grid.points().iter().map(|t| t - grid.t0()).collect();

    let n_chunks = n_traj.div_ceil(CHUNK);
    let partials: Vec<(Vec<C64>, Vec<f64>)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut sum = vec![C64::new(0.0, 0.0); times.len()];
            let mut sq = vec![0.0; times.len()];
            for idx in c * CHUNK..((c + 1) * CHUNK).min(n_traj) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(idx as u64);
                run_one(&setup, &times, &mut rng, &mut sum, &mut sq);
            }
            (sum, sq)
        })
        .collect();
    let mut sum = vec![C64::new(0.0, 0.0); times.len()];
    let mut sq = vec![0.0; times.len()];
    for (s, q) in partials {
        for k in 0..times.len() {
            sum[k] += s[k];
            sq[k] += q[k];
        }
    }

    let total_p = *setup.cumulative.last().unwrap_or(&0.0);
    let nf = n_traj as f64;
    let p_up0: f64 = (0..rho0.dim())
        .filter(|i| i & system_bit == 0)
        .map(|i| rho[(i, i)].re)
        .sum();
    let (r_sys, target_sys) = (reset.rates[system], reset.targets_up[system]);
    let sys_space = space.select(&[system])?;
    let mut states = Vec::with_capacity(times.len());
    let mut s_stderr = Vec::with_capacity(times.len());
    for (k, &tau) in times.iter().enumerate() {
        let decay = (-r_sys * tau).exp();
        let mean = sum[k] / nf;
        let var = (sq[k] / nf - mean.norm_sqr()).max(0.0);
        // ρ10 = total_p · E[w e^{iφ}]
        let rho10 = mean * total_p * decay;
        s_stderr.push(2.0 * total_p * decay * (var / nf).sqrt());
        let p_up = target_sys + (p_up0 - target_sys) * decay;
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(p_up, 0.0), rho10.conj(), rho10, C64::new(1.0 - p_up, 0.0)],
        );
        states.push(DensityMatrix::from_matrix_unchecked(sys_space.clone(), m)?);
    }
    Ok(McRun {
        trajectory: Trajectory {
            grid: *grid,
            states,
        },
        s_stderr,
        n_traj,
        seed,
    })
}

fn run_one(setup: &Setup, times: &[f64], rng: &mut ChaCha8Rng, sum: &mut [C64], sq: &mut [f64]) {
    let k = setup.sample_config(rng);
    let mut cfg = setup.configs[k];
    let w = setup.weights[k];
    let mut phase = 0.0;
    let mut t = 0.0;
    let mut next_event = next_event_time(setup, rng, t);
    for (slot, &target) in times.iter().enumerate() {
        while next_event <= target {
            phase += setup.omega(cfg) * (next_event - t);
            t = next_event;
            cfg = reset_one(setup, rng, cfg);
            next_event = next_event_time(setup, rng, t);
        }
        phase += setup.omega(cfg) * (target - t);
        t = target;
        let v = w * C64::from_polar(1.0, phase);
        sum[slot] += v;
        sq[slot] += v.norm_sqr();
    }
}

fn next_event_time(setup: &Setup, rng: &mut ChaCha8Rng, t: f64) -> f64 {
    if setup.total_rate == 0.0 {
        return f64::INFINITY;
    }
    let u: f64 = rng.random();
    t - (1.0 - u).ln() / setup.total_rate
}

fn reset_one(setup: &Setup, rng: &mut ChaCha8Rng, cfg: usize) -> usize {
    let mut pick = rng.random::<f64>() * setup.total_rate;
    let mut site = setup.env_rates.len() - 1;
    for (k, &r) in setup.env_rates.iter().enumerate() {
        if pick < r {
            site = k;
            break;
        }
        pick -= r;
    }
    let bit = setup.env_bits[site];
    if rng.random::<f64>() < setup.env_targets[site] {
        cfg & !bit
    } else {
        cfg | bit
    }
}
