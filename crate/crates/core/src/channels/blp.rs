use rayon::prelude::*;

use super::{ChannelError, Result, SuperMap};
use crate::qcore::{trace_norm, CMatrix, DensityMatrix, QcoreError, C64};

/// Antipodal pure-state pairs in the default search set.
pub const DEFAULT_DIRECTIONS: usize = 62;

/// Increments smaller than this carry no direction for the coarseness check.
const FLAT_INCREMENT: f64 = 1e-9;
/// Consecutive direction reversals that mark an unresolved oscillation.
const MAX_ALTERNATIONS: usize = 3;

/// Ensemble `{p ρ₁, (1 − p) ρ₂}` whose distinguishability is tracked.
#[derive(Clone, Debug, PartialEq)]
pub struct StatePair {
    pub p: f64,
    pub rho1: DensityMatrix,
    pub rho2: DensityMatrix,
}

impl StatePair {
    pub fn new(p: f64, rho1: DensityMatrix, rho2: DensityMatrix) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(ChannelError::BadProbability(p));
        }
        if rho1.dim() != rho2.dim() {
            return Err(QcoreError::DimensionMismatch {
                expected: rho1.dim(),
                found: rho2.dim(),
            }
            .into());
        }
        Ok(Self { p, rho1, rho2 })
    }

    /// Equal-weight pure qubit states along `±n`.
    pub fn antipodal(n: [f64; 3]) -> Self {
        let norm = n.iter().map(|x| x * x).sum::<f64>().sqrt();
        let u = n.map(|x| x / norm);
        Self {
            p: 0.5,
            rho1: DensityMatrix::from_bloch(u).expect("unit vector"),
            rho2: DensityMatrix::from_bloch(u.map(|x| -x)).expect("unit vector"),
        }
    }

    /// `p ρ₁ − (1 − p) ρ₂`.
    pub fn delta(&self) -> CMatrix {
        self.rho1.matrix().scale(self.p) - self.rho2.matrix().scale(1.0 - self.p)
    }

    fn antipodal_direction(&self) -> Option<[f64; 3]> {
        let a = self.rho1.bloch()?;
        let b = self.rho2.bloch()?;
        let pure = (a.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-9;
        let opposite = a.iter().zip(&b).all(|(x, y)| (x + y).abs() < 1e-9);
        ((self.p - 0.5).abs() < 1e-12 && pure && opposite).then_some(a)
    }

    pub fn bloch_vectors(&self) -> Option<([f64; 3], [f64; 3])> {
        Some((self.rho1.bloch()?, self.rho2.bloch()?))
    }
}

/// `n` near-uniform unit vectors on the sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// `n` antipodal pairs with directions spread over the upper hemisphere.
pub fn fibonacci_pairs(n: usize) -> Vec<StatePair> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (k as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            StatePair::antipodal([r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}

/// Every pair of `directions` points at Bloch radii 1 and ½, with weights ¼, ½, ¾.
pub fn exhaustive_pairs(directions: usize) -> Vec<StatePair> {
    let points: Vec<DensityMatrix> = fibonacci_sphere(directions)
        .into_iter()
        .flat_map(|n| [1.0, 0.5].map(|s| DensityMatrix::from_bloch(n.map(|x| x * s)).expect("inside ball")))
        .collect();
    let mut pairs = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            for p in [0.25, 0.5, 0.75] {
                pairs.push(StatePair {
                    p,
                    rho1: points[i].clone(),
                    rho2: points[j].clone(),
                });
            }
        }
    }
    pairs
}

#[derive(Clone, Copy, Debug)]
pub struct BlpOptions {
    /// Local search around the best antipodal direction.
    pub refine: bool,
    /// Fail when the optimal curve reverses direction at every step.
    pub check_grid: bool,
}

impl Default for BlpOptions {
    fn default() -> Self {
        Self {
            refine: true,
            check_grid: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BlpReport {
    /// Integrated positive rate of distinguishability change.
    pub n: f64,
    pub pair: StatePair,
    pub times: Vec<f64>,
    pub d: Vec<f64>,
    pub sigma: Vec<f64>,
}

fn distinguishability(maps: &[SuperMap], delta: &CMatrix) -> Vec<f64> {
    maps.iter()
        .map(|m| {
            let out = m.apply_matrix(delta);
            if out.nrows() == 2 {
                qubit_trace_norm(&out)
            } else {
                trace_norm(&out)
            }
        })
        .collect()
}

fn qubit_trace_norm(m: &CMatrix) -> f64 {
    // Hermitian part of a 2×2: eigenvalues mean ± radius
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b: C64 = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    (mean + radius).abs() + (mean - radius).abs()
}

/// Centered differences inside, one-sided at the ends.
fn rate(times: &[f64], d: &[f64]) -> Vec<f64> {
    let n = d.len();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|k| {
            let (lo, hi) = if k == 0 {
                (0, 1)
            } else if k == n - 1 {
                (n - 2, n - 1)
            } else {
                (k - 1, k + 1)
            };
            (d[hi] - d[lo]) / (times[hi] - times[lo])
        })
        .collect()
}

fn integrate_positive(times: &[f64], sigma: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(sigma.windows(2))
        .map(|(t, s)| 0.5 * (t[1] - t[0]) * (s[0].max(0.0) + s[1].max(0.0)))
        .sum()
}

fn score(maps: &[SuperMap], times: &[f64], delta: &CMatrix) -> f64 {
    let d = distinguishability(maps, delta);
    integrate_positive(times, &rate(times, &d))
}

fn check_alternation(times: &[f64], d: &[f64]) -> Result<()> {
    let mut last_sign = 0i8;
    let mut run = 0usize;
    for (k, w) in d.windows(2).enumerate() {
        let inc = w[1] - w[0];
        if inc.abs() < FLAT_INCREMENT {
            continue;
        }
        let sign = if inc > 0.0 { 1 } else { -1 };
        if last_sign != 0 && sign != last_sign {
            run += 1;
            if run >= MAX_ALTERNATIONS {
                return Err(ChannelError::GridTooCoarse { t: times[k + 1] });
            }
        } else {
            run = 0;
        }
        last_sign = sign;
    }
    Ok(())
}

fn refine_direction(maps: &[SuperMap], times: &[f64], start: [f64; 3], start_score: f64) -> ([f64; 3], f64) {
    let to_angles = |n: [f64; 3]| (n[2].clamp(-1.0, 1.0).acos(), n[1].atan2(n[0]));
    let from_angles = |th: f64, ph: f64| [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
    let (mut th, mut ph) = to_angles(start);
    let mut best = start_score;
    let mut step = 0.2;
    while step > 1e-3 {
        let mut improved = false;
        for (dth, dph) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let cand = from_angles(th + dth, ph + dph);
            let s = score(maps, times, &StatePair::antipodal(cand).delta());
            if s > best + 1e-12 {
                best = s;
                th += dth;
                ph += dph;
                improved = true;
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (from_angles(th, ph), best)
}

/// Maximises the integrated distinguishability backflow over `pairs`.
pub fn blp_measure(maps: &[SuperMap], pairs: &[StatePair], opts: BlpOptions) -> Result<BlpReport> {
    if pairs.is_empty() {
        return Err(ChannelError::EmptySearch);
    }
    let times: Vec<f64> = maps.iter().map(|m| m.t).collect();
    let scores: Vec<f64> = pairs
        .par_iter()
        .map(|p| score(maps, &times, &p.delta()))
        .collect();
    let (best_idx, best_score) = scores
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (k, s)| if s > acc.1 { (k, s) } else { acc });
    let mut pair = pairs[best_idx].clone();
    if opts.refine {
        if let Some(dir) = pair.antipodal_direction() {
            let (refined, s) = refine_direction(maps, &times, dir, best_score);
            if s > best_score {
                pair = StatePair::antipodal(refined);
            }
        }
    }
    let d = distinguishability(maps, &pair.delta());
    if opts.check_grid {
        check_alternation(&times, &d)?;
    }
    let sigma = rate(&times, &d);
    Ok(BlpReport {
        n: integrate_positive(&times, &sigma),
        pair,
        times,
        d,
        sigma,
    })
}
