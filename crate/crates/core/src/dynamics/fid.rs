use std::fmt::Write as _;

use super::{DynamicsError, Result, TimeGrid, Trajectory};
use crate::qcore::{QcoreError, C64};

/// `|S|` must fall below this before a revival can be counted.
pub const COLLAPSE_LEVEL: f64 = 0.01;
/// A counted revival is a local maximum of `|S|` above this.
pub const REVIVAL_LEVEL: f64 = 0.02;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FidMeta {
    pub scenario: Option<String>,
    pub engine: String,
    pub seed: Option<u64>,
}

impl FidMeta {
    pub fn engine(engine: &str) -> Self {
        Self {
            engine: engine.to_string(),
            ..Self::default()
        }
    }
}

/// Complex signal `S = ⟨σ_x⟩ + i⟨σ_y⟩` of the observed spin and its trace
/// distance from the maximally mixed state.
#[derive(Clone, Debug, PartialEq)]
pub struct FidRecord {
    pub grid: TimeGrid,
    pub s: Vec<C64>,
    pub trace_dist: Vec<f64>,
    pub meta: FidMeta,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Revival {
    pub t: f64,
    pub amplitude: f64,
}

/// FID of a trajectory of single-site states.
pub fn fid(traj: &Trajectory) -> Result<FidRecord> {
    if traj.is_empty() {
        return Err(DynamicsError::EmptyTrajectory);
    }
    let mut s = Vec::with_capacity(traj.len());
    let mut trace_dist = Vec::with_capacity(traj.len());
    for state in &traj.states {
        let [x, y, z] = state.bloch().ok_or(QcoreError::NotSingleSite {
            n_sites: state.space().n_sites(),
        })?;
        s.push(C64::new(x, y));
        trace_dist.push(0.5 * (x * x + y * y + z * z).sqrt());
    }
    Ok(FidRecord {
        grid: traj.grid,
        s,
        trace_dist,
        meta: FidMeta::engine("unknown"),
    })
}

impl FidRecord {
    pub fn abs(&self) -> Vec<f64> {
        self.s.iter().map(|z| z.norm()).collect()
    }

    pub fn times(&self) -> Vec<f64> {
        self.grid.points()
    }

    /// CSV with header `t_s,re_s,im_s,trace_dist`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_s,re_s,im_s,trace_dist\n");
        for ((t, s), d) in self.times().iter().zip(&self.s).zip(&self.trace_dist) {
            let _ = writeln!(out, "{t:.16e},{:.16e},{:.16e},{d:.16e}", s.re, s.im);
        }
        out
    }
}

fn is_local_max(v: &[f64], k: usize) -> bool {
    k > 0 && k + 1 < v.len() && v[k] >= v[k - 1] && v[k] > v[k + 1]
}

/// Local maxima of `|S|` above [`REVIVAL_LEVEL`], each preceded by a dip
/// below [`COLLAPSE_LEVEL`] since the previous revival.
pub fn detect_revivals(rec: &FidRecord) -> Vec<Revival> {
    let v = rec.abs();
    let times = rec.times();
    let mut armed = false;
    let mut out = Vec::new();
    for k in 0..v.len() {
        if v[k] < COLLAPSE_LEVEL {
            armed = true;
        } else if armed && v[k] > REVIVAL_LEVEL && is_local_max(&v, k) {
            out.push(Revival {
                t: times[k],
                amplitude: v[k],
            });
            armed = false;
        }
    }
    out
}

pub fn count_revivals(rec: &FidRecord) -> usize {
    detect_revivals(rec).len()
}

/// First time `|S|` drops below `level`.
pub fn collapse_time(rec: &FidRecord, level: f64) -> Option<f64> {
    let times = rec.times();
    rec.s.iter().position(|z| z.norm() < level).map(|k| times[k])
}

/// Height of the first local maximum after the first collapse, however small.
pub fn first_revival_amplitude(rec: &FidRecord) -> Option<f64> {
    let v = rec.abs();
    let start = v.iter().position(|&x| x < COLLAPSE_LEVEL)?;
    (start..v.len()).find(|&k| is_local_max(&v, k)).map(|k| v[k])
}

/// Largest local maximum of `|S|` after the first collapse.
pub fn largest_revival_after_collapse(rec: &FidRecord) -> Option<f64> {
    let v = rec.abs();
    let start = v.iter().position(|&x| x < COLLAPSE_LEVEL)?;
    (start..v.len())
        .filter(|&k| is_local_max(&v, k))
        .map(|k| v[k])
        .reduce(f64::max)
}
