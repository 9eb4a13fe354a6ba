use std::fmt::Write as _;

use rustfft::FftPlanner;

use super::{DynamicsError, FidRecord, Result};
use crate::qcore::C64;

/// DFT `X_k = Σ_n s_n e^{-2πi kn/N}` reordered so frequencies ascend.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub freq_hz: Vec<f64>,
    pub values: Vec<C64>,
}

impl Spectrum {
    /// Frequency of the largest `|X|`.
    pub fn peak(&self) -> f64 {
        let k = (0..self.values.len())
            .max_by(|&a, &b| self.values[a].norm().total_cmp(&self.values[b].norm()))
            .unwrap_or(0);
        self.freq_hz[k]
    }

    pub fn bin_width(&self) -> f64 {
        self.freq_hz.get(1).map_or(0.0, |f| f - self.freq_hz[0])
    }

    /// CSV with header `freq_hz,re,im,abs`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("freq_hz,re,im,abs\n");
        for (f, x) in self.freq_hz.iter().zip(&self.values) {
            let _ = writeln!(out, "{f:.16e},{:.16e},{:.16e},{:.16e}", x.re, x.im, x.norm());
        }
        out
    }
}

pub fn spectrum(rec: &FidRecord) -> Spectrum {
    transform(&rec.s, rec.grid.dt())
}

/// Spectrum of samples at arbitrary times, which must be uniformly spaced.
pub fn spectrum_samples(times: &[f64], s: &[C64]) -> Result<Spectrum> {
    if times.len() != s.len() || times.len() < 2 {
        return Err(DynamicsError::NonUniformGrid);
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    let uniform = dt > 0.0
        && times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs().max(1e-300));
    if !uniform {
        return Err(DynamicsError::NonUniformGrid);
    }
    Ok(transform(s, dt))
}

fn transform(s: &[C64], dt: f64) -> Spectrum {
    let n = s.len();
    let mut buf = s.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let shift = n / 2;
    let values: Vec<C64> = (0..n).map(|k| buf[(k + n - shift) % n]).collect();
    let freq_hz = (0..n)
        .map(|k| (k as f64 - shift as f64) / (n as f64 * dt))
        .collect();
    Spectrum { freq_hz, values }
}
