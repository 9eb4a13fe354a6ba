use std::collections::VecDeque;

use super::{DynamicsError, Result, TimeGrid};
use crate::qcore::{embed, hermitian_eigen, spectral_norm, CMatrix, Operator, HERMITIAN_TOL};

/// Default commutator-norm threshold marking arrival.
pub const LIGHTCONE_EPS: f64 = 0.01;

#[derive(Clone, Debug)]
pub struct LightconeSpec {
    pub source_site: usize,
    /// Single-site operator placed on the source at `t = 0`.
    pub source_op: Operator,
    /// Single-site operator placed on each probe.
    pub probe_op: Operator,
    pub probes: Vec<usize>,
    pub eps: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LightconeRow {
    pub site: usize,
    pub distance: usize,
    /// `‖[O_1(t), O_2]‖` per grid point.
    pub norms: Vec<f64>,
    /// First grid time with norm above `eps`.
    pub arrival: Option<f64>,
}

/// Breadth-first hop counts from `source`; unreachable sites are `None`.
pub fn graph_distances(n_sites: usize, edges: &[(usize, usize)], source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; n_sites];
    let mut queue = VecDeque::from([source]);
    dist[source] = Some(0);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].expect("queued sites have distances");
        for &(a, b) in edges {
            let next = if a == u { b } else if b == u { a } else { continue };
            if dist[next].is_none() {
                dist[next] = Some(d + 1);
                queue.push_back(next);
            }
        }
    }
    dist
}

/// Commutator-norm growth between a Heisenberg-evolved source operator and
/// static probes. `edges` define graph distance and must connect every probe.
pub fn lightcone(
    h: &Operator,
    edges: &[(usize, usize)],
    spec: &LightconeSpec,
    grid: &TimeGrid,
) -> Result<Vec<LightconeRow>> {
    let space = h.space();
    let dist = graph_distances(space.n_sites(), edges, spec.source_site);
    let o1 = embed(&spec.source_op, spec.source_site, space)?;
    let eig = hermitian_eigen(h.matrix(), HERMITIAN_TOL)?;
    let o1_eig = eig.to_eigenbasis(o1.matrix());
    let times = grid.points();
    let mut rows = Vec::with_capacity(spec.probes.len());
    for &site in &spec.probes {
        space.check_site(site)?;
        let distance = dist[site].ok_or(DynamicsError::DisconnectedProbe(site))?;
        let o2 = eig.to_eigenbasis(embed(&spec.probe_op, site, space)?.matrix());
        let norms: Vec<f64> = times
            .iter()
            .map(|&t| {
                let tau = t - grid.t0();
                // O_1(t) = U† O_1 U is diagonal-phase conjugation in the eigenbasis
                let n = eig.dim();
                let o1t = CMatrix::from_fn(n, n, |a, b| {
                    o1_eig[(a, b)]
                        * crate::qcore::C64::from_polar(1.0, (eig.values[a] - eig.values[b]) * tau)
                });
                spectral_norm(&(&o1t * &o2 - &o2 * &o1t))
            })
            .collect();
        let arrival = norms
            .iter()
            .position(|&v| v > spec.eps)
            .map(|k| times[k]);
        rows.push(LightconeRow {
            site,
            distance,
            norms,
            arrival,
        });
    }
    Ok(rows)
}
