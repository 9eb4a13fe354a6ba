use super::{ChannelError, Result, SuperMap};
use crate::qcore::{hermitian_eigen, hermitian_part, CMatrix, C64};

/// Choi eigenvalues below this are dropped from the Kraus set.
pub const KRAUS_CUTOFF: f64 = 1e-10;

/// Choi eigenvalues below `-CP_TOL` make a map non-CP.
const CP_TOL: f64 = 1e-9;

/// Kraus form `Φ(ρ) = Σ K ρ K†`, normalised so that `Σ K†K = I` for trace-preserving maps.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    pub ops: Vec<CMatrix>,
    pub t: f64,
}

impl KrausChannel {
    pub fn completeness(&self) -> CMatrix {
        let d = self.ops.first().map_or(0, |k| k.nrows());
        self.ops
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k)
    }

    pub fn to_supermap(&self) -> SuperMap {
        SuperMap::from_kraus(&self.ops, self.t)
    }
}

/// Kraus operators from the Choi eigendecomposition; rejects non-CP maps.
pub fn to_kraus(map: &SuperMap) -> Result<KrausChannel> {
    let d = map.dim();
    let choi = hermitian_part(&map.choi());
    let eig = hermitian_eigen(&choi, f64::INFINITY)?;
    let min_eig = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eig < -CP_TOL {
        return Err(ChannelError::NotCompletelyPositive { min_eig });
    }
    let ops = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > KRAUS_CUTOFF)
        .map(|(col, &l)| {
            let v = eig.vectors.column(col);
            let s = C64::new(l.sqrt(), 0.0);
            // v[i·d + a] = K_ai
            CMatrix::from_fn(d, d, |a, i| s * v[i * d + a])
        })
        .collect();
    Ok(KrausChannel { ops, t: map.t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::testutil::random_state;
    use crate::qcore::{max_abs_diff, SpinSpace};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn amplitude_damping_round_trip() {
        let g: f64 = 0.3;
        let k0 = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new((1.0 - g).sqrt(), 0.0)],
        );
        let k1 = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 0.0), C64::new(g.sqrt(), 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        );
        let map = SuperMap::from_kraus(&[k0, k1], 0.5);
        let kraus = to_kraus(&map).unwrap();
        assert_eq!(kraus.ops.len(), 2);
        assert!(max_abs_diff(&kraus.completeness(), &CMatrix::identity(2, 2)) < 1e-10);
        assert!(max_abs_diff(&kraus.to_supermap().matrix, &map.matrix) < 1e-12);
    }

    #[test]
    fn dephasing_weights_match_coherence_factor() {
        // Φ(ρ01) = c ρ01 splits into weights (1 ± c)/2 on I and σz
        for c in [1.0, 0.6, 0.0, -0.4] {
            let map = SuperMap::qubit_coherence(C64::new(c, 0.0), 1.0, 0.5, 0.0);
            let kraus = to_kraus(&map).unwrap();
            let mut w: Vec<f64> = kraus.ops.iter().map(|k| (k.adjoint() * k).trace().re / 2.0).collect();
            w.sort_by(f64::total_cmp);
            let mut expect: Vec<f64> = [(1.0 + c) / 2.0, (1.0 - c) / 2.0]
                .into_iter()
                .filter(|&x| x > KRAUS_CUTOFF)
                .collect();
            expect.sort_by(f64::total_cmp);
            assert_eq!(w.len(), expect.len());
            for (a, b) in w.iter().zip(&expect) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_cptp_maps_reconstruct() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            // Stinespring: random unitary on system ⊗ ancilla, ancilla in a random state
            let env = random_state(&mut rng, &SpinSpace::single());
            let u = crate::molecule::rotation(rng.random_range(0.0..6.0), rng.random_range(0.0..6.0))
                .kronecker(&crate::molecule::rotation(rng.random_range(0.0..6.0), 0.4));
            let mix = crate::qcore::hermitian_expm(
                &crate::qcore::Operator::new(
                    SpinSpace::anonymous(2).unwrap(),
                    crate::qcore::hermitian_part(&crate::qcore::testutil::random_matrix(&mut rng, 4)),
                )
                .unwrap(),
                1.0,
            )
            .unwrap();
            let total = mix.matrix() * u;
            let d = SpinSpace::anonymous(2).unwrap();
            let map_of = |rho: &CMatrix| -> CMatrix {
                let joint = rho.kronecker(env.matrix());
                let out = &total * joint * total.adjoint();
                crate::qcore::partial_trace_matrix(&out, d.n_sites(), &[0]).unwrap()
            };
            let mut m = CMatrix::zeros(4, 4);
            for col in 0..4 {
                let mut e = CMatrix::zeros(2, 2);
                e[(col / 2, col % 2)] = C64::new(1.0, 0.0);
                let out = map_of(&e);
                for row in 0..4 {
                    m[(row, col)] = out[(row / 2, row % 2)];
                }
            }
            let map = SuperMap { matrix: m, t: 0.0 };
            assert!(map.min_choi_eigenvalue() > -1e-12);
            let kraus = to_kraus(&map).unwrap();
            assert!(max_abs_diff(&kraus.completeness(), &CMatrix::identity(2, 2)) < 1e-10);
            assert!(max_abs_diff(&kraus.to_supermap().matrix, &map.matrix) < 1e-10);
        }
    }

    #[test]
    fn transpose_is_not_cp() {
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = C64::new(1.0, 0.0);
        m[(3, 3)] = C64::new(1.0, 0.0);
        m[(1, 2)] = C64::new(1.0, 0.0);
        m[(2, 1)] = C64::new(1.0, 0.0);
        let map = SuperMap { matrix: m, t: 0.0 };
        assert!(matches!(to_kraus(&map), Err(ChannelError::NotCompletelyPositive { .. })));
        assert!((map.min_choi_eigenvalue() + 1.0).abs() < 1e-12);
    }
}
