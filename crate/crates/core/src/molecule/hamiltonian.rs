use super::{Molecule, Result};
use crate::qcore::{CMatrix, Operator, C64};

/// `Σ ω₀ σ_z/2 + Σ_{j<k} J (σ_j·σ_k)/4` over the active sites.
pub fn hamiltonian_lab(m: &Molecule) -> Result<Operator> {
    let space = m.active_space()?;
    let dim = space.dim();
    let mut mat = CMatrix::zeros(dim, dim);
    let omegas: Vec<f64> = m.active_sites().iter().map(|&i| m.sites()[i].omega0).collect();
    let couplings = m.active_couplings();
    for idx in 0..dim {
        let z = |site: usize| if idx & space.bit(site) == 0 { 1.0 } else { -1.0 };
        let mut diag = 0.0;
        for (site, w) in omegas.iter().enumerate() {
            diag += 0.5 * w * z(site);
        }
        for &(j, k, c) in &couplings {
            diag += 0.25 * c * z(j) * z(k);
            // σxσx + σyσy = 2(σ+σ- + σ-σ+): flip-flop between anti-aligned pairs
            if z(j) != z(k) {
                let partner = idx ^ space.bit(j) ^ space.bit(k);
                mat[(idx, partner)] += C64::new(0.5 * c, 0.0);
            }
        }
        mat[(idx, idx)] = C64::new(diag, 0.0);
    }
    Ok(Operator::new(space, mat)?)
}

/// `Σ_{j<k} J σ_z,j σ_z,k / 4` over the active sites, diagonal by construction.
pub fn hamiltonian_weak(m: &Molecule) -> Result<Operator> {
    let space = m.active_space()?;
    let dim = space.dim();
    let couplings = m.active_couplings();
    let mut mat = CMatrix::zeros(dim, dim);
    for idx in 0..dim {
        let z = |site: usize| if idx & space.bit(site) == 0 { 1.0 } else { -1.0 };
        let e: f64 = couplings.iter().map(|&(j, k, c)| 0.25 * c * z(j) * z(k)).sum();
        mat[(idx, idx)] = C64::new(e, 0.0);
    }
    Ok(Operator::new(space, mat)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molecule::testutil::random_molecule;
    use crate::molecule::{registry_get, CouplingTable, SpinSite};
    use crate::qcore::{embed, max_abs_diff, tensor_product, SpinSpace};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn pair(j: f64, w0: f64, w1: f64) -> Molecule {
        let mut c = CouplingTable::new();
        c.set(0, 1, j);
        Molecule::new(
            "pair",
            vec![
                SpinSite::new("a", "H1").with_omega0(w0),
                SpinSite::new("b", "H1").with_omega0(w1),
            ],
            c,
            0,
        )
        .unwrap()
    }

    #[test]
    fn single_site_lab() {
        let m = Molecule::new(
            "one",
            vec![SpinSite::new("a", "H1").with_omega0(2.0 * PI)],
            CouplingTable::new(),
            0,
        )
        .unwrap();
        let h = hamiltonian_lab(&m).unwrap();
        let expect = Operator::pauli_z().scale_real(PI);
        assert!(max_abs_diff(h.matrix(), expect.matrix()) < 1e-15);
    }

    #[test]
    fn heisenberg_pair_equals_dot_product() {
        let h = hamiltonian_lab(&pair(4.0, 0.0, 0.0)).unwrap();
        let mut dot = CMatrix::zeros(4, 4);
        for p in [Operator::pauli_x(), Operator::pauli_y(), Operator::pauli_z()] {
            dot += tensor_product(&p, &p).unwrap().matrix();
        }
        assert!(max_abs_diff(h.matrix(), &dot) < 1e-15);
    }

    #[test]
    fn triplet_singlet_spectrum() {
        // brute-force oracle: diagonalise J(σ·σ)/4 built from explicit Kronecker products
        let j = 2.7;
        let mut dot = CMatrix::zeros(4, 4);
        for p in [Operator::pauli_x(), Operator::pauli_y(), Operator::pauli_z()] {
            dot += tensor_product(&p, &p).unwrap().matrix();
        }
        let mut oracle: Vec<f64> = (dot * C64::new(j / 4.0, 0.0))
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        oracle.sort_by(f64::total_cmp);
        let mut got: Vec<f64> = hamiltonian_lab(&pair(j, 0.0, 0.0))
            .unwrap()
            .matrix()
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        got.sort_by(f64::total_cmp);
        for (g, o) in got.iter().zip(&oracle) {
            assert!((g - o).abs() < 1e-12);
        }
        assert!((got[0] + 0.75 * j).abs() < 1e-12);
        for g in &got[1..] {
            assert!((g - 0.25 * j).abs() < 1e-12);
        }
    }

    #[test]
    fn chloroform_weak_hamiltonian() {
        let m = registry_get("chloroform").unwrap();
        let h = hamiltonian_weak(&m).unwrap();
        let j = 2.0 * PI * 215.0;
        let expect = [j / 4.0, -j / 4.0, -j / 4.0, j / 4.0];
        for (i, e) in expect.iter().enumerate() {
            assert!((h.matrix()[(i, i)].re - e).abs() < 1e-12);
        }
        assert!(h.is_diagonal());
    }

    #[test]
    fn decoupled_tms_has_zero_hamiltonian() {
        let mut m = registry_get("tms").unwrap();
        m.decouple_selector("H1").unwrap();
        let h = hamiltonian_weak(&m).unwrap();
        assert_eq!(h.space().n_sites(), 1);
        assert_eq!(h.max_abs(), 0.0);
    }

    #[test]
    fn uncoupled_molecule_has_zero_weak_hamiltonian() {
        let m = Molecule::new(
            "free",
            vec![SpinSite::new("a", "H1").with_omega0(3.0), SpinSite::new("b", "C13")],
            CouplingTable::new(),
            0,
        )
        .unwrap();
        assert_eq!(hamiltonian_weak(&m).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn builders_are_exactly_hermitian_and_weak_is_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=5 {
            let m = random_molecule(&mut rng, n);
            let lab = hamiltonian_lab(&m).unwrap();
            let weak = hamiltonian_weak(&m).unwrap();
            assert_eq!(lab.hermiticity_deviation(), 0.0);
            assert_eq!(weak.hermiticity_deviation(), 0.0);
            assert!(weak.is_diagonal());
            let space = weak.space().clone();
            for site in 0..n {
                let z = embed(&Operator::pauli_z(), site, &space).unwrap();
                assert_eq!(weak.commutator(&z).max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn lab_equals_weak_plus_zeeman_when_flip_flops_vanish() {
        // anti-aligned flip-flop terms are the only off-diagonal entries
        let m = pair(3.0, 10.0, -4.0);
        let lab = hamiltonian_lab(&m).unwrap();
        let weak = hamiltonian_weak(&m).unwrap();
        let space = SpinSpace::new(["a", "b"]).unwrap();
        let zeeman = &embed(&Operator::pauli_z(), 0, &space).unwrap().scale_real(5.0)
            + &embed(&Operator::pauli_z(), 1, &space).unwrap().scale_real(-2.0);
        let diff = &lab - &(&weak + &zeeman.relabel(weak.space().clone()).unwrap());
        for i in 0..4 {
            assert_eq!(diff.matrix()[(i, i)].norm(), 0.0);
        }
        assert!((diff.matrix()[(1, 2)].re - 1.5).abs() < 1e-15);
    }

    #[test]
    fn decoupling_equals_site_removal() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..20 {
            let n = 2 + trial % 4;
            let m = random_molecule(&mut rng, n);
            let drop = 1 + trial % (n - 1);
            let mut decoupled = m.clone();
            decoupled.decouple(drop).unwrap();
            let keep: Vec<usize> = (0..n).filter(|&i| i != drop).collect();
            let sites = keep.iter().map(|&i| m.sites()[i].clone()).collect();
            let mut couplings = CouplingTable::new();
            for (a, &j) in keep.iter().enumerate() {
                for (b, &k) in keep.iter().enumerate() {
                    if a < b {
                        couplings.set(a, b, m.couplings().get(j, k));
                    }
                }
            }
            let removed = Molecule::new("removed", sites, couplings, 0).unwrap();
            for build in [hamiltonian_lab, hamiltonian_weak] {
                let a = build(&decoupled).unwrap();
                let b = build(&removed).unwrap();
                assert_eq!(a.matrix(), b.matrix());
                assert_eq!(a.space(), b.space());
            }
        }
    }

    #[test]
    fn capacity_exceeded() {
        let sites = (0..14).map(|i| SpinSite::new(format!("h{i}"), "H1")).collect();
        let m = Molecule::new("big", sites, CouplingTable::new(), 0).unwrap();
        assert!(hamiltonian_weak(&m).is_err());
        assert!(hamiltonian_lab(&m).is_err());
    }
}
