//! End-to-end acceptance criteria. Each test prints one PASS/FAIL line to
//! stderr (bypassing libtest capture) and then asserts the criterion.

use std::f64::consts::TAU;
use std::io::Write as _;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinbath::channels::{
    blp_measure, fibonacci_pairs, standard_inputs, to_kraus, tomograph, verdict, BlpOptions, DivisibilityOutcome,
    SuperMap, DEFAULT_DIRECTIONS, DIVISIBILITY_TOL,
};
use spinbath::dynamics::{
    collapse_time, count_revivals, detect_revivals, evolve_factorized, evolve_lindblad, evolve_unitary,
    evolve_unitary_reduced, first_revival_amplitude, largest_revival_after_collapse, lightcone, otoc, FactorizedModel,
    FidRecord, LightconeSpec, LindbladOptions, LindbladTerm, TimeGrid, LIGHTCONE_EPS,
};
use spinbath::molecule::{hamiltonian_lab, hamiltonian_weak, CouplingTable, Molecule, SpinSite};
use spinbath::qcore::{embed, max_abs_diff, partial_trace, CMatrix, DensityMatrix, Operator, SpinSpace, C64};
use spinbath::xcli::{compare_texts, execute, list_scenarios, scenario_get, OutputKind, RunOptions};

fn report(id: u32, name: &str, ok: bool, detail: &str, elapsed: Duration, budget_s: f64) {
    let within = elapsed.as_secs_f64() < budget_s;
    let verdict = if ok && within { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr(),
        "criterion {id} [{name}]: {verdict} | {detail} | runtime {:.3} s (budget {budget_s} s)",
        elapsed.as_secs_f64()
    );
    assert!(ok, "criterion {id} failed: {detail}");
    assert!(within, "criterion {id} exceeded its runtime budget: {:.3} s", elapsed.as_secs_f64());
}

fn outputs(list: &str) -> RunOptions {
    RunOptions {
        outputs: Some(OutputKind::parse_list(list).unwrap()),
        ..RunOptions::default()
    }
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> CMatrix {
    let a = DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    (&a + a.adjoint()) * C64::new(0.5 * scale, 0.0)
}

fn random_state(rng: &mut ChaCha8Rng, space: &SpinSpace) -> DensityMatrix {
    let a = DMatrix::from_fn(space.dim(), space.dim(), |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let mut m = &a * a.adjoint();
    let tr = m.trace();
    m /= tr;
    DensityMatrix::new(space.clone(), m).unwrap()
}

fn random_qubit(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let r: f64 = rng.random_range(0.0..1.0);
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..TAU);
    let s = (1.0 - z * z).sqrt();
    DensityMatrix::from_bloch([r * s * phi.cos(), r * s * phi.sin(), r * z]).unwrap()
}

fn sorted_eigenvalues(rho: &DensityMatrix) -> Vec<f64> {
    let mut e = rho.eigenvalues();
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn criterion_1_chloroform_fid_and_doublet() {
    let start = Instant::now();
    let art = execute(&scenario_get("chloroform").unwrap(), &outputs("fid,spectrum")).unwrap();
    let elapsed = start.elapsed();
    let j = TAU * 215.0;
    let rec = art.fid.as_ref().unwrap();
    let t_end = rec.times().last().copied().unwrap();
    let max_err = rec
        .times()
        .iter()
        .zip(&rec.s)
        .map(|(t, s)| (s - C64::new((j * t / 2.0).cos(), 0.0)).norm())
        .fold(0.0, f64::max);
    let spec = art.spectrum.as_ref().unwrap();
    let peak_in = |positive: bool| {
        spec.freq_hz
            .iter()
            .zip(&spec.values)
            .filter(|(f, _)| if positive { **f > 0.0 } else { **f < 0.0 })
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(f, _)| *f)
            .unwrap()
    };
    let (hi, lo) = (peak_in(true), peak_in(false));
    let bin = spec.bin_width();
    let ok = max_err < 1e-9
        && (t_end - 0.05).abs() < 1e-12
        && (hi - 107.5).abs() <= 0.5 * bin
        && (lo + 107.5).abs() <= 0.5 * bin;
    report(
        1,
        "chloroform FID",
        ok,
        &format!("max|S - cos(Jt/2)| = {max_err:.2e}, peaks at {hi:.2} / {lo:.2} Hz, bin {bin:.2} Hz"),
        elapsed,
        1.0,
    );
}

#[test]
fn criterion_2_tms_revivals() {
    let start = Instant::now();
    let j = TAU * 6.6;
    let grid = TimeGrid::new(0.0, 1.6, 16000).unwrap();
    let rec = evolve_factorized(&FactorizedModel::uniform(12, j, 0.0), &grid).unwrap();
    let elapsed = start.elapsed();
    let max_err = rec
        .times()
        .iter()
        .zip(&rec.s)
        .map(|(t, s)| (s - C64::new((j * t / 2.0).cos().powi(12), 0.0)).norm())
        .fold(0.0, f64::max);
    let revivals = count_revivals(&rec);
    report(
        2,
        "TMS revivals",
        max_err < 1e-12 && revivals >= 10,
        &format!("max|S - cos^12| = {max_err:.2e}, revivals in [0, 1.6 s] = {revivals}"),
        elapsed,
        1.0,
    );
}

fn coherence_maps(rec: &FidRecord) -> Vec<SuperMap> {
    rec.times()
        .into_iter()
        .zip(&rec.s)
        .map(|(t, &f)| SuperMap::qubit_coherence(f, 1.0, 0.5, t))
        .collect()
}

#[test]
fn criterion_3_crossover() {
    let start = Instant::now();
    let j = TAU * 6.6;
    let grid = TimeGrid::new(0.0, 1.6, 16000).unwrap();
    let rates = [0.0, 1.0 / 0.140, 1.0 / 0.070];
    let pairs = fibonacci_pairs(DEFAULT_DIRECTIONS);
    let mut amps = Vec::new();
    let mut ns = Vec::new();
    for r in rates {
        let rec = evolve_factorized(&FactorizedModel::uniform(12, j, r), &grid).unwrap();
        amps.push(first_revival_amplitude(&rec).unwrap_or(0.0));
        ns.push(blp_measure(&coherence_maps(&rec), &pairs, BlpOptions::default()).unwrap().n);
    }
    let elapsed = start.elapsed();
    let ok = amps[0] > amps[1]
        && amps[1] > amps[2]
        && amps[2] < 0.05
        && ns[0] >= ns[1]
        && ns[1] >= ns[2]
        && ns[0] >= 0.9
        && ns[2] < 1e-3;
    report(
        3,
        "Markovian crossover",
        ok,
        &format!("first revival {amps:.3?}, BLP N {ns:.3?}"),
        elapsed,
        30.0,
    );
}

fn single_qubit_lindblad_maps(h: &Operator, terms: &[LindbladTerm], grid: &TimeGrid) -> Vec<SuperMap> {
    let inputs = standard_inputs();
    let trajs: Vec<_> = inputs
        .iter()
        .map(|rho| evolve_lindblad(rho, h, terms, grid, &LindbladOptions::default()).unwrap().trajectory)
        .collect();
    tomograph(&inputs, &trajs).unwrap()
}

#[test]
fn criterion_4_divisibility_and_backflow() {
    let start = Instant::now();
    let art = execute(&scenario_get("chloroform").unwrap(), &outputs("fid,channel")).unwrap();
    let rec = art.fid.as_ref().unwrap();
    let maps = art.maps.as_ref().unwrap();
    let abs = rec.abs();
    let mut increasing = 0;
    let mut violations = Vec::new();
    for k in 0..maps.len() - 1 {
        if abs[k + 1] > abs[k] {
            increasing += 1;
            match verdict(&maps[k + 1], &maps[k]).unwrap() {
                DivisibilityOutcome::Defined(v) if v.min_choi_eig < -DIVISIBILITY_TOL => {}
                other => violations.push((maps[k].t, maps[k + 1].t, format!("{other:?}"))),
            }
        }
    }

    let space = SpinSpace::single();
    let grid = TimeGrid::new(0.0, 2.0, 200).unwrap();
    let cases = [(0.0, 0.3, 0.0), (2.0, 0.7, 0.25), (5.0, 0.1, 1.5)];
    let mut worst_cp = f64::INFINITY;
    let mut worst_n: f64 = 0.0;
    for (omega, gamma_z, gamma_minus) in cases {
        let h = Operator::pauli_z().scale_real(omega / 2.0);
        let mut terms = vec![LindbladTerm::fixed(Operator::pauli_z(), gamma_z)];
        if gamma_minus > 0.0 {
            terms.push(LindbladTerm::fixed(Operator::sigma_minus(), gamma_minus));
        }
        let h = h.relabel(space.clone()).unwrap();
        let lmaps = single_qubit_lindblad_maps(&h, &terms, &grid);
        for s in (0..lmaps.len()).step_by(10) {
            for t in (s + 1..lmaps.len()).step_by(7) {
                if let DivisibilityOutcome::Defined(v) = verdict(&lmaps[t], &lmaps[s]).unwrap() {
                    worst_cp = worst_cp.min(v.min_choi_eig);
                }
            }
        }
        let n = blp_measure(&lmaps, &fibonacci_pairs(DEFAULT_DIRECTIONS), BlpOptions::default()).unwrap().n;
        worst_n = worst_n.max(n);
    }
    let elapsed = start.elapsed();
    let ok = increasing > 0 && violations.is_empty() && worst_cp >= -DIVISIBILITY_TOL && worst_n <= 1e-6;
    report(
        4,
        "divisibility vs backflow",
        ok,
        &format!(
            "{increasing} increasing intervals, {} without non-CP verdict {:?}; Lindblad min Choi eig {worst_cp:.2e}, max N {worst_n:.2e}",
            violations.len(),
            violations.first()
        ),
        elapsed,
        30.0,
    );
}

#[test]
fn criterion_5_engine_cross_validation() {
    let start = Instant::now();
    let lind = execute(&scenario_get("chloroform-reset").unwrap(), &outputs("fid")).unwrap();
    let mc = execute(&scenario_get("chloroform-reset-mc").unwrap(), &outputs("fid")).unwrap();
    let elapsed = start.elapsed();
    let (a, b) = (lind.fid.unwrap(), mc.fid.unwrap());
    let report_cmp = compare_texts(&a.to_csv(), &b.to_csv(), 1.5e-2, ("lindblad", "reset-mc")).unwrap();
    let ok = mc.config.n_traj == 100_000 && a.s.len() == 500 && report_cmp.passed();
    let dev: Vec<String> = report_cmp
        .columns
        .iter()
        .map(|c| format!("{} {:.2e}", c.column, c.max_abs))
        .collect();
    report(
        5,
        "reset-mc vs lindblad",
        ok,
        &format!("n_traj {}, {} points, max deviations: {}", mc.config.n_traj, a.s.len(), dev.join(", ")),
        elapsed,
        60.0,
    );
}

#[test]
fn criterion_6_conservation_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut trace_drift, mut herm, mut spec_err, mut kraus_err, mut tomo_err) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let grid = TimeGrid::new(0.0, 1.0, 8).unwrap();
    for i in 0..1000 {
        let n = 1 + i % 4;
        let space = SpinSpace::anonymous(n).unwrap();
        let h = Operator::new(space.clone(), random_hermitian(&mut rng, space.dim(), 2.0)).unwrap();
        let rho0 = random_state(&mut rng, &space);

        let jump = Operator::new(space.clone(), random_hermitian(&mut rng, space.dim(), 1.0) + random_hermitian(&mut rng, space.dim(), 1.0) * C64::new(0.0, 1.0)).unwrap();
        let terms = [
            LindbladTerm::fixed(jump, rng.random_range(0.0..0.5)),
            LindbladTerm::fixed(embed(&Operator::sigma_minus(), i % n, &space).unwrap(), rng.random_range(0.0..1.0)),
        ];
        let run = evolve_lindblad(&rho0, &h, &terms, &grid, &LindbladOptions::default()).unwrap();
        for s in &run.trajectory.states {
            trace_drift = trace_drift.max((s.trace() - C64::new(1.0, 0.0)).norm());
            herm = herm.max(s.hermiticity_deviation());
        }

        let unitary = evolve_unitary(&rho0, &h, &grid).unwrap();
        let e0 = sorted_eigenvalues(&rho0);
        for s in &unitary.states {
            let e = sorted_eigenvalues(s);
            spec_err = spec_err.max(e.iter().zip(&e0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
            herm = herm.max(s.hermiticity_deviation());
            trace_drift = trace_drift.max((s.trace() - C64::new(1.0, 0.0)).norm());
        }

        // reduced channel of site 0 with a random environment state
        let env = (n > 1).then(|| random_state(&mut rng, &SpinSpace::anonymous(n - 1).unwrap()));
        let joint = |q: &DensityMatrix| match &env {
            Some(e) => q.tensor(e).unwrap().relabel(space.clone()).unwrap(),
            None => q.clone().relabel(space.clone()).unwrap(),
        };
        let inputs = standard_inputs();
        let trajs: Vec<_> = inputs
            .iter()
            .map(|q| evolve_unitary_reduced(&joint(q), &h, &grid, &[0]).unwrap())
            .collect();
        let maps = tomograph(&inputs, &trajs).unwrap();
        for m in &maps {
            let k = to_kraus(m).unwrap();
            kraus_err = kraus_err.max(max_abs_diff(&k.completeness(), &CMatrix::identity(2, 2)));
        }
        let probe = random_qubit(&mut rng);
        let direct = evolve_unitary_reduced(&joint(&probe), &h, &grid, &[0]).unwrap();
        for (m, s) in maps.iter().zip(&direct.states) {
            let predicted = m.apply(&probe).unwrap();
            tomo_err = tomo_err.max(max_abs_diff(predicted.matrix(), s.matrix()));
        }
    }
    let elapsed = start.elapsed();
    let ok = trace_drift < 1e-8 && herm < 1e-10 && spec_err < 1e-9 && kraus_err < 1e-10 && tomo_err < 1e-7;
    report(
        6,
        "conservation suite",
        ok,
        &format!(
            "1000 instances: trace drift {trace_drift:.1e}, hermiticity {herm:.1e}, spectrum {spec_err:.1e}, Kraus {kraus_err:.1e}, tomography {tomo_err:.1e}"
        ),
        elapsed,
        120.0,
    );
}

fn random_molecule(rng: &mut ChaCha8Rng, n: usize) -> Molecule {
    let sites = (0..n)
        .map(|i| SpinSite::new(format!("s{i}"), "H1").with_omega0(rng.random_range(-50.0..50.0)))
        .collect();
    let mut c = CouplingTable::new();
    for j in 0..n {
        for k in j + 1..n {
            c.set(j, k, rng.random_range(-20.0..20.0));
        }
    }
    Molecule::new("random", sites, c, 0).unwrap()
}

#[test]
fn criterion_7_otoc_consistency() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let space = SpinSpace::anonymous(3).unwrap();
    let paulis = [Operator::pauli_x(), Operator::pauli_y(), Operator::pauli_z()];
    let mut max_gap: f64 = 0.0;
    for i in 0..100 {
        let h = Operator::new(space.clone(), random_hermitian(&mut rng, 8, 3.0)).unwrap();
        let (w, v) = if i % 2 == 0 {
            (
                embed(&paulis[rng.random_range(0..3)], rng.random_range(0..3), &space).unwrap(),
                embed(&paulis[rng.random_range(0..3)], rng.random_range(0..3), &space).unwrap(),
            )
        } else {
            (
                Operator::new(space.clone(), random_hermitian(&mut rng, 8, 1.0)).unwrap(),
                Operator::new(space.clone(), random_hermitian(&mut rng, 8, 1.0)).unwrap(),
            )
        };
        let state = (i % 3 == 0).then(|| random_state(&mut rng, &space));
        let tau = rng.random_range(0.0..2.0);
        let val = otoc(&h, &w, &v, tau, state.as_ref()).unwrap();
        max_gap = max_gap.max((val.f_direct - val.f_paths).norm());
    }
    let mut max_dev_conserved: f64 = 0.0;
    for _ in 0..20 {
        let m = random_molecule(&mut rng, 3);
        let h = hamiltonian_weak(&m).unwrap();
        let s = h.space().clone();
        let (a, b) = (rng.random_range(0..3), rng.random_range(0..3));
        let w = embed(&Operator::pauli_z(), a, &s).unwrap();
        let v = embed(&Operator::pauli_z(), b, &s).unwrap();
        for tau in [0.0, 0.13, 1.7, 25.0] {
            let f = otoc(&h, &w, &v, tau, None).unwrap().f_direct;
            max_dev_conserved = max_dev_conserved.max((f - C64::new(1.0, 0.0)).norm());
        }
    }
    let elapsed = start.elapsed();
    report(
        7,
        "OTOC consistency",
        max_gap < 1e-10 && max_dev_conserved < 1e-10,
        &format!("max |F_direct - F_paths| = {max_gap:.2e}, max |F - 1| for conserved pairs = {max_dev_conserved:.2e}"),
        elapsed,
        30.0,
    );
}

#[test]
fn criterion_8_lightcone() {
    let start = Instant::now();
    let art = execute(&scenario_get("chain-lightcone").unwrap(), &outputs("lightcone")).unwrap();
    let rows = art.lightcone.unwrap();
    let mut by_distance: Vec<(usize, f64)> = rows
        .iter()
        .map(|(_, r)| (r.distance, r.arrival.unwrap_or(f64::INFINITY)))
        .collect();
    by_distance.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let monotone = by_distance.len() == 6
        && by_distance.iter().all(|(_, t)| t.is_finite())
        && by_distance.windows(2).all(|w| w[0].1 <= w[1].1);

    let j = TAU * 10.0;
    let mut c = CouplingTable::new();
    c.set(0, 1, j);
    let pair = Molecule::new("pair", vec![SpinSite::new("a", "H1"), SpinSite::new("b", "H1")], c, 0).unwrap();
    let h = hamiltonian_lab(&pair).unwrap();
    let grid = TimeGrid::new(0.0, 0.05, 5000).unwrap();
    let spec = LightconeSpec {
        source_site: 0,
        source_op: Operator::pauli_x(),
        probe_op: Operator::pauli_x(),
        probes: vec![1],
        eps: LIGHTCONE_EPS,
    };
    let two = lightcone(&h, &[(0, 1)], &spec, &grid).unwrap();
    // isotropic pair: ‖[σx_a(t), σx_b]‖ = 2|sin(Jt)|
    let formula_err = grid
        .points()
        .iter()
        .zip(&two[0].norms)
        .map(|(t, v)| (v - 2.0 * (j * t).sin().abs()).abs())
        .fold(0.0, f64::max);
    let expect = (LIGHTCONE_EPS / 2.0).asin() / j;
    let got = two[0].arrival.unwrap_or(f64::INFINITY);
    let elapsed = start.elapsed();
    let ok = monotone && formula_err < 1e-10 && (got - expect).abs() <= grid.dt();
    report(
        8,
        "light cone",
        ok,
        &format!(
            "(distance, arrival) {by_distance:.4?}; two-site arrival {got:.3e} s vs {expect:.3e} s (dt {:.1e}), norm formula err {formula_err:.1e}",
            grid.dt()
        ),
        elapsed,
        30.0,
    );
}

#[test]
fn criterion_9_qualitative_revivals() {
    let start = Instant::now();
    let dss = execute(&scenario_get("dss-full").unwrap(), &outputs("fid")).unwrap().fid.unwrap();
    let collapse = collapse_time(&dss, 0.1);
    let revival = detect_revivals(&dss).into_iter().find(|r| (r.t - 0.3).abs() <= 0.1);
    let full = execute(&scenario_get("transcrotonic-full").unwrap(), &outputs("fid")).unwrap().fid.unwrap();
    let dec = execute(&scenario_get("transcrotonic-decoupled").unwrap(), &outputs("fid")).unwrap().fid.unwrap();
    let (a_full, a_dec) = (largest_revival_after_collapse(&full), largest_revival_after_collapse(&dec));
    let elapsed = start.elapsed();
    let ok = collapse.is_some_and(|t| t <= 0.1)
        && revival.is_some()
        && matches!((a_full, a_dec), (Some(f), Some(d)) if f < d);
    report(
        9,
        "qualitative revivals",
        ok,
        &format!(
            "dss collapse below 0.1 at {collapse:?} s, revival {revival:?}; transcrotonic largest post-collapse revival full {a_full:.3?} vs decoupled {a_dec:.3?}"
        ),
        elapsed,
        120.0,
    );
}

#[test]
fn built_in_scenarios_meet_budgets() {
    let start = Instant::now();
    let mut over = Vec::new();
    for info in list_scenarios() {
        let cfg = scenario_get(&info.name).unwrap();
        let t = Instant::now();
        let art = execute(&cfg, &RunOptions::default()).unwrap();
        let e = t.elapsed().as_secs_f64();
        if e > info.budget_s || info.budget_s > 120.0 {
            over.push(format!("{} {e:.2} s > {} s", info.name, info.budget_s));
        }
        assert!(art.fid.is_some() || art.otoc.is_some());
    }
    report(
        0,
        "scenario budgets",
        over.is_empty(),
        &format!("{} scenarios, over budget: {over:?}", list_scenarios().len()),
        start.elapsed(),
        300.0,
    );
}

#[test]
fn decoupled_dss_matches_ideal_isolation() {
    let start = Instant::now();
    let rec = execute(&scenario_get("dss-decoupled").unwrap(), &outputs("fid")).unwrap().fid.unwrap();
    let mut oracle = String::from("t_s,re_s,im_s\n");
    for t in rec.times() {
        oracle.push_str(&format!("{t:.16e},1,0\n"));
    }
    let r = compare_texts(&rec.to_csv(), &oracle, 1e-9, ("dss-decoupled", "constant")).unwrap();
    report(
        0,
        "decoupled DSS vs constant 1",
        r.passed(),
        &format!("max deviation {:.2e}", r.max_deviation()),
        start.elapsed(),
        5.0,
    );
}

#[test]
fn reduced_state_partial_trace_consistency() {
    // the dense path must agree with an explicit partial trace of the full evolution
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let space = SpinSpace::anonymous(3).unwrap();
    let h = Operator::new(space.clone(), random_hermitian(&mut rng, 8, 2.0)).unwrap();
    let rho = random_state(&mut rng, &space);
    let grid = TimeGrid::new(0.0, 1.0, 10).unwrap();
    let full = evolve_unitary(&rho, &h, &grid).unwrap();
    let reduced = evolve_unitary_reduced(&rho, &h, &grid, &[1]).unwrap();
    for (f, r) in full.states.iter().zip(&reduced.states) {
        assert!(max_abs_diff(partial_trace(f, &[1]).unwrap().matrix(), r.matrix()) < 1e-10);
    }
}
