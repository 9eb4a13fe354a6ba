use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Engine, HamiltonianKind, OutputKind, Pauli, ScenarioConfig, ScenarioError, SiteOp};
use crate::channels::{
    blp_csv, blp_measure, blp_summary_json, channel_json, exhaustive_pairs, fibonacci_pairs, standard_inputs,
    tomograph, BlpOptions, BlpReport, SuperMap,
};
use crate::dynamics::{
    evolve_factorized, evolve_lindblad, evolve_reset_mc, evolve_unitary_reduced, fid, lightcone, otoc, reset_terms,
    spectrum, FactorizedModel, FidMeta, FidRecord, LightconeRow, LightconeSpec, LindbladOptions, OtocValue,
    ResetModel, Spectrum, Trajectory, ZzPolicy,
};
use crate::molecule::{apply_pulse, hamiltonian_lab, hamiltonian_weak, registry_get, thermal_state, Molecule, PulseSpec};
use crate::qcore::{embed, partial_trace, DensityMatrix, Operator};

/// Active-site caps per dense engine.
pub const UNITARY_MAX_SITES: usize = 10;
pub const LINDBLAD_MAX_SITES: usize = 6;
pub const MC_MAX_SITES: usize = 10;
/// Cap for OTOC and light-cone outputs, which need full propagators.
pub const DENSE_OBSERVABLE_SITES: usize = 8;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub outputs: Option<Vec<OutputKind>>,
    pub seed: Option<u64>,
    pub n_traj: Option<usize>,
}

#[derive(Clone, Copy, Debug)]
pub struct OtocRow {
    pub tau: f64,
    pub value: OtocValue,
}

/// In-memory results of one scenario execution.
#[derive(Clone, Debug)]
pub struct RunArtifacts {
    /// Effective configuration with command-line overrides applied.
    pub config: ScenarioConfig,
    /// Molecule after decoupling, reset and polarization overrides.
    pub molecule: Molecule,
    pub fid: Option<FidRecord>,
    /// Monte Carlo standard error of `S(t)`.
    pub fid_stderr: Option<Vec<f64>>,
    pub spectrum: Option<Spectrum>,
    pub maps: Option<Vec<SuperMap>>,
    pub blp: Option<BlpReport>,
    pub otoc: Option<Vec<OtocRow>>,
    /// Probe labels alongside their rows.
    pub lightcone: Option<Vec<(String, LightconeRow)>>,
    pub notes: Vec<String>,
    pub elapsed_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario: String,
    pub molecule: String,
    pub engine: String,
    pub code_version: String,
    pub seed: u64,
    pub n_traj: usize,
    pub outputs: Vec<String>,
    pub config_text: String,
    pub started_unix_s: f64,
    pub finished_unix_s: f64,
    pub elapsed_s: f64,
    pub budget_s: f64,
    pub qualitative: bool,
    pub notes: Vec<String>,
    pub files: Vec<OutputFile>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

impl RunManifest {
    pub fn read(dir: &Path) -> Result<Self, ScenarioError> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| ScenarioError::Compare(format!("{}: {e}", path.display())))
    }

    /// Files whose digest no longer matches, or that are missing.
    pub fn verify(&self, dir: &Path) -> Vec<String> {
        self.files
            .iter()
            .filter(|f| match std::fs::read(dir.join(&f.file)) {
                Ok(bytes) => sha256_hex(&bytes) != f.sha256,
                Err(_) => true,
            })
            .map(|f| f.file.clone())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub artifacts: RunArtifacts,
    pub manifest: RunManifest,
    pub outdir: PathBuf,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

fn incompatible(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Incompatible(msg.into())
}

fn prepare_molecule(cfg: &ScenarioConfig) -> Result<Molecule, ScenarioError> {
    let mut m = registry_get(&cfg.molecule)?;
    for sel in &cfg.decouple {
        m.decouple_selector(sel)?;
    }
    for r in &cfg.resets {
        for site in m.select(&r.selector)? {
            m.set_reset_rate(site, r.rate)?;
        }
    }
    for (sel, eps) in &cfg.polarization {
        for site in m.select(sel)? {
            m.set_polarization(site, *eps)?;
        }
    }
    Ok(m)
}

/// Labels of the active sites addressed by a pulse.
fn pulse_labels(m: &Molecule, pulse: &PulseSpec) -> Result<Vec<usize>, ScenarioError> {
    let mut sites = Vec::new();
    for sel in &pulse.targets {
        for site in m.select(sel)? {
            if m.is_decoupled(site) {
                return Err(crate::molecule::MoleculeError::PulseTarget(m.sites()[site].label.clone()).into());
            }
            if !sites.contains(&site) {
                sites.push(site);
            }
        }
    }
    Ok(sites)
}

fn check_compatibility(cfg: &ScenarioConfig, m: &Molecule, outputs: &[OutputKind]) -> Result<(), ScenarioError> {
    let n = m.active_sites().len();
    let cap = match cfg.engine {
        Engine::Unitary => Some(UNITARY_MAX_SITES),
        Engine::Lindblad => Some(LINDBLAD_MAX_SITES),
        Engine::ResetMc => Some(MC_MAX_SITES),
        Engine::Factorized => None,
    };
    if let Some(cap) = cap {
        if n > cap {
            return Err(incompatible(format!(
                "engine {} handles at most {cap} active sites, molecule {} has {n}",
                cfg.engine.name(),
                m.name()
            )));
        }
    }
    let weak_engine = matches!(cfg.engine, Engine::ResetMc | Engine::Factorized);
    if weak_engine && cfg.hamiltonian != HamiltonianKind::Weak {
        return Err(incompatible(format!(
            "engine {} requires the weak-coupling zz Hamiltonian",
            cfg.engine.name()
        )));
    }
    if cfg.hamiltonian == HamiltonianKind::Weak {
        if let Some(w) = m.weak_coupling_warnings().first() {
            return Err(incompatible(format!(
                "weak-coupling form invalid for {}-{}: |Δω| = {:.3e} rad/s is not large against J = {:.3e} rad/s",
                w.a, w.b, w.delta_omega, w.coupling
            )));
        }
    }
    if cfg.engine == Engine::Factorized {
        for p in &cfg.pulses {
            if pulse_labels(m, p)?.iter().any(|&s| s != m.system_site()) {
                return Err(incompatible("engine factorized only supports pulses on the observed site"));
            }
        }
    }
    let wants_channel = outputs.iter().any(|o| matches!(o, OutputKind::Channel | OutputKind::Blp));
    if wants_channel && cfg.engine == Engine::ResetMc {
        return Err(incompatible(
            "channel and blp outputs need the unitary, lindblad or factorized engine",
        ));
    }
    let wants_dense = outputs.iter().any(|o| matches!(o, OutputKind::Otoc | OutputKind::Lightcone));
    if wants_dense && n > DENSE_OBSERVABLE_SITES {
        return Err(incompatible(format!(
            "otoc and lightcone outputs handle at most {DENSE_OBSERVABLE_SITES} active sites, molecule has {n}"
        )));
    }
    Ok(())
}

fn hamiltonian(cfg: &ScenarioConfig, m: &Molecule) -> Result<Operator, ScenarioError> {
    Ok(match cfg.hamiltonian {
        HamiltonianKind::Weak => hamiltonian_weak(m)?,
        HamiltonianKind::Lab => hamiltonian_lab(m)?,
    })
}

fn prepared_state(cfg: &ScenarioConfig, m: &Molecule) -> Result<DensityMatrix, ScenarioError> {
    let mut rho = thermal_state(m)?;
    for p in &cfg.pulses {
        let labels = pulse_labels(m, p)?
            .into_iter()
            .map(|s| m.sites()[s].label.clone())
            .collect();
        rho = apply_pulse(&rho, &PulseSpec::new(p.beta(), p.phi(), labels))?;
    }
    Ok(rho)
}

fn lindblad_terms(m: &Molecule, space: &crate::qcore::SpinSpace) -> Result<Vec<crate::dynamics::LindbladTerm>, ScenarioError> {
    let mut terms = Vec::new();
    for (idx, &site) in m.active_sites().iter().enumerate() {
        let rate = m.sites()[site].reset_rate;
        if rate > 0.0 {
            terms.extend(reset_terms(space, idx, rate, 0.5 * (1.0 + m.polarization(site)))?);
        }
    }
    Ok(terms)
}

/// Reduced trajectory of the observed site from a full initial state.
fn evolve_dense(
    cfg: &ScenarioConfig,
    m: &Molecule,
    h: &Operator,
    rho: &DensityMatrix,
) -> Result<Trajectory, ScenarioError> {
    let sys = m.system_active_index();
    match cfg.engine {
        Engine::Unitary => Ok(evolve_unitary_reduced(rho, h, &cfg.grid, &[sys])?),
        Engine::Lindblad => {
            let terms = lindblad_terms(m, h.space())?;
            let run = evolve_lindblad(rho, h, &terms, &cfg.grid, &LindbladOptions::default())?;
            let states = run
                .trajectory
                .states
                .iter()
                .map(|s| partial_trace(s, &[sys]))
                .collect::<Result<_, _>>()?;
            Ok(Trajectory {
                grid: cfg.grid,
                states,
            })
        }
        Engine::ResetMc | Engine::Factorized => unreachable!("dense path only"),
    }
}

fn factorized_model(cfg: &ScenarioConfig, m: &Molecule) -> Result<FactorizedModel, ScenarioError> {
    let mut model = FactorizedModel::from_molecule(m, ZzPolicy::IgnoreZz)?;
    let mut state = DensityMatrix::from_bloch([0.0, 0.0, m.polarization(m.system_site())])?;
    for p in &cfg.pulses {
        state = state.apply_site_unitary(0, &p.rotation())?;
    }
    model.initial_bloch = state.bloch().expect("single site");
    Ok(model)
}

fn dense_channel(
    cfg: &ScenarioConfig,
    m: &Molecule,
    h: &Operator,
    rho: &DensityMatrix,
) -> Result<Vec<SuperMap>, ScenarioError> {
    let sys = m.system_active_index();
    let n = h.space().n_sites();
    let label = h.space().labels()[sys].clone();
    let inputs = standard_inputs();
    let mut trajs = Vec::with_capacity(inputs.len());
    for input in &inputs {
        let joint = if n == 1 {
            input.clone().relabel(h.space().clone())?
        } else {
            let env_sites: Vec<usize> = (0..n).filter(|&s| s != sys).collect();
            let env = partial_trace(rho, &env_sites)?;
            env.insert_site(sys, input, &label)?.relabel(h.space().clone())?
        };
        trajs.push(evolve_dense(cfg, m, h, &joint)?);
    }
    Ok(tomograph(&inputs, &trajs)?)
}

fn factorized_channel(cfg: &ScenarioConfig, model: &FactorizedModel) -> Result<Vec<SuperMap>, ScenarioError> {
    let mut unit = model.clone();
    unit.initial_bloch = [1.0, 0.0, 0.0];
    let rec = evolve_factorized(&unit, &cfg.grid)?;
    Ok(cfg
        .grid
        .points()
        .into_iter()
        .zip(&rec.s)
        .map(|(t, &f)| {
            let decay = (-model.system_reset_rate * (t - cfg.grid.t0())).exp();
            SuperMap::qubit_coherence(f, decay, model.system_reset_up, t)
        })
        .collect())
}

fn site_operator(m: &Molecule, h: &Operator, op: &SiteOp) -> Result<Operator, ScenarioError> {
    let site = m.site_index(&op.site)?;
    let idx = m
        .active_index(site)
        .ok_or_else(|| incompatible(format!("site {} is decoupled", op.site)))?;
    Ok(embed(&op.op.operator(), idx, h.space())?)
}

fn run_otoc(
    cfg: &ScenarioConfig,
    m: &Molecule,
    h: &Operator,
    rho: Option<&DensityMatrix>,
) -> Result<Vec<OtocRow>, ScenarioError> {
    let sys_label = m.sites()[m.system_site()].label.clone();
    let last = *m.active_sites().last().expect("system is active");
    let default = super::OtocConfig {
        w: SiteOp { op: Pauli::X, site: sys_label },
        v: SiteOp { op: Pauli::X, site: m.sites()[last].label.clone() },
        prepared_state: false,
    };
    let oc = cfg.otoc.as_ref().unwrap_or(&default);
    let w = site_operator(m, h, &oc.w)?;
    let v = site_operator(m, h, &oc.v)?;
    let state = if oc.prepared_state { rho } else { None };
    cfg.grid
        .points()
        .into_iter()
        .map(|t| {
            let tau = t - cfg.grid.t0();
            Ok(OtocRow {
                tau,
                value: otoc(h, &w, &v, tau, state)?,
            })
        })
        .collect()
}

fn run_lightcone(cfg: &ScenarioConfig, m: &Molecule, h: &Operator) -> Result<Vec<(String, LightconeRow)>, ScenarioError> {
    let sys_label = m.sites()[m.system_site()].label.clone();
    let default = super::LightconeConfig {
        source: SiteOp { op: Pauli::X, site: sys_label },
        probe_op: Pauli::X,
        probes: None,
        eps: crate::dynamics::LIGHTCONE_EPS,
    };
    let lc = cfg.lightcone.as_ref().unwrap_or(&default);
    let active_of = |label: &str| -> Result<usize, ScenarioError> {
        let site = m.site_index(label)?;
        m.active_index(site)
            .ok_or_else(|| incompatible(format!("site {label} is decoupled")))
    };
    let source_site = active_of(&lc.source.site)?;
    let probes = match &lc.probes {
        Some(labels) => labels.iter().map(|l| active_of(l)).collect::<Result<Vec<_>, _>>()?,
        None => (0..h.space().n_sites()).collect(),
    };
    let edges: Vec<(usize, usize)> = m.active_couplings().into_iter().map(|(a, b, _)| (a, b)).collect();
    let spec = LightconeSpec {
        source_site,
        source_op: lc.source.op.operator(),
        probe_op: lc.probe_op.operator(),
        probes,
        eps: lc.eps,
    };
    let rows = lightcone(h, &edges, &spec, &cfg.grid)?;
    Ok(rows
        .into_iter()
        .map(|r| (h.space().labels()[r.site].clone(), r))
        .collect())
}

/// Runs a scenario without touching the filesystem.
pub fn execute(config: &ScenarioConfig, opts: &RunOptions) -> Result<RunArtifacts, ScenarioError> {
    let start = Instant::now();
    let mut cfg = config.clone();
    if let Some(o) = &opts.outputs {
        cfg.outputs = o.clone();
    }
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    if let Some(n) = opts.n_traj {
        cfg.n_traj = n;
    }
    let outputs = cfg.outputs.clone();
    let wants = |k: OutputKind| outputs.contains(&k);
    let m = prepare_molecule(&cfg)?;
    check_compatibility(&cfg, &m, &outputs)?;

    let mut notes = Vec::new();
    if cfg.engine == Engine::Unitary {
        let relaxing: Vec<&str> = m
            .active_sites()
            .into_iter()
            .filter(|&s| m.sites()[s].reset_rate > 0.0)
            .map(|s| m.sites()[s].label.as_str())
            .collect();
        if !relaxing.is_empty() {
            notes.push(format!("unitary engine ignores reset rates of {}", relaxing.join(", ")));
        }
    }

    let needs_fid = outputs
        .iter()
        .any(|o| matches!(o, OutputKind::Fid | OutputKind::Spectrum));
    let needs_channel = wants(OutputKind::Channel) || wants(OutputKind::Blp);
    let needs_dense_h = cfg.engine != Engine::Factorized || wants(OutputKind::Otoc) || wants(OutputKind::Lightcone);

    let h = if needs_dense_h { Some(hamiltonian(&cfg, &m)?) } else { None };
    let rho = match (&h, cfg.engine) {
        (Some(_), Engine::Unitary | Engine::Lindblad | Engine::ResetMc) => Some(prepared_state(&cfg, &m)?),
        (Some(_), Engine::Factorized) if cfg.otoc.as_ref().is_some_and(|o| o.prepared_state) => {
            Some(prepared_state(&cfg, &m)?)
        }
        _ => None,
    };
    let model = if cfg.engine == Engine::Factorized {
        Some(factorized_model(&cfg, &m)?)
    } else {
        None
    };

    let mut fid_rec = None;
    let mut fid_stderr = None;
    if needs_fid {
        let mut rec = match cfg.engine {
            Engine::Unitary | Engine::Lindblad => {
                let (h, rho) = (h.as_ref().expect("dense"), rho.as_ref().expect("dense"));
                fid(&evolve_dense(&cfg, &m, h, rho)?)?
            }
            Engine::ResetMc => {
                let (h, rho) = (h.as_ref().expect("dense"), rho.as_ref().expect("dense"));
                let run = evolve_reset_mc(
                    rho,
                    h,
                    m.system_active_index(),
                    &ResetModel::from_molecule(&m),
                    &cfg.grid,
                    cfg.n_traj,
                    cfg.seed,
                )?;
                fid_stderr = Some(run.s_stderr.clone());
                fid(&run.trajectory)?
            }
            Engine::Factorized => evolve_factorized(model.as_ref().expect("factorized"), &cfg.grid)?,
        };
        rec.meta = FidMeta {
            scenario: Some(cfg.name.clone()),
            engine: cfg.engine.name().to_string(),
            seed: (cfg.engine == Engine::ResetMc).then_some(cfg.seed),
        };
        fid_rec = Some(rec);
    }
    let spectrum = if wants(OutputKind::Spectrum) {
        fid_rec.as_ref().map(spectrum)
    } else {
        None
    };

    let maps = if needs_channel {
        Some(match cfg.engine {
            Engine::Factorized => factorized_channel(&cfg, model.as_ref().expect("factorized"))?,
            _ => dense_channel(&cfg, &m, h.as_ref().expect("dense"), rho.as_ref().expect("dense"))?,
        })
    } else {
        None
    };
    let blp = match (&maps, wants(OutputKind::Blp)) {
        (Some(maps), true) => {
            let pairs = if cfg.blp.exhaustive {
                exhaustive_pairs(cfg.blp.exhaustive_directions)
            } else {
                fibonacci_pairs(cfg.blp.directions)
            };
            Some(blp_measure(
                maps,
                &pairs,
                BlpOptions {
                    refine: cfg.blp.refine,
                    check_grid: true,
                },
            )?)
        }
        _ => None,
    };
    let otoc_rows = if wants(OutputKind::Otoc) {
        Some(run_otoc(&cfg, &m, h.as_ref().expect("dense"), rho.as_ref())?)
    } else {
        None
    };
    let lightcone_rows = if wants(OutputKind::Lightcone) {
        Some(run_lightcone(&cfg, &m, h.as_ref().expect("dense"))?)
    } else {
        None
    };

    let elapsed_s = start.elapsed().as_secs_f64();
    if elapsed_s > cfg.budget_s {
        notes.push(format!("runtime {elapsed_s:.2} s exceeded the {} s budget", cfg.budget_s));
    }
    Ok(RunArtifacts {
        config: cfg,
        molecule: m,
        fid: fid_rec,
        fid_stderr,
        spectrum,
        maps,
        blp,
        otoc: otoc_rows,
        lightcone: lightcone_rows,
        notes,
        elapsed_s,
    })
}

fn otoc_csv(rows: &[OtocRow]) -> String {
    let mut out = String::from("tau_s,re_f,im_f,re_f_paths,im_f_paths,commutator_sq\n");
    for r in rows {
        let v = &r.value;
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.tau, v.f_direct.re, v.f_direct.im, v.f_paths.re, v.f_paths.im, v.commutator_sq
        );
    }
    out
}

fn lightcone_csvs(rows: &[(String, LightconeRow)], times: &[f64]) -> (String, String) {
    let mut summary = String::from("site,label,distance,arrival_s\n");
    for (label, r) in rows {
        let arrival = r.arrival.map(|t| format!("{t:.16e}")).unwrap_or_default();
        let _ = writeln!(summary, "{},{label},{},{arrival}", r.site, r.distance);
    }
    let mut norms = String::from("t_s");
    for (label, _) in rows {
        let _ = write!(norms, ",{label}");
    }
    norms.push('\n');
    for (k, t) in times.iter().enumerate() {
        let _ = write!(norms, "{t:.16e}");
        for (_, r) in rows {
            let _ = write!(norms, ",{:.16e}", r.norms[k]);
        }
        norms.push('\n');
    }
    (summary, norms)
}

fn stderr_csv(rec: &FidRecord, stderr: &[f64]) -> String {
    let mut out = String::from("t_s,s_stderr\n");
    for (t, e) in rec.times().iter().zip(stderr) {
        let _ = writeln!(out, "{t:.16e},{e:.16e}");
    }
    out
}

/// Writes every requested output plus `manifest.json` into `outdir`.
pub fn write_outputs(art: &RunArtifacts, outdir: &Path, started_unix_s: f64) -> Result<RunManifest, ScenarioError> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| ScenarioError::Io { path, source }
    };
    std::fs::create_dir_all(outdir).map_err(io(outdir))?;
    let mut files: Vec<(String, String)> = Vec::new();
    if let Some(rec) = &art.fid {
        if art.config.outputs.contains(&OutputKind::Fid) {
            files.push(("fid.csv".into(), rec.to_csv()));
            if let Some(e) = &art.fid_stderr {
                files.push(("fid_stderr.csv".into(), stderr_csv(rec, e)));
            }
        }
    }
    if let Some(s) = &art.spectrum {
        files.push(("spectrum.csv".into(), s.to_csv()));
    }
    if let Some(maps) = &art.maps {
        if art.config.outputs.contains(&OutputKind::Channel) {
            files.push(("channel.json".into(), channel_json(maps)));
        }
    }
    if let Some(r) = &art.blp {
        files.push(("blp.csv".into(), blp_csv(r)));
        files.push(("blp_summary.json".into(), blp_summary_json(r)));
    }
    if let Some(rows) = &art.otoc {
        files.push(("otoc.csv".into(), otoc_csv(rows)));
    }
    if let Some(rows) = &art.lightcone {
        let (summary, norms) = lightcone_csvs(rows, &art.config.grid.points());
        files.push(("lightcone.csv".into(), summary));
        files.push(("lightcone_norms.csv".into(), norms));
    }
    let mut written = Vec::with_capacity(files.len());
    for (name, text) in &files {
        let path = outdir.join(name);
        std::fs::write(&path, text).map_err(io(&path))?;
        written.push(OutputFile {
            file: name.clone(),
            sha256: sha256_hex(text.as_bytes()),
            bytes: text.len(),
        });
    }
    let cfg = &art.config;
    let manifest = RunManifest {
        scenario: cfg.name.clone(),
        molecule: cfg.molecule.clone(),
        engine: cfg.engine.name().to_string(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        n_traj: cfg.n_traj,
        outputs: cfg.outputs.iter().map(|o| o.name().to_string()).collect(),
        config_text: cfg.source_text.clone(),
        started_unix_s,
        finished_unix_s: unix_now(),
        elapsed_s: art.elapsed_s,
        budget_s: cfg.budget_s,
        qualitative: cfg.qualitative,
        notes: art.notes.clone(),
        files: written,
    };
    let path = outdir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    std::fs::write(&path, text).map_err(io(&path))?;
    Ok(manifest)
}

/// `execute` followed by `write_outputs`.
pub fn run(config: &ScenarioConfig, opts: &RunOptions, outdir: &Path) -> Result<RunOutcome, ScenarioError> {
    let started = unix_now();
    let artifacts = execute(config, opts)?;
    let manifest = write_outputs(&artifacts, outdir, started)?;
    Ok(RunOutcome {
        artifacts,
        manifest,
        outdir: outdir.to_path_buf(),
    })
}
