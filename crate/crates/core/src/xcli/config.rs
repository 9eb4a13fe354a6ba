//! Scenario files.
//!
//! ```text
//! [scenario]
//! name = chloroform
//! molecule = chloroform
//! engine = unitary            # unitary | lindblad | reset-mc | factorized
//! hamiltonian = weak          # weak | lab
//! outputs = fid,spectrum
//! decouple = H1               # optional selectors
//! seed = 7
//! n_traj = 100000
//! budget_s = 1
//! qualitative = false
//! description = free text
//!
//! [grid]
//! t0_s = 0
//! t1_s = 0.05
//! steps = 1000
//!
//! [pulse]                     # repeatable, applied in order
//! beta_deg = 90
//! phi_deg = 90
//! targets = C
//!
//! [reset]                     # per-selector overrides
//! H.t1_s = 0.070
//! Si.rate_per_s = 0
//!
//! [polarization]
//! Ca = -1
//! ```
//!
//! Optional `[blp]`, `[otoc]` and `[lightcone]` sections tune those outputs.

use std::path::Path;

use super::{OutputKind, ScenarioError};
use crate::dynamics::{TimeGrid, LIGHTCONE_EPS};
use crate::molecule::PulseSpec;
use crate::textfmt::{self, parse_f64, parse_list, Section, TextError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Unitary,
    Lindblad,
    ResetMc,
    Factorized,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Self::Unitary => "unitary",
            Self::Lindblad => "lindblad",
            Self::ResetMc => "reset-mc",
            Self::Factorized => "factorized",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Self::Unitary, Self::Lindblad, Self::ResetMc, Self::Factorized]
            .into_iter()
            .find(|e| e.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HamiltonianKind {
    Weak,
    Lab,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "x" | "X" => Some(Self::X),
            "y" | "Y" => Some(Self::Y),
            "z" | "Z" => Some(Self::Z),
            _ => None,
        }
    }

    pub fn operator(self) -> crate::qcore::Operator {
        use crate::qcore::Operator;
        match self {
            Self::X => Operator::pauli_x(),
            Self::Y => Operator::pauli_y(),
            Self::Z => Operator::pauli_z(),
        }
    }
}

/// Pauli operator on a labelled site, written `x:Si`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteOp {
    pub op: Pauli,
    pub site: String,
}

impl SiteOp {
    fn parse(s: &str) -> Option<Self> {
        let (op, site) = s.split_once(':')?;
        Some(Self {
            op: Pauli::parse(op.trim())?,
            site: site.trim().to_string(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResetOverride {
    pub selector: String,
    /// Reset rate in s⁻¹.
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlpConfig {
    pub directions: usize,
    pub refine: bool,
    /// Search over mixed pairs and unequal weights on a small sphere grid.
    pub exhaustive: bool,
    pub exhaustive_directions: usize,
}

impl Default for BlpConfig {
    fn default() -> Self {
        Self {
            directions: crate::channels::DEFAULT_DIRECTIONS,
            refine: true,
            exhaustive: false,
            exhaustive_directions: 12,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OtocConfig {
    pub w: SiteOp,
    pub v: SiteOp,
    /// Average in the prepared state instead of the maximally mixed one.
    pub prepared_state: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LightconeConfig {
    pub source: SiteOp,
    pub probe_op: Pauli,
    /// Labels; every other active site when absent.
    pub probes: Option<Vec<String>>,
    pub eps: f64,
}

#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub name: String,
    pub molecule: String,
    pub engine: Engine,
    pub hamiltonian: HamiltonianKind,
    pub decouple: Vec<String>,
    /// Targets are molecule selectors resolved at run time.
    pub pulses: Vec<PulseSpec>,
    pub grid: TimeGrid,
    pub resets: Vec<ResetOverride>,
    pub polarization: Vec<(String, f64)>,
    pub outputs: Vec<OutputKind>,
    pub seed: u64,
    pub n_traj: usize,
    pub budget_s: f64,
    pub qualitative: bool,
    pub description: String,
    pub blp: BlpConfig,
    pub otoc: Option<OtocConfig>,
    pub lightcone: Option<LightconeConfig>,
    /// Original file text, kept for the run manifest.
    pub source_text: String,
}

const DEFAULT_N_TRAJ: usize = 10_000;
const DEFAULT_BUDGET_S: f64 = 120.0;

struct Ctx<'a> {
    source: &'a str,
}

impl Ctx<'_> {
    fn err(&self, line: usize, message: impl Into<String>) -> ScenarioError {
        ScenarioError::Config {
            source_name: self.source.to_string(),
            error: TextError {
                line,
                message: message.into(),
            },
        }
    }

    fn check_keys(&self, sec: &Section, allowed: &[&str]) -> Result<(), ScenarioError> {
        for (line, key, _) in sec.pairs() {
            if !allowed.contains(&key) {
                return Err(self.err(line, format!("unknown key `{key}` in [{}]", sec.name)));
            }
        }
        if let Some((line, row)) = sec.rows().next() {
            return Err(self.err(line, format!("expected `key = value` in [{}], found {:?}", sec.name, row.join(" "))));
        }
        Ok(())
    }

    fn line_of(&self, sec: &Section, key: &str) -> usize {
        sec.pairs().find(|(_, k, _)| *k == key).map_or(sec.line, |(l, _, _)| l)
    }

    fn f64(&self, sec: &Section, key: &str) -> Result<Option<f64>, ScenarioError> {
        sec.get(key)
            .map(|v| parse_f64(v).ok_or_else(|| self.err(self.line_of(sec, key), format!("`{key}` is not a number: {v:?}"))))
            .transpose()
    }

    fn parse_int<T: std::str::FromStr>(&self, sec: &Section, key: &str) -> Result<Option<T>, ScenarioError> {
        sec.get(key)
            .map(|v| {
                // allow 1e5 style counts
                v.parse::<T>().ok().or_else(|| {
                    let f: f64 = v.parse().ok()?;
                    (f >= 0.0 && f.fract() == 0.0 && f < 1e18).then(|| format!("{f:.0}").parse().ok())?
                })
                .ok_or_else(|| self.err(self.line_of(sec, key), format!("`{key}` is not a non-negative integer: {v:?}")))
            })
            .transpose()
    }

    fn bool(&self, sec: &Section, key: &str) -> Result<Option<bool>, ScenarioError> {
        sec.get(key)
            .map(|v| match v {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(self.err(self.line_of(sec, key), format!("`{key}` is not a boolean: {v:?}"))),
            })
            .transpose()
    }

    fn site_op(&self, sec: &Section, key: &str) -> Result<Option<SiteOp>, ScenarioError> {
        sec.get(key)
            .map(|v| {
                SiteOp::parse(v).ok_or_else(|| self.err(self.line_of(sec, key), format!("`{key}` must look like `x:label`, found {v:?}")))
            })
            .transpose()
    }
}

pub fn read_scenario_file(path: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&text, &path.display().to_string())
}

/// `source_name` only labels diagnostics.
pub fn parse_scenario(text: &str, source_name: &str) -> Result<ScenarioConfig, ScenarioError> {
    let ctx = Ctx { source: source_name };
    let doc = textfmt::parse(text).map_err(|error| ScenarioError::Config {
        source_name: source_name.to_string(),
        error,
    })?;
    const SECTIONS: &[&str] = &["scenario", "grid", "pulse", "reset", "polarization", "blp", "otoc", "lightcone"];
    for (k, sec) in doc.sections.iter().enumerate() {
        if !SECTIONS.contains(&sec.name.as_str()) {
            return Err(ctx.err(sec.line, format!("unknown section [{}]", sec.name)));
        }
        if sec.name != "pulse" && doc.sections[..k].iter().any(|s| s.name == sec.name) {
            return Err(ctx.err(sec.line, format!("section [{}] appears more than once", sec.name)));
        }
    }
    let head = doc.section("scenario").ok_or_else(|| ctx.err(0, "missing [scenario] section"))?;
    ctx.check_keys(
        head,
        &[
            "name", "molecule", "engine", "hamiltonian", "outputs", "decouple", "seed", "n_traj", "budget_s",
            "qualitative", "description",
        ],
    )?;
    let name = head.get("name").ok_or_else(|| ctx.err(head.line, "[scenario] needs `name`"))?.to_string();
    let molecule = head
        .get("molecule")
        .ok_or_else(|| ctx.err(head.line, "[scenario] needs `molecule`"))?
        .to_string();
    let engine_str = head.get("engine").unwrap_or("unitary");
    let engine = Engine::parse(engine_str)
        .ok_or_else(|| ctx.err(ctx.line_of(head, "engine"), format!("unknown engine {engine_str:?}")))?;
    let hamiltonian = match head.get("hamiltonian").unwrap_or("weak") {
        "weak" => HamiltonianKind::Weak,
        "lab" => HamiltonianKind::Lab,
        other => return Err(ctx.err(ctx.line_of(head, "hamiltonian"), format!("unknown hamiltonian {other:?}"))),
    };
    let outputs = match head.get("outputs") {
        Some(v) => OutputKind::parse_list(v).map_err(|m| ctx.err(ctx.line_of(head, "outputs"), m))?,
        None => vec![OutputKind::Fid],
    };
    let seed = ctx.parse_int::<u64>(head, "seed")?.unwrap_or(0);
    let n_traj = ctx.parse_int::<usize>(head, "n_traj")?.unwrap_or(DEFAULT_N_TRAJ);
    let budget_s = ctx.f64(head, "budget_s")?.unwrap_or(DEFAULT_BUDGET_S);
    let qualitative = ctx.bool(head, "qualitative")?.unwrap_or(false);

    let grid_sec = doc.section("grid").ok_or_else(|| ctx.err(0, "missing [grid] section"))?;
    ctx.check_keys(grid_sec, &["t0_s", "t1_s", "steps"])?;
    let t0 = ctx.f64(grid_sec, "t0_s")?.unwrap_or(0.0);
    let t1 = ctx.f64(grid_sec, "t1_s")?.ok_or_else(|| ctx.err(grid_sec.line, "[grid] needs `t1_s`"))?;
    let steps = ctx
        .parse_int::<usize>(grid_sec, "steps")?
        .ok_or_else(|| ctx.err(grid_sec.line, "[grid] needs `steps`"))?;
    let grid = TimeGrid::new(t0, t1, steps).map_err(|e| ctx.err(grid_sec.line, e.to_string()))?;

    let mut pulses = Vec::new();
    for sec in doc.sections_named("pulse") {
        ctx.check_keys(sec, &["beta_deg", "phi_deg", "targets"])?;
        let beta = ctx.f64(sec, "beta_deg")?.ok_or_else(|| ctx.err(sec.line, "[pulse] needs `beta_deg`"))?;
        let phi = ctx.f64(sec, "phi_deg")?.unwrap_or(0.0);
        if !beta.is_finite() || !phi.is_finite() {
            return Err(ctx.err(sec.line, "pulse angles must be finite"));
        }
        let targets = parse_list(sec.get("targets").ok_or_else(|| ctx.err(sec.line, "[pulse] needs `targets`"))?);
        if targets.is_empty() {
            return Err(ctx.err(sec.line, "[pulse] has no targets"));
        }
        pulses.push(PulseSpec::new(beta.to_radians(), phi.to_radians(), targets));
    }

    let mut resets = Vec::new();
    if let Some(sec) = doc.section("reset") {
        if let Some((line, _)) = sec.rows().next() {
            return Err(ctx.err(line, "expected `selector.t1_s = value` or `selector.rate_per_s = value`"));
        }
        for (line, key, value) in sec.pairs() {
            let v = parse_f64(value).ok_or_else(|| ctx.err(line, format!("not a number: {value:?}")))?;
            let rate = if let Some(sel) = key.strip_suffix(".t1_s") {
                if !(v > 0.0) {
                    return Err(ctx.err(line, format!("T1 must be positive, got {v}")));
                }
                (sel, 1.0 / v)
            } else if let Some(sel) = key.strip_suffix(".rate_per_s") {
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(ctx.err(line, format!("reset rate must be finite and non-negative, got {v}")));
                }
                (sel, v)
            } else {
                return Err(ctx.err(line, format!("reset key `{key}` needs a `.t1_s` or `.rate_per_s` suffix")));
            };
            resets.push(ResetOverride {
                selector: rate.0.to_string(),
                rate: rate.1,
            });
        }
    }

    let mut polarization = Vec::new();
    if let Some(sec) = doc.section("polarization") {
        if let Some((line, _)) = sec.rows().next() {
            return Err(ctx.err(line, "expected `selector = value`"));
        }
        for (line, key, value) in sec.pairs() {
            let v = parse_f64(value).ok_or_else(|| ctx.err(line, format!("not a number: {value:?}")))?;
            if !(-1.0..=1.0).contains(&v) {
                return Err(ctx.err(line, format!("polarization {v} outside [-1, 1]")));
            }
            polarization.push((key.to_string(), v));
        }
    }

    let mut blp = BlpConfig::default();
    if let Some(sec) = doc.section("blp") {
        ctx.check_keys(sec, &["directions", "refine", "exhaustive", "exhaustive_directions"])?;
        if let Some(d) = ctx.parse_int::<usize>(sec, "directions")? {
            if d == 0 {
                return Err(ctx.err(ctx.line_of(sec, "directions"), "`directions` must be positive"));
            }
            blp.directions = d;
        }
        blp.refine = ctx.bool(sec, "refine")?.unwrap_or(blp.refine);
        blp.exhaustive = ctx.bool(sec, "exhaustive")?.unwrap_or(blp.exhaustive);
        blp.exhaustive_directions = ctx
            .parse_int::<usize>(sec, "exhaustive_directions")?
            .unwrap_or(blp.exhaustive_directions);
    }

    let otoc = doc
        .section("otoc")
        .map(|sec| {
            ctx.check_keys(sec, &["w", "v", "state"])?;
            let w = ctx.site_op(sec, "w")?.ok_or_else(|| ctx.err(sec.line, "[otoc] needs `w`"))?;
            let v = ctx.site_op(sec, "v")?.ok_or_else(|| ctx.err(sec.line, "[otoc] needs `v`"))?;
            let prepared_state = match sec.get("state").unwrap_or("mixed") {
                "mixed" => false,
                "prepared" => true,
                other => return Err(ctx.err(ctx.line_of(sec, "state"), format!("state must be `mixed` or `prepared`, got {other:?}"))),
            };
            Ok(OtocConfig { w, v, prepared_state })
        })
        .transpose()?;

    let lightcone = doc
        .section("lightcone")
        .map(|sec| {
            ctx.check_keys(sec, &["source", "probe_op", "probes", "eps"])?;
            let source = ctx
                .site_op(sec, "source")?
                .ok_or_else(|| ctx.err(sec.line, "[lightcone] needs `source`"))?;
            let probe_op = match sec.get("probe_op") {
                Some(v) => Pauli::parse(v).ok_or_else(|| ctx.err(ctx.line_of(sec, "probe_op"), format!("unknown Pauli {v:?}")))?,
                None => source.op,
            };
            let eps = ctx.f64(sec, "eps")?.unwrap_or(LIGHTCONE_EPS);
            if !(eps > 0.0) {
                return Err(ctx.err(ctx.line_of(sec, "eps"), "`eps` must be positive"));
            }
            Ok(LightconeConfig {
                source,
                probe_op,
                probes: sec.get("probes").map(parse_list),
                eps,
            })
        })
        .transpose()?;

    Ok(ScenarioConfig {
        name,
        molecule,
        engine,
        hamiltonian,
        decouple: head.get("decouple").map(parse_list).unwrap_or_default(),
        pulses,
        grid,
        resets,
        polarization,
        outputs,
        seed,
        n_traj,
        budget_s,
        qualitative,
        description: head.get("description").unwrap_or("").to_string(),
        blp,
        otoc,
        lightcone,
        source_text: text.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = "
[scenario]
name = demo
molecule = chloroform
engine = lindblad
hamiltonian = lab
outputs = fid, spectrum, blp
seed = 9
n_traj = 1e5
budget_s = 3
qualitative = yes
decouple = H*

[grid]
t1_s = 0.01
steps = 100

[pulse]
beta_deg = 90
phi_deg = 90
targets = C

[pulse]
beta_deg = 180
targets = H, C

[reset]
H.t1_s = 0.070
C.rate_per_s = 0

[polarization]
H = 0.5

[blp]
directions = 10
refine = false

[otoc]
w = x:C
v = z:H
state = prepared

[lightcone]
source = y:C
eps = 0.05
";

    #[test]
    fn full_config_round_trip() {
        let c = parse_scenario(FULL, "demo.scn").unwrap();
        assert_eq!(c.name, "demo");
        assert_eq!(c.engine, Engine::Lindblad);
        assert_eq!(c.hamiltonian, HamiltonianKind::Lab);
        assert_eq!(c.outputs, vec![OutputKind::Fid, OutputKind::Spectrum, OutputKind::Blp]);
        assert_eq!((c.seed, c.n_traj), (9, 100_000));
        assert!(c.qualitative);
        assert_eq!(c.decouple, vec!["H*"]);
        assert_eq!(c.grid, TimeGrid::new(0.0, 0.01, 100).unwrap());
        assert_eq!(c.pulses.len(), 2);
        assert!((c.pulses[0].beta() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(c.pulses[1].targets, vec!["H", "C"]);
        assert_eq!(c.resets[0].selector, "H");
        assert!((c.resets[0].rate - 1.0 / 0.070).abs() < 1e-12);
        assert_eq!(c.resets[1].rate, 0.0);
        assert_eq!(c.polarization, vec![("H".to_string(), 0.5)]);
        assert_eq!(c.blp.directions, 10);
        assert!(!c.blp.refine);
        let o = c.otoc.unwrap();
        assert_eq!(o.w, SiteOp { op: Pauli::X, site: "C".into() });
        assert!(o.prepared_state);
        let l = c.lightcone.unwrap();
        assert_eq!(l.probe_op, Pauli::Y);
        assert_eq!(l.eps, 0.05);
    }

    fn err_line(text: &str) -> usize {
        match parse_scenario(text, "x.scn") {
            Err(ScenarioError::Config { error, .. }) => error.line,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn diagnostics_point_at_lines() {
        let base = "[scenario]\nname = a\nmolecule = chloroform\n[grid]\nt1_s = 1\nsteps = 10\n";
        assert!(parse_scenario(base, "x").is_ok());
        assert_eq!(err_line(&format!("{base}[bogus]\n")), 7);
        assert_eq!(err_line(&base.replace("steps = 10", "steps = ten")), 6);
        assert_eq!(err_line(&base.replace("name = a", "name = a\nengine = magic")), 3);
        assert_eq!(err_line(&base.replace("t1_s = 1", "t1 = 1")), 5);
        assert_eq!(err_line(&format!("{base}[reset]\nH = 0.1\n")), 8);
        assert_eq!(err_line(&format!("{base}[reset]\nH.t1_s = 0\n")), 8);
        assert_eq!(err_line(&format!("{base}[polarization]\nH = 2\n")), 8);
        assert_eq!(err_line(&base.replace("name = a", "name = a\noutputs = fid,plot")), 3);
        assert_eq!(err_line(&format!("{base}[grid]\n")), 7);
    }

    #[test]
    fn missing_sections() {
        assert!(matches!(parse_scenario("[grid]\nt1_s=1\nsteps=2\n", "x"), Err(ScenarioError::Config { .. })));
        assert!(matches!(
            parse_scenario("[scenario]\nname=a\nmolecule=b\n", "x"),
            Err(ScenarioError::Config { .. })
        ));
        let bad_grid = "[scenario]\nname = a\nmolecule = b\n[grid]\nt1_s = -1\nsteps = 10\n";
        assert_eq!(err_line(bad_grid), 4);
    }
}
