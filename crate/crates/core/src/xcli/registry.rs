//! Built-in scenarios, embedded at compile time.

use std::path::Path;

use super::{parse_scenario, read_scenario_file, Engine, ScenarioConfig, ScenarioError};

const BUILTIN: &[(&str, &str)] = &[
    ("chain-lightcone", include_str!("../../scenarios/chain-lightcone.scn")),
    ("chloroform", include_str!("../../scenarios/chloroform.scn")),
    ("chloroform-reset", include_str!("../../scenarios/chloroform-reset.scn")),
    ("chloroform-reset-mc", include_str!("../../scenarios/chloroform-reset-mc.scn")),
    ("dss-decoupled", include_str!("../../scenarios/dss-decoupled.scn")),
    ("dss-full", include_str!("../../scenarios/dss-full.scn")),
    ("tms-19mM", include_str!("../../scenarios/tms-19mM.scn")),
    ("tms-40mM", include_str!("../../scenarios/tms-40mM.scn")),
    ("tms-pure", include_str!("../../scenarios/tms-pure.scn")),
    ("transcrotonic-decoupled", include_str!("../../scenarios/transcrotonic-decoupled.scn")),
    ("transcrotonic-full", include_str!("../../scenarios/transcrotonic-full.scn")),
];

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioInfo {
    pub name: String,
    pub description: String,
    pub molecule: String,
    pub engine: Engine,
    pub budget_s: f64,
    pub qualitative: bool,
}

/// Built-in scenario by name.
pub fn scenario_get(name: &str) -> Result<ScenarioConfig, ScenarioError> {
    let (n, text) = BUILTIN
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| ScenarioError::UnknownScenario(name.to_string()))?;
    parse_scenario(text, &format!("<builtin {n}>"))
}

/// Every built-in scenario, sorted by name.
pub fn list_scenarios() -> Vec<ScenarioInfo> {
    let mut out: Vec<ScenarioInfo> = BUILTIN
        .iter()
        .map(|(n, _)| {
            let c = scenario_get(n).expect("built-in scenarios parse");
            ScenarioInfo {
                name: c.name,
                description: c.description,
                molecule: c.molecule,
                engine: c.engine,
                budget_s: c.budget_s,
                qualitative: c.qualitative,
            }
        })
        .collect();
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

/// An existing file path wins over a registry name of the same spelling.
pub fn load_scenario(arg: &str) -> Result<ScenarioConfig, ScenarioError> {
    let path = Path::new(arg);
    if path.is_file() {
        return read_scenario_file(path);
    }
    scenario_get(arg)
}
