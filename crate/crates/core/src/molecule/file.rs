//! Molecule definition files.
//!
//! ```text
//! [molecule]
//! name = tms
//! system = Si
//! decouple = H1          # optional: labels, `prefix*` or species tags
//!
//! [sites]
//! # label  species  omega0_hz  t1_s
//! Si  Si29  0  16
//! H1  H1    0  10
//!
//! [couplings]
//! # a  b  j_hz           # a or b may select several sites
//! Si  H*  6.6
//!
//! [polarization]         # optional
//! Si = 1
//! ```
//!
//! `t1_s = inf` disables resets for the site.

use std::f64::consts::TAU;
use std::path::Path;

use super::{CouplingTable, Molecule, MoleculeError, Result, SpinSite};
use crate::textfmt::{self, parse_f64, parse_list, Section, TextError};

pub fn read_molecule_file(path: &Path) -> Result<Molecule> {
    let text = std::fs::read_to_string(path).map_err(|source| MoleculeError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_molecule(&text, &path.display().to_string())
}

/// `source_name` only labels diagnostics.
pub fn parse_molecule(text: &str, source_name: &str) -> Result<Molecule> {
    let wrap = |error: TextError| MoleculeError::Parse {
        source_name: source_name.to_string(),
        error,
    };
    let doc = textfmt::parse(text).map_err(wrap)?;
    let missing = |name: &str| {
        wrap(TextError {
            line: 0,
            message: format!("missing [{name}] section"),
        })
    };
    let header = doc.section("molecule").ok_or_else(|| missing("molecule"))?;
    let sites_sec = doc.section("sites").ok_or_else(|| missing("sites"))?;

    let name = header.get("name").unwrap_or(source_name).to_string();
    let system = header
        .get("system")
        .ok_or_else(|| wrap(header.error(header.line, "[molecule] needs `system`")))?;

    let sites = parse_sites(sites_sec).map_err(wrap)?;
    let mut couplings = CouplingTable::new();
    for sec in doc.sections_named("couplings") {
        for (line, row) in sec.rows() {
            let [a, b, j] = row else {
                return Err(wrap(sec.error(line, "coupling rows are `site_a site_b j_hz`")));
            };
            let j_hz = parse_f64(j)
                .filter(|v| v.is_finite())
                .ok_or_else(|| wrap(sec.error(line, format!("bad coupling {j:?}"))))?;
            let left = select(&sites, a).ok_or_else(|| wrap(sec.error(line, format!("unknown site {a:?}"))))?;
            let right = select(&sites, b).ok_or_else(|| wrap(sec.error(line, format!("unknown site {b:?}"))))?;
            for &x in &left {
                for &y in &right {
                    if x == y {
                        return Err(wrap(sec.error(line, format!("{a:?} couples to itself"))));
                    }
                    couplings.set(x, y, TAU * j_hz);
                }
            }
        }
    }

    let system_site = sites
        .iter()
        .position(|s| s.label == system)
        .ok_or_else(|| MoleculeError::UnknownSite(system.to_string()))?;
    let mut molecule = Molecule::new(name, sites, couplings, system_site)?;

    if let Some(sec) = doc.section("polarization") {
        for (line, key, value) in sec.pairs() {
            let eps = parse_f64(value)
                .ok_or_else(|| wrap(sec.error(line, format!("bad polarization {value:?}"))))?;
            let idx = molecule.site_index(key)?;
            molecule.set_polarization(idx, eps)?;
        }
    }
    for selector in header.get("decouple").map(parse_list).unwrap_or_default() {
        molecule.decouple_selector(&selector)?;
    }
    Ok(molecule)
}

fn parse_sites(sec: &Section) -> Result<Vec<SpinSite>, TextError> {
    let mut sites = Vec::new();
    for (line, row) in sec.rows() {
        let [label, species, omega0, t1] = row else {
            return Err(sec.error(line, "site rows are `label species omega0_hz t1_s`"));
        };
        let omega0_hz = parse_f64(omega0)
            .filter(|v| v.is_finite())
            .ok_or_else(|| sec.error(line, format!("bad omega0_hz {omega0:?}")))?;
        let t1_s = parse_f64(t1)
            .filter(|v| *v > 0.0)
            .ok_or_else(|| sec.error(line, format!("t1_s must be positive or inf, got {t1:?}")))?;
        sites.push(
            SpinSite::new(label.as_str(), species.as_str())
                .with_omega0(TAU * omega0_hz)
                .with_reset_rate(1.0 / t1_s),
        );
    }
    if sites.is_empty() {
        return Err(sec.error(sec.line, "[sites] is empty"));
    }
    Ok(sites)
}

/// Exact label, then `prefix*`, then species tag.
pub(super) fn select(sites: &[SpinSite], selector: &str) -> Option<Vec<usize>> {
    if let Some(i) = sites.iter().position(|s| s.label == selector) {
        return Some(vec![i]);
    }
    let hits: Vec<usize> = match selector.strip_suffix('*') {
        Some(prefix) => (0..sites.len())
            .filter(|&i| sites[i].label.starts_with(prefix))
            .collect(),
        None => (0..sites.len())
            .filter(|&i| sites[i].species == selector)
            .collect(),
    };
    (!hits.is_empty()).then_some(hits)
}
