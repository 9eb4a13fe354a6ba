//! Built-in molecules, optionally shadowed by files in `$SPINBATH_MOLECULES`.
//!
//! A file `<dir>/<name>.mol` replaces the built-in of the same name; names
//! absent from the directory fall back to the built-ins. `*-decoupled`
//! variants are derived from their base by decoupling every hydrogen.

use std::path::PathBuf;

use super::{parse_molecule, read_molecule_file, Molecule, MoleculeError, Result};

pub const MOLECULES_ENV: &str = "SPINBATH_MOLECULES";

const BUILTIN: &[(&str, &str)] = &[
    ("chloroform", include_str!("../../molecules/chloroform.mol")),
    ("tms", include_str!("../../molecules/tms.mol")),
    ("tms-19mM", include_str!("../../molecules/tms-19mM.mol")),
    ("tms-40mM", include_str!("../../molecules/tms-40mM.mol")),
    ("dss", include_str!("../../molecules/dss.mol")),
    ("transcrotonic", include_str!("../../molecules/transcrotonic.mol")),
    ("chain6", include_str!("../../molecules/chain6.mol")),
];

const DERIVED: &[(&str, &str, &str)] = &[
    ("dss-decoupled", "dss", "H1"),
    ("transcrotonic-decoupled", "transcrotonic", "H1"),
];

fn override_dir() -> Option<PathBuf> {
    std::env::var_os(MOLECULES_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

fn load(name: &str) -> Result<Option<Molecule>> {
    if let Some(dir) = override_dir() {
        let path = dir.join(format!("{name}.mol"));
        if path.is_file() {
            return read_molecule_file(&path).map(Some);
        }
    }
    BUILTIN
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(n, text)| parse_molecule(text, n))
        .transpose()
}

pub fn registry_get(name: &str) -> Result<Molecule> {
    if let Some(m) = load(name)? {
        return Ok(m);
    }
    if let Some((_, base, species)) = DERIVED.iter().find(|(n, _, _)| *n == name) {
        let mut m = load(base)?.ok_or_else(|| MoleculeError::UnknownMolecule(base.to_string()))?;
        m.decouple_selector(species)?;
        m.set_name(name);
        return Ok(m);
    }
    Err(MoleculeError::UnknownMolecule(name.to_string()))
}

/// Built-in and derived names followed by any extra files in the override directory.
pub fn registry_names() -> Vec<String> {
    let mut names: Vec<String> = BUILTIN
        .iter()
        .map(|(n, _)| n.to_string())
        .chain(DERIVED.iter().map(|(n, _, _)| n.to_string()))
        .collect();
    if let Some(dir) = override_dir() {
        let mut extra: Vec<String> = std::fs::read_dir(dir)
            .into_iter()
            .flatten()
            .flatten()
            .filter_map(|e| {
                let p = e.path();
                (p.extension()? == "mol").then(|| p.file_stem()?.to_str().map(str::to_string))?
            })
            .filter(|n| !names.contains(n))
            .collect();
        extra.sort();
        names.extend(extra);
    }
    names
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn every_name_resolves() {
        for name in registry_names() {
            let m = registry_get(&name).unwrap();
            assert_eq!(m.name(), name);
        }
        assert!(matches!(
            registry_get("benzene"),
            Err(MoleculeError::UnknownMolecule(_))
        ));
    }

    #[test]
    fn chloroform_parameters() {
        let m = registry_get("chloroform").unwrap();
        assert_eq!(m.n_sites(), 2);
        assert_eq!(m.sites()[m.system_site()].species, "C13");
        assert!((m.couplings().get(0, 1) - TAU * 215.0).abs() < 1e-12);
    }

    #[test]
    fn tms_parameters() {
        let m = registry_get("tms").unwrap();
        assert_eq!(m.n_sites(), 13);
        assert_eq!(m.sites()[m.system_site()].species, "Si29");
        assert_eq!(m.couplings().len(), 12);
        for (j, k, c) in m.couplings().iter() {
            assert!(j == m.system_site() || k == m.system_site());
            assert!((c - TAU * 6.6).abs() < 1e-12);
        }
    }

    #[test]
    fn tms_40mm_reset_rates() {
        let m = registry_get("tms-40mM").unwrap();
        let si = m.system_site();
        assert!((m.sites()[si].reset_rate - 1.0 / 1.4).abs() < 1e-12);
        for (i, s) in m.sites().iter().enumerate().filter(|&(i, _)| i != si) {
            assert!((s.reset_rate - 1.0 / 0.070).abs() < 1e-9, "site {i}");
        }
        let m = registry_get("tms-19mM").unwrap();
        assert!((m.sites()[1].reset_rate - 1.0 / 0.140).abs() < 1e-9);
    }

    #[test]
    fn decoupled_variants() {
        let m = registry_get("dss-decoupled").unwrap();
        assert_eq!(m.active_sites(), vec![m.system_site()]);
        let m = registry_get("transcrotonic-decoupled").unwrap();
        assert_eq!(m.active_sites().len(), 4);
        assert!(m.active_sites().iter().all(|&i| m.sites()[i].species == "C13"));
    }

    #[test]
    fn builtin_molecules_pass_weak_coupling_check() {
        for name in ["chloroform", "tms", "dss", "transcrotonic"] {
            let m = registry_get(name).unwrap();
            assert!(m.weak_coupling_warnings().is_empty(), "{name}");
        }
    }
}
