//! Molecule model: spin sites, J-coupling network, decoupling, Hamiltonians,
//! state preparation and the built-in molecule registry.
//!
//! All rates and couplings are stored in rad/s. The file loader converts the
//! Hz values found on disk.

mod file;
mod hamiltonian;
mod registry;
mod state;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::qcore::{QcoreError, SpinSpace};
use crate::textfmt::TextError;

pub use file::{parse_molecule, read_molecule_file};
pub use hamiltonian::{hamiltonian_lab, hamiltonian_weak};
pub use registry::{registry_get, registry_names, MOLECULES_ENV};
pub use state::{apply_pulse, rotation, selective_pulse, thermal_state, PulseSpec};

/// Pairs closer than this many couplings in frequency are flagged.
pub const WEAK_COUPLING_RATIO: f64 = 10.0;

#[derive(Debug, Error)]
pub enum MoleculeError {
    #[error(transparent)]
    Qcore(#[from] QcoreError),
    #[error("molecule has no sites")]
    Empty,
    #[error("unknown site {0:?}")]
    UnknownSite(String),
    #[error("duplicate site label {0:?}")]
    DuplicateSite(String),
    #[error("site {0:?} cannot couple to itself")]
    SelfCoupling(String),
    #[error("reset rate of {label} must be non-negative, got {rate}")]
    NegativeResetRate { label: String, rate: f64 },
    #[error("polarization of {label} must lie in [-1, 1], got {value}")]
    BadPolarization { label: String, value: f64 },
    #[error("observed site {0:?} cannot be decoupled")]
    SystemDecoupled(String),
    #[error("pulse target {0:?} is not an active site")]
    PulseTarget(String),
    #[error("unknown molecule {0:?}")]
    UnknownMolecule(String),
    #[error("{source_name}: {error}")]
    Parse {
        source_name: String,
        error: TextError,
    },
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = MoleculeError> = std::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq)]
pub struct SpinSite {
    pub label: String,
    /// Nuclide tag such as `H1`, `C13`, `Si29`.
    pub species: String,
    /// Chemical-shift offset in the species' rotating frame, rad/s.
    pub omega0: f64,
    /// `1/T1` in 1/s; zero means the site is never reset.
    pub reset_rate: f64,
    /// Renormalised thermal polarisation; `None` takes the default
    /// (1 for the observed site, 0 elsewhere).
    pub polarization: Option<f64>,
}

impl SpinSite {
    pub fn new(label: impl Into<String>, species: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            species: species.into(),
            omega0: 0.0,
            reset_rate: 0.0,
            polarization: None,
        }
    }

    pub fn with_omega0(mut self, omega0: f64) -> Self {
        self.omega0 = omega0;
        self
    }

    pub fn with_reset_rate(mut self, rate: f64) -> Self {
        self.reset_rate = rate;
        self
    }
}

/// Symmetric J table keyed by unordered site pairs; absent pairs are uncoupled.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CouplingTable {
    entries: BTreeMap<(usize, usize), f64>,
}

impl CouplingTable {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(j: usize, k: usize) -> (usize, usize) {
        (j.min(k), j.max(k))
    }

    /// Returns `false` for a self-coupling, which is not stored.
    pub fn set(&mut self, j: usize, k: usize, coupling: f64) -> bool {
        if j == k {
            return false;
        }
        if coupling == 0.0 {
            self.entries.remove(&Self::key(j, k));
        } else {
            self.entries.insert(Self::key(j, k), coupling);
        }
        true
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.entries.get(&Self::key(j, k)).copied().unwrap_or(0.0)
    }

    /// `(j, k, J)` with `j < k`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries.iter().map(|(&(j, k), &c)| (j, k, c))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeakCouplingWarning {
    pub a: String,
    pub b: String,
    pub delta_omega: f64,
    pub coupling: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Molecule {
    name: String,
    sites: Vec<SpinSite>,
    couplings: CouplingTable,
    system_site: usize,
    decoupled: Vec<bool>,
}

impl Molecule {
    pub fn new(
        name: impl Into<String>,
        sites: Vec<SpinSite>,
        couplings: CouplingTable,
        system_site: usize,
    ) -> Result<Self> {
        if sites.is_empty() {
            return Err(MoleculeError::Empty);
        }
        for (i, s) in sites.iter().enumerate() {
            if sites[..i].iter().any(|o| o.label == s.label) {
                return Err(MoleculeError::DuplicateSite(s.label.clone()));
            }
            check_site(s)?;
        }
        if system_site >= sites.len() {
            return Err(QcoreError::SiteOutOfRange {
                site: system_site,
                n_sites: sites.len(),
            }
            .into());
        }
        if let Some((j, k, _)) = couplings.iter().find(|&(_, k, _)| k >= sites.len()) {
            return Err(QcoreError::SiteOutOfRange {
                site: j.max(k),
                n_sites: sites.len(),
            }
            .into());
        }
        let n = sites.len();
        Ok(Self {
            name: name.into(),
            sites,
            couplings,
            system_site,
            decoupled: vec![false; n],
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn sites(&self) -> &[SpinSite] {
        &self.sites
    }

    pub fn couplings(&self) -> &CouplingTable {
        &self.couplings
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn system_site(&self) -> usize {
        self.system_site
    }

    pub fn site_index(&self, label: &str) -> Result<usize> {
        self.sites
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| MoleculeError::UnknownSite(label.to_string()))
    }

    /// Site indices matching an exact label, then `prefix*`, then a species tag.
    pub fn select(&self, selector: &str) -> Result<Vec<usize>> {
        file::select(&self.sites, selector).ok_or_else(|| MoleculeError::UnknownSite(selector.to_string()))
    }

    pub fn is_decoupled(&self, site: usize) -> bool {
        self.decoupled[site]
    }

    pub fn decouple(&mut self, site: usize) -> Result<()> {
        if site >= self.n_sites() {
            return Err(QcoreError::SiteOutOfRange {
                site,
                n_sites: self.n_sites(),
            }
            .into());
        }
        if site == self.system_site {
            return Err(MoleculeError::SystemDecoupled(self.sites[site].label.clone()));
        }
        self.decoupled[site] = true;
        Ok(())
    }

    /// Decouple every site matched by `selector` (label or species).
    pub fn decouple_selector(&mut self, selector: &str) -> Result<()> {
        for site in self.select(selector)? {
            self.decouple(site)?;
        }
        Ok(())
    }

    pub fn set_reset_rate(&mut self, site: usize, rate: f64) -> Result<()> {
        let s = &mut self.sites[site];
        if !(rate >= 0.0) {
            return Err(MoleculeError::NegativeResetRate {
                label: s.label.clone(),
                rate,
            });
        }
        s.reset_rate = rate;
        Ok(())
    }

    pub fn set_polarization(&mut self, site: usize, value: f64) -> Result<()> {
        let s = &mut self.sites[site];
        if !(-1.0..=1.0).contains(&value) {
            return Err(MoleculeError::BadPolarization {
                label: s.label.clone(),
                value,
            });
        }
        s.polarization = Some(value);
        Ok(())
    }

    pub fn polarization(&self, site: usize) -> f64 {
        self.sites[site]
            .polarization
            .unwrap_or(if site == self.system_site { 1.0 } else { 0.0 })
    }

    pub fn active_sites(&self) -> Vec<usize> {
        (0..self.n_sites()).filter(|&i| !self.decoupled[i]).collect()
    }

    /// Position of a molecule site inside the active register.
    pub fn active_index(&self, site: usize) -> Option<usize> {
        if site >= self.n_sites() || self.decoupled[site] {
            return None;
        }
        Some((0..site).filter(|&i| !self.decoupled[i]).count())
    }

    pub fn system_active_index(&self) -> usize {
        self.active_index(self.system_site)
            .expect("observed site is never decoupled")
    }

    /// Register of the active sites, subject to the dense cap.
    pub fn active_space(&self) -> Result<SpinSpace> {
        let labels = self.active_sites().into_iter().map(|i| self.sites[i].label.clone());
        Ok(SpinSpace::new(labels)?)
    }

    /// Couplings among active sites, re-indexed into the active register.
    pub fn active_couplings(&self) -> Vec<(usize, usize, f64)> {
        self.couplings
            .iter()
            .filter_map(|(j, k, c)| Some((self.active_index(j)?, self.active_index(k)?, c)))
            .collect()
    }

    /// Active homonuclear pairs whose shift difference is not large against J.
    /// Heteronuclear pairs are separated by their Larmor frequencies and always pass.
    pub fn weak_coupling_warnings(&self) -> Vec<WeakCouplingWarning> {
        self.couplings
            .iter()
            .filter(|&(j, k, _)| !self.decoupled[j] && !self.decoupled[k])
            .filter(|&(j, k, _)| self.sites[j].species == self.sites[k].species)
            .filter_map(|(j, k, c)| {
                let delta = (self.sites[j].omega0 - self.sites[k].omega0).abs();
                (delta <= WEAK_COUPLING_RATIO * c.abs()).then(|| WeakCouplingWarning {
                    a: self.sites[j].label.clone(),
                    b: self.sites[k].label.clone(),
                    delta_omega: delta,
                    coupling: c,
                })
            })
            .collect()
    }
}

fn check_site(s: &SpinSite) -> Result<()> {
    if !(s.reset_rate >= 0.0) {
        return Err(MoleculeError::NegativeResetRate {
            label: s.label.clone(),
            rate: s.reset_rate,
        });
    }
    if let Some(p) = s.polarization {
        if !(-1.0..=1.0).contains(&p) {
            return Err(MoleculeError::BadPolarization {
                label: s.label.clone(),
                value: p,
            });
        }
    }
    Ok(())
}
