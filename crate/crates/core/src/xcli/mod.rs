//! Scenario registry, configuration, execution, result persistence and
//! regression comparison. The `spinbath` binary is a thin wrapper.

mod compare;
mod config;
mod registry;
mod run;

use thiserror::Error;

use crate::channels::ChannelError;
use crate::dynamics::DynamicsError;
use crate::molecule::MoleculeError;
use crate::qcore::QcoreError;
use crate::textfmt::TextError;

pub use compare::{compare_files, compare_texts, ColumnDeviation, CompareReport};
pub use config::{
    parse_scenario, read_scenario_file, BlpConfig, Engine, HamiltonianKind, LightconeConfig, OtocConfig, Pauli,
    ResetOverride, ScenarioConfig, SiteOp,
};
pub use registry::{list_scenarios, load_scenario, scenario_get, ScenarioInfo};
pub use run::{
    execute, run, write_outputs, OtocRow, OutputFile, RunArtifacts, RunManifest, RunOptions, RunOutcome,
    DENSE_OBSERVABLE_SITES, LINDBLAD_MAX_SITES, MC_MAX_SITES, UNITARY_MAX_SITES,
};

/// Process exit codes for `spinbath run`.
pub mod exit {
    pub const OK: i32 = 0;
    /// `compare` found a deviation above tolerance.
    pub const MISMATCH: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const INCOMPATIBLE: i32 = 3;
    pub const NUMERICAL: i32 = 4;
    pub const IO: i32 = 5;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum OutputKind {
    Fid,
    Spectrum,
    Channel,
    Blp,
    Otoc,
    Lightcone,
}

impl OutputKind {
    pub const ALL: [Self; 6] = [
        Self::Fid,
        Self::Spectrum,
        Self::Channel,
        Self::Blp,
        Self::Otoc,
        Self::Lightcone,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fid => "fid",
            Self::Spectrum => "spectrum",
            Self::Channel => "channel",
            Self::Blp => "blp",
            Self::Otoc => "otoc",
            Self::Lightcone => "lightcone",
        }
    }

    /// Comma-separated names, deduplicated and kept in canonical order.
    pub fn parse_list(s: &str) -> Result<Vec<Self>, String> {
        let mut out = Vec::new();
        for item in crate::textfmt::parse_list(s) {
            let kind = Self::ALL
                .into_iter()
                .find(|k| k.name() == item)
                .ok_or_else(|| format!("unknown output {item:?} (expected one of fid, spectrum, channel, blp, otoc, lightcone)"))?;
            out.push(kind);
        }
        if out.is_empty() {
            return Err("empty output list".to_string());
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{source_name}:{}: {}", error.line, error.message)]
    Config { source_name: String, error: TextError },
    #[error("unknown scenario {0:?} (not a registry name or readable file)")]
    UnknownScenario(String),
    #[error("molecule: {0}")]
    Molecule(#[from] MoleculeError),
    #[error("incompatible: {0}")]
    Incompatible(String),
    #[error("numerical failure: {0}")]
    Dynamics(#[from] DynamicsError),
    #[error("numerical failure: {0}")]
    Channel(#[from] ChannelError),
    #[error("numerical failure: {0}")]
    Qcore(#[from] QcoreError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Compare(String),
}

impl ScenarioError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } | Self::UnknownScenario(_) | Self::Compare(_) => exit::CONFIG,
            Self::Molecule(e) => match e {
                MoleculeError::Io { .. } => exit::IO,
                _ => exit::CONFIG,
            },
            Self::Incompatible(_) => exit::INCOMPATIBLE,
            Self::Dynamics(e) => match e {
                DynamicsError::NonDiagonalHamiltonian
                | DynamicsError::CoupledAncillas { .. }
                | DynamicsError::AncillaCoherence(_)
                | DynamicsError::DisconnectedProbe(_) => exit::INCOMPATIBLE,
                DynamicsError::BadGrid { .. }
                | DynamicsError::BadResetModel(_)
                | DynamicsError::NegativeRate { .. }
                | DynamicsError::Molecule(_) => exit::CONFIG,
                _ => exit::NUMERICAL,
            },
            Self::Channel(_) | Self::Qcore(_) => exit::NUMERICAL,
            Self::Io { .. } => exit::IO,
        }
    }
}
