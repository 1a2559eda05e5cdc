use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sgkink::experiments::{
    BtOptions, ConservationOptions, EvolveOptions, ExactOptions, ManifoldOptions, MapOptions, RoundTripOptions,
    SpectrumOptions, StabilityOptions, SweepOptions, VacuumOptions, WobblerOptions,
};

/// Current schema version.
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unsupported config version {0} (expected {VERSION})")]
    Version(u32),
    #[error("input data: {0}")]
    Input(String),
}

/// Parts of the `stability` command, in the order they run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityPart {
    Manifold,
    RoundTrips,
    Conservation,
    Wobbler,
    Rates,
    Vacuum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilitySection {
    pub parts: Vec<StabilityPart>,
    pub manifold: ManifoldOptions,
    pub round_trips: RoundTripOptions,
    pub conservation: ConservationOptions,
    pub wobbler: WobblerOptions,
    pub rates: StabilityOptions,
    pub vacuum: VacuumOptions,
}

impl Default for StabilitySection {
    fn default() -> Self {
        StabilitySection {
            parts: vec![StabilityPart::Manifold, StabilityPart::Rates],
            manifold: Default::default(),
            round_trips: Default::default(),
            conservation: Default::default(),
            wobbler: Default::default(),
            rates: Default::default(),
            vacuum: Default::default(),
        }
    }
}

/// One experiment file. Every section is optional; command-line flags
/// override the top-level fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    /// Subcommand run by `sgkink run`.
    pub experiment: Option<String>,
    pub seed: u64,
    pub strict: bool,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub exact: ExactOptions,
    pub bt: BtOptions,
    pub spectrum: SpectrumOptions,
    pub lift: MapOptions,
    pub evolve: EvolveOptions,
    pub stability: StabilitySection,
    pub sweep: SweepOptions,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            version: VERSION,
            experiment: None,
            seed: 0,
            strict: false,
            workers: None,
            out: None,
            exact: Default::default(),
            bt: Default::default(),
            spectrum: Default::default(),
            lift: Default::default(),
            evolve: Default::default(),
            stability: Default::default(),
            sweep: Default::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        if cfg.version != VERSION {
            return Err(ConfigError::Version(cfg.version));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
