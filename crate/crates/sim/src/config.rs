//! Campaign configuration: file formats, profiles and resolution into model
//! types.
//!
//! A config file (JSON or TOML, chosen by extension) only needs the keys it
//! changes. Precedence is profile defaults, then the file, then CLI flags.

use std::fmt;
use std::path::Path;

use isac_core::constellation::Constellation;
use isac_core::scenario::{SystemParams, Target};
use isac_core::waveform::Predecessor;
use isac_core::{channel::EchoModel, from_db};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid TOML in {path}: {source}")]
    Toml { path: String, source: toml::de::Error },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("unsupported config extension for {0} (expected .toml or .json)")]
    Extension(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] isac_core::Error),
}

/// Grid size and trial count presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// 64 × 32 grid, 500 trials.
    #[default]
    Desk,
    /// 256 × 128 grid, 5000 trials.
    Full,
}

impl Profile {
    pub fn grid(self) -> (usize, usize) {
        match self {
            Profile::Desk => (64, 32),
            Profile::Full => (256, 128),
        }
    }

    pub fn trials(self) -> u64 {
        match self {
            Profile::Desk => 500,
            Profile::Full => 5000,
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Desk => "desk",
            Profile::Full => "full",
        })
    }
}

/// Trial count all tolerances are quoted at.
pub const REFERENCE_TRIALS: u64 = 5000;

/// Scales a tolerance quoted at [`REFERENCE_TRIALS`] to `trials`.
pub fn widen(tolerance: f64, trials: u64) -> f64 {
    tolerance * (REFERENCE_TRIALS as f64 / trials.max(1) as f64).sqrt().max(1.0)
}

/// Cyclic prefix choice. Serialized as `"normal"`, `"long"`,
/// `{ samples = n }` or `{ duration_s = t }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CpMode {
    Named(CpName),
    Samples { samples: usize },
    Duration { duration_s: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CpName {
    Normal,
    Long,
}

impl CpMode {
    pub const NORMAL: CpMode = CpMode::Named(CpName::Normal);
    pub const LONG: CpMode = CpMode::Named(CpName::Long);

    /// Prefix length in samples for the given grid.
    pub fn samples(&self, params: &SystemParams) -> Result<usize, ConfigError> {
        let n = params.n_subcarriers;
        let samples = match *self {
            CpMode::Named(CpName::Normal) => SystemParams::normal_cp_samples(n),
            CpMode::Named(CpName::Long) => n,
            CpMode::Samples { samples } => samples,
            CpMode::Duration { duration_s } => {
                if !(duration_s.is_finite() && duration_s >= 0.0) {
                    return Err(ConfigError::Invalid(format!("invalid CP duration {duration_s}")));
                }
                (duration_s / params.sample_interval()).round() as usize
            }
        };
        if samples > n {
            return Err(ConfigError::Invalid(format!(
                "CP of {samples} samples exceeds the symbol length {n}"
            )));
        }
        Ok(samples)
    }

    /// `params` with this prefix applied.
    pub fn apply(&self, params: &SystemParams) -> Result<SystemParams, ConfigError> {
        Ok(params.clone().with_cp(self.samples(params)?))
    }

    pub fn label(&self) -> String {
        match *self {
            CpMode::Named(CpName::Normal) => "normal".into(),
            CpMode::Named(CpName::Long) => "long".into(),
            CpMode::Samples { samples } => format!("cp{samples}"),
            CpMode::Duration { duration_s } => format!("cp{:.0}ns", duration_s * 1e9),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredecessorSetting {
    #[default]
    WarmUp,
    Zero,
}

impl From<PredecessorSetting> for Predecessor {
    fn from(p: PredecessorSetting) -> Self {
        match p {
            PredecessorSetting::WarmUp => Predecessor::WarmUp,
            PredecessorSetting::Zero => Predecessor::Zero,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EchoModelSetting {
    #[default]
    TimeDomain,
    FrequencyDomain,
}

impl From<EchoModelSetting> for EchoModel {
    fn from(m: EchoModelSetting) -> Self {
        match m {
            EchoModelSetting::TimeDomain => EchoModel::TimeDomain,
            EchoModelSetting::FrequencyDomain => EchoModel::FrequencyDomain,
        }
    }
}

/// How the RMSE sweep maps its SNR axis to a noise power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrDefinition {
    /// MN·|α|²/σ²: echo energy over thermal noise, independent of the prefix.
    #[default]
    Echo,
    /// MN·|α̃|²/σ²_IN at the map peak. Points the prefix interference alone
    /// already pushes below the requested SNR run noise-free and are flagged.
    PostProcessing,
}

/// Physical system parameters in config units (dB, dBi).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub carrier_hz: f64,
    pub subcarrier_spacing_hz: f64,
    /// Profile value when absent.
    pub n_subcarriers: Option<usize>,
    pub n_symbols: Option<usize>,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub noise_figure_db: f64,
    pub temperature_k: f64,
    pub speed_of_light: Option<f64>,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            carrier_hz: 28e9,
            subcarrier_spacing_hz: 120e3,
            n_subcarriers: None,
            n_symbols: None,
            tx_gain_dbi: 25.8,
            rx_gain_dbi: 25.8,
            noise_figure_db: 3.0,
            temperature_k: 290.0,
            speed_of_light: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    pub range_m: f64,
    #[serde(default)]
    pub velocity_mps: f64,
    pub rcs_dbsm: f64,
    #[serde(default)]
    pub phase_rad: f64,
}

impl TargetConfig {
    pub fn to_target(&self) -> Target {
        Target {
            range_m: self.range_m,
            velocity_mps: self.velocity_mps,
            rcs_m2: from_db(self.rcs_dbsm),
            phase_rad: self.phase_rad,
        }
    }
}

/// The two-target range-profile scene: 732.4 m and 976.5 m at 15 m/s.
pub fn default_targets() -> Vec<TargetConfig> {
    [732.4, 976.5]
        .into_iter()
        .map(|range_m| TargetConfig {
            range_m,
            velocity_mps: 15.0,
            rcs_dbsm: 20.0,
            phase_rad: 0.0,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Target ranges for the PSLR/ISLR sweep, strictly increasing.
    pub ranges_m: Vec<f64>,
    pub velocity_mps: f64,
    /// RCS of the swept and randomly drawn single targets.
    pub rcs_dbsm: f64,
    /// SNR axis of the RMSE sweep, strictly increasing.
    pub snr_db: Vec<f64>,
    pub snr_definition: SnrDefinition,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            ranges_m: (0..10).map(|i| 150.0 + 1000.0 * i as f64 / 9.0).collect(),
            velocity_mps: 15.0,
            rcs_dbsm: 5.0,
            snr_db: vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
            snr_definition: SnrDefinition::Echo,
        }
    }
}

/// Everything a config file may set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub profile: Profile,
    pub seed: u64,
    /// Profile value when absent.
    pub trials: Option<u64>,
    pub constellation: String,
    pub cp_modes: Vec<CpMode>,
    pub predecessor: PredecessorSetting,
    pub echo_model: EchoModelSetting,
    pub system: SystemConfig,
    pub targets: Vec<TargetConfig>,
    pub sweep: SweepConfig,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            profile: Profile::Desk,
            seed: 2025,
            trials: None,
            constellation: "qam1024".into(),
            cp_modes: vec![CpMode::NORMAL, CpMode::LONG],
            predecessor: PredecessorSetting::WarmUp,
            echo_model: EchoModelSetting::TimeDomain,
            system: SystemConfig::default(),
            targets: default_targets(),
            sweep: SweepConfig::default(),
        }
    }
}

impl CampaignConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: shown.clone(),
            source,
        })?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => toml::from_str(&text).map_err(|source| ConfigError::Toml { path: shown, source }),
            Some("json") => serde_json::from_str(&text).map_err(|source| ConfigError::Json { path: shown, source }),
            _ => Err(ConfigError::Extension(shown)),
        }
    }

    /// Validated, model-ready campaign.
    pub fn resolve(&self) -> Result<Campaign, ConfigError> {
        let (n, m) = self.profile.grid();
        let s = &self.system;
        let mut params = SystemParams {
            carrier_hz: s.carrier_hz,
            subcarrier_spacing_hz: s.subcarrier_spacing_hz,
            n_subcarriers: s.n_subcarriers.unwrap_or(n),
            n_symbols: s.n_symbols.unwrap_or(m),
            n_cp: 0,
            tx_gain: from_db(s.tx_gain_dbi),
            rx_gain: from_db(s.rx_gain_dbi),
            noise_figure: from_db(s.noise_figure_db),
            temperature_k: s.temperature_k,
            ..SystemParams::default()
        };
        if let Some(c) = s.speed_of_light {
            params.speed_of_light = c;
        }
        params.n_cp = SystemParams::normal_cp_samples(params.n_subcarriers);
        params.validate()?;

        let trials = self.trials.unwrap_or_else(|| self.profile.trials());
        if trials == 0 {
            return Err(ConfigError::Invalid("trials must be at least 1".into()));
        }
        if self.cp_modes.is_empty() {
            return Err(ConfigError::Invalid("at least one CP mode is required".into()));
        }
        for cp in &self.cp_modes {
            cp.samples(&params)?;
        }
        let targets: Vec<Target> = self.targets.iter().map(TargetConfig::to_target).collect();
        for t in &targets {
            t.validate()?;
        }
        let sweep = &self.sweep;
        strictly_increasing("sweep.ranges_m", &sweep.ranges_m)?;
        strictly_increasing("sweep.snr_db", &sweep.snr_db)?;
        let limit = params.unambiguous_range();
        if let Some(&r) = sweep.ranges_m.iter().find(|&&r| !(r > 0.0 && r < limit)) {
            return Err(ConfigError::Invalid(format!(
                "sweep range {r} m outside (0, {limit:.1}) m"
            )));
        }
        if !sweep.rcs_dbsm.is_finite() || !sweep.velocity_mps.is_finite() {
            return Err(ConfigError::Invalid("sweep RCS and velocity must be finite".into()));
        }

        Ok(Campaign {
            profile: self.profile,
            seed: self.seed,
            trials,
            constellation: Constellation::from_token(&self.constellation)?,
            cp_modes: self.cp_modes.clone(),
            predecessor: self.predecessor.into(),
            echo_model: self.echo_model.into(),
            params,
            targets,
            sweep: sweep.clone(),
        })
    }
}

fn strictly_increasing(name: &str, values: &[f64]) -> Result<(), ConfigError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(ConfigError::Invalid(format!("{name} must be finite")));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ConfigError::Invalid(format!("{name} must be strictly increasing")));
    }
    Ok(())
}

/// A resolved campaign. `params.n_cp` holds the normal prefix; experiments
/// apply each entry of `cp_modes` themselves.
#[derive(Debug, Clone)]
pub struct Campaign {
    pub profile: Profile,
    pub seed: u64,
    pub trials: u64,
    pub constellation: Constellation,
    pub cp_modes: Vec<CpMode>,
    pub predecessor: Predecessor,
    pub echo_model: EchoModel,
    pub params: SystemParams,
    pub targets: Vec<Target>,
    pub sweep: SweepConfig,
}

impl Campaign {
    pub fn tolerance(&self, base: f64) -> f64 {
        widen(base, self.trials)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_set_grid_and_trials() {
        let c = CampaignConfig::default().resolve().unwrap();
        assert_eq!((c.params.n_subcarriers, c.params.n_symbols, c.trials), (64, 32, 500));
        assert_eq!(c.params.n_cp, 5);
        let full = CampaignConfig {
            profile: Profile::Full,
            ..Default::default()
        }
        .resolve()
        .unwrap();
        assert_eq!((full.params.n_subcarriers, full.params.n_cp, full.trials), (256, 18, 5000));
    }

    #[test]
    fn cp_modes_parse_from_toml() {
        let cfg: CampaignConfig = toml::from_str(
            r#"
            cp_modes = ["normal", "long", { samples = 9 }, { duration_s = 1e-6 }]
            [system]
            n_subcarriers = 256
            "#,
        )
        .unwrap();
        let c = cfg.resolve().unwrap();
        let got: Vec<usize> = c.cp_modes.iter().map(|m| m.samples(&c.params).unwrap()).collect();
        assert_eq!(got, vec![18, 256, 9, 31]);
        assert_eq!(c.cp_modes[2].label(), "cp9");
    }

    #[test]
    fn rejects_bad_axes_and_keys() {
        let mut cfg = CampaignConfig::default();
        cfg.sweep.snr_db = vec![0.0, 0.0];
        assert!(cfg.resolve().is_err());
        let mut cfg = CampaignConfig::default();
        cfg.sweep.ranges_m = vec![100.0, 5000.0];
        assert!(cfg.resolve().is_err());
        let cfg = CampaignConfig {
            trials: Some(0),
            ..Default::default()
        };
        assert!(cfg.resolve().is_err());
        assert!(toml::from_str::<CampaignConfig>("bogus = 1").is_err());
        assert!(serde_json::from_str::<CampaignConfig>(r#"{"cp_modes": [{"samples": 300}]}"#)
            .unwrap()
            .resolve()
            .is_err());
    }

    #[test]
    fn tolerance_widens_below_reference_trials() {
        assert!((widen(0.2, 500) - 0.2 * 10f64.sqrt()).abs() < 1e-12);
        assert_eq!(widen(0.2, 5000), 0.2);
        assert_eq!(widen(0.2, 20000), 0.2);
    }
}
