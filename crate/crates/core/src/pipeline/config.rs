//! Run configuration: one TOML document with a section per stage.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::clustering::ClusterParams;
use crate::error::{Error, Result};
use crate::localization::LocalizationParams;
use crate::scenario::ScenarioConfig;
use crate::tracking::TrackerParams;

/// Environment variable that overrides `output_dir`.
pub const OUTPUT_DIR_ENV: &str = "ISAC_TRACK_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MtiParams {
    /// Averaging window `K`; 0 disables clutter removal.
    pub window: usize,
}

impl Default for MtiParams {
    fn default() -> Self {
        Self { window: 50 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CpiParams {
    /// Frames between consecutive CPI starts; half a CPI when absent.
    pub stride: Option<usize>,
}

/// Transient fake detections injected after localization, one frame each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FaultParams {
    /// Probability that a sensing epoch receives one fake detection.
    pub flash_probability: f64,
    pub flash_area_min_m: [f64; 2],
    pub flash_area_max_m: [f64; 2],
}

impl Default for FaultParams {
    fn default() -> Self {
        Self {
            flash_probability: 0.0,
            flash_area_min_m: [0.0, 0.0],
            flash_area_max_m: [5.0, 6.0],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsParams {
    /// Sensing epochs whose CIR profile and MUSIC spectrum are exported.
    pub dump_epochs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub mti: MtiParams,
    #[serde(default)]
    pub cpi: CpiParams,
    #[serde(default)]
    pub localization: LocalizationParams,
    #[serde(default)]
    pub clustering: ClusterParams,
    #[serde(default)]
    pub tracking: TrackerParams,
    #[serde(default)]
    pub faults: FaultParams,
    #[serde(default)]
    pub diagnostics: DiagnosticsParams,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("output")
}

impl PipelineConfig {
    /// Default stage parameters around a scenario.
    pub fn new(scenario: ScenarioConfig) -> Self {
        Self {
            seed: 0,
            output_dir: default_output_dir(),
            scenario,
            mti: MtiParams::default(),
            cpi: CpiParams::default(),
            localization: LocalizationParams::default(),
            clustering: ClusterParams::default(),
            tracking: TrackerParams::default(),
            faults: FaultParams::default(),
            diagnostics: DiagnosticsParams::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Snapshots per CPI `T_s`.
    pub fn cpi_len(&self) -> usize {
        self.scenario.snapshots_per_cpi
    }

    pub fn cpi_stride(&self) -> usize {
        self.cpi.stride.unwrap_or((self.cpi_len() / 2).max(1))
    }

    /// Time between consecutive sensing epochs (s).
    pub fn epoch_interval(&self) -> f64 {
        self.cpi_stride() as f64 * self.scenario.frame_period()
    }

    /// Tracker parameters with the frame interval set to the epoch interval.
    pub fn tracker_params(&self) -> TrackerParams {
        TrackerParams {
            frame_interval_s: self.epoch_interval(),
            ..self.tracking.clone()
        }
    }

    pub fn validate(self) -> Result<Self> {
        let scenario = self.scenario.clone().validate()?;
        if self.cpi.stride == Some(0) {
            return Err(Error::InvalidConfig("cpi: stride must be >= 1".into()));
        }
        self.localization.validate()?;
        self.clustering.validate()?;
        self.tracker_params().validate()?;
        let f = &self.faults;
        if !(0.0..=1.0).contains(&f.flash_probability) {
            return Err(Error::InvalidConfig("faults: flash_probability must lie in [0, 1]".into()));
        }
        if (0..2).any(|k| f.flash_area_min_m[k].partial_cmp(&f.flash_area_max_m[k]).is_none_or(|o| o.is_gt())) {
            return Err(Error::InvalidConfig("faults: flash area min must not exceed max".into()));
        }
        Ok(Self { scenario, ..self })
    }

    /// SHA-256 of the resolved configuration, excluding `output_dir`.
    pub fn hash(&self) -> Result<String> {
        let canonical = Self {
            output_dir: PathBuf::new(),
            ..self.clone()
        };
        Ok(hex::encode(Sha256::digest(canonical.to_toml()?.as_bytes())))
    }
}

/// Splits `--key value` / `--key=value` arguments into pairs.
pub fn parse_overrides<S: AsRef<str>>(args: &[S]) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut it = args.iter().map(AsRef::as_ref);
    while let Some(arg) = it.next() {
        let Some(key) = arg.strip_prefix("--") else {
            return Err(Error::InvalidConfig(format!("expected --key, got `{arg}`")));
        };
        match key.split_once('=') {
            Some((k, v)) => out.push((k.to_string(), v.to_string())),
            None => {
                let value = it
                    .next()
                    .ok_or_else(|| Error::InvalidConfig(format!("missing value for --{key}")))?;
                out.push((key.to_string(), value.to_string()));
            }
        }
    }
    Ok(out)
}

fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Applies dotted-key overrides to a TOML document and parses the result.
///
/// Keys must name fields of [`PipelineConfig`]; unknown keys are errors.
pub fn apply_overrides(text: &str, overrides: &[(String, String)]) -> Result<PipelineConfig> {
    let mut doc: toml::Table = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    for (key, raw) in overrides {
        let parts: Vec<&str> = key.split('.').collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(Error::InvalidConfig(format!("malformed key `{key}`")));
        }
        let mut table = &mut doc;
        for part in &parts[..parts.len() - 1] {
            let entry = table
                .entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            table = entry
                .as_table_mut()
                .ok_or_else(|| Error::InvalidConfig(format!("`{key}`: `{part}` is not a section")))?;
        }
        table.insert(parts[parts.len() - 1].to_string(), parse_value(raw));
    }
    let config: PipelineConfig = doc
        .try_into()
        .map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
    Ok(config)
}

/// Reads, overrides and validates a configuration file.
///
/// Precedence: file, then the output-directory environment variable, then
/// command-line overrides.
pub fn load_config(path: &Path, overrides: &[(String, String)]) -> Result<PipelineConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut all = Vec::new();
    if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
        all.push(("output_dir".to_string(), toml::Value::String(dir).to_string()));
    }
    all.extend(overrides.iter().cloned());
    apply_overrides(&text, &all)?.validate()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> String {
        let cfg = PipelineConfig::new(ScenarioConfig::prototype_grid());
        cfg.to_toml().unwrap()
    }

    #[test]
    fn toml_round_trip() {
        let text = minimal();
        let cfg = PipelineConfig::from_toml(&text).unwrap();
        assert_eq!(cfg, PipelineConfig::new(ScenarioConfig::prototype_grid()));
    }

    #[test]
    fn override_known_key() {
        let o = parse_overrides(&["--scenario.snr_db", "12.5", "--seed=7"]).unwrap();
        let cfg = apply_overrides(&minimal(), &o).unwrap();
        assert_eq!(cfg.scenario.snr_db, 12.5);
        assert_eq!(cfg.seed, 7);
    }

    #[test]
    fn override_unknown_key_fails() {
        for key in ["--scenario.snr_dbb", "--nosuch.key", "--tracking.gate"] {
            let o = parse_overrides(&[key, "1"]).unwrap();
            assert!(apply_overrides(&minimal(), &o).is_err(), "{key}");
        }
    }

    #[test]
    fn override_optional_and_string_values() {
        let o = parse_overrides(&["--localization.source_count", "2", "--output_dir", "runs/a"]).unwrap();
        let cfg = apply_overrides(&minimal(), &o).unwrap();
        assert_eq!(cfg.localization.source_count, Some(2));
        assert_eq!(cfg.output_dir, PathBuf::from("runs/a"));
    }

    #[test]
    fn dangling_flag_is_an_error() {
        assert!(parse_overrides(&["--seed"]).is_err());
        assert!(parse_overrides(&["seed", "1"]).is_err());
    }

    #[test]
    fn hash_ignores_output_dir() {
        let a = PipelineConfig::new(ScenarioConfig::prototype_grid());
        let mut b = a.clone();
        b.output_dir = PathBuf::from("elsewhere");
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        b.seed = 1;
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
    }

    #[test]
    fn default_stride_is_half_cpi() {
        let cfg = PipelineConfig::new(ScenarioConfig::prototype_grid());
        assert_eq!(cfg.cpi_stride(), 8);
        assert!((cfg.epoch_interval() - 0.032).abs() < 1e-12);
    }

    #[test]
    fn validation_reaches_every_section() {
        let mut cfg = PipelineConfig::new(ScenarioConfig::prototype_grid());
        cfg.clustering.min_points = 0;
        assert!(cfg.validate().is_err());
    }
}
