//! Scenario configuration.
//!
//! A config file is TOML. It names a preset (`scenario1` when omitted) and
//! overrides any subset of its fields; tables are merged key by key, arrays
//! and scalars replace the preset value. Unknown keys are rejected.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::beamforming::DofRule;
use crate::channel::{Geometry, NodePosition, PathLossModel};
use crate::cli::presets;
use crate::error::{Error, Result};

/// Version tag written into emitted configs and CSV headers.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    pub preset: String,
    pub geometry: GeometryConfig,
    pub radio: RadioConfig,
    pub sensing: SensingConfig,
    pub beamforming: BeamformingConfig,
    pub mac: MacConfig,
    pub run: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub antennas: usize,
    pub secondary_tx: NodePosition,
    pub secondary_receivers: Vec<NodePosition>,
    pub primary_ap: NodePosition,
    pub primary_sta: NodePosition,
}

/// Powers are linear, in mW.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioConfig {
    /// Total secondary transmit power `P_s`.
    pub secondary_power_mw: f64,
    /// Primary transmit power `p_k`.
    pub primary_power_mw: f64,
    /// Noise power at secondary receivers.
    pub secondary_noise_mw: f64,
    /// Noise power at primary receivers.
    pub primary_noise_mw: f64,
    /// Pilot power of the secondary receivers' reverse-link transmissions.
    pub uplink_power_mw: f64,
    pub path_loss: PathLossModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum CsiModel {
    Perfect,
    /// LS over `pilot_count` pilots sent at the transmitting node's power,
    /// received at the sensing noise level.
    Pilot {
        pilot_count: u32,
        noise_mw: f64,
    },
    /// Error variance proportional to each link's mean gain.
    Relative {
        variance: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensingConfig {
    pub alpha: f64,
    pub kpi_threshold: f64,
    pub initial_kpi: f64,
    pub csi: CsiModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimaryRole {
    Ap,
    Sta,
}

impl PrimaryRole {
    /// Index of the node in channel realizations.
    pub fn index(self) -> usize {
        match self {
            PrimaryRole::Ap => 0,
            PrimaryRole::Sta => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    Instantaneous,
    LongTerm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamformingConfig {
    /// DoF rule for `zf4` and adaptive ZF; `zf2` always inverts square.
    pub dof_rule: DofRule,
    /// Primary nodes to null under ZF, in priority order. Trailing entries
    /// are dropped when the antenna count cannot accommodate them.
    pub protect: Vec<PrimaryRole>,
    pub normalization: Normalization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacConfig {
    /// Fraction of slots carrying a new primary packet.
    pub offered_load: f64,
    pub cw_min: u32,
    pub queue_limit: u32,
    /// Energy-detect level at the primary AP, mW.
    pub sensing_threshold_mw: f64,
    pub sinr_threshold_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeOverride {
    Auto,
    Off,
    Omni,
    Mrt,
    Zf2,
    Zf4,
}

impl fmt::Display for SchemeOverride {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeOverride::Auto => "auto",
            SchemeOverride::Off => "off",
            SchemeOverride::Omni => "omni",
            SchemeOverride::Mrt => "mrt",
            SchemeOverride::Zf2 => "zf2",
            SchemeOverride::Zf4 => "zf4",
        })
    }
}

impl FromStr for SchemeOverride {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => SchemeOverride::Auto,
            "off" => SchemeOverride::Off,
            "omni" => SchemeOverride::Omni,
            "mrt" => SchemeOverride::Mrt,
            "zf2" => SchemeOverride::Zf2,
            "zf4" => SchemeOverride::Zf4,
            other => {
                return Err(Error::config(
                    "run.scheme",
                    format!("unknown scheme `{other}` (expected auto, off, omni, mrt, zf2, zf4)"),
                ))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuccessMode {
    /// One packet per stream per slot, delivered iff SINR ≥ threshold.
    #[default]
    Threshold,
    /// Delivered packets accumulate `log2(1 + SINR) / bits_per_hz_per_packet`.
    Shannon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub slots: u64,
    pub slot_duration_s: f64,
    pub seeds: Vec<u64>,
    pub scheme: SchemeOverride,
    /// `[start_s, end_s)` windows in which the secondary transmits; empty
    /// means always.
    pub secondary_active: Vec<[f64; 2]>,
    pub success_mode: SuccessMode,
    pub bits_per_hz_per_packet: f64,
}

impl ScenarioConfig {
    pub fn geometry(&self) -> Geometry {
        Geometry {
            antennas: self.geometry.antennas,
            secondary_tx: self.geometry.secondary_tx,
            secondary_rx: self.geometry.secondary_receivers.clone(),
            primary: vec![self.geometry.primary_ap, self.geometry.primary_sta],
        }
    }

    pub fn sinr_threshold(&self) -> f64 {
        10f64.powf(self.mac.sinr_threshold_db / 10.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != FORMAT_VERSION {
            return Err(Error::config("version", format!("unsupported version {}", self.version)));
        }
        let g = &self.geometry;
        if ![1, 2, 4].contains(&g.antennas) {
            return Err(Error::config("geometry.antennas", format!("must be 1, 2 or 4, got {}", g.antennas)));
        }
        if g.secondary_receivers.is_empty() {
            return Err(Error::config("geometry.secondary_receivers", "at least one receiver is required"));
        }
        self.geometry().validate().map_err(|e| Error::config("geometry", e.to_string()))?;
        let links = self.geometry().link_gains(&self.radio.path_loss);
        links.map_err(|e| Error::config("geometry", e.to_string()))?;

        let r = &self.radio;
        for (name, v) in [
            ("radio.secondary_power_mw", r.secondary_power_mw),
            ("radio.primary_power_mw", r.primary_power_mw),
            ("radio.secondary_noise_mw", r.secondary_noise_mw),
            ("radio.primary_noise_mw", r.primary_noise_mw),
            ("radio.uplink_power_mw", r.uplink_power_mw),
        ] {
            positive(name, v)?;
        }
        r.path_loss.validate().map_err(|e| Error::config("radio.path_loss", e.to_string()))?;

        let s = &self.sensing;
        if !(s.alpha > 0.0 && s.alpha <= 1.0) {
            return Err(Error::config("sensing.alpha", format!("must be in (0, 1], got {}", s.alpha)));
        }
        unit_interval("sensing.kpi_threshold", s.kpi_threshold)?;
        unit_interval("sensing.initial_kpi", s.initial_kpi)?;
        match s.csi {
            CsiModel::Perfect => {}
            CsiModel::Pilot { pilot_count, noise_mw } => {
                if pilot_count == 0 {
                    return Err(Error::config("sensing.csi.pilot_count", "must be > 0"));
                }
                positive("sensing.csi.noise_mw", noise_mw)?;
            }
            CsiModel::Relative { variance } => {
                if !(variance >= 0.0) || !variance.is_finite() {
                    return Err(Error::config("sensing.csi.variance", format!("must be >= 0, got {variance}")));
                }
            }
        }

        let mut seen = Vec::new();
        for role in &self.beamforming.protect {
            if seen.contains(role) {
                return Err(Error::config("beamforming.protect", format!("{role:?} listed twice")));
            }
            seen.push(*role);
        }

        let m = &self.mac;
        unit_interval("mac.offered_load", m.offered_load)?;
        if m.cw_min == 0 {
            return Err(Error::config("mac.cw_min", "must be >= 1"));
        }
        if m.queue_limit == 0 {
            return Err(Error::config("mac.queue_limit", "must be >= 1"));
        }
        positive("mac.sensing_threshold_mw", m.sensing_threshold_mw)?;
        if !m.sinr_threshold_db.is_finite() {
            return Err(Error::config("mac.sinr_threshold_db", "must be finite"));
        }

        let run = &self.run;
        positive("run.slot_duration_s", run.slot_duration_s)?;
        positive("run.bits_per_hz_per_packet", run.bits_per_hz_per_packet)?;
        if run.seeds.is_empty() {
            return Err(Error::config("run.seeds", "seed list must not be empty"));
        }
        for (i, [start, end]) in run.secondary_active.iter().enumerate() {
            if !(start.is_finite() && end.is_finite() && *start >= 0.0 && start < end) {
                return Err(Error::config(
                    format!("run.secondary_active[{i}]"),
                    format!("window [{start}, {end}) must satisfy 0 <= start < end"),
                ));
            }
        }
        let needed = match run.scheme {
            SchemeOverride::Zf2 => 2,
            SchemeOverride::Zf4 => 4,
            _ => 1,
        };
        if g.antennas < needed {
            return Err(Error::config(
                "run.scheme",
                format!("scheme {} needs {needed} antennas, geometry has {}", run.scheme, g.antennas),
            ));
        }
        if matches!(self.beamforming.normalization, Normalization::LongTerm)
            && self.beamforming.dof_rule == DofRule::AllowSquare
        {
            return Err(Error::config(
                "beamforming.normalization",
                "long_term normalization is undefined for square zero-forcing",
            ));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(name, format!("must be a positive finite number, got {v}")))
    }
}

fn unit_interval(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::config(name, format!("must be in [0, 1], got {v}")))
    }
}

/// Recursively overlays `patch` onto `base`: tables merge, everything else
/// replaces. A table carrying a `model` tag selects a different variant and
/// replaces the base table whole.
pub fn merge_tables(base: &mut toml::Table, patch: toml::Table) {
    for (key, value) in patch {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(p)) if !p.contains_key("model") => merge_tables(b, p),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

fn describe_toml_error(e: toml::de::Error) -> Error {
    let msg = e.message().to_string();
    let field = msg.split('`').nth(1).map(str::to_string).unwrap_or_else(|| "<document>".to_string());
    Error::config(field, msg)
}

/// Builds a config from a TOML table: preset base, overlay, validation.
pub fn config_from_table(mut table: toml::Table) -> Result<ScenarioConfig> {
    let preset_name = match table.get("preset") {
        None => "scenario1".to_string(),
        Some(toml::Value::String(s)) => s.clone(),
        Some(_) => return Err(Error::config("preset", "must be a string")),
    };
    let base = presets::preset(&preset_name)?;
    let mut merged = toml::Table::try_from(&base).expect("preset serializes to a table");
    table.entry("preset").or_insert_with(|| toml::Value::String(preset_name));
    merge_tables(&mut merged, table);
    let cfg: ScenarioConfig = merged.try_into().map_err(describe_toml_error)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config_str(text: &str) -> Result<ScenarioConfig> {
    let table: toml::Table = text.parse().map_err(describe_toml_error)?;
    config_from_table(table)
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text)
}
