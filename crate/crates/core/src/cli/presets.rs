//! Built-in scenarios on a 4×4 grid with 2 m pitch.
//!
//! Grid locations are numbered 1..=16 column by column: location `n` sits at
//! `x = 2·((n−1) / 4)`, `y = 2·((n−1) % 4)` meters. Locations 1–4 form the
//! left column, where the secondary array is mounted in scenarios 2 and 3.

use crate::beamforming::DofRule;
use crate::channel::{NodePosition, PathLossModel};
use crate::cli::config::*;
use crate::error::{Error, Result};

pub const GRID_PITCH_M: f64 = 2.0;
pub const PRESET_NAMES: [&str; 3] = ["scenario1", "scenario2", "scenario3"];

/// Position of grid location `id` (1-based).
pub fn grid_location(id: u8) -> NodePosition {
    assert!((1..=16).contains(&id), "grid location {id} outside 1..=16");
    let i = f64::from(id - 1);
    NodePosition::new(GRID_PITCH_M * (i / 4.0).floor(), GRID_PITCH_M * (i % 4.0))
}

/// Center of the left column, shared by the antennas of locations 1–4.
pub fn left_column_array() -> NodePosition {
    NodePosition::new(0.0, 1.5 * GRID_PITCH_M)
}

fn dbm(v: f64) -> f64 {
    10f64.powf(v / 10.0)
}

fn base(name: &str, geometry: GeometryConfig, offered_load: f64) -> ScenarioConfig {
    ScenarioConfig {
        version: FORMAT_VERSION,
        preset: name.to_string(),
        geometry,
        radio: RadioConfig {
            secondary_power_mw: dbm(0.0),
            primary_power_mw: dbm(0.0),
            secondary_noise_mw: dbm(-90.0),
            primary_noise_mw: dbm(-90.0),
            uplink_power_mw: dbm(0.0),
            path_loss: PathLossModel::default(),
        },
        sensing: SensingConfig {
            alpha: 0.05,
            kpi_threshold: 0.5,
            initial_kpi: 0.0,
            csi: CsiModel::Pilot { pilot_count: 64, noise_mw: dbm(-90.0) },
        },
        beamforming: BeamformingConfig {
            dof_rule: DofRule::Strict,
            protect: vec![PrimaryRole::Ap, PrimaryRole::Sta],
            normalization: Normalization::Instantaneous,
        },
        mac: MacConfig {
            offered_load,
            cw_min: 16,
            queue_limit: 1000,
            sensing_threshold_mw: dbm(-62.0),
            sinr_threshold_db: 5.0,
        },
        run: RunConfig {
            slots: 60_000,
            slot_duration_s: 1e-3,
            seeds: (1..=10).collect(),
            scheme: SchemeOverride::Auto,
            secondary_active: Vec::new(),
            success_mode: SuccessMode::Threshold,
            bits_per_hz_per_packet: 2.0,
        },
    }
}

/// Single room: every node within a few meters of every other.
pub fn scenario1() -> ScenarioConfig {
    base(
        "scenario1",
        GeometryConfig {
            antennas: 4,
            secondary_tx: grid_location(1),
            secondary_receivers: vec![grid_location(2)],
            primary_ap: grid_location(5),
            primary_sta: grid_location(7),
        },
        1.0,
    )
}

/// Array on the left column, AP at location 11, STA at location 7.
pub fn scenario2() -> ScenarioConfig {
    base(
        "scenario2",
        GeometryConfig {
            antennas: 4,
            secondary_tx: left_column_array(),
            secondary_receivers: vec![grid_location(14)],
            primary_ap: grid_location(11),
            primary_sta: grid_location(7),
        },
        0.05,
    )
}

/// Array on the left column, AP at location 10, STA at location 8.
pub fn scenario3() -> ScenarioConfig {
    base(
        "scenario3",
        GeometryConfig {
            antennas: 4,
            secondary_tx: left_column_array(),
            secondary_receivers: vec![grid_location(13)],
            primary_ap: grid_location(10),
            primary_sta: grid_location(8),
        },
        1.0,
    )
}

pub fn preset(name: &str) -> Result<ScenarioConfig> {
    match name {
        "scenario1" => Ok(scenario1()),
        "scenario2" => Ok(scenario2()),
        "scenario3" => Ok(scenario3()),
        other => Err(Error::config(
            "preset",
            format!("unknown preset `{other}` (expected one of {})", PRESET_NAMES.join(", ")),
        )),
    }
}

/// Grid locations usable as secondary receiver sites: not the AP, not the
/// STA, not the transmitter's own location, and outside the left column when
/// the array occupies it.
pub fn free_locations(cfg: &ScenarioConfig) -> Vec<u8> {
    let g = &cfg.geometry;
    let array_column = g.secondary_tx == left_column_array();
    (1..=16)
        .filter(|&id| {
            let p = grid_location(id);
            p != g.primary_ap && p != g.primary_sta && p != g.secondary_tx && !(array_column && id <= 4)
        })
        .collect()
}
