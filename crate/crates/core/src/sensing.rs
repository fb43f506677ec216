//! Cognitive sensing: interference power detection, least-squares CSI
//! extraction and the primary traffic indicator.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::draw_small_scale;
use crate::error::{Error, Result};
use crate::numerics::CVector;

/// Mean of `|sample|²` over the received samples.
pub fn detect_interference_power(samples: &[Complex64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::NoSamples);
    }
    Ok(samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / samples.len() as f64)
}

/// Known pilot sequence used for least-squares estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PilotModel {
    pub pilot_count: u32,
    pub pilot_power: f64,
    pub noise_power: f64,
}

impl PilotModel {
    pub fn validate(&self) -> Result<()> {
        if self.pilot_count == 0 {
            return Err(Error::InvalidParameter { name: "pilot_count", reason: "must be > 0".into() });
        }
        if !(self.pilot_power > 0.0) || !self.pilot_power.is_finite() {
            return Err(Error::InvalidParameter {
                name: "pilot_power",
                reason: format!("must be > 0, got {}", self.pilot_power),
            });
        }
        if !(self.noise_power >= 0.0) || !self.noise_power.is_finite() {
            return Err(Error::InvalidParameter {
                name: "noise_power",
                reason: format!("must be >= 0, got {}", self.noise_power),
            });
        }
        Ok(())
    }

    /// Per-entry variance of the LS estimation error, `σ² / (P·L)`.
    pub fn error_variance(&self) -> f64 {
        self.noise_power / (self.pilot_power * f64::from(self.pilot_count))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsiEstimate {
    pub vector: CVector,
    pub error_variance: f64,
    pub slot_index: u64,
}

impl CsiEstimate {
    /// Error-free estimate.
    pub fn perfect(vector: CVector, slot_index: u64) -> Self {
        CsiEstimate { vector, error_variance: 0.0, slot_index }
    }
}

/// LS estimate of `true_channel`: the truth plus i.i.d. complex Gaussian
/// error of variance [`PilotModel::error_variance`] per entry.
pub fn estimate_csi_ls<R: Rng + ?Sized>(
    true_channel: &CVector,
    pilots: &PilotModel,
    slot_index: u64,
    rng: &mut R,
) -> Result<CsiEstimate> {
    pilots.validate()?;
    estimate_with_error_variance(true_channel, pilots.error_variance(), slot_index, rng)
}

/// Same error model as [`estimate_csi_ls`] with the variance given directly.
pub fn estimate_with_error_variance<R: Rng + ?Sized>(
    true_channel: &CVector,
    error_variance: f64,
    slot_index: u64,
    rng: &mut R,
) -> Result<CsiEstimate> {
    if !(error_variance >= 0.0) || !error_variance.is_finite() {
        return Err(Error::InvalidParameter {
            name: "error_variance",
            reason: format!("must be >= 0, got {error_variance}"),
        });
    }
    if error_variance == 0.0 {
        return Ok(CsiEstimate::perfect(true_channel.clone(), slot_index));
    }
    let sd = error_variance.sqrt();
    let noisy = true_channel.iter().map(|&h| h + draw_small_scale(rng) * sd).collect();
    Ok(CsiEstimate { vector: CVector::new(noisy)?, error_variance, slot_index })
}

/// Exponentially weighted busy fraction of the primary channel.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct TrafficKpi(f64);

impl TrafficKpi {
    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidParameter { name: "kpi", reason: format!("{value} outside [0, 1]") });
        }
        Ok(TrafficKpi(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `value' = (1 − α)·value + α·busy`, clamped to `[0, 1]`.
pub fn update_traffic_kpi(prev: TrafficKpi, busy_this_slot: bool, alpha: f64) -> Result<TrafficKpi> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter { name: "alpha", reason: format!("{alpha} outside (0, 1]") });
    }
    let sample = if busy_this_slot { 1.0 } else { 0.0 };
    let next = (1.0 - alpha) * prev.0 + alpha * sample;
    Ok(TrafficKpi(next.clamp(0.0, 1.0)))
}
