//! Scheme selection and linear precoder construction.
//!
//! A [`PrecodingMatrix`] holds one column per data stream. Stream `s` is sent
//! as `sqrt(stream_power)·w_s·x_s`, so the radiated power is
//! `stream_power·‖G‖_F²`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{hermitian, pinv_right, CMatrix, CVector};
use crate::sensing::{CsiEstimate, TrafficKpi};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Omni,
    Mrt,
    Zf,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Omni => "omni",
            Scheme::Mrt => "mrt",
            Scheme::Zf => "zf",
        })
    }
}

/// How the precoder is scaled to the power budget.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PowerNormalization {
    /// Rescaled every slot so the radiated power is exactly the budget.
    #[default]
    Instantaneous,
    /// Fixed scaling from the ensemble mean of the unnormalized precoder norm
    /// over i.i.d. Rayleigh channels with per-entry variance
    /// `channel_variance`. For ZF the budget is split equally over every row
    /// of the compound channel, nulled users included, and only the data
    /// columns are radiated. This is the convention under which
    /// [`expected_sinr_mrt`] and [`expected_sinr_zf`] hold.
    LongTerm { channel_variance: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBudget {
    pub total_power: f64,
    pub normalization: PowerNormalization,
}

impl PowerBudget {
    pub fn instantaneous(total_power: f64) -> Self {
        PowerBudget { total_power, normalization: PowerNormalization::Instantaneous }
    }

    fn validate(&self) -> Result<()> {
        if !(self.total_power > 0.0) || !self.total_power.is_finite() {
            return Err(Error::InvalidParameter {
                name: "total_power",
                reason: format!("must be > 0, got {}", self.total_power),
            });
        }
        if let PowerNormalization::LongTerm { channel_variance } = self.normalization {
            if !(channel_variance > 0.0) || !channel_variance.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "channel_variance",
                    reason: format!("must be > 0, got {channel_variance}"),
                });
            }
        }
        Ok(())
    }
}

/// Antenna-count requirement for zero-forcing with `S` streams and `K`
/// nulled users.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DofRule {
    /// `N_t > S + K`
    #[default]
    Strict,
    /// `N_t >= S + K`; a square compound channel is inverted outright.
    AllowSquare,
}

impl DofRule {
    pub fn admits(self, antennas: usize, constrained: usize) -> bool {
        match self {
            DofRule::Strict => antennas > constrained,
            DofRule::AllowSquare => antennas >= constrained,
        }
    }

    /// Largest `S + K` the rule admits with `antennas` antennas.
    pub fn max_constrained(self, antennas: usize) -> usize {
        match self {
            DofRule::Strict => antennas.saturating_sub(1),
            DofRule::AllowSquare => antennas,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecodingMatrix {
    /// `N_t × streams`
    pub g: CMatrix,
    pub scheme: Scheme,
    /// Factor applied to the unnormalized precoder.
    pub power_scale: f64,
    /// Power of each unit-variance data symbol.
    pub stream_power: f64,
}

impl PrecodingMatrix {
    pub fn antennas(&self) -> usize {
        self.g.rows()
    }

    pub fn streams(&self) -> usize {
        self.g.cols()
    }

    /// Sum of per-antenna transmit powers.
    pub fn total_power(&self) -> f64 {
        self.stream_power * self.g.frobenius_norm_sqr()
    }

    /// Received amplitude `sqrt(p)·row·w_s` of stream `s` through channel `row`.
    pub fn amplitude(&self, row: &CVector, s: usize) -> Complex64 {
        let w = self.g.column(s);
        row.dot(&w) * self.stream_power.sqrt()
    }

    /// Total power of all streams received through `row`, summed over
    /// streams since the data symbols are independent.
    pub fn received_power(&self, row: &CVector) -> f64 {
        (0..self.streams()).map(|s| self.amplitude(row, s).norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeDecision {
    pub scheme: Scheme,
    pub kpi_at_decision: f64,
    pub threshold: f64,
}

/// MRT when the primary activity indicator is strictly below the threshold,
/// ZF otherwise.
pub fn select_scheme(kpi: TrafficKpi, threshold: f64) -> SchemeDecision {
    let scheme = if kpi.value() < threshold { Scheme::Mrt } else { Scheme::Zf };
    SchemeDecision { scheme, kpi_at_decision: kpi.value(), threshold }
}

fn stack_rows(estimates: &[CsiEstimate], antennas: Option<usize>) -> Result<CMatrix> {
    if let Some(n) = antennas {
        if let Some(bad) = estimates.iter().position(|e| e.vector.len() != n) {
            return Err(Error::InvalidCsi(format!(
                "estimate {bad} has {} entries, expected {n}",
                estimates[bad].vector.len()
            )));
        }
    }
    CMatrix::from_rows(estimates.iter().map(|e| &e.vector)).map_err(|e| Error::InvalidCsi(e.to_string()))
}

/// Single stream from antenna 0 at the full budget.
pub fn omni_precoder(antennas: usize, budget: &PowerBudget) -> Result<PrecodingMatrix> {
    budget.validate()?;
    if antennas == 0 {
        return Err(Error::InvalidCsi("antenna count must be positive".into()));
    }
    let mut g = CMatrix::zeros(antennas, 1);
    g[(0, 0)] = Complex64::new(1.0, 0.0);
    Ok(PrecodingMatrix { g, scheme: Scheme::Omni, power_scale: 1.0, stream_power: budget.total_power })
}

/// Matched filter `G = Hᴴ` over the scheduled users' estimated channels.
pub fn mrt_precoder(h_est: &[CsiEstimate], budget: &PowerBudget) -> Result<PrecodingMatrix> {
    budget.validate()?;
    let first = h_est.first().ok_or_else(|| Error::InvalidCsi("no scheduled users".into()))?;
    let h = stack_rows(h_est, Some(first.vector.len()))?;
    let raw = hermitian(&h);
    let streams = raw.cols();
    let scale = match budget.normalization {
        PowerNormalization::Instantaneous => {
            let norm = raw.frobenius_norm_sqr();
            if norm <= 0.0 {
                return Err(Error::InvalidCsi("all estimated channels are zero".into()));
            }
            (streams as f64 / norm).sqrt()
        }
        PowerNormalization::LongTerm { channel_variance } => (1.0 / (raw.rows() as f64 * channel_variance)).sqrt(),
    };
    Ok(PrecodingMatrix {
        g: raw.scale(scale),
        scheme: Scheme::Mrt,
        power_scale: scale,
        stream_power: budget.total_power / streams as f64,
    })
}

/// Zero-forcing over the compound channel `[H_s; G_k]` (secondary rows first,
/// then the primary users to protect). The returned matrix keeps only the
/// secondary data columns of the right pseudoinverse; those already satisfy
/// `g_k·w_s = 0` for every listed primary user.
pub fn zf_precoder(
    h_est: &[CsiEstimate],
    g_est: &[CsiEstimate],
    budget: &PowerBudget,
    rule: DofRule,
) -> Result<PrecodingMatrix> {
    budget.validate()?;
    let first = h_est.first().ok_or_else(|| Error::InvalidCsi("no scheduled users".into()))?;
    let antennas = first.vector.len();
    let streams = h_est.len();
    let constrained = streams + g_est.len();
    if !rule.admits(antennas, constrained) {
        return Err(Error::InsufficientDoF { antennas, constrained });
    }
    let compound: Vec<CsiEstimate> = h_est.iter().chain(g_est).cloned().collect();
    let h_zf = stack_rows(&compound, Some(antennas))?;
    // the singularity test applies to the channel at unit RMS entry scale
    let rms = (h_zf.frobenius_norm_sqr() / (h_zf.rows() * h_zf.cols()) as f64).sqrt();
    if !(rms > 0.0) {
        return Err(Error::SingularMatrix { pivot: 0, value: 0.0 });
    }
    let full = pinv_right(&h_zf.scale(1.0 / rms))?.scale(1.0 / rms);
    let data = full.leading_columns(streams);
    let (scale, stream_power) = match budget.normalization {
        PowerNormalization::Instantaneous => {
            let norm = data.frobenius_norm_sqr();
            ((streams as f64 / norm).sqrt(), budget.total_power / streams as f64)
        }
        PowerNormalization::LongTerm { channel_variance } => {
            if antennas <= constrained {
                // E[tr((H Hᴴ)⁻¹)] diverges for a square Gaussian matrix
                return Err(Error::InsufficientDoF { antennas, constrained });
            }
            let k = constrained as f64;
            // E‖full‖_F² = k / ((N_t − k)·variance); one unit per compound column
            let scale = ((antennas as f64 - k) * channel_variance).sqrt();
            (scale, budget.total_power / k)
        }
    };
    Ok(PrecodingMatrix { g: data.scale(scale), scheme: Scheme::Zf, power_scale: scale, stream_power })
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, reason: format!("must be > 0, got {v}") })
    }
}

/// Closed-form MRT SINR `P·N_t / (S·(P + 1))` at unit noise power.
pub fn expected_sinr_mrt(p_s: f64, n_t: usize, s_s: usize) -> Result<f64> {
    check_positive("p_s", p_s)?;
    check_positive("n_t", n_t as f64)?;
    check_positive("s_s", s_s as f64)?;
    Ok(p_s * n_t as f64 / (s_s as f64 * (p_s + 1.0)))
}

/// Closed-form ZF SINR `P·(N_t − (S + K)) / (S + K)` at unit noise power.
pub fn expected_sinr_zf(p_s: f64, n_t: usize, s_s: usize, k_r: usize) -> Result<f64> {
    check_positive("p_s", p_s)?;
    check_positive("s_s", s_s as f64)?;
    let constrained = s_s + k_r;
    if n_t <= constrained {
        return Err(Error::InsufficientDoF { antennas: n_t, constrained });
    }
    Ok(p_s * (n_t - constrained) as f64 / constrained as f64)
}
