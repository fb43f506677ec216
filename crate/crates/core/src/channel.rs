//! Block-fading channel realizations.
//!
//! Every coefficient is `sqrt(path_gain(d))` times an independent unit-variance
//! circularly symmetric complex Gaussian draw. Coefficients are fixed within a
//! slot and redrawn independently for the next one.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::CVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodePosition {
    pub x: f64,
    pub y: f64,
}

impl NodePosition {
    pub const fn new(x: f64, y: f64) -> Self {
        NodePosition { x, y }
    }

    pub fn distance(&self, other: &NodePosition) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Log-distance path loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossModel {
    pub exponent: f64,
    pub reference_loss_db: f64,
    pub reference_distance_m: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        PathLossModel { exponent: 3.0, reference_loss_db: 40.0, reference_distance_m: 1.0 }
    }
}

impl PathLossModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.exponent >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "exponent",
                reason: format!("must be >= 1, got {}", self.exponent),
            });
        }
        if !(self.reference_distance_m > 0.0) || !self.reference_distance_m.is_finite() {
            return Err(Error::InvalidParameter {
                name: "reference_distance_m",
                reason: format!("must be > 0, got {}", self.reference_distance_m),
            });
        }
        if !self.reference_loss_db.is_finite() {
            return Err(Error::InvalidParameter { name: "reference_loss_db", reason: "must be finite".into() });
        }
        Ok(())
    }
}

/// Linear power gain at distance `d` meters. Distances below the reference
/// distance are clamped to it.
pub fn path_gain(model: &PathLossModel, d: f64) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::InvalidGeometry(format!("link distance must be > 0, got {d}")));
    }
    let d = d.max(model.reference_distance_m);
    let loss_db = model.reference_loss_db + 10.0 * model.exponent * (d / model.reference_distance_m).log10();
    Ok(10f64.powf(-loss_db / 10.0))
}

/// One unit-variance Rayleigh coefficient: real and imaginary parts are
/// i.i.d. normal with variance 1/2.
pub fn draw_small_scale<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Node layout of a scenario. All antennas of the secondary transmitter share
/// its position.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub antennas: usize,
    pub secondary_tx: NodePosition,
    pub secondary_rx: Vec<NodePosition>,
    pub primary: Vec<NodePosition>,
}

/// Mean (large-scale) power gains of every link in a [`Geometry`].
#[derive(Debug, Clone, PartialEq)]
pub struct LinkGains {
    /// secondary tx -> secondary rx `s`
    pub secondary: Vec<f64>,
    /// secondary tx -> primary node `k`
    pub to_primary: Vec<f64>,
    /// primary node `k` -> secondary rx `s`, indexed `[k][s]`
    pub cross: Vec<Vec<f64>>,
    /// primary node `k` -> primary node `j`, indexed `[k][j]`; diagonal is 0
    pub primary: Vec<Vec<f64>>,
}

impl Geometry {
    pub fn validate(&self) -> Result<()> {
        if self.antennas == 0 {
            return Err(Error::InvalidGeometry("antenna count must be positive".into()));
        }
        let all = std::iter::once(&self.secondary_tx).chain(&self.secondary_rx).chain(&self.primary);
        if !all.into_iter().all(NodePosition::is_finite) {
            return Err(Error::InvalidGeometry("node coordinates must be finite".into()));
        }
        Ok(())
    }

    pub fn link_gains(&self, model: &PathLossModel) -> Result<LinkGains> {
        self.validate()?;
        let tx = &self.secondary_tx;
        let secondary =
            self.secondary_rx.iter().map(|rx| path_gain(model, tx.distance(rx))).collect::<Result<Vec<_>>>()?;
        let to_primary = self.primary.iter().map(|p| path_gain(model, tx.distance(p))).collect::<Result<Vec<_>>>()?;
        let cross = self
            .primary
            .iter()
            .map(|k| self.secondary_rx.iter().map(|s| path_gain(model, k.distance(s))).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        let primary = self
            .primary
            .iter()
            .enumerate()
            .map(|(ki, k)| {
                self.primary
                    .iter()
                    .enumerate()
                    .map(|(ji, j)| if ki == ji { Ok(0.0) } else { path_gain(model, k.distance(j)) })
                    .collect()
            })
            .collect::<Result<Vec<Vec<_>>>>()?;
        Ok(LinkGains { secondary, to_primary, cross, primary })
    }
}

/// Channel state for one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub slot_index: u64,
    /// secondary tx antennas -> secondary rx `s`
    pub h: Vec<CVector>,
    /// secondary tx antennas -> primary node `k`
    pub g: Vec<CVector>,
    /// primary node `k` -> secondary rx `s`, `[k][s]`
    pub q_cross: Vec<Vec<Complex64>>,
    /// primary node `k` -> primary node `j`, `[k][j]`; diagonal is zero
    pub q_prim: Vec<Vec<Complex64>>,
}

impl ChannelRealization {
    pub fn antennas(&self) -> usize {
        self.h.first().or(self.g.first()).map_or(0, CVector::len)
    }
}

fn draw_vector<R: Rng + ?Sized>(gain: f64, n: usize, rng: &mut R) -> Result<CVector> {
    let amp = gain.sqrt();
    CVector::new((0..n).map(|_| draw_small_scale(rng) * amp).collect())
}

/// Draws every coefficient of slot `slot_index`. Draw order is fixed:
/// `h` by receiver then antenna, `g` by primary node then antenna, then
/// `q_cross` and `q_prim` row by row.
pub fn realize_slot<R: Rng + ?Sized>(
    gains: &LinkGains,
    antennas: usize,
    slot_index: u64,
    rng: &mut R,
) -> Result<ChannelRealization> {
    if antennas == 0 {
        return Err(Error::InvalidGeometry("antenna count must be positive".into()));
    }
    let h = gains.secondary.iter().map(|&b| draw_vector(b, antennas, rng)).collect::<Result<_>>()?;
    let g = gains.to_primary.iter().map(|&b| draw_vector(b, antennas, rng)).collect::<Result<_>>()?;
    let q_cross =
        gains.cross.iter().map(|row| row.iter().map(|&b| draw_small_scale(rng) * b.sqrt()).collect()).collect();
    let q_prim = gains
        .primary
        .iter()
        .map(|row| {
            row.iter()
                .map(|&b| if b == 0.0 { Complex64::new(0.0, 0.0) } else { draw_small_scale(rng) * b.sqrt() })
                .collect()
        })
        .collect();
    Ok(ChannelRealization { slot_index, h, g, q_cross, q_prim })
}

/// Convenience wrapper computing link gains from geometry first.
pub fn realize_geometry<R: Rng + ?Sized>(
    geometry: &Geometry,
    model: &PathLossModel,
    slot_index: u64,
    rng: &mut R,
) -> Result<ChannelRealization> {
    let gains = geometry.link_gains(model)?;
    realize_slot(&gains, geometry.antennas, slot_index, rng)
}

/// Random-stream purposes carved out of one run seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Channel = 0,
    Sensing = 1,
    Mac = 2,
}

/// Generator for one (seed, slot, purpose) triple, so that each slot's draws
/// depend only on the seed and the slot index.
pub fn slot_rng(seed: u64, slot_index: u64, purpose: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(slot_index.wrapping_mul(4).wrapping_add(purpose as u64));
    rng
}
