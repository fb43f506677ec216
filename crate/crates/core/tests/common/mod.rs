//! Independent oracles shared by the integration tests. Nothing here calls
//! the engine's SINR or normalization code; quantities are re-derived from
//! raw channel coefficients.

#![allow(dead_code)]

use beamshare_core::channel::ChannelRealization;
use beamshare_core::numerics::CVector;
use beamshare_core::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Unit-variance circularly symmetric complex Gaussian.
pub fn cn<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn cn_vector<R: Rng>(rng: &mut R, n: usize, variance: f64) -> CVector {
    CVector::new((0..n).map(|_| cn(rng) * variance.sqrt()).collect()).unwrap()
}

/// Accumulates per-stream received amplitudes over channel draws and forms
/// the effective SINR `|E[a]|²·p / (p·Var[a] + Σ p·E|c|² + σ²)`, where `a` is
/// the amplitude of the desired stream and `c` runs over the others.
#[derive(Default)]
pub struct EffectiveSinr {
    n: f64,
    sum: Complex64,
    sum_sq: f64,
    cross_sq: f64,
}

impl EffectiveSinr {
    pub fn add(&mut self, desired: Complex64, cross: &[Complex64]) {
        self.n += 1.0;
        self.sum += desired;
        self.sum_sq += desired.norm_sqr();
        self.cross_sq += cross.iter().map(|c| c.norm_sqr()).sum::<f64>();
    }

    /// Amplitudes passed to `add` already include `sqrt(p)`.
    pub fn value(&self, noise: f64) -> f64 {
        let mean = self.sum / self.n;
        let var = self.sum_sq / self.n - mean.norm_sqr();
        mean.norm_sqr() / (var + self.cross_sq / self.n + noise)
    }
}

/// `Σ_n row[n]·w[n]` written out term by term.
pub fn bilinear(row: &[Complex64], w: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..row.len() {
        acc += row[n] * w[n];
    }
    acc
}

/// Column `s` of an `N_t × S` matrix given as nested rows.
pub fn column(g: &[Vec<Complex64>], s: usize) -> Vec<Complex64> {
    g.iter().map(|r| r[s]).collect()
}

#[allow(clippy::too_many_arguments)]
/// Secondary SINR of the stream in column `col`, serving `user`, expanded
/// from its definition.
pub fn secondary_sinr_expanded(
    r: &ChannelRealization,
    g: &[Vec<Complex64>],
    stream_power: f64,
    user: usize,
    col: usize,
    primary_active: &[usize],
    primary_power: f64,
    noise: f64,
) -> f64 {
    let h = r.h[user].as_slice();
    let streams = g[0].len();
    let signal = stream_power * bilinear(h, &column(g, col)).norm_sqr();
    let mut interference = 0.0;
    for other in 0..streams {
        if other != col {
            interference += stream_power * bilinear(h, &column(g, other)).norm_sqr();
        }
    }
    for &k in primary_active {
        interference += primary_power * r.q_cross[k][user].norm_sqr();
    }
    signal / (interference + noise)
}

/// Primary SINR at `rx` from `tx` with the secondary leaking through `g`.
pub fn primary_sinr_expanded(
    r: &ChannelRealization,
    g: Option<(&[Vec<Complex64>], f64)>,
    primary_active: &[usize],
    tx: usize,
    rx: usize,
    primary_power: f64,
    noise: f64,
) -> f64 {
    let signal = primary_power * r.q_prim[tx][rx].norm_sqr();
    let mut interference = 0.0;
    if let Some((g, p)) = g {
        for s in 0..g[0].len() {
            interference += p * bilinear(r.g[rx].as_slice(), &column(g, s)).norm_sqr();
        }
    }
    for &k in primary_active {
        if k != tx && k != rx {
            interference += primary_power * r.q_prim[k][rx].norm_sqr();
        }
    }
    signal / (interference + noise)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn sample_sd(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)).sqrt()
}

/// One-sided 95% Student t quantiles for 1..=30 degrees of freedom.
const T95: [f64; 30] = [
    6.314, 2.920, 2.353, 2.132, 2.015, 1.943, 1.895, 1.860, 1.833, 1.812, 1.796, 1.782, 1.771, 1.761, 1.753, 1.746,
    1.740, 1.734, 1.729, 1.725, 1.721, 1.717, 1.714, 1.711, 1.708, 1.706, 1.703, 1.701, 1.699, 1.697,
];

pub fn t95_one_sided(df: usize) -> f64 {
    T95[df.clamp(1, 30) - 1]
}

/// Paired differences `a[i] − b[i]`: mean and standard error.
pub fn paired(a: &[f64], b: &[f64]) -> (f64, f64) {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    (mean(&d), sample_sd(&d) / (d.len() as f64).sqrt())
}

/// One-sided paired t-test of `a < b` at 95%.
pub fn significantly_less(a: &[f64], b: &[f64]) -> (bool, f64) {
    let (m, se) = paired(a, b);
    let t = -m / se;
    (t > t95_one_sided(a.len() - 1), t)
}

/// Two one-sided tests: the paired mean difference lies within `±margin`
/// at 95%, i.e. its 90% confidence interval is inside the margin.
pub fn equivalent(a: &[f64], b: &[f64], margin: f64) -> (bool, f64, f64) {
    let (m, se) = paired(a, b);
    let half = t95_one_sided(a.len() - 1) * se;
    (m - half > -margin && m + half < margin, m - half, m + half)
}
