//! Slot-loop engine: channel → sensing → scheme → schedule → precoding →
//! primary access → SINR → delivery, accumulated into [`RunMetrics`].
//!
//! Each slot draws from three independent random streams (channel, sensing,
//! MAC) keyed by `(seed, slot)`, so runs with different schemes but the same
//! seed see identical channels and identical primary arrivals.

use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;

use crate::beamforming::{
    mrt_precoder, omni_precoder, select_scheme, zf_precoder, DofRule, PowerBudget, PowerNormalization, PrecodingMatrix,
    Scheme,
};
use crate::channel::{realize_slot, slot_rng, ChannelRealization, LinkGains, Stream};
use crate::cli::config::{CsiModel, Normalization, PrimaryRole, ScenarioConfig, SchemeOverride, SuccessMode};
use crate::error::{Error, Result};
use crate::mac_traffic::{sensing_threshold_check, PrimaryMacState, RoundRobin, SecondarySchedule};
use crate::numerics::{CMatrix, CVector};
use crate::sensing::{
    estimate_csi_ls, estimate_with_error_variance, update_traffic_kpi, CsiEstimate, PilotModel, TrafficKpi,
};

/// Index of the primary transmitter (AP) in realizations.
pub const PRIMARY_TX: usize = 0;
/// Index of the primary receiver (STA) in realizations.
pub const PRIMARY_RX: usize = 1;

const MAC_INIT_SLOT: u64 = u64::MAX / 4;

/// Secondary SINR of every scheduled stream. Column `i` of `precoding`
/// carries the stream of `schedule.served_users[i]`. Inter-stream and
/// primary interference are summed in power, the data symbols being
/// independent.
pub fn compute_sinr_secondary(
    realization: &ChannelRealization,
    precoding: &PrecodingMatrix,
    schedule: &SecondarySchedule,
    primary_active: &[usize],
    primary_power: f64,
    noise: f64,
) -> Result<Vec<(usize, f64)>> {
    if precoding.streams() != schedule.len() {
        return Err(Error::Inconsistent(format!(
            "{} precoder columns for {} scheduled users",
            precoding.streams(),
            schedule.len()
        )));
    }
    schedule
        .served_users
        .iter()
        .enumerate()
        .map(|(col, &user)| {
            let h = realization
                .h
                .get(user)
                .ok_or_else(|| Error::Inconsistent(format!("no channel for secondary user {user}")))?;
            if h.len() != precoding.antennas() {
                return Err(Error::Inconsistent(format!(
                    "channel has {} antennas, precoder {}",
                    h.len(),
                    precoding.antennas()
                )));
            }
            let signal = precoding.amplitude(h, col).norm_sqr();
            let cross: f64 = (0..precoding.streams())
                .filter(|&other| other != col)
                .map(|other| precoding.amplitude(h, other).norm_sqr())
                .sum();
            let primary = primary_interference(primary_active, primary_power, |k| {
                realization.q_cross.get(k).and_then(|row| row.get(user)).copied()
            })?;
            Ok((user, signal / (cross + primary + noise)))
        })
        .collect()
}

fn primary_interference(active: &[usize], power: f64, coeff: impl Fn(usize) -> Option<Complex64>) -> Result<f64> {
    active
        .iter()
        .map(|&k| {
            coeff(k)
                .map(|q| power * q.norm_sqr())
                .ok_or_else(|| Error::Inconsistent(format!("no coefficient for primary node {k}")))
        })
        .sum()
}

/// SINR at primary receiver `rx` served by primary transmitter `tx`.
/// `precoding` is `None` when the secondary is silent.
pub fn compute_sinr_primary(
    realization: &ChannelRealization,
    precoding: Option<&PrecodingMatrix>,
    primary_active: &[usize],
    tx: usize,
    rx: usize,
    primary_power: f64,
    noise: f64,
) -> Result<f64> {
    if !primary_active.contains(&tx) {
        return Err(Error::NotTransmitting);
    }
    let q = |k: usize| realization.q_prim.get(k).and_then(|row| row.get(rx)).copied();
    let signal = primary_power * q(tx).ok_or_else(|| Error::Inconsistent(format!("no link {tx} -> {rx}")))?.norm_sqr();
    let leakage = match precoding {
        Some(p) => {
            let g =
                realization.g.get(rx).ok_or_else(|| Error::Inconsistent(format!("no channel to primary node {rx}")))?;
            if g.len() != p.antennas() {
                return Err(Error::Inconsistent("precoder and channel disagree on antenna count".into()));
            }
            p.received_power(g)
        }
        None => 0.0,
    };
    let others: Vec<usize> = primary_active.iter().copied().filter(|&k| k != tx && k != rx).collect();
    let other = primary_interference(&others, primary_power, q)?;
    Ok(signal / (leakage + other + noise))
}

/// Hard-threshold packet detection; the boundary counts as success.
pub fn packet_success(sinr: f64, threshold_sinr: f64) -> bool {
    sinr >= threshold_sinr
}

/// Jain's index `(Σx)² / (n·Σx²)`.
pub fn jain_index(throughputs: &[f64]) -> Result<f64> {
    if throughputs.is_empty() {
        return Err(Error::Undefined("no nodes"));
    }
    if throughputs.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidParameter { name: "throughputs", reason: "must be finite and non-negative".into() });
    }
    let sum: f64 = throughputs.iter().sum();
    let sum_sq: f64 = throughputs.iter().map(|x| x * x).sum();
    if sum_sq == 0.0 {
        return Err(Error::Undefined("all throughputs are zero"));
    }
    Ok(sum * sum / (throughputs.len() as f64 * sum_sq))
}

/// The scheme actually used in a slot, with the sub-array size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActiveScheme {
    pub scheme: Scheme,
    pub antennas: usize,
    pub rule: DofRule,
}

impl ActiveScheme {
    pub fn label(&self) -> String {
        match self.scheme {
            Scheme::Omni => "omni".to_string(),
            Scheme::Mrt => format!("mrt{}", self.antennas),
            Scheme::Zf => format!("zf{}", self.antennas),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotReport {
    pub slot_index: u64,
    pub scheme_used: Option<ActiveScheme>,
    pub kpi: f64,
    pub primary_transmitted: bool,
    pub primary_deferred: bool,
    /// `(user, SINR)` for each scheduled secondary stream.
    pub sinr_secondary: Vec<(usize, f64)>,
    pub sinr_primary: Option<f64>,
    /// Mean secondary power received at the primary nodes, mW; `None` while
    /// the secondary is silent.
    pub leakage: Option<f64>,
    pub delivered_primary: u32,
    /// Per secondary receiver.
    pub delivered_secondary: Vec<u32>,
}

impl SlotReport {
    pub fn delivered_secondary_total(&self) -> u32 {
        self.delivered_secondary.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeThroughput {
    pub node: String,
    pub packets_per_s: f64,
    pub offered_per_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub seed: u64,
    pub slots: u64,
    /// Primary receiver first, then secondary receivers.
    pub throughput: Vec<NodeThroughput>,
    pub aggregate_throughput: f64,
    pub jain_index: Option<f64>,
    /// Jain's index over throughput divided by offered traffic.
    pub jain_load_normalized: Option<f64>,
    /// Mean over secondary-active slots, mW.
    pub mean_interference_at_primary: f64,
    pub secondary_active_slots: u64,
    pub primary_transmissions: u64,
    pub mrt_slots: u64,
    pub zf_slots: u64,
}

impl RunMetrics {
    pub fn primary_throughput(&self) -> f64 {
        self.throughput.first().map_or(0.0, |n| n.packets_per_s)
    }

    pub fn secondary_throughput(&self) -> f64 {
        self.throughput.iter().skip(1).map(|n| n.packets_per_s).sum()
    }
}

pub fn to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// One seeded execution of a scenario.
pub struct Simulation {
    cfg: Arc<ScenarioConfig>,
    seed: u64,
    gains: LinkGains,
    mac: PrimaryMacState,
    kpi: TrafficKpi,
    scheduler: RoundRobin,
    last_primary_tx: bool,
    credit: Vec<f64>,
    slot: u64,
    sinr_threshold: f64,
}

impl Simulation {
    pub fn new(cfg: &ScenarioConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let gains = cfg.geometry().link_gains(&cfg.radio.path_loss)?;
        let mut init_rng = slot_rng(seed, MAC_INIT_SLOT, Stream::Mac);
        let mac = PrimaryMacState::new(cfg.mac.offered_load, cfg.mac.cw_min, cfg.mac.queue_limit, &mut init_rng)?;
        Ok(Simulation {
            cfg: Arc::new(cfg.clone()),
            seed,
            gains,
            mac,
            kpi: TrafficKpi::new(cfg.sensing.initial_kpi)?,
            scheduler: RoundRobin::default(),
            last_primary_tx: false,
            credit: vec![0.0; 1 + cfg.geometry.secondary_receivers.len()],
            slot: 0,
            sinr_threshold: cfg.sinr_threshold(),
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn gains(&self) -> &LinkGains {
        &self.gains
    }

    fn secondary_active(&self, slot: u64) -> bool {
        let windows = &self.cfg.run.secondary_active;
        if windows.is_empty() {
            return true;
        }
        let t = slot as f64 * self.cfg.run.slot_duration_s;
        windows.iter().any(|[start, end]| t >= *start && t < *end)
    }

    fn estimate(
        &self,
        truth: &CVector,
        tx_power: f64,
        mean_gain: f64,
        rng: &mut impl rand::Rng,
    ) -> Result<CsiEstimate> {
        match self.cfg.sensing.csi {
            CsiModel::Perfect => Ok(CsiEstimate::perfect(truth.clone(), self.slot)),
            CsiModel::Pilot { pilot_count, noise_mw } => {
                let pilots = PilotModel { pilot_count, pilot_power: tx_power, noise_power: noise_mw };
                estimate_csi_ls(truth, &pilots, self.slot, rng)
            }
            CsiModel::Relative { variance } => {
                estimate_with_error_variance(truth, variance * mean_gain, self.slot, rng)
            }
        }
    }

    fn choose_scheme(&self) -> Option<ActiveScheme> {
        let n = self.cfg.geometry.antennas;
        let rule = self.cfg.beamforming.dof_rule;
        let pick = |scheme, antennas, rule| Some(ActiveScheme { scheme, antennas, rule });
        match self.cfg.run.scheme {
            SchemeOverride::Off => None,
            SchemeOverride::Omni => pick(Scheme::Omni, 1, rule),
            SchemeOverride::Mrt => pick(Scheme::Mrt, n, rule),
            SchemeOverride::Zf2 => pick(Scheme::Zf, 2, DofRule::AllowSquare),
            SchemeOverride::Zf4 => pick(Scheme::Zf, 4, rule),
            SchemeOverride::Auto => match select_scheme(self.kpi, self.cfg.sensing.kpi_threshold).scheme {
                Scheme::Zf if n >= 2 => pick(Scheme::Zf, n, if n == 2 { DofRule::AllowSquare } else { rule }),
                Scheme::Zf | Scheme::Omni => pick(Scheme::Omni, 1, rule),
                Scheme::Mrt => pick(Scheme::Mrt, n, rule),
            },
        }
    }

    fn budget(&self) -> PowerBudget {
        let normalization = match self.cfg.beamforming.normalization {
            Normalization::Instantaneous => PowerNormalization::Instantaneous,
            Normalization::LongTerm => {
                // mean gain of the scheduled links stands in for the unit variance
                let mean = self.gains.secondary.iter().sum::<f64>() / self.gains.secondary.len() as f64;
                PowerNormalization::LongTerm { channel_variance: mean }
            }
        };
        PowerBudget { total_power: self.cfg.radio.secondary_power_mw, normalization }
    }

    fn build_precoder(
        &mut self,
        active: ActiveScheme,
        h_est: &[CsiEstimate],
        g_est: &[CsiEstimate],
    ) -> Result<(PrecodingMatrix, SecondarySchedule)> {
        let queued: Vec<usize> = (0..h_est.len()).collect();
        let budget = self.budget();
        let sub = |e: &CsiEstimate| -> Result<CsiEstimate> {
            Ok(CsiEstimate {
                vector: CVector::new(e.vector.as_slice()[..active.antennas].to_vec())?,
                error_variance: e.error_variance,
                slot_index: e.slot_index,
            })
        };
        let k_r = match active.scheme {
            Scheme::Zf => {
                self.cfg.beamforming.protect.len().min(active.rule.max_constrained(active.antennas).saturating_sub(1))
            }
            _ => 0,
        };
        let schedule = self.scheduler.schedule(&queued, active.antennas, k_r, active.scheme, active.rule);
        if schedule.is_empty() {
            return Err(Error::Inconsistent("empty secondary schedule".into()));
        }
        let h_sched = schedule.served_users.iter().map(|&u| sub(&h_est[u])).collect::<Result<Vec<_>>>()?;
        let precoder = match active.scheme {
            Scheme::Omni => omni_precoder(active.antennas, &budget)?,
            Scheme::Mrt => mrt_precoder(&h_sched, &budget)?,
            Scheme::Zf => {
                let protected = self.cfg.beamforming.protect[..k_r]
                    .iter()
                    .map(|role: &PrimaryRole| sub(&g_est[role.index()]))
                    .collect::<Result<Vec<_>>>()?;
                zf_precoder(&h_sched, &protected, &budget, active.rule)?
            }
        };
        Ok((embed(precoder, self.cfg.geometry.antennas), schedule))
    }

    /// Runs one slot.
    pub fn step(&mut self) -> Result<SlotReport> {
        let slot = self.slot;
        let cfg = Arc::clone(&self.cfg);
        let n = cfg.geometry.antennas;
        let radio = &cfg.radio;

        let mut chan_rng = slot_rng(self.seed, slot, Stream::Channel);
        let chan = realize_slot(&self.gains, n, slot, &mut chan_rng).map_err(|e| e.at_slot(slot, "channel"))?;

        // The traffic analyzer sees last slot's frame and any pending backlog.
        let busy = self.last_primary_tx || self.mac.backlogged();
        self.kpi =
            update_traffic_kpi(self.kpi, busy, self.cfg.sensing.alpha).map_err(|e| e.at_slot(slot, "sensing"))?;

        let mut sense_rng = slot_rng(self.seed, slot, Stream::Sensing);
        let mut h_est = Vec::with_capacity(chan.h.len());
        for (s, h) in chan.h.iter().enumerate() {
            let est = self.estimate(h, radio.uplink_power_mw, self.gains.secondary[s], &mut sense_rng);
            h_est.push(est.map_err(|e| e.at_slot(slot, "sensing"))?);
        }
        let mut g_est = Vec::with_capacity(chan.g.len());
        for (k, g) in chan.g.iter().enumerate() {
            let est = self.estimate(g, radio.primary_power_mw, self.gains.to_primary[k], &mut sense_rng);
            g_est.push(est.map_err(|e| e.at_slot(slot, "sensing"))?);
        }

        let active = if self.secondary_active(slot) { self.choose_scheme() } else { None };
        let tx = match active {
            Some(a) => Some(self.build_precoder(a, &h_est, &g_est).map_err(|e| e.at_slot(slot, "precoding"))?),
            None => None,
        };

        let sensed = tx.as_ref().map_or(0.0, |(p, _)| p.received_power(&chan.g[PRIMARY_TX]));
        let primary_busy = sensing_threshold_check(sensed, self.cfg.mac.sensing_threshold_mw);
        let mut mac_rng = slot_rng(self.seed, slot, Stream::Mac);
        let primary_tx = self.mac.step(primary_busy, &mut mac_rng);
        self.last_primary_tx = primary_tx;
        let primary_active: &[usize] = if primary_tx { &[PRIMARY_TX] } else { &[] };

        let mut delivered_secondary = vec![0u32; chan.h.len()];
        let mut sinr_secondary = Vec::new();
        if let Some((p, schedule)) = &tx {
            sinr_secondary = compute_sinr_secondary(
                &chan,
                p,
                schedule,
                primary_active,
                radio.primary_power_mw,
                radio.secondary_noise_mw,
            )
            .map_err(|e| e.at_slot(slot, "sinr"))?;
            for &(user, sinr) in &sinr_secondary {
                delivered_secondary[user] = self.deliver(1 + user, sinr);
            }
        }

        let sinr_primary = if primary_tx {
            Some(
                compute_sinr_primary(
                    &chan,
                    tx.as_ref().map(|(p, _)| p),
                    primary_active,
                    PRIMARY_TX,
                    PRIMARY_RX,
                    radio.primary_power_mw,
                    radio.primary_noise_mw,
                )
                .map_err(|e| e.at_slot(slot, "sinr"))?,
            )
        } else {
            None
        };
        let delivered_primary = sinr_primary.map_or(0, |s| self.deliver(0, s));

        let leakage =
            tx.as_ref().map(|(p, _)| chan.g.iter().map(|g| p.received_power(g)).sum::<f64>() / chan.g.len() as f64);

        self.slot += 1;
        Ok(SlotReport {
            slot_index: slot,
            scheme_used: active,
            kpi: self.kpi.value(),
            primary_transmitted: primary_tx,
            primary_deferred: primary_busy && self.mac.backlogged(),
            sinr_secondary,
            sinr_primary,
            leakage,
            delivered_primary,
            delivered_secondary,
        })
    }

    fn deliver(&mut self, node: usize, sinr: f64) -> u32 {
        match self.cfg.run.success_mode {
            SuccessMode::Threshold => u32::from(packet_success(sinr, self.sinr_threshold)),
            SuccessMode::Shannon => {
                let credit = &mut self.credit[node];
                *credit += ((1.0 + sinr).log2() / self.cfg.run.bits_per_hz_per_packet).min(1.0);
                if *credit >= 1.0 {
                    *credit -= 1.0;
                    1
                } else {
                    0
                }
            }
        }
    }
}

/// Pads a precoder built on the first antennas with zero rows.
fn embed(p: PrecodingMatrix, antennas: usize) -> PrecodingMatrix {
    if p.antennas() == antennas {
        return p;
    }
    let mut g = CMatrix::zeros(antennas, p.streams());
    for i in 0..p.antennas() {
        for j in 0..p.streams() {
            g[(i, j)] = p.g[(i, j)];
        }
    }
    PrecodingMatrix { g, ..p }
}

/// Sums slot reports into run metrics.
#[derive(Debug, Clone)]
pub struct MetricsAccumulator {
    seed: u64,
    slots: u64,
    delivered: Vec<u64>,
    leakage_sum: f64,
    active_slots: u64,
    primary_tx: u64,
    mrt_slots: u64,
    zf_slots: u64,
}

impl MetricsAccumulator {
    pub fn new(seed: u64, secondary_receivers: usize) -> Self {
        MetricsAccumulator {
            seed,
            slots: 0,
            delivered: vec![0; 1 + secondary_receivers],
            leakage_sum: 0.0,
            active_slots: 0,
            primary_tx: 0,
            mrt_slots: 0,
            zf_slots: 0,
        }
    }

    pub fn add(&mut self, r: &SlotReport) {
        self.slots += 1;
        self.delivered[0] += u64::from(r.delivered_primary);
        for (i, d) in r.delivered_secondary.iter().enumerate() {
            self.delivered[1 + i] += u64::from(*d);
        }
        if let Some(l) = r.leakage {
            self.leakage_sum += l;
            self.active_slots += 1;
        }
        self.primary_tx += u64::from(r.primary_transmitted);
        match r.scheme_used.map(|a| a.scheme) {
            Some(Scheme::Mrt) => self.mrt_slots += 1,
            Some(Scheme::Zf) => self.zf_slots += 1,
            _ => {}
        }
    }

    pub fn finish(&self, cfg: &ScenarioConfig) -> RunMetrics {
        let duration = self.slots as f64 * cfg.run.slot_duration_s;
        let slot_rate = 1.0 / cfg.run.slot_duration_s;
        let receivers = self.delivered.len() - 1;
        let rate = |d: u64| if duration > 0.0 { d as f64 / duration } else { 0.0 };
        let mut throughput = vec![NodeThroughput {
            node: "primary".to_string(),
            packets_per_s: rate(self.delivered[0]),
            offered_per_s: cfg.mac.offered_load * slot_rate,
        }];
        for s in 0..receivers {
            throughput.push(NodeThroughput {
                node: format!("secondary{s}"),
                packets_per_s: rate(self.delivered[1 + s]),
                offered_per_s: slot_rate / receivers as f64,
            });
        }
        let xs: Vec<f64> = throughput.iter().map(|n| n.packets_per_s).collect();
        let normalized: Option<Vec<f64>> =
            throughput.iter().map(|n| (n.offered_per_s > 0.0).then(|| n.packets_per_s / n.offered_per_s)).collect();
        RunMetrics {
            seed: self.seed,
            slots: self.slots,
            aggregate_throughput: xs.iter().sum(),
            jain_index: jain_index(&xs).ok(),
            jain_load_normalized: normalized.and_then(|v| jain_index(&v).ok()),
            throughput,
            mean_interference_at_primary: if self.active_slots > 0 {
                self.leakage_sum / self.active_slots as f64
            } else {
                0.0
            },
            secondary_active_slots: self.active_slots,
            primary_transmissions: self.primary_tx,
            mrt_slots: self.mrt_slots,
            zf_slots: self.zf_slots,
        }
    }
}

pub const SLOT_CSV_HEADER: [&str; 8] = [
    "slot",
    "scheme",
    "primary_tx",
    "sinr_primary_db",
    "sinr_secondary_db_per_user",
    "leakage_dbm",
    "delivered_primary",
    "delivered_secondary",
];

fn db(x: f64) -> String {
    format!("{:.4}", 10.0 * x.log10())
}

/// One per-slot CSV record. Per-user secondary SINRs are `user:dB` pairs
/// joined with `;`. Empty cells mean the quantity does not exist in the slot.
pub fn slot_csv_record(r: &SlotReport) -> [String; 8] {
    [
        r.slot_index.to_string(),
        r.scheme_used.map_or_else(|| "off".to_string(), |a| a.label()),
        u8::from(r.primary_transmitted).to_string(),
        r.sinr_primary.map(db).unwrap_or_default(),
        r.sinr_secondary.iter().map(|(u, s)| format!("{u}:{}", db(*s))).collect::<Vec<_>>().join(";"),
        r.leakage.map(db).unwrap_or_default(),
        r.delivered_primary.to_string(),
        r.delivered_secondary_total().to_string(),
    ]
}

/// Runs all slots of `cfg` with `seed`, writing the per-slot CSV to `slot_csv`
/// when given.
pub fn run_scenario<W: Write>(cfg: &ScenarioConfig, seed: u64, slot_csv: Option<W>) -> Result<RunMetrics> {
    let mut sim = Simulation::new(cfg, seed)?;
    let mut acc = MetricsAccumulator::new(seed, cfg.geometry.secondary_receivers.len());
    let mut writer = slot_csv.map(|w| csv::Writer::from_writer(w));
    if let Some(w) = writer.as_mut() {
        w.write_record(SLOT_CSV_HEADER)?;
    }
    for _ in 0..cfg.run.slots {
        let report = sim.step()?;
        if let Some(w) = writer.as_mut() {
            w.write_record(slot_csv_record(&report))?;
        }
        acc.add(&report);
    }
    if let Some(mut w) = writer {
        w.flush().map_err(|e| Error::io("<slot csv>", e))?;
    }
    Ok(acc.finish(cfg))
}

pub const SUMMARY_CSV_HEADER: [&str; 11] = [
    "seed",
    "scheme",
    "slots",
    "primary_throughput",
    "secondary_throughput",
    "aggregate_throughput",
    "jain",
    "jain_load_normalized",
    "mean_leakage_dbm",
    "primary_transmissions",
    "node_throughputs",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

pub fn summary_csv_record(scheme: &str, m: &RunMetrics) -> [String; 11] {
    let leak = (m.secondary_active_slots > 0).then(|| to_dbm(m.mean_interference_at_primary));
    [
        m.seed.to_string(),
        scheme.to_string(),
        m.slots.to_string(),
        format!("{:.6}", m.primary_throughput()),
        format!("{:.6}", m.secondary_throughput()),
        format!("{:.6}", m.aggregate_throughput),
        opt(m.jain_index),
        opt(m.jain_load_normalized),
        leak.map(|x| format!("{x:.4}")).unwrap_or_default(),
        m.primary_transmissions.to_string(),
        m.throughput.iter().map(|n| format!("{:.6}", n.packets_per_s)).collect::<Vec<_>>().join(";"),
    ]
}
