//! C interface to the beamshare simulator.
//!
//! Every fallible function returns a [`BeamshareStatus`] code; on failure the
//! message is available from [`beamshare_last_error`] on the same thread.
//! Simulations are opaque handles created by [`beamshare_sim_new`] and
//! released with [`beamshare_sim_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::c_char;

use beamshare_core::beamforming::{expected_sinr_mrt, expected_sinr_zf, Scheme};
use beamshare_core::channel::{path_gain, PathLossModel};
use beamshare_core::cli::parse_config_str;
use beamshare_core::sim::{jain_index, MetricsAccumulator, Simulation, SlotReport};
use beamshare_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamshareStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    InvalidArgument = 4,
    Numerics = 5,
    Simulation = 6,
    Undefined = 7,
    Panic = 8,
}

/// Scheme codes in [`BeamshareSlot::scheme`].
pub const BEAMSHARE_SCHEME_OFF: i32 = -1;
pub const BEAMSHARE_SCHEME_OMNI: i32 = 0;
pub const BEAMSHARE_SCHEME_MRT: i32 = 1;
pub const BEAMSHARE_SCHEME_ZF: i32 = 2;

/// Opaque simulation handle.
pub struct BeamshareSim {
    sim: Simulation,
    acc: MetricsAccumulator,
}

/// One slot's outcome. Absent quantities are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BeamshareSlot {
    pub slot_index: u64,
    pub scheme: i32,
    pub antennas: u32,
    pub kpi: f64,
    pub primary_transmitted: bool,
    pub sinr_primary: f64,
    pub leakage_mw: f64,
    pub delivered_primary: u32,
    pub delivered_secondary: u32,
}

/// Run totals so far. `jain` is NaN while undefined.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BeamshareMetrics {
    pub slots: u64,
    pub primary_throughput: f64,
    pub secondary_throughput: f64,
    pub aggregate_throughput: f64,
    pub jain: f64,
    pub mean_leakage_mw: f64,
    pub primary_transmissions: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BeamshareStatus {
    match e {
        Error::Config { .. } | Error::Io { .. } | Error::Csv(_) | Error::Malformed(_) => BeamshareStatus::Config,
        Error::InvalidParameter { .. } | Error::InvalidGeometry(_) | Error::NoSamples | Error::InvalidCsi(_) => {
            BeamshareStatus::InvalidArgument
        }
        Error::DimensionMismatch(_)
        | Error::NonFinite
        | Error::SingularMatrix { .. }
        | Error::InsufficientAntennas { .. }
        | Error::InsufficientDoF { .. } => BeamshareStatus::Numerics,
        Error::Undefined(_) => BeamshareStatus::Undefined,
        _ => BeamshareStatus::Simulation,
    }
}

/// Runs `f`, recording errors and panics.
fn guard(f: impl FnOnce() -> Result<(), BeamshareStatus>) -> BeamshareStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BeamshareStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic".into());
            BeamshareStatus::Panic
        }
    }
}

fn fail(e: Error) -> BeamshareStatus {
    let status = status_of(&e);
    set_error(e.to_string());
    status
}

fn null(name: &str) -> BeamshareStatus {
    set_error(format!("`{name}` is null"));
    BeamshareStatus::NullPointer
}

fn write_out<T>(out: *mut T, value: T) -> Result<(), BeamshareStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    // SAFETY: checked non-null; the caller guarantees it points to writable T.
    unsafe { out.write(value) };
    Ok(())
}

fn sim_mut<'a>(sim: *mut BeamshareSim) -> Result<&'a mut BeamshareSim, BeamshareStatus> {
    // SAFETY: non-null handles come from beamshare_sim_new and are not aliased
    // across threads by contract.
    unsafe { sim.as_mut() }.ok_or_else(|| null("sim"))
}

fn slot_of(r: &SlotReport) -> BeamshareSlot {
    let (scheme, antennas) = match r.scheme_used {
        None => (BEAMSHARE_SCHEME_OFF, 0),
        Some(a) => (
            match a.scheme {
                Scheme::Omni => BEAMSHARE_SCHEME_OMNI,
                Scheme::Mrt => BEAMSHARE_SCHEME_MRT,
                Scheme::Zf => BEAMSHARE_SCHEME_ZF,
            },
            a.antennas as u32,
        ),
    };
    BeamshareSlot {
        slot_index: r.slot_index,
        scheme,
        antennas,
        kpi: r.kpi,
        primary_transmitted: r.primary_transmitted,
        sinr_primary: r.sinr_primary.unwrap_or(f64::NAN),
        leakage_mw: r.leakage.unwrap_or(f64::NAN),
        delivered_primary: r.delivered_primary,
        delivered_secondary: r.delivered_secondary_total(),
    }
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn beamshare_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn beamshare_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a simulation from TOML scenario text (may be empty for the
/// default preset) and a seed. On success `*out` owns a new handle.
///
/// # Safety
/// `config_toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn beamshare_sim_new(
    config_toml: *const c_char,
    seed: u64,
    out: *mut *mut BeamshareSim,
) -> BeamshareStatus {
    guard(|| {
        if config_toml.is_null() {
            return Err(null("config_toml"));
        }
        // SAFETY: non-null and NUL-terminated per the contract above.
        let text = unsafe { CStr::from_ptr(config_toml) }.to_str().map_err(|_| {
            set_error("config is not valid UTF-8".into());
            BeamshareStatus::InvalidUtf8
        })?;
        let cfg = parse_config_str(text).map_err(fail)?;
        let sim = Simulation::new(&cfg, seed).map_err(fail)?;
        let acc = MetricsAccumulator::new(seed, cfg.geometry.secondary_receivers.len());
        if out.is_null() {
            return Err(null("out"));
        }
        write_out(out, Box::into_raw(Box::new(BeamshareSim { sim, acc })))
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `sim` must come from [`beamshare_sim_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn beamshare_sim_free(sim: *mut BeamshareSim) {
    if !sim.is_null() {
        // SAFETY: allocated by Box::into_raw in beamshare_sim_new.
        drop(unsafe { Box::from_raw(sim) });
    }
}

/// Advances one slot; `out` may be NULL when the slot record is not needed.
///
/// # Safety
/// `sim` must be a live handle; `out`, if non-null, must be writable.
#[no_mangle]
pub unsafe extern "C" fn beamshare_sim_step(sim: *mut BeamshareSim, out: *mut BeamshareSlot) -> BeamshareStatus {
    guard(|| {
        let h = sim_mut(sim)?;
        let report = h.sim.step().map_err(fail)?;
        h.acc.add(&report);
        if !out.is_null() {
            write_out(out, slot_of(&report))?;
        }
        Ok(())
    })
}

/// Advances `slots` slots.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn beamshare_sim_run(sim: *mut BeamshareSim, slots: u64) -> BeamshareStatus {
    guard(|| {
        let h = sim_mut(sim)?;
        for _ in 0..slots {
            let report = h.sim.step().map_err(fail)?;
            h.acc.add(&report);
        }
        Ok(())
    })
}

/// Metrics over the slots run so far.
///
/// # Safety
/// `sim` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn beamshare_sim_metrics(sim: *mut BeamshareSim, out: *mut BeamshareMetrics) -> BeamshareStatus {
    guard(|| {
        let h = sim_mut(sim)?;
        let m = h.acc.finish(h.sim.config());
        write_out(
            out,
            BeamshareMetrics {
                slots: m.slots,
                primary_throughput: m.primary_throughput(),
                secondary_throughput: m.secondary_throughput(),
                aggregate_throughput: m.aggregate_throughput,
                jain: m.jain_index.unwrap_or(f64::NAN),
                mean_leakage_mw: if m.secondary_active_slots > 0 { m.mean_interference_at_primary } else { f64::NAN },
                primary_transmissions: m.primary_transmissions,
            },
        )
    })
}

/// Expected MRT SINR at unit noise power.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn beamshare_expected_sinr_mrt(
    p_s: f64,
    n_t: usize,
    s_s: usize,
    out: *mut f64,
) -> BeamshareStatus {
    guard(|| write_out(out, expected_sinr_mrt(p_s, n_t, s_s).map_err(fail)?))
}

/// Expected ZF SINR at unit noise power.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn beamshare_expected_sinr_zf(
    p_s: f64,
    n_t: usize,
    s_s: usize,
    k_r: usize,
    out: *mut f64,
) -> BeamshareStatus {
    guard(|| write_out(out, expected_sinr_zf(p_s, n_t, s_s, k_r).map_err(fail)?))
}

/// Jain's fairness index of `len` throughputs.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn beamshare_jain_index(values: *const f64, len: usize, out: *mut f64) -> BeamshareStatus {
    guard(|| {
        if values.is_null() && len > 0 {
            return Err(null("values"));
        }
        let xs = if len == 0 {
            &[][..]
        } else {
            // SAFETY: non-null with `len` elements per the contract above.
            unsafe { std::slice::from_raw_parts(values, len) }
        };
        write_out(out, jain_index(xs).map_err(fail)?)
    })
}

/// Linear large-scale power gain at distance `d` meters.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn beamshare_path_gain(
    exponent: f64,
    reference_loss_db: f64,
    reference_distance_m: f64,
    d: f64,
    out: *mut f64,
) -> BeamshareStatus {
    guard(|| {
        let model = PathLossModel { exponent, reference_loss_db, reference_distance_m };
        write_out(out, path_gain(&model, d).map_err(fail)?)
    })
}
