//! Acceptance gate. Runs without the libtest harness so that every criterion
//! prints exactly one PASS/FAIL line; the process fails if any criterion does.

mod common;

use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use beamshare_core::beamforming::PrecodingMatrix;
use beamshare_core::beamforming::{
    expected_sinr_mrt, expected_sinr_zf, mrt_precoder, omni_precoder, select_scheme, zf_precoder, DofRule, PowerBudget,
    PowerNormalization, Scheme,
};
use beamshare_core::channel::ChannelRealization;
use beamshare_core::cli::config::{CsiModel, SchemeOverride};
use beamshare_core::cli::presets::{scenario1, scenario2};
use beamshare_core::cli::ScenarioConfig;
use beamshare_core::mac_traffic::SecondarySchedule;
use beamshare_core::numerics::{CMatrix, CVector};
use beamshare_core::sensing::{estimate_csi_ls, update_traffic_kpi, CsiEstimate, PilotModel, TrafficKpi};
use beamshare_core::sim::{compute_sinr_primary, compute_sinr_secondary, jain_index, run_scenario, to_dbm, RunMetrics};
use beamshare_core::Complex64;

use common::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(id: u32, title: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = elapsed < budget;
    let pass = out.pass && in_time;
    println!(
        "criterion {id} [{}] {title}: {}; {:.2} s (budget {} s{})",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        budget.as_secs(),
        if in_time { "" } else { ", exceeded" }
    );
    pass
}

fn perfect(v: CVector) -> CsiEstimate {
    CsiEstimate::perfect(v, 0)
}

// 1. Perfect-CSI nulling relative to the single-antenna baseline.
fn zf_nulling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let budget = PowerBudget::instantaneous(1.0);
    let omni = omni_precoder(4, &budget).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let h = cn_vector(&mut rng, 4, 1.0);
        let g = cn_vector(&mut rng, 4, 1.0);
        let zf = zf_precoder(&[perfect(h)], &[perfect(g.clone())], &budget, DofRule::Strict).unwrap();
        let leak = zf.stream_power * bilinear(g.as_slice(), &zf.g.column(0)).norm_sqr();
        let base = omni.stream_power * bilinear(g.as_slice(), &omni.g.column(0)).norm_sqr();
        worst = worst.max(leak / base);
    }
    Outcome { pass: worst <= 1e-12, detail: format!("max leakage ratio {worst:.2e} <= 1e-12 over 1000 draws") }
}

// 2. Effective SINR of the long-term-normalized precoders against the
// closed forms, unit noise.
fn closed_forms() -> Outcome {
    let cases: [(f64, usize, usize, usize, Scheme); 4] = [
        (1.0, 4, 1, 0, Scheme::Mrt),
        (1.0, 2, 2, 0, Scheme::Mrt),
        (1.0, 4, 1, 1, Scheme::Zf),
        (2.0, 4, 1, 1, Scheme::Zf),
    ];
    let results: Vec<(String, f64, f64)> = cases
        .par_iter()
        .enumerate()
        .map(|(i, &(p, n_t, s_s, k_r, scheme))| {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + i as u64);
            let budget =
                PowerBudget { total_power: p, normalization: PowerNormalization::LongTerm { channel_variance: 1.0 } };
            let mut est = EffectiveSinr::default();
            for _ in 0..100_000 {
                let h: Vec<CVector> = (0..s_s).map(|_| cn_vector(&mut rng, n_t, 1.0)).collect();
                let g: Vec<CVector> = (0..k_r).map(|_| cn_vector(&mut rng, n_t, 1.0)).collect();
                let hs: Vec<CsiEstimate> = h.iter().cloned().map(perfect).collect();
                let gs: Vec<CsiEstimate> = g.iter().cloned().map(perfect).collect();
                let pre = match scheme {
                    Scheme::Mrt => mrt_precoder(&hs, &budget).unwrap(),
                    _ => zf_precoder(&hs, &gs, &budget, DofRule::Strict).unwrap(),
                };
                let amp = pre.stream_power.sqrt();
                let desired = bilinear(h[0].as_slice(), &pre.g.column(0)) * amp;
                let cross: Vec<Complex64> =
                    (1..s_s).map(|s| bilinear(h[0].as_slice(), &pre.g.column(s)) * amp).collect();
                est.add(desired, &cross);
            }
            let want = match scheme {
                Scheme::Mrt => expected_sinr_mrt(p, n_t, s_s).unwrap(),
                _ => expected_sinr_zf(p, n_t, s_s, k_r).unwrap(),
            };
            (format!("{scheme}({p},{n_t},{s_s},{k_r})"), est.value(1.0), want)
        })
        .collect();
    let worst = results.iter().map(|(_, got, want)| (got / want - 1.0).abs()).fold(0.0, f64::max);
    let parts: Vec<String> = results.iter().map(|(n, got, want)| format!("{n} {got:.4} vs {want:.4}")).collect();
    Outcome { pass: worst <= 0.05, detail: format!("{}; worst rel err {:.2}% <= 5%", parts.join(", "), 100.0 * worst) }
}

fn random_realization(rng: &mut ChaCha8Rng, n_t: usize, users: usize, primaries: usize) -> ChannelRealization {
    let gain = |rng: &mut ChaCha8Rng| 10f64.powf(rng.random_range(-8.0..-3.0));
    ChannelRealization {
        slot_index: 0,
        h: (0..users)
            .map(|_| {
                let v = gain(rng);
                cn_vector(rng, n_t, v)
            })
            .collect(),
        g: (0..primaries)
            .map(|_| {
                let v = gain(rng);
                cn_vector(rng, n_t, v)
            })
            .collect(),
        q_cross: (0..primaries).map(|_| (0..users).map(|_| cn(rng) * gain(rng).sqrt()).collect()).collect(),
        q_prim: (0..primaries)
            .map(|k| {
                (0..primaries)
                    .map(|j| if j == k { Complex64::new(0.0, 0.0) } else { cn(rng) * gain(rng).sqrt() })
                    .collect()
            })
            .collect(),
    }
}

// 3. Engine SINR against the term-by-term expansion.
fn dual_implementation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n_t = [1, 2, 4][rng.random_range(0..3)];
        let users = rng.random_range(1..=3);
        let primaries = rng.random_range(2..=3);
        let r = random_realization(&mut rng, n_t, users, primaries);
        let streams = rng.random_range(1..=users);
        let rows: Vec<Vec<Complex64>> = (0..n_t).map(|_| (0..streams).map(|_| cn(&mut rng)).collect()).collect();
        let g = CMatrix::from_row_major(n_t, streams, rows.concat()).unwrap();
        let p_s = rng.random_range(0.1..10.0);
        let pre = PrecodingMatrix { g, scheme: Scheme::Zf, power_scale: 1.0, stream_power: p_s };
        let schedule = SecondarySchedule { served_users: (0..streams).collect() };
        let active: Vec<usize> = (0..primaries).filter(|_| rng.random_bool(0.5)).collect();
        let (p_k, noise) = (rng.random_range(0.1..10.0), 10f64.powf(rng.random_range(-12.0..-8.0)));
        for (col, (user, got)) in
            compute_sinr_secondary(&r, &pre, &schedule, &active, p_k, noise).unwrap().into_iter().enumerate()
        {
            let want = secondary_sinr_expanded(&r, &rows, p_s, user, col, &active, p_k, noise);
            worst = worst.max((got - want).abs() / want);
        }
        let mut active = active;
        if !active.contains(&0) {
            active.push(0);
        }
        let silent = rng.random_bool(0.2);
        let got = compute_sinr_primary(&r, (!silent).then_some(&pre), &active, 0, 1, p_k, noise).unwrap();
        let want = primary_sinr_expanded(&r, (!silent).then_some((&rows[..], p_s)), &active, 0, 1, p_k, noise);
        worst = worst.max((got - want).abs() / want);
    }
    Outcome { pass: worst <= 1e-12, detail: format!("max rel diff {worst:.2e} <= 1e-12 over 1000 instances") }
}

fn with_scheme(cfg: &ScenarioConfig, scheme: SchemeOverride) -> ScenarioConfig {
    let mut c = cfg.clone();
    c.run.scheme = scheme;
    c
}

fn runs(cfg: &ScenarioConfig) -> Vec<RunMetrics> {
    cfg.run.seeds.par_iter().map(|&s| run_scenario::<std::io::Sink>(cfg, s, None).unwrap()).collect()
}

/// Tolerance for the "omni ≈ MRT" leakage equivalence.
const LEAKAGE_EQUIVALENCE_DB: f64 = 1.0;

// 4. Leakage ordering with relative CSI error variance 0.01.
fn leakage_ordering() -> Outcome {
    let mut base = scenario1();
    base.sensing.csi = CsiModel::Relative { variance: 0.01 };
    base.run.slots = 10_000;
    base.run.seeds = (1..=20).collect();
    let leak = |scheme| -> Vec<f64> {
        runs(&with_scheme(&base, scheme)).iter().map(|m| to_dbm(m.mean_interference_at_primary)).collect()
    };
    let (omni, mrt, zf2, zf4) =
        (leak(SchemeOverride::Omni), leak(SchemeOverride::Mrt), leak(SchemeOverride::Zf2), leak(SchemeOverride::Zf4));
    let (a, t_a) = significantly_less(&zf4, &zf2);
    let (b, t_b) = significantly_less(&zf2, &omni);
    let (c, lo, hi) = equivalent(&omni, &mrt, LEAKAGE_EQUIVALENCE_DB);
    Outcome {
        pass: a && b && c,
        detail: format!(
            "mean dBm zf4 {:.2} < zf2 {:.2} (t={t_a:.1}) < omni {:.2} (t={t_b:.1}); omni-mrt 90% CI [{lo:.3}, {hi:.3}] within ±{LEAKAGE_EQUIVALENCE_DB} dB; 20 seeds",
            mean(&zf4),
            mean(&zf2),
            mean(&omni)
        ),
    }
}

// 5. Fairness and aggregate throughput at saturated primary load.
fn fairness_ordering() -> Outcome {
    let base = scenario1();
    assert_eq!(base.mac.offered_load, 1.0);
    let zf = runs(&with_scheme(&base, SchemeOverride::Zf4));
    let omni = runs(&with_scheme(&base, SchemeOverride::Omni));
    let jain_wins = zf.iter().zip(&omni).filter(|(z, o)| z.jain_index.unwrap() > o.jain_index.unwrap()).count();
    let agg_wins = zf.iter().zip(&omni).filter(|(z, o)| z.aggregate_throughput > o.aggregate_throughput).count();
    let n = zf.len();
    let mj = |v: &[RunMetrics]| mean(&v.iter().map(|m| m.jain_index.unwrap()).collect::<Vec<_>>());
    let ma = |v: &[RunMetrics]| mean(&v.iter().map(|m| m.aggregate_throughput).collect::<Vec<_>>());
    Outcome {
        pass: n == 10 && jain_wins >= 9 && agg_wins >= 9,
        detail: format!(
            "jain zf4 > omni in {jain_wins}/{n} (means {:.3} vs {:.3}), aggregate in {agg_wins}/{n} ({:.1} vs {:.1} pkt/s); need >= 9/10",
            mj(&zf),
            mj(&omni),
            ma(&zf),
            ma(&omni)
        ),
    }
}

// 6. Secondary throughput of MRT over omni at 5% primary load.
fn low_load_mrt_gain() -> Outcome {
    let base = scenario2();
    assert_eq!(base.mac.offered_load, 0.05);
    let mrt = runs(&with_scheme(&base, SchemeOverride::Mrt));
    let omni = runs(&with_scheme(&base, SchemeOverride::Omni));
    let wins = mrt.iter().zip(&omni).filter(|(m, o)| m.secondary_throughput() > o.secondary_throughput()).count();
    let ms = |v: &[RunMetrics]| mean(&v.iter().map(|m| m.secondary_throughput()).collect::<Vec<_>>());
    Outcome {
        pass: mrt.len() == 10 && wins >= 9,
        detail: format!(
            "secondary mrt4 > omni in {wins}/{} (means {:.1} vs {:.1} pkt/s); need >= 9/10",
            mrt.len(),
            ms(&mrt),
            ms(&omni)
        ),
    }
}

// 7. KPI-driven scheme selection on deterministic busy traces.
fn scheme_selection() -> Outcome {
    let run = |every: u64, start: f64| {
        let mut kpi = TrafficKpi::new(start).unwrap();
        for t in 0..2000u64 {
            kpi = update_traffic_kpi(kpi, t % every == 0, 0.05).unwrap();
        }
        (kpi.value(), select_scheme(kpi, 0.5).scheme)
    };
    // busy one slot in twenty, starting from a fully busy indicator
    let (low, low_scheme) = run(20, 1.0);
    let (high, high_scheme) = run(1, 0.0);
    Outcome {
        pass: low < 0.5 && low_scheme == Scheme::Mrt && high_scheme == Scheme::Zf,
        detail: format!("busy 0.05 -> kpi {low:.3} {low_scheme}; busy 1.0 -> kpi {high:.3} {high_scheme}"),
    }
}

// 8. Byte-identical per-slot CSV for identical inputs.
fn determinism() -> Outcome {
    let mut cfg = scenario1();
    cfg.run.slots = 3000;
    let csv = || {
        let mut buf = Vec::new();
        run_scenario(&cfg, 7, Some(&mut buf)).unwrap();
        buf
    };
    let (a, b) = (csv(), csv());
    Outcome { pass: !a.is_empty() && a == b, detail: format!("{} bytes, identical: {}", a.len(), a == b) }
}

fn runner() -> TestRunner {
    let config = Config { cases: 1000, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn property<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner().run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

// 9. Invariants under property-based testing, 1000 cases each.
fn invariants() -> Outcome {
    let results = [
        property(
            "power conservation",
            (2usize..=6, 1usize..=5, 0usize..=4, 0.01f64..100.0, any::<u64>()),
            |(n_t, s, k, p, seed)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let budget = PowerBudget::instantaneous(p);
                let s = s.min(n_t - 1);
                let k = k.min(n_t - 1 - s);
                let hs: Vec<CsiEstimate> = (0..s).map(|_| perfect(cn_vector(&mut rng, n_t, 1e-5))).collect();
                let gs: Vec<CsiEstimate> = (0..k).map(|_| perfect(cn_vector(&mut rng, n_t, 1e-5))).collect();
                for pre in [
                    omni_precoder(n_t, &budget).unwrap(),
                    mrt_precoder(&hs, &budget).unwrap(),
                    zf_precoder(&hs, &gs, &budget, DofRule::Strict).unwrap(),
                ] {
                    prop_assert!(
                        (pre.total_power() / p - 1.0).abs() < 1e-9,
                        "{} radiates {}",
                        pre.scheme,
                        pre.total_power()
                    );
                }
                Ok(())
            },
        ),
        property(
            "KPI range",
            (0.0f64..=1.0, 1e-6f64..=1.0, prop::collection::vec(any::<bool>(), 1..300)),
            |(start, alpha, trace)| {
                let mut kpi = TrafficKpi::new(start).unwrap();
                for busy in trace {
                    kpi = update_traffic_kpi(kpi, busy, alpha).unwrap();
                    prop_assert!((0.0..=1.0).contains(&kpi.value()));
                }
                Ok(())
            },
        ),
        property("Jain bounds", prop::collection::vec(0.0f64..1e4, 1..20), |xs| {
            match jain_index(&xs) {
                Ok(j) => {
                    let n = xs.len() as f64;
                    prop_assert!(j >= 1.0 / n - 1e-12 && j <= 1.0 + 1e-12, "{j} for n={n}");
                }
                Err(_) => prop_assert!(xs.iter().all(|&x| x == 0.0)),
            }
            Ok(())
        }),
        property(
            "DoF enforcement",
            (1usize..=6, 1usize..=6, 0usize..=4, any::<bool>(), any::<u64>()),
            |(n_t, s, k, square, seed)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let rule = if square { DofRule::AllowSquare } else { DofRule::Strict };
                let hs: Vec<CsiEstimate> = (0..s).map(|_| perfect(cn_vector(&mut rng, n_t, 1.0))).collect();
                let gs: Vec<CsiEstimate> = (0..k).map(|_| perfect(cn_vector(&mut rng, n_t, 1.0))).collect();
                let admitted = if square { n_t >= s + k } else { n_t > s + k };
                let got = zf_precoder(&hs, &gs, &PowerBudget::instantaneous(1.0), rule);
                prop_assert_eq!(got.is_ok(), admitted, "n_t={} s={} k={} rule={:?}", n_t, s, k, rule);
                Ok(())
            },
        ),
        property(
            "LS unbiasedness",
            (1usize..=4, 1u32..=64, 0.1f64..10.0, 1e-3f64..1.0, any::<u64>()),
            |(n, l, pilot_power, noise, seed)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let truth = cn_vector(&mut rng, n, 1.0);
                let pilots = PilotModel { pilot_count: l, pilot_power, noise_power: noise };
                let draws = 400;
                let mut sum = vec![Complex64::new(0.0, 0.0); n];
                for _ in 0..draws {
                    let e = estimate_csi_ls(&truth, &pilots, 0, &mut rng).unwrap();
                    for (acc, v) in sum.iter_mut().zip(e.vector.iter()) {
                        *acc += v;
                    }
                }
                // per real dimension the sample mean has sd sqrt(var / (2·draws))
                let se = (pilots.error_variance() / (2.0 * draws as f64)).sqrt();
                for (acc, t) in sum.iter().zip(truth.iter()) {
                    let bias = acc / draws as f64 - t;
                    prop_assert!(bias.re.abs() < 5.5 * se && bias.im.abs() < 5.5 * se, "bias {bias} vs se {se}");
                }
                Ok(())
            },
        ),
    ];
    let failures: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            "power conservation, KPI range, Jain bounds, DoF enforcement, LS unbiasedness: 1000 cases each".into()
        } else {
            failures.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("; ")
        },
    }
}

fn main() {
    let s = Duration::from_secs;
    let results = [
        check(1, "ZF nulling exactness", s(1), zf_nulling),
        check(2, "closed-form SINR oracles", s(30), closed_forms),
        check(3, "SINR dual implementation", s(5), dual_implementation),
        check(4, "interference ordering", s(120), leakage_ordering),
        check(5, "fairness ordering", s(120), fairness_ordering),
        check(6, "low-load MRT gain", s(120), low_load_mrt_gain),
        check(7, "scheme selection", s(1), scheme_selection),
        check(8, "determinism", s(1), determinism),
        check(9, "invariant suite", s(60), invariants),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
