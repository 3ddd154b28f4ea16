//! Randomized properties of the ECC model, the cost model and link
//! correction. Each check runs a fixed-seed proptest runner and returns a
//! readable error instead of panicking, so other harnesses can reuse it.

use std::fs::File;
use std::path::PathBuf;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};

use chiplink::ecc_cost::{gbn_window, NodeScaling};
use chiplink::link_library::CorrectionOptions;
use chiplink::{
    analyze, correct_link, default_family, ecc_stack_cost, energy_per_payload_bit, fom,
    frame_fail_prob, post_fec_ber, rs_decoder_energy, select_code, symbol_error_prob, BlockKind, CostParams, EccStack,
    FrameConfig, LinkKind, LinkRecord, MetricsKind, ProtectionMode, RetryLimit, RsCode, SynthTable, Targets,
};

pub const SEED: u64 = 0x5eed_c0de;

pub type Check = fn() -> Result<(), String>;

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        rng_seed: RngSeed::Fixed(SEED),
        failure_persistence: None,
        ..Config::default()
    })
}

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn synth() -> SynthTable {
    SynthTable::from_csv_reader(File::open(data("synth_asap7_sample.csv")).unwrap()).unwrap()
}

/// Log-uniform probability in `[10^lo, 10^hi]`.
fn log_p(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo..hi).prop_map(|e: f64| 10f64.powf(e))
}

fn coded_k() -> impl Strategy<Value = u32> {
    (22u32..=42).prop_map(|h| 2 * h)
}

fn ordered(a: f64, b: f64) -> (f64, f64) {
    if a <= b { (a, b) } else { (b, a) }
}

fn le(a: f64, b: f64) -> bool {
    a <= b * (1.0 + 1e-12) || a <= b + f64::MIN_POSITIVE
}

fn hybrid() -> FrameConfig {
    FrameConfig::baseline(ProtectionMode::Hybrid)
}

fn fec() -> FrameConfig {
    FrameConfig::baseline(ProtectionMode::FecOnly)
}

// ---- ecc_model ----

/// A stronger code never raises the post-FEC BER, over the coded family.
pub fn strength_monotone() -> Result<(), String> {
    let fixed = [1e-2, 1e-3, 1e-4, 1e-6];
    for p in fixed {
        sweep_strength(p).map_err(|e| e.to_string())?;
    }
    run(64, log_p(-8.0, -1.5), sweep_strength)
}

fn sweep_strength(p: f64) -> Result<(), TestCaseError> {
    let mut prev = f64::INFINITY;
    for k in (44..=84).rev().step_by(2) {
        let b = post_fec_ber(p, RsCode::new(86, k).unwrap()).unwrap();
        prop_assert!(le(b, prev), "p {p:e}: K={k} gives {b:e} above {prev:e}");
        prev = b;
    }
    Ok(())
}

/// Every failure quantity grows with the raw BER.
pub fn channel_monotone() -> Result<(), String> {
    let targets = Targets::default();
    run(256, (log_p(-9.0, -1.0), log_p(-9.0, -1.0), coded_k()), move |(a, b, k)| {
        let (lo, hi) = ordered(a, b);
        let code = RsCode::new(86, k).unwrap();
        prop_assert!(le(symbol_error_prob(lo, 8).unwrap(), symbol_error_prob(hi, 8).unwrap()));
        // past the point where every frame is detected the hybrid model is undefined
        if let Ok(r_hi) = analyze(hi, code, &hybrid(), &targets) {
            let r_lo = analyze(lo, code, &hybrid(), &targets).unwrap();
            prop_assert!(le(r_lo.p_sym, r_hi.p_sym));
            prop_assert!(le(r_lo.p_blk_fail, r_hi.p_blk_fail));
            prop_assert!(le(r_lo.p_frame_fail, r_hi.p_frame_fail));
            prop_assert!(le(r_lo.ber_delivered, r_hi.ber_delivered));
        }
        prop_assert!(le(frame_fail_prob(lo, code, &fec()).unwrap(), frame_fail_prob(hi, code, &fec()).unwrap()));
        prop_assert!(le(post_fec_ber(lo, code).unwrap(), post_fec_ber(hi, code).unwrap()));
        Ok(())
    })
}

/// A noisier channel never gets a weaker selected code, in either mode.
pub fn selected_k_monotone() -> Result<(), String> {
    let family = default_family();
    run(256, (log_p(-9.0, -1.5), log_p(-9.0, -1.5), any::<bool>()), move |(a, b, unbounded)| {
        let (lo, hi) = ordered(a, b);
        let retries = if unbounded { RetryLimit::Unbounded } else { RetryLimit::Bounded(1) };
        let targets = Targets::default().with_retries(retries);
        for frame in [fec(), hybrid()] {
            if let Ok(k_hi) = select_code(hi, &frame, &targets, &family) {
                let k_lo = select_code(lo, &frame, &targets, &family);
                prop_assert!(k_lo.is_ok(), "{lo:e} infeasible while {hi:e} is not");
                let k_lo = k_lo.unwrap();
                prop_assert!(k_lo.k() >= k_hi.k(), "{frame:?}: {lo:e} -> {k_lo:?}, {hi:e} -> {k_hi:?}");
            }
        }
        Ok(())
    })
}

/// CRC plus retry never needs a stronger code than FEC alone.
pub fn hybrid_dominance() -> Result<(), String> {
    let family = default_family();
    run(256, log_p(-6.0, -3.0), move |p| {
        for retries in [RetryLimit::Bounded(1), RetryLimit::Unbounded] {
            let targets = Targets::default().with_retries(retries);
            let kf = select_code(p, &fec(), &targets, &family).unwrap();
            let kh = select_code(p, &hybrid(), &targets, &family).unwrap();
            prop_assert!(kh.k() >= kf.k(), "{p:e}: hybrid {kh:?} fec {kf:?}");
        }
        Ok(())
    })
}

/// `goodput = (P/D)(K/N)(1 - p_det)`.
pub fn goodput_identity() -> Result<(), String> {
    let targets = Targets::default();
    run(256, (log_p(-9.0, -1.5), coded_k(), 1u32..=1024, 0u32..=32), move |(p, k, payload, header)| {
        let code = RsCode::new(86, k).unwrap();
        let frame = FrameConfig::new(payload, header, ProtectionMode::Hybrid).unwrap();
        let Ok(r) = analyze(p, code, &frame, &targets) else { return Ok(()) };
        let d = f64::from(frame.protected_bytes());
        let want = f64::from(payload) / d * f64::from(k) / 86.0 * (1.0 - r.p_det);
        prop_assert!(((r.goodput - want) / want).abs() <= 1e-15, "{} vs {want}", r.goodput);
        Ok(())
    })
}

// ---- ecc_cost ----

/// Linear in power, inversely linear in payload bits.
pub fn energy_linearity() -> Result<(), String> {
    run(256, (0.01f64..100.0, 0.1f64..20.0, 1.0f64..3e9, 1u32..=512, 2u32..=8), |(mw, a, f, b, m)| {
        let e = energy_per_payload_bit(mw, f, b);
        let scaled = energy_per_payload_bit(mw * a, f, b);
        prop_assert!(((scaled - a * e) / (a * e)).abs() < 1e-12);
        let wider = energy_per_payload_bit(mw, f, b * m);
        prop_assert!(((wider * f64::from(m) - e) / e).abs() < 1e-12);
        Ok(())
    })
}

/// Decoder energy tracks correction activity `Pr[1 <= X <= t]`. That grows
/// with the raw BER until most codewords exceed `t`, which for the weakest
/// code (t = 1) happens near 1.46e-3; the range stops at 1e-3.
pub fn decoder_energy_monotone() -> Result<(), String> {
    let table = synth();
    run(256, (log_p(-12.0, -3.0), log_p(-12.0, -3.0), coded_k(), 0.0f64..=1.0), move |(a, b, k, frac)| {
        let (lo, hi) = ordered(a, b);
        let code = RsCode::new(86, k).unwrap();
        let rec = table.rs(BlockKind::RsDecoder, k).unwrap();
        let e_lo = rs_decoder_energy(rec, lo, code, 8 * k, frac).unwrap();
        let e_hi = rs_decoder_energy(rec, hi, code, 8 * k, frac).unwrap();
        prop_assert!(le(e_lo, e_hi), "K={k}: {e_lo} at {lo:e}, {e_hi} at {hi:e}");
        Ok(())
    })
}

/// Longer round trips never shrink the window; replay is frames times D.
pub fn gbn_monotone() -> Result<(), String> {
    run(256, (0.0f64..500.0, 0.0f64..500.0, 1e8f64..3e9, 0u32..=4, 1u32..=2048), |(a, b, f, slack, d)| {
        let (lo, hi) = ordered(a, b);
        let w_lo = gbn_window(lo, f, 1.0, slack, d);
        let w_hi = gbn_window(hi, f, 1.0, slack, d);
        prop_assert!(w_lo.frames <= w_hi.frames);
        for w in [w_lo, w_hi] {
            prop_assert_eq!(w.replay_bytes, u64::from(w.frames) * u64::from(d));
        }
        Ok(())
    })
}

/// Scaling the identity-scaled cost equals costing with the scaling applied;
/// the stack is never faster than its slowest block.
pub fn scaling_commutes() -> Result<(), String> {
    let table = synth();
    let params = CostParams::default();
    run(256, (log_p(-9.0, -2.0), coded_k(), 0.05f64..4.0, 0.05f64..4.0), move |(p, k, ef, af)| {
        let code = RsCode::new(86, k).unwrap();
        let frame = hybrid();
        let stack = EccStack::select(&table, code, &frame, params.gbn_rtt_ns).unwrap();
        let base = ecc_stack_cost(&stack, &frame, p, &NodeScaling::identity(), &params).unwrap();
        let scaled = ecc_stack_cost(&stack, &frame, p, &NodeScaling::new(ef, af, "x").unwrap(), &params).unwrap();
        let close = |x: f64, y: f64| ((x - y) / y).abs() < 1e-12;
        prop_assert!(close(scaled.energy_pj_per_payload_bit, base.energy_pj_per_payload_bit * ef));
        prop_assert!(close(scaled.area_um2, base.area_um2 * af));
        prop_assert_eq!(scaled.throughput_gbps, base.throughput_gbps);
        for c in &scaled.components {
            prop_assert!(scaled.throughput_gbps <= c.throughput_gbps);
        }
        Ok(())
    })
}

// ---- link_library ----

fn raw_link() -> impl Strategy<Value = LinkRecord> {
    (log_p(-15.0, -3.0), 10.0f64..3000.0, 10.0f64..5000.0, 0.05f64..5.0, any::<bool>()).prop_map(
        |(ber, shore, areal, energy, optical)| LinkRecord {
            name: "x".into(),
            reach_mm: 10.0,
            process_nm: 7,
            raw_ber: ber,
            link_kind: if optical { LinkKind::Optical } else { LinkKind::Electrical },
            shoreline_gbps_per_mm: shore,
            areal_gbps_per_mm2: areal,
            energy_pj_per_bit: energy,
            metrics_kind: MetricsKind::RawTransceiver,
        },
    )
}

/// Already-corrected records are refused.
pub fn correction_idempotence() -> Result<(), String> {
    let table = synth();
    run(64, raw_link(), move |mut l| {
        l.metrics_kind = MetricsKind::CorrectedDelivered;
        prop_assert!(correct_link(&l, &hybrid(), &Targets::default(), &table, &CorrectionOptions::default()).is_err());
        Ok(())
    })
}

/// Correction costs shoreline and energy, never gives them back.
pub fn correction_costs() -> Result<(), String> {
    let table = synth();
    run(256, raw_link(), move |l| {
        let opts = CorrectionOptions::default();
        let Ok(m) = correct_link(&l, &hybrid(), &Targets::default(), &table, &opts) else { return Ok(()) };
        prop_assert!(m.goodput <= 1.0);
        prop_assert!(le(m.shoreline_gbps_per_mm, l.shoreline_gbps_per_mm));
        prop_assert!(le(l.energy_pj_per_bit, m.energy_pj_per_payload_bit));
        Ok(())
    })
}

/// Hybrid correction keeps at least the FEC-only goodput.
pub fn hybrid_goodput_dominance() -> Result<(), String> {
    let table = synth();
    run(256, (raw_link(), log_p(-6.0, -3.0)), move |(mut l, ber)| {
        l.raw_ber = ber;
        let opts = CorrectionOptions::default();
        let h = correct_link(&l, &hybrid(), &Targets::default(), &table, &opts).unwrap();
        let f = correct_link(&l, &fec(), &Targets::default(), &table, &opts).unwrap();
        prop_assert!(h.goodput >= f.goodput, "{ber:e}: hybrid {} ({:?}) fec {} ({:?})", h.goodput, h.selected_code, f.goodput, f.selected_code);
        Ok(())
    })
}

/// A shared energy scale leaves the FoM order of two links alone.
pub fn fom_ranking_invariant() -> Result<(), String> {
    run(256, (1.0f64..5000.0, 0.01f64..10.0, 1.0f64..5000.0, 0.01f64..10.0, 1e-3f64..1e3), |(s1, e1, s2, e2, c)| {
        let before = fom(s1, e1).unwrap().partial_cmp(&fom(s2, e2).unwrap());
        let after = fom(s1, e1 * c).unwrap().partial_cmp(&fom(s2, e2 * c).unwrap());
        // ties can split by one ulp under scaling; only strict orders must survive
        let strict = (fom(s1, e1).unwrap() / fom(s2, e2).unwrap() - 1.0).abs() > 1e-12;
        prop_assert!(!strict || before == after);
        Ok(())
    })
}

pub const CHECKS: &[(&str, Check)] = &[
    ("ecc: stronger code never raises post-FEC BER", strength_monotone),
    ("ecc: failure quantities monotone in raw BER", channel_monotone),
    ("ecc: selected K non-increasing in raw BER", selected_k_monotone),
    ("ecc: K_hybrid >= K_fec_only on [1e-6, 1e-3]", hybrid_dominance),
    ("ecc: goodput identity", goodput_identity),
    ("cost: energy linear in power, inverse in payload", energy_linearity),
    ("cost: decoder energy monotone in raw BER", decoder_energy_monotone),
    ("cost: GBN window monotone, replay = frames*D", gbn_monotone),
    ("cost: node scaling commutes, throughput <= components", scaling_commutes),
    ("library: corrected records are refused", correction_idempotence),
    ("library: corrected shoreline <= raw, energy >= raw", correction_costs),
    ("library: hybrid goodput >= FEC-only goodput", hybrid_goodput_dominance),
    ("library: FoM order invariant under shared energy scale", fom_ranking_invariant),
];
