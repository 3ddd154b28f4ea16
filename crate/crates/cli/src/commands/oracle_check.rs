//! `oracle-check`: the main engines against the independent oracles.

use std::fs::File;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use chiplink::assignment::{solve_exact, solve_greedy_simple, SolveStatus};
use chiplink::ecc_cost::SynthTable;
use chiplink::ecc_model::{
    block_fail_prob, frame_fail_prob, post_fec_ber, symbol_error_prob, FrameConfig, ProtectionMode, RsCode,
};
use chiplink_oracle::hp::exact;
use chiplink_oracle::{
    brute_force_assign, hp_block_fail, hp_frame_fail, hp_post_fec_ber, random_instance, rel_error, simulate_frames,
    BigFloat, Checker,
};

use crate::config::ScenarioConfig;
use crate::output::{ensure_dir, write_csv};
use crate::Outcome;

/// Relative-error ceiling for the closed-form probabilities.
pub const PRECISION_LIMIT: f64 = 1e-12;
/// Smallest reference value the precision gate looks at.
pub const PRECISION_FLOOR: f64 = 1e-27;
/// Monte Carlo agreement band in standard errors.
pub const MC_SIGMAS: f64 = 3.0;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub check: String,
    pub item: String,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Block-fail, post-FEC BER and frame-fail probabilities against exact or
/// high-precision references, for every code and grid point where the
/// reference is at least [`PRECISION_FLOOR`].
pub fn precision_gate(grid: &[f64], family: &[RsCode], frame: &FrameConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let mut push = |quantity: &str, p: f64, code: RsCode, err: f64| {
        rows.push(CheckRow {
            check: "precision".into(),
            item: format!("{quantity} {code} @ {p:e}"),
            measured: err,
            threshold: PRECISION_LIMIT,
            pass: err < PRECISION_LIMIT,
        });
    };
    for &p in grid {
        let pq = exact(p)?;
        let p_sym = symbol_error_prob(p, 8)?;
        for &code in family {
            let r = hp_block_fail(&pq, code)?;
            if BigFloat::from_rational(&r).to_f64() >= PRECISION_FLOOR {
                push("block_fail", p, code, rel_error(block_fail_prob(p_sym, code)?, &r));
            }
            let r = hp_post_fec_ber(&pq, code)?;
            if BigFloat::from_rational(&r).to_f64() >= PRECISION_FLOOR {
                push("post_fec_ber", p, code, rel_error(post_fec_ber(p, code)?, &r));
            }
            let r = hp_frame_fail(&pq, code, frame)?;
            if r.to_f64() >= PRECISION_FLOOR {
                push("frame_fail", p, code, chiplink_oracle::hp::rel_error_bf(frame_fail_prob(p, code, frame)?, &r));
            }
        }
    }
    Ok(rows)
}

/// Simulated block-failure rate against the closed form.
pub fn monte_carlo_check(p: f64, code: RsCode, frame: &FrameConfig, trials: u64, seed: u64) -> Result<CheckRow> {
    let sim = simulate_frames(p, code, frame, trials, seed)?;
    let analytic = block_fail_prob(symbol_error_prob(p, code.symbol_bits())?, code)?;
    let z = if sim.p_blk_fail_se > 0.0 {
        (sim.p_blk_fail - analytic) / sim.p_blk_fail_se
    } else if sim.p_blk_fail == analytic {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(CheckRow {
        check: "monte_carlo".into(),
        item: format!(
            "{code} @ {p:e}: {} blocks, empirical {:.6e} vs {:.6e}",
            sim.blocks, sim.p_blk_fail, analytic
        ),
        measured: z.abs(),
        threshold: MC_SIGMAS,
        pass: z.abs() < MC_SIGMAS,
    })
}

/// Per-instance size for the solver suite: every (nets, links) pair up to
/// the limits appears in turn.
pub fn instance_shape(i: u32, max_nets: usize, max_links: usize) -> (usize, usize) {
    let i = i as usize;
    let nets = 1 + i % max_nets.max(1);
    let links = 1 + (i / max_nets.max(1)) % max_links.max(1);
    (nets, links)
}

/// Seed of instance `i` in a suite seeded with `seed`.
pub fn instance_seed(seed: u64, i: u32) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(u64::from(i))
}

/// Exact solver against brute force, the constraint checker and greedy on
/// `count` seeded random instances. One row per instance; `measured` is the
/// objective difference in cost units.
pub fn solver_suite(seed: u64, count: u32, max_nets: usize, max_links: usize) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::with_capacity(count as usize);
    for i in 0..count {
        let (nets, links) = instance_shape(i, max_nets, max_links);
        let s = instance_seed(seed, i);
        let p = random_instance(s, nets, links);
        let e = solve_exact(&p, Duration::from_secs(30));
        let b = brute_force_assign(&p)?;
        let g = solve_greedy_simple(&p);
        let mut problems = Vec::new();
        let mut delta = 0.0;
        match (e.objective_units(&p), b.objective_units(&p)) {
            (Some(x), Some(y)) => {
                delta = (x - y) as f64;
                if x != y {
                    problems.push("objective differs from brute force".to_string());
                }
                if e.status != SolveStatus::Optimal {
                    problems.push(format!("status {}", e.status.as_str()));
                }
                if let Err(errs) = Checker::new(&p).check(&e) {
                    problems.extend(errs);
                }
                if let Some(gu) = g.objective_units(&p) {
                    if gu < x {
                        problems.push("greedy beats exact".into());
                    }
                }
            }
            (None, None) => {
                if e.status != SolveStatus::Infeasible {
                    problems.push(format!("brute force infeasible, exact {}", e.status.as_str()));
                }
            }
            (x, _) => problems.push(format!("feasibility disagrees: exact {}", if x.is_some() { "found" } else { "none" })),
        }
        rows.push(CheckRow {
            check: "solver".into(),
            item: format!(
                "seed {s} ({nets} nets, {links} links): {}",
                if problems.is_empty() { b.status.as_str().to_string() } else { problems.join("; ") }
            ),
            measured: delta,
            threshold: 0.0,
            pass: problems.is_empty(),
        });
    }
    Ok(rows)
}

pub fn run(cfg: &ScenarioConfig) -> Result<Outcome> {
    // a configured cost table must parse; a corrupted one is an input error
    if let Some(p) = &cfg.synth_table {
        SynthTable::from_csv_reader(File::open(p).with_context(|| format!("cannot open {}", p.display()))?)
            .with_context(|| format!("synthesis table {}", p.display()))?;
    }
    let family = cfg.family()?;
    let frame = cfg.frame_in(ProtectionMode::Hybrid)?;
    let mut lines = Vec::new();

    let t = Instant::now();
    let precision = precision_gate(&cfg.oracle_ber_grid, &family, &frame)?;
    let worst = precision.iter().map(|r| r.measured).fold(0.0, f64::max);
    lines.push(format!(
        "precision: {} comparisons, max rel. err {worst:.3e} (limit {PRECISION_LIMIT:e}) in {:.1?}",
        precision.len(),
        t.elapsed()
    ));

    let t = Instant::now();
    let code = RsCode::new(cfg.code_n, cfg.mc_code_k)?;
    let mc = monte_carlo_check(cfg.mc_ber, code, &frame, cfg.mc_trials, cfg.seed)?;
    lines.push(format!("monte carlo: {}, |z| = {:.2} in {:.1?}", mc.item, mc.measured, t.elapsed()));

    let t = Instant::now();
    let solver = solver_suite(cfg.seed, cfg.oracle_instances, cfg.oracle_max_nets, cfg.oracle_max_links)?;
    let agree = solver.iter().filter(|r| r.pass).count();
    let max_delta = solver.iter().map(|r| r.measured.abs()).fold(0.0, f64::max);
    lines.push(format!(
        "solver: {agree}/{} instances agree with brute force, max objective delta {max_delta} units in {:.1?}",
        solver.len(),
        t.elapsed()
    ));

    let mut rows = precision;
    rows.push(mc);
    rows.extend(solver);
    let failures: Vec<String> = rows.iter().filter(|r| !r.pass).map(|r| format!("{}: {}", r.check, r.item)).collect();
    let out = ensure_dir(&cfg.out_dir)?;
    write_csv(&out.join("oracle_check.csv"), &rows)?;
    lines.push(if failures.is_empty() { "all checks passed".into() } else { format!("{} checks FAILED", failures.len()) });
    lines.push(format!("wrote {}", out.display()));
    Ok(Outcome { lines, warnings: failures.clone(), failed: !failures.is_empty() })
}
