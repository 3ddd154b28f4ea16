//! `ecc-sweep`: selected code, goodput, ECC energy and densities across a
//! grid of raw BERs, one series per protection mode and retry limit.

use std::fs::File;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use chiplink::ecc_cost::{ecc_stack_cost, EccStack, SynthTable};
use chiplink::ecc_model::{analyze, select_code, ProtectionMode, RsCode};

use crate::config::{Retries, ScenarioConfig};
use crate::output::{ensure_dir, slug, write_csv};
use crate::Outcome;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub series: String,
    pub p_pre: f64,
    pub mode: String,
    pub retries: String,
    /// `ok`, or why no point is reported.
    pub status: String,
    pub code_n: Option<u32>,
    pub code_k: Option<u32>,
    pub t: Option<u32>,
    pub rate: Option<f64>,
    pub goodput: Option<f64>,
    pub ber_delivered: Option<f64>,
    pub p_frame_fail: Option<f64>,
    pub p_det: Option<f64>,
    pub expected_attempts: Option<f64>,
    pub ecc_energy_pj_per_payload_bit: Option<f64>,
    pub ecc_area_mm2: Option<f64>,
    pub ecc_throughput_gbps: Option<f64>,
    pub ecc_shoreline_gbps_per_mm: Option<f64>,
    pub ecc_areal_gbps_per_mm2: Option<f64>,
}

struct Series {
    name: String,
    mode: ProtectionMode,
    retries: Option<Retries>,
}

fn series_list(cfg: &ScenarioConfig) -> Vec<Series> {
    let mut v = vec![Series { name: "fec_only".into(), mode: ProtectionMode::FecOnly, retries: None }];
    for r in &cfg.sweep_retries {
        v.push(Series { name: format!("hybrid_{}", r.label()), mode: ProtectionMode::Hybrid, retries: Some(*r) });
    }
    v
}

fn point(cfg: &ScenarioConfig, table: Option<&SynthTable>, s: &Series, p: f64, family: &[RsCode]) -> Result<SweepRow> {
    let frame = cfg.frame_in(s.mode)?;
    let mut targets = cfg.targets();
    if let Some(r) = s.retries {
        targets = targets.with_retries(r.limit());
    }
    let mut row = SweepRow {
        series: s.name.clone(),
        p_pre: p,
        mode: s.mode.as_str().into(),
        retries: s.retries.map(|r| r.label()).unwrap_or_default(),
        ..SweepRow::default()
    };
    let code = match select_code(p, &frame, &targets, family) {
        Ok(c) => c,
        Err(e) => {
            row.status = format!("no_code: {e}");
            return Ok(row);
        }
    };
    row.code_n = Some(code.n());
    row.code_k = Some(code.k());
    row.t = Some(code.t());
    row.rate = Some(code.rate());
    match analyze(p, code, &frame, &targets) {
        Ok(rep) => {
            row.goodput = Some(rep.goodput);
            row.ber_delivered = Some(rep.ber_delivered);
            row.p_frame_fail = Some(rep.p_frame_fail);
            row.p_det = Some(rep.p_det);
            row.expected_attempts = Some(rep.expected_attempts);
        }
        Err(e) => {
            row.status = format!("unusable: {e}");
            return Ok(row);
        }
    }
    if let Some(table) = table {
        let params = cfg.cost_params();
        let stack = EccStack::select(table, code, &frame, params.gbn_rtt_ns)?;
        let cost = ecc_stack_cost(&stack, &frame, p, &cfg.scaling()?, &params)?;
        row.ecc_energy_pj_per_payload_bit = Some(cost.energy_pj_per_payload_bit);
        row.ecc_area_mm2 = Some(cost.area_mm2());
        row.ecc_throughput_gbps = Some(cost.throughput_gbps);
        row.ecc_shoreline_gbps_per_mm = Some(cost.shoreline_gbps_per_mm);
        row.ecc_areal_gbps_per_mm2 = Some(cost.areal_gbps_per_mm2);
    }
    row.status = "ok".into();
    Ok(row)
}

/// Computes the sweep without writing anything.
pub fn sweep(cfg: &ScenarioConfig) -> Result<Vec<SweepRow>> {
    let table = match &cfg.synth_table {
        Some(p) => Some(
            SynthTable::from_csv_reader(File::open(p).with_context(|| format!("cannot open {}", p.display()))?)
                .with_context(|| format!("synthesis table {}", p.display()))?,
        ),
        None => None,
    };
    let family = cfg.family()?;
    let mut rows = Vec::new();
    for s in series_list(cfg) {
        for &p in &cfg.sweep_grid() {
            rows.push(point(cfg, table.as_ref(), &s, p, &family)?);
        }
    }
    Ok(rows)
}

pub fn run(cfg: &ScenarioConfig) -> Result<Outcome> {
    let rows = sweep(cfg)?;
    let out = ensure_dir(&cfg.out_dir)?;
    write_csv(&out.join("ecc_sweep.csv"), &rows)?;
    let mut lines = Vec::new();
    for s in series_list(cfg) {
        let part: Vec<SweepRow> = rows.iter().filter(|r| r.series == s.name).cloned().collect();
        write_csv(&out.join(format!("sweep_{}.csv", slug(&s.name))), &part)?;
        let feasible = part.iter().filter(|r| r.status == "ok").count();
        lines.push(format!("{}: {} of {} grid points feasible", s.name, feasible, part.len()));
    }
    if cfg.synth_table.is_none() {
        lines.push("no synth_table configured: ECC cost columns left empty".into());
    }
    lines.push(format!("wrote {}", out.display()));
    Ok(Outcome::ok(lines))
}
