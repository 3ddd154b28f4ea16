//! `link-metrics`: corrected delivered metrics and raw/corrected FoM per link.

use std::fs::File;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use chiplink::ecc_cost::SynthTable;
use chiplink::link_library::{correct_link, fom, load_link_library, LinkRecord, MetricsKind};

use crate::config::ScenarioConfig;
use crate::output::{ensure_dir, write_csv, write_csv_with_header};
use crate::Outcome;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub name: String,
    pub link_kind: String,
    pub reach_mm: f64,
    pub process_nm: u32,
    pub raw_ber: f64,
    pub input_metrics: String,
    /// `corrected`, `passthrough`, `as_published`, or `infeasible: <reason>`.
    pub status: String,
    pub code_k: Option<u32>,
    pub t: Option<u32>,
    pub goodput: Option<f64>,
    pub shoreline_raw: Option<f64>,
    pub areal_raw: Option<f64>,
    pub energy_raw: Option<f64>,
    pub fom_raw: Option<f64>,
    pub shoreline_corrected: Option<f64>,
    pub areal_corrected: Option<f64>,
    pub energy_corrected: Option<f64>,
    pub fom_corrected: Option<f64>,
    pub ecc_energy_pj_per_payload_bit: Option<f64>,
    pub ecc_area_mm2: Option<f64>,
}

/// One figure-of-merit point: reach against FoM.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FomPoint {
    pub name: String,
    pub link_kind: String,
    pub reach_mm: f64,
    pub fom: f64,
}

/// Column order of the link library format.
pub const LIBRARY_HEADER: [&str; 9] = [
    "name",
    "reach_mm",
    "process_nm",
    "raw_ber",
    "link_kind",
    "shoreline_gbps_per_mm",
    "areal_gbps_per_mm2",
    "energy_pj_per_bit",
    "metrics_kind",
];

fn kind_str(l: &LinkRecord) -> String {
    if l.is_optical() { "optical" } else { "electrical" }.into()
}

/// Computes per-link rows plus the corrected records usable for assignment.
pub fn metrics(cfg: &ScenarioConfig) -> Result<(Vec<MetricsRow>, Vec<LinkRecord>)> {
    let lib_path = cfg.require(&cfg.link_library, "link_library")?;
    let links = load_link_library(File::open(lib_path).with_context(|| format!("cannot open {}", lib_path.display()))?)
        .with_context(|| format!("link library {}", lib_path.display()))?;
    let frame = cfg.frame()?;
    let targets = cfg.targets();
    let opts = cfg.correction_options()?;
    let needs_costs = links
        .iter()
        .any(|l| l.metrics_kind == MetricsKind::RawTransceiver && l.raw_ber > targets.ber_target);
    let table = match &cfg.synth_table {
        Some(p) => SynthTable::from_csv_reader(File::open(p).with_context(|| format!("cannot open {}", p.display()))?)
            .with_context(|| format!("synthesis table {}", p.display()))?,
        None if needs_costs => bail!("config: field `synth_table` is required to correct raw links above the BER target"),
        None => SynthTable::default(),
    };

    let mut rows = Vec::new();
    let mut corrected = Vec::new();
    for l in &links {
        let mut row = MetricsRow {
            name: l.name.clone(),
            link_kind: kind_str(l),
            reach_mm: l.reach_mm,
            process_nm: l.process_nm,
            raw_ber: l.raw_ber,
            ..MetricsRow::default()
        };
        match l.metrics_kind {
            MetricsKind::CorrectedDelivered => {
                row.input_metrics = "corrected_delivered".into();
                row.status = "as_published".into();
                row.shoreline_corrected = Some(l.shoreline_gbps_per_mm);
                row.areal_corrected = Some(l.areal_gbps_per_mm2);
                row.energy_corrected = Some(l.energy_pj_per_bit);
                row.fom_corrected = Some(l.fom()?);
                corrected.push(l.clone());
            }
            MetricsKind::RawTransceiver => {
                row.input_metrics = "raw_transceiver".into();
                row.shoreline_raw = Some(l.shoreline_gbps_per_mm);
                row.areal_raw = Some(l.areal_gbps_per_mm2);
                row.energy_raw = Some(l.energy_pj_per_bit);
                row.fom_raw = Some(fom(l.shoreline_gbps_per_mm, l.energy_pj_per_bit)?);
                match correct_link(l, &frame, &targets, &table, &opts) {
                    Ok(m) => {
                        row.status = if m.selected_code.is_uncoded() && m.goodput == 1.0 { "passthrough" } else { "corrected" }.into();
                        row.code_k = Some(m.selected_code.k());
                        row.t = Some(m.selected_code.t());
                        row.goodput = Some(m.goodput);
                        row.shoreline_corrected = Some(m.shoreline_gbps_per_mm);
                        row.areal_corrected = Some(m.areal_gbps_per_mm2);
                        row.energy_corrected = Some(m.energy_pj_per_payload_bit);
                        row.fom_corrected = Some(m.fom);
                        row.ecc_energy_pj_per_payload_bit = Some(m.ecc_energy_pj_per_payload_bit);
                        row.ecc_area_mm2 = Some(m.ecc_area_mm2);
                        corrected.push(m.to_record(l));
                    }
                    Err(e) => row.status = format!("infeasible: {e}"),
                }
            }
        }
        rows.push(row);
    }
    Ok((rows, corrected))
}

pub fn run(cfg: &ScenarioConfig) -> Result<Outcome> {
    let (rows, corrected) = metrics(cfg)?;
    let out = ensure_dir(&cfg.out_dir)?;
    write_csv(&out.join("link_metrics.csv"), &rows)?;
    let raw: Vec<FomPoint> = rows
        .iter()
        .filter_map(|r| {
            r.fom_raw.map(|f| FomPoint { name: r.name.clone(), link_kind: r.link_kind.clone(), reach_mm: r.reach_mm, fom: f })
        })
        .collect();
    let cor: Vec<FomPoint> = rows
        .iter()
        .filter_map(|r| {
            r.fom_corrected
                .map(|f| FomPoint { name: r.name.clone(), link_kind: r.link_kind.clone(), reach_mm: r.reach_mm, fom: f })
        })
        .collect();
    write_csv(&out.join("fom_raw.csv"), &raw)?;
    write_csv(&out.join("fom_corrected.csv"), &cor)?;
    write_csv_with_header(&out.join("corrected_library.csv"), &LIBRARY_HEADER, &corrected)?;

    let mut lines = Vec::new();
    let mut warnings = Vec::new();
    for r in &rows {
        if let Some(reason) = r.status.strip_prefix("infeasible: ") {
            warnings.push(format!("{}: {reason}", r.name));
        }
    }
    lines.push(format!("{} links, {} with delivered metrics", rows.len(), corrected.len()));
    lines.push(format!("wrote {}", out.display()));
    Ok(Outcome { lines, warnings, failed: false })
}
