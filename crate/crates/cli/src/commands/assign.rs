//! `assign`: exact and greedy link assignment for the base scenario and each
//! case study, under every configured link filter.

use std::fs::File;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use chiplink::assignment::{
    build_problem, case_study_transform, describe, read_floorplan, read_netlist, solve_exact,
    solve_greedy_simple, AssignmentSolution, LinkFilter,
};

use crate::commands::link_metrics;
use crate::config::{CaseStudy, ScenarioConfig};
use crate::output::{ensure_dir, slug, write_csv, write_json, write_text};
use crate::Outcome;

/// Machine-readable result of one (scenario, filter) run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssignReport {
    pub scenario: String,
    pub filter: LinkFilter,
    pub bw_scale: f64,
    pub dist_scale: f64,
    pub exact: AssignmentSolution,
    pub greedy: AssignmentSolution,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub scenario: String,
    pub filter: String,
    pub bw_scale: f64,
    pub dist_scale: f64,
    pub solver: String,
    pub status: String,
    pub total_power_w: Option<f64>,
    pub total_area_mm2: Option<f64>,
    pub objective: Option<f64>,
    pub lower_bound: Option<f64>,
    pub nodes: u64,
    /// Distinct links in use, `;`-separated.
    pub links_used: String,
    pub witness: String,
}

/// Greedy against exact, both normalized to the exact result
/// under the reference filter of the same scenario.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub scenario: String,
    pub filter: String,
    pub metric: String,
    pub exact: Option<f64>,
    pub greedy: Option<f64>,
    pub reference_filter: String,
    pub exact_normalized: Option<f64>,
    pub greedy_normalized: Option<f64>,
}

fn scenarios(cfg: &ScenarioConfig) -> Vec<CaseStudy> {
    let mut v = vec![CaseStudy { label: "base".into(), bw_scale: 1.0, dist_scale: 1.0 }];
    v.extend(cfg.case_studies.iter().cloned());
    v
}

/// Runs every (scenario, filter) pair without writing anything.
pub fn assign(cfg: &ScenarioConfig) -> Result<(Vec<AssignReport>, Vec<String>)> {
    let (_, links) = link_metrics::metrics(cfg)?;
    // raw links arrive here already corrected; ones that could not be are dropped
    let mut notes = Vec::new();
    let fp = cfg.require(&cfg.floorplan, "floorplan")?;
    let nl = cfg.require(&cfg.netlist, "netlist")?;
    let chiplets = read_floorplan(File::open(fp).with_context(|| format!("cannot open {}", fp.display()))?)
        .with_context(|| format!("floorplan {}", fp.display()))?;
    let nets = read_netlist(File::open(nl).with_context(|| format!("cannot open {}", nl.display()))?)
        .with_context(|| format!("netlist {}", nl.display()))?;
    let lambdas = cfg.lambdas()?;
    let filters = cfg.filters()?;
    let budget = cfg.time_budget();

    let mut reports = Vec::new();
    for sc in scenarios(cfg) {
        let bw = cfg.bw_scale * sc.bw_scale;
        let dist = cfg.dist_scale * sc.dist_scale;
        let scaled = case_study_transform(&nets, bw, dist)?;
        for &filter in &filters {
            let problem = build_problem(chiplets.clone(), scaled.clone(), links.clone(), lambdas, filter)
                .with_context(|| format!("scenario '{}', filter {filter}", sc.label))?;
            let exact = solve_exact(&problem, budget);
            let greedy = solve_greedy_simple(&problem);
            for (name, s) in [("exact", &exact), ("greedy", &greedy)] {
                if !s.status.has_solution() {
                    notes.push(format!("{} / {filter}: {name} {}", sc.label, s.status.as_str()));
                }
            }
            reports.push(AssignReport {
                scenario: sc.label.clone(),
                filter,
                bw_scale: bw,
                dist_scale: dist,
                exact,
                greedy,
                warnings: problem.warnings().to_vec(),
            });
        }
    }
    Ok((reports, notes))
}

fn summary_row(r: &AssignReport, s: &AssignmentSolution) -> SummaryRow {
    let solved = s.status.has_solution();
    SummaryRow {
        scenario: r.scenario.clone(),
        filter: r.filter.as_str().into(),
        bw_scale: r.bw_scale,
        dist_scale: r.dist_scale,
        solver: s.solver.clone(),
        status: s.status.as_str().into(),
        total_power_w: solved.then_some(s.total_power_w),
        total_area_mm2: solved.then_some(s.total_area_mm2),
        objective: solved.then_some(s.objective),
        lower_bound: s.lower_bound,
        nodes: s.nodes,
        links_used: s.links_used().join(";"),
        witness: s.witness.as_ref().map(describe).unwrap_or_default(),
    }
}

/// Greedy-vs-exact comparison rows for all reports.
pub fn comparison_rows(reports: &[AssignReport]) -> Vec<ComparisonRow> {
    let mut rows = Vec::new();
    for r in reports {
        let reference = reports
            .iter()
            .find(|x| x.scenario == r.scenario && x.filter == LinkFilter::All)
            .or_else(|| reports.iter().find(|x| x.scenario == r.scenario))
            .expect("report is its own fallback");
        let metric = |s: &AssignmentSolution, m: &str| {
            s.status.has_solution().then_some(match m {
                "power_w" => s.total_power_w,
                "area_mm2" => s.total_area_mm2,
                _ => s.objective,
            })
        };
        for m in ["power_w", "area_mm2", "objective"] {
            let base = metric(&reference.exact, m).filter(|v| *v > 0.0);
            let exact = metric(&r.exact, m);
            let greedy = metric(&r.greedy, m);
            rows.push(ComparisonRow {
                scenario: r.scenario.clone(),
                filter: r.filter.as_str().into(),
                metric: m.into(),
                exact,
                greedy,
                reference_filter: reference.filter.as_str().into(),
                exact_normalized: exact.zip(base).map(|(v, b)| v / b),
                greedy_normalized: greedy.zip(base).map(|(v, b)| v / b),
            });
        }
    }
    rows
}

pub fn run(cfg: &ScenarioConfig) -> Result<Outcome> {
    let (reports, notes) = assign(cfg)?;
    let out = ensure_dir(&cfg.out_dir)?;
    let mut summary = Vec::new();
    let mut lines = Vec::new();
    let mut warnings = notes;
    for r in &reports {
        let stem = format!("assignment_{}_{}_{}", slug(&cfg.label), slug(&r.scenario), r.filter.as_str());
        write_json(&out.join(format!("{stem}.json")), r)?;
        let mut text = format!(
            "scenario: {}  filter: {}  bw x{}  dist x{}\n\n",
            r.scenario, r.filter, r.bw_scale, r.dist_scale
        );
        text += &r.exact.to_text();
        text += "\n";
        text += &r.greedy.to_text();
        for w in &r.warnings {
            text += &format!("warning: {w}\n");
        }
        write_text(&out.join(format!("{stem}.txt")), &text)?;
        summary.push(summary_row(r, &r.exact));
        summary.push(summary_row(r, &r.greedy));
        warnings.extend(r.warnings.iter().map(|w| format!("{} / {}: {w}", r.scenario, r.filter)));
        let totals = if r.exact.status.has_solution() {
            format!("{:.2} W, {:.2} mm2", r.exact.total_power_w, r.exact.total_area_mm2)
        } else {
            "no assignment".into()
        };
        lines.push(format!(
            "{:<12} {:<10} {:<10} {}  [{}]",
            r.scenario,
            r.filter.as_str(),
            r.exact.status.as_str(),
            totals,
            r.exact.links_used().join(", ")
        ));
    }
    write_csv(&out.join("summary.csv"), &summary)?;
    let comparison = comparison_rows(&reports);
    write_csv(&out.join("greedy_vs_exact.csv"), &comparison)?;
    let mut scen: Vec<&str> = reports.iter().map(|r| r.scenario.as_str()).collect();
    scen.dedup();
    for s in scen {
        let part: Vec<ComparisonRow> = comparison.iter().filter(|r| r.scenario == s).cloned().collect();
        write_csv(&out.join(format!("greedy_vs_exact_{}.csv", slug(s))), &part)?;
    }
    lines.push(format!("wrote {}", out.display()));
    Ok(Outcome { lines, warnings, failed: false })
}
