use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::problem::{units_to_objective, AssignmentProblem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// Proven minimum.
    Optimal,
    /// Feasible, but the time budget ran out before the bound closed.
    Feasible,
    /// Proven to have no feasible assignment (or greedy got stuck).
    Infeasible,
    /// Time budget ran out before any feasible assignment was found.
    Unknown,
}

impl SolveStatus {
    pub fn has_solution(&self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Feasible)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unknown => "unknown",
        }
    }
}

/// Why a problem has no solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// No link passes filter, reach, and single-edge width for this net.
    NoAdmissibleLink { net: String, reason: String },
    /// The tightest edge: the narrowest choices of its nets still overflow it,
    /// or it is the most loaded edge when the conflict is combinatorial.
    EdgeOverload { chiplet: String, edge: String, min_demand_mm: f64, capacity_mm: f64 },
    /// Greedy could not place this net in the residual shoreline.
    NetBlocked { net: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetAssignment {
    pub net: String,
    pub link: String,
    /// Shoreline width taken on each endpoint edge.
    pub width_mm: f64,
    pub power_w: f64,
    /// `BW / BW^area` for this net (totals report half of the sum).
    pub transceiver_area_mm2: f64,
    pub cost: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssignmentSolution {
    pub solver: String,
    pub status: SolveStatus,
    pub assignments: Vec<NetAssignment>,
    pub total_power_w: f64,
    pub total_area_mm2: f64,
    /// Infinite without a solution; JSON writes that as `null`.
    #[serde(with = "infinite_as_null")]
    pub objective: f64,
    pub witness: Option<Witness>,
    pub nodes: u64,
    /// Proven lower bound on the optimum, when the solver knows one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<f64>,
}

impl AssignmentSolution {
    /// Builds a solution from one link index per net.
    pub fn from_choice(problem: &AssignmentProblem, choice: &[usize], status: SolveStatus, solver: &str) -> Self {
        let assignments: Vec<NetAssignment> = choice
            .iter()
            .enumerate()
            .map(|(n, &l)| {
                let net = &problem.nets[n];
                let link = &problem.links[l];
                NetAssignment {
                    net: net.id.clone(),
                    link: link.name.clone(),
                    width_mm: problem.min_width_mm(n, l),
                    power_w: link.energy_pj_per_bit * net.bw_req_gbps * 1e-3,
                    transceiver_area_mm2: net.bw_req_gbps / link.areal_gbps_per_mm2,
                    cost: units_to_objective(problem.cost_units(n, l)),
                }
            })
            .collect();
        let units: i128 = choice.iter().enumerate().map(|(n, &l)| problem.cost_units(n, l)).sum();
        let (total_power_w, total_area_mm2) = totals(&assignments);
        Self {
            solver: solver.to_string(),
            status,
            assignments,
            total_power_w,
            total_area_mm2,
            objective: units_to_objective(units),
            witness: None,
            nodes: 0,
            lower_bound: None,
        }
    }

    pub fn without_solution(status: SolveStatus, witness: Option<Witness>, solver: &str) -> Self {
        Self {
            solver: solver.to_string(),
            status,
            assignments: Vec::new(),
            total_power_w: 0.0,
            total_area_mm2: 0.0,
            objective: f64::INFINITY,
            witness,
            nodes: 0,
            lower_bound: None,
        }
    }

    /// Link index per net, resolved by name against `problem`.
    pub fn choice(&self, problem: &AssignmentProblem) -> Option<Vec<usize>> {
        if self.assignments.len() != problem.nets.len() {
            return None;
        }
        self.assignments
            .iter()
            .zip(&problem.nets)
            .map(|(a, n)| if a.net == n.id { problem.link_index(&a.link) } else { None })
            .collect()
    }

    /// Exact objective in cost units, `None` without a full assignment.
    pub fn objective_units(&self, problem: &AssignmentProblem) -> Option<i128> {
        let choice = self.choice(problem)?;
        Some(choice.iter().enumerate().map(|(n, &l)| problem.cost_units(n, l)).sum())
    }

    pub fn link_of(&self, net: &str) -> Option<&str> {
        self.assignments.iter().find(|a| a.net == net).map(|a| a.link.as_str())
    }

    /// Distinct link names in use, sorted.
    pub fn links_used(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.assignments.iter().map(|a| a.link.as_str()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Aligned plain-text table with totals.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "solver: {}  status: {}", self.solver, self.status.as_str());
        if let Some(w) = &self.witness {
            let _ = writeln!(s, "witness: {}", describe(w));
        }
        if !self.assignments.is_empty() {
            let nw = self.assignments.iter().map(|a| a.net.len()).max().unwrap_or(3).max(3);
            let lw = self.assignments.iter().map(|a| a.link.len()).max().unwrap_or(4).max(4);
            let _ = writeln!(s, "{:<nw$}  {:<lw$}  {:>10}  {:>10}  {:>10}", "net", "link", "width_mm", "power_w", "area_mm2");
            for a in &self.assignments {
                let _ = writeln!(
                    s,
                    "{:<nw$}  {:<lw$}  {:>10.4}  {:>10.4}  {:>10.4}",
                    a.net, a.link, a.width_mm, a.power_w, a.transceiver_area_mm2
                );
            }
        }
        let _ = writeln!(s, "total power: {:.4} W", self.total_power_w);
        let _ = writeln!(s, "total area:  {:.4} mm2", self.total_area_mm2);
        let _ = writeln!(s, "objective:   {:.9}", self.objective);
        if let (Some(lb), SolveStatus::Feasible) = (self.lower_bound, self.status) {
            let gap = if self.objective > 0.0 { (self.objective - lb) / self.objective } else { 0.0 };
            let _ = writeln!(s, "bound:       {lb:.9} (gap {:.4}%)", 100.0 * gap);
        }
        let _ = writeln!(s, "nodes:       {}", self.nodes);
        s
    }
}

mod infinite_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// One-line human description of a witness.
pub fn describe(w: &Witness) -> String {
    match w {
        Witness::NoAdmissibleLink { net, reason } => format!("net '{net}': {reason}"),
        Witness::EdgeOverload { chiplet, edge, min_demand_mm, capacity_mm } => format!(
            "edge {chiplet}/{edge}: narrowest choices need {min_demand_mm:.4} mm of {capacity_mm:.4} mm"
        ),
        Witness::NetBlocked { net } => format!("net '{net}' does not fit the remaining shoreline"),
    }
}

fn totals(assignments: &[NetAssignment]) -> (f64, f64) {
    let power = assignments.iter().map(|a| a.power_w).sum();
    let area: f64 = assignments.iter().map(|a| a.transceiver_area_mm2).sum();
    (power, 0.5 * area)
}

/// `(Σ E·BW, ½ Σ BW / BW^area)` over the solution's nets, recomputed from
/// the problem's link data.
pub fn report_totals(solution: &AssignmentSolution, problem: &AssignmentProblem) -> (f64, f64) {
    let mut power = 0.0;
    let mut area = 0.0;
    for a in &solution.assignments {
        let (Some(n), Some(l)) = (problem.nets.iter().find(|n| n.id == a.net), problem.link_index(&a.link)) else {
            continue;
        };
        let link = &problem.links[l];
        power += link.energy_pj_per_bit * n.bw_req_gbps * 1e-3;
        area += n.bw_req_gbps / link.areal_gbps_per_mm2;
    }
    (power, 0.5 * area)
}
