//! Constraint checker for assignment solutions.
//!
//! Works only from the raw problem data (chiplets, nets, links, filter) and
//! deliberately re-derives everything instead of calling into the solver.

use std::collections::HashMap;

use chiplink::assignment::{AssignmentProblem, AssignmentSolution};
use chiplink::link_library::LinkKind;
use chiplink::assignment::LinkFilter;

/// Relative slack on width sums and bandwidth coverage.
const SLACK: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Checker<'a> {
    problem: &'a AssignmentProblem,
    /// (chiplet, edge) -> width
    budget: HashMap<(&'a str, &'a str), f64>,
    link_by_name: HashMap<&'a str, usize>,
    /// Dense copies for the enumeration fast path: endpoint slots per net
    /// (`None` when the endpoint is not a chiplet edge) and slot widths.
    slots: Vec<[Option<usize>; 2]>,
    slot_width: Vec<f64>,
}

fn allowed(filter: LinkFilter, kind: LinkKind) -> bool {
    match filter {
        LinkFilter::All => true,
        LinkFilter::ElectricalOnly => matches!(kind, LinkKind::Electrical),
        LinkFilter::OpticalOnly => matches!(kind, LinkKind::Optical),
    }
}

impl<'a> Checker<'a> {
    pub fn new(problem: &'a AssignmentProblem) -> Self {
        let mut budget = HashMap::new();
        for c in &problem.chiplets {
            for e in &c.edges {
                budget.insert((c.id.as_str(), e.id.as_str()), e.width_mm);
            }
        }
        let link_by_name = problem.links.iter().enumerate().map(|(i, l)| (l.name.as_str(), i)).collect();
        let mut slot_of: HashMap<(&str, &str), usize> = HashMap::new();
        let mut slot_width = Vec::new();
        for c in &problem.chiplets {
            for e in &c.edges {
                slot_of.insert((c.id.as_str(), e.id.as_str()), slot_width.len());
                slot_width.push(e.width_mm);
            }
        }
        let slots = problem
            .nets
            .iter()
            .map(|n| [&n.a, &n.b].map(|ep| slot_of.get(&(ep.chiplet.as_str(), ep.edge.as_str())).copied()))
            .collect();
        Self { problem, budget, link_by_name, slots, slot_width }
    }

    /// Checks one link index per net with minimal widths. Returns the
    /// violated constraints, empty when feasible.
    pub fn violations_for_choice(&self, choice: &[usize]) -> Vec<String> {
        let widths: Vec<f64> = choice
            .iter()
            .zip(&self.problem.nets)
            .map(|(&l, n)| n.bw_req_gbps / self.problem.links[l].shoreline_gbps_per_mm)
            .collect();
        self.violations(choice, &widths)
    }

    /// Same verdict as [`violations_for_choice`](Self::violations_for_choice)
    /// without building messages.
    pub fn feasible_choice(&self, choice: &[usize]) -> bool {
        let p = self.problem;
        let mut used = vec![0.0; self.slot_width.len()];
        for ((n, &l), slots) in p.nets.iter().zip(choice).zip(&self.slots) {
            let link = &p.links[l];
            if !allowed(p.filter, link.link_kind) || n.distance_mm > link.reach_mm {
                return false;
            }
            let w = n.bw_req_gbps / link.shoreline_gbps_per_mm;
            for slot in slots {
                match slot {
                    Some(s) => used[*s] += w,
                    None => return false,
                }
            }
        }
        used.iter().zip(&self.slot_width).all(|(u, cap)| *u <= cap * (1.0 + SLACK))
    }

    /// Checks a reported solution, resolving links by name.
    pub fn check(&self, solution: &AssignmentSolution) -> Result<(), Vec<String>> {
        let p = self.problem;
        let mut errs = Vec::new();
        if solution.assignments.len() != p.nets.len() {
            errs.push(format!(
                "single link per net: {} assignments for {} nets",
                solution.assignments.len(),
                p.nets.len()
            ));
            return Err(errs);
        }
        let mut choice = Vec::new();
        let mut widths = Vec::new();
        for (a, n) in solution.assignments.iter().zip(&p.nets) {
            if a.net != n.id {
                errs.push(format!("single link per net: assignment for '{}' where '{}' expected", a.net, n.id));
                continue;
            }
            match self.link_by_name.get(a.link.as_str()) {
                Some(&l) => {
                    choice.push(l);
                    widths.push(a.width_mm);
                }
                None => errs.push(format!("net '{}' uses unknown link '{}'", n.id, a.link)),
            }
        }
        if errs.is_empty() {
            errs = self.violations(&choice, &widths);
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    fn violations(&self, choice: &[usize], widths: &[f64]) -> Vec<String> {
        let p = self.problem;
        let mut errs = Vec::new();
        let mut used: HashMap<(&str, &str), f64> = HashMap::new();
        for ((n, &l), &w) in p.nets.iter().zip(choice).zip(widths) {
            let link = &p.links[l];
            if !allowed(p.filter, link.link_kind) {
                errs.push(format!("net '{}': link '{}' excluded by filter", n.id, link.name));
            }
            if n.distance_mm > link.reach_mm {
                errs.push(format!("reachability: net '{}' needs {} mm, '{}' reaches {} mm", n.id, n.distance_mm, link.name, link.reach_mm));
            }
            if w * link.shoreline_gbps_per_mm < n.bw_req_gbps * (1.0 - SLACK) {
                errs.push(format!("bandwidth: net '{}' gets {} Gbps of {}", n.id, w * link.shoreline_gbps_per_mm, n.bw_req_gbps));
            }
            for ep in [&n.a, &n.b] {
                *used.entry((ep.chiplet.as_str(), ep.edge.as_str())).or_insert(0.0) += w;
            }
        }
        let mut keys: Vec<_> = used.keys().copied().collect();
        keys.sort();
        for key in keys {
            let total = used[&key];
            match self.budget.get(&key) {
                None => errs.push(format!("net endpoint {}/{} is not a chiplet edge", key.0, key.1)),
                Some(&cap) if total > cap * (1.0 + SLACK) => {
                    errs.push(format!("shoreline: edge {}/{} uses {total} mm of {cap} mm", key.0, key.1))
                }
                Some(_) => {}
            }
        }
        errs
    }
}
