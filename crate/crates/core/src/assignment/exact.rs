//! Exact branch-and-bound for the link assignment.
//!
//! The objective ignores widths, so each net uses the minimal width of its
//! chosen link and the search is over one link per net. Optimal solutions
//! are made unique by a fixed tie-break: lowest total cost, then the
//! lexicographically smallest vector of per-net (cost, link name) ranks in
//! input order. Depth-first search over nets in input order with candidates
//! in rank order meets feasible solutions in exactly that lexicographic
//! order, so the first solution found at the optimal cost is the answer.
//!
//! Reductions that keep the canonical optimum intact:
//! * a candidate is dropped when an earlier-ranked one is no wider;
//! * edges that cannot overflow are ignored and nets touching none of the
//!   remaining edges take their first candidate;
//! * nets linked by shared binding edges form independent components;
//! * identical nets (same edges, bandwidth, candidates) take non-decreasing
//!   ranks in input order;
//! * candidates whose cost alone pushes the root bound past a heuristic
//!   incumbent are removed.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use super::problem::{fits, units_to_objective, AssignmentProblem};
use super::solution::{AssignmentSolution, SolveStatus, Witness};

const NAME: &str = "exact";
const CHECK_EVERY: u64 = 1024;

/// Nets are interchangeable when edges (with multiplicity), bandwidth and
/// surviving links all match.
type TwinKey = (Vec<(usize, u64)>, u64, Vec<usize>);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub time_budget: Duration,
    /// Strengthen node bounds with edge-capacity Lagrange multipliers.
    pub lagrangian: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { time_budget: Duration::from_secs(10), lagrangian: true }
    }
}

pub fn solve_exact(problem: &AssignmentProblem, time_budget: Duration) -> AssignmentSolution {
    solve_exact_with(problem, &SolveOptions { time_budget, ..SolveOptions::default() })
}

#[derive(Clone, Copy, Debug)]
struct Cand {
    link: usize,
    rank: u32,
    cost: i128,
    width: f64,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn no_link_witness(problem: &AssignmentProblem, n: usize) -> Witness {
    let reason = if problem.reachable_links(n).is_empty() {
        format!("no link reaches {} mm under filter {}", problem.nets[n].distance_mm, problem.filter)
    } else {
        "every reach-feasible link is wider than an endpoint edge".to_string()
    };
    Witness::NoAdmissibleLink { net: problem.nets[n].id.clone(), reason }
}

fn overload_witness(problem: &AssignmentProblem, edge: usize, min_demand_mm: f64) -> Witness {
    let e = &problem.edges()[edge];
    Witness::EdgeOverload {
        chiplet: e.chiplet.clone(),
        edge: e.edge.clone(),
        min_demand_mm,
        capacity_mm: e.capacity_mm,
    }
}

/// Branch-and-bound to proven optimality or until the time budget expires.
pub fn solve_exact_with(problem: &AssignmentProblem, opts: &SolveOptions) -> AssignmentSolution {
    let deadline = Instant::now() + opts.time_budget;
    let n_nets = problem.nets.len();
    let n_edges = problem.edges().len();

    for n in 0..n_nets {
        if problem.candidates(n).is_empty() {
            return AssignmentSolution::without_solution(SolveStatus::Infeasible, Some(no_link_witness(problem, n)), NAME);
        }
    }

    // Pareto filter: keep a candidate only if it is narrower than every
    // earlier-ranked one.
    let pruned: Vec<Vec<Cand>> = (0..n_nets)
        .map(|n| {
            let mut out: Vec<Cand> = Vec::new();
            for c in problem.candidates(n) {
                if out.last().is_none_or(|last| c.width_mm < last.width) {
                    out.push(Cand { link: c.link, rank: c.rank, cost: c.cost, width: c.width_mm });
                }
            }
            out
        })
        .collect();

    let mut max_load = vec![0.0; n_edges];
    let mut min_load = vec![0.0; n_edges];
    for (n, cands) in pruned.iter().enumerate() {
        for e in problem.net_edges(n) {
            max_load[e] += cands[0].width;
            min_load[e] += cands.last().map_or(0.0, |c| c.width);
        }
    }
    let tightest = |edges: &mut dyn Iterator<Item = usize>| {
        edges
            .map(|e| (e, min_load[e] / problem.edges()[e].capacity_mm))
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(e, _)| overload_witness(problem, e, min_load[e]))
    };
    if (0..n_edges).any(|e| !fits(min_load[e], problem.edges()[e].capacity_mm)) {
        let w = tightest(&mut (0..n_edges));
        return AssignmentSolution::without_solution(SolveStatus::Infeasible, w, NAME);
    }
    let binding: Vec<bool> = (0..n_edges).map(|e| !fits(max_load[e], problem.edges()[e].capacity_mm)).collect();

    let mut uf = UnionFind((0..n_nets).collect());
    let mut first_on_edge: Vec<Option<usize>> = vec![None; n_edges];
    for n in 0..n_nets {
        for e in problem.net_edges(n) {
            if binding[e] {
                match first_on_edge[e] {
                    Some(m) => uf.union(m, n),
                    None => first_on_edge[e] = Some(n),
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of: HashMap<usize, usize> = HashMap::new();
    let mut choice = vec![usize::MAX; n_nets];
    for n in 0..n_nets {
        if !problem.net_edges(n).iter().any(|&e| binding[e]) {
            choice[n] = pruned[n][0].link;
            continue;
        }
        let root = uf.find(n);
        let g = *group_of.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(n);
    }

    let mut status = SolveStatus::Optimal;
    let mut nodes = 0u64;
    // nets outside every component sit at their cheapest candidate
    let mut bound: i128 = (0..n_nets).filter(|&n| choice[n] != usize::MAX).map(|n| pruned[n][0].cost).sum();
    for nets in &groups {
        let mut comp = Component::new(problem, nets, &pruned, &binding, deadline, opts.lagrangian);
        let outcome = comp.solve();
        nodes += comp.nodes;
        match outcome {
            Outcome::Solved { choice: local, proven, bound: local_bound } => {
                for (i, &n) in nets.iter().enumerate() {
                    choice[n] = local[i];
                }
                bound += local_bound;
                if !proven {
                    status = SolveStatus::Feasible;
                }
            }
            Outcome::Infeasible => {
                let edges: Vec<usize> =
                    nets.iter().flat_map(|&n| problem.net_edges(n)).filter(|&e| binding[e]).collect();
                let w = tightest(&mut edges.into_iter());
                let mut sol = AssignmentSolution::without_solution(SolveStatus::Infeasible, w, NAME);
                sol.nodes = nodes;
                return sol;
            }
            Outcome::Unknown => {
                let mut sol = AssignmentSolution::without_solution(SolveStatus::Unknown, None, NAME);
                sol.nodes = nodes;
                return sol;
            }
        }
    }
    let mut sol = AssignmentSolution::from_choice(problem, &choice, status, NAME);
    sol.nodes = nodes;
    sol.lower_bound = Some(if status == SolveStatus::Optimal { sol.objective } else { units_to_objective(bound) });
    sol
}

enum Outcome {
    /// `bound` is a proven lower bound on the component's cost.
    Solved { choice: Vec<usize>, proven: bool, bound: i128 },
    Infeasible,
    Unknown,
}

/// One connected group of nets sharing binding edges, in local indices.
struct Component {
    cands: Vec<Vec<Cand>>,
    /// Local binding edges of each net with their multiplicity.
    net_edges: Vec<Vec<(usize, f64)>>,
    capacity: Vec<f64>,
    residual: Vec<f64>,
    /// Previous identical net, if any.
    twin: Vec<Option<usize>>,
    deadline: Instant,
    lagrangian: bool,
    mu: Vec<f64>,

    picked: Vec<usize>,
    fixed_cost: i128,
    incumbent: Option<(i128, Vec<usize>)>,
    incumbent_from_search: bool,
    nodes: u64,
    stopped: bool,
    root_bound: i128,
}

impl Component {
    fn new(
        problem: &AssignmentProblem,
        nets: &[usize],
        pruned: &[Vec<Cand>],
        binding: &[bool],
        deadline: Instant,
        lagrangian: bool,
    ) -> Self {
        let mut local_edge: HashMap<usize, usize> = HashMap::new();
        let mut capacity = Vec::new();
        let mut net_edges = Vec::with_capacity(nets.len());
        for &n in nets {
            let mut list: Vec<(usize, f64)> = Vec::new();
            for e in problem.net_edges(n) {
                if !binding[e] {
                    continue;
                }
                let le = *local_edge.entry(e).or_insert_with(|| {
                    capacity.push(problem.edges()[e].capacity_mm);
                    capacity.len() - 1
                });
                match list.iter_mut().find(|(x, _)| *x == le) {
                    Some(slot) => slot.1 += 1.0,
                    None => list.push((le, 1.0)),
                }
            }
            list.sort_by_key(|&(e, _)| e);
            net_edges.push(list);
        }

        let cands: Vec<Vec<Cand>> = nets.iter().map(|&n| pruned[n].clone()).collect();
        let mut twin = vec![None; nets.len()];
        let mut last_seen: HashMap<TwinKey, usize> = HashMap::new();
        for (i, &n) in nets.iter().enumerate() {
            let key = (
                net_edges[i].iter().map(|&(e, m)| (e, m.to_bits())).collect(),
                problem.nets[n].bw_req_gbps.to_bits(),
                cands[i].iter().map(|c| c.link).collect(),
            );
            twin[i] = last_seen.insert(key, i);
        }

        let m = nets.len();
        let n_local_edges = capacity.len();
        let root_bound = cands.iter().map(|c| c[0].cost).sum();
        Self {
            cands,
            net_edges,
            residual: capacity.clone(),
            capacity,
            twin,
            deadline,
            lagrangian,
            mu: vec![0.0; n_local_edges],
            picked: vec![usize::MAX; m],
            fixed_cost: 0,
            incumbent: None,
            incumbent_from_search: false,
            nodes: 0,
            stopped: false,
            root_bound,
        }
    }

    fn fits_now(&self, n: usize, c: &Cand) -> bool {
        self.net_edges[n].iter().all(|&(e, mult)| fits_residual(mult * c.width, self.residual[e], self.capacity[e]))
    }

    fn apply(&mut self, n: usize, ci: usize) {
        let c = self.cands[n][ci];
        for &(e, mult) in &self.net_edges[n] {
            self.residual[e] -= mult * c.width;
        }
        self.picked[n] = ci;
        self.fixed_cost += c.cost;
    }

    fn undo(&mut self, n: usize) {
        let c = self.cands[n][self.picked[n]];
        for &(e, mult) in &self.net_edges[n] {
            self.residual[e] += mult * c.width;
        }
        self.picked[n] = usize::MAX;
        self.fixed_cost -= c.cost;
    }

    /// Builds a full assignment by visiting nets in `order` and taking the
    /// candidate `pick` names, then runs [`improve`](Self::improve). The
    /// component state is restored before returning.
    fn construct(&mut self, order: &[usize], pick: impl Fn(&Self, usize) -> Option<usize>) -> Option<(i128, Vec<usize>)> {
        let mut placed = Vec::with_capacity(order.len());
        let mut ok = true;
        for &n in order {
            match pick(self, n) {
                Some(ci) => {
                    self.apply(n, ci);
                    placed.push(n);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        let result = ok.then(|| {
            self.improve();
            (self.fixed_cost, self.picked.clone())
        });
        for &n in placed.iter().rev() {
            self.undo(n);
        }
        result
    }

    /// Local search on a complete assignment: single-net moves to cheaper
    /// candidates, then pair moves where one net narrows so another can
    /// take a cheaper link on a shared edge.
    fn improve(&mut self) {
        let m = self.cands.len();
        let mut on_edge: Vec<Vec<usize>> = vec![Vec::new(); self.capacity.len()];
        for n in 0..m {
            for &(e, _) in &self.net_edges[n] {
                on_edge[e].push(n);
            }
        }
        loop {
            let mut improved = false;
            for n in 0..m {
                let cur = self.picked[n];
                self.undo(n);
                let best = (0..cur).find(|&ci| self.fits_now(n, &self.cands[n][ci])).unwrap_or(cur);
                self.apply(n, best);
                improved |= best != cur;
            }
            if !improved {
                improved = self.pair_moves(&on_edge);
            }
            if !improved {
                break;
            }
        }
    }

    /// One sweep of pair moves; true if any applied.
    fn pair_moves(&mut self, on_edge: &[Vec<usize>]) -> bool {
        let m = self.cands.len();
        let mut any = false;
        for n in 0..m {
            let cur = self.picked[n];
            'target: for ci in 0..cur {
                let gain = self.cands[n][cur].cost - self.cands[n][ci].cost;
                self.undo(n);
                if self.fits_now(n, &self.cands[n][ci]) {
                    self.apply(n, ci);
                    any = true;
                    break 'target;
                }
                // make room on one blocking edge by narrowing a neighbour
                let blocking: Vec<usize> = self.net_edges[n]
                    .iter()
                    .filter(|&&(e, mult)| {
                        !fits_residual(mult * self.cands[n][ci].width, self.residual[e], self.capacity[e])
                    })
                    .map(|&(e, _)| e)
                    .collect();
                if blocking.len() == 1 {
                    for &o in &on_edge[blocking[0]] {
                        if o == n {
                            continue;
                        }
                        let oc = self.picked[o];
                        self.undo(o);
                        for alt in 0..self.cands[o].len() {
                            let extra = self.cands[o][alt].cost - self.cands[o][oc].cost;
                            if alt == oc || extra >= gain || self.cands[o][alt].width >= self.cands[o][oc].width {
                                continue;
                            }
                            if !self.fits_now(o, &self.cands[o][alt]) {
                                continue;
                            }
                            self.apply(o, alt);
                            if self.fits_now(n, &self.cands[n][ci]) {
                                self.apply(n, ci);
                                any = true;
                                break 'target;
                            }
                            self.undo(o);
                        }
                        self.apply(o, oc);
                    }
                }
                self.apply(n, cur);
            }
        }
        any
    }

    fn keep_if_better(&mut self, found: Option<(i128, Vec<usize>)>) {
        if let Some((cost, pick)) = found {
            if self.incumbent.as_ref().is_none_or(|(best, _)| cost < *best) {
                self.incumbent = Some((cost, pick));
            }
        }
    }

    fn initial_incumbent(&mut self) {
        let m = self.cands.len();
        let natural: Vec<usize> = (0..m).collect();
        let mut by_width = natural.clone();
        by_width.sort_by(|&a, &b| self.cands[b][0].width.total_cmp(&self.cands[a][0].width).then(a.cmp(&b)));
        let cheapest_fit = |c: &Self, n: usize| (0..c.cands[n].len()).find(|&ci| c.fits_now(n, &c.cands[n][ci]));
        let narrowest_fit = |c: &Self, n: usize| (0..c.cands[n].len()).rev().find(|&ci| c.fits_now(n, &c.cands[n][ci]));
        let a = self.construct(&natural, cheapest_fit);
        self.keep_if_better(a);
        let b = self.construct(&by_width, cheapest_fit);
        self.keep_if_better(b);
        let c = self.construct(&natural, narrowest_fit);
        self.keep_if_better(c);
    }

    /// Constructs from Lagrangian costs `cost + s·μ·w` at a few scales of
    /// the current multipliers. Nets with the largest regret between their
    /// two best priced candidates go first.
    fn lagrangian_incumbent(&mut self) {
        let m = self.cands.len();
        for scale in [1.0, 0.5, 1.5, 2.5] {
            let priced = |c: &Self, n: usize, ci: usize| {
                let cand = &c.cands[n][ci];
                cand.cost as f64 + scale * c.net_edges[n].iter().map(|&(e, k)| c.mu[e] * k * cand.width).sum::<f64>()
            };
            let regret: Vec<f64> = (0..m)
                .map(|n| {
                    let mut v: Vec<f64> = (0..self.cands[n].len()).map(|ci| priced(self, n, ci)).collect();
                    v.sort_by(f64::total_cmp);
                    if v.len() > 1 { v[1] - v[0] } else { f64::INFINITY }
                })
                .collect();
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| regret[b].total_cmp(&regret[a]).then(a.cmp(&b)));
            let found = self.construct(&order, |c, n| {
                (0..c.cands[n].len())
                    .filter(|&ci| c.fits_now(n, &c.cands[n][ci]))
                    .min_by(|&x, &y| priced(c, n, x).total_cmp(&priced(c, n, y)).then(x.cmp(&y)))
            });
            self.keep_if_better(found);
        }
    }

    /// `min_c (cost + μ·w)` over candidates of `n` and the Lagrangian constant.
    fn lagrange_value(&self, n: usize, c: &Cand) -> f64 {
        let penalty: f64 = self.net_edges[n].iter().map(|&(e, mult)| self.mu[e] * mult * c.width).sum();
        c.cost as f64 + penalty
    }

    fn root_subgradient(&mut self) {
        let m = self.cands.len();
        let ub = self.incumbent.as_ref().map(|(c, _)| *c as f64);
        let mut best_val = f64::NEG_INFINITY;
        let mut best_mu = self.mu.clone();
        let mut theta = 2.0;
        let mut stall = 0;
        let iters = if m > 200 { 60 } else { 150 };
        for _ in 0..iters {
            let mut val = -self.mu.iter().zip(&self.capacity).map(|(u, c)| u * c).sum::<f64>();
            let mut grad: Vec<f64> = self.capacity.iter().map(|c| -c).collect();
            for n in 0..m {
                let (ci, v) = (0..self.cands[n].len())
                    .map(|ci| (ci, self.lagrange_value(n, &self.cands[n][ci])))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("non-empty candidates");
                val += v;
                for &(e, mult) in &self.net_edges[n] {
                    grad[e] += mult * self.cands[n][ci].width;
                }
            }
            if val > best_val + 1e-9 * val.abs() {
                best_val = val;
                best_mu.clone_from(&self.mu);
                stall = 0;
            } else {
                stall += 1;
                if stall >= 8 {
                    theta *= 0.5;
                    stall = 0;
                }
            }
            let norm: f64 = grad.iter().map(|g| g * g).sum();
            if norm <= 0.0 || theta < 1e-4 {
                break;
            }
            let target = ub.unwrap_or(val.abs() * 1.05 + 1.0);
            let gap = (target - val).max(1e-6 * target.abs() + 1.0);
            let step = theta * gap / norm;
            for (u, g) in self.mu.iter_mut().zip(&grad) {
                *u = (*u + step * g).max(0.0);
            }
        }
        self.mu = best_mu;
        if self.mu.iter().all(|&u| u == 0.0) {
            self.lagrangian = false;
        }
    }

    /// Conservative integer floor of a Lagrangian bound computed in floats.
    fn floor_safe(val: f64, scale: f64) -> i128 {
        (val - 1e-9 * scale - 4.0).floor() as i128
    }

    /// Removes candidates that cannot appear in any solution at or below the
    /// incumbent cost.
    fn reduced_cost_fixing(&mut self) {
        let Some((ub, _)) = self.incumbent.clone() else { return };
        let m = self.cands.len();
        let base: i128 = (0..m).map(|n| self.cands[n][0].cost).sum();
        let lag_terms: Option<(Vec<f64>, f64)> = self.lagrangian.then(|| {
            let mins: Vec<f64> = (0..m)
                .map(|n| self.cands[n].iter().map(|c| self.lagrange_value(n, c)).fold(f64::INFINITY, f64::min))
                .collect();
            let total = mins.iter().sum::<f64>() - self.mu.iter().zip(&self.capacity).map(|(u, c)| u * c).sum::<f64>();
            (mins, total)
        });
        let scale = (ub as f64).abs();
        for n in 0..m {
            let min_cost = self.cands[n][0].cost;
            let lag_n = lag_terms.as_ref().map(|(mins, total)| (mins[n], *total));
            let keep: Vec<Cand> = self.cands[n]
                .iter()
                .copied()
                .enumerate()
                .filter(|&(ci, c)| {
                    if ci == 0 {
                        return true;
                    }
                    if base - min_cost + c.cost > ub {
                        return false;
                    }
                    match lag_n {
                        Some((min_n, total)) => {
                            Self::floor_safe(total - min_n + self.lagrange_value(n, &c), scale) <= ub
                        }
                        None => true,
                    }
                })
                .map(|(_, c)| c)
                .collect();
            self.cands[n] = keep;
        }
    }

    fn solve(&mut self) -> Outcome {
        if Instant::now() >= self.deadline {
            self.initial_incumbent();
            return self.finish(false);
        }
        self.initial_incumbent();
        // store incumbent as link indices so candidate filtering cannot invalidate it
        let links_of = |comp: &Component, pick: &[usize]| -> Vec<usize> {
            pick.iter().enumerate().map(|(n, &ci)| comp.cands[n][ci].link).collect()
        };
        let inc_links = self.incumbent.as_ref().map(|(c, p)| (*c, links_of(self, p)));
        if self.lagrangian {
            self.root_subgradient();
            self.lagrangian_incumbent();
        }
        let inc_links = match (&self.incumbent, inc_links) {
            (Some((c, p)), Some((old, _))) if *c < old => Some((*c, links_of(self, p))),
            (Some((c, p)), None) => Some((*c, links_of(self, p))),
            (_, old) => old,
        };
        self.reduced_cost_fixing();
        let mut scratch = Vec::new();
        if let Some(lb) = self.bound(0, &mut scratch) {
            self.root_bound = self.root_bound.max(lb);
        }
        // re-express the heuristic incumbent in the filtered candidate lists
        self.incumbent = inc_links.and_then(|(cost, links)| {
            let pick: Option<Vec<usize>> = links
                .iter()
                .enumerate()
                .map(|(n, &l)| self.cands[n].iter().position(|c| c.link == l))
                .collect();
            pick.map(|p| (cost, p))
        });
        self.dfs(0);
        let proven = !self.stopped;
        self.finish(proven)
    }

    fn finish(&mut self, proven: bool) -> Outcome {
        match self.incumbent.take() {
            Some((cost, pick)) => Outcome::Solved {
                choice: pick.iter().enumerate().map(|(n, &ci)| self.cands[n][ci].link).collect(),
                proven,
                bound: if proven { cost } else { self.root_bound.min(cost) },
            },
            None if proven => Outcome::Infeasible,
            None => Outcome::Unknown,
        }
    }

    fn prunable(&self, lb: i128) -> bool {
        match &self.incumbent {
            None => false,
            Some((best, _)) => lb > *best || (lb == *best && self.incumbent_from_search),
        }
    }

    /// Lower bound on completing the current partial assignment, and the
    /// cheapest fitting cost of each open net. `None` when an open net has
    /// nothing that fits.
    fn bound(&self, depth: usize, min_fit: &mut Vec<i128>) -> Option<i128> {
        let m = self.cands.len();
        min_fit.clear();
        let mut simple = self.fixed_cost;
        let mut lag = 0.0;
        for n in depth..m {
            let mut first = None;
            let mut best_lag = f64::INFINITY;
            for c in &self.cands[n] {
                if !self.fits_now(n, c) {
                    continue;
                }
                if first.is_none() {
                    first = Some(c.cost);
                    if !self.lagrangian {
                        break;
                    }
                }
                best_lag = best_lag.min(self.lagrange_value(n, c));
            }
            let f = first?;
            min_fit.push(f);
            simple += f;
            lag += best_lag;
        }
        if self.lagrangian {
            let slack: f64 = self.mu.iter().zip(&self.residual).map(|(u, r)| u * r.max(0.0)).sum();
            let val = self.fixed_cost as f64 + lag - slack;
            let lb = Self::floor_safe(val, val.abs() + slack);
            Some(simple.max(lb))
        } else {
            Some(simple)
        }
    }

    fn dfs(&mut self, depth: usize) {
        if self.stopped {
            return;
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(CHECK_EVERY) && Instant::now() >= self.deadline {
            self.stopped = true;
            return;
        }
        let m = self.cands.len();
        if depth == m {
            let cost = self.fixed_cost;
            let better = match &self.incumbent {
                None => true,
                Some((best, _)) => cost < *best || (cost == *best && !self.incumbent_from_search),
            };
            if better {
                self.incumbent = Some((cost, self.picked.clone()));
                self.incumbent_from_search = true;
            }
            return;
        }
        let mut min_fit = Vec::new();
        let Some(lb) = self.bound(depth, &mut min_fit) else { return };
        if self.prunable(lb) {
            return;
        }
        let rest: i128 = self.fixed_cost + min_fit[1..].iter().sum::<i128>();
        let min_rank = self.twin[depth].map_or(0, |t| self.cands[t][self.picked[t]].rank);
        for ci in 0..self.cands[depth].len() {
            let c = self.cands[depth][ci];
            if c.rank < min_rank || !self.fits_now(depth, &c) {
                continue;
            }
            // candidates are cost-ordered, so once this fails all later ones do
            if self.prunable(rest + c.cost) {
                break;
            }
            self.apply(depth, ci);
            self.dfs(depth + 1);
            self.undo(depth);
            if self.stopped {
                return;
            }
        }
    }
}

#[inline]
fn fits_residual(width: f64, residual: f64, capacity: f64) -> bool {
    width <= residual + capacity * super::problem::WIDTH_TOLERANCE
}
