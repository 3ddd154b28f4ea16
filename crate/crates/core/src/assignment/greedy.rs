use super::problem::{fits, AssignmentProblem};
use super::solution::{AssignmentSolution, SolveStatus, Witness};

/// The "Simple" baseline: nets in input order, each takes the reach-feasible
/// link with the highest shoreline density that still fits both endpoint
/// edges, ties broken by link name. Costs are ignored.
pub fn solve_greedy_simple(problem: &AssignmentProblem) -> AssignmentSolution {
    const NAME: &str = "greedy";
    let mut residual: Vec<f64> = problem.edges().iter().map(|e| e.capacity_mm).collect();
    let mut choice = Vec::with_capacity(problem.nets.len());
    for n in 0..problem.nets.len() {
        let [ea, eb] = problem.net_edges(n);
        let pick = problem
            .reachable_links(n)
            .into_iter()
            .filter(|&l| {
                let w = problem.min_width_mm(n, l);
                if ea == eb {
                    fits(2.0 * w, residual[ea])
                } else {
                    fits(w, residual[ea]) && fits(w, residual[eb])
                }
            })
            .max_by(|&x, &y| {
                let (lx, ly) = (&problem.links[x], &problem.links[y]);
                lx.shoreline_gbps_per_mm
                    .total_cmp(&ly.shoreline_gbps_per_mm)
                    .then_with(|| ly.name.cmp(&lx.name))
            });
        let Some(l) = pick else {
            let witness = Witness::NetBlocked { net: problem.nets[n].id.clone() };
            return AssignmentSolution::without_solution(SolveStatus::Infeasible, Some(witness), NAME);
        };
        let w = problem.min_width_mm(n, l);
        residual[ea] -= w;
        residual[eb] -= w;
        choice.push(l);
    }
    // Greedy proves nothing; its result is merely feasible.
    AssignmentSolution::from_choice(problem, &choice, SolveStatus::Feasible, NAME)
}
