//! Exhaustive enumeration of link choices.

use chiplink::assignment::{AssignmentProblem, AssignmentSolution, SolveStatus, Witness};

use crate::checker::Checker;
use crate::OracleError;

pub const MAX_NETS: usize = 10;
pub const MAX_LINKS: usize = 6;

/// Tries every link for every net, keeps tuples the checker accepts, and
/// returns the cheapest under the solver's tie-break: total cost, then per
/// net in input order the (cost, link name) key.
pub fn brute_force_assign(problem: &AssignmentProblem) -> Result<AssignmentSolution, OracleError> {
    let nets = problem.nets.len();
    let links = problem.links.len();
    if nets > MAX_NETS || links > MAX_LINKS {
        return Err(OracleError::TooLarge { nets, links });
    }
    const NAME: &str = "brute_force";
    if nets == 0 {
        return Ok(AssignmentSolution::from_choice(problem, &[], SolveStatus::Optimal, NAME));
    }
    if links == 0 {
        let witness = Witness::NoAdmissibleLink { net: problem.nets[0].id.clone(), reason: "empty library".into() };
        return Ok(AssignmentSolution::without_solution(SolveStatus::Infeasible, Some(witness), NAME));
    }

    // rank[n][l]: position of link l in net n's (cost, name) order
    let cost: Vec<Vec<i128>> = (0..nets).map(|n| (0..links).map(|l| problem.cost_units(n, l)).collect()).collect();
    let rank: Vec<Vec<usize>> = (0..nets)
        .map(|n| {
            let mut order: Vec<usize> = (0..links).collect();
            order.sort_by(|&a, &b| cost[n][a].cmp(&cost[n][b]).then_with(|| problem.links[a].name.cmp(&problem.links[b].name)));
            let mut r = vec![0; links];
            for (pos, l) in order.into_iter().enumerate() {
                r[l] = pos;
            }
            r
        })
        .collect();

    let checker = Checker::new(problem);
    let mut tuple = vec![0usize; nets];
    let mut best: Option<(i128, Vec<usize>, Vec<usize>)> = None;
    let mut visited = 0u64;
    loop {
        visited += 1;
        if checker.feasible_choice(&tuple) {
            let total: i128 = tuple.iter().enumerate().map(|(n, &l)| cost[n][l]).sum();
            let key: Vec<usize> = tuple.iter().enumerate().map(|(n, &l)| rank[n][l]).collect();
            let better = match &best {
                None => true,
                Some((bt, bk, _)) => (total, &key) < (*bt, bk),
            };
            if better {
                best = Some((total, key, tuple.clone()));
            }
        }
        // odometer increment
        let mut i = nets;
        loop {
            if i == 0 {
                let mut sol = match best {
                    Some((_, _, choice)) => AssignmentSolution::from_choice(problem, &choice, SolveStatus::Optimal, NAME),
                    None => AssignmentSolution::without_solution(SolveStatus::Infeasible, None, NAME),
                };
                sol.nodes = visited;
                return Ok(sol);
            }
            i -= 1;
            tuple[i] += 1;
            if tuple[i] < links {
                break;
            }
            tuple[i] = 0;
        }
    }
}
