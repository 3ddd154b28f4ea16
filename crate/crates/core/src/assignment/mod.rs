//! Link-technology assignment: pick one link per net, minimizing normalized
//! power plus transceiver area under reach and shoreline constraints.

mod exact;
mod greedy;
mod problem;
mod solution;

pub use exact::{solve_exact, solve_exact_with, SolveOptions};
pub use greedy::solve_greedy_simple;
pub use problem::{
    build_problem, case_study_transform, cost_terms, cost_units, fits, read_floorplan, read_netlist,
    units_to_objective, write_floorplan, write_netlist, AssignmentProblem, Candidate, Chiplet, Edge, EdgeSlot,
    Endpoint, Lambdas, LinkFilter, Net, COST_UNIT, WIDTH_TOLERANCE,
};
pub use solution::{describe, report_totals, AssignmentSolution, NetAssignment, SolveStatus, Witness};
