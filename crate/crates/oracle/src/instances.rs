//! Seeded random assignment instances for solver cross-checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use chiplink::assignment::{build_problem, AssignmentProblem, Chiplet, Edge, Endpoint, Lambdas, LinkFilter, Net};
use chiplink::link_library::{LinkKind, LinkRecord, MetricsKind};

const REACHES: [f64; 8] = [0.5, 2.0, 5.0, 10.0, 25.0, 80.0, 4000.0, 1e6];

/// A small instance with `nets` nets and `links` links. Shoreline budgets are
/// sized so that capacity binds often but not always; some instances are
/// infeasible on purpose.
pub fn random_instance(seed: u64, nets: usize, links: usize) -> AssignmentProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_chiplets = rng.random_range(2..=4);
    let chiplets: Vec<Chiplet> = (0..n_chiplets)
        .map(|c| Chiplet {
            id: format!("c{c}"),
            edges: (0..rng.random_range(1..=2))
                .map(|e| Edge { id: format!("e{e}"), width_mm: rng.random_range(1.0..6.0) })
                .collect(),
        })
        .collect();
    let pick_endpoint = |rng: &mut ChaCha8Rng, avoid: Option<usize>| {
        let c = loop {
            let c = rng.random_range(0..chiplets.len());
            if Some(c) != avoid {
                break c;
            }
        };
        let e = rng.random_range(0..chiplets[c].edges.len());
        (c, Endpoint { chiplet: chiplets[c].id.clone(), edge: chiplets[c].edges[e].id.clone() })
    };
    let mut net_list = Vec::with_capacity(nets);
    for i in 0..nets {
        let (ca, a) = pick_endpoint(&mut rng, None);
        let (_, b) = pick_endpoint(&mut rng, Some(ca));
        // a few duplicated bandwidths exercise the identical-net handling
        let bw = if i > 0 && rng.random_bool(0.2) {
            net_list.last().map_or(100.0, |n: &Net| n.bw_req_gbps)
        } else {
            (rng.random_range(20.0..800.0f64)).round()
        };
        net_list.push(Net {
            id: format!("n{i}"),
            a,
            b,
            distance_mm: (rng.random_range((0.1f64).ln()..(40.0f64).ln())).exp(),
            bw_req_gbps: bw,
        });
    }
    let link_list: Vec<LinkRecord> = (0..links)
        .map(|l| LinkRecord {
            name: format!("L{l}"),
            reach_mm: REACHES[rng.random_range(0..REACHES.len())],
            process_nm: 7,
            raw_ber: 1e-15,
            link_kind: if rng.random_bool(0.5) { LinkKind::Electrical } else { LinkKind::Optical },
            shoreline_gbps_per_mm: rng.random_range(50.0..2000.0f64).round(),
            areal_gbps_per_mm2: rng.random_range(100.0..5000.0f64).round(),
            energy_pj_per_bit: (rng.random_range(0.05..3.0f64) * 100.0).round() / 100.0,
            metrics_kind: MetricsKind::CorrectedDelivered,
        })
        .collect();
    let lambdas = Lambdas { power_w: rng.random_range(1.0..100.0), area_mm2: rng.random_range(1.0..500.0) };
    build_problem(chiplets, net_list, link_list, lambdas, LinkFilter::All).expect("generated instance is well formed")
}
