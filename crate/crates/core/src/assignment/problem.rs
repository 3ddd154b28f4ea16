use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::AssignError;
use crate::link_library::{LinkKind, LinkRecord};

/// Objective terms are held as integers in units of this size so sums are
/// exact and ties are decided deterministically.
pub const COST_UNIT: f64 = 1e-15;

/// Relative slack allowed when checking Σ w ≤ W on an edge.
pub const WIDTH_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub width_mm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chiplet {
    pub id: String,
    pub edges: Vec<Edge>,
}

impl Chiplet {
    /// A die whose usable shoreline is half its perimeter: each of the four
    /// sides contributes half its length.
    pub fn from_dimensions(id: impl Into<String>, width_mm: f64, height_mm: f64) -> Self {
        let edges = [("north", width_mm), ("south", width_mm), ("east", height_mm), ("west", height_mm)]
            .into_iter()
            .map(|(e, len)| Edge { id: e.to_string(), width_mm: len / 2.0 })
            .collect();
        Self { id: id.into(), edges }
    }

    pub fn shoreline_mm(&self) -> f64 {
        self.edges.iter().map(|e| e.width_mm).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Endpoint {
    pub chiplet: String,
    pub edge: String,
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.chiplet, self.edge)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Net {
    pub id: String,
    pub a: Endpoint,
    pub b: Endpoint,
    pub distance_mm: f64,
    pub bw_req_gbps: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkFilter {
    #[default]
    All,
    ElectricalOnly,
    OpticalOnly,
}

impl LinkFilter {
    pub fn admits(&self, kind: LinkKind) -> bool {
        match self {
            LinkFilter::All => true,
            LinkFilter::ElectricalOnly => kind == LinkKind::Electrical,
            LinkFilter::OpticalOnly => kind == LinkKind::Optical,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            LinkFilter::All => "all",
            LinkFilter::ElectricalOnly => "electrical",
            LinkFilter::OpticalOnly => "optical",
        }
    }
}

impl FromStr for LinkFilter {
    type Err = AssignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "all" => Ok(LinkFilter::All),
            "electrical" | "electrical_only" | "electrical-only" => Ok(LinkFilter::ElectricalOnly),
            "optical" | "optical_only" | "optical-only" => Ok(LinkFilter::OpticalOnly),
            _ => Err(AssignError::UnknownFilter(s.to_string())),
        }
    }
}

impl fmt::Display for LinkFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// System-level normalizers: total chiplet power (W) and area (mm²).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lambdas {
    pub power_w: f64,
    pub area_mm2: f64,
}

/// One admissible (net, link) pairing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate {
    pub link: usize,
    /// Position in the net's (cost, name) order over all admissible links.
    pub rank: u32,
    pub cost: i128,
    pub width_mm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeSlot {
    pub chiplet: String,
    pub edge: String,
    pub capacity_mm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssignmentProblem {
    pub chiplets: Vec<Chiplet>,
    pub nets: Vec<Net>,
    pub links: Vec<LinkRecord>,
    pub lambdas: Lambdas,
    pub filter: LinkFilter,
    edges: Vec<EdgeSlot>,
    net_edges: Vec<[usize; 2]>,
    candidates: Vec<Vec<Candidate>>,
    warnings: Vec<String>,
}

/// `(E_l · BW) / λ_P + (BW / BW^area_l) / λ_A` with power in W and area in mm².
pub fn cost_terms(link: &LinkRecord, bw_gbps: f64, lambdas: &Lambdas) -> (f64, f64) {
    let power_w = link.energy_pj_per_bit * bw_gbps * 1e-3;
    let area_mm2 = bw_gbps / link.areal_gbps_per_mm2;
    (power_w / lambdas.power_w, area_mm2 / lambdas.area_mm2)
}

/// Quantized objective contribution of routing `bw_gbps` over `link`.
pub fn cost_units(link: &LinkRecord, bw_gbps: f64, lambdas: &Lambdas) -> i128 {
    let (p, a) = cost_terms(link, bw_gbps, lambdas);
    ((p + a) / COST_UNIT).round() as i128
}

pub fn units_to_objective(units: i128) -> f64 {
    units as f64 * COST_UNIT
}

fn positive(kind: &'static str, id: &str, what: &str, v: f64) -> Result<(), AssignError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(AssignError::Invalid { kind, id: id.to_string(), reason: format!("{what} must be positive, got {v}") })
    }
}

/// Validates the inputs and precomputes each net's admissible links.
///
/// A link is admissible for a net when it passes the filter, reaches the
/// distance (`d ≤ r`), and its minimum width fits both endpoint edges on its
/// own. Nets left with nothing admissible are recorded in [`warnings`]
/// rather than rejected; solvers report them as infeasible.
///
/// [`warnings`]: AssignmentProblem::warnings
pub fn build_problem(
    chiplets: Vec<Chiplet>,
    nets: Vec<Net>,
    links: Vec<LinkRecord>,
    lambdas: Lambdas,
    filter: LinkFilter,
) -> Result<AssignmentProblem, AssignError> {
    if !(lambdas.power_w > 0.0 && lambdas.power_w.is_finite()) {
        return Err(AssignError::Parameter("lambda_p must be positive"));
    }
    if !(lambdas.area_mm2 > 0.0 && lambdas.area_mm2.is_finite()) {
        return Err(AssignError::Parameter("lambda_a must be positive"));
    }

    let mut edges = Vec::new();
    let mut edge_index = HashMap::new();
    let mut chiplet_ids = HashSet::new();
    for c in &chiplets {
        if !chiplet_ids.insert(c.id.as_str()) {
            return Err(AssignError::Duplicate { kind: "chiplet", id: c.id.clone() });
        }
        for e in &c.edges {
            positive("edge", &format!("{}/{}", c.id, e.id), "width_mm", e.width_mm)?;
            let key = (c.id.clone(), e.id.clone());
            if edge_index.insert(key, edges.len()).is_some() {
                return Err(AssignError::Duplicate { kind: "edge", id: format!("{}/{}", c.id, e.id) });
            }
            edges.push(EdgeSlot { chiplet: c.id.clone(), edge: e.id.clone(), capacity_mm: e.width_mm });
        }
    }

    let mut link_names = HashSet::new();
    for l in &links {
        if !link_names.insert(l.name.as_str()) {
            return Err(AssignError::Duplicate { kind: "link", id: l.name.clone() });
        }
        l.validate().map_err(|e| AssignError::Invalid { kind: "link", id: l.name.clone(), reason: e.to_string() })?;
    }

    let mut net_ids = HashSet::new();
    let mut net_edges = Vec::with_capacity(nets.len());
    for n in &nets {
        if !net_ids.insert(n.id.as_str()) {
            return Err(AssignError::Duplicate { kind: "net", id: n.id.clone() });
        }
        if !(n.distance_mm >= 0.0 && n.distance_mm.is_finite()) {
            return Err(AssignError::Invalid {
                kind: "net",
                id: n.id.clone(),
                reason: format!("distance_mm must be non-negative, got {}", n.distance_mm),
            });
        }
        positive("net", &n.id, "bw_req_gbps", n.bw_req_gbps)?;
        let mut pair = [0; 2];
        for (slot, ep) in pair.iter_mut().zip([&n.a, &n.b]) {
            *slot = *edge_index.get(&(ep.chiplet.clone(), ep.edge.clone())).ok_or_else(|| {
                AssignError::DanglingEndpoint { net: n.id.clone(), chiplet: ep.chiplet.clone(), edge: ep.edge.clone() }
            })?;
        }
        net_edges.push(pair);
    }

    let mut candidates = Vec::with_capacity(nets.len());
    let mut warnings = Vec::new();
    for (ni, n) in nets.iter().enumerate() {
        let mut admissible: Vec<(i128, &str, usize)> = links
            .iter()
            .enumerate()
            .filter(|(_, l)| filter.admits(l.link_kind) && n.distance_mm <= l.reach_mm)
            .map(|(li, l)| (cost_units(l, n.bw_req_gbps, &lambdas), l.name.as_str(), li))
            .collect();
        admissible.sort();
        let [ea, eb] = net_edges[ni];
        let list: Vec<Candidate> = admissible
            .iter()
            .enumerate()
            .map(|(rank, &(cost, _, li))| Candidate {
                link: li,
                rank: rank as u32,
                cost,
                width_mm: n.bw_req_gbps / links[li].shoreline_gbps_per_mm,
            })
            .filter(|c| {
                if ea == eb {
                    fits(2.0 * c.width_mm, edges[ea].capacity_mm)
                } else {
                    fits(c.width_mm, edges[ea].capacity_mm) && fits(c.width_mm, edges[eb].capacity_mm)
                }
            })
            .collect();
        if admissible.is_empty() {
            warnings.push(format!("net '{}' ({} mm) has no reach-feasible link under filter {}", n.id, n.distance_mm, filter));
        } else if list.is_empty() {
            warnings.push(format!("net '{}' has no reach-feasible link narrow enough for its edges", n.id));
        }
        candidates.push(list);
    }

    Ok(AssignmentProblem { chiplets, nets, links, lambdas, filter, edges, net_edges, candidates, warnings })
}

/// `used ≤ capacity` with a small relative tolerance.
#[inline]
pub fn fits(used: f64, capacity: f64) -> bool {
    used <= capacity * (1.0 + WIDTH_TOLERANCE)
}

impl AssignmentProblem {
    pub fn edges(&self) -> &[EdgeSlot] {
        &self.edges
    }

    /// Edge indices of a net's two endpoints.
    pub fn net_edges(&self, net: usize) -> [usize; 2] {
        self.net_edges[net]
    }

    /// Admissible links for a net in (cost, name) order.
    pub fn candidates(&self, net: usize) -> &[Candidate] {
        &self.candidates[net]
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn link_index(&self, name: &str) -> Option<usize> {
        self.links.iter().position(|l| l.name == name)
    }

    /// Links that pass the filter and reach the net's distance, ignoring widths.
    pub fn reachable_links(&self, net: usize) -> Vec<usize> {
        let d = self.nets[net].distance_mm;
        (0..self.links.len())
            .filter(|&l| self.filter.admits(self.links[l].link_kind) && d <= self.links[l].reach_mm)
            .collect()
    }

    pub fn min_width_mm(&self, net: usize, link: usize) -> f64 {
        self.nets[net].bw_req_gbps / self.links[link].shoreline_gbps_per_mm
    }

    pub fn cost_units(&self, net: usize, link: usize) -> i128 {
        cost_units(&self.links[link], self.nets[net].bw_req_gbps, &self.lambdas)
    }

    /// Same problem with both normalizers multiplied by `factor`.
    pub fn with_scaled_lambdas(&self, factor: f64) -> Result<Self, AssignError> {
        build_problem(
            self.chiplets.clone(),
            self.nets.clone(),
            self.links.clone(),
            Lambdas { power_w: self.lambdas.power_w * factor, area_mm2: self.lambdas.area_mm2 * factor },
            self.filter,
        )
    }

    pub fn with_filter(&self, filter: LinkFilter) -> Result<Self, AssignError> {
        build_problem(self.chiplets.clone(), self.nets.clone(), self.links.clone(), self.lambdas, filter)
    }
}

/// Scales every net's bandwidth and distance.
pub fn case_study_transform(nets: &[Net], bw_scale: f64, dist_scale: f64) -> Result<Vec<Net>, AssignError> {
    if !(bw_scale > 0.0 && bw_scale.is_finite() && dist_scale > 0.0 && dist_scale.is_finite()) {
        return Err(AssignError::Parameter("case-study scales must be positive"));
    }
    Ok(nets
        .iter()
        .map(|n| Net { bw_req_gbps: n.bw_req_gbps * bw_scale, distance_mm: n.distance_mm * dist_scale, ..n.clone() })
        .collect())
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader)
}

fn parse_err(file: &'static str) -> impl Fn(csv::Error) -> AssignError {
    move |e| AssignError::Parse { file, line: e.position().map(|p| p.line()).unwrap_or(0), message: e.to_string() }
}

#[derive(Deserialize)]
struct NetRow {
    net: String,
    chiplet_a: String,
    edge_a: String,
    chiplet_b: String,
    edge_b: String,
    distance_mm: f64,
    bw_gbps: f64,
}

/// Reads `net,chiplet_a,edge_a,chiplet_b,edge_b,distance_mm,bw_gbps` rows.
pub fn read_netlist<R: Read>(reader: R) -> Result<Vec<Net>, AssignError> {
    csv_reader(reader)
        .deserialize::<NetRow>()
        .map(|row| {
            let r = row.map_err(parse_err("netlist"))?;
            Ok(Net {
                id: r.net,
                a: Endpoint { chiplet: r.chiplet_a, edge: r.edge_a },
                b: Endpoint { chiplet: r.chiplet_b, edge: r.edge_b },
                distance_mm: r.distance_mm,
                bw_req_gbps: r.bw_gbps,
            })
        })
        .collect()
}

pub fn write_netlist<W: std::io::Write>(writer: W, nets: &[Net]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["net", "chiplet_a", "edge_a", "chiplet_b", "edge_b", "distance_mm", "bw_gbps"])?;
    for n in nets {
        w.write_record([
            n.id.as_str(),
            &n.a.chiplet,
            &n.a.edge,
            &n.b.chiplet,
            &n.b.edge,
            &n.distance_mm.to_string(),
            &n.bw_req_gbps.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct EdgeRow {
    chiplet: String,
    edge: String,
    width_mm: f64,
}

#[derive(Deserialize)]
struct DieRow {
    chiplet: String,
    width_mm: f64,
    height_mm: f64,
}

/// Reads a floorplan. Two layouts are accepted, chosen by header:
/// explicit `chiplet,edge,width_mm` budgets, or `chiplet,width_mm,height_mm`
/// die dimensions expanded with [`Chiplet::from_dimensions`].
pub fn read_floorplan<R: Read>(reader: R) -> Result<Vec<Chiplet>, AssignError> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers().map_err(parse_err("floorplan"))?.clone();
    let has = |h: &str| headers.iter().any(|x| x == h);
    let mut chiplets: Vec<Chiplet> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    if has("edge") {
        for row in rdr.deserialize::<EdgeRow>() {
            let r = row.map_err(parse_err("floorplan"))?;
            let i = *index.entry(r.chiplet.clone()).or_insert_with(|| {
                chiplets.push(Chiplet { id: r.chiplet.clone(), edges: Vec::new() });
                chiplets.len() - 1
            });
            chiplets[i].edges.push(Edge { id: r.edge, width_mm: r.width_mm });
        }
    } else if has("height_mm") {
        for row in rdr.deserialize::<DieRow>() {
            let r = row.map_err(parse_err("floorplan"))?;
            for (what, v) in [("width_mm", r.width_mm), ("height_mm", r.height_mm)] {
                positive("chiplet", &r.chiplet, what, v)?;
            }
            chiplets.push(Chiplet::from_dimensions(r.chiplet, r.width_mm, r.height_mm));
        }
    } else if !headers.is_empty() {
        return Err(AssignError::Parse {
            file: "floorplan",
            line: 1,
            message: "expected columns chiplet,edge,width_mm or chiplet,width_mm,height_mm".into(),
        });
    }
    Ok(chiplets)
}

pub fn write_floorplan<W: std::io::Write>(writer: W, chiplets: &[Chiplet]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["chiplet", "edge", "width_mm"])?;
    for c in chiplets {
        for e in &c.edges {
            w.write_record([c.id.as_str(), &e.id, &e.width_mm.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
