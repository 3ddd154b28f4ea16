//! Link-technology records and ECC-corrected delivered metrics.

use std::collections::HashSet;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::ecc_cost::{ecc_stack_cost, CostParams, EccStack, NodeScaling, SynthTable};
use crate::ecc_model::{analyze, default_family, select_code, FrameConfig, ReliabilityTargets, RsCode};
use crate::error::LibraryError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    #[serde(alias = "E", alias = "e", alias = "Electrical")]
    Electrical,
    #[serde(alias = "O", alias = "o", alias = "Optical")]
    Optical,
}

/// Whether the density and energy columns are raw transceiver figures or
/// already include the protection stack.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricsKind {
    #[serde(alias = "raw", alias = "RawTransceiver")]
    RawTransceiver,
    #[serde(alias = "corrected", alias = "CorrectedDelivered")]
    CorrectedDelivered,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkRecord {
    pub name: String,
    pub reach_mm: f64,
    pub process_nm: u32,
    pub raw_ber: f64,
    pub link_kind: LinkKind,
    pub shoreline_gbps_per_mm: f64,
    pub areal_gbps_per_mm2: f64,
    pub energy_pj_per_bit: f64,
    pub metrics_kind: MetricsKind,
}

impl LinkRecord {
    pub fn validate(&self) -> Result<(), LibraryError> {
        let bad = |reason: &str| LibraryError::Invariant { name: self.name.clone(), reason: reason.to_string() };
        if self.name.trim().is_empty() {
            return Err(bad("name must not be empty"));
        }
        if !(self.reach_mm > 0.0 && self.reach_mm.is_finite()) {
            return Err(bad("reach_mm must be positive"));
        }
        if !(self.raw_ber > 0.0 && self.raw_ber < 1.0) {
            return Err(bad("raw_ber must lie in (0, 1)"));
        }
        for (field, v) in [
            ("shoreline_gbps_per_mm", self.shoreline_gbps_per_mm),
            ("areal_gbps_per_mm2", self.areal_gbps_per_mm2),
            ("energy_pj_per_bit", self.energy_pj_per_bit),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(&format!("{field} must be positive")));
            }
        }
        Ok(())
    }

    /// Shoreline density over energy per bit.
    pub fn fom(&self) -> Result<f64, LibraryError> {
        fom(self.shoreline_gbps_per_mm, self.energy_pj_per_bit)
    }

    pub fn is_optical(&self) -> bool {
        self.link_kind == LinkKind::Optical
    }
}

/// `shoreline / energy`, in (Gbps/mm)/(pJ/bit).
pub fn fom(shoreline_gbps_per_mm: f64, energy_pj_per_bit: f64) -> Result<f64, LibraryError> {
    if energy_pj_per_bit.is_nan() || energy_pj_per_bit <= 0.0 {
        return Err(LibraryError::ZeroEnergy);
    }
    Ok(shoreline_gbps_per_mm / energy_pj_per_bit)
}

/// Parses a link library CSV (see `docs/formats.md`). Rows are validated and
/// names must be unique; an empty input yields an empty library.
pub fn load_link_library<R: Read>(reader: R) -> Result<Vec<LinkRecord>, LibraryError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for row in rdr.deserialize::<LinkRecord>() {
        let rec = row.map_err(|e| LibraryError::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        rec.validate()?;
        if !seen.insert(rec.name.clone()) {
            return Err(LibraryError::Duplicate(rec.name));
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn load_link_library_str(s: &str) -> Result<Vec<LinkRecord>, LibraryError> {
    load_link_library(s.as_bytes())
}

/// Knobs for [`correct_link`] beyond the frame and targets.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrectionOptions {
    pub family: Vec<RsCode>,
    /// Lane bandwidth at which transceiver area is inferred from areal density.
    pub reference_bw_gbps: f64,
    pub scaling: NodeScaling<f64>,
    pub params: CostParams<f64>,
}

impl Default for CorrectionOptions {
    fn default() -> Self {
        Self {
            family: default_family(),
            reference_bw_gbps: 1000.0,
            scaling: NodeScaling::identity(),
            params: CostParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrectedMetrics {
    pub shoreline_gbps_per_mm: f64,
    pub areal_gbps_per_mm2: f64,
    pub energy_pj_per_payload_bit: f64,
    pub selected_code: RsCode,
    pub goodput: f64,
    pub fom: f64,
    pub ecc_energy_pj_per_payload_bit: f64,
    pub ecc_area_mm2: f64,
}

impl CorrectedMetrics {
    /// The link as a `CorrectedDelivered` record, ready for assignment.
    pub fn to_record(&self, raw: &LinkRecord) -> LinkRecord {
        LinkRecord {
            shoreline_gbps_per_mm: self.shoreline_gbps_per_mm,
            areal_gbps_per_mm2: self.areal_gbps_per_mm2,
            energy_pj_per_bit: self.energy_pj_per_payload_bit,
            metrics_kind: MetricsKind::CorrectedDelivered,
            ..raw.clone()
        }
    }
}

/// Composes a raw transceiver with the protection stack selected at its raw BER.
///
/// Links already at or below the BER target pass through unchanged with the
/// uncoded code. Otherwise shoreline scales by goodput, energy becomes
/// `E_raw / goodput + E_ecc`, and areal density divides the delivered
/// bandwidth by transceiver plus ECC area at the reference lane bandwidth.
/// Transceiver figures are never node-scaled; only the ECC stack is.
pub fn correct_link(
    link: &LinkRecord,
    frame: &FrameConfig,
    targets: &ReliabilityTargets<f64>,
    costs: &SynthTable,
    opts: &CorrectionOptions,
) -> Result<CorrectedMetrics, LibraryError> {
    if link.metrics_kind == MetricsKind::CorrectedDelivered {
        return Err(LibraryError::AlreadyCorrected(link.name.clone()));
    }
    link.validate()?;
    let ecc_err = |source| LibraryError::Ecc { name: link.name.clone(), source };
    if opts.reference_bw_gbps.is_nan() || opts.reference_bw_gbps <= 0.0 {
        return Err(LibraryError::Invariant {
            name: link.name.clone(),
            reason: "reference bandwidth must be positive".into(),
        });
    }
    let n = opts.family.iter().map(|c| c.n()).max().unwrap_or(crate::ecc_model::DEFAULT_N);

    if link.raw_ber <= targets.ber_target {
        let code = RsCode::new(n, n).map_err(ecc_err)?;
        return Ok(CorrectedMetrics {
            shoreline_gbps_per_mm: link.shoreline_gbps_per_mm,
            areal_gbps_per_mm2: link.areal_gbps_per_mm2,
            energy_pj_per_payload_bit: link.energy_pj_per_bit,
            selected_code: code,
            goodput: 1.0,
            fom: fom(link.shoreline_gbps_per_mm, link.energy_pj_per_bit)?,
            ecc_energy_pj_per_payload_bit: 0.0,
            ecc_area_mm2: 0.0,
        });
    }

    let code = select_code(link.raw_ber, frame, targets, &opts.family).map_err(ecc_err)?;
    let report = analyze(link.raw_ber, code, frame, targets).map_err(ecc_err)?;
    let cost_err = |source| LibraryError::Cost { name: link.name.clone(), source };
    let stack = EccStack::select(costs, code, frame, opts.params.gbn_rtt_ns).map_err(cost_err)?;
    let ecc = ecc_stack_cost(&stack, frame, link.raw_ber, &opts.scaling, &opts.params).map_err(cost_err)?;

    let goodput = report.goodput;
    let shoreline = link.shoreline_gbps_per_mm * goodput;
    let energy = link.energy_pj_per_bit / goodput + ecc.energy_pj_per_payload_bit;

    let ref_bw = opts.reference_bw_gbps;
    let instances = if ecc.throughput_gbps.is_finite() { (ref_bw / ecc.throughput_gbps).ceil() } else { 0.0 };
    let ecc_area_mm2 = instances * ecc.area_mm2();
    let areal = ref_bw * goodput / (ref_bw / link.areal_gbps_per_mm2 + ecc_area_mm2);

    Ok(CorrectedMetrics {
        shoreline_gbps_per_mm: shoreline,
        areal_gbps_per_mm2: areal,
        energy_pj_per_payload_bit: energy,
        selected_code: code,
        goodput,
        fom: fom(shoreline, energy)?,
        ecc_energy_pj_per_payload_bit: ecc.energy_pj_per_payload_bit,
        ecc_area_mm2,
    })
}
