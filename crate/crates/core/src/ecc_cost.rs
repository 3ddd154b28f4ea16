//! Synthesis-derived ECC cost normalization.
//!
//! Area and dynamic power come from synthesis tables; this module turns them
//! into energy per payload bit, throughput, and the two bandwidth-density
//! views (shoreline via a square-footprint proxy, and areal).

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::ecc_model::{correctable_activity_prob, symbol_error_prob, FrameConfig, ProtectionMode, RsCode};
use crate::error::CostError;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    RsEncoder,
    RsDecoder,
    CrcAppend,
    CrcCheck,
    GbnRetry,
}

impl BlockKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BlockKind::RsEncoder => "rs_encoder",
            BlockKind::RsDecoder => "rs_decoder",
            BlockKind::CrcAppend => "crc_append",
            BlockKind::CrcCheck => "crc_check",
            BlockKind::GbnRetry => "gbn_retry",
        }
    }

    fn is_rs(&self) -> bool {
        matches!(self, BlockKind::RsEncoder | BlockKind::RsDecoder)
    }
}

/// One synthesized block: area in µm², dynamic power in mW, clock period in ns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthRecord {
    pub block_kind: BlockKind,
    pub code_k: Option<u32>,
    pub payload_bytes: Option<u32>,
    pub rtt_ns: Option<f64>,
    pub area_um2: f64,
    pub dyn_power_mw: f64,
    pub clock_period_ns: f64,
}

impl SynthRecord {
    fn validate(&self) -> Result<(), String> {
        if !(self.area_um2 > 0.0 && self.area_um2.is_finite()) {
            return Err("area_um2 must be positive".into());
        }
        if !(self.dyn_power_mw >= 0.0 && self.dyn_power_mw.is_finite()) {
            return Err("dyn_power_mw must be non-negative".into());
        }
        if !(self.clock_period_ns > 0.0 && self.clock_period_ns.is_finite()) {
            return Err("clock_period_ns must be positive".into());
        }
        if self.block_kind.is_rs() && self.code_k.is_none() {
            return Err("RS records need code_k".into());
        }
        if !self.block_kind.is_rs() && self.payload_bytes.is_none() {
            return Err("CRC/GBN records need payload_bytes".into());
        }
        if self.block_kind == BlockKind::GbnRetry && self.rtt_ns.is_none() {
            return Err("GBN records need rtt_ns".into());
        }
        Ok(())
    }
}

/// Immutable table of synthesis records.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SynthTable {
    records: Vec<SynthRecord>,
}

impl SynthTable {
    pub fn from_records(records: Vec<SynthRecord>) -> Result<Self, CostError> {
        for (row, r) in records.iter().enumerate() {
            r.validate().map_err(|reason| CostError::InvalidRecord { row: row + 1, reason })?;
        }
        Ok(Self { records })
    }

    /// Reads the CSV synthesis-cost format (see `docs/formats.md`).
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, CostError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
        let mut records = Vec::new();
        for result in rdr.deserialize::<SynthRecord>() {
            let rec = result.map_err(|e| CostError::Parse {
                line: e.position().map(|p| p.line()).unwrap_or(0),
                message: e.to_string(),
            })?;
            records.push(rec);
        }
        Self::from_records(records)
    }

    pub fn from_csv_str(s: &str) -> Result<Self, CostError> {
        Self::from_csv_reader(s.as_bytes())
    }

    pub fn records(&self) -> &[SynthRecord] {
        &self.records
    }

    pub fn rs(&self, kind: BlockKind, k: u32) -> Option<&SynthRecord> {
        self.records.iter().find(|r| r.block_kind == kind && r.code_k == Some(k))
    }

    pub fn crc(&self, kind: BlockKind, payload_bytes: u32) -> Option<&SynthRecord> {
        self.records
            .iter()
            .find(|r| r.block_kind == kind && r.payload_bytes == Some(payload_bytes))
    }

    pub fn gbn(&self, payload_bytes: u32, rtt_ns: f64) -> Option<&SynthRecord> {
        self.records.iter().find(|r| {
            r.block_kind == BlockKind::GbnRetry
                && r.payload_bytes == Some(payload_bytes)
                && r.rtt_ns.is_some_and(|x| (x - rtt_ns).abs() <= 1e-9 * rtt_ns.abs().max(1.0))
        })
    }
}

/// Multiplicative node-scaling knobs for ECC energy and area. Clocks are not scaled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeScaling<T> {
    pub energy_factor: T,
    pub area_factor: T,
    pub label: String,
}

impl<T: Real> NodeScaling<T> {
    pub fn identity() -> Self {
        Self { energy_factor: T::one(), area_factor: T::one(), label: "7nm".into() }
    }

    pub fn new(energy_factor: T, area_factor: T, label: impl Into<String>) -> Result<Self, CostError> {
        if !(energy_factor > T::zero() && area_factor > T::zero()) {
            return Err(CostError::InvalidParameter("scaling factors must be positive"));
        }
        Ok(Self { energy_factor, area_factor, label: label.into() })
    }
}

/// Modeling knobs the synthesis data does not pin down.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostParams<T> {
    /// Syndrome-only share of full decoder energy.
    pub syndrome_fraction: T,
    /// CRC and retry logic run one frame per cycle at this clock.
    pub crc_clock_hz: T,
    /// RTT of the GBN record to use.
    pub gbn_rtt_ns: T,
    pub gbn_slack_frames: u32,
    pub frames_per_cycle: T,
}

impl<T: Real> Default for CostParams<T> {
    fn default() -> Self {
        Self {
            syndrome_fraction: T::lit(0.4),
            crc_clock_hz: T::lit(500e6),
            gbn_rtt_ns: T::lit(10.0),
            gbn_slack_frames: 2,
            frames_per_cycle: T::one(),
        }
    }
}

/// `(P_dyn / f_clk) / (8 P)` in pJ per payload bit; leakage excluded.
pub fn energy_per_payload_bit<T: Real>(dyn_power_mw: T, clock_hz: T, payload_bytes: u32) -> T {
    // mW / Hz = 1e-3 J/cycle = 1e9 pJ/cycle
    let pj_per_cycle = dyn_power_mw * T::lit(1e9) / clock_hz;
    pj_per_cycle / (T::lit(8.0) * T::from_count(payload_bytes))
}

fn pj_per_cycle<T: Real>(record: &SynthRecord) -> T {
    // mW * ns = pJ
    T::lit(record.dyn_power_mw) * T::lit(record.clock_period_ns)
}

fn check_rs_record(record: &SynthRecord, kind: BlockKind, code: RsCode) -> Result<(), CostError> {
    if record.block_kind != kind || record.code_k != Some(code.k()) {
        return Err(CostError::MissingRecord(format!("{} for {}", kind.as_str(), code)));
    }
    Ok(())
}

/// RS encoder energy per information bit.
pub fn rs_encoder_energy<T: Real>(record: &SynthRecord, code: RsCode, k_info_bits_per_cycle: u32) -> Result<T, CostError> {
    check_rs_record(record, BlockKind::RsEncoder, code)?;
    Ok(pj_per_cycle::<T>(record) / T::from_count(k_info_bits_per_cycle))
}

/// RS decoder energy per information bit with correction-activity weighting:
/// `E_syn + p_corr (E_full - E_syn)` where `E_syn = syndrome_fraction * E_full`
/// and `p_corr = Pr[1 <= X <= t]`.
pub fn rs_decoder_energy<T: Real>(
    record: &SynthRecord,
    p_pre: T,
    code: RsCode,
    k_info_bits_per_cycle: u32,
    syndrome_fraction: T,
) -> Result<T, CostError> {
    check_rs_record(record, BlockKind::RsDecoder, code)?;
    if !(syndrome_fraction >= T::zero() && syndrome_fraction <= T::one()) {
        return Err(CostError::InvalidParameter("syndrome_fraction must lie in [0, 1]"));
    }
    let full = pj_per_cycle::<T>(record) / T::from_count(k_info_bits_per_cycle);
    let syndrome = syndrome_fraction * full;
    let p_sym = symbol_error_prob(p_pre, code.symbol_bits())?;
    let p_corr = correctable_activity_prob(p_sym, code)?;
    Ok(syndrome + p_corr * (full - syndrome))
}

/// Go-Back-N replay window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GbnWindow {
    pub frames: u32,
    pub replay_bytes: u64,
}

/// `frames = ceil(RTT * f_clk * frames_per_cycle) + slack`, `replay = frames * D`.
pub fn gbn_window<T: Real>(rtt_ns: T, clock_hz: T, frames_per_cycle: T, slack_frames: u32, frame_bytes: u32) -> GbnWindow {
    let in_flight = rtt_ns * clock_hz * frames_per_cycle / T::lit(1e9);
    let nearest = in_flight.round();
    // products like 10 ns * 500 MHz land within rounding of an integer
    let cycles = if (in_flight - nearest).abs() <= T::lit(1e-9) * nearest.max(T::one()) {
        nearest
    } else {
        in_flight.ceil()
    };
    let frames = cycles.max(T::zero()).to_u32().unwrap_or(u32::MAX).saturating_add(slack_frames);
    GbnWindow { frames, replay_bytes: u64::from(frames) * u64::from(frame_bytes) }
}

/// The synthesis records making up one protection stack.
#[derive(Clone, Debug)]
pub struct EccStack<'a> {
    pub code: RsCode,
    pub rs: Option<(&'a SynthRecord, &'a SynthRecord)>,
    pub crc: Option<(&'a SynthRecord, &'a SynthRecord, &'a SynthRecord)>,
}

impl<'a> EccStack<'a> {
    /// Picks the records needed for `code` in the frame's mode. The uncoded
    /// point carries no RS blocks; FEC-only frames carry no CRC/retry blocks.
    pub fn select(table: &'a SynthTable, code: RsCode, frame: &FrameConfig, gbn_rtt_ns: f64) -> Result<Self, CostError> {
        let missing = |what: String| CostError::MissingRecord(what);
        let rs = if code.is_uncoded() {
            None
        } else {
            let enc = table
                .rs(BlockKind::RsEncoder, code.k())
                .ok_or_else(|| missing(format!("rs_encoder for {code}")))?;
            let dec = table
                .rs(BlockKind::RsDecoder, code.k())
                .ok_or_else(|| missing(format!("rs_decoder for {code}")))?;
            Some((enc, dec))
        };
        let crc = match frame.mode() {
            ProtectionMode::FecOnly => None,
            ProtectionMode::Hybrid => {
                let p = frame.payload_bytes();
                let append = table
                    .crc(BlockKind::CrcAppend, p)
                    .ok_or_else(|| missing(format!("crc_append for payload {p} B")))?;
                let check = table
                    .crc(BlockKind::CrcCheck, p)
                    .ok_or_else(|| missing(format!("crc_check for payload {p} B")))?;
                let gbn = table
                    .gbn(p, gbn_rtt_ns)
                    .ok_or_else(|| missing(format!("gbn_retry for payload {p} B, RTT {gbn_rtt_ns} ns")))?;
                Some((append, check, gbn))
            }
        };
        Ok(Self { code, rs, crc })
    }
}

/// Cost of one block, already normalized per payload bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentCost<T> {
    pub kind: BlockKind,
    pub energy_pj_per_payload_bit: T,
    pub area_um2: T,
    pub throughput_gbps: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EccCostSummary<T> {
    pub energy_pj_per_payload_bit: T,
    pub area_um2: T,
    pub throughput_gbps: T,
    pub shoreline_gbps_per_mm: T,
    pub areal_gbps_per_mm2: T,
    pub components: Vec<ComponentCost<T>>,
}

impl<T: Real> EccCostSummary<T> {
    fn from_components(components: Vec<ComponentCost<T>>) -> Self {
        let energy = components.iter().fold(T::zero(), |a, c| a + c.energy_pj_per_payload_bit);
        let area_um2 = components.iter().fold(T::zero(), |a, c| a + c.area_um2);
        let throughput = components
            .iter()
            .fold(T::infinity(), |a, c| a.min(c.throughput_gbps));
        let area_mm2 = area_um2 * T::lit(1e-6);
        let (shoreline, areal) = if area_mm2 > T::zero() {
            (throughput / area_mm2.sqrt(), throughput / area_mm2)
        } else {
            (T::infinity(), T::infinity())
        };
        Self {
            energy_pj_per_payload_bit: energy,
            area_um2,
            throughput_gbps: throughput,
            shoreline_gbps_per_mm: shoreline,
            areal_gbps_per_mm2: areal,
            components,
        }
    }

    /// Area in mm².
    pub fn area_mm2(&self) -> T {
        self.area_um2 * T::lit(1e-6)
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Sums the stack's per-payload-bit energy and area (node-scaled) and takes
/// the slowest component as the stack throughput.
///
/// RS blocks run at their synthesized clock and move `8K` information bits
/// per cycle; CRC and retry move one `8P`-bit frame per cycle at
/// `params.crc_clock_hz`.
pub fn ecc_stack_cost<T: Real>(
    stack: &EccStack<'_>,
    frame: &FrameConfig,
    p_pre: T,
    scaling: &NodeScaling<T>,
    params: &CostParams<T>,
) -> Result<EccCostSummary<T>, CostError> {
    let code = stack.code;
    let payload = frame.payload_bytes();
    let info_per_payload = T::from_count(frame.protected_bytes()) / T::from_count(payload);
    let mut components = Vec::new();

    if let Some((enc, dec)) = stack.rs {
        let bits = 8 * code.k();
        let enc_e = rs_encoder_energy::<T>(enc, code, bits)?;
        let dec_e = rs_decoder_energy(dec, p_pre, code, bits, params.syndrome_fraction)?;
        for (rec, e) in [(enc, enc_e), (dec, dec_e)] {
            components.push(ComponentCost {
                kind: rec.block_kind,
                energy_pj_per_payload_bit: e * info_per_payload * scaling.energy_factor,
                area_um2: T::lit(rec.area_um2) * scaling.area_factor,
                throughput_gbps: T::from_count(bits) / T::lit(rec.clock_period_ns),
            });
        }
    }

    if let Some((append, check, gbn)) = stack.crc {
        let frame_gbps = T::lit(8.0) * T::from_count(payload) * params.crc_clock_hz / T::lit(1e9);
        for rec in [append, check, gbn] {
            let e = energy_per_payload_bit(T::lit(rec.dyn_power_mw), params.crc_clock_hz, payload);
            components.push(ComponentCost {
                kind: rec.block_kind,
                energy_pj_per_payload_bit: e * scaling.energy_factor,
                area_um2: T::lit(rec.area_um2) * scaling.area_factor,
                throughput_gbps: frame_gbps,
            });
        }
    }

    Ok(EccCostSummary::from_components(components))
}
