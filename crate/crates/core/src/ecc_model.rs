//! Reliability and goodput model for the RS-FEC / CRC / ARQ protection stack.
//!
//! Every probability that can reach the 1e-27 regime is carried in the log
//! domain: binomial terms are summed with log-sum-exp and complements go
//! through `ln_1p`/`exp_m1`, never through `1 - CDF`.

use serde::{Deserialize, Serialize};

use crate::error::EccError;
use crate::scalar::{log_sum_exp, Real};

/// Codeword length used throughout the default family.
pub const DEFAULT_N: u32 = 86;
/// Weakest-rate code in the default family.
pub const DEFAULT_K_MIN: u32 = 44;
/// GF(2^8) symbols.
pub const DEFAULT_SYMBOL_BITS: u32 = 8;
/// CRC-64 trailer bytes in hybrid frames.
pub const CRC64_BYTES: u32 = 8;

/// An RS(N, K) code over GF(2^M). `t` is always derived, never stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RsCode {
    n: u32,
    k: u32,
    m: u32,
}

impl RsCode {
    /// RS(n, k) over GF(2^8).
    pub fn new(n: u32, k: u32) -> Result<Self, EccError> {
        Self::with_symbol_bits(n, k, DEFAULT_SYMBOL_BITS)
    }

    pub fn with_symbol_bits(n: u32, k: u32, m: u32) -> Result<Self, EccError> {
        let invalid = |reason| EccError::InvalidCode { n, k, m, reason };
        if m == 0 || m > 31 {
            return Err(invalid("symbol width must be in 1..=31 bits"));
        }
        if k == 0 {
            return Err(invalid("K must be at least 1"));
        }
        if k > n {
            return Err(invalid("K must not exceed N"));
        }
        if u64::from(n) > (1u64 << m) - 1 {
            return Err(invalid("N must not exceed 2^M - 1"));
        }
        Ok(Self { n, k, m })
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Correctable symbol errors per codeword, `floor((N - K) / 2)`.
    #[inline]
    pub fn t(&self) -> u32 {
        (self.n - self.k) / 2
    }

    #[inline]
    pub fn symbol_bits(&self) -> u32 {
        self.m
    }

    /// The rate-1 operating point (K = N): no decoder, no correction.
    #[inline]
    pub fn is_uncoded(&self) -> bool {
        self.k == self.n
    }

    pub fn rate<T: Real>(&self) -> T {
        T::from_count(self.k) / T::from_count(self.n)
    }
}

impl std::fmt::Display for RsCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RS({},{})", self.n, self.k)
    }
}

/// RS(n, K) for K = n, n-2, ..., down to `k_min`, strongest code last.
pub fn rs_family(n: u32, k_min: u32) -> Result<Vec<RsCode>, EccError> {
    let mut family = Vec::new();
    let mut k = n;
    while k >= k_min.max(1) {
        family.push(RsCode::new(n, k)?);
        if k < 2 {
            break;
        }
        k -= 2;
    }
    Ok(family)
}

/// The default RS(86, K) family, K in {86, 84, ..., 44}.
pub fn default_family() -> Vec<RsCode> {
    rs_family(DEFAULT_N, DEFAULT_K_MIN).expect("default family is valid")
}

/// How a frame is protected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtectionMode {
    /// RS-FEC sized to meet the target alone; no CRC, no retry.
    FecOnly,
    /// RS-FEC + CRC-64 + Go-Back-N retry.
    Hybrid,
}

impl ProtectionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProtectionMode::FecOnly => "fec_only",
            ProtectionMode::Hybrid => "hybrid",
        }
    }
}

/// Byte layout of one ARQ frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameConfig {
    payload_bytes: u32,
    header_bytes: u32,
    mode: ProtectionMode,
}

impl FrameConfig {
    pub fn new(payload_bytes: u32, header_bytes: u32, mode: ProtectionMode) -> Result<Self, EccError> {
        if payload_bytes == 0 {
            return Err(EccError::InvalidFrame("payload must be at least one byte"));
        }
        Ok(Self { payload_bytes, header_bytes, mode })
    }

    /// The 256 B payload / 8 B header baseline in the given mode.
    pub fn baseline(mode: ProtectionMode) -> Self {
        Self { payload_bytes: 256, header_bytes: 8, mode }
    }

    #[inline]
    pub fn payload_bytes(&self) -> u32 {
        self.payload_bytes
    }

    #[inline]
    pub fn header_bytes(&self) -> u32 {
        self.header_bytes
    }

    /// 0 for FEC-only frames, 8 (CRC-64) for hybrid frames.
    #[inline]
    pub fn crc_bytes(&self) -> u32 {
        match self.mode {
            ProtectionMode::FecOnly => 0,
            ProtectionMode::Hybrid => CRC64_BYTES,
        }
    }

    #[inline]
    pub fn mode(&self) -> ProtectionMode {
        self.mode
    }

    pub fn with_mode(self, mode: ProtectionMode) -> Self {
        Self { mode, ..self }
    }

    /// RS-protected bytes per frame, D = P + H + C.
    #[inline]
    pub fn protected_bytes(&self) -> u32 {
        self.payload_bytes + self.header_bytes + self.crc_bytes()
    }
}

/// Maximum number of retransmissions after the first attempt.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetryLimit {
    Bounded(u32),
    Unbounded,
}

impl RetryLimit {
    /// Total attempts A = R + 1, `None` when unbounded.
    pub fn attempts(&self) -> Option<u32> {
        match *self {
            RetryLimit::Bounded(r) => Some(r + 1),
            RetryLimit::Unbounded => None,
        }
    }
}

/// Delivered-BER target and CRC/ARQ failure-model parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityTargets<T> {
    pub ber_target: T,
    pub p_undet: T,
    pub f_wrong: T,
    pub max_retries: RetryLimit,
}

impl<T: Real> Default for ReliabilityTargets<T> {
    /// BER target 1e-27, CRC miss 2^-64, half the payload wrong on a miss, one retry.
    fn default() -> Self {
        Self {
            ber_target: T::lit(1e-27),
            p_undet: T::lit(2f64.powi(-64)),
            f_wrong: T::lit(0.5),
            max_retries: RetryLimit::Bounded(1),
        }
    }
}

impl<T: Real> ReliabilityTargets<T> {
    pub fn with_retries(self, max_retries: RetryLimit) -> Self {
        Self { max_retries, ..self }
    }

    pub fn validate(&self) -> Result<(), EccError> {
        let (zero, one) = (T::zero(), T::one());
        if !(self.ber_target > zero && self.ber_target < one) {
            return Err(EccError::InvalidTargets("ber_target must lie in (0, 1)"));
        }
        if !(self.p_undet >= zero && self.p_undet <= one) {
            return Err(EccError::InvalidTargets("p_undet must lie in [0, 1]"));
        }
        if !(self.f_wrong > zero && self.f_wrong <= one) {
            return Err(EccError::InvalidTargets("f_wrong must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Per-operating-point reliability and goodput figures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityReport<T> {
    pub p_sym: T,
    pub p_blk_fail: T,
    pub p_frame_fail: T,
    pub p_det: T,
    pub ber_delivered: T,
    pub p_drop: T,
    pub ber_drop_eff: T,
    pub expected_attempts: T,
    pub goodput: T,
    pub wire_bytes_per_attempt: T,
}

fn check_probability<T: Real>(name: &'static str, p: T) -> Result<(), EccError> {
    if p >= T::zero() && p <= T::one() {
        Ok(())
    } else {
        Err(EccError::Domain { name, value: p.to_f64().unwrap_or(f64::NAN) })
    }
}

/// `ln C(n, i)`. Exact in `u128` while it fits, otherwise a sum of logs.
fn ln_choose<T: Real>(n: u32, i: u32) -> T {
    let i = i.min(n - i);
    let mut c: u128 = 1;
    for j in 1..=u128::from(i) {
        match c.checked_mul(u128::from(n) - u128::from(i) + j) {
            Some(v) => c = v / j,
            None => {
                return (1..=i).fold(T::zero(), |acc, j| {
                    acc + (T::from_count(n - i + j) / T::from_count(j)).ln()
                })
            }
        }
    }
    T::from_u128(c).expect("binomial coefficient representable").ln()
}

/// `ln Pr[X = i]` for `X ~ Binomial(n, p)`, given `ln p` and `ln(1 - p)`.
fn ln_binom_pmf<T: Real>(n: u32, i: u32, ln_p: T, ln_q: T) -> T {
    let mut acc = ln_choose::<T>(n, i);
    if i > 0 {
        acc += T::from_count(i) * ln_p;
    }
    if n > i {
        acc += T::from_count(n - i) * ln_q;
    }
    acc
}

/// `sum_{i=lo..=hi} w(i) * Pr[X = i]` for `X ~ Binomial(n, p)`, weights given in log form.
fn weighted_binom_sum<T: Real>(n: u32, p: T, lo: u32, hi: u32, ln_weight: impl Fn(u32) -> T) -> T {
    let hi = hi.min(n);
    if lo > hi {
        return T::zero();
    }
    if p == T::zero() {
        return if lo == 0 { ln_weight(0).exp() } else { T::zero() };
    }
    if p == T::one() {
        return if hi == n { ln_weight(n).exp() } else { T::zero() };
    }
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    log_sum_exp((lo..=hi).map(|i| ln_weight(i) + ln_binom_pmf(n, i, ln_p, ln_q))).exp()
}

/// `Pr[lo <= X <= hi]` for `X ~ Binomial(n, p)`, by log-domain term summation.
pub fn binom_range_prob<T: Real>(n: u32, p: T, lo: u32, hi: u32) -> T {
    weighted_binom_sum(n, p, lo, hi, |_| T::zero())
}

/// Symbol error probability `1 - (1 - p_pre)^M`.
pub fn symbol_error_prob<T: Real>(p_pre: T, symbol_bits: u32) -> Result<T, EccError> {
    check_probability("p_pre", p_pre)?;
    if symbol_bits == 0 {
        return Err(EccError::InvalidCode { n: 0, k: 0, m: 0, reason: "symbol width must be positive" });
    }
    Ok(-(T::from_count(symbol_bits) * (-p_pre).ln_1p()).exp_m1())
}

/// Codeword decode-failure probability `Pr[X > t]`, `X ~ Binomial(N, p_sym)`.
pub fn block_fail_prob<T: Real>(p_sym: T, code: RsCode) -> Result<T, EccError> {
    check_probability("p_sym", p_sym)?;
    Ok(binom_range_prob(code.n(), p_sym, code.t() + 1, code.n()))
}

/// Decoder correction activity `Pr[1 <= X <= t]`; zero for t = 0.
pub fn correctable_activity_prob<T: Real>(p_sym: T, code: RsCode) -> Result<T, EccError> {
    check_probability("p_sym", p_sym)?;
    Ok(binom_range_prob(code.n(), p_sym, 1, code.t()))
}

/// Post-FEC BER: expected fraction of erroneous bits in uncorrectable codewords,
/// `sum_{i>t} (i / 2N) Pr[X = i]`.
///
/// For the uncoded point (K = N) there is no decoder and the raw BER is returned.
pub fn post_fec_ber<T: Real>(p_pre: T, code: RsCode) -> Result<T, EccError> {
    let p_sym = symbol_error_prob(p_pre, code.symbol_bits())?;
    if code.is_uncoded() {
        return Ok(p_pre);
    }
    let ln_2n = (T::lit(2.0) * T::from_count(code.n())).ln();
    Ok(weighted_binom_sum(code.n(), p_sym, code.t() + 1, code.n(), |i| {
        if i == 0 {
            T::neg_infinity()
        } else {
            T::from_count(i).ln() - ln_2n
        }
    }))
}

/// Effective codewords per frame under streaming RS coding, `B_eff = D / K`.
pub fn effective_codewords<T: Real>(code: RsCode, frame: &FrameConfig) -> T {
    T::from_count(frame.protected_bytes()) / T::from_count(code.k())
}

/// Per-attempt frame failure probability `1 - (1 - p_blk_fail)^{D/K}`.
pub fn frame_fail_prob<T: Real>(p_pre: T, code: RsCode, frame: &FrameConfig) -> Result<T, EccError> {
    let p_sym = symbol_error_prob(p_pre, code.symbol_bits())?;
    let p_blk = block_fail_prob(p_sym, code)?;
    Ok(frame_fail_from_block(p_blk, effective_codewords(code, frame)))
}

fn frame_fail_from_block<T: Real>(p_blk: T, b_eff: T) -> T {
    if p_blk >= T::one() {
        return T::one();
    }
    -(b_eff * (-p_blk).ln_1p()).exp_m1()
}

/// Wire bytes per attempt under the streaming code-rate model, `D * N / K`.
pub fn wire_bytes_per_attempt<T: Real>(code: RsCode, frame: &FrameConfig) -> T {
    T::from_count(frame.protected_bytes()) * T::from_count(code.n()) / T::from_count(code.k())
}

/// Full FEC + CRC + ARQ analysis of one operating point.
pub fn hybrid_failure_analysis<T: Real>(
    p_pre: T,
    code: RsCode,
    frame: &FrameConfig,
    targets: &ReliabilityTargets<T>,
) -> Result<ReliabilityReport<T>, EccError> {
    if frame.mode() != ProtectionMode::Hybrid {
        return Err(EccError::ModeMismatch { expected: "hybrid" });
    }
    targets.validate()?;
    let p_sym = symbol_error_prob(p_pre, code.symbol_bits())?;
    let p_blk_fail = block_fail_prob(p_sym, code)?;
    let p_frame_fail = frame_fail_from_block(p_blk_fail, effective_codewords(code, frame));

    let p_det = p_frame_fail * (T::one() - targets.p_undet);
    if p_det >= T::one() {
        return Err(EccError::DegenerateDetection);
    }
    let one_minus_det = T::one() - p_det;
    let ber_delivered = targets.f_wrong * p_frame_fail * targets.p_undet / one_minus_det;

    let payload_bits = T::lit(8.0) * T::from_count(frame.payload_bytes());
    let p_drop = match targets.max_retries.attempts() {
        Some(a) => p_det.powi(a as i32),
        None => T::zero(),
    };
    let ber_drop_eff = p_drop / payload_bits;

    let expected_attempts = T::one() / one_minus_det;
    let wire = wire_bytes_per_attempt(code, frame);
    let goodput = T::from_count(frame.payload_bytes()) / (wire * expected_attempts);

    Ok(ReliabilityReport {
        p_sym,
        p_blk_fail,
        p_frame_fail,
        p_det,
        ber_delivered,
        p_drop,
        ber_drop_eff,
        expected_attempts,
        goodput,
        wire_bytes_per_attempt: wire,
    })
}

/// FEC-only analysis: no CRC, no retry, delivered BER equals post-FEC BER.
pub fn fec_only_analysis<T: Real>(
    p_pre: T,
    code: RsCode,
    frame: &FrameConfig,
) -> Result<ReliabilityReport<T>, EccError> {
    if frame.mode() != ProtectionMode::FecOnly {
        return Err(EccError::ModeMismatch { expected: "fec_only" });
    }
    let p_sym = symbol_error_prob(p_pre, code.symbol_bits())?;
    let p_blk_fail = block_fail_prob(p_sym, code)?;
    let p_frame_fail = frame_fail_from_block(p_blk_fail, effective_codewords(code, frame));
    let wire = wire_bytes_per_attempt(code, frame);
    Ok(ReliabilityReport {
        p_sym,
        p_blk_fail,
        p_frame_fail,
        p_det: T::zero(),
        ber_delivered: post_fec_ber(p_pre, code)?,
        p_drop: T::zero(),
        ber_drop_eff: T::zero(),
        expected_attempts: T::one(),
        goodput: T::from_count(frame.payload_bytes()) / wire,
        wire_bytes_per_attempt: wire,
    })
}

/// Dispatches on the frame's protection mode.
pub fn analyze<T: Real>(
    p_pre: T,
    code: RsCode,
    frame: &FrameConfig,
    targets: &ReliabilityTargets<T>,
) -> Result<ReliabilityReport<T>, EccError> {
    match frame.mode() {
        ProtectionMode::FecOnly => fec_only_analysis(p_pre, code, frame),
        ProtectionMode::Hybrid => hybrid_failure_analysis(p_pre, code, frame, targets),
    }
}

/// Largest per-attempt frame-fail probability meeting both the SDC and the
/// drop constraint.
///
/// The SDC bound inverts `f * q * u / (1 - q (1 - u)) <= target` exactly:
/// `q <= target / (f u + target (1 - u))`. The drop bound solves
/// `(q (1 - u))^A / (8P) <= target`; unbounded retry disables it.
pub fn frame_fail_budget<T: Real>(frame: &FrameConfig, targets: &ReliabilityTargets<T>) -> Result<T, EccError> {
    if frame.mode() != ProtectionMode::Hybrid {
        return Err(EccError::ModeMismatch { expected: "hybrid" });
    }
    targets.validate()?;
    let one = T::one();
    let target = targets.ber_target;
    let detect = one - targets.p_undet;

    let sdc = if targets.p_undet == T::zero() {
        one
    } else {
        (target / (targets.f_wrong * targets.p_undet + target * detect)).min(one)
    };

    let drop = match targets.max_retries.attempts() {
        None => one,
        Some(_) if detect == T::zero() => one,
        Some(a) => {
            let payload_bits = T::lit(8.0) * T::from_count(frame.payload_bytes());
            let p_det_max = ((payload_bits * target).ln() / T::from_count(a)).exp().min(one);
            (p_det_max / detect).min(one)
        }
    };

    let budget = sdc.min(drop);
    if budget > T::zero() && budget.is_finite() {
        Ok(budget)
    } else {
        Err(EccError::InfeasibleBudget)
    }
}

/// Whether `code` meets the targets at `p_pre` under the frame's protection mode.
pub fn meets_target<T: Real>(
    p_pre: T,
    code: RsCode,
    frame: &FrameConfig,
    targets: &ReliabilityTargets<T>,
) -> Result<bool, EccError> {
    match frame.mode() {
        ProtectionMode::FecOnly => Ok(post_fec_ber(p_pre, code)? <= targets.ber_target),
        ProtectionMode::Hybrid => {
            let budget = frame_fail_budget(frame, targets)?;
            Ok(frame_fail_prob(p_pre, code, frame)? <= budget)
        }
    }
}

/// Highest-rate (largest K) code in `family` meeting the delivered-BER target.
pub fn select_code<T: Real>(
    p_pre: T,
    frame: &FrameConfig,
    targets: &ReliabilityTargets<T>,
    family: &[RsCode],
) -> Result<RsCode, EccError> {
    targets.validate()?;
    check_probability("p_pre", p_pre)?;
    let strongest = family.iter().min_by_key(|c| c.k()).ok_or(EccError::EmptyFamily)?;
    let budget = match frame.mode() {
        ProtectionMode::Hybrid => Some(frame_fail_budget(frame, targets)?),
        ProtectionMode::FecOnly => None,
    };
    let mut best: Option<RsCode> = None;
    for &code in family {
        if best.is_some_and(|b| b.k() >= code.k()) {
            continue;
        }
        let ok = match budget {
            None => post_fec_ber(p_pre, code)? <= targets.ber_target,
            Some(budget) => frame_fail_prob(p_pre, code, frame)? <= budget,
        };
        if ok {
            best = Some(code);
        }
    }
    best.ok_or(EccError::NoFeasibleCode {
        p_pre: p_pre.to_f64().unwrap_or(f64::NAN),
        strongest_k: strongest.k(),
    })
}
