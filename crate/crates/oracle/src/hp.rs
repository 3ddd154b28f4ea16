//! Exact and high-precision probability references.
//!
//! Binomial tails are exact: a probability `a / Q` makes every term
//! `C(n,i) a^i (Q-a)^(n-i) / Q^n`, so numerators are summed as integers over
//! the common denominator `Q^n`. Quantities needing logarithms (frame
//! failure over a fractional number of codewords) use [`BigFloat`] with
//! roughly 130 significant digits.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use chiplink::ecc_model::{FrameConfig, RsCode};

use crate::OracleError;

/// Working precision of [`BigFloat`] in bits (about 130 decimal digits).
pub const PREC_BITS: u64 = 432;

/// Decimal digits carried by the references.
pub const WORKING_DIGITS: u32 = (PREC_BITS as f64 * std::f64::consts::LOG10_2) as u32;

/// Exact rational value of an `f64`.
pub fn exact(x: f64) -> Result<BigRational, OracleError> {
    BigRational::from_float(x).ok_or(OracleError::NotFinite(x))
}

fn check_prob(name: &'static str, p: &BigRational) -> Result<(), OracleError> {
    if p.is_negative() || p > &BigRational::one() {
        return Err(OracleError::Domain { name, value: p.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(())
}

fn binomial(n: u32, k: u32) -> BigInt {
    let k = k.min(n - k);
    let mut c = BigInt::one();
    for j in 1..=k {
        c = c * BigInt::from(n - k + j) / BigInt::from(j);
    }
    c
}

/// `Σ_{i=lo}^{hi} w(i) · C(n,i) p^i (1-p)^(n-i)` exactly, with integer weights.
fn weighted_tail(n: u32, p: &BigRational, lo: u32, hi: u32, weight: impl Fn(u32) -> BigInt) -> BigRational {
    let hi = hi.min(n);
    if lo > hi {
        return BigRational::zero();
    }
    let a = p.numer().clone();
    let q = p.denom().clone();
    let b = &q - &a;
    let mut a_pow = vec![BigInt::one(); n as usize + 1];
    let mut b_pow = vec![BigInt::one(); n as usize + 1];
    for i in 1..=n as usize {
        a_pow[i] = &a_pow[i - 1] * &a;
        b_pow[i] = &b_pow[i - 1] * &b;
    }
    let mut num = BigInt::zero();
    for i in lo..=hi {
        num += weight(i) * binomial(n, i) * &a_pow[i as usize] * &b_pow[(n - i) as usize];
    }
    BigRational::new(num, q.pow(n))
}

/// `Pr[X > t]` for `X ~ Binomial(n, p)`, exact.
pub fn hp_binom_tail(n: u32, p: &BigRational, t: u32) -> Result<BigRational, OracleError> {
    check_prob("p", p)?;
    if t >= n {
        return Ok(BigRational::zero());
    }
    Ok(weighted_tail(n, p, t + 1, n, |_| BigInt::one()))
}

/// `Pr[X <= t]`, the complement of [`hp_binom_tail`], summed independently.
pub fn hp_binom_head(n: u32, p: &BigRational, t: u32) -> Result<BigRational, OracleError> {
    check_prob("p", p)?;
    Ok(weighted_tail(n, p, 0, t, |_| BigInt::one()))
}

/// `1 - (1 - p)^m`, exact.
pub fn hp_symbol_error(p_pre: &BigRational, symbol_bits: u32) -> Result<BigRational, OracleError> {
    check_prob("p_pre", p_pre)?;
    let one = BigRational::one();
    Ok(&one - num_traits::pow(&one - p_pre, symbol_bits as usize))
}

/// Codeword failure probability at raw BER `p_pre`, exact.
pub fn hp_block_fail(p_pre: &BigRational, code: RsCode) -> Result<BigRational, OracleError> {
    let ps = hp_symbol_error(p_pre, code.symbol_bits())?;
    hp_binom_tail(code.n(), &ps, code.t())
}

/// `Σ_{i>t} (i / 2N) Pr[X = i]`, exact; the raw BER for an uncoded code.
pub fn hp_post_fec_ber(p_pre: &BigRational, code: RsCode) -> Result<BigRational, OracleError> {
    if code.is_uncoded() {
        check_prob("p_pre", p_pre)?;
        return Ok(p_pre.clone());
    }
    let ps = hp_symbol_error(p_pre, code.symbol_bits())?;
    let n = code.n();
    let tail = weighted_tail(n, &ps, code.t() + 1, n, BigInt::from);
    Ok(tail / BigRational::from_integer(BigInt::from(2 * n)))
}

/// `1 - (1 - p_blk)^(D/K)` to [`PREC_BITS`] bits.
pub fn hp_frame_fail(p_pre: &BigRational, code: RsCode, frame: &FrameConfig) -> Result<BigFloat, OracleError> {
    let p_blk = hp_block_fail(p_pre, code)?;
    let b = BigFloat::from_ratio(&BigInt::from(frame.protected_bytes()), &BigInt::from(code.k()));
    Ok(one_minus_pow(&p_blk, &b))
}

/// `1 - (1 - p)^b` for `p` in [0, 1] and `b > 0`.
pub fn one_minus_pow(p: &BigRational, b: &BigFloat) -> BigFloat {
    if p.is_zero() {
        return BigFloat::zero();
    }
    if p.is_one() {
        return BigFloat::one();
    }
    let pf = BigFloat::from_rational(p);
    let ln_q = if p <= &BigRational::new(1.into(), 2.into()) {
        neg_log1p_series(&pf).neg()
    } else {
        ln(&BigFloat::from_rational(&(BigRational::one() - p)))
    };
    expm1(&b.mul(&ln_q)).neg()
}

/// `|approx - reference| / |reference|`, computed exactly; 0 when both are 0.
pub fn rel_error(approx: f64, reference: &BigRational) -> f64 {
    let Some(a) = BigRational::from_float(approx) else { return f64::INFINITY };
    if reference.is_zero() {
        return if a.is_zero() { 0.0 } else { f64::INFINITY };
    }
    ((a - reference).abs() / reference.abs()).to_f64().unwrap_or(f64::INFINITY)
}

/// Same as [`rel_error`] against a [`BigFloat`] reference.
pub fn rel_error_bf(approx: f64, reference: &BigFloat) -> f64 {
    rel_error(approx, &reference.to_rational())
}

/// Binary floating point with a [`PREC_BITS`]-bit mantissa: `m · 2^e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigFloat {
    m: BigInt,
    e: i64,
}

impl BigFloat {
    pub fn zero() -> Self {
        Self { m: BigInt::zero(), e: 0 }
    }

    pub fn one() -> Self {
        Self { m: BigInt::one(), e: 0 }.norm()
    }

    pub fn from_int(n: i64) -> Self {
        Self { m: BigInt::from(n), e: 0 }.norm()
    }

    fn norm(mut self) -> Self {
        if self.m.is_zero() {
            self.e = 0;
            return self;
        }
        let bits = self.m.bits();
        if bits > PREC_BITS {
            let shift = bits - PREC_BITS;
            // truncate the magnitude so rounding is symmetric in sign
            let neg = self.m.sign() == Sign::Minus;
            let mag = self.m.magnitude() >> shift;
            self.m = BigInt::from_biguint(if neg { Sign::Minus } else { Sign::Plus }, mag);
            self.e += shift as i64;
        } else if bits < PREC_BITS {
            let shift = PREC_BITS - bits;
            self.m <<= shift;
            self.e -= shift as i64;
        }
        self
    }

    pub fn from_ratio(n: &BigInt, d: &BigInt) -> Self {
        assert!(!d.is_zero(), "division by zero");
        if n.is_zero() {
            return Self::zero();
        }
        let shift = PREC_BITS as i64 + 2 + d.bits() as i64 - n.bits() as i64;
        let m = if shift >= 0 { (n << shift as u64).div_floor(d) } else { (n >> (-shift) as u64).div_floor(d) };
        Self { m, e: -shift }.norm()
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self::from_ratio(r.numer(), r.denom())
    }

    pub fn to_rational(&self) -> BigRational {
        let m = BigRational::from_integer(self.m.clone());
        if self.e >= 0 {
            m * BigRational::from_integer(BigInt::one() << self.e as u64)
        } else {
            m / BigRational::from_integer(BigInt::one() << (-self.e) as u64)
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn neg(&self) -> Self {
        Self { m: -&self.m, e: self.e }
    }

    pub fn abs(&self) -> Self {
        Self { m: self.m.abs(), e: self.e }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self { m: &self.m * &o.m, e: self.e + o.e }.norm()
    }

    pub fn div(&self, o: &Self) -> Self {
        assert!(!o.is_zero(), "division by zero");
        let shift = PREC_BITS + 2 + o.m.bits();
        Self { m: (&self.m << shift) / &o.m, e: self.e - o.e - shift as i64 }.norm()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let (hi, lo) = if self.e >= o.e { (self, o) } else { (o, self) };
        let gap = (hi.e - lo.e) as u64;
        // the smaller operand cannot affect the kept bits
        if gap > 2 * PREC_BITS + 8 && hi.magnitude_exp() > lo.magnitude_exp() + PREC_BITS as i64 + 8 {
            return hi.clone();
        }
        Self { m: (&hi.m << gap) + &lo.m, e: lo.e }.norm()
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Exponent of the leading bit, `floor(log2 |x|)`.
    fn magnitude_exp(&self) -> i64 {
        self.e + self.m.bits() as i64 - 1
    }

    fn div_int(&self, k: u64) -> Self {
        self.div(&Self::from_int(k as i64))
    }

    fn mul_pow2(&self, k: i64) -> Self {
        Self { m: self.m.clone(), e: self.e + k }
    }

    /// Whether `|self|` is below `2^-bits` relative to `reference`.
    fn negligible(&self, reference: &Self) -> bool {
        self.is_zero() || (!reference.is_zero() && self.magnitude_exp() < reference.magnitude_exp() - PREC_BITS as i64 - 4)
    }
}

/// `Σ_{i>=1} p^i / i = -ln(1 - p)` for `0 <= p <= 1/2`.
fn neg_log1p_series(p: &BigFloat) -> BigFloat {
    let mut sum = BigFloat::zero();
    let mut pow = p.clone();
    let mut i = 1u64;
    loop {
        let term = pow.div_int(i);
        if term.negligible(&sum) {
            return sum;
        }
        sum = sum.add(&term);
        pow = pow.mul(p);
        i += 1;
    }
}

/// `2 atanh(z) = 2 Σ z^(2i+1) / (2i+1)` for small `|z|`.
fn two_atanh(z: &BigFloat) -> BigFloat {
    let z2 = z.mul(z);
    let mut sum = BigFloat::zero();
    let mut pow = z.clone();
    let mut i = 1u64;
    loop {
        let term = pow.div_int(i);
        if term.negligible(&sum) {
            return sum.mul_pow2(1);
        }
        sum = sum.add(&term);
        pow = pow.mul(&z2);
        i += 2;
    }
}

fn ln2() -> BigFloat {
    two_atanh(&BigFloat::from_ratio(&1.into(), &3.into()))
}

/// Natural log of a positive value.
pub fn ln(x: &BigFloat) -> BigFloat {
    assert!(x.m.sign() == Sign::Plus, "ln of a non-positive value");
    // x = m · 2^k with m in [1, 2)
    let k = x.magnitude_exp();
    let m = x.mul_pow2(-k);
    let one = BigFloat::one();
    let z = m.sub(&one).div(&m.add(&one));
    two_atanh(&z).add(&ln2().mul(&BigFloat::from_int(k)))
}

/// `e^y - 1`, accurate in relative terms for small `|y|`.
pub fn expm1(y: &BigFloat) -> BigFloat {
    if y.is_zero() {
        return BigFloat::zero();
    }
    let half = BigFloat::from_ratio(&1.into(), &2.into());
    if y.abs().sub(&half).m.sign() == Sign::Minus {
        let mut sum = BigFloat::zero();
        let mut term = y.clone();
        let mut j = 1u64;
        loop {
            if term.negligible(&sum) {
                return sum;
            }
            sum = sum.add(&term);
            j += 1;
            term = term.mul(y).div_int(j);
        }
    }
    exp(y).sub(&BigFloat::one())
}

/// `e^y` by reduction `y = k ln 2 + r` and a Taylor series in `r`.
pub fn exp(y: &BigFloat) -> BigFloat {
    let l2 = ln2();
    let k = y.div(&l2).to_f64().round();
    let r = y.sub(&l2.mul(&BigFloat::from_int(k as i64)));
    let mut sum = BigFloat::one();
    let mut term = BigFloat::one();
    let mut j = 1u64;
    loop {
        term = term.mul(&r).div_int(j);
        if term.negligible(&sum) {
            break;
        }
        sum = sum.add(&term);
        j += 1;
    }
    sum.mul_pow2(k as i64)
}
