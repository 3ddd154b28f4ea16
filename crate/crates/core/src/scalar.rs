//! Scalar abstraction for the analytical models.

use core::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar usable by the reliability and cost models: `f32` or `f64`.
///
/// The 1e-27 delivered-BER regime is representable in both, but only `f64`
/// carries enough precision for the 1e-12 relative-error gate.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only for values the type cannot represent at all.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_count(n: u32) -> Self {
        Self::from_u32(n).expect("count representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `log(exp(a) + exp(b))` without overflow; either side may be `-inf`.
#[inline]
pub fn log_add_exp<T: Real>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `log(sum(exp(x_i)))` over an iterator of log-values.
pub fn log_sum_exp<T: Real, I: IntoIterator<Item = T>>(terms: I) -> T {
    let terms: Vec<T> = terms.into_iter().collect();
    let max = terms
        .iter()
        .copied()
        .fold(T::neg_infinity(), |m, x| if x > m { x } else { m });
    if max == T::neg_infinity() {
        return max;
    }
    if max == T::infinity() {
        return max;
    }
    let sum = terms.iter().fold(T::zero(), |s, &x| s + (x - max).exp());
    max + sum.ln()
}
