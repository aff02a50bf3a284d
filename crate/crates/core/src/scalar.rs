//! Scalar abstractions.
//!
//! Exhaustive oracles only need field arithmetic, so they are written against
//! [`Scalar`] and run unchanged over `f32`, `f64` or exact rationals. Closed
//! forms that need `ln`/`exp`/`powf` require [`Real`].

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Field-like scalar: f32, f64 or an exact rational.
pub trait Scalar: Num + Clone + PartialOrd + Debug + FromPrimitive + ToPrimitive + Send + Sync {
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar")
    }

    /// Lossy view used for reporting and for driving samplers.
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
impl Scalar for BigRational {}

/// Floating point scalar: f32 or f64.
pub trait Real: Scalar + Float + Copy {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Exact rational `num / den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `base^exp` by repeated squaring, valid for any [`Scalar`].
pub fn powi<S: Scalar>(base: &S, exp: usize) -> S {
    num_traits::pow::pow(base.clone(), exp)
}

/// `[base^0, base^1, ..., base^n]`.
pub fn power_table<S: Scalar>(base: &S, n: usize) -> Vec<S> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = S::one();
    for _ in 0..=n {
        out.push(acc.clone());
        acc = acc * base.clone();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_powers_are_exact() {
        let half = ratio(1, 2);
        assert_eq!(powi(&half, 3), ratio(1, 8));
        let table = power_table(&ratio(1, 3), 2);
        assert_eq!(table, vec![ratio(1, 1), ratio(1, 3), ratio(1, 9)]);
    }

    #[test]
    fn float_powers_match_powi() {
        assert_eq!(powi(&0.5f64, 4), 0.0625);
        assert_eq!(power_table(&2.0f32, 3), vec![1.0, 2.0, 4.0, 8.0]);
    }
}
