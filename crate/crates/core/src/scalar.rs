//! Scalar abstractions shared by the analytic modules.
//!
//! [`Scalar`] is the minimal field-like interface used by the combinatorial
//! code (popularity tables, multinomial masses, exact enumeration). It is
//! implemented for `f32`, `f64` and [`BigRational`], so the enumeration paths
//! can run in exact arithmetic. [`Real`] adds transcendental functions and is
//! required by everything that integrates, takes logarithms or raises to real
//! powers.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, Num, Signed, ToPrimitive};

pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + Send + Sync + 'static {
    /// Exact representation of a non-negative count.
    fn from_count(n: u64) -> Self;

    /// Slack allowed when checking that a probability vector sums to one.
    fn sum_tolerance() -> Self;

    fn to_f64_lossy(&self) -> f64;
}

impl Scalar for f64 {
    fn from_count(n: u64) -> Self {
        n as f64
    }

    fn sum_tolerance() -> Self {
        1e-9
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_count(n: u64) -> Self {
        n as f32
    }

    fn sum_tolerance() -> Self {
        1e-5
    }

    fn to_f64_lossy(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for BigRational {
    fn from_count(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn sum_tolerance() -> Self {
        BigRational::from_integer(BigInt::from(0))
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Floating-point scalar used by integration, rates and optimisation.
pub trait Real: Scalar + Float + FloatConst {
    /// Converts an `f64` literal. Precision is lost for `f32`.
    fn lit(x: f64) -> Self;
}

impl Real for f64 {
    fn lit(x: f64) -> Self {
        x
    }
}

impl Real for f32 {
    fn lit(x: f64) -> Self {
        x as f32
    }
}

/// `base^exp` for a non-negative integer exponent, by repeated squaring.
pub fn powi<T: Scalar>(base: &T, exp: usize) -> T {
    num_traits::pow(base.clone(), exp)
}
