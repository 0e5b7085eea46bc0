//! Scalar plumbing: exact rationals for finite-n probabilities and a small
//! numeric trait shared by the real and complex quadrature code.

use std::ops::Mul;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Num, One, ToPrimitive};

/// Exact probabilities at `t = 1/q`.
pub type ExactScalar = BigRational;

pub fn rational(num: i64, den: i64) -> ExactScalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `t = 1/q` as an exact rational.
pub fn inverse_of(q: u64) -> ExactScalar {
    BigRational::new(BigInt::one(), BigInt::from(q))
}

pub fn exact_to_f64(x: &ExactScalar) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `x^n` by binary powering.
pub fn pow<T: Clone + One + Mul<Output = T>>(x: &T, n: usize) -> T {
    num_traits::pow(x.clone(), n)
}

/// Real or complex floating scalar.
pub trait Numeric: Num + Copy + Send + Sync + std::fmt::Debug + 'static {
    fn norm(&self) -> f64;
    fn from_f64(x: f64) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
}

impl Numeric for f64 {
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
}

impl Numeric for Complex64 {
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn ln(self) -> Self {
        Complex64::ln(self)
    }
}

/// Integer power for numeric scalars, negative exponents allowed.
pub fn powi<T: Numeric>(x: T, n: i64) -> T {
    let p = num_traits::pow(x, n.unsigned_abs() as usize);
    if n < 0 {
        T::one() / p
    } else {
        p
    }
}

/// `binom(m, 2) = m(m-1)/2`, valid for negative `m` too.
pub fn binom2(m: i64) -> i64 {
    m * (m - 1) / 2
}

/// Generic exact-or-float check that `x` lies in `(0, 1)`.
pub fn in_unit_interval(t: f64) -> bool {
    t > 0.0 && t < 1.0
}
