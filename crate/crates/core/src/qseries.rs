//! q-Pochhammer symbols and Gaussian binomials.

use num_traits::Num;

use crate::error::{invalid, Error, Result};
use crate::scalar::{pow, Numeric};

/// A truncated infinite product together with the bound on what was dropped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Truncated<T> {
    pub value: T,
    pub bound: f64,
    pub terms: usize,
}

/// Length of a q-Pochhammer product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Length {
    Finite(usize),
    Infinite,
}

/// `(z; t)_n = Π_{j=0}^{n-1} (1 − z t^j)` for any scalar ring.
pub fn q_pochhammer<T: Num + Clone>(z: &T, t: &T, n: usize) -> T {
    let mut acc = T::one();
    let mut zt = z.clone();
    for _ in 0..n {
        acc = acc * (T::one() - zt.clone());
        zt = zt * t.clone();
    }
    acc
}

const MAX_TERMS: usize = 100_000;

/// `(z; t)_n` for floating scalars, with `n = ∞` truncated once
/// `2 |z| t^N / (1 − t) · |partial| < tol`. The dropped tail is reported in
/// [`Truncated::bound`].
pub fn q_pochhammer_num<T: Numeric>(z: T, t: f64, n: Length, tol: f64) -> Result<Truncated<T>> {
    match n {
        Length::Finite(n) => {
            let value = q_pochhammer(&z, &T::from_f64(t), n);
            Ok(Truncated { value, bound: 0.0, terms: n })
        }
        Length::Infinite => {
            if t.abs() >= 1.0 {
                return invalid(format!("infinite q-Pochhammer needs |t| < 1, got {t}"));
            }
            let zn = z.norm();
            let tail_scale = 1.0 / (1.0 - t.abs());
            let mut acc = T::one();
            let mut zt = z;
            let mut tj = 1.0;
            for j in 0..MAX_TERMS {
                let s = zn * tj * tail_scale;
                let bound = 2.0 * s * acc.norm();
                if s <= 0.5 && bound < tol {
                    return Ok(Truncated { value: acc, bound, terms: j });
                }
                acc = acc * (T::one() - zt);
                zt = zt * T::from_f64(t);
                tj *= t.abs();
            }
            Err(Error::NonConvergence { what: "infinite q-Pochhammer", achieved: f64::INFINITY, tol })
        }
    }
}

/// `(z; t)_∞` evaluated to near machine precision; used inside integrands
/// where the per-call tolerance is fixed by the caller.
#[inline]
pub fn q_pochhammer_inf<T: Numeric>(z: T, t: f64) -> T {
    let mut acc = T::one();
    let mut zt = z;
    let mut tj = z.norm();
    while tj > 1e-17 {
        acc = acc * (T::one() - zt);
        zt = zt * T::from_f64(t);
        tj *= t;
    }
    acc
}

/// `(t; t)_∞` for real `t ∈ (0, 1)`.
pub fn euler_phi(t: f64) -> f64 {
    q_pochhammer_inf(t, t)
}

/// Top row of a Gaussian binomial; `Infinite` encodes `[∞ choose j]_t = 1/(t;t)_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Top {
    Finite(i64),
    Infinite,
}

/// `[n choose k]_t = (t;t)_n / ((t;t)_k (t;t)_{n−k})`, zero outside `0 ≤ k ≤ n`.
pub fn q_binomial<T: Num + Clone>(n: i64, k: i64, t: &T) -> T {
    if k < 0 || n < 0 || k > n {
        return T::zero();
    }
    let k = k.min(n - k) as usize;
    let n = n as usize;
    let mut num = T::one();
    let mut den = T::one();
    for i in 1..=k {
        num = num * (T::one() - pow(t, n - k + i));
        den = den * (T::one() - pow(t, i));
    }
    num / den
}

/// Gaussian binomial with the `[∞ choose j]` convention.
pub fn q_binomial_top<T: Num + Clone>(top: Top, k: i64, t: &T) -> T {
    match top {
        Top::Finite(n) => q_binomial(n, k, t),
        Top::Infinite => {
            if k < 0 {
                T::zero()
            } else {
                T::one() / q_pochhammer(t, t, k as usize)
            }
        }
    }
}

/// Cached `(t;t)_m` for `m = 0..=max`, plus `(t;t)_∞`.
#[derive(Clone, Debug)]
pub struct EulerTable {
    t: f64,
    finite: Vec<f64>,
    infinite: f64,
}

impl EulerTable {
    pub fn new(t: f64, max: usize) -> Self {
        let mut finite = Vec::with_capacity(max + 1);
        let mut acc = 1.0;
        let mut tj = t;
        finite.push(1.0);
        for _ in 0..max {
            acc *= 1.0 - tj;
            tj *= t;
            finite.push(acc);
        }
        EulerTable { t, finite, infinite: euler_phi(t) }
    }

    /// `(t;t)_m`; extends lazily past the cached range.
    pub fn get(&self, m: usize) -> f64 {
        match self.finite.get(m) {
            Some(v) => *v,
            None => q_pochhammer(&self.t, &self.t, m),
        }
    }

    pub fn infinite(&self) -> f64 {
        self.infinite
    }

    pub fn binomial(&self, n: i64, k: i64) -> f64 {
        if k < 0 || n < 0 || k > n {
            return 0.0;
        }
        self.get(n as usize) / (self.get(k as usize) * self.get((n - k) as usize))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, ExactScalar};
    use num_complex::Complex64;

    #[test]
    fn pochhammer_examples() {
        let h = rational(1, 2);
        assert_eq!(q_pochhammer(&h, &h, 2), rational(3, 8));
        assert_eq!(q_pochhammer(&rational(7, 3), &h, 0), rational(1, 1));
        let inf = q_pochhammer_num(0.5, 0.5, Length::Infinite, 1e-17).unwrap();
        let partial = q_pochhammer(&0.5f64, &0.5, 64);
        assert!((inf.value - partial).abs() < 1e-15);
        assert!(inf.bound < 1e-17);
    }

    #[test]
    fn infinite_needs_contraction() {
        assert!(q_pochhammer_num(0.5, 1.0, Length::Infinite, 1e-10).is_err());
        assert!(q_pochhammer_num(0.5, -1.5, Length::Infinite, 1e-10).is_err());
    }

    #[test]
    fn complex_infinite_matches_long_partial() {
        let z = Complex64::new(-1.3, 0.7);
        let t = 1.0 / 3.0;
        let a = q_pochhammer_inf(z, t);
        let b = q_pochhammer(&z, &Complex64::new(t, 0.0), 200);
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn binomial_examples() {
        let t = rational(1, 2);
        assert_eq!(q_binomial(4, 2, &t), rational(35, 16));
        assert_eq!(q_binomial(5, 7, &t), rational(0, 1));
        assert_eq!(q_binomial(5, -1, &t), rational(0, 1));
        for tv in [rational(1, 3), rational(2, 7), rational(5, 1)] {
            let expect = rational(1, 1) + tv.clone() + tv.clone() * tv.clone();
            assert_eq!(q_binomial(3, 1, &tv), expect);
        }
    }

    #[test]
    fn binomial_symmetry_and_pascal() {
        let t: ExactScalar = rational(2, 5);
        for n in 0..=12i64 {
            for k in 0..=n {
                assert_eq!(q_binomial(n, k, &t), q_binomial(n, n - k, &t));
                if n >= 1 {
                    let rhs = q_binomial(n - 1, k, &t)
                        + pow(&t, (n - k) as usize) * q_binomial(n - 1, k - 1, &t);
                    assert_eq!(q_binomial(n, k, &t), rhs);
                }
            }
        }
    }

    #[test]
    fn infinite_top_is_limit() {
        let t: f64 = 0.4;
        for j in 0..6 {
            let lim = q_binomial_top(Top::Infinite, j, &t);
            let big = q_binomial(80, j, &t);
            assert!((lim - big).abs() < 1e-12);
        }
    }

    #[test]
    fn euler_table_agrees() {
        let tab = EulerTable::new(0.5, 10);
        assert!((tab.binomial(4, 2) - 35.0 / 16.0).abs() < 1e-15);
        assert!((tab.get(20) - q_pochhammer(&0.5, &0.5, 20)).abs() < 1e-15);
        assert!((tab.infinite() - 0.288_788_095_086_602_4).abs() < 1e-15);
    }
}
