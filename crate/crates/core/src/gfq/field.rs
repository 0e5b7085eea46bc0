//! Finite fields `F_q` with `q = p^m ≤ 256`, elements encoded as `u8`.
//!
//! An element of `F_{p^m}` is the base-`p` digit string of its coefficient
//! vector in `F_p[x]/(f)`, where `f` is the first monic primitive polynomial
//! of degree `m` in the order of [`primitive_polynomial`]. All operations go
//! through full tables.

use crate::error::{invalid, Result};

#[derive(Clone, Debug)]
pub struct FiniteField {
    q: usize,
    p: usize,
    m: usize,
    /// Coefficients `f_0, …, f_{m−1}` of the monic modulus (leading 1 implied).
    modulus: Vec<u8>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

fn smallest_prime_factor(n: usize) -> usize {
    (2..).take_while(|d| d * d <= n).find(|d| n % d == 0).unwrap_or(n)
}

/// `(p, m)` with `q = p^m`, or `None` if `q` is not a prime power.
pub fn prime_power(q: usize) -> Option<(usize, usize)> {
    if q < 2 {
        return None;
    }
    let p = smallest_prime_factor(q);
    let (mut r, mut m) = (q, 0);
    while r % p == 0 {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p, m))
}

/// Digit vectors of length `m` base `p`, little-endian.
fn digits(x: usize, p: usize, m: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(m);
    let mut r = x;
    for _ in 0..m {
        out.push(r % p);
        r /= p;
    }
    out
}

fn undigits(d: &[usize], p: usize) -> usize {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// Multiplies polynomial `a` by `x` modulo monic `f` (coefficients `f_0..f_{m−1}`).
fn times_x(a: &[usize], f: &[usize], p: usize) -> Vec<usize> {
    let m = a.len();
    let top = a[m - 1];
    let mut out = vec![0; m];
    for i in (1..m).rev() {
        out[i] = a[i - 1];
    }
    for i in 0..m {
        out[i] = (out[i] + (p - f[i]) * top) % p;
    }
    out
}

/// Whether `x` generates the multiplicative group of `F_p[x]/(f)`.
fn is_primitive(f: &[usize], p: usize) -> bool {
    let m = f.len();
    let order = p.pow(m as u32) - 1;
    let one: Vec<usize> = (0..m).map(|i| usize::from(i == 0)).collect();
    let mut cur = one.clone();
    for j in 1..=order {
        cur = times_x(&cur, f, p);
        if cur == one {
            return j == order;
        }
    }
    false
}

/// First monic primitive polynomial of degree `m` when `f_0, …, f_{m−1}` is
/// read as a base-`p` integer with `f_0` least significant.
fn primitive_polynomial(p: usize, m: usize) -> Vec<usize> {
    let total = p.pow(m as u32);
    for code in 0..total {
        let f = digits(code, p, m);
        if f[0] != 0 && is_primitive(&f, p) {
            return f;
        }
    }
    unreachable!("primitive polynomials exist for every degree")
}

impl FiniteField {
    pub fn new(q: usize) -> Result<Self> {
        let Some((p, m)) = prime_power(q) else {
            return invalid(format!("q = {q} is not a prime power"));
        };
        if q > 256 {
            return invalid(format!("q = {q} exceeds the supported maximum 256"));
        }
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            let da = digits(a, p, m);
            for b in 0..q {
                let db = digits(b, p, m);
                let s: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = undigits(&s, p) as u8;
            }
        }
        let modulus_us = if m == 1 { vec![0] } else { primitive_polynomial(p, m) };
        if m == 1 {
            for a in 0..q {
                for b in 0..q {
                    mul[a * q + b] = ((a * b) % p) as u8;
                }
            }
        } else {
            // log/antilog tables for the generator x
            let mut antilog = vec![0usize; q - 1];
            let mut log = vec![0usize; q];
            let mut cur: Vec<usize> = (0..m).map(|i| usize::from(i == 0)).collect();
            for (j, slot) in antilog.iter_mut().enumerate() {
                let v = undigits(&cur, p);
                *slot = v;
                log[v] = j;
                cur = times_x(&cur, &modulus_us, p);
            }
            for a in 1..q {
                for b in 1..q {
                    mul[a * q + b] = antilog[(log[a] + log[b]) % (q - 1)] as u8;
                }
            }
        }
        let mut neg = vec![0u8; q];
        let mut inv = vec![0u8; q];
        for a in 0..q {
            for b in 0..q {
                if add[a * q + b] == 0 {
                    neg[a] = b as u8;
                }
                if mul[a * q + b] == 1 {
                    inv[a] = b as u8;
                }
            }
        }
        let modulus = modulus_us.iter().map(|&c| c as u8).collect();
        Ok(FiniteField { q, p, m, modulus, add, mul, neg, inv })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    /// Low coefficients of the monic modulus; `[0]` for prime fields.
    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; zero maps to zero.
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        self.inv[a as usize]
    }

    /// `a − c·b`, the elimination primitive.
    #[inline]
    pub fn sub_mul(&self, a: u8, c: u8, b: u8) -> u8 {
        self.sub(a, self.mul(c, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(16), Some((2, 4)));
        assert_eq!(prime_power(81), Some((3, 4)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
        assert!(FiniteField::new(12).is_err());
        assert!(FiniteField::new(512).is_err());
        assert!(FiniteField::new(256).is_ok());
    }

    #[test]
    fn axioms_exhaustive_small_fields() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = FiniteField::new(q).unwrap();
            let el = 0..q as u8;
            for a in el.clone() {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1, "q={q} a={a}");
                }
                for b in el.clone() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    if a != 0 && b != 0 {
                        assert_ne!(f.mul(a, b), 0);
                    }
                    for c in el.clone() {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn known_moduli() {
        // x^2 + x + 1 over F_2; x^3 + x + 1; x^4 + x + 1; x^2 + x + 2 over F_3
        assert_eq!(FiniteField::new(4).unwrap().modulus(), &[1, 1]);
        assert_eq!(FiniteField::new(8).unwrap().modulus(), &[1, 1, 0]);
        assert_eq!(FiniteField::new(16).unwrap().modulus(), &[1, 1, 0, 0]);
        assert_eq!(FiniteField::new(9).unwrap().modulus(), &[2, 1]);
    }
}
