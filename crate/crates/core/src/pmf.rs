//! Finite probability mass functions with an explicit mass deficit.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{invalid, Result};
use crate::scalar::{exact_to_f64, ExactScalar};

/// A probability value that can be compared numerically.
pub trait Probability: Clone + std::fmt::Debug {
    fn to_f64(&self) -> f64;
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
}

impl Probability for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
    fn zero() -> Self {
        0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
}

impl Probability for ExactScalar {
    fn to_f64(&self) -> f64 {
        exact_to_f64(self)
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
}

/// Map from keys to probabilities. `mass_deficit` is the probability known to
/// lie outside the stored keys (truncation error); zero for exact pmfs.
#[derive(Clone, Debug, PartialEq)]
pub struct Pmf<K: Ord, P> {
    entries: BTreeMap<K, P>,
    mass_deficit: f64,
}

impl<K: Ord + Clone, P: Probability> Pmf<K, P> {
    pub fn new() -> Self {
        Pmf { entries: BTreeMap::new(), mass_deficit: 0.0 }
    }

    pub fn from_entries(entries: BTreeMap<K, P>, mass_deficit: f64) -> Self {
        Pmf { entries, mass_deficit }
    }

    pub fn point_mass(key: K, one: P) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(key, one);
        Pmf { entries, mass_deficit: 0.0 }
    }

    /// Adds `p` to the mass at `key`.
    pub fn add_mass(&mut self, key: K, p: P) {
        match self.entries.get_mut(&key) {
            Some(v) => *v = v.add(&p),
            None => {
                self.entries.insert(key, p);
            }
        }
    }

    pub fn set_mass_deficit(&mut self, deficit: f64) {
        self.mass_deficit = deficit;
    }

    pub fn mass_deficit(&self) -> f64 {
        self.mass_deficit
    }

    pub fn get(&self, key: &K) -> Option<&P> {
        self.entries.get(key)
    }

    /// Probability at `key` as a float, zero when absent.
    pub fn prob(&self, key: &K) -> f64 {
        self.entries.get(key).map_or(0.0, Probability::to_f64)
    }

    pub fn entries(&self) -> &BTreeMap<K, P> {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &P)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> P {
        self.entries.values().fold(P::zero(), |acc, p| acc.add(p))
    }

    /// Pushforward along `f`; mass is preserved.
    pub fn map_keys<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> K2) -> Pmf<K2, P> {
        let mut out = Pmf::new();
        for (k, p) in &self.entries {
            out.add_mass(f(k), p.clone());
        }
        out.mass_deficit = self.mass_deficit;
        out
    }

    pub fn to_f64(&self) -> Pmf<K, f64> {
        Pmf {
            entries: self.entries.iter().map(|(k, p)| (k.clone(), p.to_f64())).collect(),
            mass_deficit: self.mass_deficit,
        }
    }

    /// Checks nonnegativity (down to `-tol`) and `Σ p + deficit = 1` within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let mut sum = 0.0;
        for p in self.entries.values() {
            let v = p.to_f64();
            if v < -tol {
                return invalid(format!("negative probability {v}"));
            }
            sum += v;
        }
        if self.mass_deficit < 0.0 {
            return invalid("negative mass deficit");
        }
        let err = (sum + self.mass_deficit - 1.0).abs();
        if err > tol {
            return invalid(format!("mass {sum} + deficit {} differs from 1 by {err}", self.mass_deficit));
        }
        Ok(())
    }
}

impl<K: Ord + Clone, P: Probability> Default for Pmf<K, P> {
    fn default() -> Self {
        Pmf::new()
    }
}

impl<K: Ord + Clone> Pmf<K, ExactScalar> {
    /// Exact check: nonnegative and summing to exactly one.
    pub fn is_exact_probability(&self) -> bool {
        self.entries.values().all(|p| !p.is_negative()) && self.total() == ExactScalar::from_integer(1.into())
    }
}

impl<K: Ord + Clone + Serialize> Pmf<K, ExactScalar> {
    /// `[{"key": [...], "p_num": n, "p_den": d}, ...]`
    pub fn to_exact_json(&self) -> Value {
        let rows: Vec<Value> = self
            .entries
            .iter()
            .map(|(k, p)| {
                json!({
                    "key": k,
                    "p_num": big_number(p.numer()),
                    "p_den": big_number(p.denom()),
                })
            })
            .collect();
        Value::Array(rows)
    }
}

impl<K: Ord + Clone + Serialize, P: Probability> Pmf<K, P> {
    /// `key,p` with the key written as a quoted JSON array.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("key,p\n");
        for (k, p) in &self.entries {
            let key = serde_json::to_string(k).unwrap_or_default();
            out.push_str(&format!("\"{key}\",{:.17e}\n", p.to_f64()));
        }
        out
    }
}

/// Arbitrary-size integer as a JSON number.
pub(crate) fn big_number(x: &num_bigint::BigInt) -> Value {
    let s = x.to_string();
    serde_json::from_str(&s).unwrap_or(Value::String(s))
}

/// `sup_x |a(x) − b(x)|` with missing keys read as zero.
pub fn dinf<K: Ord + Clone, P: Probability, Q: Probability>(a: &Pmf<K, P>, b: &Pmf<K, Q>) -> f64 {
    let mut sup: f64 = 0.0;
    for (k, p) in a.iter() {
        sup = sup.max((p.to_f64() - b.prob(k)).abs());
    }
    for (k, p) in b.iter() {
        if a.get(k).is_none() {
            sup = sup.max(p.to_f64().abs());
        }
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn pmf(v: &[(&'static str, f64)]) -> Pmf<&'static str, f64> {
        let mut p = Pmf::new();
        for (k, x) in v {
            p.add_mass(*k, *x);
        }
        p
    }

    #[test]
    fn dinf_examples() {
        let a = pmf(&[("x", 0.6), ("y", 0.4)]);
        let b = pmf(&[("x", 0.5), ("y", 0.5)]);
        assert_eq!(dinf(&a, &a), 0.0);
        assert!((dinf(&a, &b) - 0.1).abs() < 1e-15);
        let px = pmf(&[("x", 1.0)]);
        let py = pmf(&[("y", 1.0)]);
        assert_eq!(dinf(&px, &py), 1.0);
    }

    #[test]
    fn validate_accounts_for_deficit() {
        let mut a = pmf(&[("x", 0.6), ("y", 0.3)]);
        assert!(a.validate(1e-12).is_err());
        a.set_mass_deficit(0.1);
        assert!(a.validate(1e-12).is_ok());
        let neg = pmf(&[("x", 1.1), ("y", -0.1)]);
        assert!(neg.validate(1e-3).is_err());
    }

    #[test]
    fn exact_json_rows() {
        let mut p: Pmf<Vec<u32>, ExactScalar> = Pmf::new();
        p.add_mass(vec![2, 1], rational(5, 8));
        p.add_mass(vec![3], rational(3, 8));
        assert!(p.is_exact_probability());
        let s = serde_json::to_string(&p.to_exact_json()).unwrap();
        assert_eq!(s, r#"[{"key":[2,1],"p_den":8,"p_num":5},{"key":[3],"p_den":8,"p_num":3}]"#);
        assert!(p.to_csv().starts_with("key,p\n\"[2,1]\",6.25"));
    }
}
