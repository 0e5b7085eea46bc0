//! Integer partitions and signatures.
//!
//! A [`Partition`] is stored densely as its nonzero parts in weakly decreasing
//! order; [`Partition::blocks`] gives the run-length view `(value, count)` used
//! by the growth chain. A [`Signature`] is a weakly decreasing integer tuple of
//! fixed length `k`, entries possibly negative.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// Builds a partition from weakly decreasing parts. Trailing zeros are dropped.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return invalid(format!("parts {parts:?} are not weakly decreasing"));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Partition { parts })
    }

    /// Sorts arbitrary nonnegative parts into a partition.
    pub fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Partition { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<usize> {
        self.parts
    }

    /// `λ_i` with 1-based index; zero beyond the length.
    pub fn part(&self, i: usize) -> usize {
        if i == 0 {
            return usize::MAX;
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn conjugate(&self) -> Partition {
        let width = self.parts.first().copied().unwrap_or(0);
        let mut conj = Vec::with_capacity(width);
        let mut rows = self.parts.len();
        for col in 1..=width {
            while rows > 0 && self.parts[rows - 1] < col {
                rows -= 1;
            }
            conj.push(rows);
        }
        Partition { parts: conj }
    }

    /// `m_i(λ)`, the number of parts equal to `i` (`i ≥ 1`).
    pub fn multiplicity(&self, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        self.parts.iter().filter(|&&p| p == i).count()
    }

    /// Run-length view: `(value, count)` pairs in decreasing order of value.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((v, c)) if *v == p => *c += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// First `k` columns `(λ′_1, …, λ′_k)`, zero padded.
    pub fn columns(&self, k: usize) -> Vec<usize> {
        let conj = self.conjugate();
        (1..=k).map(|i| conj.part(i)).collect()
    }

    /// Diagram containment `μ ⊂ λ`.
    pub fn contains(&self, mu: &Partition) -> bool {
        mu.len() <= self.len() && mu.parts.iter().zip(&self.parts).all(|(m, l)| m <= l)
    }

    /// Adds a box at the end of row `row` (1-based). Returns `None` if the
    /// result is not a partition.
    pub fn add_box(&self, row: usize) -> Option<Partition> {
        if row == 0 || row > self.len() + 1 {
            return None;
        }
        if row > 1 && self.part(row - 1) == self.part(row) {
            return None;
        }
        let mut parts = self.parts.clone();
        if row == parts.len() + 1 {
            parts.push(1);
        } else {
            parts[row - 1] += 1;
        }
        Some(Partition { parts })
    }

    /// All partitions obtained by removing one corner box.
    pub fn remove_corners(&self) -> Vec<Partition> {
        let mut out = Vec::new();
        for i in 0..self.parts.len() {
            if i + 1 == self.parts.len() || self.parts[i] > self.parts[i + 1] {
                let mut parts = self.parts.clone();
                parts[i] -= 1;
                if parts[i] == 0 {
                    parts.pop();
                }
                out.push(Partition { parts });
            }
        }
        out
    }

    /// Signature view of length `k` (zero padded). Fails if `len(λ) > k`.
    pub fn to_signature(&self, k: usize) -> Result<Signature> {
        if self.len() > k {
            return invalid(format!("partition {self} has more than {k} parts"));
        }
        let entries = (1..=k).map(|i| self.part(i) as i64).collect();
        Ok(Signature { entries })
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<usize>::deserialize(d)?;
        if parts.last() == Some(&0) {
            return Err(serde::de::Error::custom("partition has trailing zeros"));
        }
        Partition::new(parts).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    entries: Vec<i64>,
}

impl Signature {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if entries.is_empty() {
            return invalid("signature must have length k >= 1");
        }
        if entries.windows(2).any(|w| w[0] < w[1]) {
            return invalid(format!("entries {entries:?} are not weakly decreasing"));
        }
        Ok(Signature { entries })
    }

    /// The length-zero signature, only meaningful as the bottom of a chain.
    pub fn empty() -> Self {
        Signature { entries: Vec::new() }
    }

    pub(crate) fn from_entries_unchecked(entries: Vec<i64>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0] >= w[1]));
        Signature { entries }
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn size(&self) -> i64 {
        self.entries.iter().sum()
    }

    pub fn last(&self) -> Option<i64> {
        self.entries.last().copied()
    }

    /// `λ + (d[k])`.
    pub fn shift(&self, d: i64) -> Signature {
        Signature { entries: self.entries.iter().map(|e| e + d).collect() }
    }

    /// Converts to a partition if every entry is nonnegative.
    pub fn to_partition(&self) -> Result<Partition> {
        if self.entries.iter().any(|&e| e < 0) {
            return invalid(format!("signature {self} has negative entries"));
        }
        Partition::new(self.entries.iter().map(|&e| e as usize).collect())
    }

    /// All `μ ∈ Sig_{k-1}` with `μ ≺ self`, in lexicographic order.
    pub fn interlacing_below(&self) -> Vec<Signature> {
        let k = self.entries.len();
        if k <= 1 {
            return vec![Signature::empty()];
        }
        let mut out = Vec::new();
        let mut cur = vec![0i64; k - 1];
        fn rec(lam: &[i64], i: usize, cur: &mut Vec<i64>, out: &mut Vec<Signature>) {
            if i == cur.len() {
                out.push(Signature { entries: cur.clone() });
                return;
            }
            for v in lam[i + 1]..=lam[i] {
                cur[i] = v;
                rec(lam, i + 1, cur, out);
            }
        }
        rec(&self.entries, 0, &mut cur, &mut out);
        out
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Signature {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Signature {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<i64>::deserialize(d)?;
        Signature::new(entries).map_err(serde::de::Error::custom)
    }
}

/// `λ′` of a partition.
pub fn conjugate(lambda: &Partition) -> Partition {
    lambda.conjugate()
}

/// `m_i(λ)`.
pub fn multiplicity(lambda: &Partition, i: usize) -> usize {
    lambda.multiplicity(i)
}

/// Interlacing `μ ≺ λ` for partitions: `λ_1 ≥ μ_1 ≥ λ_2 ≥ μ_2 ≥ ⋯`.
pub fn interlaces(mu: &Partition, lambda: &Partition) -> bool {
    if mu.len() > lambda.len() || lambda.len() > mu.len() + 1 {
        return false;
    }
    (1..=lambda.len()).all(|i| lambda.part(i) >= mu.part(i) && mu.part(i) >= lambda.part(i + 1))
}

/// Interlacing for signatures; requires `len(μ) = len(λ) − 1`.
pub fn interlaces_sig(mu: &Signature, lambda: &Signature) -> Result<bool> {
    if mu.k() + 1 != lambda.k() {
        return invalid(format!(
            "interlacing needs len(mu) = len(lambda) - 1, got {} and {}",
            mu.k(),
            lambda.k()
        ));
    }
    let l = lambda.entries();
    let m = mu.entries();
    Ok((0..m.len()).all(|i| l[i] >= m[i] && m[i] >= l[i + 1]))
}

/// All partitions of `n` in reverse lexicographic order.
pub fn partitions_of(n: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        for p in (1..=rem.min(max)).rev() {
            cur.push(p);
            rec(rem - p, p, cur, out);
            cur.pop();
        }
    }
    rec(n, n, &mut cur, &mut out);
    out
}

/// All `ν ⊂ λ`, ordered by size.
pub fn subpartitions(lambda: &Partition) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(lam: &[usize], i: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        out.push(Partition { parts: cur.clone() });
        if i == lam.len() {
            return;
        }
        for v in 1..=lam[i].min(cap) {
            cur.push(v);
            rec(lam, i + 1, v, cur, out);
            cur.pop();
        }
    }
    rec(lambda.parts(), 0, usize::MAX, &mut cur, &mut out);
    out.sort_by_key(|p| p.size());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn s(v: &[i64]) -> Signature {
        Signature::new(v.to_vec()).unwrap()
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(conjugate(&p(&[5, 2, 2, 1])), p(&[4, 3, 1, 1, 1]));
        assert_eq!(conjugate(&p(&[])), p(&[]));
        assert_eq!(conjugate(&p(&[3])), p(&[1, 1, 1]));
    }

    #[test]
    fn conjugate_is_involution_up_to_30() {
        for n in 0..=30 {
            for lam in partitions_of(n) {
                assert_eq!(lam.conjugate().conjugate(), lam);
                assert_eq!(lam.conjugate().size(), n);
            }
        }
    }

    #[test]
    fn multiplicity_examples() {
        assert_eq!(multiplicity(&p(&[5, 2, 2, 1]), 2), 2);
        assert_eq!(multiplicity(&p(&[]), 4), 0);
        assert_eq!(multiplicity(&p(&[3, 3, 3]), 3), 3);
    }

    #[test]
    fn multiplicities_recover_size() {
        for n in 0..=16 {
            for lam in partitions_of(n) {
                let total: usize = (1..=n).map(|i| i * lam.multiplicity(i)).sum();
                assert_eq!(total, n);
                let c = lam.conjugate();
                for i in 1..=n {
                    assert_eq!(lam.multiplicity(i), c.part(i) - c.part(i + 1));
                }
            }
        }
    }

    #[test]
    fn interlacing_examples() {
        assert!(interlaces(&p(&[2, 1]), &p(&[3, 1])));
        assert!(!interlaces(&p(&[3]), &p(&[2, 1])));
        assert!(interlaces(&p(&[]), &p(&[5])));
        assert!(interlaces_sig(&s(&[2]), &s(&[3, 1])).unwrap());
        assert!(!interlaces_sig(&s(&[3]), &s(&[2, 1])).unwrap());
        assert!(interlaces_sig(&Signature::empty(), &s(&[5])).unwrap());
        assert!(interlaces_sig(&s(&[1, 1]), &s(&[3, 1])).is_err());
    }

    #[test]
    fn interlacing_is_horizontal_strip() {
        let all: Vec<Partition> = (0..=12).flat_map(partitions_of).collect();
        for lam in &all {
            for mu in &all {
                let lc = lam.conjugate();
                let mc = mu.conjugate();
                let width = lc.len().max(mc.len());
                let strip = lam.contains(mu)
                    && (1..=width).all(|i| {
                        let d = lc.part(i) as i64 - mc.part(i) as i64;
                        d == 0 || d == 1
                    });
                assert_eq!(interlaces(mu, lam), strip, "mu={mu} lambda={lam}");
            }
        }
    }

    #[test]
    fn blocks_and_columns() {
        let lam = p(&[5, 2, 2, 1]);
        assert_eq!(lam.blocks(), vec![(5, 1), (2, 2), (1, 1)]);
        assert_eq!(lam.columns(2), vec![4, 3]);
        assert_eq!(lam.columns(7), vec![4, 3, 1, 1, 1, 0, 0]);
    }

    #[test]
    fn add_and_remove_boxes() {
        let lam = p(&[2, 2, 1]);
        assert_eq!(lam.add_box(1), Some(p(&[3, 2, 1])));
        assert_eq!(lam.add_box(2), None);
        assert_eq!(lam.add_box(3), Some(p(&[2, 2, 2])));
        assert_eq!(lam.add_box(4), Some(p(&[2, 2, 1, 1])));
        assert_eq!(lam.remove_corners(), vec![p(&[2, 1, 1]), p(&[2, 2])]);
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..=10).map(|n| partitions_of(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
        assert_eq!(subpartitions(&p(&[2, 1])).len(), 5);
    }

    #[test]
    fn signature_rules() {
        assert!(Signature::new(vec![0, 1]).is_err());
        let l = s(&[3, 0]);
        assert_eq!(l.shift(-2), s(&[1, -2]));
        assert_eq!(l.interlacing_below().len(), 4);
        assert_eq!(s(&[2, 2, 1]).interlacing_below(), vec![s(&[2, 1]), s(&[2, 2])]);
    }

    #[test]
    fn json_shapes() {
        assert_eq!(serde_json::to_string(&p(&[3, 1])).unwrap(), "[3,1]");
        assert_eq!(serde_json::to_string(&s(&[1, -2])).unwrap(), "[1,-2]");
        assert!(serde_json::from_str::<Partition>("[1,3]").is_err());
        assert!(serde_json::from_str::<Partition>("[3,0]").is_err());
        let back: Signature = serde_json::from_str("[4,4,-1]").unwrap();
        assert_eq!(back, s(&[4, 4, -1]));
    }
}
