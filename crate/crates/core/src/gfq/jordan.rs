//! Jordan types of nilpotent matrices.
//!
//! [`jordan_type`] follows the definition: ranks of successive powers give the
//! column lengths `rank(A^{i−1}) − rank(A^i)`. [`jordan_type_incremental`]
//! builds a Jordan basis column by column, which costs `O(n³/64)` over `F_2`
//! regardless of the nilpotency index and is what large `n` needs.

use super::matrix::{words_for, MatrixGFq, Storage};
use crate::error::{invalid, Result};
use crate::partition::Partition;

/// `rank(A^i)` for `i = 0, 1, …` up to the first zero power, capped at `max_power`.
pub fn power_ranks(a: &MatrixGFq, max_power: usize) -> Vec<usize> {
    let mut ranks = vec![a.n()];
    let mut p = a.clone();
    for _ in 0..max_power {
        let r = p.rank();
        ranks.push(r);
        if r == 0 {
            break;
        }
        p = p.mul(a);
    }
    ranks
}

/// First `k` column lengths `rank(A^{i−1}) − rank(A^i)`, `i = 1..=k`.
pub fn column_lengths(a: &MatrixGFq, k: usize) -> Result<Vec<usize>> {
    if !a.is_strict() {
        return invalid("column lengths are computed for strictly upper-triangular matrices");
    }
    let ranks = power_ranks(a, k);
    Ok((1..=k).map(|i| ranks.get(i - 1).unwrap_or(&0) - ranks.get(i).unwrap_or(&0)).collect())
}

/// `J(A)` via ranks of powers.
pub fn jordan_type(a: &MatrixGFq) -> Result<Partition> {
    let ranks = power_ranks(a, a.n() + 1);
    if *ranks.last().unwrap_or(&0) != 0 {
        return invalid("matrix is not nilpotent");
    }
    let cols: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).filter(|&c| c > 0).collect();
    Ok(Partition::new(cols)?.conjugate())
}

/// `J(A)` by growing a Jordan basis one column at a time. Requires a strictly
/// upper-triangular matrix, so that column `c` only touches basis vectors `< c`.
pub fn jordan_type_incremental(a: &MatrixGFq) -> Result<Partition> {
    if !a.is_strict() {
        return invalid("incremental Jordan type needs a strictly upper-triangular matrix");
    }
    let lengths = match &a.storage {
        Storage::Bits { .. } => {
            let mut basis = JordanBasisF2::new(a.n());
            for c in 0..a.n() {
                let col: Vec<u64> = column_bits(a, c);
                basis.push_column(&col);
            }
            basis.chain_lengths()
        }
        Storage::Bytes(_) => {
            let mut basis = JordanBasis::new(a.n(), a.field());
            for c in 0..a.n() {
                let col: Vec<u8> = (0..c).map(|r| a.get(r, c)).collect();
                basis.push_column(&col);
            }
            basis.chain_lengths()
        }
    };
    Ok(Partition::from_unsorted(lengths))
}

/// Parity of `popcount(x & y)`.
#[inline]
fn parity_of_and(x: &[u64], y: &[u64]) -> bool {
    let mut acc = [0u64; 4];
    let (xc, yc) = (x.chunks_exact(4), y.chunks_exact(4));
    let (xr, yr) = (xc.remainder(), yc.remainder());
    for (u, v) in xc.zip(yc) {
        for l in 0..4 {
            acc[l] ^= u[l] & v[l];
        }
    }
    let mut folded = acc[0] ^ acc[1] ^ acc[2] ^ acc[3];
    for (u, v) in xr.iter().zip(yr) {
        folded ^= u & v;
    }
    folded.count_ones() & 1 == 1
}

fn column_bits(a: &MatrixGFq, c: usize) -> Vec<u64> {
    let mut col = vec![0u64; words_for(a.n())];
    for r in 0..c {
        if a.get(r, c) == 1 {
            col[r / 64] |= 1 << (r % 64);
        }
    }
    col
}

/// Jordan basis of a nilpotent operator over `F_2` on a growing space.
///
/// Chain `j` has vectors `c_{j,0}` (top) … `c_{j,ℓ−1}` (bottom) with
/// `A c_{j,i} = c_{j,i+1}` and `A c_{j,ℓ−1} = 0`. Only the dual functionals
/// are stored, as bit rows in standard coordinates; row `r` of `rows` has
/// support in coordinates `< dim`.
#[derive(Clone, Debug)]
pub struct JordanBasisF2 {
    words: usize,
    dim: usize,
    /// `chains[j][i]` is the row index of the functional of `c_{j,i}`.
    chains: Vec<Vec<usize>>,
    rows: Vec<u64>,
}

impl JordanBasisF2 {
    pub fn new(capacity: usize) -> Self {
        let words = words_for(capacity);
        JordanBasisF2 { words, dim: 0, chains: Vec::new(), rows: Vec::with_capacity(words * capacity) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn chain_lengths(&self) -> Vec<usize> {
        self.chains.iter().map(Vec::len).collect()
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.rows[r * self.words..(r + 1) * self.words]
    }

    /// `rows[dst] ^= rows[src]` on the first `used` words.
    fn xor_rows(&mut self, dst: usize, src: usize, used: usize) {
        let w = self.words;
        let (d, s) = (dst * w, src * w);
        if d < s {
            let (lo, hi) = self.rows.split_at_mut(s);
            for (x, y) in lo[d..d + used].iter_mut().zip(&hi[..used]) {
                *x ^= y;
            }
        } else {
            let (lo, hi) = self.rows.split_at_mut(d);
            for (x, y) in hi[..used].iter_mut().zip(&lo[s..s + used]) {
                *x ^= y;
            }
        }
    }

    /// Adds basis vector `e_dim` with `A e_dim = a` (bits `< dim`).
    pub fn push_column(&mut self, a: &[u64]) {
        let new = self.dim;
        let used = new.div_ceil(64);
        // coordinates of a in the current basis, one parity per functional
        let a = &a[..used];
        let coord: Vec<bool> = (0..new).map(|r| parity_of_and(&self.row(r)[..used], a)).collect();
        let x = |ch: &Vec<usize>, i: usize| ch.get(i).is_some_and(|&r| coord[r]);
        let hit: Vec<usize> = (0..self.chains.len()).filter(|&j| x(&self.chains[j], 0)).collect();
        // g(w) for each functional, w having coordinates w_{j,i} = x_{j,i+1}
        let mut gw: Vec<bool> = vec![false; new];
        for ch in &self.chains {
            for (i, &r) in ch.iter().enumerate() {
                gw[r] = x(ch, i + 1);
            }
        }
        let star = hit.iter().copied().max_by_key(|&j| (self.chains[j].len(), std::cmp::Reverse(j)));
        if let Some(s) = star {
            for &j in &hit {
                if j == s {
                    continue;
                }
                for i in 0..self.chains[j].len() {
                    let (rj, rs) = (self.chains[j][i], self.chains[s][i]);
                    self.xor_rows(rj, rs, used);
                    gw[rj] ^= gw[rs];
                }
            }
        }
        let (wi, bit) = (new / 64, 1u64 << (new % 64));
        for (r, &g) in gw.iter().enumerate() {
            if g {
                self.rows[r * self.words + wi] |= bit;
            }
        }
        self.rows.extend(std::iter::repeat(0).take(self.words));
        self.rows[new * self.words + wi] |= bit;
        match star {
            Some(s) => self.chains[s].insert(0, new),
            None => self.chains.push(vec![new]),
        }
        self.dim += 1;
    }
}

/// Jordan basis over a general `F_q`; same layout as [`JordanBasisF2`] with
/// byte rows.
#[derive(Clone, Debug)]
pub struct JordanBasis<'f> {
    field: &'f super::FiniteField,
    capacity: usize,
    dim: usize,
    chains: Vec<Vec<usize>>,
    rows: Vec<Vec<u8>>,
}

impl<'f> JordanBasis<'f> {
    pub fn new(capacity: usize, field: &'f super::FiniteField) -> Self {
        JordanBasis { field, capacity, dim: 0, chains: Vec::new(), rows: Vec::new() }
    }

    pub fn chain_lengths(&self) -> Vec<usize> {
        self.chains.iter().map(Vec::len).collect()
    }

    /// Adds `e_dim` with `A e_dim = a` (length `dim`).
    pub fn push_column(&mut self, a: &[u8]) {
        let f = self.field;
        let new = self.dim;
        let dot = |row: &[u8]| row.iter().zip(a).fold(0u8, |acc, (&u, &v)| f.add(acc, f.mul(u, v)));
        let x: Vec<Vec<u8>> = self.chains.iter().map(|ch| ch.iter().map(|&r| dot(&self.rows[r])).collect()).collect();
        let hit: Vec<usize> = (0..self.chains.len()).filter(|&j| x[j][0] != 0).collect();
        let mut gw: Vec<Vec<u8>> = x.iter().map(|xj| (0..xj.len()).map(|i| xj.get(i + 1).copied().unwrap_or(0)).collect()).collect();
        let star = hit.iter().copied().max_by_key(|&j| (self.chains[j].len(), std::cmp::Reverse(j)));
        if let Some(s) = star {
            let inv = f.inv(x[s][0]);
            for &j in &hit {
                if j == s {
                    continue;
                }
                let ratio = f.mul(x[j][0], inv);
                for i in 0..self.chains[j].len() {
                    let (rj, rs) = (self.chains[j][i], self.chains[s][i]);
                    let src = self.rows[rs].clone();
                    for (d, &v) in self.rows[rj].iter_mut().zip(&src) {
                        *d = f.sub_mul(*d, ratio, v);
                    }
                    gw[j][i] = f.sub_mul(gw[j][i], ratio, gw[s][i]);
                }
            }
            for i in 0..self.chains[s].len() {
                let r = self.chains[s][i];
                for v in self.rows[r].iter_mut() {
                    *v = f.mul(*v, inv);
                }
                gw[s][i] = f.mul(gw[s][i], inv);
            }
        }
        for (ch, g) in self.chains.iter().zip(&gw) {
            for (&r, &val) in ch.iter().zip(g) {
                self.rows[r][new] = val;
            }
        }
        let mut top = vec![0u8; self.capacity];
        top[new] = 1;
        self.rows.push(top);
        let top_row = self.rows.len() - 1;
        match star {
            Some(s) => self.chains[s].insert(0, top_row),
            None => self.chains.push(vec![top_row]),
        }
        self.dim += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::super::{enumerate_strict_upper, sample_strict_upper, FiniteField};
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;
    use std::sync::Arc;

    fn gf(q: usize) -> Arc<FiniteField> {
        Arc::new(FiniteField::new(q).unwrap())
    }

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn jordan_examples() {
        let f2 = gf(2);
        assert_eq!(jordan_type(&MatrixGFq::zero(4, f2.clone())).unwrap(), p(&[1, 1, 1, 1]));
        let a = MatrixGFq::from_rows(&[vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]], f2.clone()).unwrap();
        assert_eq!(jordan_type(&a).unwrap(), p(&[3]));
        let b = MatrixGFq::from_rows(&[vec![0, 0, 1], vec![0, 0, 0], vec![0, 0, 0]], f2.clone()).unwrap();
        assert_eq!(jordan_type(&b).unwrap(), p(&[2, 1]));
        let id = MatrixGFq::from_rows(&[vec![1, 0], vec![0, 1]], f2).unwrap();
        assert!(jordan_type(&id).is_err());
    }

    #[test]
    fn brute_force_n3_q2() {
        let mut counts: BTreeMap<Partition, usize> = BTreeMap::new();
        for a in enumerate_strict_upper(3, &gf(2)).unwrap() {
            *counts.entry(jordan_type(&a).unwrap()).or_default() += 1;
        }
        assert_eq!(counts[&p(&[1, 1, 1])], 1);
        assert_eq!(counts[&p(&[2, 1])], 5);
        assert_eq!(counts[&p(&[3])], 2);
    }

    #[test]
    fn enumerated_invariants() {
        for q in [2, 3] {
            for n in 1..=5 {
                if q == 3 && n == 5 {
                    continue;
                }
                for a in enumerate_strict_upper(n, &gf(q)).unwrap() {
                    let ranks = power_ranks(&a, n + 1);
                    let cols: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
                    assert!(ranks.windows(2).all(|w| w[0] >= w[1]));
                    assert!(cols.windows(2).all(|w| w[0] >= w[1]));
                    let j = jordan_type(&a).unwrap();
                    assert_eq!(j.size(), n);
                    assert_eq!(j.conjugate().part(1), n - a.rank());
                    assert_eq!(jordan_type_incremental(&a).unwrap(), j);
                }
            }
        }
    }

    #[test]
    fn incremental_matches_powers_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for q in [2, 3, 4, 5] {
            let f = gf(q);
            for trial in 0..60 {
                let n = 1 + (trial * 7) % 70;
                let a = sample_strict_upper(n, &f, &mut rng);
                assert_eq!(jordan_type_incremental(&a).unwrap(), jordan_type(&a).unwrap(), "q={q} n={n}");
            }
        }
        // sparse matrices produce long chains and many ties
        let f2 = gf(2);
        for trial in 0..40 {
            let n = 20 + trial;
            let mut a = MatrixGFq::zero(n, f2.clone());
            for i in 0..n {
                for j in i + 1..n {
                    if rand::Rng::gen_bool(&mut rng, 0.06) {
                        a.set(i, j, 1);
                    }
                }
            }
            assert_eq!(jordan_type_incremental(&a).unwrap(), jordan_type(&a).unwrap());
        }
    }

    #[test]
    fn column_lengths_are_conjugate_parts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f2 = gf(2);
        for _ in 0..20 {
            let a = sample_strict_upper(30, &f2, &mut rng);
            let j = jordan_type(&a).unwrap();
            assert_eq!(column_lengths(&a, 3).unwrap(), j.columns(3));
        }
    }
}
