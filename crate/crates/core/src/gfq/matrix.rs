//! Square matrices over `F_q`. Rows are bit-packed into `u64` words when
//! `q = 2` and stored as bytes otherwise.

use std::sync::Arc;

use rand::Rng;

use super::field::FiniteField;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Storage {
    /// `n` rows of `words` little-endian words; bit `j` of row `i` is entry `(i, j)`.
    Bits { words: usize, data: Vec<u64> },
    /// Row-major `n × n` bytes.
    Bytes(Vec<u8>),
}

#[derive(Clone, Debug)]
pub struct MatrixGFq {
    n: usize,
    field: Arc<FiniteField>,
    strict: bool,
    pub(crate) storage: Storage,
}

impl PartialEq for MatrixGFq {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.field.q() == other.field.q() && self.storage == other.storage
    }
}

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

impl MatrixGFq {
    pub fn zero(n: usize, field: Arc<FiniteField>) -> Self {
        let storage = if field.q() == 2 {
            let words = words_for(n);
            Storage::Bits { words, data: vec![0; n * words] }
        } else {
            Storage::Bytes(vec![0; n * n])
        };
        MatrixGFq { n, field, strict: true, storage }
    }

    /// Same matrix forced onto the byte path; used to cross-check the bitset code.
    pub fn to_bytes_storage(&self) -> Self {
        let mut out = MatrixGFq { n: self.n, field: self.field.clone(), strict: self.strict, storage: Storage::Bytes(vec![0; self.n * self.n]) };
        for i in 0..self.n {
            for j in 0..self.n {
                out.set_raw(i, j, self.get(i, j));
            }
        }
        out
    }

    /// Builds from row-major entries `0..q`.
    pub fn from_rows(rows: &[Vec<u8>], field: Arc<FiniteField>) -> Result<Self> {
        let n = rows.len();
        let mut m = MatrixGFq::zero(n, field);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInput(format!("row {i} has length {}, expected {n}", row.len())));
            }
            for (j, &v) in row.iter().enumerate() {
                if v as usize >= m.field.q() {
                    return Err(Error::InvalidInput(format!("entry {v} is not an element of F_{}", m.field.q())));
                }
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn q(&self) -> usize {
        self.field.q()
    }

    /// True iff every entry on or below the diagonal is zero.
    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        match &self.storage {
            Storage::Bits { words, data } => ((data[i * words + j / 64] >> (j % 64)) & 1) as u8,
            Storage::Bytes(d) => d[i * self.n + j],
        }
    }

    fn set_raw(&mut self, i: usize, j: usize, v: u8) {
        match &mut self.storage {
            Storage::Bits { words, data } => {
                let w = &mut data[i * *words + j / 64];
                let bit = 1u64 << (j % 64);
                if v & 1 == 1 {
                    *w |= bit;
                } else {
                    *w &= !bit;
                }
            }
            Storage::Bytes(d) => d[i * self.n + j] = v,
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.set_raw(i, j, v);
        if v != 0 && i >= j {
            self.strict = false;
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.storage {
            Storage::Bits { data, .. } => data.iter().all(|&w| w == 0),
            Storage::Bytes(d) => d.iter().all(|&b| b == 0),
        }
    }

    /// `self · other`.
    pub fn mul(&self, other: &MatrixGFq) -> MatrixGFq {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = MatrixGFq::zero(n, self.field.clone());
        out.storage = match (&self.storage, &other.storage) {
            (Storage::Bits { words, data: a }, Storage::Bits { data: b, .. }) => {
                let w = *words;
                let mut c = vec![0u64; n * w];
                for i in 0..n {
                    let arow = &a[i * w..(i + 1) * w];
                    let crow = &mut c[i * w..(i + 1) * w];
                    for (wi, &word) in arow.iter().enumerate() {
                        let mut bits = word;
                        while bits != 0 {
                            let j = wi * 64 + bits.trailing_zeros() as usize;
                            bits &= bits - 1;
                            for (cw, bw) in crow.iter_mut().zip(&b[j * w..(j + 1) * w]) {
                                *cw ^= bw;
                            }
                        }
                    }
                }
                Storage::Bits { words: w, data: c }
            }
            _ => {
                let f = &self.field;
                let mut c = vec![0u8; n * n];
                for i in 0..n {
                    for l in 0..n {
                        let a = self.get(i, l);
                        if a == 0 {
                            continue;
                        }
                        for j in 0..n {
                            let b = other.get(l, j);
                            if b != 0 {
                                c[i * n + j] = f.add(c[i * n + j], f.mul(a, b));
                            }
                        }
                    }
                }
                Storage::Bytes(c)
            }
        };
        out.strict = self.strict && other.strict;
        out
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        match &self.storage {
            Storage::Bits { words, data } => rank_bits(data.clone(), self.n, *words),
            Storage::Bytes(d) => rank_bytes(d.clone(), self.n, &self.field),
        }
    }

    /// One line per row, entries as base-`q` integers separated by spaces.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

fn rank_bits(mut data: Vec<u64>, n: usize, words: usize) -> usize {
    let mut rank = 0;
    for col in 0..n {
        let (wi, bit) = (col / 64, 1u64 << (col % 64));
        let Some(piv) = (rank..n).find(|&r| data[r * words + wi] & bit != 0) else {
            continue;
        };
        if piv != rank {
            for w in 0..words {
                data.swap(piv * words + w, rank * words + w);
            }
        }
        let (head, tail) = data.split_at_mut((rank + 1) * words);
        let prow = &head[rank * words..];
        for r in tail.chunks_exact_mut(words) {
            if r[wi] & bit != 0 {
                for w in wi..words {
                    r[w] ^= prow[w];
                }
            }
        }
        rank += 1;
    }
    rank
}

fn rank_bytes(mut d: Vec<u8>, n: usize, f: &FiniteField) -> usize {
    let mut rank = 0;
    for col in 0..n {
        let Some(piv) = (rank..n).find(|&r| d[r * n + col] != 0) else {
            continue;
        };
        if piv != rank {
            for j in 0..n {
                d.swap(piv * n + j, rank * n + j);
            }
        }
        let inv = f.inv(d[rank * n + col]);
        for r in rank + 1..n {
            let c = f.mul(d[r * n + col], inv);
            if c == 0 {
                continue;
            }
            for j in col..n {
                d[r * n + j] = f.sub_mul(d[r * n + j], c, d[rank * n + j]);
            }
        }
        rank += 1;
    }
    rank
}

/// Uniform element of `{A : a_{ij} = 0 for i ≥ j}`.
pub fn sample_strict_upper<R: Rng + ?Sized>(n: usize, field: &Arc<FiniteField>, rng: &mut R) -> MatrixGFq {
    let mut m = MatrixGFq::zero(n, field.clone());
    match &mut m.storage {
        Storage::Bits { words, data } => {
            let w = *words;
            for i in 0..n {
                for wi in 0..w {
                    // keep bits j > i
                    let lo = wi * 64;
                    let mask = if i + 1 <= lo {
                        u64::MAX
                    } else if i + 1 >= lo + 64 {
                        0
                    } else {
                        u64::MAX << (i + 1 - lo)
                    };
                    let valid = if lo + 64 <= n { u64::MAX } else if n > lo { (1u64 << (n - lo)) - 1 } else { 0 };
                    if mask & valid != 0 {
                        data[i * w + wi] = rng.gen::<u64>() & mask & valid;
                    }
                }
            }
        }
        Storage::Bytes(d) => {
            // q = 256 wraps to 0: every byte is a field element
            let q = field.q() as u8;
            for i in 0..n {
                for j in i + 1..n {
                    d[i * n + j] = if q == 0 { rng.gen() } else { rng.gen_range(0..q) };
                }
            }
        }
    }
    m
}

/// Maximum number of matrices [`enumerate_strict_upper`] will produce.
pub const ENUMERATION_GUARD: u128 = 1 << 24;

/// Every strictly upper-triangular `n × n` matrix over `F_q`, each once.
pub fn enumerate_strict_upper(n: usize, field: &Arc<FiniteField>) -> Result<impl Iterator<Item = MatrixGFq>> {
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let q = field.q() as u128;
    let count = (0..slots.len()).try_fold(1u128, |acc, _| acc.checked_mul(q).filter(|&c| c <= ENUMERATION_GUARD));
    let Some(count) = count else {
        return Err(Error::GuardExceeded { count: q.saturating_pow(slots.len() as u32), limit: ENUMERATION_GUARD });
    };
    let field = field.clone();
    Ok((0..count).map(move |code| {
        let mut m = MatrixGFq::zero(n, field.clone());
        let mut r = code;
        for &(i, j) in &slots {
            m.set(i, j, (r % q) as u8);
            r /= q;
        }
        m
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(q: usize) -> Arc<FiniteField> {
        Arc::new(FiniteField::new(q).unwrap())
    }

    #[test]
    fn rank_examples() {
        let f2 = gf(2);
        assert_eq!(MatrixGFq::zero(5, f2.clone()).rank(), 0);
        let a = MatrixGFq::from_rows(&[vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]], f2.clone()).unwrap();
        assert_eq!(a.rank(), 2);
        assert!(a.is_strict());
        let b = MatrixGFq::from_rows(&[vec![1, 0], vec![0, 0]], f2).unwrap();
        assert!(!b.is_strict());
        let f3 = gf(3);
        let c = MatrixGFq::from_rows(&[vec![1, 2], vec![2, 1]], f3.clone()).unwrap();
        assert_eq!(c.rank(), 1);
        let d = MatrixGFq::from_rows(&[vec![1, 1], vec![2, 1]], f3).unwrap();
        assert_eq!(d.rank(), 2);
    }

    #[test]
    fn bitset_and_byte_paths_agree() {
        let f2 = gf(2);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..1000 {
            let n = 1 + trial % 64;
            let mut m = MatrixGFq::zero(n, f2.clone());
            // dense random matrices, not only strict ones
            for i in 0..n {
                for j in 0..n {
                    if rng.gen_bool(0.3 + 0.4 * ((trial % 7) as f64 / 7.0)) {
                        m.set(i, j, 1);
                    }
                }
            }
            let bytes = m.to_bytes_storage();
            assert_eq!(m.rank(), bytes.rank(), "trial {trial}");
            let sq = m.mul(&m);
            assert_eq!(sq.to_bytes_storage(), bytes.mul(&bytes));
        }
    }

    #[test]
    fn sampling_support_and_determinism() {
        let f2 = gf(2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(sample_strict_upper(1, &f2, &mut rng).is_zero());
        for n in [2, 63, 64, 65, 130] {
            let m = sample_strict_upper(n, &f2, &mut rng);
            for i in 0..n {
                for j in 0..=i {
                    assert_eq!(m.get(i, j), 0);
                }
            }
        }
        let a = sample_strict_upper(40, &gf(5), &mut ChaCha8Rng::seed_from_u64(11));
        let b = sample_strict_upper(40, &gf(5), &mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(a, b);
        assert!(a.is_strict());
    }

    #[test]
    fn sampling_is_uniform_n3_q2() {
        let f2 = gf(2);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let draws = 100_000usize;
        let mut counts = [0usize; 8];
        for _ in 0..draws {
            let m = sample_strict_upper(3, &f2, &mut rng);
            let code = m.get(0, 1) as usize | (m.get(0, 2) as usize) << 1 | (m.get(1, 2) as usize) << 2;
            counts[code] += 1;
        }
        let e = draws as f64 / 8.0;
        let sd = (draws as f64 * (1.0 / 8.0) * (7.0 / 8.0)).sqrt();
        for c in counts {
            assert!((c as f64 - e).abs() <= 3.0 * sd, "{counts:?}");
        }
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // 99.9% quantile of chi-squared with 7 degrees of freedom
        assert!(chi2 < 24.32, "chi2 = {chi2}");
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_strict_upper(2, &gf(2)).unwrap().count(), 2);
        assert_eq!(enumerate_strict_upper(3, &gf(2)).unwrap().count(), 8);
        assert_eq!(enumerate_strict_upper(3, &gf(3)).unwrap().count(), 27);
        assert_eq!(enumerate_strict_upper(1, &gf(3)).unwrap().count(), 1);
        let all: Vec<MatrixGFq> = enumerate_strict_upper(3, &gf(3)).unwrap().collect();
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                assert_ne!(a, b);
            }
        }
        assert!(matches!(enumerate_strict_upper(8, &gf(2)), Err(Error::GuardExceeded { .. })));
        assert!(enumerate_strict_upper(7, &gf(2)).is_ok());
    }
}
