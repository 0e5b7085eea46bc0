//! The partition-valued growth chain whose law at step `n` is the Jordan type
//! of a uniform strictly upper-triangular `n × n` matrix over `F_q`, `t = 1/q`.
//!
//! From `μ`, a box is added to the first row `ℓ` of a block of equal parts
//! with probability `t^{ℓ−1}(1 − t^{m_{μ_ℓ}(μ)})`, or a new row is appended
//! with probability `t^{len(μ)}`. The weights telescope: the rows up to the end
//! of any block carry mass `1 − t^{r}`, so a step is a geometric draw `G` with
//! `P(G > r) = t^r` followed by a lookup of the block containing row `G`.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::partition::{Partition, Signature};
use crate::pmf::Pmf;
use crate::scalar::{pow, ExactScalar};

/// Default state-space cap for [`exact_distribution`]; `p(40) = 37338`.
pub const DEFAULT_CAP: usize = 40;

/// One-step kernel out of a partition: `(target row ℓ, probability)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionLaw {
    pub from: Partition,
    pub targets: Vec<(usize, ExactScalar)>,
}

impl TransitionLaw {
    pub fn total(&self) -> ExactScalar {
        self.targets.iter().map(|(_, p)| p.clone()).sum()
    }

    /// Targets as partitions.
    pub fn successors(&self) -> Vec<(Partition, ExactScalar)> {
        self.targets
            .iter()
            .map(|(row, p)| (self.from.add_box(*row).expect("first row of a block"), p.clone()))
            .collect()
    }
}

fn check_t(t: &ExactScalar) -> Result<()> {
    if *t <= ExactScalar::zero() || *t >= ExactScalar::one() {
        return invalid(format!("t = {t} must lie in (0, 1)"));
    }
    Ok(())
}

/// The kernel out of `μ`. The appending row uses `m_0 = ∞`, so its factor is 1.
pub fn transition_law(mu: &Partition, t: &ExactScalar) -> Result<TransitionLaw> {
    check_t(t)?;
    let one = ExactScalar::one();
    let mut targets = Vec::new();
    let mut row = 1;
    for (_, count) in mu.blocks() {
        targets.push((row, pow(t, row - 1) * (one.clone() - pow(t, count))));
        row += count;
    }
    targets.push((row, pow(t, mu.len())));
    Ok(TransitionLaw { from: mu.clone(), targets })
}

/// Exact sampler for `G ≥ 1` with `P(G > r) = t^r`, `t = a/b`.
#[derive(Clone, Copy, Debug)]
pub struct GeometricRows {
    a: u64,
    b: u64,
}

impl GeometricRows {
    pub fn new(t: &ExactScalar) -> Result<Self> {
        check_t(t)?;
        let (a, b) = (t.numer().to_u64(), t.denom().to_u64());
        match (a, b) {
            (Some(a), Some(b)) => Ok(GeometricRows { a, b }),
            _ => invalid("t must have a numerator and denominator that fit in 64 bits"),
        }
    }

    pub fn from_q(q: u64) -> Result<Self> {
        if q < 2 {
            return invalid(format!("q = {q} must be at least 2"));
        }
        Ok(GeometricRows { a: 1, b: q })
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.a == 1 && self.b == 2 {
            let mut g = 1;
            loop {
                let w: u64 = rng.gen();
                if w != 0 {
                    return g + w.trailing_zeros() as usize;
                }
                g += 64;
            }
        }
        let mut g = 1;
        while rng.gen_range(0..self.b) < self.a {
            g += 1;
        }
        g
    }
}

/// Run-length state `(value, count)` in decreasing order of value.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChainState {
    blocks: Vec<(usize, usize)>,
    rows: usize,
    size: usize,
}

impl ChainState {
    pub fn new() -> Self {
        ChainState::default()
    }

    pub fn from_partition(p: &Partition) -> Self {
        ChainState { blocks: p.blocks(), rows: p.len(), size: p.size() }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Adds the box selected by row draw `g`.
    #[inline]
    pub fn step(&mut self, g: usize) {
        self.size += 1;
        if g > self.rows {
            self.rows += 1;
            match self.blocks.last_mut() {
                Some((1, c)) => *c += 1,
                _ => self.blocks.push((1, 1)),
            }
            return;
        }
        let mut end = 0;
        let mut b = 0;
        loop {
            end += self.blocks[b].1;
            if g <= end {
                break;
            }
            b += 1;
        }
        let v = self.blocks[b].0;
        if b > 0 && self.blocks[b - 1].0 == v + 1 {
            self.blocks[b - 1].1 += 1;
            self.blocks[b].1 -= 1;
            if self.blocks[b].1 == 0 {
                self.blocks.remove(b);
            }
        } else if self.blocks[b].1 == 1 {
            self.blocks[b].0 += 1;
        } else {
            self.blocks[b].1 -= 1;
            self.blocks.insert(b, (v + 1, 1));
        }
    }

    pub fn to_partition(&self) -> Partition {
        let parts = self.blocks.iter().flat_map(|&(v, c)| std::iter::repeat(v).take(c)).collect();
        Partition::new(parts).expect("blocks are decreasing")
    }

    /// `(λ′_1, …, λ′_k)`.
    pub fn columns(&self, k: usize) -> Vec<usize> {
        let mut out = vec![0; k];
        let mut rows = 0;
        for &(v, c) in &self.blocks {
            rows += c;
            for col in out.iter_mut().take(v.min(k)) {
                *col = rows;
            }
        }
        out
    }
}

/// `λ(σ_n)`: `n` steps from `∅`.
pub fn simulate<R: Rng + ?Sized>(n: usize, rows: &GeometricRows, rng: &mut R) -> Partition {
    let mut s = ChainState::new();
    for _ in 0..n {
        s.step(rows.sample(rng));
    }
    s.to_partition()
}

/// `(λ′_1, …, λ′_k)(σ_n)` via the column process alone: a box lands in column
/// `1 + #{i : λ′_i ≥ G}`, so the first `k` columns move only when `G > λ′_k`.
pub fn simulate_columns<R: Rng + ?Sized>(n: usize, k: usize, rows: &GeometricRows, rng: &mut R) -> Vec<usize> {
    let mut cols = vec![0usize; k];
    for _ in 0..n {
        let g = rows.sample(rng);
        if g > cols[k - 1] {
            let c = cols.iter().take_while(|&&len| len >= g).count();
            cols[c] += 1;
        }
    }
    cols
}

fn split_t(t: &ExactScalar) -> (BigUint, BigUint) {
    let a = t.numer().to_biguint().expect("t > 0");
    let b = t.denom().to_biguint().expect("denominator > 0");
    (a, b)
}

/// Powers `x^0..=x^max`.
fn powers(x: &BigUint, max: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(max + 1);
    let mut p = BigUint::one();
    for _ in 0..=max {
        out.push(p.clone());
        p *= x;
    }
    out
}

fn to_exact_pmf<K: Ord + Clone>(num: HashMap<K, BigUint>, den: &BigUint) -> Pmf<K, ExactScalar> {
    let den = BigInt::from(den.clone());
    let mut pmf = Pmf::new();
    for (k, v) in num {
        pmf.add_mass(k, ExactScalar::new(BigInt::from(v), den.clone()));
    }
    pmf
}

/// Exact law of `λ(σ_n)`. At step `m`, every probability has denominator
/// `b^{m(m−1)/2}` for `t = a/b`, so numerators stay integral.
pub fn exact_distribution(n: usize, t: &ExactScalar, cap: usize) -> Result<Pmf<Partition, ExactScalar>> {
    check_t(t)?;
    if n > cap {
        return Err(Error::CapExceeded { requested: n, cap });
    }
    let (a, b) = split_t(t);
    let (pa, pb) = (powers(&a, n), powers(&b, n));
    let mut level: HashMap<Partition, BigUint> = HashMap::new();
    level.insert(Partition::empty(), BigUint::one());
    let mut den = BigUint::one();
    for m in 0..n {
        let mut next: HashMap<Partition, BigUint> = HashMap::with_capacity(level.len() * 2);
        let mut keys: Vec<&Partition> = level.keys().collect();
        keys.sort();
        for mu in keys {
            let w = &level[mu];
            let mut row = 1;
            for (_, count) in mu.blocks() {
                // t^{ℓ−1}(1 − t^c) = a^{ℓ−1}(b^c − a^c) b^{m−(ℓ−1+c)} / b^m
                let num = &pa[row - 1] * (&pb[count] - &pa[count]) * &pb[m - (row - 1 + count)];
                let nu = mu.add_box(row).expect("first row of a block");
                *next.entry(nu).or_insert_with(BigUint::zero) += w * num;
                row += count;
            }
            let num = &pa[mu.len()] * &pb[m - mu.len()];
            let nu = mu.add_box(row).expect("new row");
            *next.entry(nu).or_insert_with(BigUint::zero) += w * num;
        }
        den *= &pb[m];
        level = next;
    }
    Ok(to_exact_pmf(level, &den))
}

/// Exact law of `(λ′_1, …, λ′_k)(σ_n)` from the column process.
pub fn exact_column_distribution(n: usize, k: usize, t: &ExactScalar) -> Result<Pmf<Signature, ExactScalar>> {
    check_t(t)?;
    if k == 0 {
        return invalid("k must be at least 1");
    }
    let (a, b) = split_t(t);
    let (pa, pb) = (powers(&a, n), powers(&b, n));
    let mut level: HashMap<Vec<usize>, BigUint> = HashMap::new();
    level.insert(vec![0; k], BigUint::one());
    let mut den = BigUint::one();
    for m in 0..n {
        let mut next: HashMap<Vec<usize>, BigUint> = HashMap::with_capacity(level.len() * 2);
        // t^c = a^c b^{m−c} / b^m, valid since every column is at most m
        let tp = |c: usize| &pa[c] * &pb[m - c];
        for (cols, w) in &level {
            let stay = &pb[m] - tp(cols[k - 1]);
            if !stay.is_zero() {
                *next.entry(cols.clone()).or_insert_with(BigUint::zero) += w * stay;
            }
            for i in 0..k {
                // G ∈ (cols[i], cols[i−1]] puts the box in column i+1
                let upper = if i == 0 { BigUint::zero() } else { tp(cols[i - 1]) };
                let lower = tp(cols[i]);
                if lower > upper {
                    let mut c = cols.clone();
                    c[i] += 1;
                    *next.entry(c).or_insert_with(BigUint::zero) += w * (lower - upper);
                }
            }
        }
        den *= &pb[m];
        level = next;
    }
    let g = level.values().fold(den.clone(), |acc, v| acc.gcd(v));
    let keyed: HashMap<Signature, BigUint> =
        level.into_iter().map(|(c, v)| (Signature::new(c.into_iter().map(|x| x as i64).collect()).expect("decreasing"), v / &g)).collect();
    Ok(to_exact_pmf(keyed, &(den / g)))
}

/// Pushforward `λ ↦ (λ′_1, …, λ′_k)`.
pub fn column_projection<P: crate::pmf::Probability>(dist: &Pmf<Partition, P>, k: usize) -> Result<Pmf<Signature, P>> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    Ok(dist.map_keys(|lam| {
        Signature::new(lam.columns(k).into_iter().map(|c| c as i64).collect()).expect("columns decrease")
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::partitions_of;
    use crate::rng::stream;
    use crate::scalar::{inverse_of, rational};

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn s(v: &[i64]) -> Signature {
        Signature::new(v.to_vec()).unwrap()
    }

    #[test]
    fn transition_examples() {
        let t = rational(2, 7);
        let law = transition_law(&p(&[]), &t).unwrap();
        assert_eq!(law.successors(), vec![(p(&[1]), rational(1, 1))]);
        let law = transition_law(&p(&[1]), &t).unwrap();
        assert_eq!(law.successors(), vec![(p(&[2]), rational(5, 7)), (p(&[1, 1]), t.clone())]);
        let law = transition_law(&p(&[2, 1]), &rational(1, 2)).unwrap();
        assert_eq!(
            law.successors(),
            vec![(p(&[3, 1]), rational(1, 2)), (p(&[2, 2]), rational(1, 4)), (p(&[2, 1, 1]), rational(1, 4))]
        );
        assert!(transition_law(&p(&[1]), &rational(1, 1)).is_err());
    }

    #[test]
    fn transitions_normalized_up_to_12() {
        let t = rational(1, 3);
        for n in 0..=12 {
            for mu in partitions_of(n) {
                assert_eq!(transition_law(&mu, &t).unwrap().total(), rational(1, 1));
            }
        }
    }

    #[test]
    fn exact_small_cases() {
        let half = inverse_of(2);
        let d = exact_distribution(3, &half, DEFAULT_CAP).unwrap();
        assert_eq!(d.get(&p(&[3])), Some(&rational(1, 4)));
        assert_eq!(d.get(&p(&[2, 1])), Some(&rational(5, 8)));
        assert_eq!(d.get(&p(&[1, 1, 1])), Some(&rational(1, 8)));
        let t = rational(3, 5);
        let d2 = exact_distribution(2, &t, DEFAULT_CAP).unwrap();
        assert_eq!(d2.get(&p(&[2])), Some(&rational(2, 5)));
        assert_eq!(d2.get(&p(&[1, 1])), Some(&t));
        assert!(matches!(exact_distribution(41, &half, DEFAULT_CAP), Err(Error::CapExceeded { .. })));
        for n in 0..=14 {
            assert!(exact_distribution(n, &t, DEFAULT_CAP).unwrap().is_exact_probability());
        }
    }

    #[test]
    fn exact_equals_forward_kernel_composition() {
        // independent route: propagate with transition_law in exact rationals
        let t = rational(2, 5);
        let mut cur: Pmf<Partition, ExactScalar> = Pmf::point_mass(Partition::empty(), rational(1, 1));
        for n in 1..=9 {
            let mut next = Pmf::new();
            for (mu, w) in cur.iter() {
                for (nu, pr) in transition_law(mu, &t).unwrap().successors() {
                    next.add_mass(nu, w.clone() * pr);
                }
            }
            cur = next;
            assert_eq!(cur, exact_distribution(n, &t, DEFAULT_CAP).unwrap());
        }
    }

    #[test]
    fn column_projection_examples() {
        let half = inverse_of(2);
        let d = exact_distribution(3, &half, DEFAULT_CAP).unwrap();
        let c = column_projection(&d, 1).unwrap();
        assert_eq!(c.get(&s(&[3])), Some(&rational(1, 8)));
        assert_eq!(c.get(&s(&[2])), Some(&rational(5, 8)));
        assert_eq!(c.get(&s(&[1])), Some(&rational(1, 4)));
        let empty: Pmf<Partition, ExactScalar> = Pmf::point_mass(Partition::empty(), rational(1, 1));
        assert_eq!(column_projection(&empty, 1).unwrap().get(&s(&[0])), Some(&rational(1, 1)));
        assert!(c.is_exact_probability());
    }

    #[test]
    fn column_dp_matches_full_projection() {
        for t in [inverse_of(2), inverse_of(3), rational(3, 7)] {
            for n in [0, 1, 5, 12, 18] {
                let full = exact_distribution(n, &t, DEFAULT_CAP).unwrap();
                for k in 1..=3 {
                    let proj = column_projection(&full, k).unwrap();
                    assert_eq!(exact_column_distribution(n, k, &t).unwrap(), proj, "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn chain_state_steps_match_add_box() {
        let mut rng = stream(1, 0);
        let rows = GeometricRows::from_q(3).unwrap();
        let mut st = ChainState::new();
        let mut lam = Partition::empty();
        for _ in 0..400 {
            let g = rows.sample(&mut rng);
            // the first row of the block holding row g, or a new row
            let target = if g > lam.len() {
                lam.len() + 1
            } else {
                let v = lam.part(g);
                (1..=g).find(|&r| lam.part(r) == v).unwrap()
            };
            lam = lam.add_box(target).unwrap();
            st.step(g);
            assert_eq!(st.to_partition(), lam);
            assert_eq!(st.columns(4), lam.columns(4));
        }
    }

    #[test]
    fn geometric_tail_frequencies() {
        let mut rng = stream(5, 0);
        for (rows, t) in [(GeometricRows::from_q(2).unwrap(), 0.5f64), (GeometricRows::new(&rational(2, 5)).unwrap(), 0.4)] {
            let draws = 200_000;
            let mut tail = [0usize; 5];
            for _ in 0..draws {
                let g = rows.sample(&mut rng);
                for (r, c) in tail.iter_mut().enumerate() {
                    if g > r {
                        *c += 1;
                    }
                }
            }
            for (r, &c) in tail.iter().enumerate() {
                let want = t.powi(r as i32);
                let sd = (want * (1.0 - want) / draws as f64).sqrt();
                assert!((c as f64 / draws as f64 - want).abs() <= 4.0 * sd + 1e-12, "r={r}");
            }
        }
    }

    #[test]
    fn simulate_edge_cases() {
        let mut rng = stream(2, 0);
        let rows = GeometricRows::from_q(2).unwrap();
        assert_eq!(simulate(0, &rows, &mut rng), Partition::empty());
        for _ in 0..10 {
            assert_eq!(simulate(1, &rows, &mut rng), p(&[1]));
        }
        assert_eq!(simulate_columns(0, 2, &rows, &mut rng), vec![0, 0]);
    }

    #[test]
    fn simulated_frequencies_match_exact() {
        let half = inverse_of(2);
        let exact = exact_distribution(6, &half, DEFAULT_CAP).unwrap().to_f64();
        let cols = column_projection(&exact, 2).unwrap();
        let rows = GeometricRows::from_q(2).unwrap();
        let mut full: Pmf<Partition, f64> = Pmf::new();
        let mut col: Pmf<Signature, f64> = Pmf::new();
        let draws = 100_000;
        let mut rng = stream(77, 0);
        for _ in 0..draws {
            full.add_mass(simulate(6, &rows, &mut rng), 1.0 / draws as f64);
            let c = simulate_columns(6, 2, &rows, &mut rng);
            col.add_mass(s(&[c[0] as i64, c[1] as i64]), 1.0 / draws as f64);
        }
        // 5 standard errors of a frequency near 1/2
        assert!(crate::pmf::dinf(&full, &exact) < 0.008);
        assert!(crate::pmf::dinf(&col, &cols) < 0.008);
    }
}
