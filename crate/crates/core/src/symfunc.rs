//! Hall-Littlewood (`q = 0`) and q-Whittaker (`t = 0`) branching
//! coefficients, chain evaluation of q-Whittaker polynomials, and the
//! Plancherel specialization of Hall-Littlewood `Q` functions.

use std::collections::HashMap;

use num_traits::{FromPrimitive, Num};

use crate::error::Result;
use crate::partition::{interlaces, interlaces_sig, subpartitions, Partition, Signature};
use crate::qseries::q_binomial;
use crate::scalar::{pow, powi, Numeric};

/// Distinct part values of `λ` and `μ` together, each once.
fn part_values(lambda: &Partition, mu: &Partition) -> Vec<usize> {
    let mut vals: Vec<usize> = lambda.parts().iter().chain(mu.parts()).copied().collect();
    vals.sort_unstable();
    vals.dedup();
    vals
}

/// `ψ_{λ/μ}(0,t) = Π_{m_i(μ) = m_i(λ)+1} (1 − t^{m_i(μ)})`; zero unless `μ ≺ λ`.
pub fn hl_psi<T: Num + Clone>(lambda: &Partition, mu: &Partition, t: &T) -> T {
    if !interlaces(mu, lambda) {
        return T::zero();
    }
    let mut acc = T::one();
    for i in part_values(lambda, mu) {
        let (ml, mm) = (lambda.multiplicity(i), mu.multiplicity(i));
        if mm == ml + 1 {
            acc = acc * (T::one() - pow(t, mm));
        }
    }
    acc
}

/// `φ_{λ/μ}(0,t) = Π_{m_i(λ) = m_i(μ)+1} (1 − t^{m_i(λ)})`; zero unless `μ ≺ λ`.
pub fn hl_phi<T: Num + Clone>(lambda: &Partition, mu: &Partition, t: &T) -> T {
    if !interlaces(mu, lambda) {
        return T::zero();
    }
    let mut acc = T::one();
    for i in part_values(lambda, mu) {
        let (ml, mm) = (lambda.multiplicity(i), mu.multiplicity(i));
        if ml == mm + 1 {
            acc = acc * (T::one() - pow(t, ml));
        }
    }
    acc
}

/// `ψ_{λ/μ}(t,0) = Π_{i<k} [λ_i − λ_{i+1} choose λ_i − μ_i]_t`; zero unless `μ ≺ λ`.
pub fn qw_psi<T: Num + Clone>(lambda: &Signature, mu: &Signature, t: &T) -> Result<T> {
    if !interlaces_sig(mu, lambda)? {
        return Ok(T::zero());
    }
    Ok(qw_psi_unchecked(lambda.entries(), mu.entries(), t))
}

fn qw_psi_unchecked<T: Num + Clone>(l: &[i64], m: &[i64], t: &T) -> T {
    let mut acc = T::one();
    for i in 0..m.len() {
        acc = acc * q_binomial(l[i] - l[i + 1], l[i] - m[i], t);
    }
    acc
}

/// Monomial expansion of `P_λ(x_1, …, x_k; t, 0)`:
/// `Σ_terms coeff · Π x_i^{exps_i + shift}`.
#[derive(Clone, Debug)]
pub struct QWhittakerExpansion<T> {
    k: usize,
    shift: i64,
    terms: Vec<(Vec<u32>, T)>,
}

impl<T: Num + Clone> QWhittakerExpansion<T> {
    /// Enumerates interlacing chains of `λ − λ_k`; the shift is restored at evaluation.
    pub fn new(lambda: &Signature, t: &T) -> Self {
        let k = lambda.k();
        let shift = lambda.last().unwrap_or(0);
        let base = lambda.shift(-shift);
        let mut acc: HashMap<Vec<u32>, T> = HashMap::new();
        let mut exps = vec![0u32; k];
        chains(base.entries(), T::one(), &mut exps, t, &mut acc);
        let mut terms: Vec<(Vec<u32>, T)> = acc.into_iter().collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        QWhittakerExpansion { k, shift, terms }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn terms(&self) -> &[(Vec<u32>, T)] {
        &self.terms
    }
}

/// Peels the last variable: `P_λ(x_1..x_j) = Σ_{μ≺λ} ψ x_j^{|λ|−|μ|} P_μ(x_1..x_{j−1})`.
fn chains<T: Num + Clone>(lam: &[i64], w: T, exps: &mut Vec<u32>, t: &T, acc: &mut HashMap<Vec<u32>, T>) {
    let j = lam.len();
    if j == 0 {
        let e = acc.entry(exps.clone()).or_insert_with(T::zero);
        *e = e.clone() + w;
        return;
    }
    if j == 1 {
        exps[0] = lam[0] as u32;
        chains(&[], w, exps, t, acc);
        exps[0] = 0;
        return;
    }
    let lsize: i64 = lam.iter().sum();
    let below = Signature::from_entries_unchecked(lam.to_vec()).interlacing_below();
    for mu in below {
        let m = mu.entries();
        let coeff = qw_psi_unchecked(lam, m, t);
        if coeff.is_zero() {
            continue;
        }
        exps[j - 1] = (lsize - mu.size()) as u32;
        chains(m, w.clone() * coeff, exps, t, acc);
    }
    exps[j - 1] = 0;
}

impl QWhittakerExpansion<f64> {
    /// Evaluates at `x` (length `k`).
    pub fn eval<X: Numeric>(&self, x: &[X]) -> X {
        assert_eq!(x.len(), self.k, "qwhittaker_p: need {} variables", self.k);
        let maxe = self.terms.iter().flat_map(|(e, _)| e.iter().copied()).max().unwrap_or(0) as usize;
        let powers: Vec<Vec<X>> = x
            .iter()
            .map(|&xi| {
                let mut row = Vec::with_capacity(maxe + 1);
                let mut p = X::one();
                for _ in 0..=maxe {
                    row.push(p);
                    p = p * xi;
                }
                row
            })
            .collect();
        self.eval_with_powers(&powers, x)
    }

    /// Evaluates using precomputed `powers[i][e] = x_i^e`.
    pub fn eval_with_powers<X: Numeric>(&self, powers: &[Vec<X>], x: &[X]) -> X {
        let mut sum = X::zero();
        for (e, c) in &self.terms {
            let mut m = X::from_f64(*c);
            for (i, &ei) in e.iter().enumerate() {
                m = m * powers[i][ei as usize];
            }
            sum = sum + m;
        }
        if self.shift != 0 {
            let prod = x.iter().fold(X::one(), |a, &b| a * b);
            sum = sum * powi(prod, self.shift);
        }
        sum
    }
}

/// `P_λ(x_1, …, x_k; t, 0)` for a signature `λ` of length `k = x.len()`.
pub fn qwhittaker_p<X: Numeric>(lambda: &Signature, x: &[X], t: f64) -> X {
    QWhittakerExpansion::new(lambda, &t).eval(x)
}

/// Plancherel weights `w(ν) = (1/|ν|!) Σ_{single-box chains ∅ → ν} Π φ` for
/// every `ν ⊂ λ`, so that `Q_ν(γ(τ); 0, t) = (τ/(1−t))^{|ν|} w(ν)`.
#[derive(Clone, Debug)]
pub struct GammaWeights<T> {
    t: T,
    weights: HashMap<Partition, T>,
}

impl<T: Num + Clone + FromPrimitive> GammaWeights<T> {
    pub fn new(lambda: &Partition, t: &T) -> Self {
        let mut weights: HashMap<Partition, T> = HashMap::new();
        for nu in subpartitions(lambda) {
            if nu.is_empty() {
                weights.insert(nu, T::one());
                continue;
            }
            let mut s = T::zero();
            for prev in nu.remove_corners() {
                let phi = single_box_phi(&nu, &prev, t);
                s = s + phi * weights[&prev].clone();
            }
            let n = T::from_usize(nu.size()).expect("size fits the scalar");
            weights.insert(nu, s / n);
        }
        GammaWeights { t: t.clone(), weights }
    }

    /// `w(ν)`; `None` when `ν ⊄ λ`.
    pub fn weight(&self, nu: &Partition) -> Option<&T> {
        self.weights.get(nu)
    }

    /// `Q_ν(γ(τ); 0, t)` for `ν ⊂ λ`.
    pub fn q_gamma(&self, nu: &Partition, tau: &T) -> Option<T> {
        let c = tau.clone() / (T::one() - self.t.clone());
        self.weights.get(nu).map(|w| pow(&c, nu.size()) * w.clone())
    }

    /// `Q_ν(γ(τ), α(1); 0, t) = Σ_{κ ≺ ν} φ_{ν/κ} Q_κ(γ(τ))` for `ν ⊂ λ`.
    pub fn q_gamma_alpha1(&self, nu: &Partition, tau: &T) -> Option<T> {
        if !self.weights.contains_key(nu) {
            return None;
        }
        let c = tau.clone() / (T::one() - self.t.clone());
        let mut s = T::zero();
        for kappa in horizontal_strips_below(nu) {
            let w = &self.weights[&kappa];
            s = s + hl_phi(nu, &kappa, &self.t) * pow(&c, kappa.size()) * w.clone();
        }
        Some(s)
    }
}

/// `φ` for a single added box: `1 − t^{m_v(ν)}` with `v` the new part value.
fn single_box_phi<T: Num + Clone>(nu: &Partition, prev: &Partition, t: &T) -> T {
    let row = nu.parts().iter().zip(prev.parts().iter().chain(std::iter::repeat(&0))).position(|(a, b)| a != b);
    let v = nu.parts()[row.expect("ν differs from ν⁻")];
    T::one() - pow(t, nu.multiplicity(v))
}

/// All `κ ≺ ν` (ν/κ a horizontal strip).
pub fn horizontal_strips_below(nu: &Partition) -> Vec<Partition> {
    let parts = nu.parts();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(parts.len());
    fn rec(p: &[usize], i: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if i == p.len() {
            out.push(Partition::from_unsorted(cur.clone()));
            return;
        }
        let lo = p.get(i + 1).copied().unwrap_or(0);
        for v in lo..=p[i] {
            cur.push(v);
            rec(p, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(parts, 0, &mut cur, &mut out);
    out
}

/// `Q_λ(γ(τ); 0, t)`.
pub fn hl_q_gamma<T: Num + Clone + FromPrimitive>(lambda: &Partition, tau: &T, t: &T) -> T {
    GammaWeights::new(lambda, t).q_gamma(lambda, tau).expect("λ ⊂ λ")
}

/// `Q_λ(γ(τ), α(1); 0, t)`.
pub fn hl_q_gamma_alpha1<T: Num + Clone + FromPrimitive>(lambda: &Partition, tau: &T, t: &T) -> T {
    GammaWeights::new(lambda, t).q_gamma_alpha1(lambda, tau).expect("λ ⊂ λ")
}
