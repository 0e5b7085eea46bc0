//! The limiting law of the first `k` shifted column lengths.
//!
//! Three independent evaluations: the alternating series over a shift `d`,
//! the explicit one-column formula, and quadrature of the contour integral
//! over the keyhole-shaped contour (two rays `Im w = ±1, Re w ≤ 0` closed by
//! the right unit half-circle).

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::partition::{Partition, Signature};
use crate::qseries::{q_binomial, q_pochhammer_inf, EulerTable};
use crate::quadrature::{gauss_legendre, pairwise_sum, ContourNode, Estimate, Segment};
use crate::scalar::{binom2, in_unit_interval};
use crate::symfunc::{hl_phi, horizontal_strips_below, GammaWeights, QWhittakerExpansion};

const MAX_SERIES_TERMS: i64 = 10_000;

/// A point query `Pr(L = l)` for the law with parameters `(t, χ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitQuery {
    pub t: f64,
    pub chi: f64,
    pub l: Signature,
    pub tol: f64,
}

impl LimitQuery {
    pub fn new(t: f64, chi: f64, l: Signature, tol: f64) -> Result<Self> {
        if !in_unit_interval(t) {
            return invalid(format!("t must lie in (0, 1), got {t}"));
        }
        if !(chi > 0.0 && chi.is_finite()) {
            return invalid(format!("chi must be positive, got {chi}"));
        }
        if !(tol > 0.0) {
            return invalid(format!("tolerance must be positive, got {tol}"));
        }
        if l.k() == 0 {
            return invalid("the signature must have at least one entry");
        }
        Ok(LimitQuery { t, chi, l, tol })
    }

    /// Convenience constructor from raw entries.
    pub fn from_entries(t: f64, chi: f64, l: &[i64], tol: f64) -> Result<Self> {
        Self::new(t, chi, Signature::new(l.to_vec())?, tol)
    }

    pub fn k(&self) -> usize {
        self.l.k()
    }
}

/// Numerically stable `Σ s_i e^{a_i}` given `(sign, log-magnitude)` pairs.
fn signed_log_sum(parts: &[(f64, f64)]) -> (f64, f64) {
    let top = parts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return (0.0, 0.0);
    }
    let signed: f64 = parts.iter().map(|&(s, a)| s * (a - top).exp()).sum();
    let abs: f64 = parts.iter().map(|&(_, a)| (a - top).exp()).sum();
    (signed * top.exp(), abs * top.exp())
}

/// `ln Q_ν(γ(τ), α(1); 0, t)` with `c = τ/(1−t)`, scaled by `c^{|ν|}` internally
/// so that large `c` does not overflow.
fn ln_q_gamma_alpha1(weights: &GammaWeights<f64>, nu: &Partition, c: f64, t: f64) -> f64 {
    let n = nu.size() as i32;
    let mut s = 0.0;
    for kappa in horizontal_strips_below(nu) {
        let w = *weights.weight(&kappa).expect("κ ⊂ ν inside the weight table");
        s += hl_phi(nu, &kappa, &t) * c.powi(kappa.size() as i32 - n) * w;
    }
    n as f64 * c.ln() + s.ln()
}

/// Plancherel weights on the rectangle `((k−1)^rows)`, which contains every
/// `(μ − d)'` the series visits while `μ_1 − d ≤ rows`.
struct WeightTable {
    rows: usize,
    width: usize,
    t: f64,
    weights: GammaWeights<f64>,
}

impl WeightTable {
    fn new(width: usize, rows: usize, t: f64) -> Self {
        let rect = Partition::from_unsorted(vec![width; rows]);
        WeightTable { rows, width, t, weights: GammaWeights::new(&rect, &t) }
    }

    fn ensure(&mut self, rows: usize) {
        if rows > self.rows {
            *self = WeightTable::new(self.width, rows.max(2 * self.rows), self.t);
        }
    }
}

/// Evaluates the alternating series over `d ≤ L_k`.
///
/// Truncation: once `χ t^{d−1} ≥ 1`, the log of the analytic majorant
/// `M(d)` of `|term(d)|` is concave from `d−1` on, so if additionally
/// `M(d−2)/M(d−1) ≤ 1/2` the tail is at most `2 M(d−1)`. The series stops
/// when that bound and the last three computed terms are all below `tol/10`.
pub fn limit_pmf_series(query: &LimitQuery) -> Result<Estimate> {
    let (t, chi, k) = (query.t, query.chi, query.k());
    let l = query.l.entries();
    let lk = l[k - 1];
    let l1 = l[0];
    let euler = EulerTable::new(t, 256);
    let ln_phi = euler.infinite().ln();
    let ln_t = t.ln();

    // μ ≺ L with signed binomial products; sign excludes the (−1)^d factor
    let mus: Vec<(Vec<i64>, f64, f64)> = if k == 1 {
        let sign = if query.l.size().rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        vec![(Vec::new(), sign, 0.0)]
    } else {
        query
            .l
            .interlacing_below()
            .into_iter()
            .map(|mu| {
                let m = mu.entries().to_vec();
                let coeff: f64 = (0..k - 1).map(|i| q_binomial(l[i] - l[i + 1], l[i] - m[i], &t)).product();
                let parity = (query.l.size() - mu.size()).rem_euclid(2);
                let sign = if parity == 0 { 1.0 } else { -1.0 };
                (m, sign, coeff.ln())
            })
            .collect()
    };
    let ln_gaps: f64 = (0..k - 1).map(|i| euler.get((l[i] - l[i + 1]) as usize).ln()).sum();
    let fixed = -ln_phi - ln_gaps;

    let ln_majorant = |d: i64| -> f64 {
        let c = chi * t.powi(d as i32);
        let quad: f64 = l.iter().map(|&li| binom2(li - d) as f64).sum::<f64>() * ln_t;
        let q_growth = (k - 1) as f64 * (l1 - d) as f64 * c.ln().max(0.0);
        fixed - c + quad - (k as f64) * ln_phi + (mus.len() as f64).ln() + (k - 1) as f64 * 2f64.ln() + q_growth
    };
    let concave_from = |d: i64| -> bool {
        let c = chi * t.powi(d as i32);
        let q = 1.0 / t;
        c >= 1.0 && c * (q - 1.0).powi(2) > (k as f64 - 2.0) * q.ln()
    };

    let mut table = if k > 1 { Some(WeightTable::new(k - 1, (l1 - lk + 8) as usize, t)) } else { None };
    let mut terms: Vec<f64> = Vec::new();
    let mut abs_total = 0.0;
    let guard = query.tol / 10.0;
    for step in 0..MAX_SERIES_TERMS {
        let d = lk - step;
        let c = chi * t.powi(d as i32);
        let pref = fixed - c + l.iter().map(|&li| binom2(li - d) as f64).sum::<f64>() * ln_t
            - euler.get((lk - d) as usize).ln();
        let d_sign = if d.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let parts: Vec<(f64, f64)> = match table.as_mut() {
            None => vec![(mus[0].1 * d_sign, pref)],
            Some(tab) => {
                tab.ensure((l1 - d) as usize);
                mus.iter()
                    .map(|(m, sign, ln_coeff)| {
                        let shifted: Vec<usize> = m.iter().map(|&x| (x - d) as usize).collect();
                        let nu = Partition::from_unsorted(shifted).conjugate();
                        let ln_q = ln_q_gamma_alpha1(&tab.weights, &nu, c, t);
                        (sign * d_sign, pref + ln_coeff + ln_q)
                    })
                    .collect()
            }
        };
        let (term, abs) = signed_log_sum(&parts);
        terms.push(term);
        abs_total += abs;
        let n = terms.len();
        if n >= 3 && terms[n - 3..].iter().all(|x| x.abs() < guard) && concave_from(d - 1) {
            let (m1, m2) = (ln_majorant(d - 1), ln_majorant(d - 2));
            if m2 - m1 <= -std::f64::consts::LN_2 && m1.exp() < guard {
                let value = pairwise_sum(&terms);
                let error = 2.0 * m1.exp() + 64.0 * f64::EPSILON * abs_total;
                return Ok(Estimate { value, error });
            }
        }
    }
    Err(Error::NonConvergence { what: "limit series", achieved: f64::INFINITY, tol: query.tol })
}

/// The explicit one-column law, written with `q = 1/t`:
/// `Σ_{m ≥ 0} e^{−χ q^{m−x}} (−1)^m q^{−binom(m,2)} / Π_{j ≤ m}(1 − q^{−j})`,
/// divided by `Π_{i ≥ 1}(1 − q^{−i})`.
pub fn limit_pmf_k1(t: f64, chi: f64, x: i64, tol: f64) -> Result<Estimate> {
    if !in_unit_interval(t) {
        return invalid(format!("t must lie in (0, 1), got {t}"));
    }
    if !(chi > 0.0) {
        return invalid(format!("chi must be positive, got {chi}"));
    }
    let q = 1.0 / t;
    let mut norm = 1.0;
    let mut qi = q;
    while 1.0 / qi > 1e-18 {
        norm *= 1.0 - 1.0 / qi;
        qi *= q;
    }
    let mut terms = Vec::new();
    let mut abs_total = 0.0;
    let mut denom = 1.0;
    for m in 0..MAX_SERIES_TERMS {
        if m > 0 {
            denom *= 1.0 - q.powi(-(m as i32));
        }
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let magnitude = q.powf(-(binom2(m) as f64)) / denom / norm;
        let term = sign * (-chi * q.powf((m - x) as f64)).exp() * magnitude;
        terms.push(term);
        abs_total += term.abs();
        // |term(m')| ≤ q^{−binom(m',2)}/(norm²), and the ratio of successive bounds is q^{−m'}
        let next_bound = q.powf(-(binom2(m + 1) as f64)) / (norm * norm);
        if next_bound < tol / 10.0 && q.powi(-(m as i32 + 1)) <= 0.5 {
            let value = pairwise_sum(&terms);
            return Ok(Estimate { value, error: 2.0 * next_bound + 64.0 * f64::EPSILON * abs_total });
        }
    }
    Err(Error::NonConvergence { what: "one-column limit formula", achieved: f64::INFINITY, tol })
}

/// Discretization of the contour used by [`limit_pmf_contour`].
#[derive(Clone, Debug, PartialEq)]
pub struct ContourSpec {
    /// Rays run from `Re w = 0` to `Re w = −ray_length`; `None` picks the
    /// length from the `e^{χ t^{L_k} Re w}` decay.
    pub ray_length: Option<f64>,
    /// Initial Gauss-Legendre nodes per panel.
    pub nodes: usize,
    /// Node budget per panel; doubling stops here.
    pub max_nodes: usize,
    /// How the contour closes to the right of the poles.
    pub closing: Closing,
}

/// Right-hand closing piece of the contour. Both enclose the same
/// singularities, so they give the same integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Closing {
    /// The right unit half-circle from `−i` to `i`, rays leaving from `±i`.
    /// `|e^{χ t^{L_k} w}|` reaches `e^{χ t^{L_k}}` at `w = 1`, so the sum
    /// cancels badly when that rate is large.
    HalfCircle,
    /// The segment `Re w = c` with `c = 0` for one column and
    /// `c = min(1, 1/rate)` otherwise, keeping the integrand `O(rate)`.
    Vertical,
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec { ray_length: None, nodes: 16, max_nodes: 256, closing: Closing::Vertical }
    }
}

/// Counterclockwise panels: the closing piece from `−i` to `i` (through
/// `crossing` on the real axis), the upper ray out to `−R + i`, and the
/// lower ray back from `−R − i`. The half-circle always crosses at `1` and
/// its rays start at `Re w = 0`.
///
/// The integrands have poles at `−t^{−j}`, one unit below the rays. Ray
/// breakpoints sit at every such pole and panels double in length moving
/// away from it, so each panel is no longer than its distance to the
/// nearest pole plus one. The closing segment is graded toward the real
/// axis on the scale of `crossing`.
pub fn contour_segments(ray_length: f64, t: f64, closing: Closing, crossing: f64) -> Vec<Segment> {
    let ray_start = match closing {
        Closing::HalfCircle => 0.0,
        Closing::Vertical => crossing,
    };
    // positions along the rays as s = −Re w
    let mut poles = vec![-ray_start];
    let mut p = 1.0;
    while p < ray_length {
        poles.push(p);
        p /= t;
    }
    poles.push(ray_length);
    let mut breaks = Vec::new();
    let last = poles.len() - 2;
    for (i, w) in poles.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        breaks.push(a);
        // the far end of the last interval is the ray cutoff, not a pole
        let mid = if i == last { b } else { 0.5 * (a + b) };
        let mut h = 1.0;
        while a + h < mid {
            breaks.push(a + h);
            h *= 2.0;
        }
        if i != last {
            let mut down = Vec::new();
            let mut h = 1.0;
            while b - h > mid {
                down.push(b - h);
                h *= 2.0;
            }
            down.push(mid);
            breaks.extend(down.into_iter().rev());
        }
    }
    breaks.push(ray_length);
    breaks.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    let breaks: Vec<f64> = breaks.into_iter().map(|x| -x).collect();

    let mut segs = Vec::new();
    match closing {
        Closing::HalfCircle => {
            segs.push(Segment::Arc { radius: 1.0, from: -PI / 2.0, to: 0.0 });
            segs.push(Segment::Arc { radius: 1.0, from: 0.0, to: PI / 2.0 });
        }
        Closing::Vertical => {
            let mut heights = vec![0.0];
            let mut h = crossing.clamp(1.0 / 64.0, 1.0);
            while h < 1.0 {
                heights.push(h);
                h *= 2.0;
            }
            heights.push(1.0);
            for p in heights.windows(2).rev() {
                segs.push(Segment::Vertical { re: crossing, from: -p[1], to: -p[0] });
            }
            for p in heights.windows(2) {
                segs.push(Segment::Vertical { re: crossing, from: p[0], to: p[1] });
            }
        }
    }
    for p in breaks.windows(2) {
        segs.push(Segment::Horizontal { height: 1.0, from: p[0], to: p[1] });
    }
    for p in breaks.windows(2).rev() {
        segs.push(Segment::Horizontal { height: -1.0, from: p[1], to: p[0] });
    }
    segs
}

/// Where the contour crosses the positive real axis. One column has no
/// singularity at the origin, so the crossing sits there; otherwise it
/// must stay right of the poles accumulating at `0⁻` and is kept within
/// `1/rate` so `|e^{rate·w}|` stays bounded.
fn crossing_point(k: usize, rate: f64) -> f64 {
    if k == 1 {
        0.0
    } else {
        (1.0 / rate).min(1.0)
    }
}

fn contour_nodes(ray_length: f64, t: f64, closing: Closing, crossing: f64, per_panel: usize) -> Vec<ContourNode> {
    let rule = gauss_legendre(per_panel);
    contour_segments(ray_length, t, closing, crossing).iter().flat_map(|s| s.nodes(&rule)).collect()
}

/// `Σ_j t^{binom(j+1,2)} [L_{k−1}−L_k choose j]_t P_{(L_1−L_k, …, L_{k−1}−L_k, j)}`
/// as a monomial list with absolute exponents.
fn contour_polynomial(l: &[i64], t: f64) -> Vec<(Vec<u32>, f64)> {
    let k = l.len();
    let lk = l[k - 1];
    let top = l[k - 2] - lk;
    let mut out: Vec<(Vec<u32>, f64)> = Vec::new();
    for j in 0..=top {
        let mut entries: Vec<i64> = l[..k - 1].iter().map(|&x| x - lk).collect();
        entries.push(j);
        let sig = Signature::new(entries).expect("decreasing by construction");
        let scale = t.powi(binom2(j + 1) as i32) * q_binomial(top, j, &t);
        let exp = QWhittakerExpansion::new(&sig, &t);
        let shift = exp.shift() as u32;
        for (e, c) in exp.terms() {
            out.push((e.iter().map(|&x| x + shift).collect(), c * scale));
        }
    }
    out
}

/// Quadrature of the contour-integral representation, `k ≤ 3`.
///
/// Nodes per panel double from `spec.nodes` until two successive results
/// differ by less than `tol/2`. The reported error adds that difference,
/// an estimate of the truncated ray tails, and a roundoff term scaled by
/// `Σ|integrand|`, which flags cancellation for very negative `L_k`.
pub fn limit_pmf_contour(query: &LimitQuery, spec: &ContourSpec) -> Result<Estimate> {
    let (t, chi, k) = (query.t, query.chi, query.k());
    if k > 3 {
        return invalid(format!("contour quadrature supports k ≤ 3, got k = {k}"));
    }
    let l = query.l.entries();
    let rate = chi * t.powi(l[k - 1] as i32);
    let margin = (1.0 / query.tol).ln() + 10.0;
    let ray = spec.ray_length.unwrap_or_else(|| (margin / rate).max(8.0));
    let tail = (-rate * ray).exp();
    let mut n = spec.nodes.max(2);
    let mut prev = contour_sum(query, ray, spec.closing, n);
    loop {
        n *= 2;
        let cur = contour_sum(query, ray, spec.closing, n);
        let diff = (cur.0 - prev.0).abs();
        let error = diff + k as f64 * tail * cur.1 + 64.0 * f64::EPSILON * cur.1;
        if diff < query.tol / 2.0 {
            return Ok(Estimate { value: cur.0, error });
        }
        if n * 2 > spec.max_nodes {
            return Err(Error::NonConvergence { what: "contour quadrature", achieved: error, tol: query.tol });
        }
        prev = cur;
    }
}

/// `(value, Σ|terms|)` of the contour integral with `per_panel` nodes.
fn contour_sum(query: &LimitQuery, ray: f64, closing: Closing, per_panel: usize) -> (f64, f64) {
    let (t, chi, k) = (query.t, query.chi, query.k());
    let l = query.l.entries();
    let a = chi * t.powi(l[k - 1] as i32);
    let nodes = contour_nodes(ray, t, closing, crossing_point(k, a), per_panel);
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    if k == 1 {
        let vals: Vec<Complex64> = nodes
            .par_iter()
            .map(|nd| (a * nd.z).exp() / q_pochhammer_inf(-nd.z, t) * nd.dz)
            .collect();
        let abs: f64 = vals.iter().map(|v| v.norm()).sum();
        let total = pairwise_sum(&vals) / two_pi_i;
        return (total.re, abs / (2.0 * PI));
    }

    let euler = EulerTable::new(t, 256);
    let lk = l[k - 1];
    let mut pref = euler.infinite().powi(k as i32 - 1) / (1..=k).product::<usize>() as f64;
    for i in 0..k - 1 {
        pref *= t.powi(binom2(l[i] - lk) as i32) / euler.get((l[i] - l[i + 1]) as usize);
    }
    let poly = contour_polynomial(l, t);
    let max_e = poly.iter().flat_map(|(e, _)| e.iter().copied()).max().unwrap_or(0) as usize;

    // per-node factors: e^{a w} dw / (w (−1/w;t)_∞ (−tw;t)_∞) and powers of 1/w
    let base: Vec<Complex64> = nodes
        .par_iter()
        .map(|nd| {
            let w = nd.z;
            let den = q_pochhammer_inf(-w.inv(), t) * q_pochhammer_inf(-w * t, t);
            (a * w).exp() / den * nd.dz / w
        })
        .collect();
    let powers: Vec<Vec<Complex64>> = nodes
        .iter()
        .map(|nd| {
            let x = nd.z.inv();
            let mut row = Vec::with_capacity(max_e + 1);
            let mut p = Complex64::new(1.0, 0.0);
            for _ in 0..=max_e {
                row.push(p);
                p *= x;
            }
            row
        })
        .collect();
    let m = nodes.len();
    let eval_poly = |idx: &[usize]| -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (e, c) in &poly {
            let mut mono = Complex64::new(*c, 0.0);
            for (i, &ei) in e.iter().enumerate() {
                mono *= powers[idx[i]][ei as usize];
            }
            s += mono;
        }
        s
    };
    let cross = |idx: &[usize]| -> Complex64 {
        let mut p = Complex64::new(1.0, 0.0);
        for i in 0..idx.len() {
            for j in 0..idx.len() {
                if i != j {
                    p *= q_pochhammer_inf(nodes[idx[i]].z / nodes[idx[j]].z, t);
                }
            }
        }
        p
    };
    let rows: Vec<(Complex64, f64)> = (0..m)
        .into_par_iter()
        .map(|i0| {
            let mut vals = Vec::new();
            let mut idx = vec![i0; k];
            let inner = |idx: &[usize], vals: &mut Vec<Complex64>| {
                let b: Complex64 = idx.iter().map(|&i| base[i]).product();
                vals.push(b * cross(idx) * eval_poly(idx));
            };
            if k == 2 {
                for i1 in 0..m {
                    idx[1] = i1;
                    inner(&idx, &mut vals);
                }
            } else {
                for i1 in 0..m {
                    for i2 in 0..m {
                        idx[1] = i1;
                        idx[2] = i2;
                        inner(&idx, &mut vals);
                    }
                }
            }
            let abs: f64 = vals.iter().map(|v| v.norm()).sum();
            (pairwise_sum(&vals), abs)
        })
        .collect();
    let sums: Vec<Complex64> = rows.iter().map(|r| r.0).collect();
    let abs: f64 = rows.iter().map(|r| r.1).sum();
    let scale = pref / (2.0 * PI).powi(k as i32);
    let total = pairwise_sum(&sums) * pref / two_pi_i.powi(k as i32);
    (total.re, abs * scale)
}

/// All signatures of length `k` with entries in `[lo, hi]`, lexicographically.
pub fn signatures_in_window(k: usize, lo: i64, hi: i64) -> Vec<Signature> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(k: usize, lo: i64, hi: i64, cur: &mut Vec<i64>, out: &mut Vec<Signature>) {
        if cur.len() == k {
            out.push(Signature::new(cur.clone()).expect("decreasing by construction"));
            return;
        }
        let top = cur.last().copied().unwrap_or(hi);
        for v in lo..=top {
            cur.push(v);
            rec(k, lo, hi, cur, out);
            cur.pop();
        }
    }
    if k > 0 && lo <= hi {
        rec(k, lo, hi, &mut cur, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(t: f64, chi: f64, l: &[i64]) -> f64 {
        limit_pmf_series(&LimitQuery::from_entries(t, chi, l, 1e-14).unwrap()).unwrap().value
    }

    #[test]
    fn rejects_non_signatures_and_bad_parameters() {
        assert!(LimitQuery::from_entries(0.5, 1.0, &[0, 1], 1e-12).is_err());
        assert!(LimitQuery::from_entries(1.5, 1.0, &[0], 1e-12).is_err());
        assert!(LimitQuery::from_entries(0.5, -1.0, &[0], 1e-12).is_err());
        assert!(limit_pmf_k1(0.5, 0.0, 0, 1e-12).is_err());
    }

    #[test]
    fn k1_series_matches_explicit_formula() {
        for t in [0.5, 1.0 / 3.0] {
            for chi in [0.5, 1.0, 2.0] {
                for x in -3..=8 {
                    let s = series(t, chi, &[x]);
                    let e = limit_pmf_k1(t, chi, x, 1e-14).unwrap().value;
                    assert!((s - e).abs() < 1e-12, "t={t} chi={chi} x={x}: {s} vs {e}");
                }
            }
        }
    }

    #[test]
    fn k1_normalization() {
        let total: f64 = (-10..=40).map(|x| series(0.5, 1.0, &[x])).sum();
        assert!((total - 1.0).abs() < 1e-10, "{total}");
        let p: Vec<f64> = (-10..=40).map(|x| series(0.5, 1.0, &[x])).collect();
        assert!(p.iter().all(|&v| v > -1e-14));
    }

    #[test]
    fn chi_shift_covariance() {
        for t in [0.5, 1.0 / 3.0] {
            for chi in [0.5, 1.0, 2.0] {
                for l in [vec![0], vec![3], vec![-2], vec![1, 0], vec![2, -1], vec![1, 1, 0]] {
                    let a = series(t, t * chi, &l);
                    let shifted: Vec<i64> = l.iter().map(|x| x + 1).collect();
                    let b = series(t, chi, &shifted);
                    assert!((a - b).abs() < 1e-12, "t={t} chi={chi} l={l:?}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn k2_marginal_is_k1() {
        let (t, chi) = (0.5, 1.0);
        for l1 in -2..=5 {
            let mut total = 0.0;
            let mut l2 = l1;
            loop {
                let p = series(t, chi, &[l1, l2]);
                total += p;
                if l2 < l1 - 3 && p.abs() < 1e-18 {
                    break;
                }
                l2 -= 1;
            }
            let marginal = series(t, chi, &[l1]);
            assert!((total - marginal).abs() < 1e-8, "l1={l1}: {total} vs {marginal}");
        }
    }

    #[test]
    fn k1_explicit_tail_and_shift() {
        for x in -3..=8 {
            let a = limit_pmf_k1(0.5, 0.5, x, 1e-14).unwrap().value;
            let b = limit_pmf_k1(0.5, 1.0, x + 1, 1e-14).unwrap().value;
            assert!((a - b).abs() < 1e-12);
        }
        let tail: Vec<f64> = (-12..=-4).map(|x| limit_pmf_k1(0.5, 1.0, x, 1e-14).unwrap().value).collect();
        assert!(tail.windows(2).all(|p| p[0] <= p[1]));
        assert!(tail[0] < 1e-100);
    }

    #[test]
    fn k1_contour_matches_explicit() {
        // t = 1/3 puts poles off the dyadic grid; x = −3, χ = 2 gives rate 54
        for (t, chi) in [(0.5, 1.0), (1.0 / 3.0, 1.0), (1.0 / 3.0, 2.0), (0.5, 0.5)] {
            for x in -3..=8 {
                let q = LimitQuery::from_entries(t, chi, &[x], 1e-10).unwrap();
                let c = limit_pmf_contour(&q, &ContourSpec::default()).unwrap();
                let e = limit_pmf_k1(t, chi, x, 1e-14).unwrap().value;
                assert!((c.value - e).abs() < 1e-9 && c.error < 1e-9, "t={t} chi={chi} x={x}: {c:?} vs {e}");
            }
        }
    }

    #[test]
    fn half_circle_and_vertical_closings_agree() {
        let half = ContourSpec { closing: Closing::HalfCircle, ..ContourSpec::default() };
        for l in [vec![0], vec![3], vec![-1], vec![1, 0], vec![2, 1]] {
            let q = LimitQuery::from_entries(0.5, 1.0, &l, 1e-9).unwrap();
            let a = limit_pmf_contour(&q, &half).unwrap().value;
            let b = limit_pmf_contour(&q, &ContourSpec::default()).unwrap().value;
            assert!((a - b).abs() < 1e-8, "{l:?}: {a} vs {b}");
        }
    }

    #[test]
    fn k1_contour_node_doubling_is_stable() {
        let q = LimitQuery::from_entries(0.5, 1.0, &[1], 1e-12).unwrap();
        let ray = (1e12f64.ln() + 10.0) / 0.5;
        let a = contour_sum(&q, ray, Closing::Vertical, 32).0;
        let b = contour_sum(&q, ray, Closing::Vertical, 64).0;
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }

    #[test]
    fn k2_contour_matches_series() {
        for l in [[0, 0], [1, 0], [1, 1], [2, 0]] {
            let q = LimitQuery::from_entries(0.5, 1.0, &l, 1e-8).unwrap();
            let c = limit_pmf_contour(&q, &ContourSpec { nodes: 8, ..ContourSpec::default() }).unwrap();
            let s = series(0.5, 1.0, &l);
            assert!((c.value - s).abs() < 1e-6, "l={l:?}: {} vs {s}", c.value);
        }
    }

    #[test]
    fn window_enumeration() {
        assert_eq!(signatures_in_window(1, -1, 1).len(), 3);
        assert_eq!(signatures_in_window(2, 0, 2).len(), 6);
        assert!(signatures_in_window(2, 0, 2).iter().all(|s| s.entries()[0] >= s.entries()[1]));
    }
}
