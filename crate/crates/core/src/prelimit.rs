//! Finite-`n` and Poissonized column laws as torus integrals, and the
//! residues picked up when the `k`-th contour is shrunk past `−t^v`.
//!
//! On a circle of radius `c`, `(1/2πi)∮ F(z) dz/z` is the mean of `F` over
//! equally spaced nodes, so every integral here is a trapezoid mean.

use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::partition::{Partition, Signature};
use crate::qseries::{q_binomial, q_pochhammer, q_pochhammer_inf, EulerTable};
use crate::quadrature::{circle_nodes, pairwise_sum, Estimate};
use crate::scalar::{binom2, in_unit_interval, pow, ExactScalar};
use crate::symfunc::QWhittakerExpansion;

/// Trapezoid rule on the torus `(c𝕋)^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusQuad {
    /// Radius `c` of every circle.
    pub radius: f64,
    /// Initial nodes per circle; doubled until stable.
    pub nodes: usize,
    /// Largest node count per circle.
    pub max_nodes: usize,
}

impl Default for TorusQuad {
    fn default() -> Self {
        TorusQuad { radius: 1.5, nodes: 64, max_nodes: 4096 }
    }
}

/// Total integrand evaluations allowed per refinement level.
const EVALUATION_BUDGET: usize = 1 << 24;

/// `(mean of f, mean of |f|)` over the `m^k` torus grid.
fn torus_mean<F>(k: usize, radius: f64, m: usize, f: &F) -> (Complex64, f64)
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    let nodes = circle_nodes(radius, m);
    if k == 0 {
        let v = f(&[]);
        return (v, v.norm());
    }
    let rows: Vec<(Complex64, f64)> = (0..m)
        .into_par_iter()
        .map(|i0| {
            let inner = m.pow(k as u32 - 1);
            let mut vals = Vec::with_capacity(inner);
            let mut z = vec![nodes[i0]; k];
            for flat in 0..inner {
                let mut r = flat;
                for slot in z.iter_mut().skip(1) {
                    *slot = nodes[r % m];
                    r /= m;
                }
                vals.push(f(&z));
            }
            let abs: f64 = vals.iter().map(|v| v.norm()).sum();
            (pairwise_sum(&vals), abs)
        })
        .collect();
    let sums: Vec<Complex64> = rows.iter().map(|r| r.0).collect();
    let total = m.pow(k as u32) as f64;
    let abs: f64 = rows.iter().map(|r| r.1).sum();
    (pairwise_sum(&sums) / total, abs / total)
}

/// Doubles the node count until two successive means differ by less than `tol/2`.
fn torus_integrate<F>(k: usize, quad: &TorusQuad, tol: f64, f: F) -> Result<Estimate>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    if !(quad.radius > 0.0) || quad.nodes < 2 {
        return invalid("torus quadrature needs a positive radius and at least 2 nodes");
    }
    let mut m = quad.nodes;
    let (mut prev, _) = torus_mean(k, quad.radius, m, &f);
    loop {
        let next = 2 * m;
        if next > quad.max_nodes || next.saturating_pow(k as u32) > EVALUATION_BUDGET {
            let achieved = f64::INFINITY;
            return Err(Error::NonConvergence { what: "torus quadrature", achieved, tol });
        }
        m = next;
        let (cur, abs) = torus_mean(k, quad.radius, m, &f);
        let diff = (cur - prev).norm();
        if diff < tol / 2.0 {
            return Ok(Estimate { value: cur.re, error: diff + 64.0 * f64::EPSILON * abs });
        }
        prev = cur;
    }
}

/// `Π_{i ≠ j} (z_i/z_j; t)_∞`.
fn cross_product(z: &[Complex64], t: f64) -> Complex64 {
    let mut p = Complex64::one();
    for (i, zi) in z.iter().enumerate() {
        for (j, zj) in z.iter().enumerate() {
            if i != j {
                p *= q_pochhammer_inf(zi / zj, t);
            }
        }
    }
    p
}

/// Weighted sum of q-Whittaker expansions as one monomial list with
/// absolute exponents (shifts folded in).
fn combined_polynomial(pieces: &[(Signature, f64)], t: f64) -> Vec<(Vec<i64>, f64)> {
    let mut out = Vec::new();
    for (sig, scale) in pieces {
        if *scale == 0.0 {
            continue;
        }
        let exp = QWhittakerExpansion::new(sig, &t);
        for (e, c) in exp.terms() {
            out.push((e.iter().map(|&x| x as i64 + exp.shift()).collect(), c * scale));
        }
    }
    out
}

fn eval_monomials(poly: &[(Vec<i64>, f64)], x: &[Complex64]) -> Complex64 {
    let mut s = Complex64::zero();
    for (e, c) in poly {
        let mut m = Complex64::new(*c, 0.0);
        for (xi, &ei) in x.iter().zip(e) {
            m *= xi.powi(ei as i32);
        }
        s += m;
    }
    s
}

/// `η` padded with zeros to `k` entries; rejects more than `k` parts.
fn padded(eta: &Partition, k: usize) -> Result<Vec<i64>> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    if eta.len() > k {
        return invalid(format!("η = {:?} has more than k = {k} parts", eta.parts()));
    }
    Ok((0..k).map(|i| eta.parts().get(i).copied().unwrap_or(0) as i64).collect())
}

/// The torus integral shared by the finite-`n` and Poissonized laws, with
/// `weight(z_1 + … + z_k)` in front.
fn column_integral<W>(k: usize, t: f64, eta: &[i64], weight: W, quad: &TorusQuad, tol: f64) -> Result<Estimate>
where
    W: Fn(Complex64) -> Complex64 + Sync,
{
    if !in_unit_interval(t) {
        return invalid(format!("t must lie in (0, 1), got {t}"));
    }
    let euler = EulerTable::new(t, 256);
    let mut pref = euler.infinite().powi(k as i32 - 1) / (1..=k).product::<usize>() as f64;
    for i in 0..k - 1 {
        pref /= euler.get((eta[i] - eta[i + 1]) as usize);
    }
    pref *= t.powi(eta.iter().map(|&e| binom2(e)).sum::<i64>() as i32);
    let eta_k = eta[k - 1];

    let poly = if k == 1 {
        Vec::new()
    } else {
        let gap = eta[k - 2] - eta_k;
        let pieces: Vec<(Signature, f64)> = (0..=gap)
            .map(|j| {
                let mut e = eta.to_vec();
                e[k - 1] += j;
                let c = t.powi((j * (eta_k + 1) + binom2(j)) as i32) * q_binomial(gap, j, &t);
                (Signature::new(e).expect("η + j e_k stays decreasing for j ≤ gap"), c)
            })
            .collect();
        combined_polynomial(&pieces, t)
    };
    // the k = 1 sum over j ≥ 0 uses [∞ choose j]_t = 1/(t;t)_j
    let one_column = |x: Complex64| -> Complex64 {
        let mut s = Complex64::zero();
        let mut xp = x.powi(eta_k as i32);
        for j in 0i64.. {
            let c = t.powi((j * (eta_k + 1) + binom2(j)) as i32) / euler.get(j as usize);
            let term = xp * c;
            s += term;
            if term.norm() < 1e-18 * s.norm().max(1e-300) && j > 2 {
                break;
            }
            xp *= x;
        }
        s
    };
    let integrand = |z: &[Complex64]| -> Complex64 {
        let x: Vec<Complex64> = z.iter().map(|zi| zi.inv()).collect();
        let sum: Complex64 = z.iter().sum();
        let den: Complex64 = x.iter().map(|&xi| q_pochhammer_inf(-xi, t)).product();
        let s = if k == 1 { one_column(x[0]) } else { eval_monomials(&poly, &x) };
        weight(sum) * cross_product(z, t) * s / den
    };
    let raw = torus_integrate(k, quad, tol / pref.max(1e-300), integrand)?;
    Ok(Estimate { value: raw.value * pref, error: raw.error * pref })
}

fn check_dimension(k: usize) -> Result<()> {
    if k == 0 || k > 2 {
        return invalid(format!("torus integrals support k ∈ {{1, 2}}, got {k}"));
    }
    Ok(())
}

/// `Pr((λ'_1, …, λ'_k)(σ_n) = η)` from the finite-`n` torus integral.
pub fn prelimit_pmf_integral(n: u64, k: usize, t: f64, eta: &Partition, quad: &TorusQuad, tol: f64) -> Result<Estimate> {
    check_dimension(k)?;
    let eta = padded(eta, k)?;
    let n = n as f64;
    // (1 + Σz)^n in log form
    column_integral(k, t, &eta, move |s| if n == 0.0 { Complex64::one() } else { ((s + 1.0).ln() * n).exp() }, quad, tol)
}

/// `Pr((λ'_1, …, λ'_k)(τ) = η)` for the Poissonized process.
pub fn poissonized_pmf_integral(tau: f64, k: usize, t: f64, eta: &Partition, quad: &TorusQuad, tol: f64) -> Result<Estimate> {
    check_dimension(k)?;
    if !(tau >= 0.0) {
        return invalid(format!("τ must be nonnegative, got {tau}"));
    }
    let eta = padded(eta, k)?;
    let scale = tau / (1.0 - t);
    column_integral(k, t, &eta, move |s| (s * scale).exp(), quad, tol)
}

/// One-column residue at `z = −t^v`, exact:
/// `(1−t^v)^n (−1)^{η+v} t^{binom(v+1,2)+binom(η,2)−vη} [η choose v]_t / (t;t)_η`.
pub fn residue_e_k1_exact(n: u64, eta: u64, v: u64, t: &ExactScalar) -> ExactScalar {
    let (eta_i, v_i) = (eta as i64, v as i64);
    let one = ExactScalar::one();
    let base = pow(&(one.clone() - pow(t, v as usize)), n as usize);
    let e = binom2(v_i + 1) + binom2(eta_i) - v_i * eta_i;
    let tp = if e >= 0 { pow(t, e as usize) } else { one.clone() / pow(t, (-e) as usize) };
    let sign = if (eta + v) % 2 == 0 { one.clone() } else { -one };
    base * sign * tp * q_binomial(eta_i, v_i, t) / q_pochhammer(t, t, eta as usize)
}

/// One-column residue in floating point.
pub fn residue_e_k1(n: u64, eta: u64, v: u64, t: f64) -> f64 {
    let (eta_i, v_i) = (eta as i64, v as i64);
    let e = binom2(v_i + 1) + binom2(eta_i) - v_i * eta_i;
    let sign = if (eta + v) % 2 == 0 { 1.0 } else { -1.0 };
    (1.0 - t.powi(v as i32)).powf(n as f64) * sign * t.powi(e as i32) * q_binomial(eta_i, v_i, &t)
        / q_pochhammer(&t, &t, eta as usize)
}

/// Residue `E(n, η, v)` of the finite-`n` integral at `z_k = −t^v`, with the
/// other `k−1` variables integrated over the unit torus.
///
/// For `k ≥ 2` the `z_k`-residue of `1/(z (−1/z;t)_∞)` is
/// `(−1)^v t^{binom(v+1,2)} / ((t;t)_v (t;t)_∞)` and each remaining variable
/// carries `(1 + t^{−v} z) z^v t^{−binom(v,2)} (−tz;t)_∞`.
pub fn residue_e(n: u64, eta: &Partition, v: u64, k: usize, t: f64, quad: &TorusQuad, tol: f64) -> Result<Estimate> {
    if !in_unit_interval(t) {
        return invalid(format!("t must lie in (0, 1), got {t}"));
    }
    if k > 3 {
        return invalid(format!("residues support k ≤ 3, got {k}"));
    }
    let eta = padded(eta, k)?;
    if k == 1 {
        let value = residue_e_k1(n, eta[0] as u64, v, t);
        return Ok(Estimate { value, error: 64.0 * f64::EPSILON * value.abs() });
    }
    let vi = v as i64;
    let eta_k = eta[k - 1];
    let euler = EulerTable::new(t, 256);
    let mut pref = euler.infinite().powi(k as i32 - 2) / (1..=k).product::<usize>() as f64 / euler.get(v as usize);
    pref *= t.powi((binom2(vi + 1) + eta.iter().map(|&e| binom2(e)).sum::<i64>()) as i32);
    if v % 2 == 1 {
        pref = -pref;
    }
    for i in 0..k - 1 {
        pref /= euler.get((eta[i] - eta[i + 1]) as usize);
    }
    let eta_sig = Signature::new(eta.clone()).expect("partitions are decreasing");
    let tv_inv = t.powi(-(vi as i32));
    let pieces: Vec<(Signature, f64)> = eta_sig
        .interlacing_below()
        .into_iter()
        .map(|mu| {
            let m = mu.entries();
            let mut c = (-tv_inv).powi((eta_sig.size() - mu.size()) as i32);
            for i in 0..k - 1 {
                c *= q_binomial(eta[i] - eta[i + 1], eta[i] - m[i], &t);
            }
            let start = t.powi((eta_k - vi + 1) as i32);
            c *= q_pochhammer(&start, &t, (m[k - 2] - eta_k) as usize);
            (mu, c)
        })
        .collect();
    let poly = combined_polynomial(&pieces, t);
    let shift = 1.0 - t.powi(vi as i32);
    let per_var_const = t.powi(-(binom2(vi) as i32));
    let nf = n as f64;
    let integrand = |z: &[Complex64]| -> Complex64 {
        let x: Vec<Complex64> = z.iter().map(|zi| zi.inv()).collect();
        let s: Complex64 = z.iter().sum::<Complex64>() + shift;
        let power = if n == 0 { Complex64::one() } else { (s.ln() * nf).exp() };
        let mut per_var = Complex64::one();
        for &zi in z {
            per_var *= (zi * tv_inv + 1.0) * zi.powi(vi as i32) * per_var_const * q_pochhammer_inf(-zi * t, t);
        }
        power * eval_monomials(&poly, &x) * cross_product(z, t) * per_var
    };
    let unit = TorusQuad { radius: 1.0, ..quad.clone() };
    let raw = torus_integrate(k - 1, &unit, tol / pref.abs().max(1e-300), integrand)?;
    Ok(Estimate { value: raw.value * pref, error: raw.error * pref.abs() })
}
