//! Quadrature building blocks: Gauss-Legendre panels, trapezoid nodes on
//! circles, and order-independent pairwise summation.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

use crate::scalar::Numeric;

/// A numerical value together with an estimate of its absolute error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(n).expect("at least one node");
    let mut pairs: Vec<(f64, f64)> = GaussLegendre::new(n).as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

/// Sum with `O(log n)` error growth; the result depends only on the order of `xs`.
pub fn pairwise_sum<T: Numeric>(xs: &[T]) -> T {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs.iter().fold(T::zero(), |a, &b| a + b);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// `m` equally spaced points `c e^{2πi j/m}` on the circle of radius `c`.
pub fn circle_nodes(c: f64, m: usize) -> Vec<Complex64> {
    (0..m).map(|j| Complex64::from_polar(c, 2.0 * PI * j as f64 / m as f64)).collect()
}

/// One node of a discretized contour: the point and its weight `w'(s) ds`.
#[derive(Clone, Copy, Debug)]
pub struct ContourNode {
    pub z: Complex64,
    pub dz: Complex64,
}

/// A smooth piece of a contour, parametrized over `[a, b]`.
#[derive(Clone, Copy, Debug)]
pub enum Segment {
    /// `s ↦ s + i·height` for `s` from `from` to `to`.
    Horizontal { height: f64, from: f64, to: f64 },
    /// `θ ↦ radius·e^{iθ}` for `θ` from `from` to `to`.
    Arc { radius: f64, from: f64, to: f64 },
    /// `s ↦ re + i·s` for `s` from `from` to `to`.
    Vertical { re: f64, from: f64, to: f64 },
}

impl Segment {
    /// Gauss-Legendre discretization with `rule` on this segment.
    pub fn nodes(&self, rule: &[(f64, f64)]) -> Vec<ContourNode> {
        match *self {
            Segment::Horizontal { height, from, to } => {
                let (mid, half) = (0.5 * (from + to), 0.5 * (to - from));
                rule.iter()
                    .map(|&(x, w)| ContourNode {
                        z: Complex64::new(mid + half * x, height),
                        dz: Complex64::new(half * w, 0.0),
                    })
                    .collect()
            }
            Segment::Arc { radius, from, to } => {
                let (mid, half) = (0.5 * (from + to), 0.5 * (to - from));
                rule.iter()
                    .map(|&(x, w)| {
                        let theta = mid + half * x;
                        let z = Complex64::from_polar(radius, theta);
                        ContourNode { z, dz: Complex64::i() * z * (half * w) }
                    })
                    .collect()
            }
            Segment::Vertical { re, from, to } => {
                let (mid, half) = (0.5 * (from + to), 0.5 * (to - from));
                rule.iter()
                    .map(|&(x, w)| ContourNode {
                        z: Complex64::new(re, mid + half * x),
                        dz: Complex64::new(0.0, half * w),
                    })
                    .collect()
            }
        }
    }
}
