//! Exact Fincke–Pohst enumeration of integer vectors in an ellipsoid.
//!
//! The quadratic form is completed to a sum of squares
//! `Q(x) = Σ d_i (x_i + Σ_{j>i} μ_ij x_j)²` over the rationals, and the search
//! runs from the last coordinate to the first. Coordinate ranges come from an
//! integer square root, so no floating point is involved at any step.

use num_integer::Roots;
use num_traits::{Signed, Zero};

use crate::rational::{self, Rat};

/// Rational LDLᵀ-style decomposition of a positive-definite form.
#[derive(Clone, Debug)]
pub struct Ellipsoid {
    diag: Vec<Rat>,
    /// `mu[i][j]` for `j > i`.
    mu: Vec<Vec<Rat>>,
}

impl Ellipsoid {
    /// Returns `None` when the form is not positive definite.
    pub fn new(form: &[Vec<Rat>]) -> Option<Self> {
        let n = form.len();
        let mut q: Vec<Vec<Rat>> = form.to_vec();
        let mut diag = vec![Rat::zero(); n];
        let mut mu = vec![vec![Rat::zero(); n]; n];
        for i in 0..n {
            let d = q[i][i];
            if !d.is_positive() {
                return None;
            }
            diag[i] = d;
            for j in i + 1..n {
                mu[i][j] = q[i][j] / d;
            }
            for j in i + 1..n {
                for k in i + 1..n {
                    let t = mu[i][j] * mu[i][k] * d;
                    q[j][k] -= t;
                }
            }
        }
        Some(Ellipsoid { diag, mu })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// All integer vectors with `Q(x) <= bound`, in lexicographic order.
    pub fn points(&self, bound: &Rat) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        if bound.is_negative() {
            return out;
        }
        let n = self.dim();
        if n == 0 {
            out.push(Vec::new());
            return out;
        }
        let mut x = vec![0i64; n];
        self.recurse(n - 1, *bound, &mut x, &mut out);
        out.sort();
        out
    }

    fn recurse(&self, i: usize, remaining: Rat, x: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let n = self.dim();
        let shift = (i + 1..n).fold(Rat::zero(), |s, j| s + self.mu[i][j] * Rat::from(x[j] as i128));
        let (lo, hi) = integer_window(&shift, &(remaining / self.diag[i]));
        for xi in lo..=hi {
            let t = shift + Rat::from(xi);
            let used = self.diag[i] * t * t;
            if used > remaining {
                continue;
            }
            x[i] = xi as i64;
            if i == 0 {
                out.push(x.clone());
            } else {
                self.recurse(i - 1, remaining - used, x, out);
            }
        }
        x[i] = 0;
    }
}

/// Integers `x` with `(x + s)² <= r`, as an inclusive range (empty when `lo > hi`).
fn integer_window(s: &Rat, r: &Rat) -> (i128, i128) {
    if r.is_negative() {
        return (1, 0);
    }
    // s = a/b; (b x + a)² <= b² r  <=>  |y| <= isqrt(floor(b² r)) with y = b x + a
    let a = *s.numer();
    let b = *s.denom();
    let scaled = *r * Rat::from(b * b);
    let cap = rational::floor(&scaled);
    let y = cap.sqrt();
    let lo = num_integer::Integer::div_ceil(&(-y - a), &b);
    let hi = num_integer::Integer::div_floor(&(y - a), &b);
    (lo, hi)
}

/// Evaluate `xᵀ Q x` exactly.
pub fn evaluate(form: &[Vec<Rat>], x: &[i64]) -> Rat {
    let mut s = Rat::zero();
    for (i, row) in form.iter().enumerate() {
        if x[i] == 0 {
            continue;
        }
        for (j, q) in row.iter().enumerate() {
            if x[j] != 0 {
                s += q * Rat::from(x[i] as i128 * x[j] as i128);
            }
        }
    }
    s
}
