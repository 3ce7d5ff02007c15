//! Exact rational scalars.
//!
//! Every coefficient in the engine is a `Ratio<i128>`. Arithmetic goes through
//! the checked helpers below so that an overflow aborts loudly instead of
//! wrapping into a wrong answer.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, Zero};

pub type Rat = Ratio<i128>;

#[inline]
pub fn rat(n: i128, d: i128) -> Rat {
    Rat::new(n, d)
}

#[inline]
pub fn int(n: i128) -> Rat {
    Rat::from_integer(n)
}

#[inline]
pub fn add(a: &Rat, b: &Rat) -> Rat {
    if a.denom().is_one() && b.denom().is_one() {
        return Rat::from_integer(
            a.numer()
                .checked_add(b.numer())
                .expect("coefficient overflow in addition"),
        );
    }
    a.checked_add(b).expect("coefficient overflow in addition")
}

#[inline]
pub fn sub(a: &Rat, b: &Rat) -> Rat {
    if a.denom().is_one() && b.denom().is_one() {
        return Rat::from_integer(
            a.numer()
                .checked_sub(b.numer())
                .expect("coefficient overflow in subtraction"),
        );
    }
    a.checked_sub(b).expect("coefficient overflow in subtraction")
}

#[inline]
pub fn mul(a: &Rat, b: &Rat) -> Rat {
    if a.denom().is_one() && b.denom().is_one() {
        return Rat::from_integer(
            a.numer()
                .checked_mul(b.numer())
                .expect("coefficient overflow in multiplication"),
        );
    }
    a.checked_mul(b).expect("coefficient overflow in multiplication")
}

/// `acc += a * b`
#[inline]
pub fn fma(acc: &mut Rat, a: &Rat, b: &Rat) {
    *acc = add(acc, &mul(a, b));
}

pub fn pow(a: &Rat, e: i64) -> Rat {
    if e == 0 {
        return Rat::one();
    }
    let base = if e < 0 { a.recip() } else { *a };
    let mut out = Rat::one();
    for _ in 0..e.unsigned_abs() {
        out = mul(&out, &base);
    }
    out
}

/// Floor of a rational.
pub fn floor(a: &Rat) -> i128 {
    a.numer().div_floor(a.denom())
}

pub fn ceil(a: &Rat) -> i128 {
    a.numer().div_ceil(a.denom())
}

/// Canonical representative of `a mod m` in `[0, m)`.
pub fn modulo(a: &Rat, m: &Rat) -> Rat {
    let q = floor(&(a / m));
    let r = a - m * int(q);
    debug_assert!(!r.is_negative() && r < *m);
    r
}

pub fn is_integer(a: &Rat) -> bool {
    a.denom().is_one()
}

/// Parse `"p"` or `"p/q"`.
pub fn parse(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i128 = p.trim().parse().ok()?;
            let q: i128 = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rat::new(p, q))
            }
        }
        None => s.parse::<i128>().ok().map(Rat::from_integer),
    }
}

/// `[num, den]` pair used by the JSON formats.
pub fn to_pair(a: &Rat) -> [i128; 2] {
    [*a.numer(), *a.denom()]
}

pub fn from_pair(p: [i128; 2]) -> Option<Rat> {
    if p[1] == 0 {
        None
    } else {
        Some(Rat::new(p[0], p[1]))
    }
}

/// Exact inverse of a square rational matrix by Gauss–Jordan elimination.
pub fn invert_matrix(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m.to_vec();
    let mut inv: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for j in 0..n {
                    let t = a[col][j] * f;
                    a[r][j] -= t;
                    let t = inv[col][j] * f;
                    inv[r][j] -= t;
                }
            }
        }
    }
    Some(inv)
}

pub fn mat_mul(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).fold(Rat::zero(), |s, t| s + a[i][t] * b[t][j]))
                .collect()
        })
        .collect()
}

pub fn transpose(a: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|row| row[j]).collect())
        .collect()
}
