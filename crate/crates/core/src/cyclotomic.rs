//! Integer combinations of `N`-th roots of unity.
//!
//! An element is stored in the group ring `ℤ[ℤ/N]` (coefficient `k` belongs to
//! `e(k/N)`); two elements are equal as complex numbers iff their difference
//! vanishes modulo the cyclotomic polynomial `Φ_N`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cyclo {
    n: u32,
    coeffs: Vec<i64>,
}

impl Cyclo {
    pub fn zero(n: u32) -> Self {
        assert!(n > 0, "conductor must be positive");
        Cyclo {
            n,
            coeffs: vec![0; n as usize],
        }
    }

    pub fn integer(n: u32, v: i64) -> Self {
        let mut z = Self::zero(n);
        z.coeffs[0] = v;
        z
    }

    /// `e(k/n) = exp(2πi k/n)`.
    pub fn root(n: u32, k: i64) -> Self {
        let mut z = Self::zero(n);
        z.coeffs[k.rem_euclid(n as i64) as usize] = 1;
        z
    }

    pub fn conductor(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// `self += c · e(k/n)`.
    pub fn add_root(&mut self, k: i64, c: i64) {
        let i = k.rem_euclid(self.n as i64) as usize;
        self.coeffs[i] = self.coeffs[i].checked_add(c).expect("cyclotomic overflow");
    }

    pub fn add(&self, other: &Cyclo) -> Cyclo {
        assert_eq!(self.n, other.n, "conductor mismatch");
        Cyclo {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.checked_add(*b).expect("cyclotomic overflow"))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Cyclo) -> Cyclo {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> Cyclo {
        Cyclo {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .map(|a| a.checked_mul(k).expect("cyclotomic overflow"))
                .collect(),
        }
    }

    /// Multiply by `e(k/n)`.
    pub fn rotate(&self, k: i64) -> Cyclo {
        let n = self.n as i64;
        let mut out = Self::zero(self.n);
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c != 0 {
                out.coeffs[(i as i64 + k).rem_euclid(n) as usize] = *c;
            }
        }
        out
    }

    pub fn mul(&self, other: &Cyclo) -> Cyclo {
        assert_eq!(self.n, other.n, "conductor mismatch");
        let n = self.n as usize;
        let mut out = Self::zero(self.n);
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if *b != 0 {
                    let k = (i + j) % n;
                    out.coeffs[k] = out.coeffs[k]
                        .checked_add(a.checked_mul(*b).expect("cyclotomic overflow"))
                        .expect("cyclotomic overflow");
                }
            }
        }
        out
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Cyclo {
        let n = self.n as usize;
        let mut out = Self::zero(self.n);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[(n - i) % n] = *c;
        }
        out
    }

    /// Canonical form: the remainder modulo `Φ_n`, of degree `< φ(n)`.
    pub fn reduced(&self) -> Vec<i64> {
        let phi = cyclotomic_polynomial(self.n);
        let deg = phi.len() - 1;
        let mut r: Vec<i128> = self.coeffs.iter().map(|&c| c as i128).collect();
        for top in (deg..r.len()).rev() {
            let c = r[top];
            if c == 0 {
                continue;
            }
            // Φ is monic: subtract c · x^{top−deg} · Φ
            for (i, p) in phi.iter().enumerate() {
                r[top - deg + i] -= c * (*p as i128);
            }
        }
        r.truncate(deg);
        r.into_iter().map(|c| c as i64).collect()
    }

    pub fn equals(&self, other: &Cyclo) -> bool {
        self.sub(other).is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.reduced().iter().all(|&c| c == 0)
    }

    /// The value as an integer, if it is one.
    pub fn as_integer(&self) -> Option<i64> {
        let r = self.reduced();
        if r.iter().skip(1).all(|&c| c == 0) {
            Some(r.first().copied().unwrap_or(0))
        } else {
            None
        }
    }
}

/// Integer coefficients of `Φ_n`, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<i64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().expect("cache lock").get(&n) {
        return p.clone();
    }
    // x^n − 1 divided by Φ_d for every proper divisor d
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = divide_monic(&p, &cyclotomic_polynomial(d));
        }
    }
    cache.lock().expect("cache lock").insert(n, p.clone());
    p
}

fn divide_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut r = num.to_vec();
    let qlen = num.len() - dn;
    let mut q = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = r[i + dn];
        q[i] = c;
        for (j, d) in den.iter().enumerate() {
            r[i + j] -= c * d;
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0), "inexact cyclotomic division");
    q
}
