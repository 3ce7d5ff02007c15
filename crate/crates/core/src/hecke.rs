//! The index-raising Hecke operator `T₋(m)`.
//!
//! On coefficients:
//! `f_m(n, ℓ) = Σ_{a | (n, ℓ, m)} a^{k−1} f(nm/a², ℓ/a)`, where `a | (n, ℓ, m)`
//! means `a | n`, `a | m` and `ℓ/a ∈ L∨`.

use std::collections::BTreeMap;

use num_traits::Zero;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::par;
use crate::qseries::{FourierSeries, ZetaKey, ZetaPoly, EXACT};
use crate::rational::{self, int, Rat};

/// Checks the grading `T₋(m)` needs: integral q-exponents and `ℓ ∈ L∨`.
pub(crate) fn check_grading(s: &FourierSeries) -> Result<()> {
    if let Some(q) = s.slices().keys().find(|q| *q % 24 != 0) {
        return Err(Error::NonIntegralGrading(format!("{}/24", q)));
    }
    if !s.has_integral_zeta() {
        return Err(Error::HalfIntegralExponents);
    }
    Ok(())
}

fn divisors(m: i64) -> Vec<i64> {
    (1..=m).filter(|a| m % a == 0).collect()
}

/// Output precision in 24ths: `n` is known iff `nm < qprec`.
pub(crate) fn hecke_prec(prec: i64, m: i64) -> i64 {
    if prec >= EXACT {
        return EXACT;
    }
    // integral n with n·m·24 < prec  <=>  n < ceil(prec / (24 m))
    24 * num_integer::Integer::div_ceil(&prec, &(24 * m))
}

/// `s |_k T₋(m)` by the coefficient formula.
pub fn apply_t_minus(s: &FourierSeries, m: i64, k: i64) -> Result<FourierSeries> {
    if m <= 0 {
        return Err(Error::BadHeckeIndex(m));
    }
    check_grading(s)?;
    let prec = hecke_prec(s.prec24(), m);
    let divs = divisors(m);
    let weights: Vec<Rat> = divs.iter().map(|&a| rational::pow(&int(a as i128), k - 1)).collect();

    // output exponents n (integral, in q-units) that can receive a contribution
    let mut targets: Vec<i64> = Vec::new();
    for &q in s.slices().keys() {
        let big_n = q / 24;
        for &a in &divs {
            let num = big_n * a * a;
            if num % m == 0 {
                let n = num / m;
                if n % a == 0 && 24 * n < prec {
                    targets.push(n);
                }
            }
        }
    }
    targets.sort_unstable();
    targets.dedup();

    let slices: Vec<(i64, ZetaPoly)> = par::map(&targets, |&n| {
        let mut acc: FxHashMap<ZetaKey, Rat> = FxHashMap::default();
        for (&a, w) in divs.iter().zip(&weights) {
            if n % a != 0 {
                continue;
            }
            let src = n * m / (a * a);
            if let Some(poly) = s.slice24(24 * src) {
                for (key, c) in poly {
                    let k2: ZetaKey = key.iter().map(|x| x * a as i32).collect();
                    let e = acc.entry(k2).or_insert_with(Rat::zero);
                    rational::fma(e, w, c);
                }
            }
        }
        (24 * n, acc.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    });

    let index_form = s
        .index_form()
        .iter()
        .map(|row| row.iter().map(|x| x * int(m as i128)).collect())
        .collect();
    Ok(FourierSeries::from_parts(
        s.lattice_arc().clone(),
        index_form,
        Some(int(k as i128)),
        prec,
        slices.into_iter().collect::<BTreeMap<_, _>>(),
    ))
}
