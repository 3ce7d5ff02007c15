//! Oracles shared by the integration tests.

use std::collections::BTreeMap;

use thetablock::cyclotomic::Cyclo;
use thetablock::qseries::ZetaKey;
use thetablock::rational::{int, pow};
use thetablock::{FourierSeries, Rat};

/// `φ|T₋(m) = m⁻¹ Σ_{ad=m} Σ_{b mod d} a^k φ((aτ+b)/d, a𝔷)`, expanded term by
/// term: `f(N,ℓ) qᴺ ζ^ℓ` becomes `a^k f(N,ℓ) e(Nb/d) q^{Na/d} ζ^{aℓ}` and the
/// sum over `b` is evaluated as an element of `ℤ[e(1/d)]`.
pub fn by_substitution(s: &FourierSeries, m: i64, k: i64) -> BTreeMap<(i64, ZetaKey), Rat> {
    let mut out: BTreeMap<(i64, ZetaKey), Rat> = BTreeMap::new();
    for (q24, key, c) in s.terms() {
        assert_eq!(q24 % 24, 0);
        let n = q24 / 24;
        for a in (1..=m).filter(|a| m % a == 0) {
            let d = m / a;
            let mut chi = Cyclo::zero(d as u32);
            for b in 0..d {
                chi.add_root(n * b, 1);
            }
            let chi = chi.as_integer().expect("character sums over b are integers");
            if chi == 0 {
                continue;
            }
            assert_eq!(n * a % d, 0);
            let e = (24 * n * a / d, key.iter().map(|x| x * a as i32).collect());
            let v = pow(&int(a as i128), k) * int(chi as i128) * c / int(m as i128);
            *out.entry(e).or_insert_with(|| int(0)) += v;
        }
    }
    out.retain(|_, v| *v != int(0));
    out
}
