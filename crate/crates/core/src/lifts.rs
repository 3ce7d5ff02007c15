//! Gritsenko lifts, Borcherds products and the weight-0 quotient
//! `Ψ = −(Θ | T₋(2)) / Θ`, all as truncated Fourier–Jacobi expansions in
//! `ξ = e(ω)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::blocks::ThetaBlockSpec;
use crate::error::{Error, Result};
use crate::hecke::{apply_t_minus, check_grading};
use crate::lattice::{is_positive, DualVector, GramLattice};
use crate::qseries::{key_add, zero_key, FourierSeries, SeriesJson, ZetaKey, ZetaPoly, EXACT};
use crate::rational::{self, int, rat, Rat};

/// A truncated Fourier–Jacobi expansion `Σ_m φ_m(τ, 𝔷) ξ^m`.
#[derive(Clone, Debug)]
pub struct FJExpansion {
    pub lattice: Arc<GramLattice>,
    pub weight: Rat,
    /// `coeffs[m]` is the coefficient of `ξ^m` (of index `m`).
    pub coeffs: Vec<FourierSeries>,
    /// Number of computed orders past the leading one.
    pub fj_order: usize,
    /// Produced by the additive lift (symmetric under `τ ↔ ω`).
    pub symmetric: bool,
    /// Product data when produced by [`borcherds_expand`].
    pub borcherds: Option<BorcherdsData>,
}

impl FJExpansion {
    pub fn coefficient(&self, m: usize) -> Option<&FourierSeries> {
        self.coeffs.get(m)
    }

    pub fn to_json(&self) -> FJJson {
        let b = self.borcherds.as_ref();
        FJJson {
            lattice: crate::lattice::LatticeRef::of(&self.lattice),
            weight: rational::to_pair(&self.weight),
            fj_order: self.fj_order,
            a: b.map(|d| rational::to_pair(&d.a)),
            b: b.map(|d| d.b.coords.iter().map(rational::to_pair).collect()),
            c: b.map(|d| rational::to_pair(&d.c)),
            d: b.map(|d| d.d),
            coefficients: self.coeffs.iter().map(|s| s.to_json()).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FJJson {
    pub lattice: crate::lattice::LatticeRef,
    pub weight: [i128; 2],
    pub fj_order: usize,
    #[serde(rename = "A")]
    pub a: Option<[i128; 2]>,
    #[serde(rename = "B")]
    pub b: Option<Vec<[i128; 2]>>,
    #[serde(rename = "C")]
    pub c: Option<[i128; 2]>,
    #[serde(rename = "D")]
    pub d: Option<i64>,
    pub coefficients: Vec<SeriesJson>,
}

fn integral_weight(phi: &FourierSeries) -> Result<i64> {
    match phi.weight() {
        Some(w) if w.is_integer() => Ok(*w.numer() as i64),
        Some(w) => Err(Error::Unsupported(format!("non-integral weight {w}"))),
        None => Err(Error::Unsupported("series carries no weight".into())),
    }
}

/// `Grit(φ) = Σ_{m>=1} φ|T₋(m) ξ^m` for `m <= M`, each coefficient cut at
/// `q^qprec` (or earlier when `φ` is not known far enough).
pub fn grit(phi: &FourierSeries, fj_order: usize, qprec: &Rat) -> Result<FJExpansion> {
    let cut = crate::qseries::to_q24(qprec)?;
    let k = integral_weight(phi)?;
    check_grading(phi)?;
    if phi.jacobi_index() != Some(int(1)) {
        return Err(Error::IndexMismatch);
    }
    let r = phi.rank();
    if !phi.coeff24(0, &zero_key(r)).is_zero() {
        return Err(Error::Unsupported("f(0,0) != 0 needs the Eisenstein term".into()));
    }
    let orders: Vec<i64> = (1..=fj_order as i64).collect();
    let images = crate::par::map(&orders, |&m| apply_t_minus(phi, m, k));
    let mut coeffs = vec![FourierSeries::zero24(phi.lattice_arc().clone(), phi.prec24().min(cut))];
    for s in images {
        let s = s?;
        let p = s.prec24().min(cut);
        coeffs.push(s.truncate24(p));
    }
    Ok(FJExpansion {
        lattice: phi.lattice_arc().clone(),
        weight: int(k as i128),
        coeffs,
        fj_order,
        symmetric: true,
        borcherds: None,
    })
}

// ---------------------------------------------------------------------------
// The quotient Ψ = −(Θ|T₋(2))/Θ.

/// Exact division of Laurent polynomials in ζ, by lexicographic leading terms.
/// The quotient must fit in the coordinatewise box allowed by the Newton
/// polytopes; anything else means the division is not exact.
fn divide_exact(num: &ZetaPoly, den: &ZetaPoly) -> Option<ZetaPoly> {
    let mut rem: BTreeMap<ZetaKey, Rat> = num.clone();
    let mut quot = ZetaPoly::new();
    if rem.is_empty() {
        return Some(quot);
    }
    let (lead_key, lead_c) = den.iter().next_back()?;
    let dim = lead_key.len();
    let bounds = |p: &ZetaPoly| -> (Vec<i32>, Vec<i32>) {
        let mut lo = vec![i32::MAX; dim];
        let mut hi = vec![i32::MIN; dim];
        for k in p.keys() {
            for i in 0..dim {
                lo[i] = lo[i].min(k[i]);
                hi[i] = hi[i].max(k[i]);
            }
        }
        (lo, hi)
    };
    let (nlo, nhi) = bounds(num);
    let (dlo, dhi) = bounds(den);
    let lo: Vec<i32> = (0..dim).map(|i| nlo[i] - dlo[i]).collect();
    let hi: Vec<i32> = (0..dim).map(|i| nhi[i] - dhi[i]).collect();
    while let Some((k, c)) = rem.iter().next_back().map(|(k, c)| (k.clone(), *c)) {
        let qk: ZetaKey = k.iter().zip(lead_key.iter()).map(|(a, b)| a - b).collect();
        if (0..dim).any(|i| qk[i] < lo[i] || qk[i] > hi[i]) {
            return None;
        }
        let qc = c / lead_c;
        for (dk, dc) in den {
            let key: ZetaKey = qk.iter().zip(dk.iter()).map(|(a, b)| a + b).collect();
            let e = rem.entry(key).or_insert_with(Rat::zero);
            *e = rational::sub(e, &rational::mul(&qc, dc));
            if e.is_zero() {
                let key: ZetaKey = qk.iter().zip(dk.iter()).map(|(a, b)| a + b).collect();
                rem.remove(&key);
            }
        }
        quot.insert(qk, qc);
    }
    Some(quot)
}

fn poly_mul_into(acc: &mut FxHashMap<ZetaKey, Rat>, a: &ZetaPoly, b: &ZetaPoly) {
    for (ka, ca) in a {
        for (kb, cb) in b {
            let e = acc.entry(key_add(ka, kb)).or_insert_with(Rat::zero);
            rational::fma(e, ca, cb);
        }
    }
}

/// Result of [`quotient_psi`]: the weak form and the residual certificate.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub psi: FourierSeries,
    /// `Ψ·Θ + Θ|T₋(2)` vanishes on the common known range.
    pub residual_vanishes: bool,
    /// Every coefficient satisfies `(ℓ, ℓ) <= 2n + m(L)`.
    pub weak_support: bool,
}

/// Solves `Ψ · Θ = −(Θ | T₋(2))` order by order in q.
///
/// Precision: with `Θ` known below `q^P` the right-hand side is known below
/// `q^{⌈P/2⌉}`, so `Ψ` is known below `q^{⌈P/2⌉ − 1}`; it is further cut at
/// `q^qprec`.
pub fn quotient_psi(theta: &FourierSeries, qprec: &Rat) -> Result<Quotient> {
    let cut = crate::qseries::to_q24(qprec)?;
    if theta.is_zero() {
        return Err(Error::NotInvertible("zero theta block".into()));
    }
    let k = integral_weight(theta)?;
    check_grading(theta)?;
    if theta.qorder() != Some(int(1)) {
        return Err(Error::Unsupported(format!(
            "theta block must have q-order 1, found {:?}",
            theta.qorder().map(|q| q.to_string())
        )));
    }
    let l = theta.lattice_arc().clone();
    let rhs = apply_t_minus(theta, 2, k)?.neg();
    let ord = 24; // q-order of Θ in 24ths
    let prec = (rhs.prec24() - ord).min(if theta.prec24() >= EXACT {
        EXACT
    } else {
        theta.prec24() - 2 * ord + rhs.ord24()
    })
    .min(cut);
    let lead = theta.slice24(ord).expect("q-order 1").clone();

    let mut psi: BTreeMap<i64, ZetaPoly> = BTreeMap::new();
    let mut n = 0i64;
    while 24 * n < prec {
        // Ψ_n Θ_1 = R_{n+1} − Σ_{j<n} Ψ_j Θ_{n+1−j}
        let mut acc: FxHashMap<ZetaKey, Rat> = FxHashMap::default();
        if let Some(r) = rhs.slice24(24 * (n + 1)) {
            for (key, c) in r {
                acc.insert(key.clone(), *c);
            }
        }
        let mut sub: FxHashMap<ZetaKey, Rat> = FxHashMap::default();
        for (j, pj) in &psi {
            if let Some(t) = theta.slice24(24 * (n + 1) - j) {
                poly_mul_into(&mut sub, pj, t);
            }
        }
        for (key, c) in sub {
            let e = acc.entry(key).or_insert_with(Rat::zero);
            *e = rational::sub(e, &c);
        }
        let target: ZetaPoly = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let Some(q) = divide_exact(&target, &lead) else {
            return Err(Error::Inconsistent(format!("{n}")));
        };
        if !q.is_empty() {
            psi.insert(24 * n, q);
        }
        n += 1;
    }
    let r = l.rank();
    let index_form = l.gram_rat();
    let psi = FourierSeries::from_parts(l.clone(), index_form, Some(Rat::zero()), prec, psi);
    debug_assert_eq!(psi.lattice().rank(), r);

    let residual = psi.mul(theta)?.add(&apply_t_minus(theta, 2, k)?)?;
    let residual_vanishes = residual.is_zero();
    let m = l.weak_support_bound();
    let weak_support = psi.terms().all(|(q, key, _)| {
        let c: Vec<i64> = key.iter().map(|x| (*x / 2) as i64).collect();
        l.dual_norm(&c) <= int(2) * rat(q as i128, 24) + m
    });
    Ok(Quotient {
        psi,
        residual_vanishes,
        weak_support,
    })
}

// ---------------------------------------------------------------------------
// Borcherds products.

#[derive(Clone, Debug, PartialEq)]
pub struct BorcherdsData {
    /// `(1/24) Σ_ℓ f(0, ℓ)`.
    pub a: Rat,
    /// `(1/2) Σ_{ℓ>0} f(0, ℓ) ℓ`, lattice coordinates.
    pub b: DualVector,
    /// `(1/(2 rank)) Σ_ℓ f(0, ℓ)(ℓ, ℓ)`.
    pub c: Rat,
    /// `Σ_{n<0} σ₀(−n) f(n, 0)`.
    pub d: i64,
    /// `η^{f(0,0)} ∏_{ℓ>0} (ϑ_ℓ/η)^{f(0,ℓ)}`.
    pub leading_spec: ThetaBlockSpec,
}

impl BorcherdsData {
    pub fn leading_block(&self, qprec: &Rat) -> Result<FourierSeries> {
        self.leading_spec.build(qprec)
    }
}

fn sigma0(n: i64) -> i64 {
    (1..=n).filter(|d| n % d == 0).count() as i64
}

fn as_int(v: &Rat, n: Rat, ell: String) -> Result<i64> {
    if v.is_integer() {
        Ok(*v.numer() as i64)
    } else {
        Err(Error::NonIntegralSingular {
            n: n.to_string(),
            ell,
            value: v.to_string(),
        })
    }
}

/// Product data of a weak index-1 form of weight 0.
pub fn borcherds_data(psi: &FourierSeries) -> Result<BorcherdsData> {
    let l = psi.lattice_arc().clone();
    if !psi.has_integral_zeta() {
        return Err(Error::HalfIntegralExponents);
    }
    // singular coefficients must be integral
    for (q, key, v) in psi.terms() {
        let c: Vec<i64> = key.iter().map(|x| (*x / 2) as i64).collect();
        let hyp = int(2) * rat(q as i128, 24) - l.dual_norm(&c);
        if !hyp.is_positive() && !v.is_integer() {
            return Err(Error::NonIntegralSingular {
                n: rat(q as i128, 24).to_string(),
                ell: psi.vector_of(key).to_string(),
                value: v.to_string(),
            });
        }
    }
    let r = l.rank();
    let zero = psi.slice24(0).cloned().unwrap_or_default();
    let mut sum = Rat::zero();
    let mut b = DualVector::zero(r);
    let mut c_sum = Rat::zero();
    let mut thetas = Vec::new();
    for (key, v) in &zero {
        let c: Vec<i64> = key.iter().map(|x| (*x / 2) as i64).collect();
        sum += v;
        c_sum += v * l.dual_norm(&c);
        if is_positive(&c) {
            let ell = l.from_dual_coords(&c);
            for (bi, ei) in b.coords.iter_mut().zip(&ell.coords) {
                *bi += v * ei / int(2);
            }
            thetas.push((c, as_int(v, Rat::zero(), ell.to_string())?));
        }
    }
    let f00 = zero.get(&zero_key(r)).copied().unwrap_or_else(Rat::zero);
    let f00 = as_int(&f00, Rat::zero(), "0".into())?;
    let mut d = 0i64;
    for (q, poly) in psi.slices() {
        if *q < 0 && q % 24 == 0 {
            if let Some(v) = poly.get(&zero_key(r)) {
                d += sigma0(-q / 24) * as_int(v, rat(*q as i128, 24), "0".into())?;
            }
        }
    }
    Ok(BorcherdsData {
        a: sum / int(24),
        b,
        c: if r == 0 { Rat::zero() } else { c_sum / int(2 * r as i128) },
        d,
        leading_spec: ThetaBlockSpec {
            eta_pow: f00,
            thetas,
            lattice: Some(l),
        },
    })
}

/// Reads `f(N, ℓ)` from the table of `psi`, extending beyond its precision
/// through invariance under `(2N − (ℓ,ℓ), ℓ mod L)`.
pub struct OrbitTable<'a> {
    psi: &'a FourierSeries,
    disc: crate::lattice::DiscriminantGroup,
    /// A vector of minimal norm in each class (dual coordinates).
    minimal: Vec<Vec<i64>>,
    pub support_bound: Rat,
}

impl<'a> OrbitTable<'a> {
    pub fn new(psi: &'a FourierSeries) -> Self {
        let l = psi.lattice();
        let disc = l.discriminant_group();
        let norms = l.class_minimal_norms(&disc);
        let top = norms.iter().max().copied().unwrap_or_else(Rat::zero);
        let mut minimal: Vec<Option<Vec<i64>>> = vec![None; disc.order as usize];
        for c in l.dual_vectors_up_to(&top) {
            let i = disc.class_index(&c);
            if minimal[i].is_none() && l.dual_norm(&c) == norms[i] {
                minimal[i] = Some(c);
            }
        }
        OrbitTable {
            psi,
            disc,
            minimal: minimal.into_iter().map(|m| m.expect("class has a minimal vector")).collect(),
            support_bound: top,
        }
    }

    /// `f(N, ℓ)` for integral `N` and `ℓ` in dual coordinates.
    pub fn get(&self, n: i64, c: &[i64]) -> Result<Rat> {
        let key: ZetaKey = c.iter().map(|x| (2 * x) as i32).collect();
        if 24 * n < self.psi.prec24() {
            return Ok(self.psi.coeff24(24 * n, &key));
        }
        let l = self.psi.lattice();
        let hyp = int(2 * n as i128) - l.dual_norm(c);
        if hyp < -self.support_bound {
            return Ok(Rat::zero());
        }
        let rep = &self.minimal[self.disc.class_index(c)];
        let n2 = (hyp + l.dual_norm(rep)) / int(2);
        debug_assert!(n2.is_integer());
        let n2 = *n2.numer() as i64;
        if 24 * n2 >= self.psi.prec24() {
            return Err(Error::PrecisionExhausted {
                n: n.to_string(),
                ell: l.from_dual_coords(c).to_string(),
            });
        }
        let rkey: ZetaKey = rep.iter().map(|x| (2 * x) as i32).collect();
        Ok(self.psi.coeff24(24 * n2, &rkey))
    }
}

/// `Σ_{d>0} f(d²n, dℓ)` for a singular index `2n − (ℓ, ℓ) < 0`.
pub fn divisor_multiplicity(psi: &FourierSeries, n: i64, ell: &DualVector) -> Result<i64> {
    let l = psi.lattice();
    let c = l.to_dual_coords(ell)?;
    let hyp = int(2 * n as i128) - l.dual_norm(&c);
    if !hyp.is_negative() {
        return Err(Error::NotSingular {
            n: n.to_string(),
            ell: ell.to_string(),
        });
    }
    let table = OrbitTable::new(psi);
    let mut total = Rat::zero();
    let mut d = 1i64;
    while hyp * int((d * d) as i128) >= -table.support_bound {
        let dc: Vec<i64> = c.iter().map(|x| d * x).collect();
        total += table.get(d * d * n, &dc)?;
        d += 1;
    }
    as_int(&total, int(n as i128), ell.to_string())
}

/// Generalized binomial coefficient `binom(f, j)`.
fn binomial(f: &Rat, j: i64) -> Rat {
    let mut out = Rat::one();
    for i in 0..j {
        out = rational::mul(&out, &((f - int(i as i128)) / int((i + 1) as i128)));
    }
    out
}

type Sparse = FxHashMap<(i64, ZetaKey), Rat>;

/// `q^A ζ^B ξ^C ∏_{(n,ℓ,m)>0} (1 − qⁿ ζ^ℓ ξ^m)^{f(nm,ℓ)}` regrouped in powers
/// of `ξ`, for `ξ^C, …, ξ^{C+M}` and q-exponents below `qprec`.
pub fn borcherds_expand(psi: &FourierSeries, fj_order: usize, qprec: &Rat) -> Result<FJExpansion> {
    let data = borcherds_data(psi)?;
    if !data.c.is_integer() || data.c.is_negative() {
        return Err(Error::Unsupported(format!("non-integral ξ-order C = {}", data.c)));
    }
    let c0 = *data.c.numer() as usize;
    let l = psi.lattice_arc().clone();
    let r = l.rank();
    let prec = crate::qseries::to_q24(qprec)?;
    let theta0 = data.leading_spec.build24(prec)?;
    let cap = prec - theta0.ord24();
    let table = OrbitTable::new(psi);
    let big_m = fj_order as i64;

    // E[j]: coefficient of ξ^j in the product over m >= 1
    let mut e: Vec<Sparse> = vec![Sparse::default(); fj_order + 1];
    e[0].insert((0, zero_key(r)), Rat::one());
    let top_n = Integer::div_ceil(&cap, &24);
    for m in 1..=big_m {
        for n in 0..top_n {
            let big_n = n * m;
            // f(nm, ℓ) can only be nonzero for (ℓ,ℓ) <= 2nm + m(L)
            let factors: Vec<(Vec<i64>, Rat)> = if 24 * big_n < psi.prec24() {
                psi.slice24(24 * big_n)
                    .map(|p| {
                        p.iter()
                            .map(|(k, v)| (k.iter().map(|x| (*x / 2) as i64).collect(), *v))
                            .collect()
                    })
                    .unwrap_or_default()
            } else {
                let bound = int(2 * big_n as i128) + table.support_bound;
                let mut out = Vec::new();
                for c in l.dual_vectors_up_to(&bound) {
                    let v = table.get(big_n, &c)?;
                    if !v.is_zero() {
                        out.push((c, v));
                    }
                }
                out
            };
            for (c, f) in factors {
                let xk: ZetaKey = c.iter().map(|x| (2 * x) as i32).collect();
                apply_factor(&mut e, m, 24 * n, &xk, &f, cap);
            }
        }
    }

    let mut coeffs: Vec<FourierSeries> = (0..c0)
        .map(|_| FourierSeries::zero24(l.clone(), prec))
        .collect();
    for (j, ej) in e.into_iter().enumerate() {
        let mut slices: BTreeMap<i64, ZetaPoly> = BTreeMap::new();
        for ((q, k), v) in ej {
            if !v.is_zero() {
                slices.entry(q).or_default().insert(k, v);
            }
        }
        let form = l
            .gram_rat()
            .into_iter()
            .map(|row| row.into_iter().map(|g| g * int(j as i128)).collect())
            .collect();
        let ej = FourierSeries::from_parts(l.clone(), form, Some(Rat::zero()), cap, slices);
        coeffs.push(theta0.mul(&ej)?);
    }
    let weight = data.leading_spec.weight();
    Ok(FJExpansion {
        lattice: l,
        weight,
        coeffs,
        fj_order,
        symmetric: false,
        borcherds: Some(data),
    })
}

/// `E ← E · (1 − X)^f` with `X = q^{q24/24} ζ^{key/2} ξ^m`, truncated in ξ and q.
fn apply_factor(e: &mut [Sparse], m: i64, q24: i64, key: &ZetaKey, f: &Rat, cap: i64) {
    let top = e.len() as i64 - 1;
    let jmax = top / m;
    let coeffs: Vec<Rat> = (1..=jmax)
        .map(|j| {
            let b = binomial(f, j);
            if j % 2 == 1 {
                -b
            } else {
                b
            }
        })
        .collect();
    // descending ξ-degree so that every source is still the old value
    for t in (1..=top).rev() {
        let mut add: Sparse = Sparse::default();
        for j in 1..=jmax {
            let s = t - j * m;
            if s < 0 {
                break;
            }
            let cj = &coeffs[(j - 1) as usize];
            if cj.is_zero() {
                continue;
            }
            let dq = j * q24;
            let dk: ZetaKey = key.iter().map(|x| x * j as i32).collect();
            for ((q, k), v) in &e[s as usize] {
                if q + dq >= cap {
                    continue;
                }
                let nk = key_add(k, &dk);
                let entry = add.entry((q + dq, nk)).or_insert_with(Rat::zero);
                rational::fma(entry, cj, v);
            }
        }
        let target = &mut e[t as usize];
        for (k, v) in add {
            let entry = target.entry(k).or_insert_with(Rat::zero);
            *entry = rational::add(entry, &v);
        }
    }
}
