//! Sparse exact Fourier series in `q` and the lattice variables `ζ`.
//!
//! A [`FourierSeries`] stores coefficients `f(n, ℓ)` of `qⁿ ζ^ℓ` with
//! `n ∈ (1/24)ℤ` and `ℓ ∈ (1/2)L∨`, truncated at a q-precision: every
//! coefficient with `n >= qprec` is *unknown*, not zero. Precision is
//! propagated pessimistically through every operation, and equality only
//! compares the range both operands know.
//!
//! Internally q-exponents are integers in units of 1/24 and ζ-exponents are
//! integer vectors of *doubled* dual coordinates, so that the `ζ^{1/2}` of the
//! odd theta function needs no special casing.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::lattice::{DualVector, GramLattice, LatticeRef};
use crate::par;
use crate::rational::{self, int, rat, Rat};

/// Doubled dual coordinates of a ζ-exponent.
pub type ZetaKey = SmallVec<[i32; 6]>;
/// A Laurent polynomial in ζ.
pub type ZetaPoly = BTreeMap<ZetaKey, Rat>;

/// Precision of a series known exactly (a finite Laurent polynomial).
pub const EXACT: i64 = i64::MAX / 8;

#[inline]
fn prec_shift(p: i64, by: i64) -> i64 {
    if p >= EXACT {
        EXACT
    } else {
        (p + by).min(EXACT)
    }
}

/// Convert a rational q-exponent to 24ths.
pub fn to_q24(q: &Rat) -> Result<i64> {
    let x = q * int(24);
    if x.is_integer() {
        Ok(*x.numer() as i64)
    } else {
        Err(Error::BadQExponent(q.to_string()))
    }
}

pub fn from_q24(q: i64) -> Rat {
    rat(q as i128, 24)
}

#[inline]
pub(crate) fn key_add(a: &ZetaKey, b: &ZetaKey) -> ZetaKey {
    a.iter().zip(b.iter()).map(|(x, y)| x + y).collect()
}

pub(crate) fn zero_key(rank: usize) -> ZetaKey {
    SmallVec::from_elem(0, rank)
}

/// A monomial exponent `qⁿ ζ^ℓ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Exponent {
    pub qexp: Rat,
    pub zeta: DualVector,
}

#[derive(Clone, Debug)]
pub struct FourierSeries {
    lattice: Arc<GramLattice>,
    /// Index quadratic form in the coordinates `z` of `𝔷 = Σ z_j α_j`;
    /// a form of lattice index `t` has `index_form = t·G`.
    index_form: Vec<Vec<Rat>>,
    weight: Option<Rat>,
    prec: i64,
    slices: BTreeMap<i64, ZetaPoly>,
}

impl PartialEq for FourierSeries {
    fn eq(&self, other: &Self) -> bool {
        self.lattice == other.lattice
            && self.prec == other.prec
            && self.slices == other.slices
            && self.index_form == other.index_form
            && self.weight == other.weight
    }
}

impl FourierSeries {
    pub(crate) fn from_parts(
        lattice: Arc<GramLattice>,
        index_form: Vec<Vec<Rat>>,
        weight: Option<Rat>,
        prec: i64,
        slices: BTreeMap<i64, ZetaPoly>,
    ) -> Self {
        let mut s = FourierSeries {
            lattice,
            index_form,
            weight,
            prec,
            slices,
        };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let prec = self.prec;
        self.slices.retain(|q, poly| {
            poly.retain(|_, c| !c.is_zero());
            *q < prec && !poly.is_empty()
        });
    }

    pub fn zero(lattice: Arc<GramLattice>, qprec: &Rat) -> Result<Self> {
        let r = lattice.rank();
        Ok(FourierSeries {
            lattice,
            index_form: vec![vec![Rat::zero(); r]; r],
            weight: None,
            prec: to_q24(qprec)?,
            slices: BTreeMap::new(),
        })
    }

    pub(crate) fn zero24(lattice: Arc<GramLattice>, prec: i64) -> Self {
        let r = lattice.rank();
        FourierSeries {
            lattice,
            index_form: vec![vec![Rat::zero(); r]; r],
            weight: None,
            prec,
            slices: BTreeMap::new(),
        }
    }

    /// The constant 1, known exactly.
    pub fn one(lattice: Arc<GramLattice>) -> Self {
        let r = lattice.rank();
        let mut slices = BTreeMap::new();
        let mut poly = ZetaPoly::new();
        poly.insert(zero_key(r), Rat::one());
        slices.insert(0, poly);
        FourierSeries {
            lattice,
            index_form: vec![vec![Rat::zero(); r]; r],
            weight: Some(Rat::zero()),
            prec: EXACT,
            slices,
        }
    }

    pub fn lattice(&self) -> &GramLattice {
        &self.lattice
    }

    pub fn lattice_arc(&self) -> &Arc<GramLattice> {
        &self.lattice
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn weight(&self) -> Option<Rat> {
        self.weight
    }

    pub fn with_weight(mut self, w: Option<Rat>) -> Self {
        self.weight = w;
        self
    }

    pub fn index_form(&self) -> &[Vec<Rat>] {
        &self.index_form
    }

    pub(crate) fn with_index_form(mut self, f: Vec<Vec<Rat>>) -> Self {
        self.index_form = f;
        self
    }

    /// Scalar lattice index `t` with `index_form = t·G`, if there is one.
    pub fn jacobi_index(&self) -> Option<Rat> {
        let g = self.lattice.gram();
        if g.is_empty() {
            return Some(Rat::zero());
        }
        let t = self.index_form[0][0] / int(g[0][0] as i128);
        for (i, row) in g.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if self.index_form[i][j] != t * int(*x as i128) {
                    return None;
                }
            }
        }
        Some(t)
    }

    /// Truncation bound; `None` for an exactly known series.
    pub fn qprec(&self) -> Option<Rat> {
        (self.prec < EXACT).then(|| from_q24(self.prec))
    }

    pub fn prec24(&self) -> i64 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.slices.is_empty()
    }

    /// Least stored q-exponent.
    pub fn qorder(&self) -> Option<Rat> {
        self.slices.keys().next().map(|&q| from_q24(q))
    }

    /// Least stored exponent in 24ths; the precision itself for the zero series.
    pub(crate) fn ord24(&self) -> i64 {
        self.slices.keys().next().copied().unwrap_or(self.prec)
    }

    pub fn num_terms(&self) -> usize {
        self.slices.values().map(|p| p.len()).sum()
    }

    pub fn slices(&self) -> &BTreeMap<i64, ZetaPoly> {
        &self.slices
    }

    pub fn slice24(&self, q: i64) -> Option<&ZetaPoly> {
        self.slices.get(&q)
    }

    /// Iterate `(q24, key, coefficient)` in storage order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &ZetaKey, &Rat)> {
        self.slices
            .iter()
            .flat_map(|(q, p)| p.iter().map(move |(k, c)| (*q, k, c)))
    }

    pub fn coeff24(&self, q: i64, key: &[i32]) -> Rat {
        self.slices
            .get(&q)
            .and_then(|p| p.get(key))
            .copied()
            .unwrap_or_else(Rat::zero)
    }

    /// Coefficient of `qⁿ ζ^ℓ`; `None` when `n` is beyond the known range.
    pub fn coeff(&self, e: &Exponent) -> Result<Option<Rat>> {
        let q = to_q24(&e.qexp)?;
        if q >= self.prec {
            return Ok(None);
        }
        let key = self.key_of(&e.zeta)?;
        Ok(Some(self.coeff24(q, &key)))
    }

    /// Doubled dual coordinates of a vector of `(1/2)L∨`.
    pub fn key_of(&self, v: &DualVector) -> Result<ZetaKey> {
        let doubled = v.scale(&int(2));
        let c = self.lattice.to_dual_coords(&doubled)?;
        Ok(c.into_iter().map(|x| x as i32).collect())
    }

    /// The ζ-exponent of a key, in lattice coordinates.
    pub fn vector_of(&self, key: &[i32]) -> DualVector {
        let c: Vec<i64> = key.iter().map(|&x| x as i64).collect();
        self.lattice.from_dual_coords(&c).scale(&rat(1, 2))
    }

    pub fn exponents(&self) -> Vec<(Exponent, Rat)> {
        self.terms()
            .map(|(q, k, c)| {
                (
                    Exponent {
                        qexp: from_q24(q),
                        zeta: self.vector_of(k),
                    },
                    *c,
                )
            })
            .collect()
    }

    /// Does every stored ζ-exponent lie in `L∨` (not just `(1/2)L∨`)?
    pub fn has_integral_zeta(&self) -> bool {
        self.terms().all(|(_, k, _)| k.iter().all(|x| x % 2 == 0))
    }

    pub fn truncate24(mut self, prec: i64) -> Self {
        if prec < self.prec {
            self.prec = prec;
            self.normalize();
        }
        self
    }

    pub fn truncate(self, qprec: &Rat) -> Result<Self> {
        Ok(self.truncate24(to_q24(qprec)?))
    }

    pub fn scale(&self, k: &Rat) -> Self {
        let mut out = self.clone();
        for poly in out.slices.values_mut() {
            for c in poly.values_mut() {
                *c = rational::mul(c, k);
            }
        }
        out.normalize();
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&int(-1))
    }

    /// Multiply by the monomial `q^{q24/24} ζ^{key/2}` (exact shift).
    pub fn shift(&self, q24: i64, key: &ZetaKey) -> Self {
        let slices = self
            .slices
            .iter()
            .map(|(q, p)| (q + q24, p.iter().map(|(k, c)| (key_add(k, key), *c)).collect()))
            .collect();
        FourierSeries {
            lattice: self.lattice.clone(),
            index_form: self.index_form.clone(),
            weight: self.weight,
            prec: prec_shift(self.prec, q24),
            slices,
        }
    }

    /// Lift a rank-0 series onto `lattice` (ζ-exponent 0 everywhere).
    fn promoted(&self, lattice: &Arc<GramLattice>) -> Self {
        let r = lattice.rank();
        let slices = self
            .slices
            .iter()
            .map(|(q, p)| {
                let c = p.get(&ZetaKey::new()).copied().unwrap_or_else(Rat::zero);
                let mut np = ZetaPoly::new();
                np.insert(zero_key(r), c);
                (*q, np)
            })
            .collect();
        FourierSeries::from_parts(
            lattice.clone(),
            vec![vec![Rat::zero(); r]; r],
            self.weight,
            self.prec,
            slices,
        )
    }

    /// Bring two operands onto a common lattice.
    fn align<'a>(
        a: &'a FourierSeries,
        b: &'a FourierSeries,
    ) -> Result<(std::borrow::Cow<'a, FourierSeries>, std::borrow::Cow<'a, FourierSeries>)> {
        use std::borrow::Cow;
        if Arc::ptr_eq(&a.lattice, &b.lattice) || a.lattice == b.lattice {
            return Ok((Cow::Borrowed(a), Cow::Borrowed(b)));
        }
        if a.rank() == 0 {
            return Ok((Cow::Owned(a.promoted(&b.lattice)), Cow::Borrowed(b)));
        }
        if b.rank() == 0 {
            return Ok((Cow::Borrowed(a), Cow::Owned(b.promoted(&a.lattice))));
        }
        Err(Error::LatticeMismatch)
    }

    pub fn add(&self, other: &FourierSeries) -> Result<FourierSeries> {
        let (a, b) = Self::align(self, other)?;
        let index_form = if a.is_zero() {
            b.index_form.clone()
        } else if b.is_zero() || a.index_form == b.index_form {
            a.index_form.clone()
        } else {
            return Err(Error::IndexMismatch);
        };
        let weight = if a.is_zero() {
            b.weight
        } else if b.is_zero() || a.weight == b.weight {
            a.weight
        } else {
            None
        };
        let prec = a.prec.min(b.prec);
        let mut slices = a.slices.clone();
        for (q, poly) in &b.slices {
            if *q >= prec {
                continue;
            }
            let target = slices.entry(*q).or_default();
            for (k, c) in poly {
                let e = target.entry(k.clone()).or_insert_with(Rat::zero);
                *e = rational::add(e, c);
            }
        }
        Ok(FourierSeries::from_parts(
            a.lattice.clone(),
            index_form,
            weight,
            prec,
            slices,
        ))
    }

    pub fn sub(&self, other: &FourierSeries) -> Result<FourierSeries> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FourierSeries) -> Result<FourierSeries> {
        self.mul_capped(other, EXACT)
    }

    /// Cauchy product, computing only exponents below `cap` (in 24ths).
    pub fn mul_capped(&self, other: &FourierSeries, cap: i64) -> Result<FourierSeries> {
        let (a, b) = Self::align(self, other)?;
        let prec = prec_shift(a.prec, b.ord24())
            .min(prec_shift(b.prec, a.ord24()))
            .min(cap);
        let r = a.rank();
        let index_form: Vec<Vec<Rat>> = (0..r)
            .map(|i| (0..r).map(|j| a.index_form[i][j] + b.index_form[i][j]).collect())
            .collect();
        let weight = match (a.weight, b.weight) {
            (Some(x), Some(y)) => Some(x + y),
            _ => None,
        };

        let mut targets: Vec<i64> = Vec::new();
        for qa in a.slices.keys() {
            for qb in b.slices.keys() {
                if qa + qb < prec {
                    targets.push(qa + qb);
                }
            }
        }
        targets.sort_unstable();
        targets.dedup();

        let computed = par::map(&targets, |&t| {
            let mut acc: FxHashMap<ZetaKey, Rat> = FxHashMap::default();
            for (qa, pa) in &a.slices {
                if let Some(pb) = b.slices.get(&(t - qa)) {
                    for (ka, ca) in pa {
                        for (kb, cb) in pb {
                            let e = acc.entry(key_add(ka, kb)).or_insert_with(Rat::zero);
                            rational::fma(e, ca, cb);
                        }
                    }
                }
            }
            let poly: ZetaPoly = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            (t, poly)
        });
        let slices = computed.into_iter().filter(|(_, p)| !p.is_empty()).collect();
        Ok(FourierSeries::from_parts(
            a.lattice.clone(),
            index_form,
            weight,
            prec,
            slices,
        ))
    }

    /// Formal inverse of a series whose leading slice is `c·q^o·ζ⁰`.
    pub fn inverse(&self) -> Result<FourierSeries> {
        let Some((&o, lead)) = self.slices.iter().next() else {
            return Err(Error::NotInvertible("zero series".into()));
        };
        let r = self.rank();
        if lead.len() != 1 || lead.keys().next().unwrap().iter().any(|&x| x != 0) {
            return Err(Error::NotInvertible(
                "leading q-slice is not a ζ-free monomial".into(),
            ));
        }
        let c = *lead.values().next().unwrap();
        let c_inv = c.recip();
        let rel = if self.prec >= EXACT {
            // an exact non-monomial has an infinite inverse; callers cap via truncate
            return Err(Error::NotInvertible(
                "exact series needs a finite precision before inversion".into(),
            ));
        } else {
            self.prec - o
        };
        // normalized tail: u_e = A_{o+e} / c for e > 0
        let tail: Vec<(i64, &ZetaPoly)> = self
            .slices
            .iter()
            .skip(1)
            .map(|(q, p)| (q - o, p))
            .collect();
        let mut inv: BTreeMap<i64, ZetaPoly> = BTreeMap::new();
        let mut first = ZetaPoly::new();
        first.insert(zero_key(r), c_inv);
        inv.insert(0, first);
        for d in 1..rel {
            let mut acc: FxHashMap<ZetaKey, Rat> = FxHashMap::default();
            for (e, pa) in &tail {
                if *e > d {
                    break;
                }
                if let Some(pb) = inv.get(&(d - e)) {
                    for (ka, ca) in pa.iter() {
                        for (kb, cb) in pb {
                            let entry = acc.entry(key_add(ka, kb)).or_insert_with(Rat::zero);
                            rational::fma(entry, ca, cb);
                        }
                    }
                }
            }
            let poly: ZetaPoly = acc
                .into_iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(k, v)| (k, -rational::mul(&v, &c_inv)))
                .collect();
            if !poly.is_empty() {
                inv.insert(d, poly);
            }
        }
        let slices = inv.into_iter().map(|(d, p)| (d - o, p)).collect();
        let index_form = self
            .index_form
            .iter()
            .map(|row| row.iter().map(|x| -x).collect())
            .collect();
        Ok(FourierSeries::from_parts(
            self.lattice.clone(),
            index_form,
            self.weight.map(|w| -w),
            self.prec - 2 * o,
            slices,
        ))
    }

    /// Integer power by square-and-multiply; negative powers go through [`inverse`].
    ///
    /// [`inverse`]: FourierSeries::inverse
    pub fn pow_int(&self, e: i64) -> Result<FourierSeries> {
        if e == 0 {
            let one = FourierSeries::one(self.lattice.clone());
            return Ok(one);
        }
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut result: Option<FourierSeries> = None;
        let mut power = base;
        loop {
            if n & 1 == 1 {
                result = Some(match result {
                    None => power.clone(),
                    Some(r) => r.mul(&power)?,
                });
            }
            n >>= 1;
            if n == 0 {
                break;
            }
            power = power.mul(&power)?;
        }
        Ok(result.expect("nonzero exponent"))
    }

    /// Restrict to `𝔷 = z·v` for an integral `v ∈ L` (lattice coordinates).
    ///
    /// The result lives on the one-variable carrier `A1`, with ζ-exponent
    /// `(ℓ, v)` and index form `vᵀ Q v`.
    pub fn specialize(&self, v: &[i64]) -> Result<FourierSeries> {
        if v.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: v.len(),
            });
        }
        let carrier = Arc::new(GramLattice::named("A1")?);
        let mut slices: BTreeMap<i64, ZetaPoly> = BTreeMap::new();
        for (q, poly) in &self.slices {
            let mut out = ZetaPoly::new();
            for (k, c) in poly {
                let r: i64 = k.iter().zip(v).map(|(a, b)| *a as i64 * b).sum();
                let key: ZetaKey = SmallVec::from_elem(r as i32, 1);
                let e = out.entry(key).or_insert_with(Rat::zero);
                *e = rational::add(e, c);
            }
            slices.insert(*q, out);
        }
        let mut form = Rat::zero();
        for (i, row) in self.index_form.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                form += x * int((v[i] * v[j]) as i128);
            }
        }
        Ok(FourierSeries::from_parts(
            carrier,
            vec![vec![form]],
            self.weight,
            self.prec,
            slices,
        ))
    }

    /// Equal on the common known range (lattices must agree).
    pub fn agrees_with(&self, other: &FourierSeries) -> bool {
        self.first_difference(other).is_none()
    }

    /// First exponent (q24, key) below the common precision where the two differ.
    pub fn first_difference(&self, other: &FourierSeries) -> Option<(i64, ZetaKey)> {
        let Ok((a, b)) = Self::align(self, other) else {
            return Some((i64::MIN, ZetaKey::new()));
        };
        let prec = a.prec.min(b.prec);
        let empty = ZetaPoly::new();
        let qs: std::collections::BTreeSet<i64> = a
            .slices
            .keys()
            .chain(b.slices.keys())
            .copied()
            .filter(|q| *q < prec)
            .collect();
        for q in qs {
            let pa = a.slices.get(&q).unwrap_or(&empty);
            let pb = b.slices.get(&q).unwrap_or(&empty);
            if pa != pb {
                let k = pa
                    .iter()
                    .find(|(k, c)| pb.get(*k) != Some(c))
                    .map(|(k, _)| k.clone())
                    .or_else(|| pb.keys().find(|k| !pa.contains_key(*k)).cloned())
                    .unwrap_or_default();
                return Some((q, k));
            }
        }
        None
    }
}

/// `∏_{n>=1} (1 − qⁿ)^e` as dense integer coefficients of `q^0 … q^{len-1}`.
fn euler_product_pow(e: i64, len: usize) -> Vec<i128> {
    // ∏(1 − qⁿ) by the pentagonal number theorem
    let mut base = vec![0i128; len];
    if len == 0 {
        return base;
    }
    base[0] = 1;
    let mut k: i64 = 1;
    loop {
        let p1 = (k * (3 * k - 1) / 2) as usize;
        if p1 >= len {
            break;
        }
        let s = if k % 2 == 0 { 1 } else { -1 };
        base[p1] += s;
        let p2 = (k * (3 * k + 1) / 2) as usize;
        if p2 < len {
            base[p2] += s;
        }
        k += 1;
    }
    let series = if e < 0 { dense_inverse(&base) } else { base };
    let mut out = vec![0i128; len];
    out[0] = 1;
    let mut n = e.unsigned_abs();
    let mut power = series;
    while n > 0 {
        if n & 1 == 1 {
            out = dense_mul(&out, &power);
        }
        n >>= 1;
        if n > 0 {
            power = dense_mul(&power, &power);
        }
    }
    out
}

fn dense_mul(a: &[i128], b: &[i128]) -> Vec<i128> {
    let len = a.len();
    let mut out = vec![0i128; len];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] = out[i + j]
                .checked_add(x.checked_mul(*y).expect("eta coefficient overflow"))
                .expect("eta coefficient overflow");
        }
    }
    out
}

/// Inverse of a dense series with constant term 1.
fn dense_inverse(a: &[i128]) -> Vec<i128> {
    let len = a.len();
    let mut out = vec![0i128; len];
    if len == 0 {
        return out;
    }
    out[0] = 1;
    for n in 1..len {
        let mut s = 0i128;
        for k in 1..=n {
            s -= a[k] * out[n - k];
        }
        out[n] = s;
    }
    out
}

/// `η(τ)^e` on the rank-0 carrier, known below `prec` (24ths).
pub(crate) fn eta_pow24(e: i64, prec: i64) -> FourierSeries {
    let lattice = Arc::new(GramLattice::trivial());
    // terms q^{(e + 24k)/24} with e + 24k < prec
    let len = if prec <= e {
        0
    } else {
        ((prec - e + 23) / 24) as usize
    };
    let coeffs = euler_product_pow(e, len);
    let mut slices = BTreeMap::new();
    for (k, c) in coeffs.into_iter().enumerate() {
        if c != 0 {
            let mut p = ZetaPoly::new();
            p.insert(ZetaKey::new(), int(c));
            slices.insert(e + 24 * k as i64, p);
        }
    }
    FourierSeries::from_parts(lattice, Vec::new(), Some(rat(e as i128, 2)), prec, slices)
}

/// Dedekind eta `q^{1/24} ∏(1 − qⁿ)` truncated at `qprec`.
pub fn eta(qprec: &Rat) -> Result<FourierSeries> {
    Ok(eta_pow24(1, to_q24(qprec)?))
}

/// `η^e` computed directly from the Euler product.
pub fn eta_power(e: i64, qprec: &Rat) -> Result<FourierSeries> {
    Ok(eta_pow24(e, to_q24(qprec)?))
}

/// `ϑ(τ, (ℓ, 𝔷))` for `ℓ` given by dual coordinates `c`, via the Jacobi
/// triple product sum `Σ_n (−1)ⁿ q^{(2n+1)²/8} ζ^{(2n+1)ℓ/2}`.
pub(crate) fn theta24(lattice: Arc<GramLattice>, c: &[i64], prec: i64) -> FourierSeries {
    let r = lattice.rank();
    let mut slices: BTreeMap<i64, ZetaPoly> = BTreeMap::new();
    let mut k: i64 = 1;
    while 3 * k * k < prec {
        let q = 3 * k * k;
        let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
        let plus: ZetaKey = c.iter().map(|x| (k * x) as i32).collect();
        let minus: ZetaKey = c.iter().map(|x| (-k * x) as i32).collect();
        let poly = slices.entry(q).or_default();
        for (key, s) in [(plus, sign), (minus, -sign)] {
            let e = poly.entry(key).or_insert_with(Rat::zero);
            *e += int(s);
        }
        k += 2;
    }
    let index_form = (0..r)
        .map(|i| (0..r).map(|j| int((c[i] * c[j]) as i128)).collect())
        .collect();
    FourierSeries::from_parts(lattice, index_form, Some(rat(1, 2)), prec, slices)
}

/// The odd Jacobi theta function in the direction of `arg ∈ L∨`:
/// `ϑ(τ, (arg, 𝔷))`, of weight 1/2.
pub fn theta_odd(lattice: Arc<GramLattice>, arg: &DualVector, qprec: &Rat) -> Result<FourierSeries> {
    let c = lattice.to_dual_coords(arg)?;
    Ok(theta24(lattice, &c, to_q24(qprec)?))
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub q: [i128; 2],
    pub l: Vec<[i128; 2]>,
    pub c: [i128; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SeriesJson {
    pub lattice: LatticeRef,
    /// Scalar index `t`; absent when the index form is not a multiple of the Gram matrix.
    pub index: Option<[i128; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index_form: Option<Vec<Vec<[i128; 2]>>>,
    pub weight: Option<[i128; 2]>,
    /// `null` for an exactly known series.
    pub qprec: Option<[i128; 2]>,
    pub terms: Vec<TermJson>,
}

impl FourierSeries {
    pub fn to_json(&self) -> SeriesJson {
        let index = self.jacobi_index();
        SeriesJson {
            lattice: LatticeRef::of(&self.lattice),
            index: index.as_ref().map(rational::to_pair),
            index_form: if index.is_none() {
                Some(
                    self.index_form
                        .iter()
                        .map(|r| r.iter().map(rational::to_pair).collect())
                        .collect(),
                )
            } else {
                None
            },
            weight: self.weight.as_ref().map(rational::to_pair),
            qprec: self.qprec().as_ref().map(rational::to_pair),
            terms: self
                .terms()
                .map(|(q, k, c)| TermJson {
                    q: rational::to_pair(&from_q24(q)),
                    l: self.vector_of(k).coords.iter().map(rational::to_pair).collect(),
                    c: rational::to_pair(c),
                })
                .collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("series serializes")
    }

    pub fn from_json(doc: &SeriesJson) -> Result<FourierSeries> {
        let pair = |p: [i128; 2]| {
            rational::from_pair(p).ok_or_else(|| Error::Format("zero denominator".into()))
        };
        let lattice = Arc::new(doc.lattice.resolve()?);
        let r = lattice.rank();
        let index_form = match (&doc.index, &doc.index_form) {
            (Some(t), _) => {
                let t = pair(*t)?;
                lattice
                    .gram()
                    .iter()
                    .map(|row| row.iter().map(|g| t * int(*g as i128)).collect())
                    .collect()
            }
            (None, Some(f)) => f
                .iter()
                .map(|row| row.iter().map(|p| pair(*p)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?,
            (None, None) => return Err(Error::Format("missing index".into())),
        };
        if index_form.len() != r {
            return Err(Error::Format("index form has wrong size".into()));
        }
        let prec = match doc.qprec {
            Some(p) => to_q24(&pair(p)?)?,
            None => EXACT,
        };
        let weight = doc.weight.map(pair).transpose()?;
        let mut slices: BTreeMap<i64, ZetaPoly> = BTreeMap::new();
        let probe = FourierSeries::zero24(lattice.clone(), prec);
        for t in &doc.terms {
            if t.l.len() != r {
                return Err(Error::Format("term has wrong ζ-dimension".into()));
            }
            let q = to_q24(&pair(t.q)?)?;
            let v = DualVector::new(t.l.iter().map(|p| pair(*p)).collect::<Result<Vec<_>>>()?);
            let key = probe.key_of(&v)?;
            let e = slices.entry(q).or_default().entry(key).or_insert_with(Rat::zero);
            *e += pair(t.c)?;
        }
        Ok(FourierSeries::from_parts(lattice, index_form, weight, prec, slices))
    }

    pub fn from_json_str(s: &str) -> Result<FourierSeries> {
        let doc: SeriesJson = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        FourierSeries::from_json(&doc)
    }
}
