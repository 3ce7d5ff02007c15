//! Theta blocks: products of Dedekind eta and odd Jacobi theta functions.
//!
//! A block is written `Θ_f = η^{f(0)} ∏ (ϑ_a / η)^{f(a)}`. Each factor `ϑ_a`
//! is `ϑ(τ, (a, 𝔷))` for a dual vector `a`, given by its dual coordinates.
//! Without a lattice the block is a classical one-variable form, carried on
//! `A1` with `ϑ_a = ϑ(τ, a z)`.

pub mod parse;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{normalize_sign, GramLattice};
use crate::qseries::{eta_pow24, theta24, to_q24, FourierSeries, EXACT};
use crate::rational::{int, rat, Rat};

pub use parse::parse_block;

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaBlockSpec {
    /// `f(0)` in the `η^{f(0)} ∏ (ϑ_a/η)^{f(a)}` normalization.
    pub eta_pow: i64,
    /// `(dual coordinates of a, f(a))`.
    pub thetas: Vec<(Vec<i64>, i64)>,
    /// `None` for the one-variable (Eichler–Zagier) case.
    pub lattice: Option<Arc<GramLattice>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockReport {
    pub weight: Rat,
    /// Eichler–Zagier index for one-variable blocks, lattice index otherwise
    /// (`None` when the index form is not a multiple of the Gram matrix).
    pub index: Option<Rat>,
    /// q-order predicted from the factor orders.
    pub q_order: Rat,
    /// Holomorphy certificate on the computed range (`None` if unsupported).
    pub holomorphic_up_to_prec: Option<bool>,
    /// Least exponent actually present in the expansion.
    pub q_vanishing_order: Option<Rat>,
}

impl ThetaBlockSpec {
    /// The constant block `1`.
    pub fn empty() -> Self {
        ThetaBlockSpec {
            eta_pow: 0,
            thetas: Vec::new(),
            lattice: None,
        }
    }

    /// One-variable block `η^{f(0)} ∏ (ϑ_a/η)^{f(a)}`.
    pub fn one_variable(eta_pow: i64, thetas: &[(i64, i64)]) -> Self {
        ThetaBlockSpec {
            eta_pow,
            thetas: thetas.iter().map(|&(a, m)| (vec![a], m)).collect(),
            lattice: None,
        }
    }

    /// Block written as `η^{raw} ∏ ϑ_a^{m_a}` (the way products are displayed).
    pub fn from_display(lattice: Option<Arc<GramLattice>>, raw_eta: i64, thetas: Vec<(Vec<i64>, i64)>) -> Self {
        let total: i64 = thetas.iter().map(|(_, m)| m).sum();
        ThetaBlockSpec {
            eta_pow: raw_eta + total,
            thetas,
            lattice,
        }
    }

    /// One-variable `η^{raw} ∏ ϑ_{a_i}` with one factor per list entry.
    pub fn one_variable_display(raw_eta: i64, args: &[i64]) -> Self {
        Self::from_display(None, raw_eta, args.iter().map(|&a| (vec![a], 1)).collect())
    }

    fn carrier(&self) -> Result<Arc<GramLattice>> {
        match &self.lattice {
            Some(l) => Ok(l.clone()),
            None => Ok(Arc::new(GramLattice::named("A1")?)),
        }
    }

    fn rank(&self) -> usize {
        self.lattice.as_ref().map_or(1, |l| l.rank())
    }

    /// Exponent of η once every `ϑ_a/η` is multiplied out.
    pub fn raw_eta_power(&self) -> i64 {
        self.eta_pow - self.thetas.iter().map(|(_, m)| m).sum::<i64>()
    }

    pub fn weight(&self) -> Rat {
        rat(self.eta_pow as i128, 2)
    }

    /// `f(0)/24 + Σ f(a)/12`.
    pub fn q_order(&self) -> Rat {
        let m: i64 = self.thetas.iter().map(|(_, m)| m).sum();
        rat(self.eta_pow as i128, 24) + rat(m as i128, 12)
    }

    /// `Σ f(a) a aᵀ` in `z`-coordinates.
    pub fn index_form(&self) -> Vec<Vec<Rat>> {
        let r = self.rank();
        let mut f = vec![vec![Rat::zero(); r]; r];
        for (c, m) in &self.thetas {
            for i in 0..r {
                for j in 0..r {
                    f[i][j] += int((m * c[i] * c[j]) as i128);
                }
            }
        }
        f
    }

    /// Eichler–Zagier index `(1/2) Σ f(a) a²` (one-variable) or the scalar
    /// lattice index.
    pub fn index(&self) -> Option<Rat> {
        let f = self.index_form();
        match &self.lattice {
            None => Some(f[0][0] / int(2)),
            Some(l) => {
                if l.rank() == 0 {
                    return Some(Rat::zero());
                }
                let t = f[0][0] / int(l.gram()[0][0] as i128);
                let ok = l
                    .gram()
                    .iter()
                    .enumerate()
                    .all(|(i, row)| row.iter().enumerate().all(|(j, g)| f[i][j] == t * int(*g as i128)));
                ok.then_some(t)
            }
        }
    }

    /// A diagnostic when some theta argument vanishes (the block is then 0).
    pub fn degenerate(&self) -> Option<String> {
        self.thetas
            .iter()
            .find(|(c, m)| *m != 0 && c.iter().all(|x| *x == 0))
            .map(|_| "a theta argument is zero, so the block vanishes identically".to_string())
    }

    /// Merge equal arguments after sign normalization. Returns the overall sign.
    fn normalized(&self) -> (i64, BTreeMap<Vec<i64>, i64>) {
        let mut sign = 1;
        let mut merged: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
        for (c, m) in &self.thetas {
            if *m == 0 {
                continue;
            }
            let (n, flipped) = normalize_sign(c);
            if flipped && m % 2 != 0 {
                sign = -sign;
            }
            *merged.entry(n).or_insert(0) += m;
        }
        merged.retain(|_, m| *m != 0);
        (sign, merged)
    }

    /// Expand the block up to `qprec`.
    pub fn build(&self, qprec: &Rat) -> Result<FourierSeries> {
        self.build24(to_q24(qprec)?)
    }

    pub(crate) fn build24(&self, prec: i64) -> Result<FourierSeries> {
        let lattice = self.carrier()?;
        let r = lattice.rank();
        if let Some((c, _)) = self.thetas.iter().find(|(c, _)| c.len() != r) {
            return Err(Error::DimensionMismatch {
                expected: r,
                found: c.len(),
            });
        }
        let weight = Some(self.weight());
        let index_form = self.index_form();
        if self.degenerate().is_some() {
            return Ok(FourierSeries::zero24(lattice, prec)
                .with_weight(weight)
                .with_index_form(index_form));
        }
        let (sign, merged) = self.normalized();
        if let Some((_, m)) = merged.iter().find(|(_, m)| **m < 0) {
            return Err(Error::NotInvertible(format!(
                "theta factor with negative multiplicity {m}"
            )));
        }
        for i in 0..r {
            let s: i64 = merged.iter().map(|(c, m)| c[i] * m).sum();
            if s % 2 != 0 {
                return Err(Error::HalfIntegralExponents);
            }
        }

        // factor orders in 24ths; each factor only needs precision
        // prec − (total order − own order)
        let raw = self.raw_eta_power();
        let total: i64 = raw + merged.values().map(|m| 3 * m).sum::<i64>();
        let mut acc = FourierSeries::one(lattice.clone());
        let mut done = 0i64;
        for (c, m) in &merged {
            let own = 3 * m;
            let need = prec - total + own;
            let theta = theta24(lattice.clone(), c, (need - 3 * (m - 1)).max(0));
            let factor = if *m == 1 { theta } else { theta.pow_int(*m)? };
            done += own;
            acc = acc.mul_capped(&factor, prec - total + done)?;
        }
        let eta = eta_pow24(raw, prec - total + raw);
        acc = acc.mul_capped(&eta, prec)?;
        let acc = if sign < 0 { acc.neg() } else { acc };
        Ok(acc.with_weight(weight).with_index_form(index_form))
    }

    pub fn report(&self, qprec: &Rat) -> Result<BlockReport> {
        let s = self.build(qprec)?;
        let holo = match holomorphy_check(&s) {
            Ok(b) => Some(b),
            Err(Error::Unsupported(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(BlockReport {
            weight: self.weight(),
            index: self.index(),
            q_order: self.q_order(),
            holomorphic_up_to_prec: holo,
            q_vanishing_order: s.qorder(),
        })
    }
}

/// Support check `2n − (ℓ,ℓ) >= 0` (lattice index 1) or `4Nn − r² >= 0`
/// (one-variable index `N`) on every stored coefficient.
pub fn holomorphy_check(s: &FourierSeries) -> Result<bool> {
    let Some(t) = s.jacobi_index() else {
        return Err(Error::Unsupported("index form is not a multiple of the Gram matrix".into()));
    };
    let l = s.lattice();
    if l.is_one_variable() {
        // r = key / 2, so 4Nn − r² >= 0  <=>  16 N n − key² >= 0 with n = q24/24
        return Ok(s.terms().all(|(q, k, _)| {
            let key = k[0] as i128;
            int(16) * t * rat(q as i128, 24) - int(key * key) >= Rat::zero()
        }));
    }
    if t != int(1) {
        return Err(Error::Unsupported(format!(
            "holomorphy test for lattice index {t} (only index 1 is implemented)"
        )));
    }
    Ok(s.terms().all(|(q, k, _)| {
        let c: Vec<i64> = k.iter().map(|&x| x as i64).collect();
        // (ℓ,ℓ) = dual_norm(key) / 4
        let norm = l.dual_norm(&c) / int(4);
        !(int(2) * rat(q as i128, 24) - norm).is_negative()
    }))
}

// ---------------------------------------------------------------------------
// The lattice blocks of index 1.

fn l4_common() -> Vec<Vec<i64>> {
    vec![
        vec![0, 1, -1, 0],
        vec![0, 1, 1, 0],
        vec![0, 1, 0, -1],
        vec![0, 1, 0, 1],
        vec![0, 0, 1, -1],
        vec![0, 0, 1, 1],
    ]
}

fn l6_common() -> Vec<Vec<i64>> {
    vec![
        vec![0, 0, 1, 0, 0, 0],
        vec![0, 0, 0, 1, 0, 0],
        vec![0, 0, 1, -1, 0, 0],
        vec![0, 1, 0, 0, 0, -1],
        vec![0, 1, 0, 0, 0, 1],
    ]
}

fn lattice_spec(name: &str, raw_eta: i64, args: Vec<Vec<i64>>) -> ThetaBlockSpec {
    let l = Arc::new(GramLattice::named(name).expect("built-in lattice"));
    ThetaBlockSpec::from_display(Some(l), raw_eta, args.into_iter().map(|c| (c, 1)).collect())
}

/// The named lattice blocks, by the names the command line accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedBlock {
    L4,
    L4First,
    L4Second,
    L6,
    L6First,
    L6Second,
}

impl NamedBlock {
    pub const ALL: [NamedBlock; 6] = [
        NamedBlock::L4,
        NamedBlock::L4First,
        NamedBlock::L4Second,
        NamedBlock::L6,
        NamedBlock::L6First,
        NamedBlock::L6Second,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedBlock::L4 => "thetaL4",
            NamedBlock::L4First => "thetaL4_1",
            NamedBlock::L4Second => "thetaL4_2",
            NamedBlock::L6 => "thetaL6",
            NamedBlock::L6First => "thetaL6_1",
            NamedBlock::L6Second => "thetaL6_2",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == s)
    }

    pub fn spec(self) -> ThetaBlockSpec {
        match self {
            NamedBlock::L4 => {
                let mut a = vec![vec![2, 1, 1, 1]];
                a.extend(l4_common());
                a.extend([vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
                lattice_spec("L4", -6, a)
            }
            NamedBlock::L4First => {
                let mut a = vec![vec![1, 1, 1, 1]];
                a.extend(l4_common());
                a.extend([vec![1, 1, 0, 0], vec![1, 0, 1, 0], vec![1, 0, 0, 1]]);
                lattice_spec("L4", -6, a)
            }
            NamedBlock::L4Second => {
                let mut a = vec![vec![1, 0, 0, 0]];
                a.extend(l4_common());
                a.extend([vec![1, 1, 1, 0], vec![1, 1, 0, 1], vec![1, 0, 1, 1]]);
                lattice_spec("L4", -6, a)
            }
            NamedBlock::L6 => {
                let mut a = l6_common();
                a.extend([
                    vec![2, 1, 0, 0, -1, 0],
                    vec![0, 0, 0, 0, 1, 1],
                    vec![0, 1, 0, 0, 0, 0],
                    vec![0, 0, 0, 0, 0, 1],
                ]);
                lattice_spec("L6", -3, a)
            }
            NamedBlock::L6First => {
                let mut a = l6_common();
                a.extend([
                    vec![1, 0, 0, 0, 0, 0],
                    vec![1, 1, 0, 0, 0, 1],
                    vec![1, 0, 0, 0, -1, 0],
                    vec![1, 1, 0, 0, -1, -1],
                ]);
                lattice_spec("L6", -3, a)
            }
            NamedBlock::L6Second => {
                let mut a = l6_common();
                a.extend([
                    vec![1, 0, 0, 0, -1, -1],
                    vec![1, 1, 0, 0, -1, 0],
                    vec![1, 1, 0, 0, 0, 0],
                    vec![1, 0, 0, 0, 0, 1],
                ]);
                lattice_spec("L6", -3, a)
            }
        }
    }

    pub fn build(self, qprec: &Rat) -> Result<FourierSeries> {
        self.spec().build(qprec)
    }
}

pub fn lattice_block_l4(qprec: &Rat) -> Result<FourierSeries> {
    NamedBlock::L4.build(qprec)
}

pub fn lattice_block_l4_1(qprec: &Rat) -> Result<FourierSeries> {
    NamedBlock::L4First.build(qprec)
}

pub fn lattice_block_l4_2(qprec: &Rat) -> Result<FourierSeries> {
    NamedBlock::L4Second.build(qprec)
}

pub fn lattice_block_l6(qprec: &Rat) -> Result<FourierSeries> {
    NamedBlock::L6.build(qprec)
}

pub fn lattice_block_l6_1(qprec: &Rat) -> Result<FourierSeries> {
    NamedBlock::L6First.build(qprec)
}

pub fn lattice_block_l6_2(qprec: &Rat) -> Result<FourierSeries> {
    NamedBlock::L6Second.build(qprec)
}

// ---------------------------------------------------------------------------
// The one-variable families of weight 2 and 3.

/// Theta arguments of `φ_{2,𝐚}`.
pub fn family_wt2_args(a: [i64; 4]) -> [i64; 10] {
    let [a1, a2, a3, a4] = a;
    [
        2 * a1 + a2 + a4,
        a2,
        a2 + a3,
        a2 + 2 * a3 + 2 * a4,
        a2 + a3 + a4,
        a2 + a3 + 2 * a4,
        a3,
        a3 + a4,
        a3 + 2 * a4,
        a4,
    ]
}

/// Theta arguments of `φ_{3,𝐛}`.
pub fn family_wt3_args(b: [i64; 6]) -> [i64; 9] {
    let [b1, b2, b3, b4, b5, b6] = b;
    [b1, 2 * b2 + b3 - b1, b3, b3 + b4, b3 + 2 * b4, b4, b5, b6, b5 + b6]
}

/// `N(𝐚) = 2a₁² + 2a₁a₂ + 2a₁a₄ + 3a₂² + 5a₂a₃ + 6a₂a₄ + 5a₃² + 10a₃a₄ + 8a₄²`.
pub fn index_wt2(a: [i64; 4]) -> i64 {
    let [a1, a2, a3, a4] = a;
    2 * a1 * a1 + 2 * a1 * a2 + 2 * a1 * a4 + 3 * a2 * a2 + 5 * a2 * a3 + 6 * a2 * a4
        + 5 * a3 * a3
        + 10 * a3 * a4
        + 8 * a4 * a4
}

/// `N(𝐛) = b₁² − 2b₁b₂ − b₁b₃ + 2b₂² + 2b₂b₃ + 2b₃² + 3b₃b₄ + 3b₄² + b₅² + b₅b₆ + b₆²`.
pub fn index_wt3(b: [i64; 6]) -> i64 {
    let [b1, b2, b3, b4, b5, b6] = b;
    b1 * b1 - 2 * b1 * b2 - b1 * b3 + 2 * b2 * b2 + 2 * b2 * b3 + 2 * b3 * b3 + 3 * b3 * b4
        + 3 * b4 * b4
        + b5 * b5
        + b5 * b6
        + b6 * b6
}

/// Specialization vector of `Θ_{L4}` giving `φ_{2,𝐚}`.
pub fn specialization_wt2(a: [i64; 4]) -> [i64; 4] {
    let [a1, a2, a3, a4] = a;
    [a1 - a3 - a4, a2 + a3 + a4, a3 + a4, a4]
}

/// Specialization vector of `Θ_{L6}` giving `φ_{3,𝐛}` up to the sign
/// `SPECIALIZATION_SIGN_WT3`.
pub fn specialization_wt3(b: [i64; 6]) -> [i64; 6] {
    let [b1, b2, b3, b4, b5, b6] = b;
    [b2 - b4, b3 + b4, b5, -b6, b1 - b4, b4]
}

/// `specialize(Θ_{L4}, v(𝐚)) = SPECIALIZATION_SIGN_WT2 · φ_{2,𝐚}`.
pub const SPECIALIZATION_SIGN_WT2: i64 = 1;
/// The substitution `z₄ ↦ −b₆ z` flips one odd factor.
pub const SPECIALIZATION_SIGN_WT3: i64 = -1;

pub fn family_wt2_spec(a: [i64; 4]) -> ThetaBlockSpec {
    ThetaBlockSpec::one_variable_display(-6, &family_wt2_args(a))
}

pub fn family_wt3_spec(b: [i64; 6]) -> ThetaBlockSpec {
    ThetaBlockSpec::one_variable_display(-3, &family_wt3_args(b))
}

pub fn build_family_wt2(a: [i64; 4], qprec: &Rat) -> Result<FourierSeries> {
    family_wt2_spec(a).build(qprec)
}

pub fn build_family_wt3(b: [i64; 6], qprec: &Rat) -> Result<FourierSeries> {
    family_wt3_spec(b).build(qprec)
}

/// `φ_{2,𝐚}` obtained by restricting `Θ_{L4}`.
pub fn family_wt2_via_lattice(a: [i64; 4], qprec: &Rat) -> Result<FourierSeries> {
    let s = lattice_block_l4(qprec)?.specialize(&specialization_wt2(a))?;
    Ok(if SPECIALIZATION_SIGN_WT2 < 0 { s.neg() } else { s })
}

/// `φ_{3,𝐛}` obtained by restricting `Θ_{L6}`.
pub fn family_wt3_via_lattice(b: [i64; 6], qprec: &Rat) -> Result<FourierSeries> {
    let s = lattice_block_l6(qprec)?.specialize(&specialization_wt3(b))?;
    Ok(if SPECIALIZATION_SIGN_WT3 < 0 { s.neg() } else { s })
}

/// Theta arguments of the two blocks whose difference is `φ_{2,𝐚}`.
pub fn corollary_wt2_args(a: [i64; 4], which: u8) -> Result<[i64; 10]> {
    let [a1, a2, a3, a4] = a;
    match which {
        1 => Ok([
            a1,
            a2,
            a2 + a3,
            a2 + 2 * a3 + 2 * a4,
            a1 + a2,
            a2 + a3 + 2 * a4,
            a3,
            a1 - a3,
            a3 + 2 * a4,
            a1 + a2 + a3 + 2 * a4,
        ]),
        2 => Ok([
            a1 - a3 - a4,
            a2,
            a2 + a3,
            a2 + 2 * a3 + 2 * a4,
            a1 + a2 + a3 + a4,
            a2 + a3 + 2 * a4,
            a3,
            a1 + a4,
            a3 + 2 * a4,
            a1 + a2 + a4,
        ]),
        w => Err(Error::Unsupported(format!("corollary block {w} (expected 1 or 2)"))),
    }
}

/// Theta arguments of the two blocks whose difference is `φ_{3,𝐛}`.
pub fn corollary_wt3_args(b: [i64; 6], which: u8) -> Result<[i64; 9]> {
    let [b1, b2, b3, b4, b5, b6] = b;
    match which {
        1 => Ok([
            b5,
            b6,
            b5 + b6,
            b3 + 2 * b4,
            b3,
            b2 - b4,
            b2 + b3 + b4,
            b2 - b1,
            b2 + b3 - b1,
        ]),
        2 => Ok([
            b5,
            b6,
            b5 + b6,
            b3 + 2 * b4,
            b3,
            b2 - b1 - b4,
            b2 + b3 + b4 - b1,
            b2 + b3,
            b2,
        ]),
        w => Err(Error::Unsupported(format!("corollary block {w} (expected 1 or 2)"))),
    }
}

pub fn build_corollary_wt2(a: [i64; 4], which: u8, qprec: &Rat) -> Result<FourierSeries> {
    ThetaBlockSpec::one_variable_display(-6, &corollary_wt2_args(a, which)?).build(qprec)
}

pub fn build_corollary_wt3(b: [i64; 6], which: u8, qprec: &Rat) -> Result<FourierSeries> {
    ThetaBlockSpec::one_variable_display(-3, &corollary_wt3_args(b, which)?).build(qprec)
}

// ---------------------------------------------------------------------------
// The three-term theta relation.

/// `(p, m)` with `p = x·A`, `m = (x₁, x₂, x₃, −x₄)·A`; `None` unless integral.
pub fn riemann_transform(x: [i64; 4]) -> Option<([i64; 4], [i64; 4])> {
    let apply = |y: [i64; 4]| -> Option<[i64; 4]> {
        let rows = [
            y[0] + y[1] + y[2] + y[3],
            y[0] + y[1] - y[2] - y[3],
            y[0] - y[1] + y[2] - y[3],
            y[0] - y[1] - y[2] + y[3],
        ];
        if rows.iter().any(|s| s % 2 != 0) {
            return None;
        }
        Some(rows.map(|s| s / 2))
    };
    let p = apply(x)?;
    let m = apply([x[0], x[1], x[2], -x[3]])?;
    Some((p, m))
}

fn theta_product(args: &[i64], prec: i64) -> Result<FourierSeries> {
    ThetaBlockSpec::from_display(None, 0, args.iter().map(|&a| (vec![a], 1)).collect()).build24(prec)
}

/// Checks `∏ϑ(x_j z) + ∏ϑ(m_j z) = ∏ϑ(p_j z)` up to `qprec`.
pub fn riemann_theta_relation_check(x: [i64; 4], qprec: &Rat) -> Result<bool> {
    let Some((p, m)) = riemann_transform(x) else {
        return Err(Error::Unsupported(format!(
            "arguments {x:?} are not admissible (their sum must be even)"
        )));
    };
    let prec = to_q24(qprec)?;
    let lhs = theta_product(&x, prec)?.add(&theta_product(&m, prec)?)?;
    let rhs = theta_product(&p, prec)?;
    Ok(lhs.agrees_with(&rhs) && lhs.prec24().min(rhs.prec24()) >= prec.min(EXACT))
}
