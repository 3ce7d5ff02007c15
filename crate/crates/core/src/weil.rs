//! The Weil representation of a discriminant form, theta decomposition of
//! index-1 Jacobi forms, and coefficient-orbit certificates.
//!
//! Conventions: `ρ(T) e_γ = e(−γ²/2) e_γ` and
//! `ρ(S) e_γ = e(sign/8)/√|D| · Σ_β e((γ, β)) e_β`, with `e(x) = exp(2πi x)`
//! and `sign = rank (mod 8)` for a positive-definite lattice. Everything is kept
//! in `ℤ[e(1/N)]` with `N = lcm(2·level, 8)`; the factor `1/√|D|` is never
//! materialized, since Milgram's formula `Σ_γ e(γ²/2) = √|D| e(sign/8)` lets
//! every relation be stated over the integers of the cyclotomic field.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cyclotomic::Cyclo;
use crate::error::{Error, Result};
use crate::lattice::{DiscriminantGroup, GramLattice};
use crate::par;
use crate::qseries::{FourierSeries, ZetaKey, ZetaPoly};
use crate::rational::{self, int, rat, Rat};

pub struct WeilRep {
    lattice: Arc<GramLattice>,
    pub disc: DiscriminantGroup,
    pub conductor: u32,
    /// Dual coordinates of a representative of each class, by class index.
    pub representatives: Vec<Vec<i64>>,
    /// `γ²/2 mod 1`.
    pub norms: Vec<Rat>,
    /// Diagonal of `ρ(T)`: entry `γ` is `e(rho_t[γ] / N)`.
    pub rho_t: Vec<u32>,
    /// `ρ(S)` up to the scalar `e(sign/8)/√|D|`: entry `(γ, β)` is `e(rho_s[γ][β] / N)`.
    pub rho_s: Vec<Vec<u32>>,
    /// `sign(D) mod 8`.
    pub signature: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeilChecks {
    /// `ρ(S)` is a symmetric matrix.
    pub symmetric: bool,
    /// `C² = |D| · P` with `P e_γ = e_{−γ}`, where `C` is the character matrix.
    pub s_squared: bool,
    /// `(Σ_γ e(γ²/2))² = |D| · e(sign/4)`.
    pub milgram: bool,
    /// `(ST)³ = S²` on the sampled basis vectors.
    pub braid: bool,
    pub samples: usize,
}

impl WeilChecks {
    pub fn all(&self) -> bool {
        self.symmetric && self.s_squared && self.milgram && self.braid
    }
}

fn exponent(x: &Rat, n: u32) -> u32 {
    let y = rational::modulo(x, &int(1)) * int(n as i128);
    debug_assert!(y.is_integer(), "root of unity outside the conductor");
    *y.numer() as u32
}

/// Exact matrices of the Weil representation of `D(L)`.
pub fn weil_matrices(lattice: Arc<GramLattice>) -> WeilRep {
    let disc = lattice.discriminant_group();
    let r = lattice.rank();
    let conductor = (2 * lattice.level()).lcm(&8) as u32;
    let size = disc.order as usize;
    let representatives: Vec<Vec<i64>> = (0..size).map(|i| disc.class_representative(i, r)).collect();
    let norms: Vec<Rat> = representatives
        .iter()
        .map(|c| rational::modulo(&(lattice.dual_norm(c) / int(2)), &int(1)))
        .collect();
    let rho_t = norms.iter().map(|q| exponent(&-q, conductor)).collect();
    let rho_s = par::map(&representatives, |g| {
        representatives
            .iter()
            .map(|b| exponent(&lattice.dual_pairing(g, b), conductor))
            .collect()
    });
    WeilRep {
        signature: (r % 8) as u32,
        lattice,
        disc,
        conductor,
        representatives,
        norms,
        rho_t,
        rho_s,
    }
}

impl WeilRep {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    pub fn lattice(&self) -> &GramLattice {
        &self.lattice
    }

    fn index_of(&self, c: &[i64]) -> usize {
        self.disc.class_index(c)
    }

    fn neg_index(&self, i: usize) -> usize {
        let c: Vec<i64> = self.representatives[i].iter().map(|x| -x).collect();
        self.index_of(&c)
    }

    /// Apply the character matrix `C` (`ρ(S)` without its scalar).
    fn apply_c(&self, v: &[Cyclo]) -> Vec<Cyclo> {
        let n = self.conductor;
        par::map_range(self.dim(), |b| {
            let mut acc = Cyclo::zero(n);
            for (g, x) in v.iter().enumerate() {
                let k = self.rho_s[g][b] as i64;
                for (i, c) in x.coeffs().iter().enumerate() {
                    if *c != 0 {
                        acc.add_root(i as i64 + k, *c);
                    }
                }
            }
            acc
        })
    }

    fn apply_t(&self, v: &[Cyclo]) -> Vec<Cyclo> {
        v.iter()
            .zip(&self.rho_t)
            .map(|(x, k)| x.rotate(*k as i64))
            .collect()
    }

    fn basis(&self, i: usize) -> Vec<Cyclo> {
        let mut v = vec![Cyclo::zero(self.conductor); self.dim()];
        v[i] = Cyclo::integer(self.conductor, 1);
        v
    }

    /// `Σ_γ e(γ²/2)`.
    pub fn gauss_sum(&self) -> Cyclo {
        let mut g = Cyclo::zero(self.conductor);
        for k in &self.rho_t {
            g.add_root(-(*k as i64), 1);
        }
        g
    }

    /// Relation checks; the braid relation is tested on `samples` basis vectors
    /// spread over the classes.
    pub fn check_relations(&self, samples: usize) -> WeilChecks {
        let d = self.dim();
        let n = self.conductor as i64;
        let symmetric = (0..d).all(|i| (0..d).all(|j| self.rho_s[i][j] == self.rho_s[j][i]));

        let picks: Vec<usize> = if d <= samples {
            (0..d).collect()
        } else {
            (0..samples).map(|k| k * d / samples).collect()
        };

        let mut s_squared = true;
        let mut braid = true;
        let g = self.gauss_sum();
        let phase = |k: i64| Cyclo::root(self.conductor, k);
        for &i in &picks {
            let e = self.basis(i);
            let c2 = self.apply_c(&self.apply_c(&e));
            let target = self.neg_index(i);
            for (j, x) in c2.iter().enumerate() {
                let want = if j == target { d as i64 } else { 0 };
                if x.as_integer() != Some(want) {
                    s_squared = false;
                }
            }
            // e(sign/4)·(CT)³ e = G · C² e
            let mut v = e.clone();
            for _ in 0..3 {
                v = self.apply_c(&self.apply_t(&v));
            }
            let quarter = self.signature as i64 * n / 4;
            for (x, y) in v.iter().zip(&c2) {
                if !x.rotate(quarter).equals(&g.mul(y)) {
                    braid = false;
                }
            }
        }
        let milgram = g
            .mul(&g)
            .equals(&phase(self.signature as i64 * n / 4).scale(d as i64));
        WeilChecks {
            symmetric,
            s_squared,
            milgram,
            braid,
            samples: picks.len(),
        }
    }
}

// ---------------------------------------------------------------------------
// Coefficient scans.

/// One coefficient `f(n, ℓ)` with its invariants.
#[derive(Clone, Debug)]
struct Sample {
    q24: i64,
    key: ZetaKey,
    /// `2n − (ℓ, ℓ)`.
    hyperbolic: Rat,
    class: usize,
    value: Rat,
}

/// All coefficients in the known range that can be nonzero for a weak
/// index-1 form, zeros included, plus every stored coefficient.
fn scan(phi: &FourierSeries, disc: &DiscriminantGroup) -> Result<Vec<Sample>> {
    let l = phi.lattice();
    if !phi.has_integral_zeta() {
        return Err(Error::HalfIntegralExponents);
    }
    let prec = phi.prec24();
    let integral = phi.slices().keys().all(|q| q % 24 == 0);
    let mut qs: BTreeSet<i64> = phi.slices().keys().copied().collect();
    if integral && prec < crate::qseries::EXACT {
        let lo = phi.ord24().min(0) / 24;
        let hi = Integer::div_ceil(&prec, &24);
        qs.extend((lo..hi).map(|n| 24 * n).filter(|q| *q < prec));
    }
    let m = l.weak_support_bound();
    let top = qs.iter().next_back().copied().unwrap_or(0);
    let bound = int(2) * rat(top as i128, 24) + m;
    let vectors = l.dual_vectors_up_to(&bound);
    let mut seen: BTreeSet<(i64, ZetaKey)> = BTreeSet::new();
    let mut out = Vec::new();
    let push = |q: i64, c: &[i64], key: ZetaKey, value: Rat, out: &mut Vec<Sample>| {
        let hyperbolic = int(2) * rat(q as i128, 24) - l.dual_norm(c);
        out.push(Sample {
            q24: q,
            key,
            hyperbolic,
            class: disc.class_index(c),
            value,
        });
    };
    for &q in &qs {
        let n2 = int(2) * rat(q as i128, 24) + m;
        for c in &vectors {
            if l.dual_norm(c) > n2 {
                continue;
            }
            let key: ZetaKey = c.iter().map(|x| (2 * x) as i32).collect();
            let value = phi.coeff24(q, &key);
            seen.insert((q, key.clone()));
            push(q, c, key, value, &mut out);
        }
    }
    for (q, key, value) in phi.terms() {
        if !seen.contains(&(q, key.clone())) {
            let c: Vec<i64> = key.iter().map(|x| (*x / 2) as i64).collect();
            push(q, &c, key.clone(), *value, &mut out);
        }
    }
    Ok(out)
}

fn describe(phi: &FourierSeries, q24: i64, key: &ZetaKey) -> String {
    format!("({}, {})", rat(q24 as i128, 24), phi.vector_of(key))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitViolationEntry {
    /// `2n − (ℓ, ℓ)`.
    pub hyperbolic_norm: String,
    pub class: usize,
    pub first: String,
    pub first_value: String,
    pub second: String,
    pub second_value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitReport {
    pub passed: bool,
    pub coefficients_checked: usize,
    pub orbits: usize,
    pub violations: Vec<OrbitViolationEntry>,
}

/// Checks that `f(n, ℓ)` depends only on `2n − (ℓ, ℓ)` and the class of `ℓ`.
pub fn orbit_invariance_report(phi: &FourierSeries) -> Result<OrbitReport> {
    let disc = phi.lattice().discriminant_group();
    let samples = scan(phi, &disc)?;
    let mut groups: BTreeMap<(Rat, usize), &Sample> = BTreeMap::new();
    let mut violations = Vec::new();
    for s in &samples {
        match groups.get(&(s.hyperbolic, s.class)) {
            None => {
                groups.insert((s.hyperbolic, s.class), s);
            }
            Some(first) if first.value != s.value => {
                violations.push(OrbitViolationEntry {
                    hyperbolic_norm: s.hyperbolic.to_string(),
                    class: s.class,
                    first: describe(phi, first.q24, &first.key),
                    first_value: first.value.to_string(),
                    second: describe(phi, s.q24, &s.key),
                    second_value: s.value.to_string(),
                });
            }
            Some(_) => {}
        }
    }
    Ok(OrbitReport {
        passed: violations.is_empty(),
        coefficients_checked: samples.len(),
        orbits: groups.len(),
        violations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignPattern {
    pub plus: usize,
    pub minus: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OdClassEntry {
    pub order: u64,
    /// `(ℓ, ℓ) mod 2`.
    pub norm: [i128; 2],
    /// Number of discriminant classes with this order and norm.
    pub classes: usize,
    /// `|f|` per hyperbolic norm `2n − (ℓ, ℓ)`.
    pub value_by_hyperbolic_norm: BTreeMap<String, [i128; 2]>,
    /// Relative signs of the classes, when the values admit a consistent
    /// sign assignment.
    pub sign_pattern: Option<SignPattern>,
    pub status: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub problems: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OdReport {
    pub passed: bool,
    pub classes: Vec<OdClassEntry>,
}

/// Checks that `|f(n, ℓ)|` depends only on `2n − (ℓ, ℓ)`, the order of `ℓ` in
/// `D(L)` and `(ℓ, ℓ) mod 2`, and that signs differ between classes only by a
/// fixed per-class factor `±1`. At squarefree level classes with equal order
/// and norm form one orbit of `O(D)`.
pub fn od_class_invariance(phi: &FourierSeries) -> Result<OdReport> {
    let l = phi.lattice();
    if !l.has_squarefree_level() {
        return Err(Error::Unsupported(format!(
            "level {} is not squarefree, so order and norm do not determine O(D)-orbits",
            l.level()
        )));
    }
    let disc = l.discriminant_group();
    let table = l.class_table(&disc);
    let samples = scan(phi, &disc)?;

    // per (order, norm): D -> class -> value
    type Family = BTreeMap<Rat, BTreeMap<usize, Rat>>;
    let mut families: BTreeMap<(u64, Rat), Family> = BTreeMap::new();
    let mut problems_by_family: BTreeMap<(u64, Rat), Vec<String>> = BTreeMap::new();
    for s in &samples {
        let (norm, order) = table[s.class];
        let fam = families.entry((order, norm)).or_default();
        let slot = fam.entry(s.hyperbolic).or_default();
        match slot.get(&s.class) {
            Some(v) if *v != s.value => problems_by_family.entry((order, norm)).or_default().push(format!(
                "orbit violation at hyperbolic norm {} in class {}",
                s.hyperbolic, s.class
            )),
            _ => {
                slot.insert(s.class, s.value);
            }
        }
    }

    let mut entries = Vec::new();
    let mut passed = true;
    for ((order, norm), fam) in &families {
        let mut problems = problems_by_family.remove(&(*order, *norm)).unwrap_or_default();
        let mut values = BTreeMap::new();
        for (d, per_class) in fam {
            let mut abs: Option<Rat> = None;
            for v in per_class.values() {
                let a = v.abs();
                match abs {
                    None => abs = Some(a),
                    Some(x) if x != a => {
                        problems.push(format!("unequal |f| at hyperbolic norm {d}: {x} vs {a}"));
                    }
                    _ => {}
                }
            }
            values.insert(d.to_string(), rational::to_pair(&abs.unwrap_or_else(Rat::zero)));
        }
        // consistent signs ε(γ): f_γ(D) = ε(γ)·v(D)
        let mut eps: BTreeMap<usize, i8> = BTreeMap::new();
        let mut sign_ok = true;
        for per_class in fam.values() {
            let nonzero: Vec<(usize, i8)> = per_class
                .iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(c, v)| (*c, if v.is_positive() { 1 } else { -1 }))
                .collect();
            let Some(&(c0, s0)) = nonzero.iter().find(|(c, _)| eps.contains_key(c)).or(nonzero.first())
            else {
                continue;
            };
            let v_sign = s0 * *eps.entry(c0).or_insert(1);
            for (c, s) in nonzero {
                let want = s * v_sign;
                match eps.get(&c) {
                    Some(e) if *e != want => sign_ok = false,
                    Some(_) => {}
                    None => {
                        eps.insert(c, want);
                    }
                }
            }
        }
        if !sign_ok {
            problems.push("no consistent sign assignment across classes".into());
        }
        let classes = table.iter().filter(|(n, o)| n == norm && o == order).count();
        let sign_pattern = sign_ok.then(|| SignPattern {
            plus: eps.values().filter(|e| **e > 0).count(),
            minus: eps.values().filter(|e| **e < 0).count(),
        });
        let ok = problems.is_empty();
        passed &= ok;
        entries.push(OdClassEntry {
            order: *order,
            norm: rational::to_pair(norm),
            classes,
            value_by_hyperbolic_norm: values,
            sign_pattern,
            status: if ok { "pass" } else { "fail" }.into(),
            problems,
        });
    }
    Ok(OdReport {
        passed,
        classes: entries,
    })
}

// ---------------------------------------------------------------------------
// Theta decomposition.

/// Components `F_γ(τ) = Σ c(e) q^e` of an index-1 form `Σ_γ F_γ Θ_γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct VVComponents {
    lattice: Arc<GramLattice>,
    pub representatives: Vec<Vec<i64>>,
    /// Coefficients by exponent `e = n − (ℓ, ℓ)/2`, per class index.
    pub components: Vec<BTreeMap<Rat, Rat>>,
    /// `F_γ` is known for exponents below `precision[γ]`.
    pub precision: Vec<Rat>,
    qprec: Option<Rat>,
}

impl VVComponents {
    pub fn lattice(&self) -> &GramLattice {
        &self.lattice
    }

    /// Orders of the classes with a nonzero component.
    pub fn support_orders(&self) -> BTreeSet<u64> {
        let disc = self.lattice.discriminant_group();
        self.components
            .iter()
            .zip(&self.representatives)
            .filter(|(f, _)| !f.is_empty())
            .map(|(_, c)| disc.class_order(c))
            .collect()
    }

    /// `Some(1)` if `F_{−γ} = F_γ` for every class, `Some(-1)` if
    /// `F_{−γ} = −F_γ`, `None` otherwise. The zero form reports `Some(1)`.
    pub fn parity(&self) -> Option<i8> {
        let disc = self.lattice.discriminant_group();
        let mirrored = |sign: Rat| {
            self.representatives.iter().enumerate().all(|(i, c)| {
                let neg: Vec<i64> = c.iter().map(|x| -x).collect();
                let other = &self.components[disc.class_index(&neg)];
                other.len() == self.components[i].len()
                    && self.components[i]
                        .iter()
                        .all(|(e, v)| other.get(e) == Some(&(*v * sign)))
            })
        };
        if mirrored(Rat::one()) {
            Some(1)
        } else if mirrored(-Rat::one()) {
            Some(-1)
        } else {
            None
        }
    }

    /// Smallest exponent over all components, `None` for the zero form.
    pub fn leading_exponent(&self) -> Option<Rat> {
        self.components
            .iter()
            .filter_map(|f| f.keys().next().copied())
            .min()
    }

    /// `Σ_γ F_γ Θ_γ` truncated at the original precision.
    pub fn reconstruct(&self) -> Result<FourierSeries> {
        let l = &self.lattice;
        let Some(qprec) = self.qprec else {
            return Err(Error::Unsupported("reconstruction of an exact series".into()));
        };
        let lowest = self
            .components
            .iter()
            .filter_map(|f| f.keys().next())
            .min()
            .copied()
            .unwrap_or_else(Rat::zero);
        let disc = l.discriminant_group();
        let bound = int(2) * (qprec - lowest);
        let mut slices: BTreeMap<i64, ZetaPoly> = BTreeMap::new();
        for c in l.dual_vectors_up_to(&bound) {
            let half = l.dual_norm(&c) / int(2);
            let f = &self.components[disc.class_index(&c)];
            let key: ZetaKey = c.iter().map(|x| (2 * x) as i32).collect();
            for (e, v) in f {
                let n = e + half;
                if n >= qprec {
                    break;
                }
                let q24 = crate::qseries::to_q24(&n)?;
                slices.entry(q24).or_default().insert(key.clone(), *v);
            }
        }
        let g = l.gram_rat();
        Ok(FourierSeries::from_parts(
            l.clone(),
            g,
            None,
            crate::qseries::to_q24(&qprec)?,
            slices,
        ))
    }
}

/// Writes an index-1 form as `Σ_γ F_γ(τ) Θ_γ(τ, 𝔷)`.
pub fn theta_decompose(phi: &FourierSeries) -> Result<VVComponents> {
    let l = phi.lattice_arc().clone();
    if phi.jacobi_index() != Some(int(1)) && !phi.is_zero() {
        return Err(Error::IndexMismatch);
    }
    let report = orbit_invariance_report(phi)?;
    if let Some(v) = report.violations.first() {
        return Err(Error::OrbitViolation {
            first: v.first.clone(),
            second: v.second.clone(),
            a: v.first_value.clone(),
            b: v.second_value.clone(),
        });
    }
    let disc = l.discriminant_group();
    let size = disc.order as usize;
    let r = l.rank();
    let representatives: Vec<Vec<i64>> = (0..size).map(|i| disc.class_representative(i, r)).collect();
    let minimal = l.class_minimal_norms(&disc);
    let qprec = phi.qprec();
    let precision = minimal
        .iter()
        .map(|m| match qprec {
            Some(p) => p - m / int(2),
            None => int(i64::MAX as i128),
        })
        .collect();
    let mut components = vec![BTreeMap::new(); size];
    for (q, key, v) in phi.terms() {
        let c: Vec<i64> = key.iter().map(|x| (*x / 2) as i64).collect();
        let e = rat(q as i128, 24) - l.dual_norm(&c) / int(2);
        components[disc.class_index(&c)].insert(e, *v);
    }
    Ok(VVComponents {
        lattice: l,
        representatives,
        components,
        precision,
        qprec,
    })
}
