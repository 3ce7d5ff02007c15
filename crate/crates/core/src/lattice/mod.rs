//! Even positive-definite lattices given by Gram matrices.
//!
//! Dual vectors are carried in two coordinate systems:
//!
//! * *lattice coordinates* (`DualVector::coords`): rational coefficients with
//!   respect to the basis `α_i` of `L`. A vector lies in `L∨` iff `G·x` is integral.
//! * *dual coordinates*: the integer vector `c = G·x`, i.e. the coefficients with
//!   respect to the dual basis `w_i`. Series exponents and all hot loops use these,
//!   and `(ℓ, 𝔷) = c · z` for `𝔷 = Σ z_j α_j`.

pub mod enumerate;
pub mod snf;

use std::fmt;

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, int, rat, Rat};
use enumerate::Ellipsoid;
use snf::smith_normal_form;

/// A rational vector in `L ⊗ ℚ`, written in the lattice basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualVector {
    pub coords: Vec<Rat>,
}

impl DualVector {
    pub fn new(coords: Vec<Rat>) -> Self {
        DualVector { coords }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        DualVector {
            coords: coords.iter().map(|&c| int(c as i128)).collect(),
        }
    }

    pub fn zero(rank: usize) -> Self {
        DualVector {
            coords: vec![Rat::zero(); rank],
        }
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn neg(&self) -> Self {
        DualVector {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, k: &Rat) -> Self {
        DualVector {
            coords: self.coords.iter().map(|c| c * k).collect(),
        }
    }
}

impl fmt::Display for DualVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Invariants of a class in `L∨/L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetClass {
    pub representative: DualVector,
    pub order: u64,
    /// `(v, v) mod 2`, in `[0, 2)`.
    pub norm_mod2: Rat,
}

/// The finite abelian group `L∨/L` with constructive generators.
#[derive(Clone, Debug)]
pub struct DiscriminantGroup {
    /// Nontrivial invariant factors `d_1 | d_2 | …`.
    pub invariant_factors: Vec<u64>,
    /// One lift per factor, in lattice coordinates.
    pub generator_lifts: Vec<DualVector>,
    pub order: u64,
    /// Generator lifts in dual coordinates.
    generators: Vec<Vec<i64>>,
    /// Rows of the left Smith transform belonging to the nontrivial factors:
    /// the class of `c` has coordinates `(row_i · c) mod d_i`.
    projection: Vec<Vec<i64>>,
}

impl DiscriminantGroup {
    /// Coordinates of the class of `c` (dual coordinates) with respect to the generators.
    pub fn class_coords(&self, c: &[i64]) -> Vec<u64> {
        self.projection
            .iter()
            .zip(&self.invariant_factors)
            .map(|(row, &d)| {
                let s: i64 = row.iter().zip(c).map(|(a, b)| a * b).sum();
                s.rem_euclid(d as i64) as u64
            })
            .collect()
    }

    /// Mixed-radix index of the class of `c`, in `0..order`.
    pub fn class_index(&self, c: &[i64]) -> usize {
        let mut idx = 0usize;
        for (k, &d) in self.class_coords(c).iter().zip(&self.invariant_factors) {
            idx = idx * d as usize + *k as usize;
        }
        idx
    }

    /// Dual coordinates of a representative of the class with the given index.
    pub fn class_representative(&self, mut idx: usize, rank: usize) -> Vec<i64> {
        let mut ks = vec![0u64; self.invariant_factors.len()];
        for (slot, &d) in ks.iter_mut().zip(&self.invariant_factors).rev() {
            *slot = (idx % d as usize) as u64;
            idx /= d as usize;
        }
        let mut c = vec![0i64; rank];
        for (k, g) in ks.iter().zip(&self.generators) {
            for (ci, gi) in c.iter_mut().zip(g) {
                *ci += *k as i64 * gi;
            }
        }
        c
    }

    /// Order of the class of `c` in `L∨/L`.
    pub fn class_order(&self, c: &[i64]) -> u64 {
        self.class_coords(c)
            .iter()
            .zip(&self.invariant_factors)
            .fold(1u64, |acc, (&k, &d)| acc.lcm(&(d / k.gcd(&d))))
    }

    pub fn generators_dual(&self) -> &[Vec<i64>] {
        &self.generators
    }
}

/// An even positive-definite integral lattice.
#[derive(Clone, Debug)]
pub struct GramLattice {
    name: Option<String>,
    gram: Vec<Vec<i64>>,
    dual_gram: Vec<Vec<Rat>>,
    level: u64,
    /// `level · G⁻¹`, an integer matrix with even diagonal.
    scaled_dual: Vec<Vec<i64>>,
}

impl PartialEq for GramLattice {
    fn eq(&self, other: &Self) -> bool {
        self.gram == other.gram
    }
}

impl Eq for GramLattice {}

impl GramLattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self> {
        let n = gram.len();
        if gram.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidGram("matrix is not square".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::InvalidGram(format!("not symmetric at ({i},{j})")));
                }
            }
            if gram[i][i] % 2 != 0 {
                return Err(Error::InvalidGram(format!("odd diagonal entry at {i}")));
            }
        }
        let as_rat: Vec<Vec<Rat>> = gram
            .iter()
            .map(|r| r.iter().map(|&x| int(x as i128)).collect())
            .collect();
        if Ellipsoid::new(&as_rat).is_none() {
            return Err(Error::InvalidGram("not positive definite".into()));
        }
        let dual_gram = if n == 0 {
            Vec::new()
        } else {
            rational::invert_matrix(&as_rat).expect("positive definite implies invertible")
        };
        let level = compute_level(&dual_gram);
        let scaled_dual = dual_gram
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| {
                        let y = x * int(level as i128);
                        debug_assert!(y.is_integer());
                        *y.numer() as i64
                    })
                    .collect()
            })
            .collect();
        Ok(GramLattice {
            name: None,
            gram,
            dual_gram,
            level,
            scaled_dual,
        })
    }

    /// Built-in lattices: `L4`, `L6`, `A1`, `A2`, `A4`, `A4dual5`, `3A2`.
    pub fn named(name: &str) -> Result<Self> {
        let gram: Vec<Vec<i64>> = match name {
            "L4" => vec![
                vec![4, 2, 2, 2],
                vec![2, 6, 1, 1],
                vec![2, 1, 6, 1],
                vec![2, 1, 1, 6],
            ],
            "L6" => vec![
                vec![4, 2, 0, 0, -2, 0],
                vec![2, 4, 0, 0, -1, 0],
                vec![0, 0, 2, -1, 0, 0],
                vec![0, 0, -1, 2, 0, 0],
                vec![-2, -1, 0, 0, 2, 1],
                vec![0, 0, 0, 0, 1, 4],
            ],
            "A1" => vec![vec![2]],
            "A2" => vec![vec![2, -1], vec![-1, 2]],
            "A4" => vec![
                vec![2, -1, 0, 0],
                vec![-1, 2, -1, 0],
                vec![0, -1, 2, -1],
                vec![0, 0, -1, 2],
            ],
            // 5 · (A4 Cartan)^{-1}
            "A4dual5" => vec![
                vec![4, 3, 2, 1],
                vec![3, 6, 4, 2],
                vec![2, 4, 6, 3],
                vec![1, 2, 3, 4],
            ],
            "3A2" => {
                let mut g = vec![vec![0i64; 6]; 6];
                for b in 0..3 {
                    g[2 * b][2 * b] = 2;
                    g[2 * b + 1][2 * b + 1] = 2;
                    g[2 * b][2 * b + 1] = -1;
                    g[2 * b + 1][2 * b] = -1;
                }
                g
            }
            other => return Err(Error::UnknownLattice(other.to_string())),
        };
        let mut l = GramLattice::new(gram)?;
        l.name = Some(name.to_string());
        Ok(l)
    }

    /// The rank-zero lattice carrying pure q-series.
    pub fn trivial() -> Self {
        GramLattice::new(Vec::new()).expect("empty gram is valid")
    }

    /// Parse a JSON array of integer rows, or a built-in name.
    pub fn parse(spec: &str) -> Result<Self> {
        let s = spec.trim();
        if s.starts_with('[') {
            let gram: Vec<Vec<i64>> =
                serde_json::from_str(s).map_err(|e| Error::InvalidGram(e.to_string()))?;
            GramLattice::new(gram)
        } else {
            GramLattice::named(s)
        }
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    /// Exact inverse of the Gram matrix; row `i` is `w_i` in lattice coordinates.
    pub fn dual_gram(&self) -> &[Vec<Rat>] {
        &self.dual_gram
    }

    pub fn gram_rat(&self) -> Vec<Vec<Rat>> {
        self.gram
            .iter()
            .map(|r| r.iter().map(|&x| int(x as i128)).collect())
            .collect()
    }

    pub fn determinant(&self) -> i64 {
        bareiss_det(&self.gram)
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// `level · (c, c)` for dual coordinates `c`; always an integer.
    #[inline]
    pub fn scaled_norm(&self, c: &[i64]) -> i64 {
        let mut s = 0i64;
        for (i, row) in self.scaled_dual.iter().enumerate() {
            if c[i] == 0 {
                continue;
            }
            let mut t = 0i64;
            for (j, k) in row.iter().enumerate() {
                t += k * c[j];
            }
            s += c[i] * t;
        }
        s
    }

    /// `(c, c)` for dual coordinates `c`.
    pub fn dual_norm(&self, c: &[i64]) -> Rat {
        rat(self.scaled_norm(c) as i128, self.level as i128)
    }

    /// `(c, d)` for dual coordinates `c`, `d`.
    pub fn dual_pairing(&self, c: &[i64], d: &[i64]) -> Rat {
        let mut s = 0i64;
        for (i, row) in self.scaled_dual.iter().enumerate() {
            for (j, k) in row.iter().enumerate() {
                s += c[i] * k * d[j];
            }
        }
        rat(s as i128, self.level as i128)
    }

    /// Pairing of two vectors in lattice coordinates.
    pub fn pairing(&self, x: &DualVector, y: &DualVector) -> Rat {
        let mut s = Rat::zero();
        for (i, row) in self.gram.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                s += x.coords[i] * y.coords[j] * int(*g as i128);
            }
        }
        s
    }

    pub fn norm(&self, x: &DualVector) -> Rat {
        self.pairing(x, x)
    }

    /// Dual coordinates `G·x`, or an error when `x ∉ L∨`.
    pub fn to_dual_coords(&self, x: &DualVector) -> Result<Vec<i64>> {
        if x.rank() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: x.rank(),
            });
        }
        self.gram
            .iter()
            .map(|row| {
                let s = row
                    .iter()
                    .zip(&x.coords)
                    .fold(Rat::zero(), |s, (g, c)| s + c * int(*g as i128));
                if s.is_integer() {
                    Ok(*s.numer() as i64)
                } else {
                    Err(Error::NotInDual(x.to_string()))
                }
            })
            .collect()
    }

    /// Lattice coordinates `G⁻¹·c` of a vector given in dual coordinates.
    pub fn from_dual_coords(&self, c: &[i64]) -> DualVector {
        DualVector {
            coords: self
                .dual_gram
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(c)
                        .fold(Rat::zero(), |s, (g, x)| s + g * int(*x as i128))
                })
                .collect(),
        }
    }

    /// Dual-basis vector `w_i`.
    pub fn dual_basis(&self, i: usize) -> DualVector {
        let mut c = vec![0i64; self.rank()];
        c[i] = 1;
        self.from_dual_coords(&c)
    }

    pub fn discriminant_group(&self) -> DiscriminantGroup {
        let n = self.rank();
        let s = smith_normal_form(&self.gram);
        let u_rat: Vec<Vec<Rat>> = s
            .left
            .iter()
            .map(|r| r.iter().map(|&x| int(x as i128)).collect())
            .collect();
        let u_inv = if n == 0 {
            Vec::new()
        } else {
            rational::invert_matrix(&u_rat).expect("unimodular")
        };
        let mut invariant_factors = Vec::new();
        let mut generators = Vec::new();
        let mut projection = Vec::new();
        for i in 0..n {
            let d = s.diagonal[i];
            if d == 1 {
                continue;
            }
            invariant_factors.push(d as u64);
            let g: Vec<i64> = (0..n)
                .map(|r| {
                    debug_assert!(u_inv[r][i].is_integer());
                    *u_inv[r][i].numer() as i64
                })
                .collect();
            generators.push(g);
            projection.push(s.left[i].clone());
        }
        let order = invariant_factors.iter().product();
        let generator_lifts = generators.iter().map(|g| self.from_dual_coords(g)).collect();
        DiscriminantGroup {
            invariant_factors,
            generator_lifts,
            order,
            generators,
            projection,
        }
    }

    pub fn coset_invariants(&self, v: &DualVector) -> Result<CosetClass> {
        let c = self.to_dual_coords(v)?;
        let disc = self.discriminant_group();
        Ok(CosetClass {
            representative: v.clone(),
            order: disc.class_order(&c),
            norm_mod2: rational::modulo(&self.dual_norm(&c), &int(2)),
        })
    }

    /// All dual vectors (dual coordinates) with `(c, c) <= bound`, sorted.
    pub fn dual_vectors_up_to(&self, bound: &Rat) -> Vec<Vec<i64>> {
        match Ellipsoid::new(&self.dual_gram) {
            Some(e) => e.points(bound),
            None => vec![Vec::new()],
        }
    }

    /// All `v ∈ L∨` with `(v, v) = norm` and order `ord` in `L∨/L`.
    pub fn enumerate_dual_by_norm_order(&self, norm: &Rat, ord: u64) -> Vec<DualVector> {
        let disc = self.discriminant_group();
        self.dual_vectors_up_to(norm)
            .into_iter()
            .filter(|c| self.dual_norm(c) == *norm && disc.class_order(c) == ord)
            .map(|c| self.from_dual_coords(&c))
            .collect()
    }

    /// `(norm_mod2, order)` of every class, indexed by `DiscriminantGroup::class_index`.
    pub fn class_table(&self, disc: &DiscriminantGroup) -> Vec<(Rat, u64)> {
        (0..disc.order as usize)
            .map(|i| {
                let c = disc.class_representative(i, self.rank());
                (
                    rational::modulo(&self.dual_norm(&c), &int(2)),
                    disc.class_order(&c),
                )
            })
            .collect()
    }

    /// Number of classes of `L∨/L` with the given norm mod 2 and order.
    pub fn coset_census(&self, norm_mod2: &Rat, ord: u64) -> usize {
        let key = rational::modulo(norm_mod2, &int(2));
        let disc = self.discriminant_group();
        self.class_table(&disc)
            .into_iter()
            .filter(|(n, o)| *n == key && *o == ord)
            .count()
    }

    /// Full census: `(norm_mod2, order) -> count`, sorted by order then norm.
    pub fn census_table(&self) -> Vec<(Rat, u64, usize)> {
        let disc = self.discriminant_group();
        let mut map = std::collections::BTreeMap::<(u64, Rat), usize>::new();
        for (n, o) in self.class_table(&disc) {
            *map.entry((o, n)).or_default() += 1;
        }
        map.into_iter().map(|((o, n), k)| (n, o, k)).collect()
    }

    /// Minimal norm of a representative of each class, indexed by class index.
    pub fn class_minimal_norms(&self, disc: &DiscriminantGroup) -> Vec<Rat> {
        let total = disc.order as usize;
        let mut bound = int(2);
        loop {
            let mut best: Vec<Option<Rat>> = vec![None; total];
            for c in self.dual_vectors_up_to(&bound) {
                let idx = disc.class_index(&c);
                let nrm = self.dual_norm(&c);
                if best[idx].as_ref().is_none_or(|b| nrm < *b) {
                    best[idx] = Some(nrm);
                }
            }
            if best.iter().all(|b| b.is_some()) {
                return best.into_iter().map(|b| b.unwrap()).collect();
            }
            bound *= int(2);
        }
    }

    /// `max_γ min_{ℓ∈γ+L} (ℓ, ℓ)`: bounds the ζ-support of weak index-1 forms
    /// through `(ℓ, ℓ) <= 2n + m(L)`.
    pub fn weak_support_bound(&self) -> Rat {
        let disc = self.discriminant_group();
        self.class_minimal_norms(&disc)
            .into_iter()
            .max()
            .unwrap_or_else(Rat::zero)
    }

    /// Is the level squarefree?
    pub fn has_squarefree_level(&self) -> bool {
        let mut n = self.level;
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p * p) {
                return false;
            }
            if n.is_multiple_of(p) {
                n /= p;
            }
            p += 1;
        }
        true
    }

    pub fn is_one_variable(&self) -> bool {
        self.gram == [vec![2]]
    }
}

/// Checks that `vectors` (lattice coordinates of `L ⊗ ℚ`) have Gram matrix `target`
/// and generate a lattice containing `L`.
pub fn check_embedding(
    target: &[Vec<Rat>],
    vectors: &[DualVector],
    lattice: &GramLattice,
) -> Result<bool> {
    let n = lattice.rank();
    if vectors.len() != target.len() || vectors.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: vectors.len(),
        });
    }
    if let Some(v) = vectors.iter().find(|v| v.rank() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.rank(),
        });
    }
    if target.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: target.len(),
        });
    }
    for (i, vi) in vectors.iter().enumerate() {
        for (j, vj) in vectors.iter().enumerate() {
            if lattice.pairing(vi, vj) != target[i][j] {
                return Ok(false);
            }
        }
    }
    // columns = vectors; every α_j must be an integral combination of them
    let x: Vec<Vec<Rat>> = (0..n)
        .map(|r| vectors.iter().map(|v| v.coords[r]).collect())
        .collect();
    let Some(inv) = rational::invert_matrix(&x) else {
        return Ok(false);
    };
    Ok(inv.iter().flatten().all(|e| e.is_integer()))
}

fn compute_level(dual_gram: &[Vec<Rat>]) -> u64 {
    let mut level: i128 = 1;
    for (i, row) in dual_gram.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let need = if i == j && !x.numer().is_even() {
                2 * x.denom()
            } else {
                *x.denom()
            };
            level = level.lcm(&need);
        }
    }
    level as u64
}

fn bareiss_det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return 0;
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    (sign * a[n - 1][n - 1]) as i64
}

/// Dual coordinates with the first nonzero entry made positive; returns the
/// normalized vector and whether it was negated.
pub fn normalize_sign(c: &[i64]) -> (Vec<i64>, bool) {
    match c.iter().find(|&&x| x != 0) {
        Some(&x) if x < 0 => (c.iter().map(|v| -v).collect(), true),
        _ => (c.to_vec(), false),
    }
}

/// `ℓ > 0` in the fixed ordering: first nonzero dual coordinate positive.
pub fn is_positive(c: &[i64]) -> bool {
    c.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

/// Serializable form of a lattice: either a built-in name or a Gram matrix.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum LatticeRef {
    Name(String),
    Gram(Vec<Vec<i64>>),
}

impl LatticeRef {
    pub fn of(l: &GramLattice) -> Self {
        match l.name() {
            Some(n) => LatticeRef::Name(n.to_string()),
            None => LatticeRef::Gram(l.gram().to_vec()),
        }
    }

    pub fn resolve(&self) -> Result<GramLattice> {
        match self {
            LatticeRef::Name(n) => GramLattice::named(n),
            LatticeRef::Gram(g) => GramLattice::new(g.clone()),
        }
    }
}

#[allow(dead_code)]
fn _assert_send_sync() {
    fn is<T: Send + Sync>() {}
    is::<GramLattice>();
    is::<DualVector>();
}
