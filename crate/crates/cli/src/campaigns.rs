use std::collections::BTreeSet;
use std::sync::Arc;

use clap::ValueEnum;
use thetablock::blocks::*;
use thetablock::lattice::{check_embedding, is_positive};
use thetablock::lifts::{borcherds_data, borcherds_expand, grit, quotient_psi, Quotient};
use thetablock::rational::{int, rat};
use thetablock::weil::{od_class_invariance, orbit_invariance_report, theta_decompose};
use thetablock::{DualVector, Error, FourierSeries, GramLattice, Rat};

use crate::report::{rat_pair, run_all, task, CheckResult, Outcome, Task, VerifyReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Campaign {
    Rtr,
    Identity67,
    Identity49,
    #[value(name = "basis-L4")]
    BasisL4,
    #[value(name = "basis-L6")]
    BasisL6,
    #[value(name = "vectors-L4")]
    VectorsL4,
    #[value(name = "vectors-L6")]
    VectorsL6,
    FamilyWt2,
    FamilyWt3,
    #[value(name = "grit-borch-L4")]
    GritBorchL4,
    #[value(name = "grit-borch-L6")]
    GritBorchL6,
    CorollaryWt2,
    CorollaryWt3,
}

impl Campaign {
    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }

    fn uses_grid(self) -> bool {
        matches!(
            self,
            Campaign::Rtr
                | Campaign::FamilyWt2
                | Campaign::FamilyWt3
                | Campaign::CorollaryWt2
                | Campaign::CorollaryWt3
        )
    }

    fn is_lift(self) -> bool {
        matches!(self, Campaign::GritBorchL4 | Campaign::GritBorchL6)
    }

    pub fn default_qprec(self) -> Rat {
        if self.is_lift() {
            int(4)
        } else {
            int(8)
        }
    }
}

pub struct Params {
    pub qprec: Rat,
    pub fj_order: usize,
    pub grid_bound: i64,
}

pub fn verify(c: Campaign, p: &Params) -> Result<VerifyReport, Error> {
    let checks = match c {
        Campaign::Rtr => rtr(p)?,
        Campaign::Identity67 => identity(&IDENTITY_67, p)?,
        Campaign::Identity49 => identity(&IDENTITY_49, p)?,
        Campaign::BasisL4 => basis(&BASIS_L4, p)?,
        Campaign::BasisL6 => basis(&BASIS_L6, p)?,
        Campaign::VectorsL4 => vectors(&VECTORS_L4, p)?,
        Campaign::VectorsL6 => vectors(&VECTORS_L6, p)?,
        Campaign::FamilyWt2 => family(&FAMILY_WT2, p)?,
        Campaign::FamilyWt3 => family(&FAMILY_WT3, p)?,
        Campaign::CorollaryWt2 => corollary(&FAMILY_WT2, p)?,
        Campaign::CorollaryWt3 => corollary(&FAMILY_WT3, p)?,
        Campaign::GritBorchL4 => grit_borch(&BASIS_L4, p)?,
        Campaign::GritBorchL6 => grit_borch(&BASIS_L6, p)?,
    };
    Ok(VerifyReport {
        campaign: c.name(),
        qprec: rat_pair(&p.qprec),
        fj_order: c.is_lift().then_some(p.fj_order),
        grid_bound: c.uses_grid().then_some(p.grid_bound),
        checks,
    })
}

fn same(a: &FourierSeries, b: &FourierSeries) -> Outcome {
    let range = match (a.qprec(), b.qprec()) {
        (Some(x), Some(y)) => format!("below q^{}", x.min(y)),
        (Some(x), None) | (None, Some(x)) => format!("below q^{x}"),
        (None, None) => "exactly".to_string(),
    };
    match a.first_difference(b) {
        None => Outcome::Pass(format!("coefficients agree {range}")),
        Some((q, key)) => Outcome::Fail(format!(
            "first difference at q^{} ζ^{}",
            thetablock::qseries::from_q24(q),
            a.vector_of(&key)
        )),
    }
}

fn lattice(name: &str) -> Arc<GramLattice> {
    Arc::new(GramLattice::named(name).expect("built-in lattice"))
}

fn tuple_list<const N: usize>(xs: &[[i64; N]], limit: usize) -> String {
    let shown: Vec<String> = xs.iter().take(limit).map(|x| format!("{x:?}")).collect();
    if xs.len() > limit {
        format!("{} … ({} in total)", shown.join(", "), xs.len())
    } else {
        shown.join(", ")
    }
}

/// All of `[−B, B]^N` with the first nonzero entry positive.
fn grid<const N: usize>(bound: i64) -> Vec<[i64; N]> {
    let side = 2 * bound + 1;
    (0..side.pow(N as u32))
        .map(|mut code| {
            let mut x = [0i64; N];
            for v in x.iter_mut().rev() {
                *v = code % side - bound;
                code /= side;
            }
            x
        })
        .filter(|x| is_positive(x))
        .collect()
}

// ---------------------------------------------------------------------------

fn rtr(p: &Params) -> Result<Vec<CheckResult>, Error> {
    let tuples: Vec<[i64; 4]> = grid::<4>(p.grid_bound)
        .into_iter()
        .filter(|x| x.iter().all(|&v| v != 0) && riemann_transform(*x).is_some())
        .collect();
    let tasks = tuples
        .into_iter()
        .map(|x| {
            let (pp, m) = riemann_transform(x).expect("filtered");
            task(
                format!("three-term relation at x = {x:?} (m = {m:?}, p = {pp:?})"),
                "ϑ(x₁)ϑ(x₂)ϑ(x₃)ϑ(x₄) + ϑ(m₁)ϑ(m₂)ϑ(m₃)ϑ(m₄) = ϑ(p₁)ϑ(p₂)ϑ(p₃)ϑ(p₄)",
                move || {
                    Ok(Outcome::expect(
                        riemann_theta_relation_check(x, &p.qprec)?,
                        format!("holds below q^{}", p.qprec),
                        "coefficients differ",
                    ))
                },
            )
        })
        .collect();
    Ok(run_all(tasks))
}

// ---------------------------------------------------------------------------

struct Identity {
    index: i64,
    weight: i64,
    lhs: &'static str,
    first: &'static str,
    second: &'static str,
    anchor: &'static str,
}

const IDENTITY_67: Identity = Identity {
    index: 67,
    weight: 2,
    lhs: "eta^-6 th(1)^3 th(2)^2 th(3)^2 th(4) th(5) th(8)",
    first: "eta^-6 th(1)^2 th(2)^2 th(3)^2 th(4)^2 th(5) th(7)",
    second: "eta^-6 th(1)^3 th(2) th(3) th(4)^2 th(5)^2 th(6)",
    anchor: "index-67 theta block equals a difference of two theta blocks",
};

const IDENTITY_49: Identity = Identity {
    index: 49,
    weight: 3,
    lhs: "eta^-3 th(1)^4 th(2) th(3) th(4)^2 th(7)",
    first: "eta^-3 th(1)^3 th(2)^3 th(3) th(5) th(7)",
    second: "eta^-3 th(1)^5 th(2)^2 th(6) th(7)",
    anchor: "index-49 theta block equals a difference of two theta blocks",
};

fn identity(id: &Identity, p: &Params) -> Result<Vec<CheckResult>, Error> {
    let specs = [parse_block(id.lhs)?, parse_block(id.first)?, parse_block(id.second)?];
    let mut tasks: Vec<Task> = Vec::new();
    for (src, spec) in [id.lhs, id.first, id.second].into_iter().zip(specs) {
        tasks.push(task(
            format!("`{src}` has index {}, weight {} and q-order 1", id.index, id.weight),
            id.anchor,
            move || {
                let got = (spec.index(), spec.weight(), spec.q_order());
                let want = (Some(int(id.index as i128)), int(id.weight as i128), int(1));
                Ok(Outcome::expect(
                    got == want,
                    "as expected",
                    format!("index {:?}, weight {}, q-order {}", got.0, got.1, got.2),
                ))
            },
        ));
    }
    tasks.push(task(
        format!("`{}` is holomorphic", id.lhs),
        id.anchor,
        move || {
            let s = parse_block(id.lhs)?.build(&p.qprec)?;
            Ok(Outcome::expect(holomorphy_check(&s)?, "no coefficient with 4nN < ℓ²", "not holomorphic"))
        },
    ));
    tasks.push(task(
        "left side equals first block minus second block",
        id.anchor,
        move || {
            let build = |s: &str| parse_block(s).and_then(|b| b.build(&p.qprec));
            Ok(same(&build(id.lhs)?, &build(id.first)?.sub(&build(id.second)?)?))
        },
    ));
    Ok(run_all(tasks))
}

// ---------------------------------------------------------------------------

struct LatticeCase {
    name: &'static str,
    ambient: &'static str,
    full: NamedBlock,
    first: NamedBlock,
    second: NamedBlock,
    bases: fn() -> Vec<Vec<DualVector>>,
    parity: i8,
    f00: i128,
    vector_count: usize,
    types: fn() -> Vec<(Rat, u64)>,
    anchor: &'static str,
}

fn v(c: &[(i128, i128)]) -> DualVector {
    DualVector::new(c.iter().map(|&(n, d)| rat(n, d)).collect())
}

fn bases_l4() -> Vec<Vec<DualVector>> {
    vec![
        vec![
            v(&[(-1, 2), (1, 2), (1, 2), (1, 2)]),
            v(&[(0, 1), (1, 1), (0, 1), (0, 1)]),
            v(&[(1, 2), (1, 2), (1, 2), (-1, 2)]),
            v(&[(1, 1), (0, 1), (0, 1), (0, 1)]),
        ],
        vec![
            v(&[(0, 1), (1, 2), (-1, 2), (1, 2)]),
            v(&[(0, 1), (1, 1), (0, 1), (0, 1)]),
            v(&[(0, 1), (1, 2), (1, 2), (1, 2)]),
            v(&[(1, 1), (0, 1), (0, 1), (0, 1)]),
        ],
    ]
}

fn bases_l6() -> Vec<Vec<DualVector>> {
    let (z, o, m, h, mh) = ((0, 1), (1, 1), (-1, 1), (1, 2), (-1, 2));
    vec![
        vec![
            v(&[z, h, z, z, z, h]),
            v(&[m, z, z, z, m, z]),
            v(&[z, z, o, z, z, z]),
            v(&[z, z, z, o, z, z]),
            v(&[z, z, z, z, o, z]),
            v(&[z, h, z, z, z, mh]),
        ],
        vec![
            v(&[mh, h, z, z, z, h]),
            v(&[z, z, z, z, m, z]),
            v(&[z, z, o, z, z, z]),
            v(&[z, z, z, o, z, z]),
            v(&[o, z, z, z, o, z]),
            v(&[mh, h, z, z, z, mh]),
        ],
    ]
}

const BASIS_L4: LatticeCase = LatticeCase {
    name: "L4",
    ambient: "A4dual5",
    full: NamedBlock::L4,
    first: NamedBlock::L4First,
    second: NamedBlock::L4Second,
    bases: bases_l4,
    parity: 1,
    f00: 4,
    vector_count: 20,
    types: || vec![(int(1), 2), (rat(2, 5), 5), (rat(1, 5), 10)],
    anchor: "Θ_L4 = Θ_L4^(1) − Θ_L4^(2) is a singular-weight form for L4 ⊂ A4∨(5)",
};

const BASIS_L6: LatticeCase = LatticeCase {
    name: "L6",
    ambient: "3A2",
    full: NamedBlock::L6,
    first: NamedBlock::L6First,
    second: NamedBlock::L6Second,
    bases: bases_l6,
    parity: -1,
    f00: 6,
    vector_count: 18,
    types: || vec![(int(1), 2), (rat(2, 3), 3), (rat(1, 3), 6)],
    anchor: "Θ_L6 = Θ_L6^(1) − Θ_L6^(2) is a singular-weight form for L6 ⊂ 3A2",
};

fn basis(c: &LatticeCase, p: &Params) -> Result<Vec<CheckResult>, Error> {
    let l = lattice(c.name);
    let target = GramLattice::named(c.ambient)?.gram_rat();
    let full = c.full.build(&p.qprec)?;
    let first = c.first.build(&p.qprec)?;
    let second = c.second.build(&p.qprec)?;
    let (full, first, second) = (&full, &first, &second);
    let mut tasks: Vec<Task> = Vec::new();
    for (i, b) in (c.bases)().into_iter().enumerate() {
        let (l, target) = (l.clone(), target.clone());
        tasks.push(task(
            format!("basis {} of {} is a basis of an overlattice of {}", i + 1, c.ambient, c.name),
            c.anchor,
            move || {
                Ok(Outcome::expect(
                    check_embedding(&target, &b, &l)?,
                    "Gram matrices agree and the change of basis is integral",
                    "not an embedding",
                ))
            },
        ));
    }
    tasks.push(task(
        format!("{} = {} − {}", c.full.name(), c.first.name(), c.second.name()),
        c.anchor,
        move || Ok(same(full, &first.sub(second)?)),
    ));
    for (b, s) in [(c.full, full), (c.first, first), (c.second, second)] {
        tasks.push(task(
            format!("coefficients of {} are constant on Jacobi orbits", b.name()),
            c.anchor,
            move || {
                let r = orbit_invariance_report(s)?;
                Ok(match r.violations.first() {
                    None => Outcome::Pass(format!("{} coefficients checked", r.coefficients_checked)),
                    Some(v) => Outcome::Fail(format!(
                        "f{} = {} but f{} = {}",
                        v.first, v.first_value, v.second, v.second_value
                    )),
                })
            },
        ));
    }
    tasks.push(task(
        format!("{} is invariant under the O(D) classes", c.full.name()),
        c.anchor,
        move || {
            let r = od_class_invariance(full)?;
            Ok(Outcome::expect(r.passed, format!("{} classes agree", r.classes.len()), "a class differs"))
        },
    ));
    tasks.push(task(
        format!("{} alone is not invariant under the O(D) classes", c.first.name()),
        c.anchor,
        move || {
            let r = od_class_invariance(first)?;
            Ok(Outcome::expect(!r.passed, "invariance fails as it must", "unexpectedly invariant"))
        },
    ));
    tasks.push(task(
        format!("theta decomposition of {} round-trips with parity {:+}", c.full.name(), c.parity),
        c.anchor,
        move || {
            let d = theta_decompose(full)?;
            if d.parity() != Some(c.parity) {
                return Ok(Outcome::Fail(format!("parity {:?}", d.parity())));
            }
            if d.leading_exponent() != Some(int(0)) {
                return Ok(Outcome::Fail(format!("leading exponent {:?}", d.leading_exponent())));
            }
            Ok(same(&d.reconstruct()?, full))
        },
    ));
    if c.name == "L4" {
        tasks.push(task(
            "the difference is supported on order-10 classes only",
            c.anchor,
            move || {
                let orders = theta_decompose(&first.sub(second)?)?.support_orders();
                Ok(Outcome::expect(
                    orders.iter().eq([10].iter()),
                    "support orders {10}",
                    format!("support orders {orders:?}"),
                ))
            },
        ));
    }
    Ok(run_all(tasks))
}

// ---------------------------------------------------------------------------

struct VectorCase {
    lattice: LatticeCase,
    det: i64,
    level: u64,
    census: Option<[usize; 3]>,
    lists: fn() -> Vec<Vec<Vec<i64>>>,
}

const VECTORS_L4: VectorCase = VectorCase {
    lattice: BASIS_L4,
    det: 500,
    level: 10,
    census: Some([1, 20, 31]),
    lists: || {
        vec![
            vec![vec![2, 1, 1, 1]],
            vec![
                vec![0, 1, 1, 0],
                vec![0, 1, -1, 0],
                vec![0, 1, 0, 1],
                vec![0, 1, 0, -1],
                vec![0, 0, 1, 1],
                vec![0, 0, 1, -1],
            ],
            vec![vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
        ]
    },
};

const VECTORS_L6: VectorCase = VectorCase {
    lattice: BASIS_L6,
    det: 108,
    level: 6,
    census: None,
    lists: || {
        vec![
            vec![vec![2, 1, 0, 0, -1, 0], vec![0, 0, 0, 0, 1, 1]],
            vec![
                vec![0, 0, 1, 0, 0, 0],
                vec![0, 0, 0, 1, 0, 0],
                vec![0, 0, 1, -1, 0, 0],
                vec![0, 1, 0, 0, 0, -1],
                vec![0, 1, 0, 0, 0, 1],
            ],
            vec![vec![0, 1, 0, 0, 0, 0], vec![0, 0, 0, 0, 0, 1]],
        ]
    },
};

fn vectors(c: &VectorCase, _p: &Params) -> Result<Vec<CheckResult>, Error> {
    let lc = &c.lattice;
    let l = lattice(lc.name);
    let types = (lc.types)();
    let mut tasks: Vec<Task> = Vec::new();
    {
        let l = l.clone();
        tasks.push(task(
            format!("{} has determinant {} and level {}", lc.name, c.det, c.level),
            lc.anchor,
            move || {
                let got = (l.determinant(), l.level());
                Ok(Outcome::expect(
                    got == (c.det, c.level),
                    format!("invariant factors {:?}", l.discriminant_group().invariant_factors),
                    format!("determinant {}, level {}", got.0, got.1),
                ))
            },
        ));
    }
    if let Some(want) = c.census {
        let (l, types) = (l.clone(), types.clone());
        tasks.push(task(
            format!("discriminant classes per (norm, order) of {}", lc.name),
            lc.anchor,
            move || {
                let got: Vec<usize> = types.iter().map(|(n, o)| l.coset_census(n, *o)).collect();
                let label: Vec<String> = types.iter().map(|(n, o)| format!("({n}, {o})")).collect();
                Ok(Outcome::expect(
                    got == want,
                    format!("{} classes: {got:?}", label.join(" ")),
                    format!("{} classes: found {got:?}, expected {want:?}", label.join(" ")),
                ))
            },
        ));
    }
    for ((norm, order), list) in types.iter().cloned().zip((c.lists)()) {
        let l = l.clone();
        tasks.push(task(
            format!("dual vectors of norm {norm} and order {order} in {}", lc.name),
            lc.anchor,
            move || {
                let want: BTreeSet<DualVector> = list
                    .iter()
                    .flat_map(|x| {
                        let v = l.from_dual_coords(x);
                        [v.neg(), v]
                    })
                    .collect();
                let got: BTreeSet<DualVector> = l.enumerate_dual_by_norm_order(&norm, order).into_iter().collect();
                Ok(Outcome::expect(
                    got == want,
                    format!("{} vectors, matching the list up to sign", got.len()),
                    format!("found {} vectors, expected {}", got.len(), want.len()),
                ))
            },
        ));
    }
    tasks.push(task(
        format!("q⁰ term of the quotient Ψ_{}", lc.name),
        "Ψ = −(Θ|T₋(2))/Θ has q⁰ term f(0,0) plus the reflective vectors",
        move || {
            let q = quotient_psi(&lc.full.build(&int(3))?, &int(1))?;
            Ok(check_q0(&q, lc.f00, lc.vector_count, &types))
        },
    ));
    Ok(run_all(tasks))
}

fn check_q0(q: &Quotient, f00: i128, count: usize, types: &[(Rat, u64)]) -> Outcome {
    if !q.residual_vanishes {
        return Outcome::Fail("residual Ψ·Θ + Θ|T₋(2) does not vanish".into());
    }
    let l = q.psi.lattice();
    let Some(slice) = q.psi.slice24(0) else {
        return Outcome::Fail("empty q⁰ term".into());
    };
    let mut support = BTreeSet::new();
    for (key, c) in slice {
        let v = q.psi.vector_of(key);
        if v.is_zero() {
            if *c != int(f00) {
                return Outcome::Fail(format!("f(0,0) = {c}, expected {f00}"));
            }
        } else if *c != int(1) {
            return Outcome::Fail(format!("f(0,{v}) = {c}, expected 1"));
        } else {
            support.insert(v);
        }
    }
    let want: BTreeSet<DualVector> =
        types.iter().flat_map(|(n, o)| l.enumerate_dual_by_norm_order(n, *o)).collect();
    Outcome::expect(
        support == want && support.len() == count,
        format!("f(0,0) = {f00}, {count} vectors with coefficient 1"),
        format!("q⁰ support has {} vectors, expected {count}", support.len()),
    )
}

// ---------------------------------------------------------------------------

struct Family<const N: usize> {
    weight: i64,
    lattice: NamedBlock,
    spec: fn([i64; N]) -> ThetaBlockSpec,
    index: fn([i64; N]) -> i64,
    restriction: fn([i64; N]) -> [i64; N],
    sign: i64,
    corollary: fn([i64; N], u8, &Rat) -> thetablock::Result<FourierSeries>,
    anchor: &'static str,
    corollary_anchor: &'static str,
}

const FAMILY_WT2: Family<4> = Family {
    weight: 2,
    lattice: NamedBlock::L4,
    spec: family_wt2_spec,
    index: index_wt2,
    restriction: specialization_wt2,
    sign: SPECIALIZATION_SIGN_WT2,
    corollary: build_corollary_wt2,
    anchor: "φ_{2,a} is a holomorphic Jacobi form of weight 2 and index N(a), the restriction of Θ_L4",
    corollary_anchor: "φ_{2,a} is a difference of two pure theta blocks of weight 2",
};

const FAMILY_WT3: Family<6> = Family {
    weight: 3,
    lattice: NamedBlock::L6,
    spec: family_wt3_spec,
    index: index_wt3,
    restriction: specialization_wt3,
    sign: SPECIALIZATION_SIGN_WT3,
    corollary: build_corollary_wt3,
    anchor: "φ_{3,b} is a holomorphic Jacobi form of weight 3 and index N(b), the restriction of Θ_L6",
    corollary_anchor: "φ_{3,b} is a difference of two pure theta blocks of weight 3",
};

/// Nondegenerate parameters in the grid, one per ± pair.
fn family_grid<const N: usize>(f: &Family<N>, bound: i64) -> Vec<[i64; N]> {
    grid::<N>(bound).into_iter().filter(|a| (f.spec)(*a).degenerate().is_none()).collect()
}

fn failures<const N: usize>(
    total: usize,
    bad: Vec<[i64; N]>,
    what: &str,
) -> Outcome {
    if bad.is_empty() {
        Outcome::Pass(format!("{total} parameter tuples"))
    } else {
        Outcome::Fail(format!("{} of {total} tuples fail {what}: {}", bad.len(), tuple_list(&bad, 5)))
    }
}

fn collect_bad<const N: usize>(
    params: &[[i64; N]],
    ok: impl Fn([i64; N]) -> Result<bool, Error> + Sync,
) -> Result<Vec<[i64; N]>, Error> {
    use rayon::prelude::*;
    let verdicts: Vec<Result<bool, Error>> = params.par_iter().map(|a| ok(*a)).collect();
    let mut bad = Vec::new();
    for (a, r) in params.iter().zip(verdicts) {
        if !r? {
            bad.push(*a);
        }
    }
    Ok(bad)
}

fn family<const N: usize>(f: &Family<N>, p: &Params) -> Result<Vec<CheckResult>, Error> {
    let params = family_grid(f, p.grid_bound);
    let params = &params;
    let theta = f.lattice.build(&p.qprec)?;
    let theta = &theta;
    let w = f.weight as i128;
    let tasks = vec![
        task(
            format!("index N, weight {} and q-order 1 for every nonzero block", f.weight),
            f.anchor,
            move || {
                let bad = collect_bad(params, |a| {
                    let s = (f.spec)(a);
                    Ok(s.index() == Some(int((f.index)(a) as i128)) && s.weight() == int(w) && s.q_order() == int(1))
                })?;
                Ok(failures(params.len(), bad, "the formulas"))
            },
        ),
        task(
            format!("restriction of {} along v has index (v, v)/2 = N", f.lattice.name()),
            f.anchor,
            move || {
                let l = theta.lattice();
                let bad = collect_bad(params, |a| {
                    let v = DualVector::from_ints(&(f.restriction)(a));
                    Ok(l.norm(&v) == int(2 * (f.index)(a) as i128))
                })?;
                Ok(failures(params.len(), bad, "the norm relation"))
            },
        ),
        task(
            format!("restriction of {} equals the theta block, sign {:+}", f.lattice.name(), f.sign),
            f.anchor,
            move || {
                let bad = collect_bad(params, |a| {
                    let r = theta.specialize(&(f.restriction)(a))?;
                    let r = if f.sign < 0 { r.neg() } else { r };
                    let s = (f.spec)(a).build(&p.qprec)?;
                    Ok(r.first_difference(&s).is_none())
                })?;
                Ok(failures(params.len(), bad, "the restriction identity"))
            },
        ),
        task("every block is holomorphic", f.anchor, move || {
            let bad = collect_bad(params, |a| holomorphy_check(&(f.spec)(a).build(&p.qprec)?))?;
            Ok(failures(params.len(), bad, "holomorphy"))
        }),
    ];
    Ok(run_all(tasks))
}

fn corollary<const N: usize>(f: &Family<N>, p: &Params) -> Result<Vec<CheckResult>, Error> {
    let params = family_grid(f, p.grid_bound);
    let params = &params;
    let tasks = vec![task(
        "φ equals the difference of the two corollary blocks",
        f.corollary_anchor,
        move || {
            let bad = collect_bad(params, |a| {
                let lhs = (f.spec)(a).build(&p.qprec)?;
                let rhs = (f.corollary)(a, 1, &p.qprec)?.sub(&(f.corollary)(a, 2, &p.qprec)?)?;
                Ok(lhs.first_difference(&rhs).is_none())
            })?;
            Ok(failures(params.len(), bad, "the identity"))
        },
    )];
    Ok(run_all(tasks))
}

// ---------------------------------------------------------------------------

fn grit_borch(c: &LatticeCase, p: &Params) -> Result<Vec<CheckResult>, Error> {
    let qp = p.qprec.ceil().to_integer();
    // Θ below q^{2P+3} determines Ψ below q^{P+1}
    let theta = c.full.build(&int(2 * qp + 3))?;
    let quotient = quotient_psi(&theta, &int(qp + 1));
    let quotient = &quotient;
    let anchor = c.anchor_lift();
    let types = (c.types)();
    let expansions = |q: &Quotient| -> Result<(FJ, FJ, usize), Error> {
        let b = borcherds_expand(&q.psi, p.fj_order, &p.qprec)?;
        let cc = b.borcherds.as_ref().expect("product data").c.to_integer() as usize;
        let top = cc + p.fj_order;
        let t = c.full.build(&int(top as i128 * (qp - 1) + 1))?;
        let g = grit(&t, top, &p.qprec)?;
        Ok((b, g, cc))
    };
    let pair = quotient.as_ref().map_err(Clone::clone).and_then(expansions);
    let pair = &pair;
    let mut tasks: Vec<Task> = vec![
        task(format!("quotient Ψ_{} and its q⁰ term", c.name), anchor, move || {
            let q = quotient.as_ref().map_err(Clone::clone)?;
            Ok(check_q0(q, c.f00, c.vector_count, &types))
        }),
        task(format!("Borcherds constants of Ψ_{}", c.name), anchor, move || {
            let q = quotient.as_ref().map_err(Clone::clone)?;
            let d = borcherds_data(&q.psi)?;
            let detail = format!("A = {}, B = {}, C = {}, D = {}", d.a, d.b, d.c, d.d);
            if d.a != int(1) || d.c != int(1) {
                return Ok(Outcome::Fail(detail));
            }
            Ok(match same(&d.leading_block(&p.qprec)?, &c.full.build(&p.qprec)?) {
                Outcome::Pass(_) => Outcome::Pass(format!("{detail}; leading block is {}", c.full.name())),
                o => o,
            })
        }),
    ];
    for k in 0..=p.fj_order {
        tasks.push(task(
            format!("Fourier–Jacobi coefficient at ξ^(C+{k})"),
            anchor,
            move || {
                let (b, g, cc) = pair.as_ref().map_err(Clone::clone)?;
                let m = cc + k;
                let (bm, gm) = (&b.coeffs[m], &g.coeffs[m]);
                if bm.qprec() < Some(p.qprec) {
                    return Ok(Outcome::Skipped(format!(
                        "product known only below q^{}",
                        bm.qprec().expect("truncated")
                    )));
                }
                Ok(match same(bm, gm) {
                    Outcome::Pass(d) => Outcome::Pass(format!("ξ^{m}: {d}")),
                    o => o,
                })
            },
        ));
    }
    Ok(run_all(tasks))
}

type FJ = thetablock::lifts::FJExpansion;

impl LatticeCase {
    fn anchor_lift(&self) -> &'static str {
        match self.name {
            "L4" => "Borch(Ψ_L4) = Grit(Θ_L4)",
            _ => "Borch(Ψ_L6) = Grit(Θ_L6)",
        }
    }
}
