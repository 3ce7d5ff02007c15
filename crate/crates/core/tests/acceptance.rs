//! Acceptance run: one line per criterion with its verdict and timing.
//!
//! Criterion 1 contains one literal expectation the engine cannot meet (the
//! census count 31, where the discriminant form has 30 such classes). It is
//! reported as FAIL and listed in `KNOWN_FAILURES`; the run as a whole fails
//! if any other criterion fails or if a known failure changes character.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use thetablock::blocks::*;
use thetablock::hecke::apply_t_minus;
use thetablock::lattice::check_embedding;
use thetablock::lifts::{borcherds_data, borcherds_expand, grit, quotient_psi, Quotient};
use thetablock::rational::{int, rat};
use thetablock::weil::{od_class_invariance, orbit_invariance_report, theta_decompose};
use thetablock::{DualVector, FourierSeries, GramLattice, Rat};

/// Criteria expected to fail, with the detail they must fail with.
const KNOWN_FAILURES: &[(u32, &str)] = &[(1, "census (norm 1/5, order 10) = 30, expected 31")];

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn same(a: &FourierSeries, b: &FourierSeries, what: &str) -> Check {
    match a.first_difference(b) {
        None => Ok(()),
        Some((q, key)) => Err(format!("{what}: first difference at q^{q}/24, key {key:?}")),
    }
}

fn named(name: &str) -> GramLattice {
    GramLattice::named(name).unwrap()
}

// 1 --------------------------------------------------------------------------

fn lattice_data() -> Check {
    let (l4, l6) = (named("L4"), named("L6"));
    ensure(l4.determinant() == 500 && l4.level() == 10, || "L4 det/level".into())?;
    ensure(l6.determinant() == 108 && l6.level() == 6, || "L6 det/level".into())?;
    let census = (
        l4.coset_census(&int(1), 2),
        l4.coset_census(&rat(2, 5), 5),
        l4.coset_census(&rat(1, 5), 10),
    );
    ensure(census.0 == 1 && census.1 == 20, || format!("census {census:?}"))?;
    ensure(census.2 == 31, || {
        format!("census (norm 1/5, order 10) = {}, expected 31", census.2)
    })
}

// 2 --------------------------------------------------------------------------

fn vector_lists() -> Check {
    let check = |l: &GramLattice, types: &[(Rat, u64, Vec<Vec<i64>>)]| -> Check {
        for (norm, order, list) in types {
            let expected: std::collections::BTreeSet<DualVector> = list
                .iter()
                .flat_map(|c| {
                    let v = l.from_dual_coords(c);
                    [v.neg(), v]
                })
                .collect();
            let found = l.enumerate_dual_by_norm_order(norm, *order).into_iter().collect();
            ensure(expected == found, || format!("type ({norm}, {order})"))?;
        }
        Ok(())
    };
    check(
        &named("L4"),
        &[
            (int(1), 2, vec![vec![2, 1, 1, 1]]),
            (
                rat(2, 5),
                5,
                vec![
                    vec![0, 1, 1, 0],
                    vec![0, 1, -1, 0],
                    vec![0, 1, 0, 1],
                    vec![0, 1, 0, -1],
                    vec![0, 0, 1, 1],
                    vec![0, 0, 1, -1],
                ],
            ),
            (rat(1, 5), 10, vec![vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]),
        ],
    )?;
    check(
        &named("L6"),
        &[
            (int(1), 2, vec![vec![2, 1, 0, 0, -1, 0], vec![0, 0, 0, 0, 1, 1]]),
            (
                rat(2, 3),
                3,
                vec![
                    vec![0, 0, 1, 0, 0, 0],
                    vec![0, 0, 0, 1, 0, 0],
                    vec![0, 0, 1, -1, 0, 0],
                    vec![0, 1, 0, 0, 0, -1],
                    vec![0, 1, 0, 0, 0, 1],
                ],
            ),
            (rat(1, 3), 6, vec![vec![0, 1, 0, 0, 0, 0], vec![0, 0, 0, 0, 0, 1]]),
        ],
    )
}

// 3 --------------------------------------------------------------------------

fn embeddings() -> Check {
    let v = |c: &[(i128, i128)]| DualVector::new(c.iter().map(|&(n, d)| rat(n, d)).collect());
    let a4 = named("A4dual5").gram_rat();
    let l4 = named("L4");
    let bases4 = [
        [
            v(&[(-1, 2), (1, 2), (1, 2), (1, 2)]),
            v(&[(0, 1), (1, 1), (0, 1), (0, 1)]),
            v(&[(1, 2), (1, 2), (1, 2), (-1, 2)]),
            v(&[(1, 1), (0, 1), (0, 1), (0, 1)]),
        ],
        [
            v(&[(0, 1), (1, 2), (-1, 2), (1, 2)]),
            v(&[(0, 1), (1, 1), (0, 1), (0, 1)]),
            v(&[(0, 1), (1, 2), (1, 2), (1, 2)]),
            v(&[(1, 1), (0, 1), (0, 1), (0, 1)]),
        ],
    ];
    for (i, b) in bases4.iter().enumerate() {
        ensure(check_embedding(&a4, b, &l4).unwrap(), || format!("L4 basis {}", i + 1))?;
    }
    let h = (1, 2);
    let a2 = named("3A2").gram_rat();
    let l6 = named("L6");
    let bases6 = [
        [
            v(&[(0, 1), h, (0, 1), (0, 1), (0, 1), h]),
            v(&[(-1, 1), (0, 1), (0, 1), (0, 1), (-1, 1), (0, 1)]),
            v(&[(0, 1), (0, 1), (1, 1), (0, 1), (0, 1), (0, 1)]),
            v(&[(0, 1), (0, 1), (0, 1), (1, 1), (0, 1), (0, 1)]),
            v(&[(0, 1), (0, 1), (0, 1), (0, 1), (1, 1), (0, 1)]),
            v(&[(0, 1), h, (0, 1), (0, 1), (0, 1), (-1, 2)]),
        ],
        [
            v(&[(-1, 2), h, (0, 1), (0, 1), (0, 1), h]),
            v(&[(0, 1), (0, 1), (0, 1), (0, 1), (-1, 1), (0, 1)]),
            v(&[(0, 1), (0, 1), (1, 1), (0, 1), (0, 1), (0, 1)]),
            v(&[(0, 1), (0, 1), (0, 1), (1, 1), (0, 1), (0, 1)]),
            v(&[(1, 1), (0, 1), (0, 1), (0, 1), (1, 1), (0, 1)]),
            v(&[(-1, 2), h, (0, 1), (0, 1), (0, 1), (-1, 2)]),
        ],
    ];
    for (i, b) in bases6.iter().enumerate() {
        ensure(check_embedding(&a2, b, &l6).unwrap(), || format!("L6 basis {}", i + 1))?;
    }
    Ok(())
}

// 4 --------------------------------------------------------------------------

fn index_formulas() -> Check {
    let l4 = named("L4");
    let l6 = named("L6");
    let mut checked = 0usize;
    let r = -3..=3i64;
    for a1 in r.clone() {
        for a2 in r.clone() {
            for a3 in r.clone() {
                for a4 in r.clone() {
                    let a = [a1, a2, a3, a4];
                    let spec = family_wt2_spec(a);
                    if spec.degenerate().is_some() {
                        continue;
                    }
                    let n = index_wt2(a);
                    ensure(spec.index() == Some(int(n as i128)), || format!("index {a:?}"))?;
                    ensure(spec.weight() == int(2) && spec.q_order() == int(1), || {
                        format!("weight/q-order {a:?}")
                    })?;
                    // restriction of an index-1 form along v has index (v, v)/2
                    let v = DualVector::from_ints(&specialization_wt2(a));
                    ensure(l4.norm(&v) == int(2 * n as i128), || format!("norm {a:?}"))?;
                    checked += 1;
                }
            }
        }
    }
    let mut b = [0i64; 6];
    for code in 0..5i64.pow(6) {
        let mut c = code;
        for x in b.iter_mut() {
            *x = c % 5 - 2;
            c /= 5;
        }
        let spec = family_wt3_spec(b);
        if spec.degenerate().is_some() {
            continue;
        }
        let n = index_wt3(b);
        ensure(spec.index() == Some(int(n as i128)), || format!("index {b:?}"))?;
        ensure(spec.weight() == int(3) && spec.q_order() == int(1), || {
            format!("weight/q-order {b:?}")
        })?;
        let v = DualVector::from_ints(&specialization_wt3(b));
        ensure(l6.norm(&v) == int(2 * n as i128), || format!("norm {b:?}"))?;
        checked += 1;
    }
    // most tuples in the box have a vanishing argument
    ensure(checked > 2_000, || format!("only {checked} tuples"))
}

// 5 --------------------------------------------------------------------------

fn identities() -> Check {
    let p = int(10);
    let build = |s: &str| parse_block(s).unwrap().build(&p).unwrap();
    let lhs = build("eta^-6 th(1)^3 th(2)^2 th(3)^2 th(4) th(5) th(8)");
    let rhs = build("eta^-6 th(1)^2 th(2)^2 th(3)^2 th(4)^2 th(5) th(7)")
        .sub(&build("eta^-6 th(1)^3 th(2) th(3) th(4)^2 th(5)^2 th(6)"))
        .unwrap();
    same(&lhs, &rhs, "index 67")?;
    let lhs = build("eta^-3 th(1)^4 th(2) th(3) th(4)^2 th(7)");
    let rhs = build("eta^-3 th(1)^3 th(2)^3 th(3) th(5) th(7)")
        .sub(&build("eta^-3 th(1)^5 th(2)^2 th(6) th(7)"))
        .unwrap();
    same(&lhs, &rhs, "index 49")?;
    for (full, first, second, name) in [
        (NamedBlock::L4, NamedBlock::L4First, NamedBlock::L4Second, "L4"),
        (NamedBlock::L6, NamedBlock::L6First, NamedBlock::L6Second, "L6"),
    ] {
        let diff = first.build(&p).unwrap().sub(&second.build(&p).unwrap()).unwrap();
        same(&full.build(&p).unwrap(), &diff, name)?;
    }
    let mut tuples = 0;
    for x in -4..=4i64 {
        for y in 0..=3i64 {
            for z in 1..=2i64 {
                let s = x + 2 + y + z;
                let t = [x + 2, y, z, 2 - s.rem_euclid(2)];
                if riemann_transform(t).is_none() || t[0] == 0 {
                    continue;
                }
                ensure(riemann_theta_relation_check(t, &p).unwrap(), || {
                    format!("Riemann relation at {t:?}")
                })?;
                tuples += 1;
            }
        }
    }
    ensure(tuples >= 20, || format!("only {tuples} Riemann tuples"))?;
    let wt2 = [
        [3, 1, 1, 1],
        [1, 1, 1, 1],
        [4, 1, 1, 1],
        [5, 2, 1, 1],
        [3, 2, 1, 1],
        [6, 1, 2, 1],
        [7, 3, 2, 1],
        [5, 1, 2, 1],
        [8, 2, 3, 1],
        [4, 3, 1, 2],
        [9, 1, 3, 2],
    ];
    for a in wt2 {
        let diff = build_corollary_wt2(a, 1, &p)
            .unwrap()
            .sub(&build_corollary_wt2(a, 2, &p).unwrap())
            .unwrap();
        same(&build_family_wt2(a, &p).unwrap(), &diff, &format!("weight 2 at {a:?}"))?;
    }
    let wt3 = [
        [1, 2, 1, 3, 1, 1],
        [1, 3, 1, 1, 1, 1],
        [1, 3, 2, 1, 2, 1],
        [2, 4, 1, 1, 1, 2],
        [1, 4, 2, 1, 1, 3],
        [2, 5, 1, 2, 2, 1],
        [1, 3, 1, 2, 3, 1],
        [3, 6, 1, 1, 1, 1],
        [1, 5, 3, 1, 2, 2],
        [2, 6, 2, 1, 1, 1],
        [1, 4, 1, 1, 2, 3],
    ];
    for b in wt3 {
        let diff = build_corollary_wt3(b, 1, &p)
            .unwrap()
            .sub(&build_corollary_wt3(b, 2, &p).unwrap())
            .unwrap();
        same(&build_family_wt3(b, &p).unwrap(), &diff, &format!("weight 3 at {b:?}"))?;
    }
    Ok(())
}

// 6, 7, 8 --------------------------------------------------------------------

fn quotient(theta: NamedBlock) -> Quotient {
    quotient_psi(&theta.build(&int(11)).unwrap(), &int(5)).unwrap()
}

fn check_quotient(q: &Quotient, f00: i128, count: usize, types: &[(Rat, u64)]) -> Check {
    ensure(q.residual_vanishes, || "residual does not vanish".into())?;
    ensure(q.psi.qprec().is_some_and(|p| p >= int(4)), || "precision below 4".into())?;
    let l = q.psi.lattice();
    let slice = q.psi.slice24(0).ok_or("empty q^0 slice")?;
    let mut support = std::collections::BTreeSet::new();
    for (key, c) in slice {
        let v = q.psi.vector_of(key);
        if v.is_zero() {
            ensure(*c == int(f00), || format!("f(0,0) = {c}"))?;
        } else {
            ensure(*c == int(1), || format!("f(0,{v}) = {c}"))?;
            support.insert(v);
        }
    }
    let expected: std::collections::BTreeSet<DualVector> = types
        .iter()
        .flat_map(|(n, o)| l.enumerate_dual_by_norm_order(n, *o))
        .collect();
    ensure(support.len() == count && support == expected, || {
        format!("q^0 support has {} vectors", support.len())
    })
}

fn constants(q: &Quotient, theta: NamedBlock) -> Check {
    let d = borcherds_data(&q.psi).map_err(|e| e.to_string())?;
    ensure(d.a == int(1) && d.c == int(1), || format!("A = {}, C = {}", d.a, d.c))?;
    let lead = d.leading_block(&int(6)).unwrap();
    same(&lead, &theta.build(&int(6)).unwrap(), "leading block")
}

fn grit_vs_borch(q: &Quotient, theta: NamedBlock) -> Check {
    let qprec = 4;
    let b = borcherds_expand(&q.psi, 2, &int(qprec)).map_err(|e| e.to_string())?;
    let c = b.borcherds.as_ref().unwrap().c.to_integer() as usize;
    let t = theta.build(&int(3 * (qprec - 1) + 1)).unwrap();
    let g = grit(&t, c + 2, &int(qprec)).unwrap();
    for m in c + 1..=c + 2 {
        ensure(b.coeffs[m].qprec() == Some(int(qprec)), || format!("ξ^{m} precision"))?;
        same(&b.coeffs[m], &g.coeffs[m], &format!("ξ^{m}"))?;
    }
    Ok(())
}

// 9 --------------------------------------------------------------------------

fn hecke_oracle() -> Check {
    let theta = NamedBlock::L4.build(&int(10)).unwrap();
    for m in [2, 3] {
        let fast = apply_t_minus(&theta, m, 2).unwrap();
        let safe = fast.prec24();
        let slow: BTreeMap<_, _> = common::by_substitution(&theta, m, 2)
            .into_iter()
            .filter(|((q, _), _)| *q < safe)
            .collect();
        let fast: BTreeMap<_, _> = fast.terms().map(|(q, k, c)| ((q, k.clone()), *c)).collect();
        ensure(fast == slow, || format!("T₋({m}) differs"))?;
    }
    Ok(())
}

// 10, 11 ---------------------------------------------------------------------

fn invariance() -> Check {
    for b in NamedBlock::ALL {
        let r = orbit_invariance_report(&b.build(&int(5)).unwrap()).unwrap();
        ensure(r.passed, || format!("orbit invariance of {}", b.name()))?;
    }
    for b in [NamedBlock::L4, NamedBlock::L6] {
        let r = od_class_invariance(&b.build(&int(5)).unwrap()).unwrap();
        ensure(r.passed, || format!("O(D) classes of {}", b.name()))?;
    }
    let r = od_class_invariance(&NamedBlock::L4First.build(&int(5)).unwrap()).unwrap();
    ensure(!r.passed, || "O(D) classes of thetaL4_1 unexpectedly pass".into())
}

fn round_trip() -> Check {
    for b in [NamedBlock::L4, NamedBlock::L6] {
        let s = b.build(&int(3)).unwrap();
        let back = theta_decompose(&s).unwrap().reconstruct().unwrap();
        ensure(back.qprec() == Some(int(3)), || format!("{} precision", b.name()))?;
        same(&back, &s, b.name())?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------

fn run(n: u32, what: &str, limit: Duration, f: impl FnOnce() -> Check) -> (u32, Check) {
    let t = Instant::now();
    let mut out = f();
    let el = t.elapsed();
    if out.is_ok() && el > limit {
        out = Err(format!("took {el:?}, limit {limit:?}"));
    }
    match &out {
        Ok(()) => println!("criterion {n:>2} PASS  {:>8.2}s  {what}", el.as_secs_f64()),
        Err(e) => println!("criterion {n:>2} FAIL  {:>8.2}s  {what}: {e}", el.as_secs_f64()),
    }
    (n, out)
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut results = vec![
        run(1, "lattice data and census", secs(1), lattice_data),
        run(2, "vector type lists", secs(1), vector_lists),
        run(3, "embeddings", secs(1), embeddings),
        run(4, "index, weight and q-order formulas", secs(30), index_formulas),
        run(5, "identity campaigns at qprec 10", secs(120), identities),
    ];
    let mut psi: Vec<Arc<Quotient>> = Vec::new();
    results.push(run(6, "quotient construction", secs(300), || {
        let l4 = quotient(NamedBlock::L4);
        let l6 = quotient(NamedBlock::L6);
        check_quotient(&l4, 4, 20, &[(int(1), 2), (rat(2, 5), 5), (rat(1, 5), 10)])?;
        check_quotient(&l6, 6, 18, &[(int(1), 2), (rat(2, 3), 3), (rat(1, 3), 6)])?;
        psi.push(Arc::new(l4));
        psi.push(Arc::new(l6));
        Ok(())
    }));
    let blocks = [NamedBlock::L4, NamedBlock::L6];
    results.push(run(7, "Borcherds constants", secs(1), || {
        ensure(psi.len() == 2, || "no quotient".into())?;
        psi.iter().zip(blocks).try_for_each(|(q, b)| constants(q, b))
    }));
    results.push(run(8, "Grit against Borch at ξ^{C+1}, ξ^{C+2}", secs(900), || {
        ensure(psi.len() == 2, || "no quotient".into())?;
        psi.iter().zip(blocks).try_for_each(|(q, b)| grit_vs_borch(q, b))
    }));
    results.push(run(9, "Hecke oracle equivalence", secs(60), hecke_oracle));
    results.push(run(10, "invariance suites", secs(60), invariance));
    results.push(run(11, "theta decomposition round trip", secs(60), round_trip));

    let mut ok = true;
    for (n, r) in &results {
        let known = KNOWN_FAILURES.iter().find(|(k, _)| k == n);
        match (r, known) {
            (Ok(()), None) => {}
            (Err(e), Some((_, detail))) if e == detail => {
                println!("criterion {n:>2} is a recorded deviation");
            }
            (Ok(()), Some(_)) => {
                println!("criterion {n:>2} passed but is listed as a known failure");
                ok = false;
            }
            (Err(_), _) => ok = false,
        }
    }
    let passed = results.iter().filter(|(_, r)| r.is_ok()).count();
    println!("{passed}/{} criteria pass", results.len());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
