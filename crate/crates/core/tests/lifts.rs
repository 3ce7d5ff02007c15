use std::collections::BTreeSet;
use std::sync::OnceLock;

use thetablock::blocks::NamedBlock;
use thetablock::hecke::apply_t_minus;
use thetablock::lifts::{
    borcherds_data, borcherds_expand, divisor_multiplicity, grit, quotient_psi, Quotient,
};
use thetablock::rational::{int, rat};
use thetablock::{DualVector, Error, FourierSeries, Rat};

fn psi_l4() -> &'static Quotient {
    static PSI: OnceLock<Quotient> = OnceLock::new();
    PSI.get_or_init(|| {
        let theta = NamedBlock::L4.build(&int(11)).unwrap();
        quotient_psi(&theta, &int(5)).unwrap()
    })
}

fn psi_l6() -> &'static Quotient {
    static PSI: OnceLock<Quotient> = OnceLock::new();
    PSI.get_or_init(|| {
        let theta = NamedBlock::L6.build(&int(11)).unwrap();
        quotient_psi(&theta, &int(5)).unwrap()
    })
}

/// The expected q⁰ support: all dual vectors of the listed (norm, order) types.
fn expected_support(psi: &FourierSeries, types: &[(Rat, u64)]) -> BTreeSet<DualVector> {
    let l = psi.lattice();
    types
        .iter()
        .flat_map(|(n, o)| l.enumerate_dual_by_norm_order(n, *o))
        .collect()
}

fn check_q0(psi: &FourierSeries, f00: i64, types: &[(Rat, u64)], count: usize) {
    let slice = psi.slice24(0).unwrap();
    let mut support = BTreeSet::new();
    for (key, c) in slice {
        let v = psi.vector_of(key);
        if v.is_zero() {
            assert_eq!(*c, int(f00 as i128));
        } else {
            assert_eq!(*c, int(1), "coefficient at {v}");
            support.insert(v);
        }
    }
    assert_eq!(support.len(), count);
    assert_eq!(support, expected_support(psi, types));
}

#[test]
fn quotient_for_l4_has_the_reflective_q0_term() {
    let q = psi_l4();
    assert!(q.residual_vanishes);
    assert!(q.weak_support);
    assert_eq!(q.psi.weight(), Some(int(0)));
    assert_eq!(q.psi.jacobi_index(), Some(int(1)));
    assert_eq!(q.psi.qprec(), Some(int(5)));
    check_q0(&q.psi, 4, &[(int(1), 2), (rat(2, 5), 5), (rat(1, 5), 10)], 20);
}

#[test]
fn quotient_for_l6_has_the_reflective_q0_term() {
    let q = psi_l6();
    assert!(q.residual_vanishes);
    assert!(q.weak_support);
    check_q0(&q.psi, 6, &[(int(1), 2), (rat(2, 3), 3), (rat(1, 3), 6)], 18);
}

#[test]
fn quotient_precision_follows_the_input() {
    let theta = NamedBlock::L4.build(&int(7)).unwrap();
    let q = quotient_psi(&theta, &int(10)).unwrap();
    // RHS known below q^4, so Ψ below q^3
    assert_eq!(q.psi.qprec(), Some(int(3)));
    assert!(q.residual_vanishes);
    assert_eq!(
        q.psi.first_difference(&psi_l4().psi.clone().truncate(&int(3)).unwrap()),
        None
    );
}

#[test]
fn quotient_rejects_bad_inputs() {
    let l4 = NamedBlock::L4.build(&int(4)).unwrap();
    let zero = l4.sub(&l4).unwrap();
    assert!(matches!(quotient_psi(&zero, &int(2)), Err(Error::NotInvertible(_))));
    let sq = l4.mul(&l4).unwrap();
    assert!(matches!(quotient_psi(&sq, &int(2)), Err(Error::Unsupported(_))));
}

#[test]
fn borcherds_constants() {
    for (q, theta) in [(psi_l4(), NamedBlock::L4), (psi_l6(), NamedBlock::L6)] {
        let d = borcherds_data(&q.psi).unwrap();
        assert_eq!(d.a, int(1));
        assert_eq!(d.c, int(1));
        assert_eq!(d.d, 0);
        assert_eq!(d.leading_spec.q_order(), d.a);
        let lead = d.leading_block(&int(6)).unwrap();
        assert_eq!(lead.qorder(), Some(d.a));
        // with the lexicographic ordering the leading block is Θ itself
        let expected = theta.build(&int(6)).unwrap();
        assert_eq!(lead.first_difference(&expected), None);
        assert_eq!(lead.weight(), expected.weight());
    }
}

#[test]
fn grit_is_hecke_images_and_additive() {
    let t1 = NamedBlock::L4First.build(&int(8)).unwrap();
    let t2 = NamedBlock::L4Second.build(&int(8)).unwrap();
    let t = t1.sub(&t2).unwrap();
    let g = grit(&t, 3, &int(8)).unwrap();
    let g1 = grit(&t1, 3, &int(8)).unwrap();
    let g2 = grit(&t2, 3, &int(8)).unwrap();
    assert!(g.symmetric);
    assert_eq!(g.coeffs.len(), 4);
    assert!(g.coeffs[0].is_zero());
    assert_eq!(g.coeffs[1].first_difference(&t), None);
    assert_eq!(g.coeffs[2].first_difference(&apply_t_minus(&t, 2, 2).unwrap()), None);
    for m in 0..=3 {
        assert_eq!(g.coeffs[m].jacobi_index(), Some(int(m as i128)));
        let diff = g1.coeffs[m].sub(&g2.coeffs[m]).unwrap();
        assert_eq!(diff.first_difference(&g.coeffs[m]), None, "ξ^{m}");
    }
    // and the difference is the lattice block
    let theta = NamedBlock::L4.build(&int(8)).unwrap();
    assert_eq!(theta.first_difference(&t), None);
}

#[test]
fn grit_rejects_an_eisenstein_term() {
    let one = FourierSeries::one(psi_l4().psi.lattice_arc().clone()).with_weight(Some(int(2)));
    assert!(matches!(grit(&one, 2, &int(3)), Err(Error::IndexMismatch | Error::Unsupported(_))));
}

/// `E = exp(−Σ_m ψ_m ξ^m)` with `ψ_m = Ψ|₀T₋(m)`, via `jE_j = −Σ m ψ_m E_{j−m}`.
fn exp_route(psi: &FourierSeries, order: usize, qprec: &Rat) -> Vec<FourierSeries> {
    let l = psi.lattice_arc().clone();
    let psis: Vec<FourierSeries> = (1..=order as i64)
        .map(|m| apply_t_minus(psi, m, 0).unwrap().truncate(qprec).unwrap())
        .collect();
    let mut e = vec![FourierSeries::one(l).truncate(qprec).unwrap()];
    for j in 1..=order {
        let mut acc: Option<FourierSeries> = None;
        for m in 1..=j {
            let t = psis[m - 1].mul(&e[j - m]).unwrap().scale(&int(m as i128));
            acc = Some(match acc {
                None => t,
                Some(a) => a.add(&t).unwrap(),
            });
        }
        e.push(acc.unwrap().scale(&rat(-1, j as i128)));
    }
    e
}

#[test]
fn product_agrees_with_the_exponential_route() {
    let q = psi_l4();
    let b = borcherds_expand(&q.psi, 2, &int(3)).unwrap();
    let theta0 = b.coeffs[1].clone();
    let e = exp_route(&q.psi, 2, &int(3));
    for j in 0..=2 {
        let expected = theta0.mul(&e[j]).unwrap();
        let got = &b.coeffs[1 + j];
        let p = got.prec24().min(expected.prec24());
        assert!(p >= 24 * 2, "ξ^{} known below {p}/24", 1 + j);
        assert_eq!(
            got.clone().truncate24(p).first_difference(&expected.truncate24(p)),
            None,
            "ξ^{}",
            1 + j
        );
    }
}

fn grit_equals_borch(q: &Quotient, theta: NamedBlock, qprec: i64) {
    let b = borcherds_expand(&q.psi, 2, &int(qprec as i128)).unwrap();
    let c = b.borcherds.as_ref().unwrap().c.to_integer() as usize;
    let t = theta.build(&int((3 * (qprec - 1) + 1) as i128)).unwrap();
    let g = grit(&t, c + 2, &int(qprec as i128)).unwrap();
    for m in c..=c + 2 {
        let (x, y) = (&b.coeffs[m], &g.coeffs[m]);
        assert_eq!(x.qprec(), Some(int(qprec as i128)), "ξ^{m}");
        assert_eq!(y.qprec(), Some(int(qprec as i128)), "ξ^{m}");
        assert_eq!(x.first_difference(y), None, "ξ^{m}");
        assert_eq!(x.jacobi_index(), Some(int(m as i128)));
    }
}

#[test]
fn grit_equals_borch_for_l4() {
    grit_equals_borch(psi_l4(), NamedBlock::L4, 4);
}

#[test]
fn grit_equals_borch_for_l6() {
    grit_equals_borch(psi_l6(), NamedBlock::L6, 4);
}

#[test]
fn expansion_runs_out_of_precision_loudly() {
    let theta = NamedBlock::L4.build(&int(5)).unwrap();
    let q = quotient_psi(&theta, &int(5)).unwrap();
    assert_eq!(q.psi.qprec(), Some(int(2)));
    let err = borcherds_expand(&q.psi, 2, &int(4)).unwrap_err();
    assert!(matches!(err, Error::PrecisionExhausted { .. }), "{err:?}");
}

#[test]
fn divisor_multiplicities() {
    let psi = &psi_l4().psi;
    let l = psi.lattice();
    // type (a): 2n − (ℓ,ℓ) = −1
    for v in l.enumerate_dual_by_norm_order(&int(1), 2) {
        assert_eq!(divisor_multiplicity(psi, 0, &v).unwrap(), 1, "{v}");
    }
    // types (b), (c): −2/5 and −1/5
    for (n, o) in [(rat(2, 5), 5), (rat(1, 5), 10)] {
        for v in l.enumerate_dual_by_norm_order(&n, o) {
            assert_eq!(divisor_multiplicity(psi, 0, &v).unwrap(), 1, "{v}");
        }
    }
    // no 2-reflective part: ℓ ∈ L with 2n − (ℓ,ℓ) = −2
    for n in 1..=2i64 {
        let norm = int((2 * n + 2) as i128);
        let hits: Vec<DualVector> = l
            .enumerate_dual_by_norm_order(&norm, 1)
            .into_iter()
            .take(6)
            .collect();
        assert!(!hits.is_empty());
        for v in hits {
            assert_eq!(divisor_multiplicity(psi, n, &v).unwrap(), 0, "{v}");
        }
    }
    let e1 = DualVector::from_ints(&[1, 0, 0, 0]);
    assert!(matches!(
        divisor_multiplicity(psi, 2, &e1),
        Err(Error::NotSingular { .. })
    ));
    // nothing singular in the zero form
    let zero = psi.sub(psi).unwrap();
    assert_eq!(divisor_multiplicity(&zero, 0, &e1).unwrap(), 0);
}

#[test]
fn non_integral_singular_coefficients_are_rejected() {
    let psi = psi_l4().psi.scale(&rat(1, 2));
    assert!(matches!(
        borcherds_data(&psi),
        Err(Error::NonIntegralSingular { .. })
    ));
}

#[test]
fn expansion_serializes_with_product_data() {
    let q = psi_l4();
    let b = borcherds_expand(&q.psi, 1, &int(2)).unwrap();
    let doc = serde_json::to_value(b.to_json()).unwrap();
    assert_eq!(doc["A"], serde_json::json!([1, 1]));
    assert_eq!(doc["C"], serde_json::json!([1, 1]));
    assert_eq!(doc["D"], serde_json::json!(0));
    assert_eq!(doc["fj_order"], serde_json::json!(1));
    assert_eq!(doc["coefficients"].as_array().unwrap().len(), 3);
}
