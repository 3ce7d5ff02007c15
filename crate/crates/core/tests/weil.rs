use std::sync::Arc;

use thetablock::blocks::NamedBlock;
use thetablock::rational::int;
use thetablock::weil::{od_class_invariance, orbit_invariance_report, theta_decompose, weil_matrices};
use thetablock::{Error, FourierSeries, GramLattice};

fn named(name: &str) -> Arc<GramLattice> {
    Arc::new(GramLattice::named(name).unwrap())
}

#[test]
fn weil_relations_for_l4_and_l6() {
    for name in ["L4", "L6"] {
        let w = weil_matrices(named(name));
        let checks = w.check_relations(8);
        assert!(checks.all(), "{name}: {checks:?}");
        assert_eq!(w.dim() as i64, w.lattice().determinant());
    }
    let w = weil_matrices(named("L4"));
    assert_eq!(w.dim(), 500);
    assert_eq!(w.conductor, 40);
    assert_eq!(weil_matrices(named("L6")).conductor, 24);
}

#[test]
fn weil_entries_follow_the_quadratic_form() {
    // independent recomputation of the T and S exponents from the norm table
    let w = weil_matrices(named("L6"));
    let l = w.lattice();
    let n = w.conductor as i128;
    for (i, g) in w.representatives.iter().enumerate() {
        let t = (-l.dual_norm(g) / int(2)) * int(n);
        assert!(t.is_integer());
        assert_eq!(w.rho_t[i] as i128, t.to_integer().rem_euclid(n));
        for (j, b) in w.representatives.iter().enumerate().step_by(7) {
            let s = l.dual_pairing(g, b) * int(n);
            assert_eq!(w.rho_s[i][j] as i128, s.to_integer().rem_euclid(n));
        }
    }
}

#[test]
fn named_blocks_are_orbit_invariant() {
    for b in NamedBlock::ALL {
        let s = b.build(&int(5)).unwrap();
        let r = orbit_invariance_report(&s).unwrap();
        assert!(r.passed, "{}: {:?}", b.name(), r.violations.first());
        assert!(r.coefficients_checked > 0);
    }
}

#[test]
fn a_corrupted_coefficient_is_reported() {
    let theta = NamedBlock::L4.build(&int(4)).unwrap();
    let mut doc = theta.to_json();
    doc.terms[3].c = [7, 1];
    let bad = FourierSeries::from_json(&doc).unwrap();
    let r = orbit_invariance_report(&bad).unwrap();
    assert!(!r.passed);
    let v = &r.violations[0];
    let (q, l) = (&doc.terms[3].q, &doc.terms[3].l);
    let hit = format!("({}, ", thetablock::rational::from_pair(*q).unwrap());
    assert!(v.first.starts_with(&hit) || v.second.starts_with(&hit), "{v:?} {l:?}");
    assert!(v.first_value == "7" || v.second_value == "7", "{v:?}");
}

#[test]
fn od_classes_for_the_lattice_blocks() {
    for b in [NamedBlock::L4, NamedBlock::L6] {
        let s = b.build(&int(5)).unwrap();
        let r = od_class_invariance(&s).unwrap();
        assert!(r.passed, "{}: {:?}", b.name(), r.classes.iter().find(|c| c.status != "pass"));
    }
}

#[test]
fn od_classes_fail_for_a_single_companion() {
    let s = NamedBlock::L4First.build(&int(5)).unwrap();
    let r = od_class_invariance(&s).unwrap();
    assert!(!r.passed);
}

#[test]
fn od_check_refuses_non_squarefree_level() {
    // A1 has level 4
    let l = named("A1");
    let one = FourierSeries::one(l);
    assert!(matches!(od_class_invariance(&one), Err(Error::Unsupported(_))));
}

#[test]
fn decomposition_round_trips() {
    // ten ϑ factors for L4, nine for L6
    for (b, parity) in [(NamedBlock::L4, 1), (NamedBlock::L6, -1)] {
        let s = b.build(&int(3)).unwrap();
        let v = theta_decompose(&s).unwrap();
        assert_eq!(v.parity(), Some(parity));
        // singular weight: only exponent 0 occurs
        assert_eq!(v.leading_exponent(), Some(int(0)));
        assert!(v.components.iter().all(|f| f.keys().all(|e| *e == int(0))));
        let back = v.reconstruct().unwrap();
        let p = back.prec24().min(s.prec24());
        assert!(p >= 24 * 2);
        assert_eq!(
            back.clone().truncate24(p).first_difference(&s.clone().truncate24(p)),
            None,
            "{}",
            b.name()
        );
    }
}

#[test]
fn difference_lives_on_order_ten_classes() {
    let d = NamedBlock::L4First
        .build(&int(4))
        .unwrap()
        .sub(&NamedBlock::L4Second.build(&int(4)).unwrap())
        .unwrap();
    let v = theta_decompose(&d).unwrap();
    assert_eq!(v.support_orders().into_iter().collect::<Vec<_>>(), vec![10]);
    // each companion alone also has order-5 components
    let v1 = theta_decompose(&NamedBlock::L4First.build(&int(4)).unwrap()).unwrap();
    assert!(v1.support_orders().contains(&5));
    assert!(v1.support_orders().contains(&10));
}

#[test]
fn decomposition_requires_index_one() {
    let s = NamedBlock::L4.build(&int(3)).unwrap();
    let sq = s.mul(&s).unwrap();
    assert_eq!(theta_decompose(&sq).unwrap_err(), Error::IndexMismatch);
}
