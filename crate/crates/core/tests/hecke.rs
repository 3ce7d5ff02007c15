mod common;

use std::collections::BTreeMap;

use common::by_substitution;
use thetablock::blocks::{NamedBlock, ThetaBlockSpec};
use thetablock::hecke::apply_t_minus;
use thetablock::rational::int;
use thetablock::{Error, FourierSeries};

fn compare(s: &FourierSeries, m: i64, k: i64) {
    let fast = apply_t_minus(s, m, k).unwrap();
    // output q^n needs input q^{nm}
    let safe = fast.prec24();
    let slow: BTreeMap<_, _> = by_substitution(s, m, k)
        .into_iter()
        .filter(|((q, _), _)| *q < safe)
        .collect();
    let fast: BTreeMap<_, _> = fast.terms().map(|(q, k, c)| ((q, k.clone()), *c)).collect();
    assert_eq!(fast.len(), slow.len(), "m = {m}");
    for (e, c) in &slow {
        assert_eq!(fast.get(e), Some(c), "m = {m}, at {e:?}");
    }
}

#[test]
fn coefficient_formula_matches_substitution_on_l4_block() {
    let theta = NamedBlock::L4.build(&int(12)).unwrap();
    for m in [2, 3, 4] {
        compare(&theta, m, 2);
    }
}

#[test]
fn coefficient_formula_matches_substitution_on_l6_block() {
    let theta = NamedBlock::L6.build(&int(6)).unwrap();
    for m in [2, 3] {
        compare(&theta, m, 3);
    }
}

#[test]
fn coefficient_formula_matches_substitution_in_one_variable() {
    // weight 2, index 67 block with integral q-exponents
    let s = ThetaBlockSpec::one_variable_display(-6, &[1, 1, 1, 2, 2, 3, 3, 4, 5, 8])
        .build(&int(12))
        .unwrap();
    for m in [2, 3, 5, 6] {
        compare(&s, m, 2);
    }
}

#[test]
fn weight_zero_uses_inverse_powers() {
    // a^{k-1} with k = 0 makes the a = 2 term carry 1/2
    let s = ThetaBlockSpec::one_variable_display(-6, &[1, 1, 1, 2, 2, 3, 3, 4, 5, 8])
        .build(&int(12))
        .unwrap();
    let t = apply_t_minus(&s, 2, 0).unwrap();
    assert!(t.terms().any(|(_, _, c)| !c.is_integer()));
    compare(&s, 2, 0);
}

#[test]
fn index_and_weight_metadata() {
    let theta = NamedBlock::L4.build(&int(6)).unwrap();
    let t = apply_t_minus(&theta, 3, 2).unwrap();
    assert_eq!(t.jacobi_index(), Some(int(3)));
    assert_eq!(t.weight(), Some(int(2)));
    assert_eq!(t.qprec(), Some(int(2)));
    assert_eq!(apply_t_minus(&theta, -1, 2).unwrap_err(), Error::BadHeckeIndex(-1));
}
