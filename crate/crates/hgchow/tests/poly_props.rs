//! Property tests for the polynomial layer: ring axioms, homogeneity,
//! substitution homomorphisms, elementary-symmetric round-trips and the
//! parser round-trip.

mod common;

use std::sync::Arc;

use num_bigint::BigInt;
use proptest::prelude::*;

use hgchow::parser::parse_poly;
use hgchow::poly::{
    monomials_of_degree, to_elementary, ElementaryMap, IntPoly, LambdaMode, Mono, VarTable,
};

fn table() -> Arc<VarTable> {
    VarTable::new(&[("x", 1), ("y", 1), ("z", 2)])
}

prop_compose! {
    fn arb_poly()(terms in prop::collection::vec(((0u32..5, 0u32..5, 0u32..3), -20i64..=20), 0..6))
        -> IntPoly
    {
        let t = table();
        let mut p = IntPoly::zero(&t);
        for ((e1, e2, e3), c) in terms {
            let m = Mono::new(&t, vec![e1, e2, e3]);
            p = p.add(&IntPoly::from_term(&t, m, BigInt::from(c)));
        }
        p
    }
}

prop_compose! {
    fn arb_homogeneous()(d in 0u32..5, seeds in prop::collection::vec(-9i64..=9, 12)) -> IntPoly {
        let t = table();
        let monos = monomials_of_degree(&t, &[0, 1, 2], d);
        let mut p = IntPoly::zero(&t);
        for (m, c) in monos.into_iter().zip(seeds) {
            p = p.add(&IntPoly::from_term(&t, m, BigInt::from(c)));
        }
        p
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        let t = table();
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.sub(&a), IntPoly::zero(&t));
        prop_assert_eq!(a.mul(&IntPoly::one(&t)), a.clone());
        prop_assert_eq!(a.add(&a.neg()), IntPoly::zero(&t));
        prop_assert_eq!(a.mul_scalar(3), a.add(&a).add(&a));
    }

    #[test]
    fn parser_roundtrip(p in arb_poly()) {
        let t = table();
        let q = parse_poly(&p.to_string(), &t).unwrap();
        prop_assert_eq!(p, q);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn product_of_homogeneous_is_homogeneous(a in arb_homogeneous(), b in arb_homogeneous()) {
        let p = a.mul(&b);
        prop_assert!(p.homogeneous_degree().is_some());
        if !a.is_zero() && !b.is_zero() {
            prop_assert_eq!(
                p.homogeneous_degree().unwrap(),
                a.homogeneous_degree().unwrap() + b.homogeneous_degree().unwrap()
            );
        }
    }

    #[test]
    fn map_vars_is_ring_homomorphism(a in arb_poly(), b in arb_poly(), im in prop::collection::vec(arb_poly(), 3)) {
        let t = table();
        let lhs = a.add(&b).map_vars(&t, &im);
        let rhs = a.map_vars(&t, &im).add(&b.map_vars(&t, &im));
        prop_assert_eq!(lhs, rhs);
        let lhs = a.mul(&b).map_vars(&t, &im);
        let rhs = a.map_vars(&t, &im).mul(&b.map_vars(&t, &im));
        prop_assert_eq!(lhs, rhs);
    }
}

fn l_table() -> Arc<VarTable> {
    VarTable::new(&[("l1", 1), ("l2", 1), ("l3", 1)])
}

fn c_table() -> Arc<VarTable> {
    VarTable::new(&[("c1", 1), ("c2", 2), ("c3", 3)])
}

fn full_map() -> ElementaryMap {
    ElementaryMap {
        source: l_table(),
        target: c_table(),
        mode: LambdaMode::Full { l: [0, 1, 2], c1: 0 },
        c2: 1,
        c3: 2,
        passthrough: vec![],
        modulo: vec![],
    }
}

prop_compose! {
    fn arb_c_poly()(terms in prop::collection::vec(((0u32..3, 0u32..3, 0u32..2), -9i64..=9), 0..5))
        -> IntPoly
    {
        let t = c_table();
        let mut p = IntPoly::zero(&t);
        for ((e1, e2, e3), c) in terms {
            let m = Mono::new(&t, vec![e1, e2, e3]);
            p = p.add(&IntPoly::from_term(&t, m, BigInt::from(c)));
        }
        p
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// Expanding a polynomial in the elementary symmetric functions and
    /// rewriting it back is the identity (the rewriting is unique in the
    /// full three-weight mode).
    #[test]
    fn to_elementary_roundtrip(p in arb_c_poly()) {
        let lt = l_table();
        let l1 = IntPoly::var(&lt, 0);
        let l2 = IntPoly::var(&lt, 1);
        let l3 = IntPoly::var(&lt, 2);
        let e1 = l1.add(&l2).add(&l3);
        let e2 = l1.mul(&l2).add(&l1.mul(&l3)).add(&l2.mul(&l3));
        let e3 = l1.mul(&l2).mul(&l3);
        let expanded = p.map_vars(&lt, &[e1, e2, e3]);
        let back = to_elementary(&expanded, &full_map()).unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn asymmetric_rejected() {
    let lt = l_table();
    let l1 = IntPoly::var(&lt, 0);
    let err = to_elementary(&l1, &full_map()).unwrap_err();
    assert!(matches!(err, hgchow::poly::PolyError::NotSymmetric(_)));
}

#[test]
fn parser_roundtrip_bulk() {
    common::check_parser_roundtrip(1000, 0xABCD);
}
