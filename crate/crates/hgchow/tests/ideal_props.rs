//! Property tests for the integer Groebner engine: agreement with an
//! independent rational-division oracle on principal ideals, normal-form
//! idempotence, and canonicality of the reduced basis under generator
//! shuffling and redundancy.

mod common;

use std::sync::Arc;

use num_bigint::BigInt;
use proptest::prelude::*;

use hgchow::ideal::{groebner_z, normal_form, Budget};
use hgchow::poly::{IntPoly, Mono, VarTable};

fn table() -> Arc<VarTable> {
    VarTable::new(&[("x", 1), ("y", 1)])
}

prop_compose! {
    fn arb_poly()(terms in prop::collection::vec(((0u32..4, 0u32..4), -9i64..=9), 0..4)) -> IntPoly {
        let t = table();
        let mut p = IntPoly::zero(&t);
        for ((e1, e2), c) in terms {
            let m = Mono::new(&t, vec![e1, e2]);
            p = p.add(&IntPoly::from_term(&t, m, BigInt::from(c)));
        }
        p
    }
}

#[test]
fn principal_ideal_oracle_bulk() {
    common::check_principal_ideal_oracle(500, 0x5EED);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normal_form_is_idempotent(gens in prop::collection::vec(arb_poly(), 1..3), p in arb_poly()) {
        let mut budget = Budget::default();
        let gb = groebner_z(&gens, None, &mut budget).unwrap();
        let r1 = normal_form(&p, &gb);
        let r2 = normal_form(&r1, &gb);
        prop_assert_eq!(r1.clone(), r2);
        // The reduction moves p inside the ideal: p - r1 must reduce to zero.
        prop_assert!(normal_form(&p.sub(&r1), &gb).is_zero());
    }

    #[test]
    fn basis_is_canonical_under_shuffle(gens in prop::collection::vec(arb_poly(), 1..4)) {
        let mut budget = Budget::default();
        let gb = groebner_z(&gens, None, &mut budget).unwrap();
        let mut rev: Vec<IntPoly> = gens.clone();
        rev.reverse();
        let mut budget = Budget::default();
        let gb_rev = groebner_z(&rev, None, &mut budget).unwrap();
        prop_assert_eq!(gb.basis, gb_rev.basis);
    }

    #[test]
    fn basis_absorbs_redundant_generators(gens in prop::collection::vec(arb_poly(), 1..3), m in arb_poly()) {
        prop_assume!(gens.iter().any(|g| !g.is_zero()));
        let mut budget = Budget::default();
        let gb = groebner_z(&gens, None, &mut budget).unwrap();
        let mut extended = gens.clone();
        let g0 = gens.iter().find(|g| !g.is_zero()).unwrap();
        extended.push(m.mul(g0));
        let mut budget = Budget::default();
        let gb_ext = groebner_z(&extended, None, &mut budget).unwrap();
        prop_assert_eq!(gb.basis, gb_ext.basis);
    }

    /// Membership is linear: members are closed under addition and
    /// multiplication by arbitrary ring elements.
    #[test]
    fn ideal_closure(gens in prop::collection::vec(arb_poly(), 1..3), a in arb_poly(), b in arb_poly()) {
        prop_assume!(gens.iter().any(|g| !g.is_zero()));
        let mut budget = Budget::default();
        let gb = groebner_z(&gens, None, &mut budget).unwrap();
        let g0 = gens.iter().find(|g| !g.is_zero()).unwrap();
        let g1 = gens.last().unwrap();
        let member = a.mul(g0).add(&b.mul(g1));
        prop_assert!(normal_form(&member, &gb).is_zero());
    }
}
