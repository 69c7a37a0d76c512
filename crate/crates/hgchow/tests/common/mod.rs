//! Shared helpers for the integration and acceptance tests: seeded random
//! polynomial generators and the quantified property runners (Whitney
//! series, projection formula, principal-ideal membership oracle, parser
//! round-trip, basis-change determinants).
//!
//! Not every test target uses every helper, so unused-code lints are
//! silenced for the module as a whole.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use hgchow::bundles::{
    bundle_data, duality_pushforward, triples, MapSpec, MAX_SEGRE,
};
use hgchow::ideal::{groebner_z, normal_form, Budget};
use hgchow::linalg::det_bareiss;
use hgchow::parser::parse_poly;
use hgchow::poly::{IntPoly, Mono, VarTable};
use hgchow::rings::{build_ring, class_equal, table_lh, ChowClass, RingKind};

/// Random sparse polynomial with bounded exponents and coefficients.
pub fn rand_poly(
    rng: &mut StdRng,
    table: &Arc<VarTable>,
    max_terms: usize,
    max_exp: u32,
    max_coeff: i64,
) -> IntPoly {
    let t = rng.gen_range(0..=max_terms);
    let mut p = IntPoly::zero(table);
    for _ in 0..t {
        let exps: Vec<u32> = (0..table.len()).map(|_| rng.gen_range(0..=max_exp)).collect();
        let c = rng.gen_range(-max_coeff..=max_coeff);
        p = p.add(&IntPoly::from_term(table, Mono::new(table, exps), BigInt::from(c)));
    }
    p
}

/// Whitney consistency for V_n: the Chern and Segre series are mutually
/// inverse in A*_T(S) through the retained degree, and the relation is
/// monic homogeneous of degree 2n+1. (Vanishing above the rank is already
/// enforced at construction time and would abort.)
pub fn check_whitney_and_rank(n: u32) {
    let ts = build_ring(RingKind::TS).unwrap();
    let data = bundle_data(n).unwrap();
    assert_eq!(data.rank, 2 * n + 1);
    assert_eq!(data.chern.len() as u32, 2 * n + 2);
    assert!(data.chern[0].num_terms() == 1);
    for d in 1..=MAX_SEGRE as usize {
        let mut acc = IntPoly::zero(data.segre[0].table());
        for i in 0..=d.min(data.rank as usize) {
            acc = acc.add(&data.chern[i].mul(&data.segre[d - i]));
        }
        assert!(
            ts.reduce(&acc).is_zero(),
            "Chern and Segre series of V_{n} fail to invert at degree {d}"
        );
    }
    let t = data.grothendieck.table().clone();
    let hidx = t.index_of("h").unwrap();
    assert_eq!(data.grothendieck.max_exp_in(hidx), 2 * n + 1);
    assert_eq!(
        data.grothendieck.coefficient_of_power(hidx, 2 * n + 1),
        IntPoly::one(&t)
    );
    assert_eq!(data.grothendieck.homogeneous_degree(), Some(2 * n + 1));
}

/// Projection formula for the duality pushforward: for random source
/// classes x and random target classes eta,
/// push(x * pullback(eta)) = push(x) * eta.
pub fn check_projection_formula(m: &MapSpec, cases: usize, seed: u64) {
    let mut rng = StdRng::seed_from_u64(seed);
    let src = m.source_ring().unwrap();
    let tgt = build_ring(RingKind::TProj(m.target_n)).unwrap();
    let tlh = table_lh();
    for case in 0..cases {
        let x = ChowClass::new(src.clone(), rand_poly(&mut rng, &src.table, 3, 2, 9));
        // Random target class of low degree.
        let eta = ChowClass::new(tgt.clone(), rand_poly(&mut rng, &tlh, 3, 1, 9));
        let pulled = m.pullback(&eta).unwrap();
        let lhs = duality_pushforward(m, &x.mul(&pulled)).unwrap();
        let rhs = duality_pushforward(m, &x).unwrap().mul(&eta);
        assert!(
            class_equal(&lhs, &rhs).unwrap(),
            "projection formula fails at case {case} for target n = {}",
            m.target_n
        );
    }
}

/// Exact divisibility of p by g over Z, decided by rational long division
/// plus an integrality check of the quotient: p lies in the principal
/// ideal (g) iff the division over Q is exact and the quotient has
/// integer coefficients.
pub fn divides_over_z(g: &IntPoly, p: &IntPoly) -> bool {
    let (gm, gc) = match g.leading() {
        Some((m, c)) => (m.clone(), BigRational::from(c.clone())),
        None => return p.is_zero(),
    };
    let mut work: BTreeMap<Mono, BigRational> = p
        .terms()
        .map(|(m, c)| (m.clone(), BigRational::from(c.clone())))
        .collect();
    let mut integral = true;
    while let Some((m, _)) = work.iter().next_back() {
        let m = m.clone();
        let c = work.remove(&m).unwrap();
        if c.is_zero() {
            continue;
        }
        if !gm.divides(&m) {
            return false;
        }
        let q = c / &gc;
        if !q.is_integer() {
            integral = false;
        }
        let shift = gm.div_into(&m);
        for (tm, tc) in g.terms() {
            if tm == &gm {
                continue;
            }
            let key = tm.mul(&shift);
            let entry = work.entry(key).or_insert_with(BigRational::zero);
            *entry -= &q * BigRational::from(tc.clone());
        }
    }
    integral
}

/// Principal-ideal membership: the Groebner engine must agree with the
/// rational-division oracle on random queries, including guaranteed
/// members m*g and perturbed near-members.
pub fn check_principal_ideal_oracle(cases: usize, seed: u64) {
    let mut rng = StdRng::seed_from_u64(seed);
    let t = VarTable::new(&[("x", 1), ("y", 1)]);
    let mut done = 0usize;
    while done < cases {
        let g = rand_poly(&mut rng, &t, 3, 3, 9);
        if g.is_zero() {
            continue;
        }
        let m = rand_poly(&mut rng, &t, 2, 2, 5);
        let p = match rng.gen_range(0..3) {
            0 => m.mul(&g),
            1 => m.mul(&g).add(&rand_poly(&mut rng, &t, 1, 2, 3)),
            _ => rand_poly(&mut rng, &t, 4, 4, 20),
        };
        let mut budget = Budget::default();
        let gb = groebner_z(std::slice::from_ref(&g), None, &mut budget).unwrap();
        let engine = normal_form(&p, &gb).is_zero();
        let oracle = divides_over_z(&g, &p);
        assert_eq!(
            engine, oracle,
            "membership disagreement for p = {p}, g = {g} (engine {engine}, oracle {oracle})"
        );
        done += 1;
    }
}

/// Parser round-trip: printing then re-parsing is the identity.
pub fn check_parser_roundtrip(cases: usize, seed: u64) {
    let mut rng = StdRng::seed_from_u64(seed);
    let t = VarTable::new(&[("h", 1), ("tau", 1), ("c2", 2), ("c3", 3)]);
    for case in 0..cases {
        let p = rand_poly(&mut rng, &t, 6, 4, 50);
        let text = p.to_string();
        let q = parse_poly(&text, &t).unwrap();
        assert_eq!(p, q, "round-trip failed at case {case} on `{text}`");
    }
}

/// The basis-change matrix for one exponent pair i with |i| = 2: the map
/// sending degree-n monomials not divisible by X^i to themselves and
/// X^i * f to q * f, expressed in the monomial basis.
pub fn basis_change_matrix(n: u32, i: [u32; 3], quad: &[([u32; 3], BigInt)]) -> Vec<Vec<BigInt>> {
    let monos = triples(n);
    let index: BTreeMap<[u32; 3], usize> =
        monos.iter().enumerate().map(|(j, k)| (*k, j)).collect();
    let dim = monos.len();
    let mut mat = vec![vec![BigInt::zero(); dim]; dim];
    for (col, k) in monos.iter().enumerate() {
        let divisible = (0..3).all(|a| k[a] >= i[a]);
        if !divisible {
            mat[index[k]][col] = BigInt::one();
        } else {
            let f = [k[0] - i[0], k[1] - i[1], k[2] - i[2]];
            for (j, c) in quad {
                let target = [f[0] + j[0], f[1] + j[1], f[2] + j[2]];
                mat[index[&target]][col] += c;
            }
        }
    }
    mat
}

/// Basis-change determinants: for each doubled weight pair i (2 in one
/// slot) and a quadric q with unit coefficient at X^i, the basis change is
/// unimodular over Z: every other term of q strictly raises the degree of
/// the distinguished variable needed to reach a divisible monomial, so
/// the matrix is triangular with unit diagonal in that grading. (For the
/// mixed pairs the determinant is genuinely not a unit; see the negative
/// control in the bundle test suite.)
pub fn check_basis_change_determinants(max_n: u32, seed: u64) {
    let mut rng = StdRng::seed_from_u64(seed);
    let quad_exps = triples(2);
    for n in 2..=max_n {
        for i in &[[2u32, 0, 0], [0, 2, 0], [0, 0, 2]] {
            // Random integer quadric with a_i = 1.
            let mut quad: Vec<([u32; 3], BigInt)> = Vec::new();
            for j in &quad_exps {
                let c = if j == i {
                    BigInt::one()
                } else {
                    BigInt::from(rng.gen_range(-9i64..=9))
                };
                quad.push((*j, c));
            }
            let mat = basis_change_matrix(n, *i, &quad);
            let det = det_bareiss(&mat);
            assert!(
                det.abs() == BigInt::one(),
                "basis change not unimodular at n = {n}, i = {i:?}: det = {det}"
            );
        }
    }
}
