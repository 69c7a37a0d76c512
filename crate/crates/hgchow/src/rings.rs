//! Presentations of the equivariant Chow rings in play: the base point,
//! the space of smooth ternary quadrics S, the projective bundles P(V_n)
//! and their fiber products, chart quotients, the auxiliary discriminant
//! ring, and Z[tau,c2,c3]/(2c3).
//!
//! Relations carry a reduction strategy: linear relations eliminate a
//! variable eagerly, monic relations reduce by division, and the torsion
//! remainder goes through the strong Groebner engine.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use thiserror::Error;

use crate::bundles;
use crate::ideal::{groebner_cached, normal_form, EngineOpts, GroebnerBasis, IdealError};
use crate::poly::{IntPoly, VarTable};

#[derive(Debug, Error)]
pub enum RingError {
    #[error("classes live in different rings")]
    RingMismatch,
    #[error("chart triple must have total weight 2")]
    InvalidTriple,
    #[error("ring kind requires n >= {0}")]
    BadParameter(u32),
    #[error("chern class c_{index} of V_{n} does not vanish above the rank: sign convention broken")]
    RankConsistency { n: u32, index: u32 },
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Poly(#[from] crate::poly::PolyError),
}

/// The rings the pipeline builds. T-prefixed kinds are torus-equivariant
/// (weight variables l1,l2,l3 with l3 eliminated); Gl-prefixed kinds carry
/// only the symmetric classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RingKind {
    /// A*_T(pt) = Z[l1,l2,l3].
    TPoint,
    /// A*_GL3(pt) = Z[c1,c2,c3].
    GlPoint,
    /// A*_T(S) = Z[l1,l2,l3]/(c1, 2c3).
    TS,
    /// A*_GL3(S) = Z[c2,c3]/(2c3), with c1 already dropped.
    GlS,
    /// A*_T(P(V_n)): adds h with the monic degree-(2n+1) relation p_n(h).
    TProj(u32),
    /// A*_GL3(P(V_n)): h,c2,c3 with p_n rewritten in c2,c3.
    GlProj(u32),
    /// A*_T(P(V_a) x_S P(V_b)): h1,h2 with two monic relations.
    TProjPair(u32, u32),
    /// Z[tau,c2,c3]/(2c3), the torsor-level target ring.
    GlGm,
    /// Auxiliary ring for the discriminant computation: h,t,s,c1,c2,c3
    /// with t^3 + c1 t^2 + c2 t + c3 monic in t.
    Aux,
    /// Chart quotient of TProj(n) by the extra relation i . lambda.
    Chart(u32, [u32; 3]),
}

/// Reduction strategy attached to each relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Relation linear in the indexed variable with unit coefficient;
    /// the variable is substituted away.
    LinearEliminate(usize),
    /// Relation monic in the indexed variable; reduced by division.
    MonicIn(usize),
    /// Torsion generator (e.g. 2c3); handled by the Groebner engine.
    Torsion,
    /// Anything else; handled by the Groebner engine.
    General,
}

#[derive(Debug, Clone)]
pub struct Relation {
    pub poly: IntPoly,
    pub strategy: Strategy,
}

#[derive(Debug)]
pub struct RingPresentation {
    pub kind: RingKind,
    pub name: String,
    pub table: Arc<VarTable>,
    pub relations: Vec<Relation>,
    /// (variable, image) pairs applied as simultaneous substitution.
    eliminations: Vec<(usize, IntPoly)>,
    /// (variable, relation) pairs, relations stored post-elimination.
    monic: Vec<(usize, IntPoly)>,
    /// Torsion/general generators, stored post-elimination.
    residual: Vec<IntPoly>,
    residual_gb: OnceLock<Arc<GroebnerBasis>>,
}

impl RingPresentation {
    fn assemble(
        kind: RingKind,
        name: &str,
        table: Arc<VarTable>,
        relations: Vec<Relation>,
    ) -> Arc<RingPresentation> {
        let mut eliminations: Vec<(usize, IntPoly)> = Vec::new();
        for rel in &relations {
            if let Strategy::LinearEliminate(v) = rel.strategy {
                // Solve the relation for v: the coefficient of v must be a unit.
                let coeffs = rel.poly.coefficients_in(v);
                assert_eq!(coeffs.len(), 2, "elimination relation must be linear");
                let lead = &coeffs[1];
                let one = IntPoly::one(&table);
                let image = if *lead == one {
                    coeffs[0].neg()
                } else if *lead == one.neg() {
                    coeffs[0].clone()
                } else {
                    panic!("elimination coefficient must be a unit");
                };
                eliminations.push((v, image));
            }
        }
        let apply_elim = |p: &IntPoly| -> IntPoly {
            if eliminations.is_empty() {
                p.clone()
            } else {
                p.substitute(&eliminations).expect("same table")
            }
        };
        let mut monic = Vec::new();
        let mut residual = Vec::new();
        for rel in &relations {
            match rel.strategy {
                Strategy::LinearEliminate(_) => {}
                Strategy::MonicIn(v) => {
                    let r = apply_elim(&rel.poly);
                    let d = r.max_exp_in(v);
                    assert!(
                        r.coefficient_of_power(v, d) == IntPoly::one(&table),
                        "relation must be monic in its designated variable"
                    );
                    monic.push((v, r));
                }
                Strategy::Torsion | Strategy::General => {
                    let r = apply_elim(&rel.poly);
                    if !r.is_zero() {
                        residual.push(r);
                    }
                }
            }
        }
        Arc::new(RingPresentation {
            kind,
            name: name.to_string(),
            table,
            relations,
            eliminations,
            monic,
            residual,
            residual_gb: OnceLock::new(),
        })
    }

    fn residual_basis(&self) -> &Arc<GroebnerBasis> {
        self.residual_gb.get_or_init(|| {
            groebner_cached(&self.residual, None, &EngineOpts::default())
                .expect("structural basis must exist within budget")
        })
    }

    /// Canonical representative: eliminate, divide by the monic relations,
    /// then take the normal form modulo the residual basis. The result is
    /// zero exactly when the input lies in the full relation ideal
    /// (the residual generators involve no monic variable, so membership
    /// splits coordinatewise over the free module defined by the monic
    /// relations).
    pub fn reduce(&self, p: &IntPoly) -> IntPoly {
        let mut q = if self.eliminations.is_empty() {
            p.clone()
        } else {
            p.substitute(&self.eliminations).expect("same table")
        };
        loop {
            let mut changed = false;
            for (v, rel) in &self.monic {
                let r = q.reduce_monic(rel, *v);
                if r != q {
                    q = r;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if self.residual.is_empty() {
            q
        } else {
            normal_form(&q, self.residual_basis())
        }
    }

    /// Relations an ideal-membership query must include on top of its own
    /// generators (eliminations excluded: queries are pre-reduced).
    pub fn membership_relations(&self) -> Vec<IntPoly> {
        let mut out = self.residual.clone();
        out.extend(self.monic.iter().map(|(_, r)| r.clone()));
        out
    }

    pub fn var(&self, name: &str) -> IntPoly {
        let i = self
            .table
            .index_of(name)
            .unwrap_or_else(|| panic!("ring {} has no variable {name}", self.name));
        IntPoly::var(&self.table, i)
    }

    /// Serialize the presentation in the canonical text format: the
    /// variable table, then one relation per line.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        let vars: Vec<String> = (0..self.table.len())
            .map(|i| format!("{}:{}", self.table.name(i), self.table.degree(i)))
            .collect();
        out.push_str(&format!("ring {} [{}]\n", self.name, vars.join(", ")));
        for rel in &self.relations {
            out.push_str(&format!("relation {}\n", rel.poly));
        }
        out
    }
}

/// A graded element of a presented ring, stored as its canonical reduced
/// representative. Equality of classes is ideal membership of the
/// difference, which `reduce` decides.
#[derive(Debug, Clone)]
pub struct ChowClass {
    pub ring: Arc<RingPresentation>,
    pub rep: IntPoly,
}

impl ChowClass {
    pub fn new(ring: Arc<RingPresentation>, rep: IntPoly) -> Self {
        let rep = ring.reduce(&rep);
        ChowClass { ring, rep }
    }

    pub fn zero(ring: &Arc<RingPresentation>) -> Self {
        ChowClass {
            ring: ring.clone(),
            rep: IntPoly::zero(&ring.table),
        }
    }

    pub fn degree(&self) -> Option<u32> {
        self.rep.homogeneous_degree()
    }

    pub fn add(&self, other: &ChowClass) -> ChowClass {
        assert!(same_ring(&self.ring, &other.ring));
        ChowClass::new(self.ring.clone(), self.rep.add(&other.rep))
    }

    pub fn mul(&self, other: &ChowClass) -> ChowClass {
        assert!(same_ring(&self.ring, &other.ring));
        ChowClass::new(self.ring.clone(), self.rep.mul(&other.rep))
    }

    pub fn mul_scalar(&self, k: impl Into<BigInt>) -> ChowClass {
        ChowClass::new(self.ring.clone(), self.rep.mul_scalar(k))
    }
}

fn same_ring(a: &Arc<RingPresentation>, b: &Arc<RingPresentation>) -> bool {
    Arc::ptr_eq(a, b) || a.kind == b.kind
}

pub fn class_equal(a: &ChowClass, b: &ChowClass) -> Result<bool, RingError> {
    if !same_ring(&a.ring, &b.ring) {
        return Err(RingError::RingMismatch);
    }
    Ok(a.ring.reduce(&a.rep.sub(&b.rep)).is_zero())
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

// Variable order pins the term order: l1 > l2 > l3 > h > h1 > h2 > t > s
// > tau > c1 > c2 > c3.

macro_rules! table_fn {
    ($name:ident, $($var:literal : $deg:literal),+) => {
        pub fn $name() -> Arc<VarTable> {
            static T: OnceLock<Arc<VarTable>> = OnceLock::new();
            T.get_or_init(|| VarTable::new(&[$(($var, $deg)),+])).clone()
        }
    };
}

table_fn!(table_l, "l1": 1, "l2": 1, "l3": 1);
table_fn!(table_c, "c1": 1, "c2": 2, "c3": 3);
table_fn!(table_gls, "c2": 2, "c3": 3);
table_fn!(table_lh, "l1": 1, "l2": 1, "l3": 1, "h": 1);
table_fn!(table_glh, "h": 1, "c2": 2, "c3": 3);
table_fn!(table_lh12, "l1": 1, "l2": 1, "l3": 1, "h1": 1, "h2": 1);
table_fn!(table_tau, "tau": 1, "c2": 2, "c3": 3);
table_fn!(table_aux, "h": 1, "t": 1, "s": 1, "c1": 1, "c2": 2, "c3": 3);

fn e_polys(table: &Arc<VarTable>) -> (IntPoly, IntPoly, IntPoly) {
    let l1 = IntPoly::var(table, table.index_of("l1").unwrap());
    let l2 = IntPoly::var(table, table.index_of("l2").unwrap());
    let l3 = IntPoly::var(table, table.index_of("l3").unwrap());
    let e1 = l1.add(&l2).add(&l3);
    let e2 = l1.mul(&l2).add(&l1.mul(&l3)).add(&l2.mul(&l3));
    let e3 = l1.mul(&l2).mul(&l3);
    (e1, e2, e3)
}

/// The standard relations of A*_T(S) in a table containing l1,l2,l3:
/// c1 (eliminating l3) and the torsion generator 2c3.
fn ts_relations(table: &Arc<VarTable>) -> Vec<Relation> {
    let (e1, _e2, e3) = e_polys(table);
    let l3 = table.index_of("l3").unwrap();
    vec![
        Relation {
            poly: e1,
            strategy: Strategy::LinearEliminate(l3),
        },
        Relation {
            poly: e3.mul_scalar(2),
            strategy: Strategy::Torsion,
        },
    ]
}

// ---------------------------------------------------------------------------
// build_ring
// ---------------------------------------------------------------------------

fn ring_memo() -> &'static Mutex<HashMap<RingKind, Arc<RingPresentation>>> {
    static MEMO: OnceLock<Mutex<HashMap<RingKind, Arc<RingPresentation>>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn build_ring(kind: RingKind) -> Result<Arc<RingPresentation>, RingError> {
    if let Some(found) = ring_memo().lock().unwrap().get(&kind) {
        return Ok(found.clone());
    }
    // Construct outside the lock: projective kinds recurse into build_ring
    // through the bundle data.
    let ring = construct_ring(kind)?;
    let mut memo = ring_memo().lock().unwrap();
    let entry = memo.entry(kind).or_insert_with(|| ring.clone());
    Ok(entry.clone())
}

fn construct_ring(kind: RingKind) -> Result<Arc<RingPresentation>, RingError> {
    Ok(match kind {
        RingKind::TPoint => {
            RingPresentation::assemble(kind, "T-point", table_l(), vec![])
        }
        RingKind::GlPoint => {
            RingPresentation::assemble(kind, "GL-point", table_c(), vec![])
        }
        RingKind::TS => {
            let t = table_l();
            let rels = ts_relations(&t);
            RingPresentation::assemble(kind, "T-S", t, rels)
        }
        RingKind::GlS => {
            let t = table_gls();
            let two_c3 = IntPoly::var(&t, 1).mul_scalar(2);
            RingPresentation::assemble(
                kind,
                "GL-S",
                t,
                vec![Relation {
                    poly: two_c3,
                    strategy: Strategy::Torsion,
                }],
            )
        }
        RingKind::TProj(n) => {
            if n < 1 {
                return Err(RingError::BadParameter(1));
            }
            let t = table_lh();
            let mut rels = ts_relations(&t);
            let data = bundles::bundle_data(n)?;
            rels.push(Relation {
                poly: data.grothendieck.clone(),
                strategy: Strategy::MonicIn(t.index_of("h").unwrap()),
            });
            RingPresentation::assemble(kind, &format!("T-PV:{n}"), t, rels)
        }
        RingKind::GlProj(n) => {
            if n < 1 {
                return Err(RingError::BadParameter(1));
            }
            let t = table_glh();
            let two_c3 = IntPoly::var(&t, 2).mul_scalar(2);
            let pn = bundles::grothendieck_symmetric(n)?;
            let hidx = t.index_of("h").unwrap();
            RingPresentation::assemble(
                kind,
                &format!("GL-PV:{n}"),
                t,
                vec![
                    Relation {
                        poly: two_c3,
                        strategy: Strategy::Torsion,
                    },
                    Relation {
                        poly: pn,
                        strategy: Strategy::MonicIn(hidx),
                    },
                ],
            )
        }
        RingKind::TProjPair(a, b) => {
            if a < 1 || b < 1 {
                return Err(RingError::BadParameter(1));
            }
            let t = table_lh12();
            let mut rels = ts_relations(&t);
            let pa = bundles::bundle_data(a)?
                .grothendieck
                .rename_h(&t, "h1")?;
            let pb = bundles::bundle_data(b)?
                .grothendieck
                .rename_h(&t, "h2")?;
            rels.push(Relation {
                poly: pa,
                strategy: Strategy::MonicIn(t.index_of("h1").unwrap()),
            });
            rels.push(Relation {
                poly: pb,
                strategy: Strategy::MonicIn(t.index_of("h2").unwrap()),
            });
            RingPresentation::assemble(kind, &format!("T-PV:{a}x{b}"), t, rels)
        }
        RingKind::GlGm => {
            let t = table_tau();
            let two_c3 = IntPoly::var(&t, 2).mul_scalar(2);
            RingPresentation::assemble(
                kind,
                "GLGm",
                t,
                vec![Relation {
                    poly: two_c3,
                    strategy: Strategy::Torsion,
                }],
            )
        }
        RingKind::Aux => {
            let t = table_aux();
            let tt = IntPoly::var(&t, 1);
            let c1 = IntPoly::var(&t, 3);
            let c2 = IntPoly::var(&t, 4);
            let c3 = IntPoly::var(&t, 5);
            let rel = tt
                .pow(3)
                .add(&c1.mul(&tt.pow(2)))
                .add(&c2.mul(&tt))
                .add(&c3);
            RingPresentation::assemble(
                kind,
                "aux",
                t,
                vec![Relation {
                    poly: rel,
                    strategy: Strategy::MonicIn(1),
                }],
            )
        }
        RingKind::Chart(n, i) => {
            if i.iter().sum::<u32>() != 2 {
                return Err(RingError::InvalidTriple);
            }
            let base = build_ring(RingKind::TProj(n))?;
            let t = base.table.clone();
            let l1 = IntPoly::var(&t, 0);
            let l2 = IntPoly::var(&t, 1);
            let l3 = IntPoly::var(&t, 2);
            let idot = l1
                .mul_scalar(i[0] as i64)
                .add(&l2.mul_scalar(i[1] as i64))
                .add(&l3.mul_scalar(i[2] as i64));
            let mut rels = base.relations.clone();
            rels.push(Relation {
                poly: idot,
                strategy: Strategy::General,
            });
            RingPresentation::assemble(
                kind,
                &format!("T-PV:{n}/chart({},{},{})", i[0], i[1], i[2]),
                t,
                rels,
            )
        }
    })
}

/// Restriction of a class on A*_T(P(V_n)) to the chart cut out by a
/// weight triple of total weight 2 (for (0,0,2) the added relation is
/// 2*l3 = -2*l1 - 2*l2 after elimination).
pub fn restrict_chart(x: &ChowClass, i: [u32; 3]) -> Result<ChowClass, RingError> {
    let n = match x.ring.kind {
        RingKind::TProj(n) => n,
        _ => return Err(RingError::RingMismatch),
    };
    let chart = build_ring(RingKind::Chart(n, i))?;
    Ok(ChowClass::new(chart, x.rep.clone()))
}

impl IntPoly {
    /// Move a polynomial in the [l1,l2,l3,h] table into a larger table,
    /// sending h to the named variable.
    pub fn rename_h(&self, target: &Arc<VarTable>, h_name: &str) -> Result<IntPoly, RingError> {
        let src = self.table().clone();
        let mut images = Vec::with_capacity(src.len());
        for i in 0..src.len() {
            let name = if src.name(i) == "h" { h_name } else { src.name(i) };
            let j = target
                .index_of(name)
                .ok_or_else(|| crate::poly::PolyError::UnknownVariable(name.to_string()))?;
            images.push(IntPoly::var(target, j));
        }
        Ok(self.map_vars(target, &images))
    }
}
