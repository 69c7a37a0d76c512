//! Sparse multivariate polynomials over Z with a fixed grading and a
//! weighted graded reverse-lexicographic term order.
//!
//! Every class, relation and ideal generator in the crate is carried by
//! [`IntPoly`]. Coefficients are arbitrary-precision from the start: the
//! torsion arguments downstream are parity-sensitive, so there is no
//! fixed-width fast path.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("operands use different variable tables")]
    TableMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("not symmetric: violated by the transposition {0}")]
    NotSymmetric(String),
    #[error("no integral elementary-symmetric rewriting exists")]
    NoElementaryForm,
    #[error("substitution image list does not match the variable table")]
    BadImageCount,
}

/// Declared variables with their degrees. The declaration order is the
/// term-order precedence: earlier variables are larger.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarTable {
    names: Vec<String>,
    degrees: Vec<u32>,
}

impl VarTable {
    pub fn new(vars: &[(&str, u32)]) -> Arc<Self> {
        assert!(vars.iter().all(|&(_, d)| d > 0), "degrees must be positive");
        Arc::new(VarTable {
            names: vars.iter().map(|&(n, _)| n.to_string()).collect(),
            degrees: vars.iter().map(|&(_, d)| d).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.degrees[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

fn same_table(a: &Arc<VarTable>, b: &Arc<VarTable>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A monomial: dense exponent vector plus its cached weighted degree.
///
/// `Ord` is the weighted grevlex order: higher weighted degree wins; ties
/// are broken by the reversed exponent vector with reversed comparison
/// (the monomial with the smaller exponent in the last differing variable
/// is the larger one).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mono {
    wdeg: u32,
    exps: Box<[u32]>,
}

impl Mono {
    pub fn new(table: &VarTable, exps: Vec<u32>) -> Self {
        assert_eq!(exps.len(), table.len());
        let wdeg = exps
            .iter()
            .zip(&table.degrees)
            .map(|(&e, &d)| e * d)
            .sum();
        Mono {
            wdeg,
            exps: exps.into_boxed_slice(),
        }
    }

    pub fn one(table: &VarTable) -> Self {
        Mono::new(table, vec![0; table.len()])
    }

    pub fn wdeg(&self) -> u32 {
        self.wdeg
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i]
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let exps: Box<[u32]> = self
            .exps
            .iter()
            .zip(other.exps.iter())
            .map(|(a, b)| a + b)
            .collect();
        Mono {
            wdeg: self.wdeg + other.wdeg,
            exps,
        }
    }

    pub fn divides(&self, other: &Mono) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// other / self (caller guarantees divisibility).
    pub fn div_into(&self, other: &Mono) -> Mono {
        debug_assert!(self.divides(other));
        let exps: Box<[u32]> = other
            .exps
            .iter()
            .zip(self.exps.iter())
            .map(|(b, a)| b - a)
            .collect();
        Mono {
            wdeg: other.wdeg - self.wdeg,
            exps,
        }
    }

    pub fn lcm(&self, other: &Mono, table: &VarTable) -> Mono {
        let exps: Vec<u32> = self
            .exps
            .iter()
            .zip(other.exps.iter())
            .map(|(a, b)| *a.max(b))
            .collect();
        Mono::new(table, exps)
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.wdeg.cmp(&other.wdeg) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.exps.iter().zip(other.exps.iter()).rev() {
            match a.cmp(b) {
                Ordering::Equal => {}
                // Smaller exponent in the last differing (least) variable
                // makes the monomial larger.
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial with integer coefficients in canonical form: no zero
/// coefficients stored, terms keyed by the weighted grevlex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    table: Arc<VarTable>,
    terms: BTreeMap<Mono, BigInt>,
}

impl IntPoly {
    pub fn zero(table: &Arc<VarTable>) -> Self {
        IntPoly {
            table: table.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(table: &Arc<VarTable>, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::one(table), c);
        }
        IntPoly {
            table: table.clone(),
            terms,
        }
    }

    pub fn one(table: &Arc<VarTable>) -> Self {
        Self::constant(table, 1)
    }

    pub fn var(table: &Arc<VarTable>, i: usize) -> Self {
        let mut exps = vec![0; table.len()];
        exps[i] = 1;
        Self::from_term(table, Mono::new(table, exps), BigInt::one())
    }

    pub fn from_term(table: &Arc<VarTable>, m: Mono, c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        IntPoly {
            table: table.clone(),
            terms,
        }
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &BigInt)> {
        self.terms.iter()
    }

    pub fn leading(&self) -> Option<(&Mono, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn coeff(&self, m: &Mono) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_else(BigInt::zero)
    }

    fn assert_table(&self, other: &IntPoly) {
        assert!(
            same_table(&self.table, &other.table),
            "polynomial operands use different variable tables"
        );
    }

    fn insert_add(terms: &mut BTreeMap<Mono, BigInt>, m: Mono, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        self.assert_table(other);
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            Self::insert_add(&mut terms, m.clone(), c.clone());
        }
        IntPoly {
            table: self.table.clone(),
            terms,
        }
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        self.assert_table(other);
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                Self::insert_add(&mut terms, m1.mul(m2), c1 * c2);
            }
        }
        IntPoly {
            table: self.table.clone(),
            terms,
        }
    }

    pub fn mul_scalar(&self, c: impl Into<BigInt>) -> IntPoly {
        let c = c.into();
        if c.is_zero() {
            return IntPoly::zero(&self.table);
        }
        IntPoly {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * &c))
                .collect(),
        }
    }

    pub fn mul_term(&self, m: &Mono, c: &BigInt) -> IntPoly {
        if c.is_zero() {
            return IntPoly::zero(&self.table);
        }
        IntPoly {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m0, c0)| (m0.mul(m), c0 * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> IntPoly {
        let mut acc = IntPoly::one(&self.table);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `Some(d)` when every term has weighted degree `d` (zero counts as
    /// homogeneous of degree 0).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys();
        let d = match it.next() {
            None => return Some(0),
            Some(m) => m.wdeg(),
        };
        if it.all(|m| m.wdeg() == d) {
            Some(d)
        } else {
            None
        }
    }

    pub fn max_weighted_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.wdeg()).max().unwrap_or(0)
    }

    pub fn max_exp_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn uses_var(&self, v: usize) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    /// Coefficient polynomials `c_0..c_d` with `p = sum c_i v^i`, each free
    /// of `v`. A constant (or zero) returns a single entry.
    pub fn coefficients_in(&self, v: usize) -> Vec<IntPoly> {
        let d = self.max_exp_in(v) as usize;
        let mut out = vec![IntPoly::zero(&self.table); d + 1];
        for (m, c) in &self.terms {
            let e = m.exp(v) as usize;
            let mut exps = m.exps().to_vec();
            exps[v] = 0;
            Self::insert_add(
                &mut out[e].terms,
                Mono::new(&self.table, exps),
                c.clone(),
            );
        }
        out
    }

    /// Extract the coefficient of `v^e` (free of `v`).
    pub fn coefficient_of_power(&self, v: usize, e: u32) -> IntPoly {
        let mut out = IntPoly::zero(&self.table);
        for (m, c) in &self.terms {
            if m.exp(v) == e {
                let mut exps = m.exps().to_vec();
                exps[v] = 0;
                Self::insert_add(&mut out.terms, Mono::new(&self.table, exps), c.clone());
            }
        }
        out
    }

    /// Simultaneous substitution of the listed variables by polynomials in
    /// the same table; unlisted variables are kept.
    pub fn substitute(&self, assignment: &[(usize, IntPoly)]) -> Result<IntPoly, PolyError> {
        let mut images: Vec<IntPoly> = (0..self.table.len())
            .map(|i| IntPoly::var(&self.table, i))
            .collect();
        for (v, img) in assignment {
            if *v >= self.table.len() {
                return Err(PolyError::BadImageCount);
            }
            if !same_table(&self.table, &img.table) {
                return Err(PolyError::TableMismatch);
            }
            images[*v] = img.clone();
        }
        Ok(self.map_vars(&self.table.clone(), &images))
    }

    /// Evaluate under a full variable assignment into a (possibly
    /// different) table: `images[i]` is the image of source variable `i`.
    pub fn map_vars(&self, target: &Arc<VarTable>, images: &[IntPoly]) -> IntPoly {
        assert_eq!(images.len(), self.table.len(), "one image per source variable");
        for img in images {
            assert!(same_table(&img.table, target));
        }
        // Cache of images[i]^e, filled on demand.
        let mut pows: Vec<HashMap<u32, IntPoly>> = vec![HashMap::new(); images.len()];
        let mut out = IntPoly::zero(target);
        for (m, c) in &self.terms {
            let mut acc = IntPoly::constant(target, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = pows[i]
                    .entry(e)
                    .or_insert_with(|| images[i].pow(e))
                    .clone();
                acc = acc.mul(&p);
            }
            out = out.add(&acc);
        }
        out
    }

    /// Transport into another table by variable name; every variable in the
    /// support must exist in the target table.
    pub fn rename_into(&self, target: &Arc<VarTable>) -> Result<IntPoly, PolyError> {
        let mut images = Vec::with_capacity(self.table.len());
        for i in 0..self.table.len() {
            match target.index_of(self.table.name(i)) {
                Some(j) => images.push(IntPoly::var(target, j)),
                None => {
                    if self.uses_var(i) {
                        return Err(PolyError::UnknownVariable(self.table.name(i).to_string()));
                    }
                    images.push(IntPoly::zero(target));
                }
            }
        }
        Ok(self.map_vars(target, &images))
    }

    /// Remainder of division by a relation monic in `v`: the result has
    /// `v`-degree below `deg_v(rel)` and differs from `self` by a multiple
    /// of `rel`.
    pub fn reduce_monic(&self, rel: &IntPoly, v: usize) -> IntPoly {
        self.assert_table(rel);
        let d = rel.max_exp_in(v);
        debug_assert!(rel.coefficient_of_power(v, d).num_terms() == 1);
        let mut p = self.clone();
        loop {
            let dv = p.max_exp_in(v);
            if dv < d {
                return p;
            }
            let c = p.coefficient_of_power(v, dv);
            if c.is_zero() {
                unreachable!();
            }
            let mut shift = vec![0; self.table.len()];
            shift[v] = dv - d;
            let shift = Mono::new(&self.table, shift);
            // p -= c * v^(dv-d) * rel ; the v^dv terms cancel exactly.
            let sub = c.mul(&rel.mul_term(&shift, &BigInt::one()));
            p = p.sub(&sub);
        }
    }
}

/// Checked arithmetic entry point for user-supplied operands.
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

pub fn poly_arith(op: ArithOp, a: &IntPoly, b: &IntPoly) -> Result<IntPoly, PolyError> {
    if !same_table(&a.table, &b.table) {
        return Err(PolyError::TableMismatch);
    }
    Ok(match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
    })
}

// ---------------------------------------------------------------------------
// Canonical text form
// ---------------------------------------------------------------------------

impl fmt::Display for IntPoly {
    /// Canonical text form: terms in descending term order, explicit `*`,
    /// `^` for powers, e.g. `2*h^2 - 24*c2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || m.is_one() {
                factors.push(mag.to_string());
            }
            for (i, &e) in m.exps().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.table.name(i).to_string()),
                    _ => factors.push(format!("{}^{}", self.table.name(i), e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Elementary symmetric rewriting
// ---------------------------------------------------------------------------

/// How the torus weights appear in the source ring.
#[derive(Debug, Clone)]
pub enum LambdaMode {
    /// All of l1,l2,l3 are present; the rewriting lands in c1,c2,c3 and is
    /// unique.
    Full { l: [usize; 3], c1: usize },
    /// l3 has been eliminated as -l1-l2 (so c1 = 0); the rewriting lands in
    /// c2,c3 and is taken modulo the `modulo` generators.
    Eliminated { l1: usize, l2: usize },
}

/// Configuration for [`to_elementary`]: which source variables are torus
/// weights, where the elementary symmetric classes live in the target
/// table, which variables pass through unchanged, and which ideal
/// generators may absorb the difference.
#[derive(Debug, Clone)]
pub struct ElementaryMap {
    pub source: Arc<VarTable>,
    pub target: Arc<VarTable>,
    pub mode: LambdaMode,
    pub c2: usize,
    pub c3: usize,
    /// (source index, target index) of variables carried through verbatim.
    pub passthrough: Vec<(usize, usize)>,
    /// Source-table generators (in the weight variables only) that
    /// differences may be absorbed into; empty in `Full` mode.
    pub modulo: Vec<IntPoly>,
}

impl ElementaryMap {
    fn lambda_vars(&self) -> Vec<usize> {
        match &self.mode {
            LambdaMode::Full { l, .. } => l.to_vec(),
            LambdaMode::Eliminated { l1, l2 } => vec![*l1, *l2],
        }
    }

    /// e2 and e3 expanded in the source weight variables.
    fn elementary_images(&self) -> (IntPoly, IntPoly) {
        let t = &self.source;
        match &self.mode {
            LambdaMode::Full { l, .. } => {
                let v: Vec<IntPoly> = l.iter().map(|&i| IntPoly::var(t, i)).collect();
                let e2 = v[0]
                    .mul(&v[1])
                    .add(&v[0].mul(&v[2]))
                    .add(&v[1].mul(&v[2]));
                let e3 = v[0].mul(&v[1]).mul(&v[2]);
                (e2, e3)
            }
            LambdaMode::Eliminated { l1, l2 } => {
                let a = IntPoly::var(t, *l1);
                let b = IntPoly::var(t, *l2);
                let l3 = a.neg().sub(&b);
                let e2 = a.mul(&b).add(&a.add(&b).mul(&l3));
                let e3 = a.mul(&b).mul(&l3);
                (e2, e3)
            }
        }
    }
}

/// Enumerate the monomials of weighted degree `d` in the listed variables.
pub fn monomials_of_degree(table: &Arc<VarTable>, vars: &[usize], d: u32) -> Vec<Mono> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; table.len()];
    fn rec(
        table: &Arc<VarTable>,
        vars: &[usize],
        pos: usize,
        rem: u32,
        exps: &mut Vec<u32>,
        out: &mut Vec<Mono>,
    ) {
        if pos == vars.len() {
            if rem == 0 {
                out.push(Mono::new(table, exps.clone()));
            }
            return;
        }
        let v = vars[pos];
        let w = table.degree(v);
        let max = rem / w;
        for e in 0..=max {
            exps[v] = e;
            rec(table, vars, pos + 1, rem - e * w, exps, out);
        }
        exps[v] = 0;
    }
    rec(table, vars, 0, d, &mut exps, &mut out);
    out
}

/// Decide membership of `p` in the span of `gens * monomials` degree by
/// degree, by exact integer linear algebra. All polynomials must share a
/// table. This is a module-span test (every generator multiplied by
/// arbitrary polynomials), valid for homogeneous generators.
pub fn in_homogeneous_span(p: &IntPoly, gens: &[IntPoly]) -> bool {
    if p.is_zero() {
        return true;
    }
    if gens.is_empty() {
        return false;
    }
    let table = p.table().clone();
    let all_vars: Vec<usize> = (0..table.len()).collect();
    // Split p into graded pieces and test each.
    let mut pieces: BTreeMap<u32, IntPoly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let piece = pieces
            .entry(m.wdeg())
            .or_insert_with(|| IntPoly::zero(&table));
        *piece = piece.add(&IntPoly::from_term(&table, m.clone(), c.clone()));
    }
    for (d, piece) in pieces {
        let mut columns: Vec<IntPoly> = Vec::new();
        for g in gens {
            let dg = match g.homogeneous_degree() {
                Some(dg) => dg,
                None => panic!("span generators must be homogeneous"),
            };
            if g.is_zero() || dg > d {
                continue;
            }
            for m in monomials_of_degree(&table, &all_vars, d - dg) {
                columns.push(g.mul_term(&m, &BigInt::one()));
            }
        }
        if columns.is_empty() {
            return false;
        }
        // Row space: all monomials appearing in the piece or the columns.
        let mut rows: Vec<Mono> = Vec::new();
        let mut row_index: HashMap<Mono, usize> = HashMap::new();
        let index_of = |m: &Mono, rows: &mut Vec<Mono>, row_index: &mut HashMap<Mono, usize>| {
            if let Some(&i) = row_index.get(m) {
                return i;
            }
            let i = rows.len();
            rows.push(m.clone());
            row_index.insert(m.clone(), i);
            i
        };
        let mut col_vecs: Vec<Vec<(usize, BigInt)>> = Vec::new();
        for c in &columns {
            let mut v = Vec::new();
            for (m, k) in c.terms() {
                let i = index_of(m, &mut rows, &mut row_index);
                v.push((i, k.clone()));
            }
            col_vecs.push(v);
        }
        let mut b = vec![BigInt::zero(); rows.len()];
        let mut extra = Vec::new();
        for (m, k) in piece.terms() {
            if let Some(&i) = row_index.get(m) {
                extra.push((i, k.clone()));
            } else {
                // Target has a monomial no column can reach.
                return false;
            }
        }
        for (i, k) in extra {
            b[i] = k;
        }
        let nrows = rows.len();
        let mut a = vec![vec![BigInt::zero(); col_vecs.len()]; nrows];
        for (j, col) in col_vecs.iter().enumerate() {
            for (i, k) in col {
                a[*i][j] = k.clone();
            }
        }
        if linalg::solve_integer(&a, &b).is_none() {
            return false;
        }
    }
    true
}

/// Rewrite a polynomial that is symmetric in the torus weights (exactly,
/// or modulo the configured generators) in terms of the elementary
/// symmetric classes c2, c3 (and c1 in `Full` mode), carrying the listed
/// variables through. Symmetry is checked first; a violation reports the
/// offending transposition.
pub fn to_elementary(p: &IntPoly, map: &ElementaryMap) -> Result<IntPoly, PolyError> {
    assert!(same_table(p.table(), &map.source));
    let lam = map.lambda_vars();
    // Support check: only weight variables and passthrough variables.
    for i in 0..map.source.len() {
        if p.uses_var(i)
            && !lam.contains(&i)
            && !map.passthrough.iter().any(|&(s, _)| s == i)
        {
            return Err(PolyError::UnknownVariable(map.source.name(i).to_string()));
        }
    }

    // Symmetry check via the generating transpositions.
    let transpositions: Vec<(String, Vec<(usize, IntPoly)>)> = match &map.mode {
        LambdaMode::Full { l, .. } => vec![
            (
                format!("{}<->{}", map.source.name(l[0]), map.source.name(l[1])),
                vec![
                    (l[0], IntPoly::var(&map.source, l[1])),
                    (l[1], IntPoly::var(&map.source, l[0])),
                ],
            ),
            (
                format!("{}<->{}", map.source.name(l[1]), map.source.name(l[2])),
                vec![
                    (l[1], IntPoly::var(&map.source, l[2])),
                    (l[2], IntPoly::var(&map.source, l[1])),
                ],
            ),
        ],
        LambdaMode::Eliminated { l1, l2 } => {
            let a = IntPoly::var(&map.source, *l1);
            let b = IntPoly::var(&map.source, *l2);
            let l3 = a.neg().sub(&b);
            vec![
                (
                    format!("{}<->{}", map.source.name(*l1), map.source.name(*l2)),
                    vec![(*l1, b.clone()), (*l2, a.clone())],
                ),
                // Swapping l2 with the eliminated third weight -l1-l2.
                (
                    format!("{}<->(-{}-{})", map.source.name(*l2), map.source.name(*l1), map.source.name(*l2)),
                    vec![(*l2, l3)],
                ),
            ]
        }
    };
    for (name, subst) in &transpositions {
        let sigma = p.substitute(subst)?;
        let diff = p.sub(&sigma);
        if !in_homogeneous_span(&diff, &map.modulo) {
            return Err(PolyError::NotSymmetric(name.clone()));
        }
    }

    // Group terms by their passthrough part.
    let mut groups: BTreeMap<Mono, IntPoly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let mut pass = vec![0u32; map.source.len()];
        let mut lpart = vec![0u32; map.source.len()];
        for (i, &e) in m.exps().iter().enumerate() {
            if lam.contains(&i) {
                lpart[i] = e;
            } else {
                pass[i] = e;
            }
        }
        let key = Mono::new(&map.source, pass);
        let entry = groups
            .entry(key)
            .or_insert_with(|| IntPoly::zero(&map.source));
        *entry = entry.add(&IntPoly::from_term(
            &map.source,
            Mono::new(&map.source, lpart),
            c.clone(),
        ));
    }

    let (e2, e3) = map.elementary_images();
    let e1 = match &map.mode {
        LambdaMode::Full { l, .. } => Some(
            IntPoly::var(&map.source, l[0])
                .add(&IntPoly::var(&map.source, l[1]))
                .add(&IntPoly::var(&map.source, l[2])),
        ),
        LambdaMode::Eliminated { .. } => None,
    };

    let mut result = IntPoly::zero(&map.target);
    for (pass, q) in groups {
        // Solve each graded piece of the weight-only coefficient.
        let mut pieces: BTreeMap<u32, IntPoly> = BTreeMap::new();
        for (m, c) in q.terms() {
            let piece = pieces
                .entry(m.wdeg())
                .or_insert_with(|| IntPoly::zero(&map.source));
            *piece = piece.add(&IntPoly::from_term(&map.source, m.clone(), c.clone()));
        }
        let mut pass_t = vec![0u32; map.target.len()];
        for &(s, t) in &map.passthrough {
            pass_t[t] = pass.exp(s);
        }
        let pass_target = Mono::new(&map.target, pass_t);
        for (d, piece) in pieces {
            let rewritten = solve_elementary_piece(&piece, d, map, &lam, e1.as_ref(), &e2, &e3)?;
            result = result.add(&rewritten.mul_term(&pass_target, &BigInt::one()));
        }
    }
    Ok(result)
}

/// Solve one homogeneous weight-only piece as an integer combination of
/// elementary-symmetric monomials plus (in eliminated mode) multiples of
/// the modulo generators.
fn solve_elementary_piece(
    piece: &IntPoly,
    d: u32,
    map: &ElementaryMap,
    lam: &[usize],
    e1: Option<&IntPoly>,
    e2: &IntPoly,
    e3: &IntPoly,
) -> Result<IntPoly, PolyError> {
    if piece.is_zero() {
        return Ok(IntPoly::zero(&map.target));
    }
    // Candidate target monomials of degree d in the c-variables.
    let mut c_monos: Vec<(Vec<u32>, IntPoly)> = Vec::new(); // (target exps, expansion)
    let max_a = if e1.is_some() { d } else { 0 };
    for a in 0..=max_a {
        let rem = d - a;
        for b in 0..=(rem / 2) {
            let rem2 = rem - 2 * b;
            if rem2 % 3 != 0 {
                continue;
            }
            let e = rem2 / 3;
            let mut expansion = e2.pow(b).mul(&e3.pow(e));
            if let Some(e1) = e1 {
                expansion = expansion.mul(&e1.pow(a));
            }
            let mut texps = vec![0u32; map.target.len()];
            if let LambdaMode::Full { c1, .. } = &map.mode {
                texps[*c1] = a;
            }
            texps[map.c2] = b;
            texps[map.c3] = e;
            c_monos.push((texps, expansion));
        }
    }
    // Modulo-generator columns.
    let mut mod_cols: Vec<IntPoly> = Vec::new();
    for g in &map.modulo {
        let dg = g
            .homogeneous_degree()
            .expect("modulo generators must be homogeneous");
        if g.is_zero() || dg > d {
            continue;
        }
        for m in monomials_of_degree(&map.source, lam, d - dg) {
            mod_cols.push(g.mul_term(&m, &BigInt::one()));
        }
    }
    // Assemble the linear system over the weight monomials of degree d.
    let rows = monomials_of_degree(&map.source, lam, d);
    let mut row_index: HashMap<Mono, usize> = HashMap::new();
    for (i, m) in rows.iter().enumerate() {
        row_index.insert(m.clone(), i);
    }
    let ncols = c_monos.len() + mod_cols.len();
    if ncols == 0 {
        return Err(PolyError::NoElementaryForm);
    }
    let mut a = vec![vec![BigInt::zero(); ncols]; rows.len()];
    for (j, (_, expansion)) in c_monos.iter().enumerate() {
        for (m, c) in expansion.terms() {
            let i = *row_index.get(m).expect("expansion stays in degree");
            a[i][j] = c.clone();
        }
    }
    for (j, col) in mod_cols.iter().enumerate() {
        for (m, c) in col.terms() {
            let i = *row_index.get(m).expect("modulo column stays in degree");
            a[i][c_monos.len() + j] = c.clone();
        }
    }
    let mut b = vec![BigInt::zero(); rows.len()];
    for (m, c) in piece.terms() {
        let i = *row_index.get(m).expect("piece stays in degree");
        b[i] = c.clone();
    }
    let x = linalg::solve_integer(&a, &b).ok_or(PolyError::NoElementaryForm)?;
    let mut out = IntPoly::zero(&map.target);
    for (j, (texps, _)) in c_monos.iter().enumerate() {
        if !x[j].is_zero() {
            out = out.add(&IntPoly::from_term(
                &map.target,
                Mono::new(&map.target, texps.clone()),
                x[j].clone(),
            ));
        }
    }
    Ok(out)
}
