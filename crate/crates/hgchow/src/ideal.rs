//! Ideal membership and equality over Z via strong Groebner bases
//! (Buchberger with S-polynomials and GCD-polynomials), with degree
//! truncation for homogeneous queries and a content-addressed basis cache.
//!
//! Working over Z rather than Q is essential: the torsion relation
//! 2*c3 = 0 and the parity arguments downstream are invisible rationally.

use std::collections::{BinaryHeap, HashMap};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::parser;
use crate::poly::{IntPoly, Mono, VarTable};
use crate::rings::RingPresentation;

pub const ORDER_TAG: &str = "wgrevlex";

#[derive(Debug, Error)]
pub enum IdealError {
    #[error("reduction budget of {limit} steps exceeded")]
    Budget { limit: u64 },
    #[error("degree-truncated basis (bound {bound}) cannot decide a query of degree {query}")]
    BoundTooSmall { bound: u32, query: u32 },
    #[error("ideals live in different rings")]
    RingMismatch,
}

/// Step budget shared across one ideal-engine computation.
#[derive(Debug, Clone)]
pub struct Budget {
    pub limit: u64,
    used: u64,
}

pub const DEFAULT_BUDGET: u64 = 10_000_000;

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn tick(&mut self) -> Result<(), IdealError> {
        self.used += 1;
        if self.used > self.limit {
            Err(IdealError::Budget { limit: self.limit })
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}

/// Engine configuration: step budget and on-disk basis cache location.
#[derive(Debug, Clone)]
pub struct EngineOpts {
    pub budget: u64,
    pub cache_dir: Option<PathBuf>,
}

impl Default for EngineOpts {
    fn default() -> Self {
        EngineOpts {
            budget: DEFAULT_BUDGET,
            cache_dir: default_cache_dir(),
        }
    }
}

impl EngineOpts {
    pub fn no_cache() -> Self {
        EngineOpts {
            budget: DEFAULT_BUDGET,
            cache_dir: None,
        }
    }
}

pub fn default_cache_dir() -> Option<PathBuf> {
    match std::env::var_os("HGCHOW_CACHE") {
        Some(dir) if dir.is_empty() => None,
        Some(dir) => Some(PathBuf::from(dir)),
        None => Some(PathBuf::from(".hgchow-cache")),
    }
}

/// A strong Groebner basis over Z. When `degree_bound` is set the basis
/// decides membership only for homogeneous elements of weighted degree at
/// most the bound (sound for homogeneous generators: no S- or GCD-pair of
/// higher degree can contribute to a lower-degree standard representation).
#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    pub table: Arc<VarTable>,
    pub basis: Vec<IntPoly>,
    pub degree_bound: Option<u32>,
}

fn leading(p: &IntPoly) -> (&Mono, &BigInt) {
    p.leading().expect("nonzero polynomial")
}

fn sign_normalize(p: IntPoly) -> IntPoly {
    match p.leading() {
        Some((_, c)) if c.is_negative() => p.neg(),
        _ => p,
    }
}

/// Fully reduce `p` modulo the basis: every term of the result is
/// irreducible (its coefficient is the canonical nonnegative remainder by
/// every applicable leading coefficient). `p - result` lies in the ideal
/// spanned by the basis.
pub fn normal_form(p: &IntPoly, g: &GroebnerBasis) -> IntPoly {
    let mut budget = Budget::new(u64::MAX);
    normal_form_budgeted(p, &g.basis, &mut budget).expect("unbounded budget")
}

fn normal_form_budgeted(
    p: &IntPoly,
    basis: &[IntPoly],
    budget: &mut Budget,
) -> Result<IntPoly, IdealError> {
    let table = p.table().clone();
    let mut work = p.clone();
    let mut done = IntPoly::zero(&table);
    'outer: while let Some((m, c)) = work.leading().map(|(m, c)| (m.clone(), c.clone())) {
        for g in basis {
            let (gm, gc) = leading(g);
            if gm.divides(&m) {
                let (q, _r) = c.div_mod_floor(gc);
                if !q.is_zero() {
                    budget.tick()?;
                    let shift = gm.div_into(&m);
                    work = work.sub(&g.mul_term(&shift, &q));
                    continue 'outer;
                }
            }
        }
        // Lead term irreducible: emit it.
        let t = IntPoly::from_term(&table, m, c);
        done = done.add(&t);
        work = work.sub(&t);
    }
    Ok(done)
}

/// Strong Buchberger over Z. Generators must be homogeneous when a degree
/// bound is requested. The returned basis is autoreduced (canonical for a
/// fixed order and bound, independent of generator order).
pub fn groebner_z(
    gens: &[IntPoly],
    degree_bound: Option<u32>,
    budget: &mut Budget,
) -> Result<GroebnerBasis, IdealError> {
    let table = gens
        .iter()
        .find(|g| !g.is_zero())
        .map(|g| g.table().clone());
    let table = match table {
        Some(t) => t,
        None => {
            return Ok(GroebnerBasis {
                table: gens
                    .first()
                    .map(|g| g.table().clone())
                    .unwrap_or_else(|| VarTable::new(&[])),
                basis: vec![],
                degree_bound,
            })
        }
    };
    if degree_bound.is_some() {
        assert!(
            gens.iter().all(|g| g.homogeneous_degree().is_some()),
            "degree truncation requires homogeneous generators"
        );
    }

    let mut basis: Vec<IntPoly> = Vec::new();
    for g in gens {
        if g.is_zero() {
            continue;
        }
        if let Some(b) = degree_bound {
            if g.homogeneous_degree().unwrap_or(0) > b {
                continue;
            }
        }
        let g = sign_normalize(g.clone());
        if !basis.contains(&g) {
            basis.push(g);
        }
    }

    // Pair queue ordered by ascending degree of the lcm term.
    let mut queue: BinaryHeap<std::cmp::Reverse<(u32, usize, usize)>> = BinaryHeap::new();
    let push_pairs =
        |queue: &mut BinaryHeap<std::cmp::Reverse<(u32, usize, usize)>>, basis: &[IntPoly], i: usize| {
            for j in 0..i {
                let (mi, _) = leading(&basis[i]);
                let (mj, _) = leading(&basis[j]);
                let lcm = mi.lcm(mj, &table);
                queue.push(std::cmp::Reverse((lcm.wdeg(), j, i)));
            }
        };
    for i in 0..basis.len() {
        push_pairs(&mut queue, &basis, i);
    }

    while let Some(std::cmp::Reverse((deg, i, j))) = queue.pop() {
        if let Some(b) = degree_bound {
            if deg > b {
                continue;
            }
        }
        let (mi, ci) = {
            let (m, c) = leading(&basis[i]);
            (m.clone(), c.clone())
        };
        let (mj, cj) = {
            let (m, c) = leading(&basis[j]);
            (m.clone(), c.clone())
        };
        let lcm = mi.lcm(&mj, &table);
        let sh_i = mi.div_into(&lcm);
        let sh_j = mj.div_into(&lcm);
        let ext = ci.extended_gcd(&cj);
        let g = ext.gcd.clone();

        // S-polynomial: cancels the leading terms.
        let spoly = basis[i]
            .mul_term(&sh_i, &(&cj / &g))
            .sub(&basis[j].mul_term(&sh_j, &(&ci / &g)));
        // GCD-polynomial: realizes gcd(ci, cj) on the lcm monomial.
        let gpoly = basis[i]
            .mul_term(&sh_i, &ext.x)
            .add(&basis[j].mul_term(&sh_j, &ext.y));

        for cand in [spoly, gpoly] {
            budget.tick()?;
            let red = normal_form_budgeted(&cand, &basis, budget)?;
            if red.is_zero() {
                continue;
            }
            if let Some(b) = degree_bound {
                if red.homogeneous_degree().unwrap_or(0) > b {
                    continue;
                }
            }
            let red = sign_normalize(red);
            basis.push(red);
            push_pairs(&mut queue, &basis, basis.len() - 1);
        }
    }

    // Autoreduce to the canonical reduced strong basis.
    loop {
        budget.tick()?;
        let mut changed = false;
        let mut i = 0;
        while i < basis.len() {
            let current = basis.remove(i);
            let red = normal_form_budgeted(&current, &basis, budget)?;
            if red.is_zero() {
                changed = true;
                continue;
            }
            let red = sign_normalize(red);
            if red != current {
                changed = true;
            }
            basis.insert(i, red);
            i += 1;
        }
        if !changed {
            break;
        }
    }
    basis.sort_by(|a, b| {
        let (ma, _) = leading(a);
        let (mb, _) = leading(b);
        ma.cmp(mb)
    });

    Ok(GroebnerBasis {
        table,
        basis,
        degree_bound,
    })
}

// ---------------------------------------------------------------------------
// Cached entry point
// ---------------------------------------------------------------------------

fn memo() -> &'static Mutex<HashMap<String, Arc<GroebnerBasis>>> {
    static MEMO: OnceLock<Mutex<HashMap<String, Arc<GroebnerBasis>>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cache_key(table: &VarTable, gens: &[IntPoly], bound: Option<u32>) -> String {
    let mut h = Sha256::new();
    h.update(ORDER_TAG.as_bytes());
    h.update(b"\n");
    for i in 0..table.len() {
        h.update(format!("{}:{};", table.name(i), table.degree(i)).as_bytes());
    }
    h.update(b"\n");
    match bound {
        Some(b) => h.update(format!("bound={b}\n").as_bytes()),
        None => h.update(b"bound=none\n"),
    }
    for g in gens {
        h.update(g.to_string().as_bytes());
        h.update(b"\n");
    }
    hex_string(&h.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn load_cached(path: &Path, table: &Arc<VarTable>, bound: Option<u32>) -> Option<GroebnerBasis> {
    let text = std::fs::read_to_string(path).ok()?;
    let mut lines = text.lines();
    if lines.next()? != "hgchow-basis v1" {
        return None;
    }
    let mut basis = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        basis.push(parser::parse_poly(line, table).ok()?);
    }
    Some(GroebnerBasis {
        table: table.clone(),
        basis,
        degree_bound: bound,
    })
}

fn store_cached(path: &Path, gb: &GroebnerBasis) {
    // Idempotent concurrent writes: write to a unique temp file, then
    // rename into place.
    if let Some(dir) = path.parent() {
        if std::fs::create_dir_all(dir).is_err() {
            return;
        }
        let tmp = dir.join(format!(
            ".tmp-{}-{}",
            std::process::id(),
            path.file_name().and_then(|s| s.to_str()).unwrap_or("basis")
        ));
        let mut content = String::from("hgchow-basis v1\n");
        for g in &gb.basis {
            content.push_str(&g.to_string());
            content.push('\n');
        }
        if let Ok(mut f) = std::fs::File::create(&tmp) {
            if f.write_all(content.as_bytes()).is_ok() {
                let _ = std::fs::rename(&tmp, path);
            }
        }
    }
}

/// Groebner basis with in-memory and on-disk memoization. Deterministic:
/// cache hits and misses produce identical bases.
pub fn groebner_cached(
    gens: &[IntPoly],
    degree_bound: Option<u32>,
    opts: &EngineOpts,
) -> Result<Arc<GroebnerBasis>, IdealError> {
    let table = gens
        .iter()
        .find(|g| !g.is_zero())
        .map(|g| g.table().clone());
    let table = match table {
        Some(t) => t,
        None => {
            let mut budget = Budget::new(opts.budget);
            return Ok(Arc::new(groebner_z(gens, degree_bound, &mut budget)?));
        }
    };
    let key = cache_key(&table, gens, degree_bound);
    if let Some(found) = memo().lock().unwrap().get(&key) {
        return Ok(found.clone());
    }
    if let Some(dir) = &opts.cache_dir {
        let path = dir.join(format!("{key}.basis"));
        if let Some(gb) = load_cached(&path, &table, degree_bound) {
            let gb = Arc::new(gb);
            memo().lock().unwrap().insert(key, gb.clone());
            return Ok(gb);
        }
    }
    let mut budget = Budget::new(opts.budget);
    let gb = Arc::new(groebner_z(gens, degree_bound, &mut budget)?);
    if let Some(dir) = &opts.cache_dir {
        store_cached(&dir.join(format!("{key}.basis")), &gb);
    }
    memo().lock().unwrap().insert(key, gb.clone());
    Ok(gb)
}

// ---------------------------------------------------------------------------
// Ideals in presented rings
// ---------------------------------------------------------------------------

/// A finitely generated homogeneous ideal in a presented ring. Generators
/// are stored reduced against the ring's structural relations; membership
/// always works modulo the structural ideal as well.
#[derive(Debug, Clone)]
pub struct Ideal {
    ring: Arc<RingPresentation>,
    gens: Vec<IntPoly>,
}

impl Ideal {
    pub fn new(ring: Arc<RingPresentation>, gens: Vec<IntPoly>) -> Self {
        let gens: Vec<IntPoly> = gens
            .iter()
            .map(|g| ring.reduce(g))
            .filter(|g| !g.is_zero())
            .collect();
        for g in &gens {
            assert!(
                g.homogeneous_degree().is_some(),
                "ideal generators must be homogeneous"
            );
        }
        Ideal { ring, gens }
    }

    pub fn ring(&self) -> &Arc<RingPresentation> {
        &self.ring
    }

    pub fn gens(&self) -> &[IntPoly] {
        &self.gens
    }

    /// The ideal enlarged by extra generators.
    pub fn plus(&self, extra: &[IntPoly]) -> Ideal {
        let mut gens = self.gens.clone();
        gens.extend(extra.iter().cloned());
        Ideal::new(self.ring.clone(), gens)
    }

    fn membership_gens(&self) -> Vec<IntPoly> {
        let mut gens = self.gens.clone();
        gens.extend(self.ring.membership_relations());
        gens
    }

    pub fn contains(&self, p: &IntPoly, opts: &EngineOpts) -> Result<bool, IdealError> {
        let p = self.ring.reduce(p);
        if p.is_zero() {
            return Ok(true);
        }
        let gens = self.membership_gens();
        if gens.is_empty() {
            return Ok(false);
        }
        let all_homogeneous = gens.iter().all(|g| g.homogeneous_degree().is_some());
        let bound = match (p.homogeneous_degree(), all_homogeneous) {
            (Some(d), true) => Some(d),
            _ => None,
        };
        let gb = groebner_cached(&gens, bound, opts)?;
        let mut budget = Budget::new(opts.budget);
        Ok(normal_form_budgeted(&p, &gb.basis, &mut budget)?.is_zero())
    }

    pub fn contains_all(&self, ps: &[IntPoly], opts: &EngineOpts) -> Result<bool, IdealError> {
        for p in ps {
            if !self.contains(p, opts)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Mutual containment of generators.
    pub fn equal(&self, other: &Ideal, opts: &EngineOpts) -> Result<bool, IdealError> {
        if !Arc::ptr_eq(&self.ring, &other.ring) && self.ring.table != other.ring.table {
            return Err(IdealError::RingMismatch);
        }
        Ok(self.contains_all(&other.gens, opts)? && other.contains_all(&self.gens, opts)?)
    }

    /// p lies in the ideal plus (2).
    pub fn two_divisible(&self, p: &IntPoly, opts: &EngineOpts) -> Result<bool, IdealError> {
        let two = IntPoly::constant(&self.ring.table, 2);
        self.plus(&[two]).contains(p, opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::VarTable;

    fn table_xy() -> Arc<VarTable> {
        VarTable::new(&[("x", 1), ("y", 1)])
    }

    #[test]
    fn principal_monic_basis() {
        let t = table_xy();
        let x = IntPoly::var(&t, 0);
        let mut b = Budget::default();
        let gb = groebner_z(&[x.clone()], None, &mut b).unwrap();
        assert_eq!(gb.basis, vec![x]);
    }

    #[test]
    fn coefficient_gcd_basis() {
        // (2x, 3x) contains x since gcd(2,3) = 1.
        let t = table_xy();
        let x = IntPoly::var(&t, 0);
        let mut b = Budget::default();
        let gb = groebner_z(&[x.mul_scalar(2), x.mul_scalar(3)], None, &mut b).unwrap();
        assert_eq!(gb.basis, vec![x.clone()]);
        assert!(normal_form(&x, &gb).is_zero());
    }

    #[test]
    fn lambda_relations_basis() {
        // (c1, 2c3) in Z[l1,l2,l3]: both generators reduce to zero.
        let t = VarTable::new(&[("l1", 1), ("l2", 1), ("l3", 1)]);
        let l = |i| IntPoly::var(&t, i);
        let c1 = l(0).add(&l(1)).add(&l(2));
        let two_c3 = l(0).mul(&l(1)).mul(&l(2)).mul_scalar(2);
        let mut b = Budget::default();
        let gb = groebner_z(&[c1.clone(), two_c3.clone()], None, &mut b).unwrap();
        assert!(normal_form(&c1, &gb).is_zero());
        assert!(normal_form(&two_c3, &gb).is_zero());
        // Multiples reduce to zero as well.
        assert!(normal_form(&c1.mul(&l(1)), &gb).is_zero());
        // 4*l1^2*l2 + 4*l1*l2^2 is -4c3 after eliminating l3, i.e. 2*(2c3).
        let p = l(0)
            .pow(2)
            .mul(&l(1))
            .mul_scalar(4)
            .add(&l(0).mul(&l(1).pow(2)).mul_scalar(4));
        assert!(normal_form(&p, &gb).is_zero());
        // ... but 2*l1^2*l2 + 2*l1*l2^2 (= -2c3 = 2c3 mod 4c3? no!) does reduce:
        // it is exactly the eliminated form of -(2c3), a generator multiple.
        let q = l(0)
            .pow(2)
            .mul(&l(1))
            .mul_scalar(2)
            .add(&l(0).mul(&l(1).pow(2)).mul_scalar(2));
        assert!(normal_form(&q, &gb).is_zero());
        // l1^2*l2 + l1*l2^2 (= -c3) does not.
        let r = l(0)
            .pow(2)
            .mul(&l(1))
            .add(&l(0).mul(&l(1).pow(2)));
        assert!(!normal_form(&r, &gb).is_zero());
    }

    #[test]
    fn budget_is_enforced() {
        let t = table_xy();
        let x = IntPoly::var(&t, 0);
        let y = IntPoly::var(&t, 1);
        let g1 = x.pow(3).add(&y.pow(2).mul_scalar(2));
        let g2 = x.mul(&y).mul_scalar(3).add(&y.pow(2));
        let mut b = Budget::new(1);
        match groebner_z(&[g1, g2], None, &mut b) {
            Err(IdealError::Budget { limit: 1 }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn canonical_under_generator_shuffle() {
        let t = table_xy();
        let x = IntPoly::var(&t, 0);
        let y = IntPoly::var(&t, 1);
        let gens = vec![
            x.pow(2).mul_scalar(2).add(&y.pow(2).mul_scalar(3)),
            x.mul(&y).mul_scalar(4),
            y.pow(3).mul_scalar(5),
        ];
        let mut b = Budget::default();
        let gb1 = groebner_z(&gens, None, &mut b).unwrap();
        let shuffled = vec![gens[2].clone(), gens[0].clone(), gens[1].clone()];
        let gb2 = groebner_z(&shuffled, None, &mut b).unwrap();
        assert_eq!(gb1.basis, gb2.basis);
    }

    #[test]
    fn normal_form_idempotent() {
        let t = table_xy();
        let x = IntPoly::var(&t, 0);
        let y = IntPoly::var(&t, 1);
        let mut b = Budget::default();
        let gb = groebner_z(&[x.pow(2).mul_scalar(2), x.mul(&y).mul_scalar(3)], None, &mut b)
            .unwrap();
        let p = x.pow(3).mul_scalar(7).add(&x.mul(&y).mul_scalar(5)).add(&y.pow(2));
        let n1 = normal_form(&p, &gb);
        let n2 = normal_form(&n1, &gb);
        assert_eq!(n1, n2);
    }
}
