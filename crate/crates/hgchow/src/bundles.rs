//! Characteristic-class data of the bundles V_n over the space S of
//! smooth ternary quadrics, and the pushforward/pullback calculus on
//! their projectivizations: Segre-class pushforward to the base,
//! pushforward along the squaring/product maps via the intersection
//! pairing, and the torus-invariant W-classes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::poly::{ElementaryMap, IntPoly, LambdaMode, VarTable, to_elementary};
use crate::rings::{
    build_ring, table_glh, table_l, table_lh, table_lh12, ChowClass, RingError, RingKind,
    RingPresentation,
};

/// Highest Segre index kept; covers every pairing solve with target
/// P(V_n) for n <= 8 (indices up to 2n = 16).
pub const MAX_SEGRE: u32 = 20;

/// All weight triples (k0,k1,k2) with k0+k1+k2 = n.
pub fn triples(n: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for k0 in 0..=n {
        for k1 in 0..=(n - k0) {
            out.push([k0, k1, n - k0 - k1]);
        }
    }
    out
}

/// The linear form k . lambda = k0*l1 + k1*l2 + k2*l3 in a table
/// containing the weight variables.
pub fn kdot(k: [u32; 3], table: &Arc<VarTable>) -> IntPoly {
    let l1 = IntPoly::var(table, table.index_of("l1").unwrap());
    let l2 = IntPoly::var(table, table.index_of("l2").unwrap());
    let l3 = IntPoly::var(table, table.index_of("l3").unwrap());
    l1.mul_scalar(k[0] as i64)
        .add(&l2.mul_scalar(k[1] as i64))
        .add(&l3.mul_scalar(k[2] as i64))
}

/// Equivariant Chern and Segre classes of V_n in A*_T(S), plus the monic
/// Grothendieck relation of its projectivization.
#[derive(Debug)]
pub struct BundleData {
    pub n: u32,
    pub rank: u32,
    /// c_0..c_{2n+1}, reduced mod (c1, 2c3); classes above the rank vanish.
    pub chern: Vec<IntPoly>,
    /// s_0..s_MAX_SEGRE, the inverse series, reduced.
    pub segre: Vec<IntPoly>,
    /// p_n(h) = sum (-1)^i c_i h^{2n+1-i}, monic of degree 2n+1, in the
    /// [l1,l2,l3,h] table.
    pub grothendieck: IntPoly,
}

fn bundle_memo() -> &'static Mutex<HashMap<u32, Arc<BundleData>>> {
    static MEMO: OnceLock<Mutex<HashMap<u32, Arc<BundleData>>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn bundle_data(n: u32) -> Result<Arc<BundleData>, RingError> {
    assert!(n >= 1);
    if let Some(found) = bundle_memo().lock().unwrap().get(&n) {
        return Ok(found.clone());
    }
    let data = Arc::new(compute_bundle_data(n)?);
    let mut memo = bundle_memo().lock().unwrap();
    let entry = memo.entry(n).or_insert_with(|| data.clone());
    Ok(entry.clone())
}

fn compute_bundle_data(n: u32) -> Result<BundleData, RingError> {
    let ts = build_ring(RingKind::TS)?;
    let tl = table_l();
    let rank = 2 * n + 1;
    let check_deg = rank + 3;
    // Total Chern series of V_n: the quotient of the degree-n
    // representation by the twisted degree-(n-2) subbundle. Each root of
    // the twist differs from j . lambda by c1, which vanishes in A*_T(S),
    // so the roots below are exact in the quotient ring.
    let mut series: Vec<IntPoly> = vec![IntPoly::one(&tl)];
    for k in triples(n) {
        let root = ts.reduce(&kdot(k, &tl));
        // Multiply by (1 + root * x), truncated at check_deg.
        let mut next = Vec::with_capacity((check_deg + 1) as usize);
        for d in 0..=check_deg as usize {
            let mut v = series.get(d).cloned().unwrap_or_else(|| IntPoly::zero(&tl));
            if d >= 1 {
                if let Some(prev) = series.get(d - 1) {
                    v = v.add(&prev.mul(&root));
                }
            }
            next.push(ts.reduce(&v));
        }
        series = next;
    }
    if n >= 2 {
        for j in triples(n - 2) {
            let root = ts.reduce(&kdot(j, &tl));
            // Divide by (1 + root * x): q_d = c_d - root * q_{d-1}.
            let mut q: Vec<IntPoly> = Vec::with_capacity(series.len());
            for d in 0..series.len() {
                let mut v = series[d].clone();
                if d >= 1 {
                    v = v.sub(&q[d - 1].mul(&root));
                }
                q.push(ts.reduce(&v));
            }
            series = q;
        }
    }
    // Rank consistency: classes above the rank must vanish in the
    // quotient; a failure means the root sign convention is wrong.
    for i in rank + 1..=check_deg {
        if !series[i as usize].is_zero() {
            return Err(RingError::RankConsistency { n, index: i });
        }
    }
    let chern: Vec<IntPoly> = series[..=(rank as usize)].to_vec();
    // Segre classes: the inverse series.
    let mut segre: Vec<IntPoly> = vec![IntPoly::one(&tl)];
    for d in 1..=MAX_SEGRE as usize {
        let mut v = IntPoly::zero(&tl);
        for i in 1..=d.min(rank as usize) {
            v = v.sub(&chern[i].mul(&segre[d - i]));
        }
        segre.push(ts.reduce(&v));
    }
    // Grothendieck relation of the projectivization.
    let tlh = table_lh();
    let h = IntPoly::var(&tlh, tlh.index_of("h").unwrap());
    let mut pn = IntPoly::zero(&tlh);
    for (i, ci) in chern.iter().enumerate() {
        let sign = if i % 2 == 0 { 1 } else { -1 };
        let term = ci
            .rename_into(&tlh)
            .expect("weight variables exist")
            .mul(&h.pow(rank - i as u32))
            .mul_scalar(sign);
        pn = pn.add(&term);
    }
    Ok(BundleData {
        n,
        rank,
        chern,
        segre,
        grothendieck: pn,
    })
}

/// The torsion generator 2c3 = 2*l1*l2*l3 with l3 eliminated.
pub fn two_c3_eliminated(table: &Arc<VarTable>) -> IntPoly {
    let l1 = IntPoly::var(table, table.index_of("l1").unwrap());
    let l2 = IntPoly::var(table, table.index_of("l2").unwrap());
    let l3 = l1.neg().sub(&l2);
    l1.mul(&l2).mul(&l3).mul_scalar(2)
}

/// Elementary-symmetric rewriting map for weight-only classes in the
/// eliminated [l1,l2,l3(,h*)] tables, landing in a target table with
/// c2,c3 and optional passthrough variables.
pub fn symmetric_map(
    source: &Arc<VarTable>,
    target: &Arc<VarTable>,
    passthrough: &[(&str, &str)],
) -> ElementaryMap {
    let mut pass = Vec::new();
    for &(s, t) in passthrough {
        pass.push((source.index_of(s).unwrap(), target.index_of(t).unwrap()));
    }
    ElementaryMap {
        source: source.clone(),
        target: target.clone(),
        mode: LambdaMode::Eliminated {
            l1: source.index_of("l1").unwrap(),
            l2: source.index_of("l2").unwrap(),
        },
        c2: target.index_of("c2").unwrap(),
        c3: target.index_of("c3").unwrap(),
        passthrough: pass,
        modulo: vec![two_c3_eliminated(source)],
    }
}

/// p_n rewritten in h,c2,c3 (symmetric coefficients, c1 eliminated).
pub fn grothendieck_symmetric(n: u32) -> Result<IntPoly, RingError> {
    let data = bundle_data(n)?;
    let glh = table_glh();
    let map = symmetric_map(&table_l(), &glh, &[]);
    let h = IntPoly::var(&glh, 0);
    let mut pn = IntPoly::zero(&glh);
    for (i, ci) in data.chern.iter().enumerate() {
        let sign = if i % 2 == 0 { 1 } else { -1 };
        let ci_c = to_elementary(ci, &map)?;
        pn = pn.add(&ci_c.mul(&h.pow(data.rank - i as u32)).mul_scalar(sign));
    }
    Ok(pn)
}

// ---------------------------------------------------------------------------
// Pushforward to the base
// ---------------------------------------------------------------------------

/// Raw Segre-map pushforward of a (possibly unreduced) polynomial on
/// P(V_n) down to S: sum a_i h^i maps to sum a_i s_{i-2n}.
pub fn proj_pushforward_raw(p: &IntPoly, n: u32) -> Result<IntPoly, RingError> {
    let data = bundle_data(n)?;
    let tl = table_l();
    let hidx = p.table().index_of("h").expect("projective bundle table");
    let cs = p.coefficients_in(hidx);
    let mut out = IntPoly::zero(&tl);
    for (i, c) in cs.iter().enumerate() {
        if (i as u32) < 2 * n || c.is_zero() {
            continue;
        }
        let idx = i as u32 - 2 * n;
        assert!(idx <= MAX_SEGRE);
        out = out.add(&c.rename_into(&tl)?.mul(&data.segre[idx as usize]));
    }
    Ok(out)
}

/// Pushforward of a class on P(V_n) to S.
pub fn proj_pushforward(x: &ChowClass) -> Result<ChowClass, RingError> {
    let n = match x.ring.kind {
        RingKind::TProj(n) => n,
        _ => return Err(RingError::RingMismatch),
    };
    let ts = build_ring(RingKind::TS)?;
    Ok(ChowClass::new(ts, proj_pushforward_raw(&x.rep, n)?))
}

/// Raw pushforward from P(V_a) x_S P(V_b) to S: the two single-bundle
/// Segre maps composed (order irrelevant).
pub fn pair_pushforward_raw(p: &IntPoly, a: u32, b: u32) -> Result<IntPoly, RingError> {
    let da = bundle_data(a)?;
    let db = bundle_data(b)?;
    let tl = table_l();
    let t = p.table();
    let h1 = t.index_of("h1").expect("fiber product table");
    let h2 = t.index_of("h2").expect("fiber product table");
    let mut out = IntPoly::zero(&tl);
    for (i, ci) in p.coefficients_in(h1).iter().enumerate() {
        if (i as u32) < 2 * a || ci.is_zero() {
            continue;
        }
        for (j, cij) in ci.coefficients_in(h2).iter().enumerate() {
            if (j as u32) < 2 * b || cij.is_zero() {
                continue;
            }
            let ia = i as u32 - 2 * a;
            let jb = j as u32 - 2 * b;
            assert!(ia <= MAX_SEGRE && jb <= MAX_SEGRE);
            out = out.add(
                &cij.rename_into(&tl)?
                    .mul(&da.segre[ia as usize])
                    .mul(&db.segre[jb as usize]),
            );
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Maps between projective bundles
// ---------------------------------------------------------------------------

/// Source of a pushforward map: one projective bundle or a fiber product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    Single(u32),
    Pair(u32, u32),
}

/// A map to P(V_c) given by its pullback on the hyperplane class; the
/// pushforward is determined by the intersection pairing against powers
/// of the target hyperplane class.
#[derive(Debug, Clone)]
pub struct MapSpec {
    pub source: SourceKind,
    pub target_n: u32,
    /// Image of the target hyperplane class, in the source table.
    pub pullback_h: IntPoly,
}

impl MapSpec {
    pub fn identity(n: u32) -> Self {
        let t = table_lh();
        MapSpec {
            source: SourceKind::Single(n),
            target_n: n,
            pullback_h: IntPoly::var(&t, t.index_of("h").unwrap()),
        }
    }

    /// The squaring-times-product map into P(V_n) restricted over the
    /// stratum with square part of degree 2s: P(V_s) x_S P(V_{n-2s}) when
    /// 2s < n (pullback 2h1 + h2), P(V_{n/2}) when 2s = n (pullback 2h).
    pub fn pi_prime(s: u32, n: u32) -> Self {
        assert!(s >= 1 && 2 * s <= n);
        if 2 * s == n {
            let t = table_lh();
            let h = IntPoly::var(&t, t.index_of("h").unwrap());
            MapSpec {
                source: SourceKind::Single(s),
                target_n: n,
                pullback_h: h.mul_scalar(2),
            }
        } else {
            let t = table_lh12();
            let h1 = IntPoly::var(&t, t.index_of("h1").unwrap());
            let h2 = IntPoly::var(&t, t.index_of("h2").unwrap());
            MapSpec {
                source: SourceKind::Pair(s, n - 2 * s),
                target_n: n,
                pullback_h: h1.mul_scalar(2).add(&h2),
            }
        }
    }

    /// The multiplication map P(V_a) x_S P(V_b) -> P(V_{a+b}), pullback
    /// h1 + h2.
    pub fn product(a: u32, b: u32) -> Self {
        let t = table_lh12();
        let h1 = IntPoly::var(&t, t.index_of("h1").unwrap());
        let h2 = IntPoly::var(&t, t.index_of("h2").unwrap());
        MapSpec {
            source: SourceKind::Pair(a, b),
            target_n: a + b,
            pullback_h: h1.add(&h2),
        }
    }

    /// The squaring map P(V_a) -> P(V_{2a}), pullback 2h.
    pub fn square(a: u32) -> Self {
        MapSpec::pi_prime(a, 2 * a)
    }

    pub fn source_ring(&self) -> Result<Arc<RingPresentation>, RingError> {
        match self.source {
            SourceKind::Single(a) => build_ring(RingKind::TProj(a)),
            SourceKind::Pair(a, b) => build_ring(RingKind::TProjPair(a, b)),
        }
    }

    fn source_push_raw(&self, p: &IntPoly) -> Result<IntPoly, RingError> {
        match self.source {
            SourceKind::Single(a) => proj_pushforward_raw(p, a),
            SourceKind::Pair(a, b) => pair_pushforward_raw(p, a, b),
        }
    }

    /// Pullback of a target class along the map (a ring homomorphism).
    pub fn pullback(&self, y: &ChowClass) -> Result<ChowClass, RingError> {
        match y.ring.kind {
            RingKind::TProj(n) if n == self.target_n => {}
            _ => return Err(RingError::RingMismatch),
        }
        let src_ring = self.source_ring()?;
        let st = &src_ring.table;
        let yt = y.rep.table().clone();
        let mut images = Vec::with_capacity(yt.len());
        for i in 0..yt.len() {
            if yt.name(i) == "h" {
                images.push(self.pullback_h.clone());
            } else {
                let j = st.index_of(yt.name(i)).expect("weight variable");
                images.push(IntPoly::var(st, j));
            }
        }
        let rep = y.rep.map_vars(st, &images);
        Ok(ChowClass::new(src_ring, rep))
    }
}

/// Pushforward along a [`MapSpec`]: the unique h-polynomial Phi of degree
/// at most 2c with p_*(Phi h^m) = f_*(x (f^* h)^m) for m = 0..2c. The
/// pairing matrix is unitriangular (s_0 = 1 on the antidiagonal), so the
/// solve is exact back-substitution over A*_T(S).
pub fn duality_pushforward(m: &MapSpec, x: &ChowClass) -> Result<ChowClass, RingError> {
    let src_ring = m.source_ring()?;
    if x.ring.kind != src_ring.kind {
        return Err(RingError::RingMismatch);
    }
    let c = m.target_n;
    let two_c = (2 * c) as usize;
    let target = bundle_data(c)?;
    let ts = build_ring(RingKind::TS)?;

    let mut rhs: Vec<IntPoly> = Vec::with_capacity(two_c + 1);
    let mut cur = x.rep.clone();
    rhs.push(ts.reduce(&m.source_push_raw(&cur)?));
    for _ in 1..=two_c {
        cur = src_ring.reduce(&cur.mul(&m.pullback_h));
        rhs.push(ts.reduce(&m.source_push_raw(&cur)?));
    }

    let tl = table_l();
    let mut phi: Vec<IntPoly> = vec![IntPoly::zero(&tl); two_c + 1];
    for mm in 0..=two_c {
        let idx = two_c - mm;
        let mut val = rhs[mm].clone();
        for i in idx + 1..=two_c {
            let s_idx = i + mm - two_c;
            val = val.sub(&phi[i].mul(&target.segre[s_idx]));
        }
        phi[idx] = ts.reduce(&val);
    }

    let tlh = table_lh();
    let h = IntPoly::var(&tlh, tlh.index_of("h").unwrap());
    let mut out = IntPoly::zero(&tlh);
    for (i, f) in phi.iter().enumerate() {
        out = out.add(&f.rename_into(&tlh)?.mul(&h.pow(i as u32)));
    }
    let tgt_ring = build_ring(RingKind::TProj(c))?;
    Ok(ChowClass::new(tgt_ring, out))
}

// ---------------------------------------------------------------------------
// W-classes
// ---------------------------------------------------------------------------

/// Weight triples indexing the coordinate hyperplanes that cut out
/// W_{n,r,l}: |k| = n, k2 < 2, and (k0 < r or k1 < l).
pub fn w_triples(n: u32, r: u32, l: u32) -> Vec<[u32; 3]> {
    triples(n)
        .into_iter()
        .filter(|k| k[2] < 2 && (k[0] < r || k[1] < l))
        .collect()
}

/// The coordinate-hyperplane product for W_{n,r,l} in the [l1,l2,l3,h]
/// table: prod (h - k . lambda).
pub fn w_product_poly(n: u32, r: u32, l: u32) -> IntPoly {
    let t = table_lh();
    let h = IntPoly::var(&t, t.index_of("h").unwrap());
    let mut out = IntPoly::one(&t);
    for k in w_triples(n, r, l) {
        out = out.mul(&h.sub(&kdot(k, &t)));
    }
    out
}

/// [W_{n,r,l}] in the chart at the weight triple (0,0,2), where the
/// product formula is exact.
pub fn w_chart(n: u32, r: u32, l: u32) -> Result<ChowClass, RingError> {
    assert!(r + l <= n, "invalid W-class indices");
    let chart = build_ring(RingKind::Chart(n, [0, 0, 2]))?;
    Ok(ChowClass::new(chart, w_product_poly(n, r, l)))
}

/// [W_{1,1,0}] = (h1 - l2)(h1 - l3) on P(V_1), the globally exact seed
/// class of the squaring pushforwards.
pub fn w_seed() -> Result<ChowClass, RingError> {
    let ring = build_ring(RingKind::TProj(1))?;
    Ok(ChowClass::new(ring, w_product_poly(1, 1, 0)))
}

/// The exact (ambiguity-free) representative of [W_{n,2,0}] obtained by
/// pushing [W_{1,1,0}] x 1 forward along the squaring-product map.
pub fn w_generator(n: u32) -> Result<ChowClass, RingError> {
    assert!(n >= 3);
    let m = MapSpec::pi_prime(1, n);
    let src_ring = m.source_ring()?;
    let seed = w_seed()?;
    let embedded = seed.rep.rename_h(&src_ring.table, "h1")?;
    let x = ChowClass::new(src_ring, embedded);
    duality_pushforward(&m, &x)
}
