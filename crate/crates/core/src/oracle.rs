//! Brute-force homology of Koszul factorizations at chain level.
//!
//! The factorization is unrolled into its free chain complex, one column per
//! `q`-degree; homology dimensions come from exact sparse ranks of the
//! consecutive differentials over the rationals.  A certified change of
//! variables splits off one free polynomial line whenever every entry is
//! invariant under a common translation of the `x`-alphabet, which shrinks
//! the columns dramatically.  A dense fraction-free elimination provides an
//! independent rank path, used both as a cross-check and to evaluate the
//! closed reference complexes.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use num::{BigInt, One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::groebner::QuotientPresentation;
use crate::hhh::PoincareSeries;
use crate::mf::{
    dg_differential, theta_set_degree, to_dg_module, DgModulePresentation, KoszulFactorization,
    KoszulRow, ThetaSet,
};
use crate::poly::{
    mono_mul, mono_one, rat, Mono, Poly, Rat, Registry, TriDegree, VarDecl, VarKind,
};
use crate::series::SeriesError;
pub use crate::table::{DimensionTable, Window};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("the base of the factorization must be a free polynomial ring")]
    BaseNotFree,
    #[error("basis enumeration would be infinite: {0}")]
    UnboundedSlice(String),
    #[error("unexpected shape: {0}")]
    Shape(String),
}

/// Enumerates the monomials of one exact tri-degree over a registry whose
/// variables all raise `t`, or raise `q` at `t = 0`.
struct SliceEnumerator {
    nvars: usize,
    /// `(index, q, t)` for variables with `t > 0`.
    tvars: Vec<(usize, i32, i32)>,
    /// `(index, q)` for variables with `t = 0` (then `q > 0` is required).
    qvars: Vec<(usize, i32)>,
}

impl SliceEnumerator {
    fn new(reg: &Registry) -> Result<SliceEnumerator, OracleError> {
        let mut tvars = Vec::new();
        let mut qvars = Vec::new();
        for (i, d) in reg.decls().iter().enumerate() {
            let deg = d.degree;
            if deg.a != 0 || deg.t < 0 || (deg.t == 0 && deg.q <= 0) {
                return Err(OracleError::UnboundedSlice(format!(
                    "variable {} of degree {} cannot be enumerated",
                    d.name, deg
                )));
            }
            if deg.t > 0 {
                tvars.push((i, deg.q, deg.t));
            } else {
                qvars.push((i, deg.q));
            }
        }
        Ok(SliceEnumerator { nvars: reg.len(), tvars, qvars })
    }

    fn monomials(&self, qm: i32, tm: i32) -> Vec<Mono> {
        let mut out = Vec::new();
        if tm >= 0 {
            let mut m = mono_one(self.nvars);
            self.walk_t(0, qm, tm, &mut m, &mut out);
        }
        out
    }

    fn walk_t(&self, vi: usize, qm: i32, tm: i32, m: &mut Mono, out: &mut Vec<Mono>) {
        if vi == self.tvars.len() {
            if tm == 0 {
                self.walk_q(0, qm, m, out);
            }
            return;
        }
        let (idx, qv, tv) = self.tvars[vi];
        for e in 0..=(tm / tv) {
            m[idx] = e as u16;
            self.walk_t(vi + 1, qm - e * qv, tm - e * tv, m, out);
        }
        m[idx] = 0;
    }

    fn walk_q(&self, vi: usize, qm: i32, m: &mut Mono, out: &mut Vec<Mono>) {
        if qm < 0 {
            return;
        }
        if vi == self.qvars.len() {
            if qm == 0 {
                out.push(m.clone());
            }
            return;
        }
        let (idx, qv) = self.qvars[vi];
        if vi + 1 == self.qvars.len() {
            if qm % qv == 0 {
                m[idx] = (qm / qv) as u16;
                out.push(m.clone());
                m[idx] = 0;
            }
            return;
        }
        for e in 0..=(qm / qv) {
            m[idx] = e as u16;
            self.walk_q(vi + 1, qm - e * qv, m, out);
        }
        m[idx] = 0;
    }
}

/// One homological level of one `q`-column: the basis `x^exp * theta_set`.
struct LevelBasis {
    elems: Vec<(Mono, ThetaSet)>,
    index: HashMap<(Mono, ThetaSet), u32>,
}

impl LevelBasis {
    fn empty() -> LevelBasis {
        LevelBasis { elems: Vec::new(), index: HashMap::new() }
    }

    fn from_elems(elems: Vec<(Mono, ThetaSet)>) -> LevelBasis {
        let index = elems.iter().enumerate().map(|(i, e)| (e.clone(), i as u32)).collect();
        LevelBasis { elems, index }
    }
}

/// Precomputed chain data: the signed differential images per theta subset
/// and the degree offsets needed to enumerate level bases.
struct ChainContext {
    rank: usize,
    images: Vec<Vec<(ThetaSet, Vec<(Mono, Rat)>)>>,
    theta_deg: Vec<TriDegree>,
    enumerator: SliceEnumerator,
}

impl ChainContext {
    fn new(k: &KoszulFactorization) -> Result<ChainContext, OracleError> {
        if !k.base.ideal.generators.is_empty() {
            return Err(OracleError::BaseNotFree);
        }
        let dg: DgModulePresentation = to_dg_module(k);
        let rank = dg.contract.len();
        let images = (0..1u32 << rank)
            .map(|s| {
                dg_differential(&dg, s)
                    .into_iter()
                    .map(|(s2, p)| (s2, p.terms().to_vec()))
                    .collect()
            })
            .collect();
        let theta_deg = (0..1u32 << rank).map(|s| theta_set_degree(&dg, s)).collect();
        let enumerator = SliceEnumerator::new(dg.base.registry())?;
        Ok(ChainContext { rank, images, theta_deg, enumerator })
    }

    fn level(&self, q: i32, t: i32) -> LevelBasis {
        let mut elems = Vec::new();
        for set in 0..(1u32 << self.rank) {
            let td = self.theta_deg[set as usize];
            for m in self.enumerator.monomials(q - td.q, t - td.t) {
                elems.push((m, set));
            }
        }
        LevelBasis::from_elems(elems)
    }

    /// Columns of the differential from `src` into `tgt` (one level up).
    fn face(&self, src: &LevelBasis, tgt: &LevelBasis) -> Vec<Vec<(u32, Rat)>> {
        src.elems
            .iter()
            .map(|(m, set)| {
                let mut col: Vec<(u32, Rat)> = Vec::new();
                for (set2, terms) in &self.images[*set as usize] {
                    for (tm, tc) in terms {
                        let key = (mono_mul(m, tm), *set2);
                        let row = *tgt
                            .index
                            .get(&key)
                            .expect("differential image stays inside the column");
                        col.push((row, tc.clone()));
                    }
                }
                col.sort_by_key(|&(r, _)| r);
                debug_assert!(col.windows(2).all(|w| w[0].0 < w[1].0));
                col
            })
            .collect()
    }
}

fn is_unit(c: &Rat) -> u8 {
    if c.denom().is_one() && c.numer().abs().is_one() {
        0
    } else {
        1
    }
}

/// Exact rank of a sparse rational matrix given as columns of
/// `(row, coefficient)` pairs sorted by row.  Pivots are chosen greedily by a
/// fill-minimizing score through a lazily revalidated heap.
pub(crate) fn sparse_rank(nrows: usize, mut cols: Vec<Vec<(u32, Rat)>>) -> usize {
    let mut rows: Vec<HashSet<u32>> = vec![HashSet::new(); nrows];
    for (p, col) in cols.iter().enumerate() {
        for &(r, _) in col {
            rows[r as usize].insert(p as u32);
        }
    }
    let score = |clen: usize, rlen: usize| (clen as u64 - 1) * (rlen as u64 - 1);
    let mut heap: BinaryHeap<Reverse<(u64, u8, u32, u32)>> = BinaryHeap::new();
    for (p, col) in cols.iter().enumerate() {
        for (r, c) in col {
            heap.push(Reverse((
                score(col.len(), rows[*r as usize].len()),
                is_unit(c),
                p as u32,
                *r,
            )));
        }
    }
    let mut rank = 0usize;
    while let Some(Reverse((sc, nu, p, q))) = heap.pop() {
        let (pi, qi) = (p as usize, q as usize);
        if cols[pi].is_empty() {
            continue;
        }
        let Ok(pos) = cols[pi].binary_search_by_key(&q, |e| e.0) else {
            continue;
        };
        let cur = (score(cols[pi].len(), rows[qi].len()), is_unit(&cols[pi][pos].1));
        if cur > (sc, nu) {
            heap.push(Reverse((cur.0, cur.1, p, q)));
            continue;
        }
        // Eliminate the pivot (column p, row q).
        let pivot = std::mem::take(&mut cols[pi]);
        let c = pivot[pos].1.clone();
        for &(r, _) in &pivot {
            rows[r as usize].remove(&p);
        }
        let others: Vec<u32> = rows[qi].iter().copied().collect();
        for o in others {
            let oi = o as usize;
            let old = std::mem::take(&mut cols[oi]);
            let at_q = old
                .binary_search_by_key(&q, |e| e.0)
                .expect("row set lists this column");
            let f = &old[at_q].1 / &c;
            // merged = old - f * pivot, maintaining the row index as we go.
            let mut merged: Vec<(u32, Rat)> = Vec::with_capacity(old.len() + pivot.len());
            let mut created: Vec<u32> = Vec::new();
            let (mut i, mut j) = (0usize, 0usize);
            while i < old.len() || j < pivot.len() {
                if j == pivot.len() || (i < old.len() && old[i].0 < pivot[j].0) {
                    merged.push(old[i].clone());
                    i += 1;
                } else if i == old.len() || pivot[j].0 < old[i].0 {
                    let v = -&(&f * &pivot[j].1);
                    rows[pivot[j].0 as usize].insert(o);
                    created.push(pivot[j].0);
                    merged.push((pivot[j].0, v));
                    j += 1;
                } else {
                    let v = &old[i].1 - &(&f * &pivot[j].1);
                    if v.is_zero() {
                        rows[old[i].0 as usize].remove(&o);
                    } else {
                        merged.push((old[i].0, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
            for r in created {
                let pos = merged.binary_search_by_key(&r, |e| e.0).expect("created entry");
                heap.push(Reverse((
                    score(merged.len(), rows[r as usize].len()),
                    is_unit(&merged[pos].1),
                    o,
                    r,
                )));
            }
            cols[oi] = merged;
        }
        debug_assert!(rows[qi].is_empty());
        rank += 1;
    }
    rank
}

/// Exact rank of a dense rational matrix by fraction-free integer
/// elimination (rows are cleared of denominators first).
pub(crate) fn dense_rank_fraction_free(rows: Vec<Vec<Rat>>) -> usize {
    let nr = rows.len();
    if nr == 0 {
        return 0;
    }
    let nc = rows[0].len();
    if nc == 0 {
        return 0;
    }
    let mut m: Vec<Vec<BigInt>> = rows
        .into_iter()
        .map(|row| {
            let scale = row
                .iter()
                .fold(BigInt::one(), |acc, v| num::integer::lcm(acc, v.denom().clone()));
            row.iter().map(|v| v.numer() * (&scale / v.denom())).collect()
        })
        .collect();
    let mut rank = 0usize;
    let mut prev = BigInt::one();
    while rank < nr.min(nc) {
        // Smallest-magnitude nonzero entry of the trailing block as pivot.
        let mut pivot: Option<(usize, usize)> = None;
        for i in rank..nr {
            for j in rank..nc {
                if !m[i][j].is_zero()
                    && pivot.map_or(true, |(pi, pj)| m[i][j].abs() < m[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(rank, pi);
        for row in m.iter_mut() {
            row.swap(rank, pj);
        }
        for i in (rank + 1)..nr {
            for j in (rank + 1)..nc {
                let num = &m[rank][rank] * &m[i][j] - &m[i][rank] * &m[rank][j];
                debug_assert!((&num % &prev).is_zero());
                m[i][j] = num / &prev;
            }
            m[i][rank] = BigInt::zero();
        }
        prev = m[rank][rank].clone();
        rank += 1;
    }
    rank
}

/// Three consecutive homological pieces of one `q`-column around level `t`,
/// with the two connecting differentials as sparse columns.
#[derive(Debug, Clone)]
pub struct GradedComplexSlice {
    pub q: i32,
    pub t: i32,
    /// Bases at levels `t-1`, `t`, `t+1` (the first is empty at `t = 0`).
    pub bases: [Vec<(Mono, ThetaSet)>; 3],
    /// Columns of the maps into level `t` and out of level `t`.
    pub matrices: [Vec<Vec<(u32, Rat)>>; 2],
}

impl GradedComplexSlice {
    pub fn composite_is_zero(&self) -> bool {
        for col in &self.matrices[0] {
            let mut acc: HashMap<u32, Rat> = HashMap::new();
            for (mid, c) in col {
                for (end, c2) in &self.matrices[1][*mid as usize] {
                    let prod = c * c2;
                    acc.entry(*end).and_modify(|v| *v = &*v + &prod).or_insert(prod);
                }
            }
            if acc.values().any(|v| !v.is_zero()) {
                return false;
            }
        }
        true
    }

    /// `dim ker(out) - rank(in)` at the middle level.
    pub fn homology_dim(&self) -> u64 {
        let r_in = sparse_rank(self.bases[1].len(), self.matrices[0].clone());
        let r_out = sparse_rank(self.bases[2].len(), self.matrices[1].clone());
        (self.bases[1].len() - r_in - r_out) as u64
    }
}

pub fn complex_slice(
    k: &KoszulFactorization,
    q: i32,
    t: i32,
) -> Result<GradedComplexSlice, OracleError> {
    let ctx = ChainContext::new(k)?;
    let lo = if t > 0 { ctx.level(q, t - 1) } else { LevelBasis::empty() };
    let mid = ctx.level(q, t);
    let hi = ctx.level(q, t + 1);
    let m0 = ctx.face(&lo, &mid);
    let m1 = ctx.face(&mid, &hi);
    Ok(GradedComplexSlice {
        q,
        t,
        bases: [lo.elems, mid.elems, hi.elems],
        matrices: [m0, m1],
    })
}

/// Whether every row entry is fixed by the simultaneous substitution
/// `x_i -> x_i + T` for a fresh translation variable.
pub fn is_translation_invariant(k: &KoszulFactorization) -> bool {
    let reg = k.registry();
    if reg.decls().iter().any(|d| d.name == "transl") {
        return false;
    }
    let mut decls = reg.decls().to_vec();
    decls.push(VarDecl::aux("transl", TriDegree::new(2, 0, 0)));
    let ext = Registry::new(decls);
    let tvar = Poly::var(&ext, "transl");
    let keep: HashMap<String, Poly> = HashMap::new();
    let mut map = HashMap::new();
    for d in reg.decls() {
        if matches!(d.kind, VarKind::X(_)) {
            map.insert(d.name.clone(), &Poly::var(&ext, &d.name) + &tvar);
        }
    }
    k.rows.iter().all(|row| {
        [&row.a, &row.b]
            .into_iter()
            .all(|p| p.substitute(&ext, &map).ok() == p.substitute(&ext, &keep).ok())
    })
}

/// If the entries are translation invariant, rewrites the factorization over
/// the registry without the top `x` variable (set to zero); the original is
/// the result tensored with a free line of degree `q^2`.
fn translation_split(
    k: &KoszulFactorization,
) -> Result<Option<KoszulFactorization>, OracleError> {
    let reg = k.registry();
    let mut top: Option<(usize, u8)> = None;
    for (i, d) in reg.decls().iter().enumerate() {
        if let VarKind::X(ix) = d.kind {
            if top.map_or(true, |(_, m)| ix > m) {
                top = Some((i, ix));
            }
        }
    }
    let Some((idx, _)) = top else { return Ok(None) };
    if !is_translation_invariant(k) {
        return Ok(None);
    }
    let (small, _) = reg.without(idx);
    let mut map = HashMap::new();
    map.insert(reg.name(idx).to_string(), Poly::zero(&small));
    let transfer = |p: &Poly| -> Result<Poly, OracleError> {
        p.substitute(&small, &map)
            .map_err(|e| OracleError::Shape(format!("split substitution: {e}")))
    };
    let rows: Result<Vec<_>, _> = k
        .rows
        .iter()
        .map(|r| Ok(KoszulRow { a: transfer(&r.a)?, b: transfer(&r.b)?, shift: r.shift }))
        .collect();
    let out = KoszulFactorization::new(
        QuotientPresentation::free(small),
        rows?,
        k.global_shift,
    )
    .map_err(|e| OracleError::Shape(format!("split rebuild: {e}")))?;
    Ok(Some(out))
}

/// A safe lower bound on the `q`-degree of any chain basis element with
/// `t <= t_max + 1`; used to widen the window before tensoring the split
/// line back in.
fn basis_q_lower_bound(k: &KoszulFactorization, window: &Window) -> i32 {
    let t_cap = (window.t_max + 1) as i64;
    let theta_neg: i32 = k.rows.iter().map(|r| r.shift.q.min(0)).sum();
    let mut mono_lo = 0i64;
    for d in k.registry().decls() {
        let TriDegree { q, t, .. } = d.degree;
        if t > 0 && q < 0 {
            mono_lo = mono_lo.min((q as i64) * t_cap / (t as i64) - 1);
        }
    }
    k.global_shift.q + theta_neg + mono_lo as i32
}

fn column_dims(ctx: &ChainContext, q: i32, t_max: i32) -> Vec<(i32, u64)> {
    let mut dims = Vec::new();
    let mut prev_rank = 0usize;
    let mut cur = ctx.level(q, 0);
    for t in 0..=t_max {
        let nxt = ctx.level(q, t + 1);
        let r = sparse_rank(nxt.elems.len(), ctx.face(&cur, &nxt));
        let h = cur
            .elems
            .len()
            .checked_sub(r + prev_rank)
            .expect("rank bounded by dimension");
        if h > 0 {
            dims.push((t, h as u64));
        }
        prev_rank = r;
        cur = nxt;
    }
    dims
}

fn homology_direct(
    k: &KoszulFactorization,
    window: &Window,
    jobs: usize,
) -> Result<DimensionTable, OracleError> {
    let ctx = ChainContext::new(k)?;
    let qs: Vec<i32> = (window.q_min..=window.q_max).collect();
    let t_max = window.t_max;
    let run = || {
        qs.par_iter()
            .map(|&q| {
                column_dims(&ctx, q, t_max)
                    .into_iter()
                    .map(|(t, h)| (q, t, h))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    };
    let results = if jobs > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| OracleError::Shape(format!("worker pool: {e}")))?;
        pool.install(run)
    } else {
        run()
    };
    let mut out = DimensionTable::new();
    for column in results {
        for (q, t, h) in column {
            out.add(TriDegree::new(q, t, 0), h);
        }
    }
    Ok(out)
}

/// Homology dimensions of the factorization's chain complex per `(q, t)` in
/// the window, computed by exact linear algebra.  `jobs = 0` uses the global
/// worker pool; otherwise a dedicated pool of that size.
pub fn bidegree_homology(
    k: &KoszulFactorization,
    window: &Window,
    jobs: usize,
) -> Result<DimensionTable, OracleError> {
    if let Some(small) = translation_split(k)? {
        let sub = Window { q_min: basis_q_lower_bound(&small, window), ..*window };
        let inner = homology_direct(&small, &sub, jobs)?;
        let mut out = DimensionTable::new();
        for (d, v) in inner.iter() {
            let mut q = d.q;
            while q <= window.q_max {
                if q >= window.q_min {
                    out.add(TriDegree::new(q, d.t, d.a), v);
                }
                q += 2;
            }
        }
        return Ok(out);
    }
    homology_direct(k, window, jobs)
}

/// Chain-level homology convolved with an exterior factor: the bigraded
/// table is computed on a `q`-window padded for the exterior drops, then
/// multiplied through and restricted.
pub fn homology_with_exterior(
    k: &KoszulFactorization,
    exterior_degrees: &[TriDegree],
    window: &Window,
    jobs: usize,
) -> Result<DimensionTable, OracleError> {
    let max_drop: i32 = exterior_degrees.iter().map(|d| (-d.q).max(0)).sum();
    let padded = Window::bigraded(window.q_min, window.q_max + max_drop, window.t_max);
    let bigraded = bidegree_homology(k, &padded, jobs)?;
    let ext = crate::hhh::exterior_factor_table(exterior_degrees);
    Ok(bigraded.convolved(&ext).restricted(window))
}

/// The hand-built reference complexes with known homology.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExplicitModel {
    /// Rank two, untwisted: one generator per level, differential
    /// alternating `0, alpha, 0, alpha, ...`.
    P2,
    /// Rank two, twisted: same tower with the alternation offset by one.
    SP2,
    /// Rank three, twisted: a sum of shifted two-variable Koszul squares.
    WP3,
}

impl ExplicitModel {
    pub fn parse(s: &str) -> Option<ExplicitModel> {
        match s {
            "P2" => Some(ExplicitModel::P2),
            "sP2" => Some(ExplicitModel::SP2),
            "wP3" => Some(ExplicitModel::WP3),
            _ => None,
        }
    }
}

struct ExplicitComplex {
    reg: Registry,
    /// Generator `q`-shifts per homological level.
    levels: Vec<Vec<i32>>,
    /// `mats[t][row][col]`: map from level `t` into level `t + 1`.
    mats: Vec<Vec<Vec<Poly>>>,
}

fn explicit_complex(model: ExplicitModel, n_levels: usize) -> ExplicitComplex {
    match model {
        ExplicitModel::P2 | ExplicitModel::SP2 => {
            let reg = Registry::x_only(2);
            let alpha = &Poly::var(&reg, "x1") - &Poly::var(&reg, "x2");
            let odd_hits = matches!(model, ExplicitModel::P2);
            let levels = (0..n_levels).map(|t| vec![-2 * t as i32]).collect();
            let mats = (0..n_levels.saturating_sub(1))
                .map(|t| {
                    let entry = if (t % 2 == 1) == odd_hits {
                        alpha.clone()
                    } else {
                        Poly::zero(&reg)
                    };
                    vec![vec![entry]]
                })
                .collect();
            ExplicitComplex { reg, levels, mats }
        }
        ExplicitModel::WP3 => {
            let reg = Registry::x_only(3);
            let f = &Poly::var(&reg, "x1") - &Poly::var(&reg, "x3");
            let g = &Poly::var(&reg, "x3") - &Poly::var(&reg, "x2");
            // Copies indexed by (i, j) >= 0: a Koszul square on (f, g) with
            // generators at levels 2i+2j .. 2i+2j+2 and q-shift -4i-6j.
            // Slot 0 is the bottom, slots 1/2 the middle pair, slot 3 the top.
            let mut gens: Vec<Vec<(usize, usize, u8)>> = vec![Vec::new(); n_levels];
            let mut levels: Vec<Vec<i32>> = vec![Vec::new(); n_levels];
            for i in 0..=(n_levels / 2) {
                for j in 0..=(n_levels / 2) {
                    let base = 2 * i + 2 * j;
                    let q0 = -4 * i as i32 - 6 * j as i32;
                    for (slot, dl, dq) in [(0u8, 0usize, 0i32), (1, 1, -2), (2, 1, -2), (3, 2, -4)]
                    {
                        if base + dl < n_levels {
                            gens[base + dl].push((i, j, slot));
                            levels[base + dl].push(q0 + dq);
                        }
                    }
                }
            }
            let arrow = |from: (usize, usize, u8), to: (usize, usize, u8)| -> Poly {
                if (from.0, from.1) != (to.0, to.1) {
                    return Poly::zero(&reg);
                }
                match (from.2, to.2) {
                    (0, 1) => f.clone(),
                    (0, 2) => g.clone(),
                    (1, 3) => -&g,
                    (2, 3) => f.clone(),
                    _ => Poly::zero(&reg),
                }
            };
            let mats = (0..n_levels.saturating_sub(1))
                .map(|t| {
                    gens[t + 1]
                        .iter()
                        .map(|&tgt| gens[t].iter().map(|&src| arrow(src, tgt)).collect())
                        .collect()
                })
                .collect();
            ExplicitComplex { reg, levels, mats }
        }
    }
}

impl ExplicitComplex {
    /// Basis of the `(q, t)` slice: pairs of a generator at level `t` and a
    /// monomial filling the remaining degree.
    fn slice_basis(&self, en: &SliceEnumerator, q: i32, t: usize) -> Vec<(usize, Mono)> {
        let mut out = Vec::new();
        if t >= self.levels.len() {
            return out;
        }
        for (g, &shift) in self.levels[t].iter().enumerate() {
            for m in en.monomials(q - shift, 0) {
                out.push((g, m));
            }
        }
        out
    }

    fn slice_rank(&self, en: &SliceEnumerator, q: i32, t: usize) -> usize {
        if t + 1 >= self.levels.len() {
            return 0;
        }
        let src = self.slice_basis(en, q, t);
        let tgt = self.slice_basis(en, q, t + 1);
        if src.is_empty() || tgt.is_empty() {
            return 0;
        }
        let index: HashMap<(usize, Mono), usize> =
            tgt.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let mut rows = vec![vec![rat(0); src.len()]; tgt.len()];
        for (c, (g, m)) in src.iter().enumerate() {
            for (g2, row_entry) in self.mats[t].iter().enumerate() {
                for (tm, tc) in row_entry[*g].terms() {
                    let key = (g2, mono_mul(m, tm));
                    let r = *index.get(&key).expect("image stays in the slice");
                    rows[r][c] = &rows[r][c] + tc;
                }
            }
        }
        dense_rank_fraction_free(rows)
    }
}

/// Bigraded homology of one reference complex on the window, through the
/// dense fraction-free rank path.
pub fn explicit_complex_homology(model: ExplicitModel, window: &Window) -> DimensionTable {
    let n_levels = (window.t_max + 2) as usize;
    let c = explicit_complex(model, n_levels);
    let en = SliceEnumerator::new(&c.reg).expect("x-only registry enumerates");
    let mut out = DimensionTable::new();
    for q in window.q_min..=window.q_max {
        let mut prev_rank = 0usize;
        for t in 0..=window.t_max as usize {
            let n_t = c.slice_basis(&en, q, t).len();
            let r = c.slice_rank(&en, q, t);
            let h = n_t.checked_sub(r + prev_rank).expect("rank bounded by dimension");
            if h > 0 {
                out.add(TriDegree::new(q, t as i32, 0), h as u64);
            }
            prev_rank = r;
        }
    }
    out
}

/// Outcome of checking a dimension table against a closed series on a window.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub window: Window,
    pub checked: u64,
    pub total_mismatches: u64,
    /// At most the first ten mismatches as `(degree, table, series)`.
    pub mismatches: Vec<(TriDegree, u64, u64)>,
}

impl ComparisonReport {
    pub fn agrees(&self) -> bool {
        self.total_mismatches == 0
    }
}

pub fn compare(
    table: &DimensionTable,
    series: &PoincareSeries,
    window: &Window,
) -> Result<ComparisonReport, SeriesError> {
    let expected = series.expand(window)?;
    let all = table.restricted(window).mismatches(&expected);
    let checked = (window.q_max - window.q_min + 1) as u64
        * (window.t_max + 1) as u64
        * (window.a_max + 1) as u64;
    Ok(ComparisonReport {
        window: *window,
        checked,
        total_mismatches: all.len() as u64,
        mismatches: all.into_iter().take(10).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::GbConfig;
    use crate::hhh::{
        full_hhh, hh0_specialize, poincare_series, stable_homology_presentation, Permutation,
    };
    use crate::mf::build_mn;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> GbConfig {
        GbConfig::default()
    }

    fn specialized(n: u8, cycles: &str) -> (Permutation, KoszulFactorization) {
        let w = Permutation::parse_cycles(cycles, n).unwrap();
        let k = hh0_specialize(&build_mn(n, Some(&w), &cfg()).unwrap()).unwrap();
        (w, k)
    }

    #[test]
    fn sparse_rank_agrees_with_dense_rank_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let nr = rng.random_range(1..=9);
            let nc = rng.random_range(1..=9);
            let mut dense = vec![vec![rat(0); nc]; nr];
            let mut cols: Vec<Vec<(u32, Rat)>> = vec![Vec::new(); nc];
            for (r, row) in dense.iter_mut().enumerate() {
                for c in 0..nc {
                    if rng.random_range(0..3) == 0 {
                        let v = rat(rng.random_range(-4..=4));
                        if !v.is_zero() {
                            row[c] = v.clone();
                            cols[c].push((r as u32, v));
                        }
                    }
                }
            }
            for col in &mut cols {
                col.sort_by_key(|&(r, _)| r);
            }
            assert_eq!(sparse_rank(nr, cols), dense_rank_fraction_free(dense));
        }
    }

    #[test]
    fn slices_compose_to_zero() {
        let (_, k) = specialized(3, "(1 2)");
        for q in [-6, -4, -2, 0, 2, 4] {
            for t in 0..=3 {
                let s = complex_slice(&k, q, t).unwrap();
                assert!(s.composite_is_zero(), "q={q} t={t}");
            }
        }
    }

    #[test]
    fn splitting_is_certified_and_matches_the_direct_route() {
        let (_, k) = specialized(2, "(1 2)");
        assert!(is_translation_invariant(&k));
        let window = Window::bigraded(-10, 6, 4);
        let split = bidegree_homology(&k, &window, 1).unwrap();
        let direct = homology_direct(&k, &window, 1).unwrap();
        assert!(split.mismatches(&direct).is_empty());
        // A sum of variables is not translation invariant, so such a
        // factorization must take the direct route.
        let reg = Registry::x_only(2);
        let row = KoszulRow {
            a: &Poly::var(&reg, "x1") + &Poly::var(&reg, "x2"),
            b: Poly::zero(&reg),
            shift: crate::mf::standard_row_shift(),
        };
        let k2 = KoszulFactorization::new(
            QuotientPresentation::free(reg),
            vec![row],
            TriDegree::ZERO,
        )
        .unwrap();
        assert!(!is_translation_invariant(&k2));
        assert!(translation_split(&k2).unwrap().is_none());
    }

    #[test]
    fn rank_two_oracle_matches_closed_tables() {
        let window = Window::bigraded(-12, 8, 5);
        for cycles in ["", "(1 2)"] {
            let (w, k) = specialized(2, cycles);
            let table = bidegree_homology(&k, &window, 1).unwrap();
            let pres = stable_homology_presentation(&w, &cfg()).unwrap();
            let closed = full_hhh(&pres, &window).unwrap();
            assert!(
                table.mismatches(&closed).is_empty(),
                "{cycles:?}: {:?}",
                table.mismatches(&closed)
            );
        }
    }

    #[test]
    fn reference_complexes_match_the_engine() {
        let window = Window::bigraded(-12, 8, 5);
        for (model, n, cycles) in [
            (ExplicitModel::P2, 2u8, ""),
            (ExplicitModel::SP2, 2, "(1 2)"),
            (ExplicitModel::WP3, 3, "(1 2 3)"),
        ] {
            let (_, k) = specialized(n, cycles);
            let engine = bidegree_homology(&k, &window, 1).unwrap();
            let reference = explicit_complex_homology(model, &window);
            assert!(
                engine.mismatches(&reference).is_empty(),
                "{model:?}: {:?}",
                engine.mismatches(&reference)
            );
        }
    }

    #[test]
    fn comparison_report_flags_disagreements() {
        let window = Window::trigraded(-10, 6, 4, 2);
        let (w, k) = specialized(2, "(1 2)");
        let pres = stable_homology_presentation(&w, &cfg()).unwrap();
        let table = homology_with_exterior(&k, &pres.exterior_degrees, &window, 1).unwrap();
        let series = poincare_series(2, &[2]);
        let report = compare(&table, &series, &window).unwrap();
        assert!(report.agrees(), "{:?}", report.mismatches);
        // Perturb one cell and the report must notice.
        let mut wrong = table.clone();
        wrong.add(TriDegree::new(0, 1, 0), 7);
        let bad = compare(&wrong, &series, &window).unwrap();
        assert!(!bad.agrees());
        assert!(!bad.mismatches.is_empty());
    }

    #[test]
    fn three_cycle_oracle_matches_its_series() {
        let window = Window::bigraded(-14, 6, 6);
        let (w, k) = specialized(3, "(1 2 3)");
        let table = bidegree_homology(&k, &window, 2).unwrap();
        let pres = stable_homology_presentation(&w, &cfg()).unwrap();
        let closed = full_hhh(&pres, &window).unwrap();
        assert!(table.mismatches(&closed).is_empty());
    }
}
