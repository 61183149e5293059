//! Gröbner bases over the exact rationals in graded reverse lexicographic
//! order: Buchberger's algorithm with the coprimality and chain criteria,
//! full normal forms, ideal equality, windowed Hilbert functions of quotient
//! presentations, and a product-formula certificate for regular sequences.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use num::One;

use thiserror::Error;

use crate::poly::{
    mono_div, mono_divides, mono_lcm, mono_one, mono_total_deg, mono_tridegree, Mono, Poly,
    PolyError, Rat, Registry, TriDegree,
};
use crate::series::{expand, Factor, Series};
use crate::table::{DimensionTable, Window};

#[derive(Debug, Error)]
pub enum GroebnerError {
    #[error("generator {0} is zero or not homogeneous")]
    BadGenerator(usize),
    #[error("S-pair budget of {0} exhausted before the basis stabilized")]
    BudgetExceeded(usize),
    #[error("variable {0} has degree {1}, which makes window slices infinite")]
    InfiniteSlice(String, TriDegree),
    #[error("presentations live over different registries")]
    RegistryMismatch,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("invalid presentation encoding: {0}")]
    Encoding(String),
}

/// Resource limits for basis computations.
#[derive(Debug, Clone, Copy)]
pub struct GbConfig {
    /// Maximum number of S-pairs that may be reduced.
    pub spair_budget: usize,
}

impl Default for GbConfig {
    fn default() -> Self {
        GbConfig { spair_budget: 1_000_000 }
    }
}

/// A homogeneous generating set for an ideal over a registry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealPresentation {
    pub registry: Registry,
    pub generators: Vec<Poly>,
}

impl IdealPresentation {
    /// Validates that each generator is nonzero and homogeneous.
    pub fn new(registry: Registry, generators: Vec<Poly>) -> Result<Self, GroebnerError> {
        for (i, g) in generators.iter().enumerate() {
            if g.is_zero() || g.tridegree().is_err() {
                return Err(GroebnerError::BadGenerator(i));
            }
            assert!(g.registry() == &registry, "generator over wrong registry");
        }
        Ok(IdealPresentation { registry, generators })
    }

    pub fn free(registry: Registry) -> Self {
        IdealPresentation { registry, generators: Vec::new() }
    }
}

fn monic(p: &Poly) -> Poly {
    match p.leading() {
        None => p.clone(),
        Some((_, c)) => {
            let inv = Rat::one() / c;
            p.scale(&inv)
        }
    }
}

/// One full-reduction step sequence: the normal form of `p` against `gb`,
/// reducing leading and trailing terms alike.
pub fn normal_form(p: &Poly, gb: &[Poly]) -> Poly {
    let reg = p.registry();
    let leads: Vec<(&Mono, &Rat)> = gb.iter().map(|g| g.leading().expect("nonzero")).collect();
    let mut f = p.clone();
    let mut tail: Vec<(Mono, Rat)> = Vec::new();
    'outer: while let Some((lm, lc)) = f.leading() {
        for (gi, (glm, glc)) in leads.iter().enumerate() {
            if mono_divides(glm, lm) {
                let qm = mono_div(lm, glm);
                let qc = lc / *glc;
                f.sub_mul_term(&qc, &qm, &gb[gi]);
                continue 'outer;
            }
        }
        let (m, c) = f.pop_leading().expect("nonempty");
        tail.push((m, c));
    }
    Poly::from_terms(reg, tail)
}

fn spair(f: &Poly, g: &Poly) -> Poly {
    let (fl, fc) = f.leading().expect("nonzero");
    let (gl, gc) = g.leading().expect("nonzero");
    let l = mono_lcm(fl, gl);
    let mut s = f.mul_term(&mono_div(&l, fl), &(Rat::one() / fc));
    s.sub_mul_term(&(Rat::one() / gc), &mono_div(&l, gl), g);
    s
}

/// Buchberger's algorithm returning the unique reduced, monic basis, sorted
/// by ascending leading monomial.
pub fn groebner_basis(
    ideal: &IdealPresentation,
    config: &GbConfig,
) -> Result<Vec<Poly>, GroebnerError> {
    let mut basis: Vec<Poly> = Vec::new();
    for g in &ideal.generators {
        if !g.is_zero() {
            basis.push(monic(g));
        }
    }
    basis.dedup();

    let mut heap: BinaryHeap<Reverse<(u32, usize, usize)>> = BinaryHeap::new();
    let push_pairs = |heap: &mut BinaryHeap<_>, basis: &[Poly], j: usize| {
        let (lj, _) = basis[j].leading().expect("nonzero");
        for i in 0..j {
            let (li, _) = basis[i].leading().expect("nonzero");
            let deg = mono_total_deg(&mono_lcm(li, lj));
            heap.push(Reverse((deg, i, j)));
        }
    };
    for j in 0..basis.len() {
        push_pairs(&mut heap, &basis, j);
    }

    // Pairs whose S-polynomial is known to reduce to zero.
    let mut done: HashSet<(usize, usize)> = HashSet::new();
    let mut reductions = 0usize;

    while let Some(Reverse((_, i, j))) = heap.pop() {
        let (li, _) = basis[i].leading().expect("nonzero");
        let (lj, _) = basis[j].leading().expect("nonzero");
        let l = mono_lcm(li, lj);
        // Coprimality criterion.
        if mono_total_deg(&l) == mono_total_deg(li) + mono_total_deg(lj) {
            done.insert((i, j));
            continue;
        }
        // Chain criterion: a third leading term dividing the lcm, with both
        // side pairs already settled, settles this one too.
        let mut skip = false;
        for (k, g) in basis.iter().enumerate() {
            if k == i || k == j {
                continue;
            }
            let (lk, _) = g.leading().expect("nonzero");
            if mono_divides(lk, &l)
                && done.contains(&(i.min(k), i.max(k)))
                && done.contains(&(j.min(k), j.max(k)))
            {
                skip = true;
                break;
            }
        }
        if skip {
            done.insert((i, j));
            continue;
        }
        reductions += 1;
        if reductions > config.spair_budget {
            return Err(GroebnerError::BudgetExceeded(config.spair_budget));
        }
        let s = spair(&basis[i], &basis[j]);
        let h = normal_form(&s, &basis);
        done.insert((i, j));
        if !h.is_zero() {
            basis.push(monic(&h));
            push_pairs(&mut heap, &basis, basis.len() - 1);
        }
    }

    // Inter-reduce to the unique reduced basis.
    loop {
        let mut changed = false;
        let mut i = 0;
        while i < basis.len() {
            let g = basis.remove(i);
            let h = normal_form(&g, &basis);
            if h.is_zero() {
                changed = true;
                continue;
            }
            let h = monic(&h);
            if h != g {
                changed = true;
            }
            basis.insert(i, h);
            i += 1;
        }
        if !changed {
            break;
        }
    }
    basis.sort_by(|a, b| {
        crate::poly::mono_cmp(a.leading().expect("nonzero").0, b.leading().expect("nonzero").0)
    });
    Ok(basis)
}

/// A quotient ring presentation: ideal plus its reduced basis, plus a degree
/// shift applied to the unit when tabulating dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientPresentation {
    pub ideal: IdealPresentation,
    pub groebner: Vec<Poly>,
    pub shift: TriDegree,
}

impl QuotientPresentation {
    pub fn new(ideal: IdealPresentation, config: &GbConfig) -> Result<Self, GroebnerError> {
        let groebner = groebner_basis(&ideal, config)?;
        Ok(QuotientPresentation { ideal, groebner, shift: TriDegree::ZERO })
    }

    pub fn with_shift(mut self, shift: TriDegree) -> Self {
        self.shift = shift;
        self
    }

    /// The whole free ring (empty ideal).
    pub fn free(registry: Registry) -> Self {
        QuotientPresentation {
            ideal: IdealPresentation::free(registry),
            groebner: Vec::new(),
            shift: TriDegree::ZERO,
        }
    }

    pub fn registry(&self) -> &Registry {
        &self.ideal.registry
    }

    pub fn normal_form(&self, p: &Poly) -> Poly {
        normal_form(p, &self.groebner)
    }

    pub fn contains(&self, p: &Poly) -> bool {
        self.normal_form(p).is_zero()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "vars": self.registry().to_json(),
            "generators": self.ideal.generators.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
            "groebner": self.groebner.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
            "shift": {"q": self.shift.q, "t": self.shift.t, "a": self.shift.a},
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, GroebnerError> {
        let vars = v.get("vars").ok_or_else(|| GroebnerError::Encoding("missing vars".into()))?;
        let registry = Registry::from_json(vars)?;
        let polys = |key: &str| -> Result<Vec<Poly>, GroebnerError> {
            let arr = v
                .get(key)
                .and_then(|x| x.as_array())
                .ok_or_else(|| GroebnerError::Encoding(format!("missing {key}")))?;
            arr.iter().map(|p| Poly::from_json(&registry, p).map_err(Into::into)).collect()
        };
        let generators = polys("generators")?;
        let groebner = polys("groebner")?;
        let shift: TriDegree = serde_json::from_value(
            v.get("shift").cloned().unwrap_or_else(|| serde_json::json!({"q":0,"t":0,"a":0})),
        )
        .map_err(|e| GroebnerError::Encoding(format!("bad shift: {e}")))?;
        let ideal = IdealPresentation::new(registry, generators)?;
        Ok(QuotientPresentation { ideal, groebner, shift })
    }
}

/// Mutual-membership test for ideal equality over a shared registry.
pub fn ideal_equal(
    a: &IdealPresentation,
    b: &IdealPresentation,
    config: &GbConfig,
) -> Result<bool, GroebnerError> {
    if a.registry != b.registry {
        return Err(GroebnerError::RegistryMismatch);
    }
    let ga = groebner_basis(a, config)?;
    let gb = groebner_basis(b, config)?;
    let a_in_b = a.generators.iter().all(|p| normal_form(p, &gb).is_zero());
    let b_in_a = b.generators.iter().all(|p| normal_form(p, &ga).is_zero());
    Ok(a_in_b && b_in_a)
}

fn check_enumerable(reg: &Registry) -> Result<(), GroebnerError> {
    for d in reg.decls() {
        let ok = d.degree.a == 0 && (d.degree.t > 0 || (d.degree.t == 0 && d.degree.q > 0));
        if !ok {
            return Err(GroebnerError::InfiniteSlice(d.name.clone(), d.degree));
        }
    }
    Ok(())
}

/// Dimensions of the quotient on the window, by counting monomials not
/// divisible by any leading term of the basis (standard monomials), with the
/// presentation shift applied.
pub fn hilbert_function(
    q: &QuotientPresentation,
    window: &Window,
) -> Result<DimensionTable, GroebnerError> {
    let reg = q.registry();
    check_enumerable(reg)?;
    // Enumerate t-carrying variables first: within their phase t only grows,
    // and afterwards the remaining variables only raise q.
    let mut order: Vec<usize> = (0..reg.len()).filter(|&i| reg.decl(i).degree.t > 0).collect();
    let t_phase = order.len();
    order.extend((0..reg.len()).filter(|&i| reg.decl(i).degree.t == 0));
    // Leading terms grouped by the last enumeration position in their support.
    let mut groups: Vec<Vec<&Mono>> = vec![Vec::new(); reg.len() + 1];
    for g in &q.groebner {
        let (lm, _) = g.leading().expect("nonzero");
        let last = order
            .iter()
            .rposition(|&v| lm[v] != 0)
            .map(|p| p + 1)
            .unwrap_or(0);
        groups[last].push(lm);
    }
    if !groups[0].is_empty() {
        // A constant leading term would mean the whole ring collapses.
        return Ok(DimensionTable::new());
    }

    struct Walk<'a> {
        order: &'a [usize],
        t_phase: usize,
        degs: Vec<TriDegree>,
        groups: &'a [Vec<&'a Mono>],
        window: &'a Window,
        exps: Mono,
        out: DimensionTable,
    }
    impl Walk<'_> {
        fn blocked(&self, pos: usize) -> bool {
            // A leading term whose support closes at pos divides the current
            // prefix iff it divides it on every support variable.
            self.groups[pos + 1]
                .iter()
                .any(|lm| mono_divides(lm, &self.exps))
        }
        fn go(&mut self, pos: usize, cur: TriDegree) {
            if pos == self.order.len() {
                if cur.q >= self.window.q_min && cur.q <= self.window.q_max {
                    self.out.add(cur, 1);
                }
                return;
            }
            let v = self.order[pos];
            let vd = self.degs[pos];
            let mut e = 0u16;
            let mut d = cur;
            loop {
                if d.t > self.window.t_max {
                    break;
                }
                if pos >= self.t_phase && d.q > self.window.q_max {
                    break;
                }
                self.exps[v] = e;
                if self.blocked(pos) {
                    break;
                }
                self.go(pos + 1, d);
                e += 1;
                d = d + vd;
            }
            self.exps[v] = 0;
        }
    }

    let degs: Vec<TriDegree> = order.iter().map(|&v| reg.decl(v).degree).collect();
    let mut walk = Walk {
        order: &order,
        t_phase,
        degs,
        groups: &groups,
        window,
        exps: mono_one(reg.len()),
        out: DimensionTable::new(),
    };
    walk.go(0, q.shift);
    Ok(walk.out)
}

/// Outcome of the windowed regular-sequence certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegSeqVerdict {
    /// Quotient dimensions match the complete-intersection product formula
    /// everywhere on the window.
    Accept { window: Window },
    /// First disagreement, in degree order.
    Reject { at: TriDegree, got: u64, want: i64 },
}

impl RegSeqVerdict {
    pub fn accepted(&self) -> bool {
        matches!(self, RegSeqVerdict::Accept { .. })
    }
}

/// Compares the Hilbert function of `ambient / (seq)` against the product
/// `prod_i (1 - deg f_i) / prod_j (1 - deg var_j)` on the window.  Agreement
/// certifies that the sequence is regular up to the window boundary.
pub fn certify_regular_sequence(
    seq: &[Poly],
    ambient: &Registry,
    window: &Window,
    config: &GbConfig,
) -> Result<RegSeqVerdict, GroebnerError> {
    check_enumerable(ambient)?;
    let ideal = IdealPresentation::new(ambient.clone(), seq.to_vec())?;
    let quot = QuotientPresentation::new(ideal, config)?;
    let actual = hilbert_function(&quot, window)?;

    let mut factors: Vec<Factor> = Vec::new();
    for f in seq {
        let d = f.tridegree()?;
        factors.push(Factor::Poly { m: d, c: 1 });
    }
    for decl in ambient.decls() {
        factors.push(Factor::Geometric { m: decl.degree });
    }
    let expected: Series = expand(TriDegree::ZERO, &factors, window)
        .map_err(|e| GroebnerError::Encoding(format!("series expansion failed: {e}")))?;

    // Walk the union of supports in degree order.
    let mut keys: Vec<TriDegree> = actual.iter().map(|(d, _)| d).collect();
    for q in window.q_min..=window.q_max {
        for t in 0..=window.t_max {
            for a in 0..=window.a_max {
                let d = TriDegree { q, t, a };
                if expected.coeff(d) != 0 {
                    keys.push(d);
                }
            }
        }
    }
    keys.sort_unstable_by_key(|d| (d.t, d.q, d.a));
    keys.dedup();
    for d in keys {
        if !window.contains(d) {
            continue;
        }
        let got = actual.get(d);
        let want = expected.coeff(d);
        if want != got as i64 {
            return Ok(RegSeqVerdict::Reject { at: d, got, want });
        }
    }
    Ok(RegSeqVerdict::Accept { window: *window })
}

/// The two-alphabet comparison ideal `(e_k(y) - e_k(x), k = 1..n)`.
pub fn comparison_ideal(reg: &Registry, n: u8) -> IdealPresentation {
    use crate::symcomb::{e_on_x, e_on_y};
    let gens = (1..=n)
        .map(|k| &e_on_y(reg, k as i32, n) - &e_on_x(reg, k as i32, n))
        .collect();
    IdealPresentation::new(reg.clone(), gens).expect("comparison generators are homogeneous")
}

/// Convenience: tri-degree of a monomial against a registry (sharing the
/// helper with callers outside the polynomial layer).
pub fn degree_of_mono(reg: &Registry, m: &Mono) -> TriDegree {
    mono_tridegree(reg, m)
}
