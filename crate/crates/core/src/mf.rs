//! Koszul matrix factorizations over quotient presentations, the exact row
//! moves used to simplify them, the one-column family `M_n`, and the
//! associated dg-module with its square-zero and chain-map checks.
//!
//! A factorization is a finite list of rows `(a_i | b_i)` over a base ring
//! `R = Q[vars]/I`.  Row `i` carries an odd generator of tri-degree
//! `shift_i`; the differential sends the generator to `b_i` (contraction)
//! and wedges by `a_i` (extension), so `deg b_i = shift_i + (0,1,0)` and
//! `deg a_i = (0,1,0) - shift_i`, making `deg(a_i b_i) = (0,2,0)` for every
//! row.  The potential is `sum_i a_i b_i` reduced in `R`.

use num::{One, Zero};
use thiserror::Error;

use crate::groebner::{
    comparison_ideal, GbConfig, GroebnerError, QuotientPresentation,
};
use crate::perm::Permutation;
use crate::poly::{rat, rat_to_string, Poly, Rat, Registry, TriDegree, VarKind};
use crate::schubert_aij::{b_poly_with, YImage};

#[derive(Debug, Error)]
pub enum MfError {
    #[error("row {row}: entry `{side}` has degree {got} but the row shift requires {want}")]
    RowDegree { row: usize, side: &'static str, got: TriDegree, want: TriDegree },
    #[error("row {row}: entry `{side}` is not homogeneous")]
    RowInhomogeneous { row: usize, side: &'static str },
    #[error("move rejected: {0}")]
    BadMove(String),
    #[error("move changed the potential")]
    PotentialChanged,
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
}

/// One Koszul row `(a | b)` with the tri-degree of its odd generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KoszulRow {
    pub a: Poly,
    pub b: Poly,
    pub shift: TriDegree,
}

impl KoszulRow {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "a": self.a.to_json(),
            "b": self.b.to_json(),
            "shift": {"q": self.shift.q, "t": self.shift.t, "a": self.shift.a},
        })
    }
}

/// The degree of the differential; each row's two entries multiply to this.
pub const DIFFERENTIAL_DEGREE: TriDegree = TriDegree { q: 0, t: 1, a: 0 };

/// A Koszul factorization over a quotient presentation, with a global degree
/// shift applied to the unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KoszulFactorization {
    pub base: QuotientPresentation,
    pub rows: Vec<KoszulRow>,
    pub global_shift: TriDegree,
}

impl KoszulFactorization {
    /// Wraps the data, reducing entries into normal form against the base and
    /// validating the per-row degree invariants.
    pub fn new(
        base: QuotientPresentation,
        rows: Vec<KoszulRow>,
        global_shift: TriDegree,
    ) -> Result<Self, MfError> {
        let rows: Vec<KoszulRow> = rows
            .into_iter()
            .map(|r| KoszulRow {
                a: base.normal_form(&r.a),
                b: base.normal_form(&r.b),
                shift: r.shift,
            })
            .collect();
        let k = KoszulFactorization { base, rows, global_shift };
        k.check_degrees()?;
        Ok(k)
    }

    fn check_degrees(&self) -> Result<(), MfError> {
        for (i, row) in self.rows.iter().enumerate() {
            if !row.a.is_zero() {
                let got = row
                    .a
                    .tridegree()
                    .map_err(|_| MfError::RowInhomogeneous { row: i, side: "a" })?;
                let want = DIFFERENTIAL_DEGREE - row.shift;
                if got != want {
                    return Err(MfError::RowDegree { row: i, side: "a", got, want });
                }
            }
            if !row.b.is_zero() {
                let got = row
                    .b
                    .tridegree()
                    .map_err(|_| MfError::RowInhomogeneous { row: i, side: "b" })?;
                let want = row.shift + DIFFERENTIAL_DEGREE;
                if got != want {
                    return Err(MfError::RowDegree { row: i, side: "b", got, want });
                }
            }
        }
        Ok(())
    }

    pub fn registry(&self) -> &Registry {
        self.base.registry()
    }

    /// `sum_i a_i b_i` in normal form against the base.
    pub fn potential(&self) -> Poly {
        let mut acc = Poly::zero(self.registry());
        for row in &self.rows {
            acc += &(&row.a * &row.b);
        }
        self.base.normal_form(&acc)
    }

    fn replaced(&self, edits: Vec<(usize, KoszulRow)>) -> Result<Self, MfError> {
        let before = self.potential();
        let mut rows = self.rows.clone();
        for (i, row) in edits {
            rows[i] = KoszulRow {
                a: self.base.normal_form(&row.a),
                b: self.base.normal_form(&row.b),
                shift: row.shift,
            };
        }
        let next =
            KoszulFactorization { base: self.base.clone(), rows, global_shift: self.global_shift };
        next.check_degrees()?;
        if next.potential() != before {
            return Err(MfError::PotentialChanged);
        }
        Ok(next)
    }

    /// The change of basis that adds `lambda` times row `j`'s generator to row
    /// `i`'s: `b_i += lambda b_j` and, dually, `a_j -= lambda a_i`.
    pub fn row_transform(&self, i: usize, j: usize, lambda: &Poly) -> Result<Self, MfError> {
        if i == j {
            return Err(MfError::BadMove("row_transform needs two distinct rows".into()));
        }
        if !lambda.is_zero() {
            let want = self.rows[i].shift - self.rows[j].shift;
            let got = lambda
                .tridegree()
                .map_err(|_| MfError::BadMove("lambda must be homogeneous".into()))?;
            if got != want {
                return Err(MfError::BadMove(format!(
                    "lambda degree {got} does not match shift difference {want}"
                )));
            }
        }
        let mut ri = self.rows[i].clone();
        let mut rj = self.rows[j].clone();
        ri.b = &ri.b + &(lambda * &rj.b);
        rj.a = &rj.a - &(lambda * &self.rows[i].a);
        self.replaced(vec![(i, ri), (j, rj)])
    }

    /// Rescales one generator: `a_i *= c`, `b_i *= 1/c`.
    pub fn scale_row(&self, i: usize, c: &Rat) -> Result<Self, MfError> {
        if c.is_zero() {
            return Err(MfError::BadMove("scale factor must be nonzero".into()));
        }
        let mut row = self.rows[i].clone();
        row.a = row.a.scale(c);
        row.b = row.b.scale(&(Rat::one() / c));
        self.replaced(vec![(i, row)])
    }

    /// Removes a row of the shape `(0 | var - p)` by solving `var = p`:
    /// substitutes `p` for `var` everywhere and drops both the row and the
    /// variable from the registry.
    ///
    /// Requires `a = 0`, `b` monic linear in `var` with `p` free of `var`,
    /// the base ideal free of `var`, and the potential free of `var`.
    pub fn exclude_variable(&self, row: usize, var: &str) -> Result<Self, MfError> {
        let reg = self.registry().clone();
        let vi = reg
            .idx_of(var)
            .ok_or_else(|| MfError::BadMove(format!("no variable named {var}")))?;
        let r = &self.rows[row];
        if !r.a.is_zero() {
            return Err(MfError::BadMove("exclusion row must have a = 0".into()));
        }
        // Split b = c*var + rest with rest free of var; demand c a nonzero
        // scalar and normalize to var - p.
        let bare = Poly::var_idx(&reg, vi);
        let bare_mono = bare.terms()[0].0.clone();
        let c = r.b.coeff_of(&bare_mono);
        if c.is_zero() {
            return Err(MfError::BadMove(format!("b does not contain the bare variable {var}")));
        }
        let rest = &r.b - &bare.scale(&c);
        if rest.uses_var(vi) {
            return Err(MfError::BadMove(format!("b is not linear in {var}")));
        }
        let p = rest.scale(&(-Rat::one() / &c));
        for g in &self.base.ideal.generators {
            if g.uses_var(vi) {
                return Err(MfError::BadMove(format!("base ideal involves {var}")));
            }
        }
        if self.potential().uses_var(vi) {
            return Err(MfError::BadMove(format!("potential involves {var}")));
        }

        let (small, _) = reg.without(vi);
        let transfer = |q: &Poly| -> Result<Poly, MfError> {
            let subst = q.substitute_var(var, &p);
            subst
                .substitute(&small, &Default::default())
                .map_err(|e| MfError::BadMove(format!("exclusion substitution failed: {e}")))
        };

        let generators: Result<Vec<Poly>, MfError> =
            self.base.ideal.generators.iter().map(&transfer).collect();
        let groebner: Result<Vec<Poly>, MfError> =
            self.base.groebner.iter().map(&transfer).collect();
        // Dropping an unused variable leaves leading terms and reducedness
        // intact, so the carried basis transfers verbatim.
        let base = QuotientPresentation {
            ideal: crate::groebner::IdealPresentation {
                registry: small.clone(),
                generators: generators?,
            },
            groebner: groebner?,
            shift: self.base.shift,
        };
        let mut rows = Vec::with_capacity(self.rows.len() - 1);
        for (k, r) in self.rows.iter().enumerate() {
            if k == row {
                continue;
            }
            rows.push(KoszulRow { a: transfer(&r.a)?, b: transfer(&r.b)?, shift: r.shift });
        }
        KoszulFactorization::new(base, rows, self.global_shift)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "base": self.base.to_json(),
            "rows": self.rows.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            "global_shift": {
                "q": self.global_shift.q, "t": self.global_shift.t, "a": self.global_shift.a,
            },
        })
    }
}

/// The odd-generator degree shared by all rows of the one-column family.
pub fn standard_row_shift() -> TriDegree {
    TriDegree::new(-2, 1, 0)
}

/// Builds the one-column factorization on `n` strands over
/// `Q[x, y, u]/(e_k(y) - e_k(x))`, rows `(y_{w(j)} - x_j | b_j^w)`, with unit
/// shift `q^{-n(n-1)}`.  `twist = None` means the identity.
pub fn build_mn(
    n: u8,
    twist: Option<&Permutation>,
    config: &GbConfig,
) -> Result<KoszulFactorization, MfError> {
    let reg = Registry::xyu(n);
    let ideal = comparison_ideal(&reg, n);
    let base = QuotientPresentation::new(ideal, config)?;
    let id = Permutation::identity(n);
    let w = twist.unwrap_or(&id);
    let mut rows = Vec::with_capacity(n as usize);
    for j in 1..=n {
        let yj = Poly::var_idx(&reg, reg.idx_of_kind(VarKind::Y(w.apply(j))).expect("y present"));
        let xj = Poly::var_idx(&reg, reg.idx_of_kind(VarKind::X(j)).expect("x present"));
        let a = &yj - &xj;
        let b = b_poly_with(&reg, j, YImage::TwistY(w));
        rows.push(KoszulRow { a, b, shift: standard_row_shift() });
    }
    let ell = (n as i32) * (n as i32 - 1) / 2;
    KoszulFactorization::new(base, rows, TriDegree::new(-2 * ell, 0, 0))
}

/// One recorded simplification move.
#[derive(Debug, Clone)]
pub enum MoveKind {
    RowTransform { i: usize, j: usize, lambda: Poly },
    ScaleRow { i: usize, c: Rat },
    ExcludeVariable { row: usize, var: String },
}

impl MoveKind {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            MoveKind::RowTransform { i, j, lambda } => serde_json::json!({
                "kind": "row_transform", "i": i, "j": j, "lambda": lambda.to_json(),
            }),
            MoveKind::ScaleRow { i, c } => serde_json::json!({
                "kind": "scale_row", "i": i, "c": rat_to_string(c),
            }),
            MoveKind::ExcludeVariable { row, var } => serde_json::json!({
                "kind": "exclude_variable", "row": row, "var": var,
            }),
        }
    }
}

/// A move-by-move record: each step stores the move and the state after it.
#[derive(Debug, Clone)]
pub struct SimplifyTrace {
    pub initial: KoszulFactorization,
    pub steps: Vec<(MoveKind, KoszulFactorization)>,
}

impl SimplifyTrace {
    pub fn final_state(&self) -> &KoszulFactorization {
        self.steps.last().map(|(_, k)| k).unwrap_or(&self.initial)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "initial": self.initial.to_json(),
            "steps": self.steps.iter().map(|(m, k)| serde_json::json!({
                "move": m.to_json(),
                "state": k.to_json(),
            })).collect::<Vec<_>>(),
            "final": self.final_state().to_json(),
        })
    }

    pub fn apply(&mut self, mv: MoveKind, state: KoszulFactorization) {
        self.steps.push((mv, state));
    }
}

/// Runs the standard simplification of `M_n`: fold every `b_j` down by the
/// first row (whose left entry then dies in the base ring) and excludes `u_1`
/// through the resulting `(0 | u_1)` row.
pub fn simplify_mn(
    n: u8,
    twist: Option<&Permutation>,
    config: &GbConfig,
) -> Result<SimplifyTrace, MfError> {
    let k0 = build_mn(n, twist, config)?;
    let mut trace = SimplifyTrace { initial: k0.clone(), steps: Vec::new() };
    let mut k = k0;
    for row in 1..n as usize {
        let lambda = Poly::constant(k.registry(), rat(-1));
        let next = k.row_transform(row, 0, &lambda)?;
        trace.apply(MoveKind::RowTransform { i: row, j: 0, lambda }, next.clone());
        k = next;
    }
    let next = k.exclude_variable(0, "u1")?;
    trace.apply(MoveKind::ExcludeVariable { row: 0, var: "u1".into() }, next);
    Ok(trace)
}

/// The dg-module presentation of a Koszul factorization: an exterior algebra
/// on odd generators `theta_1..theta_n` over the base, with
/// `d(theta_k) = b_k` extended as a derivation, plus the unit relation
/// `d(1) = sum_j a_j theta_j` twisted by the parity sign.
#[derive(Debug, Clone)]
pub struct DgModulePresentation {
    pub base: QuotientPresentation,
    /// Contraction images `b_k` (one per odd generator).
    pub contract: Vec<Poly>,
    /// Extension coefficients `a_j` of the unit differential.
    pub extend: Vec<Poly>,
    /// Tri-degree of each odd generator.
    pub theta_degrees: Vec<TriDegree>,
    pub unit_shift: TriDegree,
}

/// Subsets of the odd generators are bitmasks (bit `k` = generator `k`).
pub type ThetaSet = u32;

pub fn theta_set_degree(dg: &DgModulePresentation, set: ThetaSet) -> TriDegree {
    let mut d = dg.unit_shift;
    for k in 0..dg.theta_degrees.len() {
        if set & (1 << k) != 0 {
            d = d + dg.theta_degrees[k];
        }
    }
    d
}

pub fn to_dg_module(k: &KoszulFactorization) -> DgModulePresentation {
    DgModulePresentation {
        base: k.base.clone(),
        contract: k.rows.iter().map(|r| r.b.clone()).collect(),
        extend: k.rows.iter().map(|r| r.a.clone()).collect(),
        theta_degrees: k.rows.iter().map(|r| r.shift).collect(),
        unit_shift: k.global_shift,
    }
}

/// Sign of removing generator `k` from `set`: parity of the generators below
/// it (the generator list is written in ascending order).
fn removal_sign(set: ThetaSet, k: usize) -> i32 {
    let below = (set & ((1u32 << k) - 1)).count_ones();
    if below % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of sorting `theta_set ∧ theta_j` into ascending order: parity of the
/// generators in `set` above `j`.
fn insertion_sign(set: ThetaSet, j: usize) -> i32 {
    let above = (set >> (j + 1)).count_ones();
    if above % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The differential of `theta_set * 1`, as reduced coefficients per output
/// subset: contraction plus the parity-twisted unit extension.
pub fn dg_differential(dg: &DgModulePresentation, set: ThetaSet) -> Vec<(ThetaSet, Poly)> {
    let n = dg.contract.len();
    let mut out: Vec<(ThetaSet, Poly)> = Vec::new();
    for k in 0..n {
        if set & (1 << k) != 0 {
            let coeff = if removal_sign(set, k) == 1 {
                dg.contract[k].clone()
            } else {
                -&dg.contract[k]
            };
            out.push((set & !(1 << k), dg.base.normal_form(&coeff)));
        }
    }
    let parity: i32 = if set.count_ones() % 2 == 0 { 1 } else { -1 };
    for j in 0..n {
        if set & (1 << j) == 0 {
            let s = parity * insertion_sign(set, j);
            let coeff = if s == 1 { dg.extend[j].clone() } else { -&dg.extend[j] };
            out.push((set | (1 << j), dg.base.normal_form(&coeff)));
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

/// All nonzero coefficients of `d(d(theta_set))` for every subset; empty iff
/// the presentation squares to zero over the base.
pub fn dg_square_residual(dg: &DgModulePresentation) -> Vec<(ThetaSet, ThetaSet, Poly)> {
    let n = dg.contract.len();
    let mut residuals = Vec::new();
    for set in 0u32..(1 << n) {
        let mut acc: std::collections::HashMap<ThetaSet, Poly> = Default::default();
        for (mid, c1) in dg_differential(dg, set) {
            for (end, c2) in dg_differential(dg, mid) {
                let prod = &c1 * &c2;
                acc.entry(end)
                    .and_modify(|p| *p += &prod)
                    .or_insert(prod);
            }
        }
        for (end, p) in acc {
            let r = dg.base.normal_form(&p);
            if !r.is_zero() {
                residuals.push((set, end, r));
            }
        }
    }
    residuals.sort_by_key(|&(s, e, _)| (s, e));
    residuals
}

/// Residual of the comparison map from the `(n-1)`-strand module into the
/// `n`-strand one that multiplies the unit by `g = prod_{i<n} (y_i - x_n)`:
/// computes `d_n(g theta_set) - g d_{n-1}(theta_set)` for every subset of the
/// first `n-1` generators, reduced over the `n`-strand base.
pub fn phi_chain_map_residual(
    n: u8,
    config: &GbConfig,
) -> Result<Vec<(ThetaSet, ThetaSet, Poly)>, MfError> {
    let reg = Registry::xyu(n);
    let mut g = Poly::one(&reg);
    for i in 1..n {
        let yi = Poly::var(&reg, &format!("y{i}"));
        let xn = Poly::var(&reg, &format!("x{n}"));
        g = &g * &(&yi - &xn);
    }
    phi_chain_map_residual_with_multiplier(n, &g, config)
}

/// Same as [`phi_chain_map_residual`] with an explicit unit multiplier, so
/// callers can confirm that wrong multipliers fail.
pub fn phi_chain_map_residual_with_multiplier(
    n: u8,
    g: &Poly,
    config: &GbConfig,
) -> Result<Vec<(ThetaSet, ThetaSet, Poly)>, MfError> {
    assert!(n >= 2);
    let big = to_dg_module(&build_mn(n, None, config)?);
    let reg = big.base.registry().clone();
    // The (n-1)-strand differential, expressed in the n-strand ring: the
    // entries only mention the smaller alphabets, so they transfer verbatim.
    let small_k = build_mn(n - 1, None, config)?;
    let embed = |p: &Poly| -> Poly {
        p.substitute(&reg, &Default::default()).expect("alphabets embed")
    };
    let small = DgModulePresentation {
        base: big.base.clone(),
        contract: small_k.rows.iter().map(|r| embed(&r.b)).collect(),
        extend: small_k.rows.iter().map(|r| embed(&r.a)).collect(),
        theta_degrees: small_k.rows.iter().map(|r| r.shift).collect(),
        unit_shift: small_k.global_shift,
    };

    let mut residuals = Vec::new();
    for set in 0u32..(1 << (n - 1)) {
        let mut acc: std::collections::HashMap<ThetaSet, Poly> = Default::default();
        // d_n applied to g * theta_set ...
        for (out, c) in dg_differential(&big, set) {
            let scaled = &c * g;
            acc.entry(out).and_modify(|p| *p += &scaled).or_insert(scaled);
        }
        // ... minus g times d_{n-1}(theta_set).
        for (out, c) in dg_differential(&small, set) {
            let scaled = &c * g;
            acc.entry(out)
                .and_modify(|p| *p -= &scaled)
                .or_insert(-&scaled);
        }
        for (end, p) in acc {
            let r = big.base.normal_form(&p);
            if !r.is_zero() {
                residuals.push((set, end, r));
            }
        }
    }
    residuals.sort_by_key(|&(s, e, _)| (s, e));
    Ok(residuals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat_frac;

    fn cfg() -> GbConfig {
        GbConfig::default()
    }

    fn pij(reg: &Registry, i: u8, j: u8) -> Poly {
        &Poly::var(reg, &format!("y{i}")) - &Poly::var(reg, &format!("x{j}"))
    }

    #[test]
    fn build_mn_invariants() {
        for n in 2..=4u8 {
            let k = build_mn(n, None, &cfg()).unwrap();
            assert_eq!(k.rows.len(), n as usize);
            assert!(k.potential().is_zero(), "n={n}");
            assert_eq!(k.global_shift, TriDegree::new(-(n as i32) * (n as i32 - 1), 0, 0));
            for row in &k.rows {
                assert_eq!(row.shift, standard_row_shift());
            }
        }
    }

    #[test]
    fn simplify_n2_reaches_the_pinned_endpoint() {
        let trace = simplify_mn(2, None, &cfg()).unwrap();
        assert_eq!(trace.steps.len(), 2);
        // After the fold, the first row's left entry is already zero in the
        // base ring and its right entry is exactly u1.
        let (_, mid) = &trace.steps[0];
        assert!(mid.rows[0].a.is_zero());
        assert_eq!(mid.rows[0].b, Poly::var(mid.registry(), "u1"));
        // Endpoint: a single row (y2 - x2 | (y1 - x2) u2) without u1.
        let k = trace.final_state();
        let reg = k.registry();
        assert!(reg.idx_of("u1").is_none());
        assert_eq!(k.rows.len(), 1);
        assert_eq!(k.rows[0].a, pij(reg, 2, 2));
        assert_eq!(k.rows[0].b, &pij(reg, 1, 2) * &Poly::var(reg, "u2"));
        assert!(k.potential().is_zero());
    }

    #[test]
    fn simplify_n3_reaches_the_pinned_endpoint() {
        let trace = simplify_mn(3, None, &cfg()).unwrap();
        assert_eq!(trace.steps.len(), 3);
        let k = trace.final_state();
        let reg = k.registry();
        assert_eq!(k.rows.len(), 2);
        assert_eq!(k.rows[0].a, pij(reg, 2, 2));
        assert_eq!(k.rows[0].b, &pij(reg, 1, 2) * &Poly::var(reg, "u2"));
        assert_eq!(k.rows[1].a, pij(reg, 3, 3));
        let u2 = Poly::var(reg, "u2");
        let u3 = Poly::var(reg, "u3");
        let want = &(&(&pij(reg, 1, 2) + &pij(reg, 2, 3)) * &u2)
            + &(&(&pij(reg, 1, 3) * &pij(reg, 2, 3)) * &u3);
        assert_eq!(k.rows[1].b, want);
        // Every intermediate state keeps the potential at zero.
        for (_, state) in &trace.steps {
            assert!(state.potential().is_zero());
        }
    }

    #[test]
    fn row_transform_validates_lambda_degree() {
        let k = build_mn(2, None, &cfg()).unwrap();
        let bad = Poly::var(k.registry(), "x1");
        let err = k.row_transform(1, 0, &bad).unwrap_err();
        assert!(matches!(err, MfError::BadMove(_)));
        let err = k.row_transform(1, 1, &Poly::one(k.registry())).unwrap_err();
        assert!(matches!(err, MfError::BadMove(_)));
    }

    #[test]
    fn scale_row_roundtrips() {
        let k = build_mn(2, None, &cfg()).unwrap();
        let s = k.scale_row(0, &rat_frac(3, 7)).unwrap();
        assert_ne!(s.rows[0], k.rows[0]);
        assert!(s.potential().is_zero());
        let back = s.scale_row(0, &rat_frac(7, 3)).unwrap();
        assert_eq!(back, k);
        assert!(matches!(k.scale_row(0, &rat(0)), Err(MfError::BadMove(_))));
    }

    #[test]
    fn exclude_variable_guards() {
        let k = build_mn(2, None, &cfg()).unwrap();
        // Row 0 still has a nonzero left entry, so exclusion must refuse.
        let err = k.exclude_variable(0, "u1").unwrap_err();
        assert!(matches!(err, MfError::BadMove(_)));
        // After the fold it goes through.
        let folded = k
            .row_transform(1, 0, &Poly::constant(k.registry(), rat(-1)))
            .unwrap();
        assert!(folded.exclude_variable(0, "u1").is_ok());
        // Excluding a variable the row does not expose must refuse.
        let err = folded.exclude_variable(0, "u2").unwrap_err();
        assert!(matches!(err, MfError::BadMove(_)));
    }

    #[test]
    fn dg_square_is_zero_for_small_ranks_and_twists() {
        for n in 2..=3u8 {
            let dg = to_dg_module(&build_mn(n, None, &cfg()).unwrap());
            assert!(dg_square_residual(&dg).is_empty(), "n={n} untwisted");
        }
        let w = Permutation::parse_cycles("(1 2 3)", 3).unwrap();
        let dg = to_dg_module(&build_mn(3, Some(&w), &cfg()).unwrap());
        assert!(dg_square_residual(&dg).is_empty());
        let w = Permutation::parse_cycles("(1 3)", 3).unwrap();
        let dg = to_dg_module(&build_mn(3, Some(&w), &cfg()).unwrap());
        assert!(dg_square_residual(&dg).is_empty());
    }

    #[test]
    fn dg_square_detects_corrupted_entries() {
        let k = build_mn(3, None, &cfg()).unwrap();
        let mut rows = k.rows.clone();
        // Tamper with one right-hand entry by a same-degree perturbation.
        let reg = k.registry();
        let tweak = &Poly::var(reg, "u2") * &pij(reg, 1, 3);
        rows[2] = KoszulRow { a: rows[2].a.clone(), b: &rows[2].b + &tweak, shift: rows[2].shift };
        let bad = KoszulFactorization::new(k.base.clone(), rows, k.global_shift).unwrap();
        let dg = to_dg_module(&bad);
        assert!(!dg_square_residual(&dg).is_empty());
    }

    #[test]
    fn phi_residual_vanishes_and_detects_wrong_multiplier() {
        for n in 2..=3u8 {
            let res = phi_chain_map_residual(n, &cfg()).unwrap();
            assert!(res.is_empty(), "n={n}");
        }
        let reg = Registry::xyu(2);
        let res =
            phi_chain_map_residual_with_multiplier(2, &Poly::one(&reg), &cfg()).unwrap();
        assert!(!res.is_empty());
    }

    #[test]
    fn twisted_build_keeps_potential_zero() {
        let w = Permutation::parse_cycles("(1 2)", 2).unwrap();
        let k = build_mn(2, Some(&w), &cfg()).unwrap();
        assert!(k.potential().is_zero());
        // Entries are stored reduced against the base, so compare in kind.
        assert_eq!(k.rows[0].a, k.base.normal_form(&pij(k.registry(), 2, 1)));
        assert!(!k.rows[0].a.is_zero());
    }
}
