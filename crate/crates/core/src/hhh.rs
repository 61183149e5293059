//! Stable triply-graded homology of permutation twists: specialization of the
//! one-column factorization to a single alphabet, block-by-block row
//! simplification, closed quotient-ring presentations with their degree
//! shifts and exterior factors, closed Poincaré series, and the flag-matrix
//! model ring with its isomorphism certificate.

use once_cell::sync::OnceCell;
use thiserror::Error;

pub use crate::perm::{
    canonical_cycle_form, cycle_types, permutation_of_cycle_type, PermError, Permutation,
};

use crate::groebner::{
    hilbert_function, GbConfig, GroebnerError, IdealPresentation, QuotientPresentation,
};
use crate::mf::{KoszulFactorization, MfError, MoveKind, SimplifyTrace};
use crate::poly::{rat, Poly, Registry, TriDegree, VarDecl, VarKind};
use crate::schubert_aij::{b_poly_with, vkk_expansion, YImage};
use crate::series::SeriesError;
use crate::table::{DimensionTable, Window};

#[derive(Debug, Error)]
pub enum HhhError {
    #[error("permutation is not in consecutive-block form")]
    NotSpecialForm,
    #[error("unexpected factorization shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Mf(#[from] MfError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Collapses the two alphabets: sends every `y_i` to `x_i`, landing in
/// `Q[x, u]` with a free base and no unit shift.  The twist recorded in the
/// entries survives as `x_{w(j)} - x_j` on the left of row `j`.
pub fn hh0_specialize(k: &KoszulFactorization) -> Result<KoszulFactorization, HhhError> {
    let reg = k.registry();
    let n = reg
        .decls()
        .iter()
        .filter_map(|d| match d.kind {
            VarKind::X(i) => Some(i),
            _ => None,
        })
        .max()
        .ok_or_else(|| HhhError::Shape("no x variables".into()))?;
    let target = Registry::xu(n);
    let mut map = std::collections::HashMap::new();
    for i in 1..=n {
        map.insert(format!("y{i}"), Poly::var(&target, &format!("x{i}")));
    }
    let transfer = |p: &Poly| -> Result<Poly, HhhError> {
        p.substitute(&target, &map)
            .map_err(|e| HhhError::Shape(format!("specialization failed: {e}")))
    };
    for g in &k.base.ideal.generators {
        if !transfer(g)?.is_zero() {
            return Err(HhhError::Shape("base ideal does not die on the diagonal".into()));
        }
    }
    let rows: Result<Vec<_>, HhhError> = k
        .rows
        .iter()
        .map(|r| {
            Ok(crate::mf::KoszulRow { a: transfer(&r.a)?, b: transfer(&r.b)?, shift: r.shift })
        })
        .collect();
    let out = KoszulFactorization::new(
        QuotientPresentation::free(target),
        rows?,
        TriDegree::ZERO,
    )?;
    if !out.potential().is_zero() {
        return Err(HhhError::Shape("specialized potential is nonzero".into()));
    }
    Ok(out)
}

/// Simplifies the specialized factorization of a consecutive-block
/// permutation: inside each block every right entry equals the block end's,
/// so folding onto the last row leaves `(x_{i+1} - x_i | 0)` rows, which a
/// sign flip turns into `(alpha_i | 0)`, plus one `(0 | b_end)` row per block.
pub fn block_simplify(
    k: &KoszulFactorization,
    w: &Permutation,
) -> Result<SimplifyTrace, HhhError> {
    let ends = w.special_block_ends().ok_or(HhhError::NotSpecialForm)?;
    let mut trace = SimplifyTrace { initial: k.clone(), steps: Vec::new() };
    let mut cur = k.clone();
    let mut lo = 1u8;
    for &hi in &ends {
        for r in lo..hi {
            let lambda = Poly::constant(cur.registry(), rat(-1));
            let next = cur.row_transform((r - 1) as usize, (hi - 1) as usize, &lambda)?;
            trace.apply(
                MoveKind::RowTransform { i: (r - 1) as usize, j: (hi - 1) as usize, lambda },
                next.clone(),
            );
            cur = next;
        }
        for r in lo..hi {
            let next = cur.scale_row((r - 1) as usize, &rat(-1))?;
            trace.apply(MoveKind::ScaleRow { i: (r - 1) as usize, c: rat(-1) }, next.clone());
            cur = next;
        }
        lo = hi + 1;
    }
    // Postcondition: interior rows are (alpha_i | 0), block ends are (0 | b).
    let reg = cur.registry().clone();
    let mut lo = 1u8;
    for &hi in &ends {
        for r in lo..hi {
            let alpha = &Poly::var(&reg, &format!("x{r}"))
                - &Poly::var(&reg, &format!("x{}", r + 1));
            let row = &cur.rows[(r - 1) as usize];
            if row.a != alpha || !row.b.is_zero() {
                return Err(HhhError::Shape(format!("row {r} did not reduce to (alpha | 0)")));
            }
        }
        let row = &cur.rows[(hi - 1) as usize];
        if !row.a.is_zero() {
            return Err(HhhError::Shape(format!("block end {hi} kept a left entry")));
        }
        lo = hi + 1;
    }
    Ok(trace)
}

/// A closed presentation of the stable homology of one permutation twist:
/// a quotient ring, a unit degree shift, and an exterior factor.
#[derive(Debug, Clone)]
pub struct StableHomologyPresentation {
    pub n: u8,
    pub cycle_type: Vec<u8>,
    /// Quotient of `Q[x-representatives, u_1..u_n]`.
    pub ring: QuotientPresentation,
    /// `(q^{-2} t)^{n - r}` where `r` is the number of cycles.
    pub unit_shift: TriDegree,
    /// Degrees of the odd exterior generators `xi_1..xi_n`.
    pub exterior_degrees: Vec<TriDegree>,
}

/// The identified one-alphabet registry of `w`: one `x` per cycle (named by
/// the cycle's least element) plus all `u`'s, with the index map `i -> rep`.
fn identified_registry(w: &Permutation) -> (Registry, Vec<u8>) {
    let n = w.n();
    let mut rep = vec![0u8; (n + 1) as usize];
    let mut decls = Vec::new();
    for cyc in w.cycles() {
        let m = *cyc.iter().min().expect("nonempty cycle");
        for &i in &cyc {
            rep[i as usize] = m;
        }
        decls.push(VarDecl::x(m));
    }
    for k in 1..=n {
        decls.push(VarDecl::u(k));
    }
    (Registry::new(decls), rep)
}

fn identify(p: &Poly, target: &Registry, rep: &[u8], n: u8) -> Poly {
    let mut map = std::collections::HashMap::new();
    for i in 1..=n {
        map.insert(
            format!("x{i}"),
            Poly::var(target, &format!("x{}", rep[i as usize])),
        );
    }
    p.substitute(target, &map).expect("identification substitution")
}

/// Builds the quotient presentation of the stable homology of the twist `w`.
///
/// For consecutive-block permutations the generators are the block-end right
/// entries `b_{m_k}` with `x` identified along each cycle; for a general
/// permutation they are the diagonal entries `sum_{i<=j} u_i a_ij(x,x)` for
/// all `j`, identified the same way.  The two presentations agree on block
/// permutations (same identified generators up to redundancy).
pub fn stable_homology_presentation(
    w: &Permutation,
    config: &GbConfig,
) -> Result<StableHomologyPresentation, HhhError> {
    let n = w.n();
    let full = Registry::xu(n);
    let (target, rep) = identified_registry(w);
    let r = w.num_cycles();
    let columns: Vec<u8> = match w.special_block_ends() {
        Some(ends) => ends,
        None => (1..=n).collect(),
    };
    let gens: Vec<Poly> = columns
        .iter()
        .map(|&j| identify(&b_poly_with(&full, j, YImage::SpecializeX(w)), &target, &rep, n))
        .filter(|g| !g.is_zero())
        .collect();
    let ideal = IdealPresentation::new(target, gens)?;
    let ring = QuotientPresentation::new(ideal, config)?;
    let d = (n - r) as i32;
    Ok(StableHomologyPresentation {
        n,
        cycle_type: w.cycle_type(),
        ring,
        unit_shift: TriDegree::new(-2 * d, d, 0),
        exterior_degrees: (1..=n).map(|i| TriDegree::new(-2 * (i as i32), 0, 1)).collect(),
    })
}

/// The two literal ideals of the main comparison, over the full one-alphabet
/// ring `Q[x_1..x_n, u_1..u_n]` with no identification:
/// the block-form ideal `(alpha_i for interior i) + (b_{m_k})` and the
/// general-form ideal `(x_i - x_{w(i)}) + (diagonal columns)`.
pub fn literal_ideal_pair(
    w: &Permutation,
) -> Result<(IdealPresentation, IdealPresentation), HhhError> {
    let n = w.n();
    let reg = Registry::xu(n);
    let ends = w.special_block_ends().ok_or(HhhError::NotSpecialForm)?;
    let mut block_gens: Vec<Poly> = Vec::new();
    let mut lo = 1u8;
    for &hi in &ends {
        for i in lo..hi {
            let alpha = &Poly::var(&reg, &format!("x{i}"))
                - &Poly::var(&reg, &format!("x{}", i + 1));
            block_gens.push(alpha);
        }
        block_gens.push(b_poly_with(&reg, hi, YImage::SpecializeX(w)));
        lo = hi + 1;
    }
    let mut diag_gens: Vec<Poly> = Vec::new();
    for i in 1..=n {
        if w.apply(i) != i {
            let d = &Poly::var(&reg, &format!("x{i}"))
                - &Poly::var(&reg, &format!("x{}", w.apply(i)));
            diag_gens.push(d);
        }
    }
    for j in 1..=n {
        diag_gens.push(b_poly_with(&reg, j, YImage::Diagonal));
    }
    Ok((
        IdealPresentation::new(reg.clone(), block_gens)?,
        IdealPresentation::new(reg, diag_gens)?,
    ))
}

/// The diagonal matrix `X` and strictly upper triangular `V` over the
/// flag-model registry, together with the entries of `[X + S, V]` (with `S`
/// the regular nilpotent lower shift), which present the model ring.
#[derive(Debug, Clone)]
pub struct FormalMatrices {
    pub n: u8,
    pub registry: Registry,
}

impl FormalMatrices {
    pub fn new(n: u8) -> FormalMatrices {
        FormalMatrices { n, registry: Registry::xv(n) }
    }

    pub fn x_entry(&self, i: u8, j: u8) -> Poly {
        if i == j {
            Poly::var(&self.registry, &format!("x{i}"))
        } else {
            Poly::zero(&self.registry)
        }
    }

    pub fn v_entry(&self, i: u8, j: u8) -> Poly {
        if i < j {
            Poly::var(&self.registry, &format!("v{i}{j}"))
        } else {
            Poly::zero(&self.registry)
        }
    }

    /// Relation at strictly upper position `(i, j)`:
    /// `(x_i - x_j) v_ij + v_{i+1,j} - v_{i,j-1}` with out-of-triangle
    /// entries read as zero.
    pub fn relation(&self, i: u8, j: u8) -> Poly {
        assert!(i < j && j <= self.n);
        let xi = Poly::var(&self.registry, &format!("x{i}"));
        let xj = Poly::var(&self.registry, &format!("x{j}"));
        let mut rel = &(&xi - &xj) * &self.v_entry(i, j);
        if i + 1 < j {
            rel = &rel + &self.v_entry(i + 1, j);
        }
        if i < j - 1 {
            rel = &rel - &self.v_entry(i, j - 1);
        }
        rel
    }

    pub fn relations(&self) -> Vec<Poly> {
        let mut out = Vec::new();
        for i in 1..=self.n {
            for j in (i + 1)..=self.n {
                out.push(self.relation(i, j));
            }
        }
        out
    }
}

/// The flag-matrix model ring: `Q[x, v]` modulo the commutator relations.
pub fn e_ring(n: u8, config: &GbConfig) -> Result<QuotientPresentation, HhhError> {
    let fm = FormalMatrices::new(n);
    let ideal = IdealPresentation::new(fm.registry.clone(), fm.relations())?;
    Ok(QuotientPresentation::new(ideal, config)?)
}

/// The diagonal-column generators `g_j = sum_{i<=j} u_i a_ij(x,x)` over
/// `Q[x, u]` (the identity-twist presentation of the stable homology ring).
pub fn diagonal_column_ideal(n: u8) -> IdealPresentation {
    let reg = Registry::xu(n);
    let gens = (1..=n).map(|j| b_poly_with(&reg, j, YImage::Diagonal)).collect();
    IdealPresentation::new(reg, gens).expect("diagonal columns are homogeneous")
}

/// Certificate that the flag-matrix model ring and the diagonal-column
/// quotient agree: generator-by-generator membership in both directions plus
/// a windowed dimension comparison.
#[derive(Debug, Clone)]
pub struct EIsoReport {
    pub n: u8,
    pub window: Window,
    /// Images of the model relations land in the diagonal-column ideal.
    pub forward_ok: Vec<bool>,
    /// Images of the diagonal columns land in the model ideal.
    pub backward_ok: Vec<bool>,
    pub hilbert_mismatches: Vec<(TriDegree, u64, u64)>,
}

impl EIsoReport {
    pub fn passed(&self) -> bool {
        self.forward_ok.iter().all(|&b| b)
            && self.backward_ok.iter().all(|&b| b)
            && self.hilbert_mismatches.is_empty()
    }
}

/// Images of every `v_ij` (diagonal included) in `Q[x, u]` under the
/// elimination `v_1k -> (-1)^{k-1} u_k`,
/// `v_ij = v_{i-1,j-1} - (x_{i-1} - x_j) v_{i-1,j}`.
fn v_images(target: &Registry, n: u8) -> Vec<Vec<Poly>> {
    let x = |i: u8| Poly::var(target, &format!("x{i}"));
    let mut rows: Vec<Vec<Poly>> = Vec::with_capacity(n as usize);
    let first: Vec<Poly> = (1..=n)
        .map(|k| {
            let u = Poly::var(target, &format!("u{k}"));
            if k % 2 == 0 {
                -&u
            } else {
                u
            }
        })
        .collect();
    rows.push(first);
    for i in 2..=n {
        // rows[i-1][j-i] = image of v_{i,j} for j in i..=n.
        let mut row = Vec::with_capacity((n - i + 1) as usize);
        for j in i..=n {
            let diag = &rows[(i - 2) as usize][(j - 1 - (i - 1)) as usize];
            let right = &rows[(i - 2) as usize][(j - (i - 1)) as usize];
            row.push(diag - &(&(&x(i - 1) - &x(j)) * right));
        }
        rows.push(row);
    }
    rows
}

pub fn verify_e_isomorphism(
    n: u8,
    window: &Window,
    config: &GbConfig,
) -> Result<EIsoReport, HhhError> {
    let model = e_ring(n, config)?;
    let diag_ideal = diagonal_column_ideal(n);
    let diag = QuotientPresentation::new(diag_ideal, config)?;
    let xu = diag.registry().clone();

    let vimg = v_images(&xu, n);
    let v_at = |i: u8, j: u8| -> &Poly { &vimg[(i - 1) as usize][(j - i) as usize] };
    // Degree preservation: v_ij and its image share a tri-degree.
    for i in 1..=n {
        for j in (i + 1)..=n {
            let want = VarKind::V(i, j).default_degree().expect("v degree");
            assert_eq!(v_at(i, j).tridegree().ok(), Some(want), "image degree of v{i}{j}");
        }
    }

    // Forward: push each model relation through the elimination.
    let fm = FormalMatrices::new(n);
    let mut forward_ok = Vec::new();
    for i in 1..=n {
        for j in (i + 1)..=n {
            let xi = Poly::var(&xu, &format!("x{i}"));
            let xj = Poly::var(&xu, &format!("x{j}"));
            let mut img = &(&xi - &xj) * v_at(i, j);
            if i + 1 < j {
                img = &img + v_at(i + 1, j);
            }
            if i < j - 1 {
                img = &img - v_at(i, j - 1);
            }
            forward_ok.push(diag.contains(&img));
        }
    }

    // Backward: each diagonal column maps under `u_i -> (-1)^{i-1} v_1i`,
    // `u_1 -> 0`, to the strictly-upper part of the diagonal-entry expansion
    // `sum_{j>=1} c_j v_{1,j+1}`, whose membership in the relation ideal we
    // test directly.
    let mut backward_ok = Vec::new();
    for k in 1..=n {
        let coeffs = vkk_expansion(&fm.registry, k);
        let mut img = Poly::zero(&fm.registry);
        for (jj, c) in coeffs.iter().enumerate().skip(1) {
            let v1 = Poly::var(&fm.registry, &format!("v1{}", jj + 1));
            img = &img + &(c * &v1);
        }
        backward_ok.push(model.contains(&img));
    }

    let hf_model = hilbert_function(&model, window)?;
    let hf_diag = hilbert_function(&diag, window)?;
    let hilbert_mismatches = hf_model.mismatches(&hf_diag);
    Ok(EIsoReport { n, window: *window, forward_ok, backward_ok, hilbert_mismatches })
}

/// A closed Poincaré series
/// `prefactor * prod numerator (1 - c m) / prod denominator (1 - m)`.
#[derive(Debug, Clone)]
pub struct PoincareSeries {
    pub n: u8,
    pub cycle_type: Vec<u8>,
    pub prefactor: TriDegree,
    /// Factors `1 - c * m` as pairs `(m, c)`.
    pub numerator_factors: Vec<(TriDegree, i64)>,
    /// Factors `1 / (1 - m)`.
    pub denominator_factors: Vec<TriDegree>,
    cache: OnceCell<(Window, DimensionTable)>,
}

impl PoincareSeries {
    pub fn expand(&self, window: &Window) -> Result<DimensionTable, SeriesError> {
        if let Some((w, t)) = self.cache.get() {
            if w == window {
                return Ok(t.clone());
            }
        }
        let factors: Vec<crate::series::Factor> = self
            .numerator_factors
            .iter()
            .map(|&(m, c)| crate::series::Factor::Poly { m, c })
            .chain(
                self.denominator_factors
                    .iter()
                    .map(|&m| crate::series::Factor::Geometric { m }),
            )
            .collect();
        let s = crate::series::expand(self.prefactor, &factors, window)?;
        let t = s.into_dimension_table(window)?;
        let _ = self.cache.set((*window, t.clone()));
        Ok(t)
    }
}

/// The closed series for a cycle type of `n`: with `r` parts,
/// `(q^{-2} t)^{n-r} (1 - t^2 q^{-2})^{r-1} prod_i (1 + a q^{-2i})
///  / ((1 - q^2)^r prod_{j=2}^n (1 - t^2 q^{-2j}))`.
pub fn poincare_series(n: u8, cycle_type: &[u8]) -> PoincareSeries {
    let r = cycle_type.len() as i32;
    let d = n as i32 - r;
    let mut numerator_factors = Vec::new();
    for _ in 0..(r - 1) {
        numerator_factors.push((TriDegree::new(-2, 2, 0), 1));
    }
    for i in 1..=n as i32 {
        numerator_factors.push((TriDegree::new(-2 * i, 0, 1), -1));
    }
    let mut denominator_factors = Vec::new();
    for _ in 0..r {
        denominator_factors.push(TriDegree::new(2, 0, 0));
    }
    for j in 2..=n as i32 {
        denominator_factors.push(TriDegree::new(-2 * j, 2, 0));
    }
    let mut t: Vec<u8> = cycle_type.to_vec();
    t.sort_unstable_by(|a, b| b.cmp(a));
    PoincareSeries {
        n,
        cycle_type: t,
        prefactor: TriDegree::new(-2 * d, d, 0),
        numerator_factors,
        denominator_factors,
        cache: OnceCell::new(),
    }
}

/// The dimension table of an exterior algebra on generators of the given
/// degrees: one unit per squarefree product.
pub fn exterior_factor_table(degrees: &[TriDegree]) -> DimensionTable {
    let mut ext = DimensionTable::new();
    for set in 0u32..(1 << degrees.len()) {
        let mut d = TriDegree::ZERO;
        for (i, &xd) in degrees.iter().enumerate() {
            if set & (1 << i) != 0 {
                d = d + xd;
            }
        }
        ext.add(d, 1);
    }
    ext
}

/// The full three-graded dimension table of a presentation on a window:
/// ring dimensions, convolved with the exterior factor, shifted by the unit.
pub fn full_hhh(
    pres: &StableHomologyPresentation,
    window: &Window,
) -> Result<DimensionTable, HhhError> {
    let max_drop: i32 = pres.exterior_degrees.iter().map(|d| (-d.q).max(0)).sum();
    let ring_window = Window::bigraded(
        window.q_min - pres.unit_shift.q,
        window.q_max - pres.unit_shift.q + max_drop,
        (window.t_max - pres.unit_shift.t).max(0),
    );
    let ring_hf = hilbert_function(&pres.ring, &ring_window)?;
    let ext = exterior_factor_table(&pres.exterior_degrees);
    Ok(ring_hf.convolved(&ext).shifted(pres.unit_shift).restricted(window))
}
