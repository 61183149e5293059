//! Symmetric-function combinatorics: elementary and complete symmetric
//! polynomials on chosen variable subsets, divided-difference operators, the
//! iterated Demazure operator used as a trace, and the induced pairing.

use crate::poly::{mono_cmp, mono_div, Mono, Poly, Registry, VarKind};

/// Which family of symmetric polynomials to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymFamily {
    /// `e_k`: sum of squarefree degree-`k` monomials.
    Elementary,
    /// `h_k`: sum of all degree-`k` monomials.
    Complete,
}

/// A request for `e_k` or `h_k` on an explicit list of registry variables.
#[derive(Debug, Clone)]
pub struct SymFunSpec {
    pub family: SymFamily,
    pub k: i32,
    /// Registry indices of the alphabet, e.g. the `x`-block or a tail of it.
    pub vars: Vec<usize>,
}

/// Builds `e_k` or `h_k` on the requested alphabet by the one-variable
/// extension recursions
/// `e_k(.., z) = e_k(..) + z e_{k-1}(..)` and `h_k(.., z) = h_k(..) + z h_{k-1}(.., z)`,
/// which are the coefficient recursions of the generating functions
/// `prod (1 + s x_i)` and `1 / prod (1 - s x_i)`.
pub fn sym_poly(reg: &Registry, spec: &SymFunSpec) -> Poly {
    if spec.k < 0 {
        return Poly::zero(reg);
    }
    let k = spec.k as usize;
    if spec.family == SymFamily::Elementary && k > spec.vars.len() {
        return Poly::zero(reg);
    }
    // table[j] holds e_j (resp. h_j) of the alphabet scanned so far.
    let mut table: Vec<Poly> = Vec::with_capacity(k + 1);
    table.push(Poly::one(reg));
    for _ in 0..k {
        table.push(Poly::zero(reg));
    }
    for &vi in &spec.vars {
        let z = Poly::var_idx(reg, vi);
        match spec.family {
            SymFamily::Elementary => {
                for j in (1..=k).rev() {
                    let add = &z * &table[j - 1];
                    table[j] = &table[j] + &add;
                }
            }
            SymFamily::Complete => {
                for j in 1..=k {
                    let add = &z * &table[j - 1];
                    table[j] = &table[j] + &add;
                }
            }
        }
    }
    table.pop().expect("table has k+1 entries")
}

/// Registry indices of `x_1..x_n`, asserting they all exist.
pub fn x_block(reg: &Registry, n: u8) -> Vec<usize> {
    (1..=n)
        .map(|i| {
            reg.idx_of_kind(VarKind::X(i))
                .unwrap_or_else(|| panic!("registry lacks x{i}"))
        })
        .collect()
}

/// Registry indices of `y_1..y_n`, asserting they all exist.
pub fn y_block(reg: &Registry, n: u8) -> Vec<usize> {
    (1..=n)
        .map(|i| {
            reg.idx_of_kind(VarKind::Y(i))
                .unwrap_or_else(|| panic!("registry lacks y{i}"))
        })
        .collect()
}

/// `e_k` on `x_1..x_n`.
pub fn e_on_x(reg: &Registry, k: i32, n: u8) -> Poly {
    sym_poly(reg, &SymFunSpec { family: SymFamily::Elementary, k, vars: x_block(reg, n) })
}

/// `e_k` on `y_1..y_n`.
pub fn e_on_y(reg: &Registry, k: i32, n: u8) -> Poly {
    sym_poly(reg, &SymFunSpec { family: SymFamily::Elementary, k, vars: y_block(reg, n) })
}

/// `h_k` on `x_m..x_n` (inclusive alphabet tail).
pub fn h_on_x_tail(reg: &Registry, k: i32, m: u8, n: u8) -> Poly {
    let vars = (m..=n)
        .map(|i| reg.idx_of_kind(VarKind::X(i)).unwrap_or_else(|| panic!("registry lacks x{i}")))
        .collect();
    sym_poly(reg, &SymFunSpec { family: SymFamily::Complete, k, vars })
}

/// Transposes two variables in every monomial.
pub fn swap_vars(p: &Poly, a: usize, b: usize) -> Poly {
    let terms = p
        .terms()
        .iter()
        .map(|(m, c)| {
            let mut m = m.clone();
            m.swap(a, b);
            (m, c.clone())
        })
        .collect();
    Poly::from_terms(p.registry(), terms)
}

/// Applies the simple transposition `s_i` exchanging `x_i` and `x_{i+1}`.
pub fn s_i(p: &Poly, i: u8) -> Poly {
    let reg = p.registry();
    let a = reg.idx_of_kind(VarKind::X(i)).unwrap_or_else(|| panic!("registry lacks x{i}"));
    let b = reg
        .idx_of_kind(VarKind::X(i + 1))
        .unwrap_or_else(|| panic!("registry lacks x{}", i + 1));
    swap_vars(p, a, b)
}

/// Divided difference `(p - s_i p) / (x_i - x_{i+1})`.
///
/// The numerator is always divisible, so the quotient is computed by exact
/// division against the binomial (whose leading term is `x_i`).
pub fn divided_difference(i: u8, p: &Poly) -> Poly {
    let reg = p.registry();
    let ia = reg.idx_of_kind(VarKind::X(i)).unwrap_or_else(|| panic!("registry lacks x{i}"));
    let ib = reg
        .idx_of_kind(VarKind::X(i + 1))
        .unwrap_or_else(|| panic!("registry lacks x{}", i + 1));
    assert!(ia < ib, "x{} must precede x{} in the registry", i, i + 1);
    let numer = p - &swap_vars(p, ia, ib);
    let divisor = &Poly::var_idx(reg, ia) - &Poly::var_idx(reg, ib);
    exact_divide(&numer, &divisor)
        .expect("p - s_i(p) is divisible by x_i - x_{i+1}")
}

/// Exact division `f / g` in the polynomial ring; `None` if not divisible.
pub fn exact_divide(f: &Poly, g: &Poly) -> Option<Poly> {
    let reg = f.registry();
    assert!(!g.is_zero(), "division by zero polynomial");
    let (glm, glc) = g.leading().expect("nonzero divisor");
    let glm = glm.clone();
    let glc = glc.clone();
    let mut rem = f.clone();
    let mut quo: Vec<(Mono, crate::poly::Rat)> = Vec::new();
    while let Some((lm, lc)) = rem.leading() {
        if !crate::poly::mono_divides(&glm, lm) {
            return None;
        }
        let lm = lm.clone();
        let qm = mono_div(&lm, &glm);
        let qc = lc / &glc;
        rem.sub_mul_term(&qc, &qm, g);
        if let Some((new_lm, _)) = rem.leading() {
            debug_assert!(mono_cmp(new_lm, &lm) == std::cmp::Ordering::Less);
        }
        quo.push((qm, qc));
    }
    Some(Poly::from_terms(reg, quo))
}

/// Iterated Demazure operator `d_1 ∘ d_2 ∘ … ∘ d_{n-1}` acting as a trace
/// down to the symmetric subalgebra in the first slot.
///
/// Input must be symmetric under `s_1, …, s_{n-2}` (checked), which makes the
/// composite a module trace for the extension by `x_n`.
pub fn demazure_trace(p: &Poly, n: u8) -> Poly {
    assert!(n >= 1, "demazure_trace needs n >= 1");
    for i in 1..n.saturating_sub(1) {
        assert!(
            s_i(p, i) == *p,
            "demazure_trace precondition: input must be s_{i}-symmetric"
        );
    }
    let mut acc = p.clone();
    for i in (1..n).rev() {
        acc = divided_difference(i, &acc);
    }
    acc
}

/// The pairing `(f, g) -> demazure_trace(f * g, n)` realizing the Frobenius
/// structure of the `x_n`-extension over its symmetric subalgebra.
pub fn frobenius_pairing(f: &Poly, g: &Poly, n: u8) -> Poly {
    demazure_trace(&(f * g), n)
}
