//! Exact window-truncated expansion of graded series of the shape
//! `monomial * prod (1 - c_i m_i) / prod (1 - m_j)`,
//! where every `m` is a tri-degree monomial.  Used for closed Poincaré series
//! and for the product formula certifying regular sequences.
//!
//! Soundness of the truncation: every factor only raises `t` and `a`, so terms
//! above `t_max` or `a_max` may be dropped as soon as they appear.  Geometric
//! factors that lower (or keep) `q` are expanded before the `q`-raising ones;
//! only once no `q`-lowering factor remains are terms above `q_max` dropped,
//! and `q_min` is enforced only in the final restriction.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::poly::TriDegree;
use crate::table::{DimensionTable, Window};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("factor degree {0} cannot appear in a window-finite expansion")]
    InfiniteDirection(TriDegree),
    #[error("expansion has a negative coefficient {1} at {0}")]
    NegativeCoefficient(TriDegree, i64),
}

/// Signed integer series supported on finitely many tri-degrees.
#[derive(Debug, Clone, Default)]
pub struct Series {
    coeffs: BTreeMap<(i32, i32, i32), i64>,
}

impl Series {
    pub fn monomial(d: TriDegree, c: i64) -> Series {
        let mut s = Series::default();
        if c != 0 {
            s.coeffs.insert((d.q, d.t, d.a), c);
        }
        s
    }

    fn add_at(&mut self, d: (i32, i32, i32), c: i64) {
        if c == 0 {
            return;
        }
        let e = self.coeffs.entry(d).or_insert(0);
        *e += c;
        if *e == 0 {
            self.coeffs.remove(&d);
        }
    }

    /// Multiplies by the polynomial `1 - c * m`, dropping terms that exceed
    /// the window's `t`/`a` caps (all factors in use only raise `t` and `a`).
    fn mul_one_minus(&mut self, m: TriDegree, c: i64, w: &Window) {
        let snapshot: Vec<((i32, i32, i32), i64)> =
            self.coeffs.iter().map(|(&k, &v)| (k, v)).collect();
        for ((q, t, a), v) in snapshot {
            let nt = t + m.t;
            let na = a + m.a;
            if nt > w.t_max || na > w.a_max {
                continue;
            }
            self.add_at((q + m.q, nt, na), -c * v);
        }
    }

    /// Multiplies by the geometric series `sum_k m^k` with the per-term
    /// exponent capped by the window (`t`/`a` always; `q` only if allowed).
    fn mul_geometric(&mut self, m: TriDegree, cap_q: bool, w: &Window) {
        let snapshot: Vec<((i32, i32, i32), i64)> =
            self.coeffs.iter().map(|(&k, &v)| (k, v)).collect();
        for ((q, t, a), v) in snapshot {
            let mut k = 1i32;
            loop {
                let nt = t + m.t * k;
                let na = a + m.a * k;
                let nq = q + m.q * k;
                if nt > w.t_max || na > w.a_max {
                    break;
                }
                if cap_q && m.q > 0 && nq > w.q_max {
                    break;
                }
                // Guard against a factor that changes no coordinate at all.
                assert!(m.t > 0 || m.a > 0 || m.q != 0);
                self.add_at((nq, nt, na), v);
                k += 1;
            }
        }
    }

    pub fn coeff(&self, d: TriDegree) -> i64 {
        self.coeffs.get(&(d.q, d.t, d.a)).copied().unwrap_or(0)
    }

    /// Keeps only coefficients inside the window; errors on a negative one.
    pub fn into_dimension_table(self, w: &Window) -> Result<DimensionTable, SeriesError> {
        let mut out = DimensionTable::new();
        for ((q, t, a), v) in self.coeffs {
            let d = TriDegree { q, t, a };
            if w.contains(d) {
                if v < 0 {
                    return Err(SeriesError::NegativeCoefficient(d, v));
                }
                out.add(d, v as u64);
            }
        }
        Ok(out)
    }
}

/// One multiplicative factor of a closed-form series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    /// `1 - c * monomial` in the numerator.
    Poly { m: TriDegree, c: i64 },
    /// `1 / (1 - monomial)`.
    Geometric { m: TriDegree },
}

/// Expands `monomial(prefactor) * prod(factors)` exactly on the window.
///
/// Every factor must keep `t` and `a` weakly increasing.  Geometric factors
/// must move strictly in a window-bounded direction: `t > 0`, or `a > 0`, or
/// (`t = a = 0` and `q > 0`).
pub fn expand(
    prefactor: TriDegree,
    factors: &[Factor],
    w: &Window,
) -> Result<Series, SeriesError> {
    for f in factors {
        let m = match f {
            Factor::Poly { m, .. } | Factor::Geometric { m } => *m,
        };
        if m.t < 0 || m.a < 0 {
            return Err(SeriesError::InfiniteDirection(m));
        }
        if matches!(f, Factor::Geometric { .. }) && m.t == 0 && m.a == 0 && m.q <= 0 {
            return Err(SeriesError::InfiniteDirection(m));
        }
    }
    let mut s = Series::monomial(prefactor, 1);
    // Finite numerator factors first, then the q-lowering (or q-neutral)
    // geometric factors, and only then the purely q-raising ones.
    for f in factors {
        if let Factor::Poly { m, c } = f {
            s.mul_one_minus(*m, *c, w);
        }
    }
    for f in factors {
        if let Factor::Geometric { m } = f {
            if m.q <= 0 {
                s.mul_geometric(*m, false, w);
            }
        }
    }
    for f in factors {
        if let Factor::Geometric { m } = f {
            if m.q > 0 {
                s.mul_geometric(*m, true, w);
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(q: i32, t: i32, a: i32) -> TriDegree {
        TriDegree { q, t, a }
    }

    #[test]
    fn geometric_expansion_of_one_variable() {
        // 1/(1-q^2) on q in [0,6]: one monomial per even degree.
        let w = Window::bigraded(0, 6, 0);
        let s = expand(TriDegree::ZERO, &[Factor::Geometric { m: d(2, 0, 0) }], &w).unwrap();
        let t = s.into_dimension_table(&w).unwrap();
        for k in 0..=3 {
            assert_eq!(t.get(d(2 * k, 0, 0)), 1);
        }
        assert_eq!(t.total(), 4);
    }

    #[test]
    fn cancellation_between_numerator_and_denominator() {
        // (1 - q^4)/(1 - q^2) = 1 + q^2 exactly.
        let w = Window::bigraded(-2, 10, 0);
        let s = expand(
            TriDegree::ZERO,
            &[Factor::Poly { m: d(4, 0, 0), c: 1 }, Factor::Geometric { m: d(2, 0, 0) }],
            &w,
        )
        .unwrap();
        let t = s.into_dimension_table(&w).unwrap();
        assert_eq!(t.get(d(0, 0, 0)), 1);
        assert_eq!(t.get(d(2, 0, 0)), 1);
        assert_eq!(t.total(), 2);
    }

    #[test]
    fn q_lowering_t_raising_factor_is_window_finite() {
        // 1/(1 - t^2 q^{-4}) with t_max 5: powers 0, 1, 2 contribute.
        let w = Window::trigraded(-20, 0, 5, 0);
        let s = expand(TriDegree::ZERO, &[Factor::Geometric { m: d(-4, 2, 0) }], &w).unwrap();
        let t = s.into_dimension_table(&w).unwrap();
        assert_eq!(t.get(d(0, 0, 0)), 1);
        assert_eq!(t.get(d(-4, 2, 0)), 1);
        assert_eq!(t.get(d(-8, 4, 0)), 1);
        assert_eq!(t.total(), 3);
    }

    #[test]
    fn mixed_product_matches_hand_expansion() {
        // (1 + a q^{-2}) / ((1-q^2)(1 - t^2 q^{-2})), checked at a few spots.
        let w = Window::trigraded(-6, 4, 4, 1);
        let s = expand(
            TriDegree::ZERO,
            &[
                Factor::Poly { m: d(-2, 0, 1), c: -1 },
                Factor::Geometric { m: d(2, 0, 0) },
                Factor::Geometric { m: d(-2, 2, 0) },
            ],
            &w,
        )
        .unwrap();
        // Coefficient at q^0 t^2: from t^2 q^{-2} times q^2: exactly 1.
        assert_eq!(s.coeff(d(0, 2, 0)), 1);
        // At q^{-2} a^1 t^0: the numerator term itself.
        assert_eq!(s.coeff(d(-2, 0, 1)), 1);
        // At q^{-4} t^2 a^1: numerator times the t-geometric term.
        assert_eq!(s.coeff(d(-4, 2, 1)), 1);
        // Everything nonnegative on the window.
        assert!(s.into_dimension_table(&w).is_ok());
    }

    #[test]
    fn rejects_unbounded_directions() {
        let w = Window::bigraded(-4, 4, 4);
        assert!(expand(TriDegree::ZERO, &[Factor::Geometric { m: d(-2, 0, 0) }], &w).is_err());
        assert!(expand(TriDegree::ZERO, &[Factor::Poly { m: d(0, -2, 0), c: 1 }], &w).is_err());
    }
}
