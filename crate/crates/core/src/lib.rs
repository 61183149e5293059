//! Exact computational algebra for stable triply-graded homology of torus links.
//!
//! The crate builds the one-column family of Koszul matrix factorizations `M_n`
//! over `Q[x_1..x_n, y_1..y_n, u_1..u_n]`, specializes them along a permutation
//! twist, simplifies them by exact row moves, and produces closed quotient-ring
//! presentations together with triply-graded Poincaré series.  Every numeric
//! result is exact (arbitrary-precision rationals, no floats) and every
//! presentation-level claim is cross-checked by an independent chain-level
//! homology engine.
//!
//! Module layout, bottom of the stack first:
//!
//! * [`poly`] — sparse multivariate polynomials over `Q` with a tri-grading.
//! * [`symcomb`] — symmetric functions, divided differences, Demazure trace.
//! * [`schubert_aij`] — the combinatorial coefficient families `a_ij`, `z_m`,
//!   `b_j` and the expansion of diagonal matrix entries.
//! * [`groebner`] — Buchberger bases, normal forms, Hilbert functions and
//!   regular-sequence certification.
//! * [`mf`] — Koszul matrix factorizations, exact row moves, the `M_n` family
//!   and its dg-module form.
//! * [`hhh`] — permutation specialization, block simplification, quotient
//!   presentations, Poincaré series, and the flag-matrix model ring.
//! * [`oracle`] — brute-force chain-level homology over a degree window.
//! * [`cli`] — the command surface shared by the binary and the bindings.

pub mod cli;
pub mod groebner;
pub mod hhh;
pub mod mf;
pub mod oracle;
mod perm;
pub mod poly;
pub mod schubert_aij;
mod series;
pub mod symcomb;
mod table;
