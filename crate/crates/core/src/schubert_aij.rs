//! The combinatorial coefficient families attached to the one-column Koszul
//! factorizations: the triangular array `a_ij`, the column elements `z_m`, the
//! right-hand entries `b_j`, and the expansion of diagonal flag-matrix entries.
//!
//! All three families are sums over integer sequences of products of the
//! binomials `y_p - x_q`:
//!
//! * `a_ij` sums over strictly decreasing `j-1 >= g_1 > … > g_{i-1} >= 1` the
//!   products `prod_k (y_{g_k} - x_{g_k + k})`; `a_1j = 1`.
//! * `z_m` (on `n` letters) sums over strictly increasing
//!   `1 <= g_1 < … < g_m <= n` the products `prod_k (y_{g_k} - x_{g_k + m - k})`,
//!   and equals `sum_{i+j=m} (-1)^j e_i(y_1..y_n) h_j(x_m..x_n)`.
//! * `b_j = sum_{i<=j} u_i a_ij`.

use itertools::Itertools;

use crate::perm::Permutation;
use crate::poly::{Poly, Registry, VarKind};
use crate::symcomb::{e_on_y, h_on_x_tail};

fn x_var(reg: &Registry, i: u8) -> Poly {
    let idx = reg.idx_of_kind(VarKind::X(i)).unwrap_or_else(|| panic!("registry lacks x{i}"));
    Poly::var_idx(reg, idx)
}

fn y_var(reg: &Registry, i: u8) -> Poly {
    let idx = reg.idx_of_kind(VarKind::Y(i)).unwrap_or_else(|| panic!("registry lacks y{i}"));
    Poly::var_idx(reg, idx)
}

fn u_var(reg: &Registry, k: u8) -> Poly {
    let idx = reg.idx_of_kind(VarKind::U(k)).unwrap_or_else(|| panic!("registry lacks u{k}"));
    Poly::var_idx(reg, idx)
}

/// How the `y` alphabet is instantiated when forming entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YImage<'a> {
    /// Keep `y_p` as itself.
    Free,
    /// Send `y_p` to `y_{w(p)}`; stays in the two-alphabet ring.
    TwistY(&'a Permutation),
    /// Send `y_p` to `x_{w(p)}`; lands in the one-alphabet ring.
    SpecializeX(&'a Permutation),
    /// Send `y_p` to `x_p` (the identity specialization).
    Diagonal,
}

fn y_image(reg: &Registry, p: u8, img: YImage<'_>) -> Poly {
    match img {
        YImage::Free => y_var(reg, p),
        YImage::TwistY(w) => y_var(reg, w.apply(p)),
        YImage::SpecializeX(w) => x_var(reg, w.apply(p)),
        YImage::Diagonal => x_var(reg, p),
    }
}

/// `a_ij` with the `y` alphabet instantiated as requested.
///
/// `a_ij = 0` for `i > j`; `a_1j = 1`; and on the diagonal
/// `a_jj = prod_{k<j} (y_k - x_j)`.
pub fn a_poly_with(reg: &Registry, i: u8, j: u8, img: YImage<'_>) -> Poly {
    if i == 0 || j == 0 || i > j {
        return Poly::zero(reg);
    }
    let r = (i - 1) as usize;
    let mut acc = Poly::zero(reg);
    // Strictly decreasing sequences of length i-1 inside {1..j-1}.
    for combo in (1..=(j - 1)).rev().combinations(r) {
        let mut term = Poly::one(reg);
        for (k, &g) in combo.iter().enumerate() {
            let kk = (k + 1) as u8;
            let factor = &y_image(reg, g, img) - &x_var(reg, g + kk);
            term = &term * &factor;
        }
        acc = &acc + &term;
    }
    acc
}

/// `a_ij` over the free two-alphabet ring.
pub fn a_poly(reg: &Registry, i: u8, j: u8) -> Poly {
    a_poly_with(reg, i, j, YImage::Free)
}

/// Precomputed triangular table of the `a_ij` over a fixed registry.
#[derive(Debug, Clone)]
pub struct AijTable {
    n: u8,
    entries: Vec<Vec<Poly>>,
}

impl AijTable {
    pub fn new(reg: &Registry, n: u8, img: YImage<'_>) -> AijTable {
        let entries = (1..=n)
            .map(|j| (1..=j).map(|i| a_poly_with(reg, i, j, img)).collect())
            .collect();
        AijTable { n, entries }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    /// `a_ij` for `1 <= i <= j <= n`.
    pub fn get(&self, i: u8, j: u8) -> &Poly {
        assert!(1 <= i && i <= j && j <= self.n, "a_ij wants 1 <= i <= j <= n");
        &self.entries[(j - 1) as usize][(i - 1) as usize]
    }
}

/// `z_m` on the `n`-letter alphabets, as a sum over increasing sequences.
pub fn z_poly_sequences(reg: &Registry, m: u8, n: u8) -> Poly {
    assert!(1 <= m && m <= n);
    let mut acc = Poly::zero(reg);
    for combo in (1..=n).combinations(m as usize) {
        let mut term = Poly::one(reg);
        for (k, &g) in combo.iter().enumerate() {
            let kk = (k + 1) as u8;
            let factor = &y_var(reg, g) - &x_var(reg, g + m - kk);
            term = &term * &factor;
        }
        acc = &acc + &term;
    }
    acc
}

/// `z_m` as the symmetric-function alternating sum
/// `sum_{i+j=m} (-1)^j e_i(y_1..y_n) h_j(x_m..x_n)`.
pub fn z_poly_symfun(reg: &Registry, m: u8, n: u8) -> Poly {
    assert!(1 <= m && m <= n);
    let mut acc = Poly::zero(reg);
    for i in 0..=m {
        let j = m - i;
        let term = &e_on_y(reg, i as i32, n) * &h_on_x_tail(reg, j as i32, m, n);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// The right-hand column entry `b_j = sum_{i<=j} u_i a_ij`, with the `y`
/// alphabet kept free (`twist = None`) or specialized to `x_{w(p)}`.
pub fn b_poly(reg: &Registry, j: u8, twist: Option<&Permutation>) -> Poly {
    let img = match twist {
        None => YImage::Free,
        Some(w) => YImage::SpecializeX(w),
    };
    b_poly_with(reg, j, img)
}

pub fn b_poly_with(reg: &Registry, j: u8, img: YImage<'_>) -> Poly {
    let mut acc = Poly::zero(reg);
    for i in 1..=j {
        let term = &u_var(reg, i) * &a_poly_with(reg, i, j, img);
        acc = &acc + &term;
    }
    acc
}

/// Expansion of the diagonal flag-matrix entry `v_kk` over the first row:
/// returns coefficients `c_0, …, c_{k-1}` (polynomials in `x`) such that
/// `v_kk = sum_j c_j v_{1,j+1}`, with the `j = 0` slot multiplying the formal
/// corner entry `v_11`.
///
/// Computed from the elimination recursion
/// `v_ij = v_{i-1,j-1} - (x_{i-1} - x_j) v_{i-1,j}` alone; the closed form
/// `c_j = (-1)^j a_{j+1,k}(x,x)` is checked against it in tests.
pub fn vkk_expansion(reg: &Registry, k: u8) -> Vec<Poly> {
    assert!(k >= 1);
    // row[i][j] = expansion of v_{i,j} over v_{1,1..k}, for j in i..=k.
    // Start at i = 1 where v_{1,j} is itself.
    let mut row: Vec<Vec<Poly>> = (1..=k)
        .map(|j| {
            let mut coeffs = vec![Poly::zero(reg); k as usize];
            coeffs[(j - 1) as usize] = Poly::one(reg);
            coeffs
        })
        .collect();
    for i in 2..=k {
        // next[j - i] = expansion of v_{i,j} for j in i..=k.
        let mut next: Vec<Vec<Poly>> = Vec::with_capacity((k - i + 1) as usize);
        for j in i..=k {
            let prev_diag = &row[(j - 1 - (i - 1)) as usize];
            let prev_right = &row[(j - (i - 1)) as usize];
            let factor = &x_var(reg, i - 1) - &x_var(reg, j);
            let coeffs = prev_diag
                .iter()
                .zip(prev_right.iter())
                .map(|(d, r)| d - &(&factor * r))
                .collect();
            next.push(coeffs);
        }
        row = next;
    }
    row.into_iter().next().expect("diagonal entry exists")
}
