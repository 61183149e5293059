//! Sparse multivariate polynomial arithmetic over the exact rationals, with a
//! three-fold (`q`, `t`, `a`) grading attached to every variable.
//!
//! A [`Registry`] fixes an ordered list of named variables together with their
//! tri-degrees.  Monomials are dense exponent vectors against that registry and
//! polynomials are sorted term lists (graded reverse lexicographic, descending).
//! All coefficients are `BigRational`; there is no floating point anywhere.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

/// Convenience constructor for an integer scalar.
pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Convenience constructor for a fraction `n/d`.
pub fn rat_frac(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Degree in the three gradings `q`, `t`, `a`.
///
/// Conventions: polynomial variables `x_i`, `y_i` sit in degree `q^2`;
/// `u_k` in `q^{-2k} t^2`; `v_ij` in `q^{2(i-j)-2} t^2`; the odd exterior
/// generators attached elsewhere carry the `t^1` and `a^1` parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TriDegree {
    pub q: i32,
    pub t: i32,
    pub a: i32,
}

impl TriDegree {
    pub const ZERO: TriDegree = TriDegree { q: 0, t: 0, a: 0 };

    pub fn new(q: i32, t: i32, a: i32) -> Self {
        TriDegree { q, t, a }
    }

    pub fn scaled(self, k: i32) -> Self {
        TriDegree { q: self.q * k, t: self.t * k, a: self.a * k }
    }

    pub fn is_zero(self) -> bool {
        self == TriDegree::ZERO
    }
}

impl Add for TriDegree {
    type Output = TriDegree;
    fn add(self, rhs: TriDegree) -> TriDegree {
        TriDegree { q: self.q + rhs.q, t: self.t + rhs.t, a: self.a + rhs.a }
    }
}

impl Sub for TriDegree {
    type Output = TriDegree;
    fn sub(self, rhs: TriDegree) -> TriDegree {
        TriDegree { q: self.q - rhs.q, t: self.t - rhs.t, a: self.a - rhs.a }
    }
}

impl Neg for TriDegree {
    type Output = TriDegree;
    fn neg(self) -> TriDegree {
        TriDegree { q: -self.q, t: -self.t, a: -self.a }
    }
}

impl fmt::Display for TriDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(q:{}, t:{}, a:{})", self.q, self.t, self.a)
    }
}

/// The structural role of a variable; determines its default tri-degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarKind {
    /// Bottom-row alphabet `x_i`, degree `q^2`.
    X(u8),
    /// Top-row alphabet `y_i`, degree `q^2`.
    Y(u8),
    /// Even periodic generator `u_k`, degree `q^{-2k} t^2`.
    U(u8),
    /// Flag-matrix entry `v_ij` (`i < j`), degree `q^{2(i-j)-2} t^2`.
    V(u8, u8),
    /// A root-difference placeholder of degree `q^2` used in model rings.
    Alpha,
    /// Any other variable; the degree is supplied explicitly.
    Aux,
}

impl VarKind {
    /// Default degree carried by the kind, if it determines one.
    pub fn default_degree(self) -> Option<TriDegree> {
        match self {
            VarKind::X(_) | VarKind::Y(_) | VarKind::Alpha => Some(TriDegree::new(2, 0, 0)),
            VarKind::U(k) => Some(TriDegree::new(-2 * k as i32, 2, 0)),
            VarKind::V(i, j) => Some(TriDegree::new(2 * (i as i32 - j as i32) - 2, 2, 0)),
            VarKind::Aux => None,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            VarKind::X(_) => "x",
            VarKind::Y(_) => "y",
            VarKind::U(_) => "u",
            VarKind::V(_, _) => "v",
            VarKind::Alpha => "alpha",
            VarKind::Aux => "aux",
        }
    }

    /// Recovers the kind from its tag plus the index digits in the name.
    pub fn from_tag_and_name(tag: &str, name: &str) -> Result<VarKind, PolyError> {
        let digits = |s: &str| -> Result<u8, PolyError> {
            s.parse::<u8>()
                .map_err(|_| PolyError::Encoding(format!("bad variable index in {name}")))
        };
        match tag {
            "x" => Ok(VarKind::X(digits(&name[1..])?)),
            "y" => Ok(VarKind::Y(digits(&name[1..])?)),
            "u" => Ok(VarKind::U(digits(&name[1..])?)),
            "v" => {
                let idx = &name[1..];
                if idx.len() != 2 {
                    return Err(PolyError::Encoding(format!("bad v-variable name {name}")));
                }
                Ok(VarKind::V(digits(&idx[..1])?, digits(&idx[1..])?))
            }
            "alpha" => Ok(VarKind::Alpha),
            "aux" => Ok(VarKind::Aux),
            _ => Err(PolyError::Encoding(format!("unknown variable kind {tag}"))),
        }
    }
}

/// A named, graded variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarDecl {
    pub name: String,
    pub kind: VarKind,
    pub degree: TriDegree,
}

impl VarDecl {
    fn with_default(name: String, kind: VarKind) -> Self {
        let degree = kind.default_degree().expect("kind has a default degree");
        VarDecl { name, kind, degree }
    }

    pub fn x(i: u8) -> Self {
        Self::with_default(format!("x{i}"), VarKind::X(i))
    }

    pub fn y(i: u8) -> Self {
        Self::with_default(format!("y{i}"), VarKind::Y(i))
    }

    pub fn u(k: u8) -> Self {
        Self::with_default(format!("u{k}"), VarKind::U(k))
    }

    pub fn v(i: u8, j: u8) -> Self {
        assert!(i < j, "v variables are strictly upper triangular");
        Self::with_default(format!("v{i}{j}"), VarKind::V(i, j))
    }

    pub fn alpha() -> Self {
        Self::with_default("alpha".to_string(), VarKind::Alpha)
    }

    pub fn aux(name: &str, degree: TriDegree) -> Self {
        VarDecl { name: name.to_string(), kind: VarKind::Aux, degree }
    }
}

#[derive(Debug)]
struct RegistryInner {
    vars: Vec<VarDecl>,
    index: HashMap<String, usize>,
}

/// An ordered list of graded variables shared by the polynomials built on it.
///
/// The declaration order is the variable order used by the monomial order:
/// earlier variables are larger.  Registries compare equal when their
/// declaration lists agree.
#[derive(Clone)]
pub struct Registry(Arc<RegistryInner>);

impl Registry {
    pub fn new(vars: Vec<VarDecl>) -> Registry {
        let mut index = HashMap::with_capacity(vars.len());
        for (i, v) in vars.iter().enumerate() {
            let prev = index.insert(v.name.clone(), i);
            assert!(prev.is_none(), "duplicate variable name {}", v.name);
        }
        Registry(Arc::new(RegistryInner { vars, index }))
    }

    /// `x_1..x_n`.
    pub fn x_only(n: u8) -> Registry {
        Registry::new((1..=n).map(VarDecl::x).collect())
    }

    /// `x_1..x_n, y_1..y_n`.
    pub fn xy(n: u8) -> Registry {
        let mut v: Vec<_> = (1..=n).map(VarDecl::x).collect();
        v.extend((1..=n).map(VarDecl::y));
        Registry::new(v)
    }

    /// `x_1..x_n, y_1..y_n, u_1..u_n`.
    pub fn xyu(n: u8) -> Registry {
        let mut v: Vec<_> = (1..=n).map(VarDecl::x).collect();
        v.extend((1..=n).map(VarDecl::y));
        v.extend((1..=n).map(VarDecl::u));
        Registry::new(v)
    }

    /// `x_1..x_n, u_1..u_n`.
    pub fn xu(n: u8) -> Registry {
        let mut v: Vec<_> = (1..=n).map(VarDecl::x).collect();
        v.extend((1..=n).map(VarDecl::u));
        Registry::new(v)
    }

    /// `x_1..x_n` plus the strictly upper triangular `v_ij`, row-major.
    pub fn xv(n: u8) -> Registry {
        let mut v: Vec<_> = (1..=n).map(VarDecl::x).collect();
        for i in 1..=n {
            for j in (i + 1)..=n {
                v.push(VarDecl::v(i, j));
            }
        }
        Registry::new(v)
    }

    pub fn len(&self) -> usize {
        self.0.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.vars.is_empty()
    }

    pub fn decl(&self, idx: usize) -> &VarDecl {
        &self.0.vars[idx]
    }

    pub fn decls(&self) -> &[VarDecl] {
        &self.0.vars
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.0.vars[idx].name
    }

    pub fn idx_of(&self, name: &str) -> Option<usize> {
        self.0.index.get(name).copied()
    }

    pub fn idx_of_kind(&self, kind: VarKind) -> Option<usize> {
        self.0.vars.iter().position(|v| v.kind == kind)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .0
            .vars
            .iter()
            .map(|v| {
                serde_json::json!({
                    "name": v.name,
                    "kind": v.kind.tag(),
                    "degree": {"q": v.degree.q, "t": v.degree.t, "a": v.degree.a},
                })
            })
            .collect();
        serde_json::Value::Array(rows)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Registry, PolyError> {
        let arr = v
            .as_array()
            .ok_or_else(|| PolyError::Encoding("registry must be an array".into()))?;
        let mut decls = Vec::with_capacity(arr.len());
        for row in arr {
            let name = row
                .get("name")
                .and_then(|x| x.as_str())
                .ok_or_else(|| PolyError::Encoding("variable missing name".into()))?;
            let tag = row
                .get("kind")
                .and_then(|x| x.as_str())
                .ok_or_else(|| PolyError::Encoding("variable missing kind".into()))?;
            let deg = row
                .get("degree")
                .ok_or_else(|| PolyError::Encoding("variable missing degree".into()))?;
            let degree: TriDegree = serde_json::from_value(deg.clone())
                .map_err(|e| PolyError::Encoding(format!("bad degree: {e}")))?;
            let kind = VarKind::from_tag_and_name(tag, name)?;
            decls.push(VarDecl { name: name.to_string(), kind, degree });
        }
        Ok(Registry::new(decls))
    }

    /// New registry with the given variable removed, plus the index map
    /// old index -> new index for the survivors.
    pub fn without(&self, removed: usize) -> (Registry, Vec<Option<usize>>) {
        let mut vars = Vec::with_capacity(self.len() - 1);
        let mut map = vec![None; self.len()];
        for (i, v) in self.0.vars.iter().enumerate() {
            if i != removed {
                map[i] = Some(vars.len());
                vars.push(v.clone());
            }
        }
        (Registry::new(vars), map)
    }
}

impl PartialEq for Registry {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.vars == other.0.vars
    }
}

impl Eq for Registry {}

impl fmt::Debug for Registry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.vars.iter().map(|v| v.name.as_str()).collect();
        write!(f, "Registry[{}]", names.join(", "))
    }
}

/// Dense exponent vector against a registry.
pub type Mono = SmallVec<[u16; 16]>;

pub fn mono_one(nvars: usize) -> Mono {
    SmallVec::from_elem(0, nvars)
}

pub fn mono_total_deg(m: &Mono) -> u32 {
    m.iter().map(|&e| e as u32).sum()
}

pub fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b.iter()).map(|(&x, &y)| x.checked_add(y).expect("exponent overflow")).collect()
}

pub fn mono_divides(a: &Mono, b: &Mono) -> bool {
    a.iter().zip(b.iter()).all(|(&x, &y)| x <= y)
}

/// `b / a`, assuming divisibility.
pub fn mono_div(b: &Mono, a: &Mono) -> Mono {
    debug_assert!(mono_divides(a, b));
    b.iter().zip(a.iter()).map(|(&x, &y)| x - y).collect()
}

pub fn mono_lcm(a: &Mono, b: &Mono) -> Mono {
    a.iter().zip(b.iter()).map(|(&x, &y)| x.max(y)).collect()
}

/// Graded reverse lexicographic comparison: higher total degree wins; on equal
/// degree the monomial with the *smaller* exponent on the last differing
/// variable is the larger one.
pub fn mono_cmp(a: &Mono, b: &Mono) -> Ordering {
    let da = mono_total_deg(a);
    let db = mono_total_deg(b);
    match da.cmp(&db) {
        Ordering::Equal => {}
        other => return other,
    }
    for i in (0..a.len()).rev() {
        match a[i].cmp(&b[i]) {
            Ordering::Equal => {}
            Ordering::Less => return Ordering::Greater,
            Ordering::Greater => return Ordering::Less,
        }
    }
    Ordering::Equal
}

pub fn mono_tridegree(reg: &Registry, m: &Mono) -> TriDegree {
    let mut d = TriDegree::ZERO;
    for (i, &e) in m.iter().enumerate() {
        if e != 0 {
            d = d + reg.decl(i).degree.scaled(e as i32);
        }
    }
    d
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomial is zero; it has no well-defined degree")]
    ZeroDegree,
    #[error("polynomial is not homogeneous: term degrees {0} and {1} differ")]
    Inhomogeneous(TriDegree, TriDegree),
    #[error("variable {0} is absent from the target registry and has no assignment")]
    MissingVariable(String),
    #[error("registries differ: {0}")]
    RegistryMismatch(String),
    #[error("invalid polynomial encoding: {0}")]
    Encoding(String),
}

/// A polynomial: sorted, combined, zero-free term list over a registry.
#[derive(Clone)]
pub struct Poly {
    reg: Registry,
    /// Terms in strictly descending monomial order.
    terms: Vec<(Mono, Rat)>,
}

impl Poly {
    pub fn zero(reg: &Registry) -> Poly {
        Poly { reg: reg.clone(), terms: Vec::new() }
    }

    pub fn one(reg: &Registry) -> Poly {
        Poly::constant(reg, rat(1))
    }

    pub fn constant(reg: &Registry, c: Rat) -> Poly {
        if c.is_zero() {
            Poly::zero(reg)
        } else {
            Poly { reg: reg.clone(), terms: vec![(mono_one(reg.len()), c)] }
        }
    }

    pub fn var(reg: &Registry, name: &str) -> Poly {
        let idx = reg
            .idx_of(name)
            .unwrap_or_else(|| panic!("variable {name} not in {reg:?}"));
        Poly::var_idx(reg, idx)
    }

    pub fn var_idx(reg: &Registry, idx: usize) -> Poly {
        let mut m = mono_one(reg.len());
        m[idx] = 1;
        Poly { reg: reg.clone(), terms: vec![(m, rat(1))] }
    }

    pub fn monomial(reg: &Registry, exps: &[(usize, u16)], coeff: Rat) -> Poly {
        if coeff.is_zero() {
            return Poly::zero(reg);
        }
        let mut m = mono_one(reg.len());
        for &(idx, e) in exps {
            m[idx] += e;
        }
        Poly { reg: reg.clone(), terms: vec![(m, coeff)] }
    }

    /// Builds a polynomial from arbitrary (mono, coeff) pairs, combining
    /// duplicates and dropping zeros.
    pub fn from_terms(reg: &Registry, terms: Vec<(Mono, Rat)>) -> Poly {
        let mut terms = terms;
        terms.retain(|(_, c)| !c.is_zero());
        terms.sort_by(|a, b| mono_cmp(&b.0, &a.0));
        let mut out: Vec<(Mono, Rat)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => {
                    *lc += c;
                    if lc.is_zero() {
                        out.pop();
                    }
                }
                _ => out.push((m, c)),
            }
        }
        Poly { reg: reg.clone(), terms: out }
    }

    pub fn registry(&self) -> &Registry {
        &self.reg
    }

    pub fn terms(&self) -> &[(Mono, Rat)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Leading (largest) term in the monomial order.
    pub fn leading(&self) -> Option<(&Mono, &Rat)> {
        self.terms.first().map(|(m, c)| (m, c))
    }

    /// Removes and returns the leading term.
    pub fn pop_leading(&mut self) -> Option<(Mono, Rat)> {
        if self.terms.is_empty() {
            None
        } else {
            Some(self.terms.remove(0))
        }
    }

    pub fn coeff_of(&self, m: &Mono) -> Rat {
        match self.terms.binary_search_by(|(tm, _)| mono_cmp(m, tm)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Rat::zero(),
        }
    }

    pub fn constant_term(&self) -> Rat {
        let one = mono_one(self.reg.len());
        self.coeff_of(&one)
    }

    /// Indices of variables that occur with a positive exponent.
    pub fn vars_used(&self) -> Vec<usize> {
        let n = self.reg.len();
        let mut used = vec![false; n];
        for (m, _) in &self.terms {
            for (i, &e) in m.iter().enumerate() {
                if e != 0 {
                    used[i] = true;
                }
            }
        }
        (0..n).filter(|&i| used[i]).collect()
    }

    pub fn uses_var(&self, idx: usize) -> bool {
        self.terms.iter().any(|(m, _)| m[idx] != 0)
    }

    pub fn max_exp(&self, idx: usize) -> u16 {
        self.terms.iter().map(|(m, _)| m[idx]).max().unwrap_or(0)
    }

    fn assert_same_reg(&self, other: &Poly) {
        assert!(
            self.reg == other.reg,
            "operands built over different registries: {:?} vs {:?}",
            self.reg,
            other.reg
        );
    }

    pub fn map_coeffs(&self, f: impl Fn(&Rat) -> Rat) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), f(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Poly { reg: self.reg.clone(), terms }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.reg);
        }
        self.map_coeffs(|x| x * c)
    }

    /// `self * c * x^m` with the registry unchanged.
    pub fn mul_term(&self, m: &Mono, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.reg);
        }
        let terms = self.terms.iter().map(|(tm, tc)| (mono_mul(tm, m), tc * c)).collect();
        // Multiplying every monomial by a fixed monomial preserves the order.
        Poly { reg: self.reg.clone(), terms }
    }

    /// In-place `self -= c * x^m * g`; linear-time merge.
    pub fn sub_mul_term(&mut self, c: &Rat, m: &Mono, g: &Poly) {
        self.assert_same_reg(g);
        if c.is_zero() || g.is_zero() {
            return;
        }
        let rhs: Vec<(Mono, Rat)> =
            g.terms.iter().map(|(tm, tc)| (mono_mul(tm, m), tc * c)).collect();
        let mut out = Vec::with_capacity(self.terms.len() + rhs.len());
        let mut ia = 0;
        let mut ib = 0;
        while ia < self.terms.len() && ib < rhs.len() {
            match mono_cmp(&self.terms[ia].0, &rhs[ib].0) {
                Ordering::Greater => {
                    out.push(std::mem::replace(&mut self.terms[ia], (Mono::new(), Rat::zero())));
                    ia += 1;
                }
                Ordering::Less => {
                    let (m, c) = &rhs[ib];
                    out.push((m.clone(), -c.clone()));
                    ib += 1;
                }
                Ordering::Equal => {
                    let c = &self.terms[ia].1 - &rhs[ib].1;
                    if !c.is_zero() {
                        out.push((self.terms[ia].0.clone(), c));
                    }
                    ia += 1;
                    ib += 1;
                }
            }
        }
        while ia < self.terms.len() {
            out.push(std::mem::replace(&mut self.terms[ia], (Mono::new(), Rat::zero())));
            ia += 1;
        }
        while ib < rhs.len() {
            let (m, c) = &rhs[ib];
            out.push((m.clone(), -c.clone()));
            ib += 1;
        }
        self.terms = out;
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(&self.reg);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Total tri-degree if homogeneous; errors on zero or mixed degrees.
    pub fn tridegree(&self) -> Result<TriDegree, PolyError> {
        let mut it = self.terms.iter();
        let first = it.next().ok_or(PolyError::ZeroDegree)?;
        let d = mono_tridegree(&self.reg, &first.0);
        for (m, _) in it {
            let d2 = mono_tridegree(&self.reg, m);
            if d2 != d {
                return Err(PolyError::Inhomogeneous(d, d2));
            }
        }
        Ok(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.tridegree().is_ok()
    }

    /// Rewrites the polynomial in `target`, sending each variable through
    /// `map` when present and to the same-named target variable otherwise.
    pub fn substitute(
        &self,
        target: &Registry,
        map: &HashMap<String, Poly>,
    ) -> Result<Poly, PolyError> {
        for p in map.values() {
            if p.registry() != target {
                return Err(PolyError::RegistryMismatch(
                    "substitution image not over the target registry".into(),
                ));
            }
        }
        // Resolve every used variable to its image before expanding.
        let used = self.vars_used();
        let mut images: HashMap<usize, Poly> = HashMap::new();
        for &i in &used {
            let name = self.reg.name(i);
            let img = if let Some(p) = map.get(name) {
                p.clone()
            } else if let Some(j) = target.idx_of(name) {
                Poly::var_idx(target, j)
            } else {
                return Err(PolyError::MissingVariable(name.to_string()));
            };
            images.insert(i, img);
        }
        // Power tables per used variable.
        let mut powers: HashMap<usize, Vec<Poly>> = HashMap::new();
        for &i in &used {
            let maxe = self.max_exp(i) as usize;
            let base = &images[&i];
            let mut tab = Vec::with_capacity(maxe + 1);
            tab.push(Poly::one(target));
            for e in 1..=maxe {
                let next = &tab[e - 1] * base;
                tab.push(next);
            }
            powers.insert(i, tab);
        }
        let mut acc = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut term = Poly::constant(target, c.clone());
            for &i in &used {
                let e = m[i] as usize;
                if e > 0 {
                    term = &term * &powers[&i][e];
                }
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Substitution of a single variable within the same registry.
    pub fn substitute_var(&self, name: &str, image: &Poly) -> Poly {
        let mut map = HashMap::new();
        map.insert(name.to_string(), image.clone());
        self.substitute(&self.reg, &map).expect("same-registry substitution cannot fail")
    }

    /// Serializes to the portable term-list form.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut exps = serde_json::Map::new();
                for (i, &e) in m.iter().enumerate() {
                    if e != 0 {
                        exps.insert(self.reg.name(i).to_string(), serde_json::json!(e));
                    }
                }
                serde_json::json!({ "coeff": rat_to_string(c), "exps": exps })
            })
            .collect();
        serde_json::Value::Array(terms)
    }

    pub fn from_json(reg: &Registry, v: &serde_json::Value) -> Result<Poly, PolyError> {
        let arr = v.as_array().ok_or_else(|| PolyError::Encoding("expected array".into()))?;
        let mut terms = Vec::with_capacity(arr.len());
        for t in arr {
            let coeff = t
                .get("coeff")
                .and_then(|c| c.as_str())
                .ok_or_else(|| PolyError::Encoding("term missing coeff string".into()))?;
            let c = rat_from_string(coeff)
                .ok_or_else(|| PolyError::Encoding(format!("bad rational {coeff}")))?;
            let exps = t
                .get("exps")
                .and_then(|e| e.as_object())
                .ok_or_else(|| PolyError::Encoding("term missing exps object".into()))?;
            let mut m = mono_one(reg.len());
            for (name, e) in exps {
                let idx = reg
                    .idx_of(name)
                    .ok_or_else(|| PolyError::MissingVariable(name.clone()))?;
                let e = e
                    .as_u64()
                    .ok_or_else(|| PolyError::Encoding("exponent not a nonnegative integer".into()))?;
                m[idx] = u16::try_from(e)
                    .map_err(|_| PolyError::Encoding("exponent too large".into()))?;
            }
            terms.push((m, c));
        }
        Ok(Poly::from_terms(reg, terms))
    }
}

pub fn rat_to_string(c: &Rat) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn rat_from_string(s: &str) -> Option<Rat> {
    let mut parts = s.splitn(2, '/');
    let numer: BigInt = parts.next()?.trim().parse().ok()?;
    match parts.next() {
        None => Some(BigRational::from_integer(numer)),
        Some(d) => {
            let denom: BigInt = d.trim().parse().ok()?;
            if denom.is_zero() {
                None
            } else {
                Some(BigRational::new(numer, denom))
            }
        }
    }
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.reg == other.reg && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.assert_same_reg(rhs);
        let mut out = self.clone();
        out.sub_mul_term(&rat(-1), &mono_one(self.reg.len()), rhs);
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.assert_same_reg(rhs);
        let mut out = self.clone();
        out.sub_mul_term(&rat(1), &mono_one(self.reg.len()), rhs);
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.map_coeffs(|c| -c)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.assert_same_reg(rhs);
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(&self.reg);
        }
        // Multiply the shorter operand term-by-term into the longer one.
        let (small, big) = if self.num_terms() <= rhs.num_terms() { (self, rhs) } else { (rhs, self) };
        let mut acc: HashMap<Mono, Rat> = HashMap::with_capacity(small.num_terms() * big.num_terms());
        for (m1, c1) in &small.terms {
            for (m2, c2) in &big.terms {
                let m = mono_mul(m1, m2);
                let e = acc.entry(m).or_insert_with(Rat::zero);
                *e += c1 * c2;
            }
        }
        Poly::from_terms(&self.reg, acc.into_iter().collect())
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        let n = self.reg.len();
        self.sub_mul_term(&rat(-1), &mono_one(n), rhs);
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        let n = self.reg.len();
        self.sub_mul_term(&rat(1), &mono_one(n), rhs);
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let mono_txt: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        self.reg.name(i).to_string()
                    } else {
                        format!("{}^{}", self.reg.name(i), e)
                    }
                })
                .collect();
            let mono_txt = mono_txt.join("*");
            let (sign, mag) = if c.is_negative() { ("-", -c.clone()) } else { ("+", c.clone()) };
            if k == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mono_txt.is_empty() {
                write!(f, "{}", rat_to_string(&mag))?;
            } else if mag.is_one() {
                write!(f, "{mono_txt}")?;
            } else {
                write!(f, "{}*{}", rat_to_string(&mag), mono_txt)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reg2() -> Registry {
        Registry::xy(2)
    }

    fn xv(reg: &Registry, name: &str) -> Poly {
        Poly::var(reg, name)
    }

    #[test]
    fn registry_lookup_and_degrees() {
        let reg = Registry::xyu(3);
        assert_eq!(reg.len(), 9);
        assert_eq!(reg.idx_of("u2"), Some(7));
        assert_eq!(reg.decl(7).degree, TriDegree::new(-4, 2, 0));
        assert_eq!(reg.decl(0).degree, TriDegree::new(2, 0, 0));
        let rv = Registry::xv(3);
        let i = rv.idx_of("v13").unwrap();
        assert_eq!(rv.decl(i).degree, TriDegree::new(2 * (1 - 3) - 2, 2, 0));
    }

    #[test]
    fn grevlex_order_basics() {
        let reg = Registry::x_only(3);
        let x1 = xv(&reg, "x1");
        let x2 = xv(&reg, "x2");
        let x3 = xv(&reg, "x3");
        // Degree dominates.
        let m_sq = (&x3 * &x3).terms()[0].0.clone();
        let m_lin = x1.terms()[0].0.clone();
        assert_eq!(mono_cmp(&m_sq, &m_lin), Ordering::Greater);
        // Same degree: smaller exponent on the later variable wins.
        let mx1 = x1.terms()[0].0.clone();
        let mx2 = x2.terms()[0].0.clone();
        assert_eq!(mono_cmp(&mx1, &mx2), Ordering::Greater);
        // x1*x3 vs x2^2: last difference at x3 -> x2^2 is larger.
        let a = (&x1 * &x3).terms()[0].0.clone();
        let b = (&x2 * &x2).terms()[0].0.clone();
        assert_eq!(mono_cmp(&a, &b), Ordering::Less);
    }

    #[test]
    fn arithmetic_and_display() {
        let reg = reg2();
        let x1 = xv(&reg, "x1");
        let y2 = xv(&reg, "y2");
        let p = &(&x1 + &y2) * &(&x1 - &y2);
        let want = &(&x1 * &x1) - &(&y2 * &y2);
        assert_eq!(p, want);
        assert_eq!(format!("{}", want), "x1^2 - y2^2");
        let z = &p - &p;
        assert!(z.is_zero());
        assert_eq!(format!("{}", z), "0");
    }

    #[test]
    fn tridegree_checks() {
        let reg = Registry::xyu(2);
        let x1 = xv(&reg, "x1");
        let u2 = xv(&reg, "u2");
        let p = &x1 * &u2;
        assert_eq!(p.tridegree().unwrap(), TriDegree::new(-2, 2, 0));
        let mixed = &x1 + &u2;
        assert!(matches!(mixed.tridegree(), Err(PolyError::Inhomogeneous(_, _))));
        assert_eq!(Poly::zero(&reg).tridegree(), Err(PolyError::ZeroDegree));
    }

    #[test]
    fn substitution_into_smaller_registry() {
        let reg = Registry::xy(2);
        let target = Registry::x_only(2);
        let p = &xv(&reg, "y1") - &xv(&reg, "x2");
        let mut map = HashMap::new();
        map.insert("y1".to_string(), Poly::var(&target, "x1"));
        let q = p.substitute(&target, &map).unwrap();
        let want = &Poly::var(&target, "x1") - &Poly::var(&target, "x2");
        assert_eq!(q, want);
        // A used variable with no image and no same-named target slot errors.
        let r = xv(&reg, "y2").substitute(&target, &map);
        assert!(matches!(r, Err(PolyError::MissingVariable(_))));
    }

    #[test]
    fn json_roundtrip_and_shape() {
        let reg = Registry::xyu(2);
        let p = &(&xv(&reg, "x1") * &xv(&reg, "u2")).scale(&rat_frac(-3, 2)) + &Poly::one(&reg);
        let v = p.to_json();
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.contains("\"coeff\":\"-3/2\""));
        let back = Poly::from_json(&reg, &v).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn sub_mul_term_matches_naive() {
        let reg = reg2();
        let x1 = xv(&reg, "x1");
        let y1 = xv(&reg, "y1");
        let g = &(&x1 * &x1) + &y1.scale(&rat(3));
        let mut p = &x1 * &(&y1 * &y1);
        let m = x1.terms()[0].0.clone();
        let naive = &p - &g.mul_term(&m, &rat_frac(5, 3));
        p.sub_mul_term(&rat_frac(5, 3), &m, &g);
        assert_eq!(p, naive);
    }

    prop_compose! {
        fn small_poly()(terms in prop::collection::vec(
            (prop::collection::vec(0u16..3, 4), -4i64..5), 0..5)) -> Poly {
            let reg = Registry::xy(2);
            let terms = terms.into_iter()
                .map(|(e, c)| (Mono::from_vec(e), rat(c)))
                .collect();
            Poly::from_terms(&reg, terms)
        }
    }

    proptest! {
        #[test]
        fn ring_axioms(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
            let json = Poly::from_json(a.registry(), &a.to_json()).unwrap();
            prop_assert_eq!(json, a.clone());
        }

        #[test]
        fn order_is_total_and_multiplicative(
            e1 in prop::collection::vec(0u16..4, 4),
            e2 in prop::collection::vec(0u16..4, 4),
            e3 in prop::collection::vec(0u16..4, 4),
        ) {
            let a = Mono::from_vec(e1);
            let b = Mono::from_vec(e2);
            let s = Mono::from_vec(e3);
            let ab = mono_cmp(&a, &b);
            prop_assert_eq!(mono_cmp(&b, &a), ab.reverse());
            // Multiplying both sides by a common monomial preserves order.
            prop_assert_eq!(mono_cmp(&mono_mul(&a, &s), &mono_mul(&b, &s)), ab);
        }
    }
}
