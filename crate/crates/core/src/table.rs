//! Degree windows and tables of dimensions indexed by tri-degree.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::poly::TriDegree;

/// A finite box of tri-degrees: `q` in `[q_min, q_max]`, `t` in `[0, t_max]`,
/// `a` in `[0, a_max]`.  Bigraded uses set `a_max = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub q_min: i32,
    pub q_max: i32,
    pub t_max: i32,
    pub a_max: i32,
}

impl Window {
    pub fn bigraded(q_min: i32, q_max: i32, t_max: i32) -> Window {
        Window { q_min, q_max, t_max, a_max: 0 }
    }

    pub fn trigraded(q_min: i32, q_max: i32, t_max: i32, a_max: i32) -> Window {
        Window { q_min, q_max, t_max, a_max }
    }

    /// The default verification box for rank `n`: wide enough in `q` to hold
    /// every exterior shift, `t` up to 12, full `a` range.
    pub fn standard(n: u8) -> Window {
        let n = n as i32;
        Window { q_min: -2 * n * n - 10, q_max: 2 * n * n + 10, t_max: 12, a_max: n }
    }

    pub fn contains(&self, d: TriDegree) -> bool {
        self.q_min <= d.q
            && d.q <= self.q_max
            && 0 <= d.t
            && d.t <= self.t_max
            && 0 <= d.a
            && d.a <= self.a_max
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "q in [{}, {}], t in [0, {}], a in [0, {}]",
            self.q_min, self.q_max, self.t_max, self.a_max
        )
    }
}

/// Nonnegative dimension counts per tri-degree; absent keys mean zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DimensionTable {
    dims: BTreeMap<(i32, i32, i32), u64>,
}

impl DimensionTable {
    pub fn new() -> DimensionTable {
        DimensionTable::default()
    }

    pub fn add(&mut self, d: TriDegree, count: u64) {
        if count != 0 {
            *self.dims.entry((d.q, d.t, d.a)).or_insert(0) += count;
        }
    }

    pub fn get(&self, d: TriDegree) -> u64 {
        self.dims.get(&(d.q, d.t, d.a)).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.dims.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (TriDegree, u64)> + '_ {
        self.dims
            .iter()
            .map(|(&(q, t, a), &v)| (TriDegree { q, t, a }, v))
    }

    pub fn shifted(&self, by: TriDegree) -> DimensionTable {
        let mut out = DimensionTable::new();
        for (d, v) in self.iter() {
            out.add(d + by, v);
        }
        out
    }

    pub fn restricted(&self, window: &Window) -> DimensionTable {
        let mut out = DimensionTable::new();
        for (d, v) in self.iter() {
            if window.contains(d) {
                out.add(d, v);
            }
        }
        out
    }

    /// Graded tensor product: dimensions convolve along degree addition.
    pub fn convolved(&self, other: &DimensionTable) -> DimensionTable {
        let mut out = DimensionTable::new();
        for (d1, v1) in self.iter() {
            for (d2, v2) in other.iter() {
                out.add(d1 + d2, v1 * v2);
            }
        }
        out
    }

    /// Entries where the two tables disagree, in degree order:
    /// `(degree, self value, other value)`.
    pub fn mismatches(&self, other: &DimensionTable) -> Vec<(TriDegree, u64, u64)> {
        let mut keys: Vec<(i32, i32, i32)> = self.dims.keys().copied().collect();
        for k in other.dims.keys() {
            if !self.dims.contains_key(k) {
                keys.push(*k);
            }
        }
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .filter_map(|(q, t, a)| {
                let d = TriDegree { q, t, a };
                let x = self.get(d);
                let y = other.get(d);
                if x != y {
                    Some((d, x, y))
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .iter()
            .map(|(d, v)| serde_json::json!({"q": d.q, "t": d.t, "a": d.a, "dim": v}))
            .collect();
        serde_json::Value::Array(rows)
    }
}

impl FromIterator<(TriDegree, u64)> for DimensionTable {
    fn from_iter<I: IntoIterator<Item = (TriDegree, u64)>>(iter: I) -> Self {
        let mut t = DimensionTable::new();
        for (d, v) in iter {
            t.add(d, v);
        }
        t
    }
}
