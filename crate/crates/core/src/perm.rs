//! Permutations of `{1..n}` with cycle-notation parsing and the canonical
//! block form used to index cycle types.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("invalid permutation: {0}")]
    Invalid(String),
    #[error("cycle notation parse error: {0}")]
    Parse(String),
}

/// A permutation `w` of `{1, …, n}`, stored as the image list `w(1), …, w(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    n: u8,
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(n: u8) -> Permutation {
        Permutation { n, images: (1..=n).collect() }
    }

    pub fn from_images(images: Vec<u8>) -> Result<Permutation, PermError> {
        let n = images.len() as u8;
        let mut seen = vec![false; n as usize];
        for &v in &images {
            if v == 0 || v > n {
                return Err(PermError::Invalid(format!("image {v} out of range 1..={n}")));
            }
            if seen[(v - 1) as usize] {
                return Err(PermError::Invalid(format!("image {v} repeated")));
            }
            seen[(v - 1) as usize] = true;
        }
        Ok(Permutation { n, images })
    }

    /// Parses whitespace-separated cycles such as `"(1 2 3)(4 5)"`.
    ///
    /// Fixed points may be omitted; the empty string (or `"()"`) is the
    /// identity.  Entries must lie in `1..=n` and must not repeat.
    pub fn parse_cycles(s: &str, n: u8) -> Result<Permutation, PermError> {
        let mut images: Vec<u8> = (1..=n).collect();
        let mut seen = vec![false; n as usize];
        let s = s.trim();
        let mut rest = s;
        while !rest.is_empty() {
            let open = rest
                .find('(')
                .ok_or_else(|| PermError::Parse(format!("expected '(' in {rest:?}")))?;
            if !rest[..open].trim().is_empty() {
                return Err(PermError::Parse(format!("unexpected text {:?}", &rest[..open])));
            }
            let close = rest
                .find(')')
                .ok_or_else(|| PermError::Parse("unbalanced '('".to_string()))?;
            if close < open {
                return Err(PermError::Parse("unbalanced ')'".to_string()));
            }
            let body = &rest[open + 1..close];
            rest = &rest[close + 1..];
            let entries: Result<Vec<u8>, _> = body
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<u8>()
                        .map_err(|_| PermError::Parse(format!("bad entry {tok:?}")))
                })
                .collect();
            let entries = entries?;
            for &v in &entries {
                if v == 0 || v > n {
                    return Err(PermError::Parse(format!("entry {v} out of range 1..={n}")));
                }
                if seen[(v - 1) as usize] {
                    return Err(PermError::Parse(format!("entry {v} appears twice")));
                }
                seen[(v - 1) as usize] = true;
            }
            for (k, &v) in entries.iter().enumerate() {
                let next = entries[(k + 1) % entries.len()];
                images[(v - 1) as usize] = next;
            }
        }
        Permutation::from_images(images)
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn apply(&self, i: u8) -> u8 {
        self.images[(i - 1) as usize]
    }

    pub fn images(&self) -> &[u8] {
        &self.images
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u8; self.n as usize];
        for i in 1..=self.n {
            images[(self.apply(i) - 1) as usize] = i;
        }
        Permutation { n: self.n, images }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.n, other.n);
        let images = (1..=self.n).map(|i| self.apply(other.apply(i))).collect();
        Permutation { n: self.n, images }
    }

    /// Conjugate `g ∘ self ∘ g^{-1}`.
    pub fn conjugate_by(&self, g: &Permutation) -> Permutation {
        g.compose(self).compose(&g.inverse())
    }

    /// Cycles, each rotated to start at its least element, sorted by that
    /// least element.  Fixed points appear as singleton cycles.
    pub fn cycles(&self) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        let mut seen = vec![false; self.n as usize];
        for start in 1..=self.n {
            if seen[(start - 1) as usize] {
                continue;
            }
            let mut cyc = vec![start];
            seen[(start - 1) as usize] = true;
            let mut cur = self.apply(start);
            while cur != start {
                seen[(cur - 1) as usize] = true;
                cyc.push(cur);
                cur = self.apply(cur);
            }
            out.push(cyc);
        }
        out
    }

    /// Cycle lengths in weakly decreasing order (partition notation).
    pub fn cycle_type(&self) -> Vec<u8> {
        let mut t: Vec<u8> = self.cycles().iter().map(|c| c.len() as u8).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    pub fn num_cycles(&self) -> u8 {
        self.cycles().len() as u8
    }

    /// If the permutation consists of consecutive blocks `(m+1, …, m')` each
    /// cycled by `i -> i+1` (top wrapping to the bottom), returns the list of
    /// block endpoints `m_1 < m_2 < … < m_r = n`.
    pub fn special_block_ends(&self) -> Option<Vec<u8>> {
        let mut ends = Vec::new();
        let mut lo = 1u8;
        while lo <= self.n {
            // Walk the block starting at lo: w(i) = i+1 until the wrap back.
            let mut hi = lo;
            while self.apply(hi) == hi + 1 {
                hi += 1;
            }
            if self.apply(hi) != lo {
                return None;
            }
            ends.push(hi);
            lo = hi + 1;
        }
        Some(ends)
    }

    pub fn is_special_form(&self) -> bool {
        self.special_block_ends().is_some()
    }
}

/// The standard representative of a cycle type: consecutive blocks in weakly
/// decreasing length order, e.g. type `(2,1)` gives `(1 2)(3)`.
pub fn canonical_cycle_form(w: &Permutation) -> Permutation {
    permutation_of_cycle_type(w.n(), &w.cycle_type())
}

/// Builds the block permutation of the given cycle lengths (sorted to weakly
/// decreasing order first).
pub fn permutation_of_cycle_type(n: u8, lengths: &[u8]) -> Permutation {
    let mut lens: Vec<u8> = lengths.to_vec();
    lens.sort_unstable_by(|a, b| b.cmp(a));
    assert_eq!(lens.iter().map(|&l| l as u32).sum::<u32>(), n as u32, "lengths must sum to n");
    let mut images = Vec::with_capacity(n as usize);
    let mut lo = 1u8;
    for &len in &lens {
        let hi = lo + len - 1;
        for i in lo..hi {
            images.push(i + 1);
        }
        images.push(lo);
        lo = hi + 1;
    }
    Permutation { n, images }
}

/// All cycle types (partitions) of `n`, each in weakly decreasing order,
/// enumerated in a deterministic order.
pub fn cycle_types(n: u8) -> Vec<Vec<u8>> {
    fn rec(remaining: u8, max: u8, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        let top = remaining.min(max);
        for part in (1..=top).rev() {
            prefix.push(part);
            rec(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for cyc in self.cycles() {
            let txt: Vec<String> = cyc.iter().map(|v| v.to_string()).collect();
            write!(f, "({})", txt.join(" "))?;
        }
        Ok(())
    }
}
