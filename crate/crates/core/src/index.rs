//! Reparameterizations of sequence indices.
//!
//! An S-arithmetic set draws one positive index per *slot*; several terms may
//! share a slot. Every closure step in the intersection algorithm rewrites the
//! slots through maps `n ↦ scale·k + offset` (or pins them to a constant).

use std::fmt;

/// Where an index goes under a substitution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexMap {
    /// The index is pinned to a positive value.
    Fixed(u64),
    /// `n = scale·k + offset` with `k ≥ 1` ranging over the new slot `slot`.
    /// Invariant: `scale ≥ 1` and `scale + offset ≥ 1`.
    Affine { slot: usize, scale: u64, offset: i64 },
}

impl IndexMap {
    pub fn identity(slot: usize) -> Self {
        IndexMap::Affine { slot, scale: 1, offset: 0 }
    }

    /// Builds an affine map, collapsing `scale = 0` to a fixed index.
    pub fn affine(slot: usize, scale: u64, offset: i64) -> Self {
        if scale == 0 {
            assert!(offset >= 1, "fixed index must be positive");
            return IndexMap::Fixed(offset as u64);
        }
        assert!(scale as i64 + offset >= 1, "affine index map must stay positive");
        IndexMap::Affine { slot, scale, offset }
    }

    /// `(scale, offset)` in the sense of `n = scale·k + offset`; fixed maps have scale 0.
    pub fn scale_offset(&self) -> (u64, i64) {
        match *self {
            IndexMap::Fixed(n) => (0, n as i64),
            IndexMap::Affine { scale, offset, .. } => (scale, offset),
        }
    }

    pub fn slot(&self) -> Option<usize> {
        match *self {
            IndexMap::Fixed(_) => None,
            IndexMap::Affine { slot, .. } => Some(slot),
        }
    }

    /// Evaluates the map given values for the new slots.
    pub fn apply(&self, values: &[u64]) -> u64 {
        match *self {
            IndexMap::Fixed(n) => n,
            IndexMap::Affine { slot, scale, offset } => (scale as i64 * values[slot] as i64 + offset) as u64,
        }
    }

    /// `self` followed by `next`, where `next[j]` rewrites slot `j`.
    pub fn then(&self, next: &[IndexMap]) -> IndexMap {
        match *self {
            IndexMap::Fixed(n) => IndexMap::Fixed(n),
            IndexMap::Affine { slot, scale, offset } => match next[slot] {
                IndexMap::Fixed(m) => IndexMap::Fixed((scale as i64 * m as i64 + offset) as u64),
                IndexMap::Affine { slot: s2, scale: a2, offset: b2 } => {
                    IndexMap::affine(s2, scale * a2, scale as i64 * b2 + offset)
                }
            },
        }
    }

    /// Renames the target slot.
    pub fn relabel(&self, f: impl Fn(usize) -> usize) -> IndexMap {
        match *self {
            IndexMap::Fixed(n) => IndexMap::Fixed(n),
            IndexMap::Affine { slot, scale, offset } => IndexMap::Affine { slot: f(slot), scale, offset },
        }
    }
}

impl fmt::Display for IndexMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            IndexMap::Fixed(n) => write!(f, "{n}"),
            IndexMap::Affine { slot, scale, offset } => {
                if scale != 1 {
                    write!(f, "{scale}*")?;
                }
                write!(f, "k{slot}")?;
                match offset {
                    0 => Ok(()),
                    o if o > 0 => write!(f, "+{o}"),
                    o => write!(f, "{o}"),
                }
            }
        }
    }
}

/// Composes a whole slot substitution with the next one.
pub fn compose(first: &[IndexMap], next: &[IndexMap]) -> Vec<IndexMap> {
    first.iter().map(|m| m.then(next)).collect()
}

/// Renumbers the slots used by `maps` to `0..count` in order of first use.
/// Returns the relabelled maps and the number of slots still in use.
pub fn compact(maps: &[IndexMap]) -> (Vec<IndexMap>, usize) {
    let mut order: Vec<usize> = Vec::new();
    for m in maps {
        if let Some(s) = m.slot() {
            if !order.contains(&s) {
                order.push(s);
            }
        }
    }
    let out = maps
        .iter()
        .map(|m| m.relabel(|s| order.iter().position(|&x| x == s).unwrap()))
        .collect();
    (out, order.len())
}
