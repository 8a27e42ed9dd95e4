//! Brute-force enumeration of S-arithmetic sets inside a finite box, as ground
//! truth for the intersection pipeline.

use std::collections::HashSet;

use num_bigint::BigInt;
use thiserror::Error;

use crate::sarith::{GroupElement, SArithSet, SArithUnion, Subgroup};

pub const DEFAULT_LIMIT: u128 = 1_000_000;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("box holds {candidates} candidate tuples, above the limit {limit}")]
    BoxTooLarge { candidates: u128, limit: u128 },
    #[error("index bound must be at least 1")]
    EmptyBox,
}

/// Every index in `1..=n_max`, every subgroup coefficient in `−y_max..=y_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBox {
    pub n_max: u64,
    pub y_max: u64,
}

impl SearchBox {
    pub fn new(n_max: u64, y_max: u64) -> Self {
        SearchBox { n_max, y_max }
    }

    /// Candidate tuples for a set with `slots` indices and `gens` generators.
    pub fn candidates(&self, slots: usize, gens: usize) -> u128 {
        let n = (self.n_max as u128).saturating_pow(slots as u32);
        let y = (2 * self.y_max as u128 + 1).saturating_pow(gens as u32);
        n.saturating_mul(y)
    }
}

pub fn enumerate_members(set: &SArithSet, bx: SearchBox) -> Result<Vec<GroupElement>, OracleError> {
    enumerate_members_limited(set, bx, DEFAULT_LIMIT)
}

/// Distinct members reachable inside the box, in order of first appearance
/// (indices outermost, last slot fastest, then coefficients likewise).
pub fn enumerate_members_limited(set: &SArithSet, bx: SearchBox, limit: u128) -> Result<Vec<GroupElement>, OracleError> {
    if bx.n_max == 0 {
        return Err(OracleError::EmptyBox);
    }
    let amb = set.ambient();
    let g = set.groupless();
    let gens = set.subgroup().generators();
    let candidates = bx.candidates(g.slot_count(), gens.len());
    if candidates > limit {
        return Err(OracleError::BoxTooLarge { candidates, limit });
    }
    let tables: Vec<Vec<BigInt>> = g.terms().iter().map(|t| t.sequence.terms(bx.n_max as usize)).collect();
    let shifts = subgroup_elements(set.subgroup(), bx.y_max);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for_each_tuple(g.slot_count(), 1, bx.n_max as i64, |idx| {
        let mut x = g.offset().clone();
        for (t, table) in g.terms().iter().zip(&tables) {
            x = amb.add(&x, &amb.scale(&table[idx[t.slot] as usize - 1], &t.point));
        }
        for h in &shifts {
            let y = amb.add(&x, h);
            if seen.insert(y.clone()) {
                out.push(y);
            }
        }
    });
    Ok(out)
}

/// `Σ y_k·g_k` over the coefficient box, in enumeration order.
fn subgroup_elements(b: &Subgroup, y_max: u64) -> Vec<GroupElement> {
    let amb = b.ambient();
    let gens = b.generators();
    let mut out = Vec::new();
    let m = y_max as i64;
    for_each_tuple(gens.len(), -m, m, |ys| {
        let mut h = amb.zero();
        for (y, g) in ys.iter().zip(gens) {
            h = amb.add(&h, &amb.scale(&BigInt::from(*y), g));
        }
        out.push(h);
    });
    out
}

/// All tuples in `[lo, hi]^len`, last coordinate fastest.
fn for_each_tuple(len: usize, lo: i64, hi: i64, mut f: impl FnMut(&[i64])) {
    let mut t = vec![lo; len];
    loop {
        f(&t);
        let mut k = len;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if t[k] < hi {
                t[k] += 1;
                break;
            }
            t[k] = lo;
        }
    }
}

/// The enumerated members that lie in `gamma`.
pub fn brute_intersection(set: &SArithSet, gamma: &Subgroup, bx: SearchBox) -> Result<Vec<GroupElement>, OracleError> {
    brute_intersection_limited(set, gamma, bx, DEFAULT_LIMIT)
}

pub fn brute_intersection_limited(
    set: &SArithSet,
    gamma: &Subgroup,
    bx: SearchBox,
    limit: u128,
) -> Result<Vec<GroupElement>, OracleError> {
    let mut members = enumerate_members_limited(set, bx, limit)?;
    members.retain(|x| gamma.contains(x));
    Ok(members)
}

/// `Err` with the first point that no component accepts with indices up to
/// `witness_bound`, in the sense of `contains_bounded`.
pub fn covers(points: &[GroupElement], union: &SArithUnion, witness_bound: u64) -> Result<(), GroupElement> {
    // Coset keys of every reachable groupless value, per component.
    let keys: Vec<HashSet<Vec<BigInt>>> = union
        .iter()
        .map(|c| {
            let g = c.groupless();
            let mut out = HashSet::new();
            for_each_tuple(g.slot_count(), 1, witness_bound as i64, |idx| {
                let idx: Vec<u64> = idx.iter().map(|&n| n as u64).collect();
                out.insert(c.subgroup().coset_key(&g.evaluate(&idx).expect("index count matches")));
            });
            out
        })
        .collect();
    let accepted = |x: &GroupElement| {
        union.iter().zip(&keys).any(|(c, k)| c.ambient().check(x).is_ok() && k.contains(&c.subgroup().coset_key(x)))
    };
    match points.iter().find(|x| !accepted(x)) {
        Some(x) => Err(x.clone()),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lrs::{LinearRecurrence, PowersClosedSet};
    use crate::sarith::{AmbientGroup, GrouplessSArithSet};

    fn z(v: &[i64]) -> GroupElement {
        GroupElement { free: v.iter().map(|&x| BigInt::from(x)).collect(), torsion: Vec::new() }
    }

    fn powers_of_two(rank: usize, points: &[&[i64]], gens: &[&[i64]]) -> SArithSet {
        let amb = AmbientGroup::free(rank);
        let two = LinearRecurrence::from_i64(&[2], &[2]).unwrap();
        let terms = points.iter().map(|p| (z(p), two.clone())).collect();
        let s = PowersClosedSet::new(vec![BigInt::from(2)]).unwrap();
        let u = GrouplessSArithSet::new(amb.clone(), amb.zero(), terms, s).unwrap();
        SArithSet::new(u, Subgroup::new(amb, gens.iter().map(|g| z(g)).collect()).unwrap()).unwrap()
    }

    fn free_values(xs: &[GroupElement]) -> Vec<Vec<i64>> {
        xs.iter().map(|x| x.free.iter().map(|v| i64::try_from(v).unwrap()).collect()).collect()
    }

    #[test]
    fn enumeration_examples() {
        let f = powers_of_two(1, &[&[1]], &[]);
        assert_eq!(free_values(&enumerate_members(&f, SearchBox::new(4, 0)).unwrap()), vec![vec![2], vec![4], vec![8], vec![16]]);
        let f = powers_of_two(1, &[&[1]], &[&[5]]);
        let got: Vec<i64> = free_values(&enumerate_members(&f, SearchBox::new(2, 1)).unwrap()).into_iter().map(|v| v[0]).collect();
        assert_eq!(got, vec![-3, 2, 7, -1, 4, 9]);
        let amb = AmbientGroup::free(1);
        let s = PowersClosedSet::new(vec![BigInt::from(2)]).unwrap();
        let only = SArithSet::from_groupless(GrouplessSArithSet::offset_only(amb, z(&[3]), s).unwrap());
        assert_eq!(enumerate_members(&only, SearchBox::new(7, 3)).unwrap(), vec![z(&[3])]);
    }

    #[test]
    fn intersection_examples() {
        let amb = AmbientGroup::free(1);
        let f = powers_of_two(1, &[&[1]], &[]);
        let three = Subgroup::new(amb.clone(), vec![z(&[3])]).unwrap();
        assert!(brute_intersection(&f, &three, SearchBox::new(12, 0)).unwrap().is_empty());
        let two = Subgroup::new(amb, vec![z(&[2])]).unwrap();
        assert_eq!(brute_intersection(&f, &two, SearchBox::new(4, 0)).unwrap().len(), 4);
        let f = powers_of_two(2, &[&[1, 0], &[0, 1]], &[]);
        let diag = Subgroup::new(AmbientGroup::free(2), vec![z(&[1, 1])]).unwrap();
        let got = free_values(&brute_intersection(&f, &diag, SearchBox::new(5, 0)).unwrap());
        assert_eq!(got, (1..=5).map(|n| vec![1 << n, 1 << n]).collect::<Vec<_>>());
    }

    #[test]
    fn coverage_examples() {
        let f = powers_of_two(1, &[&[1]], &[]);
        let union = SArithUnion::new(vec![f]);
        assert_eq!(covers(&[], &union, 10), Ok(()));
        assert_eq!(covers(&[z(&[2]), z(&[4])], &union, 10), Ok(()));
        assert_eq!(covers(&[z(&[6])], &union, 10), Err(z(&[6])));
    }

    #[test]
    fn box_limit() {
        let f = powers_of_two(2, &[&[1, 0], &[0, 1]], &[&[1, 1], &[1, 0]]);
        let r = enumerate_members_limited(&f, SearchBox::new(12, 12), 1000);
        assert_eq!(r, Err(OracleError::BoxTooLarge { candidates: 144 * 625, limit: 1000 }));
    }

    #[test]
    fn members_reconstruct_and_grow_with_the_box() {
        let f = powers_of_two(2, &[&[1, 2], &[3, -1]], &[&[4, 6]]);
        let gamma = Subgroup::new(AmbientGroup::free(2), vec![z(&[2, 0]), z(&[0, 4])]).unwrap();
        let small = brute_intersection(&f, &gamma, SearchBox::new(4, 2)).unwrap();
        let large = brute_intersection(&f, &gamma, SearchBox::new(6, 3)).unwrap();
        assert!(small.iter().all(|x| large.contains(x)));
        for x in enumerate_members(&f, SearchBox::new(4, 2)).unwrap() {
            assert!(f.contains_bounded(&x, 4));
        }
    }
}
