use std::fmt;

use num_bigint::BigInt;

use super::{AmbientGroup, GroupElement, ModelError, Subgroup};
use crate::lrs::{LinearRecurrence, PowersClosedSet};

/// `a_n·P` where `n` is the index drawn for `slot`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SArithTerm {
    pub point: GroupElement,
    pub sequence: LinearRecurrence,
    pub slot: usize,
}

/// `{ offset + Σ a^{(i)}_{n_{slot(i)}}·P_i : every slot index ≥ 1 }`.
///
/// Terms that share a slot read their sequences at the same index; with one slot
/// per term this is the usual independent-index form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrouplessSArithSet {
    ambient: AmbientGroup,
    offset: GroupElement,
    terms: Vec<SArithTerm>,
    slot_count: usize,
    s: PowersClosedSet,
}

impl GrouplessSArithSet {
    /// One independent index per term.
    pub fn new(
        ambient: AmbientGroup,
        offset: GroupElement,
        terms: Vec<(GroupElement, LinearRecurrence)>,
        s: PowersClosedSet,
    ) -> Result<Self, ModelError> {
        let count = terms.len();
        let terms = terms
            .into_iter()
            .enumerate()
            .map(|(slot, (point, sequence))| SArithTerm { point, sequence, slot })
            .collect();
        Self::with_slots(ambient, offset, terms, count, s)
    }

    pub fn with_slots(
        ambient: AmbientGroup,
        offset: GroupElement,
        terms: Vec<SArithTerm>,
        slot_count: usize,
        s: PowersClosedSet,
    ) -> Result<Self, ModelError> {
        let offset = ambient.element(offset.free, offset.torsion)?;
        let mut checked = Vec::with_capacity(terms.len());
        for t in terms {
            if t.slot >= slot_count {
                return Err(ModelError::SlotOutOfRange { slot: t.slot, count: slot_count });
            }
            if !t.sequence.is_admissible(&s)? {
                return Err(ModelError::Inadmissible { sequence: t.sequence.to_string() });
            }
            let point = ambient.element(t.point.free, t.point.torsion)?;
            checked.push(SArithTerm { point, sequence: t.sequence, slot: t.slot });
        }
        Ok(GrouplessSArithSet { ambient, offset, terms: checked, slot_count, s })
    }

    pub fn offset_only(ambient: AmbientGroup, offset: GroupElement, s: PowersClosedSet) -> Result<Self, ModelError> {
        Self::with_slots(ambient, offset, Vec::new(), 0, s)
    }

    pub fn ambient(&self) -> &AmbientGroup {
        &self.ambient
    }

    pub fn offset(&self) -> &GroupElement {
        &self.offset
    }

    pub fn terms(&self) -> &[SArithTerm] {
        &self.terms
    }

    pub fn slot_count(&self) -> usize {
        self.slot_count
    }

    pub fn s(&self) -> &PowersClosedSet {
        &self.s
    }

    /// `offset + Σ a^{(i)}_{n_{slot(i)}}·P_i`, one index per slot.
    pub fn evaluate(&self, indices: &[u64]) -> Result<GroupElement, ModelError> {
        if indices.len() != self.slot_count {
            return Err(ModelError::IndexCount { expected: self.slot_count, got: indices.len() });
        }
        assert!(indices.iter().all(|&n| n >= 1), "indices start at 1");
        let mut acc = self.offset.clone();
        for t in &self.terms {
            let a = t.sequence.term(indices[t.slot]);
            acc = self.ambient.add(&acc, &self.ambient.scale(&a, &t.point));
        }
        Ok(acc)
    }

    pub fn translate(&self, delta: &GroupElement) -> Result<Self, ModelError> {
        self.ambient.check(delta)?;
        let mut out = self.clone();
        out.offset = self.ambient.add(&self.offset, delta);
        Ok(out)
    }
}

impl fmt::Display for GrouplessSArithSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.offset)?;
        for t in &self.terms {
            write!(f, " + [{}](n{})·{}", t.sequence, t.slot, t.point)?;
        }
        Ok(())
    }
}

/// `U + B` for a groupless set `U` and a subgroup `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SArithSet {
    groupless: GrouplessSArithSet,
    subgroup: Subgroup,
}

impl SArithSet {
    pub fn new(groupless: GrouplessSArithSet, subgroup: Subgroup) -> Result<Self, ModelError> {
        if groupless.ambient() != subgroup.ambient() {
            return Err(ModelError::AmbientMismatch);
        }
        Ok(SArithSet { groupless, subgroup })
    }

    pub fn from_groupless(groupless: GrouplessSArithSet) -> Self {
        let subgroup = Subgroup::trivial(groupless.ambient().clone());
        SArithSet { groupless, subgroup }
    }

    pub fn groupless(&self) -> &GrouplessSArithSet {
        &self.groupless
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn ambient(&self) -> &AmbientGroup {
        self.groupless.ambient()
    }

    pub fn s(&self) -> &PowersClosedSet {
        self.groupless.s()
    }

    pub fn slot_count(&self) -> usize {
        self.groupless.slot_count()
    }

    pub fn evaluate(&self, indices: &[u64]) -> Result<GroupElement, ModelError> {
        self.groupless.evaluate(indices)
    }

    /// Groupless value plus `Σ y_k·g_k` over the subgroup generators.
    pub fn element(&self, indices: &[u64], coeffs: &[BigInt]) -> Result<GroupElement, ModelError> {
        let gens = self.subgroup.generators();
        if coeffs.len() != gens.len() {
            return Err(ModelError::IndexCount { expected: gens.len(), got: coeffs.len() });
        }
        let amb = self.ambient();
        let mut acc = self.evaluate(indices)?;
        for (y, g) in coeffs.iter().zip(gens) {
            acc = amb.add(&acc, &amb.scale(y, g));
        }
        Ok(acc)
    }

    pub fn translate(&self, delta: &GroupElement) -> Result<Self, ModelError> {
        Ok(SArithSet { groupless: self.groupless.translate(delta)?, subgroup: self.subgroup.clone() })
    }

    /// Whether `x = evaluate(n) + h` for some `h` in the subgroup and some indices
    /// `n_j ≤ n_max`. Subgroup membership is exact; only the indices are bounded.
    pub fn contains_bounded(&self, x: &GroupElement, n_max: u64) -> bool {
        assert!(n_max >= 1);
        self.witness_bounded(x, n_max).is_some()
    }

    /// Indices witnessing [`contains_bounded`](Self::contains_bounded), smallest first
    /// in lexicographic order.
    pub fn witness_bounded(&self, x: &GroupElement, n_max: u64) -> Option<Vec<u64>> {
        let amb = self.ambient();
        if amb.check(x).is_err() {
            return None;
        }
        let g = &self.groupless;
        let tables: Vec<Vec<BigInt>> = g.terms.iter().map(|t| t.sequence.terms(n_max as usize)).collect();
        let base = amb.sub(x, &g.offset);
        let mut idx = vec![1u64; g.slot_count];
        loop {
            let mut rest = base.clone();
            for (t, table) in g.terms.iter().zip(&tables) {
                let a = &table[idx[t.slot] as usize - 1];
                rest = amb.sub(&rest, &amb.scale(a, &t.point));
            }
            if self.subgroup.contains(&rest) {
                return Some(idx);
            }
            let mut k = g.slot_count;
            loop {
                if k == 0 {
                    return None;
                }
                k -= 1;
                if idx[k] < n_max {
                    idx[k] += 1;
                    break;
                }
                idx[k] = 1;
            }
        }
    }
}

impl fmt::Display for SArithSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}", self.groupless, self.subgroup)
    }
}

/// A finite union of S-arithmetic sets; the empty union is the empty set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SArithUnion {
    pub components: Vec<SArithSet>,
}

impl SArithUnion {
    pub fn new(components: Vec<SArithSet>) -> Self {
        SArithUnion { components }
    }

    pub fn empty() -> Self {
        SArithUnion::default()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SArithSet> {
        self.components.iter()
    }

    pub fn contains_bounded(&self, x: &GroupElement, n_max: u64) -> bool {
        self.components.iter().any(|c| c.contains_bounded(x, n_max))
    }

    /// Drops structurally repeated components, keeping first occurrences.
    pub fn dedup(&mut self) {
        let mut kept: Vec<SArithSet> = Vec::with_capacity(self.components.len());
        for c in self.components.drain(..) {
            if !kept.contains(&c) {
                kept.push(c);
            }
        }
        self.components = kept;
    }

    pub fn extend(&mut self, other: SArithUnion) {
        self.components.extend(other.components);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pow(base: i64) -> LinearRecurrence {
        LinearRecurrence::from_i64(&[base], &[base]).unwrap()
    }

    fn s_of(gens: &[i64]) -> PowersClosedSet {
        PowersClosedSet::new(gens.iter().map(|&g| BigInt::from(g)).collect()).unwrap()
    }

    fn powers_of_two() -> SArithSet {
        let z = AmbientGroup::free(1);
        let u = GrouplessSArithSet::new(z.clone(), z.zero(), vec![(z.from_i64(&[1], &[]).unwrap(), pow(2))], s_of(&[2])).unwrap();
        SArithSet::from_groupless(u)
    }

    #[test]
    fn evaluate_examples() {
        let z2 = AmbientGroup::free(2);
        let u = GrouplessSArithSet::new(
            z2.clone(),
            z2.zero(),
            vec![(z2.from_i64(&[1, 0], &[]).unwrap(), pow(2)), (z2.from_i64(&[0, 1], &[]).unwrap(), pow(3))],
            s_of(&[2, 3]),
        )
        .unwrap();
        assert_eq!(u.evaluate(&[2, 1]).unwrap(), z2.from_i64(&[4, 3], &[]).unwrap());

        let z = AmbientGroup::free(1);
        let p = z.from_i64(&[3], &[]).unwrap();
        let only = GrouplessSArithSet::offset_only(z.clone(), p.clone(), s_of(&[])).unwrap();
        assert_eq!(only.evaluate(&[]).unwrap(), p);

        let five = LinearRecurrence::from_i64(&[1], &[5]).unwrap();
        let c = GrouplessSArithSet::new(z.clone(), z.zero(), vec![(z.from_i64(&[1], &[]).unwrap(), five)], s_of(&[])).unwrap();
        assert_eq!(c.evaluate(&[9]).unwrap(), z.from_i64(&[5], &[]).unwrap());
    }

    #[test]
    fn admissibility_checked_at_construction() {
        let z = AmbientGroup::free(1);
        let r = GrouplessSArithSet::new(z.clone(), z.zero(), vec![(z.from_i64(&[1], &[]).unwrap(), pow(3))], s_of(&[2]));
        assert!(matches!(r, Err(ModelError::Inadmissible { .. })));
    }

    #[test]
    fn translate_examples() {
        let z = AmbientGroup::free(1);
        let f = powers_of_two();
        assert_eq!(f.translate(&z.zero()).unwrap(), f);
        let t = f.translate(&z.from_i64(&[5], &[]).unwrap()).unwrap();
        assert_eq!(t.groupless().offset(), &z.from_i64(&[5], &[]).unwrap());
        assert_eq!(t.groupless().terms(), f.groupless().terms());

        let three = Subgroup::new(z.clone(), vec![z.from_i64(&[3], &[]).unwrap()]).unwrap();
        let g = SArithSet::new(GrouplessSArithSet::offset_only(z.clone(), z.zero(), s_of(&[])).unwrap(), three.clone()).unwrap();
        let t = g.translate(&z.from_i64(&[1], &[]).unwrap()).unwrap();
        assert_eq!(t.subgroup(), &three);
        assert_eq!(t.groupless().offset(), &z.from_i64(&[1], &[]).unwrap());
    }

    #[test]
    fn bounded_containment_examples() {
        let z = AmbientGroup::free(1);
        let f = powers_of_two();
        assert!(f.contains_bounded(&z.from_i64(&[8], &[]).unwrap(), 5));
        assert!(!f.contains_bounded(&z.from_i64(&[6], &[]).unwrap(), 20));
        let five = Subgroup::new(z.clone(), vec![z.from_i64(&[5], &[]).unwrap()]).unwrap();
        let g = SArithSet::new(f.groupless().clone(), five).unwrap();
        assert!(g.contains_bounded(&z.from_i64(&[7], &[]).unwrap(), 5));
        assert_eq!(g.witness_bounded(&z.from_i64(&[7], &[]).unwrap(), 5), Some(vec![1]));
    }

    #[test]
    fn shared_slots_read_one_index() {
        let z2 = AmbientGroup::free(2);
        let terms = vec![
            SArithTerm { point: z2.from_i64(&[1, 0], &[]).unwrap(), sequence: pow(2), slot: 0 },
            SArithTerm { point: z2.from_i64(&[0, 1], &[]).unwrap(), sequence: pow(4), slot: 0 },
        ];
        let u = GrouplessSArithSet::with_slots(z2.clone(), z2.zero(), terms, 1, s_of(&[2])).unwrap();
        assert_eq!(u.evaluate(&[3]).unwrap(), z2.from_i64(&[8, 64], &[]).unwrap());
    }
}
