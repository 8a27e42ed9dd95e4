use num_bigint::BigInt;

use crate::expo::SolutionFamily;
use crate::index::IndexMap;
use crate::intlinalg::IntMatrix;

/// One recorded decision on the way from the input to an output component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    /// Coset of the input subgroup and the matching coset of the target,
    /// with the slot classes on which the torsion equation holds.
    Torsion { coset: usize, target_coset: usize, slot_maps: Vec<IndexMap> },
    /// A congruence condition solved on one joint residue class: the subgroup
    /// coordinates become `y_offset + y_lattice·y'`.
    Congruence { condition: usize, slot_maps: Vec<IndexMap>, y_offset: Vec<BigInt>, y_lattice: IntMatrix },
    /// The linear system `E·y = F·a + f`, its solvability relations `G`, the
    /// exponential system `Z = G·F`, `z = G·f`, and the chosen index family.
    Linear {
        e: IntMatrix,
        f: IntMatrix,
        f0: Vec<BigInt>,
        g: IntMatrix,
        z: IntMatrix,
        z0: Vec<BigInt>,
        family: SolutionFamily,
        /// Set when the family came from a bounded search only.
        bounded: Option<u64>,
    },
    /// Slot classes and free-variable lattice that make the bound variables integral.
    Integrality { slot_maps: Vec<IndexMap>, free: Vec<usize>, y_offset: Vec<BigInt>, y_lattice: IntMatrix },
    /// Final renumbering of the surviving slots.
    Assemble { slot_maps: Vec<IndexMap>, generators: usize },
}

/// Everything recorded while intersecting: one event path per output component,
/// in output order, plus branch counts per stage.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StageTrace {
    pub paths: Vec<Vec<TraceEvent>>,
    pub torsion_branches: usize,
    pub congruence_branches: usize,
    pub linear_branches: usize,
    /// Roots that forced a bounded fallback somewhere.
    pub unsupported_roots: Vec<BigInt>,
}

impl StageTrace {
    pub fn is_complete(&self) -> bool {
        self.unsupported_roots.is_empty()
    }

    pub(crate) fn absorb(&mut self, other: StageTrace) {
        self.paths.extend(other.paths);
        self.torsion_branches += other.torsion_branches;
        self.congruence_branches += other.congruence_branches;
        self.linear_branches += other.linear_branches;
        for r in other.unsupported_roots {
            if !self.unsupported_roots.contains(&r) {
                self.unsupported_roots.push(r);
            }
        }
        self.unsupported_roots.sort();
    }
}
