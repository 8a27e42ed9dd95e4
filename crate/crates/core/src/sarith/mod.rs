//! Finitely generated abelian groups `Z^r ⊕ Z/d_1 ⊕ … ⊕ Z/d_k`, their subgroups,
//! and the S-arithmetic sets living in them.

mod fset;
mod set;

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::intlinalg::{hnf, IntMatrix, Lattice};
use crate::lrs::LrsError;

pub use fset::{fset_to_sarith, make_sf, minimal_polynomial, FSetDescriptor};
pub use set::{GrouplessSArithSet, SArithSet, SArithTerm, SArithUnion};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error(transparent)]
    Lrs(#[from] LrsError),
    #[error("torsion factors must be at least 2 and divide each other in order")]
    InvalidTorsion,
    #[error("element has shape ({got_free}, {got_torsion}), expected ({free}, {torsion})")]
    Shape { free: usize, torsion: usize, got_free: usize, got_torsion: usize },
    #[error("sets live in different ambient groups")]
    AmbientMismatch,
    #[error("sequence {sequence} has a root outside S")]
    Inadmissible { sequence: String },
    #[error("slot {slot} out of range for {count} slots")]
    SlotOutOfRange { slot: usize, count: usize },
    #[error("expected {expected} indices, got {got}")]
    IndexCount { expected: usize, got: usize },
    #[error("Frobenius matrix must be square of size {expected}")]
    NotSquare { expected: usize },
    #[error("the matrix does not satisfy the given polynomial relation")]
    RelationFails,
    #[error("orbit exponent steps must be positive")]
    ZeroStep,
}

/// An element `(free part, torsion part)`; torsion coordinates are kept reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub free: Vec<BigInt>,
    pub torsion: Vec<BigInt>,
}

impl GroupElement {
    pub fn is_zero(&self) -> bool {
        self.free.iter().chain(&self.torsion).all(Zero::is_zero)
    }

    /// Free coordinates followed by torsion coordinates.
    pub fn coords(&self) -> Vec<BigInt> {
        self.free.iter().chain(&self.torsion).cloned().collect()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.free.iter().chain(&self.torsion).map(ToString::to_string).collect();
        write!(f, "({})", items.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AmbientGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
}

impl AmbientGroup {
    pub fn new(free_rank: usize, torsion: Vec<BigInt>) -> Result<Self, ModelError> {
        let two = BigInt::from(2);
        if torsion.iter().any(|d| d < &two) || torsion.windows(2).any(|w| !w[1].is_multiple_of(&w[0])) {
            return Err(ModelError::InvalidTorsion);
        }
        Ok(AmbientGroup { free_rank, torsion })
    }

    /// `Z^r`.
    pub fn free(free_rank: usize) -> Self {
        AmbientGroup { free_rank, torsion: Vec::new() }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion_factors(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// `M = ∏ d_i`.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }

    /// Smallest `e` with `e·t = 0` for every torsion element.
    pub fn torsion_exponent(&self) -> BigInt {
        self.torsion.last().cloned().unwrap_or_else(BigInt::one)
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement { free: vec![BigInt::zero(); self.free_rank], torsion: vec![BigInt::zero(); self.torsion.len()] }
    }

    pub fn element(&self, free: Vec<BigInt>, torsion: Vec<BigInt>) -> Result<GroupElement, ModelError> {
        if free.len() != self.free_rank || torsion.len() != self.torsion.len() {
            return Err(ModelError::Shape {
                free: self.free_rank,
                torsion: self.torsion.len(),
                got_free: free.len(),
                got_torsion: torsion.len(),
            });
        }
        Ok(self.reduce(GroupElement { free, torsion }))
    }

    /// Element with zero torsion part.
    pub fn free_element(&self, free: Vec<BigInt>) -> Result<GroupElement, ModelError> {
        self.element(free, vec![BigInt::zero(); self.torsion.len()])
    }

    pub fn from_i64(&self, free: &[i64], torsion: &[i64]) -> Result<GroupElement, ModelError> {
        self.element(free.iter().map(|&x| x.into()).collect(), torsion.iter().map(|&x| x.into()).collect())
    }

    pub fn check(&self, e: &GroupElement) -> Result<(), ModelError> {
        self.element(e.free.clone(), e.torsion.clone()).map(|_| ())
    }

    fn reduce(&self, mut e: GroupElement) -> GroupElement {
        for (t, d) in e.torsion.iter_mut().zip(&self.torsion) {
            *t = t.mod_floor(d);
        }
        e
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.reduce(GroupElement {
            free: a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect(),
            torsion: a.torsion.iter().zip(&b.torsion).map(|(x, y)| x + y).collect(),
        })
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        self.scale(&-BigInt::one(), a)
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, k: &BigInt, a: &GroupElement) -> GroupElement {
        self.reduce(GroupElement {
            free: a.free.iter().map(|x| k * x).collect(),
            torsion: a.torsion.iter().map(|x| k * x).collect(),
        })
    }
}

impl fmt::Display for AmbientGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z^{}", self.free_rank)?;
        for d in &self.torsion {
            write!(f, " + Z/{d}")?;
        }
        Ok(())
    }
}

/// Subgroup generated by finitely many elements of an ambient group.
#[derive(Clone, Debug)]
pub struct Subgroup {
    ambient: AmbientGroup,
    generators: Vec<GroupElement>,
    /// Generators and torsion relations as one lattice in `Z^{r+k}`.
    lifted: Lattice,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.generators == other.generators
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    pub fn new(ambient: AmbientGroup, generators: Vec<GroupElement>) -> Result<Self, ModelError> {
        let generators = generators
            .into_iter()
            .map(|g| ambient.element(g.free, g.torsion))
            .collect::<Result<Vec<_>, _>>()?;
        let dim = ambient.free_rank + ambient.torsion.len();
        let mut cols: Vec<Vec<BigInt>> = generators.iter().map(GroupElement::coords).collect();
        for (i, d) in ambient.torsion.iter().enumerate() {
            let mut c = vec![BigInt::zero(); dim];
            c[ambient.free_rank + i] = d.clone();
            cols.push(c);
        }
        let lifted = Lattice::from_columns(&cols, dim);
        Ok(Subgroup { ambient, generators, lifted })
    }

    pub fn trivial(ambient: AmbientGroup) -> Self {
        Self::new(ambient, Vec::new()).expect("empty generator list is valid")
    }

    /// A subgroup of `Z^r` given as a lattice.
    pub fn from_lattice(lattice: &Lattice) -> Self {
        let ambient = AmbientGroup::free(lattice.ambient_rank());
        let gens = lattice.basis_columns().into_iter().map(|c| GroupElement { free: c, torsion: Vec::new() }).collect();
        Self::new(ambient, gens).expect("lattice columns have the ambient shape")
    }

    /// The whole ambient group.
    pub fn full(ambient: AmbientGroup) -> Self {
        let mut gens = Vec::new();
        for i in 0..ambient.free_rank {
            let mut e = ambient.zero();
            e.free[i] = BigInt::one();
            gens.push(e);
        }
        for i in 0..ambient.torsion.len() {
            let mut e = ambient.zero();
            e.torsion[i] = BigInt::one();
            gens.push(e);
        }
        Self::new(ambient, gens).expect("unit vectors have the ambient shape")
    }

    pub fn ambient(&self) -> &AmbientGroup {
        &self.ambient
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        self.lifted.contains(&x.coords())
    }

    /// Canonical representative of the coset `x + B`, in free-then-torsion coordinates.
    pub fn coset_key(&self, x: &GroupElement) -> Vec<BigInt> {
        self.lifted.reduce(&x.coords())
    }

    /// `B ∩ Z^r`: the elements with zero torsion part, as a lattice in `Z^r`.
    pub fn free_part(&self) -> Lattice {
        let r = self.ambient.free_rank;
        let k = self.ambient.torsion.len();
        let s = self.generators.len();
        // Integer relations Σ λ_j tor(g_j) + Σ μ_i d_i e_i = 0.
        let mut m = IntMatrix::zeros(k, s + k);
        for (j, g) in self.generators.iter().enumerate() {
            for i in 0..k {
                m[(i, j)] = g.torsion[i].clone();
            }
        }
        for (i, d) in self.ambient.torsion.iter().enumerate() {
            m[(i, s + i)] = d.clone();
        }
        let kernel = hnf(&m).kernel();
        let cols: Vec<Vec<BigInt>> = kernel
            .columns()
            .iter()
            .map(|lam| {
                (0..r)
                    .map(|row| self.generators.iter().zip(lam).map(|(g, l)| &g.free[row] * l).sum())
                    .collect()
            })
            .collect();
        Lattice::from_columns(&cols, r)
    }

    /// One element of the subgroup per coset of `free_part()`, keyed by torsion
    /// part and listed in the order reached by breadth-first search.
    pub fn coset_representatives(&self) -> Vec<GroupElement> {
        let mut seen: BTreeMap<Vec<BigInt>, ()> = BTreeMap::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::from([self.ambient.zero()]);
        seen.insert(self.ambient.zero().torsion, ());
        while let Some(cur) = queue.pop_front() {
            for g in &self.generators {
                let next = self.ambient.add(&cur, g);
                if seen.insert(next.torsion.clone(), ()).is_none() {
                    queue.push_back(next);
                }
            }
            out.push(cur);
        }
        out
    }

    /// Generators as columns of the free part; only meaningful without torsion.
    pub fn free_generator_matrix(&self) -> IntMatrix {
        let cols: Vec<Vec<BigInt>> = self.generators.iter().map(|g| g.free.clone()).collect();
        IntMatrix::from_columns(&cols, self.ambient.free_rank)
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators.iter().map(ToString::to_string).collect();
        write!(f, "span{{{}}}", gens.join(", "))
    }
}
