//! Syntax tree of an instance document. Every node keeps its source position.

use num_bigint::BigInt;

use crate::diag::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Name {
    pub text: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Int {
    pub value: BigInt,
    pub span: Span,
}

/// A bracketed `[…]` list or parenthesized `(…)` tuple of integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ints {
    pub items: Vec<Int>,
    pub span: Span,
}

impl Ints {
    pub fn values(&self) -> Vec<BigInt> {
        self.items.iter().map(|i| i.value.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub sequence: Name,
    pub point: Name,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Group { name: Option<Name>, rank: Int, torsion: Option<Ints>, span: Span },
    SBase { name: Name, generators: Ints },
    Seq { name: Name, rec: Ints, init: Ints },
    Point { name: Name, coords: Ints },
    Groupless { name: Name, terms: Vec<Term>, offset: Option<Name> },
    Set { name: Name, base: Name, span: Option<Vec<Ints>> },
    Subgroup { name: Name, generators: Vec<Ints> },
}

impl Decl {
    /// The declared name, if the declaration has one.
    pub fn name(&self) -> Option<&Name> {
        match self {
            Decl::Group { name, .. } => name.as_ref(),
            Decl::SBase { name, .. }
            | Decl::Seq { name, .. }
            | Decl::Point { name, .. }
            | Decl::Groupless { name, .. }
            | Decl::Set { name, .. }
            | Decl::Subgroup { name, .. } => Some(name),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    Intersect { set: Name, subgroup: Name },
    Period { sequence: Name, modulus: Int },
    /// `Σ_i rows[ℓ][i]·s_i(n_i) = 0`, one independent index per sequence.
    SolveExpo { sequences: Vec<Name>, rows: Vec<Ints>, span: Span },
    Check { set: Name, point: Ints },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub decls: Vec<Decl>,
    pub queries: Vec<Query>,
}
