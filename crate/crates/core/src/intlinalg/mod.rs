//! Exact integer and rational linear algebra.

pub mod lattice;
pub mod linsys;
mod matrix;
pub mod normal_form;
pub mod rational;

pub use lattice::{solve_congruences, CongruenceCondition, Lattice, LinearCondition, MembershipConditions};
pub use linsys::{
    for_each_choice, integrality_families, integrality_families_capped, joint_profile, parametric_solve, slot_classes,
    solvability_relations, IntegralityFamily, ParametricSolution, SequenceRhs,
};
pub use matrix::IntMatrix;
pub use normal_form::{egcd, hnf, snf, solve_integer_system, HermiteForm, SmithForm};
