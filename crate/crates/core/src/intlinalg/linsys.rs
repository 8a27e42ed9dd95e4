//! Linear systems `E·y = c` whose right-hand side is built from sequence terms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::lattice::{solve_congruences, Lattice};
use super::normal_form::hnf;
use super::rational::{self, common_denominator};
use super::IntMatrix;
use crate::index::IndexMap;
use crate::lrs::{LinearRecurrence, LrsError};

/// Rows `g` with `g·c = 0` exactly when `E·y = c` has a rational solution.
///
/// The rows form the Hermite basis of the saturated left kernel of `E`, so the
/// result is canonical.
pub fn solvability_relations(e: &IntMatrix) -> IntMatrix {
    let kernel = hnf(&e.transpose()).kernel();
    let canonical = hnf(&kernel).basis();
    canonical.transpose()
}

/// General rational solution of `E·y = c`, valid whenever `c` satisfies the
/// solvability relations.
///
/// Pivot columns (the leftmost independent set) are the bound variables; every
/// other column is free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParametricSolution {
    pub vars: usize,
    pub rhs_len: usize,
    pub free: Vec<usize>,
    pub bound: Vec<usize>,
    /// `free_coeffs[j][k]`: coefficient of `y_{free[k]}` in the expression for `y_{bound[j]}`.
    pub free_coeffs: Vec<Vec<BigRational>>,
    /// `rhs_coeffs[j][h]`: coefficient of `c_h` in the expression for `y_{bound[j]}`.
    pub rhs_coeffs: Vec<Vec<BigRational>>,
}

impl ParametricSolution {
    /// Full solution vector for given free values and right-hand side.
    pub fn evaluate(&self, free_values: &[BigRational], rhs: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(free_values.len(), self.free.len());
        assert_eq!(rhs.len(), self.rhs_len);
        let mut y = vec![BigRational::zero(); self.vars];
        for (k, &f) in self.free.iter().enumerate() {
            y[f] = free_values[k].clone();
        }
        for (j, &b) in self.bound.iter().enumerate() {
            let from_free: BigRational = self.free_coeffs[j].iter().zip(free_values).map(|(a, x)| a * x).sum();
            let from_rhs: BigRational = self.rhs_coeffs[j].iter().zip(rhs).map(|(a, x)| a * x).sum();
            y[b] = from_free + from_rhs;
        }
        y
    }

    /// Least common denominator of every coefficient.
    pub fn denominator(&self) -> BigInt {
        common_denominator(self.free_coeffs.iter().chain(&self.rhs_coeffs).flatten())
    }

    /// The free-variable coefficients as an integer matrix scaled by `scale`
    /// (rows = bound variables). Panics if `scale` does not clear them.
    pub fn scaled_free_matrix(&self, scale: &BigInt) -> IntMatrix {
        scaled(&self.free_coeffs, self.free.len(), scale)
    }

    /// The right-hand-side coefficients scaled by `scale`.
    pub fn scaled_rhs_matrix(&self, scale: &BigInt) -> IntMatrix {
        scaled(&self.rhs_coeffs, self.rhs_len, scale)
    }
}

fn scaled(rows: &[Vec<BigRational>], cols: usize, scale: &BigInt) -> IntMatrix {
    let s = BigRational::from_integer(scale.clone());
    let data = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    let v = x * &s;
                    assert!(v.is_integer(), "scale does not clear denominators");
                    v.to_integer()
                })
                .collect()
        })
        .collect();
    IntMatrix::from_rows(data, cols)
}

pub fn parametric_solve(e: &IntMatrix) -> ParametricSolution {
    let a = rational::to_rational(e);
    let out = rational::rref(&a, e.cols());
    let bound = out.pivots.clone();
    let free: Vec<usize> = (0..e.cols()).filter(|c| !bound.contains(c)).collect();
    let free_coeffs = (0..bound.len())
        .map(|i| free.iter().map(|&f| -out.reduced[i][f].clone()).collect())
        .collect();
    let rhs_coeffs = (0..bound.len()).map(|i| out.transform[i].clone()).collect();
    ParametricSolution { vars: e.cols(), rhs_len: e.rows(), free, bound, free_coeffs, rhs_coeffs }
}

/// The right-hand side `c = coeffs·a + constant`, where `a_i` is the term of
/// `sequences[i]` at the index drawn for slot `slots[i]`.
#[derive(Clone, Debug)]
pub struct SequenceRhs<'a> {
    pub coeffs: IntMatrix,
    pub constant: Vec<BigInt>,
    pub sequences: Vec<&'a LinearRecurrence>,
    pub slots: Vec<usize>,
    pub slot_count: usize,
}

/// One way of making every bound variable integral: the slots are restricted by
/// `slot_maps`, and the free variables range over `free_offset + free_lattice`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralityFamily {
    pub slot_maps: Vec<IndexMap>,
    pub slot_count: usize,
    pub free_offset: Vec<BigInt>,
    pub free_lattice: Lattice,
}

/// Residue classes of the index `n ≥ 1` on which every sequence of a slot has
/// constant residue: the pre-periodic indices, then one progression per phase.
pub fn slot_classes(preperiod: u64, period: u64, slot: usize) -> Vec<IndexMap> {
    let mut out: Vec<IndexMap> = (1..=preperiod).map(IndexMap::Fixed).collect();
    for j in 0..period {
        let start = preperiod + 1 + j;
        out.push(IndexMap::affine(slot, period, start as i64 - period as i64));
    }
    out
}

/// Joint `(preperiod, period)` for several sequences read at the same index;
/// each period search is limited to `cap` steps.
pub fn joint_profile(sequences: &[&LinearRecurrence], modulus: &BigInt, cap: u64) -> Result<(u64, u64), LrsError> {
    sequences.iter().try_fold((0, 1), |(rho, pi), s| {
        let p = s.eventual_period_mod_capped(modulus, cap)?;
        Ok((rho.max(p.preperiod), pi.lcm(&p.period)))
    })
}

/// Splits the index slots into residue classes modulo the common denominator and
/// keeps, for each class combination, the coset of free values that makes every
/// bound variable an integer.
pub fn integrality_families(sol: &ParametricSolution, rhs: &SequenceRhs) -> Vec<IntegralityFamily> {
    integrality_families_capped(sol, rhs, u64::MAX).expect("uncapped period search terminates")
}

/// As [`integrality_families`], with the period search limited to `cap` steps.
pub fn integrality_families_capped(
    sol: &ParametricSolution,
    rhs: &SequenceRhs,
    cap: u64,
) -> Result<Vec<IntegralityFamily>, LrsError> {
    let delta = sol.denominator();
    let t = sol.free.len();
    let identity: Vec<IndexMap> = (0..rhs.slot_count).map(IndexMap::identity).collect();
    if delta.is_one() {
        return Ok(vec![IntegralityFamily {
            slot_maps: identity,
            slot_count: rhs.slot_count,
            free_offset: vec![BigInt::zero(); t],
            free_lattice: Lattice::full(t),
        }]);
    }
    let a = sol.scaled_free_matrix(&delta);
    let c = sol.scaled_rhs_matrix(&delta);
    let seq_coeffs = &c * &rhs.coeffs;
    let const_part = c.mul_vec(&rhs.constant);

    // Only slots that actually influence a residue need splitting.
    let mut slot_options: Vec<Vec<IndexMap>> = Vec::with_capacity(rhs.slot_count);
    for slot in 0..rhs.slot_count {
        let members: Vec<usize> = (0..rhs.sequences.len())
            .filter(|&i| rhs.slots[i] == slot && (0..seq_coeffs.rows()).any(|r| !seq_coeffs[(r, i)].is_multiple_of(&delta)))
            .collect();
        if members.is_empty() {
            slot_options.push(vec![IndexMap::identity(slot)]);
            continue;
        }
        let seqs: Vec<&LinearRecurrence> = members.iter().map(|&i| rhs.sequences[i]).collect();
        let (rho, pi) = joint_profile(&seqs, &delta, cap)?;
        slot_options.push(slot_classes(rho, pi, slot));
    }

    let mut families = Vec::new();
    for_each_choice(&slot_options, |choice| {
        let residues: Vec<BigInt> = (0..rhs.sequences.len())
            .map(|i| match choice[rhs.slots[i]] {
                IndexMap::Fixed(n) => rhs.sequences[i].term(n),
                IndexMap::Affine { scale, offset, .. } => rhs.sequences[i].term((scale as i64 + offset) as u64),
            })
            .collect();
        let target: Vec<BigInt> = seq_coeffs
            .mul_vec(&residues)
            .iter()
            .zip(&const_part)
            .map(|(x, k)| -(x + k))
            .collect();
        if let Some((y0, lattice)) = solve_congruences(&a, &target, &delta) {
            let (maps, count) = crate::index::compact(choice);
            families.push(IntegralityFamily { slot_maps: maps, slot_count: count, free_offset: y0, free_lattice: lattice });
        }
    });
    Ok(families)
}

/// Calls `f` on every element of the cartesian product, in lexicographic order.
pub fn for_each_choice<T: Clone>(options: &[Vec<T>], mut f: impl FnMut(&[T])) {
    if options.iter().any(Vec::is_empty) {
        return;
    }
    let mut idx = vec![0usize; options.len()];
    let mut current: Vec<T> = options.iter().map(|o| o[0].clone()).collect();
    loop {
        f(&current);
        let mut k = options.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < options[k].len() {
                current[k] = options[k][idx[k]].clone();
                break;
            }
            idx[k] = 0;
            current[k] = options[k][0].clone();
        }
    }
}
