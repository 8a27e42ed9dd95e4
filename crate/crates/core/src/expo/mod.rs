//! Systems `Σ_i z_{ℓ,i}·a^{(i)}_{n_{v(i)}} + k_ℓ = 0` over positive indices, for
//! sequences whose roots are `±1` or `±` powers of one base per equation.
//!
//! After closed forms are substituted, an equation becomes a sum of terms
//! `c·b^{x}` whose exponents are affine in the unknown indices. In a vanishing
//! sum sorted by exponent, the prefix sums `P` obey `b^{next gap} | P`, so each
//! group of terms that cancels has a bounded internal shape. We enumerate those
//! shapes and solve the resulting two-variable linear constraints exactly.

mod family;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::intlinalg::IntMatrix;
use crate::lrs::{ClosedForm, LinearRecurrence, LrsError};

pub use family::{families_to_index_sets, Lin, Relation, SolutionFamily, VarConstraint};
use family::Forms;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ExpoError {
    #[error("roots {roots:?} are not powers of a common base")]
    UnsupportedRoots { roots: Vec<BigInt> },
    #[error(transparent)]
    Lrs(#[from] LrsError),
    #[error("system dimensions disagree: {0}")]
    Dimension(String),
    #[error("family constraints are contradictory")]
    InconsistentFamily,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpoSystem {
    sequences: Vec<LinearRecurrence>,
    coefficients: IntMatrix,
    constants: Vec<BigInt>,
    variables: Vec<usize>,
    var_count: usize,
}

impl ExpoSystem {
    /// `Σ_i z_{ℓ,i}·a^{(i)}_{n_i} = 0` with an independent index per sequence.
    pub fn new(sequences: Vec<LinearRecurrence>, coefficients: IntMatrix) -> Result<Self, ExpoError> {
        let m = sequences.len();
        let w = coefficients.rows();
        Self::with_structure(sequences, coefficients, vec![BigInt::zero(); w], (0..m).collect(), m)
    }

    /// General form: sequence `i` is read at variable `variables[i]`, and equation
    /// `ℓ` carries the constant `constants[ℓ]`.
    pub fn with_structure(
        sequences: Vec<LinearRecurrence>,
        coefficients: IntMatrix,
        constants: Vec<BigInt>,
        variables: Vec<usize>,
        var_count: usize,
    ) -> Result<Self, ExpoError> {
        if coefficients.cols() != sequences.len() && coefficients.rows() > 0 {
            return Err(ExpoError::Dimension(format!(
                "{} coefficient columns for {} sequences",
                coefficients.cols(),
                sequences.len()
            )));
        }
        if constants.len() != coefficients.rows() {
            return Err(ExpoError::Dimension(format!("{} constants for {} equations", constants.len(), coefficients.rows())));
        }
        if variables.len() != sequences.len() || variables.iter().any(|&v| v >= var_count) {
            return Err(ExpoError::Dimension("variable assignment out of range".into()));
        }
        Ok(ExpoSystem { sequences, coefficients, constants, variables, var_count })
    }

    pub fn sequences(&self) -> &[LinearRecurrence] {
        &self.sequences
    }

    pub fn coefficients(&self) -> &IntMatrix {
        &self.coefficients
    }

    pub fn constants(&self) -> &[BigInt] {
        &self.constants
    }

    pub fn variables(&self) -> &[usize] {
        &self.variables
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn equation_count(&self) -> usize {
        self.coefficients.rows()
    }

    /// Left-hand side of equation `l` at the given variable values.
    pub fn residual(&self, l: usize, values: &[u64]) -> BigInt {
        let mut acc = self.constants[l].clone();
        for (i, seq) in self.sequences.iter().enumerate() {
            let z = &self.coefficients[(l, i)];
            if !z.is_zero() {
                acc += z * seq.term(values[self.variables[i]]);
            }
        }
        acc
    }

    pub fn is_solution(&self, values: &[u64]) -> bool {
        (0..self.equation_count()).all(|l| self.residual(l, values).is_zero())
    }
}

impl fmt::Display for ExpoSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in 0..self.equation_count() {
            let mut parts = Vec::new();
            for i in 0..self.sequences.len() {
                let z = &self.coefficients[(l, i)];
                if !z.is_zero() {
                    parts.push(format!("{z}·s{i}(n{})", self.variables[i]));
                }
            }
            if !self.constants[l].is_zero() {
                parts.push(self.constants[l].to_string());
            }
            if parts.is_empty() {
                parts.push("0".into());
            }
            writeln!(f, "{} = 0", parts.join(" + "))?;
        }
        Ok(())
    }
}

/// `|r| = b^e` with `b` not a perfect power; `None` for `|r| ≤ 1`.
pub fn primitive_base(r: &BigInt) -> Option<(BigInt, u32)> {
    let a = r.abs();
    if a <= BigInt::one() {
        return None;
    }
    for e in (2..=a.bits() as u32).rev() {
        let root = a.nth_root(e);
        if root.pow(e) == a {
            let (b, inner) = primitive_base(&root).unwrap_or((root, 1));
            return Some((b, inner * e));
        }
    }
    Some((a, 1))
}

/// Smallest `B` with `b^B ≥ Σ|c|`: adjacent exponents inside a vanishing cluster
/// never differ by more than this.
pub fn cluster_gap_bound(coeffs: &[BigInt], base: &BigInt) -> u64 {
    let total: BigInt = coeffs.iter().map(Signed::abs).sum();
    let mut bound = 0;
    let mut power = BigInt::one();
    while power < total {
        power *= base;
        bound += 1;
    }
    bound
}

/// `b`-adic valuation of a nonzero integer.
fn valuation(x: &BigInt, b: &BigInt) -> u64 {
    let mut v = 0;
    let mut y = x.clone();
    loop {
        let (q, r) = y.div_rem(b);
        if !r.is_zero() {
            return v;
        }
        y = q;
        v += 1;
    }
}

/// One exponential term `coeff·b^{form}` of an equation.
#[derive(Clone, Debug)]
struct Atom {
    coeff: BigInt,
    form: usize,
}

/// Exact solution set as a finite list of families.
pub fn solve(sys: &ExpoSystem) -> Result<Vec<SolutionFamily>, ExpoError> {
    let closed: Vec<ClosedForm> = sys
        .sequences
        .iter()
        .map(|s| {
            s.closed_form().map_err(|e| match e {
                LrsError::NotSplit => ExpoError::UnsupportedRoots { roots: Vec::new() },
                other => other.into(),
            })
        })
        .collect::<Result<_, _>>()?;
    let mut states = vec![Forms::identity(sys.var_count)];
    for l in 0..sys.equation_count() {
        let mut next = Vec::new();
        for st in states {
            solve_equation(sys, &closed, l, st, &mut next)?;
        }
        states = dedup_states(next);
        if states.is_empty() {
            break;
        }
    }
    let mut families: Vec<SolutionFamily> = Vec::new();
    for st in states {
        let fam = SolutionFamily::from_forms(&st.forms[..sys.var_count]);
        if !families.contains(&fam) {
            families.push(fam);
        }
    }
    Ok(families)
}

fn dedup_states(states: Vec<Forms>) -> Vec<Forms> {
    let mut out: Vec<Forms> = Vec::new();
    for mut st in states {
        st.compact();
        if !out.contains(&st) {
            out.push(st);
        }
    }
    out
}

fn solve_equation(sys: &ExpoSystem, closed: &[ClosedForm], l: usize, st: Forms, out: &mut Vec<Forms>) -> Result<(), ExpoError> {
    let active: Vec<usize> = (0..sys.sequences.len()).filter(|&i| !sys.coefficients[(l, i)].is_zero()).collect();
    let mut base: Option<BigInt> = None;
    let mut roots_seen = Vec::new();
    for &i in &active {
        for (r, _) in &closed[i].terms {
            roots_seen.push(r.clone());
            if let Some((b, _)) = primitive_base(r) {
                match &base {
                    None => base = Some(b),
                    Some(b0) if *b0 == b => {}
                    Some(_) => return Err(ExpoError::UnsupportedRoots { roots: roots_seen }),
                }
            }
        }
    }
    // Parameters whose parity decides the sign of a negative root.
    let mut split: Vec<usize> = Vec::new();
    for &i in &active {
        let form = st.forms[sys.variables[i]];
        if let Some(p) = form.param {
            if form.coef % 2 != 0 && closed[i].roots().any(|r| r.is_negative()) && !split.contains(&p) {
                split.push(p);
            }
        }
    }
    let mut variants = vec![st];
    for &p in &split {
        variants = variants
            .into_iter()
            .flat_map(|v| {
                (0..2).map(move |eps| {
                    let mut w = v.clone();
                    w.substitute(p, Lin::new(2, Some(p), eps));
                    w
                })
            })
            .collect();
    }
    for mut st in variants {
        let b = base.clone().unwrap_or_else(|| BigInt::from(2));
        let atoms = build_atoms(sys, closed, l, &active, &mut st, &b);
        let Some(atoms) = atoms else { continue };
        let remaining: Vec<usize> = (0..atoms.len()).collect();
        let mut solved = Vec::new();
        clusters(st, &atoms, remaining, &b, &mut solved);
        for mut s in solved {
            s.forms.truncate(sys.var_count);
            out.push(s);
        }
    }
    Ok(())
}

/// Expands equation `l` into atoms whose exponent forms are appended to `st`.
/// Returns `None` when the constant part alone already rules the equation out.
fn build_atoms(
    sys: &ExpoSystem,
    closed: &[ClosedForm],
    l: usize,
    active: &[usize],
    st: &mut Forms,
    b: &BigInt,
) -> Option<Vec<Atom>> {
    let mut raw: Vec<(BigRational, Lin)> = Vec::new();
    let mut constant = BigRational::from_integer(sys.constants[l].clone());
    for &i in active {
        let z = BigRational::from_integer(sys.coefficients[(l, i)].clone());
        let n = st.forms[sys.variables[i]];
        for (r, d) in &closed[i].terms {
            let mut c = &z * d;
            if r.is_negative() && n.konst % 2 != 0 {
                c = -c;
            }
            let e = primitive_base(r).map_or(0, |(_, e)| e as i128);
            let x = n.scaled(e);
            if x.param.is_none() {
                let power = b.pow(x.konst.to_u32().expect("exponent fits in u32"));
                constant += c * BigRational::from_integer(power);
            } else {
                match raw.iter_mut().find(|(_, f)| *f == x) {
                    Some((acc, _)) => *acc += c,
                    None => raw.push((c, x)),
                }
            }
        }
    }
    raw.retain(|(c, _)| !c.is_zero());
    let denom = raw.iter().map(|(c, _)| c).chain([&constant]).fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let scale = BigRational::from_integer(denom);
    let mut atoms = Vec::new();
    let k = (&constant * &scale).to_integer();
    if !k.is_zero() {
        let v = valuation(&k, b);
        let c = &k / b.pow(v as u32);
        atoms.push(Atom { coeff: c, form: st.push(Lin::constant(v as i128)) });
    }
    for (c, x) in raw {
        atoms.push(Atom { coeff: (c * &scale).to_integer(), form: st.push(x) });
    }
    if atoms.len() == 1 {
        return None;
    }
    Some(atoms)
}

/// Splits the remaining atoms into vanishing clusters, the first of which contains
/// the lowest-numbered remaining atom.
fn clusters(st: Forms, atoms: &[Atom], remaining: Vec<usize>, b: &BigInt, out: &mut Vec<Forms>) {
    let Some(&first) = remaining.first() else {
        out.push(st);
        return;
    };
    let mut found = Vec::new();
    let mut members = Vec::new();
    grow(&st, atoms, &remaining, first, b, &mut members, &BigInt::zero(), 0, &mut found);
    for (next, used) in found {
        let rest: Vec<usize> = remaining.iter().copied().filter(|t| !used.contains(t)).collect();
        clusters(next, atoms, rest, b, out);
    }
}

/// Adds one more exponent level to the cluster under construction. `prefix` is the
/// sum so far divided by `b^{lowest exponent}`, `height` the current level.
#[allow(clippy::too_many_arguments)]
fn grow(
    st: &Forms,
    atoms: &[Atom],
    available: &[usize],
    first: usize,
    b: &BigInt,
    members: &mut Vec<(usize, u64)>,
    prefix: &BigInt,
    height: u64,
    found: &mut Vec<(Forms, Vec<usize>)>,
) {
    if !members.is_empty() && prefix.is_zero() {
        if members.iter().any(|&(t, _)| t == first) {
            found.push((st.clone(), members.iter().map(|&(t, _)| t).collect()));
        }
        return;
    }
    let free: Vec<usize> = available.iter().copied().filter(|t| !members.iter().any(|&(m, _)| m == *t)).collect();
    if free.is_empty() {
        return;
    }
    let heights: Vec<u64> = if members.is_empty() { vec![0] } else { (height + 1..=valuation(prefix, b)).collect() };
    for h in heights {
        let power = b.pow(h as u32);
        for mask in 1u64..(1u64 << free.len()) {
            let subset: Vec<usize> = (0..free.len()).filter(|&j| mask >> j & 1 == 1).map(|j| free[j]).collect();
            let sum: BigInt = subset.iter().map(|&t| &atoms[t].coeff).sum();
            if !members.is_empty() && sum.is_zero() {
                continue;
            }
            let (reference, ref_height) = members.first().copied().unwrap_or((subset[0], 0));
            let mut next = st.clone();
            let ok = subset.iter().all(|&t| {
                let (p, q) = (next.forms[atoms[t].form], next.forms[atoms[reference].form]);
                next.impose(p, q, h as i128 - ref_height as i128)
            });
            if !ok {
                continue;
            }
            let before = members.len();
            members.extend(subset.iter().map(|&t| (t, h)));
            grow(&next, atoms, available, first, b, members, &(prefix + &power * &sum), h, found);
            members.truncate(before);
        }
    }
}

/// Tuples with every variable in `1..=n_max` solving the system. Never a
/// completeness certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedSolutions {
    /// `true` for a system without equations: every tuple qualifies and none are listed.
    pub all_tuples: bool,
    pub tuples: Vec<Vec<u64>>,
    pub n_max: u64,
    pub complete: bool,
}

pub fn solve_bounded(sys: &ExpoSystem, n_max: u64) -> BoundedSolutions {
    assert!(n_max >= 1);
    if sys.equation_count() == 0 {
        return BoundedSolutions { all_tuples: true, tuples: Vec::new(), n_max, complete: false };
    }
    let tables: Vec<Vec<BigInt>> = sys.sequences.iter().map(|s| s.terms(n_max as usize)).collect();
    let mut tuples = Vec::new();
    let mut idx = vec![1u64; sys.var_count];
    loop {
        let ok = (0..sys.equation_count()).all(|l| {
            let mut acc = sys.constants[l].clone();
            for (i, t) in tables.iter().enumerate() {
                let z = &sys.coefficients[(l, i)];
                if !z.is_zero() {
                    acc += z * &t[idx[sys.variables[i]] as usize - 1];
                }
            }
            acc.is_zero()
        });
        if ok {
            tuples.push(idx.clone());
        }
        let mut k = sys.var_count;
        loop {
            if k == 0 {
                return BoundedSolutions { all_tuples: false, tuples, n_max, complete: false };
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
