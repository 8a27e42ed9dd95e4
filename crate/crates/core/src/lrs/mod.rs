//! Integer linear recurrence sequences with distinct characteristic roots.
//!
//! Sequences are indexed from `n = 1` and satisfy
//! `a_{n+m} = c_0·a_n + … + c_{m-1}·a_{n+m-1}` with `c_0 ≠ 0` and a squarefree
//! characteristic polynomial `x^m − c_{m−1}x^{m−1} − … − c_0`.

pub mod poly;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::intlinalg::rational;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum LrsError {
    #[error("a recurrence needs order at least 1")]
    EmptyRecurrence,
    #[error("expected {expected} initial terms, got {got}")]
    InitialTermCount { expected: usize, got: usize },
    #[error("c_0 = 0 violates the recurrence invariant")]
    ZeroTrailingCoefficient,
    #[error("characteristic polynomial has a repeated root")]
    RepeatedRoot,
    #[error("the sequence is identically zero")]
    DegenerateSequence,
    #[error("characteristic polynomial does not split over the integers")]
    NotSplit,
    #[error("index map {scale}·n{offset:+} leaves the positive indices")]
    InvalidIndex { scale: u64, offset: i64 },
    #[error("modulus must be nonzero")]
    ZeroModulus,
    #[error("period search exceeded the cap of {cap} steps")]
    SearchCapExceeded { cap: u64 },
    #[error("powers-closed set generators must be nonzero")]
    ZeroGenerator,
    #[error("sequence terms are not divisible by {divisor}")]
    NotDivisible { divisor: BigInt },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearRecurrence {
    coeffs: Vec<BigInt>,
    initial: Vec<BigInt>,
}

impl LinearRecurrence {
    pub fn new(coeffs: Vec<BigInt>, initial: Vec<BigInt>) -> Result<Self, LrsError> {
        if coeffs.is_empty() {
            return Err(LrsError::EmptyRecurrence);
        }
        if initial.len() != coeffs.len() {
            return Err(LrsError::InitialTermCount { expected: coeffs.len(), got: initial.len() });
        }
        if coeffs[0].is_zero() {
            return Err(LrsError::ZeroTrailingCoefficient);
        }
        let seq = LinearRecurrence { coeffs, initial };
        if !poly::is_squarefree(&seq.characteristic_polynomial()) {
            return Err(LrsError::RepeatedRoot);
        }
        if seq.initial.iter().all(Zero::is_zero) {
            return Err(LrsError::DegenerateSequence);
        }
        Ok(seq)
    }

    pub fn from_i64(coeffs: &[i64], initial: &[i64]) -> Result<Self, LrsError> {
        Self::new(
            coeffs.iter().map(|&c| BigInt::from(c)).collect(),
            initial.iter().map(|&c| BigInt::from(c)).collect(),
        )
    }

    /// The constant sequence `v, v, …`.
    pub fn constant(v: BigInt) -> Result<Self, LrsError> {
        Self::new(vec![BigInt::one()], vec![v])
    }

    /// `a_n = Σ d_i·r_i^n` for distinct nonzero integer roots and integer weights.
    pub fn from_exponentials(parts: &[(BigInt, BigInt)]) -> Result<Self, LrsError> {
        let parts: Vec<&(BigInt, BigInt)> = parts.iter().filter(|(_, d)| !d.is_zero()).collect();
        if parts.is_empty() {
            return Err(LrsError::DegenerateSequence);
        }
        let roots: Vec<BigInt> = parts.iter().map(|(r, _)| r.clone()).collect();
        if roots.iter().any(Zero::is_zero) {
            return Err(LrsError::ZeroTrailingCoefficient);
        }
        let char_poly = poly::from_roots(&roots);
        let m = roots.len();
        let coeffs = char_poly[..m].iter().map(|c| -c).collect();
        let initial = (1..=m as u32)
            .map(|n| parts.iter().map(|(r, d)| d * r.pow(n)).sum())
            .collect();
        Self::new(coeffs, initial)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// `c_0, …, c_{m−1}`.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// `a_1, …, a_m`.
    pub fn initial_terms(&self) -> &[BigInt] {
        &self.initial
    }

    /// `x^m − c_{m−1}x^{m−1} − … − c_0`, low degree first.
    pub fn characteristic_polynomial(&self) -> Vec<BigInt> {
        let mut p: Vec<BigInt> = self.coeffs.iter().map(|c| -c).collect();
        p.push(BigInt::one());
        p
    }

    pub fn is_constant(&self) -> bool {
        let t = self.terms(self.order() + 1);
        t.iter().all(|x| x == &t[0])
    }

    /// The first `count` terms `a_1, …, a_count`.
    pub fn terms(&self, count: usize) -> Vec<BigInt> {
        let m = self.order();
        let mut out: Vec<BigInt> = self.initial.iter().take(count).cloned().collect();
        while out.len() < count {
            let k = out.len() - m;
            let next = self.coeffs.iter().zip(&out[k..]).map(|(c, a)| c * a).sum();
            out.push(next);
        }
        out
    }

    /// `a_n` for `n ≥ 1`, via `x^{n−1} mod χ(x)` so the cost is logarithmic in `n`.
    pub fn term(&self, n: u64) -> BigInt {
        assert!(n >= 1, "sequences are indexed from 1");
        let m = self.order();
        if n as usize <= m {
            return self.initial[n as usize - 1].clone();
        }
        let w = self.power_of_x(n - 1);
        w.iter().zip(&self.initial).map(|(x, a)| x * a).sum()
    }

    /// Coefficients of `x^e` reduced modulo the characteristic polynomial.
    fn power_of_x(&self, mut e: u64) -> Vec<BigInt> {
        let m = self.order();
        let mut acc = vec![BigInt::zero(); m];
        acc[0] = BigInt::one();
        let mut base = vec![BigInt::zero(); m];
        if m == 1 {
            base[0] = self.coeffs[0].clone();
        } else {
            base[1] = BigInt::one();
        }
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mulmod(&acc, &base);
            }
            base = self.mulmod(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn mulmod(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let m = self.order();
        let mut prod = vec![BigInt::zero(); 2 * m - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        for d in (m..prod.len()).rev() {
            let top = std::mem::take(&mut prod[d]);
            if top.is_zero() {
                continue;
            }
            for (i, c) in self.coeffs.iter().enumerate() {
                prod[d - m + i] += &top * c;
            }
        }
        prod.truncate(m);
        prod
    }

    /// Minimal-order recurrence for the integer sequence `t(1), t(2), …`, known to
    /// satisfy some recurrence of order at most `bound` whose roots are nonzero and simple.
    pub fn from_terms(bound: usize, t: impl Fn(u64) -> BigInt) -> Result<Self, LrsError> {
        let values: Vec<BigInt> = (1..=2 * bound as u64).map(&t).collect();
        if values.iter().all(Zero::is_zero) {
            return Err(LrsError::DegenerateSequence);
        }
        for k in 1..=bound {
            let rows = 2 * bound - k;
            let hankel: rational::RatMatrix = (0..rows)
                .map(|n| values[n..n + k].iter().cloned().map(BigRational::from_integer).collect())
                .collect();
            let rhs: Vec<BigRational> = (0..rows).map(|n| BigRational::from_integer(values[n + k].clone())).collect();
            let Some(sol) = rational::solve(&hankel, k, &rhs) else {
                continue;
            };
            let coeffs: Vec<BigInt> = sol
                .iter()
                .map(|c| {
                    assert!(c.is_integer(), "integer sequences have integral minimal recurrences");
                    c.to_integer()
                })
                .collect();
            return Self::new(coeffs, values[..k].to_vec());
        }
        unreachable!("sequence does not satisfy a recurrence of order {bound}")
    }

    /// Minimal-order presentation of the same sequence.
    pub fn minimal(&self) -> Self {
        Self::from_terms(self.order(), |n| self.term(n)).expect("valid sequences are nonzero")
    }

    /// `n ↦ a_{u·n+v}`. Requires `u + v ≥ 1` so that every index stays positive.
    pub fn subsample(&self, u: u64, v: i64) -> Result<Self, LrsError> {
        if (u as i64) + v < 1 {
            return Err(LrsError::InvalidIndex { scale: u, offset: v });
        }
        if u == 0 {
            return Self::constant(self.term(v as u64));
        }
        Self::from_terms(self.order(), |n| self.term((u as i64 * n as i64 + v) as u64))
    }

    /// `n ↦ u·a_n + v`.
    pub fn affine(&self, u: &BigInt, v: &BigInt) -> Result<Self, LrsError> {
        if u.is_zero() {
            return Self::constant(v.clone());
        }
        let terms = self.terms(2 * (self.order() + 1));
        Self::from_terms(self.order() + 1, |n| u * &terms[n as usize - 1] + v)
    }

    /// `n ↦ (a_n − sub) / div`; the caller guarantees exact division for every `n`.
    pub fn shift_divide(&self, sub: &BigInt, div: &BigInt) -> Result<Self, LrsError> {
        let terms = self.terms(2 * (self.order() + 1));
        if terms.iter().any(|t| !(t - sub).is_multiple_of(div)) {
            return Err(LrsError::NotDivisible { divisor: div.clone() });
        }
        Self::from_terms(self.order() + 1, |n| (&terms[n as usize - 1] - sub) / div)
    }

    /// `n ↦ Σ w_j·s_j(n)` over sequences sharing the index.
    pub fn linear_combination(parts: &[(&LinearRecurrence, BigInt)]) -> Result<Self, LrsError> {
        let bound: usize = parts.iter().map(|(s, _)| s.order()).sum();
        if bound == 0 {
            return Err(LrsError::DegenerateSequence);
        }
        let cols: Vec<Vec<BigInt>> = parts.iter().map(|(s, _)| s.terms(2 * bound)).collect();
        Self::from_terms(bound, |n| {
            parts.iter().zip(&cols).map(|((_, w), t)| w * &t[n as usize - 1]).sum()
        })
    }

    /// Minimal preperiod and period of `a_n mod D`, by cycle detection on the state
    /// vector `(a_n, …, a_{n+m−1}) mod D`.
    pub fn eventual_period_mod(&self, modulus: &BigInt) -> ModularProfile {
        self.eventual_period_mod_capped(modulus, u64::MAX).expect("uncapped search terminates")
    }

    /// As [`eventual_period_mod`](Self::eventual_period_mod), failing once more than
    /// `cap` transitions have been taken.
    pub fn eventual_period_mod_capped(&self, modulus: &BigInt, cap: u64) -> Result<ModularProfile, LrsError> {
        if modulus.is_zero() {
            return Err(LrsError::ZeroModulus);
        }
        let d = modulus.abs();
        let start: Vec<BigInt> = self.initial.iter().map(|a| a.mod_floor(&d)).collect();
        let step = |s: &[BigInt]| -> Vec<BigInt> {
            let next: BigInt = self.coeffs.iter().zip(s).map(|(c, a)| c * a).sum::<BigInt>().mod_floor(&d);
            let mut out = s[1..].to_vec();
            out.push(next);
            out
        };
        let mut steps = 0u64;
        let mut tick = || -> Result<(), LrsError> {
            steps += 1;
            if steps > cap {
                Err(LrsError::SearchCapExceeded { cap })
            } else {
                Ok(())
            }
        };
        // Brent: find the cycle length, then the tail length.
        let (mut power, mut lam) = (1u64, 1u64);
        let mut tortoise = start.clone();
        let mut hare = step(&start);
        tick()?;
        while tortoise != hare {
            if power == lam {
                tortoise = hare.clone();
                power *= 2;
                lam = 0;
            }
            hare = step(&hare);
            tick()?;
            lam += 1;
        }
        let mut tortoise = start.clone();
        let mut hare = start.clone();
        for _ in 0..lam {
            hare = step(&hare);
            tick()?;
        }
        let mut mu = 0u64;
        while tortoise != hare {
            tortoise = step(&tortoise);
            hare = step(&hare);
            tick()?;
            mu += 1;
        }
        let count = (mu + lam) as usize;
        let mut residues = Vec::with_capacity(count);
        let mut state = start;
        for _ in 0..count {
            residues.push(state[0].clone());
            state = step(&state);
        }
        Ok(ModularProfile { modulus: d, preperiod: mu, period: lam, residues })
    }

    /// `a_n = Σ d_i·r_i^n` over the roots of the minimal recurrence.
    pub fn closed_form(&self) -> Result<ClosedForm, LrsError> {
        let min = self.minimal();
        let roots = poly::integer_roots(&min.characteristic_polynomial());
        if roots.len() < min.order() {
            return Err(LrsError::NotSplit);
        }
        let m = roots.len();
        let vandermonde: rational::RatMatrix = (1..=m as u32)
            .map(|n| roots.iter().map(|r| BigRational::from_integer(r.pow(n))).collect())
            .collect();
        let rhs: Vec<BigRational> = min.initial.iter().cloned().map(BigRational::from_integer).collect();
        let d = rational::solve(&vandermonde, m, &rhs).expect("Vandermonde system with distinct roots is regular");
        Ok(ClosedForm { terms: roots.into_iter().zip(d).collect() })
    }

    /// Every characteristic root (of the minimal recurrence) is a non-negative power
    /// of a generator of `s`.
    pub fn is_admissible(&self, s: &PowersClosedSet) -> Result<bool, LrsError> {
        Ok(self.closed_form()?.roots().all(|r| s.contains(r)))
    }
}

impl fmt::Display for LinearRecurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rec {} init {}", fmt_list(&self.coeffs), fmt_list(&self.initial))
    }
}

pub(crate) fn fmt_list(xs: &[BigInt]) -> String {
    let items: Vec<String> = xs.iter().map(ToString::to_string).collect();
    format!("[{}]", items.join(", "))
}

/// `S = { g^k : g a generator, k ≥ 0 }`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PowersClosedSet {
    generators: Vec<BigInt>,
}

impl PowersClosedSet {
    pub fn new(generators: Vec<BigInt>) -> Result<Self, LrsError> {
        if generators.iter().any(Zero::is_zero) {
            return Err(LrsError::ZeroGenerator);
        }
        let mut seen = Vec::new();
        for g in generators {
            if !seen.contains(&g) {
                seen.push(g);
            }
        }
        Ok(PowersClosedSet { generators: seen })
    }

    pub fn generators(&self) -> &[BigInt] {
        &self.generators
    }

    pub fn contains(&self, r: &BigInt) -> bool {
        r.is_one() || self.generators.iter().any(|g| is_power_of(r, g))
    }

    pub fn union(&self, other: &PowersClosedSet) -> PowersClosedSet {
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        PowersClosedSet::new(gens).expect("generators already nonzero")
    }
}

/// `r = g^k` for some `k ≥ 0`, decided by repeated exact division.
fn is_power_of(r: &BigInt, g: &BigInt) -> bool {
    if r.is_one() {
        return true;
    }
    if g.abs().is_one() {
        return r == g;
    }
    let mut x = r.clone();
    while !x.abs().is_one() && !x.is_zero() {
        let (q, rem) = x.div_rem(g);
        if !rem.is_zero() {
            return false;
        }
        x = q;
    }
    x.is_one()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedForm {
    /// `(r_i, d_i)`, roots ascending.
    pub terms: Vec<(BigInt, BigRational)>,
}

impl ClosedForm {
    pub fn roots(&self) -> impl Iterator<Item = &BigInt> {
        self.terms.iter().map(|(r, _)| r)
    }

    pub fn eval(&self, n: u32) -> BigRational {
        self.terms.iter().map(|(r, d)| d * BigRational::from_integer(r.pow(n))).sum()
    }
}

/// Residues of a sequence modulo `D`: `a_{n+period} ≡ a_n` for every `n > preperiod`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularProfile {
    pub modulus: BigInt,
    pub preperiod: u64,
    pub period: u64,
    /// `a_n mod D` for `n = 1..=preperiod+period`, least non-negative.
    pub residues: Vec<BigInt>,
}

impl ModularProfile {
    pub fn residue(&self, n: u64) -> &BigInt {
        assert!(n >= 1);
        let idx = if n <= self.preperiod + self.period {
            n - 1
        } else {
            self.preperiod + (n - 1 - self.preperiod) % self.period
        };
        &self.residues[idx as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(c: &[i64], a: &[i64]) -> LinearRecurrence {
        LinearRecurrence::from_i64(c, a).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn two_plus_three() -> LinearRecurrence {
        seq(&[-6, 5], &[5, 13])
    }

    #[test]
    fn term_examples() {
        assert_eq!(seq(&[1], &[5]).term(10), BigInt::from(5));
        assert_eq!(seq(&[2], &[2]).term(10), BigInt::from(1024));
        // direct iteration: 5, 13, 35, 97
        assert_eq!(two_plus_three().term(4), BigInt::from(97));
    }

    #[test]
    fn term_agrees_with_iteration() {
        let s = seq(&[3, -1, 2], &[1, -4, 7]);
        let direct = s.terms(60);
        for n in 1..=60u64 {
            assert_eq!(s.term(n), direct[n as usize - 1]);
        }
    }

    #[test]
    fn invariants_are_enforced() {
        assert_eq!(LinearRecurrence::from_i64(&[0], &[1]), Err(LrsError::ZeroTrailingCoefficient));
        // (x-1)^2
        assert_eq!(LinearRecurrence::from_i64(&[-1, 2], &[1, 2]), Err(LrsError::RepeatedRoot));
        assert_eq!(LinearRecurrence::from_i64(&[2], &[0]), Err(LrsError::DegenerateSequence));
        assert!(matches!(LinearRecurrence::from_i64(&[2], &[1, 2]), Err(LrsError::InitialTermCount { .. })));
    }

    #[test]
    fn subsample_examples() {
        let pow2 = seq(&[2], &[2]);
        assert_eq!(pow2.subsample(0, 3).unwrap(), LinearRecurrence::constant(BigInt::from(8)).unwrap());
        let s = pow2.subsample(2, 1).unwrap();
        assert_eq!(s.terms(3), ints(&[8, 32, 128]));
        assert_eq!(s.order(), 1);
        let t = two_plus_three().subsample(1, 1).unwrap();
        for n in 1..=20u64 {
            assert_eq!(t.term(n), two_plus_three().term(n + 1));
        }
    }

    #[test]
    fn subsample_can_vanish() {
        // 2^n − (−2)^n vanishes at even n
        let s = LinearRecurrence::from_exponentials(&[(BigInt::from(2), BigInt::one()), (BigInt::from(-2), -BigInt::one())]).unwrap();
        assert_eq!(s.subsample(2, 0), Err(LrsError::DegenerateSequence));
        assert_eq!(s.subsample(2, -1).unwrap().terms(2), ints(&[4, 16]));
    }

    #[test]
    fn affine_examples() {
        let pow2 = seq(&[2], &[2]);
        assert_eq!(pow2.affine(&BigInt::one(), &BigInt::zero()).unwrap(), pow2);
        let s = pow2.affine(&BigInt::from(3), &BigInt::one()).unwrap();
        assert_eq!(s.terms(4), ints(&[7, 13, 25, 49]));
        assert_eq!(s.coeffs(), &ints(&[-2, 3])[..]);
        let c = seq(&[1], &[5]).affine(&BigInt::zero(), &BigInt::from(2)).unwrap();
        assert_eq!(c, LinearRecurrence::constant(BigInt::from(2)).unwrap());
        assert_eq!(pow2.affine(&BigInt::zero(), &BigInt::zero()), Err(LrsError::DegenerateSequence));
    }

    #[test]
    fn period_examples() {
        let pow2 = seq(&[2], &[2]);
        let p = pow2.eventual_period_mod(&BigInt::from(7));
        assert_eq!((p.preperiod, p.period), (0, 3));
        assert_eq!(p.residues, ints(&[2, 4, 1]));
        let p = pow2.eventual_period_mod(&BigInt::from(8));
        assert_eq!((p.preperiod, p.period), (2, 1));
        assert_eq!(p.residues, ints(&[2, 4, 0]));
        let p = seq(&[1], &[5]).eventual_period_mod(&BigInt::from(3));
        assert_eq!((p.preperiod, p.period), (0, 1));
        assert_eq!(p.residues, ints(&[2]));
        assert_eq!(
            pow2.eventual_period_mod_capped(&BigInt::from(1_000_003), 10),
            Err(LrsError::SearchCapExceeded { cap: 10 })
        );
    }

    #[test]
    fn closed_form_examples() {
        let cf = two_plus_three().closed_form().unwrap();
        let one = BigRational::one();
        assert_eq!(cf.terms, vec![(BigInt::from(2), one.clone()), (BigInt::from(3), one.clone())]);
        let cf = seq(&[1], &[7]).closed_form().unwrap();
        assert_eq!(cf.terms, vec![(BigInt::one(), BigRational::from_integer(BigInt::from(7)))]);
        assert_eq!(seq(&[1, 1], &[1, 1]).closed_form(), Err(LrsError::NotSplit));
    }

    #[test]
    fn closed_form_ignores_redundant_roots() {
        // 2^n presented with the polynomial (x^2 - x - 1)(x - 2)
        let s = seq(&[-2, -1, 3], &[2, 4, 8]);
        assert_eq!(s.closed_form().unwrap().roots().cloned().collect::<Vec<_>>(), ints(&[2]));
    }

    #[test]
    fn admissibility_examples() {
        let s2 = PowersClosedSet::new(ints(&[2])).unwrap();
        let s5 = PowersClosedSet::new(ints(&[5])).unwrap();
        let two_four = LinearRecurrence::from_exponentials(&[(BigInt::from(2), BigInt::one()), (BigInt::from(4), BigInt::one())]).unwrap();
        assert!(two_four.is_admissible(&s2).unwrap());
        assert!(!two_plus_three().is_admissible(&s2).unwrap());
        assert!(seq(&[1], &[7]).is_admissible(&s5).unwrap());
        assert_eq!(seq(&[1, 1], &[1, 1]).is_admissible(&s2), Err(LrsError::NotSplit));
    }

    #[test]
    fn negative_generators() {
        let s = PowersClosedSet::new(ints(&[-2])).unwrap();
        assert!(s.contains(&BigInt::from(4)));
        assert!(s.contains(&BigInt::from(-8)));
        assert!(!s.contains(&BigInt::from(-4)));
        assert!(!s.contains(&BigInt::from(2)));
    }
}
