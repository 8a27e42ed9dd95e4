use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{AmbientGroup, GroupElement, GrouplessSArithSet, ModelError, SArithTerm};
use crate::intlinalg::{rational, IntMatrix};
use crate::lrs::{poly, LinearRecurrence, LrsError, PowersClosedSet};

/// `α₀ + Σ Φ^{k_i·n_i}(α_i)` for an integer matrix `Φ` acting on `Z^r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FSetDescriptor {
    frobenius: IntMatrix,
    /// `c_0, …, c_{m−1}` with `Φ^m = Σ c_i·Φ^i`.
    relation: Vec<BigInt>,
    base_point: Vec<BigInt>,
    orbit: Vec<(Vec<BigInt>, u64)>,
}

impl FSetDescriptor {
    pub fn new(
        frobenius: IntMatrix,
        relation: Vec<BigInt>,
        base_point: Vec<BigInt>,
        orbit: Vec<(Vec<BigInt>, u64)>,
    ) -> Result<Self, ModelError> {
        let r = frobenius.rows();
        if frobenius.cols() != r {
            return Err(ModelError::NotSquare { expected: r });
        }
        let shape_err = |len: usize| ModelError::Shape { free: r, torsion: 0, got_free: len, got_torsion: 0 };
        if base_point.len() != r {
            return Err(shape_err(base_point.len()));
        }
        for (alpha, k) in &orbit {
            if alpha.len() != r {
                return Err(shape_err(alpha.len()));
            }
            if *k == 0 {
                return Err(ModelError::ZeroStep);
            }
        }
        // Reuses the recurrence invariants: c_0 ≠ 0 and a squarefree polynomial.
        LinearRecurrence::new(relation.clone(), vec![BigInt::one(); relation.len()])?;
        let powers = matrix_powers(&frobenius, relation.len());
        let mut combo = IntMatrix::zeros(r, r);
        for (c, p) in relation.iter().zip(&powers) {
            for i in 0..r {
                for j in 0..r {
                    combo[(i, j)] += c * &p[(i, j)];
                }
            }
        }
        if combo != powers[relation.len()] {
            return Err(ModelError::RelationFails);
        }
        Ok(FSetDescriptor { frobenius, relation, base_point, orbit })
    }

    /// Uses the minimal polynomial of `Φ` as the relation.
    pub fn with_minimal_polynomial(
        frobenius: IntMatrix,
        base_point: Vec<BigInt>,
        orbit: Vec<(Vec<BigInt>, u64)>,
    ) -> Result<Self, ModelError> {
        if frobenius.cols() != frobenius.rows() {
            return Err(ModelError::NotSquare { expected: frobenius.rows() });
        }
        let relation = minimal_polynomial(&frobenius);
        Self::new(frobenius, relation, base_point, orbit)
    }

    pub fn frobenius(&self) -> &IntMatrix {
        &self.frobenius
    }

    pub fn relation(&self) -> &[BigInt] {
        &self.relation
    }

    pub fn base_point(&self) -> &[BigInt] {
        &self.base_point
    }

    pub fn orbit(&self) -> &[(Vec<BigInt>, u64)] {
        &self.orbit
    }

    pub fn rank(&self) -> usize {
        self.frobenius.rows()
    }
}

/// `I, Φ, …, Φ^count`.
fn matrix_powers(phi: &IntMatrix, count: usize) -> Vec<IntMatrix> {
    let mut out = vec![IntMatrix::identity(phi.rows())];
    for _ in 0..count {
        let next = &out[out.len() - 1] * phi;
        out.push(next);
    }
    out
}

/// `c_0, …, c_{m−1}` with `Φ^m = Σ c_i·Φ^i` and `m` minimal.
pub fn minimal_polynomial(phi: &IntMatrix) -> Vec<BigInt> {
    let r = phi.rows();
    let powers = matrix_powers(phi, r);
    let flat = |m: &IntMatrix| -> Vec<BigRational> {
        m.row_vecs().into_iter().flatten().map(BigRational::from_integer).collect()
    };
    let flats: Vec<Vec<BigRational>> = powers.iter().map(flat).collect();
    for k in 1..=r.max(1) {
        let a: rational::RatMatrix = (0..r * r).map(|row| (0..k).map(|j| flats[j][row].clone()).collect()).collect();
        if let Some(sol) = rational::solve(&a, k, &flats[k]) {
            return sol
                .into_iter()
                .map(|c| {
                    assert!(c.is_integer(), "minimal polynomial of an integer matrix is integral");
                    c.to_integer()
                })
                .collect();
        }
    }
    unreachable!("Cayley-Hamilton bounds the degree by the size")
}

/// The powers-closed set generated by the roots of the relation.
pub fn make_sf(desc: &FSetDescriptor) -> Result<PowersClosedSet, ModelError> {
    let mut p: Vec<BigInt> = desc.relation.iter().map(|c| -c).collect();
    p.push(BigInt::one());
    let roots = poly::integer_roots(&p);
    if roots.len() < desc.relation.len() {
        return Err(LrsError::NotSplit.into());
    }
    Ok(PowersClosedSet::new(roots)?)
}

/// Rewrites `Φ^{k·n}(α) = Σ_j a^{(j+1)}_{k·n}·Φ^j(α)`: the basis sequences share the
/// relation as recurrence, and the `m` terms of one orbit share an index slot.
pub fn fset_to_sarith(desc: &FSetDescriptor) -> Result<GrouplessSArithSet, ModelError> {
    let s = make_sf(desc)?;
    let m = desc.relation.len();
    let r = desc.rank();
    let ambient = AmbientGroup::free(r);
    let basis: Vec<LinearRecurrence> = (0..m)
        .map(|j| {
            let initial = (1..=m)
                .map(|n| if n < m { BigInt::from((j == n) as u8) } else { desc.relation[j].clone() })
                .collect();
            LinearRecurrence::new(desc.relation.clone(), initial)
        })
        .collect::<Result<_, _>>()?;
    let powers = matrix_powers(&desc.frobenius, m.saturating_sub(1));
    let mut terms = Vec::new();
    for (slot, (alpha, k)) in desc.orbit.iter().enumerate() {
        for (j, seq) in basis.iter().enumerate() {
            let point = powers[j].mul_vec(alpha);
            if point.iter().all(Zero::is_zero) {
                continue;
            }
            let sequence = match seq.subsample(*k, 0) {
                Ok(s) => s,
                Err(LrsError::DegenerateSequence) => continue,
                Err(e) => return Err(e.into()),
            };
            terms.push(SArithTerm { point: GroupElement { free: point, torsion: Vec::new() }, sequence, slot });
        }
    }
    let offset = ambient.free_element(desc.base_point.clone())?;
    GrouplessSArithSet::with_slots(ambient, offset, terms, desc.orbit.len(), s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Companion matrix of x² − 3x + 2.
    fn companion() -> IntMatrix {
        IntMatrix::from_i64(&[&[0, -2], &[1, 3]])
    }

    #[test]
    fn sf_examples() {
        let d = FSetDescriptor::new(IntMatrix::from_i64(&[&[2]]), ints(&[2]), ints(&[0]), vec![]).unwrap();
        assert_eq!(make_sf(&d).unwrap().generators(), &ints(&[2])[..]);
        let d = FSetDescriptor::new(companion(), ints(&[-2, 3]), ints(&[0, 0]), vec![]).unwrap();
        assert_eq!(make_sf(&d).unwrap().generators(), &ints(&[1, 2])[..]);
        let fib = IntMatrix::from_i64(&[&[0, 1], &[1, 1]]);
        let d = FSetDescriptor::new(fib, ints(&[1, 1]), ints(&[0, 0]), vec![]).unwrap();
        assert_eq!(make_sf(&d), Err(ModelError::Lrs(LrsError::NotSplit)));
    }

    #[test]
    fn relation_is_verified() {
        assert_eq!(
            FSetDescriptor::new(companion(), ints(&[-2, 4]), ints(&[0, 0]), vec![]),
            Err(ModelError::RelationFails)
        );
        assert_eq!(minimal_polynomial(&companion()), ints(&[-2, 3]));
        assert_eq!(minimal_polynomial(&IntMatrix::from_i64(&[&[2, 0], &[0, 2]])), ints(&[2]));
    }

    #[test]
    fn scalar_orbit() {
        let d = FSetDescriptor::new(IntMatrix::from_i64(&[&[2]]), ints(&[2]), ints(&[0]), vec![(ints(&[1]), 1)]).unwrap();
        let u = fset_to_sarith(&d).unwrap();
        assert_eq!(u.terms().len(), 1);
        assert_eq!(u.terms()[0].sequence, LinearRecurrence::from_i64(&[2], &[2]).unwrap());
        assert_eq!(u.terms()[0].point.free, ints(&[1]));
    }

    #[test]
    fn companion_basis_sequences() {
        let d = FSetDescriptor::new(companion(), ints(&[-2, 3]), ints(&[0, 0]), vec![(ints(&[1, 0]), 1)]).unwrap();
        let u = fset_to_sarith(&d).unwrap();
        assert_eq!(u.terms()[0].sequence.terms(3), ints(&[0, -2, -6]));
        assert_eq!(u.terms()[1].sequence.terms(3), ints(&[1, 3, 7]));
        let mut power = IntMatrix::identity(2);
        for n in 1..=10u64 {
            power = &power * &companion();
            assert_eq!(u.evaluate(&[n]).unwrap().free, power.column(0));
        }
    }

    #[test]
    fn offset_only_fset() {
        let d = FSetDescriptor::new(IntMatrix::from_i64(&[&[2]]), ints(&[2]), ints(&[7]), vec![]).unwrap();
        let u = fset_to_sarith(&d).unwrap();
        assert!(u.terms().is_empty());
        assert_eq!(u.evaluate(&[]).unwrap().free, ints(&[7]));
    }
}
