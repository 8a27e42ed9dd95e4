use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::normal_form::{hnf, snf, solve_integer_system, HermiteForm};
use super::IntMatrix;

/// A subgroup of `Z^r`, given by generator columns and kept with its Hermite basis.
#[derive(Clone, Debug)]
pub struct Lattice {
    ambient_rank: usize,
    generators: IntMatrix,
    hermite: HermiteForm,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_rank == other.ambient_rank && self.basis() == other.basis()
    }
}

impl Eq for Lattice {}

impl Lattice {
    /// Lattice spanned by the columns of `generators`.
    pub fn new(generators: IntMatrix) -> Self {
        let hermite = hnf(&generators);
        Lattice { ambient_rank: generators.rows(), generators, hermite }
    }

    pub fn from_columns(columns: &[Vec<BigInt>], ambient_rank: usize) -> Self {
        Self::new(IntMatrix::from_columns(columns, ambient_rank))
    }

    pub fn zero(ambient_rank: usize) -> Self {
        Self::new(IntMatrix::zeros(ambient_rank, 0))
    }

    pub fn full(ambient_rank: usize) -> Self {
        Self::new(IntMatrix::identity(ambient_rank))
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn generators(&self) -> &IntMatrix {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.hermite.rank()
    }

    /// Hermite basis (columns); canonical for the lattice.
    pub fn basis(&self) -> IntMatrix {
        self.hermite.basis()
    }

    pub fn basis_columns(&self) -> Vec<Vec<BigInt>> {
        self.basis().columns()
    }

    pub fn hermite(&self) -> &HermiteForm {
        &self.hermite
    }

    /// Coordinates of `x` in the Hermite basis, if `x` lies in the lattice.
    pub fn coordinates(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(x.len(), self.ambient_rank, "point has wrong dimension");
        let h = &self.hermite.h;
        let mut residual = x.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        for (j, &p) in self.hermite.pivots.iter().enumerate() {
            let (q, r) = residual[p].div_rem(&h[(p, j)]);
            if !r.is_zero() {
                return None;
            }
            for (i, res) in residual.iter_mut().enumerate() {
                *res -= &h[(i, j)] * &q;
            }
            coords.push(q);
        }
        residual.iter().all(Zero::is_zero).then_some(coords)
    }

    /// Integer coefficients on the original generators expressing `x`, if any.
    pub fn generator_coefficients(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut coords = self.coordinates(x)?;
        coords.resize(self.generators.cols(), BigInt::zero());
        Some(self.hermite.u.mul_vec(&coords))
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.coordinates(x).is_some()
    }

    /// Canonical representative of the coset `x + L`: every pivot coordinate
    /// reduced into `[0, pivot)`.
    pub fn reduce(&self, x: &[BigInt]) -> Vec<BigInt> {
        let h = &self.hermite.h;
        let mut out = x.to_vec();
        for (j, &p) in self.hermite.pivots.iter().enumerate() {
            let q = out[p].div_floor(&h[(p, j)]);
            if q.is_zero() {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                *o -= &h[(i, j)] * &q;
            }
        }
        out
    }

    /// Image of the lattice under the linear map `m` (rows = target dimension).
    pub fn image(&self, m: &IntMatrix) -> Lattice {
        Lattice::new(m * &self.basis())
    }

    /// Congruence and linear conditions whose common solutions are exactly the lattice.
    pub fn membership_conditions(&self) -> MembershipConditions {
        let form = snf(&self.generators);
        let diag = form.diagonal();
        let rank = form.rank();
        let mut congruences = Vec::new();
        let mut linears = Vec::new();
        for i in 0..self.ambient_rank {
            let row = form.u.row(i).to_vec();
            if i < rank {
                let modulus = diag[i].clone();
                if modulus.is_one() {
                    continue;
                }
                let coeffs = row.iter().map(|c| c.mod_floor(&modulus)).collect();
                congruences.push(CongruenceCondition { coeffs, modulus });
            } else {
                linears.push(LinearCondition::new(row));
            }
        }
        MembershipConditions { congruences, linears }
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{}", self.basis().transpose())
    }
}

/// `Σ coeffs_j·x_j ≡ 0 (mod modulus)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CongruenceCondition {
    pub coeffs: Vec<BigInt>,
    pub modulus: BigInt,
}

impl CongruenceCondition {
    pub fn new(coeffs: Vec<BigInt>, modulus: BigInt) -> Self {
        assert!(!modulus.is_zero(), "congruence modulus must be nonzero");
        CongruenceCondition { coeffs, modulus }
    }

    pub fn holds(&self, x: &[BigInt]) -> bool {
        dot(&self.coeffs, x).is_multiple_of(&self.modulus)
    }
}

/// `Σ coeffs_j·x_j = 0`. All-zero coefficients denote the trivially true condition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearCondition {
    pub coeffs: Vec<BigInt>,
}

impl LinearCondition {
    /// Normalizes to a primitive vector whose first nonzero entry is positive.
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let g = coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if g.is_zero() {
            return LinearCondition { coeffs };
        }
        let sign = coeffs.iter().find(|c| !c.is_zero()).map_or(BigInt::one(), |c| c.signum());
        let coeffs = coeffs.iter().map(|c| c / &g * &sign).collect();
        LinearCondition { coeffs }
    }

    pub fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn holds(&self, x: &[BigInt]) -> bool {
        dot(&self.coeffs, x).is_zero()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MembershipConditions {
    pub congruences: Vec<CongruenceCondition>,
    pub linears: Vec<LinearCondition>,
}

impl MembershipConditions {
    pub fn holds(&self, x: &[BigInt]) -> bool {
        self.congruences.iter().all(|c| c.holds(x)) && self.linears.iter().all(|l| l.holds(x))
    }
}

pub(crate) fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solutions `y ∈ Z^s` of the congruence system `a · y ≡ b (mod modulus)`
/// (component-wise): a particular solution and the lattice of homogeneous solutions.
pub fn solve_congruences(a: &IntMatrix, b: &[BigInt], modulus: &BigInt) -> Option<(Vec<BigInt>, Lattice)> {
    let (p, s) = (a.rows(), a.cols());
    assert_eq!(b.len(), p);
    let modulus = modulus.abs();
    assert!(!modulus.is_zero());
    let scaled = {
        let mut m = IntMatrix::identity(p);
        for i in 0..p {
            m[(i, i)] = modulus.clone();
        }
        m
    };
    let system = a.hstack(&scaled);
    let (x0, kernel) = solve_integer_system(&system, b)?;
    let project = |v: &[BigInt]| v[..s].to_vec();
    let kernel_cols: Vec<Vec<BigInt>> = kernel.columns().iter().map(|c| project(c)).collect();
    let lattice = Lattice::from_columns(&kernel_cols, s);
    let particular = lattice.reduce(&project(&x0));
    Some((particular, lattice))
}
