//! Hermite and Smith normal forms over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

/// Extended gcd with a non-negative gcd: `a·x + b·y = g`.
pub fn egcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let nr = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, nr);
        let ns = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, ns);
        let nt = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, nt);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Column-style Hermite normal form `a · u = h`.
///
/// `h` is lower echelon: column `j < rank` has its first nonzero entry, which is
/// positive, at row `pivots[j]`, the pivot rows strictly increase, entries to the
/// left of a pivot lie in `[0, pivot)`, and columns `rank..` are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteForm {
    pub h: IntMatrix,
    pub u: IntMatrix,
    pub pivots: Vec<usize>,
}

impl HermiteForm {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// The nonzero columns of `h`: a basis of the column lattice.
    pub fn basis(&self) -> IntMatrix {
        self.h.select_columns(&(0..self.rank()).collect::<Vec<_>>())
    }

    /// Columns of `u` spanning the integer kernel of the original matrix.
    pub fn kernel(&self) -> IntMatrix {
        self.u.select_columns(&(self.rank()..self.u.cols()).collect::<Vec<_>>())
    }
}

pub fn hnf(a: &IntMatrix) -> HermiteForm {
    let (rows, cols) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut u = IntMatrix::identity(cols);
    let mut pivots = Vec::new();
    let mut pc = 0;
    for i in 0..rows {
        if pc == cols {
            break;
        }
        for j in pc + 1..cols {
            if h[(i, j)].is_zero() {
                continue;
            }
            let (x0, y0) = (h[(i, pc)].clone(), h[(i, j)].clone());
            let (g, x, y) = egcd(&x0, &y0);
            let (p, q) = (-(&y0 / &g), &x0 / &g);
            h.combine_columns(pc, j, &x, &y, &p, &q);
            u.combine_columns(pc, j, &x, &y, &p, &q);
        }
        if h[(i, pc)].is_zero() {
            continue;
        }
        if h[(i, pc)].is_negative() {
            h.negate_column(pc);
            u.negate_column(pc);
        }
        let pivot = h[(i, pc)].clone();
        for k in 0..pc {
            let q = h[(i, k)].div_floor(&pivot);
            if !q.is_zero() {
                h.add_column_multiple(k, pc, &-&q);
                u.add_column_multiple(k, pc, &-&q);
            }
        }
        pivots.push(i);
        pc += 1;
    }
    HermiteForm { h, u, pivots }
}

/// Smith normal form `u · a · v = d` with `d_1 | d_2 | …` on the diagonal, all `≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|x| !x.is_zero()).count()
    }
}

pub fn snf(a: &IntMatrix) -> SmithForm {
    let (rows, cols) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    for t in 0..rows.min(cols) {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let Some((pi, pj)) = smallest_entry(&d, t) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_columns(t, pj);
        v.swap_columns(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let (x, y, p, q) = eliminator(&d[(t, t)], &d[(i, t)]);
                d.combine_rows(t, i, &x, &y, &p, &q);
                u.combine_rows(t, i, &x, &y, &p, &q);
                dirty = true;
            }
            for j in t + 1..cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let (x, y, p, q) = eliminator(&d[(t, t)], &d[(t, j)]);
                d.combine_columns(t, j, &x, &y, &p, &q);
                v.combine_columns(t, j, &x, &y, &p, &q);
                dirty = true;
            }
            if dirty {
                continue;
            }
            // Row and column are clear; enforce divisibility of the trailing block.
            let pivot = d[(t, t)].clone();
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !d[(i, j)].is_multiple_of(&pivot));
            match bad {
                Some((i, _)) => {
                    d.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithForm { d, u, v }
}

/// Unimodular `[[x, y], [p, q]]` sending `(a, b)` to `(g, 0)`. Plain subtraction
/// when `a | b`, so the pivot only changes when it strictly shrinks.
fn eliminator(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt, BigInt) {
    if b.is_multiple_of(a) {
        return (BigInt::one(), BigInt::zero(), -(b / a), BigInt::one());
    }
    let (g, x, y) = egcd(a, b);
    (x, y, -(b / &g), a / &g)
}

fn smallest_entry(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            if d[(i, j)].is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Integer solutions of `m · x = b`: a particular solution and a kernel basis
/// (as columns), or `None` when no integer solution exists.
pub fn solve_integer_system(m: &IntMatrix, b: &[BigInt]) -> Option<(Vec<BigInt>, IntMatrix)> {
    assert_eq!(m.rows(), b.len());
    let form = hnf(m);
    let mut w = vec![BigInt::zero(); m.cols()];
    let mut residual = b.to_vec();
    for (j, &p) in form.pivots.iter().enumerate() {
        let (q, r) = residual[p].div_rem(&form.h[(p, j)]);
        if !r.is_zero() {
            return None;
        }
        for i in 0..m.rows() {
            let delta = &form.h[(i, j)] * &q;
            residual[i] -= delta;
        }
        w[j] = q;
    }
    if residual.iter().any(|x| !x.is_zero()) {
        return None;
    }
    Some((form.u.mul_vec(&w), form.kernel()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_hnf(a: &IntMatrix) {
        let f = hnf(a);
        assert!(f.u.is_unimodular());
        assert_eq!(&(a * &f.u), &f.h);
    }

    #[test]
    fn hnf_identity_and_diagonal() {
        let id = IntMatrix::identity(2);
        let f = hnf(&id);
        assert_eq!(f.h, id);
        assert_eq!(f.u, id);
        let d = IntMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        let f = hnf(&d);
        assert_eq!(f.h, d);
        assert_eq!(f.u, IntMatrix::identity(2));
    }

    #[test]
    fn hnf_of_row_vector_is_gcd() {
        let a = IntMatrix::from_i64(&[&[4, 6]]);
        let f = hnf(&a);
        assert_eq!(f.h, IntMatrix::from_i64(&[&[2, 0]]));
        check_hnf(&a);
    }

    #[test]
    fn snf_examples() {
        let f = snf(&IntMatrix::from_i64(&[&[2, 4], &[6, 8]]));
        assert_eq!(f.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
        let f = snf(&IntMatrix::zeros(2, 3));
        assert!(f.d.is_zero());
        let f = snf(&IntMatrix::from_i64(&[&[1]]));
        assert_eq!(f.d, IntMatrix::from_i64(&[&[1]]));
    }

    #[test]
    fn integer_system_detects_divisibility() {
        let m = IntMatrix::from_i64(&[&[2, 4]]);
        assert!(solve_integer_system(&m, &[BigInt::from(3)]).is_none());
        let (x, k) = solve_integer_system(&m, &[BigInt::from(6)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![BigInt::from(6)]);
        assert_eq!(k.cols(), 1);
        assert!(m.mul_vec(&k.column(0)).iter().all(Zero::is_zero));
    }
}
