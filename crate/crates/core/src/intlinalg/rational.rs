//! Gauss-Jordan elimination over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::IntMatrix;

pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn to_rational(m: &IntMatrix) -> RatMatrix {
    m.row_vecs()
        .into_iter()
        .map(|r| r.into_iter().map(BigRational::from_integer).collect())
        .collect()
}

/// Reduced row echelon form of `a` (with `cols` columns), together with the
/// invertible transform `t` satisfying `t · a = r` and the pivot columns.
pub struct Rref {
    pub reduced: RatMatrix,
    pub transform: RatMatrix,
    pub pivots: Vec<usize>,
}

pub fn rref(a: &RatMatrix, cols: usize) -> Rref {
    let rows = a.len();
    let mut r = a.clone();
    let mut t: RatMatrix = (0..rows)
        .map(|i| (0..rows).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&i| !r[i][col].is_zero()) else {
            continue;
        };
        r.swap(p, row);
        t.swap(p, row);
        let inv = r[row][col].recip();
        for x in r[row].iter_mut() {
            *x *= &inv;
        }
        for x in t[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i == row || r[i][col].is_zero() {
                continue;
            }
            let f = r[i][col].clone();
            for j in 0..cols {
                let d = &f * &r[row][j];
                r[i][j] -= d;
            }
            for j in 0..rows {
                let d = &f * &t[row][j];
                t[i][j] -= d;
            }
        }
        pivots.push(col);
        row += 1;
    }
    Rref { reduced: r, transform: t, pivots }
}

/// Some rational solution of `a · x = b`, or `None` when inconsistent.
pub fn solve(a: &RatMatrix, cols: usize, b: &[BigRational]) -> Option<Vec<BigRational>> {
    let Rref { reduced, transform, pivots } = rref(a, cols);
    let tb: Vec<BigRational> = transform
        .iter()
        .map(|row| row.iter().zip(b).map(|(x, y)| x * y).sum())
        .collect();
    if tb[pivots.len()..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &p) in pivots.iter().enumerate() {
        debug_assert!(reduced[i][p].is_one());
        x[p] = tb[i].clone();
    }
    Some(x)
}

/// Least common multiple of the denominators of all entries (1 for an empty list).
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn solves_consistent_overdetermined_system() {
        let a = vec![vec![rat(1), rat(1)], vec![rat(1), rat(-1)], vec![rat(2), rat(0)]];
        let x = solve(&a, 2, &[rat(3), rat(1), rat(4)]).unwrap();
        assert_eq!(x, vec![rat(2), rat(1)]);
        assert!(solve(&a, 2, &[rat(3), rat(1), rat(5)]).is_none());
    }

    #[test]
    fn transform_reproduces_reduced_form() {
        let a = vec![vec![rat(2), rat(4), rat(1)], vec![rat(1), rat(2), rat(0)]];
        let out = rref(&a, 3);
        assert_eq!(out.pivots, vec![0, 2]);
        for i in 0..2 {
            for j in 0..3 {
                let v: BigRational = (0..2).map(|k| &out.transform[i][k] * &a[k][j]).sum();
                assert_eq!(v, out.reduced[i][j]);
            }
        }
    }
}
