//! Dense univariate polynomials with integer coefficients, stored low degree first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Strips trailing zero coefficients.
fn trim<T: Zero>(mut p: Vec<T>) -> Vec<T> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn derivative(p: &[BigInt]) -> Vec<BigInt> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

pub fn eval(p: &[BigInt], x: &BigInt) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// Monic gcd over the rationals. Returns an empty vector for gcd(0, 0).
pub fn gcd_rational(a: &[BigInt], b: &[BigInt]) -> Vec<BigRational> {
    let mut x: Vec<BigRational> = trim(a.iter().cloned().map(BigRational::from_integer).collect());
    let mut y: Vec<BigRational> = trim(b.iter().cloned().map(BigRational::from_integer).collect());
    while !y.is_empty() {
        let r = rem_rational(&x, &y);
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        for c in x.iter_mut() {
            *c = &*c / &lead;
        }
    }
    x
}

fn rem_rational(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let q = &r[dr] / &lead;
        for (i, c) in b.iter().enumerate() {
            r[dr - db + i] -= &q * c;
        }
        r = trim(r);
    }
    r
}

/// True when `p` has no repeated complex root, i.e. gcd(p, p') is constant.
pub fn is_squarefree(p: &[BigInt]) -> bool {
    let p = trim(p.to_vec());
    if p.len() <= 2 {
        return !p.is_empty();
    }
    gcd_rational(&p, &derivative(&p)).len() == 1
}

fn small_primes() -> impl Iterator<Item = u64> {
    (3u64..).step_by(2).filter(|n| (3..).step_by(2).take_while(|d| d * d <= *n).all(|d| n % d != 0))
}

fn reduce_mod(p: &[BigInt], m: u64) -> Vec<u64> {
    let mb = BigInt::from(m);
    trim(p.iter().map(|c| c.mod_floor(&mb).to_u64().unwrap()).collect())
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    acc
}

fn gcd_degree_mod_p(a: Vec<u64>, b: Vec<u64>, p: u64) -> usize {
    let (mut x, mut y) = (a, b);
    while !y.is_empty() {
        let inv = pow_mod(*y.last().unwrap(), p - 2, p);
        let dy = y.len() - 1;
        while x.len() > dy && !x.is_empty() {
            let dx = x.len() - 1;
            let q = (x[dx] as u128 * inv as u128 % p as u128) as u64;
            for (i, c) in y.iter().enumerate() {
                let sub = (q as u128 * *c as u128 % p as u128) as u64;
                x[dx - dy + i] = (x[dx - dy + i] + p - sub) % p;
            }
            x = trim(x);
        }
        std::mem::swap(&mut x, &mut y);
    }
    x.len().saturating_sub(1)
}

/// All integer roots of a monic, squarefree integer polynomial, sorted ascending.
///
/// Roots are found modulo a prime `p` at which the polynomial stays squarefree,
/// Hensel-lifted past twice the Cauchy bound, and confirmed by exact evaluation.
pub fn integer_roots(p: &[BigInt]) -> Vec<BigInt> {
    let p = trim(p.to_vec());
    assert!(p.last().is_some_and(|c| c.is_one()), "integer_roots expects a monic polynomial");
    let deg = p.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let mut roots = Vec::new();
    // Factor out x^k so the remaining polynomial has a nonzero constant term.
    let zeros = p.iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        roots.push(BigInt::zero());
    }
    let p: Vec<BigInt> = p[zeros..].to_vec();
    if p.len() == 1 {
        return roots;
    }
    let dp = derivative(&p);
    let bound = BigInt::one() + p.iter().map(|c| c.abs()).max().unwrap();
    let prime = small_primes()
        .find(|&q| {
            let pq = reduce_mod(&p, q);
            pq.len() == p.len() && gcd_degree_mod_p(pq, reduce_mod(&dp, q), q) == 0
        })
        .expect("a squarefree polynomial stays squarefree modulo all but finitely many primes");
    let q = BigInt::from(prime);
    let mut modulus = q.clone();
    let mut candidates: Vec<BigInt> = (0..prime)
        .map(BigInt::from)
        .filter(|x| eval(&p, x).mod_floor(&q).is_zero())
        .collect();
    let target = &bound * 2u32 + 1u32;
    while modulus <= target {
        let next = &modulus * &q;
        for x in candidates.iter_mut() {
            let fx = eval(&p, x);
            let dfx = eval(&dp, x).mod_floor(&next);
            let inv = mod_inverse(&dfx, &next).expect("simple root has invertible derivative");
            *x = (&*x - fx * inv).mod_floor(&next);
        }
        modulus = next;
    }
    let half = &modulus / 2u32;
    for x in candidates {
        let r = if x > half { x - &modulus } else { x };
        if eval(&p, &r).is_zero() {
            roots.push(r);
        }
    }
    roots.sort();
    roots
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

/// Coefficients (low degree first) of the monic polynomial with the given roots.
pub fn from_roots(roots: &[BigInt]) -> Vec<BigInt> {
    let mut p = vec![BigInt::one()];
    for r in roots {
        let mut next = vec![BigInt::zero(); p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * r;
        }
        p = next;
    }
    p
}
