//! Instance generators and independent checks shared by the property tests and
//! the acceptance run. Every check returns a description of the first violation.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sarith::expo::{solve, ExpoSystem};
use sarith::intlinalg::{hnf, snf, IntMatrix};
use sarith::lrs::{poly, LinearRecurrence, PowersClosedSet};
use sarith::oracle::{brute_intersection, covers, SearchBox};
use sarith::pipeline::{Intersection, IntersectionProblem};
use sarith::sarith::{
    fset_to_sarith, AmbientGroup, FSetDescriptor, GroupElement, GrouplessSArithSet, SArithSet, Subgroup,
};

pub type Check = Result<(), String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn int(x: i64) -> BigInt {
    BigInt::from(x)
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| int(x)).collect()
}

/// `a_1, …, a_count` by running the recurrence directly.
pub fn iterate(seq: &LinearRecurrence, count: usize) -> Vec<BigInt> {
    let c = seq.coeffs();
    let mut out: Vec<BigInt> = seq.initial_terms().to_vec();
    while out.len() < count {
        let k = out.len() - c.len();
        let next = c.iter().zip(&out[k..]).map(|(c, a)| c * a).sum();
        out.push(next);
    }
    out.truncate(count);
    out
}

/// Any valid recurrence of order 1 to 3 with small coefficients, split or not.
pub fn recurrence(rng: &mut ChaCha8Rng) -> LinearRecurrence {
    loop {
        let m = rng.gen_range(1..=3);
        let coeffs: Vec<i64> = (0..m).map(|_| rng.gen_range(-3..=3)).collect();
        let initial: Vec<i64> = (0..m).map(|_| rng.gen_range(-5..=5)).collect();
        if initial.iter().all(|&a| a == 0) {
            continue;
        }
        if let Ok(s) = LinearRecurrence::from_i64(&coeffs, &initial) {
            return s;
        }
    }
}

/// Up to two roots from `{1, b, b², −b}` with small coefficients.
pub fn common_base_sequence(rng: &mut ChaCha8Rng, base: i64) -> LinearRecurrence {
    let roots = [1, base, base * base, -base];
    loop {
        let mut parts: Vec<(BigInt, BigInt)> = Vec::new();
        for _ in 0..rng.gen_range(1..=2) {
            let r = int(roots[rng.gen_range(0..4)]);
            let d = int([-3, -2, -1, 1, 2, 3][rng.gen_range(0..6)]);
            if !parts.iter().any(|(x, _)| *x == r) {
                parts.push((r, d));
            }
        }
        if let Ok(s) = LinearRecurrence::from_exponentials(&parts) {
            return s;
        }
    }
}

// ---- sequence closure and periodicity ----

/// Term-wise identities for subsampling and affine maps, `n ≤ 100`.
pub fn check_closure(seq: &LinearRecurrence, rng: &mut ChaCha8Rng) -> Check {
    let u = rng.gen_range(1..=3u64);
    let v = rng.gen_range(1 - u as i64..=2);
    let base = iterate(seq, (100 * u as i64 + v) as usize);
    match seq.subsample(u, v) {
        Ok(sub) => {
            let got = iterate(&sub, 100);
            for n in 1..=100i64 {
                if got[n as usize - 1] != base[(u as i64 * n + v) as usize - 1] {
                    return Err(format!("subsample({u}, {v}) of {seq:?} differs at n = {n}"));
                }
            }
        }
        // Only an identically zero subsequence may be rejected.
        Err(e) => {
            if (1..=100i64).any(|n| !base[(u as i64 * n + v) as usize - 1].is_zero()) {
                return Err(format!("subsample({u}, {v}) of {seq:?} failed: {e}"));
            }
        }
    }
    let (a, b) = (int(rng.gen_range(-5..=5)), int(rng.gen_range(-5..=5)));
    let base = iterate(seq, 100);
    match seq.affine(&a, &b) {
        Ok(t) => {
            let got = iterate(&t, 100);
            for n in 0..100 {
                if got[n] != &a * &base[n] + &b {
                    return Err(format!("affine({a}, {b}) of {seq:?} differs at n = {}", n + 1));
                }
            }
        }
        Err(e) => {
            if base.iter().any(|x| !(&a * x + &b).is_zero()) {
                return Err(format!("affine({a}, {b}) of {seq:?} failed: {e}"));
            }
        }
    }
    Ok(())
}

/// `a_n mod D` for `n = 1..=count`, stepping the recurrence on residues.
fn residues(seq: &LinearRecurrence, d: &BigInt, count: usize) -> Vec<BigInt> {
    let c: Vec<BigInt> = seq.coeffs().iter().map(|x| x.mod_floor(d)).collect();
    let mut out: Vec<BigInt> = seq.initial_terms().iter().map(|a| a.mod_floor(d)).collect();
    while out.len() < count {
        let k = out.len() - c.len();
        let next = c.iter().zip(&out[k..]).map(|(c, a)| c * a).sum::<BigInt>().mod_floor(d);
        out.push(next);
    }
    out.truncate(count);
    out
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The reported preperiod and period hold on `n ≤ 10·(ρ+π)` and neither can shrink.
pub fn check_period(seq: &LinearRecurrence, modulus: i64) -> Check {
    let d = int(modulus);
    let prof = seq.eventual_period_mod(&d);
    let (rho, pi) = (prof.preperiod as usize, prof.period as usize);
    if pi == 0 {
        return Err("zero period".into());
    }
    let count = (10 * (rho + pi)).max(rho + 2 * pi + seq.order());
    let r = residues(seq, &d.abs(), count);
    let exact = iterate(seq, 30.min(count));
    for (n, a) in exact.iter().enumerate() {
        if a.mod_floor(&d.abs()) != r[n] {
            return Err(format!("residue oracle disagrees with the terms at n = {}", n + 1));
        }
    }
    if prof.residues[..] != r[..rho + pi] {
        return Err("reported residues differ".into());
    }
    let holds = |p: usize, from: usize| (from..=count - p).all(|n| r[n - 1] == r[n + p - 1]);
    if !holds(pi, rho + 1) {
        return Err(format!("(ρ, π) = ({rho}, {pi}) is not a period of {seq:?} mod {modulus}"));
    }
    if rho > 0 && r[rho - 1] == r[rho + pi - 1] {
        return Err(format!("preperiod {rho} is not minimal for {seq:?} mod {modulus}"));
    }
    for q in prime_factors(pi as u64) {
        if holds(pi / q as usize, rho + 1) {
            return Err(format!("period {pi} is not minimal: {} works for {seq:?} mod {modulus}", pi / q as usize));
        }
    }
    Ok(())
}

// ---- normal forms ----

/// Dimensions up to 5×5, entries in `−20..=20`; a third are low-rank products.
pub fn matrix(rng: &mut ChaCha8Rng) -> IntMatrix {
    let (r, c) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
    let low_rank = rng.gen_range(0..3) == 0;
    let k = rng.gen_range(1..=r.min(c));
    let mut fill = |rows: usize, cols: usize, b: i64| {
        IntMatrix::from_rows((0..rows).map(|_| (0..cols).map(|_| int(rng.gen_range(-b..=b))).collect()).collect(), cols)
    };
    if low_rank {
        let m = &fill(r, k, 3) * &fill(k, c, 2);
        if m.row_vecs().iter().flatten().all(|x| x.abs() <= int(20)) {
            return m;
        }
    }
    fill(r, c, 20)
}

pub fn check_hnf(a: &IntMatrix) -> Check {
    let f = hnf(a);
    if !f.u.is_unimodular() {
        return Err(format!("hnf transform is not unimodular for\n{a}"));
    }
    if &(a * &f.u) != &f.h {
        return Err(format!("a·u ≠ h for\n{a}"));
    }
    let h = &f.h;
    for (j, &p) in f.pivots.iter().enumerate() {
        if j > 0 && p <= f.pivots[j - 1] {
            return Err("pivot rows do not increase".into());
        }
        if (0..p).any(|i| !h[(i, j)].is_zero()) || !h[(p, j)].is_positive() {
            return Err(format!("column {j} is not in echelon form:\n{h}"));
        }
        if (0..j).any(|k| h[(p, k)].is_negative() || h[(p, k)] >= h[(p, j)]) {
            return Err(format!("row {p} is not reduced against its pivot:\n{h}"));
        }
    }
    if (f.rank()..h.cols()).any(|j| (0..h.rows()).any(|i| !h[(i, j)].is_zero())) {
        return Err("columns past the rank are nonzero".into());
    }
    if f.rank() != snf(a).rank() {
        return Err("hnf and snf disagree on the rank".into());
    }
    Ok(())
}

pub fn check_snf(a: &IntMatrix) -> Check {
    let f = snf(a);
    if !f.u.is_unimodular() || !f.v.is_unimodular() {
        return Err(format!("snf transforms are not unimodular for\n{a}"));
    }
    if &(&(&f.u * a) * &f.v) != &f.d {
        return Err(format!("u·a·v ≠ d for\n{a}"));
    }
    for i in 0..f.d.rows() {
        for j in 0..f.d.cols() {
            if i != j && !f.d[(i, j)].is_zero() {
                return Err(format!("d is not diagonal:\n{}", f.d));
            }
        }
    }
    let diag = f.diagonal();
    if diag.iter().any(Signed::is_negative) {
        return Err("negative invariant factor".into());
    }
    for w in diag.windows(2) {
        let ok = if w[0].is_zero() { w[1].is_zero() } else { w[1].is_multiple_of(&w[0]) };
        if !ok {
            return Err(format!("divisibility chain broken: {diag:?}"));
        }
    }
    Ok(())
}

// ---- F-sets ----

/// Size 1 to 3, entries in `−3..=3`, minimal polynomial squarefree with nonzero
/// integer roots. Triangular draws are mixed in to keep rejection cheap.
pub fn split_matrix(rng: &mut ChaCha8Rng) -> IntMatrix {
    loop {
        let r = rng.gen_range(1..=3);
        let triangular = rng.gen_bool(0.5);
        let rows = (0..r)
            .map(|i| (0..r).map(|j| if triangular && j < i { BigInt::zero() } else { int(rng.gen_range(-3..=3)) }).collect())
            .collect();
        let phi = IntMatrix::from_rows(rows, r);
        let rel = sarith::sarith::minimal_polynomial(&phi);
        let mut p: Vec<BigInt> = rel.iter().map(|c| -c).collect();
        p.push(BigInt::one());
        if !rel[0].is_zero() && poly::is_squarefree(&p) && poly::integer_roots(&p).len() == rel.len() {
            return phi;
        }
    }
}

/// `Φⁿ·α + α₀` against the converted set at index `n`, for `n ≤ 40`.
pub fn check_fset(phi: &IntMatrix, rng: &mut ChaCha8Rng) -> Check {
    let r = phi.rows();
    let mut vector = |lo: i64| loop {
        let v: Vec<BigInt> = (0..r).map(|_| int(rng.gen_range(-3..=3))).collect();
        if lo == 0 || v.iter().any(|x| !x.is_zero()) {
            return v;
        }
    };
    let base = vector(0);
    let alpha = vector(1);
    let desc = FSetDescriptor::with_minimal_polynomial(phi.clone(), base.clone(), vec![(alpha.clone(), 1)])
        .map_err(|e| format!("descriptor for\n{phi}: {e}"))?;
    let set = fset_to_sarith(&desc).map_err(|e| format!("conversion of\n{phi}: {e}"))?;
    let mut x = alpha;
    for n in 1..=40u64 {
        x = phi.mul_vec(&x);
        let want: Vec<BigInt> = x.iter().zip(&base).map(|(a, b)| a + b).collect();
        let got = set.evaluate(&[n]).map_err(|e| e.to_string())?;
        if got.free != want {
            return Err(format!("Φ^{n}·α differs for\n{phi}"));
        }
    }
    Ok(())
}

// ---- exponential systems ----

fn pow(base: i64) -> LinearRecurrence {
    LinearRecurrence::from_i64(&[base], &[base]).unwrap()
}

/// The four documented systems: 2^{n₁} = 2^{n₂}, 2^{n₁} = 4^{n₂},
/// 2^{n₁} + 2^{n₂} = 2^{n₃}, 3·2^{n₁} = 2^{n₂}.
pub fn worked_systems() -> Vec<ExpoSystem> {
    let sys = |seqs: Vec<LinearRecurrence>, row: &[i64]| ExpoSystem::new(seqs, IntMatrix::from_i64(&[row])).unwrap();
    vec![
        sys(vec![pow(2), pow(2)], &[1, -1]),
        sys(vec![pow(2), pow(4)], &[1, -1]),
        sys(vec![pow(2), pow(2), pow(2)], &[1, 1, -1]),
        sys(vec![pow(2), pow(2)], &[3, -1]),
    ]
}

/// One or two equations over two or three common-base sequences, sometimes with
/// a constant or a shared variable.
pub fn expo_system(rng: &mut ChaCha8Rng) -> ExpoSystem {
    let base = if rng.gen_bool(0.5) { 2 } else { 3 };
    let m = rng.gen_range(2..=3);
    let seqs: Vec<LinearRecurrence> = (0..m).map(|_| common_base_sequence(rng, base)).collect();
    let w = rng.gen_range(1..=2);
    let rows: Vec<Vec<BigInt>> = (0..w).map(|_| (0..m).map(|_| int(rng.gen_range(-3..=3))).collect()).collect();
    let constants: Vec<BigInt> = (0..w).map(|_| if rng.gen_bool(0.3) { int(rng.gen_range(-6..=6)) } else { BigInt::zero() }).collect();
    let (variables, vars) = if m == 3 && rng.gen_bool(0.3) { (vec![0, 0, 1], 2) } else { ((0..m).collect(), m) };
    ExpoSystem::with_structure(seqs, IntMatrix::from_rows(rows, m), constants, variables, vars).unwrap()
}

fn tuples(vars: usize, n_max: u64, mut f: impl FnMut(&[u64])) {
    let mut t = vec![1u64; vars];
    loop {
        f(&t);
        let mut k = vars;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if t[k] < n_max {
                t[k] += 1;
                break;
            }
            t[k] = 1;
        }
    }
}

/// Tables of `a^{(i)}_n` for `n ≤ n_max`, by direct iteration.
fn expo_tables(sys: &ExpoSystem, n_max: u64) -> Vec<Vec<BigInt>> {
    sys.sequences().iter().map(|s| iterate(s, n_max as usize)).collect()
}

fn expo_holds(sys: &ExpoSystem, tables: &[Vec<BigInt>], values: &[u64]) -> bool {
    let z = sys.coefficients();
    (0..sys.equation_count()).all(|l| {
        let mut acc = sys.constants()[l].clone();
        for (i, t) in tables.iter().enumerate() {
            acc += &z[(l, i)] * &t[values[sys.variables()[i]] as usize - 1];
        }
        acc.is_zero()
    })
}

/// Families cover exactly the brute-force solutions with every index `≤ n_max`,
/// and every member with parameters `≤ param_max` solves the system.
pub fn check_expo(sys: &ExpoSystem, n_max: u64, param_max: u64) -> Check {
    let fams = solve(sys).map_err(|e| format!("solve failed on\n{sys}: {e}"))?;
    let vars = sys.var_count();
    let tables = expo_tables(sys, n_max);
    let mut brute = BTreeSet::new();
    tuples(vars, n_max, |t| {
        if expo_holds(sys, &tables, t) {
            brute.insert(t.to_vec());
        }
    });
    let mut generated = BTreeSet::new();
    for f in &fams {
        tuples(f.param_count, n_max, |k| {
            let x = f.sample(k);
            if x.iter().all(|&n| n <= n_max) {
                generated.insert(x);
            }
        });
    }
    if brute != generated {
        return Err(format!("families {fams:?} give {generated:?}, brute force gives {brute:?} for\n{sys}"));
    }
    for f in &fams {
        let mut bad = None;
        let top = f.sample(&vec![param_max; f.param_count]).into_iter().max().unwrap_or(1);
        let tables = expo_tables(sys, top.max(1));
        tuples(f.param_count, param_max, |k| {
            if bad.is_none() && !expo_holds(sys, &tables, &f.sample(k)) {
                bad = Some(k.to_vec());
            }
        });
        if let Some(k) = bad {
            return Err(format!("family {f} at parameters {k:?} does not solve\n{sys}"));
        }
    }
    Ok(())
}

// ---- intersection instances ----

fn element(rng: &mut ChaCha8Rng, amb: &AmbientGroup, bound: i64) -> GroupElement {
    let free = (0..amb.free_rank()).map(|_| int(rng.gen_range(-bound..=bound))).collect();
    let torsion = amb.torsion_factors().iter().map(|d| int(rng.gen_range(0..i64::try_from(d).unwrap()))).collect();
    amb.element(free, torsion).unwrap()
}

/// Rank ≤ 3, ≤ 2 sequence terms, ≤ 2 generators in the set's subgroup, roots
/// from base 2 or 3, coefficients bounded by 5.
pub fn instance(seed: u64, torsion: bool) -> IntersectionProblem {
    let mut rng = rng(seed);
    let base = if rng.gen_bool(0.5) { 2 } else { 3 };
    let rank = rng.gen_range(1..=3);
    let amb = if torsion {
        AmbientGroup::new(rank, vec![int([2, 3, 4][rng.gen_range(0..3)])]).unwrap()
    } else {
        AmbientGroup::free(rank)
    };
    let terms =
        (0..rng.gen_range(1..=2)).map(|_| (element(&mut rng, &amb, 5), common_base_sequence(&mut rng, base))).collect();
    let s = PowersClosedSet::new(ints(&[base, -base])).unwrap();
    let offset = element(&mut rng, &amb, 5);
    let u = GrouplessSArithSet::new(amb.clone(), offset, terms, s).unwrap();
    let gens = (0..rng.gen_range(0..=2)).map(|_| element(&mut rng, &amb, 5)).collect();
    let f = SArithSet::new(u, Subgroup::new(amb.clone(), gens).unwrap()).unwrap();
    let gamma_gens = (0..rng.gen_range(1..=3)).map(|_| element(&mut rng, &amb, 5)).collect();
    IntersectionProblem::new(f, Subgroup::new(amb, gamma_gens).unwrap()).unwrap()
}

/// Random members of every component (indices and coefficients up to `param_max`)
/// lie in `Γ`, and their provenance indices reproduce them in the input set.
pub fn check_soundness(p: &IntersectionProblem, out: &Intersection, samples: usize, param_max: u64, rng: &mut ChaCha8Rng) -> Check {
    let f = p.fset();
    let amb = p.ambient();
    for (c, comp) in out.union.iter().enumerate() {
        let gens = comp.subgroup().generators().len();
        for _ in 0..samples {
            let idx: Vec<u64> = (0..comp.slot_count()).map(|_| rng.gen_range(1..=param_max)).collect();
            let m = param_max as i64;
            let coeffs: Vec<BigInt> = (0..gens).map(|_| int(rng.gen_range(-m..=m))).collect();
            let x = comp.element(&idx, &coeffs).map_err(|e| e.to_string())?;
            if !p.gamma().contains(&x) {
                return Err(format!("component {c} at {idx:?}, {coeffs:?} gives {x} outside Γ"));
            }
            let back = f.evaluate(&out.input_indices(c, &idx)).map_err(|e| e.to_string())?;
            if !f.subgroup().contains(&amb.sub(&x, &back)) {
                return Err(format!("component {c} at {idx:?}, {coeffs:?} gives {x} outside the input set"));
            }
        }
    }
    Ok(())
}

/// Every brute-force point of `F ∩ Γ` in the box is reached by some component.
pub fn check_completeness(p: &IntersectionProblem, out: &Intersection, bx: SearchBox) -> Check {
    let points = brute_intersection(p.fset(), p.gamma(), bx).map_err(|e| e.to_string())?;
    covers(&points, &out.union, bx.n_max).map_err(|x| format!("{x} is not covered; problem {p:?}"))
}
