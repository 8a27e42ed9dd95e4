use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::trace::TraceEvent;
use super::{IntersectionProblem, Options, PipelineError};
use crate::expo::{self, ExpoError, ExpoSystem, SolutionFamily};
use crate::index::{self, IndexMap};
use crate::intlinalg::lattice::dot;
use crate::intlinalg::{
    for_each_choice, integrality_families_capped, joint_profile, parametric_solve, slot_classes, solvability_relations,
    solve_congruences, CongruenceCondition, IntMatrix, Lattice, LinearCondition, ParametricSolution, SequenceRhs,
};
use crate::lrs::{LinearRecurrence, LrsError, PowersClosedSet};
use crate::sarith::{AmbientGroup, GroupElement, GrouplessSArithSet, SArithSet, SArithTerm, Subgroup};

/// `a_n·P` with `P` in the free part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeTerm {
    pub point: Vec<BigInt>,
    pub sequence: LinearRecurrence,
    pub slot: usize,
}

/// `translation + (offset + Σ a_n·P + basis·y)` where everything but the
/// translation lives in `Z^r` and `y` ranges over all of `Z^s`.
///
/// `provenance[i]` says how input slot `i` is read off the current slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subproblem {
    pub offset: Vec<BigInt>,
    pub terms: Vec<FreeTerm>,
    pub slot_count: usize,
    pub basis: IntMatrix,
    pub translation: GroupElement,
    pub provenance: Vec<IndexMap>,
    pub path: Vec<TraceEvent>,
}

/// First index reached by a slot map.
fn first_index(m: &IndexMap) -> u64 {
    match *m {
        IndexMap::Fixed(n) => n,
        IndexMap::Affine { scale, offset, .. } => (scale as i64 + offset) as u64,
    }
}

fn add_scaled(acc: &mut [BigInt], k: &BigInt, v: &[BigInt]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += k * x;
    }
}

fn choices(options: &[Vec<IndexMap>]) -> Vec<Vec<IndexMap>> {
    let mut out = Vec::new();
    for_each_choice(options, |c| out.push(c.to_vec()));
    out
}

impl Subproblem {
    pub fn rank(&self) -> usize {
        self.offset.len()
    }

    /// Rewrites the slots through `maps` onto `count` new slots. Pinned terms are
    /// folded into the offset and terms that vanish identically are dropped.
    pub fn reindex(&self, maps: &[IndexMap], count: usize) -> Result<Subproblem, LrsError> {
        let mut offset = self.offset.clone();
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            match maps[t.slot] {
                IndexMap::Fixed(n) => add_scaled(&mut offset, &t.sequence.term(n), &t.point),
                IndexMap::Affine { slot, scale, offset: shift } => {
                    let sequence = if scale == 1 && shift == 0 {
                        t.sequence.clone()
                    } else {
                        match t.sequence.subsample(scale, shift) {
                            Ok(s) => s,
                            Err(LrsError::DegenerateSequence) => continue,
                            Err(e) => return Err(e),
                        }
                    };
                    terms.push(FreeTerm { point: t.point.clone(), sequence, slot });
                }
            }
        }
        Ok(Subproblem {
            offset,
            terms,
            slot_count: count,
            basis: self.basis.clone(),
            translation: self.translation.clone(),
            provenance: index::compose(&self.provenance, maps),
            path: self.path.clone(),
        })
    }

    /// The free-part point for the given slot indices and subgroup coordinates.
    pub fn evaluate_free(&self, indices: &[u64], y: &[BigInt]) -> Vec<BigInt> {
        let mut x = self.offset.clone();
        for t in &self.terms {
            add_scaled(&mut x, &t.sequence.term(indices[t.slot]), &t.point);
        }
        for (v, c) in self.basis.mul_vec(y).iter().zip(x.iter_mut()) {
            *c += v;
        }
        x
    }

    /// Profiles of the sequences in each slot whose weight is nonzero, as slot
    /// classes; untouched slots keep the identity.
    fn classes(&self, weighted: &[bool], modulus: &BigInt, cap: u64) -> Result<Vec<Vec<IndexMap>>, LrsError> {
        (0..self.slot_count)
            .map(|slot| {
                let seqs: Vec<&LinearRecurrence> = self
                    .terms
                    .iter()
                    .zip(weighted)
                    .filter(|(t, &w)| w && t.slot == slot)
                    .map(|(t, _)| &t.sequence)
                    .collect();
                if seqs.is_empty() {
                    return Ok(vec![IndexMap::identity(slot)]);
                }
                let (rho, pi) = joint_profile(&seqs, modulus, cap)?;
                Ok(slot_classes(rho, pi, slot))
            })
            .collect()
    }
}

/// Splits the input into torsion-free subproblems: one per coset of the input
/// subgroup's free part and per slot class on which the torsion of the point is
/// constant, keeping those whose torsion matches a coset of the target.
pub fn stage_torsion(problem: &IntersectionProblem, period_cap: u64) -> Result<Vec<Subproblem>, PipelineError> {
    let set = problem.fset();
    let amb = set.ambient();
    let u = set.groupless();
    let b = set.subgroup();
    let slots = u.slot_count();
    let identity: Vec<IndexMap> = (0..slots).map(IndexMap::identity).collect();
    let terms: Vec<FreeTerm> = u
        .terms()
        .iter()
        .map(|t| FreeTerm { point: t.point.free.clone(), sequence: t.sequence.clone(), slot: t.slot })
        .collect();
    let mut base = Subproblem {
        offset: u.offset().free.clone(),
        terms,
        slot_count: slots,
        basis: b.free_generator_matrix(),
        translation: amb.zero(),
        provenance: identity.clone(),
        path: Vec::new(),
    };
    if amb.is_torsion_free() {
        base.path.push(TraceEvent::Torsion { coset: 0, target_coset: 0, slot_maps: identity });
        return Ok(vec![base]);
    }
    base.basis = b.free_part().basis();
    let weighted: Vec<bool> = u.terms().iter().map(|t| t.point.torsion.iter().any(|x| !x.is_zero())).collect();
    let options = base.classes(&weighted, &amb.torsion_exponent(), period_cap)?;
    let choices = choices(&options);
    let targets: BTreeMap<Vec<BigInt>, (usize, GroupElement)> = problem
        .gamma()
        .coset_representatives()
        .into_iter()
        .enumerate()
        .map(|(i, g)| (g.torsion.clone(), (i, g)))
        .collect();
    let mut out = Vec::new();
    for (j, h) in b.coset_representatives().iter().enumerate() {
        let start = amb.add(u.offset(), h);
        for maps in &choices {
            let mut x = start.clone();
            for (t, &w) in u.terms().iter().zip(&weighted) {
                if w {
                    let a = t.sequence.term(first_index(&maps[t.slot]));
                    x = amb.add(&x, &amb.scale(&a, &t.point));
                }
            }
            let Some((gi, gamma)) = targets.get(&x.torsion) else { continue };
            let (maps, count) = index::compact(maps);
            let mut sub = base.reindex(&maps, count)?;
            for k in 0..amb.free_rank() {
                sub.offset[k] += &h.free[k] - &gamma.free[k];
            }
            sub.translation = gamma.clone();
            sub.path.push(TraceEvent::Torsion { coset: j, target_coset: *gi, slot_maps: maps });
            out.push(sub);
        }
    }
    Ok(out)
}

/// Imposes the congruence conditions one after another. For each, the slots
/// are split by their residues and the subgroup coordinates restricted to the
/// matching coset of the solution lattice.
pub fn stage_congruence(
    sub: Subproblem,
    conditions: &[CongruenceCondition],
    period_cap: u64,
) -> Result<Vec<Subproblem>, PipelineError> {
    let mut current = vec![sub];
    for (ci, cond) in conditions.iter().enumerate() {
        let mut next = Vec::new();
        for s in &current {
            next.extend(congruence_step(s, ci, cond, period_cap)?);
        }
        current = next;
    }
    Ok(current)
}

fn congruence_step(
    sub: &Subproblem,
    ci: usize,
    cond: &CongruenceCondition,
    period_cap: u64,
) -> Result<Vec<Subproblem>, LrsError> {
    let modulus = cond.modulus.abs();
    let weights: Vec<BigInt> = sub.terms.iter().map(|t| dot(&cond.coeffs, &t.point).mod_floor(&modulus)).collect();
    let weighted: Vec<bool> = weights.iter().map(|w| !w.is_zero()).collect();
    let s = sub.basis.cols();
    let row = IntMatrix::from_rows(vec![(0..s).map(|k| dot(&cond.coeffs, &sub.basis.column(k))).collect()], s);
    let base = dot(&cond.coeffs, &sub.offset);
    let options = sub.classes(&weighted, &modulus, period_cap)?;
    let mut out = Vec::new();
    for maps in choices(&options) {
        let mut residue = base.clone();
        for (t, w) in sub.terms.iter().zip(&weights) {
            if !w.is_zero() {
                residue += w * t.sequence.term(first_index(&maps[t.slot]));
            }
        }
        let Some((y0, lattice)) = solve_congruences(&row, &[-residue], &modulus) else { continue };
        let (maps, count) = index::compact(&maps);
        let mut next = sub.reindex(&maps, count)?;
        for (c, v) in next.offset.iter_mut().zip(sub.basis.mul_vec(&y0)) {
            *c += v;
        }
        let lb = lattice.basis();
        next.basis = &sub.basis * &lb;
        next.path.push(TraceEvent::Congruence { condition: ci, slot_maps: maps, y_offset: y0, y_lattice: lb });
        out.push(next);
    }
    Ok(out)
}

/// What the assembly needs besides the subproblem: the linear conditions and
/// the general solution of `E·y = F·a + f`, with the free variables ranging over
/// `free_offset + free_lattice`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bindings {
    pub rows: IntMatrix,
    pub solution: ParametricSolution,
    pub free_offset: Vec<BigInt>,
    pub free_lattice: Lattice,
}

#[derive(Clone, Debug, Default)]
pub struct LinearOutcome {
    pub branches: Vec<(Subproblem, Bindings)>,
    /// Roots the exponential solver could not handle; the branches for that
    /// subproblem then come from a bounded search.
    pub unsupported: Option<Vec<BigInt>>,
}

/// `F = −D·P` (one column per term) and `f = −D·offset`.
fn rhs_parts(rows: &IntMatrix, sub: &Subproblem) -> (IntMatrix, Vec<BigInt>) {
    let u = rows.rows();
    let f = (0..u).map(|h| sub.terms.iter().map(|t| -dot(rows.row(h), &t.point)).collect()).collect();
    let f0 = (0..u).map(|h| -dot(rows.row(h), &sub.offset)).collect();
    (IntMatrix::from_rows(f, sub.terms.len()), f0)
}

/// Solves the linear conditions: the solvability relations turn them into an
/// exponential system in the sequence terms, whose families reparametrize the
/// slots; integrality of the bound subgroup coordinates splits them further.
pub fn stage_linear(sub: Subproblem, conditions: &[LinearCondition], options: &Options) -> Result<LinearOutcome, PipelineError> {
    let r = sub.rank();
    let rows = IntMatrix::from_rows(
        conditions.iter().filter(|c| !c.is_trivial()).map(|c| c.coeffs.clone()).collect(),
        r,
    );
    let e = &rows * &sub.basis;
    let g = solvability_relations(&e);
    let (f, f0) = rhs_parts(&rows, &sub);
    let z = &g * &f;
    let z0 = g.mul_vec(&f0);
    let sys = ExpoSystem::with_structure(
        sub.terms.iter().map(|t| t.sequence.clone()).collect(),
        z.clone(),
        z0.clone(),
        sub.terms.iter().map(|t| t.slot).collect(),
        sub.slot_count,
    )
    .map_err(PipelineError::Expo)?;
    let mut outcome = LinearOutcome::default();
    let (families, bounded) = match expo::solve(&sys) {
        Ok(f) => (f, None),
        Err(ExpoError::UnsupportedRoots { roots }) => {
            let n_max = options.fallback_n_max;
            let found = expo::solve_bounded(&sys, n_max);
            outcome.unsupported = Some(roots);
            let fams = found
                .tuples
                .iter()
                .map(|t| SolutionFamily { maps: t.iter().map(|&n| IndexMap::Fixed(n)).collect(), param_count: 0 })
                .collect();
            (fams, Some(n_max))
        }
        Err(e) => return Err(PipelineError::Expo(e)),
    };
    let solution = parametric_solve(&e);
    for family in families {
        let mut s1 = sub.reindex(&family.maps, family.param_count)?;
        s1.path.push(TraceEvent::Linear {
            e: e.clone(),
            f: f.clone(),
            f0: f0.clone(),
            g: g.clone(),
            z: z.clone(),
            z0: z0.clone(),
            family,
            bounded,
        });
        let (f1, f01) = rhs_parts(&rows, &s1);
        let rhs = SequenceRhs {
            coeffs: f1,
            constant: f01,
            sequences: s1.terms.iter().map(|t| &t.sequence).collect(),
            slots: s1.terms.iter().map(|t| t.slot).collect(),
            slot_count: s1.slot_count,
        };
        for fam in integrality_families_capped(&solution, &rhs, options.period_cap)? {
            let mut s2 = s1.reindex(&fam.slot_maps, fam.slot_count)?;
            let y_lattice = fam.free_lattice.basis();
            s2.path.push(TraceEvent::Integrality {
                slot_maps: fam.slot_maps,
                free: solution.free.clone(),
                y_offset: fam.free_offset.clone(),
                y_lattice,
            });
            let bindings = Bindings {
                rows: rows.clone(),
                solution: solution.clone(),
                free_offset: fam.free_offset,
                free_lattice: fam.free_lattice,
            };
            outcome.branches.push((s2, bindings));
        }
    }
    Ok(outcome)
}

/// One output component with the slot maps that read the input's indices off
/// its own, and the trace path that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assembled {
    pub set: SArithSet,
    pub provenance: Vec<IndexMap>,
    pub path: Vec<TraceEvent>,
}

fn rat(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

fn rat_mul(m: &IntMatrix, v: &[BigRational]) -> Vec<BigRational> {
    (0..m.rows()).map(|i| m.row(i).iter().zip(v).map(|(a, x)| x * a).sum()).collect()
}

fn add_rat(a: &mut [BigRational], b: &[BigRational]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

fn integral(v: &[BigRational]) -> Option<Vec<BigInt>> {
    v.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect()
}

/// Bound coordinates from free values and right-hand side.
fn bound_values(sol: &ParametricSolution, free: &[BigRational], rhs: &[BigRational]) -> Vec<BigRational> {
    (0..sol.bound.len())
        .map(|j| {
            let a: BigRational = sol.free_coeffs[j].iter().zip(free).map(|(c, x)| c * x).sum();
            let b: BigRational = sol.rhs_coeffs[j].iter().zip(rhs).map(|(c, x)| c * x).sum();
            a + b
        })
        .collect()
}

/// Substitutes the parametric solution back: the result is a groupless set plus
/// the subgroup spanned by the images of the free lattice, all inside the target.
pub fn stage_assemble(
    sub: &Subproblem,
    bindings: &Bindings,
    ambient: &AmbientGroup,
    s: &PowersClosedSet,
) -> Result<Assembled, PipelineError> {
    let sol = &bindings.solution;
    let r = sub.rank();
    let rf = sub.basis.select_columns(&sol.free);
    let rb = sub.basis.select_columns(&sol.bound);
    let (f, f0) = rhs_parts(&bindings.rows, sub);
    let t = sol.free.len();
    let u = bindings.rows.rows();

    let y_off = rat(&bindings.free_offset);
    let mut offset = rat(&sub.offset);
    add_rat(&mut offset, &rat_mul(&rf, &y_off));
    add_rat(&mut offset, &rat_mul(&rb, &bound_values(sol, &y_off, &rat(&f0))));

    let no_free = vec![BigRational::zero(); t];
    let mut terms = Vec::new();
    for (i, term) in sub.terms.iter().enumerate() {
        let mut q = rat(&term.point);
        add_rat(&mut q, &rat_mul(&rb, &bound_values(sol, &no_free, &rat(&f.column(i)))));
        let den = q.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        if den.is_one() {
            terms.push(FreeTerm { point: integral(&q).unwrap(), sequence: term.sequence.clone(), slot: term.slot });
            continue;
        }
        // a_n ≡ a_1 (mod den) on this family, so a_n·q = a_1·q + ((a_n − a_1)/den)·(den·q).
        let first = term.sequence.term(1);
        let scaled: Vec<BigRational> = q.iter().map(|x| x * BigRational::from_integer(den.clone())).collect();
        add_rat(&mut offset, &q.iter().map(|x| x * BigRational::from_integer(first.clone())).collect::<Vec<_>>());
        match term.sequence.shift_divide(&first, &den) {
            Ok(seq) => terms.push(FreeTerm { point: integral(&scaled).unwrap(), sequence: seq, slot: term.slot }),
            Err(LrsError::DegenerateSequence) => {}
            Err(LrsError::NotDivisible { .. }) => {
                return Err(PipelineError::NonIntegralAssembly(format!("{} is not constant modulo {den}", term.sequence)))
            }
            Err(e) => return Err(e.into()),
        }
    }
    let offset = integral(&offset)
        .ok_or_else(|| PipelineError::NonIntegralAssembly("offset is not integral after clearing".into()))?;

    let no_rhs = vec![BigRational::zero(); u];
    let mut gens = Vec::new();
    for col in bindings.free_lattice.basis_columns() {
        let c = rat(&col);
        let mut g = rat_mul(&rf, &c);
        add_rat(&mut g, &rat_mul(&rb, &bound_values(sol, &c, &no_rhs)));
        gens.push(integral(&g).ok_or_else(|| PipelineError::NonIntegralAssembly("subgroup generator".into()))?);
    }
    let generators = Lattice::from_columns(&gens, r).basis_columns();

    let (offset, terms, renumber, count) = tidy(offset, terms, sub.slot_count)?;
    let provenance = index::compose(&sub.provenance, &renumber);
    let mut path = sub.path.clone();
    path.push(TraceEvent::Assemble { slot_maps: renumber, generators: generators.len() });

    let embed = |free: Vec<BigInt>| GroupElement { free, torsion: vec![BigInt::zero(); ambient.torsion_factors().len()] };
    let offset = ambient.add(&embed(offset), &sub.translation);
    let terms = terms
        .into_iter()
        .map(|t| SArithTerm { point: embed(t.point), sequence: t.sequence, slot: t.slot })
        .collect();
    let groupless = GrouplessSArithSet::with_slots(ambient.clone(), offset, terms, count, s.clone())?;
    let subgroup = Subgroup::new(ambient.clone(), generators.into_iter().map(embed).collect())?;
    Ok(Assembled { set: SArithSet::new(groupless, subgroup)?, provenance, path })
}

/// Simplifies a presentation without changing the set: constant sequences move
/// into the offset, equal sequences in a slot merge, a slot whose points are
/// collinear becomes one term, and unused slots are dropped. Returns the slot
/// renumbering alongside.
#[allow(clippy::type_complexity)]
fn tidy(
    mut offset: Vec<BigInt>,
    terms: Vec<FreeTerm>,
    slot_count: usize,
) -> Result<(Vec<BigInt>, Vec<FreeTerm>, Vec<IndexMap>, usize), LrsError> {
    let mut groups: Vec<Vec<(Vec<BigInt>, LinearRecurrence)>> = vec![Vec::new(); slot_count];
    for t in terms {
        if t.point.iter().all(Zero::is_zero) {
            continue;
        }
        if t.sequence.is_constant() {
            add_scaled(&mut offset, &t.sequence.term(1), &t.point);
            continue;
        }
        let group = &mut groups[t.slot];
        match group.iter_mut().find(|(_, s)| *s == t.sequence) {
            Some((p, _)) => {
                for (a, b) in p.iter_mut().zip(&t.point) {
                    *a += b;
                }
            }
            None => group.push((t.point, t.sequence)),
        }
    }
    for group in &mut groups {
        group.retain(|(p, _)| !p.iter().all(Zero::is_zero));
        if group.len() < 2 {
            continue;
        }
        let Some(dir) = direction(group.iter().map(|(p, _)| p)) else { continue };
        let parts: Vec<(&LinearRecurrence, BigInt)> = group.iter().map(|(p, s)| (s, multiple_of(p, &dir))).collect();
        let merged = match LinearRecurrence::linear_combination(&parts) {
            Ok(s) => Some(s),
            Err(LrsError::DegenerateSequence) => None,
            Err(e) => return Err(e),
        };
        group.clear();
        match merged {
            Some(s) if s.is_constant() => add_scaled(&mut offset, &s.term(1), &dir),
            Some(s) => group.push((dir, s)),
            None => {}
        }
    }
    let mut renumber = Vec::with_capacity(slot_count);
    let mut out = Vec::new();
    let mut count = 0;
    for group in groups {
        if group.is_empty() {
            // The set does not depend on this index; any value witnesses it.
            renumber.push(IndexMap::Fixed(1));
            continue;
        }
        renumber.push(IndexMap::identity(count));
        out.extend(group.into_iter().map(|(point, sequence)| FreeTerm { point, sequence, slot: count }));
        count += 1;
    }
    Ok((offset, out, renumber, count))
}

/// The primitive vector, first nonzero entry positive, spanning all the points,
/// if they are collinear.
fn direction<'a>(mut points: impl Iterator<Item = &'a Vec<BigInt>>) -> Option<Vec<BigInt>> {
    let first = points.next()?;
    let g = first.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    let sign = first.iter().find(|x| !x.is_zero())?.signum();
    let dir: Vec<BigInt> = first.iter().map(|x| x / &g * &sign).collect();
    let lead = dir.iter().position(|x| !x.is_zero())?;
    for p in points {
        if !p[lead].is_multiple_of(&dir[lead]) {
            return None;
        }
        let k = &p[lead] / &dir[lead];
        if p.iter().zip(&dir).any(|(a, d)| *a != &k * d) {
            return None;
        }
    }
    Some(dir)
}

fn multiple_of(p: &[BigInt], dir: &[BigInt]) -> BigInt {
    let lead = dir.iter().position(|x| !x.is_zero()).unwrap();
    &p[lead] / &dir[lead]
}
