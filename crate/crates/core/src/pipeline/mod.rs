//! Intersection of an S-arithmetic set with a subgroup of its ambient group.
//!
//! The stages run in a fixed order: torsion, congruence conditions, linear
//! conditions (through the exponential solver), assembly. Branches are
//! independent and run in parallel; results are gathered in branch order.

mod stages;
mod trace;


use num_bigint::BigInt;
use rayon::prelude::*;
use thiserror::Error;

use crate::expo::ExpoError;
use crate::index::IndexMap;
use crate::lrs::LrsError;
use crate::sarith::{AmbientGroup, ModelError, SArithSet, SArithUnion, Subgroup};

pub use stages::{
    stage_assemble, stage_congruence, stage_linear, stage_torsion, Assembled, Bindings, FreeTerm, LinearOutcome,
    Subproblem,
};
pub use trace::{StageTrace, TraceEvent};

#[derive(Clone, Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lrs(#[from] LrsError),
    #[error(transparent)]
    Expo(ExpoError),
    /// Some exponential system had roots without a common base. The branches
    /// that did not need it are exact; the others were searched up to a bound.
    #[error("roots {roots:?} are not powers of a common base; result is incomplete")]
    UnsupportedRoots { roots: Vec<BigInt>, partial: Box<Intersection> },
    #[error("non-integral coefficient during assembly: {0}")]
    NonIntegralAssembly(String),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl PipelineError {
    /// The incomplete result carried by [`PipelineError::UnsupportedRoots`].
    pub fn partial(&self) -> Option<&Intersection> {
        match self {
            PipelineError::UnsupportedRoots { partial, .. } => Some(partial),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// Step limit for each modular period search.
    pub period_cap: u64,
    /// Index bound for the fallback search when roots are unsupported.
    pub fallback_n_max: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options { jobs: None, period_cap: 1 << 24, fallback_n_max: 12 }
    }
}

/// A set `F` and a subgroup `Γ` of the same ambient group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionProblem {
    fset: SArithSet,
    gamma: Subgroup,
}

impl IntersectionProblem {
    pub fn new(fset: SArithSet, gamma: Subgroup) -> Result<Self, PipelineError> {
        if fset.ambient() != gamma.ambient() {
            return Err(ModelError::AmbientMismatch.into());
        }
        Ok(IntersectionProblem { fset, gamma })
    }

    pub fn ambient(&self) -> &AmbientGroup {
        self.fset.ambient()
    }

    pub fn fset(&self) -> &SArithSet {
        &self.fset
    }

    pub fn gamma(&self) -> &Subgroup {
        &self.gamma
    }
}

/// `F ∩ Γ` as a union, with one provenance entry and one trace path per component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Intersection {
    pub union: SArithUnion,
    pub trace: StageTrace,
    /// `provenance[c][i]`: input slot `i` as a function of component `c`'s slots.
    pub provenance: Vec<Vec<IndexMap>>,
    /// Index of the input component each output component came from.
    pub sources: Vec<usize>,
}

impl Intersection {
    fn empty() -> Self {
        Intersection { union: SArithUnion::empty(), trace: StageTrace::default(), provenance: Vec::new(), sources: Vec::new() }
    }

    /// Input indices producing the same groupless part as `indices` on `component`.
    pub fn input_indices(&self, component: usize, indices: &[u64]) -> Vec<u64> {
        self.provenance[component].iter().map(|m| m.apply(indices)).collect()
    }

    fn append(&mut self, other: Intersection, source: usize) {
        self.sources.extend(std::iter::repeat(source).take(other.union.len()));
        self.union.components.extend(other.union.components);
        self.provenance.extend(other.provenance);
        self.trace.absorb(other.trace);
    }
}

pub fn intersect(problem: &IntersectionProblem) -> Result<Intersection, PipelineError> {
    intersect_with(problem, &Options::default())
}

pub fn intersect_with(problem: &IntersectionProblem, options: &Options) -> Result<Intersection, PipelineError> {
    in_pool(options, || run(problem, options))?
}

fn in_pool<T: Send>(options: &Options, f: impl FnOnce() -> T + Send) -> Result<T, PipelineError> {
    match options.jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| PipelineError::ThreadPool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn run(problem: &IntersectionProblem, options: &Options) -> Result<Intersection, PipelineError> {
    let conditions = problem.gamma.free_part().membership_conditions();
    let cap = options.period_cap;
    let mut trace = StageTrace::default();

    let subs = stage_torsion(problem, cap)?;
    trace.torsion_branches = subs.len();

    let subs: Vec<Subproblem> = subs
        .into_par_iter()
        .map(|s| stage_congruence(s, &conditions.congruences, cap))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    trace.congruence_branches = subs.len();

    let outcomes: Vec<LinearOutcome> = subs
        .into_par_iter()
        .map(|s| stage_linear(s, &conditions.linears, options))
        .collect::<Result<_, _>>()?;
    let mut branches = Vec::new();
    for o in outcomes {
        for r in o.unsupported.into_iter().flatten() {
            if !trace.unsupported_roots.contains(&r) {
                trace.unsupported_roots.push(r);
            }
        }
        branches.extend(o.branches);
    }
    trace.unsupported_roots.sort();
    trace.linear_branches = branches.len();

    let ambient = problem.ambient();
    let s = problem.fset.s();
    let assembled: Vec<Assembled> = branches
        .par_iter()
        .map(|(sub, b)| stage_assemble(sub, b, ambient, s))
        .collect::<Result<_, _>>()?;

    let mut out = Intersection::empty();
    for a in assembled {
        if out.union.components.contains(&a.set) {
            continue;
        }
        out.union.components.push(a.set);
        out.provenance.push(a.provenance);
        out.trace.paths.push(a.path);
        out.sources.push(0);
    }
    trace.paths = std::mem::take(&mut out.trace.paths);
    out.trace = trace;
    finish(out)
}

fn finish(out: Intersection) -> Result<Intersection, PipelineError> {
    if out.trace.is_complete() {
        Ok(out)
    } else {
        Err(PipelineError::UnsupportedRoots { roots: out.trace.unsupported_roots.clone(), partial: Box::new(out) })
    }
}

/// Intersects every component of `union` with `gamma` and concatenates.
pub fn mordell_lang_compose(union: &SArithUnion, gamma: &Subgroup, options: &Options) -> Result<Intersection, PipelineError> {
    let mut out = Intersection::empty();
    for (i, component) in union.iter().enumerate() {
        let problem = IntersectionProblem::new(component.clone(), gamma.clone())?;
        match intersect_with(&problem, options) {
            Ok(part) => out.append(part, i),
            Err(PipelineError::UnsupportedRoots { partial, .. }) => out.append(*partial, i),
            Err(e) => return Err(e),
        }
    }
    finish(out)
}
