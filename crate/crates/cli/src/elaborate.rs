//! Turns a parsed document into library objects, reporting resolution and
//! invariant failures at the position of the offending text.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;

use sarith::expo::ExpoSystem;
use sarith::intlinalg::IntMatrix;
use sarith::lrs::{LinearRecurrence, LrsError, PowersClosedSet};
use sarith::pipeline::IntersectionProblem;
use sarith::sarith::{AmbientGroup, GroupElement, GrouplessSArithSet, SArithSet, Subgroup};

use crate::ast::{Decl, Document, Ints, Name, Query};
use crate::diag::{Diagnostic, Span};

#[derive(Clone, Debug)]
enum Entity {
    SBase,
    Seq(LinearRecurrence),
    Point(GroupElement),
    Groupless(GrouplessSArithSet),
    Set(SArithSet),
    Subgroup(Subgroup),
    /// Declared, but its definition was rejected; uses are not reported again.
    Invalid,
}

impl Entity {
    fn kind(&self) -> &'static str {
        match self {
            Entity::SBase => "an sbase",
            Entity::Seq(_) => "a sequence",
            Entity::Point(_) => "a point",
            Entity::Groupless(_) => "a groupless set",
            Entity::Set(_) => "a set",
            Entity::Subgroup(_) => "a subgroup",
            Entity::Invalid => "invalid",
        }
    }
}

/// A query ready to run.
#[derive(Clone, Debug)]
pub enum Task {
    Intersect { set: String, subgroup: String, problem: IntersectionProblem },
    Period { sequence: String, recurrence: LinearRecurrence, modulus: BigInt },
    SolveExpo { sequences: Vec<String>, system: ExpoSystem },
    Check { set: String, fset: SArithSet, point: GroupElement },
}

#[derive(Clone, Debug)]
pub struct Program {
    pub ambient: Option<AmbientGroup>,
    pub tasks: Vec<Task>,
}

/// `Err(None)`: the failure was already reported.
type Found<T> = Result<T, Option<Diagnostic>>;

struct Elaborator<'a> {
    source: &'a str,
    ambient: Option<AmbientGroup>,
    group_seen: bool,
    entities: HashMap<String, Entity>,
    s_base: Option<PowersClosedSet>,
    errors: Vec<Diagnostic>,
}

pub fn elaborate(source: &str, doc: &Document) -> Result<Program, Vec<Diagnostic>> {
    let mut e = Elaborator {
        source,
        ambient: None,
        group_seen: false,
        entities: HashMap::new(),
        s_base: None,
        errors: Vec::new(),
    };
    for d in &doc.decls {
        e.declare(d);
    }
    let mut tasks = Vec::new();
    for q in &doc.queries {
        match e.query(q) {
            Ok(t) => tasks.push(t),
            Err(Some(d)) => e.errors.push(d),
            Err(None) => {}
        }
    }
    if e.errors.is_empty() {
        Ok(Program { ambient: e.ambient, tasks })
    } else {
        Err(e.errors)
    }
}

impl Elaborator<'_> {
    fn error(&self, span: Span, message: impl Into<String>) -> Option<Diagnostic> {
        Some(Diagnostic::error(self.source, span, message))
    }

    fn declare(&mut self, d: &Decl) {
        if let Some(name) = d.name() {
            if self.entities.contains_key(&name.text) {
                let diag = Diagnostic::error(self.source, name.span, format!("`{}` is already defined", name.text));
                self.errors.push(diag);
                return;
            }
        }
        let result = self.define(d);
        let entity = match result {
            Ok(e) => e,
            Err(diag) => {
                self.errors.extend(diag);
                Some(Entity::Invalid)
            }
        };
        if let (Some(name), Some(entity)) = (d.name(), entity) {
            self.entities.insert(name.text.clone(), entity);
        }
    }

    fn define(&mut self, d: &Decl) -> Found<Option<Entity>> {
        match d {
            Decl::Group { rank, torsion, span, .. } => {
                if self.group_seen {
                    return Err(self.error(*span, "only one group may be declared"));
                }
                self.group_seen = true;
                let r = usize::try_from(&rank.value).map_err(|_| self.error(rank.span, "rank must be a small non-negative integer"))?;
                let torsion = torsion.as_ref().map(Ints::values).unwrap_or_default();
                let amb = AmbientGroup::new(r, torsion).map_err(|e| {
                    let at = d_torsion_span(d).unwrap_or(rank.span);
                    self.error(at, e.to_string())
                })?;
                self.ambient = Some(amb);
                Ok(None)
            }
            Decl::SBase { generators, .. } => {
                let s = PowersClosedSet::new(generators.values()).map_err(|e| self.error(generators.span, e.to_string()))?;
                self.s_base = Some(match self.s_base.take() {
                    Some(prev) => prev.union(&s),
                    None => s,
                });
                Ok(Some(Entity::SBase))
            }
            Decl::Seq { rec, init, .. } => {
                let seq = LinearRecurrence::new(rec.values(), init.values()).map_err(|e| {
                    let at = if matches!(e, LrsError::InitialTermCount { .. }) { init.span } else { rec.span };
                    self.error(at, e.to_string())
                })?;
                Ok(Some(Entity::Seq(seq)))
            }
            Decl::Point { coords, .. } => Ok(Some(Entity::Point(self.element(coords)?))),
            Decl::Groupless { terms, offset, name } => {
                let amb = self.ambient(name.span)?;
                let mut parts = Vec::new();
                let mut roots: Vec<BigInt> = Vec::new();
                for t in terms {
                    let seq = match self.lookup(&t.sequence)? {
                        Entity::Seq(s) => s.clone(),
                        other => return Err(self.wrong_kind(&t.sequence, "a sequence", other)),
                    };
                    let point = match self.lookup(&t.point)? {
                        Entity::Point(p) => p.clone(),
                        other => return Err(self.wrong_kind(&t.point, "a point", other)),
                    };
                    let cf = seq.closed_form().map_err(|_| {
                        self.error(t.sequence.span, format!("sequence `{}` does not split over the integers, so it cannot appear in a set", t.sequence.text))
                    })?;
                    for r in cf.roots() {
                        if let Some(s) = &self.s_base {
                            if !s.contains(r) {
                                return Err(self.error(
                                    t.sequence.span,
                                    format!("root {r} of `{}` is not in S (generated by {})", t.sequence.text, show(s.generators())),
                                ));
                            }
                        }
                        if !roots.contains(r) {
                            roots.push(r.clone());
                        }
                    }
                    parts.push((point, seq));
                }
                let offset = match offset {
                    None => amb.zero(),
                    Some(o) => match self.lookup(o)? {
                        Entity::Point(p) => p.clone(),
                        other => return Err(self.wrong_kind(o, "a point", other)),
                    },
                };
                let s = match &self.s_base {
                    Some(s) => s.clone(),
                    None => PowersClosedSet::new(roots).expect("roots are nonzero"),
                };
                let u = GrouplessSArithSet::new(amb, offset, parts, s).map_err(|e| self.error(name.span, e.to_string()))?;
                Ok(Some(Entity::Groupless(u)))
            }
            Decl::Set { name, base, span } => {
                let amb = self.ambient(name.span)?;
                let u = match self.lookup(base)? {
                    Entity::Groupless(u) => u.clone(),
                    other => return Err(self.wrong_kind(base, "a groupless set", other)),
                };
                let gens = span.as_deref().unwrap_or_default();
                let b = self.subgroup(amb, gens, name.span)?;
                let f = SArithSet::new(u, b).map_err(|e| self.error(name.span, e.to_string()))?;
                Ok(Some(Entity::Set(f)))
            }
            Decl::Subgroup { name, generators } => {
                let amb = self.ambient(name.span)?;
                Ok(Some(Entity::Subgroup(self.subgroup(amb, generators, name.span)?)))
            }
        }
    }

    fn ambient(&self, at: Span) -> Found<AmbientGroup> {
        match &self.ambient {
            Some(a) => Ok(a.clone()),
            None if self.group_seen => Err(None),
            None => Err(self.error(at, "no group has been declared yet")),
        }
    }

    fn subgroup(&self, amb: AmbientGroup, gens: &[Ints], at: Span) -> Found<Subgroup> {
        let elements = gens.iter().map(|g| self.element(g)).collect::<Result<Vec<_>, _>>()?;
        Subgroup::new(amb, elements).map_err(|e| self.error(at, e.to_string()))
    }

    /// Free coordinates first, then one coordinate per torsion factor.
    fn element(&self, coords: &Ints) -> Found<GroupElement> {
        let amb = self.ambient(coords.span)?;
        let free = amb.free_rank();
        let want = free + amb.torsion_factors().len();
        let v = coords.values();
        if v.len() != want {
            return Err(self.error(coords.span, format!("expected {want} coordinates for {amb}, found {}", v.len())));
        }
        amb.element(v[..free].to_vec(), v[free..].to_vec()).map_err(|e| self.error(coords.span, e.to_string()))
    }

    fn lookup(&self, name: &Name) -> Found<&Entity> {
        match self.entities.get(&name.text) {
            Some(Entity::Invalid) => Err(None),
            Some(e) => Ok(e),
            None => Err(self.error(name.span, format!("unknown name `{}`", name.text))),
        }
    }

    fn wrong_kind(&self, name: &Name, wanted: &str, found: &Entity) -> Option<Diagnostic> {
        self.error(name.span, format!("expected {wanted}, but `{}` is {}", name.text, found.kind()))
    }

    fn set(&self, name: &Name) -> Found<SArithSet> {
        match self.lookup(name)? {
            Entity::Set(f) => Ok(f.clone()),
            Entity::Groupless(u) => Ok(SArithSet::from_groupless(u.clone())),
            other => Err(self.wrong_kind(name, "a set", other)),
        }
    }

    fn sequence(&self, name: &Name) -> Found<LinearRecurrence> {
        match self.lookup(name)? {
            Entity::Seq(s) => Ok(s.clone()),
            other => Err(self.wrong_kind(name, "a sequence", other)),
        }
    }

    fn query(&self, q: &Query) -> Found<Task> {
        match q {
            Query::Intersect { set, subgroup } => {
                let f = self.set(set);
                let gamma = match self.lookup(subgroup) {
                    Ok(Entity::Subgroup(g)) => Ok(g.clone()),
                    Ok(other) => Err(self.wrong_kind(subgroup, "a subgroup", other)),
                    Err(e) => Err(e),
                };
                // An already rejected set still lets the subgroup be checked.
                let (f, gamma) = match (f, gamma) {
                    (Ok(f), Ok(g)) => (f, g),
                    (Err(Some(d)), _) => return Err(Some(d)),
                    (_, Err(e)) => return Err(e),
                    (Err(None), Ok(_)) => return Err(None),
                };
                let problem = IntersectionProblem::new(f, gamma).map_err(|e| self.error(set.span, e.to_string()))?;
                Ok(Task::Intersect { set: set.text.clone(), subgroup: subgroup.text.clone(), problem })
            }
            Query::Period { sequence, modulus } => {
                let recurrence = self.sequence(sequence)?;
                if modulus.value.is_zero() {
                    return Err(self.error(modulus.span, "modulus must be nonzero"));
                }
                Ok(Task::Period { sequence: sequence.text.clone(), recurrence, modulus: modulus.value.clone() })
            }
            Query::SolveExpo { sequences, rows, span } => {
                let seqs = sequences.iter().map(|n| self.sequence(n)).collect::<Result<Vec<_>, _>>()?;
                for r in rows {
                    if r.items.len() != seqs.len() {
                        return Err(self.error(r.span, format!("expected {} coefficients, one per sequence, found {}", seqs.len(), r.items.len())));
                    }
                }
                let m = IntMatrix::from_rows(rows.iter().map(Ints::values).collect(), seqs.len());
                let system = ExpoSystem::new(seqs, m).map_err(|e| self.error(*span, e.to_string()))?;
                Ok(Task::SolveExpo { sequences: sequences.iter().map(|n| n.text.clone()).collect(), system })
            }
            Query::Check { set, point } => {
                let fset = self.set(set)?;
                let point = self.element(point)?;
                Ok(Task::Check { set: set.text.clone(), fset, point })
            }
        }
    }
}

fn d_torsion_span(d: &Decl) -> Option<Span> {
    match d {
        Decl::Group { torsion: Some(t), .. } => Some(t.span),
        _ => None,
    }
}

fn show(v: &[BigInt]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}
