//! Runs the queries of a program and builds the JSON report.
//!
//! Schema (format_version 1): `{format_version, options: {n_max, y_max}, queries: [...]}`.
//! Every mathematical integer is a decimal string; counts and indices are JSON
//! numbers. Keys are sorted. A query entry has `query`, `status` ("ok" or
//! "error"), and on error `error: {code, message}`.

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use sarith::expo::{solve, solve_bounded, ExpoError, SolutionFamily};
use sarith::index::IndexMap;
use sarith::intlinalg::IntMatrix;
use sarith::lrs::{LinearRecurrence, LrsError};
use sarith::oracle::{brute_intersection, covers, OracleError, SearchBox};
use sarith::pipeline::{intersect_with, Intersection, IntersectionProblem, Options, PipelineError, StageTrace, TraceEvent};
use sarith::sarith::{GroupElement, SArithSet};

use crate::elaborate::{Program, Task};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Index bound for `check`, the oracle cross-check and the bounded fallback.
    pub n_max: u64,
    /// Subgroup coefficient bound for the oracle cross-check.
    pub y_max: u64,
    /// Include every trace event, not only the summary.
    pub trace: bool,
    pub jobs: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { n_max: 12, y_max: 3, trace: false, jobs: None }
    }
}

pub struct Report {
    pub value: Value,
    /// Some query ended in an error.
    pub failed: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.value).expect("values are serializable");
        s.push('\n');
        s
    }
}

fn int(v: &BigInt) -> Value {
    Value::String(v.to_string())
}

fn ints(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

fn element(e: &GroupElement) -> Value {
    ints(&e.coords())
}

fn matrix(m: &IntMatrix) -> Value {
    Value::Array(m.row_vecs().iter().map(|r| ints(r)).collect())
}

fn maps(m: &[IndexMap]) -> Value {
    Value::Array(m.iter().map(|x| Value::String(x.to_string())).collect())
}

fn sequence(s: &LinearRecurrence) -> Value {
    let mut v = json!({ "rec": ints(s.coeffs()), "init": ints(s.initial_terms()) });
    if let Ok(cf) = s.closed_form() {
        let terms: Vec<Value> =
            cf.terms.iter().map(|(r, d)| json!({ "root": int(r), "coeff": Value::String(d.to_string()) })).collect();
        v["closed_form"] = Value::Array(terms);
    }
    v
}

fn family(f: &SolutionFamily) -> Value {
    json!({ "params": f.param_count, "maps": maps(&f.maps) })
}

fn component(set: &SArithSet, provenance: &[IndexMap]) -> Value {
    let g = set.groupless();
    let terms: Vec<Value> = g
        .terms()
        .iter()
        .map(|t| json!({ "point": element(&t.point), "slot": t.slot, "sequence": sequence(&t.sequence) }))
        .collect();
    json!({
        "offset": element(g.offset()),
        "slots": g.slot_count(),
        "terms": terms,
        "subgroup": Value::Array(set.subgroup().generators().iter().map(element).collect()),
        "input_indices": maps(provenance),
    })
}

fn event(e: &TraceEvent) -> Value {
    match e {
        TraceEvent::Torsion { coset, target_coset, slot_maps } => {
            json!({ "stage": "torsion", "coset": coset, "target_coset": target_coset, "slot_maps": maps(slot_maps) })
        }
        TraceEvent::Congruence { condition, slot_maps, y_offset, y_lattice } => json!({
            "stage": "congruence", "condition": condition, "slot_maps": maps(slot_maps),
            "y_offset": ints(y_offset), "y_lattice": matrix(y_lattice),
        }),
        TraceEvent::Linear { e, f, f0, g, z, z0, family: fam, bounded } => json!({
            "stage": "linear", "e": matrix(e), "f": matrix(f), "f0": ints(f0), "g": matrix(g),
            "z": matrix(z), "z0": ints(z0), "family": family(fam), "bounded": bounded,
        }),
        TraceEvent::Integrality { slot_maps, free, y_offset, y_lattice } => json!({
            "stage": "integrality", "slot_maps": maps(slot_maps), "free": free,
            "y_offset": ints(y_offset), "y_lattice": matrix(y_lattice),
        }),
        TraceEvent::Assemble { slot_maps, generators } => {
            json!({ "stage": "assemble", "slot_maps": maps(slot_maps), "generators": generators })
        }
    }
}

fn trace(t: &StageTrace, full: bool) -> Value {
    let mut v = json!({
        "torsion_branches": t.torsion_branches,
        "congruence_branches": t.congruence_branches,
        "linear_branches": t.linear_branches,
        "unsupported_roots": ints(&t.unsupported_roots),
    });
    if full {
        v["paths"] = Value::Array(t.paths.iter().map(|p| Value::Array(p.iter().map(event).collect())).collect());
    }
    v
}

fn error(code: &str, message: impl ToString) -> Value {
    json!({ "code": code, "message": message.to_string() })
}

fn lrs_code(e: &LrsError) -> &'static str {
    match e {
        LrsError::SearchCapExceeded { .. } => "SearchCapExceeded",
        LrsError::NotSplit => "NotSplit",
        LrsError::NotDivisible { .. } => "NotDivisible",
        _ => "InvalidSequence",
    }
}

fn pipeline_code(e: &PipelineError) -> &'static str {
    match e {
        PipelineError::Model(_) => "Model",
        PipelineError::Lrs(l) => lrs_code(l),
        PipelineError::Expo(_) => "Expo",
        PipelineError::UnsupportedRoots { .. } => "UnsupportedRoots",
        PipelineError::NonIntegralAssembly(_) => "NonIntegralAssembly",
        PipelineError::ThreadPool(_) => "ThreadPool",
    }
}

fn oracle_code(e: &OracleError) -> &'static str {
    match e {
        OracleError::BoxTooLarge { .. } => "BoxTooLarge",
        OracleError::EmptyBox => "EmptyBox",
    }
}

fn entry(kind: &str, fields: Value) -> Map<String, Value> {
    let mut m = match fields {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    m.insert("query".into(), Value::String(kind.into()));
    m.insert("status".into(), Value::String("ok".into()));
    m
}

fn fail(m: &mut Map<String, Value>, err: Value) {
    m.insert("status".into(), Value::String("error".into()));
    m.insert("error".into(), err);
}

pub fn run(program: &Program, options: &RunOptions) -> Report {
    let mut queries = Vec::new();
    let mut failed = false;
    for task in &program.tasks {
        let m = match task {
            Task::Intersect { set, subgroup, problem } => run_intersect(set, subgroup, problem, options),
            Task::Period { sequence, recurrence, modulus } => run_period(sequence, recurrence, modulus),
            Task::SolveExpo { sequences, system } => {
                let mut m = entry("solve-expo", json!({ "sequences": sequences }));
                match solve(system) {
                    Ok(fams) => {
                        m.insert("families".into(), Value::Array(fams.iter().map(family).collect()));
                    }
                    Err(ExpoError::UnsupportedRoots { roots }) => {
                        let b = solve_bounded(system, options.n_max.max(1));
                        let tuples: Vec<Value> = b.tuples.iter().map(|t| json!(t)).collect();
                        m.insert("bounded".into(), json!({ "n_max": b.n_max, "tuples": tuples }));
                        let mut err = error("UnsupportedRoots", "roots are not powers of a common base; only a bounded search was done");
                        err["roots"] = ints(&roots);
                        fail(&mut m, err);
                    }
                    Err(e) => fail(&mut m, error("Expo", e)),
                }
                m
            }
            Task::Check { set, fset, point } => {
                let mut m = entry("check", json!({ "set": set, "point": element(point), "n_max": options.n_max }));
                let w = fset.witness_bounded(point, options.n_max);
                m.insert("member".into(), Value::Bool(w.is_some()));
                m.insert("witness".into(), w.map_or(Value::Null, |idx| json!(idx)));
                m
            }
        };
        failed |= m.get("status").and_then(Value::as_str) == Some("error");
        queries.push(Value::Object(m));
    }
    let value = json!({
        "format_version": FORMAT_VERSION,
        "options": { "n_max": options.n_max, "y_max": options.y_max },
        "queries": queries,
    });
    Report { value, failed }
}

fn run_period(name: &str, seq: &LinearRecurrence, modulus: &BigInt) -> Map<String, Value> {
    let mut m = entry("period", json!({ "sequence": name, "modulus": int(modulus) }));
    match seq.eventual_period_mod_capped(modulus, Options::default().period_cap) {
        Ok(p) => {
            m.insert("preperiod".into(), json!(p.preperiod));
            m.insert("period".into(), json!(p.period));
            m.insert("residues".into(), ints(&p.residues));
        }
        Err(e) => fail(&mut m, error(lrs_code(&e), e)),
    }
    m
}

fn components(out: &Intersection) -> Value {
    Value::Array(out.union.iter().zip(&out.provenance).map(|(c, p)| component(c, p)).collect())
}

fn run_intersect(set: &str, subgroup: &str, problem: &IntersectionProblem, options: &RunOptions) -> Map<String, Value> {
    let mut m = entry("intersect", json!({ "set": set, "subgroup": subgroup }));
    let lib = Options { jobs: options.jobs, fallback_n_max: options.n_max.max(1), ..Options::default() };
    let out = match intersect_with(problem, &lib) {
        Ok(out) => out,
        Err(e) => {
            if let Some(partial) = e.partial() {
                m.insert("components".into(), components(partial));
                m.insert("trace".into(), trace(&partial.trace, options.trace));
            }
            let mut err = error(pipeline_code(&e), &e);
            if let PipelineError::UnsupportedRoots { roots, .. } = &e {
                err["roots"] = ints(roots);
            }
            fail(&mut m, err);
            return m;
        }
    };
    m.insert("components".into(), components(&out));
    m.insert("trace".into(), trace(&out.trace, options.trace));
    let bx = SearchBox::new(options.n_max, options.y_max);
    match brute_intersection(problem.fset(), problem.gamma(), bx) {
        Ok(points) => {
            let missed = covers(&points, &out.union, options.n_max).err();
            m.insert("oracle".into(), json!({ "points": points.len(), "covered": missed.is_none() }));
            if let Some(x) = missed {
                fail(&mut m, error("OracleMismatch", format!("brute-force point {x} is not covered")));
            }
        }
        Err(e) => fail(&mut m, error(oracle_code(&e), e)),
    }
    m
}

/// A plain-text rendering of the report.
pub fn render_human(report: &Report) -> String {
    let mut out = String::new();
    let v = &report.value;
    let text = |x: &Value| -> String {
        match x {
            Value::String(s) => s.clone(),
            Value::Array(a) => format!("({})", a.iter().map(|y| y.as_str().map_or(y.to_string(), str::to_string)).collect::<Vec<_>>().join(", ")),
            other => other.to_string(),
        }
    };
    for (i, q) in v["queries"].as_array().into_iter().flatten().enumerate() {
        let kind = q["query"].as_str().unwrap_or("");
        out.push_str(&format!("[{}] {kind}: {}\n", i + 1, q["status"].as_str().unwrap_or("")));
        match kind {
            "intersect" => {
                out.push_str(&format!("    {} ∩ {}\n", text(&q["set"]), text(&q["subgroup"])));
                let comps = q["components"].as_array().cloned().unwrap_or_default();
                out.push_str(&format!("    components: {}\n", comps.len()));
                for (k, c) in comps.iter().enumerate() {
                    out.push_str(&format!("    #{:<3} offset {:<16} slots {}\n", k + 1, text(&c["offset"]), c["slots"]));
                    for t in c["terms"].as_array().into_iter().flatten() {
                        let s = &t["sequence"];
                        out.push_str(&format!(
                            "         + a[k{}]·{:<12} a: rec {} init {}\n",
                            t["slot"],
                            text(&t["point"]),
                            text(&s["rec"]),
                            text(&s["init"])
                        ));
                    }
                    let gens: Vec<String> = c["subgroup"].as_array().into_iter().flatten().map(&text).collect();
                    if !gens.is_empty() {
                        out.push_str(&format!("         + span {}\n", gens.join(", ")));
                    }
                }
                if let Some(o) = q.get("oracle") {
                    out.push_str(&format!("    oracle: {} points, covered: {}\n", o["points"], o["covered"]));
                }
            }
            "period" => out.push_str(&format!(
                "    {} mod {}: preperiod {}, period {}\n",
                text(&q["sequence"]),
                text(&q["modulus"]),
                q["preperiod"],
                q["period"]
            )),
            "solve-expo" => {
                for f in q["families"].as_array().into_iter().flatten() {
                    let maps: Vec<String> = f["maps"].as_array().into_iter().flatten().map(&text).collect();
                    out.push_str(&format!("    n = ({})\n", maps.join(", ")));
                }
            }
            "check" => out.push_str(&format!(
                "    {} in {}: {} (witness {})\n",
                text(&q["point"]),
                text(&q["set"]),
                q["member"],
                q["witness"]
            )),
            _ => {}
        }
        if let Some(e) = q.get("error") {
            out.push_str(&format!("    error {}: {}\n", text(&e["code"]), text(&e["message"])));
        }
    }
    out
}
