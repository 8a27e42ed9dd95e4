//! Canonical text for a document: one statement per line.

use std::fmt::Write;

use crate::ast::{Decl, Document, Ints, Query};

fn join(items: &Ints) -> String {
    items.items.iter().map(|i| i.value.to_string()).collect::<Vec<_>>().join(", ")
}

fn list(items: &Ints) -> String {
    format!("[{}]", join(items))
}

fn tuple(items: &Ints) -> String {
    format!("({})", join(items))
}

fn tuples(items: &[Ints]) -> String {
    items.iter().map(tuple).collect::<Vec<_>>().join(", ")
}

pub fn print(doc: &Document) -> String {
    let mut out = String::new();
    for d in &doc.decls {
        let line = match d {
            Decl::Group { name, rank, torsion, .. } => {
                let mut s = "group".to_string();
                if let Some(n) = name {
                    write!(s, " {}", n.text).unwrap();
                }
                write!(s, " rank {}", rank.value).unwrap();
                if let Some(t) = torsion {
                    write!(s, " torsion {}", list(t)).unwrap();
                }
                s
            }
            Decl::SBase { name, generators } => format!("sbase {} {}", name.text, list(generators)),
            Decl::Seq { name, rec, init } => format!("seq {} rec {} init {}", name.text, list(rec), list(init)),
            Decl::Point { name, coords } => format!("point {} = {}", name.text, tuple(coords)),
            Decl::Groupless { name, terms, offset } => {
                let terms: Vec<String> = terms.iter().map(|t| format!("{}*{}", t.sequence.text, t.point.text)).collect();
                let mut s = format!("groupless {} = {}", name.text, terms.join(" + "));
                if let Some(o) = offset {
                    write!(s, " offset {}", o.text).unwrap();
                }
                s
            }
            Decl::Set { name, base, span } => match span {
                Some(gens) => format!("set {} = {} + span {}", name.text, base.text, tuples(gens)).trim_end().to_string(),
                None => format!("set {} = {}", name.text, base.text),
            },
            Decl::Subgroup { name, generators } => {
                format!("subgroup {} = span {}", name.text, tuples(generators)).trim_end().to_string()
            }
        };
        out.push_str(&line);
        out.push('\n');
    }
    for q in &doc.queries {
        let line = match q {
            Query::Intersect { set, subgroup } => format!("intersect {} {}", set.text, subgroup.text),
            Query::Period { sequence, modulus } => format!("period {} {}", sequence.text, modulus.value),
            Query::SolveExpo { sequences, rows, .. } => {
                let names: Vec<&str> = sequences.iter().map(|n| n.text.as_str()).collect();
                let rows: Vec<String> = rows.iter().map(list).collect();
                format!("solve-expo [{}] [{}]", names.join(", "), rows.join(", "))
            }
            Query::Check { set, point } => format!("check {} {}", set.text, tuple(point)),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}
