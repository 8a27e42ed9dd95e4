//! Printing a document and parsing it again gives the same document.

use proptest::prelude::*;

use sarith_cli::{parse, print};

fn int() -> impl Strategy<Value = String> {
    prop_oneof![(-50i64..50).prop_map(|v| v.to_string()), "-?[1-9][0-9]{20,30}"]
}

fn list(open: &'static str, close: &'static str) -> impl Strategy<Value = String> {
    prop::collection::vec(int(), 0..4).prop_map(move |v| format!("{open}{}{close}", v.join(", ")))
}

fn name() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z0-9_]{0,5}"
}

fn decl() -> impl Strategy<Value = String> {
    prop_oneof![
        (prop::option::of(name()), 0u32..4, prop::option::of(list("[", "]"))).prop_map(|(n, r, t)| {
            let mut s = "group".to_string();
            if let Some(n) = n.filter(|n| n != "rank") {
                s += &format!(" {n}");
            }
            s += &format!(" rank {r}");
            if let Some(t) = t {
                s += &format!(" torsion {t}");
            }
            s
        }),
        (name(), list("[", "]")).prop_map(|(n, l)| format!("sbase {n} {l}")),
        (name(), list("[", "]"), list("[", "]")).prop_map(|(n, a, b)| format!("seq {n} rec {a} init {b}")),
        (name(), list("(", ")")).prop_map(|(n, t)| format!("point {n} = {t}")),
        (name(), prop::collection::vec((name(), name()), 1..3), prop::option::of(name())).prop_map(|(n, ts, o)| {
            let terms: Vec<String> = ts.iter().map(|(a, b)| format!("{a}*{b}")).collect();
            let mut s = format!("groupless {n} = {}", terms.join(" + "));
            if let Some(o) = o {
                s += &format!(" offset {o}");
            }
            s
        }),
        (name(), name(), prop::option::of(prop::collection::vec(list("(", ")"), 0..3))).prop_map(|(n, b, sp)| match sp {
            Some(t) => format!("set {n} = {b} + span {}", t.join(", ")),
            None => format!("set {n} = {b}"),
        }),
        (name(), prop::collection::vec(list("(", ")"), 0..3)).prop_map(|(n, t)| format!("subgroup {n} = span {}", t.join(", "))),
    ]
}

fn query() -> impl Strategy<Value = String> {
    prop_oneof![
        (name(), name()).prop_map(|(a, b)| format!("intersect {a} {b}")),
        (name(), int()).prop_map(|(a, m)| format!("period {a} {m}")),
        (prop::collection::vec(name(), 1..3), prop::collection::vec(list("[", "]"), 1..3))
            .prop_map(|(ns, rs)| format!("solve-expo [{}] [{}]", ns.join(", "), rs.join(", "))),
        (name(), list("(", ")")).prop_map(|(a, t)| format!("check {a} {t}")),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_then_parse_is_identity(decls in prop::collection::vec(decl(), 0..6), queries in prop::collection::vec(query(), 1..4), semis in any::<bool>()) {
        let sep = if semis { "; " } else { "\n" };
        let text = decls.into_iter().chain(queries).collect::<Vec<_>>().join(sep);
        let doc = parse(&text).unwrap();
        let printed = print(&doc);
        prop_assert_eq!(parse(&printed).unwrap(), doc.clone());
        prop_assert_eq!(print(&parse(&printed).unwrap()), printed);
    }
}
