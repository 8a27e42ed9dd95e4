//! Positions and messages of parse and elaboration diagnostics.

mod cases;

use proptest::prelude::*;

use sarith_cli::{process, Diagnostic, RunOptions};

fn diagnostics(source: &str) -> Vec<Diagnostic> {
    match process(source, &RunOptions::default()) {
        Ok(_) => Vec::new(),
        Err(d) => d,
    }
}

/// The position lies inside the input and the excerpt is that line.
fn addresses_input(source: &str, d: &Diagnostic) -> bool {
    let lines: Vec<&str> = source.lines().collect();
    let line = if lines.is_empty() { "" } else { lines.get(d.line.wrapping_sub(1)).copied().unwrap_or("\u{0}") };
    d.line >= 1 && d.line <= lines.len().max(1) && d.column >= 1 && d.column <= line.chars().count() + 1 && d.excerpt == line
}

#[test]
fn malformed_inputs_point_at_the_fault() {
    for c in cases::MALFORMED {
        let ds = diagnostics(c.source);
        assert!(!ds.is_empty(), "{}: accepted", c.name);
        let d = &ds[0];
        assert_eq!((d.line, d.column), (c.line, c.column), "{}: {}", c.name, d.message);
        assert!(d.message.contains(c.message), "{}: {}", c.name, d.message);
        assert!(ds.iter().all(|d| addresses_input(c.source, d)), "{}", c.name);
    }
}

#[test]
fn rendering_underlines_the_span() {
    let d = &diagnostics("seq a rec [0] init [1]\nperiod a 3\n")[0];
    assert_eq!(
        d.render("doc.sarith"),
        "error: c_0 = 0 violates the recurrence invariant\n --> doc.sarith:1:11\n  |\n1 | seq a rec [0] init [1]\n  |           ^^^\n"
    );
}

const VALID: &str = "group rank 2\nseq a rec [2] init [2]\npoint X = (1, 0)\npoint Y = (0, 1)\ngroupless U = a*X + a*Y\nset F = U\nsubgroup D = span (1, 1)\nintersect F D\n";

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn damaged_documents_report_real_positions(at in 0usize..VALID.len(), cut in 0usize..4, insert in "[ -~\n]{0,2}") {
        let mut s: String = VALID.to_string();
        let end = (at + cut).min(s.len());
        s.replace_range(at..end, &insert);
        for d in diagnostics(&s) {
            prop_assert!(addresses_input(&s, &d), "{:?} in {:?}", d, s);
        }
    }
}
