//! Instance description language for S-arithmetic sets: parsing with positioned
//! diagnostics, elaboration into library objects, and a JSON report runner.

pub mod ast;
pub mod diag;
pub mod elaborate;
mod lexer;
pub mod parser;
pub mod print;
pub mod report;

pub use diag::{Diagnostic, Severity, Span};
pub use elaborate::{elaborate, Program, Task};
pub use parser::parse;
pub use print::print;
pub use report::{render_human, run, Report, RunOptions, FORMAT_VERSION};

/// Parses, elaborates and runs a document.
pub fn process(source: &str, options: &RunOptions) -> Result<Report, Vec<Diagnostic>> {
    let doc = parse(source)?;
    let program = elaborate(source, &doc)?;
    Ok(run(&program, options))
}
