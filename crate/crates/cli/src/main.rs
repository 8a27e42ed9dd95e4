use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use sarith_cli::{process, render_human, RunOptions};

/// Intersect S-arithmetic sets with subgroups, described in a small text format.
#[derive(Parser, Debug)]
#[command(name = "sarith", version)]
struct Args {
    /// Instance document.
    input: PathBuf,
    /// Index bound for checks, the oracle cross-check and bounded fallbacks.
    #[arg(long, default_value_t = 12)]
    n_max: u64,
    /// Subgroup coefficient bound for the oracle cross-check.
    #[arg(long, default_value_t = 3)]
    y_max: u64,
    /// Include every stage trace event in the report.
    #[arg(long)]
    trace: bool,
    /// Render a plain-text summary instead of JSON.
    #[arg(long)]
    human: bool,
    /// Worker threads for the intersection stages.
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let file = args.input.display().to_string();
    let source = match std::fs::read_to_string(&args.input) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot read {file}: {e}");
            return ExitCode::from(2);
        }
    };
    let options = RunOptions { n_max: args.n_max, y_max: args.y_max, trace: args.trace, jobs: args.jobs };
    match process(&source, &options) {
        Err(diags) => {
            for d in diags {
                eprint!("{}", d.render(&file));
            }
            ExitCode::from(2)
        }
        Ok(report) => {
            if args.human {
                print!("{}", render_human(&report));
            } else {
                print!("{}", report.to_json());
            }
            ExitCode::from(u8::from(report.failed))
        }
    }
}
