//! Acceptance suite: one PASS/FAIL line per criterion at the stated budgets.
//!
//! Set `ORTHOHOM_ACCEPTANCE=quick` for a reduced-budget smoke run.

use std::process::ExitCode;

use orthohom::mc::McConfig;
use orthohom::validation::{run_check, Scale, CHECK_COUNT};

fn main() -> ExitCode {
    let quick = std::env::var("ORTHOHOM_ACCEPTANCE").is_ok_and(|v| v == "quick");
    let scale = if quick { Scale::quick() } else { Scale::full() };
    let mc = McConfig::default();
    println!("acceptance suite ({} budget, seed {})", if quick { "quick" } else { "full" }, mc.seed);
    let mut failures = Vec::new();
    for id in 1..=CHECK_COUNT {
        let outcome = run_check(id, &scale, &mc);
        println!("{outcome}");
        if !outcome.passed && outcome.blocking {
            failures.push(id);
        }
    }
    if failures.is_empty() {
        println!("all blocking criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failures:?}");
        ExitCode::FAILURE
    }
}
