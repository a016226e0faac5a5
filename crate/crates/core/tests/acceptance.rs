//! Acceptance criteria C1–C11. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails. Runs without the libtest harness so the
//! lines always reach the console.

use adl_core::suite::{run_criterion, CRITERIA, DEFAULT_SEED};
use std::time::Instant;

fn main() {
    let mut failed = Vec::new();
    for (id, title) in CRITERIA {
        let start = Instant::now();
        let report = match run_criterion(id, DEFAULT_SEED) {
            Ok(r) => r,
            Err(e) => {
                println!("C{id:<2} FAIL  {title}: error: {e}");
                failed.push(id);
                continue;
            }
        };
        let verdict = if report.passed { "PASS" } else { "FAIL" };
        println!("C{id:<2} {verdict}  {title}  ({:.1} s)", start.elapsed().as_secs_f64());
        for c in report.checks.iter().filter(|c| !c.passed) {
            println!("      failed check: {} {}", c.label, c.details);
        }
        if !report.passed {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all {} criteria passed", CRITERIA.len());
}
