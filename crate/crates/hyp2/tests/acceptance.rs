//! Acceptance suite: one line per criterion, nonzero exit if any criterion fails.

use std::process::ExitCode;

fn main() -> ExitCode {
    let results = hyp2::acceptance::run_all(0);
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {} failed", results.len() - failed, failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
