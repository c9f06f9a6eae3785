//! Runs every acceptance criterion and prints one PASS/FAIL line each.

use std::process::ExitCode;
use std::time::Instant;

use vexle::selftest::run_selftest;

fn main() -> ExitCode {
    let start = Instant::now();
    let results = run_selftest();
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
