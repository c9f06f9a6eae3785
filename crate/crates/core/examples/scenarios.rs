//! Runs a small scenario file in memory and prints the CSV report.

use vexle::runner::{exit_code, run_scenarios, to_csv, RunOptions};
use vexle::scenario::parse_scenario_file;

const FILE: &str = r#"
[scenario norm]
kind = quasi_norm
domain = "0,1"
points = 512
p = "0.25 + 0.5*x"
f = "2"

[scenario minkowski]
kind = reverse_minkowski
domain = "0,1"
points = 512
p = "0.5"
f = "1"
g = "1"

[scenario sequence]
kind = sequence_inequality
x = "1/x"
p = "0.5"
m = 8
"#;

fn main() -> vexle::Result<()> {
    let scenarios = parse_scenario_file(FILE)?;
    let rows = run_scenarios(&scenarios, 2, &RunOptions::default())?;
    print!("{}", to_csv(&rows)?);
    println!("exit code: {}", exit_code(&rows));
    Ok(())
}
