use std::path::PathBuf;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_vexle");

const HOLDING: &str = r#"
[scenario sum]
kind = reverse_minkowski
domain = "0,1"
points = 256
p = "0.25 + 0.5*x"
f = "1 + x"
g = "if(x < 0.5, 2, 1)"

[scenario norm]
kind = quasi_norm
domain = "0,1"
points = 256
p = "0.5"
f = "1"

[scenario seq]
kind = sequence_inequality
x = "1/x"
p = "0.5"
m = 10
"#;

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("vexle-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn vexle(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("VEXLE_PARALLEL").output().unwrap()
}

fn selftest_file() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/selftest.scn").to_string()
}

#[test]
fn all_holding_exits_zero() {
    let file = scratch("holding.scn", HOLDING);
    let out = vexle(&["run", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "scenario_id,kind,quantity,value,lhs,rhs,constant,ratio,verdict,slack,grid_points,truncation,wall_time,tol"
    );
    assert!(text.contains("sum,reverse_minkowski,reverse_minkowski,"));
    assert!(text.lines().all(|l| !l.contains("violated")));
}

#[test]
fn violation_exits_one() {
    let out = vexle(&["run", &selftest_file()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("counterexample,example41,limit_inequality,"));
    assert!(!text.contains(",error,"));
}

#[test]
fn bad_input_exits_two() {
    let unknown = scratch("unknown.scn", "[scenario a]\nkind = modular\ndomain = \"0,1\"\np = \"1\"\nf = \"1\"\ncolour = 3\n");
    let out = vexle(&["run", unknown.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));

    let missing = scratch("missing.scn", "[scenario a]\nkind = modular\ndomain = \"0,1\"\np = \"1\"\n");
    let out = vexle(&["run", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing key f"));

    let out = vexle(&["run", "/nonexistent/vexle.scn"]);
    assert_eq!(out.status.code(), Some(2));

    let out = vexle(&["explain", "no_such_kind"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_scenario_exits_two_with_error_row() {
    let file = scratch(
        "fails.scn",
        &format!("{HOLDING}\n[scenario zero]\nkind = conjugate_norm\ndomain = \"0,1\"\npoints = 64\np = \"0.5\"\ng = \"0\"\n"),
    );
    let out = vexle(&["run", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("zero,conjugate_norm,error,"));
    assert!(text.contains("sum,reverse_minkowski,"));
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let file = selftest_file();
    let one = vexle(&["run", &file, "--parallel", "1"]).stdout;
    let again = vexle(&["run", &file, "--parallel", "1"]).stdout;
    let eight = vexle(&["run", &file, "--parallel", "8"]).stdout;
    let env = Command::new(BIN).args(["run", &file]).env("VEXLE_PARALLEL", "4").output().unwrap().stdout;
    assert!(!one.is_empty());
    assert_eq!(one, again);
    assert_eq!(one, eight);
    assert_eq!(one, env);
}

#[test]
fn key_value_format_and_out_file() {
    let file = scratch("kv.scn", HOLDING);
    let target = file.with_extension("kv");
    let out = vexle(&["run", file.to_str().unwrap(), "--format", "kv", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(text.contains("scenario sum {"));
    assert!(text.contains("verdict = holds"));
}

#[test]
fn tolerance_is_echoed() {
    let file = scratch("tol.scn", HOLDING);
    let out = vexle(&["run", file.to_str().unwrap(), "--tol", "1e-10"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        // sequence checks compare sums with a fixed relative tolerance
        let expected = if line.starts_with("seq,") { ",1e-12" } else { ",1e-10" };
        assert!(line.ends_with(expected), "{line}");
    }
}

#[test]
fn explain_lists_required_keys() {
    for kind in ["modular", "hardy_T6", "example41", "sequence_inequality"] {
        let out = vexle(&["explain", kind]);
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.starts_with(kind));
        assert!(text.contains("required keys:"));
    }
}
