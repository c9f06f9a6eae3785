use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use vexle::runner::{exit_code, run_scenarios, to_csv, to_kv, RowVerdict, RunOptions};
use vexle::scenario::{parse_scenario_file, Kind};
use vexle::selftest::run_selftest;
use vexle::space::norm::DEFAULT_TOL;

#[derive(Parser)]
#[command(name = "vexle", version, about = "Certify inequalities in variable-exponent Lebesgue spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Kv,
}

#[derive(Subcommand)]
enum Command {
    /// Run every scenario of a file and print one row per reported quantity.
    Run {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads.
        #[arg(long, env = "VEXLE_PARALLEL", default_value_t = 1)]
        parallel: usize,
        /// Root tolerance for scenarios that do not set `tol`.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Fill the wall_time column (output is then no longer reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Run the built-in acceptance suite.
    Selftest,
    /// Describe what a scenario kind checks and which keys it takes.
    Explain { kind: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            file,
            format,
            out,
            parallel,
            tol,
            timing,
        } => run(&file, format, out.as_deref(), parallel, RunOptions { tol, timing }),
        Command::Selftest => {
            let results = run_selftest();
            for r in &results {
                println!("{}", r.line());
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} of {} criteria passed", results.len() - failed, results.len());
            i32::from(failed > 0)
        }
        Command::Explain { kind } => match kind.parse::<Kind>() {
            Ok(k) => {
                print!("{}", explain(k));
                0
            }
            Err(e) => {
                eprintln!("{e}");
                2
            }
        },
    };
    ExitCode::from(code as u8)
}

fn run(file: &std::path::Path, format: Format, out: Option<&std::path::Path>, parallel: usize, opts: RunOptions) -> i32 {
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", file.display());
            return 2;
        }
    };
    let scenarios = match parse_scenario_file(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{}: {e}", file.display());
            return 2;
        }
    };
    let rows = match run_scenarios(&scenarios, parallel, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    for r in rows.iter().filter(|r| r.verdict == RowVerdict::Error) {
        eprintln!("scenario {}: {}", r.scenario_id, r.message.as_deref().unwrap_or("failed"));
    }
    let text = match format {
        Format::Csv => match to_csv(&rows) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("{e}");
                return 2;
            }
        },
        Format::Kv => to_kv(&rows),
    };
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{text}"),
    }
    exit_code(&rows)
}

fn explain(kind: Kind) -> String {
    let (what, notes) = match kind {
        Kind::Modular => (
            "Modular I(f) = int (|f| omega)^p(x) dx by the midpoint rule.",
            "Rows: modular, modular_error (gap between left- and right-node sums).",
        ),
        Kind::QuasiNorm => (
            "Luxemburg quasi-norm inf { l > 0 : I(f / l) <= 1 }, solved in log space.",
            "Rows: quasi_norm, modular, modular_at_norm (should be 1).",
        ),
        Kind::ConjugateNorm => (
            "Sup-form norm of g for the negative conjugate exponent p/(p-1), 0 < p < 1.",
            "g must not vanish on the grid.",
        ),
        Kind::ReverseMinkowski => (
            "|| |f| + |g| ||  >=  ||f|| + ||g||  for 0 < p < 1.",
            "Row reverse_minkowski with lhs, rhs and ratio lhs/rhs.",
        ),
        Kind::ReverseHolder => (
            "int |f g|  >=  (1/p_hi + 1/p'_hi) ||f||_{p,omega} ||g||_{p',1/omega}.",
            "Extras: norm_f and conjugate_norm_g.",
        ),
        Kind::Embedding => (
            "||f||_{p,omega1}  <=  C ||f||_{q,omega2}  for p <= q, with C built from the sets {p < q} and {p = q}.",
            "Extras: A, B, chi_omega2 and the weight-ratio norm.",
        ),
        Kind::MixedNorm => (
            "Minkowski inequality for iterated norms on a rectangle, 1 <= p(x) <= q(y).",
            "f is an expression in x and t (the second coordinate); domain2 and points2 set the second axis.",
        ),
        Kind::MonotoneIntegral => (
            "(int f)^s  <=  s int f^s k  for monotone f and 0 < s < 1, kernel (x - a)^(s-1) or (b - x)^(s-1).",
            "direction = decreasing | increasing; the increasing case needs a bounded domain.",
        ),
        Kind::Nonconvexity => (
            "Averages m functions of modular epsilon on disjoint cells; the average has modular m^(1 - p_hi) epsilon or more.",
            "With radius set, also reports the first m whose average leaves the modular ball of that radius.",
        ),
        Kind::DualTriviality => (
            "Repeatedly splits the modular of f in half and doubles the smaller half; modulars contract by at most 2^(p_hi - 1) per step.",
            "Rows: contraction check, final modular, final bound, final split point.",
        ),
        Kind::SequenceInequality => (
            "(sum x_n^(p_n/e))^e  <=  sum x_n^p_n (n^p_n - (n-1)^p_n)  <=  sum x_n^p_n for nonincreasing x_n^p_n.",
            "x and p are expressions in x = n; mode = finite (e = p_m) or limit (e = p_lo).",
        ),
        Kind::Example41 => (
            "Counterexample without monotonicity: x_n = n^(-p_lo/(2 p_n)) on squares n = k^2, zero elsewhere.",
            "The limit_inequality row is expected to be violated for large terms.",
        ),
        Kind::HardyT6 => (
            "||Hf||_{q,omega2}  <=  p_lo^(1/p_lo) c_pq d_p F ||f||_{p,omega1} for nonincreasing f, Hf = (1/x) int_0^x f.",
            "F = || t^(1/p') ||omega2/x||_{L_q(t,inf)} / omega1 ||_{L_r} with an L_inf part on {p = p_lo}; exponent_variant = proof | statement.",
        ),
        Kind::HardyT7 => (
            "Same bound for nondecreasing f with the kernel (x - t)^(1/p') inside the tail norm.",
            "Verdicts turn indeterminate when the outermost decade carries over 1% of an integral.",
        ),
        Kind::HardyT8 => (
            "Bound for the dual operator (1/x) int_x^inf f on nonincreasing f, kernel (t - x)^(1/p') inside the head norm.",
            "Verdicts turn indeterminate when the outermost decade carries over 1% of an integral.",
        ),
        Kind::Example42 => (
            "Power weights omega1 = x^alpha, omega2 = x^(beta+1), constant p and q = 1/4 on (0,1), 1/2 after.",
            "Reports admissibility of (alpha, beta, p) and, when admissible, the T6 check on the indicator of (0, a).",
        ),
    };
    let required = kind.required().join(", ");
    format!("{kind}\n  {what}\n  {notes}\n  required keys: {required}\n")
}
