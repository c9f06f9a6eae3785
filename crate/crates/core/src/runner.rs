//! Dispatches scenarios to the checks and formats the resulting rows.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::{evaluate, Expr};
use crate::hardy::{
    check_hardy_with, example42_admissible, rhs_weight_functional, HardySetup, Variant, EXAMPLE42_Q,
};
use crate::inequalities::{
    check_embedding, check_mixed_norm, check_monotone_integral, check_reverse_holder,
    check_reverse_minkowski, GridFunction2,
};
use crate::pathology::{dual_triviality_sequence, escape_count, nonconvexity_probe};
use crate::report::{digest, verdict_slack, InequalityReport, Sense, Verdict};
use crate::scenario::{Kind, Scenario};
use crate::sequences::{check_sequence_inequality, example41_sequence, ExponentSeq, SEQ_REL_TOL};
use crate::space::field::{ExponentField, GridFunction, Regime, WeightField};
use crate::space::grid::{build_grid, Grid, Interval, Scheme};
use crate::space::norm::{conjugate_norm, modular, modular_error, quasi_norm, DEFAULT_TOL};

pub const CSV_HEADER: [&str; 14] = [
    "scenario_id",
    "kind",
    "quantity",
    "value",
    "lhs",
    "rhs",
    "constant",
    "ratio",
    "verdict",
    "slack",
    "grid_points",
    "truncation",
    "wall_time",
    "tol",
];

/// Verdict column of a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowVerdict {
    Check(Verdict),
    /// A reported number with nothing to certify.
    Value,
    Error,
}

impl RowVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            RowVerdict::Check(v) => v.as_str(),
            RowVerdict::Value => "value",
            RowVerdict::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scenario_id: String,
    pub kind: String,
    pub quantity: String,
    pub value: Option<f64>,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub constant: Option<f64>,
    pub ratio: Option<f64>,
    pub verdict: RowVerdict,
    pub slack: Option<f64>,
    pub grid_points: String,
    pub truncation: String,
    pub wall_time: Option<f64>,
    pub tol: Option<f64>,
    /// Error text or a remark on the verdict; not part of the CSV.
    pub message: Option<String>,
    pub digest: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Root tolerance for scenarios without their own `tol`.
    pub tol: f64,
    /// Fill the `wall_time` column; makes the output run dependent.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            tol: DEFAULT_TOL,
            timing: false,
        }
    }
}

/// Grid facts echoed on every row of a scenario.
#[derive(Debug, Clone, Default)]
struct Provenance {
    points: String,
    truncation: String,
    tol: Option<f64>,
}

impl Provenance {
    fn of(grid: &Grid, tol: f64) -> Self {
        let (lo, hi) = grid.truncation();
        Provenance {
            points: grid.len().to_string(),
            truncation: format!("{lo:e};{hi:e}"),
            tol: Some(tol),
        }
    }
}

/// Rows of one scenario before the shared columns are filled in.
#[derive(Default)]
struct Rows {
    prov: Provenance,
    rows: Vec<ReportRow>,
}

impl Rows {
    fn row(&mut self, quantity: &str) -> &mut ReportRow {
        self.rows.push(ReportRow {
            scenario_id: String::new(),
            kind: String::new(),
            quantity: quantity.to_string(),
            value: None,
            lhs: None,
            rhs: None,
            constant: None,
            ratio: None,
            verdict: RowVerdict::Value,
            slack: None,
            grid_points: String::new(),
            truncation: String::new(),
            wall_time: None,
            tol: None,
            message: None,
            digest: None,
        });
        self.rows.last_mut().unwrap()
    }

    fn value(&mut self, quantity: &str, v: f64) {
        self.row(quantity).value = Some(v);
    }

    fn report(&mut self, r: &InequalityReport) {
        let row = self.row(&r.name);
        row.lhs = Some(r.lhs);
        row.rhs = Some(r.rhs);
        row.constant = Some(r.constant);
        row.ratio = Some(r.ratio);
        row.verdict = RowVerdict::Check(r.verdict);
        row.slack = Some(r.slack);
        row.message = r.note.clone();
        row.digest = Some(r.digest.clone());
        for (name, v) in &r.extras {
            self.value(&format!("{}.{name}", r.name), *v);
        }
    }
}

fn grid_for(s: &Scenario, key: &str, points_key: &str) -> Result<Grid> {
    let interval = s.interval(key)?;
    build_grid(interval, scheme_for(s, &interval)?, s.points(points_key)?, s.truncation()?)
}

/// Uniform on bounded domains and geometric on half-lines unless `grid` says otherwise.
fn scheme_for(s: &Scenario, interval: &Interval) -> Result<Scheme> {
    if s.has("grid") || !interval.is_unbounded() {
        s.scheme()
    } else {
        Ok(Scheme::Geometric)
    }
}

fn exponent(s: &Scenario, key: &str, grid: &Grid, regime: Regime) -> Result<ExponentField> {
    ExponentField::from_expr(&s.expr(key)?, grid, regime)
}

fn weight(s: &Scenario, key: &str, grid: &Grid) -> Result<WeightField> {
    WeightField::from_expr(&s.expr_or(key, "1")?, grid)
}

fn function(s: &Scenario, key: &str, grid: &Grid) -> Result<GridFunction> {
    GridFunction::from_expr(grid, &s.expr(key)?)
}

fn eval_at(e: &Expr, x: f64, t: Option<f64>) -> Result<f64> {
    evaluate(e, x, t).map_err(|source| Error::Eval { x, source })
}

fn run_kind(s: &Scenario, opts: &RunOptions, out: &mut Rows) -> Result<()> {
    let tol = s.tol(opts.tol)?;
    match s.kind {
        Kind::Modular | Kind::QuasiNorm | Kind::ConjugateNorm => {
            let grid = grid_for(s, "domain", "points")?;
            out.prov = Provenance::of(&grid, tol);
            let w = weight(s, "omega", &grid)?;
            match s.kind {
                Kind::Modular => {
                    let p = exponent(s, "p", &grid, Regime::GeneralPositive)?;
                    let f = function(s, "f", &grid)?;
                    out.value("modular", modular(&f, &p, &w)?);
                    out.value("modular_error", modular_error(&f, &p, &w));
                }
                Kind::QuasiNorm => {
                    let p = exponent(s, "p", &grid, Regime::GeneralPositive)?;
                    let f = function(s, "f", &grid)?;
                    let norm = quasi_norm(&f, &p, &w, tol)?;
                    out.value("quasi_norm", norm);
                    out.value("modular", modular(&f, &p, &w)?);
                    if norm > 0.0 {
                        out.value("modular_at_norm", modular(&f.scale(1.0 / norm)?, &p, &w)?);
                    }
                }
                _ => {
                    let p = exponent(s, "p", &grid, Regime::SubOne)?;
                    let g = function(s, "g", &grid)?;
                    out.value("conjugate_norm", conjugate_norm(&g, &p, &w, tol)?);
                }
            }
        }
        Kind::ReverseMinkowski | Kind::ReverseHolder => {
            let grid = grid_for(s, "domain", "points")?;
            out.prov = Provenance::of(&grid, tol);
            let p = exponent(s, "p", &grid, Regime::SubOne)?;
            let w = weight(s, "omega", &grid)?;
            let f = function(s, "f", &grid)?;
            let g = function(s, "g", &grid)?;
            let r = if s.kind == Kind::ReverseMinkowski {
                check_reverse_minkowski(&f, &g, &p, &w, tol)?
            } else {
                check_reverse_holder(&f, &g, &p, &w, tol)?
            };
            out.report(&r);
        }
        Kind::Embedding => {
            let grid = grid_for(s, "domain", "points")?;
            out.prov = Provenance::of(&grid, tol);
            let p = exponent(s, "p", &grid, Regime::SubOne)?;
            let q = exponent(s, "q", &grid, Regime::SubOne)?;
            let f = function(s, "f", &grid)?;
            let r = check_embedding(&f, &p, &q, &weight(s, "omega1", &grid)?, &weight(s, "omega2", &grid)?, tol)?;
            out.report(&r);
        }
        Kind::MixedNorm => {
            let gx = grid_for(s, "domain", "points")?;
            let gy = if s.has("points2") {
                grid_for(s, "domain2", "points2")?
            } else {
                grid_for(s, "domain2", "points")?
            };
            let (lo, hi) = gx.truncation();
            let (lo2, hi2) = gy.truncation();
            out.prov = Provenance {
                points: format!("{}x{}", gx.len(), gy.len()),
                truncation: format!("{lo:e};{hi:e}x{lo2:e};{hi2:e}"),
                tol: Some(tol),
            };
            let p = exponent(s, "p", &gx, Regime::GeneralPositive)?;
            let q = exponent(s, "q", &gy, Regime::GeneralPositive)?;
            let e = s.expr("f")?;
            let mut values = Vec::with_capacity(gx.len() * gy.len());
            for &x in gx.nodes() {
                for &y in gy.nodes() {
                    values.push(eval_at(&e, x, Some(y))?);
                }
            }
            let f = GridFunction2::from_values(&gx, &gy, values)?;
            out.report(&check_mixed_norm(&f, &p, &q, tol)?);
        }
        Kind::MonotoneIntegral => {
            let grid = grid_for(s, "domain", "points")?;
            out.prov = Provenance::of(&grid, tol);
            let f = function(s, "f", &grid)?;
            out.report(&check_monotone_integral(&f, s.number("s")?, s.direction()?, tol)?);
        }
        Kind::Nonconvexity => {
            let interval = s.interval("domain")?;
            let (m, eps) = (s.count("m")?, s.number("epsilon")?);
            let (p, w) = (s.expr("p")?, s.expr_or("omega", "1")?);
            let r = nonconvexity_probe(&p, &w, interval, m, eps)?;
            out.prov = Provenance {
                points: (m * crate::pathology::NODES_PER_CELL).to_string(),
                truncation: "-".into(),
                tol: Some(tol),
            };
            let slack = verdict_slack(r.average_modular, r.lower_bound, 0.0, tol);
            let report = InequalityReport::new(
                "average_modular",
                Sense::AtLeast,
                r.average_modular,
                r.lower_bound,
                (m as f64).powf(1.0 - r.p_hi),
                slack,
                digest(&[&r.piece_modulars]),
            );
            out.report(&report);
            out.value("piece_error", r.piece_error());
            out.value("p_hi", r.p_hi);
            if s.has("radius") {
                let hit = escape_count(&p, &w, interval, eps, s.number("radius")?, m)?;
                out.value("escape_m", hit.map_or(f64::NAN, |(m, _)| m as f64));
            }
        }
        Kind::DualTriviality => {
            let grid = grid_for(s, "domain", "points")?;
            out.prov = Provenance::of(&grid, tol);
            let p = exponent(s, "p", &grid, Regime::SubOne)?;
            let w = weight(s, "omega", &grid)?;
            let f = function(s, "f", &grid)?;
            let r = dual_triviality_sequence(&f, &p, &w, s.count("steps")?)?;
            let cap = 2f64.powf(r.p_hi - 1.0);
            let worst = r.worst_contraction() * cap;
            let report = InequalityReport::new(
                "contraction",
                Sense::AtMost,
                worst,
                cap,
                cap,
                verdict_slack(worst, cap, 0.0, tol),
                digest(&[&r.modulars, &r.splits]),
            );
            out.report(&report);
            let last = r.modulars.len() - 1;
            out.value("final_modular", r.modulars[last]);
            out.value("final_bound", r.bounds[last]);
            out.value("final_split", r.splits.last().copied().unwrap_or(f64::NAN));
        }
        Kind::SequenceInequality => {
            let m = s.count("m")?;
            let (xe, pe) = (s.expr("x")?, s.expr("p")?);
            let x: Vec<f64> = (1..=m).map(|n| eval_at(&xe, n as f64, None)).collect::<Result<_>>()?;
            let p: Vec<f64> = (1..=m).map(|n| eval_at(&pe, n as f64, None)).collect::<Result<_>>()?;
            let p_lo = match s.raw("p_lo") {
                Some(_) => s.number("p_lo")?,
                None => p.iter().copied().fold(f64::INFINITY, f64::min),
            };
            let seq = ExponentSeq::new(p, p_lo)?;
            let r = check_sequence_inequality(&x, &seq, s.mode()?)?;
            out.prov = Provenance {
                points: m.to_string(),
                truncation: "-".into(),
                tol: Some(SEQ_REL_TOL),
            };
            let d = digest(&[&x, seq.values()]);
            for (name, lhs, rhs) in [("left", r.lhs, r.mid), ("right", r.mid, r.rhs)] {
                let slack = SEQ_REL_TOL * lhs.abs().max(rhs.abs());
                out.report(&InequalityReport::new(name, Sense::AtMost, lhs, rhs, 1.0, slack, d.clone()));
            }
        }
        Kind::Example41 => {
            let terms = s.count("terms")?;
            let pe = s.expr("p")?;
            // the generator is evaluated lazily; failures surface afterwards
            let failure = std::sync::Mutex::new(None);
            let r = example41_sequence(
                s.number("p_lo")?,
                |n| match eval_at(&pe, n as f64, None) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.lock().unwrap().get_or_insert(e);
                        f64::NAN
                    }
                },
                terms,
            );
            if let Some(e) = failure.into_inner().unwrap() {
                return Err(e);
            }
            let r = r?;
            out.prov = Provenance {
                points: terms.to_string(),
                truncation: "-".into(),
                tol: Some(SEQ_REL_TOL),
            };
            out.value("harmonic", r.harmonic);
            let slack = SEQ_REL_TOL * r.lhs.max(r.rhs);
            let d = digest(&[&[r.harmonic, r.rhs]]);
            out.report(&InequalityReport::new("limit_inequality", Sense::AtMost, r.lhs, r.rhs, 1.0, slack, d));
            out.value("first_exceed", r.first_exceed.map_or(f64::NAN, |k| k as f64));
            out.value("first_double", r.first_double.map_or(f64::NAN, |k| k as f64));
        }
        Kind::HardyT6 | Kind::HardyT7 | Kind::HardyT8 => {
            let variant = s.kind.hardy_variant().unwrap();
            let grid = grid_for(s, "domain", "points")?;
            out.prov = Provenance::of(&grid, tol);
            let setup = HardySetup {
                p: exponent(s, "p", &grid, Regime::SubOne)?,
                q: exponent(s, "q", &grid, Regime::SubOne)?,
                w1: weight(s, "omega1", &grid)?,
                w2: weight(s, "omega2", &grid)?,
                exponent_variant: s.exponent_variant()?,
                tol,
            };
            let f = function(s, "f", &grid)?;
            hardy_rows(variant, &f, &setup, out)?;
        }
        Kind::Example42 => {
            let (alpha, beta, p0) = (s.number("alpha")?, s.number("beta")?, s.number("p")?);
            let admissible = example42_admissible(alpha, beta, p0);
            out.value("admissible", if admissible { 1.0 } else { 0.0 });
            let interval = if s.has("domain") {
                s.interval("domain")?
            } else {
                Interval::half_line(0.0)?
            };
            let grid = build_grid(interval, scheme_for(s, &interval)?, s.points("points")?, s.truncation()?)?;
            out.prov = Provenance::of(&grid, tol);
            if admissible {
                let a = s.number_or("a", 1.0)?;
                let n = grid.len();
                let setup = HardySetup {
                    p: ExponentField::constant(p0, n, Regime::SubOne)?,
                    q: ExponentField::from_expr(&crate::expr::parse_expression(EXAMPLE42_Q)?, &grid, Regime::SubOne)?,
                    w1: WeightField::from_values(grid.nodes().iter().map(|x| x.powf(alpha)).collect())?,
                    w2: WeightField::from_values(grid.nodes().iter().map(|x| x.powf(beta + 1.0)).collect())?,
                    exponent_variant: s.exponent_variant()?,
                    tol,
                };
                let f = GridFunction::from_fn(&grid, |x| if x < a { 1.0 } else { 0.0 })?;
                hardy_rows(Variant::T6, &f, &setup, out)?;
            }
        }
    }
    Ok(())
}

fn hardy_rows(variant: Variant, f: &GridFunction, setup: &HardySetup, out: &mut Rows) -> Result<()> {
    let functional = rhs_weight_functional(
        variant,
        f.grid(),
        &setup.w1,
        &setup.w2,
        &setup.p,
        &setup.q,
        setup.exponent_variant,
        setup.tol,
    )?;
    out.report(&check_hardy_with(variant, f, setup, &functional)?);
    Ok(())
}

/// Rows of one scenario, sorted by quantity; errors become a single row.
pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> Vec<ReportRow> {
    let start = Instant::now();
    let mut out = Rows::default();
    let result = run_kind(s, opts, &mut out);
    let elapsed = start.elapsed().as_secs_f64();
    let mut rows = match result {
        Ok(()) => out.rows,
        Err(e) => {
            let mut err = Rows::default();
            let row = err.row("error");
            row.verdict = RowVerdict::Error;
            row.message = Some(e.to_string());
            err.rows
        }
    };
    rows.sort_by(|a, b| a.quantity.cmp(&b.quantity));
    for row in &mut rows {
        row.scenario_id = s.id.clone();
        row.kind = s.kind.to_string();
        row.grid_points = if out.prov.points.is_empty() { "-".into() } else { out.prov.points.clone() };
        row.truncation = if out.prov.truncation.is_empty() { "-".into() } else { out.prov.truncation.clone() };
        row.tol = out.prov.tol;
        row.wall_time = opts.timing.then_some(elapsed);
    }
    rows
}

/// Runs every scenario on a pool of `parallelism` threads. Rows come back in
/// scenario order whatever the parallelism.
pub fn run_scenarios(scenarios: &[Scenario], parallelism: usize, opts: &RunOptions) -> Result<Vec<ReportRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::Scenario(format!("cannot start worker pool: {e}")))?;
    let per: Vec<Vec<ReportRow>> = pool.install(|| scenarios.par_iter().map(|s| run_scenario(s, opts)).collect());
    Ok(per.into_iter().flatten().collect())
}

/// 0 when every row holds or is a plain value, 2 if any errored, else 1.
pub fn exit_code(rows: &[ReportRow]) -> i32 {
    if rows.iter().any(|r| r.verdict == RowVerdict::Error) {
        2
    } else if rows
        .iter()
        .all(|r| matches!(r.verdict, RowVerdict::Value | RowVerdict::Check(Verdict::Holds)))
    {
        0
    } else {
        1
    }
}

fn num(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| format!("{v:e}"))
}

fn fields(r: &ReportRow) -> [String; 14] {
    [
        r.scenario_id.clone(),
        r.kind.clone(),
        r.quantity.clone(),
        num(r.value),
        num(r.lhs),
        num(r.rhs),
        num(r.constant),
        num(r.ratio),
        r.verdict.as_str().to_string(),
        num(r.slack),
        r.grid_points.clone(),
        r.truncation.clone(),
        r.wall_time.map_or_else(|| "-".into(), |t| format!("{t:.6}")),
        num(r.tol),
    ]
}

pub fn to_csv(rows: &[ReportRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Scenario(format!("csv output: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record(fields(r)).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Scenario(format!("csv output: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Scenario(format!("csv output: {e}")))
}

/// Nested key-value document: one block per scenario, one per row inside.
pub fn to_kv(rows: &[ReportRow]) -> String {
    let mut out = String::new();
    let mut current: Option<&str> = None;
    for r in rows {
        if current != Some(r.scenario_id.as_str()) {
            if current.is_some() {
                out.push_str("}\n");
            }
            let _ = writeln!(out, "scenario {} {{", r.scenario_id);
            let _ = writeln!(out, "  kind = {}", r.kind);
            let _ = writeln!(out, "  grid_points = {}", r.grid_points);
            let _ = writeln!(out, "  truncation = {}", r.truncation);
            let _ = writeln!(out, "  tol = {}", num(r.tol));
            current = Some(&r.scenario_id);
        }
        let _ = writeln!(out, "  row {} {{", r.quantity);
        let f = fields(r);
        for (name, value) in CSV_HEADER.iter().zip(&f).skip(3).take(7) {
            if !value.is_empty() {
                let _ = writeln!(out, "    {name} = {value}");
            }
        }
        let _ = writeln!(out, "    wall_time = {}", f[12]);
        if let Some(d) = &r.digest {
            let _ = writeln!(out, "    digest = {d}");
        }
        if let Some(m) = &r.message {
            let _ = writeln!(out, "    message = {m:?}");
        }
        out.push_str("  }\n");
    }
    if current.is_some() {
        out.push_str("}\n");
    }
    out
}
