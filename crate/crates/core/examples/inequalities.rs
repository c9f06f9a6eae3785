//! Certifies the reverse Minkowski and Hoelder inequalities, the two-weight
//! embedding, the mixed-norm Minkowski inequality and the monotone integral
//! bounds on one smooth family.

use vexle::inequalities::{
    check_embedding, check_mixed_norm, check_monotone_integral, check_reverse_holder, check_reverse_minkowski,
    GridFunction2, Monotonicity,
};
use vexle::report::InequalityReport;
use vexle::space::{build_grid, ExponentField, GridFunction, Interval, Regime, Scheme, WeightField};

const TOL: f64 = 1e-10;

fn show(r: &InequalityReport) {
    println!(
        "{:<32} lhs {:>12.6e}  rhs {:>12.6e}  C {:>8.4}  {}",
        r.name, r.lhs, r.rhs, r.constant, r.verdict
    );
}

fn main() -> vexle::Result<()> {
    let g = build_grid(Interval::bounded(0.0, 1.0)?, Scheme::Uniform, 1024, None)?;
    let n = g.len();
    let p = ExponentField::from_values(g.nodes().iter().map(|x| 0.3 + 0.4 * x).collect(), Regime::SubOne)?;
    let q = ExponentField::from_values(g.nodes().iter().map(|x| 0.75 + 0.2 * x).collect(), Regime::SubOne)?;
    let w = WeightField::from_values(g.nodes().iter().map(|x| (-x).exp()).collect())?;
    let f = GridFunction::from_fn(&g, |x| 1.0 + x * x)?;
    let h = GridFunction::from_fn(&g, |x| if x < 0.5 { 2.0 } else { 0.5 })?;

    show(&check_reverse_minkowski(&f, &h, &p, &w, TOL)?);
    let half = ExponentField::constant(0.5, n, Regime::SubOne)?;
    show(&check_reverse_holder(&f, &h, &half, &w, TOL)?);
    show(&check_embedding(&f, &p, &q, &w, &w, TOL)?);

    let gy = build_grid(Interval::bounded(0.0, 1.0)?, Scheme::Uniform, 64, None)?;
    let gx = build_grid(Interval::bounded(0.0, 1.0)?, Scheme::Uniform, 64, None)?;
    let mixed = GridFunction2::from_fn(&gx, &gy, |x, y| (1.0 + x) * (2.0 - y) + (3.0 * x * y).sin().abs())?;
    let px = ExponentField::from_values(gx.nodes().iter().map(|x| 1.0 + 0.5 * x).collect(), Regime::GeneralPositive)?;
    let qy = ExponentField::from_values(gy.nodes().iter().map(|y| 2.0 + y).collect(), Regime::GeneralPositive)?;
    show(&check_mixed_norm(&mixed, &px, &qy, TOL)?);

    let two_sided = build_grid(Interval::bounded(0.0, 1.0)?, Scheme::GeometricTwoSided, 4096, None)?;
    let down = GridFunction::from_fn(&two_sided, |x| 1.0 - x)?;
    let up = GridFunction::from_fn(&two_sided, |x| x * x)?;
    show(&check_monotone_integral(&down, 0.5, Monotonicity::Decreasing, TOL)?);
    show(&check_monotone_integral(&up, 0.5, Monotonicity::Increasing, TOL)?);
    Ok(())
}
