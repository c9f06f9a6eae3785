//! Modulars and Luxemburg quasi-norms on quadrature grids, including a
//! singular integrand and the negative conjugate exponent.

use vexle::expr::parse_expression;
use vexle::space::{
    build_grid, conjugate_norm, integrate, modular, quasi_norm, ExponentField, GridFunction, Interval, Regime,
    Scheme, WeightField, DEFAULT_TOL,
};

fn main() -> vexle::Result<()> {
    let unit = Interval::bounded(0.0, 1.0)?;

    let g = build_grid(unit, Scheme::Geometric, 4096, None)?;
    let f = GridFunction::from_fn(&g, |x| x.powf(-0.5))?;
    println!("int_0^1 x^(-1/2) dx = {:.6} (exact 2)", integrate(&f));

    let g = build_grid(unit, Scheme::Uniform, 2048, None)?;
    let p = ExponentField::from_expr(&parse_expression("1/4 + x/2").expect("valid"), &g, Regime::SubOne)?;
    let w = WeightField::unit(g.len());
    let e = GridFunction::constant(&g, std::f64::consts::E)?;
    println!(
        "I(e) = {:.8} (exact {:.8})",
        modular(&e, &p, &w)?,
        2.0 * (0.75f64.exp() - 0.25f64.exp())
    );

    let two = GridFunction::constant(&g, 2.0)?;
    let norm = quasi_norm(&two, &p, &w, DEFAULT_TOL)?;
    println!("||2|| = {norm:.8}, I(2 / ||2||) = {:.10}", modular(&two.scale(1.0 / norm)?, &p, &w)?);
    println!(
        "range of I(2): [{:.6}, {:.6}] contains {:.6}",
        norm.powf(p.hi()).min(norm.powf(p.lo())),
        norm.powf(p.hi()).max(norm.powf(p.lo())),
        modular(&two, &p, &w)?
    );

    let half = ExponentField::constant(0.5, g.len(), Regime::SubOne)?;
    for c in [0.5, 3.0] {
        let gc = GridFunction::constant(&g, c)?;
        println!("conjugate norm of {c} for p = 1/2: {:.8}", conjugate_norm(&gc, &half, &w, DEFAULT_TOL)?);
    }
    Ok(())
}
