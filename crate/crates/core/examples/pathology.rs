//! Two constructions showing how far spaces with exponents below one are
//! from normed spaces: averages that leave every modular ball, and a
//! halving scheme that drives every modular to zero.

use vexle::expr::parse_expression;
use vexle::pathology::{dual_triviality_sequence, escape_count, nonconvexity_probe};
use vexle::space::{build_grid, ExponentField, GridFunction, Interval, Regime, Scheme, WeightField};

fn main() -> vexle::Result<()> {
    let unit = Interval::bounded(0.0, 1.0)?;
    let p = parse_expression("0.5").expect("valid");
    let one = parse_expression("1").expect("valid");
    println!("{:>6}  {:>12}  {:>12}", "m", "I(g_m)", "eps m^(1/2)");
    for m in [1, 10, 100, 10_000] {
        let r = nonconvexity_probe(&p, &one, unit, m, 0.01)?;
        println!("{m:>6}  {:>12.8}  {:>12.8}", r.average_modular, r.lower_bound);
    }
    if let Some((m, modular)) = escape_count(&p, &one, unit, 0.01, 0.1, 1000)? {
        println!("modular ball of radius 0.1 left at m = {m} (I = {modular:.6})");
    }

    let g = build_grid(unit, Scheme::Uniform, 4096, None)?;
    let r = dual_triviality_sequence(
        &GridFunction::constant(&g, 1.0)?,
        &ExponentField::constant(0.5, g.len(), Regime::SubOne)?,
        &WeightField::unit(g.len()),
        12,
    )?;
    for (n, (i, b)) in r.modulars.iter().zip(&r.bounds).enumerate() {
        println!("step {n:>2}: I(f_n) = {i:.3e}  bound {b:.3e}");
    }
    println!("worst contraction relative to 2^(p - 1): {:.9}", r.worst_contraction());
    Ok(())
}
