//! Weighted Hardy operator bounds on the half-line: the closed-form weight
//! functional, a check on an indicator and the power-weight region.

use vexle::expr::parse_expression;
use vexle::hardy::{
    check_hardy, example42_admissible, rhs_weight_functional, ExponentVariant, HardySetup, Variant, EXAMPLE42_Q,
};
use vexle::space::{build_grid, ExponentField, GridFunction, Interval, Regime, Scheme, WeightField};

fn main() -> vexle::Result<()> {
    let g = build_grid(Interval::half_line(0.0)?, Scheme::Geometric, 2048, Some((1e-6, 1e6)))?;
    let n = g.len();
    let power = |e: f64| WeightField::from_values(g.nodes().iter().map(|x| x.powf(e)).collect());

    let half = ExponentField::constant(0.5, n, Regime::SubOne)?;
    let w = power(-2.0)?;
    let functional = rhs_weight_functional(Variant::T6, &g, &w, &w, &half, &half, ExponentVariant::Proof, 1e-10)?;
    println!("weight functional for x^-2 weights: {:.6} (exact 4)", functional.value);

    let (alpha, beta, p) = (-4.5, -3.0, 0.2);
    println!("({alpha}, {beta}, {p}) admissible: {}", example42_admissible(alpha, beta, p));
    let setup = HardySetup {
        p: ExponentField::constant(p, n, Regime::SubOne)?,
        q: ExponentField::from_expr(&parse_expression(EXAMPLE42_Q).expect("valid"), &g, Regime::SubOne)?,
        w1: power(alpha)?,
        w2: power(beta + 1.0)?,
        exponent_variant: ExponentVariant::Proof,
        tol: 1e-10,
    };
    for a in [0.5, 1.0, 2.0] {
        let f = GridFunction::from_fn(&g, |x| if x < a { 1.0 } else { 0.0 })?;
        let r = check_hardy(Variant::T6, &f, &setup)?;
        println!(
            "chi(0,{a}): ||Hf|| = {:.4e}  bound = {:.4e}  {}  outer decade {:.2e}",
            r.lhs,
            r.rhs,
            r.verdict,
            r.extra("outer_decade_fraction").unwrap_or(0.0)
        );
    }
    Ok(())
}
