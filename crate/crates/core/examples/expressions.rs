//! Parse, print and evaluate exponent and weight expressions.

use vexle::expr::parse_expression;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for text in ["2+3*4^2", "-2^2", "if(x < 1, 0.25, 0.5)", "x^(-1/2) * exp(-t)", "min(x, 1) / (1 + abs(t))"] {
        let e = parse_expression(text)?;
        let at = |x: f64| e.eval(x, Some(0.5)).map_or_else(|err| err.to_string(), |v| format!("{v:.6}"));
        println!("{text:<28} -> {e:<40} x=0.5: {:<10} x=2: {}", at(0.5), at(2.0));
    }

    match parse_expression("log(x) +") {
        Ok(_) => unreachable!(),
        Err(err) => println!("error: {err}"),
    }
    let log = parse_expression("log(x)")?;
    println!("log(0): {}", log.eval(0.0, None).unwrap_err());
    Ok(())
}
