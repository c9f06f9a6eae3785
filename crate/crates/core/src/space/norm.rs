use crate::error::{Error, Result};
use crate::space::field::{ExponentField, GridFunction, WeightField};
use crate::summation::{compensated_sum, NeumaierSum};

/// Default relative tolerance of the norm root finders.
pub const DEFAULT_TOL: f64 = 1e-8;

const MAX_DOUBLINGS: usize = 200;
const MAX_ITERATIONS: usize = 400;

/// `sum w_i v_i` with compensated summation.
pub fn integrate_values(weights: &[f64], values: &[f64]) -> f64 {
    compensated_sum(weights.iter().zip(values).map(|(w, v)| w * v))
}

pub fn integrate(f: &GridFunction) -> f64 {
    integrate_values(f.grid().weights(), f.values())
}

/// `sum w_i v_i^{e_i}` over the nodes with `v_i != 0`.
///
/// Returns `+inf` when a term overflows.
pub fn modular_raw(weights: &[f64], v: &[f64], e: &[f64]) -> f64 {
    let mut acc = NeumaierSum::new();
    for ((&w, &v), &e) in weights.iter().zip(v).zip(e) {
        if v == 0.0 {
            continue;
        }
        let term = w * v.abs().powf(e);
        if !term.is_finite() {
            return f64::INFINITY;
        }
        acc.add(term);
    }
    let total = acc.value();
    if total.is_finite() {
        total
    } else {
        f64::INFINITY
    }
}

fn check_lengths(f: &GridFunction, p: &ExponentField, w: &WeightField) -> Result<()> {
    if p.len() != f.len() {
        return Err(Error::LengthMismatch {
            expected: f.len(),
            found: p.len(),
        });
    }
    if w.len() != f.len() {
        return Err(Error::LengthMismatch {
            expected: f.len(),
            found: w.len(),
        });
    }
    Ok(())
}

fn weighted_abs(f: &GridFunction, w: &WeightField) -> Vec<f64> {
    f.values()
        .iter()
        .zip(w.values())
        .map(|(v, w)| v.abs() * w)
        .collect()
}

/// `I(f) = int (|f| w)^{p(x)} dx`. Nodes with `f = 0` contribute nothing;
/// `+inf` signals an infinite modular.
pub fn modular(f: &GridFunction, p: &ExponentField, w: &WeightField) -> Result<f64> {
    check_lengths(f, p, w)?;
    Ok(modular_raw(f.grid().weights(), &weighted_abs(f, w), p.values()))
}

/// Luxemburg quasi-norm `inf { l > 0 : I(f / l) <= 1 }`.
pub fn quasi_norm(f: &GridFunction, p: &ExponentField, w: &WeightField, tol: f64) -> Result<f64> {
    check_lengths(f, p, w)?;
    let v = weighted_abs(f, w);
    if !modular_raw(f.grid().weights(), &v, p.values()).is_finite() {
        return Err(Error::NonFinite("modular is infinite".into()));
    }
    luxemburg(f.grid().weights(), &v, p.values(), tol)
}

/// `sup { m > 0 : int (|g| / (w m))^{p'(x)} dx <= 1 }` for the negative
/// conjugate exponent `p' = p / (p - 1)`.
pub fn conjugate_norm(g: &GridFunction, p: &ExponentField, w: &WeightField, tol: f64) -> Result<f64> {
    check_lengths(g, p, w)?;
    if p.hi() >= 1.0 {
        return Err(Error::Precondition("conjugate norm needs p < 1 everywhere".into()));
    }
    if let Some(i) = g.values().iter().position(|&v| v == 0.0) {
        return Err(Error::Precondition(format!(
            "g vanishes at node {i} (x = {})",
            g.grid().nodes()[i]
        )));
    }
    let v: Vec<f64> = g
        .values()
        .iter()
        .zip(w.values())
        .map(|(g, w)| g.abs() / w)
        .collect();
    let conj = p.conjugate()?;
    conjugate_raw(g.grid().weights(), &v, conj.values(), tol)
}

/// Sup-form solver on raw slices: all exponents must be negative and all
/// values positive.
pub fn conjugate_raw(weights: &[f64], v: &[f64], e: &[f64], tol: f64) -> Result<f64> {
    if e.iter().any(|&e| e >= 0.0) {
        return Err(Error::Precondition("conjugate exponent must be negative".into()));
    }
    if v.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::Precondition("conjugate norm needs 0 < |g| / w < inf".into()));
    }
    solve_scale(weights, v, e, tol)
}

/// `1` when the predicate holds at some node, else `0`.
pub fn indicator_sup_norm(nodes: &[f64], pred: impl Fn(usize, f64) -> bool) -> f64 {
    if nodes.iter().enumerate().any(|(i, &x)| pred(i, x)) {
        1.0
    } else {
        0.0
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(Error::Precondition(format!("tolerance {tol} outside (0, 1e-4]")));
    }
    Ok(())
}

/// Luxemburg solver on raw slices of cell weights, values `|f| w` and
/// positive exponents.
pub fn luxemburg(weights: &[f64], v: &[f64], e: &[f64], tol: f64) -> Result<f64> {
    if e.iter().any(|&e| e <= 0.0) {
        return Err(Error::Precondition("Luxemburg exponent must be positive".into()));
    }
    if v.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    if v.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("function value is not finite".into()));
    }
    solve_scale(weights, v, e, tol)
}

/// Log-space form of `s -> ln sum w_i (v_i / e^s)^{e_i}`.
struct LogModular {
    c: Vec<f64>,
    e: Vec<f64>,
}

impl LogModular {
    fn new(weights: &[f64], v: &[f64], e: &[f64]) -> Self {
        let mut c = Vec::with_capacity(v.len());
        let mut ex = Vec::with_capacity(v.len());
        for ((&w, &v), &e) in weights.iter().zip(v).zip(e) {
            if v != 0.0 {
                c.push(w.ln() + e * v.abs().ln());
                ex.push(e);
            }
        }
        LogModular { c, e: ex }
    }

    /// Value and derivative at `s`.
    fn eval(&self, s: f64) -> (f64, f64) {
        let peak = self
            .c
            .iter()
            .zip(&self.e)
            .map(|(c, e)| c - e * s)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut total = NeumaierSum::new();
        let mut slope = NeumaierSum::new();
        for (c, e) in self.c.iter().zip(&self.e) {
            let t = (c - e * s - peak).exp();
            total.add(t);
            slope.add(-e * t);
        }
        let total = total.value();
        (peak + total.ln(), slope.value() / total)
    }
}

/// Finds the scale `l = e^s` at which `sum w (v / l)^e = 1` and returns the
/// side of the final bracket where the modular is at most one.
fn solve_scale(weights: &[f64], v: &[f64], e: &[f64], tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let phi = LogModular::new(weights, v, e);
    if phi.c.is_empty() {
        return Ok(0.0);
    }
    let increasing = phi.e[0] < 0.0;
    let (e_min, e_max) = phi
        .e
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let e_abs_max = e_min.abs().max(e_max.abs());

    // sign-normalized so that g is decreasing with a single root
    let g = |s: f64| {
        let (val, slope) = phi.eval(s);
        if increasing {
            (-val, -slope)
        } else {
            (val, slope)
        }
    };

    let l0 = phi.eval(0.0).0;
    if !l0.is_finite() {
        return Err(Error::NonFinite("modular is not finite at scale 1".into()));
    }
    // the root lies between l0 / e_min and l0 / e_max
    let (mut lo, mut hi) = {
        let a = l0 / e_min;
        let b = l0 / e_max;
        let pad = 1e-9 * (1.0 + a.abs().max(b.abs()));
        (a.min(b) - pad, a.max(b) + pad)
    };
    let mut g_lo = g(lo).0;
    let mut g_hi = g(hi).0;
    let mut step = 1.0f64.max(hi - lo);
    let mut tries = 0;
    while !(g_lo >= 0.0 && g_hi <= 0.0) {
        if tries == MAX_DOUBLINGS {
            return Err(Error::BracketNotFound(format!(
                "no sign change after {MAX_DOUBLINGS} doublings"
            )));
        }
        if g_lo < 0.0 {
            lo -= step;
            g_lo = g(lo).0;
        }
        if g_hi > 0.0 {
            hi += step;
            g_hi = g(hi).0;
        }
        step *= 2.0;
        tries += 1;
    }

    let width_tol = ((1.0 + tol).ln() / e_abs_max.max(1.0)).max(4.0 * f64::EPSILON);
    let mut s = 0.5 * (lo + hi);
    for _ in 0..MAX_ITERATIONS {
        if hi - lo <= width_tol.max(4.0 * f64::EPSILON * lo.abs().max(hi.abs())) {
            break;
        }
        let (val, slope) = g(s);
        if val == 0.0 {
            lo = s;
            hi = s;
            break;
        }
        if val > 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let newton = s - val / slope;
        let mut next = if slope < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        // once Newton has converged, step just past the root so the bracket
        // closes from both sides
        if (next - s).abs() < 0.5 * width_tol {
            next = if val > 0.0 {
                next + 0.5 * width_tol
            } else {
                next - 0.5 * width_tol
            };
        }
        if next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        s = next;
    }

    // Luxemburg wants the infimum (modular <= 1 at the upper scale), the
    // conjugate form the supremum (modular <= 1 at the lower scale)
    let root = if increasing { lo } else { hi };
    let scale = root.exp();
    if e_abs_max <= 1e4 {
        let check = phi.eval(root).0.exp();
        if (check - 1.0).abs() > 10.0 * tol {
            return Err(Error::Postcondition(format!(
                "modular at the computed scale {scale} is {check}, not 1"
            )));
        }
    }
    Ok(scale)
}

/// Relative disagreement of two coarse quadratures of `values`: pairs of
/// neighbouring cells are merged and sampled at the left or at the right
/// node. Serves as a cheap quadrature error estimate.
pub fn quadrature_error(weights: &[f64], values: &[f64]) -> f64 {
    let mut a = NeumaierSum::new();
    let mut b = NeumaierSum::new();
    for k in 0..weights.len() / 2 {
        let (i, j) = (2 * k, 2 * k + 1);
        let w = weights[i] + weights[j];
        a.add(w * values[i]);
        b.add(w * values[j]);
    }
    let (a, b) = (a.value(), b.value());
    let scale = a.abs().max(b.abs());
    if scale == 0.0 || !scale.is_finite() {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Quadrature error estimate of the modular integrand of `f`.
pub fn modular_error(f: &GridFunction, p: &ExponentField, w: &WeightField) -> f64 {
    let integrand: Vec<f64> = weighted_abs(f, w)
        .iter()
        .zip(p.values())
        .map(|(&v, &e)| if v == 0.0 { 0.0 } else { v.powf(e) })
        .collect();
    quadrature_error(f.grid().weights(), &integrand)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;
    use crate::space::field::Regime;
    use crate::space::grid::{build_grid, Grid, Interval, Scheme};

    fn unit(n: usize) -> Grid {
        build_grid(Interval::bounded(0.0, 1.0).unwrap(), Scheme::Uniform, n, None).unwrap()
    }

    fn field(g: &Grid, s: &str) -> ExponentField {
        ExponentField::from_expr(&parse_expression(s).unwrap(), g, Regime::SubOne).unwrap()
    }

    fn func(g: &Grid, s: &str) -> GridFunction {
        GridFunction::from_expr(g, &parse_expression(s).unwrap()).unwrap()
    }

    // plain bisection on the modular, no log transform, as an oracle
    fn brute_norm(f: &GridFunction, p: &ExponentField) -> f64 {
        let w = WeightField::unit(f.len());
        let (mut lo, mut hi) = (1e-6f64, 1e6f64);
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if modular(&f.scale(1.0 / mid).unwrap(), p, &w).unwrap() > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    #[test]
    fn integrals() {
        let g = unit(256);
        assert!((integrate(&func(&g, "1")) - 1.0).abs() < 1e-12);
        assert!((integrate(&func(&g, "x")) - 0.5).abs() < 1e-12);
        let geo = build_grid(Interval::bounded(0.0, 1.0).unwrap(), Scheme::Geometric, 4096, None).unwrap();
        assert!((integrate(&func(&geo, "x^(-0.5)")) - 2.0).abs() < 1e-3);
    }

    #[test]
    fn modular_examples() {
        let g = unit(256);
        let w = WeightField::unit(256);
        assert_eq!(modular(&func(&g, "4"), &field(&g, "0.5"), &w).unwrap(), 2.0);
        assert_eq!(modular(&func(&g, "0"), &field(&g, "0.5"), &w).unwrap(), 0.0);
        let g = unit(4096);
        let w = WeightField::unit(4096);
        let e = std::f64::consts::E;
        let m = modular(&func(&g, &format!("{e}")), &field(&g, "0.25 + 0.5*x"), &w).unwrap();
        let exact = 2.0 * ((0.75f64).exp() - (0.25f64).exp());
        assert!((m - exact).abs() < 1e-6, "{m} vs {exact}");
    }

    #[test]
    fn modular_overflow_is_infinite() {
        let g = unit(16);
        let w = WeightField::unit(16);
        let f = GridFunction::constant(&g, 1e300).unwrap();
        let p = ExponentField::constant(5.0, 16, Regime::GeneralPositive).unwrap();
        assert_eq!(modular(&f, &p, &w).unwrap(), f64::INFINITY);
        assert!(quasi_norm(&f, &p, &w, 1e-8).is_err());
    }

    #[test]
    fn quasi_norm_examples() {
        let g = unit(256);
        let w = WeightField::unit(256);
        let p = field(&g, "0.5");
        assert_eq!(quasi_norm(&func(&g, "0"), &p, &w, 1e-8).unwrap(), 0.0);
        assert!((quasi_norm(&func(&g, "3"), &p, &w, 1e-8).unwrap() - 3.0).abs() < 1e-7);

        let p = field(&g, "0.25 + 0.5*x");
        let f = func(&g, "2");
        let n = quasi_norm(&f, &p, &w, 1e-8).unwrap();
        let m = modular(&f.scale(1.0 / n).unwrap(), &p, &w).unwrap();
        assert!((m - 1.0).abs() < 1e-7);
        let fine = unit(2560);
        let oracle = brute_norm(&func(&fine, "2"), &field(&fine, "0.25 + 0.5*x"));
        assert!((n - oracle).abs() / oracle < 1e-4, "{n} vs {oracle}");
    }

    #[test]
    fn conjugate_norm_examples() {
        let g = unit(256);
        let w = WeightField::unit(256);
        let p = field(&g, "0.5");
        for c in [1.0, 0.3, 7.0] {
            let mu = conjugate_norm(&GridFunction::constant(&g, c).unwrap(), &p, &w, 1e-8).unwrap();
            assert!((mu - c).abs() / c < 1e-7, "{mu} vs {c}");
        }
        assert!(conjugate_norm(&func(&g, "x - x"), &p, &w, 1e-8).is_err());

        // oracle: bisection on the increasing modular over a refined grid
        let fine = unit(2560);
        let pf = field(&fine, "0.25 + 0.5*x");
        let e: Vec<f64> = pf.values().iter().map(|p| p / (p - 1.0)).collect();
        let ones = vec![1.0; fine.len()];
        let (mut lo, mut hi) = (1e-6f64, 1e6f64);
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            let v: Vec<f64> = ones.iter().map(|g| g / mid).collect();
            if modular_raw(fine.weights(), &v, &e) <= 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mu = conjugate_norm(&func(&g, "1"), &field(&g, "0.25 + 0.5*x"), &w, 1e-8).unwrap();
        assert!((mu - lo).abs() / lo < 1e-4);
    }

    #[test]
    fn indicator() {
        let nodes = [0.1, 0.2];
        assert_eq!(indicator_sup_norm(&nodes, |_, _| false), 0.0);
        assert_eq!(indicator_sup_norm(&nodes, |_, x| x > 0.15), 1.0);
    }

    #[test]
    fn extreme_scales() {
        let g = unit(64);
        let w = WeightField::unit(64);
        let p = field(&g, "0.1 + 0.8*x");
        for c in [1e-200, 1e-30, 1e30, 1e200] {
            let f = GridFunction::constant(&g, c).unwrap();
            let n = quasi_norm(&f, &p, &w, 1e-8).unwrap();
            assert!(n > 0.0 && n.is_finite());
        }
    }

    #[test]
    fn tolerance_bounds() {
        let g = unit(16);
        let w = WeightField::unit(16);
        assert!(quasi_norm(&func(&g, "1"), &field(&g, "0.5"), &w, 1e-3).is_err());
    }
}
