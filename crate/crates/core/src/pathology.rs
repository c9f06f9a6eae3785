//! Constructions showing that the spaces are not locally convex and have a
//! trivial dual.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::space::field::{ExponentField, GridFunction, Regime, WeightField};
use crate::space::grid::{build_grid, Grid, Interval, Scheme};
use crate::space::norm::{modular, modular_raw};
use crate::summation::NeumaierSum;

/// Outcome of the averaging construction: `m` functions of modular `epsilon`
/// on disjoint cells whose average has modular at least
/// `m^{1 - p_hi} epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityProbeResult {
    pub m: usize,
    pub epsilon: f64,
    pub piece_modulars: Vec<f64>,
    pub average_modular: f64,
    pub lower_bound: f64,
    pub p_hi: f64,
}

impl ConvexityProbeResult {
    /// Largest deviation of a piece modular from `epsilon`.
    pub fn piece_error(&self) -> f64 {
        self.piece_modulars
            .iter()
            .map(|m| (m - self.epsilon).abs())
            .fold(0.0, f64::max)
    }
}

/// Nodes per cell used by [`nonconvexity_probe`].
pub const NODES_PER_CELL: usize = 4;

/// Splits a bounded `interval` into `m` equal cells `A_k`, sets
/// `f_k = (epsilon / w(A_k))^{1/p} chi_{A_k}` with `w(A_k) = int_{A_k} w^p`
/// and measures the modular of `g_m = (f_1 + ... + f_m) / m`.
pub fn nonconvexity_probe(
    p: &Expr,
    w: &Expr,
    interval: Interval,
    m: usize,
    epsilon: f64,
) -> Result<ConvexityProbeResult> {
    if m == 0 {
        return Err(Error::Precondition("need at least one cell".into()));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Precondition(format!("epsilon must be positive, got {epsilon}")));
    }
    if interval.is_unbounded() {
        return Err(Error::Precondition("equal cells need a bounded interval".into()));
    }
    let k = NODES_PER_CELL;
    let grid = build_grid(interval, Scheme::Uniform, m * k, None)?;
    let pf = ExponentField::from_expr(p, &grid, Regime::SubOne)?;
    let wf = WeightField::from_expr(w, &grid)?;
    let (pv, wv, cw) = (pf.values(), wf.values(), grid.weights());

    let mut piece_modulars = Vec::with_capacity(m);
    let mut average = NeumaierSum::new();
    for cell in 0..m {
        let idx = cell * k..(cell + 1) * k;
        let mass: f64 = crate::summation::compensated_sum(idx.clone().map(|i| cw[i] * wv[i].powf(pv[i])));
        if !(mass > 0.0) {
            return Err(Error::Precondition(format!("weight vanishes on cell {cell}")));
        }
        let f: Vec<f64> = idx.clone().map(|i| (epsilon / mass).powf(1.0 / pv[i])).collect();
        let fw: Vec<f64> = f.iter().zip(idx.clone()).map(|(f, i)| f * wv[i]).collect();
        piece_modulars.push(modular_raw(&cw[idx.clone()], &fw, &pv[idx.clone()]));
        let gw: Vec<f64> = fw.iter().map(|v| v / m as f64).collect();
        average.add(modular_raw(&cw[idx.clone()], &gw, &pv[idx]));
    }
    let p_hi = pf.hi();
    Ok(ConvexityProbeResult {
        m,
        epsilon,
        piece_modulars,
        average_modular: average.value(),
        lower_bound: (m as f64).powf(1.0 - p_hi) * epsilon,
        p_hi,
    })
}

/// Smallest `m <= max_m` whose averaged function has modular at least
/// `radius` (up to a relative `1e-9`), scanning `m = 1, 2, ...`.
pub fn escape_count(
    p: &Expr,
    w: &Expr,
    interval: Interval,
    epsilon: f64,
    radius: f64,
    max_m: usize,
) -> Result<Option<(usize, f64)>> {
    for m in 1..=max_m {
        let r = nonconvexity_probe(p, w, interval, m, epsilon)?;
        if r.average_modular >= radius * (1.0 - 1e-9) {
            return Ok(Some((m, r.average_modular)));
        }
    }
    Ok(None)
}

fn cell_densities(f: &GridFunction, p: &ExponentField, w: &WeightField) -> Vec<f64> {
    f.values()
        .iter()
        .zip(w.values())
        .zip(p.values())
        .map(|((f, w), p)| {
            let v = f.abs() * w;
            if v == 0.0 {
                0.0
            } else {
                v.powf(*p)
            }
        })
        .collect()
}

/// Point `t` where the cumulative modular `int_a^t (|f| w)^p` reaches
/// `target` times the full modular. The integrand is read as constant on
/// each cell, so the cumulative is piecewise linear and inverted exactly.
pub fn find_modular_split(
    f: &GridFunction,
    p: &ExponentField,
    w: &WeightField,
    target: f64,
) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::Precondition(format!("target fraction {target} outside (0, 1)")));
    }
    let grid = f.grid();
    let dens = cell_densities(f, p, w);
    let total = modular(f, p, w)?;
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Precondition(format!("modular must be positive and finite, got {total}")));
    }
    let goal = target * total;
    let edges = grid.edges();
    let mut acc = NeumaierSum::new();
    for (i, (&d, &h)) in dens.iter().zip(grid.weights()).enumerate() {
        let before = acc.value();
        acc.add(d * h);
        if acc.value() >= goal && d > 0.0 {
            let t = edges[i] + (goal - before) / d;
            return Ok(t.clamp(edges[i], edges[i + 1]));
        }
    }
    Err(Error::Postcondition("cumulative modular never reached the target".into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualProbeResult {
    /// `I(f_n)` for `n = 0..=steps`.
    pub modulars: Vec<f64>,
    /// Split points `t_n`, one per step.
    pub splits: Vec<f64>,
    /// `2^{n (p_hi - 1)} I(f_0)`.
    pub bounds: Vec<f64>,
    /// `I(f_{n+1}) / I(f_n)`.
    pub contractions: Vec<f64>,
    pub p_hi: f64,
}

impl DualProbeResult {
    /// Largest contraction factor relative to `2^{p_hi - 1}`.
    pub fn worst_contraction(&self) -> f64 {
        let cap = 2f64.powf(self.p_hi - 1.0);
        self.contractions.iter().map(|c| c / cap).fold(0.0, f64::max)
    }
}

fn restrict<T: Copy>(values: &[T], parent: &[usize]) -> Vec<T> {
    parent.iter().map(|&i| values[i]).collect()
}

/// Repeatedly halves the modular of `f` at the split point of
/// [`find_modular_split`], keeps the half with the smaller modular (the left
/// one on ties) and doubles the function there.
pub fn dual_triviality_sequence(
    f0: &GridFunction,
    p: &ExponentField,
    w: &WeightField,
    steps: usize,
) -> Result<DualProbeResult> {
    let i0 = modular(f0, p, w)?;
    if !(i0 > 0.0 && i0.is_finite()) {
        return Err(Error::Precondition(format!("need 0 < I(f_0) < inf, got {i0}")));
    }
    let p_hi = p.hi();
    let mut grid: Grid = f0.grid().clone();
    let mut fv = f0.values().to_vec();
    let mut pv = p.values().to_vec();
    let mut wv = w.values().to_vec();
    let mut modulars = vec![i0];
    let mut splits = Vec::with_capacity(steps);
    let mut contractions = Vec::with_capacity(steps);
    for _ in 0..steps {
        let f = GridFunction::from_values(&grid, fv.clone())?;
        let pf = ExponentField::from_values(pv.clone(), p.regime())?;
        let wf = WeightField::from_values(wv.clone())?;
        let t = find_modular_split(&f, &pf, &wf, 0.5)?;
        let (next, parent) = grid.split_at(t)?;
        fv = restrict(&fv, &parent);
        pv = restrict(&pv, &parent);
        wv = restrict(&wv, &parent);
        grid = next;

        let cut = grid.edges().partition_point(|&e| e <= t) - 1;
        let n = grid.len();
        let v: Vec<f64> = fv.iter().zip(&wv).map(|(f, w)| f.abs() * w).collect();
        let left = modular_raw(&grid.weights()[..cut], &v[..cut], &pv[..cut]);
        let right = modular_raw(&grid.weights()[cut..], &v[cut..], &pv[cut..]);
        let keep = if left <= right { 0..cut } else { cut..n };
        for (i, f) in fv.iter_mut().enumerate() {
            *f = if keep.contains(&i) { 2.0 * *f } else { 0.0 };
        }
        let v: Vec<f64> = fv.iter().zip(&wv).map(|(f, w)| f.abs() * w).collect();
        let m = modular_raw(grid.weights(), &v, &pv);
        contractions.push(m / modulars.last().unwrap());
        modulars.push(m);
        splits.push(t);
    }
    let bounds = (0..=steps)
        .map(|n| 2f64.powf(n as f64 * (p_hi - 1.0)) * i0)
        .collect();
    Ok(DualProbeResult {
        modulars,
        splits,
        bounds,
        contractions,
        p_hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;
    use crate::space::grid::Interval;

    fn e(s: &str) -> Expr {
        parse_expression(s).unwrap()
    }

    fn unit() -> Interval {
        Interval::bounded(0.0, 1.0).unwrap()
    }

    #[test]
    fn averaging_closed_form() {
        for m in [1usize, 2, 10, 100] {
            let r = nonconvexity_probe(&e("0.5"), &e("1"), unit(), m, 0.01).unwrap();
            let exact = 0.01 * (m as f64).sqrt();
            assert!((r.average_modular - exact).abs() / exact < 1e-12);
            assert!(r.piece_error() < 1e-14);
            assert!((r.lower_bound - exact).abs() / exact < 1e-12);
        }
    }

    #[test]
    fn averaging_variable_exponent_exceeds_bound() {
        let r = nonconvexity_probe(&e("0.25 + 0.5*x"), &e("1 + x"), unit(), 50, 0.02).unwrap();
        assert!(r.average_modular >= r.lower_bound);
        assert!(r.piece_error() < 1e-12);
    }

    #[test]
    fn escape_at_hundred() {
        let (m, _) = escape_count(&e("0.5"), &e("1"), unit(), 0.01, 0.1, 1000).unwrap().unwrap();
        assert_eq!(m, 100);
    }

    #[test]
    fn split_points() {
        let g = build_grid(unit(), Scheme::Uniform, 256, None).unwrap();
        let p = ExponentField::constant(0.5, 256, Regime::SubOne).unwrap();
        let w = WeightField::unit(256);
        let one = GridFunction::constant(&g, 1.0).unwrap();
        assert!((find_modular_split(&one, &p, &w, 0.5).unwrap() - 0.5).abs() < 1e-12);
        let chi = GridFunction::from_expr(&g, &e("if(x < 0.25, 1, 0)")).unwrap();
        assert!((find_modular_split(&chi, &p, &w, 0.5).unwrap() - 0.125).abs() < 1e-12);
        let mut last = 0.0;
        for target in [0.1, 0.5, 0.9, 0.999] {
            let t = find_modular_split(&one, &p, &w, target).unwrap();
            assert!(t > last);
            last = t;
        }
        assert!(last > 0.99);
    }

    #[test]
    fn halving_sequence_closed_form() {
        let g = build_grid(unit(), Scheme::Uniform, 64, None).unwrap();
        let p = ExponentField::constant(0.5, 64, Regime::SubOne).unwrap();
        let w = WeightField::unit(64);
        let r = dual_triviality_sequence(&GridFunction::constant(&g, 1.0).unwrap(), &p, &w, 20).unwrap();
        for (n, m) in r.modulars.iter().enumerate() {
            let exact = 2f64.powf(-(n as f64) / 2.0);
            assert!((m - exact).abs() / exact < 1e-9, "step {n}: {m} vs {exact}");
        }
        assert!((r.modulars[1] - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(r.worst_contraction() <= 1.0 + 1e-6);
    }

    #[test]
    fn zero_start_is_rejected() {
        let g = build_grid(unit(), Scheme::Uniform, 16, None).unwrap();
        let p = ExponentField::constant(0.5, 16, Regime::SubOne).unwrap();
        let w = WeightField::unit(16);
        assert!(dual_triviality_sequence(&GridFunction::zeros(&g), &p, &w, 3).is_err());
    }
}
