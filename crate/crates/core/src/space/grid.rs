use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::summation::compensated_sum;

/// Default truncation of an infinite right endpoint, measured from `a`.
pub const DEFAULT_FAR: f64 = 1e6;
/// Default distance kept from a finite endpoint at the origin of an infinite interval.
pub const DEFAULT_NEAR: f64 = 1e-6;
/// Default relative distance kept from a finite singular endpoint.
pub const DEFAULT_REL_NEAR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    Finite(f64),
    Infinite,
}

/// An interval `(a, b)` of the real line, `b` possibly `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: Endpoint,
    pub left_open: bool,
    pub right_open: bool,
}

impl Interval {
    pub fn new(a: f64, b: Endpoint) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::InvalidInterval(format!("left endpoint {a} is not finite")));
        }
        if let Endpoint::Finite(b) = b {
            if !(b.is_finite() && a < b) {
                return Err(Error::InvalidInterval(format!("need a < b, got ({a}, {b})")));
            }
        }
        Ok(Interval {
            a,
            b,
            left_open: true,
            right_open: true,
        })
    }

    pub fn bounded(a: f64, b: f64) -> Result<Self> {
        Interval::new(a, Endpoint::Finite(b))
    }

    /// `(a, +inf)`.
    pub fn half_line(a: f64) -> Result<Self> {
        Interval::new(a, Endpoint::Infinite)
    }

    pub fn right(&self) -> Option<f64> {
        match self.b {
            Endpoint::Finite(b) => Some(b),
            Endpoint::Infinite => None,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        self.b == Endpoint::Infinite
    }
}

impl FromStr for Interval {
    type Err = Error;

    /// Parses `"a,b"`, where `b` may be `inf`.
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::InvalidInterval(format!("expected `a,b`, got `{s}`")))?;
        let a: f64 = a
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInterval(format!("bad left endpoint `{a}`")))?;
        let b = b.trim();
        let b = if matches!(b, "inf" | "+inf" | "infinity") {
            Endpoint::Infinite
        } else {
            Endpoint::Finite(
                b.parse()
                    .map_err(|_| Error::InvalidInterval(format!("bad right endpoint `{b}`")))?,
            )
        };
        Interval::new(a, b)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.b {
            Endpoint::Finite(b) => write!(f, "({}, {})", self.a, b),
            Endpoint::Infinite => write!(f, "({}, inf)", self.a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Uniform,
    /// Log-uniform in the distance to the left endpoint.
    Geometric,
    /// Log-uniform toward both endpoints of a bounded interval.
    GeometricTwoSided,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Scheme::Uniform),
            "geometric" => Ok(Scheme::Geometric),
            "geometric-two-sided" => Ok(Scheme::GeometricTwoSided),
            _ => Err(Error::InvalidGrid(format!("unknown scheme `{s}`"))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Uniform => "uniform",
            Scheme::Geometric => "geometric",
            Scheme::GeometricTwoSided => "geometric-two-sided",
        })
    }
}

#[derive(Debug)]
struct GridData {
    interval: Interval,
    scheme: Scheme,
    truncation: (f64, f64),
    edges: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Midpoint-rule quadrature grid. Cell `i` is `[edges[i], edges[i+1]]`, its
/// node lies inside the cell and its weight is the cell width.
///
/// Cloning is cheap; the node data is shared.
#[derive(Debug, Clone)]
pub struct Grid(Arc<GridData>);

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.nodes == other.0.nodes && self.0.weights == other.0.weights)
    }
}

fn default_truncation(interval: &Interval, scheme: Scheme) -> (f64, f64) {
    let a = interval.a;
    match interval.b {
        Endpoint::Finite(b) => {
            let d = DEFAULT_REL_NEAR * (b - a);
            match scheme {
                Scheme::Uniform => (a, b),
                Scheme::Geometric => (a + d, b),
                Scheme::GeometricTwoSided => (a + d, b - d),
            }
        }
        Endpoint::Infinite => match scheme {
            Scheme::Uniform => (a, a + DEFAULT_FAR),
            _ => (a + DEFAULT_NEAR, a + DEFAULT_FAR),
        },
    }
}

fn log_spaced(d_min: f64, d_max: f64, cells: usize) -> Vec<f64> {
    let ratio = (d_max / d_min).ln();
    let mut d: Vec<f64> = (0..=cells)
        .map(|i| d_min * (ratio * i as f64 / cells as f64).exp())
        .collect();
    d[0] = d_min;
    d[cells] = d_max;
    d
}

/// Builds a quadrature grid with `n` cells on `interval`.
///
/// `truncation` is the `(x_min, x_max)` window actually discretized; when
/// `None`, endpoints at infinity are cut at `a + 1e6`, geometric schemes keep
/// `1e-6` (unbounded) or `1e-12 (b - a)` (bounded) away from singular endpoints.
pub fn build_grid(
    interval: Interval,
    scheme: Scheme,
    n: usize,
    truncation: Option<(f64, f64)>,
) -> Result<Grid> {
    if n == 0 {
        return Err(Error::InvalidGrid("need at least one cell".into()));
    }
    if scheme == Scheme::GeometricTwoSided {
        if interval.is_unbounded() {
            return Err(Error::InvalidGrid(
                "two-sided geometric grid needs a bounded interval".into(),
            ));
        }
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid("two-sided geometric grid needs an even cell count".into()));
        }
    }
    let defaults = default_truncation(&interval, scheme);
    let (mut lo, mut hi) = truncation.unwrap_or(defaults);
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidGrid(format!("truncation ({lo}, {hi}) is not finite")));
    }
    if lo >= hi {
        return Err(Error::InvalidGrid(format!("truncation needs x_min < x_max, got ({lo}, {hi})")));
    }
    let a = interval.a;
    if lo < a {
        return Err(Error::InvalidGrid(format!("x_min {lo} lies left of the interval start {a}")));
    }
    if let Some(b) = interval.right() {
        if hi > b {
            return Err(Error::InvalidGrid(format!("x_max {hi} lies right of the interval end {b}")));
        }
    }
    // geometric spacing cannot start on the endpoint itself
    if scheme != Scheme::Uniform && lo <= a {
        lo = a + DEFAULT_REL_NEAR * (hi - a);
    }
    // gap to the right endpoint, kept exact for the default window
    let mut right_gap = interval.right().map(|b| b - hi).unwrap_or(0.0);
    if scheme == Scheme::GeometricTwoSided {
        let b = interval.right().expect("bounded");
        if truncation.is_none() {
            right_gap = DEFAULT_REL_NEAR * (b - a);
        } else if hi >= b {
            right_gap = DEFAULT_REL_NEAR * (b - lo);
            hi = b - right_gap;
        }
    }

    let edges: Vec<f64>;
    let nodes: Vec<f64>;
    match scheme {
        Scheme::Uniform => {
            let h = (hi - lo) / n as f64;
            edges = (0..=n).map(|i| if i == n { hi } else { lo + h * i as f64 }).collect();
            nodes = (0..n).map(|i| lo + h * (i as f64 + 0.5)).collect();
            let weights = vec![h; n];
            return Ok(Grid(Arc::new(GridData {
                interval,
                scheme,
                truncation: (lo, hi),
                edges,
                nodes,
                weights,
            })));
        }
        Scheme::Geometric => {
            let d = log_spaced(lo - a, hi - a, n);
            edges = d.iter().map(|d| a + d).collect();
            nodes = d.windows(2).map(|w| a + (w[0] * w[1]).sqrt()).collect();
        }
        Scheme::GeometricTwoSided => {
            let b = interval.right().expect("bounded");
            let mid = 0.5 * (a + b);
            let half = n / 2;
            let left = log_spaced(lo - a, mid - a, half);
            let right = log_spaced(right_gap, b - mid, half);
            let mut e: Vec<f64> = left.iter().map(|d| a + d).collect();
            e.extend(right.iter().rev().skip(1).map(|d| b - d));
            let mut nd: Vec<f64> = left.windows(2).map(|w| a + (w[0] * w[1]).sqrt()).collect();
            nd.extend(right.windows(2).rev().map(|w| b - (w[0] * w[1]).sqrt()));
            edges = e;
            nodes = nd;
        }
    }
    let weights: Vec<f64> = edges.windows(2).map(|w| w[1] - w[0]).collect();
    Grid::from_parts(interval, scheme, (lo, hi), edges, nodes, weights)
}

impl Grid {
    fn from_parts(
        interval: Interval,
        scheme: Scheme,
        truncation: (f64, f64),
        edges: Vec<f64>,
        nodes: Vec<f64>,
        weights: Vec<f64>,
    ) -> Result<Grid> {
        if nodes.len() + 1 != edges.len() || nodes.len() != weights.len() {
            return Err(Error::InvalidGrid("inconsistent cell arrays".into()));
        }
        for i in 0..nodes.len() {
            if !(edges[i] <= nodes[i] && nodes[i] <= edges[i + 1] && weights[i] > 0.0) {
                return Err(Error::InvalidGrid(format!(
                    "cell {i} [{}, {}] with node {} is degenerate",
                    edges[i],
                    edges[i + 1],
                    nodes[i]
                )));
            }
            if i > 0 && nodes[i] <= nodes[i - 1] {
                return Err(Error::InvalidGrid(format!("nodes not increasing at {i}")));
            }
        }
        Ok(Grid(Arc::new(GridData {
            interval,
            scheme,
            truncation,
            edges,
            nodes,
            weights,
        })))
    }

    pub fn interval(&self) -> &Interval {
        &self.0.interval
    }

    pub fn scheme(&self) -> Scheme {
        self.0.scheme
    }

    pub fn truncation(&self) -> (f64, f64) {
        self.0.truncation
    }

    pub fn len(&self) -> usize {
        self.0.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.0.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.0.weights
    }

    pub fn edges(&self) -> &[f64] {
        &self.0.edges
    }

    /// Samples `expr` at every node (with `t` unbound).
    pub fn sample(&self, expr: &Expr) -> Result<Vec<f64>> {
        self.nodes()
            .iter()
            .map(|&x| expr.eval(x, None).map_err(|source| Error::Eval { x, source }))
            .collect()
    }

    /// Index of the cell containing `x`, clamped to the grid.
    pub fn cell_of(&self, x: f64) -> usize {
        let edges = self.edges();
        match edges.partition_point(|&e| e <= x) {
            0 => 0,
            k => (k - 1).min(self.len() - 1),
        }
    }

    /// Indices of the cells whose node lies in `[x_max / 10, x_max]`
    /// when the right endpoint was truncated from infinity; empty otherwise.
    pub fn outer_decade(&self) -> std::ops::Range<usize> {
        if !self.interval().is_unbounded() {
            return self.len()..self.len();
        }
        let a = self.interval().a;
        let cut = a + (self.truncation().1 - a) / 10.0;
        self.nodes().partition_point(|&x| x < cut)..self.len()
    }

    /// Cells with node in the first decade `[x_min, 10 x_min]` above a
    /// truncated left endpoint; empty when the left endpoint is resolved.
    pub fn inner_decade(&self) -> std::ops::Range<usize> {
        let a = self.interval().a;
        let lo = self.truncation().0;
        if lo <= a {
            return 0..0;
        }
        let cut = a + (lo - a) * 10.0;
        0..self.nodes().partition_point(|&x| x < cut)
    }

    /// Splits the cell containing `t` at `t`. Returns the refined grid and,
    /// for each new cell, the index of the parent cell.
    pub fn split_at(&self, t: f64) -> Result<(Grid, Vec<usize>)> {
        let (lo, hi) = self.truncation();
        if !(t > lo && t < hi) {
            return Err(Error::Precondition(format!("split point {t} outside ({lo}, {hi})")));
        }
        let k = self.cell_of(t);
        let edges = self.edges();
        if t == edges[k] || t == edges[k + 1] {
            return Ok((self.clone(), (0..self.len()).collect()));
        }
        let mut new_edges = Vec::with_capacity(edges.len() + 1);
        let mut new_nodes = Vec::with_capacity(self.len() + 1);
        let mut parent = Vec::with_capacity(self.len() + 1);
        for i in 0..self.len() {
            new_edges.push(edges[i]);
            if i == k {
                new_nodes.push(0.5 * (edges[i] + t));
                parent.push(i);
                new_edges.push(t);
                new_nodes.push(0.5 * (t + edges[i + 1]));
                parent.push(i);
            } else {
                new_nodes.push(self.nodes()[i]);
                parent.push(i);
            }
        }
        new_edges.push(edges[self.len()]);
        let weights = new_edges.windows(2).map(|w| w[1] - w[0]).collect();
        let grid = Grid::from_parts(
            *self.interval(),
            self.scheme(),
            self.truncation(),
            new_edges,
            new_nodes,
            weights,
        )?;
        Ok((grid, parent))
    }

    /// Sum of the quadrature weights.
    pub fn measure(&self) -> f64 {
        compensated_sum(self.weights().iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_midpoints() {
        let g = build_grid(Interval::bounded(0.0, 1.0).unwrap(), Scheme::Uniform, 4, None).unwrap();
        assert_eq!(g.nodes(), &[0.125, 0.375, 0.625, 0.875]);
        assert_eq!(g.weights(), &[0.25; 4]);
    }

    #[test]
    fn uniform_weights_sum_to_length() {
        for n in [16, 17, 100, 1000, 4096] {
            let g = build_grid(Interval::bounded(0.0, 1.0).unwrap(), Scheme::Uniform, n, None).unwrap();
            assert!((g.measure() - 1.0).abs() <= 1e-12, "n={n}");
        }
    }

    #[test]
    fn geometric_half_line_is_log_spaced() {
        let g = build_grid(Interval::half_line(0.0).unwrap(), Scheme::Geometric, 64, None).unwrap();
        assert_eq!(g.truncation(), (1e-6, 1e6));
        let ratios: Vec<f64> = g.nodes().windows(2).map(|w| (w[1] / w[0]).ln()).collect();
        let expected = (1e12f64).ln() / 64.0;
        for r in ratios {
            assert!((r - expected).abs() < 1e-9);
        }
        assert!((g.measure() - (1e6 - 1e-6)).abs() < 1e-6);
    }

    #[test]
    fn two_sided_is_symmetric() {
        let g = build_grid(
            Interval::bounded(0.0, 1.0).unwrap(),
            Scheme::GeometricTwoSided,
            32,
            None,
        )
        .unwrap();
        let n = g.len();
        for i in 0..n {
            let a = g.nodes()[i];
            let b = 1.0 - g.nodes()[n - 1 - i];
            assert!((a - b).abs() < 1e-12);
        }
        assert!((g.measure() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn geometric_truncation_is_corrected_away_from_zero() {
        let g = build_grid(
            Interval::bounded(0.0, 1.0).unwrap(),
            Scheme::Geometric,
            16,
            Some((0.0, 1.0)),
        )
        .unwrap();
        assert!(g.truncation().0 > 0.0);
    }

    #[test]
    fn invalid_truncations() {
        let iv = Interval::bounded(0.0, 1.0).unwrap();
        assert!(build_grid(iv, Scheme::Uniform, 16, Some((0.5, 0.5))).is_err());
        assert!(build_grid(iv, Scheme::Uniform, 16, Some((0.0, 2.0))).is_err());
        assert!(build_grid(iv, Scheme::GeometricTwoSided, 15, None).is_err());
        assert!(build_grid(Interval::half_line(0.0).unwrap(), Scheme::GeometricTwoSided, 16, None).is_err());
        assert!(Interval::bounded(1.0, 0.0).is_err());
    }

    #[test]
    fn interval_parsing() {
        let iv: Interval = "0, inf".parse().unwrap();
        assert!(iv.is_unbounded());
        let iv: Interval = "0,1".parse().unwrap();
        assert_eq!(iv.right(), Some(1.0));
        assert!("1".parse::<Interval>().is_err());
    }

    #[test]
    fn split_preserves_measure() {
        let g = build_grid(Interval::bounded(0.0, 1.0).unwrap(), Scheme::Uniform, 16, None).unwrap();
        let (s, parent) = g.split_at(0.3).unwrap();
        assert_eq!(s.len(), 17);
        assert_eq!(parent.len(), 17);
        assert!((s.measure() - 1.0).abs() < 1e-14);
        assert!(s.edges().contains(&0.3));
        let (same, _) = g.split_at(0.5).unwrap();
        assert_eq!(same.len(), 16);
    }

    #[test]
    fn decades() {
        let g = build_grid(Interval::half_line(0.0).unwrap(), Scheme::Geometric, 120, None).unwrap();
        assert_eq!(g.outer_decade().len(), 10);
        assert_eq!(g.inner_decade().len(), 10);
        let g = build_grid(Interval::bounded(0.0, 1.0).unwrap(), Scheme::Uniform, 16, None).unwrap();
        assert!(g.outer_decade().is_empty());
        assert!(g.inner_decade().is_empty());
    }
}
