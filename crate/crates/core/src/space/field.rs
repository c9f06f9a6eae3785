use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::space::grid::Grid;

/// Tolerance for comparing declared exponent bounds with sampled ones.
pub const BOUNDS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `0 < p_lo <= p_hi < 1`.
    SubOne,
    /// Any positive exponent, e.g. `q / p_lo >= 1` or `r = p q / (q - p)`.
    GeneralPositive,
}

/// Variable exponent sampled on a grid, with its essential bounds taken as
/// the node minimum and maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentField {
    values: Vec<f64>,
    lo: f64,
    hi: f64,
    regime: Regime,
}

fn node_bounds(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Essential infimum and supremum of `p` over the grid nodes.
pub fn ess_bounds(p: &Expr, grid: &Grid) -> Result<(f64, f64)> {
    let values = grid.sample(p)?;
    Ok(node_bounds(&values))
}

impl ExponentField {
    pub fn from_values(values: Vec<f64>, regime: Regime) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidField("exponent field is empty".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!("exponent value {v} is not finite")));
        }
        let (lo, hi) = node_bounds(&values);
        if lo <= 0.0 {
            return Err(Error::InvalidField(format!("exponent must be positive, minimum is {lo}")));
        }
        if regime == Regime::SubOne && hi >= 1.0 {
            return Err(Error::InvalidField(format!(
                "sub-one exponent must stay below 1, maximum is {hi}"
            )));
        }
        Ok(ExponentField {
            values,
            lo,
            hi,
            regime,
        })
    }

    pub fn from_expr(expr: &Expr, grid: &Grid, regime: Regime) -> Result<Self> {
        Self::from_values(grid.sample(expr)?, regime)
    }

    /// Like [`ExponentField::from_expr`], additionally checking the declared
    /// bounds against the sampled ones.
    pub fn from_expr_declared(
        expr: &Expr,
        grid: &Grid,
        regime: Regime,
        declared: (f64, f64),
    ) -> Result<Self> {
        let field = Self::from_expr(expr, grid, regime)?;
        if (field.lo - declared.0).abs() > BOUNDS_TOL || (field.hi - declared.1).abs() > BOUNDS_TOL {
            return Err(Error::InvalidField(format!(
                "declared bounds ({}, {}) do not match sampled ({}, {})",
                declared.0, declared.1, field.lo, field.hi
            )));
        }
        Ok(field)
    }

    pub fn constant(value: f64, len: usize, regime: Regime) -> Result<Self> {
        Self::from_values(vec![value; len], regime)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Essential infimum over the nodes.
    pub fn lo(&self) -> f64 {
        self.lo
    }

    /// Essential supremum over the nodes.
    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn is_constant(&self) -> bool {
        self.lo == self.hi
    }

    pub fn conjugate(&self) -> Result<ConjugateExponent> {
        ConjugateExponent::new(self)
    }

    pub fn select(&self, indices: &[usize]) -> Result<ExponentField> {
        Self::from_values(indices.iter().map(|&i| self.values[i]).collect(), self.regime)
    }
}

/// Conjugate exponent `p' = p / (p - 1)`, negative wherever `p < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateExponent {
    values: Vec<f64>,
    sup: f64,
    inf: f64,
}

impl ConjugateExponent {
    pub fn new(p: &ExponentField) -> Result<Self> {
        if p.values.contains(&1.0) {
            return Err(Error::InvalidField("conjugate exponent undefined at p = 1".into()));
        }
        let values: Vec<f64> = p.values.iter().map(|&v| v / (v - 1.0)).collect();
        let (inf, sup) = node_bounds(&values);
        Ok(ConjugateExponent { values, sup, inf })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Node supremum; for `p < 1` this is `p_lo / (p_lo - 1)`.
    pub fn sup(&self) -> f64 {
        self.sup
    }

    pub fn inf(&self) -> f64 {
        self.inf
    }
}

/// Conjugate of a scalar exponent.
pub fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

/// Positive, finite weight sampled on a grid. The optional exponents record
/// declared power-law behaviour `x^s` at the truncated left and right ends.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightField {
    values: Vec<f64>,
    pub singularity: (Option<f64>, Option<f64>),
}

impl WeightField {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::InvalidField(format!("weight at node {i} is {v}, need 0 < w < inf")));
        }
        Ok(WeightField {
            values,
            singularity: (None, None),
        })
    }

    pub fn from_expr(expr: &Expr, grid: &Grid) -> Result<Self> {
        Self::from_values(grid.sample(expr)?)
    }

    pub fn unit(len: usize) -> Self {
        WeightField {
            values: vec![1.0; len],
            singularity: (None, None),
        }
    }

    pub fn with_singularity(mut self, left: Option<f64>, right: Option<f64>) -> Self {
        self.singularity = (left, right);
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn recip(&self) -> WeightField {
        WeightField {
            values: self.values.iter().map(|v| 1.0 / v).collect(),
            singularity: (self.singularity.0.map(|s| -s), self.singularity.1.map(|s| -s)),
        }
    }
}

/// Real function sampled at the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn from_values(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite(format!("function value {v} at node {i}")));
        }
        Ok(GridFunction {
            grid: grid.clone(),
            values,
        })
    }

    pub fn from_expr(grid: &Grid, expr: &Expr) -> Result<Self> {
        Self::from_values(grid, grid.sample(expr)?)
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_values(grid, grid.nodes().iter().map(|&x| f(x)).collect())
    }

    pub fn constant(grid: &Grid, value: f64) -> Result<Self> {
        Self::from_values(grid, vec![value; grid.len()])
    }

    pub fn zeros(grid: &Grid) -> Self {
        GridFunction {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<GridFunction> {
        Self::from_values(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn abs(&self) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn scale(&self, alpha: f64) -> Result<GridFunction> {
        self.map(|v| alpha * v)
    }

    /// Pointwise combination with another function on the same grid.
    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        if self.grid != other.grid {
            return Err(Error::Precondition("functions live on different grids".into()));
        }
        Self::from_values(
            &self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;
    use crate::space::grid::{build_grid, Interval, Scheme};

    fn unit_grid(n: usize) -> Grid {
        build_grid(Interval::bounded(0.0, 1.0).unwrap(), Scheme::Uniform, n, None).unwrap()
    }

    #[test]
    fn bounds_of_constant_and_affine_exponents() {
        let g = unit_grid(64);
        assert_eq!(ess_bounds(&parse_expression("0.5").unwrap(), &g).unwrap(), (0.5, 0.5));
        let (lo, hi) = ess_bounds(&parse_expression("0.25 + 0.5*x").unwrap(), &g).unwrap();
        assert!(lo > 0.25 && lo < 0.26);
        assert!(hi < 0.75 && hi > 0.74);
    }

    #[test]
    fn piecewise_exponent_bounds() {
        let g = build_grid(Interval::half_line(0.0).unwrap(), Scheme::Geometric, 64, None).unwrap();
        let q = parse_expression("if(x < 1, 0.25, 0.5)").unwrap();
        assert_eq!(ess_bounds(&q, &g).unwrap(), (0.25, 0.5));
    }

    #[test]
    fn declared_bounds_are_checked() {
        let g = unit_grid(64);
        let p = parse_expression("0.5").unwrap();
        assert!(ExponentField::from_expr_declared(&p, &g, Regime::SubOne, (0.5, 0.5)).is_ok());
        assert!(ExponentField::from_expr_declared(&p, &g, Regime::SubOne, (0.4, 0.5)).is_err());
    }

    #[test]
    fn regimes() {
        assert!(ExponentField::constant(1.5, 4, Regime::SubOne).is_err());
        assert!(ExponentField::constant(1.5, 4, Regime::GeneralPositive).is_ok());
        assert!(ExponentField::constant(0.0, 4, Regime::GeneralPositive).is_err());
    }

    #[test]
    fn conjugate_exponent_identity() {
        let g = unit_grid(128);
        let p = ExponentField::from_expr(&parse_expression("0.25 + 0.5*x").unwrap(), &g, Regime::SubOne).unwrap();
        let pc = p.conjugate().unwrap();
        for (a, b) in p.values().iter().zip(pc.values()) {
            assert!(*b < 0.0);
            assert!((1.0 / a + 1.0 / b - 1.0).abs() < 1e-12);
        }
        assert!((pc.sup() - p.lo() / (p.lo() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn weights_must_be_positive() {
        assert!(WeightField::from_values(vec![1.0, 0.0]).is_err());
        assert!(WeightField::from_values(vec![1.0, f64::INFINITY]).is_err());
        let g = unit_grid(16);
        assert!(WeightField::from_expr(&parse_expression("x - 0.5").unwrap(), &g).is_err());
    }

    #[test]
    fn grid_functions_reject_non_finite() {
        let g = unit_grid(16);
        assert!(GridFunction::from_expr(&g, &parse_expression("1/(x - x)").unwrap()).is_err());
        assert!(GridFunction::from_values(&g, vec![0.0; 3]).is_err());
    }
}
