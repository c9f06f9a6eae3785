//! Reverse Minkowski and Hölder inequalities, the two-weight embedding, the
//! mixed-norm Minkowski inequality and the integral inequalities for monotone
//! functions.

use crate::error::{Error, Result};
use crate::report::{digest, verdict_slack, InequalityReport, Sense};
use crate::space::field::{ExponentField, GridFunction, WeightField};
use crate::space::grid::Grid;
use crate::space::norm::{
    conjugate_norm, integrate, luxemburg, modular_error, quadrature_error, quasi_norm,
};
use crate::summation::NeumaierSum;

/// Tolerance on `|p - q|` when splitting into coincidence sets.
pub const SPLIT_TOL: f64 = 1e-10;

/// `|| |f| + |g| ||  >=  ||f|| + ||g||`
pub fn check_reverse_minkowski(
    f: &GridFunction,
    g: &GridFunction,
    p: &ExponentField,
    w: &WeightField,
    tol: f64,
) -> Result<InequalityReport> {
    let sum = f.zip_with(g, |a, b| a.abs() + b.abs())?;
    let lhs = quasi_norm(&sum, p, w, tol)?;
    let rhs = quasi_norm(f, p, w, tol)? + quasi_norm(g, p, w, tol)?;
    let slack = verdict_slack(lhs, rhs, modular_error(&sum, p, w), tol);
    Ok(InequalityReport::new(
        "reverse_minkowski",
        Sense::AtLeast,
        lhs,
        rhs,
        1.0,
        slack,
        digest(&[f.values(), g.values(), p.values(), w.values()]),
    ))
}

/// `int |f g|  >=  (1/p_hi + 1/p_hi') ||f||_{p,w} ||g||_{p',1/w}` where
/// `p_hi'` is the node supremum of the (negative) conjugate exponent.
pub fn check_reverse_holder(
    f: &GridFunction,
    g: &GridFunction,
    p: &ExponentField,
    w: &WeightField,
    tol: f64,
) -> Result<InequalityReport> {
    let conj = p.conjugate()?;
    let constant = 1.0 / p.hi() + 1.0 / conj.sup();
    let prod = f.zip_with(g, |a, b| (a * b).abs())?;
    let lhs = integrate(&prod);
    let norm_f = quasi_norm(f, p, w, tol)?;
    let norm_g = conjugate_norm(g, p, w, tol)?;
    let rhs = constant * norm_f * norm_g;
    let slack = verdict_slack(lhs, rhs, quadrature_error(f.grid().weights(), prod.values()), tol);
    Ok(InequalityReport::new(
        "reverse_holder",
        Sense::AtLeast,
        lhs,
        rhs,
        constant,
        slack,
        digest(&[f.values(), g.values(), p.values(), w.values()]),
    )
    .with_extra("norm_f", norm_f)
    .with_extra("conjugate_norm_g", norm_g))
}

/// Pieces of the embedding constant
/// `C = (A + B + ||chi_2||_inf)^{1/p_lo} (||w1/w2||_{L_r(O1)} + ||w1/w2||_{L_inf(O2)})`
/// with `O1 = {p < q}`, `O2 = {p = q}` and `r = p q / (q - p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingConstantParts {
    pub a: f64,
    pub b: f64,
    pub chi2: f64,
    pub ratio_norm_r: f64,
    pub ratio_sup: f64,
    pub omega1_nodes: usize,
    pub constant: f64,
}

impl EmbeddingConstantParts {
    pub fn weight_norm(&self) -> f64 {
        self.ratio_norm_r + self.ratio_sup
    }
}

pub fn embedding_constant(
    grid: &Grid,
    p: &ExponentField,
    q: &ExponentField,
    w1: &WeightField,
    w2: &WeightField,
    tol: f64,
) -> Result<EmbeddingConstantParts> {
    let n = grid.len();
    for (len, what) in [(p.len(), "p"), (q.len(), "q"), (w1.len(), "omega1"), (w2.len(), "omega2")] {
        if len != n {
            return Err(Error::Precondition(format!("{what} has {len} nodes, grid has {n}")));
        }
    }
    let (pv, qv) = (p.values(), q.values());
    if let Some(i) = (0..n).find(|&i| pv[i] > qv[i] + SPLIT_TOL) {
        return Err(Error::Precondition(format!(
            "need p <= q, but p = {} > q = {} at x = {}",
            pv[i],
            qv[i],
            grid.nodes()[i]
        )));
    }
    let ratio: Vec<f64> = w1.values().iter().zip(w2.values()).map(|(a, b)| a / b).collect();
    let mut a: f64 = 0.0;
    let mut b: f64 = 0.0;
    let mut ratio_sup: f64 = 0.0;
    let mut chi2 = 0.0;
    let mut cells = Vec::new();
    let mut vals = Vec::new();
    let mut exps = Vec::new();
    for i in 0..n {
        let gap = qv[i] - pv[i];
        if gap > SPLIT_TOL {
            a = a.max(pv[i] / qv[i]);
            b = b.max(gap / qv[i]);
            cells.push(grid.weights()[i]);
            vals.push(ratio[i]);
            exps.push(pv[i] * qv[i] / gap);
        } else {
            chi2 = 1.0;
            ratio_sup = ratio_sup.max(ratio[i]);
        }
    }
    let ratio_norm_r = if cells.is_empty() {
        0.0
    } else {
        luxemburg(&cells, &vals, &exps, tol)?
    };
    let constant = (a + b + chi2).powf(1.0 / p.lo()) * (ratio_norm_r + ratio_sup);
    Ok(EmbeddingConstantParts {
        a,
        b,
        chi2,
        ratio_norm_r,
        ratio_sup,
        omega1_nodes: cells.len(),
        constant,
    })
}

/// `||f||_{p,w1}  <=  C ||f||_{q,w2}`
pub fn check_embedding(
    f: &GridFunction,
    p: &ExponentField,
    q: &ExponentField,
    w1: &WeightField,
    w2: &WeightField,
    tol: f64,
) -> Result<InequalityReport> {
    let parts = embedding_constant(f.grid(), p, q, w1, w2, tol)?;
    let lhs = quasi_norm(f, p, w1, tol)?;
    let rhs = parts.constant * quasi_norm(f, q, w2, tol)?;
    let slack = verdict_slack(lhs, rhs, modular_error(f, p, w1), tol);
    Ok(InequalityReport::new(
        "embedding",
        Sense::AtMost,
        lhs,
        rhs,
        parts.constant,
        slack,
        digest(&[f.values(), p.values(), q.values(), w1.values(), w2.values()]),
    )
    .with_extra("A", parts.a)
    .with_extra("B", parts.b)
    .with_extra("chi_omega2", parts.chi2)
    .with_extra("weight_norm", parts.weight_norm()))
}

/// Function sampled on the product of two grids, stored row-major with the
/// first axis outermost: `values[i * ny + j] = F(x_i, y_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction2 {
    pub gx: Grid,
    pub gy: Grid,
    values: Vec<f64>,
}

impl GridFunction2 {
    pub fn from_values(gx: &Grid, gy: &Grid, values: Vec<f64>) -> Result<Self> {
        let expected = gx.len() * gy.len();
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("two-dimensional function value".into()));
        }
        Ok(GridFunction2 {
            gx: gx.clone(),
            gy: gy.clone(),
            values,
        })
    }

    pub fn from_fn(gx: &Grid, gy: &Grid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(gx.len() * gy.len());
        for &x in gx.nodes() {
            for &y in gy.nodes() {
                values.push(f(x, y));
            }
        }
        Self::from_values(gx, gy, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.gy.len() + j]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedNormConstantParts {
    pub chi_delta1: f64,
    pub chi_delta2: f64,
    pub q_lo: f64,
    pub q_hi: f64,
    pub constant: f64,
}

/// `C = (chi_D1 + chi_D2 + p_hi/q_lo - p_lo/q_hi)(chi_D1 + chi_D2)` with
/// `D1 = {(x, y) : p(x) = q(y)}` and `D2` its complement.
pub fn mixed_norm_constant(p: &ExponentField, q: &ExponentField) -> MixedNormConstantParts {
    let mut any_equal = false;
    let mut any_differ = false;
    for &a in p.values() {
        for &b in q.values() {
            if (a - b).abs() <= SPLIT_TOL {
                any_equal = true;
            } else {
                any_differ = true;
            }
        }
        if any_equal && any_differ {
            break;
        }
    }
    let chi1 = if any_equal { 1.0 } else { 0.0 };
    let chi2 = if any_differ { 1.0 } else { 0.0 };
    let constant = (chi1 + chi2 + p.hi() / q.lo() - p.lo() / q.hi()) * (chi1 + chi2);
    MixedNormConstantParts {
        chi_delta1: chi1,
        chi_delta2: chi2,
        q_lo: q.lo(),
        q_hi: q.hi(),
        constant,
    }
}

/// `|| ||F||_{p, x} ||_{q, y}  <=  C || ||F||_{q, y} ||_{p, x}` for
/// `1 <= p(x) <= q(y)`, unweighted.
pub fn check_mixed_norm(
    f: &GridFunction2,
    p: &ExponentField,
    q: &ExponentField,
    tol: f64,
) -> Result<InequalityReport> {
    let (nx, ny) = (f.gx.len(), f.gy.len());
    if p.len() != nx || q.len() != ny {
        return Err(Error::Precondition("exponent lengths do not match the axes".into()));
    }
    if p.lo() < 1.0 {
        return Err(Error::Precondition(format!("mixed norm needs p >= 1, p_lo = {}", p.lo())));
    }
    if p.hi() > q.lo() + SPLIT_TOL {
        return Err(Error::Precondition(format!(
            "mixed norm needs p(x) <= q(y), but p_hi = {} > q_lo = {}",
            p.hi(),
            q.lo()
        )));
    }
    let parts = mixed_norm_constant(p, q);
    let (wx, wy) = (f.gx.weights(), f.gy.weights());

    let inner_x: Vec<f64> = (0..ny)
        .map(|j| {
            let col: Vec<f64> = (0..nx).map(|i| f.at(i, j).abs()).collect();
            luxemburg(wx, &col, p.values(), tol)
        })
        .collect::<Result<_>>()?;
    let lhs = luxemburg(wy, &inner_x, q.values(), tol)?;

    let inner_y: Vec<f64> = (0..nx)
        .map(|i| {
            let row: Vec<f64> = (0..ny).map(|j| f.at(i, j).abs()).collect();
            luxemburg(wy, &row, q.values(), tol)
        })
        .collect::<Result<_>>()?;
    let rhs_norm = luxemburg(wx, &inner_y, p.values(), tol)?;
    let rhs = parts.constant * rhs_norm;

    let outer: Vec<f64> = inner_x
        .iter()
        .zip(q.values())
        .map(|(v, e)| if *v == 0.0 { 0.0 } else { (v / lhs.max(f64::MIN_POSITIVE)).powf(*e) })
        .collect();
    let slack = verdict_slack(lhs, rhs, quadrature_error(wy, &outer), tol);
    Ok(InequalityReport::new(
        "mixed_norm",
        Sense::AtMost,
        lhs,
        rhs,
        parts.constant,
        slack,
        digest(&[f.values(), p.values(), q.values()]),
    )
    .with_extra("chi_delta1", parts.chi_delta1)
    .with_extra("chi_delta2", parts.chi_delta2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Decreasing,
    Increasing,
}

impl std::str::FromStr for Monotonicity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "decreasing" => Ok(Monotonicity::Decreasing),
            "increasing" => Ok(Monotonicity::Increasing),
            other => Err(Error::Scenario(format!(
                "direction must be decreasing or increasing, got {other}"
            ))),
        }
    }
}

/// Index of the first node breaking the requested monotonicity.
pub fn monotonicity_violation(values: &[f64], dir: Monotonicity) -> Option<usize> {
    values.windows(2).position(|w| match dir {
        Monotonicity::Decreasing => w[1] > w[0],
        Monotonicity::Increasing => w[1] < w[0],
    }).map(|i| i + 1)
}

/// Cell boundaries of the step function represented by `grid`, with the
/// outer cells stretched to the interval endpoints where these are finite.
pub(crate) fn step_edges(grid: &Grid, stretch_right: bool) -> Vec<f64> {
    let mut e = grid.edges().to_vec();
    e[0] = grid.interval().a;
    if stretch_right {
        if let Some(b) = grid.interval().right() {
            let last = e.len() - 1;
            e[last] = b;
        }
    }
    e
}

/// `(int f)^s <= s int f^s (x - a)^{s-1} dx` for nonincreasing `f`, or the
/// same with kernel `(b - x)^{s-1}` for nondecreasing `f` on a bounded
/// interval.
///
/// `f` is read as the step function constant on each cell (the outer cells
/// extended to the interval ends); kernel integrals are exact per cell.
pub fn check_monotone_integral(
    f: &GridFunction,
    s: f64,
    dir: Monotonicity,
    tol: f64,
) -> Result<InequalityReport> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Precondition(format!("need 0 < s < 1, got {s}")));
    }
    let v = f.values();
    if let Some(i) = v.iter().position(|&x| x < 0.0) {
        return Err(Error::Precondition(format!("f is negative at node {i}")));
    }
    if let Some(i) = monotonicity_violation(v, dir) {
        return Err(Error::Precondition(format!(
            "f is not {} at node {i}",
            match dir {
                Monotonicity::Decreasing => "nonincreasing",
                Monotonicity::Increasing => "nondecreasing",
            }
        )));
    }
    let grid = f.grid();
    let b = match (dir, grid.interval().right()) {
        (Monotonicity::Increasing, None) => {
            return Err(Error::Precondition("the increasing case needs a bounded interval".into()))
        }
        (_, Some(b)) => b,
        (_, None) => grid.truncation().1,
    };
    let a = grid.interval().a;
    let e = step_edges(grid, true);
    let mut total = NeumaierSum::new();
    let mut kernel = NeumaierSum::new();
    let mut rhs_terms = Vec::with_capacity(v.len());
    for i in 0..v.len() {
        let (l, r) = (e[i], e[i + 1].min(b));
        total.add(v[i] * (r - l));
        // exact cell integral of the kernel times s
        let k = match dir {
            Monotonicity::Decreasing => (r - a).powf(s) - (l - a).powf(s),
            Monotonicity::Increasing => (b - l).powf(s) - (b - r).powf(s),
        };
        let term = if v[i] == 0.0 { 0.0 } else { v[i].powf(s) * k };
        kernel.add(term);
        rhs_terms.push(term / grid.weights()[i]);
    }
    let lhs = total.value().powf(s);
    let rhs = kernel.value();
    let slack = verdict_slack(lhs, rhs, quadrature_error(grid.weights(), &rhs_terms), tol);
    Ok(InequalityReport::new(
        match dir {
            Monotonicity::Decreasing => "monotone_integral_decreasing",
            Monotonicity::Increasing => "monotone_integral_increasing",
        },
        Sense::AtMost,
        lhs,
        rhs,
        s,
        slack,
        digest(&[v, &[s]]),
    ))
}

/// Sides of the reverse Young inequality `a b >= a^s / s + b^{s'} / s'` for
/// `0 < s < 1` (the ordinary Young inequality reverses it for `s > 1`).
pub fn young_sides(a: f64, b: f64, s: f64) -> (f64, f64) {
    let sc = s / (s - 1.0);
    (a * b, a.powf(s) / s + b.powf(sc) / sc)
}
