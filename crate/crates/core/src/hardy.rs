//! Hardy operator `Hf(x) = (1/x) int_0^x f`, its dual
//! `H*f(x) = (1/x) int_x^inf f`, and two-weight bounds for both in the
//! sub-one variable-exponent scale.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::inequalities::{monotonicity_violation, Monotonicity, SPLIT_TOL};
use crate::report::{digest, verdict_slack, InequalityReport, Sense};
use crate::space::field::{ExponentField, GridFunction, WeightField};
use crate::space::grid::Grid;
use crate::space::norm::{luxemburg, quadrature_error, quasi_norm};
use crate::summation::NeumaierSum;

/// Share of an integral above which the outermost decade makes a verdict
/// indeterminate.
pub const TRUNCATION_LIMIT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `H`, nonincreasing `f`, kernel `t^{1/p'}` outside the tail norm.
    T6,
    /// `H`, nondecreasing `f`, kernel `(x - t)^{1/p'}` inside the tail norm.
    T7,
    /// `H*`, nonincreasing `f`, kernel `(t - x)^{1/p'}` inside the head norm.
    T8,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T6" | "hardy_T6" => Ok(Variant::T6),
            "T7" | "hardy_T7" => Ok(Variant::T7),
            "T8" | "hardy_T8" => Ok(Variant::T8),
            other => Err(Error::Scenario(format!("unknown Hardy variant {other}"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::T6 => "T6",
            Variant::T7 => "T7",
            Variant::T8 => "T8",
        })
    }
}

/// Which conjugate exponent enters the kernel of the `T6` functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExponentVariant {
    /// `p_hi' = p_lo / (p_lo - 1)` everywhere.
    #[default]
    Proof,
    /// Pointwise `p'(t) = p(t) / (p(t) - 1)`.
    Statement,
}

impl FromStr for ExponentVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proof" => Ok(ExponentVariant::Proof),
            "statement" => Ok(ExponentVariant::Statement),
            other => Err(Error::Scenario(format!(
                "exponent_variant must be proof or statement, got {other}"
            ))),
        }
    }
}

fn check_half_line(grid: &Grid) -> Result<()> {
    if grid.interval().a != 0.0 {
        return Err(Error::Precondition(format!(
            "Hardy operators live on intervals starting at 0, got {}",
            grid.interval()
        )));
    }
    Ok(())
}

fn check_nonnegative(f: &GridFunction) -> Result<()> {
    if let Some(i) = f.values().iter().position(|&v| v < 0.0) {
        return Err(Error::Precondition(format!("f is negative at node {i}")));
    }
    Ok(())
}

/// `Hf` at the nodes. `f` is read as a step function on the cells and, below
/// a truncation point, as the power law through its first two nodes.
pub fn hardy_apply(f: &GridFunction) -> Result<GridFunction> {
    let grid = f.grid();
    check_half_line(grid)?;
    check_nonnegative(f)?;
    let (e, x, h, v) = (grid.edges(), grid.nodes(), grid.weights(), f.values());
    let mut acc = NeumaierSum::new();
    if let Some(w) = head_weight(grid, v, &[1.0]) {
        if !w.is_finite() {
            return Err(Error::Precondition("int_0 f diverges below the truncation point".into()));
        }
        acc.add(w * v[0]);
    }
    let mut out = Vec::with_capacity(v.len());
    for i in 0..v.len() {
        out.push((acc.value() + v[i] * (x[i] - e[i])) / x[i]);
        acc.add(v[i] * h[i]);
    }
    GridFunction::from_values(grid, out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualHardy {
    pub values: GridFunction,
    /// Share of `int f` coming from the outermost decade.
    pub outer_fraction: f64,
}

impl DualHardy {
    pub fn tail_dominant(&self) -> bool {
        self.outer_fraction > TRUNCATION_LIMIT
    }
}

/// `H*f` at the nodes, with the tail cut at the truncation point.
pub fn dual_hardy_apply(f: &GridFunction) -> Result<DualHardy> {
    let grid = f.grid();
    check_half_line(grid)?;
    check_nonnegative(f)?;
    let (e, x, h, v) = (grid.edges(), grid.nodes(), grid.weights(), f.values());
    let n = v.len();
    let mut out = vec![0.0; n];
    let mut acc = NeumaierSum::new();
    for i in (0..n).rev() {
        out[i] = (acc.value() + v[i] * (e[i + 1] - x[i])) / x[i];
        acc.add(v[i] * h[i]);
    }
    let outer_fraction = decade_fraction(grid, v, grid.outer_decade());
    Ok(DualHardy {
        values: GridFunction::from_values(grid, out)?,
        outer_fraction,
    })
}

/// Share of `sum h_i v_i` contributed by the cells in `range`.
pub fn decade_fraction(grid: &Grid, v: &[f64], range: std::ops::Range<usize>) -> f64 {
    let h = grid.weights();
    let total: f64 = crate::summation::compensated_sum(h.iter().zip(v).map(|(h, v)| h * v));
    if !(total > 0.0) || range.is_empty() {
        return 0.0;
    }
    let part = crate::summation::compensated_sum(range.map(|i| h[i] * v[i]));
    part / total
}

/// Constants `c_pq` and `d_p` with their indicator components.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyConstants {
    pub chi_delta1: f64,
    pub chi_delta2: f64,
    pub chi_s1: f64,
    pub chi_s2: f64,
    /// `p_lo (1/q_lo - 1/q_hi)`
    pub spread_q: f64,
    /// `(p_hi - p_lo) / p_hi`
    pub spread_p: f64,
    pub p_lo: f64,
    pub c_pq: f64,
    pub d_p: f64,
}

impl HardyConstants {
    #[allow(clippy::too_many_arguments)]
    pub fn from_components(
        chi_delta1: f64,
        chi_delta2: f64,
        chi_s1: f64,
        chi_s2: f64,
        p_lo: f64,
        p_hi: f64,
        q_lo: f64,
        q_hi: f64,
    ) -> Self {
        let spread_q = p_lo * (1.0 / q_lo - 1.0 / q_hi);
        let spread_p = (p_hi - p_lo) / p_hi;
        HardyConstants {
            chi_delta1,
            chi_delta2,
            chi_s1,
            chi_s2,
            spread_q,
            spread_p,
            p_lo,
            c_pq: (chi_delta1 + chi_delta2 + spread_q) * (chi_s1 + chi_s2),
            d_p: (1.0 + spread_p + chi_s1).powf(1.0 / p_lo),
        }
    }

    /// `p_lo^{1/p_lo} c_pq d_p`
    pub fn factor(&self) -> f64 {
        self.p_lo.powf(1.0 / self.p_lo) * self.c_pq * self.d_p
    }
}

/// `S1 = {p = p_lo}` membership of each node.
pub fn s1_mask(p: &ExponentField) -> Vec<bool> {
    p.values().iter().map(|&v| v - p.lo() <= SPLIT_TOL).collect()
}

pub fn hardy_constants(p: &ExponentField, q: &ExponentField) -> Result<HardyConstants> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    if p.hi() >= 1.0 || q.hi() >= 1.0 {
        return Err(Error::Precondition("Hardy bounds need p <= q < 1".into()));
    }
    if let Some(i) = (0..p.len()).find(|&i| p.values()[i] > q.values()[i] + SPLIT_TOL) {
        return Err(Error::Precondition(format!(
            "need p <= q, but p = {} > q = {} at node {i}",
            p.values()[i],
            q.values()[i]
        )));
    }
    let mask = s1_mask(p);
    let chi_s1 = if mask.iter().any(|&b| b) { 1.0 } else { 0.0 };
    let chi_s2 = if mask.iter().any(|&b| !b) { 1.0 } else { 0.0 };

    // coincidence sets over the product of the node sets
    let mut qs: Vec<f64> = q.values().to_vec();
    qs.sort_by(f64::total_cmp);
    qs.dedup();
    let delta1 = p.values().iter().any(|&a| {
        let k = qs.partition_point(|&b| b < a - SPLIT_TOL);
        k < qs.len() && (qs[k] - a).abs() <= SPLIT_TOL
    });
    // some pair differs unless every p value matches every q value
    let delta2 = (p.hi() - q.lo()).max(q.hi() - p.lo()) > SPLIT_TOL;
    Ok(HardyConstants::from_components(
        if delta1 { 1.0 } else { 0.0 },
        if delta2 { 1.0 } else { 0.0 },
        chi_s1,
        chi_s2,
        p.lo(),
        p.hi(),
        q.lo(),
        q.hi(),
    ))
}

/// Right-hand weight functional sampled on the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsWeightFunctional {
    pub variant: Variant,
    pub t: Vec<f64>,
    /// Inner norms (without the `t` kernel for `T6`).
    pub inner: Vec<f64>,
    /// Integrand of the outer norm: kernel times inner norm over `w1(t)`.
    pub integrand: Vec<f64>,
    /// `L_r` part over `{p > p_lo}`.
    pub norm_r: f64,
    /// `L_inf` part over `{p = p_lo}`, sampled on the nodes.
    pub sup_part: f64,
    /// Power of the `L_inf` integrand at the first two nodes; negative when
    /// it still grows toward 0, so the sampled sup may miss the head.
    pub sup_growth: f64,
    pub value: f64,
    /// Outermost-decade share of the widest inner modular (`T6`, `T7`).
    pub inner_outer_fraction: f64,
    /// Outermost-decade share of the outer modular.
    pub outer_fraction: f64,
}

impl RhsWeightFunctional {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// Conjugate `p_lo / (p_lo - 1)` of the lower exponent bound.
pub fn conjugate_of_lower(p: &ExponentField) -> f64 {
    p.lo() / (p.lo() - 1.0)
}

/// Outermost-decade share of `sum h (v / norm)^e` at the norm.
fn modular_outer_fraction(grid: &Grid, cells: &[usize], h: &[f64], v: &[f64], e: &[f64], norm: f64) -> f64 {
    if !(norm > 0.0) || !norm.is_finite() {
        return 0.0;
    }
    let outer = grid.outer_decade();
    let mut total = NeumaierSum::new();
    let mut part = NeumaierSum::new();
    for k in 0..v.len() {
        if v[k] == 0.0 {
            continue;
        }
        let term = h[k] * ((v[k] / norm).ln() * e[k]).exp();
        total.add(term);
        if outer.contains(&cells[k]) {
            part.add(term);
        }
    }
    let total = total.value();
    if total > 0.0 {
        part.value() / total
    } else {
        0.0
    }
}

/// Power-law heads this close to the divergent `x^{-1}` count as divergent;
/// the fitted power carries rounding of about this size.
const HEAD_BORDERLINE: f64 = 1e-9;

/// Growth toward 0 of the `L_inf` integrand beyond which a violation is not
/// trusted.
const SUP_GROWTH: f64 = 1e-3;

/// Weight `W` with `W v_0^{e_0} = int_0^edge v(x)^{e_0} dx` for the power
/// law `v` through `(x0, v0)` and `(x1, v1)`; infinite when that integral
/// diverges.
fn power_head(edge: f64, (x0, v0): (f64, f64), (x1, v1): (f64, f64), e0: f64) -> f64 {
    let s = if v1 > 0.0 { (v1 / v0).ln() / (x1 / x0).ln() } else { 0.0 };
    let k = s * e0 + 1.0;
    if k <= HEAD_BORDERLINE {
        return f64::INFINITY;
    }
    (-s * e0 * x0.ln() + k * edge.ln() - k.ln()).exp()
}

/// Weight of the cell `(0, e_0)` cut off by the truncation, the integrand
/// continued to 0 as a power law. `None` when nothing is cut off or `v_0 = 0`.
fn head_weight(grid: &Grid, v: &[f64], e: &[f64]) -> Option<f64> {
    let (edge, x) = (grid.edges()[0], grid.nodes());
    if !(edge > 0.0) || v.is_empty() || v[0] == 0.0 {
        return None;
    }
    let second = if v.len() > 1 { (x[1], v[1]) } else { (x[0], 0.0) };
    Some(power_head(edge, (x[0], v[0]), second, e[0]))
}

/// Luxemburg norm of the cell values `v` on the grid plus the power-law head
/// below the truncation point; infinite when either part diverges.
fn norm_with_head(grid: &Grid, v: &[f64], e: &[f64], tol: f64) -> Result<f64> {
    let mut weights = grid.weights().to_vec();
    let (mut v, mut e) = (v.to_vec(), e.to_vec());
    if let Some(w) = head_weight(grid, &v, &e) {
        if !w.is_finite() {
            return Ok(f64::INFINITY);
        }
        weights.push(w);
        v.push(v[0]);
        e.push(e[0]);
    }
    match luxemburg(&weights, &v, &e, tol) {
        Err(Error::NonFinite(_)) => Ok(f64::INFINITY),
        other => other,
    }
}

fn weighted(f: &GridFunction, w: &WeightField) -> Vec<f64> {
    f.values().iter().zip(w.values()).map(|(f, w)| f.abs() * w).collect()
}

struct InnerNorm {
    value: f64,
    outer_fraction: f64,
}

/// Inner norm at the node `k` for the given variant.
fn inner_norm(
    variant: Variant,
    grid: &Grid,
    k: usize,
    w2: &[f64],
    q: &[f64],
    pc: f64,
    tol: f64,
    track_tail: bool,
) -> Result<InnerNorm> {
    let (e, x, h) = (grid.edges(), grid.nodes(), grid.weights());
    let n = x.len();
    let t = x[k];
    let mut cells = Vec::new();
    let mut width = Vec::new();
    let mut vals = Vec::new();
    let mut exps = Vec::new();
    match variant {
        Variant::T6 => {
            // partial cell (t, e_{k+1}) carries the node value
            cells.push(k);
            width.push(e[k + 1] - t);
            vals.push(w2[k] / t);
            exps.push(q[k]);
            for j in k + 1..n {
                cells.push(j);
                width.push(h[j]);
                vals.push(w2[j] / x[j]);
                exps.push(q[j]);
            }
        }
        Variant::T7 => {
            for j in k + 1..n {
                cells.push(j);
                width.push(h[j]);
                vals.push((x[j] - t).powf(1.0 / pc) * w2[j] / x[j]);
                exps.push(q[j]);
            }
        }
        Variant::T8 => {
            for j in 0..k {
                cells.push(j);
                width.push(h[j]);
                vals.push((t - x[j]).powf(1.0 / pc) * w2[j] / x[j]);
                exps.push(q[j]);
            }
        }
    }
    if variant == Variant::T8 && k > 0 && e[0] > 0.0 && vals[0] > 0.0 {
        let second = if k > 1 { (x[1], vals[1]) } else { (x[0], 0.0) };
        let w = power_head(e[0], (x[0], vals[0]), second, exps[0]);
        if !w.is_finite() {
            return Ok(InnerNorm {
                value: f64::INFINITY,
                outer_fraction: 0.0,
            });
        }
        let (v0, q0) = (vals[0], exps[0]);
        cells.push(0);
        width.push(w);
        vals.push(v0);
        exps.push(q0);
    }
    if cells.is_empty() || (width.len() == 1 && width[0] <= 0.0) {
        return Ok(InnerNorm {
            value: 0.0,
            outer_fraction: 0.0,
        });
    }
    let value = match luxemburg(&width, &vals, &exps, tol) {
        Ok(v) => v,
        Err(Error::NonFinite(_)) => f64::INFINITY,
        Err(err) => return Err(err),
    };
    let outer_fraction = if track_tail {
        modular_outer_fraction(grid, &cells, &width, &vals, &exps, value)
    } else {
        0.0
    };
    Ok(InnerNorm {
        value,
        outer_fraction,
    })
}

/// Evaluates the weight functional of the chosen variant on the nodes of the
/// grid of `w1`:
///
/// * `T6`: `|| t^{1/p'} ||w2/x||_{L_q(t,inf)} / w1 ||_{L_r}`
/// * `T7`: `|| ||(x-t)^{1/p'} w2/x||_{L_q(t,inf)} / w1 ||_{L_r}`
/// * `T8`: `|| ||(t-x)^{1/p'} w2/x||_{L_q(0,t)} / w1 ||_{L_r}`
///
/// with `p' = p_lo / (p_lo - 1)` and `r = p_lo p / (p - p_lo)`; nodes with
/// `p = p_lo` form an `L_inf` part.
pub fn rhs_weight_functional(
    variant: Variant,
    grid: &Grid,
    w1: &WeightField,
    w2: &WeightField,
    p: &ExponentField,
    q: &ExponentField,
    exponent_variant: ExponentVariant,
    tol: f64,
) -> Result<RhsWeightFunctional> {
    check_half_line(grid)?;
    let n = grid.len();
    for (len, what) in [(w1.len(), "omega1"), (w2.len(), "omega2"), (p.len(), "p"), (q.len(), "q")] {
        if len != n {
            return Err(Error::Precondition(format!("{what} has {len} nodes, grid has {n}")));
        }
    }
    if p.hi() >= 1.0 {
        return Err(Error::Precondition("p must stay below 1".into()));
    }
    let pc = conjugate_of_lower(p);
    let x = grid.nodes();
    let inner: Vec<InnerNorm> = (0..n)
        .into_par_iter()
        .map(|k| inner_norm(variant, grid, k, w2.values(), q.values(), pc, tol, k == 0))
        .collect::<Result<_>>()?;
    let inner_outer_fraction = inner[0].outer_fraction;
    let inner: Vec<f64> = inner.into_iter().map(|r| r.value).collect();

    let integrand: Vec<f64> = (0..n)
        .map(|k| {
            let kernel = match (variant, exponent_variant) {
                (Variant::T6, ExponentVariant::Proof) => x[k].powf(1.0 / pc),
                (Variant::T6, ExponentVariant::Statement) => {
                    let pk = p.values()[k];
                    x[k].powf((pk - 1.0) / pk)
                }
                _ => 1.0,
            };
            if inner[k] == 0.0 {
                0.0
            } else {
                kernel * inner[k] / w1.values()[k]
            }
        })
        .collect();

    let mask = s1_mask(p);
    let mut sup_part: f64 = 0.0;
    let (mut cells, mut width, mut vals, mut exps) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for k in 0..n {
        if mask[k] {
            sup_part = sup_part.max(integrand[k]);
        } else {
            let pk = p.values()[k];
            cells.push(k);
            width.push(grid.weights()[k]);
            vals.push(integrand[k]);
            exps.push(p.lo() * pk / (pk - p.lo()));
        }
    }
    let edge = grid.edges()[0];
    let sup_growth = if edge > 0.0 && n > 1 && mask[0] && mask[1] && integrand[0] > 0.0 && integrand[1] > 0.0 {
        (integrand[1] / integrand[0]).ln() / (x[1] / x[0]).ln()
    } else {
        0.0
    };
    let mut head_infinite = false;
    if edge > 0.0 && cells.first() == Some(&0) && vals[0] > 0.0 {
        let second = if cells.get(1) == Some(&1) { (x[1], vals[1]) } else { (x[0], 0.0) };
        let w = power_head(edge, (x[0], vals[0]), second, exps[0]);
        head_infinite = !w.is_finite();
        let (v0, r0) = (vals[0], exps[0]);
        cells.push(0);
        width.push(w);
        vals.push(v0);
        exps.push(r0);
    }
    let (norm_r, outer_fraction) = if head_infinite || integrand.iter().any(|v| v.is_infinite()) {
        (f64::INFINITY, 0.0)
    } else if cells.is_empty() {
        (0.0, 0.0)
    } else {
        match luxemburg(&width, &vals, &exps, tol) {
            Ok(v) => (v, modular_outer_fraction(grid, &cells, &width, &vals, &exps, v)),
            Err(Error::NonFinite(_)) => (f64::INFINITY, 0.0),
            Err(err) => return Err(err),
        }
    };
    Ok(RhsWeightFunctional {
        variant,
        t: x.to_vec(),
        inner,
        integrand,
        norm_r,
        sup_part,
        sup_growth,
        value: norm_r + sup_part,
        inner_outer_fraction,
        outer_fraction,
    })
}

/// Inputs of a Hardy check on one grid.
#[derive(Debug, Clone)]
pub struct HardySetup {
    pub p: ExponentField,
    pub q: ExponentField,
    pub w1: WeightField,
    pub w2: WeightField,
    pub exponent_variant: ExponentVariant,
    pub tol: f64,
}

fn norm_outer_fraction(f: &GridFunction, p: &ExponentField, w: &WeightField, norm: f64) -> f64 {
    let grid = f.grid();
    let v: Vec<f64> = f
        .values()
        .iter()
        .zip(w.values())
        .map(|(f, w)| f.abs() * w)
        .collect();
    let cells: Vec<usize> = (0..v.len()).collect();
    modular_outer_fraction(grid, &cells, grid.weights(), &v, p.values(), norm)
}

fn norm_integrand(f: &GridFunction, p: &ExponentField, w: &WeightField, norm: f64) -> Vec<f64> {
    f.values()
        .iter()
        .zip(w.values())
        .zip(p.values())
        .map(|((f, w), p)| {
            let v = f.abs() * w;
            if v == 0.0 || !(norm > 0.0) {
                0.0
            } else {
                (v / norm).powf(*p)
            }
        })
        .collect()
}

/// `||Hf||_{q,w2} <= p_lo^{1/p_lo} c_pq d_p F ||f||_{p,w1}` (with `H*` for
/// `T8`), `F` the weight functional of the variant.
pub fn check_hardy_with(
    variant: Variant,
    f: &GridFunction,
    setup: &HardySetup,
    functional: &RhsWeightFunctional,
) -> Result<InequalityReport> {
    let HardySetup {
        p, q, w1, w2, tol, ..
    } = setup;
    let tol = *tol;
    check_nonnegative(f)?;
    let dir = match variant {
        Variant::T7 => Monotonicity::Increasing,
        _ => Monotonicity::Decreasing,
    };
    if let Some(i) = monotonicity_violation(f.values(), dir) {
        return Err(Error::Precondition(format!(
            "f must be {} for {variant}, fails at node {i}",
            match dir {
                Monotonicity::Decreasing => "nonincreasing",
                Monotonicity::Increasing => "nondecreasing",
            }
        )));
    }
    if !functional.is_finite() {
        return Err(Error::Precondition(format!(
            "weight functional of {variant} is infinite"
        )));
    }
    let constants = hardy_constants(p, q)?;
    let (hf, dual_fraction) = match variant {
        Variant::T8 => {
            let d = dual_hardy_apply(f)?;
            (d.values, d.outer_fraction)
        }
        _ => (hardy_apply(f)?, 0.0),
    };
    let lhs = norm_with_head(hf.grid(), &weighted(&hf, w2), q.values(), tol)?;
    let norm_f = norm_with_head(f.grid(), &weighted(f, w1), p.values(), tol)?;
    let rhs = if norm_f == 0.0 {
        0.0
    } else {
        constants.factor() * functional.value * norm_f
    };

    let lhs_outer = norm_outer_fraction(&hf, q, w2, lhs);
    let f_outer = norm_outer_fraction(f, p, w1, norm_f);
    let lhs_inner = {
        let integrand = norm_integrand(&hf, q, w2, lhs);
        crate::hardy::decade_fraction(hf.grid(), &integrand, hf.grid().inner_decade())
    };
    let outer = lhs_outer
        .max(f_outer)
        .max(functional.inner_outer_fraction)
        .max(functional.outer_fraction)
        .max(dual_fraction);

    let quad = quadrature_error(hf.grid().weights(), &norm_integrand(&hf, q, w2, lhs));
    let slack = verdict_slack(lhs, rhs, quad, tol);
    let mut report = InequalityReport::new(
        match variant {
            Variant::T6 => "hardy_T6",
            Variant::T7 => "hardy_T7",
            Variant::T8 => "hardy_T8",
        },
        Sense::AtMost,
        lhs,
        rhs,
        constants.factor(),
        slack,
        digest(&[f.values(), p.values(), q.values(), w1.values(), w2.values()]),
    )
    .with_extra("c_pq", constants.c_pq)
    .with_extra("d_p", constants.d_p)
    .with_extra("weight_functional", functional.value)
    .with_extra("norm_f", norm_f)
    .with_extra("sup_growth", functional.sup_growth)
    .with_extra("outer_decade_fraction", outer)
    .with_extra("inner_decade_fraction", lhs_inner)
    .with_extra("lhs_truncated", quasi_norm(&hf, q, w2, tol).unwrap_or(f64::INFINITY))
    .with_extra("norm_f_truncated", quasi_norm(f, p, w1, tol).unwrap_or(f64::INFINITY));
    if norm_f.is_infinite() {
        report.note = Some("f is not in the weighted space near 0, right side infinite".into());
    }
    if functional.sup_growth < -SUP_GROWTH {
        report.distrust_violation("sup part of the weight functional may be unbounded below the grid");
    }
    if outer > TRUNCATION_LIMIT {
        report.downgrade(&format!(
            "outermost decade carries {:.3}% of an integral",
            100.0 * outer
        ));
    }
    Ok(report)
}

pub fn check_hardy(variant: Variant, f: &GridFunction, setup: &HardySetup) -> Result<InequalityReport> {
    let functional = rhs_weight_functional(
        variant,
        f.grid(),
        &setup.w1,
        &setup.w2,
        &setup.p,
        &setup.q,
        setup.exponent_variant,
        setup.tol,
    )?;
    check_hardy_with(variant, f, setup, &functional)
}

/// Worst ratio `lhs / rhs` over the nodes of the pointwise bound
/// `(int_0^x f)^s <= s int_0^x f^s k(x, t) dt` with `k = t^{s-1}` for
/// nonincreasing `f` and `k = (x - t)^{s-1}` for nondecreasing `f`.
/// Values at most one mean the bound holds everywhere.
pub fn pointwise_bridge(f: &GridFunction, s: f64, dir: Monotonicity) -> Result<f64> {
    let grid = f.grid();
    check_half_line(grid)?;
    check_nonnegative(f)?;
    if monotonicity_violation(f.values(), dir).is_some() {
        return Err(Error::Precondition("f has the wrong monotonicity".into()));
    }
    let (x, v) = (grid.nodes(), f.values());
    let mut e = grid.edges().to_vec();
    e[0] = 0.0;
    let mut worst: f64 = 0.0;
    for i in 0..x.len() {
        let mut lhs = NeumaierSum::new();
        let mut rhs = NeumaierSum::new();
        for j in 0..=i {
            let (l, r) = (e[j], if j == i { x[i] } else { e[j + 1] });
            lhs.add(v[j] * (r - l));
            let k = match dir {
                Monotonicity::Decreasing => r.powf(s) - l.powf(s),
                Monotonicity::Increasing => (x[i] - l).powf(s) - (x[i] - r).powf(s),
            };
            if v[j] > 0.0 {
                rhs.add(v[j].powf(s) * k);
            }
        }
        let (l, r) = (lhs.value().powf(s), rhs.value());
        if l > 0.0 {
            worst = worst.max(l / r);
        }
    }
    Ok(worst)
}

/// Weight pairs `w1 = x^alpha`, `w2 = x^{beta + 1}` with constant `p` and
/// `q = 1/4` on `(0, 1)`, `1/2` after: true iff `beta < -2`, `beta != -4`
/// and `beta + 2 + 1/p' < alpha < min(1/p', beta + 4 + 1/p')` where
/// `p' = p / (p - 1)`. Exponents outside `(0, 1)` are rejected.
pub fn example42_admissible(alpha: f64, beta: f64, p: f64) -> bool {
    if !(p > 0.0 && p < 1.0) {
        return false;
    }
    let inv = (p - 1.0) / p;
    beta < -2.0 && beta != -4.0 && beta + 2.0 + inv < alpha && alpha < inv.min(beta + 4.0 + inv)
}

/// Exponent profile `q` of the weight-pair example.
pub const EXAMPLE42_Q: &str = "if(x < 1, 0.25, 0.5)";

/// `w1(x) = x^{1/p'} ||w2/x||_{L_q(x, inf)}` with `p' = p_lo / (p_lo - 1)`,
/// the weight that makes the `T6` integrand identically one.
pub fn example43_weight(
    grid: &Grid,
    p: &ExponentField,
    q: &ExponentField,
    w2: &WeightField,
    tol: f64,
) -> Result<WeightField> {
    check_half_line(grid)?;
    let pc = conjugate_of_lower(p);
    let x = grid.nodes();
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            inner_norm(Variant::T6, grid, k, w2.values(), q.values(), pc, tol, false)
                .map(|r| x[k].powf(1.0 / pc) * r.value)
        })
        .collect::<Result<_>>()?;
    WeightField::from_values(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;
    use crate::space::field::Regime;
    use crate::space::grid::{build_grid, Interval, Scheme};

    fn half_line(n: usize) -> Grid {
        build_grid(Interval::half_line(0.0).unwrap(), Scheme::Geometric, n, None).unwrap()
    }

    fn func(g: &Grid, s: &str) -> GridFunction {
        GridFunction::from_expr(g, &parse_expression(s).unwrap()).unwrap()
    }

    fn exponent(g: &Grid, s: &str) -> ExponentField {
        ExponentField::from_expr(&parse_expression(s).unwrap(), g, Regime::SubOne).unwrap()
    }

    fn weight(g: &Grid, s: &str) -> WeightField {
        WeightField::from_expr(&parse_expression(s).unwrap(), g).unwrap()
    }

    #[test]
    fn hardy_of_constant_is_constant() {
        let g = half_line(512);
        let h = hardy_apply(&func(&g, "1")).unwrap();
        assert!(h.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn hardy_of_indicator() {
        let g = build_grid(Interval::half_line(0.0).unwrap(), Scheme::Geometric, 1200, None).unwrap();
        let h = hardy_apply(&func(&g, "if(x < 1, 1, 0)")).unwrap();
        // the step function jumps at the edge after the last node below 1
        let cut = g.edges()[g.nodes().partition_point(|&x| x < 1.0)];
        for (x, v) in g.nodes().iter().zip(h.values()) {
            if *x < 1.0 {
                assert!((v - 1.0).abs() < 1e-12);
            } else if *x > cut {
                // the jump sits on the cell edge next to 1
                assert!((v - cut / x).abs() < 1e-12);
                assert!((v - 1.0 / x).abs() < 0.03 / x);
            }
        }
    }

    #[test]
    fn hardy_head_follows_power_law() {
        let g = half_line(512);
        let h = hardy_apply(&func(&g, "x")).unwrap();
        let x0 = g.nodes()[0];
        assert!((h.values()[0] / (x0 / 2.0) - 1.0).abs() < 0.05);
        assert!(hardy_apply(&func(&g, "1/x")).is_err());
    }

    #[test]
    fn t7_increasing_power_has_finite_sides() {
        let g = half_line(512);
        let setup = HardySetup {
            p: exponent(&g, "0.5"),
            q: exponent(&g, "0.5"),
            w1: weight(&g, "x^(-2)*(1+x)^(-2)"),
            w2: weight(&g, "x^(-2)*(1+x)^(-2)"),
            exponent_variant: ExponentVariant::Proof,
            tol: 1e-9,
        };
        let r = check_hardy(Variant::T7, &func(&g, "min(x, 1)"), &setup).unwrap();
        assert!(r.lhs.is_finite() && r.rhs.is_finite());
        assert!(r.holds(), "{r:?}");
    }

    #[test]
    fn hardy_dominates_decreasing() {
        let g = half_line(256);
        let f = func(&g, "1/(1 + x)");
        let h = hardy_apply(&f).unwrap();
        assert!(h.values().iter().zip(f.values()).all(|(h, f)| *h >= f * (1.0 - 1e-12)));
    }

    #[test]
    fn dual_hardy_cases() {
        let g = half_line(1200);
        let d = dual_hardy_apply(&func(&g, "if(x < 1, 1, 0)")).unwrap();
        let cut = g.edges()[g.cell_of(1.0)];
        for (x, v) in g.nodes().iter().zip(d.values.values()) {
            if *x < cut {
                assert!((v - (1.0 - x) / x).abs() < 0.03 / x);
            } else if *x > 1.0 {
                assert_eq!(*v, 0.0);
            }
        }
        assert!(!d.tail_dominant());
        let z = dual_hardy_apply(&func(&g, "0")).unwrap();
        assert!(z.values.is_zero());
        let d = dual_hardy_apply(&func(&g, "if(x < 1, 0, x^(-2))")).unwrap();
        for (x, v) in g.nodes().iter().zip(d.values.values()) {
            if *x > 2.0 && *x < 100.0 {
                assert!((v - x.powi(-2)).abs() < 1e-3 * x.powi(-2), "{x} {v}");
            }
        }
        let heavy = dual_hardy_apply(&func(&g, "1/(1 + x)")).unwrap();
        assert!(heavy.tail_dominant());
    }

    #[test]
    fn constants_constant_exponent() {
        let g = half_line(64);
        let p = exponent(&g, "0.5");
        let c = hardy_constants(&p, &p).unwrap();
        assert_eq!((c.chi_s1, c.chi_s2, c.chi_delta1, c.chi_delta2), (1.0, 0.0, 1.0, 0.0));
        assert_eq!(c.c_pq, 1.0);
        assert!((c.d_p - 4.0).abs() < 1e-12);
    }

    #[test]
    fn constants_from_components() {
        let c = HardyConstants::from_components(0.0, 1.0, 1.0, 0.0, 0.3, 0.3, 0.25, 0.5);
        assert!((c.spread_q - 0.6).abs() < 1e-12);
        assert!((c.c_pq - 1.6).abs() < 1e-12);
        let g = half_line(64);
        let p = exponent(&g, "0.2");
        let q = exponent(&g, EXAMPLE42_Q);
        let c = hardy_constants(&p, &q).unwrap();
        assert_eq!((c.chi_s1, c.chi_s2, c.chi_delta1, c.chi_delta2), (1.0, 0.0, 0.0, 1.0));
        assert!((c.c_pq - 1.4).abs() < 1e-12);
        assert!(hardy_constants(&exponent(&g, "0.3"), &q).is_err());
    }

    #[test]
    fn constants_increasing_exponent() {
        let g = half_line(64);
        let p = exponent(&g, "0.2 + 0.1*x/(1 + x)");
        let c = hardy_constants(&p, &exponent(&g, "0.9")).unwrap();
        assert_eq!((c.chi_s1, c.chi_s2), (1.0, 1.0));
        assert_eq!(s1_mask(&p).iter().filter(|&&b| b).count(), 1);
        assert!(s1_mask(&p)[0]);
    }

    #[test]
    fn functional_closed_form() {
        let g = half_line(2048);
        let p = exponent(&g, "0.5");
        let w = weight(&g, "x^(-2)");
        let r = rhs_weight_functional(Variant::T6, &g, &w, &w, &p, &p, ExponentVariant::Proof, 1e-8)
            .unwrap();
        assert!((r.value - 4.0).abs() < 1e-3, "{}", r.value);
        assert_eq!(r.norm_r, 0.0);
        // inner tail norms shrink with t
        assert!(r.inner.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    }

    #[test]
    fn hardy_t6_indicator_holds() {
        let g = half_line(1024);
        let p = exponent(&g, "0.5");
        let w = weight(&g, "x^(-2)");
        let setup = HardySetup {
            p: p.clone(),
            q: p,
            w1: w.clone(),
            w2: w,
            exponent_variant: ExponentVariant::Proof,
            tol: 1e-8,
        };
        let r = check_hardy(Variant::T6, &func(&g, "if(x < 1, 1, 0)"), &setup).unwrap();
        assert!(r.holds(), "{r:?}");
        assert!(r.extra("outer_decade_fraction").unwrap() < 0.01);
        let z = check_hardy(Variant::T6, &func(&g, "0"), &setup).unwrap();
        assert_eq!((z.lhs, z.rhs), (0.0, 0.0));
        assert!(z.holds());
        assert!(check_hardy(Variant::T7, &func(&g, "if(x < 1, 1, 0)"), &setup).is_err());
    }

    #[test]
    fn example43_makes_integrand_one() {
        let g = half_line(512);
        let p = exponent(&g, "0.3 + 0.2*x/(1 + x)");
        let q = exponent(&g, "0.6");
        let w2 = weight(&g, "x^(-2)");
        let w1 = example43_weight(&g, &p, &q, &w2, 1e-8).unwrap();
        let r = rhs_weight_functional(Variant::T6, &g, &w1, &w2, &p, &q, ExponentVariant::Proof, 1e-8)
            .unwrap();
        assert!(r.integrand.iter().all(|v| (v - 1.0).abs() < 1e-12));
        // outer value is ||1||_{L_r} over {p > p_lo} plus the sup part 1
        assert_eq!(r.sup_part, 1.0);
    }

    #[test]
    fn t8_head_norm_vanishes_before_support() {
        let g = half_line(256);
        let p = exponent(&g, "0.5");
        let w2 = weight(&g, "if(x < 1, 1, 1e-300)");
        let w1 = weight(&g, "1");
        let r = rhs_weight_functional(Variant::T8, &g, &w1, &w2, &p, &p, ExponentVariant::Proof, 1e-8)
            .unwrap();
        assert_eq!(r.inner[0], 0.0);
    }

    #[test]
    fn admissibility_region() {
        assert!(example42_admissible(-4.5, -3.0, 0.2));
        assert!(!example42_admissible(-4.5, -4.0, 0.2));
        assert!(!example42_admissible(-4.5, -1.0, 0.2));
        assert!(!example42_admissible(-3.5, -3.0, 0.2));
    }

    #[test]
    fn bridges_hold() {
        let g = half_line(256);
        let dec = func(&g, "1/(1 + x*x)");
        assert!(pointwise_bridge(&dec, 0.4, Monotonicity::Decreasing).unwrap() <= 1.0 + 1e-12);
        let inc = func(&g, "x/(1 + x)");
        assert!(pointwise_bridge(&inc, 0.4, Monotonicity::Increasing).unwrap() <= 1.0 + 1e-12);
    }
}
