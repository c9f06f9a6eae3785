//! The discrete inequality
//! `(sum x_n^{p_n/p_lo})^{p_lo} <= sum x_n^{p_n} [n^{p_n} - (n-1)^{p_n}] <= sum x_n^{p_n}`
//! and the counterexample showing that monotonicity of `x_n^{p_n}` matters.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::summation::NeumaierSum;

/// Nonincreasing exponent sequence `p_1 >= p_2 >= ...` with a lower bound
/// `0 < p_lo <= p_n <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentSeq {
    p: Vec<f64>,
    p_lo: f64,
}

impl ExponentSeq {
    pub fn new(p: Vec<f64>, p_lo: f64) -> Result<Self> {
        if !(p_lo > 0.0) {
            return Err(Error::Precondition(format!("p_lo must be positive, got {p_lo}")));
        }
        for (i, &v) in p.iter().enumerate() {
            if !(v >= p_lo && v <= 1.0) {
                return Err(Error::Precondition(format!(
                    "p_{} = {v} outside [{p_lo}, 1]",
                    i + 1
                )));
            }
            if i > 0 && v > p[i - 1] {
                return Err(Error::Precondition(format!(
                    "exponents increase at index {}",
                    i + 1
                )));
            }
        }
        Ok(ExponentSeq { p, p_lo })
    }

    /// `p_n = f(n)` for `n = 1..=m`.
    pub fn from_fn(m: usize, p_lo: f64, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new((1..=m).map(f).collect(), p_lo)
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    pub fn p_lo(&self) -> f64 {
        self.p_lo
    }

    pub fn p_hi(&self) -> f64 {
        self.p.first().copied().unwrap_or(self.p_lo)
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

/// Exponent used on the left: `p_m` for the finite form, `p_lo` for the
/// limit form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeqMode {
    Finite,
    Limit,
}

impl FromStr for SeqMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "finite" => Ok(SeqMode::Finite),
            "limit" => Ok(SeqMode::Limit),
            other => Err(Error::Scenario(format!("mode must be finite or limit, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceReport {
    pub m: usize,
    pub exponent: f64,
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
    pub left_holds: bool,
    pub right_holds: bool,
}

/// `n^p - (n-1)^p` without cancellation for large `n`.
pub fn power_increment(n: usize, p: f64) -> f64 {
    if n == 1 {
        return 1.0;
    }
    let n = n as f64;
    // n^p (1 - (1 - 1/n)^p)
    -n.powf(p) * (p * (-1.0 / n).ln_1p()).exp_m1()
}

/// Relative tolerance for the sequence verdicts.
pub const SEQ_REL_TOL: f64 = 1e-12;

pub fn check_sequence_inequality(x: &[f64], p: &ExponentSeq, mode: SeqMode) -> Result<SequenceReport> {
    if x.len() != p.len() {
        return Err(Error::LengthMismatch {
            expected: p.len(),
            found: x.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::Precondition("empty sequence".into()));
    }
    let pv = p.values();
    if let Some(i) = x.iter().position(|&v| !(v >= 0.0 && v.is_finite())) {
        return Err(Error::Precondition(format!("x_{} = {} is not a finite nonnegative number", i + 1, x[i])));
    }
    let powers: Vec<f64> = x.iter().zip(pv).map(|(x, p)| x.powf(*p)).collect();
    if let Some(i) = powers.windows(2).position(|w| w[1] > w[0]) {
        return Err(Error::Precondition(format!(
            "x_n^p_n increases at index {}",
            i + 2
        )));
    }
    let exponent = match mode {
        SeqMode::Finite => *pv.last().unwrap(),
        SeqMode::Limit => p.p_lo(),
    };
    let mut left = NeumaierSum::new();
    let mut mid = NeumaierSum::new();
    let mut right = NeumaierSum::new();
    for (i, (&xn, &pn)) in x.iter().zip(pv).enumerate() {
        left.add(xn.powf(pn / exponent));
        mid.add(powers[i] * power_increment(i + 1, pn));
        right.add(powers[i]);
    }
    let lhs = left.value().powf(exponent);
    let (mid, rhs) = (mid.value(), right.value());
    Ok(SequenceReport {
        m: x.len(),
        exponent,
        lhs,
        mid,
        rhs,
        left_holds: lhs <= mid * (1.0 + SEQ_REL_TOL),
        right_holds: mid <= rhs * (1.0 + SEQ_REL_TOL),
    })
}

/// Partial sums for the sequence `x_n = n^{-p_lo / (2 p_n)}` at squares
/// `n = k^2` and `0` elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Example41Evidence {
    pub terms: usize,
    /// `sum_{k^2 <= K} 1/k`
    pub harmonic: f64,
    /// `harmonic^{p_lo}`
    pub lhs: f64,
    /// `sum x_n^{p_n} [n^{p_n} - (n-1)^{p_n}]`
    pub rhs: f64,
    /// First `K` with `lhs > rhs`.
    pub first_exceed: Option<usize>,
    /// First `K` with `lhs >= 2 rhs`.
    pub first_double: Option<usize>,
}

impl Example41Evidence {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

/// Builds the counterexample sequence up to `K = terms` for exponents
/// `p_n = p(n)` and tracks both sides of the limit inequality.
pub fn example41_sequence(p_lo: f64, p: impl Fn(usize) -> f64, terms: usize) -> Result<Example41Evidence> {
    if terms == 0 {
        return Err(Error::Precondition("need at least one term".into()));
    }
    let p1 = p(1);
    let mut p_hi = p1;
    let mut prev = p1;
    let mut k = 1usize;
    let mut harmonic = NeumaierSum::new();
    let mut rhs = NeumaierSum::new();
    let mut first_exceed = None;
    let mut first_double = None;
    // exponents are validated at the squares, where they enter the sums
    while k * k <= terms {
        let n = k * k;
        let pn = p(n);
        if !(pn >= p_lo && pn <= 1.0) || pn > prev {
            return Err(Error::Precondition(format!(
                "p_{n} = {pn} breaks p_lo <= p_n <= 1 or monotonicity"
            )));
        }
        prev = pn;
        p_hi = p_hi.max(pn);
        if p_hi >= (p_lo + 1.0) / 2.0 {
            return Err(Error::Precondition(format!(
                "need p_hi < (p_lo + 1) / 2, got p_hi = {p_hi}, p_lo = {p_lo}"
            )));
        }
        harmonic.add(1.0 / k as f64);
        let xn = (n as f64).powf(-p_lo / (2.0 * pn));
        rhs.add(xn.powf(pn) * power_increment(n, pn));
        let lhs = harmonic.value().powf(p_lo);
        let r = rhs.value();
        if first_exceed.is_none() && lhs > r {
            first_exceed = Some(n);
        }
        if first_double.is_none() && lhs >= 2.0 * r {
            first_double = Some(n);
        }
        k += 1;
    }
    let harmonic = harmonic.value();
    Ok(Example41Evidence {
        terms,
        harmonic,
        lhs: harmonic.powf(p_lo),
        rhs: rhs.value(),
        first_exceed,
        first_double,
    })
}

/// The exponent profile `p_n = p_lo + (p_hi - p_lo) / n`.
pub fn decaying_profile(p_lo: f64, p_hi: f64) -> impl Fn(usize) -> f64 {
    move |n| p_lo + (p_hi - p_lo) / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_ones() {
        let p = ExponentSeq::new(vec![0.5, 0.5], 0.5).unwrap();
        let r = check_sequence_inequality(&[1.0, 1.0], &p, SeqMode::Finite).unwrap();
        let s2 = 2f64.sqrt();
        assert!((r.lhs - s2).abs() < 1e-15);
        assert!((r.mid - s2).abs() < 1e-15);
        assert_eq!(r.rhs, 2.0);
        assert!(r.left_holds && r.right_holds);
    }

    #[test]
    fn single_term_collapse() {
        let p = ExponentSeq::new(vec![0.7, 0.6, 0.5], 0.5).unwrap();
        let r = check_sequence_inequality(&[3.0, 0.0, 0.0], &p, SeqMode::Limit).unwrap();
        let c = 3f64.powf(0.7);
        assert!((r.lhs - c).abs() < 1e-14 && (r.mid - c).abs() < 1e-14 && (r.rhs - c).abs() < 1e-14);
    }

    #[test]
    fn hypotheses_are_enforced() {
        assert!(ExponentSeq::new(vec![0.5, 0.6], 0.5).is_err());
        assert!(ExponentSeq::new(vec![0.5, 0.3], 0.4).is_err());
        let p = ExponentSeq::new(vec![0.5, 0.5], 0.5).unwrap();
        let err = check_sequence_inequality(&[1.0, 2.0], &p, SeqMode::Finite).unwrap_err();
        assert!(err.to_string().contains("index 2"));
    }

    #[test]
    fn increments_telescope() {
        for p in [0.1, 0.5, 0.9] {
            let mut s = NeumaierSum::new();
            for n in 1..=1000 {
                s.add(power_increment(n, p));
            }
            let exact = 1000f64.powf(p);
            assert!((s.value() - exact).abs() / exact < 1e-12);
        }
    }

    #[test]
    fn counterexample_diverges() {
        let a = example41_sequence(0.4, decaying_profile(0.4, 0.6), 10_000).unwrap();
        // harmonic number H_100 = ln 100 + gamma + 1/200 - ...
        assert!((a.harmonic - 5.187_377_517_639_621).abs() < 1e-12);
        let b = example41_sequence(0.4, decaying_profile(0.4, 0.6), 1_000_000).unwrap();
        assert!(b.ratio() > a.ratio());
        assert!(b.first_exceed.is_some());
        assert!(example41_sequence(0.4, decaying_profile(0.4, 0.7), 100).is_err());
    }
}
