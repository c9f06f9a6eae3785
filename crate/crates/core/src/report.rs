use std::fmt;

use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Violated,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Direction of the checked inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    /// `lhs >= rhs`
    AtLeast,
    /// `lhs <= rhs`
    AtMost,
}

/// Verdict slack: `1e-6 + 1e-3 max(|lhs|, |rhs|) q` for a quadrature error
/// estimate `q`, plus `10 tol max(|lhs|, |rhs|)` for the root finder.
pub fn verdict_slack(lhs: f64, rhs: f64, quad_err: f64, tol: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if !scale.is_finite() {
        return 1e-6;
    }
    1e-6 + 1e-3 * scale * quad_err + 10.0 * tol * scale
}

/// `numerator / denominator` with the conventions `0/0 = inf/inf = 1` and `x/0 = inf`.
pub fn safe_ratio(numerator: f64, denominator: f64) -> f64 {
    if (numerator == 0.0 && denominator == 0.0) || (numerator.is_infinite() && denominator.is_infinite()) {
        1.0
    } else if denominator <= 0.0 && numerator > 0.0 {
        f64::INFINITY
    } else {
        numerator / denominator
    }
}

/// First 16 hex digits of the SHA-256 of the bit patterns of `parts`.
pub fn digest(parts: &[&[f64]]) -> String {
    let mut h = Sha256::new();
    for part in parts {
        h.update((part.len() as u64).to_le_bytes());
        for v in *part {
            h.update(v.to_bits().to_le_bytes());
        }
    }
    h.finalize()
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// One certified inequality instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub name: String,
    pub sense: Sense,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    /// `lhs / rhs` for `>=` checks and `rhs / lhs` for `<=` checks, so that a
    /// ratio of at least one means the inequality holds.
    pub ratio: f64,
    pub verdict: Verdict,
    pub slack: f64,
    pub digest: String,
    /// Named auxiliary quantities (constant parts, truncation fractions).
    pub extras: Vec<(String, f64)>,
    pub note: Option<String>,
}

impl InequalityReport {
    pub fn new(
        name: &str,
        sense: Sense,
        lhs: f64,
        rhs: f64,
        constant: f64,
        slack: f64,
        digest: String,
    ) -> Self {
        let (holds, ratio) = match sense {
            Sense::AtLeast => (lhs >= rhs - slack, safe_ratio(lhs, rhs)),
            Sense::AtMost => (lhs <= rhs + slack, safe_ratio(rhs, lhs)),
        };
        let verdict = if lhs.is_nan() || rhs.is_nan() {
            Verdict::Indeterminate
        } else if holds {
            Verdict::Holds
        } else {
            Verdict::Violated
        };
        InequalityReport {
            name: name.to_string(),
            sense,
            lhs,
            rhs,
            constant,
            ratio,
            verdict,
            slack,
            digest,
            extras: Vec::new(),
            note: None,
        }
    }

    pub fn with_extra(mut self, name: &str, value: f64) -> Self {
        self.extras.push((name.to_string(), value));
        self
    }

    /// Marks a `holds` verdict as indeterminate.
    pub fn downgrade(&mut self, reason: &str) {
        if self.verdict == Verdict::Holds {
            self.verdict = Verdict::Indeterminate;
        }
        self.note = Some(reason.to_string());
    }

    /// Turns a violation into indeterminate, for when `rhs` may be an
    /// underestimate.
    pub fn distrust_violation(&mut self, reason: &str) {
        if self.verdict == Verdict::Violated {
            self.verdict = Verdict::Indeterminate;
            self.note = Some(reason.to_string());
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn extra(&self, name: &str) -> Option<f64> {
        self.extras.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios() {
        assert_eq!(safe_ratio(0.0, 0.0), 1.0);
        assert_eq!(safe_ratio(1.0, 0.0), f64::INFINITY);
        assert_eq!(safe_ratio(1.0, 2.0), 0.5);
        assert_eq!(safe_ratio(f64::INFINITY, f64::INFINITY), 1.0);
    }

    #[test]
    fn verdicts() {
        let r = InequalityReport::new("x", Sense::AtMost, 1.0, 2.0, 1.0, 0.0, String::new());
        assert!(r.holds());
        assert_eq!(r.ratio, 2.0);
        let r = InequalityReport::new("x", Sense::AtLeast, 1.0, 2.0, 1.0, 0.0, String::new());
        assert_eq!(r.verdict, Verdict::Violated);
        let r = InequalityReport::new("x", Sense::AtLeast, 1.0, 1.0 + 1e-7, 1.0, 1e-6, String::new());
        assert!(r.holds());
        let mut r = InequalityReport::new("x", Sense::AtMost, 0.0, 0.0, 1.0, 0.0, String::new());
        assert_eq!(r.ratio, 1.0);
        r.downgrade("truncation");
        assert_eq!(r.verdict, Verdict::Indeterminate);
        let mut r = InequalityReport::new("x", Sense::AtMost, 2.0, 1.0, 1.0, 0.0, String::new());
        r.downgrade("truncation");
        assert_eq!(r.verdict, Verdict::Violated);
        r.distrust_violation("head");
        assert_eq!(r.verdict, Verdict::Indeterminate);
    }

    #[test]
    fn digest_is_stable() {
        let a = digest(&[&[1.0, 2.0]]);
        assert_eq!(a.len(), 16);
        assert_eq!(a, digest(&[&[1.0, 2.0]]));
        assert_ne!(a, digest(&[&[1.0], &[2.0]]));
    }
}
