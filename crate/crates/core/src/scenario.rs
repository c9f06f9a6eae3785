//! Line-based scenario files.
//!
//! ```text
//! # comment
//! [scenario s1]
//! kind = quasi_norm
//! domain = "0,1"
//! grid = uniform
//! points = 1024
//! p = "0.25 + 0.5*x"
//! omega = "1"
//! f = "2"
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::expr::{parse_expression, Expr};
use crate::hardy::{ExponentVariant, Variant};
use crate::inequalities::Monotonicity;
use crate::sequences::SeqMode;
use crate::space::grid::{Interval, Scheme};

/// Fewest grid points a scenario may ask for.
pub const MIN_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Modular,
    QuasiNorm,
    ConjugateNorm,
    ReverseMinkowski,
    ReverseHolder,
    Embedding,
    MixedNorm,
    MonotoneIntegral,
    Nonconvexity,
    DualTriviality,
    SequenceInequality,
    Example41,
    HardyT6,
    HardyT7,
    HardyT8,
    Example42,
}

impl Kind {
    pub const ALL: [Kind; 16] = [
        Kind::Modular,
        Kind::QuasiNorm,
        Kind::ConjugateNorm,
        Kind::ReverseMinkowski,
        Kind::ReverseHolder,
        Kind::Embedding,
        Kind::MixedNorm,
        Kind::MonotoneIntegral,
        Kind::Nonconvexity,
        Kind::DualTriviality,
        Kind::SequenceInequality,
        Kind::Example41,
        Kind::HardyT6,
        Kind::HardyT7,
        Kind::HardyT8,
        Kind::Example42,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Modular => "modular",
            Kind::QuasiNorm => "quasi_norm",
            Kind::ConjugateNorm => "conjugate_norm",
            Kind::ReverseMinkowski => "reverse_minkowski",
            Kind::ReverseHolder => "reverse_holder",
            Kind::Embedding => "embedding",
            Kind::MixedNorm => "mixed_norm",
            Kind::MonotoneIntegral => "monotone_integral",
            Kind::Nonconvexity => "nonconvexity",
            Kind::DualTriviality => "dual_triviality",
            Kind::SequenceInequality => "sequence_inequality",
            Kind::Example41 => "example41",
            Kind::HardyT6 => "hardy_T6",
            Kind::HardyT7 => "hardy_T7",
            Kind::HardyT8 => "hardy_T8",
            Kind::Example42 => "example42",
        }
    }

    pub fn hardy_variant(self) -> Option<Variant> {
        match self {
            Kind::HardyT6 => Some(Variant::T6),
            Kind::HardyT7 => Some(Variant::T7),
            Kind::HardyT8 => Some(Variant::T8),
            _ => None,
        }
    }

    /// Keys that must be present.
    pub fn required(self) -> &'static [&'static str] {
        match self {
            Kind::Modular | Kind::QuasiNorm => &["domain", "p", "f"],
            Kind::ConjugateNorm => &["domain", "p", "g"],
            Kind::ReverseMinkowski | Kind::ReverseHolder => &["domain", "p", "f", "g"],
            Kind::Embedding => &["domain", "p", "q", "f"],
            Kind::MixedNorm => &["domain", "domain2", "p", "q", "f"],
            Kind::MonotoneIntegral => &["domain", "f", "s", "direction"],
            Kind::Nonconvexity => &["domain", "p", "m", "epsilon"],
            Kind::DualTriviality => &["domain", "p", "f", "steps"],
            Kind::SequenceInequality => &["x", "p", "m"],
            Kind::Example41 => &["p_lo", "p", "terms"],
            Kind::HardyT6 | Kind::HardyT7 | Kind::HardyT8 => &["domain", "p", "q", "f"],
            Kind::Example42 => &["alpha", "beta", "p"],
        }
    }

    /// Keys that may be present besides the required ones.
    fn optional(self) -> &'static [&'static str] {
        const GRID: &[&str] = &["grid", "points", "truncation", "tol"];
        match self {
            Kind::Modular | Kind::QuasiNorm | Kind::ConjugateNorm => {
                &["grid", "points", "truncation", "tol", "omega"]
            }
            Kind::ReverseMinkowski | Kind::ReverseHolder | Kind::DualTriviality => {
                &["grid", "points", "truncation", "tol", "omega"]
            }
            Kind::Embedding => &["grid", "points", "truncation", "tol", "omega1", "omega2"],
            Kind::MixedNorm => &["grid", "points", "truncation", "tol", "points2"],
            Kind::MonotoneIntegral => GRID,
            Kind::Nonconvexity => &["omega", "radius", "tol"],
            Kind::SequenceInequality => &["p_lo", "mode"],
            Kind::Example41 => &[],
            Kind::HardyT6 | Kind::HardyT7 | Kind::HardyT8 => &[
                "grid",
                "points",
                "truncation",
                "tol",
                "omega1",
                "omega2",
                "exponent_variant",
            ],
            Kind::Example42 => &["domain", "grid", "points", "truncation", "tol", "a"],
        }
    }

    fn allows(self, key: &str) -> bool {
        key == "kind" || self.required().contains(&key) || self.optional().contains(&key)
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Scenario(format!("unknown kind `{s}`")))
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Every key any kind understands.
const KNOWN_KEYS: &[&str] = &[
    "kind",
    "domain",
    "domain2",
    "grid",
    "points",
    "points2",
    "truncation",
    "p",
    "q",
    "omega",
    "omega1",
    "omega2",
    "f",
    "g",
    "m",
    "epsilon",
    "radius",
    "steps",
    "s",
    "direction",
    "alpha",
    "beta",
    "a",
    "x",
    "p_lo",
    "mode",
    "terms",
    "tol",
    "exponent_variant",
];

/// Keys whose values are expressions.
const EXPR_KEYS: &[&str] = &["p", "q", "omega", "omega1", "omega2", "f", "g", "x"];

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Text(String),
    Tag(String),
}

impl Value {
    fn as_text(&self) -> String {
        match self {
            Value::Number(v) => format!("{v}"),
            Value::Text(s) | Value::Tag(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub kind: Kind,
    /// Line of the `[scenario ...]` header.
    pub line: usize,
    values: BTreeMap<String, Value>,
}

impl Scenario {
    fn err(&self, msg: impl fmt::Display) -> Error {
        Error::Scenario(format!("scenario {}: {msg}", self.id))
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&Value> {
        self.values.get(key)
    }

    fn text(&self, key: &str) -> Result<String> {
        self.values
            .get(key)
            .map(Value::as_text)
            .ok_or_else(|| self.err(format!("missing key {key}")))
    }

    /// Expression under `key`, or `default` when absent.
    pub fn expr_or(&self, key: &str, default: &str) -> Result<Expr> {
        let text = match self.values.get(key) {
            Some(v) => v.as_text(),
            None => default.to_string(),
        };
        parse_expression(&text).map_err(|e| self.err(format!("key {key}: {e}")))
    }

    pub fn expr(&self, key: &str) -> Result<Expr> {
        let text = self.text(key)?;
        parse_expression(&text).map_err(|e| self.err(format!("key {key}: {e}")))
    }

    pub fn number(&self, key: &str) -> Result<f64> {
        match self.values.get(key) {
            Some(Value::Number(v)) => Ok(*v),
            Some(other) => other
                .as_text()
                .trim()
                .parse()
                .map_err(|_| self.err(format!("key {key} must be a number"))),
            None => Err(self.err(format!("missing key {key}"))),
        }
    }

    pub fn number_or(&self, key: &str, default: f64) -> Result<f64> {
        if self.has(key) {
            self.number(key)
        } else {
            Ok(default)
        }
    }

    /// Positive integer under `key`.
    pub fn count(&self, key: &str) -> Result<usize> {
        let v = self.number(key)?;
        if !(v >= 1.0 && v.fract() == 0.0 && v <= 1e12) {
            return Err(self.err(format!("key {key} must be a positive integer, got {v}")));
        }
        Ok(v as usize)
    }

    pub fn count_or(&self, key: &str, default: usize) -> Result<usize> {
        if self.has(key) {
            self.count(key)
        } else {
            Ok(default)
        }
    }

    pub fn points(&self, key: &str) -> Result<usize> {
        let n = self.count_or(key, 1024)?;
        if n < MIN_POINTS {
            return Err(self.err(format!("key {key} must be at least {MIN_POINTS}, got {n}")));
        }
        Ok(n)
    }

    pub fn interval(&self, key: &str) -> Result<Interval> {
        self.text(key)?.parse().map_err(|e| self.err(format!("key {key}: {e}")))
    }

    pub fn scheme(&self) -> Result<Scheme> {
        match self.values.get("grid") {
            None => Ok(Scheme::Uniform),
            Some(v) => v.as_text().parse().map_err(|e| self.err(e)),
        }
    }

    pub fn truncation(&self) -> Result<Option<(f64, f64)>> {
        let Some(v) = self.values.get("truncation") else {
            return Ok(None);
        };
        let text = v.as_text();
        let parse = |s: &str| s.trim().parse::<f64>().ok();
        match text.split_once(',').map(|(a, b)| (parse(a), parse(b))) {
            Some((Some(a), Some(b))) => Ok(Some((a, b))),
            _ => Err(self.err(format!("truncation must be `x_min,x_max`, got `{text}`"))),
        }
    }

    /// Root tolerance: the scenario's own, else `default`.
    pub fn tol(&self, default: f64) -> Result<f64> {
        let tol = self.number_or("tol", default)?;
        if !(tol > 0.0 && tol <= 1e-4) {
            return Err(self.err(format!("tol must lie in (0, 1e-4], got {tol}")));
        }
        Ok(tol)
    }

    pub fn direction(&self) -> Result<Monotonicity> {
        self.text("direction")?.parse().map_err(|e| self.err(e))
    }

    pub fn mode(&self) -> Result<SeqMode> {
        match self.values.get("mode") {
            None => Ok(SeqMode::Finite),
            Some(v) => v.as_text().parse().map_err(|e| self.err(e)),
        }
    }

    pub fn exponent_variant(&self) -> Result<ExponentVariant> {
        match self.values.get("exponent_variant") {
            None => Ok(ExponentVariant::default()),
            Some(v) => v.as_text().parse().map_err(|e| self.err(e)),
        }
    }

    /// Checks everything that can be checked without a grid.
    fn validate(&self) -> Result<()> {
        for key in self.kind.required() {
            if !self.has(key) {
                return Err(self.err(format!("missing key {key} for kind {}", self.kind)));
            }
        }
        for key in self.values.keys() {
            if !self.kind.allows(key) {
                return Err(self.err(format!("key {key} does not apply to kind {}", self.kind)));
            }
        }
        for key in EXPR_KEYS {
            if self.has(key) && !(self.kind == Kind::Example42 && *key == "p") {
                self.expr(key)?;
            }
        }
        if self.kind == Kind::Example42 {
            self.number("p")?;
        }
        for key in ["domain", "domain2"] {
            if self.has(key) {
                self.interval(key)?;
            }
        }
        for key in ["points", "points2"] {
            if self.has(key) {
                self.points(key)?;
            }
        }
        for key in ["m", "steps", "terms"] {
            if self.has(key) {
                self.count(key)?;
            }
        }
        for key in ["epsilon", "radius", "s", "alpha", "beta", "a", "p_lo"] {
            if self.has(key) {
                self.number(key)?;
            }
        }
        if self.has("grid") {
            self.scheme()?;
        }
        self.truncation()?;
        if self.has("tol") {
            self.tol(1e-8)?;
        }
        if self.has("direction") {
            self.direction()?;
        }
        self.mode()?;
        self.exponent_variant()?;
        Ok(())
    }
}

fn parse_value(raw: &str) -> std::result::Result<Value, String> {
    let raw = raw.trim();
    if let Some(rest) = raw.strip_prefix('"') {
        return match rest.strip_suffix('"') {
            Some(inner) if !inner.contains('"') => Ok(Value::Text(inner.to_string())),
            _ => Err(format!("unterminated string `{raw}`")),
        };
    }
    if raw.is_empty() {
        return Err("empty value".into());
    }
    if let Ok(v) = raw.parse::<f64>() {
        return Ok(Value::Number(v));
    }
    if raw.chars().all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c)) {
        Ok(Value::Tag(raw.to_string()))
    } else {
        Err(format!("bare value `{raw}` must be quoted"))
    }
}

/// Drops a `#` comment that is not inside a quoted string.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

struct Pending {
    id: String,
    line: usize,
    values: BTreeMap<String, Value>,
}

impl Pending {
    fn finish(self) -> Result<Scenario> {
        let kind = match self.values.get("kind") {
            Some(v) => v.as_text().parse::<Kind>().map_err(|e| {
                Error::Scenario(format!("scenario {}: {e}", self.id))
            })?,
            None => {
                return Err(Error::Scenario(format!("scenario {}: missing key kind", self.id)))
            }
        };
        let s = Scenario {
            id: self.id,
            kind,
            line: self.line,
            values: self.values,
        };
        s.validate()?;
        Ok(s)
    }
}

pub fn parse_scenario_file(text: &str) -> Result<Vec<Scenario>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut current: Option<Pending> = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let at = |msg: String| Error::Scenario(format!("line {lineno}: {msg}"));
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('[') {
            let inner = header
                .strip_suffix(']')
                .ok_or_else(|| at(format!("malformed header `{line}`")))?;
            let id = match inner.split_whitespace().collect::<Vec<_>>().as_slice() {
                ["scenario", id] => id.to_string(),
                _ => return Err(at(format!("expected `[scenario <id>]`, got `{line}`"))),
            };
            if !seen.insert(id.clone()) {
                return Err(at(format!("duplicate scenario id {id}")));
            }
            if let Some(p) = current.take() {
                out.push(p.finish()?);
            }
            current = Some(Pending {
                id,
                line: lineno,
                values: BTreeMap::new(),
            });
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| at(format!("expected `key = value`, got `{line}`")))?;
        let key = key.trim();
        let pending = current
            .as_mut()
            .ok_or_else(|| at("key outside a [scenario] section".into()))?;
        if !KNOWN_KEYS.contains(&key) {
            return Err(at(format!("unknown key {key}")));
        }
        let value = parse_value(value).map_err(at)?;
        if pending.values.insert(key.to_string(), value).is_some() {
            return Err(at(format!("key {key} given twice")));
        }
    }
    if let Some(p) = current.take() {
        out.push(p.finish()?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = "[scenario s1]\nkind = quasi_norm\ndomain = \"0,1\"\ngrid = uniform\npoints = 1024\np = \"0.25 + 0.5*x\"\nomega = \"1\"\nf = \"2\"";

    #[test]
    fn parses_one_scenario() {
        let s = parse_scenario_file(BASIC).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].id, "s1");
        assert_eq!(s[0].kind, Kind::QuasiNorm);
        assert_eq!(s[0].points("points").unwrap(), 1024);
        assert_eq!(s[0].scheme().unwrap(), Scheme::Uniform);
    }

    #[test]
    fn missing_key() {
        let text = BASIC.replace("f = \"2\"", "");
        let err = parse_scenario_file(&text).unwrap_err().to_string();
        assert!(err.contains("missing key f"), "{err}");
        assert!(err.contains("quasi_norm"));
    }

    #[test]
    fn bad_points() {
        let text = BASIC.replace("points = 1024", "points = -5");
        assert!(parse_scenario_file(&text).is_err());
    }

    #[test]
    fn errors() {
        let dup = format!("{BASIC}\n{BASIC}");
        assert!(parse_scenario_file(&dup).unwrap_err().to_string().contains("duplicate"));
        let unknown = format!("{BASIC}\ncolour = red");
        assert!(parse_scenario_file(&unknown).unwrap_err().to_string().contains("unknown key colour"));
        let bad = BASIC.replace("0.25 + 0.5*x", "0.25 + *x");
        let err = parse_scenario_file(&bad).unwrap_err().to_string();
        assert!(err.contains("byte 7"), "{err}");
        let foreign = format!("{BASIC}\nbeta = 2");
        assert!(parse_scenario_file(&foreign).is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = format!("# header\n\n{}\n# trailing # comment", BASIC.replace("f = \"2\"", "f = \"2\"  # two"));
        assert_eq!(parse_scenario_file(&text).unwrap().len(), 1);
    }
}
