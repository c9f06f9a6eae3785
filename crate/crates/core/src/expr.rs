//! Expression mini-language used by scenario files to describe exponents,
//! weights and test functions.
//!
//! Grammar (whitespace is ignored between tokens):
//!
//! ```text
//! expr    := term { ("+" | "-") term }
//! term    := unary { ("*" | "/") unary }
//! unary   := "-" unary | power
//! power   := primary [ "^" unary ]
//! primary := NUMBER | "x" | "t" | IDENT "(" args ")" | "(" expr ")"
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-2^2`
//! is `-(2^2)`. The first argument of `if` is a comparison `expr REL expr`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Abs,
    Pow,
    Min,
    Max,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "abs" => Func::Abs,
            "pow" => Func::Pow,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Pow => "pow",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Exp | Func::Log | Func::Abs => 1,
            Func::Pow | Func::Min | Func::Max => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

impl Rel {
    fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Gt => ">",
            Rel::Ge => ">=",
            Rel::Eq => "==",
        }
    }

    fn holds(self, a: f64, b: f64) -> bool {
        match self {
            Rel::Lt => a < b,
            Rel::Le => a <= b,
            Rel::Gt => a > b,
            Rel::Ge => a >= b,
            Rel::Eq => a == b,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cond {
    pub lhs: Expr,
    pub rel: Rel,
    pub rhs: Expr,
}

/// Parsed expression tree. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    T,
    Neg(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        func: Func,
        args: Vec<Expr>,
    },
    If {
        cond: Box<Cond>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: expected {expected}, found {found}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("log of non-positive argument {0}")]
    LogDomain(f64),
    #[error("zero raised to negative power {0}")]
    ZeroToNegative(f64),
    #[error("negative base {base} raised to non-integer power {exponent}")]
    PowDomain { base: f64, exponent: f64 },
    #[error("variable t is not bound")]
    UnboundT,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Rel(Rel),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Rel(r) => format!("`{}`", r.symbol()),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'<' | b'>' | b'=' => {
                let next_eq = bytes.get(i + 1) == Some(&b'=');
                let rel = match (c, next_eq) {
                    (b'<', true) => Rel::Le,
                    (b'<', false) => Rel::Lt,
                    (b'>', true) => Rel::Ge,
                    (b'>', false) => Rel::Gt,
                    (b'=', true) => Rel::Eq,
                    _ => {
                        return Err(ParseError {
                            offset: i,
                            expected: "`==`".into(),
                            found: "`=`".into(),
                        })
                    }
                };
                if next_eq {
                    i += 1;
                }
                Tok::Rel(rel)
            }
            b'0'..=b'9' | b'.' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j < bytes.len() && bytes[j] == b'.' {
                    j += 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let lit = &text[i..j];
                let value = lit.parse::<f64>().map_err(|_| ParseError {
                    offset: i,
                    expected: "number".into(),
                    found: format!("`{lit}`"),
                })?;
                out.push((start, Tok::Num(value)));
                i = j;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                out.push((start, Tok::Ident(text[i..j].to_string())));
                i = j;
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: i,
                    expected: "token".into(),
                    found: format!("`{ch}`"),
                });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((text.len(), Tok::Eof));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError {
            offset: self.offset(),
            expected: expected.to_string(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::Binary {
                op: BinOp::Pow,
                lhs: Box::new(base),
                rhs: Box::new(exponent),
            });
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "x" => Ok(Expr::X),
                    "t" => Ok(Expr::T),
                    "if" => self.if_call(),
                    _ => match Func::from_name(&name) {
                        Some(func) => self.call(func, offset),
                        None => Err(ParseError {
                            offset,
                            expected: "`x`, `t` or a known function".into(),
                            found: format!("identifier `{name}`"),
                        }),
                    },
                }
            }
            _ => Err(self.error("expression")),
        }
    }

    fn call(&mut self, func: Func, offset: usize) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = vec![self.expr()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.expr()?);
        }
        self.expect(Tok::RParen, "`)` or `,`")?;
        if args.len() != func.arity() {
            return Err(ParseError {
                offset,
                expected: format!("{} argument(s) to {}", func.arity(), func.name()),
                found: format!("{} argument(s)", args.len()),
            });
        }
        Ok(Expr::Call { func, args })
    }

    fn if_call(&mut self) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let lhs = self.expr()?;
        let rel = match self.peek() {
            Tok::Rel(r) => *r,
            _ => return Err(self.error("comparison operator")),
        };
        self.bump();
        let rhs = self.expr()?;
        self.expect(Tok::Comma, "`,`")?;
        let then = self.expr()?;
        self.expect(Tok::Comma, "`,`")?;
        let otherwise = self.expr()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(Expr::If {
            cond: Box::new(Cond { lhs, rel, rhs }),
            then: Box::new(then),
            otherwise: Box::new(otherwise),
        })
    }
}

/// Parses `text` into an expression tree.
pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser { toks, pos: 0 };
    if *parser.peek() == Tok::Eof {
        return Err(parser.error("expression"));
    }
    let e = parser.expr()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.error("operator or end of input"));
    }
    Ok(e)
}

/// Evaluates `e` at `x` (and `t` when the expression uses the second axis).
pub fn evaluate(e: &Expr, x: f64, t: Option<f64>) -> Result<f64, EvalError> {
    e.eval(x, t)
}

fn checked_pow(base: f64, exponent: f64) -> Result<f64, EvalError> {
    if base == 0.0 && exponent < 0.0 {
        return Err(EvalError::ZeroToNegative(exponent));
    }
    if base < 0.0 && exponent.fract() != 0.0 && exponent.is_finite() {
        return Err(EvalError::PowDomain { base, exponent });
    }
    Ok(base.powf(exponent))
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        parse_expression(text)
    }

    pub fn eval(&self, x: f64, t: Option<f64>) -> Result<f64, EvalError> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::X => Ok(x),
            Expr::T => t.ok_or(EvalError::UnboundT),
            Expr::Neg(inner) => Ok(-inner.eval(x, t)?),
            Expr::Binary { op, lhs, rhs } => {
                let a = lhs.eval(x, t)?;
                let b = rhs.eval(x, t)?;
                match op {
                    BinOp::Add => Ok(a + b),
                    BinOp::Sub => Ok(a - b),
                    BinOp::Mul => Ok(a * b),
                    BinOp::Div => Ok(a / b),
                    BinOp::Pow => checked_pow(a, b),
                }
            }
            Expr::Call { func, args } => {
                let a = args[0].eval(x, t)?;
                match func {
                    Func::Exp => Ok(a.exp()),
                    Func::Log => {
                        if a > 0.0 {
                            Ok(a.ln())
                        } else {
                            Err(EvalError::LogDomain(a))
                        }
                    }
                    Func::Abs => Ok(a.abs()),
                    Func::Pow => checked_pow(a, args[1].eval(x, t)?),
                    Func::Min => Ok(a.min(args[1].eval(x, t)?)),
                    Func::Max => Ok(a.max(args[1].eval(x, t)?)),
                }
            }
            Expr::If {
                cond,
                then,
                otherwise,
            } => {
                let a = cond.lhs.eval(x, t)?;
                let b = cond.rhs.eval(x, t)?;
                if cond.rel.holds(a, b) {
                    then.eval(x, t)
                } else {
                    otherwise.eval(x, t)
                }
            }
        }
    }

    /// True when the expression references the second-axis variable `t`.
    pub fn uses_t(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::X => false,
            Expr::T => true,
            Expr::Neg(inner) => inner.uses_t(),
            Expr::Binary { lhs, rhs, .. } => lhs.uses_t() || rhs.uses_t(),
            Expr::Call { args, .. } => args.iter().any(Expr::uses_t),
            Expr::If {
                cond,
                then,
                otherwise,
            } => {
                cond.lhs.uses_t() || cond.rhs.uses_t() || then.uses_t() || otherwise.uses_t()
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::X => f.write_str("x"),
            Expr::T => f.write_str("t"),
            Expr::Neg(inner) => write!(f, "(-{inner})"),
            Expr::Binary { op, lhs, rhs } => write!(f, "({lhs} {} {rhs})", op.symbol()),
            Expr::Call { func, args } => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Expr::If {
                cond,
                then,
                otherwise,
            } => write!(
                f,
                "if({} {} {}, {then}, {otherwise})",
                cond.lhs,
                cond.rel.symbol(),
                cond.rhs
            ),
        }
    }
}
