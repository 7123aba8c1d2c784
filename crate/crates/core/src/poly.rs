//! Sparse multivariate polynomials with real coefficients.
//!
//! A [`Polynomial`] maps [`Monomial`]s to `f64` coefficients and ranges over a
//! fixed number of variables. Text input uses the variables `x1..xn` (1-based);
//! internally every variable index is 0-based.
//!
//! Terms are kept in graded lexicographic order, so serialization is
//! deterministic: the leading (highest-degree, lex-largest) term comes first.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by polynomial construction and evaluation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("dimension mismatch: expected at least {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("problem member {what} ranges over {got} variables, expected {expected}")]
    NvarsMismatch {
        what: String,
        expected: usize,
        got: usize,
    },
    #[error("invalid problem file: {0}")]
    Format(String),
}

/// A product of variable powers. The empty monomial is the constant `1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    // sorted by variable index, every power >= 1
    powers: Vec<(usize, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(index: usize) -> Self {
        Self {
            powers: vec![(index, 1)],
        }
    }

    /// Builds a monomial from `(variable, power)` pairs. Zero powers are
    /// dropped and repeated variables are merged.
    pub fn from_powers<I: IntoIterator<Item = (usize, u32)>>(powers: I) -> Self {
        let mut map = BTreeMap::new();
        for (v, p) in powers {
            if p > 0 {
                *map.entry(v).or_insert(0u32) += p;
            }
        }
        Self {
            powers: map.into_iter().collect(),
        }
    }

    /// Builds a monomial from a multiset of variable indices, e.g. `[0, 0, 1]`
    /// is `x1^2*x2`.
    pub fn from_factors(factors: &[usize]) -> Self {
        Self::from_powers(factors.iter().map(|&v| (v, 1)))
    }

    pub fn powers(&self) -> &[(usize, u32)] {
        &self.powers
    }

    pub fn is_constant(&self) -> bool {
        self.powers.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.powers.iter().map(|&(_, p)| p).sum()
    }

    pub fn power_of(&self, var: usize) -> u32 {
        self.powers
            .iter()
            .find(|&&(v, _)| v == var)
            .map_or(0, |&(_, p)| p)
    }

    /// Largest variable index present, if any.
    pub fn max_var(&self) -> Option<usize> {
        self.powers.last().map(|&(v, _)| v)
    }

    /// The variable indices repeated by multiplicity, in ascending order.
    pub fn factors(&self) -> Vec<usize> {
        self.powers
            .iter()
            .flat_map(|&(v, p)| std::iter::repeat_n(v, p as usize))
            .collect()
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        self.powers
            .iter()
            .map(|&(v, p)| point[v].powi(p as i32))
            .product()
    }

    /// `d/dx_var` of the monomial as `(multiplier, monomial)`, or `None` when
    /// the variable does not occur.
    pub fn derivative(&self, var: usize) -> Option<(u32, Monomial)> {
        let pos = self.powers.iter().position(|&(v, _)| v == var)?;
        let mut powers = self.powers.clone();
        let p = powers[pos].1;
        if p == 1 {
            powers.remove(pos);
        } else {
            powers[pos].1 = p - 1;
        }
        Some((p, Monomial { powers }))
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::from_powers(self.powers.iter().chain(other.powers.iter()).copied())
    }

    fn write_text(&self, f: &mut impl fmt::Write, prefix: &str) -> fmt::Result {
        for (n, &(v, p)) in self.powers.iter().enumerate() {
            if n > 0 {
                f.write_char('*')?;
            }
            write!(f, "{prefix}{}", v + 1)?;
            if p > 1 {
                write!(f, "^{p}")?;
            }
        }
        Ok(())
    }
}

impl Ord for Monomial {
    /// Graded lexicographic order with `x1 > x2 > ... > xn`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let mut a = self.powers.iter();
            let mut b = other.powers.iter();
            loop {
                match (a.next(), b.next()) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Greater,
                    (None, Some(_)) => return Ordering::Less,
                    (Some(&(va, pa)), Some(&(vb, pb))) => {
                        if va != vb {
                            // the monomial holding the lower-indexed variable is larger
                            return vb.cmp(&va);
                        }
                        if pa != pb {
                            return pa.cmp(&pb);
                        }
                    }
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return f.write_str("1");
        }
        self.write_text(f, "x")
    }
}

/// A sparse polynomial in `nvars` real variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, value: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(), value);
        p
    }

    /// The polynomial `x_index` (0-based index).
    pub fn var(nvars: usize, index: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::var(index), 1.0);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, f64)>>(nvars: usize, terms: I) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Adds `coeff * monom`; a coefficient that cancels to exactly zero
    /// removes the term.
    ///
    /// Panics if the monomial references a variable `>= nvars`.
    pub fn add_term(&mut self, monom: Monomial, coeff: f64) {
        if let Some(v) = monom.max_var() {
            assert!(
                v < self.nvars,
                "variable index {v} out of range for a polynomial in {} variables",
                self.nvars
            );
        }
        if coeff == 0.0 {
            return;
        }
        let entry = self.terms.entry(monom);
        match entry {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = *e.get() + coeff;
                if sum == 0.0 {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn coefficient(&self, monom: &Monomial) -> f64 {
        self.terms.get(monom).copied().unwrap_or(0.0)
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, f64)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum total degree over the terms; 0 for constants and for zero.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn evaluate(&self, point: &[f64]) -> Result<f64, PolyError> {
        if point.len() < self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        Ok(self.terms.iter().map(|(m, &c)| c * m.eval(point)).sum())
    }

    pub fn partial_derivative(&self, var: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, &c) in &self.terms {
            if let Some((mult, dm)) = m.derivative(var) {
                out.add_term(dm, c * f64::from(mult));
            }
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Polynomial {
        Polynomial::from_terms(self.nvars, self.terms.iter().map(|(m, &c)| (m.clone(), c * factor)))
    }

    /// Re-declares the polynomial over `nvars` variables (must cover every
    /// variable in use).
    pub fn with_nvars(&self, nvars: usize) -> Polynomial {
        Polynomial::from_terms(nvars, self.terms.iter().map(|(m, &c)| (m.clone(), c)))
    }

    pub fn parse(text: &str, nvars: usize) -> Result<Polynomial, ParseError> {
        Parser::new(text, nvars, "x").parse()
    }

    /// Parses with a custom variable prefix, e.g. `"y"` for `y1*y2`.
    pub fn parse_with_prefix(text: &str, nvars: usize, prefix: &str) -> Result<Polynomial, ParseError> {
        Parser::new(text, nvars, prefix).parse()
    }

    /// Canonical text with a custom variable prefix.
    pub fn to_text(&self, prefix: &str) -> String {
        let mut out = String::new();
        if self.terms.is_empty() {
            out.push('0');
            return out;
        }
        for (n, (m, &c)) in self.terms.iter().rev().enumerate() {
            let mag = c.abs();
            if n == 0 {
                if c < 0.0 {
                    out.push('-');
                }
            } else if c < 0.0 {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            if m.is_constant() {
                out.push_str(&format_coeff(mag));
            } else {
                if mag != 1.0 {
                    out.push_str(&format_coeff(mag));
                    out.push('*');
                }
                // writing to a String cannot fail
                let _ = m.write_text(&mut out, prefix);
            }
        }
        out
    }
}

fn format_coeff(c: f64) -> String {
    if c == 0.0 || (1e-4..1e15).contains(&c) {
        format!("{c}")
    } else {
        format!("{c:e}")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text("x"))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.with_nvars(self.nvars.max(rhs.nvars));
        for (m, c) in rhs.terms() {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &rhs.scale(-1.0)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars.max(rhs.nvars));
        for (ma, ca) in self.terms() {
            for (mb, cb) in rhs.terms() {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

/// What went wrong while parsing polynomial text.
#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    InvalidNumber(String),
    NonPositiveExponent(i64),
    VariableOutOfRange { index: usize, nvars: usize },
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnexpectedChar(c) => write!(f, "unexpected character '{c}'"),
            Self::UnexpectedEnd => f.write_str("unexpected end of input"),
            Self::InvalidNumber(s) => write!(f, "invalid number '{s}'"),
            Self::NonPositiveExponent(p) => write!(f, "exponent must be a positive integer, got {p}"),
            Self::VariableOutOfRange { index, nvars } => {
                write!(f, "variable index {index} outside 1..={nvars}")
            }
        }
    }
}

/// A syntax or range error together with its byte offset in the input.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("parse error at position {position}: {kind}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
    nvars: usize,
    prefix: &'a str,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, nvars: usize, prefix: &'a str) -> Self {
        Self {
            text,
            bytes: text.as_bytes(),
            pos: 0,
            nvars,
            prefix,
        }
    }

    fn err<T>(&self, position: usize, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError { position, kind })
    }

    fn unexpected<T>(&self) -> Result<T, ParseError> {
        match self.text[self.pos..].chars().next() {
            Some(c) => self.err(self.pos, ParseErrorKind::UnexpectedChar(c)),
            None => self.err(self.pos, ParseErrorKind::UnexpectedEnd),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<Polynomial, ParseError> {
        let mut poly = Polynomial::zero(self.nvars);
        self.skip_ws();
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1.0
            }
            Some(b'+') => {
                self.pos += 1;
                1.0
            }
            _ => 1.0,
        };
        loop {
            self.skip_ws();
            let (coeff, monom) = self.term()?;
            poly.add_term(monom, sign * coeff);
            self.skip_ws();
            match self.peek() {
                None => return Ok(poly),
                Some(b'+') => sign = 1.0,
                Some(b'-') => sign = -1.0,
                Some(_) => return self.unexpected(),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<(f64, Monomial), ParseError> {
        let mut coeff = 1.0;
        let mut factors = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(c) if c.is_ascii_digit() || c == b'.' => coeff *= self.number()?,
                Some(_) if self.text[self.pos..].starts_with(self.prefix) => {
                    factors.push(self.variable()?);
                }
                _ => return self.unexpected(),
            }
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                return Ok((coeff, Monomial::from_powers(factors)));
            }
        }
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.pos - start
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let start = self.pos;
        let mut n = self.digits();
        if self.peek() == Some(b'.') {
            self.pos += 1;
            n += self.digits();
        }
        if n == 0 {
            return self.err(start, ParseErrorKind::InvalidNumber(self.text[start..self.pos].into()));
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                return self.err(start, ParseErrorKind::InvalidNumber(self.text[start..self.pos].into()));
            }
        }
        let s = &self.text[start..self.pos];
        s.parse::<f64>()
            .map_err(|_| ParseError {
                position: start,
                kind: ParseErrorKind::InvalidNumber(s.into()),
            })
    }

    fn variable(&mut self) -> Result<(usize, u32), ParseError> {
        let start = self.pos;
        self.pos += self.prefix.len();
        let dstart = self.pos;
        if self.digits() == 0 {
            return self.unexpected();
        }
        let index: usize = self.text[dstart..self.pos]
            .parse()
            .map_err(|_| ParseError {
                position: dstart,
                kind: ParseErrorKind::VariableOutOfRange {
                    index: usize::MAX,
                    nvars: self.nvars,
                },
            })?;
        if index == 0 || index > self.nvars {
            return self.err(start, ParseErrorKind::VariableOutOfRange { index, nvars: self.nvars });
        }
        let mut power = 1u32;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let pstart = self.pos;
            let negative = self.peek() == Some(b'-');
            if negative {
                self.pos += 1;
            }
            if self.digits() == 0 {
                return self.unexpected();
            }
            let raw: i64 = self.text[pstart..self.pos].parse().map_err(|_| ParseError {
                position: pstart,
                kind: ParseErrorKind::InvalidNumber(self.text[pstart..self.pos].into()),
            })?;
            if raw <= 0 {
                return self.err(pstart, ParseErrorKind::NonPositiveExponent(raw));
            }
            power = u32::try_from(raw).map_err(|_| ParseError {
                position: pstart,
                kind: ParseErrorKind::InvalidNumber(raw.to_string()),
            })?;
        }
        Ok((index - 1, power))
    }
}

/// `min f(x)` subject to `g_i(x) <= 0` and `h_i(x) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PopProblem {
    pub nvars: usize,
    pub objective: Polynomial,
    /// Each entry means `g(x) <= 0`.
    pub inequalities: Vec<Polynomial>,
    /// Each entry means `h(x) = 0`.
    pub equalities: Vec<Polynomial>,
}

/// On-disk JSON layout of a [`PopProblem`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PopJson {
    pub nvars: usize,
    pub objective: String,
    #[serde(default)]
    pub ineq: Vec<String>,
    #[serde(default)]
    pub eq: Vec<String>,
}

impl PopProblem {
    pub fn new(
        objective: Polynomial,
        inequalities: Vec<Polynomial>,
        equalities: Vec<Polynomial>,
    ) -> Result<Self, PolyError> {
        let nvars = objective.nvars();
        let check = |what: String, p: &Polynomial| {
            if p.nvars() != nvars {
                Err(PolyError::NvarsMismatch {
                    what,
                    expected: nvars,
                    got: p.nvars(),
                })
            } else {
                Ok(())
            }
        };
        for (i, g) in inequalities.iter().enumerate() {
            check(format!("ineq[{i}]"), g)?;
        }
        for (i, h) in equalities.iter().enumerate() {
            check(format!("eq[{i}]"), h)?;
        }
        Ok(Self {
            nvars,
            objective,
            inequalities,
            equalities,
        })
    }

    pub fn unconstrained(objective: Polynomial) -> Self {
        Self {
            nvars: objective.nvars(),
            objective,
            inequalities: Vec::new(),
            equalities: Vec::new(),
        }
    }

    /// Largest degree among the objective and constraints.
    pub fn degree(&self) -> u32 {
        std::iter::once(&self.objective)
            .chain(&self.inequalities)
            .chain(&self.equalities)
            .map(Polynomial::degree)
            .max()
            .unwrap_or(0)
    }

    /// Maximum violation `max(max g_i(x)_+, max |h_i(x)|)`.
    pub fn violation(&self, x: &[f64]) -> Result<f64, PolyError> {
        let mut worst = 0.0f64;
        for g in &self.inequalities {
            worst = worst.max(g.evaluate(x)?.max(0.0));
        }
        for h in &self.equalities {
            worst = worst.max(h.evaluate(x)?.abs());
        }
        Ok(worst)
    }

    pub fn from_json_value(doc: &PopJson) -> Result<Self, PolyError> {
        let parse = |s: &String| Polynomial::parse(s, doc.nvars);
        let objective = parse(&doc.objective)?;
        let ineq = doc.ineq.iter().map(parse).collect::<Result<Vec<_>, _>>()?;
        let eq = doc.eq.iter().map(parse).collect::<Result<Vec<_>, _>>()?;
        Self::new(objective, ineq, eq)
    }

    pub fn from_json(text: &str) -> Result<Self, PolyError> {
        let doc: PopJson = serde_json::from_str(text).map_err(|e| PolyError::Format(e.to_string()))?;
        Self::from_json_value(&doc)
    }

    pub fn to_json_value(&self) -> PopJson {
        PopJson {
            nvars: self.nvars,
            objective: self.objective.to_string(),
            ineq: self.inequalities.iter().map(ToString::to_string).collect(),
            eq: self.equalities.iter().map(ToString::to_string).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        // PopJson holds only strings and integers
        serde_json::to_string_pretty(&self.to_json_value()).expect("POP serializes")
    }

    /// Parses the line-oriented text format:
    ///
    /// ```text
    /// # comment
    /// nvars: 2
    /// min: x1^2*x2
    /// ineq: x1 - 3
    /// eq: x1 + x2 - 1
    /// ```
    ///
    /// Parse errors report byte positions relative to the whole input.
    pub fn parse_text(text: &str) -> Result<Self, PolyError> {
        let mut nvars = None;
        let mut objective = None;
        let mut ineq = Vec::new();
        let mut eq = Vec::new();
        let mut offset = 0usize;
        for line in text.split_inclusive('\n') {
            let line_start = offset;
            offset += line.len();
            let body = line.split('#').next().unwrap_or("");
            if body.trim().is_empty() {
                continue;
            }
            let Some(colon) = body.find(':') else {
                return Err(PolyError::Parse(ParseError {
                    position: line_start,
                    kind: ParseErrorKind::UnexpectedChar(body.trim_start().chars().next().unwrap_or(' ')),
                }));
            };
            let key = body[..colon].trim();
            let value = &body[colon + 1..];
            let value_start = line_start + colon + 1;
            let shift = |e: ParseError| ParseError {
                position: e.position + value_start,
                kind: e.kind,
            };
            match key {
                "nvars" => {
                    let n = value.trim().parse::<usize>().map_err(|_| ParseError {
                        position: value_start,
                        kind: ParseErrorKind::InvalidNumber(value.trim().into()),
                    })?;
                    nvars = Some(n);
                }
                "min" | "ineq" | "eq" => {
                    let n = nvars.ok_or_else(|| PolyError::Format("`nvars:` must precede polynomials".into()))?;
                    let p = Polynomial::parse(value, n).map_err(shift)?;
                    match key {
                        "min" => objective = Some(p),
                        "ineq" => ineq.push(p),
                        _ => eq.push(p),
                    }
                }
                other => return Err(PolyError::Format(format!("unknown key `{other}`"))),
            }
        }
        let objective = objective.ok_or_else(|| PolyError::Format("missing `min:` line".into()))?;
        Self::new(objective, ineq, eq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(text: &str, n: usize) -> Polynomial {
        Polynomial::parse(text, n).unwrap()
    }

    #[test]
    fn parses_cubic_example() {
        let poly = p("x1^2*x2", 2);
        assert_eq!(poly.num_terms(), 1);
        assert_eq!(poly.coefficient(&Monomial::from_factors(&[0, 0, 1])), 1.0);
        assert_eq!(poly.degree(), 3);
    }

    #[test]
    fn zero_and_cancellation() {
        assert!(p("0", 3).is_zero());
        assert!(p("2*x1 - x1 - x1", 1).is_zero());
        assert_eq!(p("0", 3).degree(), 0);
        assert_eq!(p("0", 3).to_string(), "0");
    }

    #[test]
    fn evaluation() {
        assert_eq!(p("x1^2*x2", 2).evaluate(&[2.0, 3.0]).unwrap(), 12.0);
        assert_eq!(p("5", 2).evaluate(&[-1.0, 9.0]).unwrap(), 5.0);
        assert_eq!(p("x2*x3 + x1 - 10", 3).evaluate(&[1.0, 3.0, 3.0]).unwrap(), 0.0);
        assert_eq!(
            p("x1*x2", 2).evaluate(&[1.0]),
            Err(PolyError::DimensionMismatch { expected: 2, got: 1 })
        );
    }

    #[test]
    fn degrees() {
        assert_eq!(p("x1^2*x2", 2).degree(), 3);
        assert_eq!(p("x2*x3 + x1", 3).degree(), 2);
        assert_eq!(p("7", 1).degree(), 0);
    }

    #[test]
    fn parse_errors_carry_position() {
        let e = Polynomial::parse("x1 + * x2", 2).unwrap_err();
        assert_eq!(e.position, 5);
        assert_eq!(e.kind, ParseErrorKind::UnexpectedChar('*'));

        let e = Polynomial::parse("x1^0", 2).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonPositiveExponent(0));
        assert_eq!(e.position, 3);

        let e = Polynomial::parse("x1^-2", 2).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonPositiveExponent(-2));

        let e = Polynomial::parse("x1 + x3", 2).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::VariableOutOfRange { index: 3, nvars: 2 });
        assert_eq!(e.position, 5);

        let e = Polynomial::parse("x0", 2).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::VariableOutOfRange { index: 0, nvars: 2 });

        let e = Polynomial::parse("x1 +", 2).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnexpectedEnd);

        assert!(Polynomial::parse("", 2).is_err());
        assert!(Polynomial::parse("x1 x2", 2).is_err());
    }

    #[test]
    fn grammar_variants() {
        let a = p(" -1.5e1 * x1 ^ 2 + x2*3 - .5 ", 2);
        assert_eq!(a.coefficient(&Monomial::from_factors(&[0, 0])), -15.0);
        assert_eq!(a.coefficient(&Monomial::var(1)), 3.0);
        assert_eq!(a.coefficient(&Monomial::one()), -0.5);
        let b = Polynomial::parse_with_prefix("y1*y2^3", 2, "y").unwrap();
        assert_eq!(b.degree(), 4);
    }

    #[test]
    fn serialization_is_grlex() {
        let poly = p("3 + x2 + x1 - x1*x2 + x1^2 + 2*x2^2*x1", 2);
        assert_eq!(poly.to_string(), "2*x1*x2^2 + x1^2 - x1*x2 + x1 + x2 + 3");
        assert_eq!(p("-x1", 1).to_string(), "-x1");
        assert_eq!(p("1e-7*x1", 1).to_string(), "1e-7*x1");
    }

    #[test]
    fn derivative_and_product() {
        let f = p("x1^3*x2 + 2*x2", 2);
        assert_eq!(f.partial_derivative(0), p("3*x1^2*x2", 2));
        assert_eq!(f.partial_derivative(1), p("x1^3 + 2", 2));
        let g = &p("x1 + x2", 2) * &p("x1 - x2", 2);
        assert_eq!(g, p("x1^2 - x2^2", 2));
    }

    #[test]
    fn text_problem_format() {
        let pop = PopProblem::parse_text("# example\nnvars: 3\nmin: x1^2 + x3\nineq: x1 - 1\neq: x2*x3 + x1 - 10\n").unwrap();
        assert_eq!(pop.nvars, 3);
        assert_eq!(pop.inequalities.len(), 1);
        assert_eq!(pop.equalities.len(), 1);
        let err = PopProblem::parse_text("nvars: 2\nmin: x1 +* x2\n").unwrap_err();
        match err {
            PolyError::Parse(e) => assert_eq!(e.position, 9 + 9),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_problem_round_trip() {
        let json = r#"{ "nvars": 3, "objective": "x1^2*x2^2 + x3", "ineq": [], "eq": ["x2*x3 + x1 - 10"] }"#;
        let pop = PopProblem::from_json(json).unwrap();
        let back = PopProblem::from_json(&pop.to_json()).unwrap();
        assert_eq!(pop, back);
        assert!(PopProblem::from_json(r#"{"nvars": 1, "objective": "x2"}"#).is_err());
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        let term = (
            proptest::collection::vec((0usize..4, 0u32..4), 0..4),
            prop_oneof![-100.0..100.0f64, Just(1.0), Just(-1.0), 1e-9..1e-6f64],
        );
        proptest::collection::vec(term, 0..8).prop_map(|terms| {
            Polynomial::from_terms(4, terms.into_iter().map(|(pw, c)| (Monomial::from_powers(pw), c)))
        })
    }

    proptest! {
        #[test]
        fn parse_serialize_round_trip(poly in arb_poly()) {
            let back = Polynomial::parse(&poly.to_string(), 4).unwrap();
            prop_assert_eq!(back, poly);
        }

        #[test]
        fn evaluation_is_linear(
            a in -10.0..10.0f64, b in -10.0..10.0f64,
            f in arb_poly(), g in arb_poly(),
            x in proptest::collection::vec(-3.0..3.0f64, 4),
        ) {
            let combo = &f.scale(a) + &g.scale(b);
            let lhs = combo.evaluate(&x).unwrap();
            let rhs = a * f.evaluate(&x).unwrap() + b * g.evaluate(&x).unwrap();
            let scale: f64 = f.terms().chain(g.terms())
                .map(|(m, c)| (c * m.eval(&x)).abs()).sum::<f64>() * (a.abs() + b.abs()) + 1.0;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "{} vs {}", lhs, rhs);
        }

        #[test]
        fn add_then_remove_term(poly in arb_poly(), pw in proptest::collection::vec((0usize..4, 1u32..3), 1..3), c in 0.5..5.0f64) {
            let m = Monomial::from_powers(pw);
            prop_assume!(poly.coefficient(&m) == 0.0);
            let mut q = poly.clone();
            q.add_term(m.clone(), c);
            prop_assert_eq!(q.coefficient(&m), c);
            q.add_term(m, -c);
            prop_assert_eq!(q, poly);
        }
    }
}
