//! A small grammar for frequency sets.
//!
//! ```text
//! spec  := term (("u" | "∪") term)* bound?
//! term  := [a] "Z" [("+" | "-") b]  |  "{" r ("," r)* "}"
//! bound := "|" ("λ" | "l" | "lambda") "|" ("<=" | "≤" | "<") K
//! ```
//!
//! `a > 0`, `b`, `r` and `K` are exact rationals (`3`, `1/4`, `0.25`). A
//! progression needs a bound to be finite; explicit lists do not.

use std::fmt;

use num::{BigRational, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, to_f64};

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    /// `step·ℤ + offset`.
    Progression { step: BigRational, offset: BigRational },
    Finite(Vec<BigRational>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bound {
    pub value: BigRational,
    pub strict: bool,
}

impl Bound {
    fn admits(&self, x: &BigRational) -> bool {
        let a = x.abs();
        if self.strict {
            a < self.value
        } else {
            a <= self.value
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSpec {
    pub terms: Vec<Term>,
    pub bound: Option<Bound>,
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, word: &str) -> bool {
        self.skip_ws();
        let w: Vec<char> = word.chars().collect();
        if self.chars[self.pos..].starts_with(&w) {
            self.pos += w.len();
            true
        } else {
            false
        }
    }

    fn rational(&mut self) -> Result<BigRational> {
        self.skip_ws();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_digit() || matches!(c, '.' | '/' | '-' | '+'))
        {
            if self.pos > start && matches!(self.chars[self.pos], '-' | '+') {
                break;
            }
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match parse_rational(&text) {
            Some(r) => Ok(r),
            None => {
                self.pos = start;
                self.err(if text.is_empty() { "expected a number".to_string() } else { format!("bad number {text:?}") })
            }
        }
    }

    fn is_z(c: Option<char>) -> bool {
        matches!(c, Some('Z' | 'ℤ'))
    }

    fn term(&mut self) -> Result<Term> {
        if self.eat('{') {
            let mut values = vec![self.rational()?];
            while self.eat(',') {
                values.push(self.rational()?);
            }
            if !self.eat('}') {
                return self.err("expected '}'");
            }
            return Ok(Term::Finite(values));
        }
        let step = if Self::is_z(self.peek()) {
            BigRational::from_integer(1.into())
        } else {
            let at = self.pos;
            let a = self.rational()?;
            if !a.is_positive() {
                self.pos = at;
                return self.err("progression step must be positive");
            }
            a
        };
        if !Self::is_z(self.peek()) {
            return self.err("expected 'Z'");
        }
        self.pos += 1;
        let offset = if self.eat('+') {
            self.rational()?
        } else if self.eat('-') {
            -self.rational()?
        } else {
            BigRational::zero()
        };
        Ok(Term::Progression { step, offset })
    }

    fn bound(&mut self) -> Result<Bound> {
        if !(self.eat_word("lambda") || self.eat_word("λ") || self.eat_word("l")) {
            return self.err("expected 'λ' inside |…|");
        }
        if !self.eat('|') {
            return self.err("expected '|'");
        }
        let strict = if self.eat_word("<=") || self.eat_word("≤") {
            false
        } else if self.eat('<') {
            true
        } else {
            return self.err("expected '<=' or '<'");
        };
        let at = self.pos;
        let value = self.rational()?;
        if value.is_negative() {
            self.pos = at;
            return self.err("bound must be nonnegative");
        }
        Ok(Bound { value, strict })
    }

    fn spec(&mut self) -> Result<SpectrumSpec> {
        if self.peek().is_none() {
            return self.err("empty spectrum spec");
        }
        let mut terms = vec![self.term()?];
        while let Some('u' | 'U' | '∪') = self.peek() {
            self.pos += 1;
            terms.push(self.term()?);
        }
        let bound = if self.eat('|') { Some(self.bound()?) } else { None };
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        Ok(SpectrumSpec { terms, bound })
    }
}

impl SpectrumSpec {
    pub fn parse(text: &str) -> Result<Self> {
        Parser { chars: text.chars().collect(), pos: 0 }.spec()
    }

    /// Replaces the truncation bound with `|λ| ≤ k`.
    pub fn with_bound(mut self, k: BigRational) -> Self {
        self.bound = Some(Bound { value: k, strict: false });
        self
    }

    pub fn expand_exact(&self) -> Result<Vec<BigRational>> {
        let mut out = Vec::new();
        for term in &self.terms {
            match term {
                Term::Finite(values) => {
                    out.extend(values.iter().filter(|v| self.bound.as_ref().is_none_or(|b| b.admits(v))).cloned());
                }
                Term::Progression { step, offset } => {
                    let Some(bound) = &self.bound else {
                        return Err(Error::Spec("a progression needs a bound such as |λ|<=K".into()));
                    };
                    let lo = ((-&bound.value - offset) / step).ceil().to_integer();
                    let hi = ((&bound.value - offset) / step).floor().to_integer();
                    let mut k = lo;
                    while k <= hi {
                        let v = step * BigRational::from_integer(k.clone()) + offset;
                        if bound.admits(&v) {
                            out.push(v);
                        }
                        k += 1;
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        if out.is_empty() {
            return Err(Error::EmptyExpansion);
        }
        Ok(out)
    }

    pub fn expand(&self) -> Result<Vec<f64>> {
        Ok(self.expand_exact()?.iter().map(to_f64).collect())
    }
}

impl fmt::Display for SpectrumSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, term) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " u ")?;
            }
            match term {
                Term::Progression { step, offset } => {
                    write!(f, "{}Z", format_rational(step))?;
                    if offset.is_negative() {
                        write!(f, "-{}", format_rational(&-offset))?;
                    } else if !offset.is_zero() {
                        write!(f, "+{}", format_rational(offset))?;
                    }
                }
                Term::Finite(values) => {
                    let parts: Vec<String> = values.iter().map(format_rational).collect();
                    write!(f, "{{{}}}", parts.join(","))?;
                }
            }
        }
        if let Some(b) = &self.bound {
            write!(f, " |λ|{}{}", if b.strict { "<" } else { "<=" }, format_rational(&b.value))?;
        }
        Ok(())
    }
}

/// Parses and expands a spectrum spec to a sorted list of distinct
/// frequencies.
pub fn parse_spectrum(text: &str) -> Result<Vec<f64>> {
    SpectrumSpec::parse(text)?.expand()
}
