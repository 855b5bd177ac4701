//! Text format for polynomials.
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' posint)*
//! atom   := integer | 't' | 'x' posint | '(' expr ')'
//! ```
//!
//! `t` denotes the generator of an extension field. Whitespace is ignored.

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement};
use crate::poly::{Monomial, Polynomial};

// Parsed expressions are built over a provisional variable count and
// re-declared once the maximum index is known.
struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: &'a Field,
    n: usize,
    max_var: usize,
}

impl<'a> Parser<'a> {
    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> Result<&'a [u8]> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected a number");
        }
        Ok(&self.src[start..self.pos])
    }

    fn posint(&mut self) -> Result<u32> {
        let start = self.pos;
        let digits = self.digits()?;
        let text = std::str::from_utf8(digits).expect("ascii");
        match text.parse::<u32>() {
            Ok(v) if v >= 1 => Ok(v),
            _ => Err(Error::Syntax { pos: start, msg: format!("expected a positive integer, got {text}") }),
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = if self.peek() == Some(b'-') {
            self.pos += 1;
            self.term()?.neg()
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let mut base = self.atom()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.posint()?;
            base = base.pow(e);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.error("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'x') => {
                self.pos += 1;
                let index = self.posint()? as usize;
                if index > self.n {
                    return Err(Error::UnknownVariable { index, n: self.n });
                }
                self.max_var = self.max_var.max(index);
                Ok(Polynomial::var(self.field, self.n, index - 1))
            }
            Some(b't') => {
                let Some(g) = self.field.generator() else {
                    return Err(Error::FieldMismatch);
                };
                self.pos += 1;
                Ok(Polynomial::constant(self.field, self.n, g))
            }
            Some(c) if c.is_ascii_digit() => {
                let p = self.field.p() as u64;
                let value = self.digits()?.iter().fold(0u64, |acc, &d| (acc * 10 + (d - b'0') as u64) % p);
                Ok(Polynomial::constant(self.field, self.n, FieldElement(value as u32)))
            }
            Some(c) => self.error(format!("unexpected character '{}'", c as char)),
            None => self.error("unexpected end of input"),
        }
    }
}

// Provisional width used when `n` is inferred.
const INFER_WIDTH: usize = 1 << 16;

/// Parses one polynomial. With `n = None` the variable count is the largest index used.
pub fn parse(text: &str, field: &Field, n: Option<usize>) -> Result<Polynomial> {
    let mut parser = Parser { src: text.as_bytes(), pos: 0, field, n: n.unwrap_or(INFER_WIDTH), max_var: 0 };
    let poly = parser.expr()?;
    if parser.peek().is_some() {
        return parser.error("trailing input");
    }
    Ok(match n {
        Some(_) => poly,
        None => poly.with_n(parser.max_var),
    })
}

/// Parses a file body: one polynomial per line, `#` comments and blank lines skipped.
/// All members share the largest variable count (or `n` when given).
pub fn parse_lines(text: &str, field: &Field, n: Option<usize>) -> Result<Vec<Polynomial>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let poly = parse(trimmed, field, n).map_err(|e| match e {
            Error::Syntax { pos, msg } => Error::Syntax { pos, msg: format!("line {}: {msg}", lineno + 1) },
            other => other,
        })?;
        out.push(poly);
    }
    let width = out.iter().map(Polynomial::n).max().unwrap_or(0).max(n.unwrap_or(0));
    Ok(out.into_iter().map(|p| p.with_n(width)).collect())
}

/// Parses a field element written as a decimal integer or a polynomial in `t`.
pub fn parse_element(text: &str, field: &Field) -> Result<FieldElement> {
    let poly = parse(text, field, Some(0))?;
    Ok(poly.coefficient(&Monomial::one()))
}
