use std::f64::consts::{E, PI};
use std::fmt;

use thiserror::Error;

use super::{Expr, UnaryOp};
use crate::expr::BinaryOp;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SyntaxErrorKind {
    UnbalancedParenthesis,
    UnknownIdentifier(String),
    EmptyOperand,
    UnexpectedCharacter(char),
    NonConstantExponent,
    InvalidNumber,
    EmptyInput,
}

impl fmt::Display for SyntaxErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntaxErrorKind::UnbalancedParenthesis => write!(f, "unbalanced parenthesis"),
            SyntaxErrorKind::UnknownIdentifier(s) => write!(f, "unknown identifier `{s}`"),
            SyntaxErrorKind::EmptyOperand => write!(f, "missing operand"),
            SyntaxErrorKind::UnexpectedCharacter(c) => write!(f, "unexpected character `{c}`"),
            SyntaxErrorKind::NonConstantExponent => {
                write!(f, "exponent must not depend on t (use exp/log)")
            }
            SyntaxErrorKind::InvalidNumber => write!(f, "invalid number"),
            SyntaxErrorKind::EmptyInput => write!(f, "empty expression"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: {kind}")]
pub struct SyntaxError {
    pub offset: usize,
    pub kind: SyntaxErrorKind,
}

/// Parse an expression in `t`.
///
/// Grammar, loosest to tightest: `+ -`, `* /`, unary minus, `^` (right
/// associative, constant exponent), then numbers, `t`, `pi`, `e`,
/// parentheses and calls `sin cos tan exp log sqrt`. Implicit
/// multiplication is not accepted.
pub fn parse(source: &str) -> Result<Expr, SyntaxError> {
    Parser::new(source, 0).parse_all()
}

/// Split at top-level occurrences of `sep` and parse every piece.
///
/// Used for the `x(t),y(t),z(t)` curve format (`sep = ','`) and for
/// `k(t);tau(t)` profiles (`sep = ';'`). Error offsets refer to `source`.
pub fn parse_list(source: &str, sep: char) -> Result<Vec<Expr>, SyntaxError> {
    let mut depth: i64 = 0;
    let mut start = 0;
    let mut out = Vec::new();
    for (i, ch) in source.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(Parser::new(&source[start..i], start).parse_all()?);
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    out.push(Parser::new(&source[start..], start).parse_all()?);
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    base: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, base: usize) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
            base,
        }
    }

    fn err(&self, offset: usize, kind: SyntaxErrorKind) -> SyntaxError {
        SyntaxError {
            offset: self.base + offset,
            kind,
        }
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

    fn parse_all(mut self) -> Result<Expr, SyntaxError> {
        if self.peek().is_none() {
            return Err(self.err(self.pos, SyntaxErrorKind::EmptyInput));
        }
        let e = self.expr()?;
        match self.peek() {
            None => Ok(e),
            Some(b')') => Err(self.err(self.pos, SyntaxErrorKind::UnbalancedParenthesis)),
            Some(c) => Err(self.err(self.pos, SyntaxErrorKind::UnexpectedCharacter(c as char))),
        }
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == b'+' { BinaryOp::Add } else { BinaryOp::Sub };
            lhs = Expr::Binary(op, Arc::new(lhs), Arc::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == b'*' { BinaryOp::Mul } else { BinaryOp::Div };
            lhs = Expr::Binary(op, Arc::new(lhs), Arc::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                let inner = self.unary()?;
                Ok(Expr::Unary(UnaryOp::Neg, Arc::new(inner)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let at = {
                self.skip_ws();
                self.pos
            };
            let exponent = self.unary()?;
            if exponent.depends_on_t() {
                return Err(self.err(at, SyntaxErrorKind::NonConstantExponent));
            }
            let p = exponent
                .eval(0.0)
                .map_err(|_| self.err(at, SyntaxErrorKind::InvalidNumber))?;
            return Ok(Expr::Pow(Arc::new(base), p));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, SyntaxError> {
        let start = match self.peek() {
            None => return Err(self.err(self.pos, SyntaxErrorKind::EmptyOperand)),
            Some(_) => self.pos,
        };
        let c = self.src[start];
        if c == b'(' {
            self.pos += 1;
            let inner = self.expr()?;
            if self.peek() != Some(b')') {
                return Err(self.err(start, SyntaxErrorKind::UnbalancedParenthesis));
            }
            self.pos += 1;
            return Ok(inner);
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
            if let Some(op) = UnaryOp::from_name(name) {
                if self.peek() != Some(b'(') {
                    return Err(self.err(self.pos, SyntaxErrorKind::UnexpectedCharacter(
                        self.src.get(self.pos).map(|&b| b as char).unwrap_or(' '),
                    )));
                }
                let open = self.pos;
                self.pos += 1;
                let arg = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err(open, SyntaxErrorKind::UnbalancedParenthesis));
                }
                self.pos += 1;
                return Ok(Expr::Unary(op, Arc::new(arg)));
            }
            return match name {
                "t" => Ok(Expr::Var),
                "pi" => Ok(Expr::Const(PI)),
                "e" => Ok(Expr::Const(E)),
                _ => Err(self.err(start, SyntaxErrorKind::UnknownIdentifier(name.to_string()))),
            };
        }
        if c == b')' {
            return Err(self.err(start, SyntaxErrorKind::EmptyOperand));
        }
        match c {
            b'+' | b'-' | b'*' | b'/' | b'^' | b',' | b';' => {
                Err(self.err(start, SyntaxErrorKind::EmptyOperand))
            }
            _ => Err(self.err(start, SyntaxErrorKind::UnexpectedCharacter(c as char))),
        }
    }

    fn number(&mut self) -> Result<Expr, SyntaxError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(self.err(start, SyntaxErrorKind::InvalidNumber));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                // `2e` is not an exponent; leave `e` for the caller to reject.
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        text.parse::<f64>()
            .map(Expr::Const)
            .map_err(|_| self.err(start, SyntaxErrorKind::InvalidNumber))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kind_at(s: &str) -> (usize, SyntaxErrorKind) {
        let e = parse(s).unwrap_err();
        (e.offset, e.kind)
    }

    #[test]
    fn unfinished_call_reports_end_offset() {
        assert_eq!(kind_at("cos("), (4, SyntaxErrorKind::EmptyOperand));
    }

    #[test]
    fn syntax_errors() {
        assert_eq!(kind_at("(t+1").1, SyntaxErrorKind::UnbalancedParenthesis);
        assert_eq!(kind_at("t+1)").0, 3);
        assert_eq!(
            kind_at("2*foo"),
            (2, SyntaxErrorKind::UnknownIdentifier("foo".into()))
        );
        assert_eq!(kind_at("t+").1, SyntaxErrorKind::EmptyOperand);
        assert_eq!(kind_at("t*/2").0, 2);
        assert_eq!(kind_at("t^t").1, SyntaxErrorKind::NonConstantExponent);
        assert_eq!(kind_at("2t").1, SyntaxErrorKind::UnexpectedCharacter('t'));
        assert_eq!(kind_at("  ").1, SyntaxErrorKind::EmptyInput);
    }

    #[test]
    fn precedence_and_associativity() {
        let ev = |s: &str, t: f64| parse(s).unwrap().eval(t).unwrap();
        assert_eq!(ev("-t^2", 3.0), -9.0);
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("8/4/2", 0.0), 1.0);
        assert_eq!(ev("1-2-3", 0.0), -4.0);
        assert_eq!(ev("2*3+4*5", 0.0), 26.0);
        assert_eq!(ev("t^-1", 4.0), 0.25);
        assert_eq!(ev("1.5e2 + 2E-1", 0.0), 150.2);
        assert!((ev("pi", 0.0) - std::f64::consts::PI).abs() < 1e-16);
    }

    #[test]
    fn torus_knot_coordinate() {
        let e = parse("(1+0.15*cos(5*t))*cos(t)").unwrap();
        let t = 0.4f64;
        let v = (1.0 + 0.15 * (5.0 * t).cos()) * t.cos();
        assert_eq!(e.eval(t).unwrap(), v);
    }

    #[test]
    fn list_splitting_respects_parentheses() {
        let v = parse_list("cos(t), sin(t) , t/2", ',').unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v[2].eval(4.0).unwrap(), 2.0);
        let err = parse_list("t, sin(, t", ',').unwrap_err();
        assert_eq!(err.offset, 7);
        assert_eq!(parse_list("t^(-0.5);t^(-0.5)", ';').unwrap().len(), 2);
    }
}
