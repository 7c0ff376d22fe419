//! Recursive-descent reader for the textual expression format produced by
//! the plain renderer: `+ - * / ^`, parentheses, rationals, `I`, `x<k>`,
//! parameter names, `exp(..)`, `cos(..)`, `sin(..)` and opaque atoms `f(x4,x5)`.

use num_bigint::BigInt;

use super::{Expr, Frequency, OpaqueAtom, RatExpr};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Name under which vector-field basis symbols `d<k>` are carried as
/// parameters while parsing a field.
pub(crate) fn basis_param(k: usize) -> String {
    format!("\u{1}d{}", k)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    allow_basis: bool,
}

fn syntax(col: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { line: 0, col: col + 1, msg: msg.into() }
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(syntax(self.pos, format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<RatExpr> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatExpr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.unary()?;
            } else if self.peek() == Some(b'/') {
                let col = self.pos;
                self.pos += 1;
                let d = self.unary()?;
                acc = acc.div(&d).map_err(|_| syntax(col, "division by zero"))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RatExpr> {
        if self.eat(b'-') {
            return Ok(-&self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatExpr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let col = self.pos;
            let n = self.uint()?;
            let e: u32 = n.try_into().map_err(|_| syntax(col, "exponent too large"))?;
            let mut acc = RatExpr::one();
            for _ in 0..e {
                acc = &acc * &base;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn uint(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(syntax(start, "expected integer"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap().parse().unwrap())
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn linear_arg(&mut self, col: usize) -> Result<Frequency> {
        self.expect(b'(')?;
        let inner = self.expr()?;
        self.expect(b')')?;
        let e = inner.as_expr().ok_or_else(|| syntax(col, "exponent must be polynomial"))?.clone();
        Frequency::from_exponent(&e).map_err(|err| syntax(col, err.to_string()))
    }

    fn atom(&mut self) -> Result<RatExpr> {
        let col = self.pos;
        match self.peek() {
            None => Err(syntax(self.pos, "unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.uint()?;
                Ok(Expr::scalar(Scalar::real(Rational::from_integer(n))).into())
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.ident();
                if name == "I" {
                    return Ok(Expr::scalar(Scalar::i()).into());
                }
                if let Some(k) = index_of(&name, 'x') {
                    return Ok(Expr::coord(k - 1).into());
                }
                if let Some(k) = index_of(&name, 'd') {
                    if self.allow_basis {
                        return Ok(Expr::param(&basis_param(k)).into());
                    }
                }
                if self.peek() != Some(b'(') {
                    return Ok(Expr::param(&name).into());
                }
                match name.as_str() {
                    "exp" => Ok(Expr::exp(self.linear_arg(col)?).into()),
                    "cos" | "sin" => {
                        let arg = self.linear_arg(col)?;
                        let i = Scalar::i();
                        let plus = Expr::exp(scale_freq(&arg, &i));
                        let minus = Expr::exp(scale_freq(&arg, &-&i));
                        let half = Scalar::real(Rational::new(1.into(), 2.into()));
                        Ok(if name == "cos" {
                            (&plus + &minus).scale(&half)
                        } else {
                            (&plus - &minus).scale(&(&half / &i))
                        }
                        .into())
                    }
                    _ => {
                        self.pos += 1;
                        let mut deps = Vec::new();
                        if !self.eat(b')') {
                            loop {
                                self.skip_ws();
                                let c2 = self.pos;
                                let arg = self.ident();
                                let k = index_of(&arg, 'x')
                                    .ok_or_else(|| syntax(c2, "opaque atom arguments must be coordinates"))?;
                                deps.push(k - 1);
                                if self.eat(b')') {
                                    break;
                                }
                                self.expect(b',')?;
                            }
                        }
                        Ok(Expr::opaque(OpaqueAtom::new(name, deps)).into())
                    }
                }
            }
            Some(c) => Err(syntax(col, format!("unexpected character `{}`", c as char))),
        }
    }
}

fn scale_freq(f: &Frequency, s: &Scalar) -> Frequency {
    Frequency(f.0.iter().map(|(v, a)| (*v, a.scale(s))).collect())
}

fn index_of(name: &str, prefix: char) -> Option<usize> {
    let rest = name.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok().filter(|&k| k >= 1)
}

pub(crate) fn parse_with(src: &str, allow_basis: bool) -> Result<RatExpr> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, allow_basis };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(syntax(p.pos, "trailing input"));
    }
    Ok(e)
}

pub fn parse_rat_expr(src: &str) -> Result<RatExpr> {
    parse_with(src, false)
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    let q = parse_rat_expr(src)?;
    q.as_expr().cloned().ok_or_else(|| syntax(0, "expected a polynomial expression, found a quotient"))
}
