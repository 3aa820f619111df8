//! Expression trees for user-defined profile functions and a recursive
//! descent parser for them.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | base ('^' exponent)?
//! base   := literal | 't' | ident | '(' expr ')' | ('exp' | 'log') '(' expr ')'
//! ```
//!
//! Powers must have constant exponents. The exponent position accepts a
//! literal, a parameter name, a leading sign and parentheses; whatever is
//! written there is folded to a number at parse time using the binding map,
//! so the stored tree always carries a literal exponent.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::jet::Jet;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(f64),
    /// The profile variable `t`.
    Var,
    Param(String),
    Neg(Box<Expr>),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Base raised to a constant exponent.
    Pow(Box<Expr>, f64),
}

impl Expr {
    /// Evaluates the tree as a jet at `t`, with parameters taken from `params`.
    pub fn eval_jet(&self, t: f64, order: usize, params: &BTreeMap<String, f64>) -> Result<Jet> {
        let j = self.eval_inner(t, order, params)?;
        j.ensure_finite(t)
    }

    fn eval_inner(&self, t: f64, order: usize, params: &BTreeMap<String, f64>) -> Result<Jet> {
        Ok(match self {
            Expr::Lit(v) => Jet::constant(*v, order),
            Expr::Var => Jet::variable(t, order),
            Expr::Param(name) => {
                let v = params
                    .get(name)
                    .ok_or_else(|| Error::UnboundParameter(name.clone()))?;
                Jet::constant(*v, order)
            }
            Expr::Neg(a) => a.eval_inner(t, order, params)?.neg(),
            Expr::Exp(a) => a.eval_inner(t, order, params)?.exp(),
            Expr::Log(a) => {
                let j = a.eval_inner(t, order, params)?;
                if j.value() <= 0.0 {
                    return Err(Error::Domain(format!(
                        "log of non-positive value {} at t = {t}",
                        j.value()
                    )));
                }
                j.ln()
            }
            Expr::Add(a, b) => a
                .eval_inner(t, order, params)?
                .add(&b.eval_inner(t, order, params)?),
            Expr::Sub(a, b) => a
                .eval_inner(t, order, params)?
                .sub(&b.eval_inner(t, order, params)?),
            Expr::Mul(a, b) => a
                .eval_inner(t, order, params)?
                .mul(&b.eval_inner(t, order, params)?),
            Expr::Div(a, b) => {
                let den = b.eval_inner(t, order, params)?;
                if den.value() == 0.0 {
                    return Err(Error::Domain(format!("division by zero at t = {t}")));
                }
                a.eval_inner(t, order, params)?.div(&den)
            }
            Expr::Pow(a, p) => {
                let base = a.eval_inner(t, order, params)?;
                if *p == p.trunc() && p.abs() <= 16.0 {
                    base.powi(*p as i64)
                } else if base.value() > 0.0 {
                    base.powf(*p)
                } else {
                    return Err(Error::Domain(format!(
                        "non-integer power of non-positive base {} at t = {t}",
                        base.value()
                    )));
                }
            }
        })
    }

    /// Collects every parameter name referenced by the tree.
    pub fn parameters(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_params(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_params(&self, out: &mut Vec<String>) {
        match self {
            Expr::Param(n) => out.push(n.clone()),
            Expr::Neg(a) | Expr::Exp(a) | Expr::Log(a) | Expr::Pow(a, _) => a.collect_params(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
            Expr::Lit(_) | Expr::Var => {}
        }
    }

    /// Prints the tree in a form that parses back to the same structure.
    pub fn to_source(&self) -> String {
        match self {
            Expr::Lit(v) => format_literal(*v),
            Expr::Var => "t".to_string(),
            Expr::Param(n) => n.clone(),
            Expr::Neg(a) => format!("-({})", a.to_source()),
            Expr::Exp(a) => format!("exp({})", a.to_source()),
            Expr::Log(a) => format!("log({})", a.to_source()),
            Expr::Add(a, b) => format!("({} + {})", a.to_source(), b.to_source()),
            Expr::Sub(a, b) => format!("({} - {})", a.to_source(), b.to_source()),
            Expr::Mul(a, b) => format!("({} * {})", a.to_source(), b.to_source()),
            Expr::Div(a, b) => format!("({} / {})", a.to_source(), b.to_source()),
            Expr::Pow(a, p) => format!("({})^({})", a.to_source(), format_literal(*p)),
        }
    }
}

fn format_literal(v: f64) -> String {
    // `{}` prints the shortest representation that round-trips through parse.
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}

/// Parses `source` against the parameter binding map.
///
/// Every identifier must resolve in `params` (the variable `t` and the
/// function names `exp`/`log` are reserved).
pub fn parse(source: &str, params: &BTreeMap<String, f64>) -> Result<Expr> {
    let mut p = Parser {
        src: source.as_bytes(),
        pos: 0,
        params,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.syntax_error(&["operator", "end of input"]));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    params: &'a BTreeMap<String, f64>,
}

impl<'a> Parser<'a> {
    fn syntax_error(&self, expected: &[&str]) -> Error {
        Error::Syntax {
            offset: self.pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat(b'-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                acc = Expr::Div(Box::new(acc), Box::new(self.factor()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if self.eat(b'^') {
            let at = self.pos;
            let p = self.exponent()?;
            if !p.is_finite() {
                return Err(Error::InvalidExponent { offset: at });
            }
            return Ok(Expr::Pow(Box::new(base), p));
        }
        Ok(base)
    }

    /// Exponents fold to a constant: literal, parameter, sign, parentheses.
    fn exponent(&mut self) -> Result<f64> {
        if self.eat(b'-') {
            return Ok(-self.exponent()?);
        }
        if self.eat(b'+') {
            return Ok(self.exponent()?);
        }
        if self.eat(b'(') {
            let v = self.exponent()?;
            if !self.eat(b')') {
                return Err(self.syntax_error(&[")"]));
            }
            return Ok(v);
        }
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' => self.literal(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let at = self.pos;
                let name = self.ident();
                if name == "t" || name == "exp" || name == "log" {
                    return Err(Error::InvalidExponent { offset: at });
                }
                self.params
                    .get(&name)
                    .copied()
                    .ok_or(Error::UnboundParameter(name))
            }
            _ => Err(self.syntax_error(&["literal", "parameter", "(", "-"])),
        }
    }

    fn base(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax_error(&[")"]));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Expr::Lit(self.literal()?)),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let name = self.ident();
                match name.as_str() {
                    "t" => {
                        self.skip_ws();
                        Ok(Expr::Var)
                    }
                    "exp" | "log" => {
                        self.skip_ws();
                        if !self.eat(b'(') {
                            return Err(self.syntax_error(&["("]));
                        }
                        let arg = self.expr()?;
                        if !self.eat(b')') {
                            return Err(self.syntax_error(&[")"]));
                        }
                        Ok(if name == "exp" {
                            Expr::Exp(Box::new(arg))
                        } else {
                            Expr::Log(Box::new(arg))
                        })
                    }
                    _ => {
                        self.skip_ws();
                        if !self.params.contains_key(&name) {
                            return Err(Error::UnboundParameter(name));
                        }
                        Ok(Expr::Param(name))
                    }
                }
            }
            _ => Err(self.syntax_error(&["literal", "t", "parameter", "(", "exp", "log", "-"])),
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self
            .peek()
            .map(|c| c.is_ascii_alphanumeric() || c == b'_')
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn literal(&mut self) -> Result<f64> {
        let start = self.pos;
        while self
            .peek()
            .map(|c| c.is_ascii_digit() || c == b'.')
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        // optional exponent part: e.g. 1.5e-3
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
                while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
                    self.pos += 1;
                }
            } else {
                self.pos = mark; // `e` belonged to something else
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let v: f64 = text.parse().map_err(|_| Error::Syntax {
            offset: start,
            expected: vec!["literal".to_string()],
        })?;
        self.skip_ws();
        Ok(v)
    }
}
