//! Recursive-descent parser for the kernel DSL.
//!
//! ```text
//! expr := name '(' [arg {',' arg}] ')'
//! arg  := expr | number | '[' [number {',' number}] ']'
//! ```
//!
//! Positions in syntax errors are byte offsets into the input.

use super::{KernelExpr, Polynomial};
use crate::error::{KernelError, Result};
use crate::geometry::MultiIndex;

enum Arg {
    Kernel(KernelExpr),
    Poly(Polynomial),
    Num(f64),
    List(Vec<f64>),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

fn syntax(pos: usize, msg: impl Into<String>) -> KernelError {
    KernelError::Syntax { pos, msg: msg.into() }
}

impl<'a> Parser<'a> {
    fn bytes(&self) -> &'a [u8] {
        self.src.as_bytes()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes().get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(_) => Err(syntax(self.pos, format!("expected '{}'", c as char))),
            None => Err(syntax(self.pos, format!("expected '{}', found end of input", c as char))),
        }
    }

    fn ident(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.bytes()[self.pos].is_ascii_alphanumeric() || self.bytes()[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos || self.bytes()[start].is_ascii_digit() {
            return Err(syntax(start, "expected a kernel name"));
        }
        Ok(&self.src[start..self.pos])
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let b = self.bytes();
        let mut end = start;
        while end < b.len() {
            let c = b[end];
            let ok = c.is_ascii_digit()
                || c == b'.'
                || c == b'e'
                || c == b'E'
                || ((c == b'-' || c == b'+') && (end == start || matches!(b[end - 1], b'e' | b'E')));
            if !ok {
                break;
            }
            end += 1;
        }
        let text = &self.src[start..end];
        let v: f64 = text.parse().map_err(|_| syntax(start, format!("malformed number '{text}'")))?;
        self.pos = end;
        Ok(v)
    }

    fn arg(&mut self) -> Result<(usize, Arg)> {
        let at = {
            self.skip_ws();
            self.pos
        };
        let arg = match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let mut xs = Vec::new();
                if self.peek() == Some(b']') {
                    self.pos += 1;
                } else {
                    loop {
                        xs.push(self.number()?);
                        match self.peek() {
                            Some(b',') => self.pos += 1,
                            Some(b']') => {
                                self.pos += 1;
                                break;
                            }
                            _ => return Err(syntax(self.pos, "expected ',' or ']' in list")),
                        }
                    }
                }
                Arg::List(xs)
            }
            Some(c) if c.is_ascii_digit() || c == b'-' || c == b'+' || c == b'.' => Arg::Num(self.number()?),
            Some(_) => self.call()?,
            None => return Err(syntax(self.pos, "unexpected end of input")),
        };
        Ok((at, arg))
    }

    fn call(&mut self) -> Result<Arg> {
        let name_pos = {
            self.skip_ws();
            self.pos
        };
        let name = self.ident()?;
        self.expect(b'(')?;
        let mut args = Vec::new();
        if self.peek() == Some(b')') {
            self.pos += 1;
        } else {
            loop {
                args.push(self.arg()?);
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(syntax(self.pos, "expected ',' or ')'")),
                }
            }
        }
        build(name, name_pos, args)
    }
}

fn arity(name: &str, pos: usize, got: usize, n: usize) -> Result<()> {
    if got == n {
        Ok(())
    } else {
        Err(syntax(pos, format!("{name} takes {n} argument(s), got {got}")))
    }
}

fn kernel(arg: (usize, Arg)) -> Result<KernelExpr> {
    match arg {
        (_, Arg::Kernel(k)) => Ok(k),
        (p, _) => Err(syntax(p, "expected a kernel expression")),
    }
}

fn num(arg: &(usize, Arg), what: &str) -> Result<f64> {
    match arg {
        (_, Arg::Num(x)) => Ok(*x),
        (p, _) => Err(syntax(*p, format!("{what} must be a number"))),
    }
}

fn count(arg: &(usize, Arg), what: &str) -> Result<usize> {
    let x = num(arg, what)?;
    if x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(syntax(arg.0, format!("{what} must be a non-negative integer, got {x}")))
    }
}

fn build(name: &str, pos: usize, args: Vec<(usize, Arg)>) -> Result<Arg> {
    let n = args.len();
    let mut args = args.into_iter();
    let a = &mut args;
    let k = match name {
        "szego_disc" => {
            arity(name, pos, n, 0)?;
            KernelExpr::szego_disc()
        }
        "bergman_disc" => {
            arity(name, pos, n, 0)?;
            KernelExpr::bergman_disc()
        }
        "bergman_ball" => {
            arity(name, pos, n, 1)?;
            KernelExpr::bergman_ball(count(&take(a), "dimension")?)?
        }
        "ball_power" | "ball_curvature" => {
            arity(name, pos, n, 2)?;
            let m = count(&take(a), "dimension")?;
            let lambda = num(&take(a), "λ")?;
            if name == "ball_power" {
                KernelExpr::ball_power(m, lambda)?
            } else {
                KernelExpr::ball_curvature(m, lambda)?
            }
        }
        "diagonal_series" => {
            arity(name, pos, n, 1)?;
            match take(a) {
                (_, Arg::List(xs)) => KernelExpr::diagonal_series(xs)?,
                (p, _) => return Err(syntax(p, "diagonal_series expects a coefficient list [a1, a2, ...]")),
            }
        }
        "defect" => {
            arity(name, pos, n, 2)?;
            let c = num(&take(a), "c")?;
            match take(a) {
                (_, Arg::Poly(f)) => KernelExpr::defect(c, f)?,
                (p, _) => return Err(syntax(p, "defect expects poly(...) or coord(...)")),
            }
        }
        "poly" => {
            if n == 0 {
                return Err(syntax(pos, "poly needs a dimension"));
            }
            let dim = count(&take(a), "dimension")?;
            let mut terms = Vec::new();
            for (p, arg) in a {
                match arg {
                    Arg::List(xs) if xs.len() == dim + 1 => {
                        let mut exps = Vec::with_capacity(dim);
                        for &e in &xs[1..] {
                            if !(e >= 0.0 && e.fract() == 0.0 && e <= u32::MAX as f64) {
                                return Err(syntax(p, format!("exponent must be a non-negative integer, got {e}")));
                            }
                            exps.push(e as u32);
                        }
                        terms.push((xs[0], MultiIndex::new(exps)));
                    }
                    _ => return Err(syntax(p, format!("poly term must be a list [coef, e1, .., e{dim}]"))),
                }
            }
            return Ok(Arg::Poly(Polynomial::new(dim, terms)?));
        }
        "coord" => {
            arity(name, pos, n, 2)?;
            let dim = count(&take(a), "dimension")?;
            let (p, i) = take(a);
            let i = count(&(p, i), "coordinate index")?;
            if i == 0 {
                return Err(syntax(p, "coordinate index is 1-based"));
            }
            return Ok(Arg::Poly(Polynomial::coordinate(dim, i - 1)?));
        }
        "pow" | "scale" => {
            arity(name, pos, n, 2)?;
            let child = kernel(take(a))?;
            let x = num(&take(a), if name == "pow" { "exponent" } else { "scale factor" })?;
            if name == "pow" {
                KernelExpr::pow(child, x)?
            } else {
                KernelExpr::scale(child, x)?
            }
        }
        "product" | "sum" | "difference" | "tensor" => {
            arity(name, pos, n, 2)?;
            let l = kernel(take(a))?;
            let r = kernel(take(a))?;
            match name {
                "product" => KernelExpr::product(l, r)?,
                "sum" => KernelExpr::sum(l, r)?,
                "difference" => KernelExpr::difference(l, r)?,
                _ => KernelExpr::tensor(l, r)?,
            }
        }
        "log_hessian" => {
            arity(name, pos, n, 1)?;
            KernelExpr::log_hessian(kernel(take(a))?)?
        }
        "curvature" => {
            arity(name, pos, n, 3)?;
            let child = kernel(take(a))?;
            let alpha = num(&take(a), "α")?;
            let beta = num(&take(a), "β")?;
            KernelExpr::curvature(child, alpha, beta)?
        }
        "jet" => {
            arity(name, pos, n, 3)?;
            let k1 = kernel(take(a))?;
            let k2 = kernel(take(a))?;
            KernelExpr::jet(k1, k2, count(&take(a), "jet order")?)?
        }
        _ => return Err(syntax(pos, format!("unknown kernel '{name}'"))),
    };
    Ok(Arg::Kernel(k))
}

fn take(a: &mut impl Iterator<Item = (usize, Arg)>) -> (usize, Arg) {
    a.next().expect("arity checked")
}

/// Parses DSL text into a kernel expression.
pub fn parse_kernel(text: &str) -> Result<KernelExpr> {
    let mut p = Parser { src: text, pos: 0 };
    if p.peek().is_none() {
        return Err(syntax(0, "empty kernel expression"));
    }
    let start = p.pos;
    let arg = p.call()?;
    if p.peek().is_some() {
        return Err(syntax(p.pos, "unexpected trailing input"));
    }
    match arg {
        Arg::Kernel(k) => Ok(k),
        _ => Err(syntax(start, "top level must be a kernel, not a polynomial")),
    }
}
