//! Small expression language for spatial fields and closed-form Young functions.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | ident | func '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Identifiers are `x1..xn` (coordinates), `t` (the Young-function argument,
//! only where allowed) and `pi`. `abs(x)` is the Euclidean norm of the point;
//! `abs(e)` for any other `e` is the scalar absolute value. Functions: `exp`,
//! `log`, `sqrt`, `sin`, `cos`, `tanh`, `min`, `max`, `abs`.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Coord(usize),
    Norm,
    T,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    Tanh,
    Abs,
    Min,
    Max,
}

impl Func {
    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tanh" => Func::Tanh,
            "abs" => Func::Abs,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }
}

impl Expr {
    /// Parses `src` for points in dimension `n`. `allow_t` enables the identifier `t`.
    pub fn parse(src: &str, n: usize, allow_t: bool) -> Result<Expr> {
        let mut p = Parser {
            src: src.as_bytes(),
            text: src,
            pos: 0,
            n,
            allow_t,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, x: &[f64], t: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Coord(i) => x[*i],
            Expr::Norm => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Expr::T => t,
            Expr::Neg(e) => -e.eval(x, t),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x, t), b.eval(x, t));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(f, args) => {
                let a = args[0].eval(x, t);
                match f {
                    Func::Exp => a.exp(),
                    Func::Log => a.ln(),
                    Func::Sqrt => a.sqrt(),
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tanh => a.tanh(),
                    Func::Abs => a.abs(),
                    Func::Min => args[1..].iter().fold(a, |m, e| m.min(e.eval(x, t))),
                    Func::Max => args[1..].iter().fold(a, |m, e| m.max(e.eval(x, t))),
                }
            }
        }
    }

    /// True when the expression depends on the point only through `|x|`.
    pub fn is_radial(&self) -> bool {
        match self {
            Expr::Coord(_) => false,
            Expr::Num(_) | Expr::Norm | Expr::T => true,
            Expr::Neg(e) => e.is_radial(),
            Expr::Bin(_, a, b) => a.is_radial() && b.is_radial(),
            Expr::Call(_, args) => args.iter().all(Expr::is_radial),
        }
    }

    /// True when the expression does not depend on the point at all.
    pub fn is_constant_in_x(&self) -> bool {
        match self {
            Expr::Coord(_) | Expr::Norm => false,
            Expr::Num(_) | Expr::T => true,
            Expr::Neg(e) => e.is_constant_in_x(),
            Expr::Bin(_, a, b) => a.is_constant_in_x() && b.is_constant_in_x(),
            Expr::Call(_, args) => args.iter().all(Expr::is_constant_in_x),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
    n: usize,
    allow_t: bool,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Next operator character, folding the unicode minus and times signs.
    fn peek_op(&mut self) -> Option<char> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let c = rest.chars().next()?;
        Some(match c {
            '\u{2212}' => '-',
            '\u{00d7}' => '*',
            c => c,
        })
    }

    fn bump_char(&mut self) {
        let c = self.text[self.pos..].chars().next().unwrap();
        self.pos += c.len_utf8();
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c) = self.peek_op() {
            let op = match c {
                '+' => BinOp::Add,
                '-' => BinOp::Sub,
                _ => break,
            };
            self.bump_char();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.peek_op() {
            let op = match c {
                '*' => BinOp::Mul,
                '/' => BinOp::Div,
                _ => break,
            };
            self.bump_char();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek_op() == Some('-') {
            self.bump_char();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.bump_char();
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        self.skip_ws();
        let Some(&c) = self.src.get(self.pos) else {
            return Err(self.err("unexpected end of input"));
        };
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(b')')?;
            return Ok(e);
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() {
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                self.pos += 1;
            }
            let ident = &self.text[start..self.pos];
            self.skip_ws();
            if self.src.get(self.pos) == Some(&b'(') {
                let f = Func::from_name(ident)
                    .ok_or_else(|| self.err(format!("unknown function `{ident}`")))?;
                self.pos += 1;
                if f == Func::Abs {
                    let save = self.pos;
                    self.skip_ws();
                    if self.src.get(self.pos) == Some(&b'x') {
                        self.pos += 1;
                        self.skip_ws();
                        if self.src.get(self.pos) == Some(&b')') {
                            self.pos += 1;
                            return Ok(Expr::Norm);
                        }
                    }
                    self.pos = save;
                }
                let mut args = vec![self.expr()?];
                while self.peek_op() == Some(',') {
                    self.pos += 1;
                    args.push(self.expr()?);
                }
                self.expect(b')')?;
                let arity_ok = match f {
                    Func::Min | Func::Max => args.len() >= 2,
                    _ => args.len() == 1,
                };
                if !arity_ok {
                    return Err(self.err(format!("wrong number of arguments to `{ident}`")));
                }
                return Ok(Expr::Call(f, args));
            }
            return match ident {
                "t" if self.allow_t => Ok(Expr::T),
                "t" => Err(self.err("identifier `t` is not allowed in a spatial field")),
                "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                _ if ident.starts_with('x') && ident.len() > 1 => {
                    let i: usize = ident[1..]
                        .parse()
                        .map_err(|_| self.err(format!("bad coordinate `{ident}`")))?;
                    if i == 0 || i > self.n {
                        return Err(self.err(format!("coordinate `{ident}` out of range for n = {}", self.n)));
                    }
                    Ok(Expr::Coord(i - 1))
                }
                _ => Err(self.err(format!("unknown identifier `{ident}`"))),
            };
        }
        Err(self.err(format!("unexpected character `{}`", c as char)))
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-') {
                self.pos += 1;
            }
            let digits = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if digits == self.pos {
                self.pos = save;
            }
        }
        self.text[start..self.pos]
            .parse()
            .map(Expr::Num)
            .map_err(|_| Error::Parse {
                offset: start,
                msg: "malformed number".into(),
            })
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", c as char)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: &[f64]) -> f64 {
        Expr::parse(s, x.len(), true).unwrap().eval(x, 2.0)
    }

    #[test]
    fn precedence_and_power() {
        assert_eq!(ev("1 + 2 * 3", &[0.0]), 7.0);
        assert_eq!(ev("2 ^ 3 ^ 2", &[0.0]), 512.0);
        assert_eq!(ev("-2 ^ 2", &[0.0]), -4.0);
        assert_eq!(ev("(1 + 2) * 3", &[0.0]), 9.0);
        assert_eq!(ev("t^2 - 1", &[0.0]), 3.0);
        assert_eq!(ev("2 \u{00d7} 3 \u{2212} 1", &[0.0]), 5.0);
    }

    #[test]
    fn coordinates_norm_and_functions() {
        assert_eq!(ev("x1 + 10 * x2", &[1.0, 2.0]), 21.0);
        assert_eq!(ev("abs(x)", &[3.0, 4.0]), 5.0);
        assert_eq!(ev("abs(x1 - 5)", &[3.0, 4.0]), 2.0);
        assert_eq!(ev("max(x1, x2, 7)", &[3.0, 4.0]), 7.0);
        assert!((ev("exp(log(3))", &[0.0]) - 3.0).abs() < 1e-15);
        assert_eq!(ev("1e-1 * 10", &[0.0]), 1.0);
    }

    #[test]
    fn radial_detection() {
        assert!(Expr::parse("2 + 0.5*sin(abs(x))", 2, false).unwrap().is_radial());
        assert!(!Expr::parse("2 + x1", 2, false).unwrap().is_radial());
        assert!(Expr::parse("3", 2, false).unwrap().is_constant_in_x());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Expr::parse("x3", 2, false).is_err());
        assert!(Expr::parse("t + 1", 2, false).is_err());
        assert!(Expr::parse("foo(1)", 2, false).is_err());
        assert!(Expr::parse("1 +", 2, false).is_err());
        assert!(Expr::parse("min(1)", 2, false).is_err());
        assert!(Expr::parse("(1", 2, false).is_err());
    }
}
