//! Scalar coordinate expressions: AST, parser and printer.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?            right associative
//! primary := number | coord | 'pi' | func '(' expr ')' | '(' expr ')'
//! func    := sin cos tan exp log sqrt sinh cosh tanh atan
//! ```
//!
//! Numeric literals accept a decimal point and an exponent (`1.5e-3`).
//! Constant subtrees are folded at parse time; nothing else is simplified.

use std::fmt;

use crate::error::{GeomError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
    Atan,
}

impl Func {
    pub const ALL: [Func; 10] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Atan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Atan => "atan",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == s)
    }

    pub fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Log => x.ln(),
            Func::Sqrt => x.sqrt(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
            Func::Atan => x.atan(),
        }
    }
}

/// Expression tree over the four chart coordinates (referenced by index).
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    pub fn call(f: Func, e: Expr) -> Expr {
        Expr::Call(f, Box::new(e))
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self {
            Expr::Num(v) => Some(*v),
            _ => None,
        }
    }

    /// Structural constant folding: replaces operator nodes whose operands
    /// are all literals with the (finite) result.
    pub fn fold(self) -> Expr {
        use Expr::*;
        match self {
            Neg(a) => match a.fold() {
                Num(v) => Num(-v),
                a => Neg(Box::new(a)),
            },
            Add(a, b) => bin(a.fold(), b.fold(), Add, |x, y| x + y),
            Sub(a, b) => bin(a.fold(), b.fold(), Sub, |x, y| x - y),
            Mul(a, b) => bin(a.fold(), b.fold(), Mul, |x, y| x * y),
            Div(a, b) => bin(a.fold(), b.fold(), Div, |x, y| x / y),
            Pow(a, b) => bin(a.fold(), b.fold(), Pow, f64::powf),
            Call(f, a) => match a.fold() {
                Num(v) if f.apply(v).is_finite() => Num(f.apply(v)),
                a => Call(f, Box::new(a)),
            },
            other => other,
        }
    }

    /// Plain floating-point evaluation (no derivatives).
    pub fn eval(&self, point: &[f64; 4]) -> Result<f64> {
        use Expr::*;
        let v = match self {
            Num(v) => *v,
            Var(i) => point[*i],
            Neg(a) => -a.eval(point)?,
            Add(a, b) => a.eval(point)? + b.eval(point)?,
            Sub(a, b) => a.eval(point)? - b.eval(point)?,
            Mul(a, b) => a.eval(point)? * b.eval(point)?,
            Div(a, b) => {
                let d = b.eval(point)?;
                if d == 0.0 {
                    return Err(GeomError::Domain("division by zero".into()));
                }
                a.eval(point)? / d
            }
            Pow(a, b) => {
                let base = a.eval(point)?;
                let ex = b.eval(point)?;
                if integer_exponent(b).is_none() && base <= 0.0 {
                    return Err(GeomError::Domain(format!("real power of non-positive base {base}")));
                }
                base.powf(ex)
            }
            Call(f, a) => {
                let x = a.eval(point)?;
                match f {
                    Func::Log if x <= 0.0 => return Err(GeomError::Domain(format!("log of non-positive value {x}"))),
                    Func::Sqrt if x < 0.0 => return Err(GeomError::Domain(format!("sqrt of negative value {x}"))),
                    _ => f.apply(x),
                }
            }
        };
        Ok(v)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        use Expr::*;
        match self {
            Num(_) | Var(_) => 1,
            Neg(a) | Call(_, a) => 1 + a.size(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Prints using the given coordinate names.
    pub fn display<'a>(&'a self, coords: &'a [String; 4]) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, coords }
    }
}

fn bin(a: Expr, b: Expr, make: fn(Box<Expr>, Box<Expr>) -> Expr, op: fn(f64, f64) -> f64) -> Expr {
    if let (Expr::Num(x), Expr::Num(y)) = (&a, &b) {
        let r = op(*x, *y);
        if r.is_finite() {
            return Expr::Num(r);
        }
    }
    make(Box::new(a), Box::new(b))
}

/// Small integer value of a literal exponent, if it is one.
pub(crate) fn integer_exponent(e: &Expr) -> Option<i32> {
    match e {
        Expr::Num(v) if v.fract() == 0.0 && v.abs() <= 64.0 => Some(*v as i32),
        _ => None,
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

// ---------------------------------------------------------------- printing

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => PREC_ADD,
        Expr::Mul(..) | Expr::Div(..) => PREC_MUL,
        Expr::Neg(_) => PREC_UNARY,
        Expr::Num(v) if v.is_sign_negative() => PREC_UNARY,
        Expr::Pow(..) => PREC_POW,
        _ => PREC_ATOM,
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    coords: &'a [String; 4],
}

impl ExprDisplay<'_> {
    fn write(&self, f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
        let needs_paren = precedence(e) < min_prec;
        if needs_paren {
            f.write_str("(")?;
        }
        match e {
            Expr::Num(v) => write!(f, "{v:?}")?,
            Expr::Var(i) => f.write_str(&self.coords[*i])?,
            Expr::Neg(a) => {
                f.write_str("-")?;
                self.write(f, a, PREC_UNARY)?;
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                self.write(f, a, PREC_ADD)?;
                f.write_str(if matches!(e, Expr::Add(..)) { " + " } else { " - " })?;
                self.write(f, b, PREC_ADD + 1)?;
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                self.write(f, a, PREC_MUL)?;
                f.write_str(if matches!(e, Expr::Mul(..)) { "*" } else { "/" })?;
                self.write(f, b, PREC_MUL + 1)?;
            }
            Expr::Pow(a, b) => {
                self.write(f, a, PREC_ATOM)?;
                f.write_str("^")?;
                self.write(f, b, PREC_POW)?;
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                self.write(f, a, 0)?;
                f.write_str(")")?;
            }
        }
        if needs_paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.expr, 0)
    }
}

// ----------------------------------------------------------------- parsing

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (t, off) = lx.next()?;
            let end = t == Tok::End;
            out.push((t, off));
            if end {
                return Ok(out);
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize)> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if start >= bytes.len() {
            return Ok((Tok::End, start));
        }
        let c = bytes[start];
        if c.is_ascii_digit() || c == b'.' {
            let mut end = start;
            while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
                end += 1;
            }
            if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
                let mut k = end + 1;
                if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                    k += 1;
                }
                if k < bytes.len() && bytes[k].is_ascii_digit() {
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    end = k;
                }
            }
            let text = &self.src[start..end];
            let v: f64 = text.parse().map_err(|_| GeomError::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })?;
            self.pos = end;
            return Ok((Tok::Num(v), start));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut end = start;
            while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                end += 1;
            }
            self.pos = end;
            return Ok((Tok::Ident(self.src[start..end].to_string()), start));
        }
        self.pos += 1;
        let t = match c {
            b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                return Err(GeomError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        Ok((t, start))
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    i: usize,
    coords: &'a [String; 4],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn offset(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(GeomError::Syntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            self.bump();
            let rhs = self.term()?;
            lhs = if c == '+' { lhs + rhs } else { lhs - rhs };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            self.bump();
            let rhs = self.unary()?;
            lhs = if c == '*' { lhs * rhs } else { lhs / rhs };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            let inner = self.unary()?;
            return Ok(-inner);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let off = self.offset();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(i) = self.coords.iter().position(|c| *c == name) {
                    return Ok(Expr::Var(i));
                }
                if let Some(func) = Func::from_name(&name) {
                    if *self.peek() != Tok::LParen {
                        return self.error(format!("expected `(` after `{name}`"));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Expr::call(func, arg));
                }
                if name == "pi" {
                    return Ok(Expr::Num(std::f64::consts::PI));
                }
                Err(GeomError::UnknownSymbol { name, offset: off })
            }
            Tok::End => Err(GeomError::Syntax {
                offset: off,
                message: "unexpected end of input".into(),
            }),
            t => Err(GeomError::Syntax {
                offset: off,
                message: format!("unexpected token {t:?}"),
            }),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        if *self.peek() != Tok::RParen {
            return self.error("expected `)`");
        }
        self.bump();
        Ok(())
    }
}

/// Parses an expression over the given coordinate names.
pub fn parse_expression(text: &str, coords: &[String; 4]) -> Result<Expr> {
    if text.trim().is_empty() {
        return Err(GeomError::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let toks = Lexer::tokens(text)?;
    let mut p = Parser { toks, i: 0, coords };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.error("trailing input");
    }
    Ok(e.fold())
}

/// Convenience for coordinate names given as string slices.
pub fn coord_names(names: [&str; 4]) -> [String; 4] {
    names.map(String::from)
}
