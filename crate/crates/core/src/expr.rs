//! A small expression language for integrands given as text.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' exponent)?
//! exponent:= '-' exponent | power          (constant, integer in [-64, 64])
//! primary := number | 'x' | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | log | abs | sqrt
//! ```
//!
//! `^` binds tighter than unary minus (`-x^2` is `-(x^2)`) and associates to
//! the right. There is no implicit multiplication.

use std::fmt;

use crate::poly::Polynomial;
use crate::{Error, Result};

/// Largest tree depth accepted by the parser.
pub const MAX_DEPTH: usize = 64;
/// Exponents of `^` are limited to `[-MAX_EXPONENT, MAX_EXPONENT]`.
pub const MAX_EXPONENT: i32 = 64;
/// Polynomials above this degree are not expanded by [`Expr::as_polynomial`].
pub const MAX_POLY_DEGREE: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Abs,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 6] = [
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Log,
        Func::Abs,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, v: f64) -> Result<f64, EvalError> {
        match self {
            Func::Log if v <= 0.0 => Err(EvalError {
                op: "log",
                value: v,
            }),
            Func::Sqrt if v < 0.0 => Err(EvalError {
                op: "sqrt",
                value: v,
            }),
            Func::Sin => Ok(v.sin()),
            Func::Cos => Ok(v.cos()),
            Func::Exp => Ok(v.exp()),
            Func::Log => Ok(v.ln()),
            Func::Abs => Ok(v.abs()),
            Func::Sqrt => Ok(v.sqrt()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

/// A domain fault or overflow during evaluation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("`{op}` is undefined or not finite at {value}")]
pub struct EvalError {
    pub op: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at offset {offset}: expected {expected}, found {found}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

impl Expr {
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Neg(e) => -e.eval(x)?,
            Expr::Binary(op, l, r) => {
                let (a, b) = (l.eval(x)?, r.eval(x)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div if b == 0.0 => return Err(EvalError { op: "/", value: b }),
                    BinOp::Div => a / b,
                }
            }
            Expr::Pow(base, n) => {
                let b = base.eval(x)?;
                if b == 0.0 && *n < 0 {
                    return Err(EvalError { op: "^", value: b });
                }
                b.powi(*n)
            }
            Expr::Call(f, arg) => f.apply(arg.eval(x)?)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError {
                op: self.op_name(),
                value: v,
            })
        }
    }

    fn op_name(&self) -> &'static str {
        match self {
            Expr::Num(_) => "literal",
            Expr::X => "x",
            Expr::Neg(_) => "-",
            Expr::Binary(op, ..) => op.symbol(),
            Expr::Pow(..) => "^",
            Expr::Call(f, _) => f.name(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::X => 1,
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => 1 + e.depth(),
            Expr::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn contains_x(&self) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::X => true,
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.contains_x(),
            Expr::Binary(_, l, r) => l.contains_x() || r.contains_x(),
        }
    }

    /// Expands the expression into monomial coefficients when it is a
    /// polynomial in `x` of degree at most [`MAX_POLY_DEGREE`]. Division is
    /// accepted only by constants; `x`-free subtrees are folded.
    pub fn as_polynomial(&self) -> Option<Polynomial> {
        if !self.contains_x() {
            return self.eval(0.0).ok().map(Polynomial::constant);
        }
        let p = match self {
            Expr::Num(_) | Expr::Call(..) => return None,
            Expr::X => Polynomial::monomial(1),
            Expr::Neg(e) => -e.as_polynomial()?,
            Expr::Binary(op, l, r) => {
                let a = l.as_polynomial()?;
                let b = r.as_polynomial()?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => {
                        if a.degree() + b.degree() > MAX_POLY_DEGREE {
                            return None;
                        }
                        a * b
                    }
                    BinOp::Div => {
                        let d = match b.coeffs() {
                            [d] if *d != 0.0 => *d,
                            _ => return None,
                        };
                        Polynomial::new(a.coeffs().iter().map(|c| c / d).collect())
                    }
                }
            }
            Expr::Pow(base, n) => {
                let b = base.as_polynomial()?;
                let n = u32::try_from(*n).ok()?;
                if b.degree() * n as usize > MAX_POLY_DEGREE {
                    return None;
                }
                b.pow(n)
            }
        };
        Some(p)
    }
}

/// Fully parenthesized, so printing and re-parsing gives the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if v.is_sign_negative() => write!(f, "(-{:?})", -v),
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::X => f.write_str("x"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Pow(b, n) => write!(f, "({b}^{n})"),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse(s)
    }
}

impl TryFrom<&str> for Expr {
    type Error = ParseError;

    fn try_from(s: &str) -> Result<Self, ParseError> {
        parse(s)
    }
}

/// The two test integrands `f1(x) = (5x^4 + 6x^3 - x)/10` and `f2(x) = x^20`.
pub fn builtin(name: &str) -> Result<Expr> {
    let text = match name {
        "f1" => "(5*x^4+6*x^3-x)/10",
        "f2" => "x^20",
        other => return Err(Error::UnknownBuiltin(other.to_string())),
    };
    Ok(parse(text).expect("builtin expressions parse"))
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        nesting: 0,
        end: text.len(),
    };
    let expr = parser.expr()?;
    match parser.peek() {
        None => Ok(expr),
        Some(tok) => {
            Err(parser.error_at(tok.offset, "operator or end of input", tok.kind.describe()))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Num(v) => format!("number {v}"),
            TokenKind::Ident(s) => format!("`{s}`"),
            TokenKind::Op(c) => format!("`{c}`"),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if !c.is_ascii() {
            return Err(ParseError {
                offset: i,
                expected: "ASCII input".into(),
                found: "a non-ASCII character".into(),
            });
        }
        let kind = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && matches!(bytes[i], b'e' | b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && matches!(bytes[j], b'+' | b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lexeme = &text[start..i];
                match lexeme.parse::<f64>() {
                    Ok(v) if v.is_finite() => TokenKind::Num(v),
                    _ => {
                        return Err(ParseError {
                            offset: start,
                            expected: "a finite number".into(),
                            found: format!("`{lexeme}`"),
                        })
                    }
                }
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                TokenKind::Ident(text[start..i].to_string())
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                i += 1;
                TokenKind::Op(c as char)
            }
            b'(' => {
                i += 1;
                TokenKind::LParen
            }
            b')' => {
                i += 1;
                TokenKind::RParen
            }
            other => {
                return Err(ParseError {
                    offset: i,
                    expected: "a number, `x`, a function, an operator or a parenthesis".into(),
                    found: format!("`{}`", other as char),
                })
            }
        };
        tokens.push(Token {
            kind,
            offset: start,
        });
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    nesting: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn found(&self) -> String {
        self.peek()
            .map_or_else(|| "end of input".into(), |t| t.kind.describe())
    }

    fn error_at(&self, offset: usize, expected: &str, found: String) -> ParseError {
        ParseError {
            offset,
            expected: expected.into(),
            found,
        }
    }

    fn error(&self, expected: &str) -> ParseError {
        self.error_at(self.offset(), expected, self.found())
    }

    fn eat_op(&mut self, op: char) -> Option<usize> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Op(c),
                offset,
            }) if *c == op => {
                let offset = *offset;
                self.pos += 1;
                Some(offset)
            }
            _ => None,
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.nesting += 1;
        if self.nesting > MAX_DEPTH {
            return Err(self.error_at(
                self.offset(),
                "shallower nesting (at most 64 levels)",
                self.found(),
            ));
        }
        Ok(())
    }

    fn node(&self, offset: usize, e: Expr) -> Result<Expr, ParseError> {
        if e.depth() > MAX_DEPTH {
            return Err(self.error_at(
                offset,
                "an expression tree of depth at most 64",
                "a deeper tree".into(),
            ));
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Token {
                    kind: TokenKind::Op('+'),
                    ..
                }) => BinOp::Add,
                Some(Token {
                    kind: TokenKind::Op('-'),
                    ..
                }) => BinOp::Sub,
                _ => break,
            };
            let offset = self.offset();
            self.pos += 1;
            let rhs = self.term()?;
            lhs = self.node(offset, Expr::Binary(op, Box::new(lhs), Box::new(rhs)))?;
        }
        self.nesting -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Token {
                    kind: TokenKind::Op('*'),
                    ..
                }) => BinOp::Mul,
                Some(Token {
                    kind: TokenKind::Op('/'),
                    ..
                }) => BinOp::Div,
                _ => break,
            };
            let offset = self.offset();
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = self.node(offset, Expr::Binary(op, Box::new(lhs), Box::new(rhs)))?;
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if let Some(offset) = self.eat_op('-') {
            self.enter()?;
            let inner = self.unary()?;
            self.nesting -= 1;
            return self.node(offset, Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        let Some(offset) = self.eat_op('^') else {
            return Ok(base);
        };
        let exp_offset = self.offset();
        let exponent = self.exponent()?;
        let n = constant_exponent(&exponent).ok_or_else(|| {
            self.error_at(
                exp_offset,
                "a constant integer exponent in [-64, 64]",
                format!("`{exponent}`"),
            )
        })?;
        self.node(offset, Expr::Pow(Box::new(base), n))
    }

    fn exponent(&mut self) -> Result<Expr, ParseError> {
        if let Some(offset) = self.eat_op('-') {
            self.enter()?;
            let inner = self.exponent()?;
            self.nesting -= 1;
            return self.node(offset, Expr::Neg(Box::new(inner)));
        }
        self.enter()?;
        let e = self.power();
        self.nesting -= 1;
        e
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error("an expression"));
        };
        match tok.kind {
            TokenKind::Num(v) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            TokenKind::Ident(name) => {
                self.pos += 1;
                if name == "x" {
                    return Ok(Expr::X);
                }
                let Some(func) = Func::from_name(&name) else {
                    return Err(self.error_at(
                        tok.offset,
                        "`x` or one of sin, cos, exp, log, abs, sqrt",
                        format!("`{name}`"),
                    ));
                };
                if !matches!(
                    self.peek(),
                    Some(Token {
                        kind: TokenKind::LParen,
                        ..
                    })
                ) {
                    return Err(self.error("`(` after a function name"));
                }
                self.pos += 1;
                let arg = self.expr()?;
                self.close_paren()?;
                self.node(tok.offset, Expr::Call(func, Box::new(arg)))
            }
            TokenKind::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                self.close_paren()?;
                Ok(inner)
            }
            _ => Err(self.error("an expression")),
        }
    }

    fn close_paren(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::RParen,
                ..
            }) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error("`)`")),
        }
    }
}

fn constant_exponent(e: &Expr) -> Option<i32> {
    if e.contains_x() {
        return None;
    }
    let v = e.eval(0.0).ok()?;
    let limit = f64::from(MAX_EXPONENT);
    (v.fract() == 0.0 && (-limit..=limit).contains(&v)).then_some(v as i32)
}
