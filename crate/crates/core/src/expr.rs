//! A small arithmetic expression language used by configuration files.
//!
//! Grammar, lowest precedence first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary | implicit)*
//! unary   := '-' unary | '+' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | ident | ident '(' sum ')' | '(' sum ')'
//! ```
//!
//! Identifiers are the coordinates `x1..xn` (plain `x` is an alias for
//! `x1`), the constants `pi` and `e`, and the functions `sin cos tan exp ln
//! sqrt`. A number directly followed by an identifier or parenthesis is an
//! implicit product, so `3x^2` reads as `3*(x^2)`.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("unexpected character '{ch}' at {pos}")]
    UnexpectedChar { pos: usize, ch: char },
    #[error("unexpected token '{found}' at {pos}")]
    UnexpectedToken { pos: usize, found: String },
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown identifier '{0}'")]
    UnknownIdentifier(String),
    #[error("coordinate x{index} used in a {dim}-dimensional chart")]
    VariableOutOfRange { index: usize, dim: usize },
    #[error("expression is not a polynomial in x: {0}")]
    NotPolynomial(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
            Func::Sqrt => x.sqrt(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// 0-based coordinate index.
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
    pub fn parse(src: &str) -> Result<Expr, ExprError> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.sum()?;
        match p.peek() {
            None => Ok(e),
            Some((pos, tok)) => Err(ExprError::UnexpectedToken {
                pos: *pos,
                found: tok.to_string(),
            }),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, b) => {
                let base = a.eval(x);
                match b.as_ref() {
                    Expr::Num(k) if k.fract() == 0.0 && k.abs() < 64.0 => base.powi(*k as i32),
                    _ => base.powf(b.eval(x)),
                }
            }
            Expr::Call(f, a) => f.apply(a.eval(x)),
        }
    }

    /// Largest coordinate index referenced plus one (0 for constants).
    pub fn arity(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Call(_, a) => a.arity(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.arity().max(b.arity()),
        }
    }

    /// Fails if the expression uses a coordinate beyond `dim`.
    pub fn check_dim(&self, dim: usize) -> Result<(), ExprError> {
        let a = self.arity();
        if a > dim {
            Err(ExprError::VariableOutOfRange { index: a, dim })
        } else {
            Ok(())
        }
    }

    /// Coefficients in ascending powers when the expression is a polynomial
    /// in the single coordinate `x1`.
    pub fn polynomial_coefficients(&self) -> Result<Vec<f64>, ExprError> {
        let mut c = self.poly()?;
        while c.len() > 1 && *c.last().unwrap() == 0.0 {
            c.pop();
        }
        Ok(c)
    }

    fn poly(&self) -> Result<Vec<f64>, ExprError> {
        let not_poly = || ExprError::NotPolynomial(self.to_string());
        Ok(match self {
            Expr::Num(v) => vec![*v],
            Expr::Var(0) => vec![0.0, 1.0],
            Expr::Var(_) => return Err(not_poly()),
            Expr::Neg(a) => a.poly()?.into_iter().map(|c| -c).collect(),
            Expr::Add(a, b) => poly_add(&a.poly()?, &b.poly()?, 1.0),
            Expr::Sub(a, b) => poly_add(&a.poly()?, &b.poly()?, -1.0),
            Expr::Mul(a, b) => poly_mul(&a.poly()?, &b.poly()?),
            Expr::Div(a, b) => {
                let d = b.poly()?;
                if d.iter().skip(1).any(|&c| c != 0.0) || d[0] == 0.0 {
                    return Err(not_poly());
                }
                a.poly()?.into_iter().map(|c| c / d[0]).collect()
            }
            Expr::Pow(a, b) => {
                let k = match b.as_ref() {
                    Expr::Num(k) if *k >= 0.0 && k.fract() == 0.0 && *k <= 64.0 => *k as usize,
                    _ => return Err(not_poly()),
                };
                let base = a.poly()?;
                (0..k).fold(vec![1.0], |acc, _| poly_mul(&acc, &base))
            }
            Expr::Call(..) => return Err(not_poly()),
        })
    }
}

fn poly_add(a: &[f64], b: &[f64], sign: f64) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, &c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, &c) in b.iter().enumerate() {
        out[i] += sign * c;
    }
    out
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a}^{b})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Num(v) => write!(f, "{v}"),
            Token::Ident(s) => write!(f, "{s}"),
            Token::Op(c) => write!(f, "{c}"),
            Token::LParen => write!(f, "("),
            Token::RParen => write!(f, ")"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent only when followed by a digit, so "2e" stays 2·e
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| ExprError::UnexpectedToken {
                    pos: start,
                    found: text.clone(),
                })?;
            out.push((start, Token::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Token::Ident(chars[start..i].iter().collect())));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Token::Op(c),
                '(' => Token::LParen,
                ')' => Token::RParen,
                _ => return Err(ExprError::UnexpectedChar { pos: i, ch: c }),
            };
            out.push((i, tok));
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(usize, Token)> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Result<(usize, Token), ExprError> {
        let t = self.tokens.get(self.pos).cloned().ok_or(ExprError::UnexpectedEnd)?;
        self.pos += 1;
        Ok(t)
    }

    fn peek_op(&self) -> Option<char> {
        match self.peek() {
            Some((_, Token::Op(c))) => Some(*c),
            _ => None,
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.product()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.product()?;
            lhs = if op == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some((_, Token::Op(op @ ('*' | '/')))) => {
                    let op = *op;
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = if op == '*' {
                        Expr::Mul(Box::new(lhs), Box::new(rhs))
                    } else {
                        Expr::Div(Box::new(lhs), Box::new(rhs))
                    };
                }
                Some((_, Token::Ident(_) | Token::LParen | Token::Num(_))) => {
                    let rhs = self.power()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let (pos, tok) = self.next()?;
        match tok {
            Token::Num(v) => Ok(Expr::Num(v)),
            Token::LParen => {
                let e = self.sum()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Token::Ident(name) => {
                if let Some(f) = Func::from_name(&name) {
                    match self.next()? {
                        (_, Token::LParen) => {}
                        (pos, tok) => {
                            return Err(ExprError::UnexpectedToken {
                                pos,
                                found: tok.to_string(),
                            })
                        }
                    }
                    let arg = self.sum()?;
                    self.expect_rparen()?;
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                ident_value(&name)
            }
            tok => Err(ExprError::UnexpectedToken {
                pos,
                found: tok.to_string(),
            }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        match self.next()? {
            (_, Token::RParen) => Ok(()),
            (pos, tok) => Err(ExprError::UnexpectedToken {
                pos,
                found: tok.to_string(),
            }),
        }
    }
}

fn ident_value(name: &str) -> Result<Expr, ExprError> {
    match name {
        "pi" => return Ok(Expr::Num(std::f64::consts::PI)),
        "e" => return Ok(Expr::Num(std::f64::consts::E)),
        "x" => return Ok(Expr::Var(0)),
        _ => {}
    }
    if let Some(idx) = name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
        if idx >= 1 {
            return Ok(Expr::Var(idx - 1));
        }
    }
    Err(ExprError::UnknownIdentifier(name.to_string()))
}
