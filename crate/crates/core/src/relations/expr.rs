//! Expression trees over named constants, with an infix parser and printer.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::quantities::{parse_rational, ConstantsTable, Quantity, QuantityError};

pub const MAX_DEPTH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryFn {
    Sqrt,
    Log10,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Const(String),
    Literal(f64),
    Product(Vec<Expression>),
    Power(Box<Expression>, Rational64),
    Sum(Vec<Expression>),
    Unary(UnaryFn, Box<Expression>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unresolved reference {0}")]
    Unresolved(String),
    #[error("dimension mismatch inside a sum")]
    SumDimensionMismatch,
    #[error("log10 needs a positive dimensionless argument")]
    BadLogArgument,
    #[error("expression deeper than {MAX_DEPTH}")]
    TooDeep,
    #[error(transparent)]
    Arithmetic(#[from] QuantityError),
}

impl Expression {
    pub fn name(name: &str) -> Self {
        Self::Const(name.to_string())
    }

    pub fn depth(&self) -> usize {
        match self {
            Self::Const(_) | Self::Literal(_) => 1,
            Self::Product(xs) | Self::Sum(xs) => 1 + xs.iter().map(Self::depth).max().unwrap_or(0),
            Self::Power(x, _) | Self::Unary(_, x) => 1 + x.depth(),
        }
    }

    /// Every constant name referenced, sorted and deduplicated.
    pub fn references(&self) -> Vec<String> {
        fn walk(e: &Expression, out: &mut Vec<String>) {
            match e {
                Expression::Const(n) => out.push(n.clone()),
                Expression::Literal(_) => {}
                Expression::Product(xs) | Expression::Sum(xs) => {
                    xs.iter().for_each(|x| walk(x, out))
                }
                Expression::Power(x, _) | Expression::Unary(_, x) => walk(x, out),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// Exponent of each constant when the expression is a monomial
    /// (products, powers and square roots only); `None` otherwise.
    pub fn monomial_exponents(&self) -> Option<BTreeMap<String, Rational64>> {
        fn walk(e: &Expression, scale: Rational64, out: &mut BTreeMap<String, Rational64>) -> bool {
            match e {
                Expression::Const(n) => {
                    *out.entry(n.clone()).or_insert_with(Rational64::zero) += scale;
                    true
                }
                Expression::Literal(_) => true,
                Expression::Product(xs) => xs.iter().all(|x| walk(x, scale, out)),
                Expression::Power(x, r) => walk(x, scale * r, out),
                Expression::Unary(UnaryFn::Sqrt, x) => walk(x, scale * Rational64::new(1, 2), out),
                Expression::Sum(_) | Expression::Unary(UnaryFn::Log10, _) => false,
            }
        }
        let mut out = BTreeMap::new();
        walk(self, Rational64::one(), &mut out).then(|| {
            out.retain(|_, v| !v.is_zero());
            out
        })
    }

    pub fn eval(&self, table: &ConstantsTable) -> Result<Quantity, EvalError> {
        if self.depth() > MAX_DEPTH {
            return Err(EvalError::TooDeep);
        }
        self.eval_inner(table)
    }

    fn eval_inner(&self, table: &ConstantsTable) -> Result<Quantity, EvalError> {
        Ok(match self {
            Self::Const(n) => table
                .value(n)
                .ok_or_else(|| EvalError::Unresolved(n.clone()))?,
            Self::Literal(x) => Quantity::dimensionless(*x)?,
            Self::Product(xs) => {
                let mut acc = Quantity::dimensionless(1.0)?;
                for x in xs {
                    acc = acc.mul(&x.eval_inner(table)?)?;
                }
                acc
            }
            Self::Power(x, r) => x.eval_inner(table)?.pow(*r)?,
            Self::Sum(xs) => {
                let mut iter = xs.iter();
                let first = iter
                    .next()
                    .map(|x| x.eval_inner(table))
                    .unwrap_or_else(|| Ok(Quantity::dimensionless(0.0)?))?;
                let mut acc = first;
                for x in iter {
                    let q = x.eval_inner(table)?;
                    if q.dim() != acc.dim() {
                        return Err(EvalError::SumDimensionMismatch);
                    }
                    acc = acc.add(&q)?;
                }
                acc
            }
            Self::Unary(UnaryFn::Sqrt, x) => x.eval_inner(table)?.sqrt()?,
            Self::Unary(UnaryFn::Log10, x) => {
                let q = x.eval_inner(table)?;
                if !q.dim().is_dimensionless() || q.magnitude() <= 0.0 {
                    return Err(EvalError::BadLogArgument);
                }
                Quantity::dimensionless(q.magnitude().log10())?
            }
        })
    }

    fn is_atom(&self) -> bool {
        match self {
            Self::Const(_) | Self::Unary(..) => true,
            Self::Literal(x) => *x >= 0.0,
            _ => false,
        }
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, r: Rational64) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "({}/{})", r.numer(), r.denom())
    }
}

/// Prints in the infix grammar accepted by [`parse_expression`].
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Const(n) => write!(f, "{n}"),
            Self::Literal(x) if *x < 0.0 => write!(f, "(-{:e})", -x),
            Self::Literal(x) => write!(f, "{x:e}"),
            Self::Product(xs) => {
                if xs.is_empty() {
                    return write!(f, "1");
                }
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " * ")?;
                    }
                    if matches!(x, Self::Sum(_) | Self::Product(_)) {
                        write!(f, "({x})")?;
                    } else {
                        write!(f, "{x}")?;
                    }
                }
                Ok(())
            }
            Self::Power(x, r) => {
                if x.is_atom() {
                    write!(f, "{x}^")?;
                } else {
                    write!(f, "({x})^")?;
                }
                write_rational(f, *r)
            }
            Self::Sum(xs) => {
                if xs.is_empty() {
                    return write!(f, "0");
                }
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    if matches!(x, Self::Sum(_)) {
                        write!(f, "({x})")?;
                    } else {
                        write!(f, "{x}")?;
                    }
                }
                Ok(())
            }
            Self::Unary(UnaryFn::Sqrt, x) => write!(f, "sqrt({x})"),
            Self::Unary(UnaryFn::Log10, x) => write!(f, "log10({x})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("expression error at column {column}: {message}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Name(String),
    Number(f64),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if "+-*/^()".contains(c) {
            out.push((i, Token::Op(c)));
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let value = text.parse::<f64>().map_err(|_| ParseError {
                column: start,
                message: format!("invalid number `{text}`"),
            })?;
            out.push((start, Token::Number(value)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Token::Name(src[start..i].to_string())));
        } else {
            return Err(ParseError {
                column: i,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.1)
    }

    fn column(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            column: self.column(),
            message: message.into(),
        })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<(), ParseError> {
        if self.eat(op) {
            Ok(())
        } else {
            self.err(format!("expected `{op}`"))
        }
    }

    fn guard(&self, depth: usize) -> Result<(), ParseError> {
        if depth > MAX_DEPTH {
            self.err(format!("nesting deeper than {MAX_DEPTH}"))
        } else {
            Ok(())
        }
    }

    fn sum(&mut self, depth: usize) -> Result<Expression, ParseError> {
        self.guard(depth)?;
        let mut terms = vec![self.product(depth + 1)?];
        loop {
            if self.eat('+') {
                terms.push(self.product(depth + 1)?);
            } else if self.eat('-') {
                let t = self.product(depth + 1)?;
                terms.push(Expression::Product(vec![Expression::Literal(-1.0), t]));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expression::Sum(terms)
        })
    }

    fn product(&mut self, depth: usize) -> Result<Expression, ParseError> {
        self.guard(depth)?;
        let mut factors = vec![self.power(depth + 1)?];
        loop {
            if self.eat('*') {
                factors.push(self.power(depth + 1)?);
            } else if self.eat('/') {
                let d = self.power(depth + 1)?;
                factors.push(Expression::Power(Box::new(d), -Rational64::one()));
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expression::Product(factors)
        })
    }

    fn power(&mut self, depth: usize) -> Result<Expression, ParseError> {
        self.guard(depth)?;
        let base = self.atom(depth + 1)?;
        if !self.eat('^') {
            return Ok(base);
        }
        // A bare exponent is an integer; `/` after it is division.
        let exponent = if self.eat('(') {
            let text = self.rational_text(true)?;
            self.expect(')')?;
            text
        } else {
            self.rational_text(false)?
        };
        let r = match parse_rational(&exponent) {
            Ok(r) => r,
            Err(m) => return self.err(m),
        };
        Ok(Expression::Power(Box::new(base), r))
    }

    /// `[-]int[/int]` collected back into text for `parse_rational`.
    fn rational_text(&mut self, allow_fraction: bool) -> Result<String, ParseError> {
        let mut text = String::new();
        if self.eat('-') {
            text.push('-');
        }
        let int = |p: &mut Self| -> Result<String, ParseError> {
            match p.peek() {
                Some(Token::Number(x)) if x.fract() == 0.0 && *x >= 0.0 => {
                    let s = format!("{}", *x as i64);
                    p.pos += 1;
                    Ok(s)
                }
                _ => p.err("expected an integer exponent"),
            }
        };
        text.push_str(&int(self)?);
        if allow_fraction && self.eat('/') {
            text.push('/');
            text.push_str(&int(self)?);
        }
        Ok(text)
    }

    fn atom(&mut self, depth: usize) -> Result<Expression, ParseError> {
        self.guard(depth)?;
        match self.peek().cloned() {
            Some(Token::Number(x)) => {
                self.pos += 1;
                Ok(Expression::Literal(x))
            }
            Some(Token::Name(n)) => {
                self.pos += 1;
                let func = match n.as_str() {
                    "sqrt" => Some(UnaryFn::Sqrt),
                    "log10" => Some(UnaryFn::Log10),
                    _ => None,
                };
                match func {
                    Some(func) if self.peek() == Some(&Token::Op('(')) => {
                        self.pos += 1;
                        let inner = self.sum(depth + 1)?;
                        self.expect(')')?;
                        Ok(Expression::Unary(func, Box::new(inner)))
                    }
                    _ => Ok(Expression::Const(n)),
                }
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let inner = self.sum(depth + 1)?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(Token::Op('-')) => {
                self.pos += 1;
                match self.atom(depth + 1)? {
                    Expression::Literal(x) => Ok(Expression::Literal(-x)),
                    other => Ok(Expression::Product(vec![Expression::Literal(-1.0), other])),
                }
            }
            Some(Token::Op(c)) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of expression"),
        }
    }
}

/// Parses the infix grammar: `*`, `/`, `+`, `-`, `^<rational>`, `sqrt()`,
/// `log10()`, parentheses, constant names and numeric literals.
pub fn parse_expression(src: &str) -> Result<Expression, ParseError> {
    let mut p = Parser {
        tokens: tokenize(src)?,
        pos: 0,
        end: src.len(),
    };
    let e = p.sum(1)?;
    if p.pos != p.tokens.len() {
        return p.err("trailing input");
    }
    if e.depth() > MAX_DEPTH {
        return p.err(format!("nesting deeper than {MAX_DEPTH}"));
    }
    Ok(e)
}
