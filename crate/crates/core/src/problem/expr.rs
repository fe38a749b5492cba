//! Right-hand side expressions `f(t, z1, …, zm)`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-t^2`
//! is `-(t^2)`. Identifiers are `t`, `z1`…`zm`, and `y`, which names `zm`
//! (valid only when the last inner order is zero).

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    T,
    /// One-based index into the inner derivatives.
    Z(usize),
    Y,
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
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

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
}

#[derive(Debug, Clone, PartialEq)]
pub enum RhsExpr {
    Num(f64),
    Var(Var),
    Neg(Box<RhsExpr>),
    Add(Box<RhsExpr>, Box<RhsExpr>),
    Sub(Box<RhsExpr>, Box<RhsExpr>),
    Mul(Box<RhsExpr>, Box<RhsExpr>),
    Div(Box<RhsExpr>, Box<RhsExpr>),
    Pow(Box<RhsExpr>, Box<RhsExpr>),
    Call(Func, Box<RhsExpr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier '{name}' at {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("function '{name}' at {pos} takes 1 argument, got {found}")]
    Arity {
        name: String,
        pos: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error in '{expr}': {op} of {arg}")]
    Domain {
        op: &'static str,
        arg: f64,
        expr: String,
    },
    #[error("expected {expected} inner-derivative values, got {found}")]
    WrongArity { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut k = i + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                        i = k;
                    }
                }
                let s = &text[start..i];
                let v: f64 = s.parse().map_err(|_| ParseError::Syntax {
                    pos: start,
                    msg: format!("malformed number '{s}'"),
                })?;
                if !v.is_finite() {
                    return Err(ParseError::Syntax {
                        pos: start,
                        msg: format!("number '{s}' is out of range"),
                    });
                }
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    pos: start,
                    msg: format!("unexpected character '{ch}'"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    m: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn expr(&mut self) -> Result<RhsExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = RhsExpr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = RhsExpr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<RhsExpr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = RhsExpr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = RhsExpr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<RhsExpr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(RhsExpr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<RhsExpr, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.unary()?;
            return Ok(RhsExpr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<RhsExpr, ParseError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Num(v) => Ok(RhsExpr::Num(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.syntax("expected ')'");
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    self.call(name, pos)
                } else {
                    self.variable(name, pos)
                }
            }
            Tok::End => Err(ParseError::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
            other => Err(ParseError::Syntax {
                pos,
                msg: format!("unexpected token {other:?}"),
            }),
        }
    }

    fn call(&mut self, name: String, pos: usize) -> Result<RhsExpr, ParseError> {
        let func = Func::from_name(&name).ok_or(ParseError::UnknownIdentifier {
            name: name.clone(),
            pos,
        })?;
        self.bump(); // '('
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            args.push(self.expr()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                args.push(self.expr()?);
            }
        }
        if *self.peek() != Tok::RParen {
            return self.syntax("expected ')' after function argument");
        }
        self.bump();
        if args.len() != 1 {
            return Err(ParseError::Arity {
                name,
                pos,
                found: args.len(),
            });
        }
        Ok(RhsExpr::Call(func, Box::new(args.remove(0))))
    }

    fn variable(&mut self, name: String, pos: usize) -> Result<RhsExpr, ParseError> {
        let unknown = || ParseError::UnknownIdentifier {
            name: name.clone(),
            pos,
        };
        if name == "t" {
            return Ok(RhsExpr::Var(Var::T));
        }
        if name == "y" {
            return if self.m >= 1 {
                Ok(RhsExpr::Var(Var::Y))
            } else {
                Err(unknown())
            };
        }
        if let Some(digits) = name.strip_prefix('z') {
            if !digits.is_empty()
                && digits.bytes().all(|b| b.is_ascii_digit())
                && !digits.starts_with('0')
            {
                if let Ok(k) = digits.parse::<usize>() {
                    if k <= self.m {
                        return Ok(RhsExpr::Var(Var::Z(k)));
                    }
                }
            }
        }
        if Func::from_name(&name).is_some() {
            return Err(ParseError::Syntax {
                pos,
                msg: format!("function '{name}' must be called with parentheses"),
            });
        }
        Err(unknown())
    }
}

/// Parses `text` as a right-hand side over `t` and `m` inner derivatives.
pub fn parse_rhs(text: &str, m: usize) -> Result<RhsExpr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, m };
    if *p.peek() == Tok::End {
        return p.syntax("empty expression");
    }
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.syntax("unexpected trailing input");
    }
    Ok(e)
}

pub fn eval_rhs(expr: &RhsExpr, t: f64, z: &[f64]) -> Result<f64, EvalError> {
    expr.eval(t, z)
}

fn domain(op: &'static str, arg: f64, expr: &RhsExpr) -> EvalError {
    EvalError::Domain {
        op,
        arg,
        expr: expr.to_string(),
    }
}

impl RhsExpr {
    /// Evaluates with `z[k-1]` standing for `zk`; `y` reads the last entry.
    pub fn eval(&self, t: f64, z: &[f64]) -> Result<f64, EvalError> {
        let need = self.max_z_index();
        if need > z.len() {
            return Err(EvalError::WrongArity {
                expected: need,
                found: z.len(),
            });
        }
        self.eval_inner(t, z)
    }

    fn eval_inner(&self, t: f64, z: &[f64]) -> Result<f64, EvalError> {
        Ok(match self {
            RhsExpr::Num(v) => *v,
            RhsExpr::Var(Var::T) => t,
            RhsExpr::Var(Var::Z(k)) => z[k - 1],
            RhsExpr::Var(Var::Y) => z[z.len() - 1],
            RhsExpr::Neg(a) => -a.eval_inner(t, z)?,
            RhsExpr::Add(a, b) => a.eval_inner(t, z)? + b.eval_inner(t, z)?,
            RhsExpr::Sub(a, b) => a.eval_inner(t, z)? - b.eval_inner(t, z)?,
            RhsExpr::Mul(a, b) => a.eval_inner(t, z)? * b.eval_inner(t, z)?,
            RhsExpr::Div(a, b) => {
                let num = a.eval_inner(t, z)?;
                let den = b.eval_inner(t, z)?;
                if den == 0.0 {
                    return Err(domain("division", den, self));
                }
                num / den
            }
            RhsExpr::Pow(a, b) => {
                let base = a.eval_inner(t, z)?;
                let exp = b.eval_inner(t, z)?;
                if base == 0.0 && exp < 0.0 {
                    return Err(domain("negative power of zero", exp, self));
                }
                let v = base.powf(exp);
                if v.is_nan() && !base.is_nan() && !exp.is_nan() {
                    return Err(domain("fractional power of negative base", base, self));
                }
                v
            }
            RhsExpr::Call(f, a) => {
                let x = a.eval_inner(t, z)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Abs => x.abs(),
                    Func::Log => {
                        if !(x > 0.0) {
                            return Err(domain("log", x, self));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(domain("sqrt", x, self));
                        }
                        x.sqrt()
                    }
                }
            }
        })
    }

    /// Largest `zk` index referenced; `y` counts as index 1 (it reads the last slot).
    fn max_z_index(&self) -> usize {
        match self {
            RhsExpr::Num(_) | RhsExpr::Var(Var::T) => 0,
            RhsExpr::Var(Var::Z(k)) => *k,
            RhsExpr::Var(Var::Y) => 1,
            RhsExpr::Neg(a) | RhsExpr::Call(_, a) => a.max_z_index(),
            RhsExpr::Add(a, b)
            | RhsExpr::Sub(a, b)
            | RhsExpr::Mul(a, b)
            | RhsExpr::Div(a, b)
            | RhsExpr::Pow(a, b) => a.max_z_index().max(b.max_z_index()),
        }
    }

    pub fn uses_y(&self) -> bool {
        self.any_var(&|v| v == Var::Y)
    }

    /// True when neither `y` nor any `zk` appears.
    pub fn is_z_free(&self) -> bool {
        !self.any_var(&|v| v != Var::T)
    }

    fn any_var(&self, pred: &dyn Fn(Var) -> bool) -> bool {
        match self {
            RhsExpr::Num(_) => false,
            RhsExpr::Var(v) => pred(*v),
            RhsExpr::Neg(a) | RhsExpr::Call(_, a) => a.any_var(pred),
            RhsExpr::Add(a, b)
            | RhsExpr::Sub(a, b)
            | RhsExpr::Mul(a, b)
            | RhsExpr::Div(a, b)
            | RhsExpr::Pow(a, b) => a.any_var(pred) || b.any_var(pred),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            RhsExpr::Add(..) | RhsExpr::Sub(..) => 1,
            RhsExpr::Mul(..) | RhsExpr::Div(..) => 2,
            RhsExpr::Neg(_) => 3,
            RhsExpr::Pow(..) => 4,
            RhsExpr::Num(v) if *v < 0.0 || v.is_sign_negative() => 3,
            _ => 5,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &RhsExpr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for RhsExpr {
    /// Prints with the minimum parentheses needed for the parser to
    /// rebuild the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binary = |f: &mut fmt::Formatter<'_>, a: &RhsExpr, op: &str, b: &RhsExpr, p: u8| {
            write_operand(f, a, p)?;
            write!(f, " {op} ")?;
            write_operand(f, b, p + 1)
        };
        match self {
            RhsExpr::Num(v) => write!(f, "{v}"),
            RhsExpr::Var(Var::T) => f.write_str("t"),
            RhsExpr::Var(Var::Y) => f.write_str("y"),
            RhsExpr::Var(Var::Z(k)) => write!(f, "z{k}"),
            RhsExpr::Neg(a) => {
                f.write_str("-")?;
                write_operand(f, a, 3)
            }
            RhsExpr::Add(a, b) => binary(f, a, "+", b, 1),
            RhsExpr::Sub(a, b) => binary(f, a, "-", b, 1),
            RhsExpr::Mul(a, b) => binary(f, a, "*", b, 2),
            RhsExpr::Div(a, b) => binary(f, a, "/", b, 2),
            RhsExpr::Pow(a, b) => {
                write_operand(f, a, 5)?;
                f.write_str("^")?;
                write_operand(f, b, 3)
            }
            RhsExpr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
