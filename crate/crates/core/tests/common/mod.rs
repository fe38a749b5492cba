//! Helpers shared by the integration tests and the acceptance runner.
#![allow(dead_code)]

use fracpicard::{ProblemConfig, ProblemError, Violation};
use rand::{Rng, RngCore};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Tok>, String> {
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
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                i += 1;
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Num(s.parse().map_err(|_| format!("bad number {s}"))?));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else if c == '(' {
            out.push(Tok::LParen);
            i += 1;
        } else if c == ')' {
            out.push(Tok::RParen);
            i += 1;
        } else {
            return Err(format!("unexpected {c}"));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
enum StackItem {
    Op(char),
    Neg,
    Func(String),
    LParen,
}

#[derive(Debug, Clone, PartialEq)]
enum Rpn {
    Num(f64),
    Var(String),
    Op(char),
    Neg,
    Func(String),
}

fn precedence(item: &StackItem) -> u8 {
    match item {
        StackItem::Op('+') | StackItem::Op('-') => 1,
        StackItem::Op('*') | StackItem::Op('/') => 2,
        StackItem::Neg => 3,
        StackItem::Op('^') => 4,
        _ => 0,
    }
}

fn to_rpn(tokens: &[Tok]) -> Result<Vec<Rpn>, String> {
    let mut out = Vec::new();
    let mut stack: Vec<StackItem> = Vec::new();
    // true where an operand is expected, i.e. a '-' is a prefix minus
    let mut expect_operand = true;
    for (i, tok) in tokens.iter().enumerate() {
        match tok {
            Tok::Num(v) => {
                out.push(Rpn::Num(*v));
                expect_operand = false;
            }
            Tok::Ident(name) => {
                if tokens.get(i + 1) == Some(&Tok::LParen) {
                    stack.push(StackItem::Func(name.clone()));
                } else {
                    out.push(Rpn::Var(name.clone()));
                    expect_operand = false;
                }
            }
            Tok::Op('-') if expect_operand => stack.push(StackItem::Neg),
            Tok::Op(c) => {
                let incoming = StackItem::Op(*c);
                let p_in = precedence(&incoming);
                let right_assoc = *c == '^';
                while let Some(top) = stack.last() {
                    let p_top = precedence(top);
                    let pops = matches!(top, StackItem::Op(_) | StackItem::Neg)
                        && (p_top > p_in || (p_top == p_in && !right_assoc));
                    if !pops {
                        break;
                    }
                    out.push(match stack.pop().unwrap() {
                        StackItem::Op(o) => Rpn::Op(o),
                        _ => Rpn::Neg,
                    });
                }
                stack.push(incoming);
                expect_operand = true;
            }
            Tok::LParen => {
                stack.push(StackItem::LParen);
                expect_operand = true;
            }
            Tok::RParen => {
                loop {
                    match stack.pop() {
                        Some(StackItem::LParen) => break,
                        Some(StackItem::Op(o)) => out.push(Rpn::Op(o)),
                        Some(StackItem::Neg) => out.push(Rpn::Neg),
                        _ => return Err("unbalanced ')'".into()),
                    }
                }
                if let Some(StackItem::Func(_)) = stack.last() {
                    if let Some(StackItem::Func(f)) = stack.pop() {
                        out.push(Rpn::Func(f));
                    }
                }
                expect_operand = false;
            }
        }
    }
    while let Some(item) = stack.pop() {
        match item {
            StackItem::Op(o) => out.push(Rpn::Op(o)),
            StackItem::Neg => out.push(Rpn::Neg),
            _ => return Err("unbalanced '('".into()),
        }
    }
    Ok(out)
}

/// Shunting-yard evaluation with plain IEEE semantics: no domain checks.
pub fn shunting_yard_eval(src: &str, t: f64, z: &[f64]) -> Result<f64, String> {
    let rpn = to_rpn(&tokenize(src)?)?;
    let mut st: Vec<f64> = Vec::new();
    for item in rpn {
        match item {
            Rpn::Num(v) => st.push(v),
            Rpn::Var(name) => st.push(match name.as_str() {
                "t" => t,
                "y" => *z.last().ok_or("no z")?,
                _ => {
                    let k: usize = name[1..].parse().map_err(|_| format!("unknown {name}"))?;
                    *z.get(k - 1).ok_or("index")?
                }
            }),
            Rpn::Neg => {
                let a = st.pop().ok_or("stack")?;
                st.push(-a);
            }
            Rpn::Op(o) => {
                let b = st.pop().ok_or("stack")?;
                let a = st.pop().ok_or("stack")?;
                st.push(match o {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    '/' => a / b,
                    '^' => a.powf(b),
                    _ => unreachable!(),
                });
            }
            Rpn::Func(f) => {
                let a = st.pop().ok_or("stack")?;
                st.push(match f.as_str() {
                    "sin" => a.sin(),
                    "cos" => a.cos(),
                    "exp" => a.exp(),
                    "log" => a.ln(),
                    "abs" => a.abs(),
                    "sqrt" => a.sqrt(),
                    _ => return Err(format!("unknown function {f}")),
                });
            }
        }
    }
    if st.len() != 1 {
        return Err("leftover operands".into());
    }
    Ok(st[0])
}

fn random_number(rng: &mut dyn RngCore) -> String {
    match rng.random_range(0..4) {
        0 => rng.random_range(0..10).to_string(),
        1 => format!("{:.3}", rng.random_range(0.0..5.0)),
        2 => format!(
            "{:.2}e{}",
            rng.random_range(1.0..9.0),
            rng.random_range(-3..3)
        ),
        _ => format!("0.{}", rng.random_range(1..999)),
    }
}

/// Random expression over `t`, `z1..zm` whose every operation stays inside
/// its real domain (guarded logarithms, roots, divisors and bases).
pub fn random_expression(rng: &mut dyn RngCore, m: usize, depth: u32) -> String {
    if depth == 0 || rng.random_range(0..4) == 0 {
        return match rng.random_range(0..3) {
            0 => random_number(rng),
            1 if m > 0 => format!("z{}", rng.random_range(1..=m)),
            _ => "t".to_string(),
        };
    }
    let a = random_expression(rng, m, depth - 1);
    let b = random_expression(rng, m, depth - 1);
    match rng.random_range(0..12) {
        0 => format!("{a} + {b}"),
        1 => format!("{a} - {b}"),
        2 => format!("({a}) * ({b})"),
        3 => format!("({a}) / (abs({b}) + 1)"),
        4 => format!("(abs({a}) + 0.5)^(sin({b}))"),
        5 => format!("-({a})"),
        6 => format!("-{a}^2"),
        7 => format!("sin({a}) * {b}"),
        8 => format!("cos({a}) - {b}"),
        9 => format!("exp(sin({a}))"),
        10 => format!("log(abs({a}) + 1) * sqrt(abs({b}))"),
        _ => format!("2^-{a}^2 * {b}"),
    }
}

pub fn base_config() -> ProblemConfig {
    ProblemConfig {
        alpha: 1.5,
        derivative_orders: vec![0.5],
        initial_values: vec![0.0, 0.0],
        horizon: 1.0,
        gamma: 0.0,
        rhs: "-z1".into(),
    }
}

/// Name of the violated condition, used to compare against expectations.
pub fn violation_kind(v: &Violation) -> &'static str {
    match v {
        Violation::NonPositiveOrder(_) => "non-positive order",
        Violation::PrincipalNotAbove { .. } => "principal not above",
        Violation::NotDecreasing { .. } => "not decreasing",
        Violation::NegativeInnerOrder { .. } => "negative inner order",
        Violation::InitialValueCount { .. } => "initial value count",
        Violation::NonFiniteInitialValue { .. } => "non-finite initial value",
        Violation::BadHorizon(_) => "bad horizon",
        Violation::NegativeGamma(_) => "negative gamma",
        Violation::GammaTooLarge { .. } => "gamma too large",
        Violation::GammaForIntegerOrder { .. } => "gamma for integer order",
        Violation::InnerOrderTooHigh { .. } => "inner order too high",
        Violation::YAliasWithoutZeroOrder => "y alias",
        Violation::Rhs(_) => "rhs",
    }
}

/// Fifty invalid configurations, each paired with the condition it breaks.
pub fn invalid_matrix() -> Vec<(ProblemConfig, &'static str)> {
    let mut cases = Vec::new();
    let mut push = |f: &dyn Fn(&mut ProblemConfig), kind: &'static str| {
        let mut c = base_config();
        f(&mut c);
        cases.push((c, kind));
    };
    for a in [0.0, -0.5, -2.0, f64::NAN, f64::INFINITY] {
        push(&|c| c.alpha = a, "non-positive order");
    }
    for (a, a1, b) in [
        (0.5, 0.7, 1),
        (1.5, 1.5, 2),
        (0.3, 2.0, 1),
        (2.0, 2.5, 2),
        (1.2, 1.9, 2),
    ] {
        push(
            &|c| {
                c.alpha = a;
                c.derivative_orders = vec![a1];
                c.initial_values = vec![0.0; b];
            },
            "principal not above",
        );
    }
    for (a, orders, b) in [
        (1.0, vec![0.5, 0.5], 1),
        (2.5, vec![1.2, 1.4], 3),
        (2.5, vec![1.0, 0.3, 0.6], 3),
        (1.8, vec![0.2, 0.9], 2),
        (3.5, vec![2.0, 1.0, 1.0], 4),
    ] {
        let rhs = format!("z{}", orders.len());
        push(
            &|c| {
                c.alpha = a;
                c.derivative_orders = orders.clone();
                c.initial_values = vec![0.0; b];
                c.rhs = rhs.clone();
            },
            "not decreasing",
        );
    }
    for orders in [
        vec![-0.1],
        vec![0.5, -0.2],
        vec![f64::NAN],
        vec![0.9, 0.4, -3.0],
    ] {
        let rhs = format!("z{}", orders.len());
        push(
            &|c| {
                c.derivative_orders = orders.clone();
                c.rhs = rhs.clone();
            },
            "negative inner order",
        );
    }
    for (a, b) in [(1.5, 1), (1.5, 3), (0.5, 0), (0.5, 2), (2.0, 1)] {
        push(
            &|c| {
                c.alpha = a;
                c.derivative_orders = vec![0.0];
                c.initial_values = vec![0.0; b];
            },
            "initial value count",
        );
    }
    for b in [vec![f64::NAN, 0.0], vec![0.0, f64::INFINITY]] {
        push(
            &|c| c.initial_values = b.clone(),
            "non-finite initial value",
        );
    }
    for t in [0.0, -1.0, f64::INFINITY, f64::NAN] {
        push(&|c| c.horizon = t, "bad horizon");
    }
    for g in [-0.1, -1.0, f64::NAN] {
        push(&|c| c.gamma = g, "negative gamma");
    }
    for (a, g, b) in [
        (0.5, 0.5, 1),
        (0.5, 0.9, 1),
        (1.5, 0.5, 2),
        (1.5, 0.7, 2),
        (2.3, 0.3, 3),
    ] {
        push(
            &|c| {
                c.alpha = a;
                c.gamma = g;
                c.derivative_orders = vec![0.0];
                c.initial_values = vec![0.0; b];
            },
            "gamma too large",
        );
    }
    for (a, g) in [(1.0, 0.2), (2.0, 0.5), (3.0, 0.1)] {
        push(
            &|c| {
                c.alpha = a;
                c.gamma = g;
                c.derivative_orders = vec![0.0];
                c.initial_values = vec![0.0; a as usize];
            },
            "gamma for integer order",
        );
    }
    for (a, a1) in [(1.5, 1.2), (2.5, 2.1), (0.7, 0.5), (1.9, 1.01), (3.2, 3.1)] {
        push(
            &|c| {
                c.alpha = a;
                c.derivative_orders = vec![a1];
                c.initial_values = vec![0.0; a.ceil() as usize];
            },
            "inner order too high",
        );
    }
    push(&|c| c.rhs = "y".into(), "y alias");
    push(
        &|c| {
            c.alpha = 2.5;
            c.derivative_orders = vec![1.5, 0.5];
            c.initial_values = vec![0.0; 3];
            c.rhs = "y + z1".into();
        },
        "y alias",
    );
    for rhs in ["z2", "foo(t)"] {
        push(&|c| c.rhs = rhs.into(), "rhs");
    }
    cases
}

/// Kinds reported by `build` for an invalid config, or `None` if accepted.
pub fn rejected_kinds(c: &ProblemConfig) -> Option<Vec<&'static str>> {
    match c.build() {
        Ok(_) => None,
        Err(ProblemError::Invalid(v)) => Some(v.iter().map(violation_kind).collect()),
        Err(ProblemError::Json(_)) => Some(vec!["json"]),
    }
}
