//! Scalar expressions over `x1..xn` with exact first derivatives.
//!
//! Text is parsed by a small recursive-descent parser into an AST, which is
//! then flattened into a postfix tape. Evaluation walks the tape once,
//! carrying a [`JetValue`] (value plus gradient) per stack slot, so partials
//! are exact up to rounding for every admitted primitive.

use std::fmt;

use crate::error::{Error, Result};

/// Values of `sqrt` arguments in `[-SQRT_TOLERANCE, 0]` are treated as an
/// exact zero; anything more negative is a domain error.
pub const SQRT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }

    fn lookup(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    /// Zero-based variable index (`x1` is `Var(0)`).
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, u32),
    Call(Func, Box<Node>),
}

impl Node {
    fn precedence(&self) -> u8 {
        match self {
            Node::Add(..) | Node::Sub(..) => 1,
            Node::Mul(..) | Node::Div(..) => 2,
            Node::Neg(_) => 3,
            Node::Pow(..) => 4,
            Node::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => 3,
            _ => 5,
        }
    }
}

/// First-order jet: a value together with its partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JetValue {
    pub value: f64,
    grad: [f64; 3],
    n: usize,
    /// Set when a `sqrt` was evaluated at zero and its derivative replaced by
    /// the zero subgradient.
    pub kink: bool,
}

impl JetValue {
    pub fn constant(value: f64, n: usize) -> Self {
        JetValue {
            value,
            grad: [0.0; 3],
            n,
            kink: false,
        }
    }

    pub fn partials(&self) -> &[f64] {
        &self.grad[..self.n]
    }

    /// Gradient padded to three components.
    pub fn gradient(&self) -> [f64; 3] {
        self.grad
    }
}

#[derive(Debug, Clone, Copy)]
enum Instr {
    Const(f64),
    Var(usize),
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow(u32),
    Call(Func),
}

/// A parsed, immutable scalar expression of fixed arity.
#[derive(Debug, Clone)]
pub struct Expression {
    ast: Node,
    arity: usize,
    tape: Vec<Instr>,
    max_stack: usize,
}

impl PartialEq for Expression {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.ast == other.ast
    }
}

#[derive(Clone, Copy)]
struct Jet {
    v: f64,
    d: [f64; 3],
    kink: bool,
}

impl Jet {
    const ZERO: Jet = Jet {
        v: 0.0,
        d: [0.0; 3],
        kink: false,
    };
}

impl Expression {
    pub fn parse(text: &str, arity: usize) -> Result<Expression> {
        if !(1..=3).contains(&arity) {
            return Err(Error::ArityMismatch(format!(
                "arity {arity} outside the supported range 1..=3"
            )));
        }
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
            arity,
        };
        p.skip_ws();
        if p.pos == p.src.len() {
            return Err(Error::Syntax {
                offset: 0,
                message: "empty expression".into(),
            });
        }
        let ast = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(Expression::from_ast(ast, arity))
    }

    pub fn from_ast(ast: Node, arity: usize) -> Expression {
        let mut tape = Vec::new();
        compile(&ast, &mut tape);
        let mut depth = 0usize;
        let mut max_stack = 0usize;
        for ins in &tape {
            match ins {
                Instr::Const(_) | Instr::Var(_) => depth += 1,
                Instr::Add | Instr::Sub | Instr::Mul | Instr::Div => depth -= 1,
                _ => {}
            }
            max_stack = max_stack.max(depth);
        }
        Expression {
            ast,
            arity,
            tape,
            max_stack,
        }
    }

    pub fn constant(c: f64, arity: usize) -> Expression {
        Expression::from_ast(Node::Const(c), arity)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn ast(&self) -> &Node {
        &self.ast
    }

    /// Value only; cheaper than [`Expression::eval_jet`].
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        self.check_point(point)?;
        let mut small = [0.0f64; 32];
        let mut big;
        let stack: &mut [f64] = if self.max_stack <= small.len() {
            &mut small
        } else {
            big = vec![0.0; self.max_stack];
            &mut big
        };
        let mut sp = 0usize;
        for ins in &self.tape {
            match *ins {
                Instr::Const(c) => {
                    stack[sp] = c;
                    sp += 1;
                }
                Instr::Var(i) => {
                    stack[sp] = point[i];
                    sp += 1;
                }
                Instr::Neg => stack[sp - 1] = -stack[sp - 1],
                Instr::Add | Instr::Sub | Instr::Mul | Instr::Div => {
                    let b = stack[sp - 1];
                    let a = stack[sp - 2];
                    sp -= 1;
                    stack[sp - 1] = match *ins {
                        Instr::Add => a + b,
                        Instr::Sub => a - b,
                        Instr::Mul => a * b,
                        _ => {
                            if b == 0.0 {
                                return Err(Error::Domain("division by zero".into()));
                            }
                            a / b
                        }
                    };
                }
                Instr::Pow(k) => stack[sp - 1] = powi(stack[sp - 1], k),
                Instr::Call(f) => {
                    let a = stack[sp - 1];
                    stack[sp - 1] = match f {
                        Func::Sin => a.sin(),
                        Func::Cos => a.cos(),
                        Func::Exp => a.exp(),
                        Func::Sqrt => sqrt_checked(a)?,
                    };
                }
            }
        }
        let v = stack[0];
        if !v.is_finite() {
            return Err(Error::Domain(format!("non-finite value at {point:?}")));
        }
        Ok(v)
    }

    pub fn eval_jet(&self, point: &[f64]) -> Result<JetValue> {
        self.check_point(point)?;
        let n = self.arity;
        let mut small = [Jet::ZERO; 24];
        let mut big;
        let stack: &mut [Jet] = if self.max_stack <= small.len() {
            &mut small
        } else {
            big = vec![Jet::ZERO; self.max_stack];
            &mut big
        };
        let mut sp = 0usize;
        for ins in &self.tape {
            match *ins {
                Instr::Const(c) => {
                    stack[sp] = Jet {
                        v: c,
                        ..Jet::ZERO
                    };
                    sp += 1;
                }
                Instr::Var(i) => {
                    let mut d = [0.0; 3];
                    d[i] = 1.0;
                    stack[sp] = Jet {
                        v: point[i],
                        d,
                        kink: false,
                    };
                    sp += 1;
                }
                Instr::Neg => {
                    let a = &mut stack[sp - 1];
                    a.v = -a.v;
                    for k in 0..n {
                        a.d[k] = -a.d[k];
                    }
                }
                Instr::Add | Instr::Sub | Instr::Mul | Instr::Div => {
                    let b = stack[sp - 1];
                    let a = stack[sp - 2];
                    sp -= 1;
                    let mut r = Jet {
                        v: 0.0,
                        d: [0.0; 3],
                        kink: a.kink || b.kink,
                    };
                    match *ins {
                        Instr::Add => {
                            r.v = a.v + b.v;
                            for k in 0..n {
                                r.d[k] = a.d[k] + b.d[k];
                            }
                        }
                        Instr::Sub => {
                            r.v = a.v - b.v;
                            for k in 0..n {
                                r.d[k] = a.d[k] - b.d[k];
                            }
                        }
                        Instr::Mul => {
                            r.v = a.v * b.v;
                            for k in 0..n {
                                r.d[k] = a.d[k] * b.v + a.v * b.d[k];
                            }
                        }
                        _ => {
                            if b.v == 0.0 {
                                return Err(Error::Domain("division by zero".into()));
                            }
                            r.v = a.v / b.v;
                            for k in 0..n {
                                r.d[k] = (a.d[k] - r.v * b.d[k]) / b.v;
                            }
                        }
                    }
                    stack[sp - 1] = r;
                }
                Instr::Pow(e) => {
                    let a = &mut stack[sp - 1];
                    let outer = if e == 0 {
                        0.0
                    } else {
                        e as f64 * powi(a.v, e - 1)
                    };
                    a.v = powi(a.v, e);
                    for k in 0..n {
                        a.d[k] *= outer;
                    }
                }
                Instr::Call(f) => {
                    let a = &mut stack[sp - 1];
                    let (v, outer) = match f {
                        Func::Sin => (a.v.sin(), a.v.cos()),
                        Func::Cos => (a.v.cos(), -a.v.sin()),
                        Func::Exp => {
                            let e = a.v.exp();
                            (e, e)
                        }
                        Func::Sqrt => {
                            let s = sqrt_checked(a.v)?;
                            if s == 0.0 {
                                a.kink = true;
                                (0.0, 0.0)
                            } else {
                                (s, 0.5 / s)
                            }
                        }
                    };
                    a.v = v;
                    for k in 0..n {
                        a.d[k] *= outer;
                    }
                }
            }
        }
        let top = stack[0];
        if !top.v.is_finite() || top.d.iter().any(|d| !d.is_finite()) {
            return Err(Error::Domain(format!("non-finite jet at {point:?}")));
        }
        Ok(JetValue {
            value: top.v,
            grad: top.d,
            n,
            kink: top.kink,
        })
    }

    /// Largest discrepancy between a central finite difference with the
    /// given step and the forward-mode partial, over all variables.
    pub fn check_derivatives(&self, point: &[f64], step: f64) -> Result<f64> {
        let jet = self.eval_jet(point)?;
        let mut worst = 0.0f64;
        let mut p = point.to_vec();
        for i in 0..self.arity {
            let x = p[i];
            p[i] = x + step;
            let hi = self.eval(&p)?;
            p[i] = x - step;
            let lo = self.eval(&p)?;
            p[i] = x;
            let fd = (hi - lo) / (2.0 * step);
            worst = worst.max((fd - jet.partials()[i]).abs());
        }
        Ok(worst)
    }

    fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() < self.arity {
            return Err(Error::ArityMismatch(format!(
                "expression of arity {} evaluated at a point of length {}",
                self.arity,
                point.len()
            )));
        }
        Ok(())
    }
}

pub fn parse(text: &str, arity: usize) -> Result<Expression> {
    Expression::parse(text, arity)
}

fn powi(x: f64, k: u32) -> f64 {
    x.powi(k.min(i32::MAX as u32) as i32)
}

fn sqrt_checked(a: f64) -> Result<f64> {
    if a > 0.0 {
        Ok(a.sqrt())
    } else if a >= -SQRT_TOLERANCE {
        Ok(0.0)
    } else {
        Err(Error::Domain(format!("sqrt of negative value {a:e}")))
    }
}

fn compile(node: &Node, out: &mut Vec<Instr>) {
    match node {
        Node::Const(c) => out.push(Instr::Const(*c)),
        Node::Var(i) => out.push(Instr::Var(*i)),
        Node::Neg(a) => {
            compile(a, out);
            out.push(Instr::Neg);
        }
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            compile(a, out);
            compile(b, out);
            out.push(match node {
                Node::Add(..) => Instr::Add,
                Node::Sub(..) => Instr::Sub,
                Node::Mul(..) => Instr::Mul,
                _ => Instr::Div,
            });
        }
        Node::Pow(a, k) => {
            compile(a, out);
            out.push(Instr::Pow(*k));
        }
        Node::Call(f, a) => {
            compile(a, out);
            out.push(Instr::Call(*f));
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    arity: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if c == b'+' {
                Node::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if c == b'*' {
                Node::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node> {
        let mut base = self.atom()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.error("exponent must be a nonnegative integer literal"));
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
            let k: u32 = text.parse().map_err(|_| Error::Syntax {
                offset: start,
                message: "exponent too large".into(),
            })?;
            base = Node::Pow(Box::new(base), k);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let s = self.src;
        while self.pos < s.len() && (s[self.pos].is_ascii_digit() || s[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            let mut look = self.pos + 1;
            if look < s.len() && (s[look] == b'+' || s[look] == b'-') {
                look += 1;
            }
            if look < s.len() && s[look].is_ascii_digit() {
                self.pos = look;
                while self.pos < s.len() && s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&s[start..self.pos]).unwrap_or("");
        text.parse::<f64>()
            .map(Node::Const)
            .map_err(|_| Error::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })
    }

    fn identifier(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        if let Some(f) = Func::lookup(name) {
            if self.peek() != Some(b'(') {
                return Err(self.error(&format!("expected `(` after `{name}`")));
            }
            self.pos += 1;
            let arg = self.expr()?;
            if self.peek() != Some(b')') {
                return Err(self.error("expected `)`"));
            }
            self.pos += 1;
            return Ok(Node::Call(f, Box::new(arg)));
        }
        if name == "pi" {
            return Ok(Node::Const(std::f64::consts::PI));
        }
        if let Some(digits) = name.strip_prefix('x') {
            if let Ok(k) = digits.parse::<usize>() {
                if !digits.starts_with('0') && k >= 1 {
                    if k > self.arity {
                        return Err(Error::ArityMismatch(format!(
                            "variable `{name}` at byte {start} exceeds arity {}",
                            self.arity
                        )));
                    }
                    return Ok(Node::Var(k - 1));
                }
            }
        }
        Err(Error::UnknownVariable {
            name: name.to_string(),
            offset: start,
        })
    }
}

/// C-style `%.17g` formatting: 17 significant digits, trailing zeros
/// stripped, exponent form outside `1e-4 ..= 1e17`.
pub fn format_g17(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.16e}", v);
    let (mantissa, exp) = sci.split_once('e').unwrap_or((&sci, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    if !(-4..17).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, v)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn write_node(node: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let wrap = |child: &Node, min_prec: u8, f: &mut fmt::Formatter<'_>| -> fmt::Result {
        if child.precedence() < min_prec {
            write!(f, "(")?;
            write_node(child, f)?;
            write!(f, ")")
        } else {
            write_node(child, f)
        }
    };
    match node {
        Node::Const(c) => {
            if node.precedence() < 5 {
                write!(f, "({})", format_g17(*c))
            } else {
                write!(f, "{}", format_g17(*c))
            }
        }
        Node::Var(i) => write!(f, "x{}", i + 1),
        Node::Neg(a) => {
            write!(f, "-")?;
            wrap(a, 3, f)
        }
        Node::Add(a, b) | Node::Sub(a, b) => {
            wrap(a, 1, f)?;
            write!(f, "{}", if matches!(node, Node::Add(..)) { " + " } else { " - " })?;
            wrap(b, 2, f)
        }
        Node::Mul(a, b) | Node::Div(a, b) => {
            wrap(a, 2, f)?;
            write!(f, "{}", if matches!(node, Node::Mul(..)) { "*" } else { "/" })?;
            wrap(b, 3, f)
        }
        Node::Pow(a, k) => {
            wrap(a, 4, f)?;
            write!(f, "^{k}")
        }
        Node::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_node(a, f)?;
            write!(f, ")")
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(&self.ast, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn unit_disk_level_function() {
        let e = parse("x1^2 + x2^2 - 1", 2).unwrap();
        let j = e.eval_jet(&[1.0, 0.0]).unwrap();
        assert_eq!(j.value, 0.0);
        assert_eq!(j.partials(), &[2.0, 0.0]);
    }

    #[test]
    fn radial_component_parses_and_is_flat_at_origin() {
        let e = parse("sqrt(x1^2+x2^2+x3^2)*x1", 3).unwrap();
        let j = e.eval_jet(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(j.value, 0.0);
        assert_eq!(j.partials(), &[0.0, 0.0, 0.0]);
        assert!(j.kink);
        let j = e.eval_jet(&[3.0, 0.0, 4.0]).unwrap();
        assert!(close(j.value, 15.0, 1e-12));
        // d/dx1 (r x1) = r + x1^2 / r = 5 + 9/5
        assert!(close(j.partials()[0], 6.8, 1e-12));
    }

    #[test]
    fn trailing_operator_reports_end_offset() {
        match parse("x1 +", 1) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn identifier_errors() {
        assert!(matches!(parse("y + 1", 2), Err(Error::UnknownVariable { .. })));
        assert!(matches!(parse("abs(x1)", 1), Err(Error::UnknownVariable { .. })));
        assert!(matches!(parse("x0", 1), Err(Error::UnknownVariable { .. })));
        assert!(matches!(parse("x3", 2), Err(Error::ArityMismatch(_))));
        assert!(matches!(parse("x1", 4), Err(Error::ArityMismatch(_))));
        assert!(matches!(parse("x1^x2", 2), Err(Error::Syntax { .. })));
        assert!(matches!(parse("x1^-2", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse("", 1), Err(Error::Syntax { offset: 0, .. })));
    }

    #[test]
    fn constant_and_sine() {
        let c = parse("5", 3).unwrap();
        let j = c.eval_jet(&[0.3, -2.0, 7.0]).unwrap();
        assert_eq!(j.value, 5.0);
        assert_eq!(j.partials(), &[0.0, 0.0, 0.0]);
        let s = parse("sin(x1)", 1).unwrap();
        let j = s.eval_jet(&[0.0]).unwrap();
        assert_eq!(j.value, 0.0);
        assert_eq!(j.partials(), &[1.0]);
    }

    #[test]
    fn precedence_rules() {
        let e = parse("-x1^2", 1).unwrap();
        assert_eq!(e.eval(&[3.0]).unwrap(), -9.0);
        let e = parse("2*3^2 - 8/4/2", 1).unwrap();
        assert_eq!(e.eval(&[0.0]).unwrap(), 17.0);
        let e = parse("1 - 2 - 3", 1).unwrap();
        assert_eq!(e.eval(&[0.0]).unwrap(), -4.0);
    }

    #[test]
    fn domain_errors_are_reported() {
        let e = parse("sqrt(x1)", 1).unwrap();
        assert!(matches!(e.eval_jet(&[-1.0]), Err(Error::Domain(_))));
        assert!(matches!(e.eval(&[-1e-3]), Err(Error::Domain(_))));
        // tiny negative rounding noise is a clean zero
        assert_eq!(e.eval(&[-1e-14]).unwrap(), 0.0);
        let d = parse("1/x1", 1).unwrap();
        assert!(matches!(d.eval(&[0.0]), Err(Error::Domain(_))));
        assert!(matches!(d.eval_jet(&[0.0]), Err(Error::Domain(_))));
        let o = parse("exp(x1)", 1).unwrap();
        assert!(matches!(o.eval(&[1000.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn derivative_checks() {
        let q = parse("3*x1^2 - x1*x2 + 0.5*x2^2 + x1", 2).unwrap();
        assert!(q.check_derivatives(&[0.7, -1.3], 1e-4).unwrap() < 1e-7);
        // analytic oracle: d/dx exp(x) at 0 is exactly 1
        let e = parse("exp(x1)", 1).unwrap();
        let jet = e.eval_jet(&[0.0]).unwrap();
        assert_eq!(jet.partials()[0], 1.0);
        assert!(e.check_derivatives(&[0.0], 1e-5).unwrap() < 1e-8);
        let c = parse("2.5", 3).unwrap();
        assert_eq!(c.check_derivatives(&[1.0, 2.0, 3.0], 1e-3).unwrap(), 0.0);
    }

    #[test]
    fn g17_formatting() {
        assert_eq!(format_g17(2.0), "2");
        assert_eq!(format_g17(std::f64::consts::PI), "3.1415926535897931");
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(format_g17(1.5e20), "1.5e+20");
    }

    #[test]
    fn print_uses_minimal_parentheses() {
        let e = parse("(x1 + x2)*x3 - (x1 - x2) - x1^2*(-x2)", 3).unwrap();
        assert_eq!(e.to_string(), "(x1 + x2)*x3 - (x1 - x2) - x1^2*-x2");
        let e = parse("(-x1)^2 + x1/(x2*x3)", 3).unwrap();
        assert_eq!(e.to_string(), "(-x1)^2 + x1/(x2*x3)");
    }

    fn arb_node(n: usize) -> impl Strategy<Value = Node> {
        let leaf = prop_oneof![
            (0.0f64..10.0).prop_map(Node::Const),
            (0..n).prop_map(Node::Var),
        ];
        leaf.prop_recursive(5, 48, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|a| Node::Neg(Box::new(a))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::Mul(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::Div(Box::new(a), Box::new(b))),
                (inner.clone(), 0u32..5).prop_map(|(a, k)| Node::Pow(Box::new(a), k)),
                inner.clone().prop_map(|a| Node::Call(Func::Sin, Box::new(a))),
                inner.prop_map(|a| Node::Call(Func::Sqrt, Box::new(a))),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_roundtrip(node in arb_node(3)) {
            let e = Expression::from_ast(node, 3);
            let printed = e.to_string();
            let back = parse(&printed, 3).unwrap();
            prop_assert_eq!(back, e, "printed as {}", printed);
        }

        #[test]
        fn jet_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0,
                         x in -1.0f64..1.0, y in -1.0f64..1.0) {
            let e1 = parse("x1^3 - 2*x1*x2 + sin(x2)", 2).unwrap();
            let e2 = parse("exp(x1)*x2 + x2^2", 2).unwrap();
            let combo = parse(&format!("({a:.17e})*({e1}) + ({b:.17e})*({e2})"), 2).unwrap();
            let p = [x, y];
            let (j1, j2, jc) = (e1.eval_jet(&p).unwrap(), e2.eval_jet(&p).unwrap(), combo.eval_jet(&p).unwrap());
            prop_assert!((jc.value - (a * j1.value + b * j2.value)).abs() < 1e-12);
            for i in 0..2 {
                let want = a * j1.partials()[i] + b * j2.partials()[i];
                prop_assert!((jc.partials()[i] - want).abs() < 1e-12);
            }
        }
    }
}
