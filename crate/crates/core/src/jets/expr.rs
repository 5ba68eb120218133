use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use super::jet::{Jet3, Scalar};
use crate::{Error, Result};

/// Elementary one-argument functions of the node library.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elementary {
    Neg,
    Exp,
    ExpM1,
    Ln,
    Ln1p,
    Tanh,
    Atan,
}

impl Elementary {
    pub fn name(self) -> &'static str {
        match self {
            Elementary::Neg => "neg",
            Elementary::Exp => "exp",
            Elementary::ExpM1 => "expm1",
            Elementary::Ln => "ln",
            Elementary::Ln1p => "ln1p",
            Elementary::Tanh => "tanh",
            Elementary::Atan => "atan",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Elementary::Exp,
            "expm1" => Elementary::ExpM1,
            "ln" | "log" => Elementary::Ln,
            "ln1p" | "log1p" => Elementary::Ln1p,
            "tanh" => Elementary::Tanh,
            "atan" | "arctan" => Elementary::Atan,
            _ => return None,
        })
    }

    fn apply<S: Scalar>(self, u: S, x: f64) -> Result<S> {
        let v = u.value();
        Ok(match self {
            Elementary::Neg => -u,
            Elementary::Exp => u.exp(),
            Elementary::ExpM1 => u.exp_m1(),
            Elementary::Ln => {
                if v <= 0.0 {
                    return Err(Error::domain("ln", x, format!("argument {v} <= 0")));
                }
                u.ln()
            }
            Elementary::Ln1p => {
                if v <= -1.0 {
                    return Err(Error::domain("ln1p", x, format!("argument {v} <= -1")));
                }
                u.ln_1p()
            }
            Elementary::Tanh => u.tanh(),
            Elementary::Atan => u.atan(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    fn apply<S: Scalar>(self, l: S, r: S, x: f64) -> Result<S> {
        Ok(match self {
            BinOp::Add => l + r,
            BinOp::Sub => l - r,
            BinOp::Mul => l * r,
            BinOp::Div => {
                if r.value() == 0.0 {
                    return Err(Error::domain("div", x, "division by zero"));
                }
                l / r
            }
        })
    }
}

/// Expression tree over the variable `x` and named real parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Param(String),
    Var,
    Unary(Elementary, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Power with a constant real exponent.
    Powf(Box<Expr>, f64),
}

impl Expr {
    pub fn x() -> Self {
        Expr::Var
    }

    pub fn c(v: f64) -> Self {
        Expr::Const(v)
    }

    pub fn param(name: &str) -> Self {
        Expr::Param(name.to_string())
    }

    fn unary(self, op: Elementary) -> Self {
        Expr::Unary(op, Box::new(self))
    }

    pub fn exp(self) -> Self {
        self.unary(Elementary::Exp)
    }

    pub fn exp_m1(self) -> Self {
        self.unary(Elementary::ExpM1)
    }

    pub fn ln(self) -> Self {
        self.unary(Elementary::Ln)
    }

    pub fn ln_1p(self) -> Self {
        self.unary(Elementary::Ln1p)
    }

    pub fn tanh(self) -> Self {
        self.unary(Elementary::Tanh)
    }

    pub fn atan(self) -> Self {
        self.unary(Elementary::Atan)
    }

    pub fn powf(self, k: f64) -> Self {
        Expr::Powf(Box::new(self), k)
    }

    /// Replaces every occurrence of the variable with `inner`.
    pub fn substitute(&self, inner: &Expr) -> Expr {
        match self {
            Expr::Var => inner.clone(),
            Expr::Const(_) | Expr::Param(_) => self.clone(),
            Expr::Unary(op, a) => Expr::Unary(*op, Box::new(a.substitute(inner))),
            Expr::Binary(op, a, b) => Expr::Binary(*op, Box::new(a.substitute(inner)), Box::new(b.substitute(inner))),
            Expr::Powf(a, k) => Expr::Powf(Box::new(a.substitute(inner)), *k),
        }
    }

    pub fn depends_on_x(&self) -> bool {
        match self {
            Expr::Var => true,
            Expr::Const(_) | Expr::Param(_) => false,
            Expr::Unary(_, a) | Expr::Powf(a, _) => a.depends_on_x(),
            Expr::Binary(_, a, b) => a.depends_on_x() || b.depends_on_x(),
        }
    }

    fn collect_params<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Param(p) => out.push(p),
            Expr::Var | Expr::Const(_) => {}
            Expr::Unary(_, a) | Expr::Powf(a, _) => a.collect_params(out),
            Expr::Binary(_, a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
        }
    }

    fn compile(&self, params: &BTreeMap<String, f64>, tape: &mut Vec<Op>) -> Result<()> {
        match self {
            Expr::Const(c) => tape.push(Op::Const(*c)),
            Expr::Param(p) => match params.get(p) {
                Some(v) => tape.push(Op::Const(*v)),
                None => return Err(Error::Parse(format!("unbound parameter `{p}`"))),
            },
            Expr::Var => tape.push(Op::Var),
            Expr::Unary(op, a) => {
                a.compile(params, tape)?;
                tape.push(Op::Unary(*op));
            }
            Expr::Binary(op, a, b) => {
                a.compile(params, tape)?;
                b.compile(params, tape)?;
                tape.push(Op::Binary(*op));
            }
            Expr::Powf(a, k) => {
                a.compile(params, tape)?;
                tape.push(Op::Powf(*k));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 => write!(f, "({c:?})"),
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Param(p) => write!(f, "{p}"),
            Expr::Var => write!(f, "x"),
            Expr::Unary(Elementary::Neg, a) => write!(f, "(-{a})"),
            Expr::Unary(op, a) => write!(f, "{}({a})", op.name()),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Powf(a, k) if *k < 0.0 => write!(f, "({a}^({k:?}))"),
            Expr::Powf(a, k) => write!(f, "({a}^{k:?})"),
        }
    }
}

macro_rules! expr_binop {
    ($trait:ident, $method:ident, $op:expr) => {
        impl $trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::Binary($op, Box::new(self), Box::new(rhs))
            }
        }
        impl $trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::Binary($op, Box::new(self), Box::new(Expr::Const(rhs)))
            }
        }
        impl $trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::Binary($op, Box::new(Expr::Const(self)), Box::new(rhs))
            }
        }
    };
}

expr_binop!(Add, add, BinOp::Add);
expr_binop!(Sub, sub, BinOp::Sub);
expr_binop!(Mul, mul, BinOp::Mul);
expr_binop!(Div, div, BinOp::Div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.unary(Elementary::Neg)
    }
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Const(f64),
    Var,
    Unary(Elementary),
    Binary(BinOp),
    Powf(f64),
}

/// A scalar map given by an expression tree with bound parameters.
///
/// The tree is kept for introspection; evaluation runs over a postfix tape
/// with the parameter values substituted.
#[derive(Debug, Clone)]
pub struct SmoothFunction {
    expr: Arc<Expr>,
    params: BTreeMap<String, f64>,
    tape: Arc<[Op]>,
    depth: usize,
}

impl SmoothFunction {
    pub fn new(expr: Expr, params: impl IntoIterator<Item = (String, f64)>) -> Result<Self> {
        let params: BTreeMap<String, f64> = params.into_iter().collect();
        let mut tape = Vec::new();
        expr.compile(&params, &mut tape)?;
        let depth = max_stack_depth(&tape);
        Ok(Self {
            expr: Arc::new(expr),
            params,
            tape: tape.into(),
            depth,
        })
    }

    /// A parameter-free function.
    pub fn from_expr(expr: Expr) -> Result<Self> {
        Self::new(expr, std::iter::empty())
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    /// Names of parameters referenced by the expression, in tree order.
    pub fn referenced_params(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.expr.collect_params(&mut out);
        out
    }

    /// `g(x) = -f(-x)`.
    pub fn reflect(&self) -> Self {
        let e = -self.expr.substitute(&-Expr::Var);
        Self::new(e, self.params.clone()).expect("parameters already bound")
    }

    fn run<S: Scalar>(&self, x: f64, seed: S) -> Result<S> {
        let mut stack: Vec<S> = Vec::with_capacity(self.depth);
        for op in self.tape.iter() {
            match *op {
                Op::Const(c) => stack.push(S::lift(c)),
                Op::Var => stack.push(seed),
                Op::Unary(u) => {
                    let a = stack.pop().expect("tape underflow");
                    stack.push(u.apply(a, x)?);
                }
                Op::Binary(b) => {
                    let r = stack.pop().expect("tape underflow");
                    let l = stack.pop().expect("tape underflow");
                    stack.push(b.apply(l, r, x)?);
                }
                Op::Powf(k) => {
                    let a = stack.pop().expect("tape underflow");
                    let v = a.value();
                    if v < 0.0 && k.fract() != 0.0 {
                        return Err(Error::domain("powf", x, format!("negative base {v} with exponent {k}")));
                    }
                    if v == 0.0 && k < 0.0 {
                        return Err(Error::domain("powf", x, "zero base with negative exponent"));
                    }
                    stack.push(a.powf(k));
                }
            }
        }
        let out = stack.pop().expect("empty tape");
        if !out.all_finite() {
            return Err(Error::domain("result", x, "non-finite value"));
        }
        Ok(out)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.run(x, x)
    }

    pub fn jet(&self, x: f64) -> Result<Jet3> {
        self.run(x, Jet3::variable(x))
    }
}

fn max_stack_depth(tape: &[Op]) -> usize {
    let (mut cur, mut max) = (0usize, 0usize);
    for op in tape {
        match op {
            Op::Const(_) | Op::Var => cur += 1,
            Op::Binary(_) => cur -= 1,
            Op::Unary(_) | Op::Powf(_) => {}
        }
        max = max.max(cur);
    }
    max
}
