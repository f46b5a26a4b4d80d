//! Scalar expressions in one variable `t`.
//!
//! Expressions are parsed from text, differentiated symbolically to any order
//! and evaluated pointwise. They are how user-supplied curves (coordinate
//! functions) and curvature/torsion profiles enter the library.

mod parser;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::jet::Jet;

pub use parser::{parse, parse_list, SyntaxError, SyntaxErrorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
}

impl UnaryOp {
    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Tan => "tan",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sqrt => "sqrt",
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "tan" => UnaryOp::Tan,
            "exp" => UnaryOp::Exp,
            "log" | "ln" => UnaryOp::Log,
            "sqrt" => UnaryOp::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
        }
    }
}

/// Expression tree. Subtrees are shared, so derivatives reuse the nodes of
/// the expression they were taken from.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Unary(UnaryOp, Arc<Expr>),
    Binary(BinaryOp, Arc<Expr>, Arc<Expr>),
    /// Power with a constant exponent.
    Pow(Arc<Expr>, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("logarithm of non-positive value {0}")]
    LogNonPositive(f64),
    #[error("square root of negative value {0}")]
    SqrtNegative(f64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("power {base}^{exponent} is undefined")]
    PowDomain { base: f64, exponent: f64 },
}

impl Expr {
    pub fn constant(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn unary(op: UnaryOp, e: Expr) -> Expr {
        if op == UnaryOp::Neg {
            return neg(e);
        }
        Expr::Unary(op, Arc::new(e))
    }

    /// Number of nodes (shared subtrees counted once per use).
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var => 1,
            Expr::Unary(_, a) | Expr::Pow(a, _) => 1 + a.size(),
            Expr::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn depends_on_t(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var => true,
            Expr::Unary(_, a) | Expr::Pow(a, _) => a.depends_on_t(),
            Expr::Binary(_, a, b) => a.depends_on_t() || b.depends_on_t(),
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var => t,
            Expr::Unary(op, a) => {
                let v = a.eval(t)?;
                match op {
                    UnaryOp::Neg => -v,
                    UnaryOp::Sin => v.sin(),
                    UnaryOp::Cos => v.cos(),
                    UnaryOp::Tan => v.tan(),
                    UnaryOp::Exp => v.exp(),
                    UnaryOp::Log => {
                        if v <= 0.0 {
                            return Err(EvalError::LogNonPositive(v));
                        }
                        v.ln()
                    }
                    UnaryOp::Sqrt => {
                        if v < 0.0 {
                            return Err(EvalError::SqrtNegative(v));
                        }
                        v.sqrt()
                    }
                }
            }
            Expr::Binary(op, a, b) => {
                let x = a.eval(t)?;
                let y = b.eval(t)?;
                match op {
                    BinaryOp::Add => x + y,
                    BinaryOp::Sub => x - y,
                    BinaryOp::Mul => x * y,
                    BinaryOp::Div => {
                        if y == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        x / y
                    }
                }
            }
            Expr::Pow(a, p) => pow_checked(a.eval(t)?, *p)?,
        })
    }

    /// Taylor-mode evaluation: the jet of the expression around `t` with
    /// `len` coefficients. Independent of [`Expr::differentiate`].
    pub fn eval_jet(&self, t: f64, len: usize) -> Result<Jet, EvalError> {
        Ok(match self {
            Expr::Const(c) => Jet::constant(*c, len),
            Expr::Var => Jet::variable(t, len),
            Expr::Unary(op, a) => {
                let u = a.eval_jet(t, len)?;
                let v = u.value();
                match op {
                    UnaryOp::Neg => -u,
                    UnaryOp::Sin => u.sin(),
                    UnaryOp::Cos => u.cos(),
                    UnaryOp::Tan => u.tan(),
                    UnaryOp::Exp => u.exp(),
                    UnaryOp::Log => {
                        if v <= 0.0 {
                            return Err(EvalError::LogNonPositive(v));
                        }
                        u.ln()
                    }
                    UnaryOp::Sqrt => {
                        if v < 0.0 {
                            return Err(EvalError::SqrtNegative(v));
                        }
                        u.sqrt()
                    }
                }
            }
            Expr::Binary(op, a, b) => {
                let x = a.eval_jet(t, len)?;
                let y = b.eval_jet(t, len)?;
                match op {
                    BinaryOp::Add => x + y,
                    BinaryOp::Sub => x - y,
                    BinaryOp::Mul => x * y,
                    BinaryOp::Div => {
                        if y.value() == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        x / y
                    }
                }
            }
            Expr::Pow(a, p) => {
                let u = a.eval_jet(t, len)?;
                pow_checked(u.value(), *p)?;
                u.powf(*p)
            }
        })
    }

    /// Exact symbolic derivative with respect to `t`.
    ///
    /// Only trivial constant folding is applied (`0*x`, `1*x`, `x+0`,
    /// constant subtrees); the result is otherwise unsimplified.
    pub fn differentiate(&self) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var => Expr::Const(1.0),
            Expr::Unary(op, a) => {
                let da = a.differentiate();
                let a = (**a).clone();
                let outer = match op {
                    UnaryOp::Neg => return neg(da),
                    UnaryOp::Sin => Expr::unary(UnaryOp::Cos, a),
                    UnaryOp::Cos => neg(Expr::unary(UnaryOp::Sin, a)),
                    UnaryOp::Tan => div(Expr::Const(1.0), pow(Expr::unary(UnaryOp::Cos, a), 2.0)),
                    UnaryOp::Exp => Expr::unary(UnaryOp::Exp, a),
                    UnaryOp::Log => div(Expr::Const(1.0), a),
                    UnaryOp::Sqrt => {
                        div(Expr::Const(1.0), mul(Expr::Const(2.0), Expr::unary(UnaryOp::Sqrt, a)))
                    }
                };
                mul(outer, da)
            }
            Expr::Binary(op, a, b) => {
                let da = a.differentiate();
                let db = b.differentiate();
                let (a, b) = ((**a).clone(), (**b).clone());
                match op {
                    BinaryOp::Add => add(da, db),
                    BinaryOp::Sub => sub(da, db),
                    BinaryOp::Mul => add(mul(da, b), mul(a, db)),
                    BinaryOp::Div => div(sub(mul(da, b.clone()), mul(a, db)), pow(b, 2.0)),
                }
            }
            Expr::Pow(a, p) => {
                let da = a.differentiate();
                mul(mul(Expr::Const(*p), pow((**a).clone(), p - 1.0)), da)
            }
        }
    }

    /// `[e, e', e'', ...]` through order `n`.
    pub fn derivatives(&self, n: usize) -> Vec<Expr> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(self.clone());
        for i in 0..n {
            let d = out[i].differentiate();
            out.push(d);
        }
        out
    }
}

fn pow_checked(base: f64, p: f64) -> Result<f64, EvalError> {
    if base == 0.0 && p < 0.0 {
        return Err(EvalError::DivisionByZero);
    }
    if base < 0.0 && p.fract() != 0.0 {
        return Err(EvalError::PowDomain { base, exponent: p });
    }
    Ok(match p {
        2.0 => base * base,
        _ if p.fract() == 0.0 && p.abs() < 64.0 => base.powi(p as i32),
        _ => base.powf(p),
    })
}

fn as_const(e: &Expr) -> Option<f64> {
    match e {
        Expr::Const(c) => Some(*c),
        _ => None,
    }
}

fn folded(v: f64, fallback: impl FnOnce() -> Expr) -> Expr {
    if v.is_finite() {
        Expr::Const(v)
    } else {
        fallback()
    }
}

pub fn neg(e: Expr) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Unary(UnaryOp::Neg, inner) => (*inner).clone(),
        other => Expr::Unary(UnaryOp::Neg, Arc::new(other)),
    }
}

pub fn add(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => Expr::Const(x + y),
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        _ => Expr::Binary(BinaryOp::Add, Arc::new(a), Arc::new(b)),
    }
}

pub fn sub(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => Expr::Const(x - y),
        (Some(x), _) if x == 0.0 => neg(b),
        (_, Some(y)) if y == 0.0 => a,
        _ => Expr::Binary(BinaryOp::Sub, Arc::new(a), Arc::new(b)),
    }
}

pub fn mul(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => Expr::Const(x * y),
        (Some(x), _) if x == 0.0 => Expr::Const(0.0),
        (_, Some(y)) if y == 0.0 => Expr::Const(0.0),
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        (Some(x), _) if x == -1.0 => neg(b),
        (_, Some(y)) if y == -1.0 => neg(a),
        _ => Expr::Binary(BinaryOp::Mul, Arc::new(a), Arc::new(b)),
    }
}

pub fn div(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) if y != 0.0 => folded(x / y, || {
            Expr::Binary(BinaryOp::Div, Arc::new(Expr::Const(x)), Arc::new(Expr::Const(y)))
        }),
        (Some(x), _) if x == 0.0 => Expr::Const(0.0),
        (_, Some(y)) if y == 1.0 => a,
        _ => Expr::Binary(BinaryOp::Div, Arc::new(a), Arc::new(b)),
    }
}

pub fn pow(a: Expr, p: f64) -> Expr {
    if p == 0.0 {
        return Expr::Const(1.0);
    }
    if p == 1.0 {
        return a;
    }
    if let Some(x) = as_const(&a) {
        if let Ok(v) = pow_checked(x, p) {
            if v.is_finite() {
                return Expr::Const(v);
            }
        }
    }
    Expr::Pow(Arc::new(a), p)
}

fn fmt_number(v: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if v < 0.0 || v.is_sign_negative() {
        write!(f, "(-{:?})", -v)
    } else {
        write!(f, "{v:?}")
    }
}

/// Fully parenthesized text that [`parse`] reads back to an equivalent tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => fmt_number(*c, f),
            Expr::Var => write!(f, "t"),
            Expr::Unary(UnaryOp::Neg, a) => write!(f, "(-{a})"),
            Expr::Unary(op, a) => write!(f, "{}({a})", op.name()),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Pow(a, p) => {
                write!(f, "({a}^")?;
                fmt_number(*p, f)?;
                write!(f, ")")
            }
        }
    }
}
