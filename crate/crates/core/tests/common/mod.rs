//! Random expression trees shared by the parser fuzz tests.

use std::sync::Arc;

use evolutes::expr::{BinaryOp, Expr, UnaryOp};
use proptest::prelude::*;

fn un(op: UnaryOp, a: Expr) -> Expr {
    Expr::Unary(op, Arc::new(a))
}

fn bin(op: BinaryOp, a: Expr, b: Expr) -> Expr {
    Expr::Binary(op, Arc::new(a), Arc::new(b))
}

fn konst(c: f64) -> Expr {
    Expr::Const(c)
}

/// Random trees whose every node stays inside its domain and of moderate
/// size for `t` in `[-3, 3]`.
pub fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::Var),
        (-200i32..200).prop_map(|n| konst(n as f64 / 100.0)),
        (-2.0f64..2.0).prop_map(konst),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| un(UnaryOp::Sin, a)),
            inner.clone().prop_map(|a| un(UnaryOp::Cos, a)),
            inner.clone().prop_map(|a| un(UnaryOp::Neg, a)),
            inner.clone().prop_map(|a| un(UnaryOp::Exp, un(UnaryOp::Sin, a))),
            inner
                .clone()
                .prop_map(|a| un(UnaryOp::Log, bin(BinaryOp::Add, konst(2.0), un(UnaryOp::Cos, a)))),
            inner
                .clone()
                .prop_map(|a| un(UnaryOp::Sqrt, bin(BinaryOp::Add, konst(1.0), bin(BinaryOp::Mul, a.clone(), a)))),
            inner
                .clone()
                .prop_map(|a| un(UnaryOp::Tan, bin(BinaryOp::Mul, konst(0.5), un(UnaryOp::Sin, a)))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| bin(BinaryOp::Add, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| bin(BinaryOp::Sub, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| bin(BinaryOp::Mul, a, b)),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| bin(BinaryOp::Div, a, bin(BinaryOp::Add, konst(2.0), un(UnaryOp::Cos, b)))),
            (inner.clone(), prop::sample::select(vec![2.0, 3.0, -1.0])).prop_map(|(a, p)| {
                let base = if p < 0.0 { bin(BinaryOp::Add, konst(2.0), un(UnaryOp::Sin, a)) } else { a };
                Expr::Pow(Arc::new(base), p)
            }),
            (inner, prop::sample::select(vec![-1.5, -0.5, 0.5, 1.5])).prop_map(|(a, p)| {
                let base = bin(BinaryOp::Add, konst(1.0), bin(BinaryOp::Mul, a.clone(), a));
                Expr::Pow(Arc::new(base), p)
            }),
        ]
    })
}

/// Central difference of `e` at `t`, or `None` where its truncation error,
/// estimated from the difference with step `2h`, exceeds `tol`.
pub fn central_difference(e: &Expr, t: f64, h: f64, tol: f64) -> Option<f64> {
    let f = |x: f64| e.eval(x).ok();
    let d = |h: f64| Some((f(t + h)? - f(t - h)?) / (2.0 * h));
    let (fine, coarse) = (d(h)?, d(2.0 * h)?);
    // The truncation error of the fine difference is a third of the gap.
    ((fine - coarse).abs() / 3.0 <= tol).then_some(fine)
}
