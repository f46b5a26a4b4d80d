use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};

use super::{Curve, Parametrization};
use crate::error::{GeomError, Result};
use crate::expr::{parse_list, Expr, SyntaxError};
use crate::jet::{Jet, Jet3, JET_CAPACITY};

/// How an expression curve produces its derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Taylor-mode propagation through the expression tree. Exact, and the
    /// cost grows only quadratically with the order.
    Taylor,
    /// Evaluate symbolic derivative trees built once up to the given order.
    /// Trees of nested compositions grow quickly, so keep the order modest.
    Symbolic(usize),
}

/// A curve given by three coordinate expressions in `t`.
#[derive(Debug, Clone)]
pub struct ExprCurve {
    coords: [Expr; 3],
    /// `derivs[m][i]` is the `m`-th derivative of coordinate `i`.
    derivs: Option<Vec<[Expr; 3]>>,
}

impl ExprCurve {
    pub fn new(x: Expr, y: Expr, z: Expr, route: Route) -> ExprCurve {
        let derivs = match route {
            Route::Taylor => None,
            Route::Symbolic(order) => {
                let per: Vec<Vec<Expr>> = [&x, &y, &z].iter().map(|e| e.derivatives(order)).collect();
                Some(
                    (0..=order)
                        .map(|m| [per[0][m].clone(), per[1][m].clone(), per[2][m].clone()])
                        .collect(),
                )
            }
        };
        ExprCurve {
            coords: [x, y, z],
            derivs,
        }
    }

    pub fn coords(&self) -> &[Expr; 3] {
        &self.coords
    }

    /// Parse the `"x(t), y(t), z(t)"` text format.
    pub fn parse(text: &str, route: Route) -> Result<ExprCurve, SyntaxError> {
        let parts = parse_list(text, ',')?;
        if parts.len() != 3 {
            return Err(SyntaxError {
                offset: text.len(),
                kind: crate::expr::SyntaxErrorKind::UnexpectedCharacter(','),
            });
        }
        let mut it = parts.into_iter();
        let (x, y, z) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
        Ok(ExprCurve::new(x, y, z, route))
    }

    pub fn into_curve(self, lo: f64, hi: f64) -> Result<Curve> {
        Curve::new(Arc::new(self), lo, hi)
    }
}

impl Parametrization for ExprCurve {
    fn jet(&self, t: f64, len: usize) -> Result<Jet3> {
        let eval = |e: &Expr| e.eval_jet(t, len).map_err(|source| GeomError::Eval { t, source });
        match &self.derivs {
            None => Ok(Jet3::new(
                eval(&self.coords[0])?,
                eval(&self.coords[1])?,
                eval(&self.coords[2])?,
            )),
            Some(derivs) => {
                let mut d = [[0.0; JET_CAPACITY]; 3];
                for (m, row) in derivs.iter().enumerate().take(len) {
                    for i in 0..3 {
                        d[i][m] = row[i].eval(t).map_err(|source| GeomError::Eval { t, source })?;
                    }
                }
                Ok(Jet3::new(
                    Jet::from_derivatives(&d[0][..len]),
                    Jet::from_derivatives(&d[1][..len]),
                    Jet::from_derivatives(&d[2][..len]),
                ))
            }
        }
    }

    fn max_len(&self) -> usize {
        match &self.derivs {
            None => JET_CAPACITY,
            Some(d) => d.len(),
        }
    }
}

/// `x ↦ m x + b` applied to another curve.
struct Affine {
    inner: Curve,
    m: Matrix3<f64>,
    b: Vector3<f64>,
}

impl Parametrization for Affine {
    fn jet(&self, t: f64, len: usize) -> Result<Jet3> {
        Ok(self.inner.jet(t, len)?.transform(&self.m) + Jet3::constant(self.b, len))
    }

    fn max_len(&self) -> usize {
        self.inner.max_len()
    }
}

impl Curve {
    /// Image of the curve under `x ↦ m x + b`. Use an orthogonal `m` for a
    /// rigid motion or reflection.
    pub fn transformed(&self, m: Matrix3<f64>, b: Vector3<f64>) -> Curve {
        let (lo, hi) = self.domain();
        Curve::new(
            Arc::new(Affine {
                inner: self.clone(),
                m,
                b,
            }),
            lo,
            hi,
        )
        .expect("domain already validated")
        .named(format!("{} (transformed)", self.name()))
        .assume_closed(self.is_closed())
        .with_cusps(self.cusps().to_vec())
        .with_thresholds(self.eps_k(), self.eps_tau())
    }

    /// Mirror image in the plane `z = 0`.
    pub fn reflected(&self) -> Curve {
        self.transformed(Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0)), Vector3::zeros())
    }
}
