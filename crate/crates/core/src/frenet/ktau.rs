use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};

use super::{Curve, Parametrization};
use crate::error::{GeomError, Result};
use crate::expr::Expr;
use crate::jet::{Jet3, JET_CAPACITY};
use crate::numeric::ode::{self, OdeOptions, OdeSolution, Projector, Rhs, State};

/// Orthonormal right-handed frame `(t, n, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub tangent: Vector3<f64>,
    pub normal: Vector3<f64>,
    pub binormal: Vector3<f64>,
}

impl Default for Frame {
    fn default() -> Self {
        Frame {
            tangent: Vector3::x(),
            normal: Vector3::y(),
            binormal: Vector3::z(),
        }
    }
}

impl Frame {
    /// Gram–Schmidt on `(t, n)`, then `b = t × n`.
    pub fn orthonormalized(t: Vector3<f64>, n: Vector3<f64>) -> Option<Frame> {
        let tangent = t.try_normalize(1e-300)?;
        let normal = (n - tangent * tangent.dot(&n)).try_normalize(1e-300)?;
        Some(Frame {
            tangent,
            normal,
            binormal: tangent.cross(&normal),
        })
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[self.tangent, self.normal, self.binormal])
    }
}

/// Unit-speed curve obtained by integrating the Frenet system.
struct FrenetOde {
    k: Expr,
    tau: Expr,
    solution: OdeSolution<12>,
}

fn pack(p: Vector3<f64>, f: &Frame) -> State<12> {
    let mut y = State::<12>::zeros();
    for i in 0..3 {
        y[i] = p[i];
        y[3 + i] = f.tangent[i];
        y[6 + i] = f.normal[i];
        y[9 + i] = f.binormal[i];
    }
    y
}

fn part(y: &State<12>, k: usize) -> Vector3<f64> {
    Vector3::new(y[3 * k], y[3 * k + 1], y[3 * k + 2])
}

fn eval_scalar(e: &Expr, t: f64) -> Result<f64> {
    e.eval(t).map_err(|source| GeomError::Eval { t, source })
}

impl Parametrization for FrenetOde {
    /// Taylor coefficients from the Frenet recursion
    /// `T' = kN, N' = -kT + τB, B' = -τN, ξ' = T` seeded with the integrated
    /// state.
    fn jet(&self, t: f64, len: usize) -> Result<Jet3> {
        let y = self.solution.state_at(t)?;
        if len == 0 {
            return Ok(Jet3::constant(Vector3::zeros(), 0));
        }
        let m_len = len.saturating_sub(1).max(1);
        let kj = self.k.eval_jet(t, m_len).map_err(|source| GeomError::Eval { t, source })?;
        let tj = self.tau.eval_jet(t, m_len).map_err(|source| GeomError::Eval { t, source })?;
        let (mut tc, mut nc, mut bc) = (vec![part(&y, 1)], vec![part(&y, 2)], vec![part(&y, 3)]);
        for m in 0..len.saturating_sub(2) {
            let (mut dt, mut dn, mut db) = (Vector3::zeros(), Vector3::zeros(), Vector3::zeros());
            for i in 0..=m {
                let (ki, ti) = (kj.coeff(i), tj.coeff(i));
                dt += nc[m - i] * ki;
                dn += bc[m - i] * ti - tc[m - i] * ki;
                db -= nc[m - i] * ti;
            }
            let s = 1.0 / (m + 1) as f64;
            tc.push(dt * s);
            nc.push(dn * s);
            bc.push(db * s);
        }
        let mut pc = vec![part(&y, 0)];
        for m in 0..len - 1 {
            pc.push(tc[m] / (m + 1) as f64);
        }
        Ok(Jet3::from_vector_coeffs(&pc))
    }

    fn max_len(&self) -> usize {
        JET_CAPACITY
    }
}

/// Integrate the Frenet equations with the given curvature and torsion
/// (functions of the arclength `t`) from `initial_point` and
/// `initial_frame` at `t = lo`.
///
/// The frame is re-orthonormalized after every accepted step. The returned
/// curve is unit-speed; its jets come from the Frenet recursion with exact
/// derivatives of `k` and `tau`.
pub fn curve_from_k_tau(
    k: Expr,
    tau: Expr,
    initial_frame: Frame,
    initial_point: Vector3<f64>,
    lo: f64,
    hi: f64,
) -> Result<Curve> {
    let frame = Frame::orthonormalized(initial_frame.tangent, initial_frame.normal)
        .ok_or_else(|| GeomError::InvalidArgument("initial frame is degenerate".into()))?;
    let (ke, te) = (k.clone(), tau.clone());
    let rhs: Rhs<12> = Arc::new(move |s, y| {
        let (kv, tv) = (eval_scalar(&ke, s)?, eval_scalar(&te, s)?);
        let (t, n, b) = (part(y, 1), part(y, 2), part(y, 3));
        let dn = b * tv - t * kv;
        let db = -n * tv;
        let dt = n * kv;
        let mut out = State::<12>::zeros();
        for i in 0..3 {
            out[i] = t[i];
            out[3 + i] = dt[i];
            out[6 + i] = dn[i];
            out[9 + i] = db[i];
        }
        Ok(out)
    });
    let projector: Projector<12> = Arc::new(|y| {
        if let Some(f) = Frame::orthonormalized(part(y, 1), part(y, 2)) {
            let p = part(y, 0);
            *y = pack(p, &f);
        }
    });
    let solution = ode::solve(
        rhs,
        lo,
        pack(initial_point, &frame),
        hi,
        OdeOptions::default(),
        Some(projector),
    )?;
    Ok(Curve::new(Arc::new(FrenetOde { k, tau, solution }), lo, hi)?.named("frenet-ode"))
}
