//! Curves and their Frenet apparatus.
//!
//! Nothing here assumes a unit-speed parametrization. Curvature and torsion
//! come from the general formulas
//! `k = |ξ'×ξ''| / |ξ'|³`, `τ = det(ξ', ξ'', ξ''') / |ξ'×ξ''|²`,
//! and arclength derivatives of any scalar use `d/ds = (1/|ξ'|) d/dt`
//! applied to exact jets.

mod curve;
mod ktau;
pub mod presets;
mod sources;

use nalgebra::Vector3;
use serde::Serialize;

pub use curve::{Curve, Parametrization};
pub use ktau::{curve_from_k_tau, Frame};
pub use sources::{ExprCurve, Route};

use crate::error::{GeomError, Result};
use crate::jet::{det3, Jet, Jet3};
use crate::numeric::quadrature;

/// Frenet apparatus as jets in the curve parameter.
///
/// For a position jet of length `L`: the tangent and speed have length
/// `L-1`, the normal, binormal and curvature `L-2`, the torsion `L-3`.
#[derive(Debug, Clone, Copy)]
pub struct FrenetJet {
    pub t: f64,
    pub position: Jet3,
    pub speed: Jet,
    pub tangent: Jet3,
    pub normal: Jet3,
    pub binormal: Jet3,
    pub k: Jet,
    pub tau: Jet,
    eps_tau: f64,
}

impl FrenetJet {
    pub(crate) fn new(curve: &Curve, t: f64, position: Jet3) -> Result<FrenetJet> {
        Self::from_position(t, position, curve.eps_k(), curve.eps_tau())
    }

    /// Frenet data of an explicit position jet.
    pub fn from_position(t: f64, position: Jet3, eps_k: f64, eps_tau: f64) -> Result<FrenetJet> {
        let len = position.len();
        if len < 3 {
            return Err(GeomError::InsufficientOrder {
                needed: 2,
                available: len.saturating_sub(1),
            });
        }
        if !position.is_finite() {
            return Err(GeomError::InfinityEscape { t });
        }
        let v = position.derivative();
        let a = v.derivative();
        let v0 = v.value().norm();
        if v0 <= 1e-14 * (1.0 + position.value().norm()) {
            return Err(GeomError::CuspPoint { t });
        }
        let speed = v.norm();
        let tangent = v.div(speed);
        let cross = v.cross(&a);
        let cross_norm = cross.norm();
        let k = cross_norm / speed.truncate(len - 2).powf(3.0);
        if !(k.value() > eps_k) {
            return Err(GeomError::DegenerateCurvature { t, k: k.value() });
        }
        let binormal = cross.div(cross_norm);
        let normal = binormal.cross(&tangent);
        let tau = if len >= 4 {
            let j = a.derivative();
            det3(&v, &a, &j) / cross.norm_squared()
        } else {
            Jet::zero(0)
        };
        Ok(FrenetJet {
            t,
            position,
            speed,
            tangent,
            normal,
            binormal,
            k,
            tau,
            eps_tau,
        })
    }

    /// Arclength derivative of a scalar jet; one coefficient shorter.
    pub fn d_ds(&self, f: &Jet) -> Jet {
        f.derivative() / self.speed
    }

    /// Arclength derivative of a vector jet.
    pub fn d_ds3(&self, f: &Jet3) -> Jet3 {
        f.derivative().div(self.speed)
    }

    pub fn r(&self) -> Jet {
        self.k.recip()
    }

    pub fn dr_ds(&self) -> Jet {
        self.d_ds(&self.r())
    }

    pub fn torsion_checked(&self) -> Result<Jet> {
        if self.tau.is_empty() {
            return Err(GeomError::InsufficientOrder {
                needed: 3,
                available: self.position.len() - 1,
            });
        }
        let tau = self.tau.value();
        if !(tau.abs() > self.eps_tau) {
            return Err(GeomError::TorsionVanishes { t: self.t, tau });
        }
        Ok(self.tau)
    }

    /// `σ = rτ + (r'/τ)'` with `'` = d/ds.
    pub fn sigma(&self) -> Result<Jet> {
        let tau = self.torsion_checked()?;
        let r = self.r();
        Ok(r * tau + self.d_ds(&(self.dr_ds() / tau)))
    }

    pub fn point(&self) -> Vector3<f64> {
        self.position.value()
    }
}

pub(crate) fn is_declared_cusp(c: &Curve, t: f64) -> bool {
    c.cusps().iter().any(|&u| (u - t).abs() <= 1e-12 * (1.0 + t.abs()))
}

/// Frenet apparatus at one parameter value.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FrenetState {
    pub t: f64,
    pub point: Vector3<f64>,
    pub tangent: Vector3<f64>,
    pub normal: Vector3<f64>,
    pub binormal: Vector3<f64>,
    pub speed: f64,
    pub k: f64,
    pub tau: f64,
    pub r: f64,
    pub dr_ds: f64,
    pub d2r_ds2: f64,
    /// `None` where the torsion vanishes and σ is undefined.
    pub sigma: Option<f64>,
}

pub fn frenet_at(c: &Curve, t: f64) -> Result<FrenetState> {
    c.check_domain(t)?;
    let f = c.frenet_jet(t, 5)?;
    let dr = f.dr_ds();
    let sigma = match f.sigma() {
        Ok(s) => Some(s.value()),
        Err(GeomError::TorsionVanishes { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(FrenetState {
        t,
        point: f.point(),
        tangent: f.tangent.value(),
        normal: f.normal.value(),
        binormal: f.binormal.value(),
        speed: f.speed.value(),
        k: f.k.value(),
        tau: f.tau.value(),
        r: 1.0 / f.k.value(),
        dr_ds: dr.value(),
        d2r_ds2: f.d_ds(&dr).value(),
        sigma,
    })
}

pub fn sigma_at(c: &Curve, t: f64) -> Result<f64> {
    c.check_domain(t)?;
    Ok(c.frenet_jet(t, 5)?.sigma()?.value())
}

/// `∫ ‖ξ'‖ dt` over `[a, b]`.
pub fn arclength(c: &Curve, a: f64, b: f64) -> Result<f64> {
    c.check_domain(a)?;
    c.check_domain(b)?;
    quadrature::integrate(|t| c.speed(t), a, b, 1e-11)
}

const TOTAL_TOL: f64 = 1e-10;

/// `∫ k ds` over the domain.
pub fn total_curvature(c: &Curve) -> Result<f64> {
    let (lo, hi) = c.domain();
    quadrature::integrate(
        |t| {
            let f = c.frenet_jet(t, 3)?;
            Ok(f.k.value() * f.speed.value())
        },
        lo,
        hi,
        TOTAL_TOL,
    )
}

/// `∫ τ ds` over the domain.
pub fn total_torsion(c: &Curve) -> Result<f64> {
    c.total_torsion()
}

/// `∫ |τ| ds` over the domain.
pub fn total_absolute_torsion(c: &Curve) -> Result<f64> {
    let (lo, hi) = c.domain();
    quadrature::integrate(
        |t| {
            let f = c.frenet_jet(t, 4)?;
            Ok(f.tau.value().abs() * f.speed.value())
        },
        lo,
        hi,
        TOTAL_TOL,
    )
}

/// Geodesic curvature of the tangent indicatrix, `τ/k`.
pub fn tangent_indicatrix_geodesic_curvature(c: &Curve, t: f64) -> Result<f64> {
    c.check_domain(t)?;
    let f = c.frenet_jet(t, 4)?;
    Ok(f.tau.value() / f.k.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Congruence {
    pub congruent: bool,
    /// The match needs a reflection (torsion of opposite sign).
    pub mirror: bool,
    /// Largest difference of the `(k, τ)` profiles (with `τ` negated for
    /// mirror matches).
    pub max_deviation: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct CongruenceOptions {
    pub samples: usize,
    /// Profile tolerance for declaring congruence.
    pub tol: f64,
    /// Relative tolerance on the total lengths.
    pub length_tol: f64,
}

impl Default for CongruenceOptions {
    fn default() -> Self {
        CongruenceOptions {
            samples: 256,
            tol: 1e-6,
            length_tol: 1e-6,
        }
    }
}

pub fn is_congruent(a: &Curve, b: &Curve, allow_mirror: bool) -> Result<Congruence> {
    is_congruent_with(a, b, allow_mirror, &CongruenceOptions::default())
}

/// Compare the curvature and torsion of both curves as functions of the
/// arclength measured from the start of each domain.
pub fn is_congruent_with(
    a: &Curve,
    b: &Curve,
    allow_mirror: bool,
    opts: &CongruenceOptions,
) -> Result<Congruence> {
    let (la, lb) = (a.length()?, b.length()?);
    if (la - lb).abs() > opts.length_tol * la.max(lb).max(1.0) {
        return Err(GeomError::LengthMismatch { a: la, b: lb });
    }
    let len = la.min(lb);
    let n = opts.samples.max(2);
    let profile = |c: &Curve, s: f64| -> Result<(f64, f64)> {
        let t = c.param_at_arclength(s)?;
        let f = c.frenet_jet(t, 4)?;
        Ok((f.k.value(), f.tau.value()))
    };
    let (mut direct, mut mirrored) = (0.0f64, 0.0f64);
    for i in 0..n {
        let s = len * i as f64 / (n - 1) as f64;
        let (ka, ta) = profile(a, s)?;
        let (kb, tb) = profile(b, s)?;
        let dk = (ka - kb).abs();
        direct = direct.max(dk.max((ta - tb).abs()));
        mirrored = mirrored.max(dk.max((ta + tb).abs()));
    }
    let use_mirror = allow_mirror && mirrored < direct;
    let max_deviation = if use_mirror { mirrored } else { direct };
    Ok(Congruence {
        congruent: max_deviation <= opts.tol,
        mirror: use_mirror,
        max_deviation,
    })
}
