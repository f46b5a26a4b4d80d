//! String involutes and the one-parameter family of Monge evolutes.
//!
//! Arclength enters through the chain rule and the cached arclength and
//! torsion tables of [`Curve`]; curves need not be unit speed. The phase of
//! a Monge evolute is `α(t) = α0 + ∫ τ ds` from the start of the domain,
//! never folded into a principal range.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::frenet::{Curve, FrenetJet, Parametrization};
use crate::jet::Jet3;
use crate::numeric::roots::{self, RootScan, ScanOptions};

/// `(-1)^(number of declared cusps before t)`: the orientation of the
/// continuous unit tangent relative to `η'/|η'|`.
fn orientation(c: &Curve, t: f64) -> f64 {
    let flips = c.cusps().iter().filter(|&&u| u < t).count();
    if flips % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Arclength from the start of the domain with the sign flipped after each
/// declared cusp.
pub fn signed_arclength(c: &Curve, t: f64) -> Result<f64> {
    c.check_domain(t)?;
    let (lo, _) = c.domain();
    let mut marks: Vec<f64> = vec![lo];
    marks.extend(c.cusps().iter().copied().filter(|&u| u > lo && u < t));
    marks.push(t);
    let mut total = 0.0;
    let mut sign = 1.0;
    for w in marks.windows(2) {
        total += sign * (c.arclength_at(w[1])? - c.arclength_at(w[0])?);
        sign = -sign;
    }
    Ok(total)
}

/// Signed length of the whole curve.
pub fn signed_length(c: &Curve) -> Result<f64> {
    signed_arclength(c, c.domain().1)
}

struct StringInvolute {
    eta: Curve,
    ell: f64,
}

impl Parametrization for StringInvolute {
    fn jet(&self, t: f64, len: usize) -> Result<Jet3> {
        let len = len.max(1);
        let f = self.eta.frenet_jet(t, len.max(2) + 1)?;
        let sign = orientation(&self.eta, t);
        let s = (f.speed.truncate(len.saturating_sub(1).max(1)) * sign).integrate(signed_arclength(&self.eta, t)?);
        let arm = (s.truncate(len) * -1.0) + self.ell;
        Ok(f.position.truncate(len) + f.tangent.scale_f(sign).scale(arm))
    }

    fn max_len(&self) -> usize {
        self.eta.max_len().saturating_sub(1)
    }
}

#[derive(Debug, Clone)]
pub struct MongeInvolute {
    pub curve: Curve,
    /// Parameters where the string is used up; the involute has cusps on
    /// `η` there.
    pub cusps: Vec<f64>,
}

/// `ξ = η + (ℓ - s) t_η` with `s` the (signed) arclength of `η` from the
/// start of its domain.
pub fn monge_involute(eta: &Curve, ell: f64) -> Result<MongeInvolute> {
    if !ell.is_finite() {
        return Err(GeomError::InvalidArgument(format!("string length {ell} is not finite")));
    }
    let (lo, hi) = eta.domain();
    let scan = roots::scan(
        |t| Ok(signed_arclength(eta, t)? - ell),
        lo,
        hi,
        ScanOptions::default(),
    );
    let closed = eta.is_closed() && signed_length(eta)?.abs() <= 1e-9 * eta.length()?.max(1.0);
    let curve = Curve::new(
        Arc::new(StringInvolute {
            eta: eta.clone(),
            ell,
        }),
        lo,
        hi,
    )?
    .named(format!("monge involute of {}", eta.name()))
    .assume_closed(closed);
    Ok(MongeInvolute {
        curve,
        cusps: scan.params(),
    })
}

/// Phase `α(t) = α0 + ∫ τ ds`.
pub fn phase(xi: &Curve, alpha0: f64, t: f64) -> Result<f64> {
    Ok(alpha0 + xi.torsion_integral_at(t)?)
}

pub const COS_ALPHA_MIN: f64 = 1e-9;

/// `η = ξ + r n - r tan α b` from a Frenet jet and the phase at its base
/// point; two coefficients shorter than the position jet.
fn monge_from_jet(f: &FrenetJet, alpha: f64) -> Result<Jet3> {
    if alpha.cos().abs() <= COS_ALPHA_MIN {
        return Err(GeomError::InfinityEscape { t: f.t });
    }
    let len = f.normal.len();
    let tau = f.tau.truncate(len.saturating_sub(1).max(1));
    let a = (tau * f.speed.truncate(tau.len())).integrate(alpha).truncate(len);
    let r = f.r().truncate(len);
    Ok(f.position.truncate(len) + f.normal.scale(r) - f.binormal.scale(r * a.tan()))
}

fn escape_on_flat(t: f64, e: GeomError) -> GeomError {
    match e {
        GeomError::DegenerateCurvature { .. } => GeomError::InfinityEscape { t },
        e => e,
    }
}

struct MongeEvoluteSource {
    xi: Curve,
    alpha0: f64,
}

impl Parametrization for MongeEvoluteSource {
    fn jet(&self, t: f64, len: usize) -> Result<Jet3> {
        let f = self.xi.frenet_jet(t, len.max(2) + 2).map_err(|e| escape_on_flat(t, e))?;
        monge_from_jet(&f, phase(&self.xi, self.alpha0, t)?).map(|j| j.truncate(len))
    }

    fn max_len(&self) -> usize {
        self.xi.max_len().saturating_sub(2)
    }
}

pub fn monge_evolute_point(xi: &Curve, alpha0: f64, t: f64) -> Result<Vector3<f64>> {
    xi.check_domain(t)?;
    let f = xi.frenet_jet(t, 4).map_err(|e| escape_on_flat(t, e))?;
    Ok(monge_from_jet(&f, phase(xi, alpha0, t)?)?.value())
}

/// The Monge evolute with phase `alpha0` at the start of the domain.
pub fn monge_evolute(xi: &Curve, alpha0: f64) -> Curve {
    let (lo, hi) = xi.domain();
    let closed = xi.is_closed() && monge_closedness(xi).map(|m| m.evolutes_closed).unwrap_or(false);
    Curve::new(
        Arc::new(MongeEvoluteSource {
            xi: xi.clone(),
            alpha0,
        }),
        lo,
        hi,
    )
    .expect("domain already validated")
    .named(format!("monge evolute of {} (alpha0 = {alpha0})", xi.name()))
    .assume_closed(closed)
}

/// `(k cos α)' = k' cos α - k τ sin α`.
pub fn cusp_criterion(xi: &Curve, alpha0: f64, t: f64) -> Result<f64> {
    let f = xi.frenet_jet(t, 4)?;
    let a = phase(xi, alpha0, t)?;
    let kp = f.d_ds(&f.k).value();
    let (k, tau) = (f.k.value(), f.tau.value());
    Ok(kp * a.cos() - k * tau * a.sin())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MongeCusps {
    /// Critical points of `k cos α` where the evolute speed vanishes.
    pub scan: RootScan,
    /// Critical points rejected because `|η'|` stays away from zero there
    /// (for instance where `η` escapes to infinity).
    pub rejected: Vec<f64>,
}

pub fn monge_evolute_cusps(xi: &Curve, alpha0: f64) -> Result<MongeCusps> {
    monge_evolute_cusps_with(xi, alpha0, 2048)
}

pub fn monge_evolute_cusps_with(xi: &Curve, alpha0: f64, samples: usize) -> Result<MongeCusps> {
    let (lo, hi) = xi.domain();
    let length = xi.length()?;
    let kmax = xi
        .sample_params(64)
        .into_iter()
        .filter_map(|t| xi.frenet_jet(t, 3).ok())
        .fold(0.0f64, |m, f| m.max(f.k.value()));
    let opts = ScanOptions {
        samples,
        flat_tol: Some(1e-9 * kmax / length),
        periodic: xi.is_closed() && monge_closedness(xi).map(|m| m.evolutes_closed).unwrap_or(false),
        ..Default::default()
    };
    let scan = roots::scan(|t| cusp_criterion(xi, alpha0, t), lo, hi, opts);
    let RootScan::Roots { roots } = scan else {
        return Ok(MongeCusps {
            scan,
            rejected: Vec::new(),
        });
    };
    let eta = monge_evolute(xi, alpha0);
    let speed = |t: f64| -> Option<f64> {
        let v = eta.derivative(t, 1).ok()?.norm() / xi.speed(t).ok()?;
        v.is_finite().then_some(v)
    };
    let max = xi.sample_params(samples.min(512)).into_iter().filter_map(speed).fold(0.0f64, f64::max);
    let (kept, rejected): (Vec<_>, Vec<_>) =
        roots.into_iter().partition(|r| speed(r.t).is_some_and(|v| v <= 1e-6 * max.max(1.0)));
    Ok(MongeCusps {
        scan: RootScan::Roots { roots: kept },
        rejected: rejected.into_iter().map(|r| r.t).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MongeClosedness {
    pub evolutes_closed: bool,
    pub total_torsion: f64,
}

/// Monge evolutes of a closed curve close exactly when its total torsion is
/// a multiple of `π`.
pub fn monge_closedness(xi: &Curve) -> Result<MongeClosedness> {
    if !xi.is_closed() {
        return Err(GeomError::NotClosed { gap: xi.closure_gap()? });
    }
    let total = xi.total_torsion()?;
    let off = total - PI * (total / PI).round();
    Ok(MongeClosedness {
        evolutes_closed: off.abs() <= 1e-6,
        total_torsion: total,
    })
}

/// Angle in `[0, π/2]` between the lines from `ξ(t)` to the Monge evolutes
/// with phases `a` and `b`.
pub fn constant_angle(xi: &Curve, a: f64, b: f64, t: f64) -> Result<f64> {
    let p = xi.point(t)?;
    let u = monge_evolute_point(xi, a, t)? - p;
    let v = monge_evolute_point(xi, b, t)? - p;
    Ok(u.cross(&v).norm().atan2(u.dot(&v).abs()))
}

/// `r' cos α + r τ sin α`: zero where the Monge evolute touches the
/// evolute.
pub fn contact_criterion(xi: &Curve, alpha0: f64, t: f64) -> Result<f64> {
    let f = xi.frenet_jet(t, 4)?;
    let a = phase(xi, alpha0, t)?;
    Ok(f.dr_ds().value() * a.cos() + f.r().value() * f.tau.value() * a.sin())
}

/// Parameters where the Monge evolute with phase `alpha0` meets the evolute.
pub fn evolute_contacts(xi: &Curve, alpha0: f64) -> RootScan {
    let (lo, hi) = xi.domain();
    roots::scan(
        |t| contact_criterion(xi, alpha0, t),
        lo,
        hi,
        ScanOptions {
            periodic: xi.is_closed(),
            ..Default::default()
        },
    )
}

/// Phases `α0` on a uniform grid of `n` values in `(-π/2, π/2)`.
pub fn phase_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| -FRAC_PI_2 + PI * (i as f64 + 0.5) / n as f64).collect()
}
