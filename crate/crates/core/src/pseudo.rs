//! Pseudo-evolutes: regression edges of rectifying developables.

use std::sync::Arc;

use nalgebra::{Vector2, Vector3};
use serde::Serialize;

use crate::envelope::{regression_edge_point, CurvePlane, PlaneFamily};
use crate::error::{GeomError, Result};
use crate::export::{sample_branches, Polyline};
use crate::frenet::{self, Curve, FrenetJet, Parametrization};
use crate::jet::Jet3;
use crate::numeric::roots::{self, RootScan, ScanOptions};
use crate::rolling::{cross2, Development};

/// `ε = ξ + k/(k'τ - kτ') (τ t + k b)`, four coefficients shorter than the
/// position jet.
pub(crate) fn pseudo_evolute_from_jet(f: &FrenetJet) -> Result<Jet3> {
    if f.tau.is_empty() {
        return Err(GeomError::InsufficientOrder {
            needed: 4,
            available: f.position.len() - 1,
        });
    }
    let k = f.k.truncate(f.tau.len());
    let kp = f.d_ds(&f.k);
    let taup = f.d_ds(&f.tau);
    let den = kp * f.tau - k * taup;
    let (k0, tau0) = (k.value(), f.tau.value());
    if den.is_empty() || !(den.value().abs() > 1e-12 * k0 * tau0.abs()) {
        return Err(GeomError::InfinityEscape { t: f.t });
    }
    let len = den.len();
    let k = k.truncate(len);
    let dir = f.tangent.truncate(len).scale(f.tau.truncate(len)) + f.binormal.truncate(len).scale(k);
    Ok(f.position.truncate(len) + dir.scale(k / den))
}

pub fn pseudo_evolute_point(c: &Curve, t: f64) -> Result<Vector3<f64>> {
    c.check_domain(t)?;
    if frenet::is_declared_cusp(c, t) {
        return regression_edge_point(&PlaneFamily::of_curve(c, CurvePlane::Rectifying), t);
    }
    Ok(pseudo_evolute_from_jet(&c.frenet_jet(t, 5)?)?.value())
}

struct PseudoEvoluteSource {
    curve: Curve,
}

impl Parametrization for PseudoEvoluteSource {
    fn jet(&self, t: f64, len: usize) -> Result<Jet3> {
        pseudo_evolute_from_jet(&self.curve.frenet_jet(t, len.max(1) + 4)?).map(|e| e.truncate(len))
    }

    fn max_len(&self) -> usize {
        self.curve.max_len().saturating_sub(4)
    }
}

pub fn pseudo_evolute_curve(c: &Curve) -> Curve {
    let (lo, hi) = c.domain();
    Curve::new(Arc::new(PseudoEvoluteSource { curve: c.clone() }), lo, hi)
        .expect("domain already validated")
        .named(format!("pseudo-evolute of {}", c.name()))
        .assume_closed(c.is_closed())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudoSingularities {
    /// Zeros of `(τ/k)'`.
    pub infinities: RootScan,
    /// Zeros of `(τ/k)''`.
    pub cusps: RootScan,
}

/// `τ/k` and its first two arclength derivatives.
pub fn torsion_ratio(c: &Curve, t: f64) -> Result<[f64; 3]> {
    let f = c.frenet_jet(t, 6)?;
    let g = f.tau / f.k.truncate(f.tau.len());
    let g1 = f.d_ds(&g);
    let g2 = f.d_ds(&g1);
    Ok([g.value(), g1.value(), g2.value()])
}

pub fn pseudo_singularities(c: &Curve) -> Result<PseudoSingularities> {
    pseudo_singularities_with(c, 2048)
}

pub fn pseudo_singularities_with(c: &Curve, samples: usize) -> Result<PseudoSingularities> {
    let (lo, hi) = c.domain();
    let length = c.length()?;
    let gmax = c
        .sample_params(64)
        .into_iter()
        .filter_map(|t| torsion_ratio(c, t).ok())
        .fold(0.0f64, |m, g| m.max(g[0].abs()));
    let scale = (1.0 + gmax) / length;
    let opts = |flat: f64| ScanOptions {
        samples,
        flat_tol: Some(flat),
        periodic: c.is_closed(),
        ..Default::default()
    };
    let infinities = roots::scan(|t| Ok(torsion_ratio(c, t)?[1]), lo, hi, opts(1e-9 * scale));
    let cusps = roots::scan(|t| Ok(torsion_ratio(c, t)?[2]), lo, hi, opts(1e-9 * scale / length));
    Ok(PseudoSingularities { infinities, cusps })
}

/// Angle between the principal normal and the normal of the rectifying
/// developable along the curve, in radians.
///
/// The surface normal is `t × ℓ`, where the ruling `ℓ = ν × ν'` is the
/// intersection of consecutive rectifying planes with normals `ν`.
pub fn geodesic_residual(c: &Curve, t: f64) -> Result<f64> {
    c.check_domain(t)?;
    let f = c.frenet_jet(t, 4)?;
    let (nu, _) = PlaneFamily::of_curve(c, CurvePlane::Rectifying).planes(t, 2)?;
    let ruling = nu.coeff(0).cross(&nu.coeff(1));
    let normal = f.tangent.value().cross(&ruling);
    let n = f.normal.value();
    Ok(normal.cross(&n).norm().atan2(normal.dot(&n).abs()))
}

/// A line `point + λ direction` in development coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Line2 {
    pub point: Vector2<f64>,
    pub direction: Vector2<f64>,
}

impl Line2 {
    pub fn new(point: Vector2<f64>, direction: Vector2<f64>) -> Line2 {
        Line2 {
            point,
            direction: direction.normalize(),
        }
    }
}

/// Geodesic of the tangent developable of `η` that unrolls to a straight
/// line: `X = η + u t_η` with `u = (q - D) × d / (h × d)`.
struct PseudoInvoluteSource {
    dev: Development,
    line: Line2,
}

impl PseudoInvoluteSource {
    fn numerator(&self, t: f64) -> Result<f64> {
        let (_, d, _) = self.dev.state(t)?;
        Ok(cross2(&(self.line.point - d), &self.line.direction))
    }

    fn denominator(&self, t: f64) -> Result<f64> {
        let (theta, _, _) = self.dev.state(t)?;
        Ok(cross2(&Vector2::new(theta.cos(), theta.sin()), &self.line.direction))
    }
}

impl Parametrization for PseudoInvoluteSource {
    fn jet(&self, t: f64, len: usize) -> Result<Jet3> {
        let len = len.max(1);
        let eta = self.dev.curve();
        let f = eta.frenet_jet(t, len + 1)?;
        let (theta, [dx, dy]) = self.dev.jets(t, len)?;
        let (sin, cos) = theta.sin_cos();
        let (q, d) = (self.line.point, self.line.direction);
        let den = cos * d.y - sin * d.x;
        if den.value().abs() <= 1e-12 {
            return Err(GeomError::LineParallelToRuling { t });
        }
        let num = (q.x - dx.truncate(len)) * d.y - (q.y - dy.truncate(len)) * d.x;
        Ok(f.position.truncate(len) + f.tangent.scale(num / den))
    }

    fn max_len(&self) -> usize {
        self.dev.curve().max_len().saturating_sub(1)
    }
}

#[derive(Debug, Clone)]
pub struct PseudoInvolute {
    pub curve: Curve,
    /// Parameters where the involute meets `η` (cusps of the involute).
    pub edge_crossings: Vec<f64>,
    /// Parameters where the line is parallel to a ruling; the involute
    /// escapes to infinity there.
    pub parallel_rulings: Vec<f64>,
}

/// The pseudo-involute of `eta` whose development is `line`.
///
/// Development coordinates are those of [`crate::rolling`]: `η(lo)` at the
/// origin, heading 0 along its tangent. Meeting `η` is reported in
/// `edge_crossings`, not as an error.
pub fn pseudo_involutes(eta: &Curve, line: Line2) -> Result<PseudoInvolute> {
    if !(line.direction.norm() > 0.0 && line.direction.iter().all(|v| v.is_finite())) {
        return Err(GeomError::InvalidArgument("line direction must be nonzero".into()));
    }
    let dev = Development::new(eta)?;
    let source = PseudoInvoluteSource { dev, line };
    let (lo, hi) = eta.domain();
    let opts = ScanOptions::default();
    let edge_crossings = roots::scan(|t| source.numerator(t), lo, hi, opts).params();
    let parallel_rulings = roots::scan(|t| source.denominator(t), lo, hi, opts).params();
    let scale = 1.0 + line.point.norm();
    for &t in &parallel_rulings {
        if source.numerator(t)?.abs() <= 1e-8 * scale {
            return Err(GeomError::DegenerateInvolute { t });
        }
    }
    let curve = Curve::new(Arc::new(source), lo, hi)?.named(format!("pseudo-involute of {}", eta.name()));
    Ok(PseudoInvolute {
        curve,
        edge_crossings,
        parallel_rulings,
    })
}

/// `ξ + h (τ/k t + b)`: the curve at distance `h` from `ξ` along the rulings
/// of its rectifying developable. It is again a pseudo-involute of the
/// pseudo-evolute of `ξ`, and closed when `ξ` is.
pub fn parallel_pseudo_involute(xi: &Curve, h: f64) -> Curve {
    let (lo, hi) = xi.domain();
    Curve::new(Arc::new(ParallelSource { curve: xi.clone(), h }), lo, hi)
        .expect("domain already validated")
        .named(format!("{} shifted by {h}", xi.name()))
        .assume_closed(xi.is_closed())
}

struct ParallelSource {
    curve: Curve,
    h: f64,
}

impl Parametrization for ParallelSource {
    fn jet(&self, t: f64, len: usize) -> Result<Jet3> {
        let len = len.max(1);
        let f = self.curve.frenet_jet(t, len + 3)?;
        let ratio = f.tau / f.k.truncate(len);
        let dir = f.tangent.truncate(len).scale(ratio) + f.binormal.truncate(len);
        Ok(f.position.truncate(len) + dir.scale_f(self.h))
    }

    fn max_len(&self) -> usize {
        self.curve.max_len().saturating_sub(3)
    }
}

/// Sampled pseudo-evolute, split into branches at its infinity escapes and
/// cusps.
pub fn pseudo_evolute_polyline(c: &Curve, samples: usize) -> Result<Polyline> {
    let sing = pseudo_singularities(c)?;
    let mut breaks = sing.infinities.params();
    breaks.extend(sing.cusps.params());
    Ok(sample_branches(&c.sample_params(samples), &breaks, c.is_closed(), |t| {
        pseudo_evolute_point(c, t)
    }))
}
