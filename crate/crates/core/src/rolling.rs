//! Planar development, the monodromy of the rolling osculating plane, and
//! involutes traced as trajectories of points of that plane.
//!
//! The plane `H` is the osculating plane at the start of the domain with
//! origin `e(lo)`, x-axis along the tangent and y-axis along the principal
//! normal there. Angles are counterclockwise in these coordinates.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use nalgebra::{Matrix2, Rotation2, Vector2, Vector3};
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::frenet::{Curve, Parametrization};
use crate::jet::{Jet, Jet3};
use crate::numeric::ode::{self, OdeOptions, OdeSolution, Rhs, State};

pub(crate) fn cross2(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Representative of `a` modulo `2π` in `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// The development of a curve as a solution of
/// `θ' = k|ξ'|`, `D' = |ξ'| (cos θ, sin θ)`, `s' = |ξ'|`.
#[derive(Clone, Debug)]
pub struct Development {
    curve: Curve,
    solution: OdeSolution<4>,
}

impl Development {
    pub fn new(c: &Curve) -> Result<Development> {
        let (lo, hi) = c.domain();
        let curve = c.clone();
        let rhs: Rhs<4> = Arc::new(move |t, y| {
            let f = curve.frenet_jet(t, 3)?;
            let v = f.speed.value();
            Ok(State::<4>::new(f.k.value() * v, v * y[0].cos(), v * y[0].sin(), v))
        });
        let opts = OdeOptions {
            rtol: 1e-11,
            atol: 1e-12,
            ..Default::default()
        };
        let solution = ode::solve(rhs, lo, State::<4>::zeros(), hi, opts, None)?;
        Ok(Development {
            curve: c.clone(),
            solution,
        })
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    /// Heading, position and arclength at `t`.
    pub fn state(&self, t: f64) -> Result<(f64, Vector2<f64>, f64)> {
        self.curve.check_domain(t)?;
        let (lo, hi) = self.curve.domain();
        let y = self.solution.state_at(t.clamp(lo, hi))?;
        Ok((y[0], Vector2::new(y[1], y[2]), y[3]))
    }

    /// Heading and position jets of length `len` at `t`.
    pub fn jets(&self, t: f64, len: usize) -> Result<(Jet, [Jet; 2])> {
        let (theta0, d0, _) = self.state(t)?;
        let f = self.curve.frenet_jet(t, len + 1)?;
        let theta = (f.k * f.speed.truncate(len - 1)).integrate(theta0);
        let (sin, cos) = theta.truncate(len - 1).sin_cos();
        let v = f.speed.truncate(len - 1);
        Ok((theta, [(v * cos).integrate(d0.x), (v * sin).integrate(d0.y)]))
    }

    /// The isometry of `H` carrying the initial contact element to the
    /// terminal one.
    pub fn end_isometry(&self) -> PlanarIsometry {
        let y = self.solution.final_state();
        PlanarIsometry::new(y[0], Vector2::new(y[1], y[2]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanarSample {
    pub t: f64,
    pub s: f64,
    pub point: Vector2<f64>,
    pub heading: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanarCurve {
    pub samples: Vec<PlanarSample>,
}

impl PlanarCurve {
    pub fn points(&self) -> Vec<Vector2<f64>> {
        self.samples.iter().map(|s| s.point).collect()
    }
}

/// Develop `c` into the plane starting at the origin with heading 0,
/// sampled at `samples` evenly spaced parameters (both ends included).
pub fn develop_with(c: &Curve, samples: usize) -> Result<PlanarCurve> {
    let dev = Development::new(c)?;
    let (lo, hi) = c.domain();
    let n = samples.max(2);
    let samples = (0..n)
        .map(|i| {
            let t = if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
            let (heading, point, s) = dev.state(t)?;
            Ok(PlanarSample { t, s, point, heading })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PlanarCurve { samples })
}

pub fn develop(c: &Curve) -> Result<PlanarCurve> {
    develop_with(c, 1024)
}

/// `p ↦ R(angle) p + translation`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanarIsometry {
    /// Rotation angle in `(-π, π]`.
    pub angle: f64,
    /// Unwrapped rotation angle as accumulated along the curve.
    pub total_angle: f64,
    pub translation: Vector2<f64>,
    pub fixed_point: Option<Vector2<f64>>,
}

/// Below this the rotation angle counts as zero mod `2π`.
pub const ANGLE_TOL: f64 = 1e-9;
/// Below this a rotation-free isometry counts as the identity.
pub const TRANSLATION_TOL: f64 = 1e-8;

impl PlanarIsometry {
    pub fn new(total_angle: f64, translation: Vector2<f64>) -> PlanarIsometry {
        let mut m = PlanarIsometry {
            angle: wrap_angle(total_angle),
            total_angle,
            translation,
            fixed_point: None,
        };
        m.fixed_point = monodromy_fixed_point(&m).ok();
        m
    }

    pub fn rotation(&self) -> Matrix2<f64> {
        *Rotation2::new(self.angle).matrix()
    }

    pub fn apply(&self, p: &Vector2<f64>) -> Vector2<f64> {
        self.rotation() * p + self.translation
    }

    pub fn is_rotation_free(&self) -> bool {
        self.angle.abs() <= ANGLE_TOL
    }
}

/// The monodromy of a closed curve.
pub fn monodromy(c: &Curve) -> Result<PlanarIsometry> {
    if !c.is_closed() {
        let gap = c.closure_gap()?;
        return Err(GeomError::NotClosed { gap });
    }
    Ok(Development::new(c)?.end_isometry())
}

/// The unique fixed point of a monodromy with nonzero rotation.
pub fn monodromy_fixed_point(m: &PlanarIsometry) -> Result<Vector2<f64>> {
    if m.is_rotation_free() {
        return Err(if m.translation.norm() <= TRANSLATION_TOL {
            GeomError::IdentityMonodromy
        } else {
            GeomError::PureTranslation
        });
    }
    let a = Matrix2::identity() - m.rotation();
    a.lu()
        .solve(&m.translation)
        .ok_or(GeomError::IdentityMonodromy)
}

/// Trajectory of a point rigidly attached to the osculating plane as it
/// rolls along `e`: `dP/dt = τ|e'| t × (P - e)`.
struct TracedInvolute {
    curve: Curve,
    solution: OdeSolution<3>,
}

impl Parametrization for TracedInvolute {
    fn jet(&self, t: f64, len: usize) -> Result<Jet3> {
        let y = self.solution.state_at(t)?;
        let p0 = Vector3::new(y[0], y[1], y[2]);
        if len <= 1 {
            return Ok(Jet3::constant(p0, len));
        }
        let f = self.curve.frenet_jet(t, len + 2)?;
        let omega = f.tangent.scale(f.tau * f.speed.truncate(len - 1));
        let mut pc = vec![p0];
        for m in 0..len - 1 {
            let mut acc = Vector3::zeros();
            for i in 0..=m {
                acc += omega.coeff(i).cross(&(pc[m - i] - f.position.coeff(m - i)));
            }
            pc.push(acc / (m + 1) as f64);
        }
        Ok(Jet3::from_vector_coeffs(&pc))
    }

    fn max_len(&self) -> usize {
        self.curve.max_len().saturating_sub(2)
    }
}

/// Map a point of `H` to space.
pub fn plane_point(e: &Curve, p: &Vector2<f64>) -> Result<Vector3<f64>> {
    let (lo, _) = e.domain();
    let f = e.frenet_jet(lo, 3)?;
    Ok(f.point() + f.tangent.value() * p.x + f.normal.value() * p.y)
}

/// The involute of `e` traced by the point `p0` of `H`.
pub fn trace_involute(e: &Curve, p0: Vector2<f64>) -> Result<Curve> {
    let (lo, hi) = e.domain();
    let start = plane_point(e, &p0)?;
    let curve = e.clone();
    let rhs: Rhs<3> = Arc::new(move |t, y| {
        let f = curve.frenet_jet(t, 4)?;
        let w = f.tangent.value() * (f.tau.value() * f.speed.value());
        Ok(w.cross(&(Vector3::new(y[0], y[1], y[2]) - f.point())))
    });
    let opts = OdeOptions {
        rtol: 1e-11,
        atol: 1e-12,
        ..Default::default()
    };
    let solution = ode::solve(rhs, lo, start, hi, opts, None)?;
    let source = TracedInvolute {
        curve: e.clone(),
        solution,
    };
    Ok(Curve::new(Arc::new(source), lo, hi)?.named(format!("involute of {}", e.name())))
}

#[derive(Debug, Clone)]
pub struct ClosedInvolute {
    pub curve: Curve,
    pub monodromy: PlanarIsometry,
    /// Starting point in `H`.
    pub start: Vector2<f64>,
    /// Distance between the two ends.
    pub gap: f64,
    /// Set when the monodromy is the identity and every involute closes.
    pub all_closed: bool,
}

/// The closed involute of a closed curve, traced from the monodromy fixed
/// point.
pub fn closed_involute(e: &Curve) -> Result<ClosedInvolute> {
    let m = monodromy(e)?;
    let (start, all_closed) = match monodromy_fixed_point(&m) {
        Ok(p) => (p, false),
        Err(GeomError::IdentityMonodromy) => {
            let r = 1.0 / e.frenet_jet(e.domain().0, 3)?.k.value();
            (Vector2::new(0.0, 0.5 * r), true)
        }
        Err(err) => return Err(err),
    };
    let curve = trace_involute(e, start)?.assume_closed(true);
    let (lo, hi) = e.domain();
    let gap = (curve.point(hi)? - curve.point(lo)?).norm();
    Ok(ClosedInvolute {
        curve,
        monodromy: m,
        start,
        gap,
        all_closed,
    })
}

/// `(u, v)` coordinates of the rolled point `p` relative to the contact
/// frame `(e(t), t, n)`.
pub fn contact_coordinates(dev: &Development, p: &Vector2<f64>, t: f64) -> Result<Vector2<f64>> {
    let (theta, d, _) = dev.state(t)?;
    Ok(Rotation2::new(-theta) * (p - d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolute::evolute_point;
    use crate::frenet::{self, presets};
    use approx::assert_relative_eq;

    #[test]
    fn development_examples() {
        let circle = develop(&presets::get("circle").unwrap()).unwrap();
        let first = circle.samples.first().unwrap();
        let last = circle.samples.last().unwrap();
        assert!((last.point - first.point).norm() < 1e-8);
        assert_relative_eq!(last.heading, TAU, epsilon = 1e-9);

        let helix = develop(&presets::get("helix").unwrap()).unwrap();
        let last = helix.samples.last().unwrap();
        assert_relative_eq!(last.heading, PI * 2f64.sqrt(), epsilon = 1e-9);
        assert_relative_eq!(last.s, TAU * 2f64.sqrt(), epsilon = 1e-9);
        // Arc of radius 2 centered at (0, 2).
        for s in &helix.samples {
            assert!(((s.point - Vector2::new(0.0, 2.0)).norm() - 2.0).abs() < 1e-8);
        }
    }

    #[test]
    fn development_preserves_curvature() {
        let knot = presets::get("torus-knot").unwrap();
        let dev = Development::new(&knot).unwrap();
        for t in knot.sample_params(512) {
            let (theta, _) = dev.jets(t, 3).unwrap();
            let f = knot.frenet_jet(t, 3).unwrap();
            let planar_k = theta.derivative_value(1) / f.speed.value();
            assert!((planar_k - f.k.value()).abs() < 1e-6);
        }
        let (_, _, s) = dev.state(knot.domain().1).unwrap();
        assert_relative_eq!(s, knot.length().unwrap(), epsilon = 1e-8);
    }

    #[test]
    fn jets_match_the_integrated_state() {
        let knot = presets::get("torus-knot").unwrap();
        let dev = Development::new(&knot).unwrap();
        let (t, h) = (1.3, 1e-3);
        let (theta, d) = dev.jets(t, 5).unwrap();
        let (th1, d1, _) = dev.state(t + h).unwrap();
        assert!((theta.eval_offset(h) - th1).abs() < 1e-10);
        assert!((d[0].eval_offset(h) - d1.x).abs() < 1e-10);
        assert!((d[1].eval_offset(h) - d1.y).abs() < 1e-10);
    }

    #[test]
    fn fixed_points() {
        let m = PlanarIsometry::new(PI, Vector2::zeros());
        assert!(monodromy_fixed_point(&m).unwrap().norm() < 1e-15);
        let m = PlanarIsometry::new(PI / 2.0, Vector2::new(1.0, 0.0));
        let p = monodromy_fixed_point(&m).unwrap();
        assert!((p - Vector2::new(0.5, 0.5)).norm() < 1e-15);
        assert!((m.apply(&p) - p).norm() < 1e-9);
        let m = PlanarIsometry::new(0.0, Vector2::new(1.0, 0.0));
        assert!(matches!(monodromy_fixed_point(&m), Err(GeomError::PureTranslation)));
        assert!(m.fixed_point.is_none());
        let m = PlanarIsometry::new(TAU, Vector2::zeros());
        assert!(matches!(monodromy_fixed_point(&m), Err(GeomError::IdentityMonodromy)));
    }

    #[test]
    fn monodromy_examples() {
        let m = monodromy(&presets::get("circle").unwrap()).unwrap();
        assert!(m.is_rotation_free() && m.translation.norm() < 1e-8);
        assert!(matches!(monodromy(&presets::get("helix").unwrap()), Err(GeomError::NotClosed { .. })));
        let knot = presets::get("torus-knot").unwrap();
        let m = monodromy(&knot).unwrap();
        let total = frenet::total_curvature(&knot).unwrap();
        assert!(wrap_angle(m.angle - total).abs() < 1e-6);
    }

    #[test]
    fn traced_involute_properties() {
        let knot = presets::get("torus-knot").unwrap();
        let p0 = Vector2::new(0.1, 0.4);
        let p1 = Vector2::new(-0.2, 0.3);
        let a = trace_involute(&knot, p0).unwrap();
        let b = trace_involute(&knot, p1).unwrap();
        let dev = Development::new(&knot).unwrap();
        let d0 = (a.point(0.0).unwrap() - b.point(0.0).unwrap()).norm();
        for t in knot.sample_params(64) {
            // Equidistance.
            let d = (a.point(t).unwrap() - b.point(t).unwrap()).norm();
            assert!((d - d0).abs() < 1e-6);
            // The closed-form position of the rolled point.
            let f = knot.frenet_jet(t, 3).unwrap();
            let uv = contact_coordinates(&dev, &p0, t).unwrap();
            let want = f.point() + f.tangent.value() * uv.x + f.normal.value() * uv.y;
            assert!((a.point(t).unwrap() - want).norm() < 1e-7);
            // Velocity along the binormal of the curve.
            let v = a.derivative(t, 1).unwrap();
            if v.norm() > 1e-6 {
                assert!(v.normalize().cross(&f.binormal.value()).norm() < 1e-5);
            }
        }
        // The evolute of the traced curve returns the knot.
        for t in knot.sample_params(32) {
            let Ok(e) = evolute_point(&a, t) else { continue };
            assert!((e - knot.point(t).unwrap()).norm() < 1e-3, "t={t}");
        }
    }

    #[test]
    fn contact_point_is_at_rest() {
        let knot = presets::get("torus-knot").unwrap();
        let dev = Development::new(&knot).unwrap();
        let t = 0.9;
        let (_, d, _) = dev.state(t).unwrap();
        let c = trace_involute(&knot, d).unwrap();
        assert!(c.derivative(t, 1).unwrap().norm() < 1e-7);
    }

    #[test]
    fn closed_involute_of_the_knot() {
        let knot = presets::get("torus-knot").unwrap();
        let ci = closed_involute(&knot).unwrap();
        assert!(!ci.all_closed);
        assert!(ci.gap < 1e-4, "gap {}", ci.gap);
        let circle = presets::get("circle").unwrap();
        assert!(closed_involute(&circle).unwrap().all_closed);
    }
}
