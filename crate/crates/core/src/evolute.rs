//! The evolute as the locus of centers of osculating spheres.

use std::sync::Arc;

use nalgebra::Vector3;
use serde::Serialize;

use crate::envelope::{regression_edge_point, CurvePlane, PlaneFamily};
use crate::error::{GeomError, Result};
use crate::frenet::{self, Curve, FrenetJet, Parametrization};
use crate::jet::{det3, Jet3};
use crate::numeric::roots::{self, RootScan, ScanOptions};

/// `e = ξ + r n + (r'/τ) b`, as a jet three coefficients shorter than the
/// position jet of `f`.
pub(crate) fn evolute_from_jet(f: &FrenetJet) -> Result<Jet3> {
    let tau = f.torsion_checked()?;
    let r = f.r();
    let q = f.dr_ds() / tau;
    Ok(f.position + f.normal.scale(r) + f.binormal.scale(q))
}

/// Center of the osculating sphere at `t`.
pub fn evolute_point(c: &Curve, t: f64) -> Result<Vector3<f64>> {
    c.check_domain(t)?;
    if frenet::is_declared_cusp(c, t) {
        return regression_edge_point(&PlaneFamily::of_curve(c, CurvePlane::Normal), t);
    }
    Ok(evolute_from_jet(&c.frenet_jet(t, 4)?)?.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OsculatingSphere {
    pub center: Vector3<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OsculatingCircle {
    pub center: Vector3<f64>,
    pub radius: f64,
    /// Normal of the circle's plane (the binormal).
    pub normal: Vector3<f64>,
}

pub fn osculating_sphere(c: &Curve, t: f64) -> Result<OsculatingSphere> {
    c.check_domain(t)?;
    let f = c.frenet_jet(t, 4)?;
    let center = evolute_from_jet(&f)?.value();
    Ok(OsculatingSphere {
        center,
        radius: (center - f.point()).norm(),
    })
}

pub fn osculating_circle(c: &Curve, t: f64) -> Result<OsculatingCircle> {
    c.check_domain(t)?;
    let f = c.frenet_jet(t, 3)?;
    let r = 1.0 / f.k.value();
    Ok(OsculatingCircle {
        center: f.point() + f.normal.value() * r,
        radius: r,
        normal: f.binormal.value(),
    })
}

/// Below this `|σ|` the evolute is treated as having a cusp.
pub const SIGMA_CUSP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvoluteCurvature {
    /// `|τ| / |σ|`.
    pub k: f64,
    /// `k / σ`.
    pub tau: f64,
    /// Worst of `1 - |t_e·b|`, `1 - |n_e·n|`, `1 - |b_e·t|` from the Frenet
    /// frame of the evolute itself; `None` when the curve does not supply
    /// enough derivatives.
    pub frame_alignment: Option<f64>,
}

pub fn evolute_curvature_torsion(c: &Curve, t: f64) -> Result<EvoluteCurvature> {
    c.check_domain(t)?;
    let f = c.frenet_jet(t, 5)?;
    let sigma = f.sigma()?.value();
    if sigma.abs() <= SIGMA_CUSP {
        return Err(GeomError::EvoluteCusp { t, sigma });
    }
    let (k, tau) = (f.k.value(), f.tau.value());
    let frame_alignment = if c.max_len() >= 7 {
        let big = c.frenet_jet(t, 7)?;
        let e = evolute_from_jet(&big)?;
        FrenetJet::from_position(t, e, 0.0, 0.0).ok().map(|fe| {
            let (b, n, tt) = (big.binormal.value(), big.normal.value(), big.tangent.value());
            [
                1.0 - fe.tangent.value().dot(&b).abs(),
                1.0 - fe.normal.value().dot(&n).abs(),
                1.0 - fe.binormal.value().dot(&tt).abs(),
            ]
            .into_iter()
            .fold(0.0, f64::max)
        })
    } else {
        None
    };
    Ok(EvoluteCurvature {
        k: tau.abs() / sigma.abs(),
        tau: k / sigma,
        frame_alignment,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Interior,
    Exterior,
}

/// Interior iff `στ > 0`.
pub fn classify_interior_exterior(c: &Curve, t: f64) -> Result<Side> {
    c.check_domain(t)?;
    let f = c.frenet_jet(t, 5)?;
    let value = f.sigma()?.value() * f.tau.value();
    if value.abs() <= 1e-12 {
        return Err(GeomError::Indeterminate { t, value });
    }
    Ok(if value > 0.0 { Side::Interior } else { Side::Exterior })
}

/// `det(t, t'', t''')` with `'` = d/ds.
pub fn tangent_determinant(c: &Curve, t: f64) -> Result<f64> {
    c.check_domain(t)?;
    let f = c.frenet_jet(t, 5)?;
    let t1 = f.d_ds3(&f.tangent);
    let t2 = f.d_ds3(&t1);
    let t3 = f.d_ds3(&t2);
    Ok(det3(&f.tangent, &t2, &t3).value())
}

/// `det(t, t'', t''') / (k² τ) - k²`; positive exactly at interior points.
/// Uses fifth derivatives of the position, so it serves as a cross-check of
/// [`classify_interior_exterior`].
pub fn raw_interior_criterion(c: &Curve, t: f64) -> Result<f64> {
    let d = tangent_determinant(c, t)?;
    let f = c.frenet_jet(t, 4)?;
    let tau = f.torsion_checked()?.value();
    let k = f.k.value();
    Ok(d / (k * k * tau) - k * k)
}

/// `k³ τ² σ / R^(5/2)` with `R` the radius of the osculating sphere.
pub fn conformal_torsion(c: &Curve, t: f64) -> Result<f64> {
    c.check_domain(t)?;
    let f = c.frenet_jet(t, 5)?;
    let sigma = f.sigma()?.value();
    let center = evolute_from_jet(&f)?.value();
    let radius = (center - f.point()).norm();
    let (k, tau) = (f.k.value(), f.tau.value());
    Ok(k.powi(3) * tau * tau * sigma / radius.powf(2.5))
}

/// `(1/(rτ)) (r'/τ)' + ((1/(στ)) (σ/τ)')'`; vanishes exactly when the curve
/// is congruent to its second evolute.
pub fn second_evolute_residual(c: &Curve, t: f64) -> Result<f64> {
    c.check_domain(t)?;
    let f = c.frenet_jet(t, 7)?;
    let tau = f.torsion_checked()?;
    let sigma = f.sigma()?;
    if sigma.value().abs() <= SIGMA_CUSP {
        return Err(GeomError::EvoluteCusp { t, sigma: sigma.value() });
    }
    let r = f.r();
    let first = (r * tau).recip() * f.d_ds(&(f.dr_ds() / tau));
    let inner = (sigma * tau).recip() * f.d_ds(&(sigma / tau));
    Ok(first.value() + f.d_ds(&inner).value())
}

/// Whether the osculating circle at `t0` misses the osculating planes at
/// `t0 ± delta`. Parameters outside an open curve's domain are skipped;
/// closed curves wrap around.
pub fn osculating_circles_disjoint(c: &Curve, t0: f64, delta: f64) -> Result<bool> {
    if delta == 0.0 {
        return Ok(true);
    }
    let circle = osculating_circle(c, t0)?;
    let (lo, hi) = c.domain();
    for t1 in [t0 + delta, t0 - delta] {
        let t1 = if c.is_closed() {
            lo + (t1 - lo).rem_euclid(hi - lo)
        } else if c.contains(t1) {
            t1
        } else {
            continue;
        };
        let f = c.frenet_jet(t1, 3)?;
        let b1 = f.binormal.value();
        let offset = b1.dot(&(circle.center - f.point())).abs();
        let sine = circle.normal.cross(&b1).norm();
        if sine < 1e-15 {
            if offset == 0.0 {
                return Ok(false);
            }
            continue;
        }
        // Distance, inside the circle's plane, from the center to the line
        // where the two planes meet.
        if offset / sine <= circle.radius {
            return Ok(false);
        }
    }
    Ok(true)
}

struct EvoluteSource {
    curve: Curve,
}

impl Parametrization for EvoluteSource {
    fn jet(&self, t: f64, len: usize) -> Result<Jet3> {
        evolute_from_jet(&self.curve.frenet_jet(t, (len + 3).max(4))?).map(|e| e.truncate(len))
    }

    fn max_len(&self) -> usize {
        self.curve.max_len().saturating_sub(3)
    }
}

/// The evolute as a curve on the same parameter interval.
pub fn evolute_curve(c: &Curve) -> Curve {
    let (lo, hi) = c.domain();
    Curve::new(Arc::new(EvoluteSource { curve: c.clone() }), lo, hi)
        .expect("domain already validated")
        .named(format!("evolute of {}", c.name()))
        .assume_closed(c.is_closed())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvoluteCusps {
    /// Zeros of σ where the evolute speed vanishes.
    pub scan: RootScan,
    /// Sign changes of σ where `|e'|` stays away from zero.
    pub rejected: Vec<f64>,
}

pub fn evolute_cusps(c: &Curve) -> Result<EvoluteCusps> {
    evolute_cusps_with(c, 2048)
}

/// Zeros of σ, each confirmed by a vanishing speed of the evolute.
pub fn evolute_cusps_with(c: &Curve, samples: usize) -> Result<EvoluteCusps> {
    let (lo, hi) = c.domain();
    let opts = ScanOptions {
        samples,
        flat_tol: Some(1e-8),
        periodic: c.is_closed(),
        ..Default::default()
    };
    let scan = roots::scan(|t| frenet::sigma_at(c, t), lo, hi, opts);
    let RootScan::Roots { roots } = scan else {
        return Ok(EvoluteCusps {
            scan,
            rejected: Vec::new(),
        });
    };
    let e = evolute_curve(c);
    let speed = |t: f64| -> Option<f64> {
        let v = e.derivative(t, 1).ok()?.norm() / c.speed(t).ok()?;
        v.is_finite().then_some(v)
    };
    let max = c.sample_params(samples.min(512)).into_iter().filter_map(speed).fold(0.0f64, f64::max);
    let (kept, rejected): (Vec<_>, Vec<_>) =
        roots.into_iter().partition(|r| speed(r.t).is_some_and(|v| v <= 1e-6 * max.max(1.0)));
    Ok(EvoluteCusps {
        scan: RootScan::Roots { roots: kept },
        rejected: rejected.into_iter().map(|r| r.t).collect(),
    })
}

/// Zeros of `r'` with `σ ≠ 0`: non-cuspidal points of the evolute where the
/// radius of the osculating sphere is critical.
pub fn sphere_vertices(c: &Curve, samples: usize) -> Result<RootScan> {
    let (lo, hi) = c.domain();
    let opts = ScanOptions {
        samples,
        flat_tol: Some(1e-10),
        periodic: c.is_closed(),
        ..Default::default()
    };
    let scan = roots::scan(|t| Ok(c.frenet_jet(t, 4)?.dr_ds().value()), lo, hi, opts);
    Ok(match scan {
        RootScan::Roots { roots } => RootScan::Roots {
            roots: roots
                .into_iter()
                .filter(|r| frenet::sigma_at(c, r.t).is_ok_and(|s| s.abs() > SIGMA_CUSP))
                .collect(),
        },
        degenerate => degenerate,
    })
}
