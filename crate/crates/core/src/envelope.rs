//! Envelopes of one-parameter families of planes.
//!
//! A family `n(t)·P = c(t)` envelops a developable surface. Its rulings solve
//! `n·P = c, n'·P = c'`, the regression edge additionally `n''·P = c''`, and
//! the cuspidal points of the edge also `n'''·P = c'''`.

use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::expr::Expr;
use crate::frenet::{Curve, FrenetJet};
use crate::jet::{Jet, Jet3};
use crate::numeric::linalg;
use crate::numeric::roots::{self, RootScan, ScanOptions};

/// Source of the normal and offset jets of a plane family.
pub trait PlaneSource: Send + Sync {
    /// Jets of the (not necessarily unit) normal and of the offset, each with
    /// `len` coefficients.
    fn planes(&self, t: f64, len: usize) -> Result<(Jet3, Jet)>;
}

/// The classical plane families attached to a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvePlane {
    /// Spanned by `n, b`; envelope is the normal developable.
    Normal,
    /// Spanned by `t, n`; envelope is the tangent developable.
    Osculating,
    /// Spanned by `t, b`; envelope is the rectifying developable.
    Rectifying,
}

struct CurvePlanes {
    curve: Curve,
    kind: CurvePlane,
}

impl PlaneSource for CurvePlanes {
    fn planes(&self, t: f64, len: usize) -> Result<(Jet3, Jet)> {
        // Unnormalized normals keep the jets polynomial in the derivatives.
        let (p, n) = match self.kind {
            CurvePlane::Normal => {
                let p = self.curve.jet(t, len + 1)?;
                (p, p.derivative())
            }
            CurvePlane::Osculating => {
                let p = self.curve.jet(t, len + 2)?;
                let v = p.derivative();
                (p, v.cross(&v.derivative()))
            }
            CurvePlane::Rectifying => {
                let p = self.curve.jet(t, len + 2)?;
                let v = p.derivative();
                (p, v.cross(&v.derivative()).cross(&v))
            }
        };
        let p = p.truncate(len);
        Ok((n.truncate(len), n.dot(&p)))
    }
}

struct ExprPlanes {
    normal: [Expr; 3],
    offset: Expr,
}

impl PlaneSource for ExprPlanes {
    fn planes(&self, t: f64, len: usize) -> Result<(Jet3, Jet)> {
        let ev = |e: &Expr| e.eval_jet(t, len).map_err(|source| GeomError::Eval { t, source });
        Ok((
            Jet3::new(ev(&self.normal[0])?, ev(&self.normal[1])?, ev(&self.normal[2])?),
            ev(&self.offset)?,
        ))
    }
}

const MAX_VANISHING_ORDER: usize = 4;

/// A one-parameter family of planes `n(t)·P = c(t)` on a parameter interval.
#[derive(Clone)]
pub struct PlaneFamily {
    source: Arc<dyn PlaneSource>,
    lo: f64,
    hi: f64,
    periodic: bool,
}

impl std::fmt::Debug for PlaneFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PlaneFamily")
            .field("domain", &(self.lo, self.hi))
            .field("periodic", &self.periodic)
            .finish()
    }
}

impl PlaneFamily {
    pub fn new(source: Arc<dyn PlaneSource>, lo: f64, hi: f64, periodic: bool) -> PlaneFamily {
        PlaneFamily {
            source,
            lo,
            hi,
            periodic,
        }
    }

    pub fn of_curve(c: &Curve, kind: CurvePlane) -> PlaneFamily {
        let (lo, hi) = c.domain();
        PlaneFamily::new(
            Arc::new(CurvePlanes {
                curve: c.clone(),
                kind,
            }),
            lo,
            hi,
            c.is_closed(),
        )
    }

    pub fn from_exprs(normal: [Expr; 3], offset: Expr, lo: f64, hi: f64) -> PlaneFamily {
        PlaneFamily::new(Arc::new(ExprPlanes { normal, offset }), lo, hi, false)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn planes(&self, t: f64, len: usize) -> Result<(Jet3, Jet)> {
        self.source.planes(t, len)
    }

    /// Signed distance from `p` to the plane at `t`.
    pub fn distance(&self, t: f64, p: &Vector3<f64>) -> Result<f64> {
        let (n, c) = self.planes(t, 1)?;
        let n = n.value();
        Ok((n.dot(p) - c.value()) / n.norm())
    }

    /// Jets of the planes at `t` divided by `(t - t0)^m`, where `m` is the
    /// order to which the normal vanishes at `t` (0 at regular parameters).
    /// The divided family has the same planes near `t` and stays regular at
    /// cusps of the generating curve.
    fn reduced_planes(&self, t: f64, len: usize) -> Result<(Jet3, Jet)> {
        let (n, c) = self.planes(t, len)?;
        let lead = n.value().norm();
        if lead > 0.0 && lead > 1e-10 * (1..len).map(|i| n.coeff(i).norm()).fold(0.0, f64::max) {
            return Ok((n, c));
        }
        for extra in 1..=MAX_VANISHING_ORDER {
            let Ok((n, c)) = self.planes(t, len + extra) else { break };
            let scale = (0..len + extra).map(|i| n.coeff(i).norm()).fold(0.0, f64::max);
            let m = (0..len + extra).take_while(|&i| n.coeff(i).norm() <= 1e-10 * scale).count();
            if m <= extra {
                return Ok((n.shifted(m), c.shifted(m)));
            }
        }
        Ok((n, c))
    }

    /// Rows `n^(i)` and right-hand sides `c^(i)` for `i = first..first+3`,
    /// each row scaled to unit length. A row whose normal and offset both
    /// vanish at `t` is the limit `0 = 0` of an equation that can be divided
    /// by `(t - t0)`; it is replaced by the next derivative.
    fn system(&self, t: f64, first: usize) -> Result<(Matrix3<f64>, Vector3<f64>)> {
        let (n, c) = self
            .reduced_planes(t, first + 5)
            .or_else(|_| self.reduced_planes(t, first + 3))?;
        let scale = (0..n.len()).map(|i| n.derivative_value(i).norm()).fold(0.0, f64::max);
        let cscale = (0..c.len()).map(|i| c.derivative_value(i).abs()).fold(0.0, f64::max);
        let mut m = Matrix3::zeros();
        let mut rhs = Vector3::zeros();
        let mut rows = 0;
        let mut j = first;
        while rows < 3 && j < n.len() {
            let row = n.derivative_value(j);
            let norm = row.norm();
            let vanishing = norm <= 1e-12 * scale && c.derivative_value(j).abs() <= 1e-12 * cscale;
            let extra_rows_left = n.len() - j > 3 - rows;
            if vanishing && extra_rows_left && rows > 0 {
                j += 1;
                continue;
            }
            let norm = if norm > 0.0 { norm } else { 1.0 };
            m.set_row(rows, &(row / norm).transpose());
            rhs[rows] = c.derivative_value(j) / norm;
            rows += 1;
            j += 1;
        }
        Ok((m, rhs))
    }
}

/// Point of the regression edge at `t`: the solution of
/// `n·P = c, n'·P = c', n''·P = c''`.
pub fn regression_edge_point(f: &PlaneFamily, t: f64) -> Result<Vector3<f64>> {
    let (m, rhs) = f.system(t, 0)?;
    linalg::solve3(&m, &rhs, t)
}

/// Distance of the edge point from the plane `n'''·P = c'''`; zero exactly at
/// cuspidal points of the regression edge.
pub fn cusp_residual(f: &PlaneFamily, t: f64) -> Result<f64> {
    let p = regression_edge_point(f, t)?;
    let (n, c) = f.reduced_planes(t, 4)?;
    let n3 = n.derivative_value(3);
    Ok((n3.dot(&p) - c.derivative_value(3)) / n3.norm())
}

/// Parameters of the cuspidal points of the regression edge.
///
/// Fails with `SingularSystem` when the family has no regression edge at any
/// sample (cylinders and cones).
pub fn regression_edge_cusps(f: &PlaneFamily) -> Result<RootScan> {
    regression_edge_cusps_with(f, 2048)
}

pub fn regression_edge_cusps_with(f: &PlaneFamily, samples: usize) -> Result<RootScan> {
    let ts = roots::grid(f.lo, f.hi, samples, f.periodic);
    if let Some(Err(e)) = ts
        .par_iter()
        .map(|&t| regression_edge_point(f, t).map(|_| ()))
        .reduce_with(|a, b| if a.is_ok() { a } else { b })
    {
        return Err(e);
    }
    Ok(roots::scan(
        |t| cusp_residual(f, t),
        f.lo,
        f.hi,
        ScanOptions {
            samples,
            periodic: f.periodic,
            ..Default::default()
        },
    ))
}

/// A straight line in space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Line3 {
    pub base: Vector3<f64>,
    /// Unit direction.
    pub direction: Vector3<f64>,
}

impl Line3 {
    pub fn new(base: Vector3<f64>, direction: Vector3<f64>) -> Line3 {
        Line3 {
            base,
            direction: direction.normalize(),
        }
    }

    pub fn at(&self, lambda: f64) -> Vector3<f64> {
        self.base + self.direction * lambda
    }

    pub fn distance(&self, p: &Vector3<f64>) -> f64 {
        (p - self.base).cross(&self.direction).norm()
    }
}

/// Line through the center of the osculating circle along the binormal.
pub fn polar_line(c: &Curve, t: f64) -> Result<Line3> {
    let f = c.frenet_jet(t, 3)?;
    Ok(polar_line_of(&f))
}

pub(crate) fn polar_line_of(f: &FrenetJet) -> Line3 {
    Line3::new(
        f.point() + f.normal.value() / f.k.value(),
        f.binormal.value(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PatchKind {
    /// Rulings are tangent to a regression edge.
    Developable,
    /// All rulings parallel; no regression edge.
    Cylindrical,
    /// All rulings through one point.
    Conical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ruling {
    pub t: f64,
    /// A point of the ruling; the ruling is `anchor + λ direction`.
    pub anchor: Vector3<f64>,
    pub direction: Vector3<f64>,
    /// Regression-edge point on this ruling, where it exists.
    pub edge: Option<Vector3<f64>>,
}

/// Sampled piece of a ruled surface.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuledPatch {
    pub kind: PatchKind,
    pub rulings: Vec<Ruling>,
    /// Range of λ kept along each ruling.
    pub extent: (f64, f64),
    /// The last ruling connects back to the first.
    pub closed: bool,
}

impl RuledPatch {
    pub fn point(&self, i: usize, lambda: f64) -> Vector3<f64> {
        let r = &self.rulings[i];
        r.anchor + r.direction * lambda
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PatchOptions {
    pub samples: usize,
    /// Overrides the default extent `±3 × diameter` of the curve.
    pub extent: Option<(f64, f64)>,
}

impl Default for PatchOptions {
    fn default() -> Self {
        PatchOptions {
            samples: 1024,
            extent: None,
        }
    }
}

/// Largest distance between two of the `n` sampled curve points.
pub fn diameter(c: &Curve, n: usize) -> Result<f64> {
    let pts = c
        .sample_params(n)
        .into_iter()
        .map(|t| c.point(t))
        .collect::<Result<Vec<_>>>()?;
    Ok(pts
        .par_iter()
        .map(|a| pts.iter().map(|b| (a - b).norm()).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max))
}

fn extent(c: &Curve, opts: &PatchOptions) -> Result<(f64, f64)> {
    match opts.extent {
        Some(e) => Ok(e),
        None => {
            let l = 3.0 * diameter(c, 256)?;
            Ok((-l, l))
        }
    }
}

fn build_patch<F>(c: &Curve, opts: &PatchOptions, ruling: F) -> Result<RuledPatch>
where
    F: Fn(f64) -> Result<Ruling> + Sync,
{
    let rulings = c
        .sample_params(opts.samples)
        .par_iter()
        .map(|&t| ruling(t))
        .collect::<Result<Vec<_>>>()?;
    Ok(RuledPatch {
        kind: PatchKind::Developable,
        rulings,
        extent: extent(c, opts)?,
        closed: c.is_closed(),
    })
}

/// Surface swept by the tangent lines; its edge is the curve itself.
pub fn tangent_developable(c: &Curve, opts: &PatchOptions) -> Result<RuledPatch> {
    build_patch(c, opts, |t| {
        let f = c.frenet_jet(t, 3)?;
        Ok(Ruling {
            t,
            anchor: f.point(),
            direction: f.tangent.value(),
            edge: Some(f.point()),
        })
    })
}

/// Surface swept by the polar lines; its edge is the evolute.
pub fn normal_developable(c: &Curve, opts: &PatchOptions) -> Result<RuledPatch> {
    build_patch(c, opts, |t| {
        let f = c.frenet_jet(t, 4)?;
        let line = polar_line_of(&f);
        let edge = crate::evolute::evolute_from_jet(&f).ok().map(|e| e.value());
        Ok(Ruling {
            t,
            anchor: line.base,
            direction: line.direction,
            edge,
        })
    })
}

/// Envelope of the rectifying planes. Rulings pass through the curve along
/// the Darboux direction `τt + kb`; the edge is the pseudo-evolute. Flagged
/// cylindrical or conical when no sample has a regression edge.
pub fn rectifying_developable(c: &Curve, opts: &PatchOptions) -> Result<RuledPatch> {
    let family = PlaneFamily::of_curve(c, CurvePlane::Rectifying);
    let mut patch = build_patch(c, opts, |t| {
        let f = c.frenet_jet(t, 4)?;
        let darboux = f.tangent.value() * f.tau.value() + f.binormal.value() * f.k.value();
        Ok(Ruling {
            t,
            anchor: f.point(),
            direction: darboux.normalize(),
            edge: regression_edge_point(&family, t).ok(),
        })
    })?;
    if patch.rulings.iter().all(|r| r.edge.is_none()) {
        patch.kind = classify_edgeless(&patch.rulings);
    }
    Ok(patch)
}

fn classify_edgeless(rulings: &[Ruling]) -> PatchKind {
    let d0 = rulings[0].direction;
    if rulings.iter().all(|r| r.direction.cross(&d0).norm() < 1e-6) {
        PatchKind::Cylindrical
    } else {
        PatchKind::Conical
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::frenet::presets;
    use approx::assert_relative_eq;

    fn family(name: &str, kind: CurvePlane) -> PlaneFamily {
        PlaneFamily::of_curve(&presets::get(name).unwrap(), kind)
    }

    #[test]
    fn cusp_curve_normal_planes_envelop_the_evolute() {
        let f = family("cusp-curve", CurvePlane::Normal);
        for &t in &[-0.9, -0.4, 0.3, 0.7, 1.0] {
            let p = regression_edge_point(&f, t).unwrap();
            let (t2, t3, t4, t5, t6) = (t * t, t.powi(3), t.powi(4), t.powi(5), t.powi(6));
            let want = Vector3::new(4.5 * t4 + 20.0 * t6, -8.0 * t3 - 32.0 * t5, 0.5 + 4.5 * t2 + 15.0 * t4);
            assert!((p - want).norm() <= 1e-9 * want.norm(), "t={t}: {p} vs {want}");
        }
    }

    #[test]
    fn cylinder_family_is_singular() {
        let f = PlaneFamily::from_exprs(
            [parse("cos(t)").unwrap(), parse("sin(t)").unwrap(), parse("0").unwrap()],
            parse("1").unwrap(),
            0.0,
            6.0,
        );
        assert!(matches!(regression_edge_point(&f, 1.0), Err(GeomError::SingularSystem { .. })));
        assert!(matches!(regression_edge_cusps(&f), Err(GeomError::SingularSystem { .. })));
    }

    #[test]
    fn divided_family_at_a_cusp() {
        let c = presets::get("cusp-curve").unwrap();
        let e = regression_edge_point(&PlaneFamily::of_curve(&c, CurvePlane::Normal), 0.0).unwrap();
        assert!((e - Vector3::new(0.0, 0.0, 0.5)).norm() < 1e-14);
        let p = regression_edge_point(&PlaneFamily::of_curve(&c, CurvePlane::Rectifying), 0.0).unwrap();
        assert!((p - Vector3::new(24.0 / 175.0, 0.0, 27.0 / 350.0)).norm() < 1e-14);
    }

    #[test]
    fn osculating_planes_envelop_the_curve() {
        for name in ["torus-knot", "elliptical-helix", "central"] {
            let c = presets::get(name).unwrap();
            let f = PlaneFamily::of_curve(&c, CurvePlane::Osculating);
            for t in c.sample_params(32) {
                let p = match regression_edge_point(&f, t) {
                    Ok(p) => p,
                    Err(_) if c.frenet_jet(t, 4).unwrap().tau.value().abs() < 1e-3 => continue,
                    Err(e) => panic!("{name} t={t}: {e}"),
                };
                assert!((p - c.point(t).unwrap()).norm() < 1e-6, "{name} t={t}");
            }
        }
    }

    #[test]
    fn cusp_counts() {
        let ell = regression_edge_cusps(&family("elliptical-helix", CurvePlane::Normal)).unwrap();
        let want = [0.799289, 2.342304, 3.940881, 5.483896];
        assert_eq!(ell.roots().len(), 4);
        for (r, w) in ell.roots().iter().zip(want) {
            assert!((r.t - w).abs() < 1e-6, "{} vs {w}", r.t);
        }
        assert!(regression_edge_cusps(&family("helix", CurvePlane::Normal)).unwrap().roots().is_empty());
        assert!(regression_edge_cusps(&family("torus-knot", CurvePlane::Normal)).unwrap().roots().is_empty());
    }

    #[test]
    fn polar_lines() {
        let helix = presets::get("helix").unwrap();
        let l = polar_line(&helix, 0.0).unwrap();
        assert!((l.base - Vector3::new(-1.0, 0.0, 0.0)).norm() < 1e-14);
        let b = Vector3::new(0.0, -1.0, 1.0) / 2f64.sqrt();
        assert!((l.direction - b).norm() < 1e-14);
        let circle = presets::get("circle").unwrap();
        let l = polar_line(&circle, 0.4).unwrap();
        assert!(l.base.norm() < 1e-14 && (l.direction - Vector3::z()).norm() < 1e-14);
    }

    #[test]
    fn developables() {
        let helix = presets::get("helix").unwrap();
        let opts = PatchOptions {
            samples: 64,
            extent: None,
        };
        let normal = normal_developable(&helix, &opts).unwrap();
        for r in &normal.rulings {
            let p = helix.point(r.t).unwrap();
            let n = Vector3::new(-r.t.cos(), -r.t.sin(), 0.0);
            assert!((r.anchor - (p + 2.0 * n)).norm() < 1e-12);
            let e = r.edge.unwrap();
            assert!((e - Vector3::new(-r.t.cos(), -r.t.sin(), r.t)).norm() < 1e-12);
        }
        let circle = presets::get("circle").unwrap();
        let tangent = tangent_developable(&circle, &opts).unwrap();
        assert!(tangent.closed);
        for i in 0..tangent.rulings.len() {
            assert!(tangent.point(i, 1.7).z.abs() < 1e-15);
        }
        let rect = rectifying_developable(&helix, &opts).unwrap();
        assert_eq!(rect.kind, PatchKind::Cylindrical);
        let knot = presets::get("torus-knot").unwrap();
        let rect = rectifying_developable(&knot, &opts).unwrap();
        assert_eq!(rect.kind, PatchKind::Developable);
        let d = diameter(&helix, 256).unwrap();
        assert_relative_eq!(normal.extent.1, 3.0 * d);
    }

    #[test]
    fn rulings_lie_in_their_planes() {
        let opts = PatchOptions {
            samples: 48,
            extent: None,
        };
        for c in presets::regular_catalog() {
            let cases = [
                (tangent_developable(&c, &opts).unwrap(), CurvePlane::Osculating),
                (normal_developable(&c, &opts).unwrap(), CurvePlane::Normal),
                (rectifying_developable(&c, &opts).unwrap(), CurvePlane::Rectifying),
            ];
            for (patch, kind) in cases {
                let fam = PlaneFamily::of_curve(&c, kind);
                for (i, r) in patch.rulings.iter().enumerate() {
                    for lambda in [patch.extent.0, 0.0, patch.extent.1] {
                        let d = fam.distance(r.t, &patch.point(i, lambda)).unwrap();
                        assert!(d.abs() < 1e-8 * (1.0 + lambda.abs()), "{} {kind:?} t={} d={d}", c.name(), r.t);
                    }
                }
            }
        }
    }

    #[test]
    fn edge_tangents_lie_in_the_family_planes() {
        // Developability: the plane at t contains the edge point and the edge tangent.
        let h = 1e-5;
        for c in presets::regular_catalog() {
            for kind in [CurvePlane::Normal, CurvePlane::Rectifying] {
                let fam = PlaneFamily::of_curve(&c, kind);
                for t in c.sample_params(24).into_iter().skip(1) {
                    let (Ok(p), Ok(pp), Ok(pm)) = (
                        regression_edge_point(&fam, t),
                        regression_edge_point(&fam, t + h),
                        regression_edge_point(&fam, t - h),
                    ) else {
                        continue;
                    };
                    let tangent = (pp - pm) / (2.0 * h);
                    let (n, _) = fam.planes(t, 1).unwrap();
                    let n = n.value().normalize();
                    assert!(fam.distance(t, &p).unwrap().abs() < 1e-7 * (1.0 + p.norm()));
                    if tangent.norm() > 1e-3 {
                        assert!(n.dot(&tangent.normalize()).abs() < 1e-6, "{} {kind:?} t={t}", c.name());
                    }
                }
            }
        }
    }
}
