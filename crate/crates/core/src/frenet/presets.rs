//! Named curves used throughout the examples and tests.

use std::f64::consts::PI;

use super::{Curve, ExprCurve, Route};

/// `(name, coordinates, lo, hi, closed, declared cusps)`.
const CATALOG: &[(&str, &str, f64, f64, bool, &[f64])] = &[
    ("helix", "cos(t), sin(t), t", 0.0, 2.0 * PI, false, &[]),
    ("elliptical-helix", "2*cos(t), sin(t), t/2", 0.0, 2.0 * PI, false, &[]),
    (
        "torus-knot",
        "(1+0.15*cos(5*t))*cos(t), (1+0.15*cos(5*t))*sin(t), -0.15*sin(5*t)",
        0.0,
        2.0 * PI,
        true,
        &[],
    ),
    ("cusp-curve", "t^2, t^3, t^4", -1.0, 1.0, false, &[0.0]),
    ("fig8", "cos(t), sin(t), 0.5*sin(2*t)", 0.0, 2.0 * PI, true, &[]),
    (
        "spherical",
        "sin(pi/3+0.2*sin(t))*cos(t), sin(pi/3+0.2*sin(t))*sin(t), cos(pi/3+0.2*sin(t))",
        0.0,
        2.0 * PI,
        true,
        &[],
    ),
    ("circle", "cos(t), sin(t), 0", 0.0, 2.0 * PI, true, &[]),
    ("ellipse", "2*cos(t), sin(t), 0", 0.0, 2.0 * PI, true, &[]),
    ("central", "cos(t), sin(t), 0.3*sin(3*t)", 0.0, 2.0 * PI, true, &[]),
];

pub fn names() -> Vec<&'static str> {
    CATALOG.iter().map(|c| c.0).collect()
}

/// Coordinate text of a preset.
pub fn definition(name: &str) -> Option<&'static str> {
    CATALOG.iter().find(|c| c.0 == name).map(|c| c.1)
}

pub fn get(name: &str) -> Option<Curve> {
    get_with_route(name, Route::Taylor)
}

pub fn get_with_route(name: &str, route: Route) -> Option<Curve> {
    let &(name, text, lo, hi, closed, cusps) = CATALOG.iter().find(|c| c.0 == name)?;
    let curve = ExprCurve::parse(text, route)
        .expect("catalog expressions parse")
        .into_curve(lo, hi)
        .expect("catalog domains are valid");
    Some(
        curve
            .named(name)
            .assume_closed(closed)
            .with_cusps(cusps.to_vec()),
    )
}

/// Curves with nonvanishing curvature on their whole domain.
pub fn regular_catalog() -> Vec<Curve> {
    ["helix", "elliptical-helix", "torus-knot", "fig8", "spherical", "central"]
        .iter()
        .map(|n| get(n).unwrap())
        .collect()
}
