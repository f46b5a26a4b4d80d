//! Singularity census of a curve, serializable as JSON.

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::evolute::{classify_interior_exterior, evolute_cusps_with, sphere_vertices, Side};
use crate::frenet::Curve;
use crate::monge::monge_evolute_cusps_with;
use crate::numeric::roots::RootScan;
use crate::pseudo::pseudo_singularities_with;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Entry {
    pub t: f64,
    pub kind: &'static str,
    pub residual: f64,
    pub bracket: (f64, f64),
    pub bracket_values: (f64, f64),
}

/// One list of the report. Criteria that vanish identically, or cannot be
/// evaluated on the curve at all, are reported as such instead of as an
/// empty list.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Section {
    Roots { entries: Vec<Entry> },
    DegenerateEverywhere { max_abs: f64 },
    Unavailable { reason: String },
}

impl Section {
    fn from_scan(scan: Result<RootScan>, kind: &'static str) -> Section {
        match scan {
            Ok(RootScan::Roots { roots }) => Section::Roots {
                entries: roots
                    .into_iter()
                    .map(|r| Entry {
                        t: r.t,
                        kind,
                        residual: r.residual,
                        bracket: r.bracket,
                        bracket_values: r.bracket_values,
                    })
                    .collect(),
            },
            Ok(RootScan::DegenerateEverywhere { max_abs }) => Section::DegenerateEverywhere { max_abs },
            Err(e) => Section::Unavailable { reason: e.to_string() },
        }
    }

    pub fn entries(&self) -> &[Entry] {
        match self {
            Section::Roots { entries } => entries,
            _ => &[],
        }
    }

    pub fn params(&self) -> Vec<f64> {
        self.entries().iter().map(|e| e.t).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Interior,
    Exterior,
    Indeterminate,
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifiedSample {
    pub t: f64,
    pub side: Classification,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityReport {
    pub curve: String,
    pub domain: (f64, f64),
    pub alpha0: f64,
    pub evolute_cusps: Section,
    pub sphere_vertices: Section,
    pub pseudo_cusps: Section,
    pub pseudo_infinities: Section,
    pub monge_cusps: Section,
    pub classifications: Vec<ClassifiedSample>,
}

/// Scan every criterion with `samples` grid points; `alpha0` selects the
/// Monge evolute.
pub fn singularity_report(c: &Curve, alpha0: f64, samples: usize) -> SingularityReport {
    let pseudo = pseudo_singularities_with(c, samples);
    let (pseudo_cusps, pseudo_infinities) = match pseudo {
        Ok(p) => (Ok(p.cusps), Ok(p.infinities)),
        Err(e) => (Err(e.clone()), Err(e)),
    };
    let classifications = c
        .sample_params(samples)
        .into_iter()
        .map(|t| ClassifiedSample {
            t,
            side: match classify_interior_exterior(c, t) {
                Ok(Side::Interior) => Classification::Interior,
                Ok(Side::Exterior) => Classification::Exterior,
                Err(GeomError::Indeterminate { .. }) => Classification::Indeterminate,
                Err(_) => Classification::Undefined,
            },
        })
        .collect();
    SingularityReport {
        curve: c.name().to_string(),
        domain: c.domain(),
        alpha0,
        evolute_cusps: Section::from_scan(evolute_cusps_with(c, samples).map(|e| e.scan), "evolute_cusp"),
        sphere_vertices: Section::from_scan(sphere_vertices(c, samples), "sphere_vertex"),
        pseudo_cusps: Section::from_scan(pseudo_cusps, "pseudo_cusp"),
        pseudo_infinities: Section::from_scan(pseudo_infinities, "infinity_escape"),
        monge_cusps: Section::from_scan(monge_evolute_cusps_with(c, alpha0, samples).map(|m| m.scan), "monge_cusp"),
        classifications,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::export::json_string;
    use crate::frenet::presets;

    #[test]
    fn fig8_census() {
        let c = presets::get("fig8").unwrap();
        let r = singularity_report(&c, 0.0, 2048);
        assert_eq!(r.pseudo_cusps.entries().len(), 12);
        assert_eq!(r.pseudo_infinities.entries().len(), 4);
        let (lo, hi) = r.domain;
        for s in [&r.evolute_cusps, &r.sphere_vertices, &r.pseudo_cusps, &r.pseudo_infinities, &r.monge_cusps] {
            for e in s.entries() {
                assert!(e.t >= lo && e.t <= hi);
                assert!(e.bracket.0 <= e.t && e.t <= e.bracket.1);
                assert!(e.bracket_values.0 * e.bracket_values.1 <= 0.0);
            }
        }
        assert_eq!(r.classifications.len(), 2048);
        let sides: Vec<_> = r.classifications.iter().map(|s| s.side).collect();
        let defined = sides.iter().filter(|s| matches!(s, Classification::Interior | Classification::Exterior)).count();
        assert!(defined > 2000, "{defined}");
    }

    #[test]
    fn helix_is_degenerate_and_serializes() {
        let c = presets::get("helix").unwrap();
        let r = singularity_report(&c, 0.0, 256);
        assert!(matches!(r.sphere_vertices, Section::DegenerateEverywhere { .. }));
        assert!(matches!(r.pseudo_infinities, Section::DegenerateEverywhere { .. }));
        assert!(matches!(r.evolute_cusps, Section::Roots { ref entries } if entries.is_empty()));
        assert!(r.classifications.iter().all(|s| s.side == Classification::Interior));
        let json: serde_json::Value = serde_json::from_str(&json_string(&r)).unwrap();
        assert_eq!(json["sphere_vertices"]["status"], "degenerate_everywhere");
        assert_eq!(json["evolute_cusps"]["status"], "roots");
    }

    #[test]
    fn cusp_curve_infinities() {
        let c = presets::get("cusp-curve").unwrap();
        let r = singularity_report(&c, 0.0, 1024);
        let ts = r.pseudo_infinities.params();
        assert_eq!(ts.len(), 2, "{ts:?}");
        let want = 1.0 / 2f64.sqrt();
        assert!((ts[0] + want).abs() < 1e-9 && (ts[1] - want).abs() < 1e-9);
        assert!(r.pseudo_infinities.entries().iter().all(|e| e.kind == "infinity_escape"));
    }
}
