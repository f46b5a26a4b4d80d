//! Sampled polylines and file writers (CSV, OBJ, SVG, JSON).
//!
//! Writers render to a string first and then replace the target file
//! atomically, so a failed run never leaves a partial file behind. Numbers
//! are printed in their shortest round-trip form.

use std::fmt::Write as _;
use std::io::{self, Write as _};
use std::path::Path;

use nalgebra::{Vector2, Vector3};
use serde::Serialize;

use crate::envelope::RuledPatch;
use crate::error::Result;
use crate::frenet::{self, Curve};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolylinePoint {
    pub t: f64,
    pub point: Vector3<f64>,
    /// `(k, τ, σ)` of the source curve at `t`, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frenet: Option<[f64; 3]>,
}

/// A sampled curve split into branches. Consecutive points of a branch may
/// be joined; points of different branches never are.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Polyline {
    pub branches: Vec<Vec<PolylinePoint>>,
}

impl Polyline {
    pub fn point_count(&self) -> usize {
        self.branches.iter().map(Vec::len).sum()
    }

    pub fn points(&self) -> impl Iterator<Item = &PolylinePoint> {
        self.branches.iter().flatten()
    }

    /// Attach `(k, τ, σ)` of `c` at each sample parameter. `σ` is NaN where
    /// it is undefined, and the whole triple is left out where `c` has no
    /// Frenet frame.
    pub fn with_frenet(mut self, c: &Curve) -> Polyline {
        for p in self.branches.iter_mut().flatten() {
            p.frenet = frenet::frenet_at(c, p.t)
                .ok()
                .map(|st| [st.k, st.tau, st.sigma.unwrap_or(f64::NAN)]);
        }
        self
    }
}

/// Sample `f` at `ts` (ascending), starting a new branch whenever a break
/// parameter lies in `(t_prev, t]` or `f` fails. With `periodic`, the last
/// and first branches are joined if nothing separates them across the seam.
pub fn sample_branches<F>(ts: &[f64], breaks: &[f64], periodic: bool, f: F) -> Polyline
where
    F: Fn(f64) -> Result<Vector3<f64>> + Sync,
{
    use rayon::prelude::*;
    let values: Vec<Option<Vector3<f64>>> = ts
        .par_iter()
        .map(|&t| f(t).ok().filter(|p| p.iter().all(|v| v.is_finite())))
        .collect();
    let crosses = |a: f64, b: f64| breaks.iter().any(|&r| r > a && r <= b);
    let mut branches: Vec<Vec<PolylinePoint>> = Vec::new();
    let mut current: Vec<PolylinePoint> = Vec::new();
    let mut seam_open = true;
    for (i, (&t, v)) in ts.iter().zip(&values).enumerate() {
        if i > 0 && crosses(ts[i - 1], t) && !current.is_empty() {
            branches.push(std::mem::take(&mut current));
        }
        match v {
            Some(p) => current.push(PolylinePoint {
                t,
                point: *p,
                frenet: None,
            }),
            None => {
                if i == 0 || i == ts.len() - 1 {
                    seam_open = false;
                }
                if !current.is_empty() {
                    branches.push(std::mem::take(&mut current));
                }
            }
        }
    }
    if !current.is_empty() {
        branches.push(current);
    }
    if periodic && seam_open && branches.len() > 1 && ts.len() > 1 {
        let period = ts[1] - ts[0];
        let (first, last) = (ts[0], ts[ts.len() - 1]);
        let first_branch_starts = branches[0][0].t == first;
        let last_branch_ends = branches.last().unwrap().last().unwrap().t == last;
        let gap_break = breaks.iter().any(|&r| r > last || r <= first) || !(last - first).is_finite();
        if first_branch_starts && last_branch_ends && !gap_break && period > 0.0 {
            let head = branches.remove(0);
            branches.last_mut().unwrap().extend(head);
        }
    }
    Polyline { branches }
}

/// Sample `c` itself at `samples` parameters.
pub fn curve_polyline(c: &Curve, samples: usize) -> Polyline {
    sample_branches(&c.sample_params(samples), &[], false, |t| c.point(t))
}

/// CSV with header `t,x,y,z` (plus `k,tau,sigma` when every point carries
/// Frenet data). Branches are separated by one blank line.
pub fn csv_string(poly: &Polyline) -> String {
    let with_frenet = poly.point_count() > 0 && poly.points().all(|p| p.frenet.is_some());
    let mut out = String::from(if with_frenet { "t,x,y,z,k,tau,sigma\n" } else { "t,x,y,z\n" });
    for (i, branch) in poly.branches.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for p in branch {
            let _ = write!(out, "{:?},{:?},{:?},{:?}", p.t, p.point.x, p.point.y, p.point.z);
            if let (true, Some([k, tau, sigma])) = (with_frenet, p.frenet) {
                let _ = write!(out, ",{k:?},{tau:?},{sigma:?}");
            }
            out.push('\n');
        }
    }
    out
}

/// Two vertices per ruling (the ends of its extent), then one quad per pair
/// of neighbouring rulings. The face normal is `(step to next ruling) ×
/// (ruling direction)`.
pub fn obj_string(patch: &RuledPatch) -> String {
    let mut out = String::new();
    let (a, b) = patch.extent;
    for i in 0..patch.rulings.len() {
        for lambda in [a, b] {
            let p = patch.point(i, lambda);
            let _ = writeln!(out, "v {:?} {:?} {:?}", p.x, p.y, p.z);
        }
    }
    let n = patch.rulings.len();
    let quads = if patch.closed && n > 2 { n } else { n.saturating_sub(1) };
    for i in 0..quads {
        let j = (i + 1) % n;
        let (a0, b0, a1, b1) = (2 * i + 1, 2 * i + 2, 2 * j + 1, 2 * j + 2);
        let _ = writeln!(out, "f {a0} {a1} {b1} {b0}");
    }
    out
}

/// One `<path>` per branch; `scale` pixels per unit, y pointing up.
pub fn svg_string(branches: &[Vec<Vector2<f64>>], scale: f64) -> String {
    let pts = branches.iter().flatten();
    let (mut lo, mut hi) = (Vector2::repeat(f64::INFINITY), Vector2::repeat(f64::NEG_INFINITY));
    for p in pts {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    if !lo.x.is_finite() {
        lo = Vector2::zeros();
        hi = Vector2::zeros();
    }
    let margin = 10.0;
    let width = (hi.x - lo.x) * scale + 2.0 * margin;
    let height = (hi.y - lo.y) * scale + 2.0 * margin;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:?}" height="{height:?}" viewBox="0 0 {width:?} {height:?}">"#
    );
    for branch in branches.iter().filter(|b| !b.is_empty()) {
        out.push_str(r#"<path fill="none" stroke="black" stroke-width="1" d=""#);
        for (i, p) in branch.iter().enumerate() {
            let x = (p.x - lo.x) * scale + margin;
            let y = (hi.y - p.y) * scale + margin;
            let _ = write!(out, "{}{x:?} {y:?}", if i == 0 { "M" } else { " L" });
        }
        out.push_str("\"/>\n");
    }
    out.push_str("</svg>\n");
    out
}

pub fn json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values serialize");
    s.push('\n');
    s
}

/// Replace `path` with `contents` via a temporary file in the same
/// directory.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn export_csv(poly: &Polyline, path: &Path) -> io::Result<()> {
    write_atomic(path, &csv_string(poly))
}

pub fn export_obj(patch: &RuledPatch, path: &Path) -> io::Result<()> {
    write_atomic(path, &obj_string(patch))
}

pub fn export_svg(branches: &[Vec<Vector2<f64>>], scale: f64, path: &Path) -> io::Result<()> {
    write_atomic(path, &svg_string(branches, scale))
}

pub fn export_json<T: Serialize + ?Sized>(value: &T, path: &Path) -> io::Result<()> {
    write_atomic(path, &json_string(value))
}
