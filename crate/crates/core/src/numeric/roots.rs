//! Grid scan + bisection root finding for smooth scalar criteria.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;

/// A refined root with the bracket it was found in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub t: f64,
    /// Criterion value at `t`.
    pub residual: f64,
    pub bracket: (f64, f64),
    /// Criterion values at the bracket ends (opposite signs).
    pub bracket_values: (f64, f64),
}

/// Outcome of a root scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RootScan {
    Roots { roots: Vec<Root> },
    /// The criterion vanishes identically (to the flatness tolerance).
    DegenerateEverywhere { max_abs: f64 },
}

impl RootScan {
    pub fn roots(&self) -> &[Root] {
        match self {
            RootScan::Roots { roots } => roots,
            RootScan::DegenerateEverywhere { .. } => &[],
        }
    }

    pub fn params(&self) -> Vec<f64> {
        self.roots().iter().map(|r| r.t).collect()
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, RootScan::DegenerateEverywhere { .. })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    pub samples: usize,
    pub t_tol: f64,
    /// Report `DegenerateEverywhere` when every sample is at most this in
    /// magnitude.
    pub flat_tol: Option<f64>,
    /// Treat `[lo, hi)` as one period; roots are reported in `[lo, hi)`.
    pub periodic: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            samples: 2048,
            t_tol: 1e-12,
            flat_tol: None,
            periodic: false,
        }
    }
}

/// Sample parameters used by the scan. Periodic grids are offset by half a
/// cell so that roots sitting on the seam fall strictly inside a cell.
pub fn grid(lo: f64, hi: f64, samples: usize, periodic: bool) -> Vec<f64> {
    let n = samples.max(2);
    if periodic {
        let h = (hi - lo) / n as f64;
        (0..=n).map(|i| lo + (i as f64 + 0.5) * h).collect()
    } else {
        let h = (hi - lo) / (n - 1) as f64;
        (0..n).map(|i| if i == n - 1 { hi } else { lo + i as f64 * h }).collect()
    }
}

/// Find the simple zeros of `f` on `[lo, hi]`.
///
/// Sign changes between neighbouring grid samples are refined by bisection.
/// A refined point is accepted only if `|f|` there is below both bracket
/// values, which discards sign changes through poles. Samples where `f`
/// fails are skipped.
pub fn scan<F>(f: F, lo: f64, hi: f64, opts: ScanOptions) -> RootScan
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let period = hi - lo;
    let periodic = opts.periodic;
    let f = move |t: f64| {
        if periodic && t >= hi {
            f(t - period)
        } else {
            f(t)
        }
    };
    let ts = grid(lo, hi, opts.samples, opts.periodic);
    let vals: Vec<f64> = ts
        .par_iter()
        .map(|&t| f(t).ok().filter(|v| v.is_finite()).unwrap_or(f64::NAN))
        .collect();

    if let Some(flat) = opts.flat_tol {
        let finite: Vec<f64> = vals.iter().copied().filter(|v| v.is_finite()).collect();
        let max_abs = finite.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !finite.is_empty() && max_abs <= flat {
            return RootScan::DegenerateEverywhere { max_abs };
        }
    }

    let mut roots = Vec::new();
    for i in 0..ts.len() - 1 {
        let (a, b) = (ts[i], ts[i + 1]);
        let (fa, fb) = (vals[i], vals[i + 1]);
        if !fa.is_finite() || !fb.is_finite() {
            continue;
        }
        if fa == 0.0 {
            roots.push(Root {
                t: a,
                residual: 0.0,
                bracket: (a, a),
                bracket_values: (fa, fa),
            });
            continue;
        }
        if fa * fb >= 0.0 {
            continue;
        }
        if let Some(root) = bisect(&f, a, b, fa, fb, opts.t_tol) {
            roots.push(root);
        }
    }
    if !opts.periodic {
        if let (Some(&t), Some(&v)) = (ts.last(), vals.last()) {
            if v == 0.0 {
                roots.push(Root {
                    t,
                    residual: 0.0,
                    bracket: (t, t),
                    bracket_values: (v, v),
                });
            }
        }
    } else {
        for r in &mut roots {
            if r.t >= hi {
                r.t -= period;
                r.bracket = (r.bracket.0 - period, r.bracket.1 - period);
            }
        }
        roots.sort_by(|a, b| a.t.total_cmp(&b.t));
    }
    RootScan::Roots { roots }
}

fn bisect<F>(f: &F, mut a: f64, mut b: f64, mut fa: f64, fb: f64, t_tol: f64) -> Option<Root>
where
    F: Fn(f64) -> Result<f64>,
{
    let bracket = (a, b);
    let bracket_values = (fa, fb);
    let mut best = (a, fa);
    for _ in 0..200 {
        if (b - a).abs() <= t_tol {
            break;
        }
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m).ok()?;
        if !fm.is_finite() {
            return None;
        }
        if fm == 0.0 {
            best = (m, 0.0);
            a = m;
            b = m;
            break;
        }
        if fm.abs() < best.1.abs() || best.0 == bracket.0 {
            best = (m, fm);
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    let t = 0.5 * (a + b);
    let residual = f(t).ok().filter(|v| v.is_finite()).unwrap_or(best.1);
    if residual.abs() > bracket_values.0.abs().min(bracket_values.1.abs()) {
        return None;
    }
    Some(Root {
        t,
        residual,
        bracket,
        bracket_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sine_roots() {
        let scan = scan(|t| Ok(t.sin()), 0.5, 10.0, ScanOptions::default());
        let ts = scan.params();
        assert_eq!(ts.len(), 3);
        for (k, t) in ts.iter().enumerate() {
            assert!((t - (k + 1) as f64 * PI).abs() < 1e-11);
        }
    }

    #[test]
    fn poles_are_rejected() {
        let scan = scan(|t| Ok(1.0 / (t - 0.3)), 0.0, 1.0, ScanOptions::default());
        assert!(scan.roots().is_empty());
        let tan = scan_tan();
        assert_eq!(tan.len(), 2);
    }

    fn scan_tan() -> Vec<f64> {
        scan(|t| Ok(t.tan()), -1.0, 4.0, ScanOptions::default()).params()
    }

    #[test]
    fn periodic_seam_root_counted_once() {
        let opts = ScanOptions {
            periodic: true,
            ..Default::default()
        };
        let s = scan(|t| Ok(t.sin()), 0.0, 2.0 * PI, opts);
        let ts = s.params();
        assert_eq!(ts.len(), 2, "{ts:?}");
        assert!(ts[0].abs() < 1e-11);
        assert!((ts[1] - PI).abs() < 1e-11);
    }

    #[test]
    fn flat_criterion_is_degenerate() {
        let opts = ScanOptions {
            flat_tol: Some(1e-12),
            ..Default::default()
        };
        assert!(scan(|_| Ok(1e-15), 0.0, 1.0, opts).is_degenerate());
        assert!(!scan(|t| Ok(t - 0.5), 0.0, 1.0, opts).is_degenerate());
    }

    #[test]
    fn failing_samples_are_skipped() {
        let s = scan(
            |t| {
                if (t - 0.5).abs() < 0.01 {
                    Err(crate::GeomError::CuspPoint { t })
                } else {
                    Ok(t - 0.25)
                }
            },
            0.0,
            1.0,
            ScanOptions::default(),
        );
        assert_eq!(s.params().len(), 1);
    }
}
