use std::fmt;
use std::sync::{Arc, OnceLock};

use nalgebra::Vector3;

use super::FrenetJet;
use crate::error::{GeomError, Result};
use crate::jet::{Jet3, JET_CAPACITY};
use crate::numeric::quadrature;

/// Anything that can expand a space curve into a Taylor jet around `t`.
pub trait Parametrization: Send + Sync {
    /// Position jet at `t` holding `len` coefficients.
    fn jet(&self, t: f64, len: usize) -> Result<Jet3>;

    /// Largest jet length this source can supply.
    fn max_len(&self) -> usize {
        JET_CAPACITY
    }
}

/// Panels of the cached arclength and torsion tables.
const TABLE_PANELS: usize = 512;
const PANEL_TOL: f64 = 1e-13;

#[derive(Debug)]
struct Table {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl Table {
    fn build<F>(lo: f64, hi: f64, f: F) -> Result<Table>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let h = (hi - lo) / TABLE_PANELS as f64;
        let nodes: Vec<f64> = (0..=TABLE_PANELS)
            .map(|i| if i == TABLE_PANELS { hi } else { lo + i as f64 * h })
            .collect();
        let mut values = Vec::with_capacity(nodes.len());
        values.push(0.0);
        let mut acc = 0.0;
        for w in nodes.windows(2) {
            acc += quadrature::integrate(&f, w[0], w[1], PANEL_TOL)?;
            values.push(acc);
        }
        Ok(Table { nodes, values })
    }

    fn panel(&self, t: f64) -> usize {
        match self.nodes.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(self.nodes.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.nodes.len() - 2),
        }
    }

    fn at<F>(&self, t: f64, f: F) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let i = self.panel(t);
        Ok(self.values[i] + quadrature::integrate(f, self.nodes[i], t, PANEL_TOL)?)
    }

    fn total(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

/// A parametric space curve on a closed parameter interval.
///
/// Cheap to clone: the parametrization and the lazily built arclength and
/// torsion tables are shared.
#[derive(Clone)]
pub struct Curve {
    source: Arc<dyn Parametrization>,
    name: String,
    lo: f64,
    hi: f64,
    closed: bool,
    cusps: Vec<f64>,
    eps_k: f64,
    eps_tau: f64,
    arclength: Arc<OnceLock<Result<Table>>>,
    torsion: Arc<OnceLock<Result<Table>>>,
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Curve")
            .field("name", &self.name)
            .field("domain", &(self.lo, self.hi))
            .field("closed", &self.closed)
            .finish()
    }
}

impl Curve {
    pub fn new(source: Arc<dyn Parametrization>, lo: f64, hi: f64) -> Result<Curve> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(GeomError::InvalidArgument(format!(
                "domain [{lo}, {hi}] is empty or not finite"
            )));
        }
        Ok(Curve {
            source,
            name: "curve".into(),
            lo,
            hi,
            closed: false,
            cusps: Vec::new(),
            eps_k: 1e-9,
            eps_tau: 1e-9,
            arclength: Arc::new(OnceLock::new()),
            torsion: Arc::new(OnceLock::new()),
        })
    }

    fn with_fresh_tables(mut self) -> Curve {
        self.arclength = Arc::new(OnceLock::new());
        self.torsion = Arc::new(OnceLock::new());
        self
    }

    pub fn named(mut self, name: impl Into<String>) -> Curve {
        self.name = name.into();
        self
    }

    /// Mark the curve closed without checking the endpoints.
    pub fn assume_closed(mut self, closed: bool) -> Curve {
        self.closed = closed;
        self
    }

    /// Mark the curve closed if position and the first three derivatives
    /// agree at both ends to `1e-9`.
    pub fn detect_closed(mut self) -> Curve {
        self.closed = self.closure_gap().map(|g| g <= 1e-9).unwrap_or(false);
        self
    }

    /// Largest mismatch between the end jets (position and derivatives up to
    /// order three).
    pub fn closure_gap(&self) -> Result<f64> {
        let a = self.jet(self.lo, 4)?;
        let b = self.jet(self.hi, 4)?;
        Ok((0..4)
            .map(|m| (a.derivative_value(m) - b.derivative_value(m)).norm())
            .fold(0.0, f64::max))
    }

    /// Parameters where the velocity vanishes on purpose.
    pub fn with_cusps(mut self, cusps: Vec<f64>) -> Curve {
        self.cusps = cusps;
        self
    }

    pub fn with_thresholds(mut self, eps_k: f64, eps_tau: f64) -> Curve {
        self.eps_k = eps_k;
        self.eps_tau = eps_tau;
        self
    }

    /// The same curve restricted to a sub-interval (or extended, if the
    /// parametrization allows it).
    pub fn with_domain(&self, lo: f64, hi: f64) -> Result<Curve> {
        let mut c = Curve::new(self.source.clone(), lo, hi)?;
        c.name = self.name.clone();
        c.cusps = self.cusps.iter().copied().filter(|&t| t >= lo && t <= hi).collect();
        c.eps_k = self.eps_k;
        c.eps_tau = self.eps_tau;
        c.closed = self.closed && lo == self.lo && hi == self.hi;
        Ok(c.with_fresh_tables())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn cusps(&self) -> &[f64] {
        &self.cusps
    }

    pub fn eps_k(&self) -> f64 {
        self.eps_k
    }

    pub fn eps_tau(&self) -> f64 {
        self.eps_tau
    }

    pub fn source(&self) -> &Arc<dyn Parametrization> {
        &self.source
    }

    pub fn max_len(&self) -> usize {
        self.source.max_len()
    }

    pub fn contains(&self, t: f64) -> bool {
        let tol = 1e-9 * (self.hi - self.lo);
        t >= self.lo - tol && t <= self.hi + tol
    }

    pub(crate) fn check_domain(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(GeomError::OutOfDomain {
                t,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }

    /// Position jet with `len` Taylor coefficients.
    pub fn jet(&self, t: f64, len: usize) -> Result<Jet3> {
        let available = self.source.max_len();
        if len > available {
            return Err(GeomError::InsufficientOrder {
                needed: len.saturating_sub(1),
                available: available.saturating_sub(1),
            });
        }
        self.source.jet(t, len)
    }

    pub fn point(&self, t: f64) -> Result<Vector3<f64>> {
        Ok(self.jet(t, 1)?.value())
    }

    /// The `m`-th parameter derivative of the position.
    pub fn derivative(&self, t: f64, m: usize) -> Result<Vector3<f64>> {
        Ok(self.jet(t, m + 1)?.derivative_value(m))
    }

    pub fn speed(&self, t: f64) -> Result<f64> {
        Ok(self.derivative(t, 1)?.norm())
    }

    /// Frenet data with exact parameter derivatives; see [`FrenetJet`].
    pub fn frenet_jet(&self, t: f64, len: usize) -> Result<FrenetJet> {
        FrenetJet::new(self, t, self.jet(t, len)?)
    }

    /// `n` evenly spaced parameters. For closed curves the right end is
    /// omitted since it repeats the left one.
    pub fn sample_params(&self, n: usize) -> Vec<f64> {
        let n = n.max(2);
        if self.closed {
            let h = (self.hi - self.lo) / n as f64;
            (0..n).map(|i| self.lo + i as f64 * h).collect()
        } else {
            let h = (self.hi - self.lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { self.hi } else { self.lo + i as f64 * h })
                .collect()
        }
    }

    fn arclength_table(&self) -> Result<&Table> {
        self.arclength
            .get_or_init(|| Table::build(self.lo, self.hi, |t| self.speed(t)))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn torsion_table(&self) -> Result<&Table> {
        self.torsion
            .get_or_init(|| Table::build(self.lo, self.hi, |t| self.torsion_density(t)))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn torsion_density(&self, t: f64) -> Result<f64> {
        let f = self.frenet_jet(t, 4)?;
        Ok(f.tau.value() * f.speed.value())
    }

    /// Arclength from the start of the domain to `t`.
    pub fn arclength_at(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        self.arclength_table()?.at(t, |u| self.speed(u))
    }

    /// Total length of the curve over its domain.
    pub fn length(&self) -> Result<f64> {
        Ok(self.arclength_table()?.total())
    }

    /// Inverse of [`Curve::arclength_at`].
    pub fn param_at_arclength(&self, s: f64) -> Result<f64> {
        let table = self.arclength_table()?;
        let total = table.total();
        let tol = 1e-12 * total.max(1.0);
        if s < -tol || s > total + tol {
            return Err(GeomError::InvalidArgument(format!(
                "arclength {s} outside [0, {total}]"
            )));
        }
        let s = s.clamp(0.0, total);
        let i = match table.values.binary_search_by(|v| v.total_cmp(&s)) {
            Ok(i) => return Ok(table.nodes[i]),
            Err(i) => (i.max(1) - 1).min(table.nodes.len() - 2),
        };
        let (mut a, mut b) = (table.nodes[i], table.nodes[i + 1]);
        let mut t = a + (b - a) * (s - table.values[i]) / (table.values[i + 1] - table.values[i]);
        for _ in 0..100 {
            let g = table.values[i] + quadrature::integrate(|u| self.speed(u), table.nodes[i], t, PANEL_TOL)? - s;
            if g.abs() <= 1e-14 * total.max(1.0) || b - a <= 1e-15 * (1.0 + t.abs()) {
                break;
            }
            if g > 0.0 {
                b = t;
            } else {
                a = t;
            }
            let v = self.speed(t)?;
            let newton = t - g / v;
            t = if v > 0.0 && newton > a && newton < b { newton } else { 0.5 * (a + b) };
        }
        Ok(t)
    }

    /// `∫ τ ds` from the start of the domain to `t`.
    pub fn torsion_integral_at(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        self.torsion_table()?.at(t, |u| self.torsion_density(u))
    }

    /// `∫ τ ds` over the whole domain.
    pub fn total_torsion(&self) -> Result<f64> {
        Ok(self.torsion_table()?.total())
    }
}
