//! Adaptive Dormand–Prince 5(4) integrator with dense output.
//!
//! Accepted steps are stored; the state at an arbitrary time inside the
//! integration interval is produced by a single fresh Runge–Kutta step from
//! the preceding node. That step is never longer than the accepted step it
//! subdivides, so its local error stays within the controlled tolerance.

use std::sync::Arc;

use nalgebra::SVector;

use crate::error::{GeomError, Result};

pub type State<const N: usize> = SVector<f64, N>;
pub type Rhs<const N: usize> = Arc<dyn Fn(f64, &State<N>) -> Result<State<N>> + Send + Sync>;
pub type Projector<const N: usize> = Arc<dyn Fn(&mut State<N>) + Send + Sync>;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights (identical to the last row of `A`).
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
/// Embedded fourth-order weights.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-10,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

/// Returns the fifth-order state and the error estimate after one step.
fn dp_step<const N: usize>(
    f: &Rhs<N>,
    t: f64,
    y: &State<N>,
    h: f64,
) -> Result<(State<N>, State<N>)> {
    let mut k: [State<N>; 7] = [State::<N>::zeros(); 7];
    for i in 0..7 {
        let mut yi = *y;
        for (j, kj) in k.iter().enumerate().take(i) {
            if A[i][j] != 0.0 {
                yi += kj * (h * A[i][j]);
            }
        }
        k[i] = f(t + C[i] * h, &yi)?;
    }
    let mut y5 = *y;
    let mut err = State::<N>::zeros();
    for i in 0..7 {
        y5 += k[i] * (h * B5[i]);
        err += k[i] * (h * (B5[i] - B4[i]));
    }
    Ok((y5, err))
}

#[derive(Clone)]
pub struct OdeSolution<const N: usize> {
    times: Vec<f64>,
    states: Vec<State<N>>,
    rhs: Rhs<N>,
    projector: Option<Projector<N>>,
}

impl<const N: usize> std::fmt::Debug for OdeSolution<N> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OdeSolution")
            .field("steps", &self.times.len())
            .field("t0", &self.times.first())
            .field("t1", &self.times.last())
            .finish()
    }
}

/// Integrate `y' = f(t, y)` from `t0` to `t1 > t0`.
///
/// `projector`, when given, is applied to every accepted state (used to
/// re-orthonormalize moving frames).
pub fn solve<const N: usize>(
    rhs: Rhs<N>,
    t0: f64,
    y0: State<N>,
    t1: f64,
    opts: OdeOptions,
    projector: Option<Projector<N>>,
) -> Result<OdeSolution<N>> {
    if !(t1 > t0) {
        return Err(GeomError::InvalidArgument(format!(
            "integration interval [{t0}, {t1}] is empty"
        )));
    }
    let mut times = vec![t0];
    let mut states = vec![y0];
    let mut t = t0;
    let mut y = y0;
    let span = t1 - t0;
    let mut h = (span / 64.0).min(opts.h_max);
    let mut steps = 0usize;
    while t < t1 {
        if steps >= opts.max_steps {
            return Err(GeomError::IntegrationFailure {
                t,
                reason: "step budget exhausted".into(),
            });
        }
        steps += 1;
        let last = t + h >= t1;
        let step = if last { t1 - t } else { h };
        let (mut y_new, err) = dp_step(&rhs, t, &y, step)?;
        let mut norm = 0.0;
        for i in 0..N {
            let scale = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            norm += (err[i] / scale).powi(2);
        }
        let norm = (norm / N as f64).sqrt();
        if !norm.is_finite() {
            h *= 0.2;
        } else if norm <= 1.0 {
            t = if last { t1 } else { t + step };
            if let Some(p) = &projector {
                p(&mut y_new);
            }
            y = y_new;
            times.push(t);
            states.push(y);
            let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
            h = (step * factor).min(opts.h_max);
        } else {
            h = step * (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9);
        }
        if h < 1e-13 * span.max(t.abs()) {
            return Err(GeomError::IntegrationFailure {
                t,
                reason: format!("step size underflow at tolerance {:e}", opts.rtol),
            });
        }
    }
    Ok(OdeSolution {
        times,
        states,
        rhs,
        projector,
    })
}

impl<const N: usize> OdeSolution<N> {
    pub fn t0(&self) -> f64 {
        self.times[0]
    }

    pub fn t1(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, &State<N>)> {
        self.times.iter().copied().zip(self.states.iter())
    }

    pub fn step_count(&self) -> usize {
        self.times.len() - 1
    }

    pub fn final_state(&self) -> State<N> {
        *self.states.last().unwrap()
    }

    /// Dense output at any `t` in `[t0, t1]`.
    pub fn state_at(&self, t: f64) -> Result<State<N>> {
        let (t0, t1) = (self.t0(), self.t1());
        let tol = 1e-12 * (t1 - t0).max(1.0);
        if t < t0 - tol || t > t1 + tol {
            return Err(GeomError::OutOfDomain { t, lo: t0, hi: t1 });
        }
        let t = t.clamp(t0, t1);
        let idx = match self.times.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => return Ok(self.states[i]),
            Err(i) => i - 1,
        };
        let (y, _) = dp_step(&self.rhs, self.times[idx], &self.states[idx], t - self.times[idx])?;
        let mut y = y;
        if let Some(p) = &self.projector {
            p(&mut y);
        }
        Ok(y)
    }
}
