//! Truncated Taylor series ("jets") in one real variable.
//!
//! A [`Jet`] holds the Taylor coefficients `f(t0), f'(t0), f''(t0)/2!, ...`
//! of a function around a fixed expansion point. Arithmetic on jets is exact
//! up to the stored length, so every geometric quantity built from the
//! position jet of a curve (curvature, torsion, sigma, ...) carries its own
//! exact parameter derivatives. Operations that lose an order (`derivative`)
//! shorten the jet; binary operations keep the shorter length.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use nalgebra::Vector3;

/// Maximum number of coefficients a jet can hold.
pub const JET_CAPACITY: usize = 14;

#[derive(Clone, Copy, PartialEq)]
pub struct Jet {
    c: [f64; JET_CAPACITY],
    len: usize,
}

impl std::fmt::Debug for Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.coeffs()).finish()
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

impl Jet {
    /// Jet from Taylor coefficients (at most [`JET_CAPACITY`] are kept).
    pub fn from_coeffs(coeffs: &[f64]) -> Self {
        let len = coeffs.len().min(JET_CAPACITY);
        let mut c = [0.0; JET_CAPACITY];
        c[..len].copy_from_slice(&coeffs[..len]);
        Jet { c, len }
    }

    /// Jet from plain derivatives `f, f', f'', ...` (divides by factorials).
    pub fn from_derivatives(derivs: &[f64]) -> Self {
        let coeffs: Vec<f64> = derivs
            .iter()
            .enumerate()
            .map(|(m, d)| d / factorial(m))
            .collect();
        Jet::from_coeffs(&coeffs)
    }

    pub fn constant(value: f64, len: usize) -> Self {
        let mut j = Jet::zero(len);
        if len > 0 {
            j.c[0] = value;
        }
        j
    }

    pub fn zero(len: usize) -> Self {
        Jet {
            c: [0.0; JET_CAPACITY],
            len: len.min(JET_CAPACITY),
        }
    }

    /// The identity function expanded around `t0`.
    pub fn variable(t0: f64, len: usize) -> Self {
        let mut j = Jet::constant(t0, len);
        if j.len > 1 {
            j.c[1] = 1.0;
        }
        j
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c[..self.len]
    }

    /// Taylor coefficient of order `m`.
    pub fn coeff(&self, m: usize) -> f64 {
        assert!(m < self.len, "jet coefficient {m} requested from a jet of length {}", self.len);
        self.c[m]
    }

    pub fn value(&self) -> f64 {
        self.coeff(0)
    }

    /// The `m`-th derivative at the expansion point.
    pub fn derivative_value(&self, m: usize) -> f64 {
        self.coeff(m) * factorial(m)
    }

    pub fn truncate(mut self, len: usize) -> Self {
        self.len = self.len.min(len);
        self
    }

    /// Jet of the derivative; one coefficient shorter.
    /// Exact division by `(t - t0)^m`, valid when the first `m`
    /// coefficients vanish (they are dropped).
    pub fn shifted(&self, m: usize) -> Self {
        Jet::from_coeffs(&self.coeffs()[m.min(self.len())..])
    }

    pub fn derivative(&self) -> Self {
        let len = self.len.saturating_sub(1);
        let mut out = Jet::zero(len);
        for m in 0..len {
            out.c[m] = (m + 1) as f64 * self.c[m + 1];
        }
        out
    }

    /// Antiderivative with the given value at the expansion point.
    pub fn integrate(&self, value: f64) -> Self {
        let len = (self.len + 1).min(JET_CAPACITY);
        let mut out = Jet::zero(len);
        out.c[0] = value;
        for m in 1..len {
            out.c[m] = self.c[m - 1] / m as f64;
        }
        out
    }

    /// Evaluate the truncated series at offset `h` from the expansion point.
    pub fn eval_offset(&self, h: f64) -> f64 {
        self.coeffs().iter().rev().fold(0.0, |acc, c| acc * h + c)
    }

    pub fn scale(mut self, s: f64) -> Self {
        for v in &mut self.c[..self.len] {
            *v *= s;
        }
        self
    }

    pub fn recip(&self) -> Self {
        Jet::constant(1.0, self.len) / *self
    }

    pub fn sqrt(&self) -> Self {
        let n = self.len;
        let mut s = Jet::zero(n);
        if n == 0 {
            return s;
        }
        s.c[0] = self.c[0].sqrt();
        for m in 1..n {
            let mut acc = self.c[m];
            for i in 1..m {
                acc -= s.c[i] * s.c[m - i];
            }
            s.c[m] = acc / (2.0 * s.c[0]);
        }
        s
    }

    /// Returns `(sin u, cos u)`.
    pub fn sin_cos(&self) -> (Self, Self) {
        let n = self.len;
        let mut s = Jet::zero(n);
        let mut c = Jet::zero(n);
        if n == 0 {
            return (s, c);
        }
        let (s0, c0) = self.c[0].sin_cos();
        s.c[0] = s0;
        c.c[0] = c0;
        for m in 1..n {
            let mut ds = 0.0;
            let mut dc = 0.0;
            for i in 1..=m {
                let w = i as f64 * self.c[i];
                ds += w * c.c[m - i];
                dc -= w * s.c[m - i];
            }
            s.c[m] = ds / m as f64;
            c.c[m] = dc / m as f64;
        }
        (s, c)
    }

    pub fn sin(&self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Self {
        self.sin_cos().1
    }

    pub fn tan(&self) -> Self {
        let (s, c) = self.sin_cos();
        s / c
    }

    pub fn exp(&self) -> Self {
        let n = self.len;
        let mut e = Jet::zero(n);
        if n == 0 {
            return e;
        }
        e.c[0] = self.c[0].exp();
        for m in 1..n {
            let mut acc = 0.0;
            for i in 1..=m {
                acc += i as f64 * self.c[i] * e.c[m - i];
            }
            e.c[m] = acc / m as f64;
        }
        e
    }

    pub fn ln(&self) -> Self {
        let n = self.len;
        let mut l = Jet::zero(n);
        if n == 0 {
            return l;
        }
        l.c[0] = self.c[0].ln();
        for m in 1..n {
            let mut acc = self.c[m];
            for i in 1..m {
                acc -= i as f64 * l.c[i] * self.c[m - i] / m as f64;
            }
            l.c[m] = acc / self.c[0];
        }
        l
    }

    /// `u^p` for a real exponent `p`.
    pub fn powf(&self, p: f64) -> Self {
        let n = self.len;
        let mut w = Jet::zero(n);
        if n == 0 {
            return w;
        }
        let u0 = self.c[0];
        w.c[0] = u0.powf(p);
        if u0 == 0.0 {
            // Only integer exponents expand around a zero base.
            if p.fract() == 0.0 && p >= 0.0 {
                let mut acc = Jet::constant(1.0, n);
                for _ in 0..p as usize {
                    acc = acc * *self;
                }
                return acc;
            }
            for m in 1..n {
                w.c[m] = f64::NAN;
            }
            return w;
        }
        for m in 1..n {
            let mut acc = 0.0;
            for k in 1..=m {
                acc += ((p + 1.0) * k as f64 - m as f64) * self.c[k] * w.c[m - k];
            }
            w.c[m] = acc / (m as f64 * u0);
        }
        w
    }

    /// `|u|`, valid away from zeros of `u`.
    pub fn abs(&self) -> Self {
        if self.len > 0 && self.c[0] < 0.0 {
            -*self
        } else {
            *self
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs().iter().all(|v| v.is_finite())
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let len = self.len.min(rhs.len);
        let mut out = Jet::zero(len);
        for m in 0..len {
            out.c[m] = self.c[m] + rhs.c[m];
        }
        out
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let len = self.len.min(rhs.len);
        let mut out = Jet::zero(len);
        for m in 0..len {
            out.c[m] = self.c[m] - rhs.c[m];
        }
        out
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let len = self.len.min(rhs.len);
        let mut out = Jet::zero(len);
        for m in 0..len {
            let mut acc = 0.0;
            for i in 0..=m {
                acc += self.c[i] * rhs.c[m - i];
            }
            out.c[m] = acc;
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        let len = self.len.min(rhs.len);
        let mut q = Jet::zero(len);
        for m in 0..len {
            let mut acc = self.c[m];
            for i in 1..=m {
                acc -= rhs.c[i] * q.c[m - i];
            }
            q.c[m] = acc / rhs.c[0];
        }
        q
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        if self.len > 0 {
            self.c[0] += rhs;
        }
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, rhs: f64) -> Jet {
        self + (-rhs)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self.scale(1.0 / rhs)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs.scale(self)
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        -rhs + self
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        rhs + self
    }
}

impl Div<Jet> for f64 {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        rhs.recip().scale(self)
    }
}

/// A vector-valued jet: one [`Jet`] per coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet3 {
    pub x: Jet,
    pub y: Jet,
    pub z: Jet,
}

impl Jet3 {
    pub fn new(x: Jet, y: Jet, z: Jet) -> Self {
        Jet3 { x, y, z }
    }

    pub fn constant(v: Vector3<f64>, len: usize) -> Self {
        Jet3::new(
            Jet::constant(v.x, len),
            Jet::constant(v.y, len),
            Jet::constant(v.z, len),
        )
    }

    /// Build from the coefficient vectors `[c0, c1, ...]`.
    pub fn from_vector_coeffs(coeffs: &[Vector3<f64>]) -> Self {
        let xs: Vec<f64> = coeffs.iter().map(|v| v.x).collect();
        let ys: Vec<f64> = coeffs.iter().map(|v| v.y).collect();
        let zs: Vec<f64> = coeffs.iter().map(|v| v.z).collect();
        Jet3::new(Jet::from_coeffs(&xs), Jet::from_coeffs(&ys), Jet::from_coeffs(&zs))
    }

    pub fn len(&self) -> usize {
        self.x.len().min(self.y.len()).min(self.z.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coeff(&self, m: usize) -> Vector3<f64> {
        Vector3::new(self.x.coeff(m), self.y.coeff(m), self.z.coeff(m))
    }

    pub fn value(&self) -> Vector3<f64> {
        self.coeff(0)
    }

    pub fn derivative_value(&self, m: usize) -> Vector3<f64> {
        Vector3::new(
            self.x.derivative_value(m),
            self.y.derivative_value(m),
            self.z.derivative_value(m),
        )
    }

    pub fn derivative(&self) -> Self {
        Jet3::new(self.x.derivative(), self.y.derivative(), self.z.derivative())
    }

    pub fn integrate(&self, value: Vector3<f64>) -> Self {
        Jet3::new(
            self.x.integrate(value.x),
            self.y.integrate(value.y),
            self.z.integrate(value.z),
        )
    }

    pub fn truncate(&self, len: usize) -> Self {
        Jet3::new(self.x.truncate(len), self.y.truncate(len), self.z.truncate(len))
    }

    pub fn shifted(&self, m: usize) -> Self {
        Jet3::new(self.x.shifted(m), self.y.shifted(m), self.z.shifted(m))
    }

    /// The Taylor polynomial evaluated at offset `h`.
    pub fn eval_offset(&self, h: f64) -> Vector3<f64> {
        Vector3::new(self.x.eval_offset(h), self.y.eval_offset(h), self.z.eval_offset(h))
    }

    pub fn dot(&self, o: &Jet3) -> Jet {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &Jet3) -> Jet3 {
        Jet3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_squared(&self) -> Jet {
        self.dot(self)
    }

    pub fn norm(&self) -> Jet {
        self.norm_squared().sqrt()
    }

    pub fn scale(&self, s: Jet) -> Jet3 {
        Jet3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn scale_f(&self, s: f64) -> Jet3 {
        Jet3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn div(&self, s: Jet) -> Jet3 {
        let inv = s.recip();
        self.scale(inv)
    }

    pub fn add_vec(&self, v: Vector3<f64>) -> Jet3 {
        Jet3::new(self.x + v.x, self.y + v.y, self.z + v.z)
    }

    /// Apply a constant linear map.
    pub fn transform(&self, m: &nalgebra::Matrix3<f64>) -> Jet3 {
        let row = |i: usize| self.x * m[(i, 0)] + self.y * m[(i, 1)] + self.z * m[(i, 2)];
        Jet3::new(row(0), row(1), row(2))
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, o: Jet3) -> Jet3 {
        Jet3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, o: Jet3) -> Jet3 {
        Jet3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        self.scale_f(-1.0)
    }
}

/// `det(a, b, c) = a . (b x c)`.
pub fn det3(a: &Jet3, b: &Jet3, c: &Jet3) -> Jet {
    a.dot(&b.cross(c))
}
