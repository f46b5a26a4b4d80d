//! Small dense solves.

use nalgebra::{Matrix3, Vector3};

use crate::error::{GeomError, Result};

/// Systems with a 2-norm condition number above this are reported singular.
pub const CONDITION_LIMIT: f64 = 1e12;

/// 2-norm condition number from the singular values.
pub fn condition_number(m: &Matrix3<f64>) -> f64 {
    let sv = m.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solve `m x = rhs` by LU with partial pivoting, refusing ill-conditioned
/// systems. `t` is only used for the error report.
pub fn solve3(m: &Matrix3<f64>, rhs: &Vector3<f64>, t: f64) -> Result<Vector3<f64>> {
    let condition = condition_number(m);
    if !(condition < CONDITION_LIMIT) {
        return Err(GeomError::SingularSystem { t, condition });
    }
    m.lu()
        .solve(rhs)
        .filter(|x| x.iter().all(|v| v.is_finite()))
        .ok_or(GeomError::SingularSystem { t, condition })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_and_rejects() {
        let m = Matrix3::new(2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0);
        let x = Vector3::new(1.0, -2.0, 0.5);
        let got = solve3(&m, &(m * x), 0.0).unwrap();
        assert!((got - x).norm() < 1e-14);
        let s = Matrix3::new(1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 1.0, 1.0);
        assert!(matches!(
            solve3(&s, &Vector3::zeros(), 1.5),
            Err(GeomError::SingularSystem { .. })
        ));
    }
}
