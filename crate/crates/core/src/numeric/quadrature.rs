//! Adaptive Gauss–Kronrod (7, 15) quadrature.

use crate::error::{GeomError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: usize = 48;

/// One (7, 15) panel: returns (Kronrod estimate, |Kronrod - Gauss|).
fn panel<F>(f: &F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx)? + f(center + dx)?;
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs()))
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Panels are bisected until each meets its share of the tolerance. An
/// integrand error aborts the integration and is returned unchanged.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate(f, b, a, tol).map(|v| -v);
    }
    let mut total = 0.0;
    let mut stack = vec![(a, b, 0usize)];
    let width = b - a;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (value, err) = panel(&f, lo, hi)?;
        let share = tol * (hi - lo) / width;
        if err <= share.max(1e-15 * value.abs()) || depth >= MAX_DEPTH {
            if depth >= MAX_DEPTH && err > share {
                return Err(GeomError::IntegrationFailure {
                    t: 0.5 * (lo + hi),
                    reason: format!("quadrature did not reach tolerance {tol:e}"),
                });
            }
            total += value;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    Ok(total)
}

/// Integral of `f` from `a` to each of `nodes` (sorted), accumulated panel by
/// panel.
pub fn cumulative<F>(f: F, a: f64, nodes: &[f64], tol: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut out = Vec::with_capacity(nodes.len());
    let mut acc = 0.0;
    let mut prev = a;
    let per = tol / nodes.len().max(1) as f64;
    for &x in nodes {
        acc += integrate(&f, prev, x, per)?;
        out.push(acc);
        prev = x;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_two() {
        let k: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        let g: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert_relative_eq!(k, 2.0, epsilon = 1e-14);
        assert_relative_eq!(g, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn exact_for_polynomials() {
        let v = integrate(|x| Ok(x.powi(20) - 3.0 * x.powi(7)), -1.0, 2.0, 1e-12).unwrap();
        let exact = (2f64.powi(21) + 1.0) / 21.0 - 3.0 * (2f64.powi(8) - 1.0) / 8.0;
        assert_relative_eq!(v, exact, max_relative = 1e-13);
    }

    #[test]
    fn smooth_and_peaked_integrands() {
        let v = integrate(|x| Ok(x.sin()), 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert_relative_eq!(v, 2.0, epsilon = 1e-12);
        let w = integrate(|x| Ok(1.0 / (1e-4 + x * x)), -1.0, 1.0, 1e-10).unwrap();
        assert_relative_eq!(w, 2.0 * (1.0 / 1e-2) * (1.0f64 / 1e-2).atan(), max_relative = 1e-11);
        assert_eq!(integrate(Ok, 3.0, 3.0, 1e-9).unwrap(), 0.0);
        assert_relative_eq!(integrate(Ok, 1.0, 0.0, 1e-12).unwrap(), -0.5);
    }

    #[test]
    fn cumulative_matches_pointwise() {
        let nodes = [0.5, 1.0, 2.0];
        let c = cumulative(|x| Ok(x.exp()), 0.0, &nodes, 1e-12).unwrap();
        for (n, v) in nodes.iter().zip(c) {
            assert_relative_eq!(v, n.exp() - 1.0, epsilon = 1e-12);
        }
    }
}
