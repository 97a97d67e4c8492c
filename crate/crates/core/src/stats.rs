//! Small statistics helpers: normal tail, least-squares fits, medians and
//! the one-sample Kolmogorov-Smirnov statistic.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use crate::special::erfc;

/// Upper tail `1 - Phi(z)` of the standard normal.
///
/// Goes through `erfc`, so the far tail keeps full relative precision
/// instead of cancelling against 1.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y = intercept + slope * x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let mx = mean(xs);
    let my = mean(ys);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// Least-squares slope of `y = slope * x` (no intercept).
pub fn slope_through_origin(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    if sxx == 0.0 || xs.len() != ys.len() {
        return None;
    }
    Some(xs.iter().zip(ys).map(|(x, y)| x * y).sum::<f64>() / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFit {
    /// `[c0, c1, c2]` for `y = c0 + c1 x + c2 x^2`.
    pub coefficients: [f64; 3],
    pub r_squared: f64,
    /// t statistic of `c2`.
    pub t_quadratic: f64,
    /// Two-sided p-value of `c2 = 0`.
    pub p_quadratic: f64,
}

/// Least-squares quadratic with a t test on the squared term.
///
/// `x` is standardised before fitting; the t statistic of the leading
/// coefficient is invariant under that affine change.
pub fn quadratic_fit(xs: &[f64], ys: &[f64]) -> Option<QuadraticFit> {
    let n = xs.len();
    if n < 4 || n != ys.len() {
        return None;
    }
    let mx = mean(xs);
    let sx = (xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>() / n as f64).sqrt();
    if sx == 0.0 {
        return None;
    }
    let us: Vec<f64> = xs.iter().map(|x| (x - mx) / sx).collect();

    let mut xtx = [[0.0; 3]; 3];
    let mut xty = [0.0; 3];
    for (&u, &y) in us.iter().zip(ys) {
        let row = [1.0, u, u * u];
        for i in 0..3 {
            xty[i] += row[i] * y;
            for j in 0..3 {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    let inv = invert3(&xtx)?;
    let mut beta = [0.0; 3];
    for i in 0..3 {
        beta[i] = (0..3).map(|j| inv[i][j] * xty[j]).sum();
    }

    let my = mean(ys);
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (&u, &y) in us.iter().zip(ys) {
        let fit = beta[0] + beta[1] * u + beta[2] * u * u;
        ss_res += (y - fit).powi(2);
        ss_tot += (y - my).powi(2);
    }
    let dof = (n - 3) as f64;
    let sigma2 = ss_res / dof;
    let se2 = (sigma2 * inv[2][2]).sqrt();
    let t_quadratic = if se2 > 0.0 { beta[2] / se2 } else { f64::INFINITY };
    let p_quadratic = if t_quadratic.is_finite() {
        let dist = StudentsT::new(0.0, 1.0, dof).ok()?;
        2.0 * (1.0 - dist.cdf(t_quadratic.abs()))
    } else {
        0.0
    };

    // Back to the original x scale.
    let c2 = beta[2] / (sx * sx);
    let c1 = beta[1] / sx - 2.0 * c2 * mx;
    let c0 = beta[0] - beta[1] * mx / sx + c2 * mx * mx;
    Some(QuadraticFit {
        coefficients: [c0, c1, c2],
        r_squared: if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot },
        t_quadratic,
        p_quadratic,
    })
}

fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det.abs() < 1e-300 {
        return None;
    }
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
        }
    }
    Some(inv)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len().is_multiple_of(2) { 0.5 * (v[mid - 1] + v[mid]) } else { v[mid] })
}

/// `max / min` of a list of positive values.
pub fn spread(xs: &[f64]) -> Option<f64> {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    (min > 0.0 && max.is_finite()).then(|| max / min)
}

/// Kolmogorov-Smirnov distance between a sample and Normal(mu, sigma^2).
pub fn ks_statistic_normal(sample: &[f64], mu: f64, sigma: f64) -> f64 {
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf((x - mu) / sigma);
            let lo = f - i as f64 / n;
            let hi = (i + 1) as f64 / n - f;
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}
