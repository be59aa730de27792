//! Comparison equation for the perimeter profile,
//!
//! `Y' = k m [4√π √Y / m - 1]^{3/2}`, `k = 2/(3√3)`,
//!
//! started at the threshold value. With `u = 4√π√Y/m - 1` it has the first
//! integral `G(Y) = m²(u-1) / (4π√u)`, `G' = k m`, which certifies every
//! accepted step.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{self, PI};

const K: f64 = 2.0 / (3.0 * 1.7320508075688772);

/// Residual accepted by the first-integral certificate.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-6;

const MAX_HALVINGS: u32 = 20;

/// `(1+ξ)² m² / 16π`.
pub fn threshold(m: f64, xi: f64) -> f64 {
    (1.0 + xi) * (1.0 + xi) * m * m / (16.0 * PI)
}

/// Right-hand side of the comparison equation.
pub fn rate(m: f64, y: f64) -> f64 {
    let u = 4.0 * math::sqrt(PI) * math::sqrt(y) / m - 1.0;
    if u <= 0.0 {
        return 0.0;
    }
    K * m * u * math::sqrt(u)
}

/// The first integral `G(Y)`.
pub fn first_integral(m: f64, y: f64) -> f64 {
    let a = 4.0 * math::sqrt(PI);
    let sy = math::sqrt(y);
    let u = a * sy / m - 1.0;
    m * (a * sy - 2.0 * m) / (4.0 * PI * math::sqrt(u))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub m: f64,
    pub h0: f64,
    pub heights: Vec<f64>,
    pub values: Vec<f64>,
    /// Largest relative certificate residual over accepted steps.
    pub max_residual: f64,
    /// Smallest step size used.
    pub min_step: f64,
}

impl Trajectory {
    /// Relative certificate residual at the last point.
    pub fn final_residual(&self) -> f64 {
        let n = self.heights.len() - 1;
        certificate_residual(self.m, self.values[0], self.values[n], self.heights[n] - self.h0)
    }

    /// Linear interpolation of `Y` on `[h0, 0]`.
    pub fn value_at(&self, h: f64) -> Option<f64> {
        let last = *self.heights.last()?;
        if h < self.h0 || h > last {
            return None;
        }
        let pos = self.heights.partition_point(|x| *x < h);
        if pos == 0 {
            return Some(self.values[0]);
        }
        let (h1, h2) = (self.heights[pos - 1], self.heights[pos]);
        let (y1, y2) = (self.values[pos - 1], self.values[pos]);
        let t = if h2 > h1 { (h - h1) / (h2 - h1) } else { 1.0 };
        Some(y1 + t * (y2 - y1))
    }
}

fn certificate_residual(m: f64, y0: f64, y: f64, dh: f64) -> f64 {
    let lhs = first_integral(m, y) - first_integral(m, y0);
    let rhs = K * m * dh;
    if dh == 0.0 {
        return (lhs).abs();
    }
    (lhs - rhs).abs() / rhs.abs()
}

fn rk4_step(m: f64, y: f64, step: f64) -> f64 {
    let k1 = rate(m, y);
    let k2 = rate(m, y + 0.5 * step * k1);
    let k3 = rate(m, y + 0.5 * step * k2);
    let k4 = rate(m, y + step * k3);
    y + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Integrates from `h0` to 0 with fourth-order Runge-Kutta. A step whose
/// certificate residual exceeds [`CERTIFICATE_TOLERANCE`] is retried at
/// half size, at most twenty times.
pub fn solve_comparison_ode(m: f64, h0: f64, xi: f64, step: f64) -> Result<Trajectory> {
    if !(m > 0.0) {
        return Err(Error::Parameter { name: "m", value: m, expected: "> 0" });
    }
    if !(step > 0.0) {
        return Err(Error::Parameter { name: "ode_step", value: step, expected: "> 0" });
    }
    if !(h0 <= 0.0) {
        return Err(Error::Parameter { name: "h0", value: h0, expected: "<= 0" });
    }
    let y0 = threshold(m, xi);
    let mut heights = alloc::vec![h0];
    let mut values = alloc::vec![y0];
    let mut h = h0;
    let mut y = y0;
    let mut max_residual: f64 = 0.0;
    let mut min_step = step;
    while h < 0.0 {
        let mut dh = step.min(-h);
        let mut halvings = 0;
        loop {
            let next_h = if dh >= -h { 0.0 } else { h + dh };
            let next_y = rk4_step(m, y, next_h - h);
            let residual = certificate_residual(m, y0, next_y, next_h - h0);
            if residual < CERTIFICATE_TOLERANCE {
                h = next_h;
                y = next_y;
                max_residual = max_residual.max(residual);
                min_step = min_step.min(dh);
                break;
            }
            halvings += 1;
            if halvings > MAX_HALVINGS {
                return Err(Error::NumericFailure { what: "comparison ODE certificate", at: h });
            }
            dh *= 0.5;
        }
        heights.push(h);
        values.push(y);
    }
    Ok(Trajectory { m, h0, heights, values, max_residual, min_step })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_value_and_monotone() {
        let t = solve_comparison_ode(0.1, -0.05, 1.0, 1e-4).unwrap();
        assert_eq!(t.values[0], threshold(0.1, 1.0));
        assert!(t.values.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*t.heights.last().unwrap(), 0.0);
        assert!(t.final_residual() < 1e-6);
    }

    #[test]
    fn first_integral_has_constant_rate() {
        // dG/dY · Y' = k m
        let (m, y) = (0.3, 0.01);
        let e = 1e-7;
        let dg = (first_integral(m, y + e) - first_integral(m, y - e)) / (2.0 * e);
        assert!((dg * rate(m, y) - K * m).abs() < 1e-6 * K * m);
    }

    #[test]
    fn threshold_arithmetic() {
        assert!((threshold(0.1, 1.0) - 0.01 / (4.0 * PI)).abs() < 1e-18);
    }

    #[test]
    fn zero_length_interval() {
        let t = solve_comparison_ode(0.1, 0.0, 1.0, 1e-4).unwrap();
        assert_eq!(t.heights, alloc::vec![0.0]);
        assert_eq!(t.value_at(0.0), Some(threshold(0.1, 1.0)));
    }
}
