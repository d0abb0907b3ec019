//! Stieltjes transform of the limiting spectrum of a heteroscedastic noise
//! covariance, evaluated on the real axis above the support.
//!
//! `m` solves `m = ∫ h(t) / (t(1 − c − c z m) − z) dt` and the companion
//! transform is `m̄ = −(1−c)/z + c m`. Above the support `m̄` also satisfies
//! the inverse relation `z = −1/m̄ + c ∫ t/(1 + t m̄) h(t) dt`, whose
//! solutions on the physical branch are `m̄ = −1/α` with `T(α) = z`,
//! `α > α*`.

use serde::{Deserialize, Serialize};

use super::density::NoiseDensity;
use super::spike::{noise_norm_limit, spike_transform};
use crate::error::{Error, Result};
use crate::quad;

const MAX_ITERATIONS: usize = 5000;
const DAMPING: f64 = 0.5;
const RESIDUAL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StieltjesState {
    pub z: f64,
    pub m: f64,
    pub m_bar: f64,
}

/// Right-hand side of the fixed-point equation for `m`.
pub fn fixed_point_map(m: f64, z: f64, c: f64, h: &NoiseDensity) -> f64 {
    let k = 1.0 - c - c * z * m;
    h.expect(|t| 1.0 / (t * k - z))
}

/// `z(m̄) = −1/m̄ + c ∫ t/(1 + t m̄) h(t) dt`
pub fn z_of_m_bar(m_bar: f64, c: f64, h: &NoiseDensity) -> f64 {
    -1.0 / m_bar + c * h.expect(|t| t / (1.0 + t * m_bar))
}

fn state(z: f64, m: f64, c: f64) -> StieltjesState {
    StieltjesState {
        z,
        m,
        m_bar: -(1.0 - c) / z + c * m,
    }
}

/// Solves for `m(z)` at a real `z` above the support.
///
/// Damped fixed-point iteration from `m = −1/z`; if it stalls or leaves the
/// physical branch, the scalar equation `T(α) = z` is solved by bracketing
/// on `(α*, z]` instead.
pub fn stieltjes_solve(z: f64, c: f64, h: &NoiseDensity) -> Result<StieltjesState> {
    let edge = noise_norm_limit(c, h)?;
    if !(z > edge.norm) {
        return Err(Error::SupportViolation(format!(
            "z = {z} is not above the limiting support edge {}",
            edge.norm
        )));
    }
    let on_branch = |s: &StieltjesState| s.m_bar > -1.0 / edge.alpha_star && s.m_bar < 0.0;

    let mut m = -1.0 / z;
    for _ in 0..MAX_ITERATIONS {
        let g = fixed_point_map(m, z, c, h);
        if !g.is_finite() {
            break;
        }
        let next = (1.0 - DAMPING) * m + DAMPING * g;
        if (next - m).abs() <= RESIDUAL_TOL * next.abs().max(1e-300) {
            let s = state(z, next, c);
            let residual = (fixed_point_map(next, z, c, h) - next).abs();
            if on_branch(&s) && residual <= 1e-10 * next.abs().max(1.0) {
                return Ok(s);
            }
            break;
        }
        m = next;
    }

    // Bracketed fallback on α: T is increasing above α*, and T(z) ≥ z.
    let f = |a: f64| spike_transform(a, c, h).map(|t| t - z).unwrap_or(f64::NAN);
    let lo = edge.alpha_star;
    let mut hi = z.max(lo * 2.0);
    while f(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::NoConvergence(format!("no α with T(α) = {z}")));
        }
    }
    let alpha = quad::brent(f, lo, hi, 1e-15 * hi)?;
    let m_bar = -1.0 / alpha;
    let m = (m_bar + (1.0 - c) / z) / c;
    let s = StieltjesState { z, m, m_bar };
    let residual = (fixed_point_map(m, z, c, h) - m).abs();
    if residual > 1e-10 * m.abs().max(1.0) {
        return Err(Error::NoConvergence(format!(
            "Stieltjes residual {residual:.3e} at z = {z}"
        )));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_c1_matches_quadratic() {
        // For c = 1 and h = δ₁: z m² + z m + 1 = 0.
        let h = NoiseDensity::point_mass(1.0).unwrap();
        let z = 5.0;
        let s = stieltjes_solve(z, 1.0, &h).unwrap();
        let exact = (-z + (z * z - 4.0 * z).sqrt()) / (2.0 * z);
        assert!((s.m - exact).abs() < 1e-12, "{} vs {exact}", s.m);
        assert_eq!(s.m, s.m_bar);
        assert!((z_of_m_bar(s.m_bar, 1.0, &h) - z).abs() < 1e-10);
    }

    #[test]
    fn inside_support_rejected() {
        let h = NoiseDensity::point_mass(1.0).unwrap();
        assert!(matches!(stieltjes_solve(3.9, 1.0, &h), Err(Error::SupportViolation(_))));
    }

    #[test]
    fn large_z_behaves_like_minus_one_over_z() {
        let h = NoiseDensity::uniform(0.5, 1.5).unwrap();
        let s = stieltjes_solve(1e6, 2.0, &h).unwrap();
        assert!((s.z * s.m + 1.0).abs() < 1e-5);
    }
}
