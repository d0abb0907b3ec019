//! Spikes over heteroscedastic noise: the map `T(α)` from a population
//! variance to its limiting sample eigenvalue, the limiting noise norm and
//! its large-`c` approximation.

use serde::{Deserialize, Serialize};

use super::density::NoiseDensity;
use crate::error::{Error, Result};
use crate::quad;

fn check(alpha: f64, c: f64, h: &NoiseDensity) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("aspect ratio must be > 0, got {c}")));
    }
    if !(alpha > h.support_max) {
        return Err(Error::SupportViolation(format!(
            "α = {alpha} must exceed the noise support edge {}",
            h.support_max
        )));
    }
    Ok(())
}

/// `T(α) = α + cα ∫ ρ/(α−ρ) h(ρ) dρ`
pub fn spike_transform(alpha: f64, c: f64, h: &NoiseDensity) -> Result<f64> {
    check(alpha, c, h)?;
    Ok(alpha + c * alpha * h.expect(|r| r / (alpha - r)))
}

/// `T'(α) = 1 − c ∫ ρ²/(α−ρ)² h(ρ) dρ`
pub fn spike_transform_derivative(alpha: f64, c: f64, h: &NoiseDensity) -> Result<f64> {
    check(alpha, c, h)?;
    Ok(1.0 - c * h.expect(|r| (r / (alpha - r)).powi(2)))
}

/// `T''(α) = 2c ∫ ρ²/(α−ρ)³ h(ρ) dρ`
pub fn spike_transform_second_derivative(alpha: f64, c: f64, h: &NoiseDensity) -> Result<f64> {
    check(alpha, c, h)?;
    Ok(2.0 * c * h.expect(|r| r * r / (alpha - r).powi(3)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseNorm {
    /// Smallest population variance that separates from the noise.
    pub alpha_star: f64,
    /// Limiting spectral norm of the noise covariance, `T(α*)`.
    pub norm: f64,
}

/// `α*` with `T'(α*) = 0`, searched on
/// `[α_c(1 + 1e−6), 10 α_c (1+√c)]`, and the norm `T(α*)`.
pub fn noise_norm_limit(c: f64, h: &NoiseDensity) -> Result<NoiseNorm> {
    let ac = h.support_max;
    let lo = ac * (1.0 + 1e-6);
    let hi = ac * (1.0 + c.sqrt()) * 10.0;
    let d = |a: f64| spike_transform_derivative(a, c, h).unwrap_or(f64::NAN);
    let (dlo, dhi) = (d(lo), d(hi));
    if !(dlo < 0.0 && dhi > 0.0) {
        return Err(Error::RootNotFound(format!(
            "dT/dα does not change sign on [{lo}, {hi}] (values {dlo:.3e}, {dhi:.3e})"
        )));
    }
    let alpha_star = quad::brent(d, lo, hi, 1e-15 * hi)?;
    Ok(NoiseNorm {
        alpha_star,
        norm: spike_transform(alpha_star, c, h)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseNormApprox {
    pub alpha_star: f64,
    pub norm: f64,
    pub diagnostic: Option<String>,
}

/// Large-`c` approximations with `r = μ₂²/μ₁²`:
/// `α* ≈ μ₁(√c√(1+r) + 1 + 4r/(1+2r))` and `‖C‖ ≈ μ₁(c + 2√c√(1+r))`.
pub fn large_ratio_noise_norm(c: f64, h: &NoiseDensity) -> Result<NoiseNormApprox> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("aspect ratio must be > 0, got {c}")));
    }
    let mu1 = h.mu1;
    let r = h.mu2_sq / (mu1 * mu1);
    let sc = c.sqrt();
    let diagnostic = (c < 10.0).then(|| {
        format!("c = {c} is small for a large-c expansion; expect O(1) absolute error in the norm")
    });
    Ok(NoiseNormApprox {
        alpha_star: mu1 * (sc * (1.0 + r).sqrt() + 1.0 + 4.0 * r / (1.0 + 2.0 * r)),
        norm: mu1 * (c + 2.0 * sc * (1.0 + r).sqrt()),
        diagnostic,
    })
}
