//! Joint-limit predictions (`p, n → ∞`, `p/n → c`).

mod density;
mod mp;
mod spike;
mod stieltjes;

use serde::{Deserialize, Serialize};

pub use density::{NoiseDensity, NoiseKind};
pub use mp::{mp_atom, mp_density, mp_edges, mp_integrate, mp_lambda_functional, mp_lambda_functional_c1};
pub use spike::{
    large_ratio_noise_norm, noise_norm_limit, spike_transform, spike_transform_derivative,
    spike_transform_second_derivative, NoiseNorm, NoiseNormApprox,
};
pub use stieltjes::{fixed_point_map, stieltjes_solve, z_of_m_bar, StieltjesState};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPrediction {
    pub c: f64,
    pub lambda_limit: f64,
    /// `R²`, zero below the threshold.
    pub overlap_sq: f64,
    pub above_threshold: bool,
    /// `σ⁴/‖v‖⁴`; the spike separates when `1/c` reaches it.
    pub threshold_ratio: f64,
}

/// Limiting top eigenvalue and squared overlap of single-spike PCA.
///
/// Above the threshold `n/p ≥ σ⁴/‖v‖⁴`, with `u = σ²/‖v‖²`:
/// `λ = (‖v‖² + σ²)(1 + c u)` and `R² = (1 − c u²)/(1 + c u)`.
/// Below it, `λ = σ²(1+√c)²` and `R² = 0`.
pub fn phase_prediction(signal_norm: f64, sigma: f64, c: f64) -> Result<AsymptoticPrediction> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("aspect ratio must be > 0, got {c}")));
    }
    if !(signal_norm >= 0.0 && sigma >= 0.0) {
        return Err(Error::InvalidParameter("signal norm and sigma must be >= 0".into()));
    }
    let v2 = signal_norm * signal_norm;
    let s2 = sigma * sigma;
    let threshold_ratio = (s2 * s2) / (v2 * v2);
    let above = v2 > 0.0 && 1.0 / c >= threshold_ratio;
    let (lambda_limit, overlap_sq) = if above {
        let u = s2 / v2;
        ((v2 + s2) * (1.0 + c * u), ((1.0 - c * u * u) / (1.0 + c * u)).max(0.0))
    } else {
        (s2 * (1.0 + c.sqrt()).powi(2), 0.0)
    };
    Ok(AsymptoticPrediction {
        c,
        lambda_limit,
        overlap_sq,
        above_threshold: above,
        threshold_ratio,
    })
}

/// Aspect ratio `p/n = κ⁴/(4σ⁴)` at which the signal eigenvalue meets the
/// crude noise-norm estimate.
pub fn heuristic_threshold(kappa: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter("sigma must be > 0".into()));
    }
    Ok((kappa / sigma).powi(4) / 4.0)
}

/// Large-`n` mean of the `k`-th sample eigenvalue (0-based `k`):
/// `α_k + (α_k/n) Σ_{i≠k} α_i/(α_k − α_i)`.
pub fn lawley_shift(alphas: &[f64], n: usize, k: usize) -> Result<f64> {
    if k >= alphas.len() {
        return Err(Error::InvalidParameter(format!(
            "index {k} out of range for {} eigenvalues",
            alphas.len()
        )));
    }
    if n == 0 || alphas.iter().any(|a| !(*a > 0.0)) {
        return Err(Error::InvalidParameter("need n >= 1 and positive eigenvalues".into()));
    }
    let ak = alphas[k];
    let mut sum = 0.0;
    for (i, &ai) in alphas.iter().enumerate() {
        if i == k {
            continue;
        }
        if ai == ak {
            return Err(Error::DegenerateSpectrum(format!(
                "α_{i} equals α_{k} = {ak}"
            )));
        }
        sum += ai / (ak - ai);
    }
    Ok(ak + ak / n as f64 * sum)
}

/// `R² = 1/(1 + c ∫ αμ/(λ−μ)² f_MP(μ) dμ)` with `α = ‖v‖²/σ² + 1` and
/// `λ = α + cα/(α−1)`, in units of `σ²`.
pub fn overlap_functional(signal_norm: f64, sigma: f64, c: f64) -> Result<f64> {
    if !(sigma > 0.0 && c > 0.0) {
        return Err(Error::InvalidParameter("sigma and c must be > 0".into()));
    }
    let snr = (signal_norm / sigma).powi(2);
    let gap = snr * snr - c;
    if gap < 0.0 {
        return Err(Error::BulkViolation(format!(
            "‖v‖⁴/σ⁴ = {} is below c = {c}; no separated eigenvalue",
            snr * snr
        )));
    }
    if gap == 0.0 {
        return Ok(0.0);
    }
    let alpha = snr + 1.0;
    let lam = alpha + c * alpha / snr;
    let integral = mp_integrate(c, |mu| alpha * mu / (lam - mu).powi(2))?;
    Ok(1.0 / (1.0 + c * integral))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_phase_point() {
        let p = phase_prediction(2f64.sqrt(), 1.0, 1.0).unwrap();
        assert!(p.above_threshold);
        assert!((p.lambda_limit - 4.5).abs() < 1e-14);
        assert!((p.overlap_sq - 0.5).abs() < 1e-14);
    }

    #[test]
    fn at_and_below_threshold() {
        let at = phase_prediction(1.0, 1.0, 1.0).unwrap();
        assert!(at.above_threshold);
        assert_eq!(at.overlap_sq, 0.0);
        let below = phase_prediction(0.5f64.sqrt(), 1.0, 1.0).unwrap();
        assert!(!below.above_threshold);
        assert_eq!(below.lambda_limit, 4.0);
        assert_eq!(below.overlap_sq, 0.0);
    }

    #[test]
    fn lawley_reference() {
        let v = lawley_shift(&[3.0, 1.0, 1.0, 1.0, 1.0], 2000, 0).unwrap();
        assert!((v - 3.003).abs() < 1e-14);
        assert!(matches!(lawley_shift(&[2.0, 2.0], 10, 0), Err(Error::DegenerateSpectrum(_))));
    }

    #[test]
    fn heuristic_homogeneity() {
        assert_eq!(heuristic_threshold(1.0, 1.0).unwrap(), 0.25);
        let a = heuristic_threshold(2.8, 1.85).unwrap();
        let b = heuristic_threshold(2.8, 3.7).unwrap();
        assert!((a / b - 16.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_quadrature_matches_closed_form() {
        for (v, s, c) in [(2f64.sqrt(), 1.0, 1.0), (2.0, 1.0, 0.5), (3.0, 1.5, 2.0)] {
            let q = overlap_functional(v, s, c).unwrap();
            let closed = phase_prediction(v, s, c).unwrap().overlap_sq;
            assert!((q - closed).abs() < 1e-9, "{q} vs {closed}");
        }
        assert_eq!(overlap_functional(1.0, 1.0, 1.0).unwrap(), 0.0);
    }
}
