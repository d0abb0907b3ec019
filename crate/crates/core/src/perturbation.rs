//! Small-noise expansions of the top eigenpair and the moments they imply.
//!
//! For a fixed realization, `λ_PCA(σ) = λ₀ + σλ₁ + σ²λ₂ + O(σ³)` with
//! `λ₀ = κ²`, `λ₁ = 2κρ₁`, `λ₂ = Σ_{j≥2} ρ_j² + β₁₁`, and the eigenvector is
//! `e₁ + σv₁ + σ²v₂ + O(σ³)` up to normalization, with
//! `v₁ = (0, ρ₂, …, ρ_p)/κ` and
//! `v₂ = [(0, β₁₂, …, β₁ₚ) − 2ρ₁(0, ρ₂, …, ρ_p)]/κ²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::normalize;
use crate::model::{CovarianceDecomposition, SpikedModel};
use crate::special::ln_gamma;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaylorEigenpair {
    /// Coefficients of `σ⁰, σ¹, σ²`.
    pub lambda_terms: [f64; 3],
    /// `v₀ = e₁`, `v₁`, `v₂`.
    pub vector_terms: [Vec<f64>; 3],
    /// Noise level above which `|λ₂|σ²` exceeds half of `λ₀`.
    pub sigma_limit: f64,
    pub radius_note: String,
}

impl TaylorEigenpair {
    /// `λ₀ + σλ₁ + σ²λ₂`
    pub fn eigenvalue(&self, sigma: f64) -> f64 {
        let [l0, l1, l2] = self.lambda_terms;
        l0 + sigma * (l1 + sigma * l2)
    }

    /// Normalized `v₀ + σv₁ (+ σ²v₂ when second_order)`.
    pub fn eigenvector(&self, sigma: f64, second_order: bool) -> Vec<f64> {
        let s2 = if second_order { sigma * sigma } else { 0.0 };
        let mut v: Vec<f64> = (0..self.vector_terms[0].len())
            .map(|j| self.vector_terms[0][j] + sigma * self.vector_terms[1][j] + s2 * self.vector_terms[2][j])
            .collect();
        normalize(&mut v);
        v
    }

    /// A warning when `σ` is likely outside the convergence region.
    pub fn diagnose(&self, sigma: f64) -> Option<String> {
        (sigma > self.sigma_limit).then(|| {
            format!(
                "sigma = {sigma} exceeds {:.6}: the second-order term is more than half the leading term, \
                 the expansion is likely past a crossover",
                self.sigma_limit
            )
        })
    }
}

pub fn taylor_expand(decomp: &CovarianceDecomposition) -> Result<TaylorEigenpair> {
    let kappa = decomp.kappa;
    if !(kappa > 0.0) {
        return Err(Error::DegenerateSignal(
            "expansion needs kappa > 0 (the unperturbed top eigenvalue is not simple)".into(),
        ));
    }
    let rho = &decomp.rho;
    let p = rho.len();
    let tail_sq: f64 = rho[1..].iter().map(|r| r * r).sum();
    let beta = &decomp.beta;
    let lambda_terms = [kappa * kappa, 2.0 * kappa * rho[0], tail_sq + beta[(0, 0)]];

    let mut v0 = vec![0.0; p];
    v0[0] = 1.0;
    let mut v1 = vec![0.0; p];
    let mut v2 = vec![0.0; p];
    for j in 1..p {
        v1[j] = rho[j] / kappa;
        v2[j] = (beta[(0, j)] - 2.0 * rho[0] * rho[j]) / (kappa * kappa);
    }
    let sigma_limit = if lambda_terms[2] == 0.0 {
        f64::INFINITY
    } else {
        kappa / (2.0 * lambda_terms[2].abs()).sqrt()
    };
    let radius_note = format!(
        "valid while the top eigenvalue stays simple; |λ₂|σ² exceeds κ²/2 beyond σ = {sigma_limit:.6}"
    );
    Ok(TaylorEigenpair {
        lambda_terms,
        vector_terms: [v0, v1, v2],
        sigma_limit,
        radius_note,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaMoments {
    pub mean: f64,
    /// `‖v‖⁴E{u⁴}/n + 4σ²‖v‖²/n`
    pub variance_raw_fourth: f64,
    /// `‖v‖⁴(E{u⁴} − 1)/n + 4σ²‖v‖²/n`, the variance of `‖v‖²s_u²` plus the
    /// interaction term.
    pub variance: f64,
}

/// Small-σ mean and variance of `λ_PCA` over the latents and the noise.
pub fn lambda_moments(model: &SpikedModel, n: usize) -> Result<LambdaMoments> {
    model.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let v2 = model.signal_norm * model.signal_norm;
    let s2 = model.noise_level * model.noise_level;
    let nf = n as f64;
    let p = model.dimension as f64;
    let m4 = model.latent_law.fourth_moment();
    let m2 = model.latent_law.second_moment();
    let interaction = 4.0 * s2 * v2 * m2 / nf;
    Ok(LambdaMoments {
        mean: v2 + s2 * (1.0 + (p - 1.0) / nf),
        variance_raw_fourth: v2 * v2 * m4 / nf + interaction,
        variance: v2 * v2 * (m4 - m2 * m2) / nf + interaction,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinThetaMoments {
    /// `σ/(κ√n) · √2 Γ(p/2)/Γ((p−1)/2)`
    pub mean: f64,
    /// `σ²/(2κ²n)`, accurate up to a relative `O(1/p)`.
    pub variance: f64,
    pub caveat: String,
}

/// Small-σ mean and variance of `sin θ_PCA` given `κ`.
pub fn sintheta_moments(kappa: f64, n: usize, p: usize, sigma: f64) -> Result<SinThetaMoments> {
    if p < 2 || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "need p >= 2 and n >= 1 (p = {p}, n = {n})"
        )));
    }
    if !(kappa > 0.0) {
        return Err(Error::DegenerateSignal("kappa must be > 0".into()));
    }
    let pf = p as f64;
    let chi_mean = 2f64.sqrt() * (ln_gamma(pf / 2.0) - ln_gamma((pf - 1.0) / 2.0)).exp();
    let scale = sigma / (kappa * (n as f64).sqrt());
    Ok(SinThetaMoments {
        mean: scale * chi_mean,
        variance: sigma * sigma / (2.0 * kappa * kappa * n as f64),
        caveat: "variance is the large-p limit; relative error O(1/p)".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::model::LatentLaw;

    #[test]
    fn pure_signal_has_trivial_expansion() {
        let d = CovarianceDecomposition::from_latents(2.0, &[1.0, -1.0], &Matrix::zeros(2, 3)).unwrap();
        let t = taylor_expand(&d).unwrap();
        assert_eq!(t.lambda_terms, [4.0, 0.0, 0.0]);
        assert_eq!(t.vector_terms[0], vec![1.0, 0.0, 0.0]);
        assert!(t.vector_terms[1].iter().chain(&t.vector_terms[2]).all(|&v| v == 0.0));
        assert!(t.diagnose(100.0).is_none());
    }

    #[test]
    fn zero_noise_gaussian_moments() {
        let m = SpikedModel::new(1.5, 0.0, 10, LatentLaw::Gaussian).unwrap();
        let r = lambda_moments(&m, 40).unwrap();
        assert_eq!(r.mean, 2.25);
        assert!((r.variance - 2.0 * 1.5f64.powi(4) / 40.0).abs() < 1e-15);
        let m = SpikedModel::new(1.5, 0.0, 10, LatentLaw::Rademacher).unwrap();
        assert_eq!(lambda_moments(&m, 40).unwrap().variance, 0.0);
    }

    #[test]
    fn cor1_reference_mean() {
        let m = SpikedModel::new(1.0, 0.1, 20, LatentLaw::Gaussian).unwrap();
        assert!((lambda_moments(&m, 50).unwrap().mean - 1.0138).abs() < 1e-14);
    }

    #[test]
    fn two_dimensional_sintheta_is_half_normal() {
        let r = sintheta_moments(2.0, 25, 2, 0.3).unwrap();
        let expected = 0.3 / (2.0 * 5.0) * (2.0 / std::f64::consts::PI).sqrt();
        assert!((r.mean - expected).abs() < 1e-14);
    }
}
