//! Single-spike covariance model `x = u‖v‖e₁ + σξ`, sampling with stored
//! latents, and the split of the sample covariance into signal,
//! interaction and noise parts.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::{self, gaussian};

/// Law of the latent factor `u`: zero mean, unit variance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatentLaw {
    #[default]
    Gaussian,
    Rademacher,
    /// Uniform on `[−√3, √3]`.
    Uniform,
}

impl LatentLaw {
    pub const ALL: [LatentLaw; 3] = [LatentLaw::Gaussian, LatentLaw::Rademacher, LatentLaw::Uniform];

    pub fn second_moment(self) -> f64 {
        1.0
    }

    pub fn fourth_moment(self) -> f64 {
        match self {
            LatentLaw::Gaussian => 3.0,
            LatentLaw::Rademacher => 1.0,
            LatentLaw::Uniform => 1.8,
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            LatentLaw::Gaussian => gaussian(rng),
            LatentLaw::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            LatentLaw::Uniform => 3f64.sqrt() * (2.0 * rng.random::<f64>() - 1.0),
        }
    }
}

impl fmt::Display for LatentLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LatentLaw::Gaussian => "gaussian",
            LatentLaw::Rademacher => "rademacher",
            LatentLaw::Uniform => "uniform",
        })
    }
}

impl FromStr for LatentLaw {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(LatentLaw::Gaussian),
            "rademacher" | "sign" => Ok(LatentLaw::Rademacher),
            "uniform" => Ok(LatentLaw::Uniform),
            other => Err(Error::InvalidParameter(format!("unknown latent law '{other}'"))),
        }
    }
}

/// Population parameters. The signal direction is always `e₁`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpikedModel {
    /// `‖v‖`
    pub signal_norm: f64,
    /// `σ`
    pub noise_level: f64,
    /// `p`
    pub dimension: usize,
    #[serde(default)]
    pub latent_law: LatentLaw,
}

impl SpikedModel {
    pub fn new(signal_norm: f64, noise_level: f64, dimension: usize, latent_law: LatentLaw) -> Result<Self> {
        let m = Self {
            signal_norm,
            noise_level,
            dimension,
            latent_law,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.signal_norm >= 0.0 && self.signal_norm.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "signal norm must be finite and >= 0, got {}",
                self.signal_norm
            )));
        }
        if !(self.noise_level >= 0.0 && self.noise_level.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise level must be finite and >= 0, got {}",
                self.noise_level
            )));
        }
        if self.dimension == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        Ok(())
    }

    pub fn with_noise(mut self, sigma: f64) -> Self {
        self.noise_level = sigma;
        self
    }

    /// Population covariance `‖v‖²e₁e₁ᵀ + σ²I`.
    pub fn population_covariance(&self) -> Matrix {
        let mut m = Matrix::identity(self.dimension);
        m.scale(self.noise_level * self.noise_level);
        m[(0, 0)] += self.signal_norm * self.signal_norm;
        m
    }
}

/// `n` samples with their latent factors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRealization {
    pub n: usize,
    /// Rows are samples.
    pub samples: Matrix,
    pub latents_u: Vec<f64>,
    /// `n × p`, rows are `ξ^ν`.
    pub latents_xi: Matrix,
    pub seed: u64,
}

impl SampleRealization {
    pub fn dimension(&self) -> usize {
        self.samples.cols()
    }
}

/// Draws row `row` of a realization: `u` first, then `ξ₁ … ξ_p`.
pub(crate) fn draw_row(law: LatentLaw, p: usize, seed: u64, row: usize, xi: &mut [f64]) -> f64 {
    let mut r = rng::stream(seed, &[row as u64]);
    let u = law.sample(&mut r);
    debug_assert_eq!(xi.len(), p);
    for x in xi.iter_mut() {
        *x = gaussian(&mut r);
    }
    u
}

/// Samples `n` observations. Each row has its own stream keyed by
/// `(seed, row)`, so the first `m` rows do not depend on `n`.
pub fn sample_model(model: &SpikedModel, n: usize, seed: u64) -> Result<SampleRealization> {
    model.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let p = model.dimension;
    let mut xi = Matrix::zeros(n, p);
    let mut u = Vec::with_capacity(n);
    for nu in 0..n {
        u.push(draw_row(model.latent_law, p, seed, nu, xi.row_mut(nu)));
    }
    let samples = assemble(model, &u, &xi);
    Ok(SampleRealization {
        n,
        samples,
        latents_u: u,
        latents_xi: xi,
        seed,
    })
}

/// Rows `u^ν‖v‖e₁ + σξ^ν`.
pub fn assemble(model: &SpikedModel, u: &[f64], xi: &Matrix) -> Matrix {
    let mut x = xi.clone();
    x.scale(model.noise_level);
    for (nu, &un) in u.iter().enumerate() {
        x[(nu, 0)] += un * model.signal_norm;
    }
    x
}

/// `S_n = (1/n) Σ x^ν (x^ν)ᵀ`, without mean centering.
pub fn sample_covariance(real: &SampleRealization) -> Matrix {
    real.samples.gram_columns(real.n as f64)
}

/// Covariance after subtracting the sample mean (divisor still `n`).
///
/// The finite-sample and asymptotic results in this crate assume
/// uncentered data; centered output is provided for comparison only.
pub fn centered_covariance(real: &SampleRealization) -> Matrix {
    let n = real.n as f64;
    let p = real.dimension();
    let mut mean = vec![0.0; p];
    for nu in 0..real.n {
        crate::linalg::axpy(1.0 / n, real.samples.row(nu), &mut mean);
    }
    let centered = Matrix::from_fn(real.n, p, |i, j| real.samples[(i, j)] - mean[j]);
    centered.gram_columns(n)
}

/// Signal, interaction and noise parts of `S_n = L₀ + σL₁ + σ²L₂`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceDecomposition {
    /// `√(Σ(u^ν)²/n)`
    pub s_u: f64,
    /// `‖v‖ s_u`
    pub kappa: f64,
    /// `ρ_j = Σ u^ν ξ^ν_j / (n s_u)`; `rho[0]` is `ρ₁`.
    pub rho: Vec<f64>,
    /// `β = ΞᵀΞ/n`
    pub beta: Matrix,
    pub l0: Matrix,
    pub l1: Matrix,
    pub l2: Matrix,
}

impl CovarianceDecomposition {
    pub fn dimension(&self) -> usize {
        self.rho.len()
    }

    /// `L₀ + σL₁ + σ²L₂`
    pub fn reconstruct(&self, sigma: f64) -> Matrix {
        let mut s = self.l0.clone();
        s.add_scaled(sigma, &self.l1);
        s.add_scaled(sigma * sigma, &self.l2);
        s
    }

    /// `L₀ + σL₁`
    pub fn signal_plus_interaction(&self, sigma: f64) -> Matrix {
        let mut s = self.l0.clone();
        s.add_scaled(sigma, &self.l1);
        s
    }

    /// Builds the decomposition from latents directly.
    pub fn from_latents(signal_norm: f64, u: &[f64], xi: &Matrix) -> Result<Self> {
        let n = u.len();
        if n == 0 || xi.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} latents u against {} noise rows",
                n,
                xi.rows()
            )));
        }
        if !(signal_norm > 0.0) {
            return Err(Error::DegenerateSignal("signal norm must be > 0".into()));
        }
        let nf = n as f64;
        let s_u = (u.iter().map(|x| x * x).sum::<f64>() / nf).sqrt();
        if s_u == 0.0 {
            return Err(Error::DegenerateSignal("all latents u are zero".into()));
        }
        let kappa = signal_norm * s_u;
        let mut rho = xi.tr_matvec(u);
        rho.iter_mut().for_each(|r| *r /= nf * s_u);
        let beta = xi.gram_columns(nf);
        let p = rho.len();
        let mut l0 = Matrix::zeros(p, p);
        l0[(0, 0)] = kappa * kappa;
        let mut l1 = Matrix::zeros(p, p);
        l1[(0, 0)] = 2.0 * kappa * rho[0];
        for j in 1..p {
            l1[(0, j)] = kappa * rho[j];
            l1[(j, 0)] = kappa * rho[j];
        }
        Ok(Self {
            s_u,
            kappa,
            rho,
            l2: beta.clone(),
            beta,
            l0,
            l1,
        })
    }
}

pub fn decompose_covariance(real: &SampleRealization, model: &SpikedModel) -> Result<CovarianceDecomposition> {
    CovarianceDecomposition::from_latents(model.signal_norm, &real.latents_u, &real.latents_xi)
}

#[derive(Serialize)]
struct Sidecar<'a> {
    seed: u64,
    n: usize,
    model: &'a SpikedModel,
    latents_u: &'a [f64],
    latents_xi: Vec<&'a [f64]>,
}

/// Writes the samples as CSV (one row per sample, columns `x1..xp`).
pub fn write_samples_csv(real: &SampleRealization, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let p = real.dimension();
    w.write_record((1..=p).map(|j| format!("x{j}")))?;
    for nu in 0..real.n {
        w.write_record(real.samples.row(nu).iter().map(|v| format!("{v:.17e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the JSON sidecar: seed, model parameters and both latent arrays.
pub fn write_sidecar_json(real: &SampleRealization, model: &SpikedModel, path: &Path) -> Result<()> {
    let sidecar = Sidecar {
        seed: real.seed,
        n: real.n,
        model,
        latents_u: &real.latents_u,
        latents_xi: (0..real.n).map(|nu| real.latents_xi.row(nu)).collect(),
    };
    let f = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer_pretty(f, &sidecar)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_noise_rows_are_pure_signal() {
        let m = SpikedModel::new(1.0, 0.0, 4, LatentLaw::Gaussian).unwrap();
        let r = sample_model(&m, 6, 11).unwrap();
        for nu in 0..6 {
            assert_eq!(r.samples[(nu, 0)], r.latents_u[nu]);
            assert!(r.samples.row(nu)[1..].iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn alternating_signs_give_unit_su() {
        let u = vec![1.0, -1.0, 1.0, -1.0];
        let xi = Matrix::zeros(4, 3);
        let d = CovarianceDecomposition::from_latents(2.5, &u, &xi).unwrap();
        assert_eq!(d.s_u, 1.0);
        assert_eq!(d.kappa, 2.5);
        assert!(d.rho.iter().all(|&r| r == 0.0));
        assert_eq!(d.l1.max_abs(), 0.0);
        assert_eq!(d.l2.max_abs(), 0.0);
    }

    #[test]
    fn zero_latents_are_degenerate() {
        let xi = Matrix::zeros(3, 2);
        assert!(matches!(
            CovarianceDecomposition::from_latents(1.0, &[0.0; 3], &xi),
            Err(Error::DegenerateSignal(_))
        ));
    }

    #[test]
    fn rows_are_prefix_stable() {
        let m = SpikedModel::new(1.0, 1.0, 5, LatentLaw::Uniform).unwrap();
        let a = sample_model(&m, 3, 4).unwrap();
        let b = sample_model(&m, 7, 4).unwrap();
        for nu in 0..3 {
            assert_eq!(a.samples.row(nu), b.samples.row(nu));
        }
    }

    #[test]
    fn latent_laws_parse() {
        for law in LatentLaw::ALL {
            assert_eq!(law.to_string().parse::<LatentLaw>().unwrap(), law);
        }
        assert!("cauchy".parse::<LatentLaw>().is_err());
    }
}
