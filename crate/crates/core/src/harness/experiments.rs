//! Monte Carlo checks of the finite-sample bounds, the small-noise moments,
//! the Wishart norm bound, the eigenvalue bias of a fixed spectrum and the
//! heteroscedastic noise norm.

use rand_distr::{ChiSquared, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::engine::{sample_top_k, sample_top_value};
use crate::asymptotics::{lawley_shift, noise_norm_limit, phase_prediction, AsymptoticPrediction, NoiseDensity};
use crate::bounds::{
    bound_report, epsilon_budget, signal_condition, wishart_norm_bound, BoundConfig, EpsilonBudget,
    WishartBound,
};
use crate::eig::sym_eigenvalues;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{draw_row, SpikedModel};
use crate::perturbation::{lambda_moments, sintheta_moments, LambdaMoments, SinThetaMoments};
use crate::rng::{self, derive_seed, gaussian};

/// An event count with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub count: usize,
    pub trials: usize,
    pub rate: f64,
    pub std_error: f64,
}

impl Frequency {
    pub fn from_flags(flags: impl Iterator<Item = bool>) -> Self {
        let (mut count, mut trials) = (0, 0);
        for f in flags {
            trials += 1;
            count += f as usize;
        }
        let rate = count as f64 / trials.max(1) as f64;
        Self {
            count,
            trials,
            rate,
            std_error: (rate * (1.0 - rate) / trials.max(1) as f64).sqrt(),
        }
    }
}

/// Sample mean and variance with standard errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Empirical {
    pub trials: usize,
    pub mean: f64,
    pub std_error: f64,
    pub variance: f64,
    /// From the fourth central moment.
    pub variance_std_error: f64,
}

impl Empirical {
    pub fn from_values(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
        let variance = if xs.len() > 1 { m2 * n / (n - 1.0) } else { 0.0 };
        Self {
            trials: xs.len(),
            mean,
            std_error: (variance / n).sqrt(),
            variance,
            variance_std_error: ((m4 - m2 * m2).max(0.0) / n).sqrt(),
        }
    }

    /// `(mean − target)/std_error`
    pub fn z_mean(&self, target: f64) -> f64 {
        (self.mean - target) / self.std_error
    }

    pub fn z_variance(&self, target: f64) -> f64 {
        (self.variance - target) / self.variance_std_error
    }
}

fn trial_latents(model: &SpikedModel, n: usize, seed: u64) -> (Vec<f64>, Matrix) {
    let p = model.dimension;
    let mut xi = Matrix::zeros(n, p);
    let u = (0..n).map(|i| draw_row(model.latent_law, p, seed, i, xi.row_mut(i))).collect();
    (u, xi)
}

fn build(signal_norm: f64, sigma: f64, u: &[f64], xi: &Matrix) -> Matrix {
    let mut x = xi.clone();
    x.scale(sigma);
    for (i, &ui) in u.iter().enumerate() {
        x[(i, 0)] += signal_norm * ui;
    }
    x
}

fn s_u(u: &[f64]) -> f64 {
    (u.iter().map(|x| x * x).sum::<f64>() / u.len() as f64).sqrt()
}

const ROUNDING: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub config: BoundConfig,
    pub budget: EpsilonBudget,
    pub lambda_lower: Frequency,
    pub lambda_upper: Frequency,
    pub sintheta: Frequency,
    /// Any of the three bounds violated.
    pub joint: Frequency,
    /// Trials whose realized `κ` failed the signal condition. They count as
    /// joint violations.
    pub condition_failures: usize,
    pub wishart_bound: Option<WishartBound>,
    /// `‖ΞᵀΞ/n‖` above the Wishart bound.
    pub wishart: Option<Frequency>,
    /// `budget + 3√(budget/trials)`
    pub joint_threshold: f64,
    pub joint_within_budget: bool,
}

/// Violation frequencies of the eigenvalue and `sin θ` bounds, evaluated at
/// each trial's realized `κ = ‖v‖ s_u`. `cfg.kappa` must equal the model's
/// signal norm, and `cfg.sigma`, `cfg.p` must match the model.
pub fn coverage_experiment(cfg: &BoundConfig, model: &SpikedModel, trials: usize, seed: u64) -> Result<CoverageReport> {
    cfg.validate()?;
    model.validate()?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if cfg.p != model.dimension {
        return Err(Error::DimensionMismatch(format!(
            "bound config p = {} but model p = {}",
            cfg.p, model.dimension
        )));
    }
    if !signal_condition(cfg) {
        return Err(Error::ConditionViolated(format!(
            "signal condition fails at kappa = {}, sigma = {}",
            cfg.kappa, cfg.sigma
        )));
    }
    let model = (*model).with_noise(cfg.sigma);
    let wb = wishart_norm_bound(cfg.p, cfg.n).ok();
    struct Outcome {
        lower: bool,
        upper: bool,
        sin: bool,
        failed: bool,
        wishart: bool,
    }
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Outcome> {
            let (u, xi) = trial_latents(&model, cfg.n, derive_seed(seed, &[t as u64]));
            let top = sample_top_k(&build(model.signal_norm, cfg.sigma, &u, &xi), 1)?;
            let (lambda, sin) = (top.values[0], top.sin_theta(0));
            let local = cfg.with_kappa(model.signal_norm * s_u(&u));
            let wishart = match &wb {
                Some(w) => sample_top_value(&xi)? > w.norm_bound,
                None => false,
            };
            if !signal_condition(&local) {
                return Ok(Outcome { lower: false, upper: false, sin: false, failed: true, wishart });
            }
            let r = bound_report(&local)?;
            // Rounding slack: at σ = 0 the bounds are attained exactly.
            let slack = |b: f64| ROUNDING * b.abs().max(1.0);
            Ok(Outcome {
                lower: r.lambda_lower.is_none_or(|lo| lambda < lo - slack(lo)),
                upper: r.lambda_upper.is_none_or(|hi| lambda > hi + slack(hi)),
                sin: r.sintheta_upper.is_none_or(|b| sin > b + slack(b)),
                failed: false,
                wishart,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let budget = epsilon_budget(cfg)?;
    let joint = Frequency::from_flags(outcomes.iter().map(|o| o.failed || o.lower || o.upper || o.sin));
    let joint_threshold = budget.total() + 3.0 * (budget.total() / trials as f64).sqrt();
    Ok(CoverageReport {
        config: *cfg,
        lambda_lower: Frequency::from_flags(outcomes.iter().map(|o| o.lower)),
        lambda_upper: Frequency::from_flags(outcomes.iter().map(|o| o.upper)),
        sintheta: Frequency::from_flags(outcomes.iter().map(|o| o.sin)),
        condition_failures: outcomes.iter().filter(|o| o.failed).count(),
        wishart: wb.map(|_| Frequency::from_flags(outcomes.iter().map(|o| o.wishart))),
        wishart_bound: wb,
        joint_within_budget: joint.rate <= joint_threshold,
        joint,
        joint_threshold,
        budget,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WishartReport {
    pub p: usize,
    pub n: usize,
    pub bound: WishartBound,
    /// `‖W‖` above `bound.norm_bound`.
    pub exceed: Frequency,
    /// `‖W − I‖` above `bound.centered_bound`.
    pub centered_exceed: Frequency,
    pub mean_norm: f64,
    pub max_norm: f64,
    pub within_eps: bool,
}

/// Exceedance frequencies of the Wishart norm bounds for `W = ΞᵀΞ/n`.
pub fn wishart_experiment(p: usize, n: usize, trials: usize, seed: u64) -> Result<WishartReport> {
    let bound = wishart_norm_bound(p, n)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let norms = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(f64, f64)> {
            let mut r = rng::stream(seed, &[t as u64]);
            let xi = Matrix::from_fn(n, p, |_, _| gaussian(&mut r));
            let top = sample_top_value(&xi)?;
            // Rank n < p leaves a zero eigenvalue.
            let bottom = if n < p {
                0.0
            } else {
                *sym_eigenvalues(&xi.gram_columns(n as f64))?.last().unwrap_or(&0.0)
            };
            Ok((top, (top - 1.0).max(1.0 - bottom)))
        })
        .collect::<Result<Vec<_>>>()?;
    let exceed = Frequency::from_flags(norms.iter().map(|x| x.0 > bound.norm_bound));
    Ok(WishartReport {
        p,
        n,
        centered_exceed: Frequency::from_flags(norms.iter().map(|x| x.1 > bound.centered_bound)),
        mean_norm: norms.iter().map(|x| x.0).sum::<f64>() / trials as f64,
        max_norm: norms.iter().map(|x| x.0).fold(f64::NEG_INFINITY, f64::max),
        within_eps: exceed.rate <= bound.eps,
        exceed,
        bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaStudy {
    pub sigma: f64,
    pub empirical: Empirical,
    pub predicted: LambdaMoments,
    pub z_mean: f64,
    pub z_variance_raw_fourth: f64,
    pub z_variance: f64,
    /// `"centered"` (the `E{u⁴} − 1` form) or `"raw-fourth"` (the `E{u⁴}`
    /// form), whichever is closer in standard errors.
    pub closer_variance: String,
}

/// `λ_PCA` moments over fresh latents and noise at each σ.
pub fn lambda_moment_study(model: &SpikedModel, n: usize, sigma: f64, trials: usize, seed: u64) -> Result<LambdaStudy> {
    let model = (*model).with_noise(sigma);
    let predicted = lambda_moments(&model, n)?;
    let values = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let (u, xi) = trial_latents(&model, n, derive_seed(seed, &[t as u64]));
            sample_top_value(&build(model.signal_norm, sigma, &u, &xi))
        })
        .collect::<Result<Vec<_>>>()?;
    let empirical = Empirical::from_values(&values);
    let zp = empirical.z_variance(predicted.variance_raw_fourth);
    let zc = empirical.z_variance(predicted.variance);
    Ok(LambdaStudy {
        sigma,
        z_mean: empirical.z_mean(predicted.mean),
        z_variance_raw_fourth: zp,
        z_variance: zc,
        closer_variance: if zc.abs() <= zp.abs() { "centered" } else { "raw-fourth" }.into(),
        empirical,
        predicted,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinThetaStudy {
    pub sigma: f64,
    pub kappa: f64,
    pub empirical: Empirical,
    pub predicted: SinThetaMoments,
    pub z_mean: f64,
    pub z_variance: f64,
}

/// `sin θ_PCA` moments with the latents `u` fixed (drawn once and rescaled
/// to `s_u = 1`, so `κ = ‖v‖`) and fresh noise per trial.
pub fn sintheta_moment_study(model: &SpikedModel, n: usize, sigma: f64, trials: usize, seed: u64) -> Result<SinThetaStudy> {
    model.validate()?;
    let p = model.dimension;
    let kappa = model.signal_norm;
    let predicted = sintheta_moments(kappa, n, p, sigma)?;
    let mut r = rng::stream(seed, &[u64::MAX]);
    let mut u: Vec<f64> = (0..n).map(|_| model.latent_law.sample(&mut r)).collect();
    let su = s_u(&u);
    if su == 0.0 {
        return Err(Error::DegenerateSignal("all latents u are zero".into()));
    }
    u.iter_mut().for_each(|x| *x /= su);
    let values = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let mut r = rng::stream(seed, &[t as u64]);
            let xi = Matrix::from_fn(n, p, |_, _| gaussian(&mut r));
            Ok(sample_top_k(&build(kappa, sigma, &u, &xi), 1)?.sin_theta(0))
        })
        .collect::<Result<Vec<_>>>()?;
    let empirical = Empirical::from_values(&values);
    Ok(SinThetaStudy {
        sigma,
        kappa,
        z_mean: empirical.z_mean(predicted.mean),
        z_variance: empirical.z_variance(predicted.variance),
        empirical,
        predicted,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub model: SpikedModel,
    pub n: usize,
    pub lambda: Vec<LambdaStudy>,
    pub sin_theta: Vec<SinThetaStudy>,
}

/// Both moment studies at every σ in `sigmas`.
pub fn moment_experiment(model: &SpikedModel, n: usize, sigmas: &[f64], trials: usize, seed: u64) -> Result<MomentReport> {
    if trials < 2 {
        return Err(Error::InvalidParameter("moment studies need trials >= 2".into()));
    }
    let mut lambda = Vec::new();
    let mut sin_theta = Vec::new();
    for (i, &s) in sigmas.iter().enumerate() {
        let sub = derive_seed(seed, &[i as u64]);
        lambda.push(lambda_moment_study(model, n, s, trials, sub)?);
        sin_theta.push(sintheta_moment_study(model, n, s, trials, derive_seed(sub, &[1]))?);
    }
    Ok(MomentReport {
        model: *model,
        n,
        lambda,
        sin_theta,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawleyReport {
    pub alphas: Vec<f64>,
    pub n: usize,
    pub empirical: Empirical,
    pub predicted: f64,
    pub z_mean: f64,
}

/// Draws `W ~ Wishart_p(n, I)` from the Bartlett factor: `W = LLᵀ` with
/// `L_ii² ~ χ²(n − i)` and standard normal entries below the diagonal.
pub fn bartlett_wishart<R: rand::Rng + ?Sized>(p: usize, n: usize, rng: &mut R) -> Result<Matrix> {
    if n < p {
        return Err(Error::RegimeViolation(format!("Bartlett sampling needs n >= p (n = {n}, p = {p})")));
    }
    let mut l = Matrix::zeros(p, p);
    for i in 0..p {
        let chi = ChiSquared::new((n - i) as f64)
            .map_err(|e| Error::InvalidDof(e.to_string()))?;
        l[(i, i)] = chi.sample(rng).sqrt();
        for j in 0..i {
            l[(i, j)] = gaussian(rng);
        }
    }
    l.matmul(&l.transpose())
}

/// Mean of the largest sample eigenvalue for population eigenvalues
/// `alphas`, against the large-`n` bias formula.
pub fn lawley_experiment(alphas: &[f64], n: usize, trials: usize, seed: u64) -> Result<LawleyReport> {
    let k = alphas
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|x| x.0)
        .ok_or_else(|| Error::InvalidParameter("empty spectrum".into()))?;
    let predicted = lawley_shift(alphas, n, k)?;
    let p = alphas.len();
    let roots: Vec<f64> = alphas.iter().map(|a| a.sqrt()).collect();
    let values = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let mut r = rng::stream(seed, &[t as u64]);
            let w = bartlett_wishart(p, n, &mut r)?;
            let s = Matrix::from_fn(p, p, |i, j| roots[i] * roots[j] * w[(i, j)] / n as f64);
            Ok(sym_eigenvalues(&s)?[0])
        })
        .collect::<Result<Vec<_>>>()?;
    let empirical = Empirical::from_values(&values);
    Ok(LawleyReport {
        alphas: alphas.to_vec(),
        n,
        z_mean: empirical.z_mean(predicted),
        empirical,
        predicted,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseNormReport {
    pub p: usize,
    pub n: usize,
    pub empirical: Empirical,
    pub predicted: f64,
    pub relative_error: f64,
}

/// Spectral norm of `XᵀX/n` where column `j` of `X` has variance `α_j`,
/// with the `α_j` drawn from `h` for every trial.
pub fn noise_norm_experiment(h: &NoiseDensity, p: usize, n: usize, trials: usize, seed: u64) -> Result<NoiseNormReport> {
    if p == 0 || n == 0 || trials == 0 {
        return Err(Error::InvalidParameter("p, n and trials must be >= 1".into()));
    }
    let predicted = noise_norm_limit(p as f64 / n as f64, h)?.norm;
    let values = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let mut r = rng::stream(seed, &[t as u64]);
            let scale: Vec<f64> = (0..p).map(|_| h.sample(&mut r).sqrt()).collect();
            let x = Matrix::from_fn(n, p, |_, j| scale[j] * gaussian(&mut r));
            sample_top_value(&x)
        })
        .collect::<Result<Vec<_>>>()?;
    let empirical = Empirical::from_values(&values);
    Ok(NoiseNormReport {
        p,
        n,
        relative_error: (empirical.mean - predicted).abs() / predicted,
        empirical,
        predicted,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub model: SpikedModel,
    pub n: usize,
    pub lambda: Empirical,
    pub overlap_sq: Empirical,
    pub predicted: AsymptoticPrediction,
}

/// Top eigenvalue and squared overlap against their large-`p, n` limits.
pub fn phase_experiment(model: &SpikedModel, n: usize, trials: usize, seed: u64) -> Result<PhaseReport> {
    model.validate()?;
    if n == 0 || trials == 0 {
        return Err(Error::InvalidParameter("n and trials must be >= 1".into()));
    }
    let c = model.dimension as f64 / n as f64;
    let predicted = phase_prediction(model.signal_norm, model.noise_level, c)?;
    let pairs = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(f64, f64)> {
            let (u, xi) = trial_latents(model, n, derive_seed(seed, &[t as u64]));
            let top = sample_top_k(&build(model.signal_norm, model.noise_level, &u, &xi), 1)?;
            Ok((top.values[0], top.overlap(0).powi(2)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseReport {
        model: *model,
        n,
        lambda: Empirical::from_values(&pairs.iter().map(|x| x.0).collect::<Vec<_>>()),
        overlap_sq: Empirical::from_values(&pairs.iter().map(|x| x.1).collect::<Vec<_>>()),
        predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LatentLaw;

    #[test]
    fn zero_noise_never_violates() {
        let model = SpikedModel::new(2.8, 0.0, 20, LatentLaw::Gaussian).unwrap();
        let cfg = BoundConfig::with_defaults(20, 10, 0.0, 2.8).unwrap();
        let r = coverage_experiment(&cfg, &model, 50, 3).unwrap();
        assert_eq!(r.joint.count, 0);
        assert!(r.joint_within_budget);
    }

    #[test]
    fn failing_condition_is_rejected() {
        let model = SpikedModel::new(0.1, 0.0, 20, LatentLaw::Gaussian).unwrap();
        let cfg = BoundConfig::with_defaults(20, 10, 3.0, 0.1).unwrap();
        assert!(matches!(coverage_experiment(&cfg, &model, 5, 3), Err(Error::ConditionViolated(_))));
    }

    #[test]
    fn frequency_standard_error() {
        let f = Frequency::from_flags([true, false, false, false].into_iter());
        assert_eq!(f.rate, 0.25);
        assert!((f.std_error - (0.25f64 * 0.75 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bartlett_has_wishart_mean() {
        let mut r = rng::stream(1, &[]);
        let mut acc = Matrix::zeros(3, 3);
        let m = 4000;
        for _ in 0..m {
            acc.add_scaled(1.0 / m as f64, &bartlett_wishart(3, 10, &mut r).unwrap());
        }
        for i in 0..3 {
            assert!((acc[(i, i)] - 10.0).abs() < 0.4, "{acc:?}");
            for j in 0..i {
                assert!(acc[(i, j)].abs() < 0.4);
            }
        }
    }
}
