//! Finite-sample bounds for the top eigenpair of a single-spike sample
//! covariance, their probability budgets, and the Wishart norm bounds they
//! rely on.
//!
//! With `a = 2σs₁/(κ√n)`, `r = σ²/κ²`, `q = (p−1)/n` and `t = s₂/√(p−1)`,
//! on an event of probability at least `1 − ε − ε₁ − ε₂ − ε₃`:
//!
//! ```text
//! λ_PCA ≥ κ²[1 − a + r q (1−t)/(1+a) − r² q² (1+t)²/(1−a)³]
//! λ_PCA ≤ κ²(1 + a + r s₃) + σκ √q √(1 + a + r s₃) (1+t)
//! sin θ ≤ √r √q (1+a)(1+t) + 4√2 r (p/n) / (1 − a − r)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special;

/// Tail probability used for each of `ε₁, ε₂, ε₃` by default.
pub const DEFAULT_TAIL: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailKind {
    /// `Pr{|N(0,1)| > t}`
    AbsNormal,
    /// `Pr{χ²_d > t}`
    ChisqUpper,
    /// `Pr{|χ²_d/d − 1| > t/√d}`
    ChisqTwoSidedScaled,
}

pub fn tail_probability(kind: TailKind, dof: Option<u64>, threshold: f64) -> Result<f64> {
    if !(threshold >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold must be >= 0, got {threshold}"
        )));
    }
    let need_dof = || dof.ok_or_else(|| Error::InvalidDof("chi-square tails need a dof".into()));
    match kind {
        TailKind::AbsNormal => Ok(special::abs_normal_tail(threshold)),
        TailKind::ChisqUpper => special::chisq_upper(need_dof()?, threshold),
        TailKind::ChisqTwoSidedScaled => special::chisq_two_sided_scaled(need_dof()?, threshold),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundConfig {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub p: usize,
    pub n: usize,
    pub sigma: f64,
    pub kappa: f64,
}

/// Deviation parameters giving `ε₁ = ε₂ = ε₃ = tail`.
pub fn default_deviations(p: usize, tail: f64) -> Result<(f64, f64, f64)> {
    if p < 2 {
        return Err(Error::InvalidDof("bounds need p >= 2".into()));
    }
    let s1 = special::invert_tail(special::abs_normal_tail, tail)?;
    let dof = (p - 1) as u64;
    let s2 = special::invert_tail(
        |t| special::chisq_two_sided_scaled(dof, t).unwrap_or(0.0),
        tail,
    )?;
    // χ²₁ = N², so the χ²₁ quantile is s₁².
    Ok((s1, s2, s1 * s1))
}

impl BoundConfig {
    pub fn new(s: (f64, f64, f64), p: usize, n: usize, sigma: f64, kappa: f64) -> Result<Self> {
        let cfg = Self {
            s1: s.0,
            s2: s.1,
            s3: s.2,
            p,
            n,
            sigma,
            kappa,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Configuration with the default 1% deviation parameters.
    pub fn with_defaults(p: usize, n: usize, sigma: f64, kappa: f64) -> Result<Self> {
        Self::new(default_deviations(p, DEFAULT_TAIL)?, p, n, sigma, kappa)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s1 > 0.0 && self.s2 > 0.0 && self.s3 > 0.0) {
            return Err(Error::InvalidParameter(
                "deviation parameters s1, s2, s3 must be > 0".into(),
            ));
        }
        if self.p < 2 || self.n < 1 {
            return Err(Error::InvalidParameter(format!(
                "need p >= 2 and n >= 1 (p = {}, n = {})",
                self.p, self.n
            )));
        }
        if !(self.sigma >= 0.0) || !(self.kappa >= 0.0) {
            return Err(Error::InvalidParameter("sigma and kappa must be >= 0".into()));
        }
        Ok(())
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    /// `2σs₁/(κ√n)`
    fn a(&self) -> f64 {
        2.0 * self.sigma * self.s1 / (self.kappa * (self.n as f64).sqrt())
    }

    /// `σ²/κ²`
    fn r(&self) -> f64 {
        (self.sigma / self.kappa).powi(2)
    }

    /// `(p−1)/n`
    fn q(&self) -> f64 {
        (self.p - 1) as f64 / self.n as f64
    }

    /// `s₂/√(p−1)`
    fn t(&self) -> f64 {
        self.s2 / ((self.p - 1) as f64).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonBudget {
    pub eps: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
}

impl EpsilonBudget {
    pub fn total(&self) -> f64 {
        self.eps + self.eps1 + self.eps2 + self.eps3
    }
}

/// `exp(−p / (2(√5+2)²))`
pub fn wishart_eps(p: usize) -> f64 {
    let k = 5f64.sqrt() + 2.0;
    (-(p as f64) / (2.0 * k * k)).exp()
}

pub fn epsilon_budget(cfg: &BoundConfig) -> Result<EpsilonBudget> {
    if cfg.p < 2 {
        return Err(Error::InvalidDof("epsilon budget needs p >= 2".into()));
    }
    Ok(EpsilonBudget {
        eps: wishart_eps(cfg.p),
        eps1: tail_probability(TailKind::AbsNormal, None, cfg.s1)?,
        eps2: tail_probability(TailKind::ChisqTwoSidedScaled, Some((cfg.p - 1) as u64), cfg.s2)?,
        eps3: tail_probability(TailKind::ChisqUpper, Some(1), cfg.s3)?,
    })
}

/// `κ² − 2σs₁κ/√n > σ²[(1+√((p−1)/n))² + (p−1)/n]`
pub fn signal_condition(cfg: &BoundConfig) -> bool {
    let lhs = cfg.kappa * cfg.kappa - 2.0 * cfg.sigma * cfg.s1 * cfg.kappa / (cfg.n as f64).sqrt();
    let q = cfg.q();
    let rhs = cfg.sigma * cfg.sigma * ((1.0 + q.sqrt()).powi(2) + q);
    cfg.kappa > 0.0 && lhs > rhs
}

fn check_lambda_pre(cfg: &BoundConfig) -> Result<()> {
    if !signal_condition(cfg) {
        return Err(Error::ConditionViolated(
            "signal condition κ² − 2σs₁κ/√n > σ²[(1+√((p−1)/n))² + (p−1)/n] fails".into(),
        ));
    }
    if !(1.0 - cfg.a() > 0.0) {
        return Err(Error::ConditionViolated("1 − 2σs₁/(κ√n) must be > 0".into()));
    }
    Ok(())
}

fn lower_bracket(cfg: &BoundConfig) -> f64 {
    let (a, r, q, t) = (cfg.a(), cfg.r(), cfg.q(), cfg.t());
    r * q * (1.0 - t) / (1.0 + a) - r * r * q * q * (1.0 + t).powi(2) / (1.0 - a).powi(3)
}

/// `(lower, upper)` bounds on `λ_PCA`.
pub fn lambda_bounds(cfg: &BoundConfig) -> Result<(f64, f64)> {
    check_lambda_pre(cfg)?;
    let k2 = cfg.kappa * cfg.kappa;
    if cfg.sigma == 0.0 {
        return Ok((k2, k2));
    }
    let a = cfg.a();
    let lower = k2 * (1.0 - a + lower_bracket(cfg));
    let inner = 1.0 + a + cfg.r() * cfg.s3;
    let upper = k2 * inner + cfg.sigma * cfg.kappa * cfg.q().sqrt() * inner.sqrt() * (1.0 + cfg.t());
    Ok((lower, upper))
}

/// Lower bound with the factor `(1 − 2σs₁/(κ√n))` pulled out of the bracket,
/// `κ²(1−a)[1 + r q (1−t)/(1+a) − r² q² (1+t)²/(1−a)³]`.
pub fn lambda_lower_factored(cfg: &BoundConfig) -> Result<f64> {
    check_lambda_pre(cfg)?;
    Ok(cfg.kappa * cfg.kappa * (1.0 - cfg.a()) * (1.0 + lower_bracket(cfg)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundVariants {
    pub bracketed: f64,
    pub factored: f64,
    /// `bracketed − factored`
    pub difference: f64,
}

/// Both groupings of the lower bound side by side.
pub fn compare_lower_bounds(cfg: &BoundConfig) -> Result<LowerBoundVariants> {
    let bracketed = lambda_bounds(cfg)?.0;
    let factored = lambda_lower_factored(cfg)?;
    Ok(LowerBoundVariants {
        bracketed,
        factored,
        difference: bracketed - factored,
    })
}

/// Upper bound on `sin θ_PCA`.
pub fn sintheta_bound(cfg: &BoundConfig) -> Result<f64> {
    if !(cfg.kappa > 0.0) {
        return Err(Error::ConditionViolated("sin θ bound needs κ > 0".into()));
    }
    let (a, r) = (cfg.a(), cfg.r());
    let denom = 1.0 - a - r;
    if !(denom > 0.0) {
        return Err(Error::ConditionViolated(format!(
            "1 − 2σs₁/(κ√n) − σ²/κ² = {denom:.6} is not positive"
        )));
    }
    let first = r.sqrt() * cfg.q().sqrt() * (1.0 + a) * (1.0 + cfg.t());
    let second = 4.0 * std::f64::consts::SQRT_2 * r * (cfg.p as f64 / cfg.n as f64) / denom;
    Ok(first + second)
}

/// `δ ≥ κ² − 2s₁σκ/√n − σ²`, the gap between `λ_PCA` and the rest of the
/// spectrum of `L₀ + σL₁ + σ²I`.
pub fn eigengap_lower(cfg: &BoundConfig) -> f64 {
    cfg.kappa * cfg.kappa - 2.0 * cfg.s1 * cfg.sigma * cfg.kappa / (cfg.n as f64).sqrt() - cfg.sigma * cfg.sigma
}

/// Every bound at one configuration. Bounds whose preconditions fail are
/// `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub config: BoundConfig,
    pub eps: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub budget: f64,
    pub condition_holds: bool,
    pub lambda_lower: Option<f64>,
    pub lambda_upper: Option<f64>,
    pub lambda_lower_factored: Option<f64>,
    pub sintheta_upper: Option<f64>,
    pub eigengap_lower: f64,
    pub diagnostics: Vec<String>,
}

pub fn bound_report(cfg: &BoundConfig) -> Result<BoundReport> {
    cfg.validate()?;
    let e = epsilon_budget(cfg)?;
    let mut diagnostics = Vec::new();
    let (lambda_lower, lambda_upper, factored) = match lambda_bounds(cfg) {
        Ok((lo, hi)) => (Some(lo), Some(hi), lambda_lower_factored(cfg).ok()),
        Err(err) => {
            diagnostics.push(err.to_string());
            (None, None, None)
        }
    };
    let sintheta_upper = match sintheta_bound(cfg) {
        Ok(v) => Some(v),
        Err(err) => {
            diagnostics.push(err.to_string());
            None
        }
    };
    Ok(BoundReport {
        config: *cfg,
        eps: e.eps,
        eps1: e.eps1,
        eps2: e.eps2,
        eps3: e.eps3,
        budget: e.total(),
        condition_holds: signal_condition(cfg),
        lambda_lower,
        lambda_upper,
        lambda_lower_factored: factored,
        sintheta_upper,
        eigengap_lower: eigengap_lower(cfg),
        diagnostics,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WishartBound {
    /// Bound on `‖W‖`: `(1+√(p/n))² + p/n`.
    pub norm_bound: f64,
    /// Bound on `‖W − I‖`: `4p/n`.
    pub centered_bound: f64,
    pub eps: f64,
}

fn check_regime(p: usize, n: usize) -> Result<()> {
    if n == 0 || p == 0 {
        return Err(Error::InvalidParameter("p and n must be >= 1".into()));
    }
    if n > p {
        return Err(Error::RegimeViolation(format!(
            "Wishart bounds need n <= p (n = {n}, p = {p})"
        )));
    }
    Ok(())
}

/// Norm bounds for `W = XᵀX/n`, `X` an `n × p` standard Gaussian matrix.
pub fn wishart_norm_bound(p: usize, n: usize) -> Result<WishartBound> {
    check_regime(p, n)?;
    let c = p as f64 / n as f64;
    Ok(WishartBound {
        norm_bound: (1.0 + c.sqrt()).powi(2) + c,
        centered_bound: 4.0 * c,
        eps: wishart_eps(p),
    })
}

/// `exp[−(p/2)(√(α + (1+√(n/p))²) − (1+√(n/p)))²]`, a bound on
/// `Pr{‖W‖ > (1+√(p/n))² + αp/n}`.
pub fn wishart_tail(p: usize, n: usize, alpha: f64) -> Result<f64> {
    check_regime(p, n)?;
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
    }
    let x = 1.0 + (n as f64 / p as f64).sqrt();
    // √(α + x²) − x without cancellation.
    let gap = alpha / ((alpha + x * x).sqrt() + x);
    Ok((-(p as f64) / 2.0 * gap * gap).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(sigma: f64) -> BoundConfig {
        BoundConfig::new((2.0, 2.0, 4.0), 200, 50, sigma, 2.8).unwrap()
    }

    #[test]
    fn zero_noise_collapses_bounds() {
        let c = cfg(0.0);
        assert_eq!(lambda_bounds(&c).unwrap(), (2.8 * 2.8, 2.8 * 2.8));
        assert_eq!(sintheta_bound(&c).unwrap(), 0.0);
        assert!(signal_condition(&c));
        assert!(!signal_condition(&c.with_kappa(0.0)));
    }

    #[test]
    fn wishart_square_case() {
        let w = wishart_norm_bound(50, 50).unwrap();
        assert!((w.norm_bound - 5.0).abs() < 1e-15);
        assert!((w.centered_bound - 4.0).abs() < 1e-15);
        let w = wishart_norm_bound(200, 50).unwrap();
        assert!((w.norm_bound - 13.0).abs() < 1e-15);
        assert!((w.centered_bound - 16.0).abs() < 1e-15);
        assert!(matches!(wishart_norm_bound(10, 11), Err(Error::RegimeViolation(_))));
    }

    #[test]
    fn wishart_tail_square_case_is_eps() {
        for p in [10, 200, 1000] {
            let s = wishart_tail(p, p, 1.0).unwrap();
            assert!((s / wishart_eps(p) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn default_deviations_hit_one_percent() {
        let (s1, s2, s3) = default_deviations(200, 0.01).unwrap();
        assert!((s1 - 2.575_829_303_548_9).abs() < 1e-9);
        assert!((special::chisq_two_sided_scaled(199, s2).unwrap() - 0.01).abs() < 1e-12);
        assert!((special::chisq_upper(1, s3).unwrap() - 0.01).abs() < 1e-10);
    }

    #[test]
    fn sintheta_precondition() {
        let c = BoundConfig::new((2.0, 2.0, 4.0), 200, 50, 3.0, 2.8).unwrap();
        assert!(matches!(sintheta_bound(&c), Err(Error::ConditionViolated(_))));
        let r = bound_report(&c).unwrap();
        assert!(r.sintheta_upper.is_none());
        assert!(!r.diagnostics.is_empty());
    }
}
