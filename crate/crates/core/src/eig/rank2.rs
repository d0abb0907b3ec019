use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::CovarianceDecomposition;

/// Nonzero eigenpairs of `L₀ + σL₁`, which has rank at most two.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rank2Pair {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub v_plus: Vec<f64>,
    /// Normalization of `(1, σκρ₂/λ₊, …, σκρ_p/λ₊)`; at least 1.
    pub z: f64,
}

/// Closed-form eigenpairs of the signal plus interaction matrix.
///
/// With `a = κ² + 2σκρ₁` and `q = σ²κ² Σ_{j≥2} ρ_j²` the eigenvalues are
/// `(a ± √(a² + 4q))/2`; the smaller-magnitude root is taken from the product
/// `λ₊λ₋ = −q` to avoid cancellation.
pub fn rank2_pair(decomp: &CovarianceDecomposition, sigma: f64) -> Result<Rank2Pair> {
    let kappa = decomp.kappa;
    if !(kappa > 0.0) {
        return Err(Error::DegenerateSignal("rank-2 pair needs kappa > 0".into()));
    }
    let rho = &decomp.rho;
    let p = rho.len();
    let sk = sigma * kappa;
    let a = kappa * kappa + 2.0 * sk * rho[0];
    let tail_sq: f64 = rho[1..].iter().map(|r| r * r).sum();
    let q = sk * sk * tail_sq;
    let disc = a.hypot(2.0 * q.sqrt());
    let (lambda_plus, lambda_minus) = if a >= 0.0 {
        let lp = 0.5 * (a + disc);
        (lp, if lp > 0.0 { -q / lp } else { 0.0 })
    } else {
        let lm = 0.5 * (a - disc);
        (-q / lm, lm)
    };

    let mut v_plus = vec![0.0; p];
    let z;
    if lambda_plus > 0.0 {
        let scale = sk / lambda_plus;
        v_plus[0] = 1.0;
        for j in 1..p {
            v_plus[j] = scale * rho[j];
        }
        z = (1.0 + scale * scale * tail_sq).sqrt();
        v_plus.iter_mut().for_each(|v| *v /= z);
    } else {
        // λ₊ = 0 only when the interaction vanishes and a ≤ 0.
        z = 1.0;
        v_plus[if a < 0.0 && p > 1 { 1 } else { 0 }] = 1.0;
    }
    Ok(Rank2Pair {
        lambda_plus,
        lambda_minus,
        v_plus,
        z,
    })
}
