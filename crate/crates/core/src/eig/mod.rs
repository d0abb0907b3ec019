//! Eigensolvers: dense symmetric, arrowhead, the closed-form rank-2 pair and
//! a Lanczos driver for large operators.

mod arrowhead;
mod lanczos;
mod rank2;
mod symmetric;

use serde::{Deserialize, Serialize};

pub use arrowhead::{arrowhead_eig, arrowhead_reduce, ArrowheadMatrix, DEFLATION_TOL};
pub use lanczos::{lanczos_top, LanczosOptions};
pub use rank2::{rank2_pair, Rank2Pair};
pub use symmetric::{sym_eig, sym_eigenvalues, top_eigenpairs, SymEigen, SYMMETRY_TOL};

pub(crate) use symmetric::check_symmetric;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Leading eigenpair of a sample covariance, measured against `e₁`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaResult {
    pub lambda_pca: f64,
    /// Unit vector with `⟨v_pca, e₁⟩ ≥ 0`.
    pub v_pca: Vec<f64>,
    pub lambda2: f64,
    pub sin_theta: f64,
    /// `|⟨v_pca, e₁⟩|`
    pub overlap: f64,
}

impl PcaResult {
    /// Builds the result from a top eigenpair and the second eigenvalue,
    /// fixing the sign so the first coordinate is nonnegative.
    pub fn from_pair(lambda_pca: f64, mut v: Vec<f64>, lambda2: f64) -> Self {
        if v[0] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        let overlap = v[0].abs().min(1.0);
        // The tail sum avoids the cancellation in sqrt(1 - overlap²).
        let tail: f64 = v[1..].iter().map(|x| x * x).sum();
        let sin_theta = tail.sqrt().min(1.0);
        Self {
            lambda_pca,
            v_pca: v,
            lambda2,
            sin_theta,
            overlap,
        }
    }
}

/// Top eigenpair and second eigenvalue of a symmetric matrix.
///
/// Uses the top-k inverse-iteration path; exact ties fall back to the full
/// solver so that the lowest-index coordinate wins.
pub fn top_pair(m: &Matrix) -> Result<PcaResult> {
    check_symmetric(m)?;
    if m.rows() < 2 {
        return Err(Error::InvalidParameter("top_pair needs p >= 2".into()));
    }
    let eig = top_eigenpairs(m, 2)?;
    let scale = eig.values[0].abs().max(eig.values[1].abs()).max(f64::MIN_POSITIVE);
    let eig = if (eig.values[0] - eig.values[1]).abs() <= 1e-12 * scale {
        sym_eig(m)?
    } else {
        eig
    };
    Ok(PcaResult::from_pair(eig.values[0], eig.vector(0), eig.values[1]))
}
