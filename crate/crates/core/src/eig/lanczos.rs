//! Lanczos iteration with full reorthogonalization for the largest
//! eigenpairs of a symmetric operator given only through products.

use super::symmetric::{tridiagonal_ql, SymEigen};
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, fix_sign_largest_positive, normalize, Matrix};

#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    /// Largest Krylov dimension before giving up.
    pub max_dim: usize,
    /// Residual tolerance relative to the largest Ritz value.
    pub tol: f64,
    /// Ritz values are checked every `check_every` steps.
    pub check_every: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_dim: 600,
            tol: 1e-11,
            check_every: 10,
        }
    }
}

fn start_vector(dim: usize) -> Vec<f64> {
    // Fixed, dense, non-structured start (golden-ratio sequence).
    let g = 0.618_033_988_749_894_9;
    let mut v: Vec<f64> = (0..dim)
        .map(|i| ((i as f64 + 1.0) * g).fract() - 0.5 + 1e-3)
        .collect();
    normalize(&mut v);
    v
}

/// Ritz pairs of the current tridiagonal, descending.
fn ritz(alpha: &[f64], beta: &[f64]) -> Result<(Vec<f64>, Matrix)> {
    let m = alpha.len();
    let mut d = alpha.to_vec();
    let mut e = vec![0.0; m];
    e[..m - 1].copy_from_slice(&beta[..m - 1]);
    let mut zt = Matrix::identity(m);
    tridiagonal_ql(&mut d, &mut e, Some(&mut zt))?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vecs = Matrix::from_fn(m, m, |r, c| zt[(order[c], r)]);
    Ok((values, vecs))
}

/// The `k` largest eigenpairs of the `dim`-dimensional symmetric operator
/// `apply(x, y)`, which must write `A x` into `y`.
pub fn lanczos_top<F>(dim: usize, k: usize, mut apply: F, opts: LanczosOptions) -> Result<SymEigen>
where
    F: FnMut(&[f64], &mut [f64]),
{
    if k == 0 || k > dim {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k <= dim (k = {k}, dim = {dim})"
        )));
    }
    let max_dim = opts.max_dim.min(dim).max(k);
    let mut basis: Vec<Vec<f64>> = vec![start_vector(dim)];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];

    loop {
        let j = basis.len() - 1;
        apply(&basis[j], &mut w);
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        // Full reorthogonalization, twice.
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                axpy(-c, q, &mut w);
            }
        }
        let b = normalize(&mut w);
        beta.push(b);

        let m = alpha.len();
        let exhausted = m >= max_dim || b <= f64::EPSILON * alpha.iter().fold(0.0_f64, |s, x| s.max(x.abs()));
        if m >= k && (m.is_multiple_of(opts.check_every) || exhausted) {
            let (values, s) = ritz(&alpha, &beta)?;
            let scale = values[0].abs().max(f64::MIN_POSITIVE);
            let converged = (0..k).all(|i| (b * s[(m - 1, i)]).abs() <= opts.tol * scale);
            if converged || exhausted {
                if !converged && m < dim {
                    return Err(Error::NoConvergence(format!(
                        "lanczos: {k} pairs not converged within {m} steps"
                    )));
                }
                let mut vectors = Matrix::zeros(dim, k);
                for i in 0..k {
                    let mut y = vec![0.0; dim];
                    for (r, q) in basis.iter().enumerate() {
                        axpy(s[(r, i)], q, &mut y);
                    }
                    normalize(&mut y);
                    fix_sign_largest_positive(&mut y);
                    for (row, v) in y.into_iter().enumerate() {
                        vectors[(row, i)] = v;
                    }
                }
                return Ok(SymEigen {
                    values: values[..k].to_vec(),
                    vectors,
                });
            }
        }
        basis.push(std::mem::replace(&mut w, vec![0.0; dim]));
    }
}
