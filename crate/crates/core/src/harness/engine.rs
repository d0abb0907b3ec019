//! Top eigenpairs of `XᵀX/n` for a data matrix `X` (rows are samples),
//! choosing between the primal `p × p` Gram matrix, the dual `n × n` one,
//! and matrix-free Lanczos for large problems.

use crate::eig::{lanczos_top, top_eigenpairs, LanczosOptions};
use crate::error::Result;
use crate::linalg::{axpy, dot, normalize, Matrix};

/// Above this size (in the smaller dimension) Lanczos replaces the dense
/// solver.
pub const DENSE_LIMIT: usize = 1000;

/// Eigenpairs in sample space: `values` descending, `vectors[i]` a unit
/// `p`-vector (all zeros when `values[i]` is zero).
#[derive(Clone, Debug)]
pub struct TopK {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl TopK {
    pub fn overlap(&self, i: usize) -> f64 {
        self.vectors[i][0].abs().min(1.0)
    }

    pub fn sin_theta(&self, i: usize) -> f64 {
        self.vectors[i][1..].iter().map(|x| x * x).sum::<f64>().sqrt().min(1.0)
    }
}

/// Lifts dual eigenvectors `w` to `Xᵀw/‖Xᵀw‖` with a caller-supplied
/// `Xᵀ` product.
pub fn lift_dual<F: Fn(&[f64]) -> Vec<f64>>(values: Vec<f64>, dual: Vec<Vec<f64>>, xt: F) -> TopK {
    let vectors = dual
        .iter()
        .map(|w| {
            let mut v = xt(w);
            if normalize(&mut v) == 0.0 {
                v.iter_mut().for_each(|x| *x = 0.0);
            }
            v
        })
        .collect();
    TopK { values, vectors }
}

fn columns(eig: &crate::eig::SymEigen, k: usize) -> Vec<Vec<f64>> {
    (0..k).map(|i| eig.vector(i)).collect()
}

/// Top-`k` eigenpairs of a symmetric Gram matrix (dense path).
pub fn dense_top(g: &Matrix, k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let k = k.min(g.rows());
    let eig = top_eigenpairs(g, k)?;
    Ok((eig.values[..k].to_vec(), columns(&eig, k)))
}

/// Top-`k` eigenpairs of `XᵀX/n`.
pub fn sample_top_k(x: &Matrix, k: usize) -> Result<TopK> {
    let (n, p) = (x.rows(), x.cols());
    let nf = n as f64;
    let k = k.min(n.min(p));
    if n.min(p) > DENSE_LIMIT {
        return lanczos_path(x, k);
    }
    if p <= n {
        let (values, vectors) = dense_top(&x.gram_columns(nf), k)?;
        Ok(TopK { values, vectors })
    } else {
        let (values, dual) = dense_top(&x.gram_rows(nf), k)?;
        Ok(lift_dual(values, dual, |w| x.tr_matvec(w)))
    }
}

/// Largest eigenvalue of `XᵀX/n` only.
pub fn sample_top_value(x: &Matrix) -> Result<f64> {
    Ok(sample_top_k(x, 1)?.values[0])
}

fn lanczos_path(x: &Matrix, k: usize) -> Result<TopK> {
    let (n, p) = (x.rows(), x.cols());
    let nf = n as f64;
    let opts = LanczosOptions {
        max_dim: 800,
        tol: 1e-9,
        check_every: 10,
    };
    if p <= n {
        let mut tmp = vec![0.0; n];
        let eig = lanczos_top(
            p,
            k,
            |v, out| {
                for (i, t) in tmp.iter_mut().enumerate() {
                    *t = dot(x.row(i), v);
                }
                out.iter_mut().for_each(|o| *o = 0.0);
                for (i, &t) in tmp.iter().enumerate() {
                    axpy(t / nf, x.row(i), out);
                }
            },
            opts,
        )?;
        Ok(TopK {
            values: eig.values.clone(),
            vectors: columns(&eig, k),
        })
    } else {
        let mut tmp = vec![0.0; p];
        let eig = lanczos_top(
            n,
            k,
            |w, out| {
                tmp.iter_mut().for_each(|t| *t = 0.0);
                for (i, &wi) in w.iter().enumerate() {
                    axpy(wi, x.row(i), &mut tmp);
                }
                for (i, o) in out.iter_mut().enumerate() {
                    *o = dot(x.row(i), &tmp) / nf;
                }
            },
            opts,
        )?;
        Ok(lift_dual(eig.values.clone(), columns(&eig, k), |w| x.tr_matvec(w)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eig::sym_eig;

    #[test]
    fn primal_and_dual_agree() {
        let x = Matrix::from_fn(7, 12, |i, j| ((i * 31 + j * 17) as f64 * 0.37).sin());
        let dual = sample_top_k(&x, 2).unwrap();
        let dense = sym_eig(&x.gram_columns(7.0)).unwrap();
        for i in 0..2 {
            assert!((dual.values[i] - dense.values[i]).abs() < 1e-12);
            assert!((dot(&dual.vectors[i], &dense.vector(i)).abs() - 1.0).abs() < 1e-10);
        }
    }
}
