//! Dense symmetric eigensolver: Householder tridiagonalization followed by
//! implicit-shift QL, plus an eigenvalues-only path and a top-k path that
//! recovers selected eigenvectors by inverse iteration on the tridiagonal
//! form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, fix_sign_largest_positive, Matrix};

/// Relative asymmetry accepted by the dense solvers.
pub const SYMMETRY_TOL: f64 = 1e-10;

const QL_MAX_SWEEPS: usize = 200;

/// Eigen-decomposition of a symmetric matrix.
///
/// `values` are in descending order; column `i` of `vectors` is the unit
/// eigenvector for `values[i]`, signed so its largest-magnitude entry is
/// positive.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl SymEigen {
    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i)
    }
}

/// Householder reduction `A = Q T Qᵀ` with `Q = H_0 H_1 ⋯`.
pub(crate) struct Tridiagonal {
    pub diag: Vec<f64>,
    /// `off[i] = T[i, i+1]`; the last entry is zero.
    pub off: Vec<f64>,
    reflectors: Vec<(f64, Vec<f64>)>,
}

pub(crate) fn check_symmetric(m: &Matrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let tol = SYMMETRY_TOL * m.max_abs().max(1.0);
    let asym = m.asymmetry();
    if !(asym <= tol) {
        return Err(Error::NotSymmetric {
            asymmetry: asym,
            tolerance: tol,
        });
    }
    Ok(())
}

impl Tridiagonal {
    pub fn new(m: &Matrix) -> Self {
        let p = m.rows();
        let mut a = m.clone();
        // Work on the exact symmetric part.
        for i in 0..p {
            for j in (i + 1)..p {
                let v = 0.5 * (a[(i, j)] + a[(j, i)]);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        let mut diag = vec![0.0; p];
        let mut off = vec![0.0; p];
        let mut reflectors = Vec::with_capacity(p.saturating_sub(2));
        let mut w = vec![0.0; p];
        for k in 0..p.saturating_sub(2) {
            diag[k] = a[(k, k)];
            let m_len = p - k - 1;
            let mut v: Vec<f64> = (k + 1..p).map(|i| a[(i, k)]).collect();
            let tail_sq: f64 = v[1..].iter().map(|x| x * x).sum();
            if tail_sq == 0.0 {
                off[k] = v[0];
                reflectors.push((0.0, v));
                continue;
            }
            let norm = (v[0] * v[0] + tail_sq).sqrt();
            let alpha = if v[0] > 0.0 { -norm } else { norm };
            v[0] -= alpha;
            let vtv = v[0] * v[0] + tail_sq;
            let tau = 2.0 / vtv;
            off[k] = alpha;

            // w = tau * B v on the trailing block B = a[k+1.., k+1..].
            let wk = &mut w[..m_len];
            for (i, wi) in wk.iter_mut().enumerate() {
                let row = &a.row(k + 1 + i)[k + 1..];
                *wi = tau * dot(row, &v);
            }
            let kk = 0.5 * tau * dot(wk, &v);
            for (wi, vi) in wk.iter_mut().zip(&v) {
                *wi -= kk * vi;
            }
            // B -= v qᵀ + q vᵀ
            for i in 0..m_len {
                let (vi, qi) = (v[i], wk[i]);
                let row = &mut a.row_mut(k + 1 + i)[k + 1..];
                for ((r, vj), qj) in row.iter_mut().zip(&v).zip(wk.iter()) {
                    *r -= vi * qj + qi * vj;
                }
            }
            reflectors.push((tau, v));
        }
        if p >= 2 {
            diag[p - 2] = a[(p - 2, p - 2)];
            off[p - 2] = a[(p - 1, p - 2)];
        }
        if p >= 1 {
            diag[p - 1] = a[(p - 1, p - 1)];
            off[p - 1] = 0.0;
        }
        Self {
            diag,
            off,
            reflectors,
        }
    }

    /// Maps an eigenvector of `T` to one of `A` (`x ← Q x`).
    pub fn back_transform(&self, x: &mut [f64]) {
        for (k, (tau, v)) in self.reflectors.iter().enumerate().rev() {
            if *tau == 0.0 {
                continue;
            }
            let seg = &mut x[k + 1..];
            let s = tau * dot(v, seg);
            for (xi, vi) in seg.iter_mut().zip(v) {
                *xi -= s * vi;
            }
        }
    }

    /// `Qᵀ` in row-major form (row `i` is column `i` of `Q`).
    fn q_transposed(&self) -> Matrix {
        let p = self.diag.len();
        let mut q = Matrix::identity(p);
        let mut s = vec![0.0; p];
        for (k, (tau, v)) in self.reflectors.iter().enumerate().rev() {
            if *tau == 0.0 {
                continue;
            }
            let c0 = k + 1;
            let sk = &mut s[c0..];
            sk.iter_mut().for_each(|x| *x = 0.0);
            for (i, vi) in v.iter().enumerate() {
                let row = &q.row(c0 + i)[c0..];
                for (sj, rj) in sk.iter_mut().zip(row) {
                    *sj += vi * rj;
                }
            }
            for (i, vi) in v.iter().enumerate() {
                let f = tau * vi;
                let row = &mut q.row_mut(c0 + i)[c0..];
                for (rj, sj) in row.iter_mut().zip(sk.iter()) {
                    *rj -= f * sj;
                }
            }
        }
        q.transpose()
    }
}

/// Implicit-shift QL on `(d, e)` with `e[i] = T[i, i+1]`. When `zt` is given
/// its rows are rotated alongside (rows hold eigenvector estimates).
pub(crate) fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut zt: Option<&mut Matrix>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0_f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > QL_MAX_SWEEPS {
                    return Err(Error::NoConvergence(format!(
                        "QL iteration stalled at index {l}"
                    )));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = zt.as_deref_mut() {
                        let cols = z.cols();
                        let (lo, hi) = z.as_mut_slice().split_at_mut((i + 1) * cols);
                        let zi = &mut lo[i * cols..];
                        let zi1 = &mut hi[..cols];
                        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                            let hb = *b;
                            *b = s * *a + c * hb;
                            *a = c * *a - s * hb;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    // Stable: equal eigenvalues keep their original (lowest index first) order.
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    idx
}

/// Full symmetric eigen-decomposition.
pub fn sym_eig(m: &Matrix) -> Result<SymEigen> {
    check_symmetric(m)?;
    let p = m.rows();
    let tri = Tridiagonal::new(m);
    let mut zt = tri.q_transposed();
    let mut d = tri.diag.clone();
    let mut e = tri.off.clone();
    tridiagonal_ql(&mut d, &mut e, Some(&mut zt))?;
    let order = descending_order(&d);
    let mut vectors = Matrix::zeros(p, p);
    let mut values = Vec::with_capacity(p);
    for (col, &src) in order.iter().enumerate() {
        values.push(d[src]);
        let mut v = zt.row(src).to_vec();
        fix_sign_largest_positive(&mut v);
        for (i, vi) in v.into_iter().enumerate() {
            vectors[(i, col)] = vi;
        }
    }
    Ok(SymEigen { values, vectors })
}

/// Eigenvalues only, descending.
pub fn sym_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    check_symmetric(m)?;
    let tri = Tridiagonal::new(m);
    let mut d = tri.diag;
    let mut e = tri.off;
    tridiagonal_ql(&mut d, &mut e, None)?;
    d.sort_by(|a, b| b.total_cmp(a));
    Ok(d)
}

/// LU factorization of `T - shift·I` with partial pivoting (the `gttrf`
/// layout): `upper` holds the diagonal and two superdiagonals.
struct ShiftedTridiagLu {
    dd: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    dl: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedTridiagLu {
    fn new(d: &[f64], e: &[f64], shift: f64, tiny: f64) -> Self {
        let n = d.len();
        let mut dd: Vec<f64> = d.iter().map(|x| x - shift).collect();
        let mut du: Vec<f64> = e[..n.saturating_sub(1)].to_vec();
        let mut dl = du.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if dd[i].abs() >= dl[i].abs() {
                if dd[i].abs() < tiny {
                    dd[i] = tiny.copysign(dd[i]);
                }
                let fact = dl[i] / dd[i];
                dl[i] = fact;
                dd[i + 1] -= fact * du[i];
            } else {
                let fact = dd[i] / dl[i];
                dd[i] = dl[i];
                let temp = dd[i + 1];
                dd[i + 1] = du[i] - fact * temp;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                du[i] = temp;
                dl[i] = fact;
                swapped[i] = true;
            }
        }
        if let Some(last) = dd.last_mut() {
            if last.abs() < tiny {
                *last = tiny.copysign(*last);
            }
        }
        Self {
            dd,
            du,
            du2,
            dl,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let t = b[i];
                b[i] = b[i + 1];
                b[i + 1] = t - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                s -= self.du2[i] * b[i + 2];
            }
            b[i] = s / self.dd[i];
        }
    }
}

/// The `k` largest eigenpairs (descending). Eigenvalues come from QL on the
/// tridiagonal form; eigenvectors from inverse iteration, re-orthogonalized
/// within clusters, then mapped back through the Householder reflectors.
pub fn top_eigenpairs(m: &Matrix, k: usize) -> Result<SymEigen> {
    check_symmetric(m)?;
    let p = m.rows();
    let k = k.min(p);
    let tri = Tridiagonal::new(m);
    let mut d = tri.diag.clone();
    let mut e = tri.off.clone();
    tridiagonal_ql(&mut d, &mut e, None)?;
    d.sort_by(|a, b| b.total_cmp(a));

    let tnorm = tri
        .diag
        .iter()
        .zip(&tri.off)
        .map(|(a, b)| a.abs() + 2.0 * b.abs())
        .fold(0.0_f64, f64::max);
    if tnorm == 0.0 {
        d.truncate(k);
        return Ok(SymEigen {
            values: d,
            vectors: Matrix::from_fn(p, k, |i, j| if i == j { 1.0 } else { 0.0 }),
        });
    }
    let tiny = f64::EPSILON * tnorm;
    let cluster_tol = 1e-3 * tnorm;

    let mut found: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut vectors = Matrix::zeros(p, k);
    for j in 0..k {
        let lambda = d[j];
        // Nudge the shift off the eigenvalue so the factorization stays finite.
        let shift = lambda + 4.0 * tiny * if j % 2 == 0 { 1.0 } else { -1.0 };
        let lu = ShiftedTridiagLu::new(&tri.diag, &tri.off, shift, tiny);
        let mut x: Vec<f64> = (0..p)
            .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * (0.618_033_988_749_894_9 + j as f64)).sin())
            .collect();
        let cluster: Vec<usize> = (0..j)
            .filter(|&i| (d[i] - lambda).abs() <= cluster_tol)
            .collect();
        for _ in 0..4 {
            lu.solve(&mut x);
            for &i in &cluster {
                let proj = dot(&found[i], &x);
                for (xv, fv) in x.iter_mut().zip(&found[i]) {
                    *xv -= proj * fv;
                }
            }
            let nrm = dot(&x, &x).sqrt();
            if !(nrm > 0.0 && nrm.is_finite()) {
                return Err(Error::NoConvergence(format!(
                    "inverse iteration broke down for eigenvalue {lambda}"
                )));
            }
            x.iter_mut().for_each(|v| *v /= nrm);
        }
        found.push(x.clone());
        tri.back_transform(&mut x);
        fix_sign_largest_positive(&mut x);
        for (i, xi) in x.into_iter().enumerate() {
            vectors[(i, j)] = xi;
        }
    }
    d.truncate(k);
    Ok(SymEigen { values: d, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_input_keeps_coordinates() {
        let m = Matrix::diag(&[3.0, 1.0]);
        let eig = sym_eig(&m).unwrap();
        assert_eq!(eig.values, vec![3.0, 1.0]);
        assert_eq!(eig.vector(0), vec![1.0, 0.0]);
    }

    #[test]
    fn asymmetric_input_rejected() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(sym_eig(&m), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn one_by_one() {
        let m = Matrix::diag(&[-2.5]);
        let eig = sym_eig(&m).unwrap();
        assert_eq!(eig.values, vec![-2.5]);
        assert_eq!(eig.vector(0), vec![1.0]);
        assert_eq!(top_eigenpairs(&m, 3).unwrap().values, vec![-2.5]);
    }

    #[test]
    fn zero_matrix_gives_coordinate_vectors() {
        let eig = top_eigenpairs(&Matrix::zeros(3, 3), 2).unwrap();
        assert_eq!(eig.values, vec![0.0, 0.0]);
        assert_eq!(eig.vector(0), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn shifted_lu_solves_tridiagonal_system() {
        let d = [2.0, 3.0, 1.0, 4.0];
        let e = [1.0, -0.5, 2.0, 0.0];
        let lu = ShiftedTridiagLu::new(&d, &e, 0.3, 1e-300);
        let x = [0.2, -1.0, 0.7, 1.5];
        let mut b: Vec<f64> = (0..4)
            .map(|i| {
                let mut s = (d[i] - 0.3) * x[i];
                if i > 0 {
                    s += e[i - 1] * x[i - 1];
                }
                if i < 3 {
                    s += e[i] * x[i + 1];
                }
                s
            })
            .collect();
        lu.solve(&mut b);
        for (bi, xi) in b.iter().zip(x) {
            assert!((bi - xi).abs() < 1e-14);
        }
    }
}
