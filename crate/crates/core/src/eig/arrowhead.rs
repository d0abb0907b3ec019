//! Symmetric arrowhead matrices: reduction of a covariance matrix to
//! arrowhead form and a secular-equation eigensolver.
//!
//! An arrowhead matrix of order `p` has a scalar `head` at `(0, 0)`, a
//! `shaft` along the rest of the first row and column, and a diagonal
//! `tail`. Its eigenvalues are the roots of
//!
//! ```text
//! f(λ) = (λ − head) − Σ_j shaft_j² / (λ − tail_j)
//! ```
//!
//! which strictly interlace the tail values when every shaft entry is
//! nonzero. Each root is located inside its pole interval by bisection and
//! refined by safeguarded Newton steps on a shifted variable measured from
//! the nearer pole, so roots hugging a pole keep full relative accuracy.
//! Eigenvectors use `(1, shaft_j / (λ − tail_j))` with the shaft recomputed
//! from the converged roots (Löwner's formula), which keeps them orthogonal.

use serde::{Deserialize, Serialize};

use super::symmetric::{sym_eig, SymEigen};
use crate::error::{Error, Result};
use crate::linalg::{fix_sign_largest_positive, Matrix};

/// Relative size below which a shaft entry is treated as zero.
pub const DEFLATION_TOL: f64 = 1e-14;

const MAX_ROOT_ITERATIONS: usize = 300;
const WARM_BISECTIONS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArrowheadMatrix {
    pub head: f64,
    pub shaft: Vec<f64>,
    pub tail: Vec<f64>,
}

impl ArrowheadMatrix {
    pub fn new(head: f64, shaft: Vec<f64>, tail: Vec<f64>) -> Result<Self> {
        let a = Self { head, shaft, tail };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        if self.shaft.len() != self.tail.len() {
            return Err(Error::DimensionMismatch(format!(
                "shaft has {} entries, tail has {}",
                self.shaft.len(),
                self.tail.len()
            )));
        }
        if self.tail.is_empty() {
            return Err(Error::InvalidParameter(
                "arrowhead matrices need order p >= 2".into(),
            ));
        }
        let finite = self.head.is_finite()
            && self.shaft.iter().all(|v| v.is_finite())
            && self.tail.iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("non-finite arrowhead entry".into()));
        }
        Ok(())
    }

    /// Order of the matrix (`1 + tail.len()`).
    pub fn dim(&self) -> usize {
        self.tail.len() + 1
    }

    pub fn to_dense(&self) -> Matrix {
        let p = self.dim();
        let mut m = Matrix::zeros(p, p);
        m[(0, 0)] = self.head;
        for (j, (&b, &t)) in self.shaft.iter().zip(&self.tail).enumerate() {
            m[(0, j + 1)] = b;
            m[(j + 1, 0)] = b;
            m[(j + 1, j + 1)] = t;
        }
        m
    }

    /// `|head| + max |tail|`, the scale used for deflation decisions.
    pub fn scale(&self) -> f64 {
        self.head.abs() + self.tail.iter().fold(0.0_f64, |m, t| m.max(t.abs()))
    }
}

/// Rotates `s` into arrowhead form.
///
/// Returns the arrowhead and the orthonormal `basis` `V` (rows are basis
/// vectors) with `V S Vᵀ` equal to the arrowhead's dense form. The tail holds
/// the eigenvalues (descending) of the minor left after deleting the first
/// row and column.
pub fn arrowhead_reduce(s: &Matrix) -> Result<(ArrowheadMatrix, Matrix)> {
    super::symmetric::check_symmetric(s)?;
    let p = s.rows();
    if p < 2 {
        return Err(Error::InvalidParameter(
            "arrowhead reduction needs p >= 2".into(),
        ));
    }
    let minor = s.trailing_minor();
    let eig = sym_eig(&minor)?;
    let b: Vec<f64> = (1..p).map(|i| 0.5 * (s[(i, 0)] + s[(0, i)])).collect();
    let mut basis = Matrix::zeros(p, p);
    basis[(0, 0)] = 1.0;
    let mut shaft = Vec::with_capacity(p - 1);
    for j in 0..p - 1 {
        let u = eig.vector(j);
        shaft.push(crate::linalg::dot(&u, &b));
        for (i, ui) in u.into_iter().enumerate() {
            basis[(j + 1, i + 1)] = ui;
        }
    }
    Ok((
        ArrowheadMatrix {
            head: s[(0, 0)],
            shaft,
            tail: eig.values,
        },
        basis,
    ))
}

/// A pole of the reduced secular equation: its location, shaft weight and
/// the (sparse) direction in the original coordinates it stands for.
struct Pole {
    at: f64,
    weight: f64,
    direction: Vec<(usize, f64)>,
}

struct Root {
    origin: usize,
    tau: f64,
}

/// Secular function measured from pole `origin`: `g(τ) = f(d_origin + τ)`.
struct Shifted<'a> {
    head_gap: f64,
    deltas: Vec<f64>,
    weights: &'a [f64],
}

impl<'a> Shifted<'a> {
    fn new(head: f64, poles: &[f64], weights: &'a [f64], origin: f64) -> Self {
        Self {
            head_gap: origin - head,
            deltas: poles.iter().map(|d| d - origin).collect(),
            weights,
        }
    }

    fn eval(&self, tau: f64) -> (f64, f64) {
        let mut sum = 0.0;
        let mut dsum = 0.0;
        for (w, delta) in self.weights.iter().zip(&self.deltas) {
            let r = 1.0 / (tau - delta);
            let t = w * r;
            sum += t;
            dsum += t * r;
        }
        (self.head_gap + tau - sum, 1.0 + dsum)
    }
}

fn solve_shifted(g: &Shifted, mut lo: f64, mut hi: f64) -> Result<f64> {
    let (lo0, hi0) = (lo, hi);
    let mut tau = 0.5 * (lo + hi);
    for it in 0..MAX_ROOT_ITERATIONS {
        let (val, deriv) = g.eval(tau);
        if val == 0.0 {
            return Ok(tau);
        }
        if val < 0.0 {
            lo = tau;
        } else {
            hi = tau;
        }
        if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            return Ok(0.5 * (lo + hi));
        }
        let newton = tau - val / deriv;
        let next = if it >= WARM_BISECTIONS && newton > lo && newton < hi && newton.is_finite() {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - tau).abs() <= f64::EPSILON * tau.abs() {
            return Ok(next);
        }
        tau = next;
    }
    Err(Error::RootBracketFailure {
        lo: lo0,
        hi: hi0,
        iterations: MAX_ROOT_ITERATIONS,
    })
}

/// All eigenpairs of an arrowhead matrix, eigenvalues descending.
///
/// Shaft entries with `|b_j| ≤ 1e-14·(|head| + max|tail|)` are deflated:
/// their tail value is returned as an eigenvalue with a coordinate
/// eigenvector. Equal tail values are merged by rotating their shaft weight
/// onto one pole; the surplus eigenvalues equal the tail value exactly.
pub fn arrowhead_eig(a: &ArrowheadMatrix) -> Result<SymEigen> {
    a.validate()?;
    let p = a.dim();
    let scale = a.scale();
    let deflate_below = DEFLATION_TOL * scale;
    let merge_within = 8.0 * f64::EPSILON * scale;

    let mut pairs: Vec<(f64, Vec<(usize, f64)>)> = Vec::with_capacity(p);

    let mut live: Vec<usize> = Vec::new();
    for (j, &b) in a.shaft.iter().enumerate() {
        if b.abs() <= deflate_below {
            pairs.push((a.tail[j], vec![(j + 1, 1.0)]));
        } else {
            live.push(j);
        }
    }
    live.sort_by(|&x, &y| a.tail[x].total_cmp(&a.tail[y]));

    let mut poles: Vec<Pole> = Vec::with_capacity(live.len());
    for &j in &live {
        let (d, b) = (a.tail[j], a.shaft[j]);
        match poles.last_mut() {
            Some(prev) if (d - prev.at).abs() <= merge_within => {
                // Rotate the new coordinate into the existing pole.
                let r = prev.weight.hypot(b);
                let (c, s) = (prev.weight / r, b / r);
                let mut surplus: Vec<(usize, f64)> =
                    prev.direction.iter().map(|&(i, v)| (i, s * v)).collect();
                surplus.push((j + 1, -c));
                pairs.push((prev.at, surplus));
                for entry in prev.direction.iter_mut() {
                    entry.1 *= c;
                }
                prev.direction.push((j + 1, s));
                prev.weight = r;
            }
            _ => poles.push(Pole {
                at: d,
                weight: b,
                direction: vec![(j + 1, 1.0)],
            }),
        }
    }

    if poles.is_empty() {
        pairs.push((a.head, vec![(0, 1.0)]));
    } else {
        let d: Vec<f64> = poles.iter().map(|q| q.at).collect();
        let w2: Vec<f64> = poles.iter().map(|q| q.weight * q.weight).collect();
        let r = d.len();
        let shaft_l1: f64 = poles.iter().map(|q| q.weight.abs()).sum();
        let lower = a.head.min(d[0]) - shaft_l1;
        let upper = a.head.max(d[r - 1]) + shaft_l1;

        let mut roots: Vec<Root> = Vec::with_capacity(r + 1);
        // Below the smallest pole.
        {
            let g = Shifted::new(a.head, &d, &w2, d[0]);
            let mut lo = (lower - d[0]).min(-f64::MIN_POSITIVE);
            while g.eval(lo).0 > 0.0 {
                lo *= 2.0;
            }
            roots.push(Root {
                origin: 0,
                tau: solve_shifted(&g, lo, 0.0)?,
            });
        }
        // Between consecutive poles.
        for i in 1..r {
            let gap = d[i] - d[i - 1];
            let left = Shifted::new(a.head, &d, &w2, d[i - 1]);
            let (mid_val, _) = left.eval(0.5 * gap);
            let root = if mid_val >= 0.0 {
                Root {
                    origin: i - 1,
                    tau: solve_shifted(&left, 0.0, 0.5 * gap)?,
                }
            } else {
                let right = Shifted::new(a.head, &d, &w2, d[i]);
                Root {
                    origin: i,
                    tau: solve_shifted(&right, -0.5 * gap, 0.0)?,
                }
            };
            roots.push(root);
        }
        // Above the largest pole.
        {
            let g = Shifted::new(a.head, &d, &w2, d[r - 1]);
            let mut hi = (upper - d[r - 1]).max(f64::MIN_POSITIVE);
            while g.eval(hi).0 < 0.0 {
                hi *= 2.0;
            }
            roots.push(Root {
                origin: r - 1,
                tau: solve_shifted(&g, 0.0, hi)?,
            });
        }

        // d_k − λ_i, computed from pole differences.
        let gap = |k: usize, i: usize| (d[k] - d[roots[i].origin]) - roots[i].tau;

        // Löwner: recompute shaft magnitudes consistent with the roots.
        let shaft_hat: Vec<f64> = (0..r)
            .map(|k| {
                let mut prod = -gap(k, k) * gap(k, k + 1);
                for j in 0..k {
                    prod *= gap(k, j) / (d[k] - d[j]);
                }
                for j in (k + 1)..r {
                    prod *= gap(k, j + 1) / (d[k] - d[j]);
                }
                prod.max(0.0).sqrt().copysign(poles[k].weight)
            })
            .collect();

        for i in 0..=r {
            let lambda = d[roots[i].origin] + roots[i].tau;
            let mut coeffs = Vec::with_capacity(r + 1);
            coeffs.push(1.0);
            for k in 0..r {
                coeffs.push(shaft_hat[k] / (-gap(k, i)));
            }
            let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
            let mut direction = vec![(0usize, coeffs[0] / norm)];
            for (k, pole) in poles.iter().enumerate() {
                let ck = coeffs[k + 1] / norm;
                direction.extend(pole.direction.iter().map(|&(idx, v)| (idx, ck * v)));
            }
            pairs.push((lambda, direction));
        }
    }

    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut vectors = Matrix::zeros(p, p);
    let mut values = Vec::with_capacity(p);
    let mut col = vec![0.0; p];
    for (c, (lambda, dir)) in pairs.into_iter().enumerate() {
        values.push(lambda);
        col.iter_mut().for_each(|v| *v = 0.0);
        for (i, v) in dir {
            col[i] += v;
        }
        fix_sign_largest_positive(&mut col);
        for (i, &v) in col.iter().enumerate() {
            vectors[(i, c)] = v;
        }
    }
    Ok(SymEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_closed_form() {
        let a = ArrowheadMatrix::new(2.0, vec![1.0], vec![0.0]).unwrap();
        let eig = arrowhead_eig(&a).unwrap();
        assert!((eig.values[0] - (1.0 + 2f64.sqrt())).abs() < 1e-15);
        assert!((eig.values[1] - (1.0 - 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn zero_shaft_fully_deflates() {
        let a = ArrowheadMatrix::new(1.5, vec![0.0; 3], vec![3.0, -1.0, 0.5]).unwrap();
        let eig = arrowhead_eig(&a).unwrap();
        assert_eq!(eig.values, vec![3.0, 1.5, 0.5, -1.0]);
        assert_eq!(eig.vector(1), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(eig.vector(0), vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn repeated_poles_are_merged() {
        let a = ArrowheadMatrix::new(0.0, vec![1.0, 1.0, 0.5], vec![2.0, 2.0, 1.0]).unwrap();
        let eig = arrowhead_eig(&a).unwrap();
        assert_eq!(eig.values.iter().filter(|&&v| v == 2.0).count(), 1);
        let dense = sym_eig(&a.to_dense()).unwrap();
        for (x, y) in eig.values.iter().zip(&dense.values) {
            assert!((x - y).abs() < 1e-13, "{x} vs {y}");
        }
    }

    #[test]
    fn mismatched_lengths_rejected() {
        assert!(ArrowheadMatrix::new(0.0, vec![1.0], vec![]).is_err());
        assert!(ArrowheadMatrix::new(0.0, vec![], vec![]).is_err());
    }
}
