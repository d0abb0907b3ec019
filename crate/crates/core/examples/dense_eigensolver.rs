//! Full and partial symmetric eigendecomposition.

use spiked_pca::eig::{sym_eig, top_eigenpairs, top_pair};
use spiked_pca::Matrix;

fn main() -> spiked_pca::Result<()> {
    let m = Matrix::from_fn(6, 6, |i, j| 1.0 / (1 + i + j) as f64);
    let full = sym_eig(&m)?;
    let shown: Vec<String> = full.values.iter().map(|v| format!("{v:.3e}")).collect();
    println!("Hilbert(6) eigenvalues: {}", shown.join(" "));

    let top = top_eigenpairs(&m, 2)?;
    println!("top two by inverse iteration: {:.15} {:.15e}", top.values[0], top.values[1]);

    let pca = top_pair(&m)?;
    println!("leading vector overlap with e1: {:.6}, sin theta: {:.6}", pca.overlap, pca.sin_theta);
    Ok(())
}
