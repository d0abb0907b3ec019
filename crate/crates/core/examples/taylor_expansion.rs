//! Small-noise expansion of the leading eigenpair and its error.

use spiked_pca::eig::top_pair;
use spiked_pca::linalg::{dot, norm2};
use spiked_pca::model::{decompose_covariance, sample_model, LatentLaw, SpikedModel};
use spiked_pca::perturbation::taylor_expand;

fn main() -> spiked_pca::Result<()> {
    let model = SpikedModel::new(1.0, 0.0, 50, LatentLaw::Gaussian)?;
    let d = decompose_covariance(&sample_model(&model, 100, 5)?, &model)?;
    let t = taylor_expand(&d)?;
    println!("lambda(s) = {:.6} + {:.6} s + {:.6} s^2, radius ~ {:.4}", t.lambda_terms[0], t.lambda_terms[1], t.lambda_terms[2], t.sigma_limit);
    for sigma in [1e-4, 1e-3, 1e-2, 1e-1] {
        let exact = top_pair(&d.reconstruct(sigma))?;
        let v = t.eigenvector(sigma, false);
        let sign = dot(&v, &exact.v_pca).signum();
        let diff: Vec<f64> = v.iter().zip(&exact.v_pca).map(|(a, b)| a - sign * b).collect();
        let vec_err = norm2(&diff);
        println!(
            "sigma {sigma:.0e}: eigenvalue error {:.3e}, eigenvector error {:.3e}",
            (t.eigenvalue(sigma) - exact.lambda_pca).abs(),
            vec_err
        );
    }
    if let Some(note) = t.diagnose(10.0) {
        println!("{note}");
    }
    Ok(())
}
