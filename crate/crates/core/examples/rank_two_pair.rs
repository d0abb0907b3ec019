//! Closed-form top eigenpair of the signal plus interaction part.

use spiked_pca::eig::{rank2_pair, sym_eig};
use spiked_pca::linalg::dot;
use spiked_pca::model::{decompose_covariance, sample_model, LatentLaw, SpikedModel};

fn main() -> spiked_pca::Result<()> {
    let model = SpikedModel::new(1.5, 0.0, 30, LatentLaw::Gaussian)?;
    let real = sample_model(&model, 25, 11)?;
    let d = decompose_covariance(&real, &model)?;
    for sigma in [0.05, 0.5, 2.0] {
        let pair = rank2_pair(&d, sigma)?;
        let dense = sym_eig(&d.signal_plus_interaction(sigma))?;
        println!(
            "sigma {sigma:4}: lambda+ {:.12} (dense {:.12}), lambda- {:.6}, |<v, v_dense>| = {:.12}",
            pair.lambda_plus,
            dense.values[0],
            pair.lambda_minus,
            dot(&pair.v_plus, &dense.vector(0)).abs()
        );
    }
    Ok(())
}
