//! Predicted and simulated moments of the top eigenvalue and of sin theta.

use spiked_pca::harness::{lambda_moment_study, sintheta_moment_study};
use spiked_pca::model::{LatentLaw, SpikedModel};

fn main() -> spiked_pca::Result<()> {
    let model = SpikedModel::new(1.0, 0.0, 20, LatentLaw::Gaussian)?;
    let l = lambda_moment_study(&model, 50, 0.1, 20_000, 1)?;
    println!(
        "E lambda: {:.5} +- {:.5} (predicted {:.5})",
        l.empirical.mean, l.empirical.std_error, l.predicted.mean
    );
    println!(
        "Var lambda: {:.5} (centered form {:.5}, raw fourth moment form {:.5}); closer: {}",
        l.empirical.variance, l.predicted.variance, l.predicted.variance_raw_fourth, l.closer_variance
    );

    let wide = SpikedModel::new(1.0, 0.0, 50, LatentLaw::Gaussian)?;
    let s = sintheta_moment_study(&wide, 100, 0.01, 5_000, 2)?;
    println!(
        "E sin theta: {:.6e} +- {:.1e} (predicted {:.6e})",
        s.empirical.mean, s.empirical.std_error, s.predicted.mean
    );
    Ok(())
}
