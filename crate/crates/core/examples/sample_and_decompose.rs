//! Draw a realization, split its covariance into signal, interaction and
//! noise parts, and write the samples with a JSON sidecar.

use spiked_pca::model::{decompose_covariance, sample_covariance, sample_model, write_samples_csv, write_sidecar_json};
use spiked_pca::model::{LatentLaw, SpikedModel};

fn main() -> spiked_pca::Result<()> {
    let model = SpikedModel::new(2.0, 0.5, 8, LatentLaw::Rademacher)?;
    let real = sample_model(&model, 40, 7)?;
    let s = sample_covariance(&real);
    let d = decompose_covariance(&real, &model)?;

    let mut err = d.reconstruct(model.noise_level);
    err.add_scaled(-1.0, &s);
    println!("s_u = {:.4}, kappa = {:.4}, rho_1 = {:.4}", d.s_u, d.kappa, d.rho[0]);
    println!("max |L0 + sL1 + s^2 L2 - S| = {:.2e}", err.max_abs());

    let dir = std::env::temp_dir().join("spiked_pca_sample");
    std::fs::create_dir_all(&dir)?;
    write_samples_csv(&real, &dir.join("samples.csv"))?;
    write_sidecar_json(&real, &model, &dir.join("samples.json"))?;
    println!("wrote {}", dir.display());
    Ok(())
}
