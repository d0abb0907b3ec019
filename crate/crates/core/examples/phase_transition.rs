//! Large-dimension limits of the top eigenvalue and overlap, checked
//! against one large simulation.

use spiked_pca::asymptotics::{mp_edges, mp_integrate, overlap_functional, phase_prediction};
use spiked_pca::harness::phase_experiment;
use spiked_pca::model::{LatentLaw, SpikedModel};

fn main() -> spiked_pca::Result<()> {
    for v2 in [0.5f64, 1.0, 2.0, 4.0] {
        let p = phase_prediction(v2.sqrt(), 1.0, 1.0)?;
        let by_quad = overlap_functional(v2.sqrt(), 1.0, 1.0).map(|r| format!("{r:.6}")).unwrap_or("-".into());
        println!("|v|^2 = {v2}: lambda {:.4}, R^2 {:.4} (quadrature {by_quad}), above {}", p.lambda_limit, p.overlap_sq, p.above_threshold);
    }

    let (a, b) = mp_edges(4.0);
    println!("c = 4 bulk [{a:.1}, {b:.1}], mass {:.12}", mp_integrate(4.0, |_| 1.0)?);

    let model = SpikedModel::new(2f64.sqrt(), 1.0, 1000, LatentLaw::Gaussian)?;
    let r = phase_experiment(&model, 1000, 3, 9)?;
    println!("p = n = 1000: lambda {:.4}, R^2 {:.4}", r.lambda.mean, r.overlap_sq.mean);
    Ok(())
}
