//! Reduce a sample covariance to arrowhead form and solve it through the
//! secular equation.

use spiked_pca::eig::{arrowhead_eig, arrowhead_reduce, sym_eigenvalues, ArrowheadMatrix};
use spiked_pca::model::{sample_covariance, sample_model, LatentLaw, SpikedModel};

fn main() -> spiked_pca::Result<()> {
    let model = SpikedModel::new(2.8, 0.6, 100, LatentLaw::Gaussian)?;
    let s = sample_covariance(&sample_model(&model, 60, 3)?);

    let t = std::time::Instant::now();
    let (arrow, _basis) = arrowhead_reduce(&s)?;
    let eig = arrowhead_eig(&arrow)?;
    println!("arrowhead solve: {:?}", t.elapsed());

    let dense = sym_eigenvalues(&s)?;
    let worst = eig.values.iter().zip(&dense).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("top eigenvalue {:.12}, worst gap to dense {:.2e} (relative to the norm)", eig.values[0], worst / dense[0]);

    // Repeated poles and a zero shaft entry deflate.
    let small = ArrowheadMatrix::new(1.0, vec![0.5, 0.0, 0.3], vec![2.0, 1.5, 2.0])?;
    println!("with deflation: {:?}", arrowhead_eig(&small)?.values);
    Ok(())
}
