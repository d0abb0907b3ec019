//! Overlap against the sample size with nested samples.

use spiked_pca::harness::{sweep_n, sweep_svg, SweepSpec};
use spiked_pca::model::{LatentLaw, SpikedModel};

fn main() -> spiked_pca::Result<()> {
    let mut grid: Vec<f64> = (2..=20).map(|k| 5.0 * k as f64).collect();
    grid.extend((5..=24).map(|k| 25.0 * k as f64));
    let spec = SweepSpec {
        model: SpikedModel::new(2.0, 1.0, 600, LatentLaw::Gaussian)?,
        n: 0,
        grid,
        trials: 5,
        seed: 3,
        center: false,
    };
    let records = sweep_n(&spec)?;
    for r in &records {
        let limit = r.theory.map(|t| t.overlap_sq.sqrt()).unwrap_or(0.0);
        println!("n {:4}: mean R {:.3} (limit {limit:.3}) crossovers {}", r.n, r.mean_overlap(), r.crossover_count());
    }
    let path = std::env::temp_dir().join("spiked_pca_sweep_n.svg");
    std::fs::write(&path, sweep_svg(&records)?)?;
    println!("wrote {}", path.display());
    Ok(())
}
