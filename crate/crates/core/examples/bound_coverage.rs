//! How often the finite-sample bounds fail, against their stated budget.

use spiked_pca::bounds::BoundConfig;
use spiked_pca::harness::{coverage_experiment, wishart_experiment};
use spiked_pca::model::{LatentLaw, SpikedModel};

fn main() -> spiked_pca::Result<()> {
    let model = SpikedModel::new(2.8, 0.3, 200, LatentLaw::Gaussian)?;
    let cfg = BoundConfig::with_defaults(200, 50, 0.3, 2.8)?;
    let r = coverage_experiment(&cfg, &model, 2_000, 4)?;
    println!(
        "joint violations {}/{} (rate {:.4}, allowed {:.4})",
        r.joint.count, r.joint.trials, r.joint.rate, r.joint_threshold
    );
    println!(
        "lower {} upper {} sin theta {}",
        r.lambda_lower.count, r.lambda_upper.count, r.sintheta.count
    );

    let w = wishart_experiment(200, 100, 1_000, 5)?;
    println!(
        "||W|| > {:.3}: {} of {} (eps {:.2e}); largest seen {:.3}",
        w.bound.norm_bound, w.exceed.count, w.exceed.trials, w.bound.eps, w.max_norm
    );
    Ok(())
}
