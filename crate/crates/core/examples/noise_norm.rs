//! Spectral norm of heteroscedastic noise in the large-dimension limit.

use spiked_pca::asymptotics::{large_ratio_noise_norm, noise_norm_limit, stieltjes_solve, NoiseDensity};
use spiked_pca::harness::noise_norm_experiment;

fn main() -> spiked_pca::Result<()> {
    let h = NoiseDensity::uniform(0.5, 1.5)?;
    for c in [0.25, 1.0, 4.0, 100.0] {
        let exact = noise_norm_limit(c, &h)?;
        let approx = large_ratio_noise_norm(c, &h)?;
        println!(
            "c = {c:6}: alpha* {:.5}, norm {:.5}; large-c form {:.5}",
            exact.alpha_star, exact.norm, approx.norm
        );
    }
    let s = stieltjes_solve(20.0, 4.0, &h)?;
    println!("z = 20: m = {:.8}, m_bar = {:.8}", s.m, s.m_bar);

    let mc = noise_norm_experiment(&h, 800, 200, 4, 1)?;
    println!("simulated p = 800, n = 200: {:.4} vs limit {:.4}", mc.empirical.mean, mc.predicted);
    Ok(())
}
