//! Upward bias of the top sample eigenvalue for a fixed spectrum.

use spiked_pca::asymptotics::lawley_shift;
use spiked_pca::harness::lawley_experiment;

fn main() -> spiked_pca::Result<()> {
    let alphas = [3.0, 1.0, 1.0, 1.0, 1.0];
    for n in [100, 500, 2000] {
        let r = lawley_experiment(&alphas, n, 20_000, n as u64)?;
        println!(
            "n {n:5}: mean {:.5} +- {:.5}, predicted {:.5} (z = {:+.2})",
            r.empirical.mean, r.empirical.std_error, r.predicted, r.z_mean
        );
    }
    println!("second of (4, 2, 1) at n = 300: {:.5}", lawley_shift(&[4.0, 2.0, 1.0], 300, 1)?);
    Ok(())
}
