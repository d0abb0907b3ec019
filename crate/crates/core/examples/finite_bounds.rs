//! Finite-sample eigenvalue and eigenvector bounds with their failure
//! probabilities.

use spiked_pca::bounds::{bound_report, compare_lower_bounds, wishart_norm_bound, wishart_tail, BoundConfig};

fn main() -> spiked_pca::Result<()> {
    let cfg = BoundConfig::with_defaults(200, 50, 0.3, 2.8)?;
    let r = bound_report(&cfg)?;
    println!("s = ({:.4}, {:.4}, {:.4})", cfg.s1, cfg.s2, cfg.s3);
    println!("eps = {:.3e}, budget = {:.4}", r.eps, r.budget);
    println!("lambda in [{:.4}, {:.4}]", r.lambda_lower.unwrap_or(f64::NAN), r.lambda_upper.unwrap_or(f64::NAN));
    println!("sin theta <= {:.4}", r.sintheta_upper.unwrap_or(f64::NAN));

    let v = compare_lower_bounds(&cfg)?;
    println!("lower bound forms: {:.6} vs {:.6}", v.bracketed, v.factored);

    let w = wishart_norm_bound(200, 100)?;
    println!("||W|| <= {:.4} except with probability {:.3e}", w.norm_bound, w.eps);
    println!("tail at alpha = 2: {:.3e}", wishart_tail(200, 100, 2.0)?);

    // Too much noise: the report explains what failed.
    let weak = bound_report(&cfg.with_sigma(3.0))?;
    println!("sigma = 3: {:?}", weak.diagnostics);
    Ok(())
}
