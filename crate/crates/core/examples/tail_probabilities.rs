//! Normal and chi-square tails and the deviation parameters they define.

use spiked_pca::bounds::{default_deviations, tail_probability, TailKind};
use spiked_pca::special::{chisq_upper, gamma_inc_pair, invert_tail};

fn main() -> spiked_pca::Result<()> {
    println!("P(|Z| > 1.96) = {:.6}", tail_probability(TailKind::AbsNormal, None, 1.96)?);
    println!("P(chi2_10 > 18.307) = {:.6}", chisq_upper(10, 18.307)?);
    let (p, q) = gamma_inc_pair(2.5, 1.0)?;
    println!("P(2.5, 1) = {p:.12}, Q = {q:.12}");

    let t = invert_tail(|t| chisq_upper(199, t).unwrap_or(0.0), 0.01)?;
    println!("99% point of chi2_199: {t:.6}");

    let (s1, s2, s3) = default_deviations(200, 0.01)?;
    println!("1% deviations for p = 200: s1 {s1:.6}, s2 {s2:.6}, s3 {s3:.6}");
    Ok(())
}
