//! Marčenko–Pastur law with aspect ratio `c = p/n` (unit noise variance).

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::quad;

fn check_c(c: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("aspect ratio must be > 0, got {c}")));
    }
    Ok(())
}

/// Bulk edges `((1−√c)², (1+√c)²)`.
pub fn mp_edges(c: f64) -> (f64, f64) {
    let s = c.sqrt();
    ((1.0 - s).powi(2), (1.0 + s).powi(2))
}

/// Absolutely continuous part `(1/(2πxc))√((b−x)(x−a))` on `[a, b]`.
pub fn mp_density(c: f64, x: f64) -> f64 {
    let (a, b) = mp_edges(c);
    if !(x > a && x < b) || x <= 0.0 {
        return 0.0;
    }
    ((b - x) * (x - a)).sqrt() / (2.0 * PI * x * c)
}

/// Mass of the atom at zero, `max(0, 1 − 1/c)`.
pub fn mp_atom(c: f64) -> f64 {
    (1.0 - 1.0 / c).max(0.0)
}

/// `∫ g(x) f_MP(x) dx` over the continuous part, with `x = a + (b−a)sin²t`
/// removing the square-root edges.
pub fn mp_integrate<G: FnMut(f64) -> f64>(c: f64, mut g: G) -> Result<f64> {
    check_c(c)?;
    let (a, b) = mp_edges(c);
    let w = b - a;
    let k = w * w / (PI * c);
    Ok(quad::integrate(
        |t| {
            let (s, co) = t.sin_cos();
            let x = a + w * s * s;
            // f(x) dx = (b−a)² 2 s² co² / (2π c x) dt
            k * s * s * co * co / x * g(x)
        },
        0.0,
        FRAC_PI_2,
    ))
}

/// `∫ f_MP(x) x/(λ−x) dx` for `λ` above the bulk.
pub fn mp_lambda_functional(c: f64, lam: f64) -> Result<f64> {
    check_c(c)?;
    let (_, b) = mp_edges(c);
    if !(lam > b) {
        return Err(Error::BulkViolation(format!(
            "λ = {lam} is not above the bulk edge {b}"
        )));
    }
    mp_integrate(c, |x| x / (lam - x))
}

/// Closed form of [`mp_lambda_functional`] at `c = 1`:
/// `½[λ − 2 − √(λ(λ−4))]`, valid for `λ ≥ 4`.
pub fn mp_lambda_functional_c1(lam: f64) -> Result<f64> {
    if !(lam >= 4.0) {
        return Err(Error::BulkViolation(format!("λ = {lam} is below the edge 4")));
    }
    // λ − 2 − √(λ(λ−4)) = 4 / (λ − 2 + √(λ(λ−4)))
    Ok(2.0 / (lam - 2.0 + (lam * (lam - 4.0)).sqrt()))
}
