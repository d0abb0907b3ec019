//! Densities `h` for the noise variances of the heteroscedastic model.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseKind {
    PointMass { at: f64 },
    Uniform { lo: f64, hi: f64 },
    /// Piecewise-linear density through `(grid[i], values[i])`, normalized
    /// to unit mass.
    Tabulated { grid: Vec<f64>, values: Vec<f64> },
}

/// A noise-variance density with compact support in `[0, support_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseDensity {
    pub kind: NoiseKind,
    pub support_min: f64,
    /// `α_c`
    pub support_max: f64,
    /// `μ₁ = ∫ρ h(ρ)dρ`
    pub mu1: f64,
    /// `μ₂² = ∫(ρ − μ₁)² h(ρ)dρ`
    pub mu2_sq: f64,
}

fn check_support(lo: f64, hi: f64) -> Result<()> {
    if !(lo >= 0.0 && hi.is_finite() && lo <= hi) {
        return Err(Error::InvalidParameter(format!(
            "noise variances need a compact support in [0, ∞), got [{lo}, {hi}]"
        )));
    }
    Ok(())
}

impl NoiseDensity {
    pub fn point_mass(at: f64) -> Result<Self> {
        check_support(at, at)?;
        if at == 0.0 {
            return Err(Error::InvalidParameter("point mass must sit above 0".into()));
        }
        Ok(Self {
            kind: NoiseKind::PointMass { at },
            support_min: at,
            support_max: at,
            mu1: at,
            mu2_sq: 0.0,
        })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        check_support(lo, hi)?;
        if !(hi > lo) {
            return Err(Error::InvalidParameter(format!("uniform needs lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self {
            kind: NoiseKind::Uniform { lo, hi },
            support_min: lo,
            support_max: hi,
            mu1: 0.5 * (lo + hi),
            mu2_sq: (hi - lo).powi(2) / 12.0,
        })
    }

    /// Piecewise-linear density on an ascending grid. Values are rescaled to
    /// unit mass; moments are exact for the interpolant.
    pub fn tabulated(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() || grid.len() < 2 {
            return Err(Error::DimensionMismatch(
                "tabulated density needs matching grid and values with at least two points".into(),
            ));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("density grid must be strictly ascending".into()));
        }
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter("density values must be finite and >= 0".into()));
        }
        check_support(grid[0], grid[grid.len() - 1])?;
        // Simpson is exact for x^k times a linear function, k <= 2.
        let moment = |k: i32| -> f64 {
            grid.windows(2)
                .zip(values.windows(2))
                .map(|(x, y)| {
                    let xm = 0.5 * (x[0] + x[1]);
                    let ym = 0.5 * (y[0] + y[1]);
                    (x[1] - x[0]) / 6.0 * (x[0].powi(k) * y[0] + 4.0 * xm.powi(k) * ym + x[1].powi(k) * y[1])
                })
                .sum()
        };
        let mass = moment(0);
        if !(mass > 0.0) {
            return Err(Error::InvalidParameter("density has zero mass".into()));
        }
        let values: Vec<f64> = values.iter().map(|v| v / mass).collect();
        let mu1 = moment(1) / mass;
        let mu2_sq = (moment(2) / mass - mu1 * mu1).max(0.0);
        let (lo, hi) = support_of(&grid, &values);
        Ok(Self {
            kind: NoiseKind::Tabulated { grid, values },
            support_min: lo,
            support_max: hi,
            mu1,
            mu2_sq,
        })
    }

    /// Reads a two-column CSV (grid point, density value); a header row is
    /// skipped if it does not parse as numbers.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)?;
        let (mut grid, mut values) = (Vec::new(), Vec::new());
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::InvalidParameter(format!("row {} has fewer than two columns", i + 1)));
            }
            match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
                (Ok(x), Ok(y)) => {
                    grid.push(x);
                    values.push(y);
                }
                _ if i == 0 => continue,
                _ => return Err(Error::InvalidParameter(format!("row {} is not numeric", i + 1))),
            }
        }
        Self::tabulated(grid, values)
    }

    /// `∫ f(ρ) h(ρ) dρ`
    pub fn expect<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        match &self.kind {
            NoiseKind::PointMass { at } => f(*at),
            NoiseKind::Uniform { lo, hi } => quad::integrate(&mut f, *lo, *hi) / (hi - lo),
            NoiseKind::Tabulated { grid, values } => grid
                .windows(2)
                .zip(values.windows(2))
                .filter(|(_, y)| y[0] > 0.0 || y[1] > 0.0)
                .map(|(x, y)| {
                    let slope = (y[1] - y[0]) / (x[1] - x[0]);
                    quad::integrate(|t| f(t) * (y[0] + slope * (t - x[0])), x[0], x[1])
                })
                .sum(),
        }
    }

    /// Density value at `x` (zero for the point mass).
    pub fn pdf(&self, x: f64) -> f64 {
        match &self.kind {
            NoiseKind::PointMass { .. } => 0.0,
            NoiseKind::Uniform { lo, hi } => {
                if x >= *lo && x <= *hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            NoiseKind::Tabulated { grid, values } => {
                if x < grid[0] || x > grid[grid.len() - 1] {
                    return 0.0;
                }
                let i = grid.partition_point(|g| *g <= x).clamp(1, grid.len() - 1);
                let w = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
                values[i - 1] + w * (values[i] - values[i - 1])
            }
        }
    }

    /// Draws one variance from `h` (inverse CDF).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            NoiseKind::PointMass { at } => *at,
            NoiseKind::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            NoiseKind::Tabulated { grid, values } => {
                let mut target: f64 = rng.random();
                for (x, y) in grid.windows(2).zip(values.windows(2)) {
                    let w = x[1] - x[0];
                    let mass = 0.5 * (y[0] + y[1]) * w;
                    if target > mass {
                        target -= mass;
                        continue;
                    }
                    // Solve y0 s + (y1 − y0) s²/(2w) = target for s ∈ [0, w].
                    let a = 0.5 * (y[1] - y[0]) / w;
                    let s = if a.abs() < 1e-300 {
                        target / y[0]
                    } else {
                        let disc = (y[0] * y[0] + 4.0 * a * target).max(0.0).sqrt();
                        2.0 * target / (y[0] + disc)
                    };
                    return x[0] + s.clamp(0.0, w);
                }
                grid[grid.len() - 1]
            }
        }
    }

    /// The same density with its variable multiplied by `t > 0`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        match &self.kind {
            NoiseKind::PointMass { at } => Self::point_mass(at * t),
            NoiseKind::Uniform { lo, hi } => Self::uniform(lo * t, hi * t),
            NoiseKind::Tabulated { grid, values } => {
                Self::tabulated(grid.iter().map(|g| g * t).collect(), values.clone())
            }
        }
    }
}

fn support_of(grid: &[f64], values: &[f64]) -> (f64, f64) {
    let first = values.iter().position(|v| *v > 0.0).unwrap_or(0);
    let last = values.iter().rposition(|v| *v > 0.0).unwrap_or(values.len() - 1);
    let lo = grid[first.saturating_sub(1)];
    let hi = grid[(last + 1).min(grid.len() - 1)];
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_moments_and_mass() {
        let h = NoiseDensity::uniform(0.5, 1.5).unwrap();
        assert!((h.expect(|_| 1.0) - 1.0).abs() < 1e-12);
        assert!((h.expect(|x| x) - h.mu1).abs() < 1e-12);
        assert!((h.expect(|x| (x - 1.0).powi(2)) - h.mu2_sq).abs() < 1e-12);
    }

    #[test]
    fn tabulated_is_renormalized() {
        let h = NoiseDensity::tabulated(vec![0.0, 1.0, 2.0], vec![0.0, 3.0, 0.0]).unwrap();
        assert!((h.expect(|_| 1.0) - 1.0).abs() < 1e-12);
        assert!((h.mu1 - 1.0).abs() < 1e-14);
        assert!((h.mu2_sq - 1.0 / 6.0).abs() < 1e-14);
        assert!((h.expect(|x| x * x) - (h.mu2_sq + 1.0)).abs() < 1e-12);
        assert_eq!(h.support_max, 2.0);
        assert!((h.pdf(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn flat_table_matches_uniform() {
        let t = NoiseDensity::tabulated(vec![0.5, 1.0, 1.5], vec![2.0, 2.0, 2.0]).unwrap();
        let u = NoiseDensity::uniform(0.5, 1.5).unwrap();
        assert!((t.mu1 - u.mu1).abs() < 1e-15);
        assert!((t.mu2_sq - u.mu2_sq).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(NoiseDensity::uniform(1.0, 1.0).is_err());
        assert!(NoiseDensity::uniform(-1.0, 1.0).is_err());
        assert!(NoiseDensity::tabulated(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(NoiseDensity::tabulated(vec![0.0, 1.0], vec![0.0, 0.0]).is_err());
    }
}
