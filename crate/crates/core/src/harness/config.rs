//! Run configuration shared by the command-line subcommands. Every field is
//! optional; a JSON file supplies a base and flags override it.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::export::Format;
use crate::asymptotics::NoiseDensity;
use crate::error::{Error, Result};
use crate::model::LatentLaw;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub p: Option<usize>,
    pub n: Option<usize>,
    pub signal_norm: Option<f64>,
    pub sigma: Option<f64>,
    pub grid: Option<Vec<f64>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub latent_law: Option<LatentLaw>,
    pub out: Option<PathBuf>,
    pub format: Option<Vec<Format>>,
    pub center: Option<bool>,
    pub alphas: Option<Vec<f64>>,
    pub c: Option<f64>,
    /// `point:AT`, `uniform:LO:HI` or `file:PATH`.
    pub noise: Option<String>,
    pub s: Option<[f64; 3]>,
    pub input: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($f:ident),*) => {
        RunConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Fields set in `top` win.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        let base = self;
        overlay!(
            base, top, p, n, signal_norm, sigma, grid, trials, seed, latent_law, out, format, center, alphas, c,
            noise, s, input
        )
    }

    pub fn require<T: Clone>(value: &Option<T>, name: &str) -> Result<T> {
        value
            .clone()
            .ok_or_else(|| Error::InvalidParameter(format!("missing required setting '{name}'")))
    }
}

/// Parses `a:b:step` (inclusive, ascending) or a comma-separated list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidParameter(format!("cannot parse grid '{text}'"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || b < a {
            return Err(bad());
        }
        let count = ((b - a) / step + 1e-9).floor() as usize;
        // Index-based points avoid accumulated drift.
        return Ok((0..=count).map(|i| a + i as f64 * step).collect());
    }
    text.split(',').map(num).collect()
}

/// Parses a noise density spec (see [`RunConfig::noise`]).
pub fn parse_noise(text: &str) -> Result<NoiseDensity> {
    let bad = || Error::InvalidParameter(format!("cannot parse noise density '{text}'"));
    let (kind, rest) = text.split_once(':').ok_or_else(bad)?;
    let nums = || -> Result<Vec<f64>> { rest.split(':').map(|s| s.parse::<f64>().map_err(|_| bad())).collect() };
    match kind {
        "point" => match nums()?.as_slice() {
            [at] => NoiseDensity::point_mass(*at),
            _ => Err(bad()),
        },
        "uniform" => match nums()?.as_slice() {
            [lo, hi] => NoiseDensity::uniform(*lo, *hi),
            _ => Err(bad()),
        },
        "file" => NoiseDensity::from_csv(Path::new(rest)),
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: RunConfig = serde_json::from_str(r#"{"p": 200, "n": 50, "seed": 3}"#).unwrap();
        let flags = RunConfig { n: Some(80), ..Default::default() };
        let merged = file.overlay(flags);
        assert_eq!((merged.p, merged.n, merged.seed), (Some(200), Some(80), Some(3)));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"q": 1}"#).is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("10, 20,40").unwrap(), vec![10.0, 20.0, 40.0]);
        assert!(parse_grid("1:0:0.1").is_err());
        assert_eq!(parse_grid("0:0.3:0.1").unwrap().len(), 4);
    }

    #[test]
    fn noise_specs() {
        assert_eq!(parse_noise("uniform:0.5:1.5").unwrap().mu1, 1.0);
        assert!(parse_noise("point:0").is_err());
        assert!(parse_noise("beta:1:2").is_err());
    }
}
