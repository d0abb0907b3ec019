//! Command-line driver for the sweeps, Monte Carlo studies and evaluators.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use spiked_pca::asymptotics::{large_ratio_noise_norm, noise_norm_limit, overlap_functional, phase_prediction};
use spiked_pca::bounds::{default_deviations, wishart_norm_bound, BoundConfig, DEFAULT_TAIL};
use spiked_pca::eig::{arrowhead_eig, sym_eigenvalues, ArrowheadMatrix};
use spiked_pca::harness::{self, parse_grid, parse_noise, Format, RunConfig, SweepSpec};
use spiked_pca::model::{LatentLaw, SpikedModel};
use spiked_pca::{Error, Result};

#[derive(Parser)]
#[command(name = "spiked-pca", version, about = "Finite-sample and asymptotic PCA under a single-spike model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the noise level with one realization per trial.
    SweepSigma(Common),
    /// Sweep the sample size with nested samples per trial.
    SweepN(Common),
    /// Violation frequencies of the finite-sample bounds.
    Coverage(Common),
    /// Small-noise moments of the top eigenvalue and of sin θ.
    Moments(Common),
    /// Large-dimension limits; with --noise, the heteroscedastic noise norm.
    Phase(Common),
    /// Eigenvalues of an arrowhead matrix read from --input (JSON).
    ArrowheadSolve(Common),
    /// Wishart norm bound; with --trials, its Monte Carlo exceedance.
    WishartBound(Common),
    /// Eigenvalue bias of a fixed spectrum; with --trials, Monte Carlo.
    Lawley(Common),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON file with any of the settings below; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    signal_norm: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    /// `start:stop:step` or a comma-separated list.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    latent_law: Option<LatentLaw>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    format: Option<Vec<Format>>,
    /// Center samples before forming the covariance.
    #[arg(long)]
    center: bool,
    /// Population eigenvalues, comma-separated.
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Aspect ratio p/n.
    #[arg(long)]
    c: Option<f64>,
    /// `point:AT`, `uniform:LO:HI` or `file:PATH`.
    #[arg(long)]
    noise: Option<String>,
    /// Deviation parameters s1,s2,s3.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    s: Option<Vec<f64>>,
    #[arg(long)]
    input: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let base = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            p: self.p,
            n: self.n,
            signal_norm: self.signal_norm,
            sigma: self.sigma,
            grid: self.grid.as_deref().map(parse_grid).transpose()?,
            trials: self.trials,
            seed: self.seed,
            latent_law: self.latent_law,
            out: self.out.clone(),
            format: self.format.clone(),
            center: self.center.then_some(true),
            alphas: self.alphas.clone(),
            c: self.c,
            noise: self.noise.clone(),
            s: self.s.as_ref().map(|v| [v[0], v[1], v[2]]),
            input: self.input.clone(),
        };
        Ok(base.overlay(flags))
    }
}

fn req<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
    RunConfig::require(v, name)
}

fn model(cfg: &RunConfig) -> Result<SpikedModel> {
    SpikedModel::new(
        req(&cfg.signal_norm, "signal-norm")?,
        cfg.sigma.unwrap_or(0.0),
        req(&cfg.p, "p")?,
        cfg.latent_law.unwrap_or_default(),
    )
}

fn emit<T: Serialize>(value: &T, cfg: &RunConfig, stem: &str) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    println!("{text}");
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{stem}.json")), text + "\n")?;
    }
    Ok(())
}

fn sweep(cfg: &RunConfig, by_n: bool) -> Result<()> {
    let spec = SweepSpec {
        model: model(cfg)?,
        n: if by_n { 0 } else { req(&cfg.n, "n")? },
        grid: req(&cfg.grid, "grid")?,
        trials: cfg.trials.unwrap_or(1),
        seed: cfg.seed.unwrap_or(0),
        center: cfg.center.unwrap_or(false),
    };
    let records = if by_n { harness::sweep_n(&spec)? } else { harness::sweep_sigma(&spec)? };
    let stem = if by_n { "sweep_n" } else { "sweep_sigma" };
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let formats = cfg.format.clone().unwrap_or_else(|| vec![Format::Csv]);
    for f in formats {
        for path in harness::export(&records, f, &out, stem)? {
            eprintln!("wrote {}", path.display());
        }
    }
    let crossings = harness::first_crossovers(&records);
    eprintln!(
        "{} grid points, {} trials, {} trials with a crossover",
        records.len(),
        spec.trials,
        crossings.iter().flatten().count()
    );
    Ok(())
}

fn coverage(cfg: &RunConfig) -> Result<()> {
    let m = model(cfg)?;
    let n = req(&cfg.n, "n")?;
    let s = match cfg.s {
        Some(s) => (s[0], s[1], s[2]),
        None => default_deviations(m.dimension, DEFAULT_TAIL)?,
    };
    let bc = BoundConfig::new(s, m.dimension, n, m.noise_level, m.signal_norm)?;
    let report = harness::coverage_experiment(&bc, &m, cfg.trials.unwrap_or(1000), cfg.seed.unwrap_or(0))?;
    emit(&report, cfg, "coverage")
}

fn moments(cfg: &RunConfig) -> Result<()> {
    let m = model(cfg)?;
    let sigmas = cfg.grid.clone().unwrap_or_else(|| vec![m.noise_level]);
    let report = harness::moment_experiment(
        &m,
        req(&cfg.n, "n")?,
        &sigmas,
        cfg.trials.unwrap_or(10_000),
        cfg.seed.unwrap_or(0),
    )?;
    emit(&report, cfg, "moments")
}

#[derive(Serialize)]
struct PhaseOutput {
    prediction: Option<spiked_pca::asymptotics::AsymptoticPrediction>,
    overlap_sq_by_quadrature: Option<f64>,
    noise_norm: Option<spiked_pca::asymptotics::NoiseNorm>,
    noise_norm_large_ratio: Option<spiked_pca::asymptotics::NoiseNormApprox>,
}

fn phase(cfg: &RunConfig) -> Result<()> {
    let c = match (cfg.c, cfg.p, cfg.n) {
        (Some(c), _, _) => c,
        (None, Some(p), Some(n)) if n > 0 => p as f64 / n as f64,
        _ => return Err(Error::InvalidParameter("phase needs --c or both --p and --n".into())),
    };
    let mut out = PhaseOutput {
        prediction: None,
        overlap_sq_by_quadrature: None,
        noise_norm: None,
        noise_norm_large_ratio: None,
    };
    if let Some(v) = cfg.signal_norm {
        let sigma = cfg.sigma.unwrap_or(1.0);
        out.prediction = Some(phase_prediction(v, sigma, c)?);
        out.overlap_sq_by_quadrature = overlap_functional(v, sigma, c).ok();
    }
    if let Some(spec) = &cfg.noise {
        let h = parse_noise(spec)?;
        out.noise_norm = Some(noise_norm_limit(c, &h)?);
        out.noise_norm_large_ratio = large_ratio_noise_norm(c, &h).ok();
        if let (Some(p), Some(n), Some(trials)) = (cfg.p, cfg.n, cfg.trials) {
            let mc = harness::noise_norm_experiment(&h, p, n, trials, cfg.seed.unwrap_or(0))?;
            eprintln!(
                "Monte Carlo norm {:.6} ± {:.6} (limit {:.6})",
                mc.empirical.mean, mc.empirical.std_error, mc.predicted
            );
        }
    }
    if out.prediction.is_none() && out.noise_norm.is_none() {
        return Err(Error::InvalidParameter("phase needs --signal-norm or --noise".into()));
    }
    emit(&out, cfg, "phase")
}

#[derive(Serialize)]
struct ArrowheadOutput {
    eigenvalues: Vec<f64>,
    dense_eigenvalues: Vec<f64>,
    max_relative_difference: f64,
}

fn arrowhead(cfg: &RunConfig) -> Result<()> {
    let path = req(&cfg.input, "input")?;
    let a: ArrowheadMatrix = serde_json::from_str(&std::fs::read_to_string(Path::new(&path))?)?;
    let eig = arrowhead_eig(&a)?;
    let dense = sym_eigenvalues(&a.to_dense())?;
    let scale = dense.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let diff = eig.values.iter().zip(&dense).map(|(x, y)| (x - y).abs() / scale).fold(0.0, f64::max);
    emit(
        &ArrowheadOutput {
            eigenvalues: eig.values,
            dense_eigenvalues: dense,
            max_relative_difference: diff,
        },
        cfg,
        "arrowhead",
    )
}

fn wishart(cfg: &RunConfig) -> Result<()> {
    let (p, n) = (req(&cfg.p, "p")?, req(&cfg.n, "n")?);
    match cfg.trials {
        Some(t) => emit(&harness::wishart_experiment(p, n, t, cfg.seed.unwrap_or(0))?, cfg, "wishart"),
        None => emit(&wishart_norm_bound(p, n)?, cfg, "wishart"),
    }
}

#[derive(Serialize)]
struct LawleyOutput {
    alphas: Vec<f64>,
    n: usize,
    /// `null` where an eigenvalue is repeated.
    predicted_means: Vec<Option<f64>>,
}

fn lawley(cfg: &RunConfig) -> Result<()> {
    let alphas = req(&cfg.alphas, "alphas")?;
    let n = req(&cfg.n, "n")?;
    match cfg.trials {
        Some(t) => emit(&harness::lawley_experiment(&alphas, n, t, cfg.seed.unwrap_or(0))?, cfg, "lawley"),
        None => {
            let predicted_means = (0..alphas.len())
                .map(|k| match spiked_pca::asymptotics::lawley_shift(&alphas, n, k) {
                    Ok(v) => Ok(Some(v)),
                    Err(Error::DegenerateSpectrum(_)) => Ok(None),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>>>()?;
            emit(&LawleyOutput { alphas, n, predicted_means }, cfg, "lawley")
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::SweepSigma(c) => sweep(&c.resolve()?, false),
        Command::SweepN(c) => sweep(&c.resolve()?, true),
        Command::Coverage(c) => coverage(&c.resolve()?),
        Command::Moments(c) => moments(&c.resolve()?),
        Command::Phase(c) => phase(&c.resolve()?),
        Command::ArrowheadSolve(c) => arrowhead(&c.resolve()?),
        Command::WishartBound(c) => wishart(&c.resolve()?),
        Command::Lawley(c) => lawley(&c.resolve()?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_precondition() { 2 } else { 1 })
        }
    }
}
