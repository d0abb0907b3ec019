//! Noise-level and sample-size sweeps with crossover tracking.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::engine::{dense_top, lift_dual, sample_top_k, TopK, DENSE_LIMIT};
use crate::asymptotics::{phase_prediction, AsymptoticPrediction};
use crate::bounds::{bound_report, default_deviations, BoundConfig, BoundReport, DEFAULT_TAIL};
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, Matrix};
use crate::model::{draw_row, SpikedModel};
use crate::rng::derive_seed;

/// Eigenpairs kept per grid point for continuation.
const TRACK_K: usize = 4;

/// A sweep over noise levels (`sweep_sigma`, `grid` holds σ values and
/// `model.noise_level` is ignored) or sample sizes (`sweep_n`, `grid` holds
/// integer `n` values and `n` is ignored).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub model: SpikedModel,
    pub n: usize,
    pub grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Subtract the sample mean before forming the covariance. Outside the
    /// theory; off by default.
    #[serde(default)]
    pub center: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if self.grid.is_empty() {
            return Err(Error::InvalidParameter("grid is empty".into()));
        }
        if self.grid.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(Error::InvalidParameter("grid values must be finite and >= 0".into()));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("grid must be strictly ascending".into()));
        }
        Ok(())
    }

    fn n_grid(&self) -> Result<Vec<usize>> {
        self.grid
            .iter()
            .map(|&g| {
                if g >= 1.0 && g.fract() == 0.0 {
                    Ok(g as usize)
                } else {
                    Err(Error::InvalidParameter(format!("n grid value {g} is not a positive integer")))
                }
            })
            .collect()
    }
}

/// One trial at one grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialPoint {
    pub lambda1: f64,
    pub lambda2: f64,
    /// `|⟨v_PCA, e₁⟩|`
    pub overlap: f64,
    pub sin_theta: f64,
    /// Rank (0 = top) of the eigenvector continued from the previous grid
    /// point's signal-tracking vector.
    pub tracked_rank: usize,
    /// Overlap between the tracked vector and its predecessor.
    pub tracking_overlap: f64,
    /// Rank of the kept eigenvector with the largest `|⟨v, e₁⟩|`.
    pub signal_rank: usize,
    /// The tracked vector left the top position at this grid point.
    pub crossover: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub grid_value: f64,
    pub p: usize,
    pub n: usize,
    pub sigma: f64,
    pub signal_norm: f64,
    pub centered: bool,
    /// Indexed by trial.
    pub trials: Vec<TrialPoint>,
    /// True when any trial crossed over at this grid point.
    pub crossover_flag: bool,
    pub theory: Option<AsymptoticPrediction>,
    /// Present when the bound preconditions hold at `κ = ‖v‖`.
    pub bounds: Option<BoundReport>,
}

fn mean(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = xs.collect();
    let m = v.iter().sum::<f64>() / v.len() as f64;
    if v.len() < 2 {
        return (m, 0.0);
    }
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    (m, (var / v.len() as f64).sqrt())
}

impl SweepRecord {
    /// Mean and standard error of `R`.
    pub fn overlap_stats(&self) -> (f64, f64) {
        mean(self.trials.iter().map(|t| t.overlap))
    }

    pub fn mean_overlap(&self) -> f64 {
        self.overlap_stats().0
    }

    pub fn mean_overlap_sq(&self) -> f64 {
        mean(self.trials.iter().map(|t| t.overlap * t.overlap)).0
    }

    pub fn lambda1_stats(&self) -> (f64, f64) {
        mean(self.trials.iter().map(|t| t.lambda1))
    }

    pub fn mean_lambda2(&self) -> f64 {
        mean(self.trials.iter().map(|t| t.lambda2)).0
    }

    pub fn mean_sin_theta(&self) -> f64 {
        mean(self.trials.iter().map(|t| t.sin_theta)).0
    }

    pub fn crossover_count(&self) -> usize {
        self.trials.iter().filter(|t| t.crossover).count()
    }
}

/// Continues the signal-tracking vector through successive grid points.
struct Tracker {
    prev: Option<Vec<f64>>,
    prev_rank: usize,
}

impl Tracker {
    fn new() -> Self {
        Self { prev: None, prev_rank: 0 }
    }

    fn step(&mut self, top: &TopK) -> TrialPoint {
        let (rank, tracking_overlap) = match &self.prev {
            None => (0, 1.0),
            Some(prev) => top
                .vectors
                .iter()
                .enumerate()
                .map(|(i, v)| (i, dot(prev, v).abs()))
                .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best }),
        };
        let crossover = self.prev.is_some() && self.prev_rank == 0 && rank != 0;
        if top.vectors[rank].iter().any(|x| *x != 0.0) {
            self.prev = Some(top.vectors[rank].clone());
        } else if self.prev.is_none() {
            self.prev = Some(top.vectors[0].clone());
        }
        self.prev_rank = rank;
        TrialPoint {
            lambda1: top.values[0],
            // With a single sample the remaining spectrum is zero.
            lambda2: match top.values.get(1) {
                Some(&l) => l,
                None if top.vectors[0].len() > 1 => 0.0,
                None => f64::NAN,
            },
            overlap: top.overlap(0),
            sin_theta: top.sin_theta(0),
            tracked_rank: rank,
            tracking_overlap,
            signal_rank: (0..top.vectors.len())
                .max_by(|&a, &b| top.overlap(a).total_cmp(&top.overlap(b)).then(b.cmp(&a)))
                .unwrap_or(0),
            crossover,
        }
    }
}

/// Latents of one trial: `u` and the `n × p` noise matrix.
fn draw_latents(model: &SpikedModel, n: usize, seed: u64) -> (Vec<f64>, Matrix) {
    let p = model.dimension;
    let mut xi = Matrix::zeros(n, p);
    let u = (0..n)
        .map(|nu| draw_row(model.latent_law, p, seed, nu, xi.row_mut(nu)))
        .collect();
    (u, xi)
}

fn center_columns(x: &mut Matrix) {
    let n = x.rows() as f64;
    let mut mean = vec![0.0; x.cols()];
    for i in 0..x.rows() {
        axpy(1.0 / n, x.row(i), &mut mean);
    }
    for i in 0..x.rows() {
        axpy(-1.0, &mean, x.row_mut(i));
    }
}

fn center_vec(u: &mut [f64]) {
    let m = u.iter().sum::<f64>() / u.len() as f64;
    u.iter_mut().for_each(|x| *x -= m);
}

/// `X(σ) = ‖v‖ u e₁ᵀ + σΞ`
fn assemble_at(signal_norm: f64, sigma: f64, u: &[f64], xi: &Matrix) -> Matrix {
    let mut x = xi.clone();
    x.scale(sigma);
    for (i, &ui) in u.iter().enumerate() {
        x[(i, 0)] += signal_norm * ui;
    }
    x
}

/// `S(σ) = A + σB + σ²C` in whichever space is smaller.
struct Pieces {
    a: Matrix,
    b: Matrix,
    c: Matrix,
    dual: bool,
}

impl Pieces {
    fn new(signal_norm: f64, u: &[f64], xi: &Matrix) -> Self {
        let (n, p) = (xi.rows(), xi.cols());
        let nf = n as f64;
        let vn = signal_norm;
        if n < p {
            let xi0 = xi.column(0);
            let a = Matrix::from_fn(n, n, |i, j| vn * vn * u[i] * u[j] / nf);
            let b = Matrix::from_fn(n, n, |i, j| vn * (u[i] * xi0[j] + xi0[i] * u[j]) / nf);
            Self { a, b, c: xi.gram_rows(nf), dual: true }
        } else {
            let mut a = Matrix::zeros(p, p);
            a[(0, 0)] = vn * vn * dot(u, u) / nf;
            let r: Vec<f64> = xi.tr_matvec(u).iter().map(|x| x * vn / nf).collect();
            let mut b = Matrix::zeros(p, p);
            for j in 0..p {
                b[(0, j)] += r[j];
                b[(j, 0)] += r[j];
            }
            Self { a, b, c: xi.gram_columns(nf), dual: false }
        }
    }

    fn at(&self, sigma: f64) -> Matrix {
        let mut m = self.a.clone();
        m.add_scaled(sigma, &self.b);
        m.add_scaled(sigma * sigma, &self.c);
        m
    }
}

fn sigma_trial(spec: &SweepSpec, trial: usize) -> Result<Vec<TrialPoint>> {
    let model = &spec.model;
    let seed = derive_seed(spec.seed, &[trial as u64]);
    let (mut u, mut xi) = draw_latents(model, spec.n, seed);
    if spec.center {
        center_vec(&mut u);
        center_columns(&mut xi);
    }
    let vn = model.signal_norm;
    let large = spec.n.min(model.dimension) > DENSE_LIMIT;
    let pieces = (!large).then(|| Pieces::new(vn, &u, &xi));
    let mut tracker = Tracker::new();
    let mut out = Vec::with_capacity(spec.grid.len());
    for &sigma in &spec.grid {
        let top = match &pieces {
            None => sample_top_k(&assemble_at(vn, sigma, &u, &xi), TRACK_K)?,
            Some(pc) => {
                let (values, vecs) = dense_top(&pc.at(sigma), TRACK_K)?;
                if pc.dual {
                    let uv = u.clone();
                    lift_dual(values, vecs, |w| {
                        let mut v = xi.tr_matvec(w);
                        v.iter_mut().for_each(|x| *x *= sigma);
                        v[0] += vn * dot(&uv, w);
                        v
                    })
                } else {
                    TopK { values, vectors: vecs }
                }
            }
        };
        out.push(tracker.step(&top));
    }
    Ok(out)
}

/// Top eigenpairs for the leading `n` rows of `x`, reusing `gram`
/// (`x xᵀ`, unscaled) when the dual is smaller.
fn prefix_top(x: &Matrix, gram: Option<&Matrix>, running: &mut PrimalSum, n: usize) -> Result<TopK> {
    let p = x.cols();
    let nf = n as f64;
    let prefix = || Matrix::from_row_major(n, p, x.as_slice()[..n * p].to_vec());
    if n.min(p) > DENSE_LIMIT {
        return sample_top_k(&prefix()?, TRACK_K);
    }
    if n < p {
        let g = gram.expect("dual Gram precomputed");
        let block = Matrix::from_fn(n, n, |i, j| g[(i, j)] / nf);
        let (values, vecs) = dense_top(&block, TRACK_K)?;
        Ok(lift_dual(values, vecs, |w| {
            let mut v = vec![0.0; p];
            for (i, &wi) in w.iter().enumerate() {
                axpy(wi, x.row(i), &mut v);
            }
            v
        }))
    } else {
        let s = running.advance(x, n);
        let (values, vectors) = dense_top(&s, TRACK_K)?;
        Ok(TopK { values, vectors })
    }
}

/// Running `Σ x xᵀ` over a growing row prefix.
struct PrimalSum {
    sum: Matrix,
    rows: usize,
}

impl PrimalSum {
    fn advance(&mut self, x: &Matrix, n: usize) -> Matrix {
        if n > self.rows {
            let block = Matrix::from_row_major(
                n - self.rows,
                x.cols(),
                x.as_slice()[self.rows * x.cols()..n * x.cols()].to_vec(),
            )
            .expect("row slice");
            self.sum.add_scaled(1.0, &block.gram_columns(1.0));
            self.rows = n;
        }
        let mut s = self.sum.clone();
        s.scale(1.0 / n as f64);
        s
    }
}

fn n_trial(spec: &SweepSpec, ns: &[usize], trial: usize) -> Result<Vec<TrialPoint>> {
    let model = &spec.model;
    let n_max = *ns.last().expect("non-empty grid");
    let seed = derive_seed(spec.seed, &[trial as u64]);
    let (u, xi) = draw_latents(model, n_max, seed);
    let x_full = assemble_at(model.signal_norm, model.noise_level, &u, &xi);
    let p = model.dimension;
    let gram = (!spec.center && ns.iter().any(|&n| n < p) && n_max.min(p) <= DENSE_LIMIT)
        .then(|| x_full.gram_rows(1.0));
    let mut running = PrimalSum { sum: Matrix::zeros(p, p), rows: 0 };
    let mut tracker = Tracker::new();
    let mut out = Vec::with_capacity(ns.len());
    for &n in ns {
        let top = if spec.center {
            let mut x = Matrix::from_row_major(n, p, x_full.as_slice()[..n * p].to_vec())?;
            center_columns(&mut x);
            sample_top_k(&x, TRACK_K)?
        } else {
            prefix_top(&x_full, gram.as_ref(), &mut running, n)?
        };
        out.push(tracker.step(&top));
    }
    Ok(out)
}

fn overlays(
    model: &SpikedModel,
    n: usize,
    sigma: f64,
    devs: Option<(f64, f64, f64)>,
) -> (Option<AsymptoticPrediction>, Option<BoundReport>) {
    let p = model.dimension;
    let vn = model.signal_norm;
    let theory = (vn > 0.0).then(|| phase_prediction(vn, sigma, p as f64 / n as f64).ok()).flatten();
    let bounds = devs
        .filter(|_| vn > 0.0)
        .and_then(|d| BoundConfig::new(d, p, n, sigma, vn).ok())
        .and_then(|cfg| bound_report(&cfg).ok())
        .filter(|r| r.condition_holds && r.lambda_lower.is_some());
    (theory, bounds)
}

fn merge(
    spec: &SweepSpec,
    traces: Vec<Vec<TrialPoint>>,
    point: impl Fn(usize) -> (f64, usize, f64),
) -> Vec<SweepRecord> {
    let devs = default_deviations(spec.model.dimension, DEFAULT_TAIL).ok();
    (0..spec.grid.len())
        .map(|g| {
            let (grid_value, n, sigma) = point(g);
            let trials: Vec<TrialPoint> = traces.iter().map(|t| t[g]).collect();
            let (theory, bounds) = overlays(&spec.model, n, sigma, devs);
            SweepRecord {
                grid_value,
                p: spec.model.dimension,
                n,
                sigma,
                signal_norm: spec.model.signal_norm,
                centered: spec.center,
                crossover_flag: trials.iter().any(|t| t.crossover),
                trials,
                theory,
                bounds,
            }
        })
        .collect()
}

/// Sweeps the noise level with one realization of the latents per trial,
/// so each trial traces a continuous path in σ.
pub fn sweep_sigma(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    if spec.n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let traces = (0..spec.trials)
        .into_par_iter()
        .map(|t| sigma_trial(spec, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(merge(spec, traces, |g| (spec.grid[g], spec.n, spec.grid[g])))
}

/// Sweeps the sample size. Samples are nested: the first `n` rows at one
/// grid point are the first `n` rows at every larger one.
pub fn sweep_n(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    let ns = spec.n_grid()?;
    let traces = (0..spec.trials)
        .into_par_iter()
        .map(|t| n_trial(spec, &ns, t))
        .collect::<Result<Vec<_>>>()?;
    let sigma = spec.model.noise_level;
    Ok(merge(spec, traces, |g| (spec.grid[g], ns[g], sigma)))
}

/// First grid value at which each trial crossed over (`None` if never).
pub fn first_crossovers(records: &[SweepRecord]) -> Vec<Option<f64>> {
    let trials = records.first().map_or(0, |r| r.trials.len());
    (0..trials)
        .map(|t| records.iter().find(|r| r.trials[t].crossover).map(|r| r.grid_value))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_covariance, sample_model, LatentLaw};
    use crate::eig::top_pair;

    fn spec(grid: Vec<f64>) -> SweepSpec {
        SweepSpec {
            model: SpikedModel::new(2.8, 0.0, 30, LatentLaw::Gaussian).unwrap(),
            n: 12,
            grid,
            trials: 3,
            seed: 5,
            center: false,
        }
    }

    #[test]
    fn zero_noise_is_exact() {
        let r = sweep_sigma(&spec(vec![0.0])).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].trials.iter().all(|t| t.overlap == 1.0 && !t.crossover));
    }

    #[test]
    fn dual_pieces_match_direct_covariance() {
        let s = spec(vec![0.7]);
        let r = sweep_sigma(&s).unwrap();
        let seed = derive_seed(s.seed, &[1]);
        let real = sample_model(&s.model.with_noise(0.7), s.n, seed).unwrap();
        let pca = top_pair(&sample_covariance(&real)).unwrap();
        assert!((r[0].trials[1].lambda1 - pca.lambda_pca).abs() < 1e-10);
        assert!((r[0].trials[1].overlap - pca.overlap).abs() < 1e-9);
    }

    #[test]
    fn primal_path_matches_dual() {
        let mut s = spec(vec![0.3, 1.1]);
        s.model.dimension = 8;
        let r = sweep_sigma(&s).unwrap();
        let seed = derive_seed(s.seed, &[0]);
        let real = sample_model(&s.model.with_noise(1.1), s.n, seed).unwrap();
        let pca = top_pair(&sample_covariance(&real)).unwrap();
        assert!((r[1].trials[0].lambda1 - pca.lambda_pca).abs() < 1e-10);
    }

    #[test]
    fn nested_prefix_matches_fresh_sample() {
        let mut s = spec(vec![5.0, 20.0, 40.0]);
        s.model.noise_level = 1.0;
        let r = sweep_n(&s).unwrap();
        let seed = derive_seed(s.seed, &[2]);
        for (g, &n) in [5usize, 20, 40].iter().enumerate() {
            let real = sample_model(&s.model, n, seed).unwrap();
            let pca = top_pair(&sample_covariance(&real)).unwrap();
            assert!((r[g].trials[2].lambda1 - pca.lambda_pca).abs() < 1e-9);
        }
    }

    #[test]
    fn grid_must_ascend() {
        assert!(sweep_sigma(&spec(vec![1.0, 0.5])).is_err());
        let mut s = spec(vec![2.5]);
        s.model.noise_level = 1.0;
        assert!(sweep_n(&s).is_err());
    }
}
