//! Structural invariants, checked on random inputs.

use proptest::prelude::*;

use spiked_pca::asymptotics::{
    noise_norm_limit, overlap_functional, phase_prediction, spike_transform, spike_transform_derivative,
    spike_transform_second_derivative, stieltjes_solve, NoiseDensity,
};
use spiked_pca::bounds::{bound_report, wishart_eps, wishart_tail, BoundConfig};
use spiked_pca::eig::{arrowhead_eig, sym_eig, ArrowheadMatrix};
use spiked_pca::harness::{read_summary_csv, records_json, summary_csv, sweep_n, sweep_sigma, SweepSpec};
use spiked_pca::linalg::{dot, norm2};
use spiked_pca::model::{
    decompose_covariance, sample_covariance, sample_model, CovarianceDecomposition, LatentLaw, SpikedModel,
};
use spiked_pca::perturbation::taylor_expand;
use spiked_pca::rng::{gaussian, stream};
use spiked_pca::special::{abs_normal_tail, chisq_upper, normal_cdf};
use spiked_pca::Matrix;

fn law() -> impl Strategy<Value = LatentLaw> {
    prop::sample::select(LatentLaw::ALL.to_vec())
}

fn random_symmetric(p: usize, seed: u64) -> Matrix {
    let mut r = stream(seed, &[]);
    let mut m = Matrix::zeros(p, p);
    for i in 0..p {
        for j in 0..=i {
            let x = gaussian(&mut r);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    m
}

fn random_arrowhead(p: usize, seed: u64) -> ArrowheadMatrix {
    let mut r = stream(seed, &[1]);
    let tail: Vec<f64> = (1..p).map(|_| gaussian(&mut r)).collect();
    let shaft: Vec<f64> = (1..p).map(|_| gaussian(&mut r)).collect();
    ArrowheadMatrix::new(gaussian(&mut r), shaft, tail).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decomposition_reconstructs_covariance(
        norm in 0.1f64..5.0, sigma in 0.0f64..3.0, p in 2usize..15, n in 1usize..40, seed: u64, law in law()
    ) {
        let model = SpikedModel::new(norm, sigma, p, law).unwrap();
        let real = sample_model(&model, n, seed).unwrap();
        let s = sample_covariance(&real);
        let d = match decompose_covariance(&real, &model) {
            Ok(d) => d,
            Err(_) => return Ok(()),
        };
        let diff = {
            let mut r = d.reconstruct(sigma);
            r.add_scaled(-1.0, &s);
            r.max_abs()
        };
        prop_assert!(diff <= 1e-12 * s.max_abs().max(1e-300));
    }

    #[test]
    fn sampling_is_deterministic(p in 1usize..10, n in 1usize..20, seed: u64, law in law()) {
        let model = SpikedModel::new(1.0, 0.5, p, law).unwrap();
        let a = sample_model(&model, n, seed).unwrap();
        let b = sample_model(&model, n, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn sym_eig_reconstructs(p in 1usize..25, seed: u64) {
        let m = random_symmetric(p, seed);
        let e = sym_eig(&m).unwrap();
        let scale = m.max_abs().max(1.0);
        for i in 0..p {
            for j in 0..p {
                let mut acc = 0.0;
                for k in 0..p {
                    acc += e.vectors[(i, k)] * e.values[k] * e.vectors[(j, k)];
                }
                prop_assert!((acc - m[(i, j)]).abs() <= 1e-12 * scale * p as f64);
                let delta = if i == j { 1.0 } else { 0.0 };
                let g = dot(&e.vector(i), &e.vector(j));
                prop_assert!((g - delta).abs() <= 1e-12 * p as f64);
            }
        }
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn arrowhead_invariants(p in 2usize..120, seed: u64) {
        let a = random_arrowhead(p, seed);
        let e = arrowhead_eig(&a).unwrap();
        let dense = a.to_dense();
        let norm = dense.frobenius_norm();

        let trace: f64 = e.values.iter().sum();
        let want = a.head + a.tail.iter().sum::<f64>();
        prop_assert!((trace - want).abs() <= 1e-10 * norm);
        let fro: f64 = e.values.iter().map(|l| l * l).sum();
        let want = a.head * a.head
            + a.tail.iter().map(|t| t * t).sum::<f64>()
            + 2.0 * a.shaft.iter().map(|b| b * b).sum::<f64>();
        prop_assert!((fro - want).abs() <= 1e-9 * want);

        // Strict interlacing with the sorted tail.
        let mut d = a.tail.clone();
        d.sort_by(|x, y| y.total_cmp(x));
        prop_assert!(e.values[0] > d[0]);
        for j in 0..d.len() {
            prop_assert!(e.values[j] >= d[j] && d[j] >= e.values[j + 1]);
        }

        let oracle = sym_eig(&dense).unwrap();
        for i in 0..p {
            prop_assert!((e.values[i] - oracle.values[i]).abs() <= 1e-10 * oracle.values[0].abs().max(1.0));
            let v = e.vector(i);
            let av = dense.matvec(&v);
            let res: f64 = av.iter().zip(&v).map(|(x, y)| (x - e.values[i] * y).powi(2)).sum::<f64>().sqrt();
            prop_assert!(res <= 1e-9 * norm);
            prop_assert!((norm2(&v) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn arrowhead_vectors_match_dense_up_to_sign(p in 2usize..60, seed: u64) {
        let a = random_arrowhead(p, seed);
        let e = arrowhead_eig(&a).unwrap();
        let oracle = sym_eig(&a.to_dense()).unwrap();
        for i in 0..p {
            let gap = [i.wrapping_sub(1), i + 1]
                .iter()
                .filter(|&&j| j < p)
                .map(|&j| (oracle.values[j] - oracle.values[i]).abs())
                .fold(f64::INFINITY, f64::min);
            if gap < 1e-4 {
                continue;
            }
            let c = dot(&e.vector(i), &oracle.vector(i)).abs();
            prop_assert!((1.0 - c) <= 1e-8, "i = {}, |cos| = {}", i, c);
        }
    }

    #[test]
    fn lambda_bounds_are_monotone_in_sigma(kappa in 1.0f64..6.0, n in 10usize..500, q in 0.0f64..0.7) {
        // The lower bound rises over short stretches once (p−1)/n nears 1.
        let p = 1 + ((q * n as f64) as usize).max(1);
        let mut prev: Option<(f64, f64)> = None;
        for k in 1..=60 {
            let sigma = kappa * k as f64 / 200.0;
            let cfg = BoundConfig::with_defaults(p, n, sigma, kappa).unwrap();
            let r = bound_report(&cfg).unwrap();
            match (r.lambda_lower, r.lambda_upper) {
                (Some(lo), Some(hi)) => {
                    if let Some((plo, phi)) = prev {
                        prop_assert!(lo <= plo * (1.0 + 1e-12), "lower rose at σ = {}", sigma);
                        prop_assert!(hi >= phi * (1.0 - 1e-12), "upper fell at σ = {}", sigma);
                    }
                    prev = Some((lo, hi));
                }
                _ => break,
            }
        }
    }

    #[test]
    fn upper_bound_is_monotone_for_any_aspect(kappa in 1.0f64..6.0, p in 2usize..400, n in 10usize..500) {
        let mut prev = f64::NEG_INFINITY;
        for k in 1..=60 {
            let cfg = BoundConfig::with_defaults(p, n, kappa * k as f64 / 200.0, kappa).unwrap();
            match bound_report(&cfg).unwrap().lambda_upper {
                Some(hi) => {
                    prop_assert!(hi >= prev);
                    prev = hi;
                }
                None => break,
            }
        }
    }

    #[test]
    fn one_dof_chisq_is_abs_normal(s in 0.0f64..6.0) {
        prop_assert!((chisq_upper(1, s * s).unwrap() - abs_normal_tail(s)).abs() <= 1e-10);
    }

    #[test]
    fn wishart_tail_at_unit_alpha_square(p in 1usize..3000) {
        let t = wishart_tail(p, p, 1.0).unwrap();
        prop_assert!((t - wishart_eps(p)).abs() <= 1e-12 * wishart_eps(p));
    }

    #[test]
    fn taylor_corrections_are_orthogonal_to_signal(p in 2usize..20, n in 1usize..40, seed: u64, law in law()) {
        let model = SpikedModel::new(1.3, 0.2, p, law).unwrap();
        let real = sample_model(&model, n, seed).unwrap();
        if let Ok(d) = decompose_covariance(&real, &model) {
            let t = taylor_expand(&d).unwrap();
            prop_assert_eq!(t.vector_terms[1][0], 0.0);
            prop_assert_eq!(t.vector_terms[2][0], 0.0);
        }
    }

    #[test]
    fn point_mass_matches_single_spike(snr in 0.2f64..6.0, c in 0.1f64..5.0) {
        // α = snr + 1 in units of σ²; separated when snr² > c.
        prop_assume!(snr * snr > c * 1.05);
        let h = NoiseDensity::point_mass(1.0).unwrap();
        let alpha = snr + 1.0;
        let t = spike_transform(alpha, c, &h).unwrap();
        let p = phase_prediction(snr.sqrt(), 1.0, c).unwrap();
        prop_assert!((t - p.lambda_limit).abs() <= 1e-8 * t);
        let r2 = overlap_functional(snr.sqrt(), 1.0, c).unwrap();
        prop_assert!((r2 - p.overlap_sq).abs() <= 1e-8);
    }

    #[test]
    fn sweep_values_are_ordered(
        p in 2usize..30, n in 1usize..30, seed: u64, norm in 0.0f64..3.0, law in law()
    ) {
        let spec = SweepSpec {
            model: SpikedModel::new(norm, 1.0, p, law).unwrap(),
            n,
            grid: vec![0.0, 0.5, 1.5],
            trials: 3,
            seed,
            center: false,
        };
        for r in sweep_sigma(&spec).unwrap() {
            for t in &r.trials {
                prop_assert!((0.0..=1.0).contains(&t.overlap));
                prop_assert!(t.lambda1 >= t.lambda2);
            }
        }
    }
}

#[test]
fn lower_bound_can_rise_when_p_exceeds_n() {
    let lower = |sigma: f64| {
        let cfg = BoundConfig::with_defaults(396, 45, sigma, 1.0).unwrap();
        bound_report(&cfg).unwrap().lambda_lower.unwrap()
    };
    assert!(lower(0.085) > lower(0.080));
}

fn noise_densities() -> Vec<NoiseDensity> {
    vec![NoiseDensity::point_mass(1.0).unwrap(), NoiseDensity::uniform(0.5, 1.5).unwrap()]
}

#[test]
fn stieltjes_inverts_spike_transform() {
    let mut checked = 0;
    for h in noise_densities() {
        for c in [0.5, 1.0, 4.0] {
            let star = noise_norm_limit(c, &h).unwrap().alpha_star;
            for alpha in [2.0, 3.0, 5.0, 10.0] {
                // Below α* the spike is not separated and T(α) is not on the physical branch.
                if alpha <= star * (1.0 + 1e-6) {
                    continue;
                }
                let z = spike_transform(alpha, c, &h).unwrap();
                let s = stieltjes_solve(z, c, &h).unwrap();
                assert!((s.m_bar + 1.0 / alpha).abs() <= 1e-8, "α = {alpha}, c = {c}: {}", s.m_bar);
                assert!((s.m_bar - (-(1.0 - c) / z + c * s.m)).abs() <= 1e-14);
                checked += 1;
            }
        }
    }
    assert!(checked >= 16);
}

#[test]
fn noise_norm_is_a_minimum_of_the_transform() {
    for h in noise_densities() {
        for c in [0.1, 0.5, 1.0, 4.0, 25.0] {
            let a = noise_norm_limit(c, &h).unwrap();
            assert!(spike_transform_derivative(a.alpha_star, c, &h).unwrap().abs() <= 1e-8);
            assert!(spike_transform_second_derivative(a.alpha_star, c, &h).unwrap() > 0.0);
        }
    }
}

#[test]
fn alpha_increases_with_lambda_above_support() {
    for h in noise_densities() {
        for c in [0.5, 1.0, 4.0] {
            let a = noise_norm_limit(c, &h).unwrap().alpha_star;
            let mut prev = spike_transform(a, c, &h).unwrap();
            for k in 1..200 {
                let alpha = a * (1.0 + k as f64 * 0.02);
                let t = spike_transform(alpha, c, &h).unwrap();
                assert!(t > prev, "T not increasing at α = {alpha}");
                prev = t;
            }
        }
    }
}

#[test]
fn beta_diagonal_is_scaled_chisq() {
    let (p, n, reps) = (50, 20, 400);
    let model = SpikedModel::new(1.0, 1.0, p, LatentLaw::Gaussian).unwrap();
    let mut xs = Vec::with_capacity(p * reps);
    for seed in 0..reps as u64 {
        let d = decompose_covariance(&sample_model(&model, n, seed).unwrap(), &model).unwrap();
        xs.extend((0..p).map(|j| n as f64 * d.beta[(j, j)]));
    }
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let nf = n as f64;
    // χ²_n: mean n, variance 2n, Var(s²) ≈ (μ₄ − σ⁴)/m with μ₄ = 12n(n+4).
    assert!((mean - nf).abs() <= 5.0 * (2.0 * nf / m).sqrt(), "mean {mean}");
    let mu4 = 12.0 * nf * (nf + 4.0);
    assert!((var - 2.0 * nf).abs() <= 5.0 * ((mu4 - 4.0 * nf * nf) / m).sqrt(), "variance {var}");
}

#[test]
fn scaled_rho_is_standard_normal_given_u() {
    let (p, n, reps) = (100, 30, 100);
    let mut r = stream(5, &[]);
    let u: Vec<f64> = (0..n).map(|_| gaussian(&mut r)).collect();
    let mut zs = Vec::with_capacity(p * reps);
    for rep in 0..reps as u64 {
        let mut g = stream(6, &[rep]);
        let xi = Matrix::from_fn(n, p, |_, _| gaussian(&mut g));
        let d = CovarianceDecomposition::from_latents(1.0, &u, &xi).unwrap();
        zs.extend(d.rho.iter().map(|x| (n as f64).sqrt() * x));
    }
    zs.sort_by(f64::total_cmp);
    let m = zs.len() as f64;
    let ks = zs
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let f = normal_cdf(z);
            (f - i as f64 / m).abs().max(((i + 1) as f64 / m - f).abs())
        })
        .fold(0.0, f64::max);
    // Asymptotic critical value at level 1e-3.
    assert!(ks < 1.949 / m.sqrt(), "KS statistic {ks}");
}

fn small_spec() -> SweepSpec {
    SweepSpec {
        model: SpikedModel::new(2.0, 1.0, 40, LatentLaw::Gaussian).unwrap(),
        n: 30,
        grid: vec![0.1, 0.7, 1.3, 2.0],
        trials: 6,
        seed: 17,
        center: false,
    }
}

#[test]
fn summary_csv_round_trips() {
    let records = sweep_sigma(&small_spec()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    std::fs::write(&path, summary_csv(&records).unwrap()).unwrap();
    let rows = read_summary_csv(&path).unwrap();
    assert_eq!(rows.len(), records.len());
    for (row, rec) in rows.iter().zip(&records) {
        assert_eq!(*row, spiked_pca::harness::SummaryRow::from_record(rec));
    }
}

#[test]
fn identical_specs_give_identical_bytes() {
    let a = sweep_sigma(&small_spec()).unwrap();
    let b = sweep_sigma(&small_spec()).unwrap();
    assert_eq!(summary_csv(&a).unwrap(), summary_csv(&b).unwrap());
    assert_eq!(records_json(&a).unwrap(), records_json(&b).unwrap());
    let mut spec = small_spec();
    spec.grid = vec![10.0, 20.0, 60.0];
    let a = sweep_n(&spec).unwrap();
    let b = sweep_n(&spec).unwrap();
    assert_eq!(summary_csv(&a).unwrap(), summary_csv(&b).unwrap());
}

#[test]
fn zero_noise_sweep_is_exact() {
    let mut spec = small_spec();
    spec.grid = vec![0.0];
    let r = &sweep_sigma(&spec).unwrap()[0];
    assert!(r.trials.iter().all(|t| t.overlap == 1.0 && !t.crossover));
}

#[test]
fn no_signal_overlap_is_a_random_coordinate() {
    let p = 50;
    let spec = SweepSpec {
        model: SpikedModel::new(0.0, 1.0, p, LatentLaw::Gaussian).unwrap(),
        n: 0,
        grid: vec![200.0],
        trials: 400,
        seed: 3,
        center: false,
    };
    let r = &sweep_n(&spec).unwrap()[0];
    // |first coordinate| of a uniform unit vector: E = Γ(p/2)/(√π Γ((p+1)/2)), E[x²] = 1/p.
    let mean_sq = r.mean_overlap_sq();
    let se = (2.0 / (p as f64 * p as f64) / r.trials.len() as f64).sqrt();
    assert!((mean_sq - 1.0 / p as f64).abs() < 5.0 * se, "mean R² {mean_sq}");
}
