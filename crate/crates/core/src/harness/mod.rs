//! Monte Carlo experiments and export.

pub mod engine;
mod config;
mod experiments;
mod export;
mod sweep;

pub use engine::{sample_top_k, sample_top_value, TopK};
pub use sweep::{first_crossovers, sweep_n, sweep_sigma, SweepRecord, SweepSpec, TrialPoint};
pub use experiments::{
    bartlett_wishart, coverage_experiment, lambda_moment_study, lawley_experiment, moment_experiment,
    noise_norm_experiment, phase_experiment, sintheta_moment_study, wishart_experiment, CoverageReport, Empirical, Frequency,
    LambdaStudy, LawleyReport, MomentReport, NoiseNormReport, PhaseReport, SinThetaStudy, WishartReport,
};
pub use export::{
    export, read_summary_csv, records_json, render_svg, summary_csv, sweep_svg, trials_csv, Chart, Format, Series,
    SummaryRow, CSV_HEADER, TRIALS_HEADER,
};
pub use config::{parse_grid, parse_noise, RunConfig};
