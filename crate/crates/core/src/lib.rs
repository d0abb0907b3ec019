//! Spiked covariance PCA: sampling, finite-sample bounds, small-noise
//! expansions, random-matrix limits and a Monte Carlo harness that checks
//! them against simulation.
//!
//! The model is `x = u‖v‖e₁ + σξ` with a scalar latent `u` (zero mean, unit
//! variance) and standard Gaussian noise `ξ ∈ ℝᵖ`. The sample covariance
//! `S_n = (1/n)Σ x xᵀ` is uncentered.
//!
//! ```
//! use spiked_pca::{model::{sample_model, sample_covariance, LatentLaw, SpikedModel}, eig::top_pair};
//!
//! let model = SpikedModel::new(2.0, 0.5, 20, LatentLaw::Gaussian).unwrap();
//! let real = sample_model(&model, 100, 7).unwrap();
//! let pca = top_pair(&sample_covariance(&real)).unwrap();
//! assert!(pca.overlap > 0.8);
//! ```

pub mod asymptotics;
pub mod bounds;
pub mod eig;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod perturbation;
pub mod quad;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
pub use linalg::Matrix;
