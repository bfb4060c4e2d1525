//! Maximum-likelihood fitting of the discrete generalised Pareto and negative
//! binomial distributions to claim-count data.
//!
//! The pipeline:
//!
//! 1. ingest a frequency table or raw sample ([`data`]),
//! 2. seed the DGP fit from the relative frequencies at the minimum and the
//!    next observed value ([`init`]),
//! 3. maximise the likelihoods ([`fit`]): simulated annealing plus a simplex
//!    polish for the DGP, a profile-score root solve for the negative binomial,
//! 4. estimate standard errors by resampling ([`bootstrap`]),
//! 5. rank the models by AIC and BIC ([`select`]).
//!
//! ```
//! use dgpfit::{fit_dgp, fit_nb, score_model, compare, DgpParams, FitConfig};
//!
//! let truth = DgpParams::new(1.5, 0.8, 0).unwrap();
//! let sample = truth.sample(7, 2_000).unwrap();
//! let config = FitConfig { annealing_iterations: 2_000, ..FitConfig::default() };
//! let dgp = fit_dgp(&sample, &config).unwrap();
//! let nb = fit_nb(&sample, 1e-8).unwrap();
//! let n = sample.len() as u64;
//! let report = compare(&[
//!     score_model("dgp", dgp.loglik, 2, n),
//!     score_model("nb", nb.loglik, 2, n),
//! ]).unwrap();
//! assert_eq!(report.winner_aic, "dgp");
//! ```

#![forbid(unsafe_code)]

pub mod bootstrap;
pub mod data;
pub mod dgp;
pub mod error;
pub mod fit;
pub mod init;
pub mod nb;
pub mod optim;
pub mod rng;
mod roots;
pub mod sample;
pub mod select;
pub mod special;

pub use bootstrap::{bootstrap_se, BootstrapConfig, BootstrapResult, DgpEstimator, Estimator, FailurePolicy, NbEstimator};
pub use data::{describe, parse_frequency_csv, parse_input, Dataset, DescriptiveStats, FrequencyTable};
pub use dgp::{DgpParams, DgpScore};
pub use error::{Error, Result};
pub use fit::{fit_dgp, fit_nb, profile_score_r, FitConfig, FitResult, MuMode};
pub use init::{leading_frequencies, solve_init, LeadingFrequencies};
pub use nb::NbParams;
pub use sample::CountSample;
pub use select::{compare, score_model, ComparisonReport, ModelScore};
