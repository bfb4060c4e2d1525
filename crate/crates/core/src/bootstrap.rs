//! Nonparametric bootstrap standard errors.
//!
//! Replicate `i` resamples from the stream `(seed, i)`, so its draw depends
//! only on the seed and its index: skipping failed replicates or running
//! replicates on a thread pool never changes any other replicate.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dgp::DgpParams;
use crate::error::{Error, Result};
use crate::fit::{fit_dgp, fit_nb, FitConfig};
use crate::rng;
use crate::sample::CountSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailurePolicy {
    SkipAndCount,
    Abort,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub rng_seed: u64,
    pub failure_policy: FailurePolicy,
    pub retain_replicates: bool,
    /// Run replicates on the rayon pool. Results are identical either way.
    #[serde(skip)]
    pub parallel: bool,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            replicates: 1000,
            rng_seed: 0,
            failure_policy: FailurePolicy::SkipAndCount,
            retain_replicates: false,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapResult {
    pub parameter_names: Vec<String>,
    pub point_estimates: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub successful_replicates: usize,
    pub failed_replicates: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicate_estimates: Option<Vec<Vec<f64>>>,
}

/// A fitting procedure that maps a sample to a parameter vector.
pub trait Estimator: Sync {
    fn parameter_names(&self) -> Vec<String>;
    fn estimate(&self, sample: &CountSample) -> Result<Vec<f64>>;
}

/// DGP fit reporting (μ, α, λ).
#[derive(Debug, Clone)]
pub struct DgpEstimator {
    pub config: FitConfig,
}

impl DgpEstimator {
    pub fn vector(params: &DgpParams) -> Vec<f64> {
        vec![params.mu(), params.alpha(), params.lambda()]
    }
}

impl Estimator for DgpEstimator {
    fn parameter_names(&self) -> Vec<String> {
        vec!["mu".into(), "alpha".into(), "lambda".into()]
    }

    fn estimate(&self, sample: &CountSample) -> Result<Vec<f64>> {
        fit_dgp(sample, &self.config).map(|f| Self::vector(&f.params))
    }
}

/// Negative binomial fit reporting (r, m).
#[derive(Debug, Clone)]
pub struct NbEstimator {
    pub tolerance: f64,
}

impl Estimator for NbEstimator {
    fn parameter_names(&self) -> Vec<String> {
        vec!["r".into(), "m".into()]
    }

    fn estimate(&self, sample: &CountSample) -> Result<Vec<f64>> {
        fit_nb(sample, self.tolerance).map(|f| vec![f.params.r(), f.params.m()])
    }
}

/// The `replicate`-th resample: n draws with replacement.
pub fn resample(sample: &CountSample, seed: u64, replicate: usize) -> CountSample {
    let values = sample.values();
    let mut stream = rng::stream(seed, &[replicate as u64]);
    let drawn = (0..values.len())
        .map(|_| values[stream.random_range(0..values.len())])
        .collect();
    CountSample::new(drawn).expect("resample of a nonempty sample is nonempty")
}

/// Unbiased (divisor k − 1) standard deviation of each column.
///
/// Values are shifted by the column's first entry before the two-pass sum,
/// so a constant column gives exactly zero.
pub fn column_std_devs(rows: &[Vec<f64>], width: usize) -> Vec<f64> {
    let k = rows.len() as f64;
    (0..width)
        .map(|j| {
            let origin = rows[0][j];
            let mean = rows.iter().map(|r| r[j] - origin).sum::<f64>() / k;
            let ss: f64 = rows.iter().map(|r| (r[j] - origin - mean).powi(2)).sum();
            (ss / (k - 1.0)).sqrt()
        })
        .collect()
}

pub fn bootstrap_se<E: Estimator + ?Sized>(
    sample: &CountSample,
    estimator: &E,
    config: &BootstrapConfig,
) -> Result<BootstrapResult> {
    if config.replicates < 2 {
        return Err(Error::ParamDomain("bootstrap needs at least 2 replicates".into()));
    }
    let point_estimates = estimator.estimate(sample)?;
    let width = point_estimates.len();

    let run = |i: usize| estimator.estimate(&resample(sample, config.rng_seed, i));
    let outcomes: Vec<Result<Vec<f64>>> = if config.parallel {
        (0..config.replicates).into_par_iter().map(run).collect()
    } else {
        (0..config.replicates).map(run).collect()
    };

    let mut rows = Vec::with_capacity(outcomes.len());
    let mut failed = 0;
    for (replicate, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(row) => rows.push(row),
            Err(e) => match config.failure_policy {
                FailurePolicy::SkipAndCount => failed += 1,
                FailurePolicy::Abort => {
                    return Err(Error::ReplicateFailed {
                        replicate,
                        source: Box::new(e),
                    })
                }
            },
        }
    }
    if rows.len() < 2 {
        return Err(Error::InsufficientReplicates {
            successful: rows.len(),
            total: config.replicates,
        });
    }
    Ok(BootstrapResult {
        parameter_names: estimator.parameter_names(),
        standard_errors: column_std_devs(&rows, width),
        point_estimates,
        successful_replicates: rows.len(),
        failed_replicates: failed,
        replicate_estimates: config.retain_replicates.then_some(rows),
    })
}
