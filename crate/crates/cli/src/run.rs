//! Fit orchestration: one task per group (and the pooled sample), each with
//! seeds derived from the run seed and the task's position.

use dgpfit::bootstrap::{bootstrap_se, BootstrapConfig, DgpEstimator, FailurePolicy, NbEstimator};
use dgpfit::rng::derive_seed;
use dgpfit::select::{compare, score_model};
use dgpfit::{fit_dgp, fit_nb, CountSample, DgpParams, FitConfig};
use rayon::prelude::*;

use crate::report::{BootstrapSummary, GroupReport, ModelFailure, ModelFit, Parameter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModelChoice {
    Dgp,
    Nb,
    Both,
}

impl ModelChoice {
    pub fn name(self) -> &'static str {
        match self {
            ModelChoice::Dgp => "dgp",
            ModelChoice::Nb => "nb",
            ModelChoice::Both => "both",
        }
    }

    pub fn models(self) -> Vec<&'static str> {
        match self {
            ModelChoice::Dgp => vec!["dgp"],
            ModelChoice::Nb => vec!["nb"],
            ModelChoice::Both => vec!["dgp", "nb"],
        }
    }
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub models: Vec<&'static str>,
    pub bootstrap: Option<usize>,
    pub seed: u64,
    pub fit: FitConfig,
    pub parallel: bool,
    pub scores_only: bool,
}

/// Task index used for the pooled sample.
pub const AGGREGATE_TASK: u64 = u64::MAX;
const DGP_STREAM: u64 = 0;
const NB_STREAM: u64 = 1;
const FIT_PURPOSE: u64 = 0;
const BOOTSTRAP_PURPOSE: u64 = 1;

fn with_se(names: &[&str], values: &[f64], se: Option<&[f64]>) -> Vec<Parameter> {
    names
        .iter()
        .enumerate()
        .map(|(i, name)| Parameter {
            name: name.to_string(),
            estimate: values[i],
            standard_error: se.map(|s| s[i]),
        })
        .collect()
}

fn bootstrap_config(settings: &Settings, replicates: usize, seed: u64) -> BootstrapConfig {
    BootstrapConfig {
        replicates,
        rng_seed: seed,
        failure_policy: FailurePolicy::SkipAndCount,
        retain_replicates: false,
        parallel: settings.parallel,
    }
}

fn fit_dgp_model(sample: &CountSample, settings: &Settings, task: u64) -> dgpfit::Result<ModelFit> {
    let fit_seed = derive_seed(settings.seed, &[task, DGP_STREAM, FIT_PURPOSE]);
    let config = FitConfig {
        rng_seed: fit_seed,
        ..settings.fit.clone()
    };
    let fit = fit_dgp(sample, &config)?;
    let mut diagnostics = fit.diagnostics.clone();
    let names = ["mu", "alpha", "lambda"];
    let point = DgpEstimator::vector(&fit.params);
    let (se, bootstrap) = run_bootstrap(
        sample,
        &DgpEstimator { config },
        settings,
        derive_seed(settings.seed, &[task, DGP_STREAM, BOOTSTRAP_PURPOSE]),
        &mut diagnostics,
    );
    let d = settings.fit.mu_mode.dgp_parameter_count();
    let score = score_model("dgp", fit.loglik, d, sample.len() as u64);
    Ok(ModelFit {
        model: "dgp",
        parameter_count: d,
        parameters: with_se(&names, &point, se.as_deref()),
        loglik: fit.loglik,
        aic: score.aic,
        bic: score.bic,
        converged: fit.converged,
        iterations: fit.iterations,
        fit_seed: Some(fit_seed),
        initial_values: fit
            .seed_params
            .as_ref()
            .map(|p: &DgpParams| with_se(&names, &DgpEstimator::vector(p), None)),
        bootstrap,
        diagnostics,
    })
}

fn fit_nb_model(sample: &CountSample, settings: &Settings, task: u64) -> dgpfit::Result<ModelFit> {
    let tolerance = settings.fit.tolerance;
    let fit = fit_nb(sample, tolerance)?;
    let mut diagnostics = fit.diagnostics.clone();
    let (se, bootstrap) = run_bootstrap(
        sample,
        &NbEstimator { tolerance },
        settings,
        derive_seed(settings.seed, &[task, NB_STREAM, BOOTSTRAP_PURPOSE]),
        &mut diagnostics,
    );
    let mut parameters = with_se(&["r", "m"], &[fit.params.r(), fit.params.m()], se.as_deref());
    parameters.push(Parameter {
        name: "p".into(),
        estimate: fit.params.p(),
        standard_error: None,
    });
    let score = score_model("nb", fit.loglik, 2, sample.len() as u64);
    Ok(ModelFit {
        model: "nb",
        parameter_count: 2,
        parameters,
        loglik: fit.loglik,
        aic: score.aic,
        bic: score.bic,
        converged: fit.converged,
        iterations: fit.iterations,
        fit_seed: None,
        initial_values: None,
        bootstrap,
        diagnostics,
    })
}

fn run_bootstrap<E: dgpfit::Estimator>(
    sample: &CountSample,
    estimator: &E,
    settings: &Settings,
    seed: u64,
    diagnostics: &mut Vec<String>,
) -> (Option<Vec<f64>>, Option<BootstrapSummary>) {
    let Some(replicates) = settings.bootstrap else {
        return (None, None);
    };
    match bootstrap_se(sample, estimator, &bootstrap_config(settings, replicates, seed)) {
        Ok(b) => {
            if b.failed_replicates > 0 {
                diagnostics.push(format!("{} bootstrap replicates failed and were skipped", b.failed_replicates));
            }
            let summary = BootstrapSummary {
                replicates,
                successful: b.successful_replicates,
                failed: b.failed_replicates,
                seed,
            };
            (Some(b.standard_errors), Some(summary))
        }
        Err(e) => {
            diagnostics.push(format!("bootstrap unavailable: {e}"));
            (None, None)
        }
    }
}

pub fn fit_group(label: &str, task: u64, sample: &CountSample, settings: &Settings) -> GroupReport {
    let n = sample.len();
    let mut fits = Vec::new();
    let mut failures = Vec::new();
    for &model in &settings.models {
        let outcome = if n < 2 {
            Err(dgpfit::Error::InsufficientData { required: 2, actual: n })
        } else if model == "dgp" {
            fit_dgp_model(sample, settings, task)
        } else {
            fit_nb_model(sample, settings, task)
        };
        match outcome {
            Ok(fit) => fits.push(fit),
            Err(e) => failures.push(ModelFailure {
                model,
                error: e.to_string(),
            }),
        }
    }
    let comparison = if fits.len() >= 2 {
        let scores: Vec<_> = fits
            .iter()
            .map(|f| score_model(f.model, f.loglik, f.parameter_count, n as u64))
            .collect();
        compare(&scores).ok()
    } else {
        None
    };
    GroupReport {
        label: label.to_string(),
        n,
        fits: (!settings.scores_only).then_some(fits),
        failures,
        comparison,
    }
}

/// Fit every task; the output order follows the input order regardless of scheduling.
pub fn fit_all(tasks: &[(String, u64, CountSample)], settings: &Settings) -> Vec<GroupReport> {
    let one = |(label, task, sample): &(String, u64, CountSample)| fit_group(label, *task, sample, settings);
    if settings.parallel {
        tasks.par_iter().map(one).collect()
    } else {
        tasks.iter().map(one).collect()
    }
}
