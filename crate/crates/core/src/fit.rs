//! Maximum-likelihood fits.
//!
//! The discrete generalised Pareto fit minimises the negated log-likelihood by
//! simulated annealing over (ln α, ln λ), starting from the frequency-based
//! initial values, then optionally polishes the best point with a Nelder–Mead
//! simplex. The negative binomial fit uses the closed form for p given r and
//! solves the profile score equation in r by bracketed root finding.

use serde::{Deserialize, Serialize};

use crate::dgp::DgpParams;
use crate::error::{Error, Result};
use crate::init;
use crate::nb::NbParams;
use crate::optim::{anneal, nelder_mead, AnnealOptions, SimplexOptions};
use crate::rng;
use crate::roots::{self, Tolerance};
use crate::sample::{CountSample, Tally};
use crate::special::digamma_shift;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoolingSchedule {
    /// T_k = T₀ / ln(k + e)
    Logarithmic,
}

/// How the location μ is treated by the DGP fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuMode {
    /// μ = sample minimum, not estimated from the likelihood.
    FixedAtMin,
    /// μ optimised as a real number in [0, sample minimum]. Non-canonical.
    FreeContinuous,
}

impl MuMode {
    /// Number of likelihood-estimated DGP parameters.
    pub fn dgp_parameter_count(self) -> u32 {
        match self {
            MuMode::FixedAtMin => 2,
            MuMode::FreeContinuous => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub annealing_iterations: usize,
    pub annealing_initial_temperature: f64,
    pub cooling_schedule: CoolingSchedule,
    pub rng_seed: u64,
    pub refine_locally: bool,
    pub mu_mode: MuMode,
    pub tolerance: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            annealing_iterations: 10_000,
            annealing_initial_temperature: 10.0,
            cooling_schedule: CoolingSchedule::Logarithmic,
            rng_seed: 0,
            refine_locally: true,
            mu_mode: MuMode::FixedAtMin,
            tolerance: 1e-8,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.annealing_iterations < 1 {
            return Err(Error::ParamDomain("annealing_iterations must be >= 1".into()));
        }
        if !(self.annealing_initial_temperature.is_finite() && self.annealing_initial_temperature > 0.0) {
            return Err(Error::ParamDomain("annealing_initial_temperature must be > 0".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::ParamDomain("tolerance must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult<P> {
    pub params: P,
    pub loglik: f64,
    pub converged: bool,
    pub iterations: usize,
    pub seed_params: Option<P>,
    pub diagnostics: Vec<String>,
}

/// Seed values for the DGP fit, falling back to (1, 1, min) when the
/// frequency equations cannot be solved.
pub fn dgp_seed(sample: &CountSample) -> Result<(DgpParams, Option<String>)> {
    let freqs = init::leading_frequencies(sample)?;
    match init::solve_init(&freqs) {
        Ok(p) => Ok((p, None)),
        Err(e) => Ok((
            init::fallback_init(freqs.mu),
            Some(format!("initializer fallback (1, 1) used: {e}")),
        )),
    }
}

struct DgpObjective<'a> {
    tally: &'a Tally,
    min: f64,
    free_mu: bool,
}

impl DgpObjective<'_> {
    fn params(&self, theta: &[f64]) -> Option<DgpParams> {
        let (alpha, lambda) = (theta[0].exp(), theta[1].exp());
        if self.free_mu {
            let mu = theta[2];
            if !(0.0..=self.min).contains(&mu) {
                return None;
            }
            DgpParams::with_continuous_mu(alpha, lambda, mu).ok()
        } else {
            DgpParams::new(alpha, lambda, self.min as u64).ok()
        }
    }

    fn value(&self, theta: &[f64]) -> f64 {
        match self.params(theta).map(|p| p.loglik_tally(self.tally)) {
            Some(Ok(ll)) if ll.is_finite() => -ll,
            _ => f64::INFINITY,
        }
    }
}

const MAX_POLISH_ROUNDS: usize = 4;

pub fn fit_dgp(sample: &CountSample, config: &FitConfig) -> Result<FitResult<DgpParams>> {
    config.validate()?;
    let tally = sample.tally();
    if tally.distinct() < 2 {
        return Err(Error::DegenerateSample(format!(
            "all {} observations equal {}",
            tally.n(),
            tally.min()
        )));
    }
    let (seed, fallback_note) = dgp_seed(sample)?;
    let mut diagnostics: Vec<String> = fallback_note.into_iter().collect();

    let min = tally.min() as f64;
    let free_mu = config.mu_mode == MuMode::FreeContinuous;
    let objective = DgpObjective {
        tally: &tally,
        min,
        free_mu: free_mu && min > 0.0,
    };
    let mut start = vec![seed.alpha().ln(), seed.lambda().ln()];
    let mut step = vec![1.0, 1.0];
    if objective.free_mu {
        start.push(min);
        step.push(1.0);
    }
    let start_value = objective.value(&start);

    let mut stream = rng::stream(config.rng_seed, &[]);
    let annealed = anneal(
        |t: &[f64]| objective.value(t),
        &start,
        start_value,
        &AnnealOptions {
            iterations: config.annealing_iterations,
            initial_temperature: config.annealing_initial_temperature,
            step,
        },
        &mut stream,
    );
    let mut iterations = annealed.iterations;
    diagnostics.push(format!(
        "annealing accepted {} of {} proposals",
        annealed.accepted, annealed.iterations
    ));
    let (mut best, mut best_value) = (annealed.best, annealed.best_value);
    if !best_value.is_finite() {
        return Err(Error::Infeasible);
    }

    let mut converged = false;
    if config.refine_locally {
        let mut polish_step = vec![0.1, 0.1];
        if objective.free_mu {
            polish_step.push(-(0.5f64).min(min / 2.0));
        }
        let opts = SimplexOptions {
            step: polish_step,
            f_tol: config.tolerance * 1e-3,
            x_tol: config.tolerance,
            max_iter: 5_000,
        };
        // Restart from the incumbent until a round brings no improvement, the
        // usual guard against a prematurely collapsed simplex.
        for _ in 0..MAX_POLISH_ROUNDS {
            let polished = nelder_mead(|t: &[f64]| objective.value(t), &best, &opts);
            iterations += polished.iterations;
            converged = polished.converged;
            let gain = best_value - polished.best_value;
            if polished.best_value < best_value {
                best = polished.best;
                best_value = polished.best_value;
            }
            if gain <= opts.f_tol * (1.0 + best_value.abs()) {
                break;
            }
        }
        if !converged {
            diagnostics.push("local polish hit its iteration cap".to_string());
        }
    }
    if objective.free_mu || free_mu {
        diagnostics.push("mu estimated as a continuous parameter (non-canonical)".to_string());
    }

    let params = match objective.params(&best) {
        Some(p) => p,
        None => return Err(Error::Infeasible),
    };
    let params = if free_mu && !objective.free_mu {
        DgpParams::with_continuous_mu(params.alpha(), params.lambda(), 0.0)?
    } else {
        params
    };
    let seed_params = if free_mu {
        DgpParams::with_continuous_mu(seed.alpha(), seed.lambda(), seed.mu())?
    } else {
        seed
    };
    let loglik = params.loglik(sample)?;
    Ok(FitResult {
        params,
        loglik,
        converged,
        iterations,
        seed_params: Some(seed_params),
        diagnostics,
    })
}

/// Σ ψ(kᵢ + r) − N ψ(r) + N ln(r / (r + k̄)): the derivative of the negative
/// binomial log-likelihood in r after substituting p̂(r).
pub fn profile_score_r(sample: &CountSample, r: f64) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::ParamDomain(format!("r must be finite and > 0, got {r}")));
    }
    Ok(profile_score_tally(&sample.tally(), r))
}

fn profile_score_tally(tally: &Tally, r: f64) -> f64 {
    let n = tally.n() as f64;
    let mean = tally.sum() / n;
    let shifts: f64 = tally
        .entries()
        .iter()
        .map(|&(k, c)| c as f64 * digamma_shift(r, k))
        .sum();
    shifts - n * (mean / r).ln_1p()
}

const R_FLOOR: f64 = 1e-8;
const R_CEILING: f64 = 1e8;

pub fn fit_nb(sample: &CountSample, tolerance: f64) -> Result<FitResult<NbParams>> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::ParamDomain("tolerance must be > 0".into()));
    }
    let tally = sample.tally();
    let n = tally.n() as f64;
    let total = tally.sum();
    if total == 0.0 {
        return Err(Error::DegenerateSample("all observations are zero".into()));
    }
    let mean = sample.mean();
    let variance = sample.population_variance();
    if variance <= mean {
        return Err(Error::Underdispersed { mean, variance });
    }

    let score = |r: f64| profile_score_tally(&tally, r);
    let (mut lo, mut g_lo) = (R_FLOOR, score(R_FLOOR));
    if !(g_lo > 0.0) {
        return Err(Error::NoConvergence(format!(
            "profile score is not positive at r = {R_FLOOR}"
        )));
    }
    let mut hi = lo;
    let mut g_hi = g_lo;
    let mut bracket_steps = 0;
    while g_hi > 0.0 {
        if hi >= R_CEILING {
            return Err(Error::Underdispersed { mean, variance });
        }
        (lo, g_lo) = (hi, g_hi);
        hi *= 2.0;
        g_hi = score(hi);
        bracket_steps += 1;
    }
    let root = roots::solve(
        score,
        lo,
        hi,
        g_lo,
        g_hi,
        Tolerance {
            f_tol: tolerance,
            x_rel_tol: 1e-15,
            max_iter: 500,
        },
    )?;
    let r = root.x;
    let p = total / (n * r + total);
    let m = r * p / (1.0 - p);
    let params = NbParams::new(r, m)?;
    let converged = root.fx.abs() <= tolerance;
    let mut diagnostics = Vec::new();
    if !converged {
        diagnostics.push(format!(
            "profile score residual {:e} above tolerance at machine-precision bracket",
            root.fx
        ));
    }
    Ok(FitResult {
        params,
        loglik: params.loglik_tally(&tally),
        converged,
        iterations: bracket_steps + root.iterations,
        seed_params: None,
        diagnostics,
    })
}
