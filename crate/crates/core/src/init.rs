//! Starting values for the discrete generalised Pareto fit from the relative
//! frequencies at the sample minimum μ and at the next observed value μ + ε.
//!
//! Equating those frequencies to the model masses at μ and μ + 1,
//!
//! ```text
//! f_μ   = 1 − (1 + λ)^(−α)
//! f_μ+ε = (1 + λ)^(−α) − (1 + 2λ)^(−α)
//! ```
//!
//! and eliminating α leaves ln(1 + 2λ)/ln(1 + λ) = ln(1 − f_μ − f_μ+ε)/ln(1 − f_μ),
//! solved for λ by bracketed root finding; then α = −ln(1 − f_μ)/ln(1 + λ).

use serde::Serialize;

use crate::dgp::DgpParams;
use crate::error::{Error, Result};
use crate::roots::{self, Tolerance};
use crate::sample::CountSample;

/// Relative frequencies at the minimum and at the smallest larger value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeadingFrequencies {
    pub f_mu: f64,
    pub f_mu_eps: f64,
    pub mu: u64,
    pub eps: u64,
    /// Set when f_μ + f_μ+ε ≥ 1, i.e. the sample has only these two values;
    /// no finite root exists then.
    pub boundary: bool,
}

pub fn leading_frequencies(sample: &CountSample) -> Result<LeadingFrequencies> {
    let tally = sample.tally();
    let entries = tally.entries();
    if entries.len() < 2 {
        return Err(Error::DegenerateSample(format!(
            "all {} observations equal {}",
            sample.len(),
            entries[0].0
        )));
    }
    let n = tally.n() as f64;
    let (mu, c_mu) = entries[0];
    let (next, c_next) = entries[1];
    let f_mu = c_mu as f64 / n;
    let f_mu_eps = c_next as f64 / n;
    Ok(LeadingFrequencies {
        f_mu,
        f_mu_eps,
        mu,
        eps: next - mu,
        boundary: c_mu + c_next >= tally.n(),
    })
}

/// ln(1 + 2λ) / ln(1 + λ); decreases from 2 (λ → 0⁺) to 1 (λ → ∞).
pub fn scale_ratio(lambda: f64) -> f64 {
    (2.0 * lambda).ln_1p() / lambda.ln_1p()
}

/// ln(1 − f_μ − f_μ+ε) / ln(1 − f_μ).
pub fn frequency_ratio(freqs: &LeadingFrequencies) -> f64 {
    (-(freqs.f_mu + freqs.f_mu_eps)).ln_1p() / (-freqs.f_mu).ln_1p()
}

const LAMBDA_FLOOR: f64 = 1e-8;
const LAMBDA_CEILING: f64 = 1e300;
const MAX_ITER: usize = 200;

/// Solve the two frequency equations for (α₀, λ₀); μ₀ is the sample minimum.
pub fn solve_init(freqs: &LeadingFrequencies) -> Result<DgpParams> {
    let valid = freqs.f_mu > 0.0 && freqs.f_mu < 1.0 && freqs.f_mu_eps > 0.0;
    if !valid {
        return Err(Error::ParamDomain(format!(
            "leading frequencies must satisfy 0 < f_mu < 1 and f_mu_eps > 0, got ({}, {})",
            freqs.f_mu, freqs.f_mu_eps
        )));
    }
    let ratio = frequency_ratio(freqs);
    let gap = |lambda: f64| scale_ratio(lambda) - ratio;

    // The left side is strictly decreasing, so a root exists iff
    // ratio ∈ (1, 2); search the bracket by doubling λ upward.
    let g_floor = gap(LAMBDA_FLOOR);
    if !(ratio > 1.0) || !(g_floor > 0.0) {
        return Err(Error::NoRoot { ratio });
    }
    let (mut lo, mut g_lo) = (LAMBDA_FLOOR, g_floor);
    let mut hi = 2.0 * lo;
    let mut g_hi = gap(hi);
    while g_hi > 0.0 {
        debug_assert!(g_hi <= g_lo, "scale ratio must decrease in lambda");
        if hi >= LAMBDA_CEILING {
            return Err(Error::NoRoot { ratio });
        }
        (lo, g_lo) = (hi, g_hi);
        hi *= 2.0;
        g_hi = gap(hi);
    }

    let root = roots::solve(
        gap,
        lo,
        hi,
        g_lo,
        g_hi,
        Tolerance {
            f_tol: 0.0,
            x_rel_tol: 1e-15,
            max_iter: MAX_ITER,
        },
    )?;
    let lambda = root.x;
    let alpha = -(-freqs.f_mu).ln_1p() / lambda.ln_1p();
    DgpParams::new(alpha, lambda, freqs.mu)
}

/// Seed used when the frequency equations have no solution.
pub fn fallback_init(mu: u64) -> DgpParams {
    DgpParams::new(1.0, 1.0, mu).expect("unit shape and scale are valid")
}
