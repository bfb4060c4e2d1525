//! Simulated annealing with logarithmic cooling and Gaussian proposals.
//!
//! At step k the temperature is T₀ / ln(k + e) and each coordinate moves by a
//! normal deviate scaled by `step · T_k / T₀`, so proposals shrink as the
//! chain cools. Moves are accepted by the Metropolis rule; the best point seen
//! (including the start) is returned.

use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub struct AnnealOptions {
    pub iterations: usize,
    pub initial_temperature: f64,
    /// Proposal scale per coordinate at T = T₀.
    pub step: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct AnnealOutcome {
    pub best: Vec<f64>,
    pub best_value: f64,
    pub accepted: usize,
    pub iterations: usize,
}

pub fn anneal<F, R>(mut objective: F, start: &[f64], start_value: f64, opts: &AnnealOptions, rng: &mut R) -> AnnealOutcome
where
    F: FnMut(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    assert_eq!(start.len(), opts.step.len(), "one proposal scale per coordinate");
    let mut current = start.to_vec();
    let mut current_value = start_value;
    let mut best = current.clone();
    let mut best_value = current_value;
    let mut candidate = current.clone();
    let mut accepted = 0;

    for k in 0..opts.iterations {
        let temperature = opts.initial_temperature / (k as f64 + std::f64::consts::E).ln();
        let shrink = temperature / opts.initial_temperature;
        for ((c, &x), &s) in candidate.iter_mut().zip(&current).zip(&opts.step) {
            let z: f64 = rng.sample(StandardNormal);
            *c = x + s * shrink * z;
        }
        let value = objective(&candidate);
        // Draw the uniform unconditionally so the stream position does not
        // depend on the objective's values.
        let u: f64 = rng.random();
        let accept = if value.is_nan() || value == f64::INFINITY {
            false
        } else if value <= current_value {
            true
        } else {
            u < (-(value - current_value) / temperature).exp()
        };
        if accept {
            current.copy_from_slice(&candidate);
            current_value = value;
            accepted += 1;
            if value < best_value {
                best.copy_from_slice(&candidate);
                best_value = value;
            }
        }
    }

    AnnealOutcome {
        best,
        best_value,
        accepted,
        iterations: opts.iterations,
    }
}
