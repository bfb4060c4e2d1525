//! Negative binomial distribution on {0, 1, 2, …} in the mean/dispersion form.
//!
//! P(X = k) = Γ(k + r) / (Γ(r) k!) · p^k (1 − p)^r with p = m / (m + r), so
//! that E[X] = m and Var[X] = m + m²/r.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng;
use crate::sample::{CountSample, Tally};
use crate::special::{ln_factorial, ln_gamma};

/// Dispersion `r` and mean `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NbParams {
    r: f64,
    m: f64,
}

impl NbParams {
    pub fn new(r: f64, m: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::ParamDomain(format!("r must be finite and > 0, got {r}")));
        }
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::ParamDomain(format!("m must be finite and > 0, got {m}")));
        }
        Ok(Self { r, m })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// p = m / (m + r).
    pub fn p(&self) -> f64 {
        self.m / (self.m + self.r)
    }

    fn ln_p(&self) -> f64 {
        self.m.ln() - (self.m + self.r).ln()
    }

    fn ln_one_minus_p(&self) -> f64 {
        self.r.ln() - (self.m + self.r).ln()
    }

    pub fn ln_pmf(&self, k: u64) -> f64 {
        let kf = k as f64;
        let power = if k == 0 { 0.0 } else { kf * self.ln_p() };
        ln_gamma(kf + self.r) - ln_gamma(self.r) - ln_factorial(k)
            + power
            + self.r * self.ln_one_minus_p()
    }

    pub fn pmf(&self, k: u64) -> f64 {
        self.ln_pmf(k).exp()
    }

    /// Σ ln Γ(kᵢ + r) − Σ ln kᵢ! − N ln Γ(r) + Σ kᵢ ln p + N r ln(1 − p).
    pub fn loglik(&self, sample: &CountSample) -> f64 {
        self.loglik_tally(&sample.tally())
    }

    pub fn loglik_tally(&self, tally: &Tally) -> f64 {
        let n = tally.n() as f64;
        let (mut gamma_terms, mut factorial_terms) = (0.0, 0.0);
        for &(k, count) in tally.entries() {
            let c = count as f64;
            gamma_terms += c * ln_gamma(k as f64 + self.r);
            factorial_terms += c * ln_factorial(k);
        }
        let total = tally.sum();
        let power = if total == 0.0 { 0.0 } else { total * self.ln_p() };
        gamma_terms - factorial_terms - n * ln_gamma(self.r)
            + power
            + n * self.r * self.ln_one_minus_p()
    }

    /// `n` draws from the gamma–Poisson mixture, keyed by `seed`.
    pub fn sample(&self, seed: u64, n: usize) -> Result<CountSample> {
        self.sample_with(&mut rng::stream(seed, &[]), n)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Result<CountSample> {
        let rate = Gamma::new(self.r, self.m / self.r)
            .map_err(|e| Error::ParamDomain(format!("gamma mixing law: {e}")))?;
        let values = (0..n)
            .map(|_| {
                let intensity: f64 = rate.sample(rng);
                if intensity <= 0.0 {
                    return Ok(0);
                }
                let draw: f64 = Poisson::new(intensity)
                    .map_err(|e| Error::ParamDomain(format!("poisson intensity: {e}")))?
                    .sample(rng);
                Ok(draw as u64)
            })
            .collect::<Result<Vec<_>>>()?;
        CountSample::new(values)
    }
}
