//! Discrete generalised Pareto distribution.
//!
//! Support {μ, μ+1, …} with survival S(x) = P(X ≥ x) = [1 + λ(x − μ)]^(−α),
//! mass f(x) = S(x) − S(x + 1) and distribution function F(x) = 1 − S(x + 1).
//!
//! Mass values are formed in log space as
//! ln f = −α ln(1 + λd) + ln(1 − exp(−α ln(1 + λ/(1 + λd)))), d = x − μ,
//! so the difference of two nearly equal powers never cancels for large counts.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng;
use crate::sample::{CountSample, Tally};

/// Shape α, scale λ and location μ.
///
/// In support mode μ is a nonnegative integer. Parameters built with
/// [`DgpParams::with_continuous_mu`] carry a real μ ≥ 0; they are only
/// meaningful as likelihood evaluation points inside the optimiser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DgpParams {
    alpha: f64,
    lambda: f64,
    mu: f64,
    #[serde(skip)]
    continuous_mu: bool,
}

/// Partial derivatives of the log-likelihood in α and λ, μ held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DgpScore {
    pub alpha: f64,
    pub lambda: f64,
}

/// ln(1 − e^t) for t < 0, accurate at both ends.
fn ln_one_minus_exp(t: f64) -> f64 {
    if t < -std::f64::consts::LN_2 {
        (-t.exp()).ln_1p()
    } else {
        (-t.exp_m1()).ln()
    }
}

fn check_shape_scale(alpha: f64, lambda: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::ParamDomain(format!("alpha must be finite and > 0, got {alpha}")));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::ParamDomain(format!("lambda must be finite and > 0, got {lambda}")));
    }
    Ok(())
}

impl DgpParams {
    pub fn new(alpha: f64, lambda: f64, mu: u64) -> Result<Self> {
        check_shape_scale(alpha, lambda)?;
        Ok(Self {
            alpha,
            lambda,
            mu: mu as f64,
            continuous_mu: false,
        })
    }

    /// Parameters with a real-valued location (continuous relaxation of μ).
    pub fn with_continuous_mu(alpha: f64, lambda: f64, mu: f64) -> Result<Self> {
        check_shape_scale(alpha, lambda)?;
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::ParamDomain(format!("mu must be finite and >= 0, got {mu}")));
        }
        Ok(Self {
            alpha,
            lambda,
            mu,
            continuous_mu: true,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn is_continuous_mu(&self) -> bool {
        self.continuous_mu
    }

    /// Smallest integer in the support.
    pub fn support_start(&self) -> u64 {
        self.mu.ceil() as u64
    }

    /// ln f at offset `d = x − μ ≥ 0`; −∞ when the mass underflows.
    fn ln_mass_at(&self, d: f64) -> f64 {
        let head = (self.lambda * d).ln_1p();
        let step = (self.lambda / (1.0 + self.lambda * d)).ln_1p();
        let v = -self.alpha * head + ln_one_minus_exp(-self.alpha * step);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    }

    pub fn ln_pmf(&self, x: i64) -> f64 {
        let x = x as f64;
        if x < self.mu {
            return f64::NEG_INFINITY;
        }
        self.ln_mass_at(x - self.mu)
    }

    pub fn pmf(&self, x: i64) -> f64 {
        self.ln_pmf(x).exp()
    }

    /// P(X ≤ μ + d).
    fn cdf_offset(&self, d: u64) -> f64 {
        -(-self.alpha * (self.lambda * (d as f64 + 1.0)).ln_1p()).exp_m1()
    }

    /// P(X ≤ x).
    pub fn cdf(&self, x: i64) -> f64 {
        let x = x as f64;
        if x < self.mu {
            return 0.0;
        }
        let d = x - self.mu;
        -(-self.alpha * (self.lambda * (d + 1.0)).ln_1p()).exp_m1()
    }

    /// P(X ≥ x) for `x` in the support.
    pub fn survival(&self, x: i64) -> Result<f64> {
        let xf = x as f64;
        if xf < self.mu {
            return Err(Error::ParamDomain(format!(
                "survival requires x >= mu ({}), got {x}",
                self.mu
            )));
        }
        let d = xf - self.mu;
        Ok((-self.alpha * (self.lambda * d).ln_1p()).exp())
    }

    /// Smallest support point `x` with `cdf(x) >= u`, for `u` in [0, 1).
    pub fn quantile(&self, u: f64) -> Result<u64> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::ParamDomain(format!("quantile level must lie in [0, 1), got {u}")));
        }
        if self.continuous_mu && self.mu.fract() != 0.0 {
            return Err(Error::ParamDomain(
                "quantile requires an integer location".to_string(),
            ));
        }
        let start = self.mu as u64;
        let limit = u64::MAX - start;
        // F(x) >= u  <=>  ln(1 + λ(d + 1)) >= −ln(1 − u)/α
        let level = -(-u).ln_1p() / self.alpha;
        let d_real = (level.exp_m1() / self.lambda - 1.0).ceil().max(0.0);
        if !d_real.is_finite() || d_real >= limit as f64 {
            return Err(Error::QuantileOverflow { u });
        }
        // The closed form is only a guess in floating point: F saturates at
        // the largest double below 1 over wide ranges of d. Bracket the first
        // d with F(d) >= u by galloping, then bisect.
        let guess = d_real as u64;
        let reaches = |d: u64| self.cdf_offset(d) >= u;
        let (mut below, mut above) = if reaches(guess) {
            let mut hi = guess;
            let mut step = 1u64;
            loop {
                if hi == 0 {
                    return Ok(start);
                }
                let lo = hi.saturating_sub(step);
                if !reaches(lo) {
                    break (lo, hi);
                }
                if lo == 0 {
                    return Ok(start);
                }
                hi = lo;
                step = step.saturating_mul(2);
            }
        } else {
            let mut lo = guess;
            let mut step = 1u64;
            loop {
                let hi = lo.checked_add(step).filter(|&h| h < limit);
                let Some(hi) = hi else {
                    return Err(Error::QuantileOverflow { u });
                };
                if reaches(hi) {
                    break (lo, hi);
                }
                lo = hi;
                step = step.saturating_mul(2);
            }
        };
        while above - below > 1 {
            let mid = below + (above - below) / 2;
            if reaches(mid) {
                above = mid;
            } else {
                below = mid;
            }
        }
        Ok(start + above)
    }

    /// `n` inverse-transform draws from the stream keyed by `seed`.
    pub fn sample(&self, seed: u64, n: usize) -> Result<CountSample> {
        self.sample_with(&mut rng::stream(seed, &[]), n)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Result<CountSample> {
        let values = (0..n)
            .map(|_| self.quantile(rng.random::<f64>()))
            .collect::<Result<Vec<_>>>()?;
        CountSample::new(values)
    }

    fn check_support(&self, tally: &Tally) -> Result<()> {
        let min = tally.min();
        if (min as f64) < self.mu {
            return Err(Error::SupportViolation {
                value: min,
                mu: self.mu,
            });
        }
        Ok(())
    }

    /// Σ ln f(xᵢ). Returns −∞ if any mass term underflows.
    pub fn loglik(&self, sample: &CountSample) -> Result<f64> {
        self.loglik_tally(&sample.tally())
    }

    pub fn loglik_tally(&self, tally: &Tally) -> Result<f64> {
        self.check_support(tally)?;
        let mut total = 0.0;
        for &(value, count) in tally.entries() {
            let term = self.ln_mass_at(value as f64 - self.mu);
            if term == f64::NEG_INFINITY {
                return Ok(f64::NEG_INFINITY);
            }
            total += count as f64 * term;
        }
        Ok(total)
    }

    /// Analytic score (∂/∂α, ∂/∂λ) of the log-likelihood with μ fixed.
    pub fn score(&self, sample: &CountSample) -> Result<DgpScore> {
        self.score_tally(&sample.tally())
    }

    pub fn score_tally(&self, tally: &Tally) -> Result<DgpScore> {
        self.check_support(tally)?;
        let (alpha, lambda) = (self.alpha, self.lambda);
        let mut grad = DgpScore {
            alpha: 0.0,
            lambda: 0.0,
        };
        for &(value, count) in tally.entries() {
            let d = value as f64 - self.mu;
            // With a = ln(1 + λd), b = ln(1 + λ(d+1)), δ = b − a, the two
            // fractions of each normal equation share the factor e^{αδ} − 1:
            //   b/(e^{αδ} − 1) − a/(1 − e^{−αδ})              = δ/(e^{αδ} − 1) − a
            //   α(d+1)/((1+λ(d+1))(e^{αδ} − 1))
            //     − αd/((1+λd)(1 − e^{−αδ}))                  = α(v − u)/(e^{αδ} − 1) − αu
            // where u = d/(1+λd), v = (d+1)/(1+λ(d+1)).
            let near = 1.0 + lambda * d;
            let far = 1.0 + lambda * (d + 1.0);
            let a = (lambda * d).ln_1p();
            let delta = (lambda / near).ln_1p();
            let growth = (alpha * delta).exp_m1();
            let u = d / near;
            let v_minus_u = 1.0 / (near * far);
            let c = count as f64;
            grad.alpha += c * (delta / growth - a);
            grad.lambda += c * alpha * (v_minus_u / growth - u);
        }
        Ok(grad)
    }
}
