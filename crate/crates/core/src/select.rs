//! Information criteria and model comparison.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelScore {
    pub model_name: String,
    pub loglik: f64,
    /// Number of estimated parameters.
    pub d: u32,
    /// Sample size.
    pub n: u64,
    pub aic: f64,
    pub bic: f64,
}

/// AIC = −2 ln L + 2d, BIC = −2 ln L + d ln n.
pub fn score_model(model_name: impl Into<String>, loglik: f64, d: u32, n: u64) -> ModelScore {
    let d_f = f64::from(d);
    ModelScore {
        model_name: model_name.into(),
        loglik,
        d,
        n,
        aic: -2.0 * loglik + 2.0 * d_f,
        bic: -2.0 * loglik + d_f * (n as f64).ln(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelDelta {
    pub model_name: String,
    pub delta_aic: f64,
    pub delta_bic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub scores: Vec<ModelScore>,
    pub winner_aic: String,
    pub winner_bic: String,
    pub deltas: Vec<ModelDelta>,
    /// Set when the minimum AIC (resp. BIC) is shared and the tie-break decided.
    pub tie_aic: bool,
    pub tie_bic: bool,
}

/// Index of the minimum criterion; ties go to smaller d, then to the
/// lexicographically first name.
fn pick(scores: &[ModelScore], criterion: impl Fn(&ModelScore) -> f64) -> (usize, bool) {
    let best = scores
        .iter()
        .map(&criterion)
        .fold(f64::INFINITY, f64::min);
    let tied: Vec<usize> = (0..scores.len())
        .filter(|&i| criterion(&scores[i]) == best)
        .collect();
    let winner = tied
        .iter()
        .copied()
        .min_by(|&a, &b| {
            scores[a]
                .d
                .cmp(&scores[b].d)
                .then_with(|| scores[a].model_name.cmp(&scores[b].model_name))
        })
        .unwrap_or(0);
    (winner, tied.len() > 1)
}

pub fn compare(scores: &[ModelScore]) -> Result<ComparisonReport> {
    if scores.len() < 2 {
        return Err(Error::IncomparableModels(format!(
            "need at least 2 models, got {}",
            scores.len()
        )));
    }
    let n = scores[0].n;
    if let Some(other) = scores.iter().find(|s| s.n != n) {
        return Err(Error::IncomparableModels(format!(
            "sample sizes differ ({} has n = {}, {} has n = {})",
            scores[0].model_name, n, other.model_name, other.n
        )));
    }
    if scores.iter().any(|s| s.aic.is_nan() || s.bic.is_nan()) {
        return Err(Error::IncomparableModels("criterion is NaN".into()));
    }
    let (aic_winner, tie_aic) = pick(scores, |s| s.aic);
    let (bic_winner, tie_bic) = pick(scores, |s| s.bic);
    let (min_aic, min_bic) = (scores[aic_winner].aic, scores[bic_winner].bic);
    Ok(ComparisonReport {
        deltas: scores
            .iter()
            .map(|s| ModelDelta {
                model_name: s.model_name.clone(),
                delta_aic: s.aic - min_aic,
                delta_bic: s.bic - min_bic,
            })
            .collect(),
        winner_aic: scores[aic_winner].model_name.clone(),
        winner_bic: scores[bic_winner].model_name.clone(),
        scores: scores.to_vec(),
        tie_aic,
        tie_bic,
    })
}
