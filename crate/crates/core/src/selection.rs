//! Roulette-wheel selection over exponentially transformed scores.
//!
//! Raw agent evaluations and node points are signed. They are mapped through
//! `s^x` (s > 1, default 1.02) so every candidate keeps a strictly positive
//! weight, normalized to percentages summing to 100, and drawn by roulette.
//! The exponent base trades off determinism against randomness: higher bases
//! starve low scorers, bases near 1 make the draw close to uniform.

use rand::Rng;

use crate::error::StrategyError;

/// `s^x` for `s > 1`: strictly positive and strictly increasing in `x`.
pub fn exp_transform(x: f64, significance: f64) -> Result<f64, StrategyError> {
    if significance <= 1.0 || significance.is_nan() {
        return Err(StrategyError::InvalidSignificance(significance));
    }
    Ok(significance.powf(x))
}

/// Rescales strictly positive values so they sum to 100.
pub fn normalize_to_100(values: &[f64]) -> Result<Vec<f64>, StrategyError> {
    if values.is_empty() {
        return Err(StrategyError::EmptyValues);
    }
    if let Some(&bad) = values.iter().find(|v| **v <= 0.0 || v.is_nan()) {
        return Err(StrategyError::NonPositiveValue(bad));
    }
    let total: f64 = values.iter().sum();
    Ok(values.iter().map(|v| 100.0 * v / total).collect())
}

/// Draws an index with probability `percentages[k] / 100`.
///
/// The input must be a valid output of [`normalize_to_100`]. Deterministic
/// for a given rng state.
pub fn roulette_select<R: Rng + ?Sized>(percentages: &[f64], rng: &mut R) -> usize {
    debug_assert!(!percentages.is_empty());
    let draw = rng.random_range(0.0..100.0);
    let mut cumulative = 0.0;
    for (idx, &p) in percentages.iter().enumerate() {
        cumulative += p;
        if draw < cumulative {
            return idx;
        }
    }
    // Floating point shortfall: the draw landed past the accumulated sum.
    percentages.len() - 1
}

/// Full selection pipeline: exp-transform scores, normalize, roulette.
///
/// Scores are shifted by their maximum before exponentiation, which leaves
/// the percentages mathematically unchanged (`s^(x-m) = s^x / s^m`) but keeps
/// `s^x` finite for arbitrarily large score spreads. Weights are floored at
/// the smallest positive double so no candidate ever drops to zero chance.
pub fn select_weighted<R: Rng + ?Sized>(
    scores: &[f64],
    significance: f64,
    rng: &mut R,
) -> Result<usize, StrategyError> {
    let percentages = selection_percentages(scores, significance)?;
    Ok(roulette_select(&percentages, rng))
}

/// The percentage chance assigned to each score by the selection pipeline.
pub fn selection_percentages(scores: &[f64], significance: f64) -> Result<Vec<f64>, StrategyError> {
    if scores.is_empty() {
        return Err(StrategyError::EmptyValues);
    }
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights = scores
        .iter()
        .map(|&x| exp_transform(x - max, significance).map(|w| w.max(f64::MIN_POSITIVE)))
        .collect::<Result<Vec<_>, _>>()?;
    normalize_to_100(&weights)
}
