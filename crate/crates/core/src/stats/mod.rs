//! Quantile thresholds, top-γ subsets, 1-D densities and Pearson divergences.

mod density;
mod divergence;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::EvaluationSet;

pub use density::{
    empirical_pmf, fit_categorical_density, fit_categorical_density_with, fit_continuous_density,
    scott_bandwidth, Density,
};
pub use divergence::{pearson_divergence_density, pearson_divergence_discrete};

/// Masses below this are treated as zero by the divergences.
pub const MASS_FLOOR: f64 = 1e-12;

/// Tolerance for "sums to one" checks on probability vectors.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// The pair of quantile levels `0 < gamma_prime < gamma <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantilePair {
    gamma: f64,
    gamma_prime: f64,
}

impl QuantilePair {
    pub fn new(gamma: f64, gamma_prime: f64) -> Result<Self> {
        let ok = gamma_prime > 0.0 && gamma_prime < gamma && gamma <= 1.0;
        if !ok || !gamma.is_finite() || !gamma_prime.is_finite() {
            return Err(Error::InvalidQuantiles { gamma, gamma_prime });
        }
        Ok(QuantilePair { gamma, gamma_prime })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn gamma_prime(&self) -> f64 {
        self.gamma_prime
    }

    /// `gamma' / gamma`, the top-set ratio used by every closed form.
    pub fn kappa(&self) -> f64 {
        self.gamma_prime / self.gamma
    }
}

/// `⌊gamma·n⌋`, guarding against products like `0.29 * 100 = 28.999…`.
pub fn top_count(n: usize, gamma: f64) -> usize {
    (gamma * n as f64 + 1e-9).floor() as usize
}

/// The `⌊gamma·n⌋`-th smallest value.
pub fn quantile_threshold(values: &[f64], gamma: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyEvaluationSet);
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "gamma must lie in (0, 1], got {gamma}"
        )));
    }
    let n = values.len();
    let k = top_count(n, gamma);
    if k == 0 {
        return Err(Error::QuantileTooSmall {
            gamma,
            n,
            min_gamma: 1.0 / n as f64,
        });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted[k - 1])
}

/// Positions of the trials at or below the gamma-quantile, in original order.
/// Ties at the threshold are all included.
pub fn top_indices(values: &[f64], gamma: f64) -> Result<Vec<usize>> {
    let threshold = quantile_threshold(values, gamma)?;
    Ok(values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v <= threshold)
        .map(|(i, _)| i)
        .collect())
}

pub fn top_subset(evalset: &EvaluationSet, gamma: f64) -> Result<EvaluationSet> {
    let idx = top_indices(&evalset.objectives(), gamma)?;
    let trials = idx.iter().map(|&i| evalset.trials()[i].clone()).collect();
    Ok(evalset.with_trials(trials))
}
