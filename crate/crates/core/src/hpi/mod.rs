//! Local hyperparameter importance estimators.
//!
//! Every estimator works on the indicator of the tighter top set: with
//! `κ = γ'/γ`, per-regime shares `α_i` (top-γ') and `β_i` (top-γ), and the
//! within-regime divergences `D_i = D_PE(p_{γ',i} ‖ p_{γ,i})`:
//!
//! | method         | raw variance                                  |
//! |----------------|-----------------------------------------------|
//! | `cped`         | `κ² Σ_i (α_i²/β_i) D_i`                        |
//! | `standard`     | `cped + κ² D_PE(α ‖ β)`                       |
//! | `naive-within` | `κ² Σ_i D_i`                                   |
//! | `ped`          | `κ² D_PE(p_γ' ‖ p_γ)` on a single domain       |
//!
//! Regimes absent from the top-γ set (`β_i = 0`) contribute nothing.

mod analyzer;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::Extension;
use crate::error::{Error, Result};
use crate::space::EvaluationSet;
use crate::stats::{pearson_divergence_discrete, QuantilePair};

pub use analyzer::{Analyzer, Prepared};

/// Fewest active samples per regime and subset before a KDE is trusted.
pub const DEFAULT_MIN_SAMPLES: usize = 2;
pub const DEFAULT_GRID_SIZE: usize = 128;
pub const DEFAULT_PSEUDO_COUNT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Cped,
    Ped,
    Standard,
    NaiveWithin,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Cped,
        Method::Ped,
        Method::Standard,
        Method::NaiveWithin,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Cped => "cped",
            Method::Ped => "ped",
            Method::Standard => "standard",
            Method::NaiveWithin => "naive-within",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method `{s}`")))
    }
}

/// How per-regime distributions are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DensityEstimator {
    /// Gaussian KDE on a grid for intervals, smoothed PMFs for labels.
    Smoothed { grid_size: usize, pseudo_count: f64 },
    /// Exact empirical PMFs over the values observed in the top-γ set.
    Empirical,
}

impl Default for DensityEstimator {
    fn default() -> Self {
        DensityEstimator::Smoothed {
            grid_size: DEFAULT_GRID_SIZE,
            pseudo_count: DEFAULT_PSEUDO_COUNT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatorConfig {
    pub density: DensityEstimator,
    pub min_samples: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            density: DensityEstimator::default(),
            min_samples: DEFAULT_MIN_SAMPLES,
        }
    }
}

impl EstimatorConfig {
    pub fn with_grid_size(grid_size: usize) -> Self {
        EstimatorConfig {
            density: DensityEstimator::Smoothed {
                grid_size,
                pseudo_count: DEFAULT_PSEUDO_COUNT,
            },
            min_samples: DEFAULT_MIN_SAMPLES,
        }
    }

    pub fn empirical() -> Self {
        EstimatorConfig {
            density: DensityEstimator::Empirical,
            min_samples: 1,
        }
    }
}

/// Active values of one regime within one top subset.
#[derive(Debug, Clone, PartialEq)]
pub enum RegimeSamples {
    Numbers(Vec<f64>),
    Labels(Vec<String>),
    Inactive(usize),
}

impl RegimeSamples {
    pub fn len(&self) -> usize {
        match self {
            RegimeSamples::Numbers(v) => v.len(),
            RegimeSamples::Labels(v) => v.len(),
            RegimeSamples::Inactive(n) => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeStats {
    /// 1-based regime index.
    pub regime: usize,
    pub alpha: f64,
    pub beta: f64,
    pub count_top_prime: usize,
    pub count_top: usize,
    #[serde(skip)]
    pub samples_top_prime: RegimeSamples,
    #[serde(skip)]
    pub samples_top: RegimeSamples,
    pub divergence: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceBreakdown {
    pub param: String,
    pub within: f64,
    pub inter: f64,
    pub total: f64,
    pub kappa: f64,
    pub regimes: Vec<RegimeStats>,
}

/// `κ² Σ_{β_i>0} (α_i²/β_i) D_i`.
pub fn cped_within_variance(stats: &[RegimeStats], q: QuantilePair) -> f64 {
    let kappa = q.kappa();
    let weighted: f64 = stats
        .iter()
        .filter(|s| s.beta > 0.0)
        .map(|s| s.alpha * s.alpha / s.beta * s.divergence)
        .sum();
    kappa * kappa * weighted
}

/// `κ² Σ_{β_i>0} D_i`, without the regime-share weights.
pub fn naive_within_variance(stats: &[RegimeStats], q: QuantilePair) -> f64 {
    let kappa = q.kappa();
    let sum: f64 = stats
        .iter()
        .filter(|s| s.beta > 0.0)
        .map(|s| s.divergence)
        .sum();
    kappa * kappa * sum
}

/// Within/inter split of the standard local marginal variance.
pub fn standard_local_variance(
    param: &str,
    stats: &[RegimeStats],
    q: QuantilePair,
) -> Result<VarianceBreakdown> {
    let kappa = q.kappa();
    let within = cped_within_variance(stats, q);
    let present: Vec<&RegimeStats> = stats.iter().filter(|s| s.beta > 0.0).collect();
    if let Some(s) = stats.iter().find(|s| s.beta == 0.0 && s.alpha > 0.0) {
        return Err(Error::AbsoluteContinuity(format!(
            "regime {} of `{param}` has alpha = {} but beta = 0",
            s.regime, s.alpha
        )));
    }
    let alpha: Vec<f64> = present.iter().map(|s| s.alpha).collect();
    let beta: Vec<f64> = present.iter().map(|s| s.beta).collect();
    let inter = kappa * kappa * pearson_divergence_discrete(&alpha, &beta)?;
    Ok(VarianceBreakdown {
        param: param.to_string(),
        within,
        inter,
        total: within + inter,
        kappa,
        regimes: stats.to_vec(),
    })
}

/// Divides every raw variance by their sum. All-zero input yields all zeros
/// and `true` for the degenerate flag.
pub fn normalize_hpi(raw: &BTreeMap<String, f64>) -> Result<(BTreeMap<String, f64>, bool)> {
    if let Some((param, &value)) = raw.iter().find(|(_, v)| v.is_nan() || **v < 0.0) {
        return Err(Error::NegativeVariance {
            param: param.clone(),
            value,
        });
    }
    let total: f64 = raw.values().sum();
    if total == 0.0 {
        return Ok((raw.keys().map(|k| (k.clone(), 0.0)).collect(), true));
    }
    Ok((
        raw.iter().map(|(k, v)| (k.clone(), v / total)).collect(),
        false,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HpiReport {
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extension: Option<Extension>,
    pub quantiles: QuantilePair,
    pub kappa: f64,
    /// `|top-γ'| / |top-γ|` on the analysed set; differs from `kappa` under
    /// ties or floor effects.
    pub empirical_ratio: f64,
    pub estimator: EstimatorConfig,
    pub raw: BTreeMap<String, f64>,
    pub normalized: BTreeMap<String, f64>,
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub breakdowns: Vec<VarianceBreakdown>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Per-regime statistics of `param` at the given quantile levels.
pub fn regime_stats(
    evalset: &EvaluationSet,
    param: &str,
    q: QuantilePair,
    config: &EstimatorConfig,
) -> Result<Vec<RegimeStats>> {
    let analyzer = Analyzer::new(evalset.clone(), q.gamma(), *config)?;
    analyzer.regime_stats(evalset.space().position(param)?, q.gamma_prime())
}

/// Original single-domain estimator; fails on conditional parameters.
pub fn ped_variance(
    evalset: &EvaluationSet,
    param: &str,
    q: QuantilePair,
    config: &EstimatorConfig,
) -> Result<f64> {
    let d = evalset.space().position(param)?;
    if evalset.space().parameters()[d].is_conditional() {
        return Err(Error::ConditionalParam {
            param: param.to_string(),
        });
    }
    let analyzer = Analyzer::new(evalset.clone(), q.gamma(), *config)?;
    Ok(analyzer.ped_variance(d, q.gamma_prime())?.0)
}

/// Importance of every parameter by `method`, normalised.
pub fn analyze(
    evalset: &EvaluationSet,
    q: QuantilePair,
    method: Method,
    extension: Option<Extension>,
    config: &EstimatorConfig,
) -> Result<HpiReport> {
    Prepared::new(evalset, q.gamma(), method, extension, *config)?.report(q.gamma_prime())
}
