use std::collections::BTreeMap;

use super::{
    naive_within_variance, normalize_hpi, standard_local_variance, DensityEstimator,
    EstimatorConfig, HpiReport, Method, RegimeSamples, RegimeStats,
};
use crate::baselines::{apply_expansion, apply_filtering, apply_imputation, Extension};
use crate::error::{Error, Result};
use crate::space::{Domain, EvaluationSet, ParamValue};
use crate::stats::{
    empirical_pmf, fit_categorical_density_with, fit_continuous_density,
    pearson_divergence_density, top_count, top_indices, Density, QuantilePair,
};

/// Reference (top-γ) density of one regime.
#[derive(Debug, Clone)]
enum Reference {
    Fitted(Density),
    /// Too few samples for a kernel estimate.
    TooFew,
    /// Regime absent from the top-γ set.
    Absent,
}

/// An evaluation set prepared for repeated analysis at one γ. The top-γ
/// subset, regime assignments and reference densities are computed once;
/// each γ' then only needs the tighter subset.
#[derive(Debug, Clone)]
pub struct Analyzer {
    evalset: EvaluationSet,
    gamma: f64,
    config: EstimatorConfig,
    sorted_objectives: Vec<f64>,
    top: Vec<usize>,
    /// `regimes[n][d]`: zero-based regime of parameter `d` in trial `n`.
    regimes: Vec<Vec<usize>>,
    /// `reference[d][i]` for regime `i` of parameter `d`.
    reference: Vec<Vec<Reference>>,
}

impl Analyzer {
    pub fn new(evalset: EvaluationSet, gamma: f64, config: EstimatorConfig) -> Result<Self> {
        if let DensityEstimator::Smoothed { grid_size, .. } = config.density {
            if grid_size < 2 {
                return Err(Error::InvalidArgument(format!(
                    "grid size must be at least 2, got {grid_size}"
                )));
            }
        }
        let objectives = evalset.objectives();
        let top = top_indices(&objectives, gamma)?;
        let mut sorted_objectives = objectives;
        sorted_objectives.sort_by(f64::total_cmp);
        let regimes = evalset
            .trials()
            .iter()
            .map(|t| evalset.space().regime_positions(&t.values))
            .collect::<Result<Vec<_>>>()?;
        let mut analyzer = Analyzer {
            evalset,
            gamma,
            config,
            sorted_objectives,
            top,
            regimes,
            reference: Vec::new(),
        };
        analyzer.reference = (0..analyzer.evalset.space().len())
            .map(|d| analyzer.fit_references(d))
            .collect::<Result<_>>()?;
        Ok(analyzer)
    }

    pub fn evalset(&self) -> &EvaluationSet {
        &self.evalset
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn quantiles(&self, gamma_prime: f64) -> Result<QuantilePair> {
        QuantilePair::new(self.gamma, gamma_prime)
    }

    /// Trials of the top-γ' subset; always a subset of the top-γ one.
    fn top_prime(&self, gamma_prime: f64) -> Result<Vec<usize>> {
        let n = self.sorted_objectives.len();
        let k = top_count(n, gamma_prime);
        if k == 0 {
            return Err(Error::QuantileTooSmall {
                gamma: gamma_prime,
                n,
                min_gamma: 1.0 / n as f64,
            });
        }
        let threshold = self.sorted_objectives[k - 1];
        let trials = self.evalset.trials();
        Ok(self
            .top
            .iter()
            .copied()
            .filter(|&i| trials[i].objective <= threshold)
            .collect())
    }

    /// `|top-γ'| / |top-γ|`.
    pub fn empirical_ratio(&self, gamma_prime: f64) -> Result<f64> {
        Ok(self.top_prime(gamma_prime)?.len() as f64 / self.top.len() as f64)
    }

    fn samples(&self, d: usize, regime: usize, subset: &[usize]) -> RegimeSamples {
        let trials = self.evalset.trials();
        let members = subset.iter().filter(|&&n| self.regimes[n][d] == regime);
        match &self.evalset.space().parameters()[d].regimes[regime].domain {
            Domain::Inactive => RegimeSamples::Inactive(members.count()),
            Domain::Continuous { .. } => RegimeSamples::Numbers(
                members
                    .filter_map(|&n| trials[n].values[d].as_number())
                    .collect(),
            ),
            Domain::Categorical { .. } => RegimeSamples::Labels(
                members
                    .filter_map(|&n| match &trials[n].values[d] {
                        ParamValue::Category(l) => Some(l.clone()),
                        _ => None,
                    })
                    .collect(),
            ),
        }
    }

    fn fit(
        &self,
        domain: &Domain,
        samples: &RegimeSamples,
        support: Option<&Density>,
    ) -> Result<Reference> {
        if samples.is_empty() {
            return Ok(Reference::Absent);
        }
        let density = match (domain, samples, self.config.density) {
            (Domain::Inactive, _, _) => Density::Degenerate,
            (
                Domain::Continuous { lo, hi },
                RegimeSamples::Numbers(v),
                DensityEstimator::Smoothed { grid_size, .. },
            ) => {
                if v.len() < self.config.min_samples {
                    return Ok(Reference::TooFew);
                }
                fit_continuous_density(v, *lo, *hi, grid_size)?
            }
            (Domain::Continuous { .. }, RegimeSamples::Numbers(v), DensityEstimator::Empirical) => {
                let labels: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
                empirical_over(&labels, support)?
            }
            (
                Domain::Categorical { labels },
                RegimeSamples::Labels(v),
                DensityEstimator::Smoothed { pseudo_count, .. },
            ) => fit_categorical_density_with(v, labels, pseudo_count)?,
            (Domain::Categorical { .. }, RegimeSamples::Labels(v), DensityEstimator::Empirical) => {
                empirical_over(v, support)?
            }
            _ => unreachable!("regime samples always match their domain"),
        };
        Ok(Reference::Fitted(density))
    }

    fn fit_references(&self, d: usize) -> Result<Vec<Reference>> {
        let param = &self.evalset.space().parameters()[d];
        param
            .regimes
            .iter()
            .enumerate()
            .map(|(i, r)| self.fit(&r.domain, &self.samples(d, i, &self.top), None))
            .collect()
    }

    /// Per-regime shares and within-regime divergences of parameter `d`.
    pub fn regime_stats(&self, d: usize, gamma_prime: f64) -> Result<Vec<RegimeStats>> {
        let q = self.quantiles(gamma_prime)?;
        let top_prime = self.top_prime(q.gamma_prime())?;
        let param = &self.evalset.space().parameters()[d];
        let mut stats = Vec::with_capacity(param.regimes.len());
        for (i, regime) in param.regimes.iter().enumerate() {
            let samples_top = self.samples(d, i, &self.top);
            let samples_top_prime = self.samples(d, i, &top_prime);
            let count_top = samples_top.len();
            let count_top_prime = samples_top_prime.len();
            if count_top == 0 && count_top_prime > 0 {
                return Err(Error::AbsoluteContinuity(format!(
                    "regime {} of `{}` occurs in the top-γ' set but not the top-γ set",
                    i + 1,
                    param.name
                )));
            }
            let mut warning = None;
            let divergence = if count_top_prime == 0 {
                0.0
            } else {
                match &self.reference[d][i] {
                    Reference::Absent => 0.0,
                    Reference::TooFew => {
                        warning = Some(self.too_few(&param.name, i, count_top_prime, count_top));
                        0.0
                    }
                    Reference::Fitted(q_density) => {
                        match self.fit(&regime.domain, &samples_top_prime, Some(q_density))? {
                            Reference::Fitted(p_density) => {
                                pearson_divergence_density(&p_density, q_density)?
                            }
                            _ => {
                                warning =
                                    Some(self.too_few(&param.name, i, count_top_prime, count_top));
                                0.0
                            }
                        }
                    }
                }
            };
            if let Some(w) = &warning {
                log::warn!("{w}");
            }
            stats.push(RegimeStats {
                regime: i + 1,
                alpha: count_top_prime as f64 / top_prime.len() as f64,
                beta: count_top as f64 / self.top.len() as f64,
                count_top_prime,
                count_top,
                samples_top_prime,
                samples_top,
                divergence,
                warning,
            });
        }
        Ok(stats)
    }

    fn too_few(&self, param: &str, regime: usize, n_prime: usize, n: usize) -> String {
        format!(
            "`{param}` regime {}: {n_prime} top-γ' and {n} top-γ samples, fewer than {} needed for KDE; divergence set to 0",
            regime + 1,
            self.config.min_samples
        )
    }

    /// Single-domain estimate `κ² D_PE(p_γ' ‖ p_γ)` for an unconditional
    /// parameter, with an optional warning.
    pub fn ped_variance(&self, d: usize, gamma_prime: f64) -> Result<(f64, Option<String>)> {
        let q = self.quantiles(gamma_prime)?;
        let param = &self.evalset.space().parameters()[d];
        if param.is_conditional() {
            return Err(Error::ConditionalParam {
                param: param.name.clone(),
            });
        }
        let domain = &param.regimes[0].domain;
        let top_prime = self.top_prime(q.gamma_prime())?;
        let p_samples = self.samples(d, 0, &top_prime);
        let divergence = match &self.reference[d][0] {
            Reference::Fitted(reference) => match self.fit(domain, &p_samples, Some(reference))? {
                Reference::Fitted(p) => pearson_divergence_density(&p, reference)?,
                _ => {
                    let w = self.too_few(&param.name, 0, p_samples.len(), self.top.len());
                    log::warn!("{w}");
                    return Ok((0.0, Some(w)));
                }
            },
            Reference::TooFew => {
                let w = self.too_few(&param.name, 0, p_samples.len(), self.top.len());
                log::warn!("{w}");
                return Ok((0.0, Some(w)));
            }
            Reference::Absent => 0.0,
        };
        let kappa = q.kappa();
        Ok((kappa * kappa * divergence, None))
    }
}

/// Empirical PMF over the support of `reference` (or over the samples'
/// own distinct values when there is no reference yet).
fn empirical_over(samples: &[String], reference: Option<&Density>) -> Result<Density> {
    let support: Vec<String> = match reference {
        Some(Density::Pmf { labels, .. }) => labels.clone(),
        Some(_) => {
            return Err(Error::DensityMismatch(
                "empirical reference must be a PMF".into(),
            ))
        }
        None => {
            let mut s = samples.to_vec();
            s.sort();
            s.dedup();
            s
        }
    };
    empirical_pmf(samples, &support)
}

#[derive(Debug, Clone)]
enum Parts {
    Whole(Box<Analyzer>),
    /// One analyzer per parameter on its own filtered subset; `None` when
    /// the parameter is never active.
    Filtered(Vec<Option<Analyzer>>),
}

/// Everything needed to evaluate one method at many γ' for a fixed γ.
#[derive(Debug, Clone)]
pub struct Prepared {
    method: Method,
    extension: Option<Extension>,
    names: Vec<String>,
    main: Analyzer,
    parts: Parts,
}

impl Prepared {
    pub fn new(
        evalset: &EvaluationSet,
        gamma: f64,
        method: Method,
        extension: Option<Extension>,
        config: EstimatorConfig,
    ) -> Result<Self> {
        if extension.is_some() && method != Method::Ped {
            return Err(Error::InvalidArgument(format!(
                "--extension only applies to --method ped, not {method}"
            )));
        }
        if method == Method::Ped && extension.is_none() {
            if let Some(p) = evalset
                .space()
                .parameters()
                .iter()
                .find(|p| p.is_conditional())
            {
                return Err(Error::ConditionalParam {
                    param: p.name.clone(),
                });
            }
        }
        let names: Vec<String> = evalset.space().names().map(String::from).collect();
        let main = Analyzer::new(evalset.clone(), gamma, config)?;
        let parts = match extension {
            None => Parts::Whole(Box::new(main.clone())),
            Some(Extension::Imputation) => Parts::Whole(Box::new(Analyzer::new(
                apply_imputation(evalset)?.evalset,
                gamma,
                config,
            )?)),
            Some(Extension::Expansion) => Parts::Whole(Box::new(Analyzer::new(
                apply_expansion(evalset)?.evalset,
                gamma,
                config,
            )?)),
            Some(Extension::Filtering) => Parts::Filtered(
                names
                    .iter()
                    .map(|name| {
                        let t = apply_filtering(evalset, name)?;
                        if t.evalset.is_empty() {
                            Ok(None)
                        } else {
                            Analyzer::new(t.evalset, gamma, config).map(Some)
                        }
                    })
                    .collect::<Result<_>>()?,
            ),
        };
        Ok(Prepared {
            method,
            extension,
            names,
            main,
            parts,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn extension(&self) -> Option<Extension> {
        self.extension
    }

    pub fn report(&self, gamma_prime: f64) -> Result<HpiReport> {
        let q = self.main.quantiles(gamma_prime)?;
        let mut raw = BTreeMap::new();
        let mut breakdowns = Vec::new();
        let mut warnings = Vec::new();
        for (d, name) in self.names.iter().enumerate() {
            let value = match self.method {
                Method::Ped => {
                    let result = match &self.parts {
                        Parts::Whole(a) => {
                            Some(a.ped_variance(a.evalset().space().position(name)?, gamma_prime)?)
                        }
                        Parts::Filtered(parts) => match &parts[d] {
                            Some(a) => Some(
                                a.ped_variance(a.evalset().space().position(name)?, gamma_prime)?,
                            ),
                            None => None,
                        },
                    };
                    match result {
                        Some((v, w)) => {
                            warnings.extend(w);
                            v
                        }
                        None => 0.0,
                    }
                }
                Method::Cped | Method::Standard | Method::NaiveWithin => {
                    let stats = self.main.regime_stats(d, gamma_prime)?;
                    warnings.extend(stats.iter().filter_map(|s| s.warning.clone()));
                    match self.method {
                        Method::NaiveWithin => naive_within_variance(&stats, q),
                        _ => {
                            let b = standard_local_variance(name, &stats, q)?;
                            let v = if self.method == Method::Cped {
                                b.within
                            } else {
                                b.total
                            };
                            breakdowns.push(b);
                            v
                        }
                    }
                }
            };
            raw.insert(name.clone(), value);
        }
        let (normalized, degenerate) = normalize_hpi(&raw)?;
        Ok(HpiReport {
            method: self.method,
            extension: self.extension,
            quantiles: q,
            kappa: q.kappa(),
            empirical_ratio: self.main.empirical_ratio(gamma_prime)?,
            estimator: self.main.config,
            raw,
            normalized,
            degenerate,
            breakdowns,
            warnings,
        })
    }
}
