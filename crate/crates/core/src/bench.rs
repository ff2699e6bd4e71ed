//! Synthetic objectives with a gating parameter, uniform sampling and
//! seed-aggregated HPI-vs-γ′ sweeps.
//!
//! Randomness comes from PCG32 (`rand_pcg::Pcg32`, 64-bit state,
//! XSH-RR output), seeded per run with `Pcg32::seed_from_u64(seed)`, so a
//! seed always reproduces the same trials on every platform regardless of
//! which other seeds run alongside it.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg32;
use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::Extension;
use crate::error::{Error, Result};
use crate::hpi::{EstimatorConfig, HpiReport, Method, Prepared};
use crate::space::{
    Domain, EvaluationSet, ParamValue, ParameterSpec, RegimeCondition, RegimeSpec, SearchSpace,
    Trial,
};

/// Threshold on the gating parameter `c`; `c = 0.5` belongs to the upper
/// branch.
pub const GATE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SyntheticObjective {
    /// `x ∈ [−5, −2]` active iff `c < 0.5`, `y ∈ [2, 5]` otherwise;
    /// `f` is the active one.
    ActivationDisjoint,
    /// As above with `x ∈ [−5, 2]` and `y ∈ [−2, 5]`.
    ActivationOverlap,
    /// Both always active with ranges switched by `c`; `f = x + y`.
    RegimeDomains,
}

impl SyntheticObjective {
    pub const ALL: [SyntheticObjective; 3] = [
        SyntheticObjective::ActivationDisjoint,
        SyntheticObjective::ActivationOverlap,
        SyntheticObjective::RegimeDomains,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SyntheticObjective::ActivationDisjoint => "activation-disjoint",
            SyntheticObjective::ActivationOverlap => "activation-overlap",
            SyntheticObjective::RegimeDomains => "regime-domains",
        }
    }

    pub fn space(self) -> SearchSpace {
        let below = || vec![RegimeCondition::in_interval("c", 0.0, GATE)];
        let above = || vec![RegimeCondition::in_interval("c", GATE, 1.0)];
        let switched = |name: &str, low: Domain, high: Domain| {
            ParameterSpec::new(
                name,
                vec![
                    RegimeSpec::new(below(), low),
                    RegimeSpec::new(above(), high),
                ],
            )
        };
        let c = ParameterSpec::unconditional("c", Domain::continuous(0.0, 1.0));
        let params = match self {
            SyntheticObjective::ActivationDisjoint => vec![
                c,
                switched("x", Domain::continuous(-5.0, -2.0), Domain::Inactive),
                switched("y", Domain::Inactive, Domain::continuous(2.0, 5.0)),
            ],
            SyntheticObjective::ActivationOverlap => vec![
                c,
                switched("x", Domain::continuous(-5.0, 2.0), Domain::Inactive),
                switched("y", Domain::Inactive, Domain::continuous(-2.0, 5.0)),
            ],
            SyntheticObjective::RegimeDomains => vec![
                c,
                switched(
                    "x",
                    Domain::continuous(-7.0, -2.0),
                    Domain::continuous(2.0, 7.0),
                ),
                switched(
                    "y",
                    Domain::continuous(-5.0, -2.0),
                    Domain::continuous(2.0, 5.0),
                ),
            ],
        };
        SearchSpace::new(params).expect("synthetic spaces are well formed")
    }

    /// Objective value of a configuration laid out as `[c, x, y]`.
    pub fn evaluate(self, values: &[ParamValue]) -> Result<f64> {
        let read = |d: usize, name: &str| -> Result<f64> {
            values
                .get(d)
                .and_then(ParamValue::as_number)
                .ok_or_else(|| {
                    Error::InvalidSample(format!(
                        "{} objective needs a value for `{name}`",
                        self.name()
                    ))
                })
        };
        let c = read(0, "c")?;
        match self {
            SyntheticObjective::ActivationDisjoint | SyntheticObjective::ActivationOverlap => {
                if c < GATE {
                    read(1, "x")
                } else {
                    read(2, "y")
                }
            }
            SyntheticObjective::RegimeDomains => Ok(read(1, "x")? + read(2, "y")?),
        }
    }
}

impl fmt::Display for SyntheticObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SyntheticObjective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SyntheticObjective::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown objective `{s}`")))
    }
}

fn draw(domain: &Domain, rng: &mut Pcg32) -> ParamValue {
    match domain {
        Domain::Continuous { lo, hi } => ParamValue::Number(lo + (hi - lo) * rng.random::<f64>()),
        Domain::Categorical { labels } => {
            ParamValue::Category(labels[rng.random_range(0..labels.len())].clone())
        }
        Domain::Inactive => ParamValue::Inactive,
    }
}

/// `n` configurations drawn uniformly: each parameter, in declaration order,
/// from the domain of the regime its parents select.
pub fn sample_uniform(space: &SearchSpace, n: usize, seed: u64) -> Result<Vec<Vec<ParamValue>>> {
    let mut rng = Pcg32::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut values = vec![ParamValue::Inactive; space.len()];
        let mut regimes = Vec::with_capacity(space.len());
        for (d, param) in space.parameters().iter().enumerate() {
            let r = space.match_regime(d, &values, &regimes)?;
            values[d] = draw(&param.regimes[r].domain, &mut rng);
            regimes.push(r);
        }
        out.push(values);
    }
    Ok(out)
}

/// Uniform sample of `n` trials from `objective`, evaluated.
pub fn generate(objective: SyntheticObjective, n: usize, seed: u64) -> Result<EvaluationSet> {
    let space = objective.space();
    let trials = sample_uniform(&space, n, seed)?
        .into_iter()
        .map(|values| Ok(Trial::new(values.clone(), objective.evaluate(&values)?)))
        .collect::<Result<Vec<_>>>()?;
    EvaluationSet::new(space, trials)
}

/// Resamples `evalset` with replacement to its own size.
pub fn bootstrap(evalset: &EvaluationSet, seed: u64) -> EvaluationSet {
    let mut rng = Pcg32::seed_from_u64(seed);
    let n = evalset.len();
    let trials = (0..n)
        .map(|_| evalset.trials()[rng.random_range(0..n)].clone())
        .collect();
    evalset.with_trials(trials)
}

/// `{step, 2·step, …, γ − step}`, rounded to twelve decimals so that
/// values print cleanly.
pub fn gamma_prime_grid(gamma: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step < gamma) {
        return Err(Error::InvalidArgument(format!(
            "step must lie in (0, gamma = {gamma}), got {step}"
        )));
    }
    let count = (gamma / step).round() as usize;
    Ok((1..count)
        .map(|k| (k as f64 * step * 1e12).round() / 1e12)
        .filter(|&g| g < gamma)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub objective: SyntheticObjective,
    pub n: usize,
    pub gamma: f64,
    pub gamma_prime_step: f64,
    pub seeds: Vec<u64>,
    pub estimator: EstimatorConfig,
    /// Aggregate raw variances instead of normalized HPIs.
    pub raw: bool,
}

impl SweepConfig {
    pub fn new(objective: SyntheticObjective) -> Self {
        SweepConfig {
            objective,
            n: 1000,
            gamma: 1.0,
            gamma_prime_step: 0.01,
            seeds: (0..10).collect(),
            estimator: EstimatorConfig::default(),
            raw: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub gamma_prime: f64,
    pub param: String,
    pub method: String,
    pub mean_hpi: f64,
    pub stderr_hpi: f64,
    pub n_seeds: usize,
}

/// A seed whose importances were all zero at some γ′.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegenerateRun {
    pub seed: u64,
    pub gamma_prime: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SweepResult {
    /// Sorted by method, parameter, then γ′.
    pub rows: Vec<SweepRow>,
    pub degenerate: Vec<DegenerateRun>,
    pub warnings: Vec<String>,
}

impl SweepResult {
    /// Mean of `param` under `method` at the grid point nearest `gamma_prime`.
    pub fn mean_at(&self, method: &str, param: &str, gamma_prime: f64) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.method == method && r.param == param)
            .min_by(|a, b| {
                (a.gamma_prime - gamma_prime)
                    .abs()
                    .total_cmp(&(b.gamma_prime - gamma_prime).abs())
            })
            .map(|r| r.mean_hpi)
    }
}

/// Reports of one seed, one per γ′, in grid order.
#[derive(Debug, Clone)]
pub struct SeedRun {
    pub seed: u64,
    pub reports: Vec<HpiReport>,
}

/// `"cped"`, or `"ped-filtering"` when an extension is used.
pub fn method_label(method: Method, extension: Option<Extension>) -> String {
    match extension {
        Some(e) => format!("{method}-{e}"),
        None => method.to_string(),
    }
}

/// Mean and standard error (sample standard deviation over `√n`); the
/// error is 0 for fewer than two values.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Mean and standard error per (γ′, parameter) across seeds. Normalized
/// values of degenerate reports are left out; raw values never are.
pub fn aggregate_seeds(runs: &[SeedRun], raw: bool) -> Result<SweepResult> {
    let first = runs
        .first()
        .ok_or_else(|| Error::InvalidArgument("aggregation needs at least one seed".into()))?;
    let mut result = SweepResult::default();
    // (method, param) -> γ′ index -> values
    let mut cells: BTreeMap<(String, String), Vec<Vec<f64>>> = BTreeMap::new();
    let points = first.reports.len();
    for run in runs {
        if run.reports.len() != points {
            return Err(Error::InvalidArgument(format!(
                "seed {} has {} reports, expected {points}",
                run.seed,
                run.reports.len()
            )));
        }
        for (k, report) in run.reports.iter().enumerate() {
            if report.quantiles != first.reports[k].quantiles {
                return Err(Error::InvalidArgument(format!(
                    "seed {} disagrees on the quantile grid",
                    run.seed
                )));
            }
            if report.degenerate {
                result.degenerate.push(DegenerateRun {
                    seed: run.seed,
                    gamma_prime: report.quantiles.gamma_prime(),
                });
            }
            result.warnings.extend(report.warnings.iter().cloned());
            let method = method_label(report.method, report.extension);
            let values = if raw { &report.raw } else { &report.normalized };
            for (param, &v) in values {
                let cell = cells
                    .entry((method.clone(), param.clone()))
                    .or_insert_with(|| vec![Vec::new(); points]);
                if raw || !report.degenerate {
                    cell[k].push(v);
                }
            }
        }
    }
    for ((method, param), per_point) in cells {
        for (k, values) in per_point.iter().enumerate() {
            let (mean, stderr) = mean_stderr(values);
            result.rows.push(SweepRow {
                gamma_prime: first.reports[k].quantiles.gamma_prime(),
                param: param.clone(),
                method: method.clone(),
                mean_hpi: mean,
                stderr_hpi: stderr,
                n_seeds: values.len(),
            });
        }
    }
    result.rows.sort_by(|a, b| {
        (&a.method, &a.param)
            .cmp(&(&b.method, &b.param))
            .then(a.gamma_prime.total_cmp(&b.gamma_prime))
    });
    Ok(result)
}

/// Runs `method` over the γ′ grid on each `(seed, evalset)` pair. Pairs are
/// processed in parallel and merged in the given order.
pub fn sweep_sets(
    sets: &[(u64, EvaluationSet)],
    gamma: f64,
    step: f64,
    method: Method,
    extension: Option<Extension>,
    estimator: EstimatorConfig,
    raw: bool,
) -> Result<SweepResult> {
    let grid = gamma_prime_grid(gamma, step)?;
    let runs = sets
        .par_iter()
        .map(|(seed, set)| {
            let prepared = Prepared::new(set, gamma, method, extension, estimator)?;
            let reports = grid
                .par_iter()
                .map(|&gp| prepared.report(gp))
                .collect::<Result<Vec<_>>>()?;
            Ok(SeedRun {
                seed: *seed,
                reports,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    aggregate_seeds(&runs, raw)
}

/// Samples, evaluates and analyses every seed of `config`.
pub fn run_sweep(
    config: &SweepConfig,
    method: Method,
    extension: Option<Extension>,
) -> Result<SweepResult> {
    if config.n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    gamma_prime_grid(config.gamma, config.gamma_prime_step)?;
    let sets = config
        .seeds
        .par_iter()
        .map(|&seed| Ok((seed, generate(config.objective, config.n, seed)?)))
        .collect::<Result<Vec<_>>>()?;
    sweep_sets(
        &sets,
        config.gamma,
        config.gamma_prime_step,
        method,
        extension,
        config.estimator,
        config.raw,
    )
}
