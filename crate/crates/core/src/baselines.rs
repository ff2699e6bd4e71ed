//! Naive ways to force a conditional evaluation set into an unconditional
//! one so that the single-domain estimator can run on it.
//!
//! * filtering keeps only trials where the target parameter is active;
//! * imputation replaces `⊥` by the midpoint of the parameter's active hull
//!   (first label for categorical parameters);
//! * expansion widens regime-specific ranges to their hull.
//!
//! Every synthesized space has exactly one unconditional regime per
//! parameter.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Domain, EvaluationSet, ParamValue, ParameterSpec, SearchSpace, Trial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extension {
    Filtering,
    Imputation,
    Expansion,
}

impl Extension {
    pub const ALL: [Extension; 3] = [
        Extension::Filtering,
        Extension::Imputation,
        Extension::Expansion,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Extension::Filtering => "filtering",
            Extension::Imputation => "imputation",
            Extension::Expansion => "expansion",
        }
    }
}

impl fmt::Display for Extension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Extension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Extension::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown extension `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Transform {
    Filtering { param: String },
    Imputation,
    Expansion,
}

/// One replaced value.
#[derive(Debug, Clone, PartialEq)]
pub struct Imputed {
    /// Index of the trial in the source set.
    pub trial: usize,
    pub param: String,
    pub value: ParamValue,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Provenance {
    /// Source index of every retained trial, in order.
    pub kept: Vec<usize>,
    /// Parameters left out of the synthesized space.
    pub dropped_params: Vec<String>,
    pub imputed: Vec<Imputed>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct TransformedSet {
    pub evalset: EvaluationSet,
    pub transform: Transform,
    pub provenance: Provenance,
}

/// Smallest domain covering every active regime of `param`; `None` if the
/// parameter is never active.
fn active_hull(param: &ParameterSpec, transform: &'static str) -> Result<Option<Domain>> {
    let mut hull: Option<Domain> = None;
    for regime in &param.regimes {
        hull = match (hull, &regime.domain) {
            (h, Domain::Inactive) => h,
            (None, d) => Some(d.clone()),
            (Some(Domain::Continuous { lo, hi }), Domain::Continuous { lo: l, hi: h }) => {
                Some(Domain::Continuous {
                    lo: lo.min(*l),
                    hi: hi.max(*h),
                })
            }
            (Some(Domain::Categorical { mut labels }), Domain::Categorical { labels: more }) => {
                for l in more {
                    if !labels.contains(l) {
                        labels.push(l.clone());
                    }
                }
                Some(Domain::Categorical { labels })
            }
            _ => {
                return Err(Error::Transform {
                    transform,
                    param: param.name.clone(),
                    reason: "mixes continuous and categorical regimes".into(),
                })
            }
        };
    }
    Ok(hull)
}

/// Keeps the trials where `param` is active. The synthesized space holds the
/// parameters active in every retained trial, each over its active hull.
pub fn apply_filtering(evalset: &EvaluationSet, param: &str) -> Result<TransformedSet> {
    let space = evalset.space();
    let target = space.position(param)?;
    let kept: Vec<usize> = evalset
        .trials()
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.values[target].is_inactive())
        .map(|(i, _)| i)
        .collect();

    let mut columns = Vec::new();
    let mut params = Vec::new();
    let mut dropped = Vec::new();
    for (d, p) in space.parameters().iter().enumerate() {
        let always_active = kept
            .iter()
            .all(|&i| !evalset.trials()[i].values[d].is_inactive());
        match active_hull(p, "filtering")? {
            Some(hull) if always_active && (d == target || !kept.is_empty()) => {
                columns.push(d);
                params.push(ParameterSpec::unconditional(p.name.clone(), hull));
            }
            _ => dropped.push(p.name.clone()),
        }
    }
    let trials = kept
        .iter()
        .map(|&i| {
            let t = &evalset.trials()[i];
            Trial::new(
                columns.iter().map(|&d| t.values[d].clone()).collect(),
                t.objective,
            )
        })
        .collect();
    let mut provenance = Provenance {
        kept,
        dropped_params: dropped,
        ..Provenance::default()
    };
    if provenance.kept.is_empty() {
        provenance.notes.push(format!(
            "`{param}` is never active; its importance is defined as 0"
        ));
    }
    Ok(TransformedSet {
        evalset: EvaluationSet::new_unchecked(SearchSpace::new(params)?, trials),
        transform: Transform::Filtering {
            param: param.to_string(),
        },
        provenance,
    })
}

/// Replaces every `⊥` by the midpoint of the active hull, or by the first
/// label of a categorical hull.
pub fn apply_imputation(evalset: &EvaluationSet) -> Result<TransformedSet> {
    let space = evalset.space();
    let mut params = Vec::with_capacity(space.len());
    let mut fill = Vec::with_capacity(space.len());
    let mut notes = Vec::new();
    for p in space.parameters() {
        let hull = active_hull(p, "imputation")?.ok_or_else(|| Error::Transform {
            transform: "imputation",
            param: p.name.clone(),
            reason: "the parameter is active in no regime".into(),
        })?;
        let value = match &hull {
            Domain::Continuous { lo, hi } => ParamValue::Number(0.5 * (lo + hi)),
            Domain::Categorical { labels } => {
                if p.has_inactive_regime() {
                    notes.push(format!(
                        "`{}` imputed with its first label `{}`",
                        p.name, labels[0]
                    ));
                }
                ParamValue::Category(labels[0].clone())
            }
            Domain::Inactive => unreachable!("hulls are active"),
        };
        fill.push(value);
        params.push(ParameterSpec::unconditional(p.name.clone(), hull));
    }
    let mut imputed = Vec::new();
    let trials = evalset
        .trials()
        .iter()
        .enumerate()
        .map(|(n, t)| {
            let values = t
                .values
                .iter()
                .enumerate()
                .map(|(d, v)| {
                    if v.is_inactive() {
                        imputed.push(Imputed {
                            trial: n,
                            param: space.parameters()[d].name.clone(),
                            value: fill[d].clone(),
                        });
                        fill[d].clone()
                    } else {
                        v.clone()
                    }
                })
                .collect();
            Trial::new(values, t.objective)
        })
        .collect();
    Ok(TransformedSet {
        evalset: EvaluationSet::new_unchecked(SearchSpace::new(params)?, trials),
        transform: Transform::Imputation,
        provenance: Provenance {
            kept: (0..evalset.len()).collect(),
            imputed,
            notes,
            ..Provenance::default()
        },
    })
}

/// Treats every value as drawn from the hull of its parameter's regime
/// domains. Parameters with an inactive regime are rejected.
pub fn apply_expansion(evalset: &EvaluationSet) -> Result<TransformedSet> {
    let space = evalset.space();
    let mut params = Vec::with_capacity(space.len());
    for p in space.parameters() {
        if p.has_inactive_regime() {
            return Err(Error::Transform {
                transform: "expansion",
                param: p.name.clone(),
                reason: "it has an inactive regime; use filtering or imputation".into(),
            });
        }
        let hull = active_hull(p, "expansion")?.expect("no inactive regimes");
        params.push(ParameterSpec::unconditional(p.name.clone(), hull));
    }
    Ok(TransformedSet {
        evalset: EvaluationSet::new_unchecked(SearchSpace::new(params)?, evalset.trials().to_vec()),
        transform: Transform::Expansion,
        provenance: Provenance {
            kept: (0..evalset.len()).collect(),
            ..Provenance::default()
        },
    })
}
