//! Conditional search spaces.
//!
//! A parameter owns one or more regimes. Each regime carries a conjunction of
//! tests on earlier parameters and the domain the parameter takes when those
//! tests hold. An inactive regime has the singleton domain `⊥`
//! ([`Domain::Inactive`]). Regimes of one parameter must partition every
//! reachable configuration of its parents; [`SearchSpace::new`] checks this
//! by enumerating one representative point per elementary cell of the
//! parents' domains.

mod schema;
mod trials;

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result, Violation};

pub use schema::parse_space;
pub use trials::{load_trials, parse_trials, trials_to_jsonl};

/// Upper bound on representative configurations explored by the cover check.
const MAX_COVER_CONFIGS: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Continuous { lo: f64, hi: f64 },
    Categorical { labels: Vec<String> },
    Inactive,
}

impl Domain {
    pub fn continuous(lo: f64, hi: f64) -> Self {
        Domain::Continuous { lo, hi }
    }

    pub fn categorical<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        Domain::Categorical {
            labels: labels.into_iter().map(Into::into).collect(),
        }
    }

    pub fn is_inactive(&self) -> bool {
        matches!(self, Domain::Inactive)
    }

    /// Whether an active value lies in this domain. Intervals are closed.
    pub fn contains(&self, value: &ParamValue) -> bool {
        match (self, value) {
            (Domain::Continuous { lo, hi }, ParamValue::Number(v)) => *lo <= *v && *v <= *hi,
            (Domain::Categorical { labels }, ParamValue::Category(l)) => labels.contains(l),
            (Domain::Inactive, ParamValue::Inactive) => true,
            _ => false,
        }
    }

    fn check(&self, path: &str) -> Result<()> {
        match self {
            Domain::Continuous { lo, hi } => {
                if !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::schema(path, "interval bounds must be finite"));
                }
                if lo >= hi {
                    return Err(Error::schema(
                        path,
                        format!("need lo < hi, got [{lo}, {hi}]"),
                    ));
                }
            }
            Domain::Categorical { labels } => {
                if labels.is_empty() {
                    return Err(Error::schema(path, "categorical domain has no labels"));
                }
                for (i, l) in labels.iter().enumerate() {
                    if labels[..i].contains(l) {
                        return Err(Error::schema(path, format!("duplicate label `{l}`")));
                    }
                }
            }
            Domain::Inactive => {}
        }
        Ok(())
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Continuous { lo, hi } => write!(f, "[{lo}, {hi}]"),
            Domain::Categorical { labels } => write!(f, "{{{}}}", labels.join(", ")),
            Domain::Inactive => f.write_str("⊥"),
        }
    }
}

/// Test applied to a parent's value.
#[derive(Debug, Clone, PartialEq)]
pub enum ConditionTest {
    Equals(String),
    /// `lo <= v < hi`; the upper end is also included when `hi` reaches the
    /// upper bound of the parent's current domain.
    InInterval {
        lo: f64,
        hi: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeCondition {
    pub parent: String,
    pub test: ConditionTest,
}

impl RegimeCondition {
    pub fn equals(parent: impl Into<String>, label: impl Into<String>) -> Self {
        RegimeCondition {
            parent: parent.into(),
            test: ConditionTest::Equals(label.into()),
        }
    }

    pub fn in_interval(parent: impl Into<String>, lo: f64, hi: f64) -> Self {
        RegimeCondition {
            parent: parent.into(),
            test: ConditionTest::InInterval { lo, hi },
        }
    }

    /// `parent_domain` is the domain of the regime the parent is in.
    fn holds(&self, value: &ParamValue, parent_domain: &Domain) -> bool {
        match (&self.test, value) {
            (ConditionTest::Equals(label), ParamValue::Category(v)) => label == v,
            (ConditionTest::InInterval { lo, hi }, ParamValue::Number(v)) => {
                if *v >= *lo && *v < *hi {
                    return true;
                }
                match parent_domain {
                    Domain::Continuous { hi: top, .. } => *v == *hi && *hi >= *top,
                    _ => false,
                }
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeSpec {
    pub conditions: Vec<RegimeCondition>,
    pub domain: Domain,
}

impl RegimeSpec {
    pub fn new(conditions: Vec<RegimeCondition>, domain: Domain) -> Self {
        RegimeSpec { conditions, domain }
    }

    pub fn always(domain: Domain) -> Self {
        RegimeSpec::new(Vec::new(), domain)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSpec {
    pub name: String,
    /// Regime `i` (1-based) is `regimes[i - 1]`.
    pub regimes: Vec<RegimeSpec>,
}

impl ParameterSpec {
    pub fn new(name: impl Into<String>, regimes: Vec<RegimeSpec>) -> Self {
        ParameterSpec {
            name: name.into(),
            regimes,
        }
    }

    pub fn unconditional(name: impl Into<String>, domain: Domain) -> Self {
        ParameterSpec::new(name, vec![RegimeSpec::always(domain)])
    }

    pub fn is_conditional(&self) -> bool {
        self.regimes.len() > 1 || self.regimes.iter().any(|r| !r.conditions.is_empty())
    }

    pub fn has_inactive_regime(&self) -> bool {
        self.regimes.iter().any(|r| r.domain.is_inactive())
    }
}

/// A value assigned to one parameter in one trial.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Number(f64),
    Category(String),
    Inactive,
}

impl ParamValue {
    pub fn is_inactive(&self) -> bool {
        matches!(self, ParamValue::Inactive)
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            ParamValue::Number(v) => Some(*v),
            _ => None,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Number(v) => write!(f, "{v}"),
            ParamValue::Category(l) => write!(f, "{l:?}"),
            ParamValue::Inactive => f.write_str("⊥"),
        }
    }
}

/// One evaluated configuration. `values[d]` belongs to the `d`-th parameter
/// of the space the trial was built against.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub values: Vec<ParamValue>,
    pub objective: f64,
}

impl Trial {
    pub fn new(values: Vec<ParamValue>, objective: f64) -> Self {
        Trial { values, objective }
    }
}

/// Immutable, validated conditional search space.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    parameters: Vec<ParameterSpec>,
    index: HashMap<String, usize>,
}

impl SearchSpace {
    pub fn new(parameters: Vec<ParameterSpec>) -> Result<Self> {
        let mut index = HashMap::with_capacity(parameters.len());
        for (d, p) in parameters.iter().enumerate() {
            let path = format!("parameters[{d}]");
            if p.name.is_empty() {
                return Err(Error::schema(
                    format!("{path}.name"),
                    "empty parameter name",
                ));
            }
            if p.regimes.is_empty() {
                return Err(Error::schema(
                    format!("{path}.regimes"),
                    "no regimes declared",
                ));
            }
            for (i, regime) in p.regimes.iter().enumerate() {
                let rpath = format!("{path}.regimes[{i}]");
                regime.domain.check(&format!("{rpath}.domain"))?;
                for (j, cond) in regime.conditions.iter().enumerate() {
                    let cpath = format!("{rpath}.conditions[{j}]");
                    let Some(&parent) = index.get(&cond.parent) else {
                        return Err(Error::UndeclaredParent {
                            param: p.name.clone(),
                            parent: cond.parent.clone(),
                        });
                    };
                    check_condition(&parameters[parent], cond, &cpath)?;
                }
            }
            if index.insert(p.name.clone(), d).is_some() {
                return Err(Error::schema(
                    format!("{path}.name"),
                    format!("duplicate parameter name `{}`", p.name),
                ));
            }
        }
        let space = SearchSpace { parameters, index };
        space.check_cover()?;
        Ok(space)
    }

    pub fn parameters(&self) -> &[ParameterSpec] {
        &self.parameters
    }

    pub fn len(&self) -> usize {
        self.parameters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parameters.is_empty()
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownParam(name.to_string()))
    }

    pub fn param(&self, name: &str) -> Result<&ParameterSpec> {
        Ok(&self.parameters[self.position(name)?])
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.parameters.iter().map(|p| p.name.as_str())
    }

    /// Zero-based position of the matching regime of parameter `d`, given
    /// the values and regime positions of all earlier parameters.
    pub(crate) fn match_regime(
        &self,
        d: usize,
        values: &[ParamValue],
        regimes: &[usize],
    ) -> Result<usize> {
        let param = &self.parameters[d];
        let mut found = Vec::new();
        let mut inactive_parent = None;
        for (i, regime) in param.regimes.iter().enumerate() {
            let mut ok = true;
            for cond in &regime.conditions {
                let parent = self.index[&cond.parent];
                let value = &values[parent];
                if value.is_inactive() {
                    inactive_parent.get_or_insert(parent);
                    ok = false;
                    break;
                }
                let parent_domain = &self.parameters[parent].regimes[regimes[parent]].domain;
                if !cond.holds(value, parent_domain) {
                    ok = false;
                    break;
                }
            }
            if ok {
                found.push(i);
            }
        }
        match found.as_slice() {
            [i] => Ok(*i),
            [] => match inactive_parent {
                Some(parent) => Err(Error::InactiveParent {
                    param: param.name.clone(),
                    parent: self.parameters[parent].name.clone(),
                }),
                None => Err(Error::NoRegime {
                    param: param.name.clone(),
                }),
            },
            many => Err(Error::AmbiguousRegime {
                param: param.name.clone(),
                regimes: many.iter().map(|i| i + 1).collect(),
            }),
        }
    }

    /// Zero-based regime position of every parameter, in declaration order.
    pub fn regime_positions(&self, values: &[ParamValue]) -> Result<Vec<usize>> {
        if values.len() != self.parameters.len() {
            return Err(Error::InvalidArgument(format!(
                "trial has {} values but the space declares {} parameters",
                values.len(),
                self.parameters.len()
            )));
        }
        let mut regimes = Vec::with_capacity(values.len());
        for d in 0..self.parameters.len() {
            let r = self.match_regime(d, values, &regimes)?;
            regimes.push(r);
        }
        Ok(regimes)
    }

    /// Regime index (1-based) of `param` in `trial`.
    pub fn assign_regime(&self, param: &str, trial: &Trial) -> Result<usize> {
        let d = self.position(param)?;
        let mut regimes = Vec::with_capacity(d + 1);
        for e in 0..=d {
            let r = self.match_regime(e, &trial.values, &regimes)?;
            regimes.push(r);
        }
        Ok(regimes[d] + 1)
    }

    /// Every way `trial` fails to fit the space; empty when valid.
    pub fn validate_trial(&self, trial: &Trial) -> Vec<Violation> {
        let mut violations = Vec::new();
        if !trial.objective.is_finite() {
            violations.push(Violation {
                param: "value".into(),
                reason: format!("objective must be finite, got {}", trial.objective),
            });
        }
        if trial.values.len() != self.parameters.len() {
            violations.push(Violation {
                param: "params".into(),
                reason: format!(
                    "expected {} values, got {}",
                    self.parameters.len(),
                    trial.values.len()
                ),
            });
            return violations;
        }
        let mut regimes = Vec::with_capacity(self.parameters.len());
        for (d, param) in self.parameters.iter().enumerate() {
            let value = &trial.values[d];
            let r = match self.match_regime(d, &trial.values, &regimes) {
                Ok(r) => r,
                Err(e) => {
                    violations.push(Violation {
                        param: param.name.clone(),
                        reason: e.to_string(),
                    });
                    // Later parameters cannot be checked against this one.
                    return violations;
                }
            };
            regimes.push(r);
            let domain = &param.regimes[r].domain;
            let reason = match (domain, value) {
                (_, ParamValue::Number(v)) if !v.is_finite() => {
                    Some(format!("value {v} is not finite"))
                }
                (Domain::Inactive, ParamValue::Inactive) => None,
                (Domain::Inactive, v) => {
                    Some(format!("must be inactive in regime {}, got {v}", r + 1))
                }
                (_, ParamValue::Inactive) => Some(format!("must be active in regime {}", r + 1)),
                (d, v) if !d.contains(v) => Some(format!("{v} outside {d}")),
                _ => None,
            };
            if let Some(reason) = reason {
                violations.push(Violation {
                    param: param.name.clone(),
                    reason,
                });
            }
        }
        violations
    }

    /// Checks that the regimes of every parameter partition the reachable
    /// parent configurations.
    fn check_cover(&self) -> Result<()> {
        let n = self.parameters.len();
        // Interval endpoints each parameter is tested against, and whether any
        // later parameter reads it at all.
        let mut cuts: Vec<Vec<f64>> = vec![Vec::new(); n];
        let mut referenced = vec![false; n];
        for p in &self.parameters {
            for regime in &p.regimes {
                for cond in &regime.conditions {
                    let parent = self.index[&cond.parent];
                    referenced[parent] = true;
                    if let ConditionTest::InInterval { lo, hi } = cond.test {
                        cuts[parent].extend([lo, hi]);
                    }
                }
            }
        }

        let mut configs: Vec<(Vec<ParamValue>, Vec<usize>)> = vec![(Vec::new(), Vec::new())];
        for d in 0..n {
            let mut next = Vec::new();
            for (values, regimes) in configs {
                let r = match self.match_regime(d, &values, &regimes) {
                    Ok(r) => r,
                    Err(Error::AmbiguousRegime { .. }) => {
                        return Err(self.cover_error(d, "overlapping", &values));
                    }
                    Err(_) => return Err(self.cover_error(d, "non-exhaustive", &values)),
                };
                let domain = &self.parameters[d].regimes[r].domain;
                let reps = if referenced[d] {
                    representatives(domain, &cuts[d])
                } else {
                    vec![ParamValue::Inactive]
                };
                for v in reps {
                    let mut values = values.clone();
                    values.push(v);
                    let mut regimes = regimes.clone();
                    regimes.push(r);
                    next.push((values, regimes));
                }
            }
            if next.len() > MAX_COVER_CONFIGS {
                return Err(Error::schema(
                    format!("parameters[{d}]"),
                    "too many parent combinations to verify regime cover",
                ));
            }
            configs = next;
        }
        Ok(())
    }

    fn cover_error(&self, d: usize, problem: &'static str, values: &[ParamValue]) -> Error {
        let witness = self.parameters[..d]
            .iter()
            .zip(values)
            .filter(|(p, _)| {
                self.parameters[d]
                    .regimes
                    .iter()
                    .any(|r| r.conditions.iter().any(|c| c.parent == p.name))
            })
            .map(|(p, v)| format!("{}={v}", p.name))
            .collect::<Vec<_>>()
            .join(", ");
        Error::RegimeCover {
            param: self.parameters[d].name.clone(),
            problem,
            witness: if witness.is_empty() {
                "any configuration".into()
            } else {
                witness
            },
        }
    }
}

fn check_condition(parent: &ParameterSpec, cond: &RegimeCondition, path: &str) -> Result<()> {
    match &cond.test {
        ConditionTest::Equals(label) => {
            let known = parent.regimes.iter().any(|r| match &r.domain {
                Domain::Categorical { labels } => labels.contains(label),
                _ => false,
            });
            if !known {
                return Err(Error::schema(
                    format!("{path}.equals"),
                    format!("`{}` never takes the label `{label}`", parent.name),
                ));
            }
        }
        ConditionTest::InInterval { lo, hi } => {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::schema(
                    format!("{path}.in"),
                    format!("need finite lo < hi, got [{lo}, {hi}]"),
                ));
            }
            if !parent
                .regimes
                .iter()
                .any(|r| matches!(r.domain, Domain::Continuous { .. }))
            {
                return Err(Error::schema(
                    format!("{path}.in"),
                    format!("`{}` has no continuous regime", parent.name),
                ));
            }
        }
    }
    Ok(())
}

/// One point per elementary cell of `domain` split at `cuts`.
fn representatives(domain: &Domain, cuts: &[f64]) -> Vec<ParamValue> {
    match domain {
        Domain::Continuous { lo, hi } => {
            let mut points: Vec<f64> = cuts
                .iter()
                .copied()
                .filter(|c| c > lo && c < hi)
                .chain([*lo, *hi])
                .collect();
            points.sort_by(f64::total_cmp);
            points.dedup();
            let mut reps = Vec::with_capacity(points.len() * 2);
            for w in points.windows(2) {
                reps.push(w[0]);
                reps.push(0.5 * (w[0] + w[1]));
            }
            reps.extend(points.last());
            reps.into_iter().map(ParamValue::Number).collect()
        }
        Domain::Categorical { labels } => {
            labels.iter().cloned().map(ParamValue::Category).collect()
        }
        Domain::Inactive => vec![ParamValue::Inactive],
    }
}

/// A search space together with trials that all validate against it.
#[derive(Debug, Clone)]
pub struct EvaluationSet {
    space: SearchSpace,
    trials: Vec<Trial>,
}

impl EvaluationSet {
    pub fn new(space: SearchSpace, trials: Vec<Trial>) -> Result<Self> {
        for trial in &trials {
            let violations = space.validate_trial(trial);
            if !violations.is_empty() {
                return Err(Error::InvalidTrial(violations));
            }
        }
        Ok(EvaluationSet { space, trials })
    }

    /// Skips validation; callers guarantee every trial fits `space`.
    pub(crate) fn new_unchecked(space: SearchSpace, trials: Vec<Trial>) -> Self {
        EvaluationSet { space, trials }
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn trials(&self) -> &[Trial] {
        &self.trials
    }

    pub fn len(&self) -> usize {
        self.trials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }

    pub fn objectives(&self) -> Vec<f64> {
        self.trials.iter().map(|t| t.objective).collect()
    }

    pub(crate) fn with_trials(&self, trials: Vec<Trial>) -> Self {
        EvaluationSet {
            space: self.space.clone(),
            trials,
        }
    }
}
