//! JSON form of a search space.

use serde::{Deserialize, Serialize};

use super::{ConditionTest, Domain, ParameterSpec, RegimeCondition, RegimeSpec, SearchSpace};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceDoc {
    parameters: Vec<ParamDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamDoc {
    name: String,
    regimes: Vec<RegimeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegimeDoc {
    #[serde(default)]
    conditions: Vec<ConditionDoc>,
    domain: DomainDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum DomainDoc {
    Continuous { lo: f64, hi: f64 },
    Categorical { labels: Vec<String> },
    Inactive,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConditionDoc {
    parent: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    equals: Option<String>,
    #[serde(default, rename = "in", skip_serializing_if = "Option::is_none")]
    interval: Option<[f64; 2]>,
}

impl SearchSpace {
    /// Parses and validates a search-space JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: SpaceDoc = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::schema(path, e.into_inner().to_string())
        })?;
        let mut params = Vec::with_capacity(doc.parameters.len());
        for (d, p) in doc.parameters.into_iter().enumerate() {
            let mut regimes = Vec::with_capacity(p.regimes.len());
            for (i, r) in p.regimes.into_iter().enumerate() {
                let mut conditions = Vec::with_capacity(r.conditions.len());
                for (j, c) in r.conditions.into_iter().enumerate() {
                    let test = match (c.equals, c.interval) {
                        (Some(label), None) => ConditionTest::Equals(label),
                        (None, Some([lo, hi])) => ConditionTest::InInterval { lo, hi },
                        _ => {
                            return Err(Error::schema(
                                format!("parameters[{d}].regimes[{i}].conditions[{j}]"),
                                "exactly one of `equals` or `in` is required",
                            ))
                        }
                    };
                    conditions.push(RegimeCondition {
                        parent: c.parent,
                        test,
                    });
                }
                let domain = match r.domain {
                    DomainDoc::Continuous { lo, hi } => Domain::Continuous { lo, hi },
                    DomainDoc::Categorical { labels } => Domain::Categorical { labels },
                    DomainDoc::Inactive => Domain::Inactive,
                };
                regimes.push(RegimeSpec { conditions, domain });
            }
            params.push(ParameterSpec {
                name: p.name,
                regimes,
            });
        }
        SearchSpace::new(params)
    }

    pub fn to_json(&self) -> String {
        let doc = SpaceDoc {
            parameters: self
                .parameters
                .iter()
                .map(|p| ParamDoc {
                    name: p.name.clone(),
                    regimes: p
                        .regimes
                        .iter()
                        .map(|r| RegimeDoc {
                            conditions: r
                                .conditions
                                .iter()
                                .map(|c| match &c.test {
                                    ConditionTest::Equals(l) => ConditionDoc {
                                        parent: c.parent.clone(),
                                        equals: Some(l.clone()),
                                        interval: None,
                                    },
                                    ConditionTest::InInterval { lo, hi } => ConditionDoc {
                                        parent: c.parent.clone(),
                                        equals: None,
                                        interval: Some([*lo, *hi]),
                                    },
                                })
                                .collect(),
                            domain: match &r.domain {
                                Domain::Continuous { lo, hi } => {
                                    DomainDoc::Continuous { lo: *lo, hi: *hi }
                                }
                                Domain::Categorical { labels } => DomainDoc::Categorical {
                                    labels: labels.clone(),
                                },
                                Domain::Inactive => DomainDoc::Inactive,
                            },
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("search space serializes")
    }
}

/// Reads and validates a search-space file.
pub fn parse_space(text: &str) -> Result<SearchSpace> {
    SearchSpace::from_json(text)
}
