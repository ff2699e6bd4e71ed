//! Hyperparameter importance for conditional search spaces.
//!
//! The crate computes local HPI from an evaluation set (trials of a search
//! space whose parameters may be inactive or switch domains depending on
//! parent parameters). [`hpi::analyze`] runs the conditional estimator
//! (`cped`), which measures only within-regime variation, alongside the
//! original single-domain estimator (`ped`) and two ablations. The
//! [`baselines`] module holds the naive transforms that make `ped` usable on
//! conditional spaces, [`bench`] reproduces the synthetic experiments and
//! [`report`] writes their CSV and SVG output.
//!
//! ```
//! use cped_core::bench::{generate, SyntheticObjective};
//! use cped_core::{analyze, EstimatorConfig, Method, QuantilePair};
//!
//! let set = generate(SyntheticObjective::ActivationDisjoint, 200, 1).unwrap();
//! let q = QuantilePair::new(1.0, 0.1).unwrap();
//! let report = analyze(&set, q, Method::Cped, None, &EstimatorConfig::default()).unwrap();
//! let total: f64 = report.normalized.values().sum();
//! assert!((total - 1.0).abs() < 1e-9);
//! ```

pub mod baselines;
pub mod bench;
pub mod error;
pub mod hpi;
pub mod report;
pub mod space;
pub mod stats;

pub use baselines::{
    apply_expansion, apply_filtering, apply_imputation, Extension, TransformedSet,
};
pub use bench::{SweepConfig, SweepResult, SweepRow, SyntheticObjective};
pub use error::{Error, ErrorKind, Result};
pub use hpi::{analyze, normalize_hpi, EstimatorConfig, HpiReport, Method};
pub use report::{ChartSpec, YRange};
pub use space::{
    load_trials, parse_space, Domain, EvaluationSet, ParamValue, ParameterSpec, RegimeCondition,
    RegimeSpec, SearchSpace, Trial,
};
pub use stats::QuantilePair;
