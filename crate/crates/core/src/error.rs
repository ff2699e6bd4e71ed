use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Numerical,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Usage => 1,
            ErrorKind::Data => 2,
            ErrorKind::Numerical => 3,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            ErrorKind::Usage => "usage",
            ErrorKind::Data => "data",
            ErrorKind::Numerical => "numerical",
        }
    }
}

/// One reason a trial does not fit its search space.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub param: String,
    pub reason: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.param, self.reason)
    }
}

fn join_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("parameter `{param}` references `{parent}`, which is not declared before it")]
    UndeclaredParent { param: String, parent: String },

    #[error("regimes of `{param}` are {problem} (e.g. at {witness})")]
    RegimeCover {
        param: String,
        problem: &'static str,
        witness: String,
    },

    #[error("no regime of `{param}` matches the trial")]
    NoRegime { param: String },

    #[error("regimes {regimes:?} of `{param}` all match the trial")]
    AmbiguousRegime { param: String, regimes: Vec<usize> },

    #[error("parent `{parent}` of `{param}` is inactive in the trial")]
    InactiveParent { param: String, parent: String },

    #[error("unknown parameter `{0}`")]
    UnknownParam(String),

    #[error("invalid trial: {}", join_violations(.0))]
    InvalidTrial(Vec<Violation>),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: {}", join_violations(.violations))]
    InvalidLine {
        line: usize,
        violations: Vec<Violation>,
    },

    #[error("empty evaluation set")]
    EmptyEvaluationSet,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid quantile pair: need 0 < gamma' < gamma <= 1, got gamma'={gamma_prime}, gamma={gamma}")]
    InvalidQuantiles { gamma: f64, gamma_prime: f64 },

    #[error(
        "gamma={gamma} selects no trial out of {n}; the smallest feasible gamma is {min_gamma}"
    )]
    QuantileTooSmall {
        gamma: f64,
        n: usize,
        min_gamma: f64,
    },

    #[error("absolute continuity violated: {0}")]
    AbsoluteContinuity(String),

    #[error("densities are not comparable: {0}")]
    DensityMismatch(String),

    #[error("{0}")]
    InvalidSample(String),

    #[error("`{param}` is conditional; use --method cped, or --method ped with an --extension (filtering, imputation, expansion)")]
    ConditionalParam { param: String },

    #[error("cannot apply {transform} to `{param}`: {reason}")]
    Transform {
        transform: &'static str,
        param: String,
        reason: String,
    },

    #[error("negative raw variance {value} for `{param}`")]
    NegativeVariance { param: String, value: f64 },

    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidQuantiles { .. } | Error::InvalidArgument(_) => ErrorKind::Usage,
            Error::Schema { .. }
            | Error::UndeclaredParent { .. }
            | Error::RegimeCover { .. }
            | Error::NoRegime { .. }
            | Error::AmbiguousRegime { .. }
            | Error::InactiveParent { .. }
            | Error::UnknownParam(_)
            | Error::InvalidTrial(_)
            | Error::Parse { .. }
            | Error::InvalidLine { .. }
            | Error::EmptyEvaluationSet
            | Error::Io { .. } => ErrorKind::Data,
            Error::QuantileTooSmall { .. }
            | Error::AbsoluteContinuity(_)
            | Error::DensityMismatch(_)
            | Error::InvalidSample(_)
            | Error::ConditionalParam { .. }
            | Error::Transform { .. }
            | Error::NegativeVariance { .. } => ErrorKind::Numerical,
        }
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
