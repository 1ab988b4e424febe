use thiserror::Error;

/// Which distance-distribution moment failed to converge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentKind {
    Signal,
    Interference,
}

impl std::fmt::Display for MomentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MomentKind::Signal => f.write_str("signal-link"),
            MomentKind::Interference => f.write_str("interference-link"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error(
        "{kind} path-gain moment diverges for alpha = {alpha:.4} without a truncation radius; \
         set a positive near-field distance"
    )]
    Divergence { kind: MomentKind, alpha: f64 },

    #[error(
        "exact enumeration needs {required} compositions, above the budget of {budget}; \
         use the Monte Carlo estimator instead"
    )]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("degenerate population: {0}")]
    DegeneratePopulation(String),

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("quadrature did not converge on [{a}, {b}]: estimated error {error:e}")]
    Quadrature { a: f64, b: f64, error: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($fmt:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::$variant(format!($($fmt)+)));
        }
    };
}

pub(crate) use ensure;
