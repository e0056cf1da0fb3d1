use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("log-gamma pole at nonpositive integer {0}")]
    Pole(f64),

    #[error("range error in {function}: {detail}")]
    Range {
        function: &'static str,
        detail: String,
    },

    #[error("quadrature did not converge on [{lower}, {upper}] within {panels} panels")]
    NonConvergence { lower: f64, upper: f64, panels: usize },

    #[error("could not certify the decay of the [2, inf) tail up to z = {z_max}")]
    TailFailure { z_max: f64 },

    #[error("inadmissible potential: {0}")]
    InvalidPotential(String),

    #[error("momentum endpoint error: {0}")]
    Endpoint(String),

    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("partial wave l = {l}: {source}")]
    AtPartialWave {
        l: u32,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    pub(crate) fn range(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Range {
            function,
            detail: detail.into(),
        }
    }

    pub(crate) fn at_l(self, l: u32) -> Self {
        Error::AtPartialWave {
            l,
            source: Box::new(self),
        }
    }
}
