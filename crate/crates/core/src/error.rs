use thiserror::Error;

/// Errors produced across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HpcError {
    #[error("arithmetic overflow computing {0}")]
    Overflow(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("statistic undefined: {0}")]
    UndefinedStatistic(String),
    #[error("work budget exceeded after {0} search nodes")]
    BudgetExceeded(u64),
    #[error("{context}: {source}")]
    Trial {
        context: String,
        #[source]
        source: Box<HpcError>,
    },
}

impl HpcError {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        HpcError::Param(msg.into())
    }

    pub(crate) fn range(msg: impl Into<String>) -> Self {
        HpcError::Range(msg.into())
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        HpcError::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    /// Short machine-readable code, used in CSV status columns.
    pub fn code(&self) -> &'static str {
        match self {
            HpcError::Overflow(_) => "overflow",
            HpcError::Range(_) => "range",
            HpcError::Param(_) => "param",
            HpcError::Parse { .. } => "parse",
            HpcError::UndefinedStatistic(_) => "undefined-statistic",
            HpcError::BudgetExceeded(_) => "budget-exceeded",
            HpcError::Trial { source, .. } => source.code(),
        }
    }
}

pub type Result<T> = std::result::Result<T, HpcError>;
