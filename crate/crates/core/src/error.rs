use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Input outside the domain of an operation (x not in [0,1), p < 1, ...).
    #[error("domain error: {0}")]
    Domain(String),
    #[error("validation error: {0}")]
    Validation(String),
    /// A configured size cap would be exceeded.
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("unsupported map variant: {0}")]
    Unsupported(String),
    #[error("classification error: {0}")]
    Classification(String),
    #[error("probe failure at scale {scale}: {message}")]
    Probe { scale: f64, message: String },
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Validation(_) => "validation",
            Error::Resource(_) => "resource",
            Error::Numeric(_) => "numeric",
            Error::Unsupported(_) => "unsupported",
            Error::Classification(_) => "classification",
            Error::Probe { .. } => "probe",
        }
    }
}
