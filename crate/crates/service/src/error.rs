use market_entry_core::EntryError;
use serde::Serialize;
use thiserror::Error;

/// Errors surfaced by the scenario service, as code + message + field path.
#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("{what} `{id}` not found")]
    NotFound { what: &'static str, id: String },

    #[error("version {given} is stale, current version is {current}")]
    Conflict { given: u64, current: u64 },

    #[error("at least two valuation methods must be evaluable, found {0}")]
    InsufficientMethods(usize),

    #[error("{source}")]
    Core {
        #[source]
        source: EntryError,
        /// Scenario or statements the failure belongs to.
        context: Option<String>,
    },

    #[error("storage failure: {0}")]
    Storage(#[from] std::io::Error),

    #[error("corrupt record {path}: {reason}")]
    Corrupt { path: String, reason: String },
}

impl From<EntryError> for ServiceError {
    fn from(source: EntryError) -> Self {
        ServiceError::Core {
            source,
            context: None,
        }
    }
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::NotFound { .. } => "NOT_FOUND",
            ServiceError::Conflict { .. } => "CONFLICT",
            ServiceError::InsufficientMethods(_) => "INSUFFICIENT_METHODS",
            ServiceError::Core { source, .. } => source.code(),
            ServiceError::Storage(_) => "STORAGE",
            ServiceError::Corrupt { .. } => "CORRUPT_RECORD",
        }
    }

    pub fn field(&self) -> Option<String> {
        match self {
            ServiceError::Core { source, .. } => source.field(),
            ServiceError::Conflict { .. } => Some("version".into()),
            _ => None,
        }
    }

    pub fn with_context(self, ctx: impl Into<String>) -> Self {
        match self {
            ServiceError::Core { source, .. } => ServiceError::Core {
                source,
                context: Some(ctx.into()),
            },
            other => other,
        }
    }

    /// HTTP status for the error.
    pub fn status(&self) -> u16 {
        match self {
            ServiceError::NotFound { .. } => 404,
            ServiceError::Conflict { .. } => 409,
            ServiceError::InsufficientMethods(_) => 422,
            ServiceError::Core { source, .. } => match source {
                EntryError::UnknownCountry(_) | EntryError::UnknownCategory(_) => 404,
                EntryError::GordonSingularity { .. }
                | EntryError::NegativeHorizon(_)
                | EntryError::InvalidRate { .. } => 422,
                _ => 400,
            },
            ServiceError::Storage(_) | ServiceError::Corrupt { .. } => 500,
        }
    }

    pub fn body(&self) -> ErrorBody {
        let context = match self {
            ServiceError::Core { context, .. } => context.clone(),
            _ => None,
        };
        ErrorBody {
            code: self.code(),
            message: self.to_string(),
            field: self.field(),
            context,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub context: Option<String>,
}

pub type Result<T, E = ServiceError> = std::result::Result<T, E>;
