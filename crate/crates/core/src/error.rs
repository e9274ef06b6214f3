use thiserror::Error;

/// Errors raised by the numeric core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntryError {
    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("non-finite input for `{field}`")]
    NonFiniteInput { field: String },

    #[error("invalid rate {rate}: 1 + rate must be positive")]
    InvalidRate { rate: f64 },

    #[error("discount rate {r} must exceed perpetual growth {g}")]
    GordonSingularity { r: f64, g: f64 },

    #[error("horizon must be at least one year, got {0}")]
    NegativeHorizon(i64),

    #[error("adjustment references unknown line item `{0}`")]
    UnknownItemRef(String),

    #[error("unknown line item `{0}`")]
    UnknownItem(String),

    #[error("no balance sheet for period {0}")]
    PeriodNotFound(String),

    #[error("adjustment {kind} cannot target `{item}` ({side} side)")]
    SideMismatch {
        item: String,
        kind: String,
        side: String,
    },

    #[error("adjustment book value {stated} for `{item}` differs from statement value {actual}")]
    BookValueMismatch {
        item: String,
        stated: String,
        actual: String,
    },

    #[error("line item `{item}` has no value for period {period}")]
    MissingValue { item: String, period: String },

    #[error("unknown grade `{symbol}` for {agency}")]
    UnknownGrade { agency: String, symbol: String },

    #[error("unknown country `{0}`")]
    UnknownCountry(String),

    #[error("unknown rating category `{0}`")]
    UnknownCategory(String),

    #[error("parse error at {location}: {reason}")]
    Parse { location: String, reason: String },

    #[error("duplicate line item `{0}`")]
    DuplicateItem(String),

    #[error("periods are not strictly ascending near {0}")]
    UnorderedPeriods(String),

    #[error("statement currency is missing")]
    CurrencyMissing,
}

impl EntryError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            EntryError::Validation { .. } => "VALIDATION",
            EntryError::NonFiniteInput { .. } => "NON_FINITE_INPUT",
            EntryError::InvalidRate { .. } => "INVALID_RATE",
            EntryError::GordonSingularity { .. } => "GORDON_SINGULARITY",
            EntryError::NegativeHorizon(_) => "NEGATIVE_HORIZON",
            EntryError::UnknownItemRef(_) => "UNKNOWN_ITEM_REF",
            EntryError::UnknownItem(_) => "UNKNOWN_ITEM",
            EntryError::PeriodNotFound(_) => "PERIOD_NOT_FOUND",
            EntryError::SideMismatch { .. } => "SIDE_MISMATCH",
            EntryError::BookValueMismatch { .. } => "BOOK_VALUE_MISMATCH",
            EntryError::MissingValue { .. } => "MISSING_VALUE",
            EntryError::UnknownGrade { .. } => "UNKNOWN_GRADE",
            EntryError::UnknownCountry(_) => "UNKNOWN_COUNTRY",
            EntryError::UnknownCategory(_) => "UNKNOWN_CATEGORY",
            EntryError::Parse { .. } => "PARSE_ERROR",
            EntryError::DuplicateItem(_) => "DUPLICATE_ITEM",
            EntryError::UnorderedPeriods(_) => "UNORDERED_PERIODS",
            EntryError::CurrencyMissing => "CURRENCY_MISSING",
        }
    }

    /// Offending field path, when one applies.
    pub fn field(&self) -> Option<String> {
        match self {
            EntryError::Validation { field, .. } | EntryError::NonFiniteInput { field } => {
                Some(field.clone())
            }
            EntryError::UnknownItemRef(item)
            | EntryError::UnknownItem(item)
            | EntryError::DuplicateItem(item) => Some(item.clone()),
            EntryError::SideMismatch { item, .. }
            | EntryError::BookValueMismatch { item, .. }
            | EntryError::MissingValue { item, .. } => Some(item.clone()),
            EntryError::Parse { location, .. } => Some(location.clone()),
            _ => None,
        }
    }

    pub(crate) fn validation(field: &str, reason: impl Into<String>) -> Self {
        EntryError::Validation {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = EntryError> = std::result::Result<T, E>;
