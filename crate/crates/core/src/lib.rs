//! Market-entry decision engine.
//!
//! Values a target company (adjusted net assets or discounted cash flow),
//! combines the value with comparative country parameters into the risk
//! indicator `I` and `I* = log10(I)`, and maps `I*` to an entry strategy.

pub mod error;
pub mod indicator;
pub mod ratings;
pub mod reference;
pub mod statements;
pub mod valuation;

pub use error::{EntryError, Result};
pub use indicator::{
    compute_indicator, interpret, recommend, strategy_grid, validate_params, BandId,
    CompanyValueInput, IndicatorResult, MarketParams, RangeWarning, SpecialNote, StrategyBand,
    ValuationMethod,
};
pub use ratings::{
    grade_to_n, Agency, RatingCategory, RatingEvent, RatingGrade, RatingsDataset, Trend,
};
pub use statements::{
    dynamics, select_items, DynamicsSeries, FinancialStatements, LineItem, Selection, Side,
    StatementKind,
};
pub use valuation::{
    present_value, value_anc, value_dcf, Adjustment, AdjustmentKind, Breakdown, DcfParams,
    PresentValue, ValuationResult,
};
