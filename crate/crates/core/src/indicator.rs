//! Market-entry risk indicator.
//!
//! The indicator multiplies the target-country rating, the compatibility
//! score, the inflation and growth ratios between target and origin, and the
//! value-to-capital ratio of the company used for the associative strategy:
//!
//! ```text
//! I  = N * F * (1 + RI_T)/(1 + RI_O) * (1 + RCE_T)/(1 + RCE_O) * V/CS
//! I* = log10(I) = log10(N * inflation ratio * growth ratio) + log10(F * V/CS)
//! ```
//!
//! The first logarithmic term describes the country (macro) risk, the second
//! the company (micro) risk. `I*` selects one of five entry strategies.

use rust_decimal::prelude::ToPrimitive;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::error::{EntryError, Result};

pub const RATING_MIN: f64 = 1.0;
pub const RATING_MAX: f64 = 10.0;
pub const COMPATIBILITY_MIN: f64 = 0.1;
pub const COMPATIBILITY_MAX: f64 = 100.0;
/// Upper end of the reasonable range for the inflation and growth ratios.
pub const RATIO_LIMIT: f64 = 2.0;
/// Upper end of the reasonable range for V/CS.
pub const VALUE_RATIO_LIMIT: f64 = 100.0;

/// Comparative parameters between the target market and the country of origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    /// Country rating of the target market, 1 (crisis) to 10 (stable).
    pub country_rating: f64,
    /// Cultural and organizational compatibility, 0.1 to 100.
    pub compatibility: f64,
    pub inflation_target: f64,
    pub inflation_origin: f64,
    pub growth_target: f64,
    pub growth_origin: f64,
}

impl MarketParams {
    pub fn inflation_ratio(&self) -> f64 {
        (1.0 + self.inflation_target) / (1.0 + self.inflation_origin)
    }

    pub fn growth_ratio(&self) -> f64 {
        (1.0 + self.growth_target) / (1.0 + self.growth_origin)
    }

    /// Hard limits only; see [`validate_params`] for the soft range warnings.
    pub fn validate(&self) -> Result<()> {
        let n = finite("country_rating", self.country_rating)?;
        let f = finite("compatibility", self.compatibility)?;
        let ri_t = finite("inflation_target", self.inflation_target)?;
        let ri_o = finite("inflation_origin", self.inflation_origin)?;
        let rce_t = finite("growth_target", self.growth_target)?;
        let rce_o = finite("growth_origin", self.growth_origin)?;

        if !(RATING_MIN..=RATING_MAX).contains(&n) {
            return Err(EntryError::validation(
                "country_rating",
                "must lie in [1, 10]",
            ));
        }
        if !(COMPATIBILITY_MIN..=COMPATIBILITY_MAX).contains(&f) {
            return Err(EntryError::validation(
                "compatibility",
                "must lie in [0.1, 100]",
            ));
        }
        // A target rate of exactly -100% would zero the product.
        for (field, rate) in [
            ("inflation_target", ri_t),
            ("inflation_origin", ri_o),
            ("growth_target", rce_t),
            ("growth_origin", rce_o),
        ] {
            if 1.0 + rate <= 0.0 {
                return Err(EntryError::validation(field, "1 + rate must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ValuationMethod {
    /// Adjusted net assets.
    Anc,
    /// Discounted cash flow.
    Dcf,
    /// Stock-exchange value of a listed company.
    Market,
}

impl ValuationMethod {
    pub const ALL: [ValuationMethod; 3] = [Self::Anc, Self::Dcf, Self::Market];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Anc => "ANC",
            Self::Dcf => "DCF",
            Self::Market => "MARKET",
        }
    }
}

impl std::fmt::Display for ValuationMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ValuationMethod {
    type Err = EntryError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "ANC" => Ok(Self::Anc),
            "DCF" => Ok(Self::Dcf),
            "MARKET" => Ok(Self::Market),
            _ => Err(EntryError::validation(
                "method",
                format!("unknown method `{s}`"),
            )),
        }
    }
}

/// Company value and social capital, in the same currency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompanyValueInput {
    pub company_value: Decimal,
    pub social_capital: Decimal,
    pub method: ValuationMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RangeWarning {
    InflationRatioOutOfRange,
    GrowthRatioOutOfRange,
    ValueRatioOutOfRange,
    NearBankrupt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BandId {
    Greenfield,
    Acquisition,
    MergerAcquisition,
    Cooperation,
    Export,
}

impl BandId {
    pub const ALL: [BandId; 5] = [
        Self::Greenfield,
        Self::Acquisition,
        Self::MergerAcquisition,
        Self::Cooperation,
        Self::Export,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Self::Greenfield => "GREENFIELD",
            Self::Acquisition => "ACQUISITION",
            Self::MergerAcquisition => "MERGER_ACQUISITION",
            Self::Cooperation => "COOPERATION",
            Self::Export => "EXPORT",
        }
    }

    /// Half-open `[lower, upper)` interval of I* covered by the band.
    pub fn bounds(self) -> (f64, f64) {
        match self {
            Self::Greenfield => (f64::NEG_INFINITY, 0.0),
            Self::Acquisition => (0.0, 1.6),
            Self::MergerAcquisition => (1.6, 2.0),
            Self::Cooperation => (2.0, 5.0),
            Self::Export => (5.0, f64::INFINITY),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Greenfield => "Direct greenfield investment",
            Self::Acquisition => "Acquisition",
            Self::MergerAcquisition => "Mergers, acquisitions",
            Self::Cooperation => "Licensing, franchising, strategic alliances, management contract",
            Self::Export => "Export",
        }
    }

    pub fn environment_note(self) -> &'static str {
        match self {
            Self::Greenfield => "The microeconomic environment likely to be entirely taken over",
            Self::Acquisition => {
                "The microeconomic environment likely to be entirely taken over by a buy of the \
                 majority of stocks and joining the management team"
            }
            Self::MergerAcquisition => {
                "The microeconomic environment likely to be taken over at an equal rate to that \
                 of the partner"
            }
            Self::Cooperation => "The microeconomic environment favorable for economic cooperation",
            Self::Export => {
                "The microeconomic environment hard to be approached through a partnership but \
                 favorable for trading operations"
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SpecialNote {
    TargetUndervaluedOrDistressed,
    TargetFinanciallyStrong,
}

impl SpecialNote {
    pub fn text(self) -> &'static str {
        match self {
            Self::TargetUndervaluedOrDistressed => {
                "Target is undervalued or close to bankruptcy and could be taken over and \
                 restructured easily"
            }
            Self::TargetFinanciallyStrong => "Target has a very good financial situation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyBand {
    pub band_id: BandId,
    pub label: String,
    pub environment_note: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub special_note: Option<SpecialNote>,
}

impl From<BandId> for StrategyBand {
    fn from(band_id: BandId) -> Self {
        StrategyBand {
            band_id,
            label: band_id.label().to_string(),
            environment_note: band_id.environment_note().to_string(),
            special_note: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorResult {
    pub i: f64,
    pub i_star: f64,
    pub macro_term: f64,
    pub micro_term: f64,
    pub warnings: Vec<RangeWarning>,
    pub recommendation: StrategyBand,
}

fn finite(field: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(EntryError::NonFiniteInput {
            field: field.to_string(),
        })
    }
}

fn money_to_f64(field: &str, x: Decimal) -> Result<f64> {
    x.to_f64()
        .ok_or_else(|| EntryError::validation(field, "amount not representable"))
}

/// Checks hard limits and collects soft range warnings.
pub fn validate_params(
    params: &MarketParams,
    value: &CompanyValueInput,
) -> Result<Vec<RangeWarning>> {
    params.validate()?;
    if value.company_value <= Decimal::ZERO {
        return Err(EntryError::validation("company_value", "must be positive"));
    }
    if value.social_capital <= Decimal::ZERO {
        return Err(EntryError::validation("social_capital", "must be positive"));
    }
    let v = money_to_f64("company_value", value.company_value)?;
    let cs = money_to_f64("social_capital", value.social_capital)?;
    let value_ratio = v / cs;
    if !value_ratio.is_finite() || value_ratio <= 0.0 {
        return Err(EntryError::validation(
            "company_value",
            "V/CS is not a finite positive ratio",
        ));
    }

    let mut warnings = Vec::new();
    let in_range = |x: f64| x > 0.0 && x <= RATIO_LIMIT;
    if !in_range(params.inflation_ratio()) {
        warnings.push(RangeWarning::InflationRatioOutOfRange);
    }
    if !in_range(params.growth_ratio()) {
        warnings.push(RangeWarning::GrowthRatioOutOfRange);
    }
    if value_ratio > VALUE_RATIO_LIMIT {
        warnings.push(RangeWarning::ValueRatioOutOfRange);
    }
    if value.company_value < value.social_capital {
        warnings.push(RangeWarning::NearBankrupt);
    }
    Ok(warnings)
}

/// Evaluates I, I* and its decomposition, and attaches the recommendation.
pub fn compute_indicator(
    params: &MarketParams,
    value: &CompanyValueInput,
) -> Result<IndicatorResult> {
    let warnings = validate_params(params, value)?;
    let v = money_to_f64("company_value", value.company_value)?;
    let cs = money_to_f64("social_capital", value.social_capital)?;

    let country_factor = params.country_rating * params.inflation_ratio() * params.growth_ratio();
    let company_factor = params.compatibility * (v / cs);
    let i = country_factor * company_factor;
    let i_star = i.log10();

    let mut recommendation = recommend(i_star)?;
    recommendation.special_note = interpret(i_star, params.country_rating);

    Ok(IndicatorResult {
        i,
        i_star,
        macro_term: country_factor.log10(),
        micro_term: company_factor.log10(),
        warnings,
        recommendation,
    })
}

/// Maps I* onto the strategy grid. Every band is closed below, open above.
pub fn recommend(i_star: f64) -> Result<StrategyBand> {
    let i_star = finite("i_star", i_star)?;
    let band = if i_star < 0.0 {
        BandId::Greenfield
    } else if i_star < 1.6 {
        BandId::Acquisition
    } else if i_star < 2.0 {
        BandId::MergerAcquisition
    } else if i_star < 5.0 {
        BandId::Cooperation
    } else {
        BandId::Export
    };
    Ok(band.into())
}

/// Extra reading of the extreme bands for well-rated target countries (N > 6).
pub fn interpret(i_star: f64, country_rating: f64) -> Option<SpecialNote> {
    if !(i_star.is_finite() && country_rating.is_finite()) || country_rating <= 6.0 {
        return None;
    }
    if i_star < 0.0 {
        Some(SpecialNote::TargetUndervaluedOrDistressed)
    } else if i_star > 5.0 {
        Some(SpecialNote::TargetFinanciallyStrong)
    } else {
        None
    }
}

/// One row of the strategy grid, for display.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub band_id: BandId,
    /// `None` stands for negative infinity.
    pub lower: Option<f64>,
    /// `None` stands for positive infinity.
    pub upper: Option<f64>,
    pub label: &'static str,
    pub environment_note: &'static str,
}

pub fn strategy_grid() -> Vec<GridRow> {
    BandId::ALL
        .iter()
        .map(|&band_id| {
            let (lo, hi) = band_id.bounds();
            GridRow {
                band_id,
                lower: lo.is_finite().then_some(lo),
                upper: hi.is_finite().then_some(hi),
                label: band_id.label(),
                environment_note: band_id.environment_note(),
            }
        })
        .collect()
}
