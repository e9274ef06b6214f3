//! Company valuation: adjusted net assets and discounted cash flow with a
//! Gordon-Shapiro residual value.

use std::collections::HashSet;

use chrono::NaiveDate;
use rust_decimal::prelude::{FromPrimitive, ToPrimitive};
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::error::{EntryError, Result};
use crate::indicator::ValuationMethod;
use crate::statements::{FinancialStatements, Side};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PresentValue {
    pub value: f64,
    /// The same rate expressed as a deduction at the start of the period,
    /// `i / (1 + i)`.
    pub deduction_rate: f64,
}

pub fn deduction_rate(i: f64) -> Result<f64> {
    if !i.is_finite() || 1.0 + i <= 0.0 {
        return Err(EntryError::InvalidRate { rate: i });
    }
    Ok(i / (1.0 + i))
}

/// Discounts `future_value`, due in `years`, at rate `i` per year.
pub fn present_value(future_value: f64, i: f64, years: u32) -> Result<PresentValue> {
    let deduction_rate = deduction_rate(i)?;
    Ok(PresentValue {
        value: future_value / (1.0 + i).powf(f64::from(years)),
        deduction_rate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcfParams {
    /// Net cash flow of the reference year (revenues minus expenses).
    pub reference_net_cashflow: Decimal,
    pub discount_rate: f64,
    pub perpetual_growth: f64,
    pub horizon_years: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AdjustmentKind {
    RevalueAsset,
    RevalueLiability,
    AddOffBalanceAsset,
    AddOffBalanceLiability,
}

impl AdjustmentKind {
    fn on_asset_side(self) -> bool {
        matches!(self, Self::RevalueAsset | Self::AddOffBalanceAsset)
    }

    fn is_revaluation(self) -> bool {
        matches!(self, Self::RevalueAsset | Self::RevalueLiability)
    }

    fn name(self) -> &'static str {
        match self {
            Self::RevalueAsset => "REVALUE_ASSET",
            Self::RevalueLiability => "REVALUE_LIABILITY",
            Self::AddOffBalanceAsset => "ADD_OFF_BALANCE_ASSET",
            Self::AddOffBalanceLiability => "ADD_OFF_BALANCE_LIABILITY",
        }
    }
}

/// One correction applied on top of the book balance sheet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adjustment {
    /// Line item id for revaluations; free reference for off-balance items.
    pub item_ref: String,
    pub kind: AdjustmentKind,
    #[serde(default)]
    pub book_value: Decimal,
    pub fair_value: Decimal,
    #[serde(default)]
    pub note: String,
}

impl Adjustment {
    /// Parses a JSON list of adjustments.
    pub fn list_from_json(text: &str) -> Result<Vec<Adjustment>> {
        serde_json::from_str(text).map_err(|e| EntryError::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            reason: e.to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjustmentEffect {
    pub item_ref: String,
    pub kind: AdjustmentKind,
    /// Change in net assets caused by the adjustment.
    pub equity_delta: Decimal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscountedFlow {
    pub year: u32,
    pub cashflow: f64,
    pub discounted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Breakdown {
    Anc {
        book_assets: Decimal,
        book_liabilities: Decimal,
        book_equity: Decimal,
        adjustments: Vec<AdjustmentEffect>,
    },
    Dcf {
        flows: Vec<DiscountedFlow>,
        residual_value: f64,
        discounted_residual: f64,
    },
    /// A value supplied by the analyst rather than computed here.
    Reported { source: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ValuationWarning {
    NegativeBaseCashflow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValuationResult {
    pub value: Decimal,
    pub method: ValuationMethod,
    pub breakdown: Breakdown,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub as_of: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<ValuationWarning>,
}

impl ValuationResult {
    /// A value taken as given, e.g. a stock-exchange capitalization.
    pub fn reported(
        method: ValuationMethod,
        value: Decimal,
        source: impl Into<String>,
        as_of: Option<NaiveDate>,
    ) -> Self {
        ValuationResult {
            value,
            method,
            breakdown: Breakdown::Reported {
                source: source.into(),
            },
            as_of,
            warnings: Vec::new(),
        }
    }
}

fn money_from_f64(field: &str, x: f64) -> Result<Decimal> {
    Decimal::from_f64(x)
        .ok_or_else(|| EntryError::validation(field, format!("{x} is not representable as money")))
}

/// Discounted cash flow value: explicit years grown at `g`, plus the
/// Gordon-Shapiro residual `CFNI_n (1 + g) / (r - g)` discounted from year n.
pub fn value_dcf(params: &DcfParams) -> Result<ValuationResult> {
    let r = params.discount_rate;
    let g = params.perpetual_growth;
    for (field, x) in [("discount_rate", r), ("perpetual_growth", g)] {
        if !x.is_finite() {
            return Err(EntryError::NonFiniteInput {
                field: field.to_string(),
            });
        }
    }
    if params.horizon_years < 1 {
        return Err(EntryError::NegativeHorizon(params.horizon_years.into()));
    }
    if r <= g {
        return Err(EntryError::GordonSingularity { r, g });
    }
    if r <= 0.0 {
        return Err(EntryError::validation("discount_rate", "must be positive"));
    }
    if 1.0 + g <= 0.0 {
        return Err(EntryError::InvalidRate { rate: g });
    }
    let base = params
        .reference_net_cashflow
        .to_f64()
        .ok_or_else(|| EntryError::validation("reference_net_cashflow", "not representable"))?;

    let growth = 1.0 + g;
    let discount = 1.0 + r;
    let mut cashflow = base;
    let mut factor = 1.0;
    let mut flows = Vec::with_capacity(params.horizon_years as usize);
    for year in 1..=params.horizon_years as u32 {
        cashflow *= growth;
        factor /= discount;
        flows.push(DiscountedFlow {
            year,
            cashflow,
            discounted: cashflow * factor,
        });
    }
    let residual_value = cashflow * growth / (r - g);
    let discounted_residual = residual_value * factor;
    let total = flows.iter().map(|f| f.discounted).sum::<f64>() + discounted_residual;

    let mut warnings = Vec::new();
    if params.reference_net_cashflow.is_sign_negative() && !params.reference_net_cashflow.is_zero()
    {
        warnings.push(ValuationWarning::NegativeBaseCashflow);
    }
    Ok(ValuationResult {
        value: money_from_f64("value", total)?,
        method: ValuationMethod::Dcf,
        breakdown: Breakdown::Dcf {
            flows,
            residual_value,
            discounted_residual,
        },
        as_of: None,
        warnings,
    })
}

/// Adjusted net assets at `period`: book assets and liabilities of the
/// balance sheet, corrected to fair value and completed with off-balance
/// items. With no adjustments this is the book equity.
pub fn value_anc(
    statements: &FinancialStatements,
    period: NaiveDate,
    adjustments: &[Adjustment],
) -> Result<ValuationResult> {
    let idx = statements
        .period_index(period)
        .ok_or_else(|| EntryError::PeriodNotFound(period.to_string()))?;

    let mut book_assets = Decimal::ZERO;
    let mut book_liabilities = Decimal::ZERO;
    for item in &statements.items {
        let total = match item.side {
            Side::Asset => &mut book_assets,
            Side::Liability => &mut book_liabilities,
            _ => continue,
        };
        let v = item.values[idx].ok_or_else(|| EntryError::MissingValue {
            item: item.item_id.clone(),
            period: period.to_string(),
        })?;
        *total += v;
    }

    let mut revalued = HashSet::new();
    let mut effects = Vec::with_capacity(adjustments.len());
    for adj in adjustments {
        if adj.kind.is_revaluation() {
            let item = statements
                .item(&adj.item_ref)
                .ok_or_else(|| EntryError::UnknownItemRef(adj.item_ref.clone()))?;
            let expected = if adj.kind.on_asset_side() {
                Side::Asset
            } else {
                Side::Liability
            };
            if item.side != expected {
                return Err(EntryError::SideMismatch {
                    item: adj.item_ref.clone(),
                    kind: adj.kind.name().to_string(),
                    side: format!("{:?}", item.side).to_uppercase(),
                });
            }
            let actual = item.values[idx].ok_or_else(|| EntryError::MissingValue {
                item: item.item_id.clone(),
                period: period.to_string(),
            })?;
            if actual != adj.book_value {
                return Err(EntryError::BookValueMismatch {
                    item: adj.item_ref.clone(),
                    stated: adj.book_value.to_string(),
                    actual: actual.to_string(),
                });
            }
            if !revalued.insert(adj.item_ref.as_str()) {
                return Err(EntryError::validation(
                    &adj.item_ref,
                    "item revalued more than once",
                ));
            }
        } else if !adj.book_value.is_zero() {
            return Err(EntryError::validation(
                &adj.item_ref,
                "off-balance additions carry a zero book value",
            ));
        }
        let delta = adj.fair_value - adj.book_value;
        effects.push(AdjustmentEffect {
            item_ref: adj.item_ref.clone(),
            kind: adj.kind,
            equity_delta: if adj.kind.on_asset_side() {
                delta
            } else {
                -delta
            },
        });
    }

    let book_equity = book_assets - book_liabilities;
    let value = book_equity + effects.iter().map(|e| e.equity_delta).sum::<Decimal>();
    Ok(ValuationResult {
        value,
        method: ValuationMethod::Anc,
        breakdown: Breakdown::Anc {
            book_assets,
            book_liabilities,
            book_equity,
            adjustments: effects,
        },
        as_of: Some(period),
        warnings: Vec::new(),
    })
}
