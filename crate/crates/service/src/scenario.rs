//! Scenario model and the pure evaluation workflow shared by the HTTP API
//! and the CLI.

use std::collections::BTreeMap;

use chrono::{DateTime, NaiveDate, Utc};
use market_entry_core::{
    compute_indicator, value_anc, value_dcf, Adjustment, BandId, CompanyValueInput, DcfParams,
    EntryError, FinancialStatements, IndicatorResult, MarketParams, ValuationMethod,
    ValuationResult,
};
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ServiceError};

/// Line item consulted for the social capital when none is given explicitly.
pub const SOCIAL_CAPITAL_ITEM: &str = "social_capital";

/// Editable part of a scenario, as submitted by clients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDraft {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub company_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statements_id: Option<String>,
    pub market_params: MarketParams,
    /// Falls back to the `social_capital` statement item at `valuation_date`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub social_capital: Option<Decimal>,
    pub chosen_method: ValuationMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valuation_date: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjustments: Option<Vec<Adjustment>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dcf_params: Option<DcfParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub market_value: Option<Decimal>,
    /// Totals supplied by the analyst; used instead of recomputing the method.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub reported_values: BTreeMap<ValuationMethod, Decimal>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub scenario_id: String,
    /// Optimistic concurrency token, bumped on every update.
    pub version: u64,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
    #[serde(flatten)]
    pub draft: ScenarioDraft,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdateRequest {
    pub version: u64,
    #[serde(flatten)]
    pub draft: ScenarioDraft,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub evaluation_id: String,
    pub scenario: Scenario,
    pub valuation: ValuationResult,
    pub social_capital: Decimal,
    pub indicator: IndicatorResult,
    pub evaluated_at: DateTime<Utc>,
}

impl ScenarioDraft {
    /// Why `method` cannot be evaluated, or `None` when its inputs are present.
    pub fn missing_inputs(&self, method: ValuationMethod) -> Option<&'static str> {
        if self.reported_values.contains_key(&method) {
            return None;
        }
        match method {
            ValuationMethod::Anc if self.statements_id.is_none() => {
                Some("statements_id is required")
            }
            ValuationMethod::Anc if self.valuation_date.is_none() => {
                Some("valuation_date is required")
            }
            ValuationMethod::Dcf if self.dcf_params.is_none() => Some("dcf_params are required"),
            ValuationMethod::Market if self.market_value.is_none() => {
                Some("market_value is required")
            }
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.company_id.trim().is_empty() {
            return Err(invalid("company_id", "must not be empty"));
        }
        self.market_params.validate()?;
        if let Some(reason) = self.missing_inputs(self.chosen_method) {
            return Err(invalid(
                "chosen_method",
                format!("{}: {reason}", self.chosen_method),
            ));
        }
        if let Some(v) = self.market_value {
            if v <= Decimal::ZERO {
                return Err(invalid("market_value", "must be positive"));
            }
        }
        if let Some(cs) = self.social_capital {
            if cs <= Decimal::ZERO {
                return Err(invalid("social_capital", "must be positive"));
            }
        }
        if self.social_capital.is_none()
            && (self.statements_id.is_none() || self.valuation_date.is_none())
        {
            return Err(invalid(
                "social_capital",
                "required unless statements and a valuation date are given",
            ));
        }
        for (method, v) in &self.reported_values {
            if *v <= Decimal::ZERO {
                return Err(invalid(
                    &format!("reported_values.{method}"),
                    "must be positive",
                ));
            }
        }
        Ok(())
    }
}

fn invalid(field: &str, reason: impl Into<String>) -> ServiceError {
    EntryError::Validation {
        field: field.to_string(),
        reason: reason.into(),
    }
    .into()
}

fn need_statements<'a>(
    draft: &ScenarioDraft,
    statements: Option<&'a FinancialStatements>,
) -> Result<&'a FinancialStatements> {
    statements.ok_or_else(|| ServiceError::NotFound {
        what: "statements",
        id: draft.statements_id.clone().unwrap_or_default(),
    })
}

/// Runs one valuation method for the scenario.
pub fn run_valuation(
    draft: &ScenarioDraft,
    method: ValuationMethod,
    statements: Option<&FinancialStatements>,
) -> Result<ValuationResult> {
    if let Some(reason) = draft.missing_inputs(method) {
        return Err(invalid("chosen_method", format!("{method}: {reason}")));
    }
    if let Some(value) = draft.reported_values.get(&method) {
        return Ok(ValuationResult::reported(
            method,
            *value,
            "analyst",
            draft.valuation_date,
        ));
    }
    match method {
        ValuationMethod::Anc => {
            let statements = need_statements(draft, statements)?;
            let period = draft.valuation_date.expect("checked by missing_inputs");
            let adjustments = draft.adjustments.as_deref().unwrap_or_default();
            Ok(value_anc(statements, period, adjustments)?)
        }
        ValuationMethod::Dcf => {
            let mut result = value_dcf(
                draft
                    .dcf_params
                    .as_ref()
                    .expect("checked by missing_inputs"),
            )?;
            result.as_of = draft.valuation_date;
            Ok(result)
        }
        ValuationMethod::Market => Ok(ValuationResult::reported(
            method,
            draft.market_value.expect("checked by missing_inputs"),
            "market",
            draft.valuation_date,
        )),
    }
}

pub fn social_capital(
    draft: &ScenarioDraft,
    statements: Option<&FinancialStatements>,
) -> Result<Decimal> {
    if let Some(cs) = draft.social_capital {
        return Ok(cs);
    }
    let statements = need_statements(draft, statements)?;
    let period = draft
        .valuation_date
        .ok_or_else(|| invalid("valuation_date", "required to read the social capital"))?;
    statements
        .value(SOCIAL_CAPITAL_ITEM, period)
        .ok_or_else(|| invalid("social_capital", "not present in the statements"))
}

/// Valuation plus indicator for one method.
pub fn evaluate_method(
    draft: &ScenarioDraft,
    method: ValuationMethod,
    statements: Option<&FinancialStatements>,
) -> Result<(ValuationResult, Decimal, IndicatorResult)> {
    let valuation = run_valuation(draft, method, statements)?;
    let cs = social_capital(draft, statements)?;
    let indicator = compute_indicator(
        &draft.market_params,
        &CompanyValueInput {
            company_value: valuation.value,
            social_capital: cs,
            method,
        },
    )?;
    Ok((valuation, cs, indicator))
}

pub fn evaluate_scenario(
    scenario: &Scenario,
    statements: Option<&FinancialStatements>,
    evaluated_at: DateTime<Utc>,
) -> Result<EvaluationRecord> {
    let (valuation, social_capital, indicator) =
        evaluate_method(&scenario.draft, scenario.draft.chosen_method, statements)
            .map_err(|e| e.with_context(format!("scenario {}", scenario.scenario_id)))?;
    Ok(EvaluationRecord {
        evaluation_id: uuid::Uuid::new_v4().simple().to_string(),
        scenario: scenario.clone(),
        valuation,
        social_capital,
        indicator,
        evaluated_at,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: ValuationMethod,
    pub value: Decimal,
    pub i: f64,
    pub i_star: f64,
    pub band_id: BandId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unavailable {
    pub method: ValuationMethod,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDifference {
    pub first: ValuationMethod,
    pub second: ValuationMethod,
    pub abs_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodComparison {
    pub methods: Vec<MethodOutcome>,
    pub differences: Vec<PairDifference>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unavailable: Vec<Unavailable>,
}

impl MethodComparison {
    pub fn difference(&self, a: ValuationMethod, b: ValuationMethod) -> Option<f64> {
        self.differences
            .iter()
            .find(|d| (d.first, d.second) == (a, b) || (d.first, d.second) == (b, a))
            .map(|d| d.abs_difference)
    }
}

/// I* under every method the scenario can evaluate, and all pairwise gaps.
pub fn compare_methods(
    draft: &ScenarioDraft,
    statements: Option<&FinancialStatements>,
) -> Result<MethodComparison> {
    let mut methods = Vec::new();
    let mut unavailable = Vec::new();
    for method in ValuationMethod::ALL {
        if let Some(reason) = draft.missing_inputs(method) {
            unavailable.push(Unavailable {
                method,
                reason: reason.to_string(),
            });
            continue;
        }
        match evaluate_method(draft, method, statements) {
            Ok((valuation, _, indicator)) => methods.push(MethodOutcome {
                method,
                value: valuation.value,
                i: indicator.i,
                i_star: indicator.i_star,
                band_id: indicator.recommendation.band_id,
            }),
            Err(e) => unavailable.push(Unavailable {
                method,
                reason: format!("{}: {e}", e.code()),
            }),
        }
    }
    if methods.len() < 2 {
        return Err(ServiceError::InsufficientMethods(methods.len()));
    }
    let mut differences = Vec::new();
    for (k, a) in methods.iter().enumerate() {
        for b in &methods[k + 1..] {
            differences.push(PairDifference {
                first: a.method,
                second: b.method,
                abs_difference: (a.i_star - b.i_star).abs(),
            });
        }
    }
    Ok(MethodComparison {
        methods,
        differences,
        unavailable,
    })
}
