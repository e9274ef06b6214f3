//! Multi-period financial statements: ingestion, item selection and
//! period-over-period dynamics.
//!
//! Two interchange formats are accepted.
//!
//! Long-form CSV (UTF-8, header required). Leading `# key: value` lines carry
//! the company identifier and the currency:
//!
//! ```text
//! # company_id: compa
//! # currency: RON
//! item_id,label,statement,side,period,amount
//! cash,Cash,BALANCE_SHEET,ASSET,2006-12-31,5400000
//! cash,Cash,BALANCE_SHEET,ASSET,2007-12-31,
//! ```
//!
//! Rows of one item are contiguous and period-ascending. An empty amount is
//! an explicit missing value. Amounts use `.` as decimal separator and no
//! grouping.
//!
//! Nested JSON:
//!
//! ```text
//! {
//!   "schema_version": 1,
//!   "company_id": "compa",
//!   "currency": "RON",
//!   "periods": ["2006-12-31", "2007-12-31"],
//!   "items": [
//!     {"item_id": "cash", "label": "Cash", "statement": "BALANCE_SHEET",
//!      "side": "ASSET", "values": ["5400000", null]}
//!   ]
//! }
//! ```

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use chrono::NaiveDate;
use rust_decimal::prelude::ToPrimitive;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::error::{EntryError, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: [&str; 6] = ["item_id", "label", "statement", "side", "period", "amount"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StatementKind {
    BalanceSheet,
    ProfitLoss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Side {
    Asset,
    Liability,
    Equity,
    Revenue,
    Expense,
    Result,
}

impl Side {
    pub fn statement(self) -> StatementKind {
        match self {
            Side::Asset | Side::Liability | Side::Equity => StatementKind::BalanceSheet,
            Side::Revenue | Side::Expense | Side::Result => StatementKind::ProfitLoss,
        }
    }
}

fn enum_name<T: Serialize>(v: T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn parse_enum<T: for<'de> Deserialize<'de>>(s: &str) -> Option<T> {
    serde_json::from_value(serde_json::Value::String(s.trim().to_string())).ok()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineItem {
    pub item_id: String,
    pub label: String,
    pub statement: StatementKind,
    pub side: Side,
    /// One slot per statement period; `None` is a missing value.
    pub values: Vec<Option<Decimal>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FinancialStatements {
    pub company_id: String,
    pub currency: String,
    pub periods: Vec<NaiveDate>,
    pub items: Vec<LineItem>,
}

#[derive(Deserialize)]
struct StatementsDoc {
    #[serde(default)]
    schema_version: Option<u32>,
    company_id: String,
    #[serde(default)]
    currency: Option<String>,
    periods: Vec<NaiveDate>,
    items: Vec<LineItem>,
}

#[derive(Serialize)]
struct StatementsDocRef<'a> {
    schema_version: u32,
    company_id: &'a str,
    currency: &'a str,
    periods: &'a [NaiveDate],
    items: &'a [LineItem],
}

impl<'de> Deserialize<'de> for FinancialStatements {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = StatementsDoc::deserialize(d)?;
        FinancialStatements::from_doc(doc).map_err(serde::de::Error::custom)
    }
}

impl FinancialStatements {
    /// Builds a statement set, checking its invariants.
    pub fn new(
        company_id: impl Into<String>,
        currency: impl Into<String>,
        periods: Vec<NaiveDate>,
        items: Vec<LineItem>,
    ) -> Result<Self> {
        let company_id = company_id.into();
        let currency = currency.into();
        if currency.trim().is_empty() {
            return Err(EntryError::CurrencyMissing);
        }
        if let Some(w) = periods.windows(2).find(|w| w[0] >= w[1]) {
            return Err(EntryError::UnorderedPeriods(w[1].to_string()));
        }
        let mut seen = HashSet::new();
        for item in &items {
            if !seen.insert(item.item_id.as_str()) {
                return Err(EntryError::DuplicateItem(item.item_id.clone()));
            }
            if item.side.statement() != item.statement {
                return Err(EntryError::validation(
                    &item.item_id,
                    format!(
                        "side {} does not belong to {}",
                        enum_name(item.side),
                        enum_name(item.statement)
                    ),
                ));
            }
            if item.values.len() != periods.len() {
                return Err(EntryError::validation(
                    &item.item_id,
                    format!("{} values for {} periods", item.values.len(), periods.len()),
                ));
            }
        }
        Ok(FinancialStatements {
            company_id,
            currency,
            periods,
            items,
        })
    }

    fn from_doc(doc: StatementsDoc) -> Result<Self> {
        if let Some(v) = doc.schema_version {
            if v != SCHEMA_VERSION {
                return Err(EntryError::Parse {
                    location: "schema_version".into(),
                    reason: format!("unsupported schema version {v}"),
                });
            }
        }
        let currency = doc.currency.ok_or(EntryError::CurrencyMissing)?;
        Self::new(doc.company_id, currency, doc.periods, doc.items)
    }

    pub fn item(&self, item_id: &str) -> Option<&LineItem> {
        self.items.iter().find(|i| i.item_id == item_id)
    }

    pub fn period_index(&self, period: NaiveDate) -> Option<usize> {
        self.periods.iter().position(|p| *p == period)
    }

    pub fn value(&self, item_id: &str, period: NaiveDate) -> Option<Decimal> {
        let idx = self.period_index(period)?;
        self.item(item_id)?.values[idx]
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: StatementsDoc = serde_json::from_str(s).map_err(|e| EntryError::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            reason: e.to_string(),
        })?;
        Self::from_doc(doc)
    }

    pub fn to_json_string(&self) -> String {
        let doc = StatementsDocRef {
            schema_version: SCHEMA_VERSION,
            company_id: &self.company_id,
            currency: &self.currency,
            periods: &self.periods,
            items: &self.items,
        };
        serde_json::to_string_pretty(&doc).expect("statements serialize")
    }

    pub fn from_csv_str(s: &str) -> Result<Self> {
        let mut company_id = None;
        let mut currency = None;
        let mut body_start = 0;
        let mut header_line = 1;
        for line in s.split_inclusive('\n') {
            let trimmed = line.trim();
            if let Some(directive) = trimmed.strip_prefix('#') {
                if let Some((key, value)) = directive.split_once(':') {
                    let value = value.trim().to_string();
                    match key.trim() {
                        "company_id" => company_id = Some(value),
                        "currency" => currency = Some(value),
                        _ => {}
                    }
                }
            } else if !trimmed.is_empty() {
                break;
            }
            body_start += line.len();
            header_line += 1;
        }

        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(&s.as_bytes()[body_start..]);
        let header = reader.headers().map_err(|e| csv_error(header_line, e))?;
        if header.iter().ne(CSV_HEADER.iter().copied()) {
            return Err(EntryError::Parse {
                location: format!("line {header_line}"),
                reason: format!("expected header `{}`", CSV_HEADER.join(",")),
            });
        }

        struct Row {
            line: u64,
            item_id: String,
            label: String,
            statement: StatementKind,
            side: Side,
            period: NaiveDate,
            amount: Option<Decimal>,
        }

        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| csv_error(header_line, e))?;
            let line = record.position().map_or(0, |p| p.line()) + header_line as u64 - 1;
            let field = |idx: usize| record.get(idx).unwrap_or("");
            let bad = |name: &str, reason: String| EntryError::Parse {
                location: format!("line {line}, field {name}"),
                reason,
            };
            let item_id = field(0).to_string();
            if item_id.is_empty() {
                return Err(bad("item_id", "empty item id".into()));
            }
            let statement = parse_enum(field(2))
                .ok_or_else(|| bad("statement", format!("unknown statement `{}`", field(2))))?;
            let side = parse_enum(field(3))
                .ok_or_else(|| bad("side", format!("unknown side `{}`", field(3))))?;
            let period = NaiveDate::parse_from_str(field(4), "%Y-%m-%d")
                .map_err(|e| bad("period", e.to_string()))?;
            let amount = match field(5) {
                "" => None,
                text => Some(
                    text.parse::<Decimal>()
                        .map_err(|e| bad("amount", format!("`{text}`: {e}")))?,
                ),
            };
            rows.push(Row {
                line,
                item_id,
                label: field(1).to_string(),
                statement,
                side,
                period,
                amount,
            });
        }

        let periods: Vec<NaiveDate> = rows
            .iter()
            .map(|r| r.period)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();

        let mut items: Vec<LineItem> = Vec::new();
        let mut finished = HashSet::new();
        let mut last_period: Option<NaiveDate> = None;
        for row in rows {
            let continues = items.last().is_some_and(|i| i.item_id == row.item_id);
            if !continues {
                if let Some(prev) = items.last() {
                    finished.insert(prev.item_id.clone());
                }
                if finished.contains(&row.item_id) {
                    return Err(EntryError::DuplicateItem(row.item_id));
                }
                items.push(LineItem {
                    item_id: row.item_id.clone(),
                    label: row.label.clone(),
                    statement: row.statement,
                    side: row.side,
                    values: vec![None; periods.len()],
                });
                last_period = None;
            }
            let item = items.last_mut().expect("item pushed above");
            if item.label != row.label || item.statement != row.statement || item.side != row.side {
                return Err(EntryError::Parse {
                    location: format!("line {}", row.line),
                    reason: format!("attributes of `{}` differ from its first row", row.item_id),
                });
            }
            match last_period {
                Some(p) if p == row.period => return Err(EntryError::DuplicateItem(row.item_id)),
                Some(p) if p > row.period => {
                    return Err(EntryError::UnorderedPeriods(row.period.to_string()))
                }
                _ => {}
            }
            last_period = Some(row.period);
            let idx = periods
                .binary_search(&row.period)
                .expect("period collected above");
            item.values[idx] = row.amount;
        }

        let currency = currency.ok_or(EntryError::CurrencyMissing)?;
        let company_id = company_id.ok_or_else(|| EntryError::Parse {
            location: "line 1".into(),
            reason: "missing `# company_id:` line".into(),
        })?;
        Self::new(company_id, currency, periods, items)
    }

    /// Canonical long-form CSV: items in order, one row per period.
    pub fn to_csv_string(&self) -> String {
        let mut out = format!(
            "# company_id: {}\n# currency: {}\n",
            self.company_id, self.currency
        );
        let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
        writer.write_record(CSV_HEADER).expect("in-memory write");
        for item in &self.items {
            let statement = enum_name(item.statement);
            let side = enum_name(item.side);
            for (period, value) in self.periods.iter().zip(&item.values) {
                let period = period.format("%Y-%m-%d").to_string();
                let amount = value.map(|v| v.to_string()).unwrap_or_default();
                writer
                    .write_record([
                        item.item_id.as_str(),
                        item.label.as_str(),
                        statement.as_str(),
                        side.as_str(),
                        period.as_str(),
                        amount.as_str(),
                    ])
                    .expect("in-memory write");
            }
        }
        let bytes = writer.into_inner().expect("in-memory flush");
        out.push_str(&String::from_utf8(bytes).expect("utf-8 input"));
        out
    }

    /// Parses either format, picking JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json_str(text)
        } else {
            Self::from_csv_str(text)
        }
    }

    pub fn ingest(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| EntryError::Parse {
            location: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::parse(&text)
    }
}

fn csv_error(header_line: usize, e: csv::Error) -> EntryError {
    let line = e
        .position()
        .map_or(header_line as u64, |p| p.line() + header_line as u64 - 1);
    EntryError::Parse {
        location: format!("line {line}"),
        reason: e.to_string(),
    }
}

/// Returns the requested items in request order, without repeats.
pub fn select_items<'a>(
    statements: &'a FinancialStatements,
    item_ids: &[impl AsRef<str>],
) -> Result<Vec<&'a LineItem>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for id in item_ids {
        let id = id.as_ref();
        let item = statements
            .item(id)
            .ok_or_else(|| EntryError::UnknownItem(id.to_string()))?;
        if seen.insert(id) {
            out.push(item);
        }
    }
    Ok(out)
}

/// Ordered, deduplicated set of selected item ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    ids: Vec<String>,
}

impl Selection {
    pub fn select(
        &mut self,
        statements: &FinancialStatements,
        ids: &[impl AsRef<str>],
    ) -> Result<()> {
        for item in select_items(statements, ids)? {
            if !self.ids.contains(&item.item_id) {
                self.ids.push(item.item_id.clone());
            }
        }
        Ok(())
    }

    pub fn deselect(&mut self, ids: &[impl AsRef<str>]) {
        self.ids.retain(|id| !ids.iter().any(|d| d.as_ref() == id));
    }

    pub fn clear(&mut self) {
        self.ids.clear();
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Chart-ready dynamics of one line item. `None` marks an undefined entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsSeries {
    pub item_id: String,
    pub label: String,
    pub periods: Vec<NaiveDate>,
    pub values: Vec<Option<Decimal>>,
    /// `values[i] - values[i-1]`, one entry per transition.
    pub deltas: Vec<Option<Decimal>>,
    /// `(values[i] - values[i-1]) / values[i-1]`, one entry per transition.
    pub growth: Vec<Option<f64>>,
    /// `values[i] / values[0]`, one entry per period.
    pub index: Vec<Option<f64>>,
}

fn ratio(num: Decimal, den: Decimal) -> Option<f64> {
    if den.is_zero() {
        return None;
    }
    Some(num.to_f64()? / den.to_f64()?)
}

impl DynamicsSeries {
    pub fn from_item(periods: &[NaiveDate], item: &LineItem) -> Self {
        let values = item.values.clone();
        let transitions = values.windows(2).map(|w| match (w[0], w[1]) {
            (Some(prev), Some(cur)) => Some((prev, cur)),
            _ => None,
        });
        let deltas = transitions.clone().map(|t| t.map(|(p, c)| c - p)).collect();
        let growth = transitions
            .map(|t| t.and_then(|(p, c)| ratio(c - p, p)))
            .collect();
        let base = values.first().copied().flatten();
        let index = values
            .iter()
            .map(|v| match (base, v) {
                (Some(b), Some(v)) => ratio(*v, b),
                _ => None,
            })
            .collect();
        DynamicsSeries {
            item_id: item.item_id.clone(),
            label: item.label.clone(),
            periods: periods.to_vec(),
            values,
            deltas,
            growth,
            index,
        }
    }
}

/// Dynamics for the selected items, aligned on the statement periods.
pub fn dynamics(
    statements: &FinancialStatements,
    item_ids: &[impl AsRef<str>],
) -> Result<Vec<DynamicsSeries>> {
    Ok(select_items(statements, item_ids)?
        .into_iter()
        .map(|item| DynamicsSeries::from_item(&statements.periods, item))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# company_id: acme
# currency: EUR
item_id,label,statement,side,period,amount
cash,Cash,BALANCE_SHEET,ASSET,2005-12-31,100
cash,Cash,BALANCE_SHEET,ASSET,2006-12-31,110
cash,Cash,BALANCE_SHEET,ASSET,2007-12-31,99
debt,Debt,BALANCE_SHEET,LIABILITY,2005-12-31,40.50
debt,Debt,BALANCE_SHEET,LIABILITY,2006-12-31,
debt,Debt,BALANCE_SHEET,LIABILITY,2007-12-31,30
capital,Share capital,BALANCE_SHEET,EQUITY,2005-12-31,50
capital,Share capital,BALANCE_SHEET,EQUITY,2006-12-31,50
capital,Share capital,BALANCE_SHEET,EQUITY,2007-12-31,50
sales,Sales,PROFIT_LOSS,REVENUE,2005-12-31,0
sales,Sales,PROFIT_LOSS,REVENUE,2006-12-31,50
sales,Sales,PROFIT_LOSS,REVENUE,2007-12-31,75
net,Net result,PROFIT_LOSS,RESULT,2005-12-31,-5
net,Net result,PROFIT_LOSS,RESULT,2006-12-31,3
net,Net result,PROFIT_LOSS,RESULT,2007-12-31,8
";

    fn date(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn parses_three_periods_five_items() {
        let st = FinancialStatements::from_csv_str(SAMPLE).unwrap();
        assert_eq!(st.company_id, "acme");
        assert_eq!(st.currency, "EUR");
        assert_eq!(st.periods.len(), 3);
        assert_eq!(st.items.len(), 5);
        assert_eq!(st.value("debt", date("2006-12-31")), None);
        assert_eq!(
            st.value("debt", date("2005-12-31")),
            Some("40.50".parse().unwrap())
        );
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let st = FinancialStatements::from_csv_str(SAMPLE).unwrap();
        assert_eq!(st.to_csv_string(), SAMPLE);
    }

    #[test]
    fn json_round_trip() {
        let st = FinancialStatements::from_csv_str(SAMPLE).unwrap();
        let json = st.to_json_string();
        assert!(json.contains("\"schema_version\": 1"));
        let back = FinancialStatements::parse(&json).unwrap();
        assert_eq!(back, st);
    }

    #[test]
    fn duplicated_item_is_rejected() {
        let text = SAMPLE
            .replace("capital,Share capital", "cash,Cash")
            .replace(",EQUITY,", ",ASSET,");
        let err = FinancialStatements::from_csv_str(&text).unwrap_err();
        assert_eq!(err.code(), "DUPLICATE_ITEM");

        let twice = "# company_id: a\n# currency: EUR\nitem_id,label,statement,side,period,amount\n\
                     cash,Cash,BALANCE_SHEET,ASSET,2005-12-31,1\ncash,Cash,BALANCE_SHEET,ASSET,2005-12-31,2\n";
        assert_eq!(
            FinancialStatements::from_csv_str(twice).unwrap_err().code(),
            "DUPLICATE_ITEM"
        );
    }

    #[test]
    fn unordered_periods_are_rejected() {
        let text = "# company_id: a\n# currency: EUR\nitem_id,label,statement,side,period,amount\n\
                    cash,Cash,BALANCE_SHEET,ASSET,2006-12-31,1\ncash,Cash,BALANCE_SHEET,ASSET,2005-12-31,2\n";
        assert_eq!(
            FinancialStatements::from_csv_str(text).unwrap_err().code(),
            "UNORDERED_PERIODS"
        );

        let json = r#"{"schema_version":1,"company_id":"a","currency":"EUR",
            "periods":["2007-12-31","2006-12-31"],"items":[]}"#;
        assert_eq!(
            FinancialStatements::parse(json).unwrap_err().code(),
            "UNORDERED_PERIODS"
        );
    }

    #[test]
    fn missing_currency() {
        let text = SAMPLE.replace("# currency: EUR\n", "");
        assert_eq!(
            FinancialStatements::from_csv_str(&text).unwrap_err().code(),
            "CURRENCY_MISSING"
        );
        let json = r#"{"company_id":"a","periods":[],"items":[]}"#;
        assert_eq!(
            FinancialStatements::parse(json).unwrap_err().code(),
            "CURRENCY_MISSING"
        );
    }

    #[test]
    fn parse_errors_carry_location() {
        let text = SAMPLE.replace("2007-12-31,75", "2007-12-31,7,5");
        let err = FinancialStatements::from_csv_str(&text).unwrap_err();
        assert_eq!(err.code(), "PARSE_ERROR");

        let text = SAMPLE.replace("2006-12-31,110", "2006-12-31,1.234.567");
        let err = FinancialStatements::from_csv_str(&text).unwrap_err();
        assert_eq!(err.code(), "PARSE_ERROR");
        assert!(err.to_string().contains("line 5"), "{err}");
        assert!(err.to_string().contains("amount"), "{err}");

        let text = SAMPLE.replace(",ASSET,2005", ",ASSETS,2005");
        assert_eq!(
            FinancialStatements::from_csv_str(&text).unwrap_err().code(),
            "PARSE_ERROR"
        );
    }

    #[test]
    fn side_must_match_statement() {
        let text = SAMPLE.replace("PROFIT_LOSS,REVENUE", "BALANCE_SHEET,REVENUE");
        assert_eq!(
            FinancialStatements::from_csv_str(&text).unwrap_err().code(),
            "VALIDATION"
        );
    }

    #[test]
    fn selection_semantics() {
        let st = FinancialStatements::from_csv_str(SAMPLE).unwrap();
        let mut sel = Selection::default();
        sel.select(&st, &["cash", "debt"]).unwrap();
        sel.deselect(&["debt"]);
        assert_eq!(sel.ids(), ["cash"]);

        let empty: [&str; 0] = [];
        assert!(select_items(&st, &empty).unwrap().is_empty());

        let picked = select_items(&st, &["cash", "cash"]).unwrap();
        assert_eq!(picked.len(), 1);

        let err = select_items(&st, &["nope"]).unwrap_err();
        assert_eq!(err.code(), "UNKNOWN_ITEM");
        assert!(sel.select(&st, &["nope"]).is_err());
        assert_eq!(sel.ids(), ["cash"]);
    }

    #[test]
    fn dynamics_arithmetic() {
        let st = FinancialStatements::from_csv_str(SAMPLE).unwrap();
        let series = dynamics(&st, &["cash"]).unwrap().remove(0);
        let d = |s: &str| Some(s.parse::<Decimal>().unwrap());
        assert_eq!(series.deltas, vec![d("10"), d("-11")]);
        assert_eq!(series.growth, vec![Some(0.10), Some(-0.10)]);
        assert_eq!(series.index, vec![Some(1.0), Some(1.1), Some(0.99)]);
    }

    #[test]
    fn dynamics_zero_base_and_missing() {
        let st = FinancialStatements::from_csv_str(SAMPLE).unwrap();
        let all = dynamics(&st, &["sales", "debt"]).unwrap();
        assert_eq!(all[0].growth, vec![None, Some(0.5)]);
        assert_eq!(all[0].index, vec![None, None, None]);
        assert_eq!(all[1].deltas, vec![None, None]);
        assert_eq!(all[1].growth, vec![None, None]);
        assert_eq!(all[1].index[2], Some(30.0 / 40.5));
        assert_eq!(all[0].periods, all[1].periods);
    }

    #[test]
    fn dynamics_single_period() {
        let item = LineItem {
            item_id: "x".into(),
            label: "X".into(),
            statement: StatementKind::BalanceSheet,
            side: Side::Asset,
            values: vec![Some(Decimal::from(42))],
        };
        let s = DynamicsSeries::from_item(&[date("2007-12-31")], &item);
        assert!(s.deltas.is_empty());
        assert!(s.growth.is_empty());
        assert_eq!(s.index, vec![Some(1.0)]);
    }
}
