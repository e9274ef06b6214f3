//! Plain-text renderings for the command-line `--output table` mode.

use std::fmt::Write;

use market_entry_core::ratings::RatingEvent;
use market_entry_core::{
    grade_to_n, Breakdown, DynamicsSeries, IndicatorResult, StrategyBand, ValuationResult,
};

use crate::scenario::{EvaluationRecord, MethodComparison};
use crate::store::StatementsSummary;

fn row(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key:<22} {value}");
}

pub fn band(out: &mut String, band: &StrategyBand) {
    row(
        out,
        "strategy",
        format!("{} - {}", band.band_id.code(), band.label),
    );
    row(out, "environment", &band.environment_note);
    if let Some(note) = band.special_note {
        row(out, "note", note.text());
    }
}

pub fn indicator(out: &mut String, r: &IndicatorResult) {
    row(out, "I", format!("{:.7}", r.i));
    row(out, "I*", format!("{:.9}", r.i_star));
    row(out, "macro term", format!("{:.9}", r.macro_term));
    row(out, "micro term", format!("{:.9}", r.micro_term));
    if !r.warnings.is_empty() {
        row(out, "warnings", format!("{:?}", r.warnings));
    }
    band(out, &r.recommendation);
}

pub fn valuation(out: &mut String, v: &ValuationResult) {
    row(out, "method", v.method);
    row(out, "value", v.value);
    if let Some(d) = v.as_of {
        row(out, "as of", d);
    }
    match &v.breakdown {
        Breakdown::Anc {
            book_assets,
            book_liabilities,
            book_equity,
            adjustments,
        } => {
            row(out, "book assets", book_assets);
            row(out, "book liabilities", book_liabilities);
            row(out, "book equity", book_equity);
            for a in adjustments {
                row(
                    out,
                    &format!("  {}", a.item_ref),
                    format!("{:+} ({:?})", a.equity_delta, a.kind),
                );
            }
        }
        Breakdown::Dcf {
            flows,
            residual_value,
            discounted_residual,
        } => {
            for f in flows {
                row(
                    out,
                    &format!("  year {}", f.year),
                    format!("{:.2} -> {:.2}", f.cashflow, f.discounted),
                );
            }
            row(
                out,
                "  residual",
                format!("{residual_value:.2} -> {discounted_residual:.2}"),
            );
        }
        Breakdown::Reported { source } => row(out, "source", source),
    }
    if !v.warnings.is_empty() {
        row(out, "warnings", format!("{:?}", v.warnings));
    }
}

pub fn evaluation(r: &EvaluationRecord) -> String {
    let mut out = String::new();
    row(&mut out, "scenario", &r.scenario.scenario_id);
    valuation(&mut out, &r.valuation);
    row(&mut out, "social capital", r.social_capital);
    indicator(&mut out, &r.indicator);
    out
}

pub fn comparison(c: &MethodComparison) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<8} {:>20} {:>14} {:>12}  band",
        "method", "value", "I", "I*"
    );
    for m in &c.methods {
        let _ = writeln!(
            out,
            "{:<8} {:>20} {:>14.7} {:>12.9}  {}",
            m.method.as_str(),
            m.value,
            m.i,
            m.i_star,
            m.band_id.code()
        );
    }
    for d in &c.differences {
        let _ = writeln!(
            out,
            "|{} - {}| = {:.6}",
            d.first, d.second, d.abs_difference
        );
    }
    for u in &c.unavailable {
        let _ = writeln!(out, "{} unavailable: {}", u.method, u.reason);
    }
    out
}

pub fn statements_summary(s: &StatementsSummary) -> String {
    let mut out = String::new();
    row(&mut out, "statements id", &s.statements_id);
    row(&mut out, "company", &s.company_id);
    row(&mut out, "currency", &s.currency);
    let periods: Vec<String> = s.periods.iter().map(|p| p.to_string()).collect();
    row(&mut out, "periods", periods.join(", "));
    row(&mut out, "items", s.item_count);
    out
}

pub fn dynamics(series: &[DynamicsSeries]) -> String {
    let mut out = String::new();
    let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4}"));
    for s in series {
        let _ = writeln!(out, "{} ({})", s.label, s.item_id);
        for (k, p) in s.periods.iter().enumerate() {
            let value = s.values[k].map_or("-".to_string(), |v| v.to_string());
            let growth = if k == 0 {
                "".to_string()
            } else {
                fmt(s.growth[k - 1])
            };
            let _ = writeln!(
                out,
                "  {p}  {value:>18}  growth {growth:>8}  index {}",
                fmt(s.index[k])
            );
        }
    }
    out
}

pub fn rating_events(events: &[RatingEvent]) -> String {
    let mut out = String::new();
    for e in events {
        let published = e
            .published_trend
            .map(|t| format!(" (published {t:?})"))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{}  {:<5} N={:<3} {:?}{}",
            e.date,
            e.grade.symbol(),
            grade_to_n(&e.grade),
            e.trend,
            published
        );
    }
    out
}
