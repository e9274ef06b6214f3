//! Agency rating ladders, the mapping from letter grades to the country
//! rating N, and a bundled history of sovereign rating actions.
//!
//! Dataset file schema (`data/ratings.json`):
//!
//! ```text
//! {
//!   "schema_version": 1,
//!   "events": [
//!     {"country": "ROU", "category": "LONG_TERM_CREDIT", "date": "1998-11-06",
//!      "agency": "MOODYS", "grade": "B3", "published_trend": "DOWN", "note": null}
//!   ]
//! }
//! ```

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{EntryError, Result};

const BUNDLED: &str = include_str!("../data/ratings.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Agency {
    Moodys,
    Sp,
}

struct Rung {
    base: &'static str,
    quality: &'static str,
    /// Whether numeric (Moody's) or +/- (S&P) modifiers apply.
    modifiable: bool,
}

const MOODYS_LADDER: [Rung; 9] = [
    Rung {
        base: "Aaa",
        quality: "Best quality",
        modifiable: false,
    },
    Rung {
        base: "Aa",
        quality: "High quality",
        modifiable: true,
    },
    Rung {
        base: "A",
        quality: "High average quality",
        modifiable: true,
    },
    Rung {
        base: "Baa",
        quality: "Average quality",
        modifiable: true,
    },
    Rung {
        base: "Ba",
        quality: "Speculative quality",
        modifiable: true,
    },
    Rung {
        base: "B",
        quality: "Without investment characteristics",
        modifiable: true,
    },
    Rung {
        base: "Caa",
        quality: "Low level quality",
        modifiable: true,
    },
    Rung {
        base: "Ca",
        quality: "Speculative quality",
        modifiable: false,
    },
    Rung {
        base: "C",
        quality: "Lowest quality",
        modifiable: false,
    },
];

const SP_LADDER: [Rung; 10] = [
    Rung {
        base: "AAA",
        quality: "Extremely strong",
        modifiable: false,
    },
    Rung {
        base: "AA",
        quality: "Very strong",
        modifiable: true,
    },
    Rung {
        base: "A",
        quality: "Strong, but sensitive to economic conditions",
        modifiable: true,
    },
    Rung {
        base: "BBB",
        quality: "Adequate, but sensitive to economic conditions",
        modifiable: true,
    },
    Rung {
        base: "BB",
        quality: "Less vulnerable, but uncertain",
        modifiable: true,
    },
    Rung {
        base: "B",
        quality: "Vulnerable, but currently meets its commitments",
        modifiable: true,
    },
    Rung {
        base: "CCC",
        quality: "Vulnerable",
        modifiable: true,
    },
    Rung {
        base: "CC",
        quality: "Very vulnerable at present",
        modifiable: false,
    },
    Rung {
        base: "C",
        quality: "Payment difficulties, but payments continue for now",
        modifiable: false,
    },
    Rung {
        base: "D",
        quality: "Major payment defaults",
        modifiable: false,
    },
];

impl Agency {
    fn ladder(self) -> &'static [Rung] {
        match self {
            Agency::Moodys => &MOODYS_LADDER,
            Agency::Sp => &SP_LADDER,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Agency::Moodys => "Moody's",
            Agency::Sp => "S&P",
        }
    }
}

/// A parsed grade. Ordering is by credit quality: a better grade compares greater.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GradeRepr", into = "GradeRepr")]
pub struct RatingGrade {
    agency: Agency,
    symbol: String,
    /// Position on the ladder, 0 = best.
    rung: usize,
    /// -1 (weaker), 0, +1 (stronger) within the rung.
    notch: i8,
}

#[derive(Serialize, Deserialize)]
struct GradeRepr {
    agency: Agency,
    symbol: String,
}

impl TryFrom<GradeRepr> for RatingGrade {
    type Error = EntryError;
    fn try_from(r: GradeRepr) -> Result<Self> {
        RatingGrade::parse(r.agency, &r.symbol)
    }
}

impl From<RatingGrade> for GradeRepr {
    fn from(g: RatingGrade) -> Self {
        GradeRepr {
            agency: g.agency,
            symbol: g.symbol,
        }
    }
}

impl RatingGrade {
    pub fn parse(agency: Agency, symbol: &str) -> Result<Self> {
        let unknown = || EntryError::UnknownGrade {
            agency: agency.name().to_string(),
            symbol: symbol.to_string(),
        };
        let trimmed = symbol.trim();
        let (base, notch) = match agency {
            Agency::Moodys => match trimmed.char_indices().last() {
                Some((i, '1')) => (&trimmed[..i], 1),
                Some((i, '2')) => (&trimmed[..i], 0),
                Some((i, '3')) => (&trimmed[..i], -1),
                _ => (trimmed, 0),
            },
            Agency::Sp => match trimmed.char_indices().last() {
                Some((i, '+')) => (&trimmed[..i], 1),
                Some((i, '-' | '\u{2212}')) => (&trimmed[..i], -1),
                _ => (trimmed, 0),
            },
        };
        let has_modifier = base.len() != trimmed.len();
        let rung = agency
            .ladder()
            .iter()
            .position(|r| r.base == base)
            .ok_or_else(unknown)?;
        if has_modifier && !agency.ladder()[rung].modifiable {
            return Err(unknown());
        }
        Ok(RatingGrade {
            agency,
            symbol: trimmed.replace('\u{2212}', "-"),
            rung,
            notch,
        })
    }

    pub fn agency(&self) -> Agency {
        self.agency
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    /// Broad grade without modifier, e.g. `Baa` for `Baa3`.
    pub fn base(&self) -> &'static str {
        self.agency.ladder()[self.rung].base
    }

    pub fn quality_label(&self) -> &'static str {
        self.agency.ladder()[self.rung].quality
    }

    /// Fine-grained score, higher is better, comparable within an agency.
    fn score(&self) -> i32 {
        -(self.rung as i32) * 3 + i32::from(self.notch)
    }

    /// Country rating N on the 1..=10 scale. Modifiers are ignored.
    pub fn to_country_rating(&self) -> f64 {
        (10 - self.rung) as f64
    }
}

/// Country rating N for a grade; `Baa3` gives 7, `Aaa` 10, S&P `D` 1.
pub fn grade_to_n(grade: &RatingGrade) -> f64 {
    grade.to_country_rating()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Trend {
    Up,
    Down,
    Stationary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RatingCategory {
    LongTermCredit,
    FxBankDeposits,
}

impl std::str::FromStr for RatingCategory {
    type Err = EntryError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "LONG_TERM_CREDIT" => Ok(Self::LongTermCredit),
            "FX_BANK_DEPOSITS" => Ok(Self::FxBankDeposits),
            _ => Err(EntryError::UnknownCategory(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingEvent {
    pub date: NaiveDate,
    pub grade: RatingGrade,
    /// Direction versus the previous event of the same series.
    pub trend: Trend,
    pub category: RatingCategory,
    /// Direction as printed by the source, when it differs or is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub published_trend: Option<Trend>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Deserialize)]
struct DatasetFile {
    schema_version: u32,
    events: Vec<EventRecord>,
}

#[derive(Deserialize)]
struct EventRecord {
    country: String,
    category: RatingCategory,
    date: NaiveDate,
    agency: Agency,
    grade: String,
    #[serde(default)]
    published_trend: Option<Trend>,
    #[serde(default)]
    note: Option<String>,
}

/// Read-only rating histories keyed by country and category.
#[derive(Debug, Clone, Default)]
pub struct RatingsDataset {
    series: BTreeMap<String, BTreeMap<RatingCategory, Vec<RatingEvent>>>,
}

impl RatingsDataset {
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED).expect("bundled ratings dataset is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DatasetFile = serde_json::from_str(text).map_err(|e| EntryError::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            reason: e.to_string(),
        })?;
        if file.schema_version != 1 {
            return Err(EntryError::Parse {
                location: "schema_version".into(),
                reason: format!("unsupported schema version {}", file.schema_version),
            });
        }
        let mut series: BTreeMap<String, BTreeMap<RatingCategory, Vec<RatingEvent>>> =
            BTreeMap::new();
        for rec in file.events {
            let grade = RatingGrade::parse(rec.agency, &rec.grade)?;
            let events = series
                .entry(rec.country.to_ascii_uppercase())
                .or_default()
                .entry(rec.category)
                .or_default();
            let trend = match events.last() {
                Some(prev) if prev.date >= rec.date => {
                    return Err(EntryError::UnorderedPeriods(rec.date.to_string()));
                }
                Some(prev) if prev.grade.agency != grade.agency => {
                    return Err(EntryError::Parse {
                        location: rec.date.to_string(),
                        reason: "agency changes within one series".into(),
                    });
                }
                Some(prev) => match grade.score().cmp(&prev.grade.score()) {
                    std::cmp::Ordering::Greater => Trend::Up,
                    std::cmp::Ordering::Less => Trend::Down,
                    std::cmp::Ordering::Equal => Trend::Stationary,
                },
                None => Trend::Stationary,
            };
            events.push(RatingEvent {
                date: rec.date,
                grade,
                trend,
                category: rec.category,
                published_trend: rec.published_trend,
                note: rec.note,
            });
        }
        Ok(RatingsDataset { series })
    }

    pub fn countries(&self) -> impl Iterator<Item = &str> {
        self.series.keys().map(String::as_str)
    }

    pub fn rating_history(
        &self,
        country: &str,
        category: RatingCategory,
    ) -> Result<&[RatingEvent]> {
        let by_category = self
            .series
            .get(&country.to_ascii_uppercase())
            .ok_or_else(|| EntryError::UnknownCountry(country.to_string()))?;
        by_category
            .get(&category)
            .map(Vec::as_slice)
            .ok_or_else(|| EntryError::UnknownCategory(format!("{category:?}")))
    }

    /// Most recent event on or before `date`.
    pub fn rating_at(
        &self,
        country: &str,
        category: RatingCategory,
        date: NaiveDate,
    ) -> Result<Option<&RatingEvent>> {
        Ok(self
            .rating_history(country, category)?
            .iter()
            .take_while(|e| e.date <= date)
            .last())
    }
}
