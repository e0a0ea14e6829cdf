//! The 26-question Real-Win-Worth rubric.
//!
//! Question wording and rating criteria are data: the bundled copy lives in
//! `data/rubric.json` and can be replaced by an edited file at runtime.

use serde::{Deserialize, Serialize};

use super::rating::{QuestionId, QUESTION_COUNT};
use crate::error::{Error, Result};

const BUNDLED_RUBRIC: &str = include_str!("../../data/rubric.json");
pub const RUBRIC_SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MainCategory {
    Real,
    Win,
    Worth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subcategory {
    MarketAttractiveness,
    ProductFeasibility,
    ProductAdvantage,
    TeamCompetency,
    ExpectedReturn,
    StrategicFit,
}

impl Subcategory {
    pub fn main_category(self) -> MainCategory {
        match self {
            Subcategory::MarketAttractiveness | Subcategory::ProductFeasibility => {
                MainCategory::Real
            }
            Subcategory::ProductAdvantage | Subcategory::TeamCompetency => MainCategory::Win,
            Subcategory::ExpectedReturn | Subcategory::StrategicFit => MainCategory::Worth,
        }
    }

    /// The subcategory a question belongs to, fixed by question number.
    pub fn of(id: QuestionId) -> Subcategory {
        match id.number() {
            1..=5 => Subcategory::MarketAttractiveness,
            6..=11 => Subcategory::ProductFeasibility,
            12..=17 => Subcategory::ProductAdvantage,
            18..=21 => Subcategory::TeamCompetency,
            22..=24 => Subcategory::ExpectedReturn,
            _ => Subcategory::StrategicFit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RubricQuestion {
    pub id: QuestionId,
    pub main_category: MainCategory,
    pub subcategory: Subcategory,
    pub short_name: String,
    pub question_text: String,
    pub criteria_full: String,
    pub criteria_partial: String,
    pub criteria_none: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rubric {
    pub schema_version: String,
    pub questions: Vec<RubricQuestion>,
}

impl Rubric {
    /// The rubric shipped with the crate.
    pub fn bundled() -> Rubric {
        Rubric::from_json(BUNDLED_RUBRIC).expect("bundled rubric is valid")
    }

    pub fn from_json(text: &str) -> Result<Rubric> {
        let rubric: Rubric = serde_json::from_str(text).map_err(|e| Error::Parse {
            row: Some(e.line()),
            column: None,
            message: e.to_string(),
        })?;
        rubric.validate()?;
        Ok(rubric)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("rubric serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != RUBRIC_SCHEMA_VERSION {
            return Err(Error::SchemaVersion(self.schema_version.clone()));
        }
        if self.questions.len() != QUESTION_COUNT as usize {
            return Err(Error::invariant(
                "questions",
                format!("expected 26 questions, found {}", self.questions.len()),
            ));
        }
        for (expected, q) in QuestionId::all().zip(&self.questions) {
            if q.id != expected {
                return Err(Error::invariant(
                    "id",
                    format!("expected {expected} in position {}, found {}", expected.number(), q.id),
                ));
            }
            let sub = Subcategory::of(q.id);
            if q.subcategory != sub || q.main_category != sub.main_category() {
                return Err(Error::invariant(
                    q.id.to_string(),
                    format!(
                        "belongs to {:?}/{:?}, file says {:?}/{:?}",
                        sub.main_category(),
                        sub,
                        q.main_category,
                        q.subcategory
                    ),
                ));
            }
            if q.question_text.trim().is_empty() {
                return Err(Error::invariant(q.id.to_string(), "empty question text"));
            }
        }
        Ok(())
    }

    pub fn question(&self, id: QuestionId) -> &RubricQuestion {
        &self.questions[id.number() as usize - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_rubric_matches_category_layout() {
        let r = Rubric::bundled();
        assert_eq!(r.questions.len(), 26);
        let count = |m| r.questions.iter().filter(|q| q.main_category == m).count();
        assert_eq!(count(MainCategory::Real), 11);
        assert_eq!(count(MainCategory::Win), 10);
        assert_eq!(count(MainCategory::Worth), 5);
        assert_eq!(r.question("Q12".parse().unwrap()).subcategory, Subcategory::ProductAdvantage);
        assert!(r.question("Q01".parse().unwrap()).criteria_full.starts_with("Four or more"));
    }

    #[test]
    fn misplaced_question_is_rejected() {
        let mut r = Rubric::bundled();
        r.questions[2].subcategory = Subcategory::TeamCompetency;
        let err = r.validate().unwrap_err();
        assert!(matches!(err, Error::InvariantViolation { ref field, .. } if field == "Q03"));
    }

    #[test]
    fn reordered_rubric_is_rejected() {
        let mut r = Rubric::bundled();
        r.questions.swap(0, 1);
        assert!(r.validate().is_err());
        let mut short = Rubric::bundled();
        short.questions.pop();
        assert!(short.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let r = Rubric::bundled();
        let text = r.to_json();
        assert_eq!(Rubric::from_json(&text).unwrap(), r);
        assert_eq!(text, BUNDLED_RUBRIC);
    }
}
