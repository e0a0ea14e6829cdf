use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Number of rubric questions.
pub const QUESTION_COUNT: u8 = 26;

/// Ordinal evidence level for one rubric question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Rating {
    #[default]
    None,
    Partial,
    Full,
}

impl Rating {
    pub const ALL: [Rating; 3] = [Rating::None, Rating::Partial, Rating::Full];

    pub fn score(self) -> f64 {
        match self {
            Rating::None => 0.0,
            Rating::Partial => 0.5,
            Rating::Full => 1.0,
        }
    }

    /// Exact inverse of [`Rating::score`]; anything off the 0 / 0.5 / 1 grid is rejected.
    pub fn from_score(value: f64) -> Result<Self> {
        if value == 0.0 {
            Ok(Rating::None)
        } else if value == 0.5 {
            Ok(Rating::Partial)
        } else if value == 1.0 {
            Ok(Rating::Full)
        } else {
            Err(Error::InvalidRating(value))
        }
    }

    /// Position on the ordinal scale (0, 1, 2).
    pub fn index(self) -> usize {
        self as usize
    }

    /// The next level up, or `None` when already at `Full`.
    pub fn raised(self) -> Option<Rating> {
        match self {
            Rating::None => Some(Rating::Partial),
            Rating::Partial => Some(Rating::Full),
            Rating::Full => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Rating::None => "None",
            Rating::Partial => "Partial",
            Rating::Full => "Full",
        }
    }
}

impl fmt::Display for Rating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Rating {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "0" | "0.0" => Ok(Rating::None),
            "0.5" | ".5" => Ok(Rating::Partial),
            "1" | "1.0" => Ok(Rating::Full),
            "None" | "none" => Ok(Rating::None),
            "Partial" | "partial" => Ok(Rating::Partial),
            "Full" | "full" => Ok(Rating::Full),
            other => match other.parse::<f64>() {
                Ok(v) => Err(Error::InvalidRating(v)),
                Err(_) => Err(Error::parse(format!("`{other}` is not a rating"))),
            },
        }
    }
}

// The wire form is the numeric literal, never the label.
impl Serialize for Rating {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Rating::None => serializer.serialize_u8(0),
            Rating::Partial => serializer.serialize_f64(0.5),
            Rating::Full => serializer.serialize_u8(1),
        }
    }
}

impl<'de> Deserialize<'de> for Rating {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(deserializer)?;
        Rating::from_score(v).map_err(serde::de::Error::custom)
    }
}

/// Rubric question identifier, `Q01` through `Q26`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuestionId(u8);

impl QuestionId {
    pub fn new(number: u8) -> Result<Self> {
        if (1..=QUESTION_COUNT).contains(&number) {
            Ok(QuestionId(number))
        } else {
            Err(Error::UnknownQuestionId(format!("Q{number:02}")))
        }
    }

    pub fn number(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = QuestionId> + Clone {
        (1..=QUESTION_COUNT).map(QuestionId)
    }

    /// Term name used in design rows and model documents.
    pub fn term_name(self) -> String {
        self.to_string()
    }

    /// Column name in the tabular dataset format.
    pub fn column_name(self) -> String {
        format!("q{:02}", self.0)
    }
}

impl fmt::Display for QuestionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q{:02}", self.0)
    }
}

impl FromStr for QuestionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits = s
            .strip_prefix('Q')
            .or_else(|| s.strip_prefix('q'))
            .ok_or_else(|| Error::UnknownQuestionId(s.to_string()))?;
        if digits.len() != 2 {
            return Err(Error::UnknownQuestionId(s.to_string()));
        }
        let n: u8 = digits
            .parse()
            .map_err(|_| Error::UnknownQuestionId(s.to_string()))?;
        QuestionId::new(n).map_err(|_| Error::UnknownQuestionId(s.to_string()))
    }
}

impl Serialize for QuestionId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuestionId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scores_follow_the_alphabet() {
        assert_eq!(Rating::None.score(), 0.0);
        assert_eq!(Rating::Partial.score(), 0.5);
        assert_eq!(Rating::Full.score(), 1.0);
        for r in Rating::ALL {
            assert_eq!(Rating::from_score(r.score()).unwrap(), r);
        }
    }

    #[test]
    fn off_grid_scores_are_rejected() {
        assert!(matches!(Rating::from_score(0.7), Err(Error::InvalidRating(v)) if v == 0.7));
        assert!(matches!("0.7".parse::<Rating>(), Err(Error::InvalidRating(_))));
        assert!("maybe".parse::<Rating>().is_err());
    }

    #[test]
    fn raising_walks_the_scale() {
        assert_eq!(Rating::None.raised(), Some(Rating::Partial));
        assert_eq!(Rating::Partial.raised(), Some(Rating::Full));
        assert_eq!(Rating::Full.raised(), None);
    }

    #[test]
    fn question_ids_parse_and_print() {
        let q: QuestionId = "Q08".parse().unwrap();
        assert_eq!(q.number(), 8);
        assert_eq!(q.to_string(), "Q08");
        assert_eq!(q.column_name(), "q08");
        assert_eq!("q26".parse::<QuestionId>().unwrap().number(), 26);
        assert!("Q27".parse::<QuestionId>().is_err());
        assert!("Q00".parse::<QuestionId>().is_err());
        assert!("Q1".parse::<QuestionId>().is_err());
        assert_eq!(QuestionId::all().count(), 26);
    }

    #[test]
    fn wire_form_is_numeric() {
        let json = serde_json::to_string(&[Rating::None, Rating::Partial, Rating::Full]).unwrap();
        assert_eq!(json, "[0,0.5,1]");
        let back: Vec<Rating> = serde_json::from_str("[0, 0.5, 1.0]").unwrap();
        assert_eq!(back, Rating::ALL);
        assert!(serde_json::from_str::<Rating>("0.25").is_err());
    }
}
