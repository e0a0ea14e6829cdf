use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::rating::{QuestionId, Rating};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Platform {
    #[serde(rename = "IGG")]
    Indiegogo,
    #[serde(rename = "KS")]
    Kickstarter,
}

impl Platform {
    /// Dummy coding: Indiegogo = 0, Kickstarter = 1.
    pub fn dummy(self) -> f64 {
        match self {
            Platform::Indiegogo => 0.0,
            Platform::Kickstarter => 1.0,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Platform::Indiegogo => "IGG",
            Platform::Kickstarter => "KS",
        }
    }
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Platform {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "IGG" => Ok(Platform::Indiegogo),
            "KS" => Ok(Platform::Kickstarter),
            other => Err(Error::invariant("platform", format!("`{other}` is not KS or IGG"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    #[serde(rename = "3DP")]
    ThreeDPrinter,
    #[serde(rename = "SW")]
    SmartWatch,
}

impl Category {
    /// Dummy coding: 3D printer = 0, smart watch = 1.
    pub fn dummy(self) -> f64 {
        match self {
            Category::ThreeDPrinter => 0.0,
            Category::SmartWatch => 1.0,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Category::ThreeDPrinter => "3DP",
            Category::SmartWatch => "SW",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Category {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "3DP" => Ok(Category::ThreeDPrinter),
            "SW" => Ok(Category::SmartWatch),
            other => Err(Error::invariant("category", format!("`{other}` is not 3DP or SW"))),
        }
    }
}

/// Exogenous page features kept in every model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlVector {
    pub characters: u64,
    pub figures: u32,
    pub tables: u32,
    pub videos: u32,
    pub rewards: u32,
    pub team_intro: bool,
    pub timeline: bool,
    /// Funding goal in platform currency (USD assumed).
    pub goal: f64,
}

impl ControlVector {
    pub fn validate(&self) -> Result<()> {
        if self.characters < 1 {
            return Err(Error::InvalidControl {
                field: "characters",
                message: "must be at least 1".into(),
            });
        }
        if !(self.goal >= 1.0) || !self.goal.is_finite() {
            return Err(Error::InvalidControl {
                field: "goal",
                message: format!("{} is below the minimum of 1", self.goal),
            });
        }
        Ok(())
    }
}

impl Default for ControlVector {
    /// The smallest legal page: one character, goal of 1, nothing else.
    fn default() -> Self {
        ControlVector {
            characters: 1,
            figures: 0,
            tables: 0,
            videos: 0,
            rewards: 0,
            team_intro: false,
            timeline: false,
            goal: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignRecord {
    pub id: String,
    pub title: String,
    pub platform: Platform,
    pub category: Category,
    pub funding_raised: f64,
    pub controls: ControlVector,
    pub ratings: BTreeMap<QuestionId, Rating>,
}

impl CampaignRecord {
    pub fn validate(&self) -> Result<()> {
        self.controls.validate()?;
        if !(self.funding_raised >= 0.0) || !self.funding_raised.is_finite() {
            return Err(Error::invariant(
                "funding_raised",
                format!("{} is not a non-negative amount", self.funding_raised),
            ));
        }
        if let Some(q) = QuestionId::all().find(|q| !self.ratings.contains_key(q)) {
            return Err(Error::MissingRating(q.to_string()));
        }
        Ok(())
    }

    pub fn rating(&self, q: QuestionId) -> Rating {
        self.ratings.get(&q).copied().unwrap_or_default()
    }
}

/// A validated, read-only collection of campaigns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<CampaignRecord>,
    provenance: String,
}

impl Dataset {
    pub fn new(records: Vec<CampaignRecord>, provenance: impl Into<String>) -> Result<Dataset> {
        let mut seen = HashSet::new();
        for r in &records {
            r.validate()?;
            if !seen.insert(r.id.as_str()) {
                return Err(Error::DuplicateId(r.id.clone()));
            }
        }
        Ok(Dataset {
            records,
            provenance: provenance.into(),
        })
    }

    pub fn records(&self) -> &[CampaignRecord] {
        &self.records
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records matching a predicate, as a new dataset.
    pub fn filtered(&self, keep: impl Fn(&CampaignRecord) -> bool, note: &str) -> Dataset {
        Dataset {
            records: self.records.iter().filter(|r| keep(r)).cloned().collect(),
            provenance: format!("{} [{}]", self.provenance, note),
        }
    }

    /// Mean score of one question over all records.
    pub fn factor_mean(&self, q: QuestionId) -> f64 {
        let sum: f64 = self.records.iter().map(|r| r.rating(q).score()).sum();
        sum / self.records.len() as f64
    }
}
