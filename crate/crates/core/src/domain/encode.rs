//! Turning campaigns into regression-ready numeric rows.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::campaign::{CampaignRecord, Category, ControlVector, Dataset, Platform};
use super::rating::{QuestionId, Rating};
use crate::error::{Error, Result};

pub const CATEGORY_DUMMY: &str = "category_dummy";
pub const PLATFORM_DUMMY: &str = "platform_dummy";

/// Every control and dummy term, in the fixed emission order.
pub const CONTROL_TERMS: [&str; 10] = [
    CATEGORY_DUMMY,
    PLATFORM_DUMMY,
    "figures",
    "tables",
    "videos",
    "rewards",
    "team_intro",
    "timeline",
    "ln_goal",
    "ln_chars",
];

/// Default mean-score cut-off below which a question is considered unobservable.
pub const DEFAULT_PREVALENCE_THRESHOLD: f64 = 0.03;

/// One regression observation. Term order is owned by whoever built the row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignRow {
    pub response: f64,
    pub regressors: IndexMap<String, f64>,
}

/// `ln(max(raised, 1))`; a campaign that raised nothing encodes to 0.
pub fn encode_response(record: &CampaignRecord) -> f64 {
    ln_amount(record.funding_raised)
}

pub fn ln_amount(raised: f64) -> f64 {
    raised.max(1.0).ln()
}

pub fn encode_controls(
    controls: &ControlVector,
    platform: Platform,
    category: Category,
) -> Result<IndexMap<String, f64>> {
    controls.validate()?;
    let values = [
        category.dummy(),
        platform.dummy(),
        controls.figures as f64,
        controls.tables as f64,
        controls.videos as f64,
        controls.rewards as f64,
        bool_term(controls.team_intro),
        bool_term(controls.timeline),
        controls.goal.ln(),
        (controls.characters as f64).ln(),
    ];
    Ok(CONTROL_TERMS
        .iter()
        .zip(values)
        .map(|(name, v)| (name.to_string(), v))
        .collect())
}

fn bool_term(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

pub fn encode_factors(
    ratings: &BTreeMap<QuestionId, Rating>,
    included: &[QuestionId],
) -> Result<IndexMap<String, f64>> {
    included
        .iter()
        .map(|q| {
            ratings
                .get(q)
                .map(|r| (q.term_name(), r.score()))
                .ok_or_else(|| Error::UnknownQuestionId(q.to_string()))
        })
        .collect()
}

/// Full design row for `record` restricted to the named control terms and factors.
///
/// Controls come first in `control_order`, then factors in `factors` order.
pub fn encode_row(
    record: &CampaignRecord,
    control_order: &[String],
    factors: &[QuestionId],
) -> Result<DesignRow> {
    let all = encode_controls(&record.controls, record.platform, record.category)?;
    let mut regressors = IndexMap::with_capacity(control_order.len() + factors.len());
    for name in control_order {
        let v = all
            .get(name)
            .ok_or_else(|| Error::invariant("control_order", format!("unknown control `{name}`")))?;
        regressors.insert(name.clone(), *v);
    }
    regressors.extend(encode_factors(&record.ratings, factors)?);
    Ok(DesignRow {
        response: encode_response(record),
        regressors,
    })
}

/// Funding raised as a percentage of the goal.
pub fn funded_percent(record: &CampaignRecord) -> f64 {
    percent_of_goal(record.funding_raised, record.controls.goal)
}

pub fn percent_of_goal(raised: f64, goal: f64) -> f64 {
    100.0 * raised / goal
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrevalenceSplit {
    pub kept: Vec<QuestionId>,
    pub dropped: Vec<QuestionId>,
}

/// Drop questions whose mean score over the dataset is strictly below `threshold`.
pub fn factor_prevalence_filter(dataset: &Dataset, threshold: f64) -> Result<PrevalenceSplit> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::BadThreshold(threshold));
    }
    let (kept, dropped) = QuestionId::all().partition(|q| dataset.factor_mean(*q) >= threshold);
    Ok(PrevalenceSplit { kept, dropped })
}
