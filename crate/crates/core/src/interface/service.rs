//! Prediction and what-if logic shared by the CLI and the HTTP service.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::model_doc::{paper_baseline, PAPER_BASELINE_ID};
use crate::domain::{encode_controls, Category, ControlVector, Platform, QuestionId, Rating};
use crate::error::{Error, Result};
use crate::stats::{predict, FittedModel, PredictionInterval};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictRequest {
    /// Ignored by the HTTP service, which takes the id from the path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_id: Option<String>,
    pub ratings: BTreeMap<QuestionId, Rating>,
    pub controls: ControlVector,
    pub platform: Platform,
    pub category: Category,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval_level: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictResponse {
    pub model_id: String,
    pub ln_amount: f64,
    pub amount: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<PredictionInterval>,
    pub intercept: f64,
    /// `coefficient * value` for every model term, in model order.
    pub per_term_contributions: IndexMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhatIfEntry {
    pub question: QuestionId,
    pub current: Rating,
    /// `None` when the factor is already Full.
    pub next: Option<Rating>,
    pub delta_ln_amount: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhatIfResponse {
    pub model_id: String,
    pub base_ln_amount: f64,
    /// Sorted by delta, largest first; ties by question number.
    pub entries: Vec<WhatIfEntry>,
}

/// Regressor map for `request` in the model's term order.
pub fn regressors_for(model: &FittedModel, request: &PredictRequest) -> Result<IndexMap<String, f64>> {
    let controls = encode_controls(&request.controls, request.platform, request.category)
        .map_err(|e| match e {
            Error::InvalidControl { field, message } => {
                Error::invariant(format!("controls.{field}"), message)
            }
            other => other,
        })?;
    let mut out = IndexMap::with_capacity(model.terms.len());
    for name in model.term_names() {
        let value = match name.parse::<QuestionId>() {
            Ok(q) => request
                .ratings
                .get(&q)
                .ok_or_else(|| Error::invariant(format!("ratings.{q}"), "required by the model"))?
                .score(),
            Err(_) => *controls
                .get(name)
                .ok_or_else(|| Error::invariant("model", format!("unknown term `{name}`")))?,
        };
        out.insert(name.to_string(), value);
    }
    Ok(out)
}

pub fn predict_request(model_id: &str, model: &FittedModel, request: &PredictRequest) -> Result<PredictResponse> {
    let x = regressors_for(model, request)?;
    let result = predict(model, &x, request.interval_level)?;
    let per_term_contributions = model
        .terms
        .iter()
        .zip(x.values())
        .map(|(t, v)| (t.name.clone(), t.coefficient * v))
        .collect();
    Ok(PredictResponse {
        model_id: model_id.to_string(),
        ln_amount: result.ln_amount,
        amount: result.amount,
        interval: result.interval,
        intercept: model.intercept,
        per_term_contributions,
    })
}

/// Effect on `ln_amount` of raising each model factor by one rating step.
pub fn whatif(model_id: &str, model: &FittedModel, request: &PredictRequest) -> Result<WhatIfResponse> {
    let base = predict_request(model_id, model, &PredictRequest { interval_level: None, ..request.clone() })?;
    let mut entries: Vec<WhatIfEntry> = model
        .encoding_meta
        .factor_ids
        .iter()
        .map(|q| {
            let current = request.ratings[q];
            let next = current.raised();
            let coef = model.coefficient(&q.term_name()).unwrap_or(0.0);
            let delta_ln_amount = match next {
                Some(n) => coef * (n.score() - current.score()),
                None => 0.0,
            };
            WhatIfEntry { question: *q, current, next, delta_ln_amount }
        })
        .collect();
    entries.sort_by(|a, b| {
        b.delta_ln_amount
            .total_cmp(&a.delta_ln_amount)
            .then(a.question.cmp(&b.question))
    });
    Ok(WhatIfResponse {
        model_id: model_id.to_string(),
        base_ln_amount: base.ln_amount,
        entries,
    })
}

/// Immutable set of models addressable by id.
#[derive(Debug, Clone, Default)]
pub struct ModelRegistry {
    models: BTreeMap<String, FittedModel>,
}

impl ModelRegistry {
    /// A registry holding only the bundled published model.
    pub fn with_bundled() -> ModelRegistry {
        let mut r = ModelRegistry::default();
        r.insert(PAPER_BASELINE_ID, paper_baseline());
        r
    }

    pub fn insert(&mut self, id: &str, model: FittedModel) {
        self.models.insert(id.to_string(), model);
    }

    pub fn get(&self, id: &str) -> Result<&FittedModel> {
        self.models.get(id).ok_or_else(|| Error::UnknownModel(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.models.keys().map(String::as_str)
    }

    pub fn predict(&self, id: &str, request: &PredictRequest) -> Result<PredictResponse> {
        predict_request(id, self.get(id)?, request)
    }

    pub fn whatif(&self, id: &str, request: &PredictRequest) -> Result<WhatIfResponse> {
        whatif(id, self.get(id)?, request)
    }
}
