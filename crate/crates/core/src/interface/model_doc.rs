use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{
    DesignInfo, EncodingMeta, FitStats, FittedModel, TermEstimate, TermRole,
};

pub const MODEL_SCHEMA_VERSION: &str = "1";
pub const PAPER_BASELINE_ID: &str = "paper-baseline";

const PAPER_BASELINE_JSON: &str = include_str!("../../data/paper_baseline.json");

/// On-disk form of a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub schema_version: String,
    pub name: String,
    pub created_at: String,
    pub provenance: String,
    pub has_intercept: bool,
    pub intercept: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intercept_std_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intercept_p_value: Option<f64>,
    pub terms: Vec<TermEstimate>,
    pub stats: FitStats,
    pub encoding_meta: EncodingMeta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignInfo>,
}

impl ModelDocument {
    pub fn from_model(model: &FittedModel, created_at: &str, provenance: &str) -> ModelDocument {
        ModelDocument {
            schema_version: MODEL_SCHEMA_VERSION.into(),
            name: model.name.clone(),
            created_at: created_at.into(),
            provenance: provenance.into(),
            has_intercept: model.has_intercept,
            intercept: model.intercept,
            intercept_std_error: model.intercept_std_error,
            intercept_p_value: model.intercept_p_value,
            terms: model.terms.clone(),
            stats: model.stats.clone(),
            encoding_meta: model.encoding_meta.clone(),
            design: model.design.clone(),
        }
    }

    pub fn to_model(&self) -> FittedModel {
        FittedModel {
            name: self.name.clone(),
            has_intercept: self.has_intercept,
            intercept: self.intercept,
            intercept_std_error: self.intercept_std_error,
            intercept_p_value: self.intercept_p_value,
            terms: self.terms.clone(),
            stats: self.stats.clone(),
            encoding_meta: self.encoding_meta.clone(),
            design: self.design.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<ModelDocument> {
        let probe: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::parse(e.to_string()))?;
        match probe.get("schema_version").and_then(|v| v.as_str()) {
            Some(MODEL_SCHEMA_VERSION) => {}
            Some(other) => return Err(Error::SchemaVersion(other.to_string())),
            None => return Err(Error::parse("missing schema_version")),
        }
        let doc: ModelDocument =
            serde_json::from_value(probe).map_err(|e| Error::parse(e.to_string()))?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model documents serialize");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |field: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::invariant(field, format!("{v} is not finite")))
            }
        };
        let probability = |field: &str, p: Option<f64>| match p {
            Some(p) if !(0.0..=1.0).contains(&p) => {
                Err(Error::invariant(field, format!("p-value {p} outside [0, 1]")))
            }
            _ => Ok(()),
        };
        finite("intercept", self.intercept)?;
        probability("intercept_p_value", self.intercept_p_value)?;
        for t in &self.terms {
            finite(&t.name, t.coefficient)?;
            probability(&t.name, t.p_value)?;
            if let Some(se) = t.std_error {
                if !(se >= 0.0) {
                    return Err(Error::invariant(&t.name, format!("std_error {se} is negative")));
                }
            }
            if t.role != TermRole::of(&t.name) {
                return Err(Error::invariant(
                    &t.name,
                    format!("role {:?} does not match the term name", t.role),
                ));
            }
        }
        let expected = EncodingMeta::from_terms(self.terms.iter().map(|t| t.name.as_str()));
        if expected != self.encoding_meta {
            return Err(Error::invariant(
                "encoding_meta",
                "control_order and factor_ids must list the terms in order",
            ));
        }
        if self.stats.p != self.terms.len() {
            return Err(Error::invariant(
                "stats.p",
                format!("{} terms but p = {}", self.terms.len(), self.stats.p),
            ));
        }
        if self.has_intercept && !(0.0..=1.0).contains(&self.stats.r2) {
            return Err(Error::invariant("stats.r2", "must lie in [0, 1] with an intercept"));
        }
        if let Some(sigma) = self.stats.residual_sigma {
            if !(sigma >= 0.0) {
                return Err(Error::invariant("stats.residual_sigma", "must be non-negative"));
            }
        }
        if let Some(design) = &self.design {
            let m = self.terms.len() + usize::from(self.has_intercept);
            if design.unscaled_covariance.len() != m
                || design.unscaled_covariance.iter().any(|row| row.len() != m)
            {
                return Err(Error::invariant(
                    "design.unscaled_covariance",
                    format!("expected a {m}x{m} matrix"),
                ));
            }
        }
        Ok(())
    }
}

/// The published baseline model: coefficients and p-values only.
pub fn paper_baseline() -> FittedModel {
    ModelDocument::from_json(PAPER_BASELINE_JSON)
        .expect("bundled model is valid")
        .to_model()
}

pub fn paper_baseline_document() -> ModelDocument {
    ModelDocument::from_json(PAPER_BASELINE_JSON).expect("bundled model is valid")
}

pub fn load_model(path: &Path) -> Result<ModelDocument> {
    ModelDocument::from_json(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

pub fn save_model(doc: &ModelDocument, path: &Path) -> Result<()> {
    std::fs::write(path, doc.to_json()).map_err(|e| Error::io(path, e))?;
    Ok(())
}
