//! wasm-bindgen exports for the static demo page in `www/`.
//!
//! Exports exchange JSON text. The plain `*_json` functions hold the logic and
//! are tested on the host.

use wasm_bindgen::prelude::*;

use rww_core::domain::{Category, ControlVector, Platform, QuestionId, Rating};
use rww_core::interface::{ModelRegistry, PredictRequest, PAPER_BASELINE_ID};
use rww_core::pipeline::{recovery_experiment, BuildConfig, ExperimentSpec, SynthSpec, Workflow};
use rww_core::stats::{cohen_kappa, passes_repeatability_gate, AgreementMatrix, Weighting};

/// Upper bound on trials per recovery run so the page stays responsive.
pub const MAX_DEMO_TRIALS: usize = 200;

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

fn parse_request(request: &str) -> Result<PredictRequest, String> {
    serde_json::from_str(request).map_err(|e| format!("malformed request: {e}"))
}

/// A campaign with every factor unrated and unit controls, as a starting form.
pub fn blank_request_json() -> String {
    let request = PredictRequest {
        model_id: None,
        ratings: QuestionId::all().map(|q| (q, Rating::None)).collect(),
        controls: ControlVector::default(),
        platform: Platform::Kickstarter,
        category: Category::SmartWatch,
        interval_level: None,
    };
    serde_json::to_string_pretty(&request).expect("request serializes")
}

pub fn predict_json(request: &str) -> Result<String, String> {
    let registry = ModelRegistry::with_bundled();
    let response = registry
        .predict(PAPER_BASELINE_ID, &parse_request(request)?)
        .map_err(|e| e.to_string())?;
    to_json(&response)
}

pub fn whatif_json(request: &str) -> Result<String, String> {
    let registry = ModelRegistry::with_bundled();
    let response = registry
        .whatif(PAPER_BASELINE_ID, &parse_request(request)?)
        .map_err(|e| e.to_string())?;
    to_json(&response)
}

fn parse_ratings(text: &str) -> Result<Vec<Rating>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|e: rww_core::Error| e.to_string()))
        .collect()
}

/// Kappa between two rating lists written as 0 / 0.5 / 1 tokens.
pub fn kappa_json(a: &str, b: &str, linear: bool) -> Result<String, String> {
    let matrix = AgreementMatrix::from_ratings(&parse_ratings(a)?, &parse_ratings(b)?)
        .map_err(|e| e.to_string())?;
    let weighting = if linear { Weighting::Linear } else { Weighting::Unweighted };
    let kappa = cohen_kappa(&matrix, weighting).map_err(|e| e.to_string())?;
    Ok(serde_json::json!({
        "kappa": kappa,
        "items": matrix.total(),
        "repeatable": passes_repeatability_gate(kappa),
        "counts": matrix.counts,
    })
    .to_string())
}

/// Plant the bundled coefficients, add noise, and check how often selection finds them.
pub fn recovery_json(sigma: f64, trials: usize, seed: u64) -> Result<String, String> {
    if !(1..=MAX_DEMO_TRIALS).contains(&trials) {
        return Err(format!("trials must be between 1 and {MAX_DEMO_TRIALS}"));
    }
    let spec = ExperimentSpec {
        synth: SynthSpec::from_model(&rww_core::interface::paper_baseline(), 127, sigma, seed),
        config: BuildConfig::default(),
        workflow: Workflow::Baseline,
        trials,
    };
    let mut report = recovery_experiment(&spec).map_err(|e| e.to_string())?;
    report.outcomes.clear();
    to_json(&report)
}

#[wasm_bindgen(js_name = blankRequest)]
pub fn blank_request() -> String {
    blank_request_json()
}

#[wasm_bindgen]
pub fn predict(request: &str) -> Result<String, JsError> {
    predict_json(request).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn whatif(request: &str) -> Result<String, JsError> {
    whatif_json(request).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn kappa(a: &str, b: &str, linear: bool) -> Result<String, JsError> {
    kappa_json(a, b, linear).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn recovery(sigma: f64, trials: usize, seed: u32) -> Result<String, JsError> {
    recovery_json(sigma, trials, u64::from(seed)).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(text: &str) -> serde_json::Value {
        serde_json::from_str(text).unwrap()
    }

    #[test]
    fn blank_request_predicts_intercept_plus_dummies() {
        let r = value(&predict_json(&blank_request_json()).unwrap());
        assert!((r["ln_amount"].as_f64().unwrap() - (1.97 + 0.62 - 1.01)).abs() < 1e-12);
    }

    #[test]
    fn whatif_lists_baseline_factors() {
        let w = value(&whatif_json(&blank_request_json()).unwrap());
        let entries = w["entries"].as_array().unwrap();
        assert_eq!(entries.len(), 5);
        assert_eq!(entries[0]["question"], "Q01");
    }

    #[test]
    fn bad_request_is_reported() {
        assert!(predict_json("{}").unwrap_err().starts_with("malformed request"));
    }

    #[test]
    fn kappa_fixture() {
        let k = value(&kappa_json("0 0.5 1 1", "0,0.5,1,0.5", true).unwrap());
        assert!((k["kappa"].as_f64().unwrap() - 0.714_285_714).abs() < 1e-9);
        assert_eq!(k["repeatable"], false);
        assert!(kappa_json("0 2", "0 1", true).is_err());
        assert!(kappa_json("0 1", "0", true).is_err());
    }

    #[test]
    fn small_recovery_run() {
        let r = value(&recovery_json(0.0, 3, 1).unwrap());
        assert_eq!(r["recall"], 1.0);
        assert!(r["outcomes"].as_array().unwrap().is_empty());
        assert!(recovery_json(0.3, 0, 1).is_err());
        assert!(recovery_json(0.3, MAX_DEMO_TRIALS + 1, 1).is_err());
    }
}
