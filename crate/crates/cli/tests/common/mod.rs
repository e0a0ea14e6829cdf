#![allow(dead_code)]

use std::path::Path;

use rww_core::domain::{Category, ControlVector, Platform, QuestionId, Rating};
use rww_core::interface::PredictRequest;

pub const BASELINE_FACTORS: [u8; 5] = [1, 8, 12, 16, 25];

/// Smart-watch campaign on Kickstarter with the baseline factors at `level`.
pub fn campaign(level: Rating) -> PredictRequest {
    PredictRequest {
        model_id: None,
        ratings: QuestionId::all()
            .map(|q| (q, if BASELINE_FACTORS.contains(&q.number()) { level } else { Rating::None }))
            .collect(),
        controls: ControlVector::default(),
        platform: Platform::Kickstarter,
        category: Category::SmartWatch,
        interval_level: None,
    }
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) {
    std::fs::write(path, serde_json::to_string_pretty(value).unwrap()).unwrap();
}

pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("rww").chain(args.iter().copied());
    let code = rww_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}
