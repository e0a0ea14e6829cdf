//! File formats, the bundled published model, and request handling for front ends.

mod dataset_io;
mod model_doc;
mod service;

pub use dataset_io::{
    dataset_header, dataset_to_string, load_dataset, read_dataset, save_dataset, write_dataset,
    DATASET_COLUMNS,
};
pub use model_doc::{
    load_model, paper_baseline, paper_baseline_document, save_model, ModelDocument,
    MODEL_SCHEMA_VERSION, PAPER_BASELINE_ID,
};
pub use service::{
    predict_request, regressors_for, whatif, ModelRegistry, PredictRequest, PredictResponse,
    WhatIfEntry, WhatIfResponse,
};

use crate::domain::Rubric;
use crate::error::{Error, Result};

/// Rubric from a file, or the bundled one when `path` is `None`.
pub fn load_rubric(path: Option<&std::path::Path>) -> Result<Rubric> {
    match path {
        Some(p) => Rubric::from_json(&std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?),
        None => Ok(Rubric::bundled()),
    }
}
