//! Planted-model recovery: generate, build, and check which factors come back.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::synth::{generate_synthetic, SynthSpec};
use super::workflow::{build_baseline, build_specific, BuildConfig, SliceKind};
use crate::domain::QuestionId;
use crate::error::{Error, Result};

/// Which model-building procedure each trial runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Workflow {
    #[default]
    Baseline,
    /// Slice the generated data, then build with `criticals` forced in.
    Specific {
        slice: SliceKind,
        criticals: Vec<QuestionId>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub synth: SynthSpec,
    #[serde(default)]
    pub config: BuildConfig,
    #[serde(default)]
    pub workflow: Workflow,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    /// Selected factors, or `None` when the build failed.
    pub selected: Option<Vec<QuestionId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub trials: usize,
    /// Planted factors the search is expected to find.
    pub target: Vec<QuestionId>,
    /// Fraction of trials whose selection contains every target factor.
    pub recall: f64,
    /// Fraction of trials whose selection equals the target exactly.
    pub exact_match: f64,
    pub selection_rates: BTreeMap<QuestionId, f64>,
    pub failed_trials: usize,
    pub outcomes: Vec<TrialOutcome>,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed for trial `i`; a function of the base seed and index only.
pub fn trial_seed(base: u64, trial: usize) -> u64 {
    splitmix64(base ^ splitmix64(trial as u64))
}

fn run_trial(spec: &ExperimentSpec, trial: usize) -> TrialOutcome {
    let seed = trial_seed(spec.synth.seed, trial);
    let synth = SynthSpec { seed, ..spec.synth.clone() };
    let config = BuildConfig { seed, ..spec.config.clone() };
    let result = generate_synthetic(&synth).and_then(|ds| match &spec.workflow {
        Workflow::Baseline => build_baseline(&ds, &config),
        Workflow::Specific { slice, criticals } => {
            let part = ds.filtered(|r| slice.contains(r), &slice.to_string());
            build_specific(&part, *slice, criticals, &config)
        }
    });
    match result {
        Ok(out) => TrialOutcome {
            trial,
            seed,
            selected: Some(
                out.selection
                    .selected
                    .iter()
                    .filter_map(|t| t.parse().ok())
                    .collect(),
            ),
            error: None,
        },
        Err(e) => TrialOutcome {
            trial,
            seed,
            selected: None,
            error: Some(e.to_string()),
        },
    }
}

#[cfg(not(target_arch = "wasm32"))]
fn run_all(spec: &ExperimentSpec) -> Vec<TrialOutcome> {
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(spec.trials);
    let mut outcomes: Vec<TrialOutcome> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                s.spawn(move || {
                    (w..spec.trials)
                        .step_by(workers)
                        .map(|t| run_trial(spec, t))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("trial worker panicked"))
            .collect()
    });
    outcomes.sort_by_key(|o| o.trial);
    outcomes
}

#[cfg(target_arch = "wasm32")]
fn run_all(spec: &ExperimentSpec) -> Vec<TrialOutcome> {
    (0..spec.trials).map(|t| run_trial(spec, t)).collect()
}

/// Run `spec.trials` independent generate-and-build trials.
///
/// Trials run in parallel where threads are available; each trial's seed
/// depends only on the base seed and its index, so results do not depend on
/// scheduling.
pub fn recovery_experiment(spec: &ExperimentSpec) -> Result<RecoveryReport> {
    if spec.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    spec.synth.validate()?;
    let forced: BTreeSet<QuestionId> = match &spec.workflow {
        Workflow::Baseline => BTreeSet::new(),
        Workflow::Specific { criticals, .. } => criticals.iter().copied().collect(),
    };
    let target: Vec<QuestionId> = spec
        .synth
        .planted_factors()
        .into_iter()
        .filter(|q| !forced.contains(q))
        .collect();
    let target_set: BTreeSet<QuestionId> = target.iter().copied().collect();

    let outcomes = run_all(spec);
    let mut counts: BTreeMap<QuestionId, usize> = target.iter().map(|q| (*q, 0)).collect();
    let (mut recalled, mut exact, mut failed) = (0usize, 0usize, 0usize);
    for o in &outcomes {
        let Some(sel) = &o.selected else {
            failed += 1;
            continue;
        };
        let set: BTreeSet<QuestionId> = sel.iter().copied().collect();
        for q in &set {
            *counts.entry(*q).or_default() += 1;
        }
        if target_set.is_subset(&set) {
            recalled += 1;
        }
        if target_set == set {
            exact += 1;
        }
    }
    let frac = |k: usize| k as f64 / spec.trials as f64;
    Ok(RecoveryReport {
        trials: spec.trials,
        target,
        recall: frac(recalled),
        exact_match: frac(exact),
        selection_rates: counts.into_iter().map(|(q, k)| (q, frac(k))).collect(),
        failed_trials: failed,
        outcomes,
    })
}
