use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rww_core::domain::{factor_prevalence_filter, PrevalenceSplit, QuestionId, Rating};
use rww_core::interface::{
    load_dataset, load_model, load_rubric, save_dataset, save_model, ModelDocument, ModelRegistry,
    PredictRequest, PredictResponse,
};
use rww_core::pipeline::{
    build_baseline, build_specific, generate_synthetic, screen_factors, recovery_experiment,
    BuildConfig, BuildOutcome, ExperimentSpec, ScreeningReport, SliceKind,
};
use rww_core::selection::{Direction, ScoreKind};
use rww_core::stats::{cohen_kappa, passes_repeatability_gate, AgreementMatrix, Weighting, REPEATABILITY_GATE};
use rww_core::{Error, ErrorClass, Result};

use crate::server::{serve, AppState};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Baseline critical factors used as forced terms for slice models by default.
const DEFAULT_CRITICALS: &str = "Q01,Q08,Q12,Q16,Q25";

#[derive(Parser, Debug)]
#[command(name = "rww", version, about = "Real-Win-Worth crowdfunding models: train, predict, screen, and serve")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Weights {
    Linear,
    None,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScoreArg {
    CvR2,
    InSampleAdjR2,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DirectionArg {
    Forward,
    Backward,
    Bidirectional,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Select factors and fit a model from a dataset file.
    Train {
        #[arg(long)]
        data: PathBuf,
        /// `baseline`, `platform=<KS|IGG>` or `category=<3DP|SW>`.
        #[arg(long, default_value = "baseline")]
        mode: String,
        /// Factors forced into slice models, comma separated.
        #[arg(long, default_value = DEFAULT_CRITICALS)]
        criticals: String,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 0.03)]
        threshold: f64,
        #[arg(long, value_enum, default_value_t = ScoreArg::CvR2)]
        score: ScoreArg,
        #[arg(long, value_enum, default_value_t = DirectionArg::Bidirectional)]
        direction: DirectionArg,
        #[arg(long, default_value_t = 100)]
        max_steps: usize,
        /// Write the fitted model document here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Name stored in the model document.
        #[arg(long)]
        name: Option<String>,
    },
    /// Predict ln(funding raised) for one campaign.
    Predict {
        /// Bundled model id or path to a model document.
        #[arg(long, default_value = "paper-baseline")]
        model: String,
        /// Campaign request document (ratings, controls, platform, category).
        #[arg(long)]
        campaign: PathBuf,
        /// Prediction interval level, e.g. 0.9.
        #[arg(long)]
        interval: Option<f64>,
    },
    /// Prevalence filter and platform/category t-tests per factor.
    Screen {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 0.03)]
        threshold: f64,
    },
    /// Agreement between two raters' rating lists.
    Kappa {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = Weights::Linear)]
        weights: Weights,
    },
    /// Run a planted-model recovery experiment.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        /// Overrides the trial count in the spec.
        #[arg(long)]
        trials: Option<usize>,
        /// Write one synthetic dataset from the spec and stop.
        #[arg(long)]
        emit_dataset: Option<PathBuf>,
    },
    /// Serve predictions over HTTP.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Extra model documents to serve, by their stored name.
        #[arg(long)]
        model: Vec<PathBuf>,
        #[arg(long)]
        rubric: Option<PathBuf>,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e.class() {
        ErrorClass::Usage => EXIT_USAGE,
        ErrorClass::Data => EXIT_DATA,
        ErrorClass::Numerical => EXIT_NUMERICAL,
    }
}

/// Run the tool with `args` (including the program name); returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn emit<T: Serialize>(
    out: &mut dyn Write,
    format: Format,
    value: &T,
    table: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Error::parse(e.to_string()))?;
            writeln!(out)?;
        }
        Format::Table => table(out)?,
    }
    Ok(())
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let format = cli.format;
    match cli.command {
        Command::Train {
            data,
            mode,
            criticals,
            k,
            seed,
            alpha,
            threshold,
            score,
            direction,
            max_steps,
            out: model_out,
            name,
        } => {
            let config = BuildConfig {
                alpha,
                prevalence_threshold: threshold,
                k_folds: k,
                seed,
                direction: match direction {
                    DirectionArg::Forward => Direction::Forward,
                    DirectionArg::Backward => Direction::Backward,
                    DirectionArg::Bidirectional => Direction::Bidirectional,
                },
                score: match score {
                    ScoreArg::CvR2 => ScoreKind::CvR2,
                    ScoreArg::InSampleAdjR2 => ScoreKind::InSampleAdjR2,
                },
                max_steps,
            };
            let dataset = load_dataset(&data)?;
            let outcome = if mode == "baseline" {
                build_baseline(&dataset, &config)?
            } else {
                let kind: SliceKind = mode.parse()?;
                let criticals = parse_questions(&criticals)?;
                let slice = dataset.filtered(|r| kind.contains(r), &kind.to_string());
                build_specific(&slice, kind, &criticals, &config)?
            };
            let mut model = outcome.selection.final_model.clone();
            if let Some(n) = name {
                model.name = n;
            }
            if let Some(path) = model_out {
                let provenance = format!("trained on {} ({} campaigns), mode {mode}", data.display(), dataset.len());
                save_model(&ModelDocument::from_model(&model, &now(), &provenance), &path)?;
            }
            emit(out, format, &outcome, |w| train_table(w, &outcome))
        }
        Command::Predict { model, campaign, interval } => {
            let response = predict_file(&model, &campaign, interval)?;
            emit(out, format, &response, |w| predict_table(w, &response))
        }
        Command::Screen { data, alpha, threshold } => {
            let dataset = load_dataset(&data)?;
            let prevalence = factor_prevalence_filter(&dataset, threshold)?;
            let screening = screen_factors(&dataset, alpha, &prevalence.kept)?;
            let report = ScreenOutput { prevalence, screening };
            emit(out, format, &report, |w| {
                writeln!(w, "dropped  {}", join_ids(&report.prevalence.dropped))?;
                screen_table(w, &report.screening)
            })
        }
        Command::Kappa { a, b, weights } => {
            let ra = read_ratings(&a)?;
            let rb = read_ratings(&b)?;
            let weighting = match weights {
                Weights::Linear => Weighting::Linear,
                Weights::None => Weighting::Unweighted,
            };
            let matrix = AgreementMatrix::from_ratings(&ra, &rb)?;
            let kappa = cohen_kappa(&matrix, weighting)?;
            let report = KappaReport {
                kappa,
                weighting,
                items: matrix.total(),
                gate: REPEATABILITY_GATE,
                repeatable: passes_repeatability_gate(kappa),
                counts: matrix.counts,
            };
            emit(out, format, &report, |w| {
                writeln!(w, "kappa       {:.4}", report.kappa)?;
                writeln!(
                    w,
                    "weighting   {}",
                    match report.weighting {
                        Weighting::Linear => "linear",
                        Weighting::Unweighted => "none",
                    }
                )?;
                writeln!(w, "items       {}", report.items)?;
                writeln!(
                    w,
                    "repeatable  {} (gate {:.2})",
                    if report.repeatable { "yes" } else { "no" },
                    report.gate
                )
            })
        }
        Command::Simulate { spec, trials, emit_dataset } => {
            let text = read_text(&spec)?;
            let mut spec: ExperimentSpec = serde_json::from_str(&text).map_err(|e| Error::parse(e.to_string()))?;
            if let Some(t) = trials {
                spec.trials = t;
            }
            if let Some(path) = emit_dataset {
                let ds = generate_synthetic(&spec.synth)?;
                save_dataset(&ds, &path)?;
                writeln!(out, "wrote {} campaigns to {}", ds.len(), path.display())?;
                return Ok(());
            }
            let report = recovery_experiment(&spec)?;
            emit(out, format, &report, |w| {
                writeln!(w, "trials        {}", report.trials)?;
                writeln!(w, "target        {}", join_ids(&report.target))?;
                writeln!(w, "recall        {:.3}", report.recall)?;
                writeln!(w, "exact match   {:.3}", report.exact_match)?;
                writeln!(w, "failed        {}", report.failed_trials)?;
                writeln!(w, "selection rates")?;
                for (q, r) in &report.selection_rates {
                    writeln!(w, "  {q}  {r:.2}")?;
                }
                Ok(())
            })
        }
        Command::Serve { port, model, rubric } => {
            let mut registry = ModelRegistry::with_bundled();
            for path in &model {
                let doc = load_model(path)?;
                registry.insert(&doc.name, doc.to_model());
            }
            let state = AppState {
                registry: Arc::new(registry),
                rubric: Arc::new(load_rubric(rubric.as_deref())?),
            };
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(serve(port, state))?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ScreenOutput {
    prevalence: PrevalenceSplit,
    screening: ScreeningReport,
}

#[derive(Serialize)]
struct KappaReport {
    kappa: f64,
    weighting: Weighting,
    items: u64,
    gate: f64,
    repeatable: bool,
    counts: [[u64; 3]; 3],
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Resolve `model` as a bundled id first, then as a file path.
pub fn resolve_model(model: &str) -> Result<(String, rww_core::stats::FittedModel)> {
    let registry = ModelRegistry::with_bundled();
    if let Ok(m) = registry.get(model) {
        return Ok((model.to_string(), m.clone()));
    }
    let path = Path::new(model);
    if path.exists() {
        let doc = load_model(path)?;
        return Ok((doc.name.clone(), doc.to_model()));
    }
    Err(Error::UnknownModel(model.to_string()))
}

pub fn predict_file(model: &str, campaign: &Path, interval: Option<f64>) -> Result<PredictResponse> {
    let (id, fitted) = resolve_model(model)?;
    let text = read_text(campaign)?;
    let mut request: PredictRequest = serde_json::from_str(&text).map_err(|e| Error::Parse {
        row: None,
        column: None,
        message: format!("{}: {e}", campaign.display()),
    })?;
    if interval.is_some() {
        request.interval_level = interval;
    }
    rww_core::interface::predict_request(&id, &fitted, &request)
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_questions(list: &str) -> Result<Vec<QuestionId>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse())
        .collect()
}

/// Ratings as a JSON array or as 0/0.5/1 tokens separated by commas or whitespace.
fn read_ratings(path: &Path) -> Result<Vec<Rating>> {
    let text = read_text(path)?;
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text).map_err(|e| Error::parse(format!("{}: {e}", path.display())));
    }
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse())
        .collect()
}

fn join_ids(ids: &[QuestionId]) -> String {
    if ids.is_empty() {
        "-".into()
    } else {
        ids.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" ")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.4}"))
}

fn train_table(w: &mut dyn Write, o: &BuildOutcome) -> std::io::Result<()> {
    let s = &o.selection;
    writeln!(w, "dropped     {}", join_ids(&o.prevalence.dropped))?;
    if let Some(screen) = &o.screening {
        writeln!(w, "pool        {}", join_ids(&screen.candidate_pool))?;
    }
    writeln!(w, "selected    {}", if s.selected.is_empty() { "-".into() } else { s.selected.join(" ") })?;
    writeln!(w, "score       {:.4}", s.score)?;
    if !s.trace.is_empty() {
        writeln!(w, "trace")?;
        for t in &s.trace {
            writeln!(w, "  {:>2} {:<6} {:<4} {:.4} -> {:.4}", t.step, format!("{:?}", t.action).to_lowercase(), t.term, t.score_before, t.score_after)?;
        }
    }
    model_table(w, &s.final_model)
}

fn model_table(w: &mut dyn Write, m: &rww_core::stats::FittedModel) -> std::io::Result<()> {
    writeln!(w, "{:<16} {:>10} {:>10} {:>8}", "term", "coef", "std_err", "p")?;
    writeln!(w, "{:<16} {:>10.4} {:>10} {:>8}", "intercept", m.intercept, opt(m.intercept_std_error), opt(m.intercept_p_value))?;
    for t in &m.terms {
        writeln!(w, "{:<16} {:>10.4} {:>10} {:>8}", t.name, t.coefficient, opt(t.std_error), opt(t.p_value))?;
    }
    writeln!(
        w,
        "r2 {:.4}  adj_r2 {:.4}  n {}  p {}  sigma {}",
        m.stats.r2,
        m.stats.adj_r2,
        m.stats.n,
        m.stats.p,
        opt(m.stats.residual_sigma)
    )
}

fn predict_table(w: &mut dyn Write, r: &PredictResponse) -> std::io::Result<()> {
    writeln!(w, "model       {}", r.model_id)?;
    writeln!(w, "ln_amount   {:.4}", r.ln_amount)?;
    writeln!(w, "amount      {:.2}", r.amount)?;
    if let Some(iv) = r.interval {
        writeln!(w, "interval    {:.0}%  [{:.4}, {:.4}]", iv.level * 100.0, iv.lower, iv.upper)?;
    }
    writeln!(w, "contributions")?;
    writeln!(w, "  {:<16} {:>10.4}", "intercept", r.intercept)?;
    for (name, c) in &r.per_term_contributions {
        writeln!(w, "  {name:<16} {c:>10.4}")?;
    }
    Ok(())
}

fn screen_table(w: &mut dyn Write, r: &ScreeningReport) -> std::io::Result<()> {
    writeln!(
        w,
        "{:<4} {:>6} {:>6} {:>8} {:>7} {:>6} {:>6} {:>8} {:>7}  pool",
        "q", "IGG", "KS", "t", "p", "3DP", "SW", "t", "p"
    )?;
    for f in &r.factors {
        let (p, c) = (&f.by_platform, &f.by_category);
        writeln!(
            w,
            "{:<4} {:>6.3} {:>6.3} {:>8.3} {:>7.4} {:>6.3} {:>6.3} {:>8.3} {:>7.4}  {}",
            f.question.to_string(),
            p.mean_a,
            p.mean_b,
            p.test.t_stat,
            p.test.p_value,
            c.mean_a,
            c.mean_b,
            c.test.t_stat,
            c.test.p_value,
            if f.in_pool { "yes" } else { "no" }
        )?;
    }
    writeln!(w, "alpha {}  pool {}", r.alpha, join_ids(&r.candidate_pool))
}
