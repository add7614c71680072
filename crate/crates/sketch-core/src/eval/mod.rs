//! Evaluation harness: legal output ratio plus task metrics (micro-F1 over
//! extracted tuples, single-label accuracy) over datasets of (input, gold)
//! pairs, reported as JSON and as an aligned text table.
//!
//! Scoring convention: an output that fails the two-step legality check
//! contributes zero to the task metric — the harshest consistent choice.

use crate::engine::{Engine, EngineError, GenerationConfig, GenerationOutcome, ModelBackend};
use crate::json::{parse_json, serialize_canonical, JsonNumber, JsonObject, JsonValue, ParseError};
use crate::schema::validate_lenient;
use crate::tasks::{Catalog, TaskError, TaskInstance};
use crate::util::derive_seed;
use rayon::prelude::*;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("empty batch: no outcomes to score")]
    EmptyBatch,
    #[error("prediction and gold batches differ in length ({predictions} vs {golds})")]
    LengthMismatch { predictions: usize, golds: usize },
    #[error("gold value {index} does not validate:\n{report}")]
    GoldInvalid {
        index: usize,
        report: crate::schema::ValidationReport,
    },
    #[error("eval dataset file: {0}")]
    BadFile(String),
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("generation setup failed: {0}")]
    Setup(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    MicroF1Entities,
    MicroF1Relations,
    AccuracySingleLabel,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::MicroF1Entities => "micro_f1_entities",
            Metric::MicroF1Relations => "micro_f1_relations",
            Metric::AccuracySingleLabel => "accuracy_single_label",
        }
    }

    pub fn parse(name: &str) -> Option<Metric> {
        match name {
            "micro_f1_entities" => Some(Metric::MicroF1Entities),
            "micro_f1_relations" => Some(Metric::MicroF1Relations),
            "accuracy_single_label" => Some(Metric::AccuracySingleLabel),
            _ => None,
        }
    }

    fn match_spec(self) -> Option<MatchSpec> {
        match self {
            Metric::MicroF1Entities => Some(MatchSpec::entities()),
            Metric::MicroF1Relations => Some(MatchSpec::relations()),
            Metric::AccuracySingleLabel => None,
        }
    }
}

/// Which members of each predicted object form the tuple that must match
/// exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchSpec {
    pub members: Vec<String>,
}

impl MatchSpec {
    pub fn entities() -> MatchSpec {
        MatchSpec {
            members: vec!["name".to_string(), "entity_type".to_string()],
        }
    }

    pub fn relations() -> MatchSpec {
        MatchSpec {
            members: vec!["head".to_string(), "relation".to_string(), "tail".to_string()],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalSample {
    pub input: String,
    pub gold: JsonValue,
}

#[derive(Debug, Clone)]
pub struct EvalDataset {
    pub name: String,
    pub instance: TaskInstance,
    pub metric: Metric,
    /// For `AccuracySingleLabel`: the member compared for exact match.
    pub label_member: String,
    pub samples: Vec<EvalSample>,
}

impl EvalDataset {
    /// Checks the dataset invariant: every gold validates against the
    /// instance's output format.
    pub fn check(&self) -> Result<(), EvalError> {
        for (index, sample) in self.samples.iter().enumerate() {
            let report = validate_lenient(&sample.gold, self.instance.output_format());
            if !report.valid() {
                return Err(EvalError::GoldInvalid { index, report });
            }
        }
        Ok(())
    }
}

/// Loads an eval dataset file: `name`, `taskInstance` (inline instance
/// document or path string relative to the file), `metric`, optional
/// `labelMember` (default `tag`), and `samples` of `{input, gold}`.
pub fn load_eval_dataset(path: &Path, catalog: &Catalog) -> Result<EvalDataset, EvalError> {
    let text = std::fs::read_to_string(path)?;
    let doc = parse_json(&text)?;
    let name = doc
        .get("name")
        .and_then(JsonValue::as_str)
        .ok_or_else(|| EvalError::BadFile("missing string member \"name\"".into()))?
        .to_string();
    let metric_name = doc
        .get("metric")
        .and_then(JsonValue::as_str)
        .ok_or_else(|| EvalError::BadFile("missing string member \"metric\"".into()))?;
    let metric = Metric::parse(metric_name)
        .ok_or_else(|| EvalError::BadFile(format!("unknown metric {metric_name:?}")))?;
    let label_member = doc
        .get("labelMember")
        .and_then(JsonValue::as_str)
        .unwrap_or("tag")
        .to_string();
    let instance = match doc.get("taskInstance") {
        Some(JsonValue::String(rel)) => {
            let base = path.parent().unwrap_or_else(|| Path::new("."));
            catalog.load_instance(&base.join(rel))?
        }
        Some(inline @ JsonValue::Object(_)) => {
            catalog.parse_instance(&serialize_canonical(inline))?
        }
        _ => {
            return Err(EvalError::BadFile(
                "taskInstance must be an inline instance document or a path string".into(),
            ))
        }
    };
    let samples_value = doc
        .get("samples")
        .and_then(JsonValue::as_array)
        .ok_or_else(|| EvalError::BadFile("missing array member \"samples\"".into()))?;
    let mut samples = Vec::with_capacity(samples_value.len());
    for (i, entry) in samples_value.iter().enumerate() {
        let input = entry
            .get("input")
            .and_then(JsonValue::as_str)
            .ok_or_else(|| EvalError::BadFile(format!("sample {i}: missing string \"input\"")))?
            .to_string();
        let gold = entry
            .get("gold")
            .ok_or_else(|| EvalError::BadFile(format!("sample {i}: missing \"gold\"")))?
            .clone();
        samples.push(EvalSample { input, gold });
    }
    let dataset = EvalDataset {
        name,
        instance,
        metric,
        label_member,
        samples,
    };
    dataset.check()?;
    Ok(dataset)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Counts {
    pub total: usize,
    /// Outputs that read as JSON.
    pub parsed: usize,
    /// Outputs that read as JSON and validate.
    pub valid: usize,
}

/// Valid outputs over total outputs, with the underlying counts.
pub fn legal_output_ratio(outcomes: &[GenerationOutcome]) -> Result<(f64, Counts), EvalError> {
    if outcomes.is_empty() {
        return Err(EvalError::EmptyBatch);
    }
    let counts = Counts {
        total: outcomes.len(),
        parsed: outcomes.iter().filter(|o| o.value.is_some()).count(),
        valid: outcomes.iter().filter(|o| o.report.valid()).count(),
    };
    Ok((counts.valid as f64 / counts.total as f64, counts))
}

/// Exact match on one designated member; a missing prediction (invalid
/// output) counts as wrong.
pub fn score_accuracy(
    predictions: &[Option<JsonValue>],
    golds: &[JsonValue],
    label_member: &str,
) -> Result<f64, EvalError> {
    if predictions.len() != golds.len() {
        return Err(EvalError::LengthMismatch {
            predictions: predictions.len(),
            golds: golds.len(),
        });
    }
    if golds.is_empty() {
        return Err(EvalError::EmptyBatch);
    }
    let hits = predictions
        .iter()
        .zip(golds)
        .filter(|(p, g)| match (p, g.get(label_member)) {
            (Some(p), Some(gold_label)) => p.get(label_member) == Some(gold_label),
            _ => false,
        })
        .count();
    Ok(hits as f64 / golds.len() as f64)
}

/// Micro-averaged F1 over tuples pulled from arrays of objects. A missing
/// prediction contributes its golds as false negatives and nothing else.
pub fn score_micro_f1(
    predictions: &[Option<JsonValue>],
    golds: &[JsonValue],
    spec: &MatchSpec,
) -> Result<f64, EvalError> {
    if predictions.len() != golds.len() {
        return Err(EvalError::LengthMismatch {
            predictions: predictions.len(),
            golds: golds.len(),
        });
    }
    if golds.is_empty() {
        return Err(EvalError::EmptyBatch);
    }
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for (prediction, gold) in predictions.iter().zip(golds) {
        let gold_tuples = tuples(gold, spec);
        let pred_tuples = match prediction {
            Some(p) => tuples(p, spec),
            None => Vec::new(),
        };
        let mut gold_counts = std::collections::HashMap::<&str, usize>::new();
        for t in &gold_tuples {
            *gold_counts.entry(t.as_str()).or_default() += 1;
        }
        for t in &pred_tuples {
            match gold_counts.get_mut(t.as_str()) {
                Some(n) if *n > 0 => {
                    *n -= 1;
                    tp += 1;
                }
                _ => fp += 1,
            }
        }
        fn_ += gold_counts.values().sum::<usize>();
    }
    if tp == 0 {
        return Ok(0.0);
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    Ok(2.0 * precision * recall / (precision + recall))
}

/// Tuple key of one predicted object: the spec'd members rendered
/// canonically and joined. Non-arrays produce no tuples; array elements
/// missing a member still produce a (non-matching) tuple.
fn tuples(value: &JsonValue, spec: &MatchSpec) -> Vec<String> {
    let Some(items) = value.as_array() else {
        return Vec::new();
    };
    items
        .iter()
        .map(|item| {
            spec.members
                .iter()
                .map(|m| {
                    item.get(m)
                        .map(serialize_canonical)
                        .unwrap_or_else(|| "<missing>".to_string())
                })
                .collect::<Vec<_>>()
                .join("\u{1f}")
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub generation: GenerationConfig,
    /// Worker threads for per-sample generation; 0 uses the ambient pool.
    pub workers: usize,
}

impl Default for EvalConfig {
    fn default() -> EvalConfig {
        EvalConfig {
            generation: GenerationConfig::default(),
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleStatus {
    pub index: usize,
    pub parsed: bool,
    pub valid: bool,
    /// Engine error text when generation failed outright (backend trouble,
    /// length exhaustion) rather than producing an invalid outcome.
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct DatasetReport {
    pub name: String,
    pub metric: Metric,
    pub counts: Counts,
    pub legal_output_ratio: f64,
    pub metric_value: f64,
    pub mode: &'static str,
    pub per_sample: Vec<SampleStatus>,
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub datasets: Vec<DatasetReport>,
    pub overall_legal_output_ratio: f64,
    pub overall_metric_value: f64,
}

/// Evaluates one dataset. Per-sample seeds derive from (config seed, sample
/// index), so reports are identical across worker counts and reruns.
pub fn run_eval(
    engine: &Engine,
    backend: &(dyn ModelBackend + Sync),
    dataset: &EvalDataset,
    config: &EvalConfig,
) -> Result<DatasetReport, EvalError> {
    dataset.check()?;
    if dataset.samples.is_empty() {
        return Err(EvalError::EmptyBatch);
    }
    let run = || -> Vec<(Option<GenerationOutcome>, Option<String>)> {
        dataset
            .samples
            .par_iter()
            .enumerate()
            .map(|(i, sample)| {
                let generation = GenerationConfig {
                    seed: derive_seed(config.generation.seed, i as u64),
                    ..config.generation.clone()
                };
                match engine.generate(backend, &dataset.instance, &sample.input, &generation) {
                    Ok(outcome) => (Some(outcome), None),
                    Err(EngineError::FormatFailure(last)) => (Some(*last), None),
                    Err(other) => (None, Some(other.to_string())),
                }
            })
            .collect()
    };
    let results = if config.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| EvalError::Setup(e.to_string()))?
            .install(run)
    } else {
        run()
    };

    let mut outcomes: Vec<GenerationOutcome> = Vec::with_capacity(results.len());
    let mut per_sample = Vec::with_capacity(results.len());
    let mut predictions: Vec<Option<JsonValue>> = Vec::with_capacity(results.len());
    for (index, (outcome, error)) in results.into_iter().enumerate() {
        match outcome {
            Some(outcome) => {
                per_sample.push(SampleStatus {
                    index,
                    parsed: outcome.value.is_some(),
                    valid: outcome.report.valid(),
                    error,
                });
                predictions.push(if outcome.report.valid() {
                    outcome.value.clone()
                } else {
                    None
                });
                outcomes.push(outcome);
            }
            None => {
                per_sample.push(SampleStatus {
                    index,
                    parsed: false,
                    valid: false,
                    error,
                });
                predictions.push(None);
                outcomes.push(crate::engine::validate_outcome(
                    "",
                    dataset.instance.output_format(),
                    false,
                ));
            }
        }
    }

    let (ratio, counts) = legal_output_ratio(&outcomes)?;
    let golds: Vec<JsonValue> = dataset.samples.iter().map(|s| s.gold.clone()).collect();
    let metric_value = match dataset.metric.match_spec() {
        Some(spec) => score_micro_f1(&predictions, &golds, &spec)?,
        None => score_accuracy(&predictions, &golds, &dataset.label_member)?,
    };
    Ok(DatasetReport {
        name: dataset.name.clone(),
        metric: dataset.metric,
        counts,
        legal_output_ratio: ratio,
        metric_value,
        mode: config.generation.mode.name(),
        per_sample,
    })
}

/// Bundles dataset reports with unweighted overall averages.
pub fn summarize(datasets: Vec<DatasetReport>) -> Result<EvalReport, EvalError> {
    if datasets.is_empty() {
        return Err(EvalError::EmptyBatch);
    }
    let n = datasets.len() as f64;
    let overall_legal_output_ratio =
        datasets.iter().map(|d| d.legal_output_ratio).sum::<f64>() / n;
    let overall_metric_value = datasets.iter().map(|d| d.metric_value).sum::<f64>() / n;
    Ok(EvalReport {
        datasets,
        overall_legal_output_ratio,
        overall_metric_value,
    })
}

impl EvalReport {
    pub fn to_json(&self) -> JsonValue {
        let number = |v: f64| {
            JsonValue::Number(
                JsonNumber::from_f64(v).unwrap_or_else(|| JsonNumber::from_i64(0)),
            )
        };
        let int = |v: usize| JsonValue::Number(JsonNumber::from_i64(v as i64));
        let mut datasets = Vec::new();
        for d in &self.datasets {
            let mut o = JsonObject::new();
            o.insert("name", JsonValue::from(d.name.as_str()));
            o.insert("metric", JsonValue::from(d.metric.name()));
            o.insert("mode", JsonValue::from(d.mode));
            o.insert("total", int(d.counts.total));
            o.insert("parsed", int(d.counts.parsed));
            o.insert("valid", int(d.counts.valid));
            o.insert("legal_output_ratio", number(d.legal_output_ratio));
            o.insert("metric_value", number(d.metric_value));
            let statuses: Vec<JsonValue> = d
                .per_sample
                .iter()
                .map(|s| {
                    let mut e = JsonObject::new();
                    e.insert("index", int(s.index));
                    e.insert("parsed", JsonValue::Bool(s.parsed));
                    e.insert("valid", JsonValue::Bool(s.valid));
                    if let Some(error) = &s.error {
                        e.insert("error", JsonValue::from(error.as_str()));
                    }
                    JsonValue::Object(e)
                })
                .collect();
            o.insert("samples", JsonValue::Array(statuses));
            datasets.push(JsonValue::Object(o));
        }
        let mut root = JsonObject::new();
        root.insert("datasets", JsonValue::Array(datasets));
        let mut overall = JsonObject::new();
        overall.insert(
            "legal_output_ratio",
            number(self.overall_legal_output_ratio),
        );
        overall.insert("metric_value", number(self.overall_metric_value));
        root.insert("overall", JsonValue::Object(overall));
        JsonValue::Object(root)
    }

    /// Aligned table, three decimals per value.
    pub fn render_table(&self) -> String {
        let mut rows: Vec<[String; 7]> = vec![[
            "dataset".into(),
            "metric".into(),
            "total".into(),
            "parsed".into(),
            "valid".into(),
            "L.O.R.".into(),
            "value".into(),
        ]];
        for d in &self.datasets {
            rows.push([
                d.name.clone(),
                d.metric.name().to_string(),
                d.counts.total.to_string(),
                d.counts.parsed.to_string(),
                d.counts.valid.to_string(),
                format!("{:.3}", d.legal_output_ratio),
                format!("{:.3}", d.metric_value),
            ]);
        }
        rows.push([
            "overall".into(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            format!("{:.3}", self.overall_legal_output_ratio),
            format!("{:.3}", self.overall_metric_value),
        ]);
        let mut widths = [0usize; 7];
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        for row in &rows {
            let mut line = String::new();
            for (i, (cell, width)) in row.iter().zip(widths).enumerate() {
                if i > 0 {
                    line.push_str("  ");
                }
                line.push_str(cell);
                line.push_str(&" ".repeat(width - cell.len()));
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}
