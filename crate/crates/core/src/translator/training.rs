use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::logistic::bce;
use super::{Translator, TranslatorError};
use crate::stream::{Carrier, EvalSession, Value};
use crate::xlearn::observable_agent;

/// Minimum distance of generated points from the separating hyperplane,
/// measured on the coordinate sum.
const MARGIN: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub label: f64,
    pub input: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub samples: Vec<Sample>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// One `label <floats> input <floats>` line per sample.
    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        self.samples.iter().map(|s| format!("label {} input {}\n", s.label, join(&s.input))).collect()
    }
}

/// Points uniform in `[-1, 1]^dim`, labeled 1 when their coordinate sum is
/// positive, rejecting points with `|sum| < 0.1`.
pub fn separable_dataset(seed: u64, n: usize, dim: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(n);
    while samples.len() < n {
        let input: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let s: f64 = input.iter().sum();
        if s.abs() < MARGIN {
            continue;
        }
        samples.push(Sample { label: if s > 0.0 { 1.0 } else { 0.0 }, input });
    }
    Dataset { samples }
}

pub fn parse_dataset(text: &str) -> Result<Dataset, TranslatorError> {
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| TranslatorError::Dataset { line: i + 1, message };
        let rest = line.strip_prefix("label").ok_or_else(|| err("expected `label`".into()))?;
        let (label, input) = rest.split_once("input").ok_or_else(|| err("expected `input`".into()))?;
        let floats = |s: &str| {
            s.split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| err(format!("`{t}`: {e}"))))
                .collect::<Result<Vec<_>, _>>()
        };
        let label = floats(label)?;
        let input = floats(input)?;
        if label.is_empty() || input.is_empty() {
            return Err(err("empty label or input".into()));
        }
        samples.push(Sample { label: label[0], input });
    }
    Ok(Dataset { samples })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub step: usize,
    pub input: Vec<f64>,
    pub label: f64,
    /// predicted probability
    pub prediction: f64,
    pub explanation: Value,
    pub loss: f64,
    /// parameters after this step's update
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingTrace {
    pub records: Vec<TraceRecord>,
    /// raw stream trace, one line per step
    pub stream_lines: Vec<String>,
}

impl TrainingTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn final_params(&self) -> Option<&[f64]> {
        self.records.last().map(|r| r.params.as_slice())
    }

    /// Stream trace lines extended with `loss=` and `explanation=`.
    pub fn export(&self) -> String {
        self.records
            .iter()
            .zip(&self.stream_lines)
            .map(|(r, line)| format!("{line} loss={} explanation={}\n", r.loss, r.explanation))
            .collect()
    }
}

/// Drives the observable agent interpreted by `t` over `data` (cycled) for
/// `steps` steps. Each step feeds `(label, input)`, where the label is
/// placed in coordinate 0 of a zero vector shaped like `Y`.
pub fn run_training(t: &Translator, data: &Dataset, steps: usize) -> Result<TrainingTrace, TranslatorError> {
    let mut trace = TrainingTrace { records: Vec::with_capacity(steps), stream_lines: Vec::new() };
    if steps == 0 {
        return Ok(trace);
    }
    if data.is_empty() {
        return Err(TranslatorError::Dataset { line: 0, message: "empty dataset".into() });
    }
    let y_dim = match t.carrier("Y")? {
        Carrier::RealVec(d) => d,
        other => return Err(TranslatorError::SymbolMismatch(format!("Y must be a real vector, found {other}"))),
    };
    let agent = t.interpret(&observable_agent())?;
    let mut session = EvalSession::new(&agent);
    for step in 0..steps {
        let sample = &data.samples[step % data.len()];
        let mut label = vec![0.0; y_dim];
        label[0] = sample.label;
        let out = session.feed(Value::pair(Value::Real(label), Value::Real(sample.input.clone())))?;
        let (pred, explanation) = out.split_at(1);
        let prediction = pred.as_real().map(|p| p[0]).unwrap_or(f64::NAN);
        let params = match session.feedback_states().into_iter().next() {
            Some(Value::Real(p)) => p,
            _ => Vec::new(),
        };
        trace.records.push(TraceRecord {
            step,
            input: sample.input.clone(),
            label: sample.label,
            prediction,
            explanation,
            loss: bce(prediction, sample.label),
            params,
        });
    }
    trace.stream_lines = session.trace_lines();
    Ok(trace)
}
