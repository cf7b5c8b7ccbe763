//! Subcommand implementations. Each writes its report to `out` and returns
//! the process exit code, or a [`Failure`] describing a one-line error.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use catxai_core::diagram::{diagram_eq, normalize, render_dot, typecheck, DiagramError, MorTerm};
use catxai_core::institution::{check_morphism_exhaustive, InstitutionError, PropSignature, SignatureMorphism};
use catxai_core::laws::{run_suite, LawConfig, Suite};
use catxai_core::stream::{random_value, Carrier, EvalSession, StreamError, Value};
use catxai_core::taxonomy::{classify, format_labels, ExplainerSpec, TaxonomyError};
use catxai_core::translator::{
    parse_dataset, perceptron_translator, random_finite_translator, run_training, separable_dataset,
    step_varying_translator, Translator, TranslatorError,
};
use catxai_core::xlearn;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dsl::{self, DslDocument, DslErrorKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_TYPE: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    /// stable machine-readable code such as `E_PARSE`
    pub code: &'static str,
    pub exit: i32,
    pub message: String,
}

impl Failure {
    pub fn new(code: &'static str, exit: i32, message: impl Into<String>) -> Self {
        Self { code, exit, message: message.into() }
    }

    /// Single-line rendering, optionally with ANSI color on the prefix.
    pub fn render(&self, color: bool) -> String {
        let message = self.message.replace('\n', " ");
        if color {
            format!("\x1b[1;31merror[{}]\x1b[0m: {message}", self.code)
        } else {
            format!("error[{}]: {message}", self.code)
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

pub type Outcome = Result<i32, Failure>;

fn io(e: std::io::Error) -> Failure {
    Failure::new("E_IO", EXIT_FAILED, e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new("E_IO", EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn diagram_failure(e: DiagramError) -> Failure {
    match e {
        DiagramError::FeedbackNotSupported => Failure::new("E_FEEDBACK", EXIT_FAILED, e.to_string()),
        _ => Failure::new("E_TYPE", EXIT_TYPE, e.to_string()),
    }
}

fn translator_failure(e: TranslatorError) -> Failure {
    match e {
        TranslatorError::Diagram(d) => diagram_failure(d),
        TranslatorError::Dataset { .. } => Failure::new("E_DATA", EXIT_PARSE, e.to_string()),
        TranslatorError::Stream(_) => Failure::new("E_STREAM", EXIT_FAILED, e.to_string()),
        _ => Failure::new("E_TRANSLATOR", EXIT_TYPE, e.to_string()),
    }
}

fn stream_failure(e: StreamError) -> Failure {
    Failure::new("E_STREAM", EXIT_FAILED, e.to_string())
}

fn institution_failure(e: InstitutionError) -> Failure {
    match e {
        InstitutionError::Parse { .. } => Failure::new("E_PARSE", EXIT_PARSE, e.to_string()),
        _ => Failure::new("E_INSTITUTION", EXIT_FAILED, e.to_string()),
    }
}

pub fn load_document(path: &Path) -> Result<DslDocument, Failure> {
    let text = read(path)?;
    dsl::parse(&text).map_err(|e| {
        let (code, exit) = match e.kind {
            DslErrorKind::Syntax => ("E_PARSE", EXIT_PARSE),
            DslErrorKind::Duplicate => ("E_DUPLICATE", EXIT_PARSE),
            DslErrorKind::Unbound => ("E_UNBOUND", EXIT_TYPE),
        };
        Failure::new(code, exit, format!("{}:{e}", path.display()))
    })
}

fn lookup<'a>(doc: &'a DslDocument, name: &str) -> Result<&'a MorTerm, Failure> {
    doc.term(name).ok_or_else(|| Failure::new("E_NO_TERM", EXIT_USAGE, format!("no term named `{name}`")))
}

/// Typechecks every term; fails on the first ill-typed one.
pub fn check(out: &mut dyn Write, file: &Path) -> Outcome {
    let doc = load_document(file)?;
    let pres = doc.presentation();
    for (name, term) in doc.terms() {
        let (dom, cod) =
            typecheck(term, &pres).map_err(|e| Failure::new("E_TYPE", EXIT_TYPE, format!("term `{name}`: {e}")))?;
        writeln!(out, "{name} : {dom} -> {cod}").map_err(io)?;
    }
    let (obs, mors, terms) = doc.count();
    writeln!(out, "ok: objects={obs} morphisms={mors} terms={terms}").map_err(io)?;
    Ok(EXIT_OK)
}

fn typed<'a>(doc: &'a DslDocument, name: &str) -> Result<&'a MorTerm, Failure> {
    let t = lookup(doc, name)?;
    typecheck(t, &doc.presentation()).map_err(diagram_failure)?;
    Ok(t)
}

pub fn normalize_term(out: &mut dyn Write, file: &Path, term: &str) -> Outcome {
    let doc = load_document(file)?;
    let t = typed(&doc, term)?;
    writeln!(out, "{}", normalize(t).map_err(diagram_failure)?).map_err(io)?;
    Ok(EXIT_OK)
}

pub fn eq(out: &mut dyn Write, file: &Path, left: &str, right: &str) -> Outcome {
    let doc = load_document(file)?;
    let (l, r) = (typed(&doc, left)?, typed(&doc, right)?);
    if diagram_eq(l, r).map_err(diagram_failure)? {
        writeln!(out, "equal").map_err(io)?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "not equal").map_err(io)?;
        Ok(EXIT_FAILED)
    }
}

pub fn render(out: &mut dyn Write, file: &Path, term: &str, output: Option<&Path>) -> Outcome {
    let doc = load_document(file)?;
    let dot = render_dot(typed(&doc, term)?).map_err(diagram_failure)?;
    match output {
        Some(p) => {
            fs::write(p, dot).map_err(io)?;
            writeln!(out, "wrote {}", p.display()).map_err(io)?;
        }
        None => out.write_all(dot.as_bytes()).map_err(io)?,
    }
    Ok(EXIT_OK)
}

/// Names accepted by `--translator`.
pub const TRANSLATORS: [&str; 3] = ["random", "perceptron", "step-varying"];

fn builtin_translator(
    name: &str,
    doc_pres: &catxai_core::diagram::Presentation,
    seed: u64,
) -> Result<Translator, Failure> {
    match name {
        "random" => Ok(random_finite_translator(doc_pres, seed, 3)),
        "perceptron" => Ok(perceptron_translator()),
        "step-varying" => Ok(step_varying_translator()),
        other => Err(Failure::new(
            "E_TRANSLATOR",
            EXIT_USAGE,
            format!("unknown translator `{other}`; expected one of {}", TRANSLATORS.join(", ")),
        )),
    }
}

/// Reads one value of `carrier` from whitespace-separated tokens: nothing
/// for the unit, an index or label for a finite set, `d` numbers for `R^d`.
pub fn parse_value(tokens: &mut dyn Iterator<Item = &str>, carrier: &Carrier) -> Result<Value, String> {
    let mut next = || tokens.next().ok_or_else(|| "too few values".to_string());
    match carrier {
        Carrier::Unit => Ok(Value::Unit),
        Carrier::FiniteEnum(labels) => {
            let t = next()?;
            let i = t
                .parse::<usize>()
                .ok()
                .or_else(|| labels.iter().position(|l| l == t))
                .ok_or_else(|| format!("`{t}` is not an element of {carrier}"))?;
            if i < labels.len() {
                Ok(Value::Enum(i))
            } else {
                Err(format!("index {i} out of range for {carrier}"))
            }
        }
        Carrier::RealVec(d) => (0..*d)
            .map(|_| next()?.parse::<f64>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()
            .map(Value::Real),
        Carrier::Product(fs) => {
            fs.iter().map(|c| parse_value(tokens, c)).collect::<Result<Vec<_>, _>>().map(Value::from_factors)
        }
        other => Err(format!("values of {other} cannot be read from a file")),
    }
}

#[derive(Debug, Clone)]
pub struct RunArgs<'a> {
    pub file: &'a Path,
    pub term: &'a str,
    pub translator: Option<&'a str>,
    pub inputs: Option<&'a Path>,
    pub steps: Option<usize>,
    pub seed: u64,
}

/// Evaluates a term step by step and prints the trace. Inputs come from a
/// file (one step per line, cycled) or are drawn from the seed.
pub fn run(out: &mut dyn Write, args: &RunArgs) -> Outcome {
    let doc = load_document(args.file)?;
    let term = typed(&doc, args.term)?;
    let name = args.translator.or(doc.translator()).unwrap_or("random");
    let t = builtin_translator(name, &doc.presentation(), args.seed)?;
    let m = t.interpret(term).map_err(translator_failure)?;
    let dom = m
        .dom()
        .as_constant()
        .cloned()
        .ok_or_else(|| Failure::new("E_STREAM", EXIT_FAILED, "input type varies with the step"))?;
    let inputs: Vec<Value> = match args.inputs {
        Some(p) => {
            let text = read(p)?;
            let mut values = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("");
                if line.trim().is_empty() {
                    continue;
                }
                let mut toks = line.split_whitespace();
                let v = parse_value(&mut toks, &dom)
                    .map_err(|m| Failure::new("E_DATA", EXIT_PARSE, format!("{}:{}: {m}", p.display(), i + 1)))?;
                if toks.next().is_some() {
                    return Err(Failure::new(
                        "E_DATA",
                        EXIT_PARSE,
                        format!("{}:{}: too many values", p.display(), i + 1),
                    ));
                }
                values.push(v);
            }
            if values.is_empty() {
                return Err(Failure::new("E_DATA", EXIT_PARSE, format!("{}: no inputs", p.display())));
            }
            let steps = args.steps.unwrap_or(values.len());
            (0..steps).map(|i| values[i % values.len()].clone()).collect()
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            (0..args.steps.unwrap_or(5))
                .map(|_| {
                    random_value(&mut rng, &dom).ok_or_else(|| {
                        Failure::new("E_USAGE", EXIT_USAGE, format!("inputs of type {dom} need --inputs"))
                    })
                })
                .collect::<Result<_, _>>()?
        }
    };
    let mut session = EvalSession::new(&m);
    for x in inputs {
        session.feed(x).map_err(stream_failure)?;
    }
    writeln!(out, "translator {}", t.name()).map_err(io)?;
    for line in session.trace_lines() {
        writeln!(out, "{line}").map_err(io)?;
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Clone)]
pub struct TrainArgs<'a> {
    pub translator: &'a str,
    pub data: Option<&'a Path>,
    pub steps: usize,
    pub seed: u64,
    /// size of the generated dataset when no file is given
    pub samples: usize,
}

/// Trains the observable agent and reports the trace, final parameters
/// and training accuracy under the final parameters.
pub fn train(out: &mut dyn Write, args: &TrainArgs) -> Outcome {
    let t = match args.translator {
        "random" => return Err(Failure::new("E_TRANSLATOR", EXIT_USAGE, "`random` has no real-valued learner")),
        name => builtin_translator(name, xlearn::presentation(), args.seed)?,
    };
    let data = match args.data {
        Some(p) => parse_dataset(&read(p)?).map_err(translator_failure)?,
        None => separable_dataset(args.seed, args.samples, 2),
    };
    if data.samples.iter().any(|s| s.input.len() != 2) {
        return Err(Failure::new("E_DATA", EXIT_PARSE, "inputs must have 2 coordinates"));
    }
    let trace = run_training(&t, &data, args.steps).map_err(translator_failure)?;
    out.write_all(trace.export().as_bytes()).map_err(io)?;
    let Some(params) = trace.final_params() else {
        writeln!(out, "no steps run").map_err(io)?;
        return Ok(EXIT_OK);
    };
    let mut correct = 0;
    for s in &data.samples {
        let y = t.predict(args.steps, &s.input, params).map_err(translator_failure)?;
        let p = y.as_real().map(|v| v[0]).unwrap_or(f64::NAN);
        if (p >= 0.5) == (s.label >= 0.5) {
            correct += 1;
        }
    }
    let show = params.iter().map(|p| format!("{p}")).collect::<Vec<_>>().join(", ");
    writeln!(out, "final params=[{show}]").map_err(io)?;
    writeln!(out, "final accuracy={:.4} ({correct}/{})", correct as f64 / data.len() as f64, data.len()).map_err(io)?;
    Ok(EXIT_OK)
}

pub fn classify_spec(out: &mut dyn Write, file: &Path) -> Outcome {
    let spec = ExplainerSpec::parse(&read(file)?).map_err(|e| match e {
        TaxonomyError::Parse { .. } => Failure::new("E_PARSE", EXIT_PARSE, format!("{}: {e}", file.display())),
        other => Failure::new("E_TAXONOMY", EXIT_FAILED, other.to_string()),
    })?;
    let labels = classify(&spec).map_err(|e| Failure::new("E_TAXONOMY", EXIT_FAILED, e.to_string()))?;
    writeln!(out, "{}", format_labels(&labels)).map_err(io)?;
    Ok(EXIT_OK)
}

/// Exhaustively checks the satisfaction condition for one signature morphism.
pub fn institution_check(
    out: &mut dyn Write,
    sig: &Path,
    morph: &Path,
    target: Option<&Path>,
    depth: usize,
) -> Outcome {
    let source = PropSignature::parse_file(&read(sig)?).map_err(institution_failure)?;
    let target = match target {
        Some(p) => Some(PropSignature::parse_file(&read(p)?).map_err(institution_failure)?),
        None => None,
    };
    let rho = SignatureMorphism::parse_file(&read(morph)?, &source, target.as_ref()).map_err(institution_failure)?;
    let report = check_morphism_exhaustive(&rho, depth).map_err(institution_failure)?;
    for f in report.failures.iter().take(10) {
        writeln!(out, "counterexample {f}").map_err(io)?;
    }
    writeln!(
        out,
        "source {} symbols, target {} symbols, depth {depth}: {} models, {} checks, {} failures",
        rho.source().len(),
        rho.target().len(),
        report.models,
        report.checks,
        report.failures.len()
    )
    .map_err(io)?;
    Ok(if report.failures.is_empty() { EXIT_OK } else { EXIT_FAILED })
}

/// Runs law suites and prints one line per law.
pub fn laws(out: &mut dyn Write, suite: Option<Suite>, cfg: &LawConfig) -> Outcome {
    let suites: Vec<Suite> = match suite {
        Some(s) => vec![s],
        None => Suite::ALL.to_vec(),
    };
    let mut failed = 0;
    for s in suites {
        let outcomes = run_suite(s, cfg).map_err(translator_failure)?;
        for o in outcomes {
            let status = if o.passed() { "PASS" } else { "FAIL" };
            let mode = if o.exhaustive { "exhaustive" } else { "sampled" };
            writeln!(out, "{status} {}/{} cases={} {mode} failures={}", o.suite, o.name, o.cases, o.failures.len())
                .map_err(io)?;
            for f in o.failures.iter().take(3) {
                writeln!(out, "  {f}").map_err(io)?;
            }
            if !o.passed() {
                failed += 1;
            }
        }
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILED })
}

/// Prints the XLearn presentation with the chosen agent as a DSL document.
pub fn agent(out: &mut dyn Write, observable: bool) -> Outcome {
    let (name, term) = if observable {
        ("observable_agent", xlearn::observable_agent())
    } else {
        ("abstract_agent", xlearn::abstract_agent())
    };
    let doc = dsl::document_for(xlearn::presentation(), &[(name, term)]);
    write!(out, "{doc}").map_err(io)?;
    Ok(EXIT_OK)
}
