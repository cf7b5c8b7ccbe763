//! Classification of explainer shapes by which wires feed them.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Input,
    Output,
    Params,
    /// gradient of a loss with respect to the parameters
    GradParams,
    ExternalModelOutput,
    Explanation,
}

impl Role {
    pub fn parse(s: &str) -> Option<Role> {
        Some(match s.to_ascii_lowercase().as_str() {
            "input" => Role::Input,
            "output" => Role::Output,
            "params" => Role::Params,
            "gradparams" | "grad-params" => Role::GradParams,
            "external-model-output" | "externalmodeloutput" | "emo" => Role::ExternalModelOutput,
            "explanation" => Role::Explanation,
            _ => return None,
        })
    }
}

/// What the explanation wire carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Payload {
    Unit,
    Sentences,
    Models,
}

impl Payload {
    fn of_object(ob: &str) -> Option<Payload> {
        Some(match ob {
            "I" | "Unit" | "1" => Payload::Unit,
            "Sen" | "Sentences" => Payload::Sentences,
            "Mod" | "Models" | "SaliencyModels" => Payload::Models,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub role: Role,
    pub ob: String,
}

impl Factor {
    pub fn new(role: Role, ob: &str) -> Self {
        Self { role, ob: ob.to_string() }
    }
}

/// Surrounding system the explainer is attached to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Context {
    /// an explained model `input * params -> output`
    Model { input: String, params: String, output: String },
    /// a first agent `input * params -> concepts` whose output feeds the explainer
    Pipeline { input: String, params: String, concepts: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplainerSpec {
    pub dom: Vec<Factor>,
    pub cod: Vec<Factor>,
    pub context: Option<Context>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaxonomyLabel {
    PostHoc,
    Intrinsic,
    ModelAgnostic,
    ModelSpecific,
    ForwardBased,
    BackwardBased,
    ConceptBottleneck,
    LearningAgentNoExplanation,
    SyntacticXLA,
    SemanticXLA,
}

impl fmt::Display for TaxonomyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

const EXCLUSIVE: [(TaxonomyLabel, TaxonomyLabel); 3] = [
    (TaxonomyLabel::PostHoc, TaxonomyLabel::Intrinsic),
    (TaxonomyLabel::ModelAgnostic, TaxonomyLabel::ModelSpecific),
    (TaxonomyLabel::ForwardBased, TaxonomyLabel::BackwardBased),
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaxonomyError {
    #[error("labels {0} and {1} both match")]
    AmbiguousRoles(TaxonomyLabel, TaxonomyLabel),
    #[error("role {0:?} appears twice in the domain")]
    DuplicateRole(Role),
    #[error("no explanation factor in the codomain")]
    MissingExplanation,
    #[error("unknown explanation payload `{0}`")]
    UnknownPayload(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl ExplainerSpec {
    fn payload(&self) -> Result<Payload, TaxonomyError> {
        let e = self.cod.iter().find(|f| f.role == Role::Explanation).ok_or(TaxonomyError::MissingExplanation)?;
        Payload::of_object(&e.ob).ok_or_else(|| TaxonomyError::UnknownPayload(e.ob.clone()))
    }

    fn validate(&self) -> Result<(), TaxonomyError> {
        let mut seen = BTreeSet::new();
        for f in &self.dom {
            if !seen.insert(f.role) {
                return Err(TaxonomyError::DuplicateRole(f.role));
            }
        }
        self.payload().map(|_| ())
    }

    /// Lines `dom <role> <ob>`, `cod <role> <ob>`, `context model X P Y` or
    /// `context pipeline X P C`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, TaxonomyError> {
        let mut spec = ExplainerSpec { dom: Vec::new(), cod: Vec::new(), context: None };
        for (i, line) in text.lines().enumerate() {
            let err = |message: String| TaxonomyError::Parse { line: i + 1, message };
            let words: Vec<&str> = line.split('#').next().unwrap_or("").split_whitespace().collect();
            match words.as_slice() {
                [] => {}
                [side @ ("dom" | "cod"), role, ob] => {
                    let role = Role::parse(role).ok_or_else(|| err(format!("unknown role `{role}`")))?;
                    let factor = Factor::new(role, ob);
                    if *side == "dom" {
                        spec.dom.push(factor);
                    } else {
                        spec.cod.push(factor);
                    }
                }
                ["context", "model", x, p, y] => {
                    spec.context =
                        Some(Context::Model { input: x.to_string(), params: p.to_string(), output: y.to_string() });
                }
                ["context", "pipeline", x, p, c] => {
                    spec.context = Some(Context::Pipeline {
                        input: x.to_string(),
                        params: p.to_string(),
                        concepts: c.to_string(),
                    });
                }
                _ => return Err(err(format!("cannot read `{}`", line.trim()))),
            }
        }
        Ok(spec)
    }
}

/// Label set of an explainer shape.
pub fn classify(spec: &ExplainerSpec) -> Result<BTreeSet<TaxonomyLabel>, TaxonomyError> {
    use TaxonomyLabel::*;
    spec.validate()?;
    let roles: BTreeSet<Role> = spec.dom.iter().map(|f| f.role).collect();
    let has = |r: Role| roles.contains(&r);
    let explained_model = matches!(spec.context, Some(Context::Model { .. }));
    let mut labels = BTreeSet::new();

    match spec.payload()? {
        Payload::Unit => labels.insert(LearningAgentNoExplanation),
        Payload::Sentences => labels.insert(SyntacticXLA),
        Payload::Models => labels.insert(SemanticXLA),
    };

    // the explainer reads concepts predicted by a first agent
    if let Some(Context::Pipeline { concepts, .. }) = &spec.context {
        let reads_concepts = spec.dom.iter().any(|f| f.role == Role::Input && &f.ob == concepts);
        if reads_concepts {
            labels.remove(&LearningAgentNoExplanation);
            labels.insert(ConceptBottleneck);
            return Ok(labels);
        }
    }

    let emo = has(Role::ExternalModelOutput);
    let grad = has(Role::GradParams);
    if emo || grad || explained_model {
        labels.insert(PostHoc);
    }
    if has(Role::Input) && has(Role::Params) && !emo && !grad && !explained_model {
        labels.insert(Intrinsic);
    }
    let input_and_params: BTreeSet<Role> = [Role::Input, Role::Params].into();
    if explained_model && roles == input_and_params {
        labels.insert(ModelAgnostic);
    }
    if emo && has(Role::Input) && (has(Role::Params) || grad) {
        labels.insert(ModelSpecific);
    }
    if has(Role::Params) && roles.is_subset(&input_and_params) {
        labels.insert(ForwardBased);
    }
    if grad {
        labels.insert(BackwardBased);
    }

    for (a, b) in EXCLUSIVE {
        if labels.contains(&a) && labels.contains(&b) {
            return Err(TaxonomyError::AmbiguousRoles(a, b));
        }
    }
    Ok(labels)
}

pub struct CatalogEntry {
    pub name: &'static str,
    pub spec: ExplainerSpec,
    pub expected: BTreeSet<TaxonomyLabel>,
}

fn spec(dom: &[(Role, &str)], explanation: &str, context: Option<Context>) -> ExplainerSpec {
    ExplainerSpec {
        dom: dom.iter().map(|(r, o)| Factor::new(*r, o)).collect(),
        cod: vec![Factor::new(Role::Output, "Y'"), Factor::new(Role::Explanation, explanation)],
        context,
    }
}

fn model_context() -> Option<Context> {
    Some(Context::Model { input: "X".into(), params: "P".into(), output: "Y".into() })
}

/// Reference encodings of common explainer families with their expected labels.
pub fn canonical_catalog() -> Vec<CatalogEntry> {
    use Role::*;
    use TaxonomyLabel::*;
    let entry = |name, spec, expected: &[TaxonomyLabel]| CatalogEntry {
        name,
        spec,
        expected: expected.iter().copied().collect(),
    };
    vec![
        entry(
            "intrinsic-rule-model",
            spec(&[(Input, "X"), (Params, "P")], "Sentences", None),
            &[Intrinsic, ForwardBased, SyntacticXLA],
        ),
        entry(
            "lime-surrogate",
            spec(&[(Input, "X"), (Params, "P")], "Models", model_context()),
            &[PostHoc, ModelAgnostic, ForwardBased, SemanticXLA],
        ),
        entry(
            "saliency-map",
            spec(&[(ExternalModelOutput, "Y"), (Input, "X"), (GradParams, "hP")], "SaliencyModels", None),
            &[PostHoc, ModelSpecific, BackwardBased, SemanticXLA],
        ),
        entry(
            "tcav-concept-probe",
            spec(&[(Input, "X"), (GradParams, "hP")], "Models", model_context()),
            &[PostHoc, BackwardBased, SemanticXLA],
        ),
        entry(
            "concept-bottleneck",
            spec(
                &[(Input, "C"), (Params, "P2")],
                "I",
                Some(Context::Pipeline { input: "X".into(), params: "P".into(), concepts: "C".into() }),
            ),
            &[ConceptBottleneck],
        ),
        entry("plain-LA", spec(&[(Output, "Y"), (Input, "X")], "I", None), &[LearningAgentNoExplanation]),
        entry("syntactic-rule-xla", spec(&[(Output, "Y"), (Input, "X")], "Sentences", None), &[SyntacticXLA]),
        entry("semantic-saliency-xla", spec(&[(Output, "Y"), (Input, "X")], "Models", None), &[SemanticXLA]),
    ]
}

pub fn format_labels(labels: &BTreeSet<TaxonomyLabel>) -> String {
    labels.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}
