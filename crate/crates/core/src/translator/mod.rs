//! Translators: structure-preserving interpretations of free terms as
//! stream morphisms, plus the built-in learning agents and a training driver.

mod agents;
pub mod logistic;
mod training;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::diagram::{DiagramError, MorTerm, ObExpr, Presentation};
use crate::stream::{
    compose_streams, copy_stream, discard_stream, feedback, identity_stream, random_finite_mor, random_value,
    symmetry_stream, tensor_streams, Carrier, MemoryKind, StreamError, StreamMor, StreamOb, Value,
};

pub use agents::{
    perceptron_translator, relevant_pixels, semantic_xla_translator, step_varying_features, step_varying_translator,
    syntactic_rule, syntactic_xla_translator, with_identity_optimizer, FD_STEP,
};
pub use training::{parse_dataset, run_training, separable_dataset, Dataset, Sample, TraceRecord, TrainingTrace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslatorError {
    #[error("no assignment for `{0}`")]
    MissingAssignment(String),
    #[error("no initial state for feedback object `{0}`")]
    MissingInitialState(String),
    #[error("generator `{name}` assigned {found}, expected {expected}")]
    AssignmentMismatch { name: String, expected: String, found: String },
    #[error("symbol mismatch: {0}")]
    SymbolMismatch(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dataset line {line}: {message}")]
    Dataset { line: usize, message: String },
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// Assignment of stream objects to object generators, stream morphisms to
/// morphism generators, and initial states to objects used as feedback state.
#[derive(Clone, Debug)]
pub struct Translator {
    name: String,
    obs: BTreeMap<String, StreamOb>,
    mors: BTreeMap<String, StreamMor>,
    initial: BTreeMap<String, Value>,
}

impl Translator {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), obs: BTreeMap::new(), mors: BTreeMap::new(), initial: BTreeMap::new() }
    }

    pub fn with_ob(mut self, name: &str, ob: StreamOb) -> Self {
        self.obs.insert(name.to_string(), ob);
        self
    }

    pub fn with_mor(mut self, name: &str, mor: StreamMor) -> Self {
        self.mors.insert(name.to_string(), mor);
        self
    }

    pub fn with_initial_state(mut self, ob: &str, value: Value) -> Self {
        self.initial.insert(ob.to_string(), value);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ob(&self, name: &str) -> Option<&StreamOb> {
        self.obs.get(name)
    }

    pub fn mor(&self, name: &str) -> Option<&StreamMor> {
        self.mors.get(name)
    }

    pub fn initial_state(&self, ob: &str) -> Option<&Value> {
        self.initial.get(ob)
    }

    /// Constant carrier assigned to an object generator.
    pub fn carrier(&self, name: &str) -> Result<Carrier, TranslatorError> {
        self.ob(name)
            .and_then(StreamOb::as_constant)
            .cloned()
            .ok_or_else(|| TranslatorError::MissingAssignment(name.to_string()))
    }

    /// A learning agent without explanations: `E` is the constant unit stream.
    pub fn is_learning_agent(&self) -> bool {
        matches!(self.ob("E").and_then(StreamOb::as_constant), Some(Carrier::Unit))
    }

    pub fn interpret_ob(&self, ob: &ObExpr) -> Result<StreamOb, TranslatorError> {
        ob.atoms().iter().try_fold(StreamOb::unit(), |acc, a| {
            let s = self.ob(a).ok_or_else(|| TranslatorError::MissingAssignment(a.clone()))?;
            Ok(StreamOb::product(&acc, s))
        })
    }

    /// Checks that every generator of `pres` is assigned at the right type.
    pub fn validate(&self, pres: &Presentation) -> Result<(), TranslatorError> {
        for o in pres.obs() {
            self.ob(o).ok_or_else(|| TranslatorError::MissingAssignment(o.clone()))?;
        }
        for (name, (dom, cod)) in pres.mors() {
            self.check_generator(name, dom, cod)?;
        }
        Ok(())
    }

    fn check_generator(&self, name: &str, dom: &ObExpr, cod: &ObExpr) -> Result<&StreamMor, TranslatorError> {
        let m = self.mor(name).ok_or_else(|| TranslatorError::MissingAssignment(name.to_string()))?;
        let (d, c) = (self.interpret_ob(dom)?, self.interpret_ob(cod)?);
        if !m.dom().agrees_with(&d) || !m.cod().agrees_with(&c) {
            return Err(TranslatorError::AssignmentMismatch {
                name: name.to_string(),
                expected: format!("{d:?} -> {c:?}"),
                found: format!("{:?} -> {:?}", m.dom(), m.cod()),
            });
        }
        Ok(m)
    }

    /// Structure-preserving interpretation of a term.
    pub fn interpret(&self, term: &MorTerm) -> Result<StreamMor, TranslatorError> {
        Ok(match term {
            MorTerm::GenMor { name, dom, cod } => self.check_generator(name, dom, cod)?.clone(),
            MorTerm::Id(o) => identity_stream(self.interpret_ob(o)?),
            MorTerm::Copy(o) => copy_stream(self.interpret_ob(o)?),
            MorTerm::Discard(o) => discard_stream(self.interpret_ob(o)?),
            MorTerm::Sym(a, b) => symmetry_stream(self.interpret_ob(a)?, self.interpret_ob(b)?),
            MorTerm::Compose(f, g) => compose_streams(&self.interpret(f)?, &self.interpret(g)?)?,
            MorTerm::Tensor(f, g) => tensor_streams(&self.interpret(f)?, &self.interpret(g)?),
            MorTerm::Feedback { state, inner } => {
                let carrier = self
                    .interpret_ob(state)?
                    .as_constant()
                    .cloned()
                    .ok_or_else(|| StreamError::StateShape(format!("state {state} is not constant")))?;
                let init = state.atoms().iter().try_fold(Value::Unit, |acc, a| {
                    let v = self.initial_state(a).ok_or_else(|| TranslatorError::MissingInitialState(a.clone()))?;
                    Ok::<_, TranslatorError>(Value::pair(acc, v.clone()))
                })?;
                feedback(&self.interpret(inner)?, carrier, init)?
            }
        })
    }

    /// Evaluates `eta` for one query at step `step`. Valid for learners whose
    /// step reads only the newest input, which all built-in agents do.
    pub fn predict(&self, step: usize, x: &[f64], params: &[f64]) -> Result<Value, TranslatorError> {
        let eta = self
            .mor(crate::xlearn::ETA)
            .ok_or_else(|| TranslatorError::MissingAssignment(crate::xlearn::ETA.to_string()))?;
        let q = Value::pair(Value::Real(x.to_vec()), Value::Real(params.to_vec()));
        Ok(eta.step(step, &vec![q; step + 1])?)
    }
}

/// Free-function form of [`Translator::interpret`].
pub fn interpret(term: &MorTerm, t: &Translator) -> Result<StreamMor, TranslatorError> {
    t.interpret(term)
}

/// Random finite carriers of size `1..=max_size` for every object, random
/// tables for every generator and random initial states.
pub fn random_finite_translator(pres: &Presentation, seed: u64, max_size: usize) -> Translator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Translator::new(format!("random-{seed}"));
    for o in pres.obs() {
        let c = Carrier::finite(rng.gen_range(1..=max_size));
        let init = random_value(&mut rng, &c).expect("finite carrier");
        t = t.with_ob(o, StreamOb::Constant(c)).with_initial_state(o, init);
    }
    let mors: Vec<(String, ObExpr, ObExpr)> =
        pres.mors().map(|(n, (d, c))| (n.clone(), d.clone(), c.clone())).collect();
    for (name, dom, cod) in mors {
        let d = t.interpret_ob(&dom).expect("objects assigned").as_constant().cloned().expect("constant");
        let c = t.interpret_ob(&cod).expect("objects assigned").as_constant().cloned().expect("constant");
        let kind = MemoryKind::random(&mut rng);
        let m = random_finite_mor(name.clone(), rng.gen(), d, c, kind).expect("finite carriers");
        t = t.with_mor(&name, m);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::{check_equivalent, prefix_eval, EquivOptions};
    use crate::xlearn;

    #[test]
    fn identity_interprets_to_identity() {
        let t = random_finite_translator(xlearn::presentation(), 1, 3);
        let id = t.interpret(&MorTerm::id(ObExpr::gen("X"))).unwrap();
        let reference = identity_stream(t.ob("X").unwrap().clone());
        assert!(check_equivalent(&id, &reference, EquivOptions::default()).unwrap().holds());
    }

    #[test]
    fn random_translators_validate() {
        for seed in 0..10 {
            random_finite_translator(xlearn::presentation(), seed, 3).validate(xlearn::presentation()).unwrap();
        }
    }

    #[test]
    fn missing_assignments_are_reported() {
        let t = Translator::new("empty");
        assert_eq!(t.interpret(&xlearn::eta()).unwrap_err(), TranslatorError::MissingAssignment("eta".into()));
        let t = random_finite_translator(xlearn::presentation(), 4, 2);
        let mut no_init = t.clone();
        no_init.initial.clear();
        assert_eq!(
            no_init.interpret(&xlearn::abstract_agent()).unwrap_err(),
            TranslatorError::MissingInitialState("P".into())
        );
    }

    #[test]
    fn observable_agent_with_outputs_discarded_is_abstract_agent() {
        for seed in 0..20 {
            let t = random_finite_translator(xlearn::presentation(), seed, 3);
            let observed =
                MorTerm::compose(xlearn::observable_agent(), MorTerm::Discard(ObExpr::from_atoms(&["Y", "E"])));
            let a = t.interpret(&observed).unwrap();
            let b = t.interpret(&xlearn::abstract_agent()).unwrap();
            assert!(check_equivalent(&a, &b, EquivOptions::default()).unwrap().holds());
        }
    }

    #[test]
    fn abstract_agent_runs_with_the_perceptron() {
        let t = perceptron_translator();
        let agent = t.interpret(&xlearn::abstract_agent()).unwrap();
        let data = separable_dataset(3, 10, 2);
        let inputs: Vec<Value> = data
            .samples
            .iter()
            .map(|s| Value::pair(Value::Real(vec![s.label, 0.0, 0.0]), Value::Real(s.input.clone())))
            .collect();
        let out = prefix_eval(&agent, &inputs).unwrap();
        assert_eq!(out, vec![Value::Unit; 10]);
    }
}
