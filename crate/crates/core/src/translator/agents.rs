//! Built-in agent translators around a logistic learner.
//!
//! `Y` carries the prediction in coordinate 0 followed by the feature vector
//! the learner used, so the optimizer `Y * Y * P -> P` can compute the
//! gradient without seeing `X`. Labels arrive in coordinate 0 of the first
//! `Y` wire; their remaining coordinates are ignored.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::logistic::{bce_gradient_at, gd_step, predict};
use super::{Translator, TranslatorError};
use crate::institution::{PropSignature, SaliencyModel, SaliencySignature, Sentence};
use crate::stream::{
    discard_stream, identity_stream, tensor_streams, Carrier, StreamError, StreamMor, StreamOb, Value,
};
use crate::xlearn::{ETA, NABLA};

/// Central-difference step for saliency sensitivities.
pub const FD_STEP: f64 = 1e-4;

/// Sensitivities must exceed the mean by this relative margin, so that
/// rounding noise between equal sensitivities selects nothing.
const SALIENCY_MARGIN: f64 = 1e-6;

/// Phase length of the step-varying learner.
const PHASE: usize = 50;

type FeatureFn = Arc<dyn Fn(usize, &[f64]) -> Vec<f64> + Send + Sync>;
type ExplainFn = Arc<dyn Fn(&[f64], &[f64]) -> Result<Value, StreamError> + Send + Sync>;

struct Learner {
    name: String,
    input_dim: usize,
    feature_dim: usize,
    features: FeatureFn,
    explanation: Carrier,
    /// (params, input) to explanation payload
    explain: ExplainFn,
}

fn reals(v: &Value, dims: &[usize]) -> Result<Vec<Vec<f64>>, StreamError> {
    let parts = v.clone().factors();
    if parts.len() != dims.len() {
        return Err(StreamError::Primitive(format!("expected {} real vectors, got {v}", dims.len())));
    }
    parts
        .into_iter()
        .zip(dims)
        .map(|(p, &d)| match p {
            Value::Real(x) if x.len() == d => Ok(x),
            other => Err(StreamError::Primitive(format!("expected a vector of length {d}, got {other}"))),
        })
        .collect()
}

fn real(d: usize) -> StreamOb {
    StreamOb::Constant(Carrier::RealVec(d))
}

fn build(l: Learner) -> Translator {
    let (xd, k) = (l.input_dim, l.feature_dim);
    let (yd, pd) = (k + 1, k + 1);
    let x_ob = real(xd);
    let y_ob = real(yd);
    let p_ob = real(pd);
    let e_ob = StreamOb::Constant(l.explanation.clone());

    let features = l.features.clone();
    let explain = l.explain.clone();
    let eta =
        StreamMor::pointwise(ETA, StreamOb::product(&x_ob, &p_ob), StreamOb::product(&y_ob, &e_ob), move |n, v| {
            let xp = reals(v, &[xd, pd])?;
            let (x, p) = (&xp[0], &xp[1]);
            let mut phi = features(n, x);
            phi.resize(k, 0.0);
            let mut y = Vec::with_capacity(yd);
            y.push(predict(p, &phi));
            y.extend_from_slice(&phi);
            Ok(Value::pair(Value::Real(y), explain(p, x)?))
        });
    let nabla = StreamMor::pointwise(
        NABLA,
        StreamOb::product(&StreamOb::product(&y_ob, &y_ob), &p_ob),
        p_ob.clone(),
        move |_, v| {
            let lyp = reals(v, &[yd, yd, pd])?;
            let (label, pred, p) = (lyp[0][0], &lyp[1], &lyp[2]);
            let grad = bce_gradient_at(pred[0], &pred[1..], label);
            Ok(Value::Real(gd_step(p, &grad)))
        },
    );
    Translator::new(l.name)
        .with_ob("X", x_ob)
        .with_ob("Y", y_ob)
        .with_ob("P", p_ob)
        .with_ob("E", e_ob)
        .with_mor(ETA, eta)
        .with_mor(NABLA, nabla)
        .with_initial_state("P", Value::Real(vec![0.0; pd]))
}

fn no_explanation() -> ExplainFn {
    Arc::new(|_, _| Ok(Value::Unit))
}

/// Logistic learner on `R^2` trained by gradient descent on cross-entropy,
/// without explanations.
pub fn perceptron_translator() -> Translator {
    build(Learner {
        name: "perceptron".into(),
        input_dim: 2,
        feature_dim: 2,
        features: Arc::new(|_, x| x.to_vec()),
        explanation: Carrier::Unit,
        explain: no_explanation(),
    })
}

/// Features at step `i`: `(x1, x2)` during the first phase, then
/// `(x1, x2, x1^2, x1 x2, x2^2)`. Always padded to length 5.
pub fn step_varying_features(i: usize, x: &[f64]) -> Vec<f64> {
    let (a, b) = (x[0], x[1]);
    if i / PHASE == 0 {
        vec![a, b, 0.0, 0.0, 0.0]
    } else {
        vec![a, b, a * a, a * b, b * b]
    }
}

/// A learner whose map changes with the step index: linear features first,
/// quadratic ones from step 50 on.
pub fn step_varying_translator() -> Translator {
    build(Learner {
        name: "step-varying".into(),
        input_dim: 2,
        feature_dim: 5,
        features: Arc::new(step_varying_features),
        explanation: Carrier::Unit,
        explain: no_explanation(),
    })
}

/// `(AND of feature literals) -> output`. A feature enters when its weight
/// magnitude exceeds half the largest magnitude, negated if the weight is
/// negative. The output symbol is the last one of `sig`.
pub fn syntactic_rule(sig: &PropSignature, params: &[f64]) -> Result<Sentence, TranslatorError> {
    let (output, features) =
        sig.symbols().split_last().ok_or_else(|| TranslatorError::SymbolMismatch("empty signature".into()))?;
    if params.len() < features.len() {
        return Err(TranslatorError::DimensionMismatch { expected: features.len(), found: params.len() });
    }
    let weights = &params[..features.len()];
    let theta = weights.iter().fold(0.0f64, |m, w| m.max(w.abs())) / 2.0;
    let literals = features.iter().zip(weights).filter(|(_, w)| w.abs() > theta).map(|(s, w)| {
        if *w < 0.0 {
            Sentence::not(Sentence::var(s.clone()))
        } else {
            Sentence::var(s.clone())
        }
    });
    Ok(Sentence::implies(Sentence::conjunction(literals), Sentence::var(output.clone())))
}

/// Learner over one input per feature symbol of `sig`, emitting its current
/// rule as explanation.
pub fn syntactic_xla_translator(sig: &PropSignature) -> Result<Translator, TranslatorError> {
    if sig.len() < 2 {
        return Err(TranslatorError::SymbolMismatch("need at least one feature symbol and one output symbol".into()));
    }
    let k = sig.len() - 1;
    let rule_sig = sig.clone();
    Ok(build(Learner {
        name: "syntactic-xla".into(),
        input_dim: k,
        feature_dim: k,
        features: Arc::new(|_, x| x.to_vec()),
        explanation: Carrier::Sentences(sig.clone()),
        explain: Arc::new(move |p, _| {
            syntactic_rule(&rule_sig, p).map(Value::Sentence).map_err(|e| StreamError::Primitive(e.to_string()))
        }),
    }))
}

/// Input coordinates whose central-difference sensitivity of the predicted
/// probability is above the mean sensitivity.
pub fn relevant_pixels(params: &[f64], x: &[f64]) -> BTreeSet<usize> {
    let sens: Vec<f64> = (0..x.len())
        .map(|j| {
            let mut up = x.to_vec();
            let mut down = x.to_vec();
            up[j] += FD_STEP;
            down[j] -= FD_STEP;
            ((predict(params, &up) - predict(params, &down)) / (2.0 * FD_STEP)).abs()
        })
        .collect();
    let mean = sens.iter().sum::<f64>() / sens.len().max(1) as f64;
    let cutoff = mean * (1.0 + SALIENCY_MARGIN);
    sens.iter().enumerate().filter(|(_, s)| **s > cutoff).map(|(j, _)| j).collect()
}

/// Learner over one input per pixel of `sig`, emitting its relevant-pixel set.
pub fn semantic_xla_translator(sig: &SaliencySignature) -> Result<Translator, TranslatorError> {
    if sig.pixels == 0 {
        return Err(TranslatorError::DimensionMismatch { expected: 1, found: 0 });
    }
    let s = sig.clone();
    Ok(build(Learner {
        name: "semantic-xla".into(),
        input_dim: sig.pixels,
        feature_dim: sig.pixels,
        features: Arc::new(|_, x| x.to_vec()),
        explanation: Carrier::SaliencyModels(sig.clone()),
        explain: Arc::new(move |p, x| {
            SaliencyModel::new(s.clone(), relevant_pixels(p, x))
                .map(Value::Saliency)
                .map_err(|e| StreamError::Primitive(e.to_string()))
        }),
    }))
}

/// Replaces the optimizer by `discard_Y * discard_Y * id_P`.
pub fn with_identity_optimizer(t: &Translator) -> Result<Translator, TranslatorError> {
    let y = t.ob("Y").ok_or_else(|| TranslatorError::MissingAssignment("Y".into()))?.clone();
    let p = t.ob("P").ok_or_else(|| TranslatorError::MissingAssignment("P".into()))?.clone();
    let frozen = tensor_streams(&tensor_streams(&discard_stream(y.clone()), &discard_stream(y)), &identity_stream(p));
    Ok(t.clone().with_mor(NABLA, frozen))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::institution::{saliency_satisfies, SaliencySentence};

    fn flies_sig() -> PropSignature {
        PropSignature::new(["x_flies", "x_animal", "x_plane"]).unwrap()
    }

    fn eta_at(t: &Translator, step: usize, x: &[f64], p: &[f64]) -> Value {
        t.predict(step, x, p).unwrap()
    }

    #[test]
    fn zero_parameters_predict_one_half() {
        let t = perceptron_translator();
        assert!(t.is_learning_agent());
        let y = eta_at(&t, 0, &[0.3, -0.8], &[0.0; 3]);
        assert_eq!(y.as_real().unwrap()[0], 0.5);
        t.validate(crate::xlearn::presentation()).unwrap();
    }

    #[test]
    fn example_rule_from_weights() {
        let sig = flies_sig();
        let rule = syntactic_rule(&sig, &[2.0, -2.0, 0.0]).unwrap();
        assert_eq!(rule.to_string(), "x_flies & ~x_animal -> x_plane");
        assert_eq!(syntactic_rule(&sig, &[0.0; 3]).unwrap().to_string(), "T -> x_plane");
        let weak = syntactic_rule(&sig, &[2.0, 0.5, 0.0]).unwrap();
        assert_eq!(weak.to_string(), "x_flies -> x_plane");
        assert!(syntactic_xla_translator(&PropSignature::new(["out"]).unwrap()).is_err());
    }

    #[test]
    fn syntactic_agent_emits_well_formed_sentences() {
        let sig = flies_sig();
        let t = syntactic_xla_translator(&sig).unwrap();
        t.validate(crate::xlearn::presentation()).unwrap();
        let out = eta_at(&t, 0, &[1.0, 0.0], &[2.0, -2.0, 0.0]);
        let (_, e) = out.split_at(1);
        let Value::Sentence(s) = e else { panic!("no sentence") };
        assert_eq!(Sentence::parse(&s.to_string()).unwrap(), s);
        assert!(s.is_well_formed_over(&sig));
    }

    #[test]
    fn step_varying_phases() {
        let t = step_varying_translator();
        let p = [0.3, -0.2, 0.5, 0.7, -0.4, 0.1];
        let x = [0.6, -0.9];
        assert_eq!(eta_at(&t, 0, &x, &p), eta_at(&t, 10, &x, &p));
        assert_ne!(eta_at(&t, 0, &x, &p), eta_at(&t, 60, &x, &p));
        t.validate(crate::xlearn::presentation()).unwrap();
    }

    #[test]
    fn ignored_pixel_is_never_relevant() {
        let p = [1.5, -0.7, 0.0, 0.2];
        for x in [[0.1, 0.2, 0.9], [-1.0, 0.5, -0.3], [0.0, 0.0, 0.0]] {
            assert!(!relevant_pixels(&p, &x).contains(&2));
        }
    }

    #[test]
    fn uniform_weights_select_independently_of_input() {
        let p = [0.8, 0.8, 0.8, -0.1];
        let first = relevant_pixels(&p, &[0.1, -0.4, 0.9]);
        for x in [[0.7, 0.7, -0.2], [-1.0, 0.0, 0.3], [0.05, 0.5, -0.95]] {
            assert_eq!(relevant_pixels(&p, &x), first);
        }
    }

    #[test]
    fn semantic_agent_model_satisfies_its_lift() {
        let sig = SaliencySignature::new("S", 3);
        let t = semantic_xla_translator(&sig).unwrap();
        t.validate(crate::xlearn::presentation()).unwrap();
        let out = eta_at(&t, 0, &[0.4, -0.2, 0.1], &[2.0, 0.1, -1.9, 0.0]);
        let (_, e) = out.split_at(1);
        let Value::Saliency(m) = e else { panic!("no saliency model") };
        assert_eq!(m.pixels, BTreeSet::from([0, 2]));
        let lifted: SaliencySentence = m.lift();
        assert!(saliency_satisfies(&m, &lifted).unwrap());
    }
}
