//! Institutions for explanations: propositional logic and the saliency-map
//! fragment, with sentence translation, model reduct and satisfaction.

mod prop;
mod saliency;

use thiserror::Error;

use crate::stream::Value;

pub use prop::{
    check_morphism_exhaustive, check_satisfaction_condition, mod_reduct, satisfies, sen_translate, PropSignature,
    SatisfactionReport, Sentence, SignatureMorphism, Valuation,
};
pub use saliency::{saliency_satisfies, SaliencyModel, SaliencySentence, SaliencySignature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstitutionError {
    #[error("symbol `{0}` is not in the source signature")]
    SymbolNotInSource(String),
    #[error("symbol `{0}` is not in the target signature")]
    SymbolNotInTarget(String),
    #[error("morphism is not total: `{0}` unmapped")]
    NonTotalMorphism(String),
    #[error("signature mismatch")]
    SignatureMismatch,
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("invalid symbol `{0}`")]
    InvalidSymbol(String),
    #[error("pixel {pixel} out of range for {pixels} pixels")]
    PixelOutOfRange { pixel: usize, pixels: usize },
    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("payload is not an explanation: {0}")]
    UnrecognizedPayload(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExplanationKind {
    Syntactic,
    Semantic,
}

/// Sentences (or tuples of them) are syntactic explanations, models semantic ones.
pub fn classify_explanation(payload: &Value) -> Result<ExplanationKind, InstitutionError> {
    match payload {
        Value::Sentence(_) => Ok(ExplanationKind::Syntactic),
        Value::Valuation(_) | Value::Saliency(_) => Ok(ExplanationKind::Semantic),
        Value::Tuple(vs) if vs.iter().all(|v| matches!(v, Value::Sentence(_))) => Ok(ExplanationKind::Syntactic),
        other => Err(InstitutionError::UnrecognizedPayload(other.to_string())),
    }
}
