//! Cartesian streams over concrete carriers.
//!
//! A stream morphism `X -> Y` is a family `f_n : X_n x ... x X_0 -> Y_n`.
//! Composition feeds the whole output prefix of the first factor to the
//! second; feedback delays the state wire by one step.

mod axioms;
mod equiv;
mod mor;
mod random;
mod session;
mod value;

use thiserror::Error;

pub use axioms::{check_feedback_axioms, Axiom, AxiomResult, FeedbackReport};
pub use equiv::{check_equivalent, EquivOptions, EquivOutcome};
pub use mor::{
    compose_streams, copy_stream, discard_stream, feedback, identity_stream, symmetry_stream, tensor_streams, PointFn,
    StepFn, StreamMor, StreamOb,
};
pub use random::{random_finite_mor, random_value, MemoryKind};
pub use session::{prefix_eval, prefix_eval_naive, EvalSession};
pub use value::{Carrier, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StreamError {
    #[error("carrier mismatch: expected {expected}, found {found}")]
    CarrierMismatch { expected: String, found: String },
    #[error("state shape: {0}")]
    StateShape(String),
    #[error("step {step} needs {} history entries, got {len}", step + 1)]
    HistoryLength { step: usize, len: usize },
    #[error("carrier {0} is not finite")]
    NotFinite(String),
    #[error("{0}")]
    Primitive(String),
}
