//! Typed string diagrams for learning agents, their stream semantics, and
//! institution-based explanations.

pub mod diagram;
pub mod institution;
pub mod laws;
pub mod stream;
pub mod taxonomy;
pub mod translator;
pub mod xlearn;
