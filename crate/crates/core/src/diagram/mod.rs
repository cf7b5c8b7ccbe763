//! Term algebra of free feedback Cartesian monoidal categories.
//!
//! Tensor is strict: object expressions are compared through their flat
//! generator lists. Feedback-free terms are compared as string diagrams
//! (open hypergraphs) up to isomorphism after quotienting by the Cartesian
//! copy/discard laws.

mod hypergraph;
mod iso;
mod normalize;
mod ob;
mod render;
mod term;

use thiserror::Error;

pub use hypergraph::{BoxLabel, Edge, HyperBox, NodeGraph, OpenHypergraph, Port, Wire};
pub use normalize::normalize;
pub use ob::ObExpr;
pub use render::render_dot;
pub use term::{typecheck, MorTerm, Presentation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("unknown morphism generator `{0}`")]
    UnknownGenerator(String),
    #[error("unknown object generator `{0}`")]
    UnknownObject(String),
    #[error("generator `{0}` declared twice")]
    DuplicateGenerator(String),
    #[error("generator `{name}` used at type {found}, declared {declared}")]
    GeneratorTypeMismatch { name: String, declared: String, found: String },
    #[error("composition mismatch at {path}: expected {expected}, found {found}")]
    CompositionTypeMismatch { path: String, expected: ObExpr, found: ObExpr },
    #[error("feedback at {path}: state {state} is not a suffix of both {dom} and {cod}")]
    FeedbackShapeError { path: String, state: ObExpr, dom: ObExpr, cod: ObExpr },
    #[error("terms containing feedback have no hypergraph encoding")]
    FeedbackNotSupported,
    #[error("terms have different types: {left} vs {right}")]
    TypeMismatch { left: String, right: String },
}

/// Encodes a feedback-free term as an open hypergraph.
pub fn to_hypergraph(term: &MorTerm) -> Result<OpenHypergraph, DiagramError> {
    OpenHypergraph::from_term(term)
}

/// Equality of feedback-free terms in the free Cartesian category.
pub fn diagram_eq(t1: &MorTerm, t2: &MorTerm) -> Result<bool, DiagramError> {
    let (d1, c1) = t1.infer_type()?;
    let (d2, c2) = t2.infer_type()?;
    if !d1.type_eq(&d2) || !c1.type_eq(&c2) {
        return Err(DiagramError::TypeMismatch { left: format!("{d1} -> {c1}"), right: format!("{d2} -> {c2}") });
    }
    let g1 = to_hypergraph(t1)?.node_graph().cartesian_normal_form();
    let g2 = to_hypergraph(t2)?.node_graph().cartesian_normal_form();
    Ok(g1.is_isomorphic(&g2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ob(n: &str) -> ObExpr {
        ObExpr::gen(n)
    }
    fn f() -> MorTerm {
        MorTerm::gen("f", ob("X"), ob("Y"))
    }
    fn id(n: &str) -> MorTerm {
        MorTerm::id(ob(n))
    }

    #[test]
    fn right_unit() {
        assert!(diagram_eq(&MorTerm::compose(f(), id("Y")), &f()).unwrap());
    }

    #[test]
    fn distinct_generators_differ() {
        let g = MorTerm::gen("g", ob("X"), ob("Y"));
        assert!(!diagram_eq(&f(), &g).unwrap());
    }

    #[test]
    fn coassociativity() {
        let x = ob("X");
        let lhs = MorTerm::compose(MorTerm::Copy(x.clone()), MorTerm::tensor(id("X"), MorTerm::Copy(x.clone())));
        let rhs = MorTerm::compose(MorTerm::Copy(x.clone()), MorTerm::tensor(MorTerm::Copy(x), id("X")));
        assert!(diagram_eq(&lhs, &rhs).unwrap());
    }

    #[test]
    fn counit_and_cocommutativity() {
        let x = ob("X");
        let counit = MorTerm::compose(MorTerm::Copy(x.clone()), MorTerm::tensor(id("X"), MorTerm::Discard(x.clone())));
        assert!(diagram_eq(&counit, &id("X")).unwrap());
        let cocomm = MorTerm::compose(MorTerm::Copy(x.clone()), MorTerm::Sym(x.clone(), x.clone()));
        assert!(diagram_eq(&cocomm, &MorTerm::Copy(x)).unwrap());
    }

    #[test]
    fn naturality_of_copy_and_discard() {
        let lhs = MorTerm::compose(f(), MorTerm::Copy(ob("Y")));
        let rhs = MorTerm::compose(MorTerm::Copy(ob("X")), MorTerm::tensor(f(), f()));
        assert!(diagram_eq(&lhs, &rhs).unwrap());
        let lhs = MorTerm::compose(f(), MorTerm::Discard(ob("Y")));
        assert!(diagram_eq(&lhs, &MorTerm::Discard(ob("X"))).unwrap());
    }

    #[test]
    fn symmetry_naturality() {
        let g = MorTerm::gen("g", ob("A"), ob("B"));
        let lhs = MorTerm::compose(MorTerm::tensor(f(), g.clone()), MorTerm::Sym(ob("Y"), ob("B")));
        let rhs = MorTerm::compose(MorTerm::Sym(ob("X"), ob("A")), MorTerm::tensor(g, f()));
        assert!(diagram_eq(&lhs, &rhs).unwrap());
    }

    #[test]
    fn copy_is_not_pairing_with_swap_of_distinct_generators() {
        // copy then (f * g) differs from copy then (g * f) when f != g
        let g = MorTerm::gen("g", ob("X"), ob("Y"));
        let lhs = MorTerm::compose(MorTerm::Copy(ob("X")), MorTerm::tensor(f(), g.clone()));
        let rhs = MorTerm::compose(MorTerm::Copy(ob("X")), MorTerm::tensor(g, f()));
        assert!(!diagram_eq(&lhs, &rhs).unwrap());
    }

    #[test]
    fn type_mismatch_and_feedback_errors() {
        assert!(matches!(diagram_eq(&f(), &id("X")), Err(DiagramError::TypeMismatch { .. })));
        let k = MorTerm::gen("k", ObExpr::from_atoms(&["X", "S"]), ObExpr::from_atoms(&["Y", "S"]));
        let fb = MorTerm::feedback(ob("S"), k);
        assert_eq!(diagram_eq(&fb, &f()).unwrap_err(), DiagramError::FeedbackNotSupported);
    }
}
