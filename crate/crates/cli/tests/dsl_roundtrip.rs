use catxai::dsl::{document_for, parse, DslErrorKind};
use catxai_core::diagram::typecheck;
use catxai_core::laws::sample::TermSampler;
use catxai_core::xlearn;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn small_document_counts() {
    let doc = parse("ob X; mor f : X -> X; term t = f ; f;").unwrap();
    assert_eq!(doc.count(), (1, 1, 1));
}

#[test]
fn shipped_agent_file_parses_and_typechecks() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/xlearn.cat")).unwrap();
    let doc = parse(&text).unwrap();
    let pres = doc.presentation();
    assert_eq!(&pres, xlearn::presentation());
    for (name, t) in doc.terms() {
        typecheck(t, &pres).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    assert_eq!(doc.translator(), Some("perceptron"));
}

#[test]
fn duplicates_are_rejected() {
    let err = parse("ob X; ob X;").unwrap_err();
    assert_eq!(err.kind, DslErrorKind::Duplicate);
    let err = parse("ob X; mor f : X -> X; term f = f;").unwrap_err();
    assert_eq!(err.kind, DslErrorKind::Duplicate);
}

#[test]
fn tensor_binds_tighter_than_composition() {
    let doc = parse("ob A; mor f : A -> A; mor g : A -> A; term t = f * g ; g * f;").unwrap();
    let explicit = parse("ob A; mor f : A -> A; mor g : A -> A; term t = (f * g) ; (g * f);").unwrap();
    assert_eq!(doc, explicit);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printed_documents_reparse_equal(seed in any::<u64>(), feedback in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sampler = TermSampler::free(&["A", "B", "C"]);
        let terms: Vec<_> = (0..3)
            .map(|_| if feedback { sampler.term_with_feedback(&mut rng) } else { sampler.term(&mut rng) })
            .collect();
        let named: Vec<(&str, _)> = ["t0", "t1", "t2"].into_iter().zip(terms).collect();
        let doc = document_for(sampler.presentation(), &named);
        let text = doc.to_string();
        let back = parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn agent_presentation_terms_reparse(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pres = xlearn::presentation();
        let mut sampler = TermSampler::over(pres);
        let t = sampler.term_with_feedback(&mut rng);
        let doc = document_for(pres, &[("t", t)]);
        prop_assert_eq!(parse(&doc.to_string()).unwrap(), doc);
    }
}
