use super::ob::ObExpr;
use super::term::MorTerm;
use super::DiagramError;

/// Unit/associativity normal form.
///
/// Composites and tensors are flattened and rebuilt right-nested, identities
/// are dropped from composites, `Id(I)` factors are dropped from tensors and
/// adjacent identity factors are merged. Structure morphisms on the unit
/// object collapse to `Id(I)`.
pub fn normalize(term: &MorTerm) -> Result<MorTerm, DiagramError> {
    term.infer_type()?;
    Ok(norm(term))
}

fn norm(term: &MorTerm) -> MorTerm {
    match term {
        MorTerm::GenMor { name, dom, cod } => MorTerm::gen(name.clone(), dom.normal_form(), cod.normal_form()),
        MorTerm::Id(ob) => MorTerm::Id(ob.normal_form()),
        MorTerm::Copy(ob) if ob.is_unit() => MorTerm::Id(ObExpr::Unit),
        MorTerm::Copy(ob) => MorTerm::Copy(ob.normal_form()),
        MorTerm::Discard(ob) if ob.is_unit() => MorTerm::Id(ObExpr::Unit),
        MorTerm::Discard(ob) => MorTerm::Discard(ob.normal_form()),
        MorTerm::Sym(a, b) if a.is_unit() || b.is_unit() => {
            MorTerm::Id(ObExpr::tensor(a.clone(), b.clone()).normal_form())
        }
        MorTerm::Sym(a, b) => MorTerm::Sym(a.normal_form(), b.normal_form()),
        MorTerm::Feedback { state, inner } => MorTerm::feedback(state.normal_form(), norm(inner)),
        MorTerm::Compose(..) => {
            let mut factors = Vec::new();
            flatten_compose(term, &mut factors);
            let dom = factors[0].infer_type().expect("typechecked").0;
            let kept: Vec<MorTerm> = factors
                .into_iter()
                .map(|f| norm(&f))
                .flat_map(|f| {
                    // a normalized factor may itself be a composite
                    let mut inner = Vec::new();
                    flatten_compose(&f, &mut inner);
                    inner
                })
                .filter(|f| !matches!(f, MorTerm::Id(_)))
                .collect();
            if kept.is_empty() {
                MorTerm::Id(dom.normal_form())
            } else {
                MorTerm::compose_all(kept)
            }
        }
        MorTerm::Tensor(..) => {
            let mut factors = Vec::new();
            flatten_tensor(term, &mut factors);
            let mut kept: Vec<MorTerm> = Vec::new();
            for f in factors.iter().map(norm).flat_map(|f| {
                let mut inner = Vec::new();
                flatten_tensor(&f, &mut inner);
                inner
            }) {
                match (&f, kept.last_mut()) {
                    (MorTerm::Id(ob), _) if ob.is_unit() => {}
                    (MorTerm::Id(ob), Some(MorTerm::Id(prev))) => {
                        *prev = ObExpr::tensor(prev.clone(), ob.clone()).normal_form();
                    }
                    _ => kept.push(f),
                }
            }
            MorTerm::tensor_all(kept)
        }
    }
}

fn flatten_compose(term: &MorTerm, out: &mut Vec<MorTerm>) {
    match term {
        MorTerm::Compose(a, b) => {
            flatten_compose(a, out);
            flatten_compose(b, out);
        }
        other => out.push(other.clone()),
    }
}

fn flatten_tensor(term: &MorTerm, out: &mut Vec<MorTerm>) {
    match term {
        MorTerm::Tensor(a, b) => {
            flatten_tensor(a, out);
            flatten_tensor(b, out);
        }
        other => out.push(other.clone()),
    }
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
    fn g() -> MorTerm {
        MorTerm::gen("g", ob("Y"), ob("Z"))
    }
    fn h() -> MorTerm {
        MorTerm::gen("h", ob("Z"), ob("W"))
    }

    #[test]
    fn right_identity_removed() {
        let t = MorTerm::compose(f(), MorTerm::id(ob("Y")));
        assert_eq!(normalize(&t).unwrap(), f());
        let t = MorTerm::compose(MorTerm::id(ob("X")), f());
        assert_eq!(normalize(&t).unwrap(), f());
    }

    #[test]
    fn unit_tensor_factor_removed() {
        let t = MorTerm::tensor(f(), MorTerm::id(ObExpr::Unit));
        assert_eq!(normalize(&t).unwrap(), f());
    }

    #[test]
    fn composition_reassociated() {
        let t = MorTerm::compose(MorTerm::compose(f(), g()), h());
        assert_eq!(normalize(&t).unwrap(), MorTerm::compose(f(), MorTerm::compose(g(), h())));
    }

    #[test]
    fn all_identity_composite_collapses() {
        let x = ob("X");
        let t = MorTerm::compose(MorTerm::id(x.clone()), MorTerm::id(x.clone()));
        assert_eq!(normalize(&t).unwrap(), MorTerm::id(x));
    }

    #[test]
    fn identities_merge_in_tensor() {
        let t = MorTerm::tensor(MorTerm::id(ob("A")), MorTerm::tensor(MorTerm::id(ob("B")), f()));
        assert_eq!(normalize(&t).unwrap(), MorTerm::tensor(MorTerm::id(ObExpr::from_atoms(&["A", "B"])), f()));
    }

    #[test]
    fn ill_typed_input_rejected() {
        let t = MorTerm::compose(f(), h());
        assert!(normalize(&t).is_err());
    }

    #[test]
    fn normalization_is_idempotent_and_type_preserving() {
        let t = MorTerm::compose(
            MorTerm::tensor(MorTerm::compose(f(), MorTerm::id(ob("Y"))), MorTerm::Sym(ObExpr::Unit, ob("A"))),
            MorTerm::tensor(MorTerm::compose(g(), h()), MorTerm::Copy(ob("A"))),
        );
        let n = normalize(&t).unwrap();
        assert_eq!(normalize(&n).unwrap(), n);
        assert_eq!(n.infer_type().unwrap(), t.infer_type().unwrap());
    }
}
