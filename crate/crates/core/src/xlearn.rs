//! The free category of explaining learning agents: objects `X` (inputs),
//! `Y` (outputs), `P` (parameters), `E` (explanations), a learner
//! `eta : X * P -> Y * E` and an optimizer `nabla : Y * Y * P -> P`.

use std::sync::OnceLock;

use crate::diagram::{MorTerm, ObExpr, Presentation};

pub const ETA: &str = "eta";
pub const NABLA: &str = "nabla";

fn ob(atoms: &[&str]) -> ObExpr {
    ObExpr::from_atoms(atoms)
}

pub fn presentation() -> &'static Presentation {
    static PRES: OnceLock<Presentation> = OnceLock::new();
    PRES.get_or_init(|| {
        let mut p = Presentation::new();
        for o in ["X", "Y", "P", "E"] {
            p.add_ob(o).expect("fresh object");
        }
        p.add_mor(ETA, ob(&["X", "P"]), ob(&["Y", "E"])).expect("fresh generator");
        p.add_mor(NABLA, ob(&["Y", "Y", "P"]), ob(&["P"])).expect("fresh generator");
        p
    })
}

pub fn eta() -> MorTerm {
    MorTerm::gen(ETA, ob(&["X", "P"]), ob(&["Y", "E"]))
}

pub fn nabla() -> MorTerm {
    MorTerm::gen(NABLA, ob(&["Y", "Y", "P"]), ob(&["P"]))
}

fn id(atoms: &[&str]) -> MorTerm {
    MorTerm::id(ob(atoms))
}

/// `fbk[P]((id_{Y*X} * cp_P) ; (id_Y * eta * id_P) ; (id_{Y*Y} * discard_E * id_P) ; nabla)`,
/// typed `Y * X -> I`: labels and inputs in, nothing observable out.
pub fn abstract_agent() -> MorTerm {
    let p = ob(&["P"]);
    MorTerm::feedback(
        p.clone(),
        MorTerm::compose_all([
            MorTerm::tensor(id(&["Y", "X"]), MorTerm::Copy(p.clone())),
            MorTerm::tensor_all([id(&["Y"]), eta(), id(&["P"])]),
            MorTerm::tensor_all([id(&["Y", "Y"]), MorTerm::Discard(ob(&["E"])), id(&["P"])]),
            nabla(),
        ]),
    )
}

/// Like [`abstract_agent`] but the prediction and the explanation are copied
/// to the outputs before the optimizer consumes them, typed `Y * X -> Y * E`.
pub fn observable_agent() -> MorTerm {
    let p = ob(&["P"]);
    MorTerm::feedback(
        p.clone(),
        MorTerm::compose_all([
            MorTerm::tensor(id(&["Y", "X"]), MorTerm::Copy(p.clone())),
            MorTerm::tensor_all([id(&["Y"]), eta(), id(&["P"])]),
            MorTerm::tensor_all([id(&["Y"]), MorTerm::Copy(ob(&["Y"])), MorTerm::Copy(ob(&["E"])), id(&["P"])]),
            MorTerm::tensor_all([id(&["Y", "Y", "Y"]), MorTerm::Discard(ob(&["E"])), id(&["E", "P"])]),
            MorTerm::tensor(MorTerm::Sym(ob(&["Y", "Y"]), ob(&["Y", "E"])), id(&["P"])),
            MorTerm::tensor(id(&["Y", "E"]), nabla()),
        ]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{normalize, typecheck};

    #[test]
    fn abstract_agent_type_and_shape() {
        let t = abstract_agent();
        assert_eq!(typecheck(&t, presentation()).unwrap(), (ob(&["Y", "X"]), ObExpr::Unit));
        assert_eq!(t.count_gen(ETA), 1);
        assert_eq!(t.count_gen(NABLA), 1);
        assert_eq!(t.count_matching(&|m| matches!(m, MorTerm::Copy(o) if *o == ob(&["P"]))), 1);
        assert_eq!(t.count_matching(&|m| matches!(m, MorTerm::Discard(o) if *o == ob(&["E"]))), 1);
        assert_eq!(t.count_matching(&|m| matches!(m, MorTerm::Feedback { state, .. } if *state == ob(&["P"]))), 1);
        assert_eq!(normalize(&t).unwrap(), t);
    }

    #[test]
    fn observable_agent_type() {
        let t = observable_agent();
        assert_eq!(typecheck(&t, presentation()).unwrap(), (ob(&["Y", "X"]), ob(&["Y", "E"])));
        assert_eq!(t.generators(), [ETA.to_string(), NABLA.to_string()].into());
        assert_eq!(normalize(&t).unwrap(), t);
    }

    #[test]
    fn presentation_is_fixed() {
        let p = presentation();
        assert_eq!(p.obs(), &["X", "Y", "P", "E"]);
        assert_eq!(p.mors().count(), 2);
        assert!(std::ptr::eq(p, presentation()));
    }
}
