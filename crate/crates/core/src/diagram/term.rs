use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ob::ObExpr;
use super::DiagramError;

/// Morphism term of a free feedback Cartesian category.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MorTerm {
    GenMor { name: String, dom: ObExpr, cod: ObExpr },
    Id(ObExpr),
    Compose(Box<MorTerm>, Box<MorTerm>),
    Tensor(Box<MorTerm>, Box<MorTerm>),
    Sym(ObExpr, ObExpr),
    Copy(ObExpr),
    Discard(ObExpr),
    Feedback { state: ObExpr, inner: Box<MorTerm> },
}

impl MorTerm {
    pub fn gen(name: impl Into<String>, dom: ObExpr, cod: ObExpr) -> Self {
        MorTerm::GenMor { name: name.into(), dom, cod }
    }

    pub fn id(ob: ObExpr) -> Self {
        MorTerm::Id(ob)
    }

    pub fn compose(first: MorTerm, second: MorTerm) -> Self {
        MorTerm::Compose(Box::new(first), Box::new(second))
    }

    pub fn tensor(left: MorTerm, right: MorTerm) -> Self {
        MorTerm::Tensor(Box::new(left), Box::new(right))
    }

    pub fn feedback(state: ObExpr, inner: MorTerm) -> Self {
        MorTerm::Feedback { state, inner: Box::new(inner) }
    }

    /// Right-nested composite `t0 ; (t1 ; (... ; tn))`.
    ///
    /// Panics on an empty list.
    pub fn compose_all(terms: impl IntoIterator<Item = MorTerm>) -> Self {
        let mut terms: Vec<MorTerm> = terms.into_iter().collect();
        let mut acc = terms.pop().expect("compose_all of empty list");
        while let Some(t) = terms.pop() {
            acc = MorTerm::compose(t, acc);
        }
        acc
    }

    /// Right-nested tensor; `Id(Unit)` for an empty list.
    pub fn tensor_all(terms: impl IntoIterator<Item = MorTerm>) -> Self {
        let mut terms: Vec<MorTerm> = terms.into_iter().collect();
        let Some(mut acc) = terms.pop() else {
            return MorTerm::Id(ObExpr::Unit);
        };
        while let Some(t) = terms.pop() {
            acc = MorTerm::tensor(t, acc);
        }
        acc
    }

    /// Wire permutation: output position `i` carries input wire `perm[i]`.
    ///
    /// Built from adjacent symmetries (bubble sort), so the result only uses
    /// `Id`, `Sym`, `Tensor` and `Compose`.
    pub fn permutation<S: AsRef<str>>(wires: &[S], perm: &[usize]) -> Self {
        assert_eq!(wires.len(), perm.len(), "permutation length mismatch");
        let mut current: Vec<usize> = (0..wires.len()).collect();
        let mut layers = Vec::new();
        // target[k] = the input wire that must end at position k
        loop {
            let mut swapped = false;
            for k in 0..current.len().saturating_sub(1) {
                let pos_a = perm.iter().position(|&p| p == current[k]).unwrap();
                let pos_b = perm.iter().position(|&p| p == current[k + 1]).unwrap();
                if pos_a > pos_b {
                    let names: Vec<&str> = current.iter().map(|&i| wires[i].as_ref()).collect();
                    let layer = MorTerm::tensor_all([
                        MorTerm::Id(ObExpr::from_atoms(&names[..k])),
                        MorTerm::Sym(ObExpr::gen(names[k]), ObExpr::gen(names[k + 1])),
                        MorTerm::Id(ObExpr::from_atoms(&names[k + 2..])),
                    ]);
                    layers.push(layer);
                    current.swap(k, k + 1);
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        if layers.is_empty() {
            let names: Vec<&str> = wires.iter().map(|w| w.as_ref()).collect();
            MorTerm::Id(ObExpr::from_atoms(&names))
        } else {
            MorTerm::compose_all(layers)
        }
    }

    pub fn has_feedback(&self) -> bool {
        match self {
            MorTerm::Feedback { .. } => true,
            MorTerm::Compose(a, b) | MorTerm::Tensor(a, b) => a.has_feedback() || b.has_feedback(),
            _ => false,
        }
    }

    /// Height of the syntax tree; leaves have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            MorTerm::Compose(a, b) | MorTerm::Tensor(a, b) => 1 + a.depth().max(b.depth()),
            MorTerm::Feedback { inner, .. } => 1 + inner.depth(),
            _ => 1,
        }
    }

    /// Number of occurrences of the generator `name`.
    pub fn count_gen(&self, name: &str) -> usize {
        self.fold_count(&|t| matches!(t, MorTerm::GenMor { name: n, .. } if n == name))
    }

    pub fn count_matching(&self, pred: &dyn Fn(&MorTerm) -> bool) -> usize {
        self.fold_count(pred)
    }

    fn fold_count(&self, pred: &dyn Fn(&MorTerm) -> bool) -> usize {
        let here = usize::from(pred(self));
        here + match self {
            MorTerm::Compose(a, b) | MorTerm::Tensor(a, b) => a.fold_count(pred) + b.fold_count(pred),
            MorTerm::Feedback { inner, .. } => inner.fold_count(pred),
            _ => 0,
        }
    }

    /// Names of all generators used in the term.
    pub fn generators(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_gens(&mut out);
        out
    }

    fn collect_gens(&self, out: &mut BTreeSet<String>) {
        match self {
            MorTerm::GenMor { name, .. } => {
                out.insert(name.clone());
            }
            MorTerm::Compose(a, b) | MorTerm::Tensor(a, b) => {
                a.collect_gens(out);
                b.collect_gens(out);
            }
            MorTerm::Feedback { inner, .. } => inner.collect_gens(out),
            _ => {}
        }
    }

    /// Type of the term using the dom/cod carried by its generators.
    pub fn infer_type(&self) -> Result<(ObExpr, ObExpr), DiagramError> {
        check(self, None, &mut Vec::new())
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            MorTerm::GenMor { name, .. } => write!(f, "{name}"),
            MorTerm::Id(ob) => write!(f, "id({ob})"),
            MorTerm::Copy(ob) => write!(f, "copy({ob})"),
            MorTerm::Discard(ob) => write!(f, "discard({ob})"),
            MorTerm::Sym(a, b) => write!(f, "sym({a}, {b})"),
            MorTerm::Feedback { state, inner } => {
                write!(f, "fbk[{state}](")?;
                inner.fmt_prec(f, 0)?;
                write!(f, ")")
            }
            MorTerm::Compose(a, b) => {
                if prec > 0 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 0)?;
                write!(f, " ; ")?;
                b.fmt_prec(f, 1)?;
                if prec > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            MorTerm::Tensor(a, b) => {
                if prec > 1 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 1)?;
                write!(f, " * ")?;
                b.fmt_prec(f, 2)?;
                if prec > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// Prints in the DSL's concrete syntax; `;` and `*` are left-associative there,
/// so right-nested children are parenthesized.
impl fmt::Display for MorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Generators of a free category.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Presentation {
    ob_gens: Vec<String>,
    mor_gens: BTreeMap<String, (ObExpr, ObExpr)>,
}

impl Presentation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_ob(&mut self, name: impl Into<String>) -> Result<(), DiagramError> {
        let name = name.into();
        if self.has_name(&name) {
            return Err(DiagramError::DuplicateGenerator(name));
        }
        self.ob_gens.push(name);
        Ok(())
    }

    pub fn add_mor(&mut self, name: impl Into<String>, dom: ObExpr, cod: ObExpr) -> Result<(), DiagramError> {
        let name = name.into();
        if self.has_name(&name) {
            return Err(DiagramError::DuplicateGenerator(name));
        }
        for atom in dom.atoms().into_iter().chain(cod.atoms()) {
            if !self.has_ob(&atom) {
                return Err(DiagramError::UnknownObject(atom));
            }
        }
        self.mor_gens.insert(name, (dom.normal_form(), cod.normal_form()));
        Ok(())
    }

    pub fn with_ob(mut self, name: &str) -> Result<Self, DiagramError> {
        self.add_ob(name)?;
        Ok(self)
    }

    pub fn with_mor(mut self, name: &str, dom: ObExpr, cod: ObExpr) -> Result<Self, DiagramError> {
        self.add_mor(name, dom, cod)?;
        Ok(self)
    }

    fn has_name(&self, name: &str) -> bool {
        self.has_ob(name) || self.mor_gens.contains_key(name)
    }

    pub fn has_ob(&self, name: &str) -> bool {
        self.ob_gens.iter().any(|o| o == name)
    }

    pub fn obs(&self) -> &[String] {
        &self.ob_gens
    }

    pub fn mors(&self) -> impl Iterator<Item = (&String, &(ObExpr, ObExpr))> {
        self.mor_gens.iter()
    }

    pub fn mor(&self, name: &str) -> Option<&(ObExpr, ObExpr)> {
        self.mor_gens.get(name)
    }

    /// The generator term for a declared morphism.
    pub fn gen_term(&self, name: &str) -> Result<MorTerm, DiagramError> {
        let (dom, cod) = self.mor(name).ok_or_else(|| DiagramError::UnknownGenerator(name.to_string()))?;
        Ok(MorTerm::gen(name, dom.clone(), cod.clone()))
    }
}

/// Computes the normalized (dom, cod) of `term` against `pres`.
pub fn typecheck(term: &MorTerm, pres: &Presentation) -> Result<(ObExpr, ObExpr), DiagramError> {
    check(term, Some(pres), &mut Vec::new())
}

fn path_string(path: &[u8]) -> String {
    if path.is_empty() {
        return "root".to_string();
    }
    let parts: Vec<String> = path.iter().map(|p| p.to_string()).collect();
    format!("root.{}", parts.join("."))
}

fn check_ob(ob: &ObExpr, pres: Option<&Presentation>) -> Result<ObExpr, DiagramError> {
    if let Some(p) = pres {
        for atom in ob.atoms() {
            if !p.has_ob(&atom) {
                return Err(DiagramError::UnknownObject(atom));
            }
        }
    }
    Ok(ob.normal_form())
}

fn check(term: &MorTerm, pres: Option<&Presentation>, path: &mut Vec<u8>) -> Result<(ObExpr, ObExpr), DiagramError> {
    match term {
        MorTerm::GenMor { name, dom, cod } => {
            if let Some(p) = pres {
                let (pd, pc) = p.mor(name).ok_or_else(|| DiagramError::UnknownGenerator(name.clone()))?;
                if !pd.type_eq(dom) || !pc.type_eq(cod) {
                    return Err(DiagramError::GeneratorTypeMismatch {
                        name: name.clone(),
                        declared: format!("{pd} -> {pc}"),
                        found: format!("{dom} -> {cod}"),
                    });
                }
            }
            Ok((check_ob(dom, pres)?, check_ob(cod, pres)?))
        }
        MorTerm::Id(ob) => {
            let ob = check_ob(ob, pres)?;
            Ok((ob.clone(), ob))
        }
        MorTerm::Copy(ob) => {
            let ob = check_ob(ob, pres)?;
            let cod = ObExpr::tensor(ob.clone(), ob.clone()).normal_form();
            Ok((ob, cod))
        }
        MorTerm::Discard(ob) => Ok((check_ob(ob, pres)?, ObExpr::Unit)),
        MorTerm::Sym(a, b) => {
            let a = check_ob(a, pres)?;
            let b = check_ob(b, pres)?;
            Ok((ObExpr::tensor(a.clone(), b.clone()).normal_form(), ObExpr::tensor(b, a).normal_form()))
        }
        MorTerm::Compose(f, g) => {
            path.push(0);
            let (fd, fc) = check(f, pres, path)?;
            path.pop();
            path.push(1);
            let (gd, gc) = check(g, pres, path)?;
            path.pop();
            if !fc.type_eq(&gd) {
                return Err(DiagramError::CompositionTypeMismatch { path: path_string(path), expected: fc, found: gd });
            }
            Ok((fd, gc))
        }
        MorTerm::Tensor(f, g) => {
            path.push(0);
            let (fd, fc) = check(f, pres, path)?;
            path.pop();
            path.push(1);
            let (gd, gc) = check(g, pres, path)?;
            path.pop();
            Ok((ObExpr::tensor(fd, gd).normal_form(), ObExpr::tensor(fc, gc).normal_form()))
        }
        MorTerm::Feedback { state, inner } => {
            let state = check_ob(state, pres)?;
            path.push(0);
            let (d, c) = check(inner, pres, path)?;
            path.pop();
            let s = state.atoms();
            let (da, ca) = (d.atoms(), c.atoms());
            if !da.ends_with(&s) || !ca.ends_with(&s) {
                return Err(DiagramError::FeedbackShapeError { path: path_string(path), state, dom: d, cod: c });
            }
            Ok((ObExpr::from_atoms(&da[..da.len() - s.len()]), ObExpr::from_atoms(&ca[..ca.len() - s.len()])))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> ObExpr {
        ObExpr::gen("X")
    }
    fn y() -> ObExpr {
        ObExpr::gen("Y")
    }

    fn pres() -> Presentation {
        Presentation::new()
            .with_ob("X")
            .unwrap()
            .with_ob("Y")
            .unwrap()
            .with_ob("Z")
            .unwrap()
            .with_ob("W")
            .unwrap()
            .with_mor("f", x(), y())
            .unwrap()
            .with_mor("g", ObExpr::gen("Z"), ObExpr::gen("W"))
            .unwrap()
    }

    #[test]
    fn identity_then_generator() {
        let p = pres();
        let t = MorTerm::compose(MorTerm::id(x()), p.gen_term("f").unwrap());
        assert_eq!(typecheck(&t, &p).unwrap(), (x(), y()));
    }

    #[test]
    fn ill_typed_composition_reports_path() {
        let p = pres();
        let t = MorTerm::compose(p.gen_term("f").unwrap(), p.gen_term("g").unwrap());
        match typecheck(&t, &p) {
            Err(DiagramError::CompositionTypeMismatch { path, expected, found }) => {
                assert_eq!(path, "root");
                assert_eq!(expected, y());
                assert_eq!(found, ObExpr::gen("Z"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let nested = MorTerm::tensor(MorTerm::id(x()), t);
        match typecheck(&nested, &p) {
            Err(DiagramError::CompositionTypeMismatch { path, .. }) => assert_eq!(path, "root.1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_generator_and_object() {
        let p = pres();
        let t = MorTerm::gen("h", x(), y());
        assert!(matches!(typecheck(&t, &p), Err(DiagramError::UnknownGenerator(n)) if n == "h"));
        let t = MorTerm::id(ObExpr::gen("Q"));
        assert!(matches!(typecheck(&t, &p), Err(DiagramError::UnknownObject(n)) if n == "Q"));
        let t = MorTerm::gen("f", y(), y());
        assert!(matches!(typecheck(&t, &p), Err(DiagramError::GeneratorTypeMismatch { .. })));
    }

    #[test]
    fn feedback_shape() {
        let p = Presentation::new()
            .with_ob("X")
            .unwrap()
            .with_ob("S")
            .unwrap()
            .with_mor("k", ObExpr::from_atoms(&["X", "S"]), ObExpr::from_atoms(&["S"]))
            .unwrap();
        let ok = MorTerm::feedback(ObExpr::gen("S"), p.gen_term("k").unwrap());
        assert_eq!(typecheck(&ok, &p).unwrap(), (x(), ObExpr::Unit));
        let bad = MorTerm::feedback(ObExpr::gen("X"), p.gen_term("k").unwrap());
        assert!(matches!(typecheck(&bad, &p), Err(DiagramError::FeedbackShapeError { .. })));
    }

    #[test]
    fn typecheck_is_deterministic() {
        let p = pres();
        let t = MorTerm::tensor(p.gen_term("f").unwrap(), MorTerm::Sym(x(), y()));
        assert_eq!(typecheck(&t, &p).unwrap(), typecheck(&t, &p).unwrap());
    }

    #[test]
    fn permutation_realizes_requested_order() {
        let wires = ["A", "B", "C"];
        let t = MorTerm::permutation(&wires, &[2, 0, 1]);
        let (d, c) = t.infer_type().unwrap();
        assert_eq!(d.atoms(), vec!["A", "B", "C"]);
        assert_eq!(c.atoms(), vec!["C", "A", "B"]);
        assert_eq!(MorTerm::permutation(&wires, &[0, 1, 2]), MorTerm::id(ObExpr::from_atoms(&wires)));
    }

    #[test]
    fn duplicate_names_rejected() {
        let err = Presentation::new().with_ob("X").unwrap().with_ob("X").unwrap_err();
        assert!(matches!(err, DiagramError::DuplicateGenerator(_)));
        let err = Presentation::new().with_mor("f", x(), x()).unwrap_err();
        assert!(matches!(err, DiagramError::UnknownObject(_)));
    }

    #[test]
    fn display_uses_dsl_syntax() {
        let p = pres();
        let f = p.gen_term("f").unwrap();
        let t = MorTerm::compose(f.clone(), MorTerm::compose(MorTerm::id(y()), MorTerm::id(y())));
        assert_eq!(t.to_string(), "f ; (id(Y) ; id(Y))");
        let t = MorTerm::tensor(MorTerm::compose(f.clone(), MorTerm::id(y())), MorTerm::Copy(x()));
        assert_eq!(t.to_string(), "(f ; id(Y)) * copy(X)");
    }
}
