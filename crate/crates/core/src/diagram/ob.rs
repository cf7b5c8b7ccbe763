use std::fmt;

/// Object expression of a free strict monoidal category.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObExpr {
    Unit,
    Gen(String),
    Tensor(Box<ObExpr>, Box<ObExpr>),
}

impl ObExpr {
    pub fn gen(name: impl Into<String>) -> Self {
        ObExpr::Gen(name.into())
    }

    pub fn tensor(left: ObExpr, right: ObExpr) -> Self {
        ObExpr::Tensor(Box::new(left), Box::new(right))
    }

    /// Flat list of generator names, units removed.
    pub fn atoms(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<String>) {
        match self {
            ObExpr::Unit => {}
            ObExpr::Gen(name) => out.push(name.clone()),
            ObExpr::Tensor(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            ObExpr::Unit => 0,
            ObExpr::Gen(_) => 1,
            ObExpr::Tensor(l, r) => l.arity() + r.arity(),
        }
    }

    /// Left-associated tensor of the given generators; `Unit` when empty.
    pub fn from_atoms<S: AsRef<str>>(atoms: &[S]) -> Self {
        let mut iter = atoms.iter();
        let Some(first) = iter.next() else {
            return ObExpr::Unit;
        };
        iter.fold(ObExpr::gen(first.as_ref()), |acc, a| ObExpr::tensor(acc, ObExpr::gen(a.as_ref())))
    }

    pub fn normal_form(&self) -> Self {
        ObExpr::from_atoms(&self.atoms())
    }

    pub fn is_unit(&self) -> bool {
        self.arity() == 0
    }

    /// Equality up to strict associativity and unit laws.
    pub fn type_eq(&self, other: &ObExpr) -> bool {
        self.atoms() == other.atoms()
    }
}

impl fmt::Display for ObExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms = self.atoms();
        if atoms.is_empty() {
            return write!(f, "I");
        }
        write!(f, "{}", atoms.join(" * "))
    }
}
