use std::fmt;
use std::hash::{Hash, Hasher};

use crate::institution::{PropSignature, SaliencyModel, SaliencySignature, Sentence, Valuation};

/// A set interpreting an object. Products are flat and never contain `Unit`,
/// mirroring the strict tensor of object expressions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Carrier {
    Unit,
    FiniteEnum(Vec<String>),
    RealVec(usize),
    /// Open carrier of sentences over a signature.
    Sentences(PropSignature),
    /// Open carrier of truth assignments over a signature.
    Valuations(PropSignature),
    SaliencyModels(SaliencySignature),
    Product(Vec<Carrier>),
}

impl Carrier {
    /// `FiniteEnum` with labels `v0 .. v{n-1}`.
    pub fn finite(n: usize) -> Self {
        Carrier::FiniteEnum((0..n).map(|i| format!("v{i}")).collect())
    }

    pub fn booleans() -> Self {
        Carrier::FiniteEnum(vec!["false".into(), "true".into()])
    }

    pub fn product(a: Carrier, b: Carrier) -> Self {
        let mut f = a.factors();
        f.extend(b.factors());
        Self::from_factors(f)
    }

    pub fn product_all(parts: impl IntoIterator<Item = Carrier>) -> Self {
        Self::from_factors(parts.into_iter().flat_map(Carrier::factors).collect())
    }

    pub fn from_factors(mut f: Vec<Carrier>) -> Self {
        match f.len() {
            0 => Carrier::Unit,
            1 => f.pop().expect("one factor"),
            _ => Carrier::Product(f),
        }
    }

    pub fn factors(self) -> Vec<Carrier> {
        match self {
            Carrier::Unit => Vec::new(),
            Carrier::Product(f) => f,
            other => vec![other],
        }
    }

    /// Number of tensor factors; `Unit` has none.
    pub fn arity(&self) -> usize {
        match self {
            Carrier::Unit => 0,
            Carrier::Product(f) => f.len(),
            _ => 1,
        }
    }

    pub fn admits(&self, v: &Value) -> bool {
        match (self, v) {
            (Carrier::Unit, Value::Unit) => true,
            (Carrier::FiniteEnum(labels), Value::Enum(i)) => *i < labels.len(),
            (Carrier::RealVec(d), Value::Real(x)) => x.len() == *d,
            (Carrier::Sentences(sig), Value::Sentence(e)) => e.is_well_formed_over(sig),
            (Carrier::Valuations(sig), Value::Valuation(m)) => m.signature() == sig,
            (Carrier::SaliencyModels(sig), Value::Saliency(m)) => &m.signature == sig,
            (Carrier::Product(cs), Value::Tuple(vs)) => {
                cs.len() == vs.len() && cs.iter().zip(vs).all(|(c, v)| c.admits(v))
            }
            _ => false,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Carrier::Unit | Carrier::FiniteEnum(_) => true,
            Carrier::Product(f) => f.iter().all(Carrier::is_finite),
            _ => false,
        }
    }

    /// All values of a finite carrier in lexicographic order, `None` otherwise.
    pub fn enumerate_values(&self) -> Option<Vec<Value>> {
        match self {
            Carrier::Unit => Some(vec![Value::Unit]),
            Carrier::FiniteEnum(labels) => Some((0..labels.len()).map(Value::Enum).collect()),
            Carrier::Product(fs) => {
                let mut acc: Vec<Vec<Value>> = vec![Vec::new()];
                for f in fs {
                    let vals = f.enumerate_values()?;
                    acc = acc
                        .into_iter()
                        .flat_map(|prefix| {
                            vals.iter().map(move |v| {
                                let mut p = prefix.clone();
                                p.push(v.clone());
                                p
                            })
                        })
                        .collect();
                }
                Some(acc.into_iter().map(Value::Tuple).collect())
            }
            _ => None,
        }
    }

    pub fn size(&self) -> Option<usize> {
        match self {
            Carrier::Unit => Some(1),
            Carrier::FiniteEnum(l) => Some(l.len()),
            Carrier::Product(fs) => fs.iter().try_fold(1usize, |acc, f| acc.checked_mul(f.size()?)),
            _ => None,
        }
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Carrier::Unit => write!(f, "1"),
            Carrier::FiniteEnum(l) => write!(f, "Enum({})", l.len()),
            Carrier::RealVec(d) => write!(f, "R^{d}"),
            Carrier::Sentences(_) => write!(f, "Sen"),
            Carrier::Valuations(_) => write!(f, "Mod"),
            Carrier::SaliencyModels(s) => write!(f, "Saliency({})", s.pixels),
            Carrier::Product(fs) => {
                for (i, c) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " x ")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
        }
    }
}

/// Element of a carrier. Tuples are flat with at least two components.
/// Float equality is bitwise.
#[derive(Debug, Clone)]
pub enum Value {
    Unit,
    Enum(usize),
    Real(Vec<f64>),
    Sentence(Sentence),
    Valuation(Valuation),
    Saliency(SaliencyModel),
    Tuple(Vec<Value>),
}

impl Value {
    pub fn pair(a: Value, b: Value) -> Self {
        match (a.factor_count(), b.factor_count()) {
            (0, _) => b,
            (_, 0) => a,
            (m, n) => {
                let mut f = Vec::with_capacity(m + n);
                for v in [a, b] {
                    match v {
                        Value::Tuple(vs) => f.extend(vs),
                        other => f.push(other),
                    }
                }
                Value::Tuple(f)
            }
        }
    }

    pub fn from_factors(mut f: Vec<Value>) -> Self {
        match f.len() {
            0 => Value::Unit,
            1 => f.pop().expect("one factor"),
            _ => Value::Tuple(f),
        }
    }

    pub fn factors(self) -> Vec<Value> {
        match self {
            Value::Unit => Vec::new(),
            Value::Tuple(f) => f,
            other => vec![other],
        }
    }

    pub fn factor_count(&self) -> usize {
        match self {
            Value::Unit => 0,
            Value::Tuple(f) => f.len(),
            _ => 1,
        }
    }

    /// Splits off the first `k` tensor factors.
    pub fn split_at(self, k: usize) -> (Value, Value) {
        let mut f = self.factors();
        let rest = f.split_off(k.min(f.len()));
        (Value::from_factors(f), Value::from_factors(rest))
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match self {
            Value::Real(v) => Some(v),
            _ => None,
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Unit, Value::Unit) => true,
            (Value::Enum(a), Value::Enum(b)) => a == b,
            (Value::Real(a), Value::Real(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
            }
            (Value::Sentence(a), Value::Sentence(b)) => a == b,
            (Value::Valuation(a), Value::Valuation(b)) => a == b,
            (Value::Saliency(a), Value::Saliency(b)) => a == b,
            (Value::Tuple(a), Value::Tuple(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            Value::Unit => {}
            Value::Enum(i) => i.hash(state),
            Value::Real(v) => v.iter().for_each(|x| x.to_bits().hash(state)),
            Value::Sentence(e) => e.hash(state),
            Value::Valuation(m) => m.hash(state),
            Value::Saliency(m) => m.hash(state),
            Value::Tuple(vs) => vs.hash(state),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unit => write!(f, "*"),
            Value::Enum(i) => write!(f, "#{i}"),
            Value::Real(v) => {
                write!(f, "[")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    // Display for f64 is the shortest round-trip form
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
            Value::Sentence(e) => write!(f, "{e}"),
            Value::Valuation(m) => write!(f, "{m}"),
            Value::Saliency(m) => write!(f, "{m}"),
            Value::Tuple(vs) => {
                write!(f, "(")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_flatten_and_drop_units() {
        let c = Carrier::product(Carrier::product(Carrier::finite(2), Carrier::Unit), Carrier::finite(3));
        assert_eq!(c, Carrier::Product(vec![Carrier::finite(2), Carrier::finite(3)]));
        assert_eq!(Carrier::product(Carrier::Unit, Carrier::RealVec(2)), Carrier::RealVec(2));
        let v = Value::pair(Value::pair(Value::Enum(1), Value::Unit), Value::Enum(0));
        assert_eq!(v, Value::Tuple(vec![Value::Enum(1), Value::Enum(0)]));
        assert_eq!(v.clone().split_at(1), (Value::Enum(1), Value::Enum(0)));
        assert!(c.admits(&v));
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let c = Carrier::product(Carrier::finite(2), Carrier::finite(2));
        let vals = c.enumerate_values().unwrap();
        assert_eq!(vals.len(), 4);
        assert_eq!(vals[1], Value::Tuple(vec![Value::Enum(0), Value::Enum(1)]));
        assert_eq!(c.size(), Some(4));
        assert_eq!(Carrier::RealVec(2).enumerate_values(), None);
        assert_eq!(Carrier::Unit.enumerate_values().unwrap(), vec![Value::Unit]);
    }

    #[test]
    fn printing() {
        let v = Value::Tuple(vec![Value::Real(vec![0.1, -2.0, 1e-7]), Value::Unit, Value::Enum(2)]);
        assert_eq!(v.to_string(), "([0.1, -2, 0.0000001], *, #2)");
        let x: f64 = "0.0000001".parse().unwrap();
        assert_eq!(x, 1e-7);
    }

    #[test]
    fn float_equality_is_bitwise() {
        assert_ne!(Value::Real(vec![0.0]), Value::Real(vec![-0.0]));
        assert_eq!(Value::Real(vec![f64::NAN]), Value::Real(vec![f64::NAN]));
    }
}
