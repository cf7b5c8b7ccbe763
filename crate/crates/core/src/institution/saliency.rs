//! Saliency-map institution: one unary predicate over pixel constants.
//! Sentences are positive conjunctions of `S(p)`, models are pixel subsets.

use std::collections::BTreeSet;
use std::fmt;

use super::InstitutionError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SaliencySignature {
    pub predicate: String,
    pub pixels: usize,
}

impl SaliencySignature {
    pub fn new(predicate: impl Into<String>, pixels: usize) -> Self {
        Self { predicate: predicate.into(), pixels }
    }

    fn check(&self, pixels: &BTreeSet<usize>) -> Result<(), InstitutionError> {
        match pixels.iter().find(|&&p| p >= self.pixels) {
            Some(&p) => Err(InstitutionError::PixelOutOfRange { pixel: p, pixels: self.pixels }),
            None => Ok(()),
        }
    }
}

/// `⋀_{p ∈ pixels} S(p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SaliencySentence {
    pub signature: SaliencySignature,
    pub pixels: BTreeSet<usize>,
}

impl SaliencySentence {
    pub fn new(signature: SaliencySignature, pixels: BTreeSet<usize>) -> Result<Self, InstitutionError> {
        signature.check(&pixels)?;
        Ok(Self { signature, pixels })
    }
}

/// Pixels are printed 1-based, `S(p1) & S(p3)`; the empty conjunction is `T`.
impl fmt::Display for SaliencySentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pixels.is_empty() {
            return write!(f, "T");
        }
        for (i, p) in self.pixels.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{}(p{})", self.signature.predicate, p + 1)?;
        }
        Ok(())
    }
}

/// The set of relevant pixels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SaliencyModel {
    pub signature: SaliencySignature,
    pub pixels: BTreeSet<usize>,
}

impl SaliencyModel {
    pub fn new(signature: SaliencySignature, pixels: BTreeSet<usize>) -> Result<Self, InstitutionError> {
        signature.check(&pixels)?;
        Ok(Self { signature, pixels })
    }

    /// The sentence asserting saliency of exactly this model's pixels.
    pub fn lift(&self) -> SaliencySentence {
        SaliencySentence { signature: self.signature.clone(), pixels: self.pixels.clone() }
    }
}

impl fmt::Display for SaliencyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.pixels.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "p{}", p + 1)?;
        }
        write!(f, "}}")
    }
}

pub fn saliency_satisfies(m: &SaliencyModel, e: &SaliencySentence) -> Result<bool, InstitutionError> {
    if m.signature != e.signature {
        return Err(InstitutionError::SignatureMismatch);
    }
    Ok(e.pixels.is_subset(&m.pixels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> SaliencySignature {
        SaliencySignature::new("S", 4)
    }

    fn set(p: &[usize]) -> BTreeSet<usize> {
        p.iter().copied().collect()
    }

    #[test]
    fn subset_semantics() {
        let m12 = SaliencyModel::new(sig(), set(&[0, 1])).unwrap();
        let m1 = SaliencyModel::new(sig(), set(&[0])).unwrap();
        let e1 = SaliencySentence::new(sig(), set(&[0])).unwrap();
        let e12 = SaliencySentence::new(sig(), set(&[0, 1])).unwrap();
        let empty = SaliencySentence::new(sig(), set(&[])).unwrap();
        assert!(saliency_satisfies(&m12, &e1).unwrap());
        assert!(!saliency_satisfies(&m1, &e12).unwrap());
        assert!(saliency_satisfies(&m1, &empty).unwrap());
        assert!(saliency_satisfies(&m1, &m1.lift()).unwrap());
    }

    #[test]
    fn printing_and_errors() {
        let e = SaliencySentence::new(sig(), set(&[0, 2])).unwrap();
        assert_eq!(e.to_string(), "S(p1) & S(p3)");
        assert_eq!(SaliencySentence::new(sig(), set(&[])).unwrap().to_string(), "T");
        assert_eq!(SaliencyModel::new(sig(), set(&[1, 3])).unwrap().to_string(), "{p2,p4}");
        assert!(SaliencyModel::new(sig(), set(&[4])).is_err());
        let other = SaliencyModel::new(SaliencySignature::new("S", 5), set(&[])).unwrap();
        assert_eq!(saliency_satisfies(&other, &e), Err(InstitutionError::SignatureMismatch));
    }
}
