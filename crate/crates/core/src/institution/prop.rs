//! The institution of propositional logic.

use std::collections::BTreeMap;
use std::fmt;

use super::InstitutionError;

/// Ordered set of propositional symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropSignature {
    symbols: Vec<String>,
}

impl PropSignature {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self, InstitutionError> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        for (i, s) in symbols.iter().enumerate() {
            if !is_symbol(s) {
                return Err(InstitutionError::InvalidSymbol(s.clone()));
            }
            if symbols[..i].contains(s) {
                return Err(InstitutionError::DuplicateSymbol(s.clone()));
            }
        }
        Ok(Self { symbols })
    }

    /// One symbol per line; blank lines and `#` comments ignored.
    pub fn parse_file(text: &str) -> Result<Self, InstitutionError> {
        Self::new(text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty()))
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.index_of(symbol).is_some()
    }
}

fn is_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
        && s != "T"
}

/// Total map between signatures, stored as target indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureMorphism {
    source: PropSignature,
    target: PropSignature,
    map: Vec<usize>,
}

impl SignatureMorphism {
    pub fn new(
        source: PropSignature,
        target: PropSignature,
        pairs: &BTreeMap<String, String>,
    ) -> Result<Self, InstitutionError> {
        for key in pairs.keys() {
            if !source.contains(key) {
                return Err(InstitutionError::SymbolNotInSource(key.clone()));
            }
        }
        let map = source
            .symbols()
            .iter()
            .map(|s| {
                let dst = pairs.get(s).ok_or_else(|| InstitutionError::NonTotalMorphism(s.clone()))?;
                target.index_of(dst).ok_or_else(|| InstitutionError::SymbolNotInTarget(dst.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { source, target, map })
    }

    pub fn from_indices(
        source: PropSignature,
        target: PropSignature,
        map: Vec<usize>,
    ) -> Result<Self, InstitutionError> {
        if map.len() != source.len() {
            return Err(InstitutionError::NonTotalMorphism(format!(
                "{} of {} symbols mapped",
                map.len(),
                source.len()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&i| i >= target.len()) {
            return Err(InstitutionError::SymbolNotInTarget(format!("index {bad}")));
        }
        Ok(Self { source, target, map })
    }

    pub fn identity(sig: &PropSignature) -> Self {
        Self { source: sig.clone(), target: sig.clone(), map: (0..sig.len()).collect() }
    }

    /// Lines `src=dst`; the target signature is the set of right-hand sides in
    /// order of first appearance unless given explicitly.
    pub fn parse_file(
        text: &str,
        source: &PropSignature,
        target: Option<&PropSignature>,
    ) -> Result<Self, InstitutionError> {
        let mut pairs = BTreeMap::new();
        let mut dsts: Vec<String> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (src, dst) = line.split_once('=').ok_or_else(|| InstitutionError::Parse {
                position: lineno + 1,
                message: format!("expected `src=dst`, found `{line}`"),
            })?;
            let (src, dst) = (src.trim().to_string(), dst.trim().to_string());
            if pairs.insert(src.clone(), dst.clone()).is_some() {
                return Err(InstitutionError::Parse {
                    position: lineno + 1,
                    message: format!("symbol `{src}` mapped twice"),
                });
            }
            if !dsts.contains(&dst) {
                dsts.push(dst);
            }
        }
        let target = match target {
            Some(t) => t.clone(),
            None => PropSignature::new(dsts)?,
        };
        Self::new(source.clone(), target, &pairs)
    }

    pub fn source(&self) -> &PropSignature {
        &self.source
    }

    pub fn target(&self) -> &PropSignature {
        &self.target
    }

    pub fn apply(&self, symbol: &str) -> Option<&str> {
        self.source.index_of(symbol).map(|i| self.target.symbols()[self.map[i]].as_str())
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &SignatureMorphism) -> Result<SignatureMorphism, InstitutionError> {
        if self.target != next.source {
            return Err(InstitutionError::SignatureMismatch);
        }
        Ok(SignatureMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            map: self.map.iter().map(|&i| next.map[i]).collect(),
        })
    }

    /// Every total function from `source` symbols to `target` symbols.
    pub fn enumerate_all(source: &PropSignature, target: &PropSignature) -> Vec<SignatureMorphism> {
        let (n, m) = (source.len(), target.len());
        if n > 0 && m == 0 {
            return Vec::new();
        }
        let total = m.pow(n as u32);
        (0..total)
            .map(|mut code| {
                let map = (0..n)
                    .map(|_| {
                        let d = code % m;
                        code /= m;
                        d
                    })
                    .collect();
                SignatureMorphism { source: source.clone(), target: target.clone(), map }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sentence {
    Var(String),
    Top,
    Not(Box<Sentence>),
    And(Box<Sentence>, Box<Sentence>),
    Or(Box<Sentence>, Box<Sentence>),
    Implies(Box<Sentence>, Box<Sentence>),
}

impl Sentence {
    pub fn var(s: impl Into<String>) -> Self {
        Sentence::Var(s.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(s: Sentence) -> Self {
        Sentence::Not(Box::new(s))
    }

    pub fn and(a: Sentence, b: Sentence) -> Self {
        Sentence::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Sentence, b: Sentence) -> Self {
        Sentence::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Sentence, b: Sentence) -> Self {
        Sentence::Implies(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; `Top` when empty.
    pub fn conjunction(parts: impl IntoIterator<Item = Sentence>) -> Self {
        parts.into_iter().reduce(Sentence::and).unwrap_or(Sentence::Top)
    }

    /// Height of the syntax tree; atoms have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Sentence::Var(_) | Sentence::Top => 1,
            Sentence::Not(a) => 1 + a.depth(),
            Sentence::And(a, b) | Sentence::Or(a, b) | Sentence::Implies(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn symbols(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Sentence::Var(s) => out.push(s),
            Sentence::Top => {}
            Sentence::Not(a) => a.collect_symbols(out),
            Sentence::And(a, b) | Sentence::Or(a, b) | Sentence::Implies(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
        }
    }

    pub fn is_well_formed_over(&self, sig: &PropSignature) -> bool {
        self.symbols().iter().all(|s| sig.contains(s))
    }

    pub fn parse(text: &str) -> Result<Self, InstitutionError> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0 };
        let s = p.implication()?;
        match p.tokens.get(p.pos) {
            None => Ok(s),
            Some((at, tok)) => Err(InstitutionError::Parse { position: *at, message: format!("unexpected `{tok}`") }),
        }
    }

    /// Every sentence over `symbols` of depth at most `depth`, in a fixed order.
    pub fn enumerate(symbols: &[String], depth: usize) -> Vec<Sentence> {
        if depth == 0 {
            return Vec::new();
        }
        let mut levels: Vec<Vec<Sentence>> = Vec::new();
        let mut atoms: Vec<Sentence> = symbols.iter().map(|s| Sentence::Var(s.clone())).collect();
        atoms.push(Sentence::Top);
        levels.push(atoms);
        // levels[d] holds sentences of depth exactly d + 1
        for d in 1..depth {
            let shallower: Vec<&Sentence> = levels.iter().flatten().collect();
            let previous = &levels[d - 1];
            let mut next = Vec::new();
            for s in previous {
                next.push(Sentence::not(s.clone()));
            }
            for a in &shallower {
                for b in &shallower {
                    let a_prev = a.depth() == d;
                    let b_prev = b.depth() == d;
                    if !(a_prev || b_prev) {
                        continue;
                    }
                    next.push(Sentence::and((*a).clone(), (*b).clone()));
                    next.push(Sentence::or((*a).clone(), (*b).clone()));
                    next.push(Sentence::implies((*a).clone(), (*b).clone()));
                }
            }
            levels.push(next);
        }
        levels.into_iter().flatten().collect()
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        let (own, open) = match self {
            Sentence::Implies(..) => (0, prec > 0),
            Sentence::Or(..) => (1, prec > 1),
            Sentence::And(..) => (2, prec > 2),
            _ => (3, false),
        };
        if open {
            write!(f, "(")?;
        }
        match self {
            Sentence::Var(s) => write!(f, "{s}")?,
            Sentence::Top => write!(f, "T")?,
            Sentence::Not(a) => {
                write!(f, "~")?;
                a.fmt_prec(f, 3)?;
            }
            Sentence::Implies(a, b) => {
                a.fmt_prec(f, own + 1)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, own)?;
            }
            Sentence::Or(a, b) => {
                a.fmt_prec(f, own)?;
                write!(f, " | ")?;
                b.fmt_prec(f, own + 1)?;
            }
            Sentence::And(a, b) => {
                a.fmt_prec(f, own)?;
                write!(f, " & ")?;
                b.fmt_prec(f, own + 1)?;
            }
        }
        if open {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, String)>, InstitutionError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (at, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '-' {
            if chars.get(i + 1).map(|&(_, c)| c) == Some('>') {
                out.push((at, "->".to_string()));
                i += 2;
            } else {
                return Err(InstitutionError::Parse { position: at, message: "expected `->`".to_string() });
            }
        } else if "~&|()".contains(c) {
            out.push((at, c.to_string()));
            i += 1;
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            out.push((at, chars[start..i].iter().map(|&(_, c)| c).collect()));
        } else {
            return Err(InstitutionError::Parse { position: at, message: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, String)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&str> {
        self.tokens.get(self.pos).map(|(_, t)| t.as_str())
    }

    fn end_position(&self) -> usize {
        self.tokens.last().map(|(at, t)| at + t.len()).unwrap_or(0)
    }

    fn implication(&mut self) -> Result<Sentence, InstitutionError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some("->") {
            self.pos += 1;
            let rhs = self.implication()?;
            return Ok(Sentence::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Sentence, InstitutionError> {
        let mut acc = self.conjunction()?;
        while self.peek() == Some("|") {
            self.pos += 1;
            acc = Sentence::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Sentence, InstitutionError> {
        let mut acc = self.unary()?;
        while self.peek() == Some("&") {
            self.pos += 1;
            acc = Sentence::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Sentence, InstitutionError> {
        let Some((at, tok)) = self.tokens.get(self.pos).cloned() else {
            return Err(InstitutionError::Parse {
                position: self.end_position(),
                message: "unexpected end of sentence".to_string(),
            });
        };
        self.pos += 1;
        match tok.as_str() {
            "~" => Ok(Sentence::not(self.unary()?)),
            "T" => Ok(Sentence::Top),
            "(" => {
                let inner = self.implication()?;
                if self.peek() != Some(")") {
                    return Err(InstitutionError::Parse {
                        position: self.tokens.get(self.pos).map(|t| t.0).unwrap_or_else(|| self.end_position()),
                        message: "expected `)`".to_string(),
                    });
                }
                self.pos += 1;
                Ok(inner)
            }
            t if t.starts_with(|c: char| c.is_alphabetic() || c == '_') => Ok(Sentence::Var(tok)),
            _ => Err(InstitutionError::Parse { position: at, message: format!("unexpected `{tok}`") }),
        }
    }
}

/// Truth assignment over a signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Valuation {
    signature: PropSignature,
    values: Vec<bool>,
}

impl Valuation {
    pub fn new(signature: PropSignature, values: Vec<bool>) -> Result<Self, InstitutionError> {
        if values.len() != signature.len() {
            return Err(InstitutionError::SignatureMismatch);
        }
        Ok(Self { signature, values })
    }

    pub fn from_map(signature: PropSignature, map: &BTreeMap<String, bool>) -> Result<Self, InstitutionError> {
        let values = signature
            .symbols()
            .iter()
            .map(|s| map.get(s).copied().ok_or_else(|| InstitutionError::NonTotalMorphism(s.clone())))
            .collect::<Result<_, _>>()?;
        Ok(Self { signature, values })
    }

    pub fn signature(&self) -> &PropSignature {
        &self.signature
    }

    pub fn get(&self, symbol: &str) -> Option<bool> {
        self.signature.index_of(symbol).map(|i| self.values[i])
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn enumerate_all(sig: &PropSignature) -> Vec<Valuation> {
        let n = sig.len();
        (0..1usize << n)
            .map(|bits| Valuation { signature: sig.clone(), values: (0..n).map(|i| bits >> i & 1 == 1).collect() })
            .collect()
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (s, v)) in self.signature.symbols().iter().zip(&self.values).enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}={}", u8::from(*v))?;
        }
        write!(f, "}}")
    }
}

/// Sentence translation along a signature morphism.
pub fn sen_translate(rho: &SignatureMorphism, e: &Sentence) -> Result<Sentence, InstitutionError> {
    Ok(match e {
        Sentence::Var(s) => {
            Sentence::Var(rho.apply(s).ok_or_else(|| InstitutionError::SymbolNotInSource(s.clone()))?.to_string())
        }
        Sentence::Top => Sentence::Top,
        Sentence::Not(a) => Sentence::not(sen_translate(rho, a)?),
        Sentence::And(a, b) => Sentence::and(sen_translate(rho, a)?, sen_translate(rho, b)?),
        Sentence::Or(a, b) => Sentence::or(sen_translate(rho, a)?, sen_translate(rho, b)?),
        Sentence::Implies(a, b) => Sentence::implies(sen_translate(rho, a)?, sen_translate(rho, b)?),
    })
}

/// Model reduct: `(reduct m)(s) = m(rho(s))`.
pub fn mod_reduct(rho: &SignatureMorphism, m: &Valuation) -> Result<Valuation, InstitutionError> {
    if m.signature != rho.target {
        return Err(InstitutionError::SignatureMismatch);
    }
    Ok(Valuation { signature: rho.source.clone(), values: rho.map.iter().map(|&i| m.values[i]).collect() })
}

pub fn satisfies(m: &Valuation, e: &Sentence) -> Result<bool, InstitutionError> {
    Ok(match e {
        Sentence::Var(s) => m.get(s).ok_or(InstitutionError::SignatureMismatch)?,
        Sentence::Top => true,
        Sentence::Not(a) => !satisfies(m, a)?,
        Sentence::And(a, b) => satisfies(m, a)? && satisfies(m, b)?,
        Sentence::Or(a, b) => satisfies(m, a)? || satisfies(m, b)?,
        Sentence::Implies(a, b) => !satisfies(m, a)? || satisfies(m, b)?,
    })
}

/// `m' |= rho(e)` iff `reduct(m') |= e`.
pub fn check_satisfaction_condition(
    rho: &SignatureMorphism,
    e: &Sentence,
    m_target: &Valuation,
) -> Result<bool, InstitutionError> {
    let translated = sen_translate(rho, e)?;
    let lhs = satisfies(m_target, &translated)?;
    let rhs = satisfies(&mod_reduct(rho, m_target)?, e)?;
    Ok(lhs == rhs)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SatisfactionReport {
    pub morphisms: usize,
    pub models: usize,
    pub checks: u64,
    /// (morphism, sentence, model) triples where the condition failed
    pub failures: Vec<String>,
}

/// Checks the satisfaction condition for one morphism against every target
/// model and every source sentence up to `depth`.
pub fn check_morphism_exhaustive(
    rho: &SignatureMorphism,
    depth: usize,
) -> Result<SatisfactionReport, InstitutionError> {
    let sentences = Sentence::enumerate(rho.source().symbols(), depth);
    let translated = sentences.iter().map(|e| sen_translate(rho, e)).collect::<Result<Vec<_>, _>>()?;
    let models = Valuation::enumerate_all(rho.target());
    let mut report = SatisfactionReport { morphisms: 1, models: models.len(), ..Default::default() };
    for m in &models {
        let reduct = mod_reduct(rho, m)?;
        for (e, te) in sentences.iter().zip(&translated) {
            report.checks += 1;
            if satisfies(m, te)? != satisfies(&reduct, e)? {
                report.failures.push(format!("rho={rho:?} e={e} m={m}"));
            }
        }
    }
    Ok(report)
}
