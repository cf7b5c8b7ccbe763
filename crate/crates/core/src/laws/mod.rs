//! Law suites checked by pointwise stream evaluation under random finite
//! translators.

pub mod sample;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagram::{diagram_eq, MorTerm, ObExpr, Presentation};
use crate::stream::{
    check_equivalent, check_feedback_axioms, prefix_eval, prefix_eval_naive, EquivOptions, EquivOutcome, StreamError,
    Value,
};
use crate::translator::{random_finite_translator, TranslatorError};
use sample::TermSampler;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Category,
    Monoidal,
    Cartesian,
    Feedback,
    Streams,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Category, Suite::Monoidal, Suite::Cartesian, Suite::Feedback, Suite::Streams];
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "category" => Suite::Category,
            "monoidal" => Suite::Monoidal,
            "cartesian" => Suite::Cartesian,
            "feedback" => Suite::Feedback,
            "streams" => Suite::Streams,
            other => return Err(format!("unknown suite `{other}`")),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Category => "category",
            Suite::Monoidal => "monoidal",
            Suite::Cartesian => "cartesian",
            Suite::Feedback => "feedback",
            Suite::Streams => "streams",
        };
        f.write_str(s)
    }
}

/// An equation between two terms over generators declared in `pres`.
#[derive(Debug, Clone)]
pub struct Law {
    pub suite: Suite,
    pub name: &'static str,
    pub pres: Presentation,
    pub lhs: MorTerm,
    pub rhs: MorTerm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawOutcome {
    pub suite: Suite,
    pub name: String,
    pub cases: usize,
    /// every case was decided by enumerating all input sequences
    pub exhaustive: bool,
    pub failures: Vec<String>,
}

impl LawOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LawConfig {
    pub seed: u64,
    /// translators (or instances) sampled per law
    pub samples: usize,
    pub steps: usize,
    /// largest finite carrier
    pub max_carrier: usize,
    /// Largest input set of a law. Translators whose carriers multiply past
    /// it are redrawn, which keeps every check exhaustive.
    pub max_domain: usize,
}

impl Default for LawConfig {
    fn default() -> Self {
        Self { seed: 0, samples: 1000, steps: 5, max_carrier: 3, max_domain: 9 }
    }
}

fn ob(atoms: &[&str]) -> ObExpr {
    ObExpr::from_atoms(atoms)
}

fn g(name: &str, dom: &str, cod: &str) -> MorTerm {
    MorTerm::gen(name, ob(&[dom]), ob(&[cod]))
}

fn id(atoms: &[&str]) -> MorTerm {
    MorTerm::id(ob(atoms))
}

fn c(a: MorTerm, b: MorTerm) -> MorTerm {
    MorTerm::compose(a, b)
}

fn t(a: MorTerm, b: MorTerm) -> MorTerm {
    MorTerm::tensor(a, b)
}

/// Single-wire generators over objects A..F:
/// `f: A->B, g: B->C, h: C->D, k: E->F, f2: B->C, k2: F->A`.
fn law_presentation() -> Presentation {
    let mut p = Presentation::new();
    for o in ["A", "B", "C", "D", "E", "F"] {
        p.add_ob(o).expect("fresh");
    }
    for (n, d, cd) in
        [("f", "A", "B"), ("g", "B", "C"), ("h", "C", "D"), ("k", "E", "F"), ("f2", "B", "C"), ("k2", "F", "A")]
    {
        p.add_mor(n, ob(&[d]), ob(&[cd])).expect("fresh");
    }
    p
}

/// The equations of one suite; empty for suites checked by other means.
pub fn law_schemas(suite: Suite) -> Vec<Law> {
    let pres = law_presentation();
    let (f, gg, h, k) = (g("f", "A", "B"), g("g", "B", "C"), g("h", "C", "D"), g("k", "E", "F"));
    let (f2, k2) = (g("f2", "B", "C"), g("k2", "F", "A"));
    let (a, e) = (ob(&["A"]), ob(&["E"]));
    let law = |name, lhs, rhs| Law { suite, name, pres: pres.clone(), lhs, rhs };
    match suite {
        Suite::Category => vec![
            law("left unit", c(id(&["A"]), f.clone()), f.clone()),
            law("right unit", c(f.clone(), id(&["B"])), f.clone()),
            law("associativity", c(c(f.clone(), gg.clone()), h.clone()), c(f.clone(), c(gg.clone(), h.clone()))),
        ],
        Suite::Monoidal => vec![
            law(
                "interchange",
                c(t(f.clone(), k.clone()), t(f2.clone(), k2.clone())),
                t(c(f.clone(), f2.clone()), c(k.clone(), k2.clone())),
            ),
            law("tensor associativity", t(t(f.clone(), k.clone()), h.clone()), t(f.clone(), t(k.clone(), h.clone()))),
            law("tensor unit", t(f.clone(), id(&[])), f.clone()),
            law("tensor of identities", t(id(&["A"]), id(&["E"])), id(&["A", "E"])),
            law(
                "symmetry involution",
                c(MorTerm::Sym(ob(&["A"]), ob(&["E"])), MorTerm::Sym(ob(&["E"]), ob(&["A"]))),
                id(&["A", "E"]),
            ),
            law(
                "symmetry naturality",
                c(t(f.clone(), k.clone()), MorTerm::Sym(ob(&["B"]), ob(&["F"]))),
                c(MorTerm::Sym(ob(&["A"]), ob(&["E"])), t(k.clone(), f.clone())),
            ),
        ],
        Suite::Cartesian => vec![
            law(
                "coassociativity",
                c(MorTerm::Copy(a.clone()), t(id(&["A"]), MorTerm::Copy(a.clone()))),
                c(MorTerm::Copy(a.clone()), t(MorTerm::Copy(a.clone()), id(&["A"]))),
            ),
            law("left counit", c(MorTerm::Copy(a.clone()), t(MorTerm::Discard(a.clone()), id(&["A"]))), id(&["A"])),
            law("right counit", c(MorTerm::Copy(a.clone()), t(id(&["A"]), MorTerm::Discard(a.clone()))), id(&["A"])),
            law(
                "cocommutativity",
                c(MorTerm::Copy(a.clone()), MorTerm::Sym(a.clone(), a.clone())),
                MorTerm::Copy(a.clone()),
            ),
            law(
                "copy naturality",
                c(f.clone(), MorTerm::Copy(ob(&["B"]))),
                c(MorTerm::Copy(a.clone()), t(f.clone(), f.clone())),
            ),
            law("discard naturality", c(f.clone(), MorTerm::Discard(ob(&["B"]))), MorTerm::Discard(a.clone())),
            law(
                "copy coherence",
                MorTerm::Copy(ob(&["A", "E"])),
                c(
                    t(MorTerm::Copy(a.clone()), MorTerm::Copy(e.clone())),
                    t(t(id(&["A"]), MorTerm::Sym(a.clone(), e.clone())), id(&["E"])),
                ),
            ),
            law("discard coherence", MorTerm::Discard(ob(&["A", "E"])), t(MorTerm::Discard(a), MorTerm::Discard(e))),
            law("copy on unit", MorTerm::Copy(ObExpr::Unit), id(&[])),
            law("discard on unit", MorTerm::Discard(ObExpr::Unit), id(&[])),
        ],
        Suite::Feedback | Suite::Streams => Vec::new(),
    }
}

/// Checks one equation under `cfg.samples` random finite translators.
pub fn check_law(law: &Law, cfg: &LawConfig) -> Result<LawOutcome, TranslatorError> {
    let mut failures = Vec::new();
    let mut exhaustive = true;
    match diagram_eq(&law.lhs, &law.rhs) {
        Ok(true) => {}
        Ok(false) => failures.push("sides are not equal as diagrams".to_string()),
        Err(e) => failures.push(format!("diagram comparison failed: {e}")),
    }
    for i in 0..cfg.samples {
        let mut seed = cfg.seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
        let (l, r) = loop {
            let tr = random_finite_translator(&law.pres, seed, cfg.max_carrier);
            let l = tr.interpret(&law.lhs)?;
            let size = l.dom().as_constant().and_then(|c| c.size()).unwrap_or(usize::MAX);
            if size <= cfg.max_domain {
                break (l, tr.interpret(&law.rhs)?);
            }
            seed = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
        };
        let opts = EquivOptions { steps: cfg.steps, seed, ..EquivOptions::default() };
        match check_equivalent(&l, &r, opts)? {
            EquivOutcome::Equal { exhaustive: e, .. } => exhaustive &= e,
            EquivOutcome::Differ { inputs, left, right } => {
                failures.push(format!("translator {seed}: inputs {} give {left} vs {right}", show(&inputs)))
            }
        }
    }
    Ok(LawOutcome { suite: law.suite, name: law.name.to_string(), cases: cfg.samples, exhaustive, failures })
}

fn show(vs: &[Value]) -> String {
    format!("[{}]", vs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
}

/// Stream-level properties on random terms: incremental evaluation agrees
/// with recomputation, outputs are prefix-consistent, and sessions are
/// deterministic.
fn stream_properties(cfg: &LawConfig) -> Result<Vec<LawOutcome>, TranslatorError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut sampler = TermSampler::free(&["A", "B", "C"]);
    sampler.max_width = 3;
    let names = ["incremental equals recomputation", "prefix consistency", "determinism"];
    let mut failures: [Vec<String>; 3] = Default::default();
    for i in 0..cfg.samples {
        let term = sampler.term_with_feedback(&mut rng);
        let tr = random_finite_translator(sampler.presentation(), rng.gen(), cfg.max_carrier);
        let m = tr.interpret(&term)?;
        let dom = m.dom().as_constant().cloned().ok_or_else(|| StreamError::NotFinite("indexed".into()))?;
        let values = dom.enumerate_values().ok_or_else(|| StreamError::NotFinite(dom.to_string()))?;
        let inputs: Vec<Value> = (0..cfg.steps).map(|_| values[rng.gen_range(0..values.len())].clone()).collect();
        let fast = prefix_eval(&m, &inputs)?;
        if fast != prefix_eval_naive(&m, &inputs)? {
            failures[0].push(format!("case {i}: {term}"));
        }
        let cut = rng.gen_range(0..=inputs.len());
        if prefix_eval(&m, &inputs[..cut])? != fast[..cut] {
            failures[1].push(format!("case {i}: {term} cut at {cut}"));
        }
        if prefix_eval(&m, &inputs)? != fast {
            failures[2].push(format!("case {i}: {term}"));
        }
    }
    Ok(names
        .into_iter()
        .zip(failures)
        .map(|(name, failures)| LawOutcome {
            suite: Suite::Streams,
            name: name.to_string(),
            cases: cfg.samples,
            exhaustive: false,
            failures,
        })
        .collect())
}

pub fn run_suite(suite: Suite, cfg: &LawConfig) -> Result<Vec<LawOutcome>, TranslatorError> {
    match suite {
        Suite::Feedback => {
            let report = check_feedback_axioms(cfg.seed, cfg.samples, cfg.steps)?;
            Ok(report
                .results
                .into_iter()
                .map(|r| LawOutcome {
                    suite,
                    name: r.axiom.to_string(),
                    cases: r.instances,
                    exhaustive: true,
                    failures: r.failures,
                })
                .collect())
        }
        Suite::Streams => stream_properties(cfg),
        _ => law_schemas(suite).iter().map(|l| check_law(l, cfg)).collect(),
    }
}
