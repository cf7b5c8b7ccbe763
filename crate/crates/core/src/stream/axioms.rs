//! Semantic check of the five feedback axioms on random finite instances.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::random::{random_finite_mor, random_value, MemoryKind};
use super::{
    check_equivalent, compose_streams, feedback, identity_stream, tensor_streams, Carrier, EquivOptions, EquivOutcome,
    StreamError, StreamMor, StreamOb,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    Tightening,
    Joining,
    Vanishing,
    Strength,
    /// With a memoryless slid morphism `h` and the right-hand initial state `h(s_init)`.
    Sliding,
}

impl Axiom {
    pub const ALL: [Axiom; 5] = [Axiom::Tightening, Axiom::Joining, Axiom::Vanishing, Axiom::Strength, Axiom::Sliding];
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomResult {
    pub axiom: Axiom,
    pub instances: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackReport {
    pub steps: usize,
    pub results: Vec<AxiomResult>,
}

impl FeedbackReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.failures.is_empty())
    }
}

struct Sampler {
    rng: ChaCha8Rng,
    counter: u64,
}

impl Sampler {
    fn carrier(&mut self, max: usize) -> Carrier {
        Carrier::finite(self.rng.gen_range(1..=max))
    }

    fn mor(&mut self, dom: &Carrier, cod: &Carrier) -> Result<StreamMor, StreamError> {
        let kind = MemoryKind::random(&mut self.rng);
        self.mor_of_kind(dom, cod, kind)
    }

    fn mor_of_kind(&mut self, dom: &Carrier, cod: &Carrier, kind: MemoryKind) -> Result<StreamMor, StreamError> {
        self.counter += 1;
        let seed = self.rng.gen::<u64>();
        random_finite_mor(format!("r{}", self.counter), seed, dom.clone(), cod.clone(), kind)
    }

    fn value(&mut self, c: &Carrier) -> super::Value {
        random_value(&mut self.rng, c).expect("finite carrier")
    }
}

fn id(c: &Carrier) -> StreamMor {
    identity_stream(StreamOb::Constant(c.clone()))
}

fn prod(a: &Carrier, b: &Carrier) -> Carrier {
    Carrier::product(a.clone(), b.clone())
}

/// Both sides of one axiom instance.
fn instance(axiom: Axiom, s: &mut Sampler) -> Result<(StreamMor, StreamMor), StreamError> {
    let x = s.carrier(3);
    let y = s.carrier(3);
    let st = s.carrier(2);
    match axiom {
        Axiom::Tightening => {
            let x2 = s.carrier(3);
            let y2 = s.carrier(3);
            let u = s.mor(&x2, &x)?;
            let f = s.mor(&prod(&x, &st), &prod(&y, &st))?;
            let v = s.mor(&y, &y2)?;
            let s0 = s.value(&st);
            let inner =
                compose_streams(&compose_streams(&tensor_streams(&u, &id(&st)), &f)?, &tensor_streams(&v, &id(&st)))?;
            let lhs = feedback(&inner, st.clone(), s0.clone())?;
            let rhs = compose_streams(&compose_streams(&u, &feedback(&f, st, s0)?)?, &v)?;
            Ok((lhs, rhs))
        }
        Axiom::Joining => {
            let t = s.carrier(2);
            let st_t = prod(&st, &t);
            let f = s.mor(&prod(&x, &st_t), &prod(&y, &st_t))?;
            let (s0, t0) = (s.value(&st), s.value(&t));
            let lhs = feedback(&f, st_t, super::Value::pair(s0.clone(), t0.clone()))?;
            let rhs = feedback(&feedback(&f, t, t0)?, st, s0)?;
            Ok((lhs, rhs))
        }
        Axiom::Vanishing => {
            let f = s.mor(&x, &y)?;
            Ok((feedback(&f, Carrier::Unit, super::Value::Unit)?, f))
        }
        Axiom::Strength => {
            let a = s.carrier(2);
            let b = s.carrier(2);
            let g = s.mor(&a, &b)?;
            let f = s.mor(&prod(&x, &st), &prod(&y, &st))?;
            let s0 = s.value(&st);
            let lhs = feedback(&tensor_streams(&g, &f), st.clone(), s0.clone())?;
            let rhs = tensor_streams(&g, &feedback(&f, st, s0)?);
            Ok((lhs, rhs))
        }
        Axiom::Sliding => {
            let t = s.carrier(2);
            let f = s.mor(&prod(&x, &t), &prod(&y, &st))?;
            let h = s.mor_of_kind(&st, &t, MemoryKind::Memoryless)?;
            let s0 = s.value(&st);
            let t0 = h.step(0, std::slice::from_ref(&s0))?;
            let lhs = feedback(&compose_streams(&tensor_streams(&id(&x), &h), &f)?, st, s0)?;
            let rhs = feedback(&compose_streams(&f, &tensor_streams(&id(&y), &h))?, t, t0)?;
            Ok((lhs, rhs))
        }
    }
}

/// Evaluates both sides of every axiom on `instances` sampled cases each.
pub fn check_feedback_axioms(seed: u64, instances: usize, steps: usize) -> Result<FeedbackReport, StreamError> {
    let mut results = Vec::new();
    for (ai, axiom) in Axiom::ALL.into_iter().enumerate() {
        let mut sampler = Sampler { rng: ChaCha8Rng::seed_from_u64(seed ^ ((ai as u64 + 1) << 40)), counter: 0 };
        let mut failures = Vec::new();
        for i in 0..instances {
            let (lhs, rhs) = instance(axiom, &mut sampler)?;
            let opts = EquivOptions { steps, seed: seed.wrapping_add(i as u64), ..EquivOptions::default() };
            if let EquivOutcome::Differ { inputs, left, right } = check_equivalent(&lhs, &rhs, opts)? {
                let shown: Vec<String> = inputs.iter().map(ToString::to_string).collect();
                failures.push(format!("instance {i}: inputs [{}] give {left} vs {right}", shown.join(", ")));
            }
        }
        results.push(AxiomResult { axiom, instances, failures });
    }
    Ok(FeedbackReport { steps, results })
}
