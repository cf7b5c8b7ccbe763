//! Pointwise equality of stream morphisms over finite input carriers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::session::Runner;
use super::{StreamError, StreamMor, Value};

#[derive(Debug, Clone, Copy)]
pub struct EquivOptions {
    pub steps: usize,
    /// Enumerate every input sequence when the input tree has at most this many nodes.
    pub exhaustive_limit: usize,
    /// Number of random sequences otherwise.
    pub samples: usize,
    pub seed: u64,
}

impl Default for EquivOptions {
    fn default() -> Self {
        Self { steps: 5, exhaustive_limit: 100_000, samples: 2_000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EquivOutcome {
    Equal { exhaustive: bool, sequences: usize },
    Differ { inputs: Vec<Value>, left: Value, right: Value },
}

impl EquivOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, EquivOutcome::Equal { .. })
    }
}

/// Compares `f` and `g` on input sequences of length `opts.steps`.
/// Both must share a finite constant domain.
pub fn check_equivalent(f: &StreamMor, g: &StreamMor, opts: EquivOptions) -> Result<EquivOutcome, StreamError> {
    let dom = f.dom().as_constant().ok_or_else(|| StreamError::NotFinite("indexed domain".into()))?;
    if !f.dom().agrees_with(g.dom()) || !f.cod().agrees_with(g.cod()) {
        return Err(StreamError::CarrierMismatch {
            expected: format!("{:?} -> {:?}", f.dom(), f.cod()),
            found: format!("{:?} -> {:?}", g.dom(), g.cod()),
        });
    }
    let values = dom.enumerate_values().ok_or_else(|| StreamError::NotFinite(dom.to_string()))?;
    let k = values.len();
    let mut nodes: usize = 0;
    let mut level: usize = 1;
    for _ in 0..opts.steps {
        level = level.saturating_mul(k);
        nodes = nodes.saturating_add(level);
    }
    let (mut a, mut b) = (Runner::new(f), Runner::new(g));
    if a.is_stateless() && b.is_stateless() {
        // outputs depend only on the step and the newest input
        for n in 0..opts.steps {
            for x in &values {
                let (ya, yb) = (a.feed(n, x.clone())?, b.feed(n, x.clone())?);
                if ya != yb {
                    let mut inputs = vec![values[0].clone(); n];
                    inputs.push(x.clone());
                    return Ok(EquivOutcome::Differ { inputs, left: ya, right: yb });
                }
            }
        }
        return Ok(EquivOutcome::Equal { exhaustive: true, sequences: level });
    }
    if nodes <= opts.exhaustive_limit {
        let mut path = Vec::with_capacity(opts.steps);
        if let Some(diff) = dfs(&mut a, &mut b, &values, opts.steps, &mut path)? {
            return Ok(diff);
        }
        return Ok(EquivOutcome::Equal { exhaustive: true, sequences: level });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.samples {
        let mut a = Runner::new(f);
        let mut b = Runner::new(g);
        let mut inputs = Vec::with_capacity(opts.steps);
        for n in 0..opts.steps {
            let x = values[rng.gen_range(0..k)].clone();
            inputs.push(x.clone());
            let (ya, yb) = (a.feed(n, x.clone())?, b.feed(n, x)?);
            if ya != yb {
                return Ok(EquivOutcome::Differ { inputs, left: ya, right: yb });
            }
        }
    }
    Ok(EquivOutcome::Equal { exhaustive: false, sequences: opts.samples })
}

/// Depth-first walk over all input sequences, rewinding both runners
/// after each branch instead of copying them.
fn dfs(
    a: &mut Runner,
    b: &mut Runner,
    values: &[Value],
    remaining: usize,
    path: &mut Vec<Value>,
) -> Result<Option<EquivOutcome>, StreamError> {
    if remaining == 0 {
        return Ok(None);
    }
    let n = path.len();
    for x in values {
        let (ya, yb) = (a.feed(n, x.clone())?, b.feed(n, x.clone())?);
        path.push(x.clone());
        if ya != yb {
            return Ok(Some(EquivOutcome::Differ { inputs: path.clone(), left: ya, right: yb }));
        }
        if let Some(d) = dfs(a, b, values, remaining - 1, path)? {
            return Ok(Some(d));
        }
        path.pop();
        a.undo();
        b.undo();
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::{random_finite_mor, Carrier, MemoryKind, StreamOb};

    fn late_flip(at: usize) -> StreamMor {
        let c = StreamOb::Constant(Carrier::finite(2));
        StreamMor::pointwise("flip", c.clone(), c, move |n, x| match x {
            Value::Enum(i) if n == at => Ok(Value::Enum(1 - i)),
            other => Ok(other.clone()),
        })
    }

    #[test]
    fn stateless_difference_at_a_late_step() {
        let id = crate::stream::identity_stream(StreamOb::Constant(Carrier::finite(2)));
        match check_equivalent(&id, &late_flip(3), EquivOptions::default()).unwrap() {
            EquivOutcome::Differ { inputs, .. } => assert_eq!(inputs.len(), 4),
            other => panic!("expected a difference, got {other:?}"),
        }
        assert!(check_equivalent(&id, &late_flip(7), EquivOptions::default()).unwrap().holds());
    }

    #[test]
    fn history_dependence_is_found_exhaustively() {
        let c = Carrier::finite(3);
        let f = random_finite_mor("f", 1, c.clone(), c.clone(), MemoryKind::FullHistory).unwrap();
        let g = random_finite_mor("g", 2, c.clone(), c, MemoryKind::FullHistory).unwrap();
        assert!(check_equivalent(&f, &f, EquivOptions::default()).unwrap().holds());
        assert!(!check_equivalent(&f, &g, EquivOptions::default()).unwrap().holds());
    }
}
