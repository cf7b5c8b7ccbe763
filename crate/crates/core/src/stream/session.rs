use super::mor::{Node, PointFn, StepFn, StreamOb};
use super::{StreamError, StreamMor, Value};

/// Incremental evaluator mirroring the structure of a [`StreamMor`].
/// Each primitive keeps its own input history and each feedback node its
/// current state, so step `n` costs one pass over the tree.
#[derive(Clone)]
pub(crate) enum Runner {
    Identity,
    Copy,
    Discard,
    Symmetry(StreamOb),
    Compose(Box<Runner>, Box<Runner>),
    Tensor(StreamOb, Box<Runner>, Box<Runner>),
    /// `states` holds the initial state and one entry per step, newest last
    Feedback {
        inner: Box<Runner>,
        state_arity: usize,
        states: Vec<Value>,
    },
    Pointwise(PointFn),
    Primitive {
        f: StepFn,
        history: Vec<Value>,
    },
}

impl Runner {
    pub(crate) fn new(m: &StreamMor) -> Self {
        match m.node() {
            Node::Identity => Runner::Identity,
            Node::Copy => Runner::Copy,
            Node::Discard => Runner::Discard,
            Node::Symmetry { left } => Runner::Symmetry(left.clone()),
            Node::Compose(f, g) => Runner::Compose(Box::new(Runner::new(f)), Box::new(Runner::new(g))),
            Node::Tensor(f, g) => Runner::Tensor(f.dom().clone(), Box::new(Runner::new(f)), Box::new(Runner::new(g))),
            Node::Feedback { inner, state, init } => Runner::Feedback {
                inner: Box::new(Runner::new(inner)),
                state_arity: state.arity(),
                states: vec![init.clone()],
            },
            Node::Pointwise { f, .. } => Runner::Pointwise(f.clone()),
            Node::Primitive { f, .. } => Runner::Primitive { f: f.clone(), history: Vec::new() },
        }
    }

    pub(crate) fn feed(&mut self, n: usize, x: Value) -> Result<Value, StreamError> {
        match self {
            Runner::Identity => Ok(x),
            Runner::Copy => Ok(Value::pair(x.clone(), x)),
            Runner::Discard => Ok(Value::Unit),
            Runner::Symmetry(left) => {
                let (a, b) = x.split_at(left.arity_at(n));
                Ok(Value::pair(b, a))
            }
            Runner::Compose(f, g) => {
                let mid = f.feed(n, x)?;
                g.feed(n, mid)
            }
            Runner::Tensor(left_dom, f, g) => {
                let (a, b) = x.split_at(left_dom.arity_at(n));
                Ok(Value::pair(f.feed(n, a)?, g.feed(n, b)?))
            }
            Runner::Feedback { inner, state_arity, states } => {
                let current = states.last().expect("initial state").clone();
                let out = inner.feed(n, Value::pair(x, current))?;
                let keep = out.factor_count() - *state_arity;
                let (y, s) = out.split_at(keep);
                states.push(s);
                Ok(y)
            }
            Runner::Pointwise(f) => f(n, &x),
            Runner::Primitive { f, history } => {
                history.push(x);
                f(n, history)
            }
        }
    }

    /// True when no node keeps history or state between steps.
    pub(crate) fn is_stateless(&self) -> bool {
        match self {
            Runner::Compose(f, g) | Runner::Tensor(_, f, g) => f.is_stateless() && g.is_stateless(),
            Runner::Feedback { .. } | Runner::Primitive { .. } => false,
            _ => true,
        }
    }

    /// Reverts the most recent `feed`.
    pub(crate) fn undo(&mut self) {
        match self {
            Runner::Compose(f, g) | Runner::Tensor(_, f, g) => {
                g.undo();
                f.undo();
            }
            Runner::Feedback { inner, states, .. } => {
                if states.len() > 1 {
                    states.pop();
                }
                inner.undo();
            }
            Runner::Primitive { history, .. } => {
                history.pop();
            }
            _ => {}
        }
    }

    fn collect_states<'a>(&'a self, out: &mut Vec<&'a Value>) {
        match self {
            Runner::Compose(f, g) | Runner::Tensor(_, f, g) => {
                f.collect_states(out);
                g.collect_states(out);
            }
            Runner::Feedback { inner, states, .. } => {
                out.push(states.last().expect("initial state"));
                inner.collect_states(out);
            }
            _ => {}
        }
    }
}

/// Drives a stream morphism one input at a time, recording the trace.
#[derive(Clone)]
pub struct EvalSession {
    morphism: StreamMor,
    runner: Runner,
    inputs: Vec<Value>,
    outputs: Vec<Value>,
}

impl EvalSession {
    pub fn new(morphism: &StreamMor) -> Self {
        Self { runner: Runner::new(morphism), morphism: morphism.clone(), inputs: Vec::new(), outputs: Vec::new() }
    }

    /// Index of the next step.
    pub fn step_index(&self) -> usize {
        self.inputs.len()
    }

    pub fn feed(&mut self, x: Value) -> Result<Value, StreamError> {
        let n = self.step_index();
        let carrier = self.morphism.dom().at(n);
        if !carrier.admits(&x) {
            return Err(StreamError::CarrierMismatch { expected: carrier.to_string(), found: x.to_string() });
        }
        let y = self.runner.feed(n, x.clone())?;
        self.inputs.push(x);
        self.outputs.push(y.clone());
        Ok(y)
    }

    pub fn inputs(&self) -> &[Value] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Value] {
        &self.outputs
    }

    /// Current feedback states, outermost loop first.
    pub fn feedback_states(&self) -> Vec<Value> {
        let mut out = Vec::new();
        self.runner.collect_states(&mut out);
        out.into_iter().cloned().collect()
    }

    /// `step <n>: in=<value> out=<value>` per recorded step.
    pub fn trace_lines(&self) -> Vec<String> {
        self.inputs
            .iter()
            .zip(&self.outputs)
            .enumerate()
            .map(|(n, (x, y))| format!("step {n}: in={x} out={y}"))
            .collect()
    }
}

/// Outputs `y_0..=y_n` for inputs `x_0..=x_n`.
pub fn prefix_eval(f: &StreamMor, inputs: &[Value]) -> Result<Vec<Value>, StreamError> {
    let mut session = EvalSession::new(f);
    for x in inputs {
        session.feed(x.clone())?;
    }
    Ok(session.outputs)
}

/// Outputs computed independently per step with [`StreamMor::step`].
pub fn prefix_eval_naive(f: &StreamMor, inputs: &[Value]) -> Result<Vec<Value>, StreamError> {
    (0..inputs.len()).map(|n| f.step(n, &inputs[..=n])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::{random_finite_mor, Carrier, MemoryKind};

    #[test]
    fn undo_rewinds_histories_and_states() {
        let c = Carrier::finite(3);
        let st = Carrier::finite(2);
        let inner = random_finite_mor(
            "f",
            9,
            Carrier::product(c.clone(), st.clone()),
            Carrier::product(c.clone(), st.clone()),
            MemoryKind::FullHistory,
        )
        .unwrap();
        let m = crate::stream::feedback(&inner, st, Value::Enum(1)).unwrap();
        let xs: Vec<Value> = [2, 0, 1, 1].iter().map(|&i| Value::Enum(i)).collect();
        let mut r = Runner::new(&m);
        for (n, x) in [0, 1, 2].iter().map(|&i| Value::Enum(i)).enumerate() {
            r.feed(n, x).unwrap();
        }
        for _ in 0..3 {
            r.undo();
        }
        let rewound: Vec<Value> = xs.iter().enumerate().map(|(n, x)| r.feed(n, x.clone()).unwrap()).collect();
        assert_eq!(rewound, prefix_eval(&m, &xs).unwrap());
    }
}
