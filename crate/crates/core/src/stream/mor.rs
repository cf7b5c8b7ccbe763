use std::fmt;
use std::sync::Arc;

use super::{Carrier, StreamError, Value};

pub type StepFn = Arc<dyn Fn(usize, &[Value]) -> Result<Value, StreamError> + Send + Sync>;
pub type PointFn = Arc<dyn Fn(usize, &Value) -> Result<Value, StreamError> + Send + Sync>;

/// A stream of carriers `(X_0, X_1, ...)`.
#[derive(Clone)]
pub enum StreamOb {
    Constant(Carrier),
    Indexed(Arc<dyn Fn(usize) -> Carrier + Send + Sync>),
}

impl StreamOb {
    pub fn constant(c: Carrier) -> Self {
        StreamOb::Constant(c)
    }

    pub fn unit() -> Self {
        StreamOb::Constant(Carrier::Unit)
    }

    pub fn at(&self, n: usize) -> Carrier {
        match self {
            StreamOb::Constant(c) => c.clone(),
            StreamOb::Indexed(f) => f(n),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, StreamOb::Constant(_))
    }

    pub fn as_constant(&self) -> Option<&Carrier> {
        match self {
            StreamOb::Constant(c) => Some(c),
            StreamOb::Indexed(_) => None,
        }
    }

    pub fn product(a: &StreamOb, b: &StreamOb) -> StreamOb {
        match (a, b) {
            (StreamOb::Constant(x), StreamOb::Constant(y)) => {
                StreamOb::Constant(Carrier::product(x.clone(), y.clone()))
            }
            _ => {
                let (a, b) = (a.clone(), b.clone());
                StreamOb::Indexed(Arc::new(move |n| Carrier::product(a.at(n), b.at(n))))
            }
        }
    }

    /// Carrier-wise equality; indexed streams are compared on a finite prefix.
    pub fn agrees_with(&self, other: &StreamOb) -> bool {
        match (self, other) {
            (StreamOb::Constant(a), StreamOb::Constant(b)) => a == b,
            _ => (0..PREFIX_CHECK).all(|n| self.at(n) == other.at(n)),
        }
    }

    pub(crate) fn arity_at(&self, n: usize) -> usize {
        match self {
            StreamOb::Constant(c) => c.arity(),
            StreamOb::Indexed(f) => f(n).arity(),
        }
    }
}

const PREFIX_CHECK: usize = 16;

impl fmt::Debug for StreamOb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StreamOb::Constant(c) => write!(f, "{c}^N"),
            StreamOb::Indexed(_) => write!(f, "({}, {}, ...)", self.at(0), self.at(1)),
        }
    }
}

pub(crate) enum Node {
    Identity,
    Copy,
    Discard,
    /// swaps the first `left` factors with the rest
    Symmetry {
        left: StreamOb,
    },
    Compose(StreamMor, StreamMor),
    Tensor(StreamMor, StreamMor),
    Feedback {
        inner: StreamMor,
        state: Carrier,
        init: Value,
    },
    /// depends only on the newest input and the step index
    Pointwise {
        name: String,
        f: PointFn,
    },
    Primitive {
        name: String,
        f: StepFn,
    },
}

/// A causal stream function: at step `n` the output depends on inputs `x_0..=x_n`.
#[derive(Clone)]
pub struct StreamMor {
    pub(crate) dom: StreamOb,
    pub(crate) cod: StreamOb,
    pub(crate) node: Arc<Node>,
}

impl fmt::Debug for StreamMor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StreamMor({}: {:?} -> {:?})", self.describe(), self.dom, self.cod)
    }
}

fn ensure(ok: bool, expected: impl FnOnce() -> String, found: impl FnOnce() -> String) -> Result<(), StreamError> {
    if ok {
        Ok(())
    } else {
        Err(StreamError::CarrierMismatch { expected: expected(), found: found() })
    }
}

impl StreamMor {
    fn new(dom: StreamOb, cod: StreamOb, node: Node) -> Self {
        Self { dom, cod, node: Arc::new(node) }
    }

    pub fn dom(&self) -> &StreamOb {
        &self.dom
    }

    pub fn cod(&self) -> &StreamOb {
        &self.cod
    }

    /// A family `f_n(x_n, ..., x_0)`; `history` is passed oldest first.
    pub fn primitive(
        name: impl Into<String>,
        dom: StreamOb,
        cod: StreamOb,
        f: impl Fn(usize, &[Value]) -> Result<Value, StreamError> + Send + Sync + 'static,
    ) -> Self {
        Self::new(dom, cod, Node::Primitive { name: name.into(), f: Arc::new(f) })
    }

    /// A family whose step `n` reads only `x_n`.
    pub fn pointwise(
        name: impl Into<String>,
        dom: StreamOb,
        cod: StreamOb,
        f: impl Fn(usize, &Value) -> Result<Value, StreamError> + Send + Sync + 'static,
    ) -> Self {
        Self::new(dom, cod, Node::Pointwise { name: name.into(), f: Arc::new(f) })
    }

    /// Short structural description used in diagnostics.
    pub fn describe(&self) -> String {
        match &*self.node {
            Node::Identity => "id".into(),
            Node::Copy => "copy".into(),
            Node::Discard => "discard".into(),
            Node::Symmetry { .. } => "sym".into(),
            Node::Compose(a, b) => format!("({} ; {})", a.describe(), b.describe()),
            Node::Tensor(a, b) => format!("({} * {})", a.describe(), b.describe()),
            Node::Feedback { inner, .. } => format!("fbk({})", inner.describe()),
            Node::Pointwise { name, .. } | Node::Primitive { name, .. } => name.clone(),
        }
    }

    /// Output at step `n` computed from scratch. `history` holds `x_0..=x_n`.
    ///
    /// This is the definitional route: composites rebuild the whole prefix of
    /// the first factor's outputs and feedback replays the state from its
    /// initial value. [`EvalSession`](super::EvalSession) computes the same
    /// values incrementally.
    pub fn step(&self, n: usize, history: &[Value]) -> Result<Value, StreamError> {
        if history.len() != n + 1 {
            return Err(StreamError::HistoryLength { step: n, len: history.len() });
        }
        let newest = || history[n].clone();
        match &*self.node {
            Node::Identity => Ok(newest()),
            Node::Copy => Ok(Value::pair(newest(), newest())),
            Node::Discard => Ok(Value::Unit),
            Node::Symmetry { left } => {
                let (a, b) = newest().split_at(left.arity_at(n));
                Ok(Value::pair(b, a))
            }
            Node::Pointwise { f, .. } => f(n, &history[n]),
            Node::Primitive { f, .. } => f(n, history),
            Node::Compose(f, g) => {
                let mids = (0..=n).map(|k| f.step(k, &history[..=k])).collect::<Result<Vec<_>, _>>()?;
                g.step(n, &mids)
            }
            Node::Tensor(f, g) => {
                let mut left = Vec::with_capacity(n + 1);
                let mut right = Vec::with_capacity(n + 1);
                for (k, x) in history.iter().enumerate() {
                    let (a, b) = x.clone().split_at(f.dom.arity_at(k));
                    left.push(a);
                    right.push(b);
                }
                Ok(Value::pair(f.step(n, &left)?, g.step(n, &right)?))
            }
            Node::Feedback { inner, state, init } => {
                let mut s = init.clone();
                let mut inner_hist = Vec::with_capacity(n + 1);
                let mut out = Value::Unit;
                for (k, x) in history.iter().enumerate() {
                    inner_hist.push(Value::pair(x.clone(), s));
                    let yk = inner.step(k, &inner_hist)?;
                    let keep = yk.clone().factors().len() - state.arity();
                    let (y, s_next) = yk.split_at(keep);
                    out = y;
                    s = s_next;
                }
                Ok(out)
            }
        }
    }

    pub(crate) fn node(&self) -> &Node {
        &self.node
    }
}

pub fn identity_stream(ob: StreamOb) -> StreamMor {
    StreamMor::new(ob.clone(), ob, Node::Identity)
}

pub fn copy_stream(ob: StreamOb) -> StreamMor {
    let cod = StreamOb::product(&ob, &ob);
    StreamMor::new(ob, cod, Node::Copy)
}

pub fn discard_stream(ob: StreamOb) -> StreamMor {
    StreamMor::new(ob, StreamOb::unit(), Node::Discard)
}

pub fn symmetry_stream(a: StreamOb, b: StreamOb) -> StreamMor {
    let dom = StreamOb::product(&a, &b);
    let cod = StreamOb::product(&b, &a);
    StreamMor::new(dom, cod, Node::Symmetry { left: a })
}

/// `(f ; g)_n = f̂_n ; g_n`.
pub fn compose_streams(f: &StreamMor, g: &StreamMor) -> Result<StreamMor, StreamError> {
    ensure(f.cod.agrees_with(&g.dom), || format!("{:?}", g.dom), || format!("{:?}", f.cod))?;
    Ok(StreamMor::new(f.dom.clone(), g.cod.clone(), Node::Compose(f.clone(), g.clone())))
}

pub fn tensor_streams(f: &StreamMor, g: &StreamMor) -> StreamMor {
    StreamMor::new(
        StreamOb::product(&f.dom, &g.dom),
        StreamOb::product(&f.cod, &g.cod),
        Node::Tensor(f.clone(), g.clone()),
    )
}

/// Closes the trailing `state` wire of `inner: X * S -> Y * S` into a loop.
/// The state read at step `n` is the one written at step `n - 1`, and
/// `s_init` before the first step.
pub fn feedback(inner: &StreamMor, state: Carrier, s_init: Value) -> Result<StreamMor, StreamError> {
    if !state.admits(&s_init) {
        return Err(StreamError::CarrierMismatch { expected: state.to_string(), found: s_init.to_string() });
    }
    let (Some(dom), Some(cod)) = (inner.dom.as_constant(), inner.cod.as_constant()) else {
        return Err(StreamError::StateShape("feedback needs constant carriers".into()));
    };
    let sf = state.clone().factors();
    let split = |c: &Carrier| {
        let f = c.clone().factors();
        if f.len() >= sf.len() && f[f.len() - sf.len()..] == sf[..] {
            Some(Carrier::from_factors(f[..f.len() - sf.len()].to_vec()))
        } else {
            None
        }
    };
    let (Some(x), Some(y)) = (split(dom), split(cod)) else {
        return Err(StreamError::StateShape(format!("state {state} is not a trailing factor of {dom} and {cod}")));
    };
    Ok(StreamMor::new(
        StreamOb::Constant(x),
        StreamOb::Constant(y),
        Node::Feedback { inner: inner.clone(), state, init: s_init },
    ))
}
