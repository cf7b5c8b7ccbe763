//! String diagrams as open hypergraphs.
//!
//! [`OpenHypergraph`] is the explicit encoding: every port carries exactly one
//! wire, symmetries are wire crossings and copy/discard are labeled boxes.
//! [`NodeGraph`] is the node-centric view (a wire is a node; a node may feed
//! several boxes) used for isomorphism testing and for quotienting by the
//! Cartesian laws.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::ob::ObExpr;
use super::term::MorTerm;
use super::DiagramError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoxLabel {
    Gen(String),
    /// Copy of a single generating object.
    Copy(String),
    Discard(String),
}

impl BoxLabel {
    fn key(&self) -> String {
        match self {
            BoxLabel::Gen(n) => format!("gen:{n}"),
            BoxLabel::Copy(o) => format!("copy:{o}"),
            BoxLabel::Discard(o) => format!("discard:{o}"),
        }
    }
}

impl fmt::Display for BoxLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoxLabel::Gen(n) => write!(f, "{n}"),
            BoxLabel::Copy(_) => write!(f, "copy"),
            BoxLabel::Discard(_) => write!(f, "discard"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperBox {
    pub label: BoxLabel,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Port {
    BoundaryIn(usize),
    BoundaryOut(usize),
    BoxIn { index: usize, port: usize },
    BoxOut { index: usize, port: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wire {
    pub source: Port,
    pub target: Port,
    pub ob: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenHypergraph {
    pub boxes: Vec<HyperBox>,
    pub wires: Vec<Wire>,
    pub boundary_in: Vec<String>,
    pub boundary_out: Vec<String>,
}

impl OpenHypergraph {
    /// Encodes a feedback-free term.
    pub fn from_term(term: &MorTerm) -> Result<Self, DiagramError> {
        let (dom, _) = term.infer_type()?;
        if term.has_feedback() {
            return Err(DiagramError::FeedbackNotSupported);
        }
        let wiring = Wiring::build_term(term, &dom);
        Ok(wiring.into_hypergraph())
    }

    pub fn node_graph(&self) -> NodeGraph {
        let mut node_of: HashMap<Port, usize> = HashMap::new();
        let mut node_obs = Vec::with_capacity(self.wires.len());
        for (i, w) in self.wires.iter().enumerate() {
            node_of.insert(w.source, i);
            node_of.insert(w.target, i);
            node_obs.push(w.ob.clone());
        }
        let edges = self
            .boxes
            .iter()
            .enumerate()
            .map(|(index, b)| Edge {
                label: b.label.key(),
                sources: (0..b.inputs.len()).map(|port| node_of[&Port::BoxIn { index, port }]).collect(),
                targets: (0..b.outputs.len()).map(|port| node_of[&Port::BoxOut { index, port }]).collect(),
            })
            .collect();
        NodeGraph {
            node_obs,
            edges,
            inputs: (0..self.boundary_in.len()).map(|i| node_of[&Port::BoundaryIn(i)]).collect(),
            outputs: (0..self.boundary_out.len()).map(|i| node_of[&Port::BoundaryOut(i)]).collect(),
        }
    }

    /// Isomorphism of the explicit encodings, respecting boundary order and labels.
    pub fn is_isomorphic(&self, other: &OpenHypergraph) -> bool {
        self.node_graph().is_isomorphic(&other.node_graph())
    }

    /// Checks that every port has exactly one incident wire.
    pub fn validate(&self) -> Result<(), String> {
        let mut seen: BTreeMap<Port, usize> = BTreeMap::new();
        for w in &self.wires {
            if matches!(w.source, Port::BoundaryOut(_) | Port::BoxIn { .. }) {
                return Err(format!("wire source {:?} is not an output port", w.source));
            }
            if matches!(w.target, Port::BoundaryIn(_) | Port::BoxOut { .. }) {
                return Err(format!("wire target {:?} is not an input port", w.target));
            }
            *seen.entry(w.source).or_default() += 1;
            *seen.entry(w.target).or_default() += 1;
        }
        let mut expected = Vec::new();
        expected.extend((0..self.boundary_in.len()).map(Port::BoundaryIn));
        expected.extend((0..self.boundary_out.len()).map(Port::BoundaryOut));
        for (index, b) in self.boxes.iter().enumerate() {
            expected.extend((0..b.inputs.len()).map(|port| Port::BoxIn { index, port }));
            expected.extend((0..b.outputs.len()).map(|port| Port::BoxOut { index, port }));
        }
        for p in &expected {
            match seen.get(p) {
                Some(1) => {}
                Some(n) => return Err(format!("port {p:?} has {n} wires")),
                None => return Err(format!("port {p:?} is unwired")),
            }
        }
        if seen.len() != expected.len() {
            return Err("wire references a nonexistent port".to_string());
        }
        Ok(())
    }
}

/// Wire source during construction; `Loop` stands for a feedback state wire
/// whose producer is only known once the loop body has been built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Source {
    Port(Port),
    Loop(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct RawWire {
    pub source: Source,
    pub target: Port,
    pub ob: String,
    /// State object of the feedback loop this wire closes, if any.
    pub back_edge: Option<ObExpr>,
}

#[derive(Debug, Default)]
pub(crate) struct Wiring {
    pub boxes: Vec<HyperBox>,
    pub wires: Vec<RawWire>,
    pub boundary_in: Vec<String>,
    pub boundary_out: Vec<String>,
    loop_sources: Vec<Option<Source>>,
    loop_states: Vec<ObExpr>,
}

impl Wiring {
    /// Builds the wiring of a well-typed term with domain `dom`.
    pub(crate) fn build_term(term: &MorTerm, dom: &ObExpr) -> Self {
        let mut w = Wiring::default();
        let inputs: Vec<(Source, String)> =
            dom.atoms().into_iter().enumerate().map(|(i, ob)| (Source::Port(Port::BoundaryIn(i)), ob)).collect();
        w.boundary_in = dom.atoms();
        let outputs = w.build(term, inputs);
        for (j, (src, ob)) in outputs.into_iter().enumerate() {
            w.boundary_out.push(ob.clone());
            w.connect(src, Port::BoundaryOut(j), ob);
        }
        w.resolve_loops();
        w
    }

    fn connect(&mut self, source: Source, target: Port, ob: String) {
        self.wires.push(RawWire { source, target, ob, back_edge: None });
    }

    fn add_box(
        &mut self,
        label: BoxLabel,
        inputs: Vec<(Source, String)>,
        outputs: Vec<String>,
    ) -> Vec<(Source, String)> {
        let index = self.boxes.len();
        self.boxes.push(HyperBox {
            label,
            inputs: inputs.iter().map(|(_, o)| o.clone()).collect(),
            outputs: outputs.clone(),
        });
        for (port, (src, ob)) in inputs.into_iter().enumerate() {
            self.connect(src, Port::BoxIn { index, port }, ob);
        }
        outputs.into_iter().enumerate().map(|(port, ob)| (Source::Port(Port::BoxOut { index, port }), ob)).collect()
    }

    fn build(&mut self, term: &MorTerm, inputs: Vec<(Source, String)>) -> Vec<(Source, String)> {
        match term {
            MorTerm::Id(_) => inputs,
            MorTerm::GenMor { name, cod, .. } => self.add_box(BoxLabel::Gen(name.clone()), inputs, cod.atoms()),
            MorTerm::Sym(a, _) => {
                let k = a.arity();
                let mut out = inputs[k..].to_vec();
                out.extend_from_slice(&inputs[..k]);
                out
            }
            MorTerm::Copy(_) => {
                let mut left = Vec::new();
                let mut right = Vec::new();
                for (src, ob) in inputs {
                    let outs = self.add_box(BoxLabel::Copy(ob.clone()), vec![(src, ob.clone())], vec![ob.clone(), ob]);
                    left.push(outs[0].clone());
                    right.push(outs[1].clone());
                }
                left.extend(right);
                left
            }
            MorTerm::Discard(_) => {
                for (src, ob) in inputs {
                    self.add_box(BoxLabel::Discard(ob.clone()), vec![(src, ob)], vec![]);
                }
                vec![]
            }
            MorTerm::Compose(f, g) => {
                let mid = self.build(f, inputs);
                self.build(g, mid)
            }
            MorTerm::Tensor(f, g) => {
                let (fd, _) = f.infer_type().expect("typechecked");
                let mut inputs = inputs;
                let right = inputs.split_off(fd.arity());
                let mut out = self.build(f, inputs);
                out.extend(self.build(g, right));
                out
            }
            MorTerm::Feedback { state, inner } => {
                let atoms = state.atoms();
                let mut inner_inputs = inputs;
                let first_loop = self.loop_sources.len();
                for ob in &atoms {
                    let id = self.loop_sources.len();
                    self.loop_sources.push(None);
                    self.loop_states.push(state.normal_form());
                    inner_inputs.push((Source::Loop(id), ob.clone()));
                }
                let mut out = self.build(inner, inner_inputs);
                let state_out = out.split_off(out.len() - atoms.len());
                for (k, (src, _)) in state_out.into_iter().enumerate() {
                    self.loop_sources[first_loop + k] = Some(src);
                }
                out
            }
        }
    }

    fn resolve_loops(&mut self) {
        for i in 0..self.wires.len() {
            let Source::Loop(id) = self.wires[i].source else {
                continue;
            };
            let state = self.loop_states[id].clone();
            let mut current = id;
            let mut steps = 0;
            let resolved = loop {
                match self.loop_sources[current] {
                    Some(Source::Loop(next)) if steps <= self.loop_sources.len() => {
                        current = next;
                        steps += 1;
                    }
                    Some(src) => break src,
                    None => break Source::Loop(current),
                }
            };
            self.wires[i].source = resolved;
            self.wires[i].back_edge = Some(state);
        }
    }

    fn into_hypergraph(self) -> OpenHypergraph {
        OpenHypergraph {
            boxes: self.boxes,
            wires: self
                .wires
                .into_iter()
                .map(|w| Wire {
                    source: match w.source {
                        Source::Port(p) => p,
                        Source::Loop(_) => unreachable!("feedback-free term"),
                    },
                    target: w.target,
                    ob: w.ob,
                })
                .collect(),
            boundary_in: self.boundary_in,
            boundary_out: self.boundary_out,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub label: String,
    pub sources: Vec<usize>,
    pub targets: Vec<usize>,
}

/// Node-centric hypergraph: nodes are wires, edges are boxes with ordered
/// source and target node lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeGraph {
    pub node_obs: Vec<String>,
    pub edges: Vec<Edge>,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
}

impl NodeGraph {
    /// Quotient by the Cartesian laws.
    ///
    /// Copy boxes become node fan-out, discard boxes disappear, boxes with no
    /// consumed output are removed and boxes with equal labels and equal
    /// source lists are merged, until a fixpoint is reached.
    pub fn cartesian_normal_form(&self) -> NodeGraph {
        let n = self.node_obs.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut c = x;
            while parent[c] != r {
                let next = parent[c];
                parent[c] = r;
                c = next;
            }
            r
        }

        let mut edges: Vec<Edge> = Vec::new();
        for e in &self.edges {
            if e.label.starts_with("copy:") {
                let src = find(&mut parent, e.sources[0]);
                for &t in &e.targets {
                    let t = find(&mut parent, t);
                    parent[t] = src;
                }
            } else if !e.label.starts_with("discard:") {
                edges.push(e.clone());
            }
        }
        // Each copy target is produced only by its copy box, so merging into
        // the copy source is well defined regardless of processing order.
        let canon = |parent: &mut Vec<usize>, e: &Edge| Edge {
            label: e.label.clone(),
            sources: e.sources.iter().map(|&s| find(parent, s)).collect(),
            targets: e.targets.iter().map(|&t| find(parent, t)).collect(),
        };
        let mut edges: Vec<Edge> = edges.iter().map(|e| canon(&mut parent, e)).collect();
        let mut outputs: Vec<usize> = self.outputs.iter().map(|&o| find(&mut parent, o)).collect();
        let inputs: Vec<usize> = self.inputs.iter().map(|&i| find(&mut parent, i)).collect();

        loop {
            let mut changed = false;

            let mut consumed = vec![false; n];
            for e in &edges {
                for &s in &e.sources {
                    consumed[s] = true;
                }
            }
            for &o in &outputs {
                consumed[o] = true;
            }
            let before = edges.len();
            edges.retain(|e| e.targets.iter().any(|&t| consumed[t]));
            changed |= edges.len() != before;

            let mut seen: HashMap<(String, Vec<usize>), usize> = HashMap::new();
            let mut merged = false;
            let mut keep = vec![true; edges.len()];
            for (i, e) in edges.iter().enumerate() {
                match seen.get(&(e.label.clone(), e.sources.clone())) {
                    Some(&j) => {
                        for (&t, &u) in e.targets.iter().zip(&edges[j].targets) {
                            let (rt, ru) = (find(&mut parent, t), find(&mut parent, u));
                            if rt != ru {
                                parent[rt] = ru;
                            }
                        }
                        keep[i] = false;
                        merged = true;
                    }
                    None => {
                        seen.insert((e.label.clone(), e.sources.clone()), i);
                    }
                }
            }
            if merged {
                let mut idx = 0;
                edges.retain(|_| {
                    let k = keep[idx];
                    idx += 1;
                    k
                });
                edges = edges.iter().map(|e| canon(&mut parent, e)).collect();
                outputs = outputs.iter().map(|&o| find(&mut parent, o)).collect();
                changed = true;
            }
            if !changed {
                break;
            }
        }

        // compact: keep inputs, outputs and nodes touched by surviving edges
        let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
        let mut node_obs = Vec::new();
        let mut id = |x: usize, node_obs: &mut Vec<String>| -> usize {
            *remap.entry(x).or_insert_with(|| {
                node_obs.push(self.node_obs[x].clone());
                node_obs.len() - 1
            })
        };
        let inputs: Vec<usize> = inputs.iter().map(|&x| id(x, &mut node_obs)).collect();
        let outputs: Vec<usize> = outputs.iter().map(|&x| id(x, &mut node_obs)).collect();
        let edges: Vec<Edge> = edges
            .iter()
            .map(|e| Edge {
                label: e.label.clone(),
                sources: e.sources.iter().map(|&x| id(x, &mut node_obs)).collect(),
                targets: e.targets.iter().map(|&x| id(x, &mut node_obs)).collect(),
            })
            .collect();
        NodeGraph { node_obs, edges, inputs, outputs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ob(n: &str) -> ObExpr {
        ObExpr::gen(n)
    }

    #[test]
    fn identity_is_a_single_wire() {
        let h = OpenHypergraph::from_term(&MorTerm::id(ob("X"))).unwrap();
        assert!(h.boxes.is_empty());
        assert_eq!(h.wires.len(), 1);
        assert_eq!(h.wires[0].source, Port::BoundaryIn(0));
        assert_eq!(h.wires[0].target, Port::BoundaryOut(0));
        h.validate().unwrap();
    }

    #[test]
    fn symmetry_is_a_crossing() {
        let h = OpenHypergraph::from_term(&MorTerm::Sym(ob("X"), ob("Y"))).unwrap();
        assert!(h.boxes.is_empty());
        assert_eq!(h.boundary_out, vec!["Y", "X"]);
        assert!(h.wires.iter().any(|w| w.source == Port::BoundaryIn(0) && w.target == Port::BoundaryOut(1)));
    }

    #[test]
    fn symmetry_twice_is_identity() {
        let t = MorTerm::compose(MorTerm::Sym(ob("X"), ob("Y")), MorTerm::Sym(ob("Y"), ob("X")));
        let a = OpenHypergraph::from_term(&t).unwrap();
        let b = OpenHypergraph::from_term(&MorTerm::id(ObExpr::from_atoms(&["X", "Y"]))).unwrap();
        assert!(a.is_isomorphic(&b));
        assert!(!OpenHypergraph::from_term(&MorTerm::Sym(ob("X"), ob("X")))
            .unwrap()
            .is_isomorphic(&OpenHypergraph::from_term(&MorTerm::id(ObExpr::from_atoms(&["X", "X"]))).unwrap()));
    }

    #[test]
    fn interchange_instance_is_isomorphic() {
        let f = MorTerm::gen("f", ob("A"), ob("B"));
        let g = MorTerm::gen("g", ob("C"), ob("D"));
        let lhs = MorTerm::tensor(f.clone(), g.clone());
        let rhs = MorTerm::compose(MorTerm::tensor(f, MorTerm::id(ob("C"))), MorTerm::tensor(MorTerm::id(ob("B")), g));
        let a = OpenHypergraph::from_term(&lhs).unwrap();
        let b = OpenHypergraph::from_term(&rhs).unwrap();
        a.validate().unwrap();
        b.validate().unwrap();
        assert!(a.is_isomorphic(&b));
    }

    #[test]
    fn copy_and_discard_are_boxes() {
        let t = MorTerm::compose(
            MorTerm::Copy(ObExpr::from_atoms(&["X", "Y"])),
            MorTerm::tensor(
                MorTerm::id(ObExpr::from_atoms(&["X", "Y"])),
                MorTerm::Discard(ObExpr::from_atoms(&["X", "Y"])),
            ),
        );
        let h = OpenHypergraph::from_term(&t).unwrap();
        h.validate().unwrap();
        let copies = h.boxes.iter().filter(|b| matches!(b.label, BoxLabel::Copy(_))).count();
        let discards = h.boxes.iter().filter(|b| matches!(b.label, BoxLabel::Discard(_))).count();
        assert_eq!((copies, discards), (2, 2));
        assert_eq!(h.boundary_out, vec!["X", "Y"]);
    }

    #[test]
    fn feedback_rejected() {
        let inner = MorTerm::gen("k", ObExpr::from_atoms(&["X", "S"]), ObExpr::from_atoms(&["Y", "S"]));
        let t = MorTerm::feedback(ob("S"), inner);
        assert_eq!(OpenHypergraph::from_term(&t).unwrap_err(), DiagramError::FeedbackNotSupported);
    }

    #[test]
    fn cartesian_quotient_merges_duplicate_boxes() {
        let f = MorTerm::gen("f", ob("X"), ob("Y"));
        let lhs = MorTerm::compose(f.clone(), MorTerm::Copy(ob("Y")));
        let rhs = MorTerm::compose(MorTerm::Copy(ob("X")), MorTerm::tensor(f.clone(), f));
        let a = OpenHypergraph::from_term(&lhs).unwrap().node_graph().cartesian_normal_form();
        let b = OpenHypergraph::from_term(&rhs).unwrap().node_graph().cartesian_normal_form();
        assert_eq!(a.edges.len(), 1);
        assert_eq!(b.edges.len(), 1);
        assert!(a.is_isomorphic(&b));
    }
}
