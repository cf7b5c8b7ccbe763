use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::hypergraph::{BoxLabel, Port, Source, Wiring};
use super::term::MorTerm;
use super::DiagramError;

fn node_name(port: Port) -> String {
    match port {
        Port::BoundaryIn(i) => format!("in{i}"),
        Port::BoundaryOut(j) => format!("out{j}"),
        Port::BoxIn { index, .. } | Port::BoxOut { index, .. } => format!("b{index}"),
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Renders a term as a left-to-right DOT digraph.
///
/// Generators are box nodes labeled by name, copy and discard are small
/// dots, boundary wires end in point nodes. Wires closed by a feedback loop
/// are dashed back-edges labeled with the state object.
pub fn render_dot(term: &MorTerm) -> Result<String, DiagramError> {
    let (dom, _) = term.infer_type()?;
    let wiring = Wiring::build_term(term, &dom);

    // topological order of boxes, ignoring back-edges; ties broken by label then index
    let n = wiring.boxes.len();
    let mut preds: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for w in &wiring.wires {
        if w.back_edge.is_some() {
            continue;
        }
        if let (Source::Port(Port::BoxOut { index: a, .. }), Port::BoxIn { index: b, .. }) = (w.source, w.target) {
            preds[b].insert(a);
        }
    }
    let sort_key = |i: usize| (wiring.boxes[i].label.to_string(), i);
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while order.len() < n {
        let next = (0..n)
            .filter(|&i| !placed[i] && preds[i].iter().all(|&p| placed[p]))
            .min_by_key(|&i| sort_key(i))
            // a delay-only cycle cannot occur for well-typed terms; fall back to label order
            .or_else(|| (0..n).filter(|&i| !placed[i]).min_by_key(|&i| sort_key(i)))
            .expect("unplaced box exists");
        placed[next] = true;
        order.push(next);
    }

    let mut out = String::new();
    out.push_str("digraph diagram {\n  rankdir=LR;\n");
    for (i, ob) in wiring.boundary_in.iter().enumerate() {
        let _ = writeln!(out, "  in{i} [shape=point, xlabel=\"{}\"];", escape(ob));
    }
    for &i in &order {
        let b = &wiring.boxes[i];
        match &b.label {
            BoxLabel::Gen(name) => {
                let _ = writeln!(out, "  b{i} [shape=box, label=\"{}\"];", escape(name));
            }
            BoxLabel::Copy(_) => {
                let _ = writeln!(out, "  b{i} [shape=circle, style=filled, width=0.12, label=\"\", tooltip=\"copy\"];");
            }
            BoxLabel::Discard(_) => {
                let _ = writeln!(out, "  b{i} [shape=circle, width=0.12, label=\"\", tooltip=\"discard\"];");
            }
        }
    }
    for (j, ob) in wiring.boundary_out.iter().enumerate() {
        let _ = writeln!(out, "  out{j} [shape=point, xlabel=\"{}\"];", escape(ob));
    }
    for w in &wiring.wires {
        let src = match w.source {
            Source::Port(p) => node_name(p),
            Source::Loop(k) => format!("delay{k}"),
        };
        let dst = node_name(w.target);
        match &w.back_edge {
            Some(state) => {
                let _ = writeln!(
                    out,
                    "  {src} -> {dst} [label=\"{}\", style=dashed, constraint=false, feedback=\"{}\"];",
                    escape(&w.ob),
                    escape(&state.to_string())
                );
            }
            None => {
                let _ = writeln!(out, "  {src} -> {dst} [label=\"{}\"];", escape(&w.ob));
            }
        }
    }
    if wiring.wires.iter().any(|w| matches!(w.source, Source::Loop(_))) {
        let delays: BTreeSet<usize> = wiring
            .wires
            .iter()
            .filter_map(|w| match w.source {
                Source::Loop(k) => Some(k),
                _ => None,
            })
            .collect();
        for k in delays {
            let _ = writeln!(out, "  delay{k} [shape=diamond, label=\"delay\"];");
        }
    }
    out.push_str("}\n");
    Ok(out)
}
