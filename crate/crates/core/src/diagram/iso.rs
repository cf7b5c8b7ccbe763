//! Boundary-respecting isomorphism of [`NodeGraph`]s by iterated neighborhood
//! refinement, with individualization and backtracking when refinement stalls.

use std::collections::HashMap;

use super::hypergraph::NodeGraph;

const TAG_NODE: u64 = 1;
const TAG_EDGE: u64 = 2;
const SEP: u64 = u64::MAX;

#[derive(Clone)]
struct Coloring {
    nodes: [Vec<u64>; 2],
    edges: [Vec<u64>; 2],
}

struct Pair<'a> {
    graphs: [&'a NodeGraph; 2],
    /// incidences[g][node] = (edge, side, port)
    incidences: [Vec<Vec<(usize, u64, u64)>>; 2],
}

impl NodeGraph {
    pub fn is_isomorphic(&self, other: &NodeGraph) -> bool {
        if self.node_obs.len() != other.node_obs.len()
            || self.edges.len() != other.edges.len()
            || self.inputs.len() != other.inputs.len()
            || self.outputs.len() != other.outputs.len()
        {
            return false;
        }
        let pair = Pair { graphs: [self, other], incidences: [incidences(self), incidences(other)] };
        let mut interner: HashMap<Vec<u64>, u64> = HashMap::new();
        let mut intern = |key: Vec<u64>| {
            let next = interner.len() as u64;
            *interner.entry(key).or_insert(next)
        };
        let mut label_ids: HashMap<String, u64> = HashMap::new();
        let mut label_id = |s: &str| {
            let next = label_ids.len() as u64;
            *label_ids.entry(s.to_string()).or_insert(next)
        };
        let mut coloring = Coloring { nodes: [Vec::new(), Vec::new()], edges: [Vec::new(), Vec::new()] };
        for (k, g) in pair.graphs.iter().enumerate() {
            for (v, ob) in g.node_obs.iter().enumerate() {
                let mut key = vec![TAG_NODE, label_id(ob), SEP];
                key.extend(g.inputs.iter().enumerate().filter(|(_, &x)| x == v).map(|(i, _)| i as u64));
                key.push(SEP);
                key.extend(g.outputs.iter().enumerate().filter(|(_, &x)| x == v).map(|(i, _)| i as u64));
                coloring.nodes[k].push(intern(key));
            }
            for e in &g.edges {
                coloring.edges[k].push(intern(vec![TAG_EDGE, label_id(&e.label)]));
            }
        }
        search(&pair, coloring)
    }
}

fn incidences(g: &NodeGraph) -> Vec<Vec<(usize, u64, u64)>> {
    let mut inc = vec![Vec::new(); g.node_obs.len()];
    for (ei, e) in g.edges.iter().enumerate() {
        for (p, &s) in e.sources.iter().enumerate() {
            inc[s].push((ei, 0, p as u64));
        }
        for (p, &t) in e.targets.iter().enumerate() {
            inc[t].push((ei, 1, p as u64));
        }
    }
    inc
}

fn distinct(c: &Coloring) -> usize {
    let mut all: Vec<(u8, u64)> = Vec::new();
    for k in 0..2 {
        all.extend(c.nodes[k].iter().map(|&x| (0, x)));
        all.extend(c.edges[k].iter().map(|&x| (1, x)));
    }
    all.sort_unstable();
    all.dedup();
    all.len()
}

/// Refines both colorings jointly until the partition is stable.
fn refine(pair: &Pair<'_>, mut c: Coloring) -> Coloring {
    let mut classes = distinct(&c);
    loop {
        let mut interner: HashMap<Vec<u64>, u64> = HashMap::new();
        let mut next = Coloring { nodes: [Vec::new(), Vec::new()], edges: [Vec::new(), Vec::new()] };
        for k in 0..2 {
            let g = pair.graphs[k];
            for (ei, e) in g.edges.iter().enumerate() {
                let mut key = vec![TAG_EDGE, c.edges[k][ei]];
                key.extend(e.sources.iter().map(|&s| c.nodes[k][s]));
                key.push(SEP);
                key.extend(e.targets.iter().map(|&t| c.nodes[k][t]));
                let n = interner.len() as u64;
                next.edges[k].push(*interner.entry(key).or_insert(n));
            }
        }
        for k in 0..2 {
            for (v, inc) in pair.incidences[k].iter().enumerate() {
                let mut around: Vec<(u64, u64, u64)> =
                    inc.iter().map(|&(e, side, p)| (next.edges[k][e], side, p)).collect();
                around.sort_unstable();
                let mut key = vec![TAG_NODE, c.nodes[k][v]];
                for (a, b, d) in around {
                    key.extend([a, b, d]);
                }
                let n = interner.len() as u64;
                next.nodes[k].push(*interner.entry(key).or_insert(n));
            }
        }
        let now = distinct(&next);
        c = next;
        if now == classes {
            return c;
        }
        classes = now;
    }
}

fn histograms_match(c: &Coloring) -> bool {
    let sorted = |v: &Vec<u64>| {
        let mut s = v.clone();
        s.sort_unstable();
        s
    };
    sorted(&c.nodes[0]) == sorted(&c.nodes[1]) && sorted(&c.edges[0]) == sorted(&c.edges[1])
}

fn search(pair: &Pair<'_>, c: Coloring) -> bool {
    let c = refine(pair, c);
    if !histograms_match(&c) {
        return false;
    }
    let mut class_size: HashMap<u64, usize> = HashMap::new();
    for &col in &c.nodes[0] {
        *class_size.entry(col).or_default() += 1;
    }
    let ambiguous = c.nodes[0]
        .iter()
        .enumerate()
        .filter(|(_, col)| class_size[col] > 1)
        .min_by_key(|(v, col)| (class_size[col], **col, *v));
    let Some((v, &col)) = ambiguous else {
        return verify(pair, &c);
    };
    let fresh = c.nodes.iter().chain(c.edges.iter()).flatten().copied().max().unwrap_or(0) + 1;
    for w in (0..c.nodes[1].len()).filter(|&w| c.nodes[1][w] == col) {
        let mut trial = c.clone();
        trial.nodes[0][v] = fresh;
        trial.nodes[1][w] = fresh;
        if search(pair, trial) {
            return true;
        }
    }
    false
}

/// With a discrete node coloring, checks the induced bijection.
fn verify(pair: &Pair<'_>, c: &Coloring) -> bool {
    let [g1, g2] = pair.graphs;
    let by_color: HashMap<u64, usize> = c.nodes[1].iter().enumerate().map(|(w, &col)| (col, w)).collect();
    let phi: Vec<usize> = c.nodes[0].iter().map(|col| by_color[col]).collect();
    if (0..phi.len()).any(|v| g1.node_obs[v] != g2.node_obs[phi[v]]) {
        return false;
    }
    if g1.inputs.iter().map(|&v| phi[v]).ne(g2.inputs.iter().copied())
        || g1.outputs.iter().map(|&v| phi[v]).ne(g2.outputs.iter().copied())
    {
        return false;
    }
    let mut mapped: Vec<(String, Vec<usize>, Vec<usize>)> = g1
        .edges
        .iter()
        .map(|e| {
            (e.label.clone(), e.sources.iter().map(|&s| phi[s]).collect(), e.targets.iter().map(|&t| phi[t]).collect())
        })
        .collect();
    let mut target: Vec<(String, Vec<usize>, Vec<usize>)> =
        g2.edges.iter().map(|e| (e.label.clone(), e.sources.clone(), e.targets.clone())).collect();
    mapped.sort();
    target.sort();
    mapped == target
}
