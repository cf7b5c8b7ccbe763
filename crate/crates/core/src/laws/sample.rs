//! Random well-typed terms and equality-preserving rewrites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::diagram::{MorTerm, ObExpr, Presentation};

/// Builds random terms layer by layer over a list of wires. Each layer is a
/// tensor of identities, copies, discards, symmetries and generators applied
/// to contiguous wire segments.
#[derive(Debug, Clone)]
pub struct TermSampler {
    atoms: Vec<String>,
    pres: Presentation,
    fresh_generators: bool,
    pub max_width: usize,
    pub max_layers: usize,
    /// probability that a single-wire piece becomes a nested feedback block
    pub nested_feedback: f64,
    counter: usize,
}

fn wires_ob(w: &[String]) -> ObExpr {
    ObExpr::from_atoms(w)
}

impl TermSampler {
    /// Sampler that invents generators as needed over the given object atoms.
    pub fn free(atoms: &[&str]) -> Self {
        let mut pres = Presentation::new();
        for a in atoms {
            pres.add_ob(*a).expect("distinct atoms");
        }
        Self {
            atoms: atoms.iter().map(|s| s.to_string()).collect(),
            pres,
            fresh_generators: true,
            max_width: 4,
            max_layers: 5,
            nested_feedback: 0.0,
            counter: 0,
        }
    }

    /// Sampler restricted to the generators of `pres`.
    pub fn over(pres: &Presentation) -> Self {
        Self {
            atoms: pres.obs().to_vec(),
            pres: pres.clone(),
            fresh_generators: false,
            max_width: 4,
            max_layers: 5,
            nested_feedback: 0.0,
            counter: 0,
        }
    }

    /// Every generator used so far.
    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn random_wires<R: Rng + ?Sized>(&self, rng: &mut R, min: usize, max: usize) -> Vec<String> {
        let n = rng.gen_range(min..=max);
        (0..n).map(|_| self.atoms.choose(rng).expect("atoms").clone()).collect()
    }

    fn fresh(&mut self, dom: &[String], cod: Vec<String>) -> MorTerm {
        self.counter += 1;
        let name = format!("g{}", self.counter);
        let (d, c) = (wires_ob(dom), wires_ob(&cod));
        self.pres.add_mor(name.clone(), d.clone(), c.clone()).expect("fresh name");
        MorTerm::gen(name, d, c)
    }

    fn generator_on<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        seg: &[String],
        room: usize,
    ) -> Option<(MorTerm, Vec<String>)> {
        let dom = wires_ob(seg);
        let existing: Vec<(String, ObExpr)> =
            self.pres.mors().filter(|(_, (d, _))| d.type_eq(&dom)).map(|(n, (_, c))| (n.clone(), c.clone())).collect();
        if !existing.is_empty() && (!self.fresh_generators || rng.gen_bool(0.5)) {
            let (name, cod) = existing.choose(rng).expect("nonempty").clone();
            let atoms = cod.atoms();
            if atoms.len() <= room || !self.fresh_generators {
                return Some((MorTerm::gen(name, dom, cod), atoms));
            }
        }
        if !self.fresh_generators {
            return None;
        }
        let cod = self.random_wires(rng, 1, room.clamp(1, 2));
        let term = self.fresh(seg, cod.clone());
        Some((term, cod))
    }

    /// For a fixed presentation, the length of a random prefix of `wires`
    /// that some generator accepts.
    fn matching_length<R: Rng + ?Sized>(&self, rng: &mut R, wires: &[String]) -> Option<usize> {
        if self.fresh_generators {
            return None;
        }
        let lengths: Vec<usize> = (1..=wires.len())
            .filter(|&len| {
                let dom = wires_ob(&wires[..len]);
                self.pres.mors().any(|(_, (d, _))| d.type_eq(&dom))
            })
            .collect();
        lengths.choose(rng).copied()
    }

    /// Starting wires: usually random, but over a fixed presentation half the
    /// time the domain of one of its generators.
    fn start_wires<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<String> {
        if !self.fresh_generators && rng.gen_bool(0.5) {
            let doms: Vec<Vec<String>> = self.pres.mors().map(|(_, (d, _))| d.atoms()).collect();
            if let Some(d) = doms.choose(rng) {
                return d.clone();
            }
        }
        self.random_wires(rng, 1, 2)
    }

    fn layer<R: Rng + ?Sized>(&mut self, rng: &mut R, wires: &[String]) -> (MorTerm, Vec<String>) {
        if wires.is_empty() {
            if self.fresh_generators && rng.gen_bool(0.7) {
                let cod = self.random_wires(rng, 1, 1);
                return (self.fresh(&[], cod.clone()), cod);
            }
            return (MorTerm::id(ObExpr::Unit), Vec::new());
        }
        let mut pieces = Vec::new();
        let mut out: Vec<String> = Vec::new();
        let mut i = 0;
        while i < wires.len() {
            let remaining = wires.len() - i;
            let room = self.max_width.saturating_sub(out.len() + remaining - 1);
            let w = wires[i].clone();
            let choice = rng.gen_range(0..7);
            match choice {
                0 if room >= 2 => {
                    pieces.push(MorTerm::Copy(ObExpr::gen(&w)));
                    out.extend([w.clone(), w]);
                    i += 1;
                }
                1 if wires.len() > 1 => {
                    pieces.push(MorTerm::Discard(ObExpr::gen(&w)));
                    i += 1;
                }
                2 if remaining >= 2 => {
                    let v = wires[i + 1].clone();
                    pieces.push(MorTerm::Sym(ObExpr::gen(&w), ObExpr::gen(&v)));
                    out.extend([v, w]);
                    i += 2;
                }
                3..=5 => {
                    let len =
                        self.matching_length(rng, &wires[i..]).unwrap_or_else(|| rng.gen_range(1..=remaining.min(3)));
                    let seg = &wires[i..i + len];
                    let room = self.max_width.saturating_sub(out.len() + remaining - len);
                    if self.nested_feedback > 0.0 && len == 1 && rng.gen_bool(self.nested_feedback) {
                        if let Some((t, cod)) = self.feedback_block(rng, seg, 2) {
                            pieces.push(t);
                            out.extend(cod);
                            i += 1;
                            continue;
                        }
                    }
                    match self.generator_on(rng, seg, room.max(1)) {
                        Some((t, cod)) => {
                            pieces.push(t);
                            out.extend(cod);
                            i += len;
                        }
                        None => {
                            pieces.push(MorTerm::id(ObExpr::gen(&w)));
                            out.push(w);
                            i += 1;
                        }
                    }
                }
                _ => {
                    pieces.push(MorTerm::id(ObExpr::gen(&w)));
                    out.push(w);
                    i += 1;
                }
            }
        }
        (MorTerm::tensor_all(pieces), out)
    }

    /// A composite of `layers` random layers starting from `dom`; returns the term and its codomain wires.
    pub fn term_from<R: Rng + ?Sized>(&mut self, rng: &mut R, dom: &[String], layers: usize) -> (MorTerm, Vec<String>) {
        let mut wires = dom.to_vec();
        let mut parts = Vec::new();
        for _ in 0..layers.max(1) {
            let (t, next) = self.layer(rng, &wires);
            parts.push(t);
            wires = next;
        }
        (MorTerm::compose_all(parts), wires)
    }

    /// Random feedback-free term.
    pub fn term<R: Rng + ?Sized>(&mut self, rng: &mut R) -> MorTerm {
        let dom = self.start_wires(rng);
        let layers = rng.gen_range(1..=self.max_layers);
        self.term_from(rng, &dom, layers).0
    }

    /// `fbk[s](inner)` where `inner : dom * s -> cod * s`; `None` when the
    /// state wire cannot be routed to the end.
    pub fn feedback_block<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        dom: &[String],
        layers: usize,
    ) -> Option<(MorTerm, Vec<String>)> {
        let s = self.atoms.choose(rng).expect("atoms").clone();
        let mut inner_dom = dom.to_vec();
        inner_dom.push(s.clone());
        let saved = self.nested_feedback;
        self.nested_feedback = 0.0;
        let (inner, mut cod) = self.term_from(rng, &inner_dom, layers);
        self.nested_feedback = saved;
        let routed = match cod.iter().rposition(|w| *w == s) {
            Some(j) if j + 1 == cod.len() => inner,
            Some(j) => {
                let mut perm: Vec<usize> = (0..cod.len()).filter(|&k| k != j).collect();
                perm.push(j);
                let p = MorTerm::permutation(&cod, &perm);
                cod = perm.iter().map(|&k| cod[k].clone()).collect();
                MorTerm::compose(inner, p)
            }
            None if self.fresh_generators && !cod.is_empty() => {
                // copy the last wire and map one copy to the state object
                let last = cod.last().expect("nonempty").clone();
                let to_state = self.fresh(std::slice::from_ref(&last), vec![s.clone()]);
                let tail = MorTerm::compose(
                    MorTerm::Copy(ObExpr::gen(&last)),
                    MorTerm::tensor(MorTerm::id(ObExpr::gen(&last)), to_state),
                );
                let fix = MorTerm::tensor(MorTerm::id(wires_ob(&cod[..cod.len() - 1])), tail);
                cod.push(s.clone());
                MorTerm::compose(inner, fix)
            }
            None => return None,
        };
        cod.pop();
        Some((MorTerm::feedback(ObExpr::gen(&s), routed), cod))
    }

    /// Random term that may contain feedback, including nested loops.
    pub fn term_with_feedback<R: Rng + ?Sized>(&mut self, rng: &mut R) -> MorTerm {
        let dom = self.start_wires(rng);
        let layers = rng.gen_range(1..=self.max_layers);
        let saved = self.nested_feedback;
        self.nested_feedback = saved.max(0.15);
        let t = if rng.gen_bool(0.6) { self.feedback_block(rng, &dom, layers).map(|(t, _)| t) } else { None };
        let t = t.unwrap_or_else(|| self.term_from(rng, &dom, layers).0);
        self.nested_feedback = saved;
        t
    }
}

fn count_nodes(t: &MorTerm) -> usize {
    1 + match t {
        MorTerm::Compose(a, b) | MorTerm::Tensor(a, b) => count_nodes(a) + count_nodes(b),
        MorTerm::Feedback { inner, .. } => count_nodes(inner),
        _ => 0,
    }
}

/// Rewrites one random subterm by an equation valid in every Cartesian
/// category, so the result denotes the same morphism.
pub fn perturb<R: Rng + ?Sized>(term: &MorTerm, rng: &mut R) -> MorTerm {
    let target = rng.gen_range(0..count_nodes(term));
    let mut index = 0;
    rewrite_at(term, target, &mut index, rng)
}

fn rewrite_at<R: Rng + ?Sized>(t: &MorTerm, target: usize, index: &mut usize, rng: &mut R) -> MorTerm {
    let here = *index;
    *index += 1;
    if here == target {
        return rewrite(t, rng);
    }
    match t {
        MorTerm::Compose(a, b) => {
            let a2 = rewrite_at(a, target, index, rng);
            MorTerm::compose(a2, rewrite_at(b, target, index, rng))
        }
        MorTerm::Tensor(a, b) => {
            let a2 = rewrite_at(a, target, index, rng);
            MorTerm::tensor(a2, rewrite_at(b, target, index, rng))
        }
        MorTerm::Feedback { state, inner } => MorTerm::feedback(state.clone(), rewrite_at(inner, target, index, rng)),
        other => other.clone(),
    }
}

fn split_first(ob: &ObExpr) -> Option<(ObExpr, ObExpr)> {
    let atoms = ob.atoms();
    if atoms.len() < 2 {
        return None;
    }
    let k = atoms.len() / 2;
    Some((ObExpr::from_atoms(&atoms[..k]), ObExpr::from_atoms(&atoms[k..])))
}

fn rewrite<R: Rng + ?Sized>(t: &MorTerm, rng: &mut R) -> MorTerm {
    let (dom, cod) = t.infer_type().expect("well-typed subterm");
    // structural rewrites tied to the head constructor
    match t {
        MorTerm::Compose(a, b) if rng.gen_bool(0.5) => {
            if let MorTerm::Compose(x, y) = &**a {
                return MorTerm::compose((**x).clone(), MorTerm::compose((**y).clone(), (**b).clone()));
            }
            if let MorTerm::Compose(x, y) = &**b {
                return MorTerm::compose(MorTerm::compose((**a).clone(), (**x).clone()), (**y).clone());
            }
        }
        MorTerm::Tensor(f, g) if rng.gen_bool(0.6) => {
            let (fd, fc) = f.infer_type().expect("typed");
            let (gd, gc) = g.infer_type().expect("typed");
            return if rng.gen_bool(0.5) {
                MorTerm::compose(
                    MorTerm::tensor((**f).clone(), MorTerm::id(gd)),
                    MorTerm::tensor(MorTerm::id(fc), (**g).clone()),
                )
            } else {
                MorTerm::compose(
                    MorTerm::tensor(MorTerm::id(fd), (**g).clone()),
                    MorTerm::tensor((**f).clone(), MorTerm::id(gc)),
                )
            };
        }
        MorTerm::Copy(a) if rng.gen_bool(0.5) => {
            return MorTerm::compose(MorTerm::Copy(a.clone()), MorTerm::Sym(a.clone(), a.clone()));
        }
        _ => {}
    }
    match rng.gen_range(0..8) {
        0 => MorTerm::compose(t.clone(), MorTerm::id(cod)),
        1 => MorTerm::compose(MorTerm::id(dom), t.clone()),
        2 => MorTerm::tensor(t.clone(), MorTerm::id(ObExpr::Unit)),
        3 => MorTerm::compose_all([
            t.clone(),
            MorTerm::Copy(cod.clone()),
            MorTerm::tensor(MorTerm::id(cod.clone()), MorTerm::Discard(cod)),
        ]),
        4 => match split_first(&cod) {
            Some((a, b)) => MorTerm::compose_all([t.clone(), MorTerm::Sym(a.clone(), b.clone()), MorTerm::Sym(b, a)]),
            None => MorTerm::compose(t.clone(), MorTerm::id(cod)),
        },
        // naturality of copy: t ; cp = cp ; (t * t)
        5 if !t.has_feedback() => MorTerm::compose(
            MorTerm::Copy(dom.clone()),
            MorTerm::compose(
                MorTerm::tensor(t.clone(), t.clone()),
                MorTerm::tensor(MorTerm::id(cod.clone()), MorTerm::Discard(cod)),
            ),
        ),
        // naturality of discard on a throwaway copy: t = cp ; (t * (t ; discard))
        6 => MorTerm::compose(
            MorTerm::Copy(dom),
            MorTerm::tensor(t.clone(), MorTerm::compose(t.clone(), MorTerm::Discard(cod))),
        ),
        _ => MorTerm::compose(MorTerm::Copy(dom.clone()), MorTerm::tensor(MorTerm::Discard(dom), t.clone())),
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::diagram::{diagram_eq, typecheck};

    #[test]
    fn sampled_terms_typecheck() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = TermSampler::free(&["A", "B", "C"]);
        for _ in 0..200 {
            let t = s.term(&mut rng);
            typecheck(&t, s.presentation()).unwrap();
            let f = s.term_with_feedback(&mut rng);
            typecheck(&f, s.presentation()).unwrap();
        }
    }

    #[test]
    fn perturbations_preserve_diagram_equality() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut s = TermSampler::free(&["A", "B"]);
        for _ in 0..200 {
            let t = s.term(&mut rng);
            let mut p = t.clone();
            for _ in 0..rng.gen_range(1..=3) {
                p = perturb(&p, &mut rng);
            }
            typecheck(&p, s.presentation()).unwrap();
            assert!(diagram_eq(&t, &p).unwrap(), "{t}\n{p}");
        }
    }

    #[test]
    fn fixed_presentation_uses_only_its_generators() {
        let pres = crate::xlearn::presentation();
        let mut s = TermSampler::over(pres);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut saw_generator = false;
        for _ in 0..300 {
            let t = s.term(&mut rng);
            typecheck(&t, pres).unwrap();
            saw_generator |= !t.generators().is_empty();
        }
        assert!(saw_generator);
        assert_eq!(s.presentation().mors().count(), 2);
    }
}
