//! Dual automata: finite Serre graphs whose edges carry words, with an
//! initial and a terminal vertex. The language is the set of reduced labels
//! of paths from the initial to the terminal vertex, a coset of the free
//! group.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use crate::words::{Sort, SymbolTable, Word};

pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("unknown state {0}")]
    UnknownState(StateId),
    #[error("edge label must be 1, a word over one vertex alphabet, or a single edge letter")]
    InvalidLabel,
    #[error("a 1-labeled edge needs distinct endpoints")]
    OneLoop,
    #[error("automaton mixes alphabets; restrict it first")]
    MixedAlphabets,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabelKind {
    /// The empty word; belongs to every vertex alphabet.
    One,
    Vertex(usize),
    Edge,
}

impl LabelKind {
    pub fn of(label: &Word) -> Result<LabelKind, AutomatonError> {
        let letters = label.letters();
        match letters {
            [] => Ok(LabelKind::One),
            [l] if matches!(l.sort, Sort::Edge(_)) => Ok(LabelKind::Edge),
            _ => match label.vertex_alphabet() {
                Ok(Some(v)) => Ok(LabelKind::Vertex(v)),
                _ => Err(AutomatonError::InvalidLabel),
            },
        }
    }

    fn over(self, v: usize) -> bool {
        self == LabelKind::One || self == LabelKind::Vertex(v)
    }
}

/// An edge and its inverse share this record; arc `2k` runs forward,
/// arc `2k + 1` is its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
struct EdgePair {
    source: StateId,
    target: StateId,
    label: Word,
    kind: LabelKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcId(pub usize);

impl ArcId {
    pub fn inverse(self) -> ArcId {
        ArcId(self.0 ^ 1)
    }

    fn pair(self) -> usize {
        self.0 >> 1
    }

    fn reversed(self) -> bool {
        self.0 & 1 == 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualAutomaton {
    states: usize,
    pairs: Vec<EdgePair>,
    adjacency: Vec<Vec<ArcId>>,
    initial: StateId,
    terminal: StateId,
}

impl DualAutomaton {
    /// A single state that is both initial and terminal.
    pub fn new() -> Self {
        DualAutomaton { states: 1, pairs: Vec::new(), adjacency: vec![Vec::new()], initial: 0, terminal: 0 }
    }

    pub fn with_states(states: usize, initial: StateId, terminal: StateId) -> Result<Self, AutomatonError> {
        for s in [initial, terminal] {
            if s >= states {
                return Err(AutomatonError::UnknownState(s));
            }
        }
        Ok(DualAutomaton { states, pairs: Vec::new(), adjacency: vec![Vec::new(); states], initial, terminal })
    }

    pub fn add_state(&mut self) -> StateId {
        self.states += 1;
        self.adjacency.push(Vec::new());
        self.states - 1
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    /// Number of edges counting both members of each inverse pair.
    pub fn edge_count(&self) -> usize {
        2 * self.pairs.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn terminal(&self) -> StateId {
        self.terminal
    }

    fn check_state(&self, s: StateId) -> Result<(), AutomatonError> {
        if s < self.states {
            Ok(())
        } else {
            Err(AutomatonError::UnknownState(s))
        }
    }

    /// Adds `p --label--> q` together with its inverse edge.
    pub fn add_edge(&mut self, p: StateId, q: StateId, label: Word) -> Result<ArcId, AutomatonError> {
        self.check_state(p)?;
        self.check_state(q)?;
        let kind = LabelKind::of(&label)?;
        let k = self.pairs.len();
        self.pairs.push(EdgePair { source: p, target: q, label, kind });
        self.adjacency[p].push(ArcId(2 * k));
        self.adjacency[q].push(ArcId(2 * k + 1));
        Ok(ArcId(2 * k))
    }

    pub fn has_one_edge(&self, p: StateId, q: StateId) -> bool {
        self.adjacency[p].iter().any(|&a| self.kind(a) == LabelKind::One && self.target(a) == q)
    }

    /// Adds a 1-labeled edge `p -> q` unless one is already present.
    /// Returns whether an edge was added.
    pub fn add_one_edge(&mut self, p: StateId, q: StateId) -> Result<bool, AutomatonError> {
        self.check_state(p)?;
        self.check_state(q)?;
        if p == q {
            return Err(AutomatonError::OneLoop);
        }
        if self.has_one_edge(p, q) {
            return Ok(false);
        }
        self.add_edge(p, q, Word::empty())?;
        Ok(true)
    }

    pub fn arcs(&self) -> impl Iterator<Item = ArcId> + '_ {
        (0..2 * self.pairs.len()).map(ArcId)
    }

    pub fn out_arcs(&self, s: StateId) -> &[ArcId] {
        &self.adjacency[s]
    }

    pub fn source(&self, a: ArcId) -> StateId {
        let e = &self.pairs[a.pair()];
        if a.reversed() {
            e.target
        } else {
            e.source
        }
    }

    pub fn target(&self, a: ArcId) -> StateId {
        self.source(a.inverse())
    }

    pub fn kind(&self, a: ArcId) -> LabelKind {
        self.pairs[a.pair()].kind
    }

    pub fn label(&self, a: ArcId) -> Word {
        let e = &self.pairs[a.pair()];
        if a.reversed() {
            e.label.invert()
        } else {
            e.label.clone()
        }
    }

    /// The sub-automaton of 1-edges and edges over the alphabet of vertex
    /// group `v`, with initial `p` and terminal `q`.
    pub fn restrict(&self, v: usize, p: StateId, q: StateId) -> Result<DualAutomaton, AutomatonError> {
        let mut out = DualAutomaton::with_states(self.states, p, q)?;
        for e in &self.pairs {
            if e.kind.over(v) {
                out.add_edge(e.source, e.target, e.label.clone())?;
            }
        }
        Ok(out)
    }

    /// Language of an automaton over a single vertex alphabet, as subgroup
    /// generators plus a representative. Spanning tree by breadth-first
    /// search from the initial state in edge insertion order.
    pub fn extract_coset(&self) -> Result<VertexCoset, AutomatonError> {
        let mut alphabet = None;
        for e in &self.pairs {
            match (e.kind, alphabet) {
                (LabelKind::One, _) => {}
                (LabelKind::Edge, _) => return Err(AutomatonError::MixedAlphabets),
                (LabelKind::Vertex(v), None) => alphabet = Some(v),
                (LabelKind::Vertex(v), Some(w)) if v != w => return Err(AutomatonError::MixedAlphabets),
                _ => {}
            }
        }
        let forest = Forest::grow(self, |_| true, std::iter::once(self.initial));
        if forest.component[self.terminal].is_none() {
            return Ok(VertexCoset::Empty);
        }
        Ok(VertexCoset::Coset {
            generators: forest.loops[0].clone(),
            representative: forest.path[self.terminal].clone(),
        })
    }

    /// Deterministic Graphviz rendering; one arc per inverse pair, drawn in
    /// the direction whose edge letter is positive.
    pub fn export_dot(&self, table: &SymbolTable) -> String {
        let mut out = String::from("digraph dual_automaton {\n  rankdir=LR;\n");
        for s in 0..self.states {
            let shape = match (s == self.initial, s == self.terminal) {
                (true, true) => "shape=diamond, peripheries=2",
                (true, false) => "shape=diamond",
                (false, true) => "shape=doublecircle",
                (false, false) => "shape=circle",
            };
            let _ = writeln!(out, "  n{s} [label=\"{s}\", {shape}];");
        }
        for e in &self.pairs {
            let flip = e.kind == LabelKind::Edge && e.label.letters()[0].inverse;
            let (from, to, label) = if flip {
                (e.target, e.source, e.label.invert())
            } else {
                (e.source, e.target, e.label.clone())
            };
            let _ = writeln!(out, "  n{from} -> n{to} [label=\"{}\"];", table.display(&label));
        }
        out.push_str("}\n");
        out
    }
}

impl Default for DualAutomaton {
    fn default() -> Self {
        Self::new()
    }
}

/// A finitely generated coset `<generators> representative` of one vertex
/// group, or the empty coset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexCoset {
    Empty,
    Coset { generators: Vec<Word>, representative: Word },
}

impl VertexCoset {
    pub fn subgroup(generators: Vec<Word>) -> Self {
        VertexCoset::Coset { generators, representative: Word::empty() }
    }

    pub fn singleton(w: Word) -> Self {
        VertexCoset::Coset { generators: Vec::new(), representative: w }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, VertexCoset::Empty)
    }
}

/// Literal automaton for `<gens> rep`: one subdivided circle per generator at
/// the initial state and a subdivided thorn reading `rep` to a fresh terminal
/// state (a single 1-edge when `rep` is empty).
pub fn build_coset_automaton(gens: &[Word], rep: &Word) -> DualAutomaton {
    let mut a = DualAutomaton::new();
    let base = a.initial;
    for g in gens {
        let letters = g.letters();
        let mut cur = base;
        for (i, &l) in letters.iter().enumerate() {
            let next = if i + 1 == letters.len() { base } else { a.add_state() };
            a.add_edge(cur, next, Word::letter(l)).expect("single letter label");
            cur = next;
        }
    }
    let mut cur = base;
    if rep.is_empty() {
        let t = a.add_state();
        a.add_edge(cur, t, Word::empty()).expect("1 label");
        cur = t;
    } else {
        for &l in rep.letters() {
            let next = a.add_state();
            a.add_edge(cur, next, Word::letter(l)).expect("single letter label");
            cur = next;
        }
    }
    a.terminal = cur;
    a
}

/// Breadth-first spanning forest over the arcs accepted by a filter.
pub(crate) struct Forest {
    /// Component index of each reached state.
    pub component: Vec<Option<usize>>,
    /// Reduced label of the tree path from the component root.
    pub path: Vec<Word>,
    /// Nontrivial fundamental loop labels at each root.
    pub loops: Vec<Vec<Word>>,
    pub members: Vec<Vec<StateId>>,
}

impl Forest {
    pub fn grow(
        a: &DualAutomaton,
        keep: impl Fn(LabelKind) -> bool,
        roots: impl IntoIterator<Item = StateId>,
    ) -> Forest {
        let n = a.states;
        let mut component = vec![None; n];
        let mut path = vec![Word::empty(); n];
        let mut tree_pair = vec![false; a.pairs.len()];
        let mut members = Vec::new();
        for root in roots {
            if component[root].is_some() {
                continue;
            }
            let c = members.len();
            let mut list = vec![root];
            component[root] = Some(c);
            let mut queue = VecDeque::from([root]);
            while let Some(s) = queue.pop_front() {
                for &arc in &a.adjacency[s] {
                    if !keep(a.kind(arc)) {
                        continue;
                    }
                    let t = a.target(arc);
                    if component[t].is_none() {
                        component[t] = Some(c);
                        path[t] = path[s].concat(&a.label(arc)).free_reduce();
                        tree_pair[arc.pair()] = true;
                        list.push(t);
                        queue.push_back(t);
                    }
                }
            }
            members.push(list);
        }
        let mut loops = vec![Vec::new(); members.len()];
        for (k, e) in a.pairs.iter().enumerate() {
            if tree_pair[k] || !keep(e.kind) {
                continue;
            }
            if let Some(c) = component[e.source] {
                let w = path[e.source].concat(&e.label).concat(&path[e.target].invert()).free_reduce();
                if !w.is_empty() {
                    loops[c].push(w);
                }
            }
        }
        Forest { component, path, loops, members }
    }

    /// Language of the sub-automaton from `p` to `q`:
    /// `path(p)^-1 H path(q)` with `H` the loop group at the common root.
    pub fn coset(&self, p: StateId, q: StateId) -> VertexCoset {
        let (Some(c), Some(d)) = (self.component[p], self.component[q]) else {
            return VertexCoset::Empty;
        };
        if c != d {
            return VertexCoset::Empty;
        }
        let to_root = self.path[p].invert();
        let generators = self.loops[c]
            .iter()
            .map(|l| to_root.concat(l).concat(&self.path[p]).free_reduce())
            .collect();
        VertexCoset::Coset { generators, representative: to_root.concat(&self.path[q]).free_reduce() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_oracle::coset_contains;
    use crate::words::tests::ab_table;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(t: &SymbolTable, s: &str) -> Word {
        t.parse_word(s).unwrap()
    }

    fn accepts(a: &DualAutomaton, word: &Word) -> bool {
        match a.extract_coset().unwrap() {
            VertexCoset::Empty => false,
            VertexCoset::Coset { generators, representative } => {
                coset_contains(&generators, &representative, word).unwrap()
            }
        }
    }

    fn check_involution(a: &DualAutomaton) {
        for arc in a.arcs() {
            assert_ne!(arc, arc.inverse());
            assert_eq!(arc.inverse().inverse(), arc);
            assert_eq!(a.label(arc.inverse()), a.label(arc).invert());
            assert_eq!(a.source(arc.inverse()), a.target(arc));
            assert!(LabelKind::of(&a.label(arc)).is_ok());
        }
    }

    #[test]
    fn build_examples() {
        let t = ab_table();
        let a = build_coset_automaton(&[w(&t, "a")], &w(&t, "b"));
        check_involution(&a);
        assert_eq!(a.state_count(), 2);
        for k in -4..=4 {
            assert!(accepts(&a, &w(&t, "a").pow(k).concat(&w(&t, "b"))));
        }
        assert!(!accepts(&a, &w(&t, "b a")));

        let a = build_coset_automaton(&[], &Word::empty());
        assert_eq!(a.state_count(), 2);
        assert_eq!(a.edge_count(), 2);
        assert_ne!(a.initial(), a.terminal());
        assert!(accepts(&a, &Word::empty()));
        assert!(!accepts(&a, &w(&t, "a")));

        let a = build_coset_automaton(&[w(&t, "a b")], &w(&t, "a"));
        check_involution(&a);
        assert!(accepts(&a, &w(&t, "a")));
        assert!(accepts(&a, &w(&t, "a b a")));
        assert!(!accepts(&a, &w(&t, "b")));
        // enumerate (ab)^k a for |k| <= 5
        for k in -5..=5 {
            assert!(accepts(&a, &w(&t, "a b").pow(k).concat(&w(&t, "a"))));
        }
        for other in ["b", "a^2", "b a", "a b", "1"] {
            let x = w(&t, other);
            let in_coset = (-5..=5).any(|k| w(&t, "a b").pow(k).concat(&w(&t, "a")).free_reduce() == x.free_reduce());
            assert_eq!(accepts(&a, &x), in_coset, "{other}");
        }
    }

    #[test]
    fn restrict_examples() {
        let mut t = ab_table();
        t.declare("x", Sort::Vertex(1)).unwrap();
        let mut a = DualAutomaton::with_states(3, 0, 2).unwrap();
        a.add_edge(0, 1, w(&t, "a")).unwrap();
        a.add_edge(1, 2, w(&t, "x")).unwrap();
        let r = a.restrict(0, 0, 1).unwrap();
        assert_eq!(r.edge_count(), 2);
        assert_eq!(r.label(ArcId(0)), w(&t, "a"));
        assert_eq!((r.initial(), r.terminal()), (0, 1));

        let r = a.restrict(7, 0, 2).unwrap();
        assert_eq!(r.edge_count(), 0);
        assert_eq!(r.state_count(), 3);

        a.add_one_edge(0, 2).unwrap();
        for v in [0, 1, 7] {
            assert!(a.restrict(v, 0, 2).unwrap().has_one_edge(0, 2));
        }
        assert_eq!(a.restrict(0, 0, 9), Err(AutomatonError::UnknownState(9)));
    }

    #[test]
    fn extract_examples() {
        let t = ab_table();
        let a = build_coset_automaton(&[w(&t, "a")], &w(&t, "b"));
        assert_eq!(
            a.extract_coset().unwrap(),
            VertexCoset::Coset { generators: vec![w(&t, "a")], representative: w(&t, "b") }
        );

        let mut a = DualAutomaton::with_states(4, 0, 3).unwrap();
        a.add_edge(0, 1, w(&t, "a")).unwrap();
        a.add_edge(2, 3, w(&t, "b")).unwrap();
        assert_eq!(a.extract_coset().unwrap(), VertexCoset::Empty);

        let mut a = DualAutomaton::with_states(2, 0, 1).unwrap();
        a.add_edge(0, 1, w(&t, "a")).unwrap();
        a.add_edge(0, 1, w(&t, "b")).unwrap();
        let VertexCoset::Coset { generators, representative } = a.extract_coset().unwrap() else {
            panic!("nonempty");
        };
        assert_eq!(representative, w(&t, "a"));
        assert_eq!(generators.len(), 1);
        let ab = w(&t, "a b^-1");
        assert!(coset_contains(&generators, &Word::empty(), &ab).unwrap());
        assert!(coset_contains(&[ab.clone()], &Word::empty(), &generators[0]).unwrap());
        // sample accepted path labels
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let mut label = Word::empty();
            let mut at = 0;
            for _ in 0..rng.gen_range(0..8) {
                let arcs = a.out_arcs(at);
                let arc = arcs[rng.gen_range(0..arcs.len())];
                label.extend_from(&a.label(arc));
                at = a.target(arc);
            }
            if at == 0 {
                label.extend_from(&w(&t, "a"));
            }
            assert!(coset_contains(&[ab.clone()], &w(&t, "a"), &label).unwrap());
        }
    }

    #[test]
    fn extract_rejects_mixed() {
        let mut t = ab_table();
        t.declare("x", Sort::Vertex(1)).unwrap();
        let mut a = DualAutomaton::with_states(2, 0, 1).unwrap();
        a.add_edge(0, 1, w(&t, "a")).unwrap();
        a.add_edge(0, 1, w(&t, "x")).unwrap();
        assert_eq!(a.extract_coset(), Err(AutomatonError::MixedAlphabets));
        let mut a = DualAutomaton::with_states(2, 0, 1).unwrap();
        a.add_edge(0, 1, w(&t, "e")).unwrap();
        assert_eq!(a.extract_coset(), Err(AutomatonError::MixedAlphabets));
    }

    #[test]
    fn labels_are_validated() {
        let mut t = ab_table();
        t.declare("x", Sort::Vertex(1)).unwrap();
        let mut a = DualAutomaton::with_states(2, 0, 1).unwrap();
        assert_eq!(a.add_edge(0, 1, w(&t, "a x")), Err(AutomatonError::InvalidLabel));
        assert_eq!(a.add_edge(0, 1, w(&t, "e e")), Err(AutomatonError::InvalidLabel));
        assert_eq!(a.add_edge(0, 1, w(&t, "e a")), Err(AutomatonError::InvalidLabel));
        assert!(a.add_edge(0, 1, w(&t, "e^-1")).is_ok());
    }

    #[test]
    fn add_one_edge_examples() {
        let mut a = DualAutomaton::with_states(3, 0, 2).unwrap();
        assert_eq!(a.add_one_edge(0, 1), Ok(true));
        assert_eq!(a.edge_count(), 2);
        assert_eq!(a.add_one_edge(0, 1), Ok(false));
        assert_eq!(a.add_one_edge(1, 0), Ok(false));
        assert_eq!(a.edge_count(), 2);
        assert_eq!(a.state_count(), 3);
        assert_eq!(a.add_one_edge(1, 1), Err(AutomatonError::OneLoop));
        assert!(a.restrict(4, 0, 1).unwrap().has_one_edge(0, 1));
    }

    #[test]
    fn dot_examples() {
        let t = ab_table();
        let mut a = DualAutomaton::with_states(2, 0, 1).unwrap();
        a.add_edge(0, 1, w(&t, "e^-1")).unwrap();
        let dot = a.export_dot(&t);
        assert_eq!(dot.lines().filter(|l| l.contains("[label=") && !l.contains("->")).count(), 2);
        assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 1);
        assert!(dot.contains("n1 -> n0 [label=\"e\"]"));
        assert!(dot.contains("n0 [label=\"0\", shape=diamond]"));
        assert!(dot.contains("n1 [label=\"1\", shape=doublecircle]"));
        assert_eq!(dot, a.clone().export_dot(&t));

        let a = DualAutomaton::new();
        let dot = a.export_dot(&t);
        assert_eq!(dot.lines().filter(|l| l.contains("[label=")).count(), 1);
        assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 0);

        let a = build_coset_automaton(&[w(&t, "a b^-1")], &Word::empty());
        assert!(a.export_dot(&t).contains("[label=\"b^-1\"]") || a.export_dot(&t).contains("[label=\"b\"]"));
        assert!(a.export_dot(&t).contains("[label=\"1\"]"));
    }

    #[test]
    fn forest_coset_matches_extraction() {
        let t = ab_table();
        let mut a = build_coset_automaton(&[w(&t, "a b a^-1"), w(&t, "b^2")], &w(&t, "a b"));
        let extra = a.add_state();
        a.add_edge(extra, 2, w(&t, "b a")).unwrap();
        let forest = Forest::grow(&a, |k| k.over(0), 0..a.state_count());
        for p in 0..a.state_count() {
            for q in 0..a.state_count() {
                let direct = a.restrict(0, p, q).unwrap().extract_coset().unwrap();
                let via = forest.coset(p, q);
                match (&direct, &via) {
                    (VertexCoset::Empty, VertexCoset::Empty) => {}
                    (
                        VertexCoset::Coset { generators: g1, representative: r1 },
                        VertexCoset::Coset { generators: g2, representative: r2 },
                    ) => {
                        assert!(coset_contains(g1, r1, r2).unwrap());
                        for g in g2 {
                            assert!(coset_contains(g1, r1, &g.concat(r2)).unwrap());
                        }
                        for g in g1 {
                            assert!(coset_contains(g2, r2, &g.concat(r1)).unwrap());
                        }
                    }
                    _ => panic!("emptiness differs at {p} {q}"),
                }
            }
        }
    }
}
