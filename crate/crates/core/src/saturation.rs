//! The membership decision procedure: build the dual automaton for `K g^-1`,
//! saturate it under Step 1 (1-edges between states joined by a path whose
//! label is trivial in a vertex group) and Step 2 (transfer of cosets across
//! pairs of equally labeled edge letters), then look for a 1-edge from the
//! initial to the terminal state.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::dual_automaton::{build_coset_automaton, ArcId, AutomatonError, DualAutomaton, Forest, LabelKind, StateId};
use crate::gog::{CycleTypeWord, GogError, GraphOfGroups};
use crate::lattice::LatticeError;
use crate::oracle::{coset_transfer, EdgeCoset, OracleError};
use crate::words::{Letter, Word};

pub const DEFAULT_MAX_ROUNDS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SaturationError {
    #[error("round cap of {0} reached before the fixpoint (internal error)")]
    RoundCap(usize),
    #[error("memoized edge coset shrank for arcs {0:?} (internal error)")]
    NotMonotone((ArcId, ArcId)),
    #[error("state count changed during saturation (internal error)")]
    StatesChanged,
    #[error(transparent)]
    Gog(#[from] GogError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl SaturationError {
    /// Errors that point at a bug rather than at bad input.
    pub fn is_internal(&self) -> bool {
        !matches!(self, SaturationError::Gog(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Member,
    NonMember,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Member => "MEMBER",
            Verdict::NonMember => "NON-MEMBER",
        })
    }
}

/// One applied step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    OneEdge { round: usize, vertex: usize, p: StateId, q: StateId },
    Transfer { round: usize, letter: Letter, arcs: (ArcId, ArcId), p: StateId, p2: StateId, coset: String, label: Word },
}

impl TraceEvent {
    pub fn render(&self, g: &GraphOfGroups) -> String {
        match self {
            TraceEvent::OneEdge { round, vertex, p, q } => {
                format!("round {round} step1 vertex={} {p} -> {q} label 1", g.vertices()[*vertex].name)
            }
            TraceEvent::Transfer { round, letter, arcs, p, p2, coset, label } => format!(
                "round {round} step2 y={} arcs=({},{}) C={coset} {p} -> {p2} label {}",
                g.table().render_letter(*letter),
                arcs.0 .0,
                arcs.1 .0,
                g.table().display(label)
            ),
        }
    }
}

/// Dual automaton under saturation, with the memoized edge cosets.
#[derive(Debug, Clone)]
pub struct SaturationState<'g> {
    gog: &'g GraphOfGroups,
    automaton: DualAutomaton,
    memo: BTreeMap<(ArcId, ArcId), EdgeCoset>,
    round: usize,
    trivially_member: bool,
    states: usize,
    log: Vec<TraceEvent>,
}

/// Lazily rebuilt spanning forests, one per vertex group, over the 1-edges
/// and the edges labeled in that group.
struct Atlas {
    forests: Vec<Option<Forest>>,
}

impl Atlas {
    fn new(n: usize) -> Self {
        Atlas { forests: (0..n).map(|_| None).collect() }
    }

    fn get(&mut self, a: &DualAutomaton, v: usize) -> &Forest {
        self.forests[v].get_or_insert_with(|| {
            Forest::grow(a, |k| k == LabelKind::One || k == LabelKind::Vertex(v), 0..a.state_count())
        })
    }

    fn invalidate(&mut self, label: &Word) {
        match label.letters().first().and_then(|l| l.vertex()) {
            Some(v) => self.forests[v] = None,
            None => self.forests.iter_mut().for_each(|f| *f = None),
        }
    }
}

impl<'g> SaturationState<'g> {
    /// Literal automaton with one circle per subgroup generator and a thorn
    /// reading `g^-1`.
    pub fn build(gog: &'g GraphOfGroups, k_gens: &[CycleTypeWord], g: &CycleTypeWord) -> Self {
        let gens: Vec<Word> = k_gens.iter().map(|k| k.to_word().free_reduce()).filter(|k| !k.is_empty()).collect();
        let g_word = g.to_word().free_reduce();
        let automaton = build_coset_automaton(&gens, &g_word.invert());
        SaturationState {
            gog,
            states: automaton.state_count(),
            automaton,
            memo: BTreeMap::new(),
            round: 0,
            trivially_member: g_word.is_empty(),
            log: Vec::new(),
        }
    }

    /// Parses and checks the query words before building.
    pub fn from_text(gog: &'g GraphOfGroups, k_gens: &[&str], g: &str) -> Result<Self, GogError> {
        let ks = k_gens.iter().map(|k| gog.parse_cycle(k)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::build(gog, &ks, &gog.parse_cycle(g)?))
    }

    pub fn automaton(&self) -> &DualAutomaton {
        &self.automaton
    }

    pub fn gog(&self) -> &GraphOfGroups {
        self.gog
    }

    pub fn rounds(&self) -> usize {
        self.round
    }

    pub fn trivially_member(&self) -> bool {
        self.trivially_member
    }

    pub fn memo(&self) -> &BTreeMap<(ArcId, ArcId), EdgeCoset> {
        &self.memo
    }

    pub fn log(&self) -> &[TraceEvent] {
        &self.log
    }

    /// Step 1 sweep; returns whether a 1-edge was added.
    pub fn step1(&mut self) -> Result<bool, SaturationError> {
        let mut changed = false;
        for v in 0..self.gog.vertices().len() {
            let forest = Forest::grow(
                &self.automaton,
                |k| k == LabelKind::One || k == LabelKind::Vertex(v),
                0..self.automaton.state_count(),
            );
            let alphabet = self.gog.alphabet(v);
            // Adding a 1-edge inside one class leaves the loop group of the
            // component unchanged, so the classes stay valid for this vertex.
            for (c, members) in forest.members.iter().enumerate() {
                if members.len() < 2 {
                    continue;
                }
                let paths: Vec<Word> = members.iter().map(|&s| forest.path[s].clone()).collect();
                let classes = alphabet.right_coset_classes(&forest.loops[c], &paths)?;
                let mut order: Vec<(usize, StateId)> = classes.into_iter().zip(members.iter().copied()).collect();
                order.sort_unstable();
                for (i, &(ci, p)) in order.iter().enumerate() {
                    for &(cj, q) in &order[i + 1..] {
                        if ci != cj {
                            break;
                        }
                        if self.automaton.add_one_edge(p, q)? {
                            self.log.push(TraceEvent::OneEdge { round: self.round, vertex: v, p, q });
                            changed = true;
                        }
                    }
                }
            }
        }
        Ok(changed)
    }

    /// Step 2 sweep; returns whether an edge was added.
    pub fn step2(&mut self) -> Result<bool, SaturationError> {
        let mut by_letter: BTreeMap<Letter, Vec<ArcId>> = BTreeMap::new();
        for arc in self.automaton.arcs() {
            if self.automaton.kind(arc) == LabelKind::Edge {
                by_letter.entry(self.automaton.label(arc).letters()[0]).or_default().push(arc);
            }
        }
        let mut atlas = Atlas::new(self.gog.vertices().len());
        let mut arcs: Vec<(Letter, ArcId)> =
            by_letter.iter().flat_map(|(&y, list)| list.iter().map(move |&a| (y, a))).collect();
        arcs.sort_by_key(|&(_, a)| a);
        let mut changed = false;
        for (y, first) in arcs {
            for &second in &by_letter[&y] {
                changed |= self.transfer(&mut atlas, y, first, second)?;
            }
        }
        Ok(changed)
    }

    fn transfer(&mut self, atlas: &mut Atlas, y: Letter, first: ArcId, second: ArcId) -> Result<bool, SaturationError> {
        let (p, q) = (self.automaton.source(first), self.automaton.target(first));
        let (p2, q2) = (self.automaton.source(second), self.automaton.target(second));
        let (to, from) = (self.gog.edge_target(y), self.gog.edge_source(y));
        let target_end = self.gog.target_end(y);
        let source_end = self.gog.source_end(y);

        let l = atlas.get(&self.automaton, to).coset(q, q2);
        let c = self.gog.alphabet(to).intersect_edge_image(&l, target_end)?;
        let key = (first, second);
        match self.memo.get(&key) {
            Some(old) if *old == c => return Ok(false),
            Some(old) if !old.is_subset_of(&c)? => return Err(SaturationError::NotMonotone(key)),
            None if c.is_empty() => return Ok(false),
            _ => {}
        }
        let alphabet = self.gog.alphabet(from);
        let (rep, gens) = coset_transfer(alphabet, target_end, source_end, &c)?;
        let mut labels = vec![alphabet.normalize(&rep)?];
        for g in &gens {
            labels.push(alphabet.normalize(&g.concat(&rep))?);
        }
        let mut changed = false;
        for u in labels {
            let existing = atlas.get(&self.automaton, from).coset(p, p2);
            if alphabet.vertex_contains(&existing, &u)? {
                continue;
            }
            if u.is_empty() {
                self.automaton.add_one_edge(p, p2)?;
            } else {
                self.automaton.add_edge(p, p2, u.clone())?;
            }
            atlas.invalidate(&u);
            self.log.push(TraceEvent::Transfer {
                round: self.round,
                letter: y,
                arcs: key,
                p,
                p2,
                coset: c.to_string(),
                label: u,
            });
            changed = true;
        }
        self.memo.insert(key, c);
        Ok(changed)
    }

    /// One full Step 1 sweep followed by one full Step 2 sweep.
    pub fn run_round(&mut self) -> Result<bool, SaturationError> {
        self.round += 1;
        let a = self.step1()?;
        let b = self.step2()?;
        if self.automaton.state_count() != self.states {
            return Err(SaturationError::StatesChanged);
        }
        Ok(a || b)
    }

    /// Runs rounds until nothing changes.
    pub fn saturate(&mut self, max_rounds: usize) -> Result<(), SaturationError> {
        while self.run_round()? {
            if self.round >= max_rounds {
                return Err(SaturationError::RoundCap(max_rounds));
            }
        }
        Ok(())
    }

    pub fn verdict(&self) -> Verdict {
        let a = &self.automaton;
        if self.trivially_member || a.has_one_edge(a.initial(), a.terminal()) {
            Verdict::Member
        } else {
            Verdict::NonMember
        }
    }
}

/// Whether `g` lies in the subgroup generated by `k_gens`.
pub fn decide(gog: &GraphOfGroups, k_gens: &[CycleTypeWord], g: &CycleTypeWord) -> Result<Verdict, SaturationError> {
    let mut state = SaturationState::build(gog, k_gens, g);
    if state.trivially_member {
        return Ok(Verdict::Member);
    }
    state.saturate(DEFAULT_MAX_ROUNDS)?;
    Ok(state.verdict())
}

/// [`decide`] on word strings.
pub fn decide_text(gog: &GraphOfGroups, k_gens: &[&str], g: &str) -> Result<Verdict, SaturationError> {
    let ks = k_gens.iter().map(|k| gog.parse_cycle(k)).collect::<Result<Vec<_>, _>>()?;
    decide(gog, &ks, &gog.parse_cycle(g)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual_automaton::VertexCoset;
    use crate::groups;

    fn gog(spec: crate::spec::SpecFile) -> GraphOfGroups {
        GraphOfGroups::validate(&spec).unwrap()
    }

    fn saturated<'g>(g: &'g GraphOfGroups, k: &[&str], w: &str) -> SaturationState<'g> {
        let mut s = SaturationState::from_text(g, k, w).unwrap();
        s.saturate(DEFAULT_MAX_ROUNDS).unwrap();
        s
    }

    #[test]
    fn build_examples() {
        let g = gog(groups::baumslag_solitar(1, 2));
        let s = SaturationState::from_text(&g, &["a"], "e a e^-1").unwrap();
        // one a-circle at the base, thorn of three letters
        assert_eq!(s.automaton().state_count(), 4);
        assert_eq!(s.automaton().edge_count(), 8);
        assert!(!s.trivially_member());
        assert!(SaturationState::from_text(&g, &[], "").unwrap().trivially_member());
        let s = SaturationState::from_text(&g, &["a"], "a^5").unwrap();
        assert_eq!(s.automaton().state_count(), 6);
        let t = gog(groups::trefoil());
        assert!(SaturationState::from_text(&t, &["x"], "e").is_err());
    }

    #[test]
    fn decide_examples() {
        let bs = gog(groups::baumslag_solitar(1, 2));
        assert_eq!(decide_text(&bs, &["a"], "e a e^-1").unwrap(), Verdict::Member);
        assert_eq!(decide_text(&bs, &["a"], "e^-1 a e").unwrap(), Verdict::NonMember);
        assert_eq!(decide_text(&bs, &[], "").unwrap(), Verdict::Member);
        assert_eq!(decide_text(&bs, &["e"], "a e a^-1").unwrap(), Verdict::NonMember);
        assert_eq!(decide_text(&bs, &["e", "a^2"], "e a e^-1").unwrap(), Verdict::Member);

        let t = gog(groups::trefoil());
        assert_eq!(decide_text(&t, &["x^2"], "e y^3 e^-1").unwrap(), Verdict::Member);
        assert_eq!(decide_text(&t, &["x^2"], "e y e^-1").unwrap(), Verdict::NonMember);
        assert_eq!(decide_text(&t, &["x^3"], "x^2").unwrap(), Verdict::NonMember);

        let fp = gog(groups::free_product());
        assert_eq!(decide_text(&fp, &["a e b e^-1"], "a e b e^-1").unwrap(), Verdict::Member);
        assert_eq!(decide_text(&fp, &["a^2", "a e b e^-1"], "e b e^-1 a").unwrap(), Verdict::NonMember);
    }

    #[test]
    fn bs12_trace_bridges_thorn() {
        let g = gog(groups::baumslag_solitar(1, 2));
        let s = saturated(&g, &["a"], "e a e^-1");
        // the thorn reads g^-1 = e a^-1 e^-1; its e-edges pair up and bridge 0 -> 3
        let lines: Vec<String> = s.log().iter().map(|e| e.render(&g)).collect();
        assert!(lines.iter().any(|l| l.contains("step2") && l.ends_with("0 -> 3 label a^-1 a^-1")), "{lines:?}");
        assert_eq!(s.verdict(), Verdict::Member);
    }

    #[test]
    fn step_examples() {
        let bs = gog(groups::baumslag_solitar(1, 2));
        // path a, a^-1 from 0 to 2
        let mut s = SaturationState::from_text(&bs, &[], "a").unwrap();
        let x = s.automaton.add_state();
        s.automaton.add_edge(0, x, bs.parse_word("a").unwrap()).unwrap();
        s.automaton.add_edge(x, 1, bs.parse_word("a^-1").unwrap()).unwrap();
        s.states += 1;
        assert!(s.step1().unwrap());
        assert!(s.automaton.has_one_edge(0, 1));
        assert!(!s.step1().unwrap());

        // thorn e with no partner across a gap: no change
        let mut s = SaturationState::from_text(&bs, &[], "e^-1 a e").unwrap();
        assert!(!s.step1().unwrap());
        let before = s.automaton.clone();
        s.saturate(DEFAULT_MAX_ROUNDS).unwrap();
        assert_eq!(s.automaton.edge_count(), before.edge_count());
        assert!(!s.run_round().unwrap());
    }

    #[test]
    fn free_product_adds_only_one_edges() {
        let fp = gog(groups::free_product());
        for (k, w) in [
            (vec!["a e b e^-1", "a^2"], "a e b e^-1 a^-2"),
            (vec!["e b e^-1 a", "a e b^2 e^-1"], "a^-1 e b^-1 e^-1"),
            (vec!["e b^2 e^-1"], "e b e^-1"),
        ] {
            let s = saturated(&fp, &k, w);
            for ev in s.log() {
                if let TraceEvent::Transfer { label, .. } = ev {
                    assert!(label.is_empty());
                }
            }
        }
    }

    #[test]
    fn step1_matches_literal_route() {
        let t = gog(groups::trefoil());
        let mut s = SaturationState::from_text(&t, &["x^2 e y e^-1", "x^3"], "x e y^-1 e^-1 x e y^3 e^-1").unwrap();
        for _ in 0..3 {
            let before = s.automaton.clone();
            s.step1().unwrap();
            let n = before.state_count();
            for v in 0..t.vertices().len() {
                for p in 0..n {
                    for q in 0..n {
                        if p == q {
                            continue;
                        }
                        let c = before.restrict(v, p, q).unwrap().extract_coset().unwrap();
                        let literal = !matches!(c, VertexCoset::Empty)
                            && t.alphabet(v).vertex_contains(&c, &Word::empty()).unwrap();
                        if literal {
                            assert!(s.automaton.has_one_edge(p, q), "missing 1-edge {p}-{q} at {v}");
                        }
                    }
                }
            }
            s.step2().unwrap();
        }
    }

    #[test]
    fn memo_is_monotone_and_deterministic() {
        let g = gog(groups::baumslag_solitar(2, 3));
        let a = saturated(&g, &["e a e^-1", "a^2"], "a^3");
        let b = saturated(&g, &["e a e^-1", "a^2"], "a^3");
        assert_eq!(a.automaton(), b.automaton());
        assert_eq!(a.log(), b.log());
        assert_eq!(a.verdict(), Verdict::Member);
        let dot = a.automaton().export_dot(g.table());
        assert_eq!(dot, b.automaton().export_dot(g.table()));
    }
}
