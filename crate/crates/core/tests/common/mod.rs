//! Shared fixtures for the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use benign_gwp::brute::{brute_member, BruteResult};
use benign_gwp::dual_automaton::DualAutomaton;
use benign_gwp::free_oracle::coset_contains;
use benign_gwp::gog::{CycleTypeWord, GraphOfGroups};
use benign_gwp::groups;
use benign_gwp::raag::{compile, SimpleGraph};
use benign_gwp::saturation::{SaturationState, Verdict, DEFAULT_MAX_ROUNDS};
use benign_gwp::spec::SpecFile;
use benign_gwp::words::{Sort, SymbolTable, Word};
use rand::seq::SliceRandom;
use rand::Rng;

/// A test group: its spec and the words of cycle type used as building
/// blocks for random subgroups.
pub struct Group {
    pub name: &'static str,
    pub spec: SpecFile,
    pub gog: GraphOfGroups,
    pub atoms: Vec<String>,
}

impl Group {
    fn new(name: &'static str, spec: SpecFile, atoms: &[&str]) -> Self {
        let gog = GraphOfGroups::validate(&spec).expect("fixture spec is valid");
        Group { name, spec, gog, atoms: atoms.iter().map(|s| s.to_string()).collect() }
    }

    pub fn parse(&self, w: &str) -> CycleTypeWord {
        self.gog.parse_cycle(w).unwrap_or_else(|e| panic!("{}: `{w}`: {e}", self.name))
    }

    pub fn render(&self, w: &CycleTypeWord) -> String {
        self.gog.render_cycle(w)
    }
}

pub fn p3_spec() -> SpecFile {
    let g = SimpleGraph::new(
        vec!["a".into(), "b".into(), "c".into()],
        &[("a".into(), "b".into()), ("b".into(), "c".into())],
    )
    .unwrap();
    compile(&g).unwrap().spec
}

pub fn bs12() -> Group {
    Group::new("BS(1,2)", groups::baumslag_solitar(1, 2), &["a", "e"])
}

pub fn bs23() -> Group {
    Group::new("BS(2,3)", groups::baumslag_solitar(2, 3), &["a", "e"])
}

pub fn trefoil() -> Group {
    Group::new("trefoil", groups::trefoil(), &["x", "e y e^-1"])
}

pub fn raag_p3() -> Group {
    let spec = p3_spec();
    let t = spec.translation.clone().unwrap();
    let atoms: Vec<&str> = ["a", "b", "c"].iter().map(|x| t[*x].as_str()).collect();
    Group::new("A(P3)", spec.clone(), &atoms)
}

pub fn free_product() -> Group {
    Group::new("F(a)*F(b)", groups::free_product(), &["a", "e b e^-1"])
}

pub fn all_groups() -> Vec<Group> {
    vec![bs12(), bs23(), trefoil(), raag_p3(), free_product()]
}

fn power(w: &CycleTypeWord, inverse: bool) -> CycleTypeWord {
    if inverse {
        w.inverse()
    } else {
        w.clone()
    }
}

/// Product of 1..=max_len random atoms with random signs.
pub fn random_atom_product(g: &Group, rng: &mut impl Rng, max_len: usize) -> CycleTypeWord {
    let len = rng.gen_range(1..=max_len);
    (0..len).fold(CycleTypeWord::identity(), |acc, _| {
        let atom = g.parse(g.atoms.choose(rng).expect("atoms"));
        acc.concat(&power(&atom, rng.gen_bool(0.5)))
    })
}

/// A query instance `g ∈ <K>?` with a known positive certificate.
#[derive(Clone)]
pub struct Instance {
    pub subgroup: Vec<String>,
    pub element: String,
}

impl Instance {
    pub fn parsed(&self, g: &Group) -> (Vec<CycleTypeWord>, CycleTypeWord) {
        (self.subgroup.iter().map(|k| g.parse(k)).collect(), g.parse(&self.element))
    }

    pub fn query_json(&self) -> String {
        serde_json::json!({"subgroup": self.subgroup, "element": self.element}).to_string()
    }
}

/// Random subgroup of 1..=2 generators and an element that is a product of
/// 1..=max_factors of them.
pub fn random_positive(g: &Group, rng: &mut impl Rng, max_factors: usize) -> Instance {
    let k: Vec<CycleTypeWord> = (0..rng.gen_range(1..=2)).map(|_| random_atom_product(g, rng, 3)).collect();
    let n = rng.gen_range(1..=max_factors);
    let elem = (0..n).fold(CycleTypeWord::identity(), |acc, _| {
        let f = k.choose(rng).expect("generators");
        acc.concat(&power(f, rng.gen_bool(0.5)))
    });
    Instance { subgroup: k.iter().map(|w| g.render(w)).collect(), element: g.render(&elem) }
}

/// Random walk from the initial state completed to the terminal state by a
/// shortest path; the concatenated label is accepted by the automaton.
pub fn sample_accepted(a: &DualAutomaton, rng: &mut impl Rng, max_walk: usize) -> Word {
    let mut label = Word::empty();
    let mut s = a.initial();
    for _ in 0..rng.gen_range(0..=max_walk) {
        let Some(&arc) = a.out_arcs(s).choose(rng) else { break };
        label.extend_from(&a.label(arc));
        s = a.target(arc);
    }
    let mut prev = vec![None; a.state_count()];
    prev[s] = Some(None);
    let mut queue = VecDeque::from([s]);
    while let Some(x) = queue.pop_front() {
        for &arc in a.out_arcs(x) {
            let t = a.target(arc);
            if prev[t].is_none() {
                prev[t] = Some(Some(arc));
                queue.push_back(t);
            }
        }
    }
    let mut path = Vec::new();
    let mut t = a.terminal();
    while let Some(Some(arc)) = prev[t] {
        path.push(arc);
        t = a.source(arc);
    }
    assert_eq!(t, s, "terminal state unreachable");
    for arc in path.into_iter().rev() {
        label.extend_from(&a.label(arc));
    }
    label
}

/// Outcome of checking sampled labels against `K g^-1`.
#[derive(Debug, Default, Clone, Copy)]
pub struct SampleStats {
    pub sampled: usize,
    pub certified: usize,
    pub violations: usize,
}

impl SampleStats {
    pub fn add(&mut self, other: SampleStats) {
        self.sampled += other.sampled;
        self.certified += other.certified;
        self.violations += other.violations;
    }
}

/// Checks up to `count` accepted labels `w`: each must be of cycle type, and
/// `w g` must lie in `K` whenever the brute oracle (or, on the free product,
/// the Stallings oracle) can tell.
pub fn check_language(
    g: &Group,
    state: &SaturationState,
    k: &[CycleTypeWord],
    elem: &CycleTypeWord,
    count: usize,
    rng: &mut impl Rng,
) -> SampleStats {
    let mut stats = SampleStats::default();
    let exact = (g.name == "F(a)*F(b)").then(|| FreeRoute::new(g, k));
    for _ in 0..count {
        let label = sample_accepted(state.automaton(), rng, 6);
        stats.sampled += 1;
        let Ok(w) = g.gog.check_cycle_type(&label) else {
            stats.violations += 1;
            continue;
        };
        let wg = w.concat(elem);
        if let Some(route) = &exact {
            stats.certified += 1;
            if !route.contains(&g.gog.render_cycle(&wg)) {
                stats.violations += 1;
            }
        } else if let Ok(BruteResult::Witness(_)) = brute_member(&g.gog, k, &wg, 4) {
            stats.certified += 1;
        }
    }
    stats
}

/// `F(a, b)` read off the free product by deleting the tree edge `e`.
pub struct FreeRoute {
    pub table: SymbolTable,
    pub gens: Vec<Word>,
}

impl FreeRoute {
    pub fn new(g: &Group, k: &[CycleTypeWord]) -> Self {
        let mut table = SymbolTable::new();
        table.declare("a", Sort::Vertex(0)).unwrap();
        table.declare("b", Sort::Vertex(0)).unwrap();
        let mut route = FreeRoute { table, gens: Vec::new() };
        route.gens = k.iter().map(|w| route.word(&g.gog.render_cycle(w))).collect();
        route
    }

    pub fn word(&self, text: &str) -> Word {
        let kept: Vec<&str> = text.split_whitespace().filter(|t| !t.starts_with('e')).collect();
        self.table.parse_word(&kept.join(" ")).unwrap()
    }

    pub fn contains(&self, text: &str) -> bool {
        coset_contains(&self.gens, &Word::empty(), &self.word(text)).unwrap()
    }
}

/// Invariant report of one engine run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub verdict: Verdict,
    pub rounds: usize,
    pub states_constant: bool,
    pub memo_monotone: bool,
    pub within_cap: bool,
    pub samples: SampleStats,
}

impl RunReport {
    pub fn invariants_hold(&self) -> bool {
        self.states_constant && self.memo_monotone && self.within_cap && self.samples.violations == 0
    }
}

/// Saturates round by round, checking the state count and memo growth after
/// every round, then samples the final language.
pub fn run_checked(g: &Group, inst: &Instance, samples: usize, rng: &mut impl Rng) -> RunReport {
    let (k, elem) = inst.parsed(g);
    let mut state = SaturationState::build(&g.gog, &k, &elem);
    let states = state.automaton().state_count();
    let mut states_constant = true;
    let mut memo_monotone = true;
    let mut within_cap = true;
    if !state.trivially_member() {
        loop {
            let before = state.memo().clone();
            let changed = state.run_round().expect("saturation round");
            states_constant &= state.automaton().state_count() == states;
            for (key, old) in &before {
                memo_monotone &= state.memo().get(key).is_some_and(|new| old.is_subset_of(new).unwrap());
            }
            if !changed {
                break;
            }
            if state.rounds() >= DEFAULT_MAX_ROUNDS {
                within_cap = false;
                break;
            }
        }
    }
    let samples = check_language(g, &state, &k, &elem, samples, rng);
    RunReport {
        verdict: state.verdict(),
        rounds: state.rounds(),
        states_constant,
        memo_monotone,
        within_cap,
        samples,
    }
}
