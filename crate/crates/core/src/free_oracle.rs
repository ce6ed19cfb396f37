//! Free vertex groups: Stallings folding and the coset queries built on it.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_integer::Integer;
use thiserror::Error;

use crate::words::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreeError {
    #[error("words mix letters from different alphabets")]
    MixedAlphabets,
    #[error("cyclic intersection needs a nontrivial word")]
    TrivialWord,
    #[error("internal error: exponent hit set {0:?} is not an arithmetic progression")]
    NotAProgression(Vec<i64>),
}

/// Deterministic labeled graph with involutive edges, a basepoint and a coset
/// endpoint (equal to the basepoint for a plain subgroup).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldedGraph {
    transitions: Vec<BTreeMap<Letter, usize>>,
    base: usize,
    endpoint: usize,
    marks: Vec<usize>,
}

impl FoldedGraph {
    pub fn vertex_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn edge_count(&self) -> usize {
        self.transitions.iter().map(BTreeMap::len).sum::<usize>() / 2
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn endpoint(&self) -> usize {
        self.endpoint
    }

    pub fn step(&self, from: usize, l: Letter) -> Option<usize> {
        self.transitions[from].get(&l).copied()
    }

    /// Follows `w` letter by letter; `None` as soon as a letter is missing.
    pub fn trace(&self, from: usize, w: &Word) -> Option<usize> {
        w.letters().iter().try_fold(from, |s, &l| self.step(s, l))
    }

    /// Reduced words read on closed paths at the basepoint are exactly the
    /// subgroup elements.
    pub fn accepts_subgroup(&self, w: &Word) -> bool {
        self.trace(self.base, &w.free_reduce()) == Some(self.base)
    }

    /// Reduced words read from the basepoint to the endpoint are exactly the
    /// coset elements.
    pub fn accepts_coset(&self, w: &Word) -> bool {
        self.trace(self.base, &w.free_reduce()) == Some(self.endpoint)
    }

    /// Every edge has its inverse and every vertex is reachable from the base.
    pub fn check_invariants(&self) -> bool {
        for (s, map) in self.transitions.iter().enumerate() {
            for (&l, &t) in map {
                if self.step(t, l.inv()) != Some(s) {
                    return false;
                }
            }
        }
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::from([self.base]);
        seen[self.base] = true;
        while let Some(s) = queue.pop_front() {
            for &t in self.transitions[s].values() {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }
}

/// Union-find folding of a labeled graph under construction.
struct Folder {
    parent: Vec<usize>,
    size: Vec<usize>,
    out: Vec<HashMap<Letter, usize>>,
    pending: Vec<(usize, usize)>,
}

impl Folder {
    fn new() -> Self {
        Folder { parent: Vec::new(), size: Vec::new(), out: Vec::new(), pending: Vec::new() }
    }

    fn add_vertex(&mut self) -> usize {
        let id = self.parent.len();
        self.parent.push(id);
        self.size.push(1);
        self.out.push(HashMap::new());
        id
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn insert(&mut self, s: usize, l: Letter, t: usize) {
        match self.out[s].get(&l) {
            Some(&existing) => self.pending.push((existing, t)),
            None => {
                self.out[s].insert(l, t);
            }
        }
    }

    fn add_edge(&mut self, s: usize, l: Letter, t: usize) {
        let s = self.find(s);
        let t = self.find(t);
        self.insert(s, l, t);
        self.insert(t, l.inv(), s);
        self.settle();
    }

    fn settle(&mut self) {
        while let Some((a, b)) = self.pending.pop() {
            let (a, b) = (self.find(a), self.find(b));
            if a == b {
                continue;
            }
            let (root, child) = if self.size[a] >= self.size[b] { (a, b) } else { (b, a) };
            self.parent[child] = root;
            self.size[root] += self.size[child];
            let moved = std::mem::take(&mut self.out[child]);
            for (l, t) in moved {
                self.insert(root, l, t);
            }
        }
    }

    /// Adds a path reading `w` from `start`, ending at `end` when given,
    /// else at a fresh vertex. Returns the end vertex.
    fn add_path(&mut self, start: usize, w: &Word, end: Option<usize>) -> usize {
        let letters = w.letters();
        if letters.is_empty() {
            if let Some(e) = end {
                self.pending.push((start, e));
                self.settle();
                return e;
            }
            return start;
        }
        let mut cur = start;
        for (i, &l) in letters.iter().enumerate() {
            let next = match end {
                Some(e) if i + 1 == letters.len() => e,
                _ => self.add_vertex(),
            };
            self.add_edge(cur, l, next);
            cur = next;
        }
        cur
    }

    /// Renumbers roots breadth-first from `base` in letter order, dropping
    /// hanging vertices other than the base and the `keep` vertices.
    fn finish(mut self, base: usize, endpoint: usize, marks: &[usize]) -> FoldedGraph {
        let n = self.parent.len();
        let mut adj: Vec<BTreeMap<Letter, usize>> = vec![BTreeMap::new(); n];
        for s in 0..n {
            if self.parent[s] != s {
                continue;
            }
            let entries: Vec<(Letter, usize)> = self.out[s].iter().map(|(&l, &t)| (l, t)).collect();
            for (l, t) in entries {
                let t = self.find(t);
                adj[s].insert(l, t);
            }
        }
        let base = self.find(base);
        let endpoint = self.find(endpoint);
        let marks: Vec<usize> = marks.iter().map(|&m| self.find(m)).collect();

        let mut keep = vec![false; n];
        keep[base] = true;
        keep[endpoint] = true;
        for &m in &marks {
            keep[m] = true;
        }
        let mut alive: Vec<bool> = (0..n).map(|s| self.parent[s] == s).collect();
        let mut queue: Vec<usize> =
            (0..n).filter(|&s| alive[s] && !keep[s] && adj[s].len() == 1).collect();
        while let Some(s) = queue.pop() {
            if !alive[s] || adj[s].len() != 1 {
                continue;
            }
            let (&l, &t) = adj[s].iter().next().expect("degree one");
            alive[s] = false;
            adj[s].clear();
            adj[t].remove(&l.inv());
            if !keep[t] && adj[t].len() == 1 {
                queue.push(t);
            }
        }

        let mut order = vec![usize::MAX; n];
        let mut list = vec![base];
        order[base] = 0;
        let mut i = 0;
        while i < list.len() {
            let s = list[i];
            for &t in adj[s].values() {
                if order[t] == usize::MAX {
                    order[t] = list.len();
                    list.push(t);
                }
            }
            i += 1;
        }
        let transitions = list
            .iter()
            .map(|&s| adj[s].iter().map(|(&l, &t)| (l, order[t])).collect())
            .collect();
        FoldedGraph {
            transitions,
            base: 0,
            endpoint: order[endpoint],
            marks: marks.iter().map(|&m| order[m]).collect(),
        }
    }
}

fn check_alphabet<'a>(words: impl IntoIterator<Item = &'a Word>) -> Result<(), FreeError> {
    let mut found = None;
    for w in words {
        match w.vertex_alphabet().map_err(|_| FreeError::MixedAlphabets)? {
            None => {}
            Some(v) if found.is_none() => found = Some(v),
            Some(v) if found != Some(v) => return Err(FreeError::MixedAlphabets),
            Some(_) => {}
        }
    }
    Ok(())
}

fn fold_with_marks(gens: &[Word], rep: &Word, marks: &[Word]) -> FoldedGraph {
    let mut folder = Folder::new();
    let base = folder.add_vertex();
    for g in gens {
        let g = g.free_reduce();
        if !g.is_empty() {
            folder.add_path(base, &g, Some(base));
        }
    }
    let endpoint = folder.add_path(base, &rep.free_reduce(), None);
    let mark_ends: Vec<usize> =
        marks.iter().map(|m| folder.add_path(base, &m.free_reduce(), None)).collect();
    folder.finish(base, endpoint, &mark_ends)
}

/// Folded graph of the coset `<gens> rep`.
pub fn fold(gens: &[Word], rep: &Word) -> Result<FoldedGraph, FreeError> {
    check_alphabet(gens.iter().chain(std::iter::once(rep)))?;
    Ok(fold_with_marks(gens, rep, &[]))
}

pub fn coset_contains(gens: &[Word], rep: &Word, w: &Word) -> Result<bool, FreeError> {
    check_alphabet(gens.iter().chain([rep, w]))?;
    let graph = fold_with_marks(gens, &Word::empty(), &[]);
    Ok(graph.accepts_subgroup(&w.concat(&rep.invert())))
}

/// Labels each word by its right coset `H x`, `H = <gens>`: two words get the
/// same label iff `x y^-1` lies in `H`.
pub fn right_coset_classes(gens: &[Word], words: &[Word]) -> Result<Vec<usize>, FreeError> {
    check_alphabet(gens.iter().chain(words))?;
    let graph = fold_with_marks(gens, &Word::empty(), words);
    Ok(graph.marks.clone())
}

/// A coset `offset + period Z` of a subgroup of the integers, or empty.
/// Period 0 is the singleton `{offset}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ZProgression {
    data: Option<(i64, u64)>,
}

impl ZProgression {
    pub fn empty() -> Self {
        ZProgression { data: None }
    }

    pub fn singleton(a: i64) -> Self {
        ZProgression { data: Some((a, 0)) }
    }

    pub fn new(offset: i64, period: u64) -> Self {
        if period == 0 {
            return Self::singleton(offset);
        }
        ZProgression { data: Some((offset.rem_euclid(period as i64), period)) }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_none()
    }

    pub fn offset(&self) -> Option<i64> {
        self.data.map(|(a, _)| a)
    }

    pub fn period(&self) -> Option<u64> {
        self.data.map(|(_, d)| d)
    }

    pub fn contains(&self, n: i64) -> bool {
        match self.data {
            None => false,
            Some((a, 0)) => n == a,
            Some((a, d)) => (n - a).rem_euclid(d as i64) == 0,
        }
    }
}

/// `{n : w^n in <gens> rep}` for a nontrivial `w`.
pub fn intersect_cyclic(gens: &[Word], rep: &Word, w: &Word) -> Result<ZProgression, FreeError> {
    check_alphabet(gens.iter().chain([rep, w]))?;
    let w = w.free_reduce();
    if w.is_empty() {
        return Err(FreeError::TrivialWord);
    }
    let graph = fold_with_marks(gens, rep, &[]);
    let (u, c) = w.cyclic_decompose();
    let u_inv = u.invert();
    let c_inv = c.invert();
    let zero_hit = graph.base == graph.endpoint;

    // w^n = u c^n u^-1 is reduced for n != 0
    let Some(start) = graph.trace(graph.base, &u) else {
        return Ok(if zero_hit { ZProgression::singleton(0) } else { ZProgression::empty() });
    };
    let hit = |s: usize| graph.trace(s, &u_inv) == Some(graph.endpoint);

    // Tracing c is a partial injection on vertices, so the forward orbit of
    // `start` either dies or comes back to `start` itself.
    let mut forward = Vec::new();
    let mut cur = start;
    let mut period = None;
    for k in 1..=graph.vertex_count() as i64 {
        match graph.trace(cur, &c) {
            None => break,
            Some(next) if next == start => {
                period = Some(k);
                break;
            }
            Some(next) => {
                cur = next;
                if hit(cur) {
                    forward.push(k);
                }
            }
        }
    }

    if let Some(p) = period {
        let mut residues = Vec::new();
        if zero_hit {
            residues.push(0);
        }
        residues.extend(forward);
        return progression_from_residues(&residues, p);
    }

    let mut hits = forward;
    if zero_hit {
        hits.push(0);
    }
    let mut cur = start;
    for k in 1..=graph.vertex_count() as i64 {
        match graph.trace(cur, &c_inv) {
            None => break,
            Some(next) => {
                cur = next;
                if hit(cur) {
                    hits.push(-k);
                }
            }
        }
    }
    match hits.as_slice() {
        [] => Ok(ZProgression::empty()),
        [a] => Ok(ZProgression::singleton(*a)),
        _ => Err(FreeError::NotAProgression(hits)),
    }
}

fn progression_from_residues(residues: &[i64], period: i64) -> Result<ZProgression, FreeError> {
    let Some(&first) = residues.iter().min() else {
        return Ok(ZProgression::empty());
    };
    let step = residues.iter().fold(period, |g, &r| g.gcd(&(r - first)));
    let expected = (period / step) as usize;
    let ok = residues.len() == expected && residues.iter().all(|r| (r - first) % step == 0);
    if !ok {
        return Err(FreeError::NotAProgression(residues.to_vec()));
    }
    Ok(ZProgression::new(first, step as u64))
}
