//! Chordal graphs and right-angled Artin groups: Lex-BFS recognition, clique
//! trees, and compilation of `A(Γ)` for chordal `Γ` into a graph of groups
//! with free-abelian vertex and edge groups.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::oracle::VertexKind;
use crate::spec::{EdgeSpec, EndValue, GraphFile, SpecFile, VertexSpec};
use crate::words::is_valid_name;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RaagError {
    #[error("graph has no vertices")]
    Empty,
    #[error("invalid vertex name `{0}`")]
    InvalidName(String),
    #[error("vertex `{0}` listed twice")]
    DuplicateVertex(String),
    #[error("edge mentions unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("loop at `{0}`")]
    Loop(String),
    #[error("edge {0} - {1} listed twice")]
    MultiEdge(String, String),
    #[error("graph is not chordal (not expressible by this compiler); chordless cycle: {}", .0.join(","))]
    NotChordal(Vec<String>),
}

/// Finite simple graph on named vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    names: Vec<String>,
    adjacency: Vec<BTreeSet<usize>>,
}

impl SimpleGraph {
    pub fn new(names: Vec<String>, edges: &[(String, String)]) -> Result<Self, RaagError> {
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if !is_valid_name(n) || n.contains('@') {
                return Err(RaagError::InvalidName(n.clone()));
            }
            if index.insert(n.as_str(), i).is_some() {
                return Err(RaagError::DuplicateVertex(n.clone()));
            }
        }
        let mut adjacency = vec![BTreeSet::new(); names.len()];
        for (u, v) in edges {
            let i = *index.get(u.as_str()).ok_or_else(|| RaagError::UnknownVertex(u.clone()))?;
            let j = *index.get(v.as_str()).ok_or_else(|| RaagError::UnknownVertex(v.clone()))?;
            if i == j {
                return Err(RaagError::Loop(u.clone()));
            }
            if !adjacency[i].insert(j) {
                return Err(RaagError::MultiEdge(u.clone(), v.clone()));
            }
            adjacency[j].insert(i);
        }
        Ok(SimpleGraph { names, adjacency })
    }

    pub fn from_file(f: &GraphFile) -> Result<Self, RaagError> {
        Self::new(f.vertices.clone(), &f.edges)
    }

    /// Graph on `0..n` named `v0, v1, ...`.
    pub fn from_indices(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![BTreeSet::new(); n];
        for &(i, j) in edges {
            if i != j {
                adjacency[i].insert(j);
                adjacency[j].insert(i);
            }
        }
        SimpleGraph { names: (0..n).map(|i| format!("v{i}")).collect(), adjacency }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].contains(&j)
    }

    pub fn neighbors(&self, i: usize) -> &BTreeSet<usize> {
        &self.adjacency[i]
    }

    fn is_clique(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(k, &a)| set[k + 1..].iter().all(|&b| self.adjacent(a, b)))
    }
}

/// Lexicographic breadth-first search by partition refinement; ties go to
/// the smallest vertex index.
pub fn lex_bfs(g: &SimpleGraph) -> Vec<usize> {
    let mut parts: Vec<Vec<usize>> = if g.is_empty() { Vec::new() } else { vec![(0..g.len()).collect()] };
    let mut order = Vec::with_capacity(g.len());
    while let Some(first) = parts.first_mut() {
        let v = first.remove(0);
        if first.is_empty() {
            parts.remove(0);
        }
        order.push(v);
        let mut refined = Vec::with_capacity(parts.len() + 1);
        for part in parts {
            let (hit, miss): (Vec<usize>, Vec<usize>) = part.into_iter().partition(|&u| g.adjacent(u, v));
            for p in [hit, miss] {
                if !p.is_empty() {
                    refined.push(p);
                }
            }
        }
        parts = refined;
    }
    order
}

/// Whether each vertex's neighbors later in `order` form a clique.
pub fn is_perfect_elimination_ordering(g: &SimpleGraph, order: &[usize]) -> bool {
    let mut position = vec![0; g.len()];
    for (k, &v) in order.iter().enumerate() {
        position[v] = k;
    }
    order.iter().all(|&v| {
        let later: Vec<usize> = g.neighbors(v).iter().copied().filter(|&u| position[u] > position[v]).collect();
        g.is_clique(&later)
    })
}

/// A perfect elimination ordering (reverse Lex-BFS order) if `g` is chordal.
pub fn is_chordal(g: &SimpleGraph) -> Option<Vec<usize>> {
    let mut order = lex_bfs(g);
    order.reverse();
    is_perfect_elimination_ordering(g, &order).then_some(order)
}

/// An induced cycle of length at least four: for some vertex `v` with
/// nonadjacent neighbors `u`, `w`, a shortest `u`-`w` path avoiding the other
/// neighbors of `v`.
pub fn chordless_cycle(g: &SimpleGraph) -> Option<Vec<usize>> {
    for v in 0..g.len() {
        let nbrs: Vec<usize> = g.neighbors(v).iter().copied().collect();
        for (k, &u) in nbrs.iter().enumerate() {
            for &w in &nbrs[k + 1..] {
                if g.adjacent(u, w) {
                    continue;
                }
                let blocked = |x: usize| x == v || (g.adjacent(v, x) && x != u && x != w);
                let mut prev = vec![None; g.len()];
                prev[u] = Some(u);
                let mut queue = VecDeque::from([u]);
                while let Some(x) = queue.pop_front() {
                    for &y in g.neighbors(x) {
                        if prev[y].is_none() && !blocked(y) {
                            prev[y] = Some(x);
                            queue.push_back(y);
                        }
                    }
                }
                if prev[w].is_some() {
                    let mut path = vec![w];
                    while *path.last().expect("nonempty") != u {
                        path.push(prev[*path.last().expect("nonempty")].expect("reached"));
                    }
                    path.push(v);
                    path.reverse();
                    return Some(path);
                }
            }
        }
    }
    None
}

/// Exhaustive search for an induced cycle of length at least four; for
/// small graphs only.
pub fn brute_chordless_cycle(g: &SimpleGraph) -> Option<Vec<usize>> {
    let n = g.len();
    assert!(n <= 16, "exhaustive search is for small graphs");
    for mask in 0u32..(1 << n) {
        if mask.count_ones() < 4 {
            continue;
        }
        let set: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let degree_two = set.iter().all(|&i| set.iter().filter(|&&j| g.adjacent(i, j)).count() == 2);
        if !degree_two {
            continue;
        }
        // connected 2-regular induced subgraph = a cycle
        let mut seen = vec![set[0]];
        let mut k = 0;
        while k < seen.len() {
            for &j in &set {
                if g.adjacent(seen[k], j) && !seen.contains(&j) {
                    seen.push(j);
                }
            }
            k += 1;
        }
        if seen.len() == set.len() {
            return Some(set);
        }
    }
    None
}

/// Maximal cliques with a junction tree over them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueTree {
    /// Sorted vertex indices of each maximal clique.
    pub cliques: Vec<Vec<usize>>,
    /// `(i, j, separator)` with `separator = cliques[i] ∩ cliques[j]`.
    pub edges: Vec<(usize, usize, Vec<usize>)>,
}

impl CliqueTree {
    /// For every vertex, the cliques containing it span a connected subtree.
    pub fn has_induced_subtree_property(&self, n: usize) -> bool {
        (0..n).all(|x| {
            let holders: Vec<usize> = (0..self.cliques.len()).filter(|&c| self.cliques[c].contains(&x)).collect();
            let Some(&start) = holders.first() else { return true };
            let mut seen = vec![start];
            let mut k = 0;
            while k < seen.len() {
                for (i, j, _) in &self.edges {
                    for (a, b) in [(*i, *j), (*j, *i)] {
                        if a == seen[k] && holders.contains(&b) && !seen.contains(&b) {
                            seen.push(b);
                        }
                    }
                }
                k += 1;
            }
            seen.len() == holders.len()
        })
    }

    pub fn is_spanning_tree(&self) -> bool {
        let n = self.cliques.len();
        if self.edges.len() + 1 != n.max(1) {
            return false;
        }
        let mut reach = vec![false; n];
        if n > 0 {
            reach[0] = true;
        }
        let mut changed = true;
        while changed {
            changed = false;
            for (i, j, _) in &self.edges {
                if reach[*i] != reach[*j] {
                    reach[*i] = true;
                    reach[*j] = true;
                    changed = true;
                }
            }
        }
        reach.into_iter().all(|r| r)
    }
}

/// Maximal cliques from a perfect elimination ordering, joined by a
/// maximum-weight spanning tree of the intersection graph (weight-0 edges
/// included, so disconnected graphs still get one tree).
pub fn clique_tree(g: &SimpleGraph, peo: &[usize]) -> Result<CliqueTree, RaagError> {
    if !is_perfect_elimination_ordering(g, peo) || peo.len() != g.len() {
        let cycle = chordless_cycle(g).unwrap_or_default();
        return Err(RaagError::NotChordal(cycle.into_iter().map(|i| g.name(i).to_string()).collect()));
    }
    let mut position = vec![0; g.len()];
    for (k, &v) in peo.iter().enumerate() {
        position[v] = k;
    }
    let candidates: Vec<BTreeSet<usize>> = peo
        .iter()
        .map(|&v| {
            let mut c: BTreeSet<usize> = g.neighbors(v).iter().copied().filter(|&u| position[u] > position[v]).collect();
            c.insert(v);
            c
        })
        .collect();
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        let dominated = candidates.iter().enumerate().any(|(j, d)| {
            j != i && c.is_subset(d) && (c.len() < d.len() || j < i)
        });
        if !dominated {
            cliques.push(c.iter().copied().collect());
        }
    }
    cliques.sort();

    let mut pairs = Vec::new();
    for i in 0..cliques.len() {
        for j in i + 1..cliques.len() {
            let sep: Vec<usize> = cliques[i].iter().copied().filter(|x| cliques[j].contains(x)).collect();
            pairs.push((sep.len(), i, j, sep));
        }
    }
    pairs.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut root: Vec<usize> = (0..cliques.len()).collect();
    fn find(root: &mut [usize], mut x: usize) -> usize {
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    let mut edges = Vec::new();
    for (_, i, j, sep) in pairs {
        let (a, b) = (find(&mut root, i), find(&mut root, j));
        if a != b {
            root[a] = b;
            edges.push((i, j, sep));
        }
    }
    Ok(CliqueTree { cliques, edges })
}

/// A compiled RAAG: the spec (with its translation table filled in) and the
/// clique tree it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledRaag {
    pub spec: SpecFile,
    pub tree: CliqueTree,
}

impl CompiledRaag {
    /// Word of cycle type for a RAAG generator.
    pub fn translate(&self, x: &str) -> Option<&str> {
        self.spec.translation.as_ref()?.get(x).map(String::as_str)
    }

    /// Word of cycle type for a word over the RAAG generators (space
    /// separated, optional integer exponents).
    pub fn translate_word(&self, text: &str) -> Option<String> {
        let mut out = Vec::new();
        for token in text.split_whitespace() {
            let (name, exp) = match token.split_once('^') {
                Some((n, e)) => (n, e.parse::<i64>().ok()?),
                None => (token, 1),
            };
            let w = self.translate(name)?;
            let piece = if exp < 0 { invert_text(w) } else { w.to_string() };
            for _ in 0..exp.unsigned_abs() {
                out.push(piece.clone());
            }
        }
        Some(out.join(" "))
    }
}

/// Inverse of a space-separated word of single letters with `^-1` marks.
fn invert_text(w: &str) -> String {
    w.split_whitespace()
        .rev()
        .map(|t| match t.strip_suffix("^-1") {
            Some(base) => base.to_string(),
            None => format!("{t}^-1"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Graph of groups for `A(Γ)`: one `Z^|C|` per maximal clique `C{i}` with
/// generators `x@C{i}`, one edge `e{k}` per clique-tree edge (parent to
/// child from `C0`) amalgamating the separator coordinates.
pub fn compile(g: &SimpleGraph) -> Result<CompiledRaag, RaagError> {
    if g.is_empty() {
        return Err(RaagError::Empty);
    }
    let Some(peo) = is_chordal(g) else {
        let cycle = chordless_cycle(g).expect("non-chordal graphs have a chordless cycle");
        return Err(RaagError::NotChordal(cycle.into_iter().map(|i| g.name(i).to_string()).collect()));
    };
    let tree = clique_tree(g, &peo)?;
    let copy = |x: usize, c: usize| format!("{}@C{c}", g.name(x));
    let vertices = tree
        .cliques
        .iter()
        .enumerate()
        .map(|(c, members)| VertexSpec {
            name: format!("C{c}"),
            kind: VertexKind::FreeAbelian,
            generators: members.iter().map(|&x| copy(x, c)).collect(),
        })
        .collect();

    // orient the tree away from C0
    let n = tree.cliques.len();
    let mut depth: Vec<Option<usize>> = vec![None; n];
    let mut path: Vec<Vec<String>> = vec![Vec::new(); n];
    depth[0] = Some(0);
    let mut queue = VecDeque::from([0]);
    let mut edges = Vec::new();
    while let Some(c) = queue.pop_front() {
        let mut next: Vec<(usize, &Vec<usize>)> = tree
            .edges
            .iter()
            .filter_map(|(i, j, sep)| match (*i == c, *j == c) {
                (true, _) => Some((*j, sep)),
                (_, true) => Some((*i, sep)),
                _ => None,
            })
            .filter(|(d, _)| depth[*d].is_none())
            .collect();
        next.sort();
        for (d, sep) in next {
            let k = edges.len();
            let name = format!("e{k}");
            let generators: Vec<String> = sep.iter().map(|&x| g.name(x).to_string()).collect();
            let image = |clique: usize| -> BTreeMap<String, EndValue> {
                sep.iter().map(|&x| (g.name(x).to_string(), EndValue::Word(copy(x, clique)))).collect()
            };
            edges.push(EdgeSpec {
                name: name.clone(),
                from: format!("C{c}"),
                to: format!("C{d}"),
                edge_generators: generators,
                alpha: image(c),
                omega: image(d),
            });
            depth[d] = Some(depth[c].expect("visited") + 1);
            path[d] = path[c].iter().cloned().chain(std::iter::once(name)).collect();
            queue.push_back(d);
        }
    }

    let mut translation = BTreeMap::new();
    for x in 0..g.len() {
        let c = (0..n)
            .filter(|&c| tree.cliques[c].contains(&x))
            .min_by_key(|&c| (depth[c], c))
            .expect("every vertex lies in a clique");
        let p = &path[c];
        let mut word: Vec<String> = p.clone();
        word.push(copy(x, c));
        word.extend(p.iter().rev().map(|e| format!("{e}^-1")));
        translation.insert(g.name(x).to_string(), word.join(" "));
    }
    Ok(CompiledRaag {
        spec: SpecFile { vertices, edges, basepoint: Some("C0".into()), translation: Some(translation) },
        tree,
    })
}
