//! Graphs of groups with free and free-abelian vertex groups and free-abelian
//! edge groups: validation, words of cycle type, generators of the
//! fundamental group, and the pinch reducer that decides the word problem.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::lattice::{int_vec, IntMatrix};
use crate::oracle::{End, EdgeEndMap, EndImage, OracleError, VertexAlphabet, VertexKind};
use crate::spec::{EndValue, SpecFile};
use crate::words::{Letter, Sort, SymbolId, SymbolTable, Word, WordError};
use crate::dual_automaton::VertexCoset;

/// One problem found by [`GraphOfGroups::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoVertices,
    DuplicateVertex(String),
    DuplicateEdge(String),
    InvalidName(String),
    NameClash(String),
    UnknownVertex { edge: String, vertex: String },
    UnknownBasepoint(String),
    Disconnected,
    FreeRank { edge: String, vertex: String, rank: usize },
    DuplicateEdgeGenerator { edge: String, generator: String },
    MissingImage { edge: String, end: &'static str, generator: String },
    ExtraImage { edge: String, end: &'static str, generator: String },
    BadImage { edge: String, end: &'static str, generator: String, reason: String },
    NotInjective { edge: String, end: &'static str },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoVertices => write!(f, "graph has no vertices"),
            Violation::DuplicateVertex(n) => write!(f, "vertex `{n}` declared twice"),
            Violation::DuplicateEdge(n) => write!(f, "edge `{n}` declared twice"),
            Violation::InvalidName(n) => write!(f, "invalid generator name `{n}`"),
            Violation::NameClash(n) => write!(f, "generator name `{n}` is used more than once"),
            Violation::UnknownVertex { edge, vertex } => {
                write!(f, "edge `{edge}` refers to unknown vertex `{vertex}`")
            }
            Violation::UnknownBasepoint(n) => write!(f, "unknown basepoint `{n}`"),
            Violation::Disconnected => write!(f, "graph not connected"),
            Violation::FreeRank { edge, vertex, rank } => write!(
                f,
                "edge `{edge}` has rank {rank} at free vertex `{vertex}`: abelian subgroup of free group must be cyclic"
            ),
            Violation::DuplicateEdgeGenerator { edge, generator } => {
                write!(f, "edge `{edge}` lists generator `{generator}` twice")
            }
            Violation::MissingImage { edge, end, generator } => {
                write!(f, "edge `{edge}`: {end} has no image for `{generator}`")
            }
            Violation::ExtraImage { edge, end, generator } => {
                write!(f, "edge `{edge}`: {end} maps unknown generator `{generator}`")
            }
            Violation::BadImage { edge, end, generator, reason } => {
                write!(f, "edge `{edge}`: {end} image of `{generator}`: {reason}")
            }
            Violation::NotInjective { edge, end } => write!(f, "edge `{edge}`: {end} map is not injective"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycleTypeError {
    #[error("letter {position} is not in the alphabet of the current vertex group")]
    WrongAlphabet { position: usize },
    #[error("edge letter at position {position} does not start at the current vertex")]
    EdgeMismatch { position: usize },
    #[error("path does not return to the basepoint")]
    NotClosed,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GogError {
    #[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("not of cycle type: {0}")]
    CycleType(#[from] CycleTypeError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone)]
pub struct VertexData {
    pub name: String,
    pub alphabet: VertexAlphabet,
}

#[derive(Debug, Clone)]
pub struct EdgeData {
    pub name: String,
    pub from: usize,
    pub to: usize,
    pub rank: usize,
    pub alpha: EdgeEndMap,
    pub omega: EdgeEndMap,
    pub symbol: SymbolId,
    pub generators: Vec<String>,
}

/// A word `w0 y1 w1 ... yn wn` whose edge letters trace a closed path at the
/// basepoint, each `wi` over the group at the end of `yi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycleTypeWord {
    pub w0: Word,
    pub segments: Vec<(Letter, Word)>,
}

impl CycleTypeWord {
    pub fn identity() -> Self {
        CycleTypeWord { w0: Word::empty(), segments: Vec::new() }
    }

    /// Number of edge letters.
    pub fn n(&self) -> usize {
        self.segments.len()
    }

    pub fn to_word(&self) -> Word {
        let mut out = self.w0.clone();
        for (y, w) in &self.segments {
            out.push(*y);
            out.extend_from(w);
        }
        out
    }

    pub fn inverse(&self) -> Self {
        let n = self.segments.len();
        if n == 0 {
            return CycleTypeWord { w0: self.w0.invert(), segments: Vec::new() };
        }
        let w0 = self.segments[n - 1].1.invert();
        let segments = (0..n)
            .rev()
            .map(|i| {
                let prev = if i == 0 { &self.w0 } else { &self.segments[i - 1].1 };
                (self.segments[i].0.inv(), prev.invert())
            })
            .collect();
        CycleTypeWord { w0, segments }
    }

    /// Product of two words of cycle type at the same basepoint.
    pub fn concat(&self, other: &CycleTypeWord) -> Self {
        let mut out = self.clone();
        match out.segments.last_mut() {
            Some((_, last)) => last.extend_from(&other.w0),
            None => out.w0.extend_from(&other.w0),
        }
        out.segments.extend(other.segments.iter().cloned());
        out
    }
}

#[derive(Debug, Clone)]
pub struct GraphOfGroups {
    table: SymbolTable,
    vertices: Vec<VertexData>,
    edges: Vec<EdgeData>,
    basepoint: usize,
    tree: Vec<bool>,
    tree_paths: Vec<Word>,
}

const ALPHA: &str = "alpha";
const OMEGA: &str = "omega";

impl GraphOfGroups {
    /// Builds the model from a parsed spec file, collecting every violation.
    pub fn validate(spec: &SpecFile) -> Result<GraphOfGroups, GogError> {
        let mut violations = Vec::new();
        if spec.vertices.is_empty() {
            return Err(GogError::Invalid(vec![Violation::NoVertices]));
        }
        let mut table = SymbolTable::new();
        let mut names = HashSet::new();
        let mut vertices = Vec::new();
        for (i, v) in spec.vertices.iter().enumerate() {
            if !names.insert(v.name.as_str()) {
                violations.push(Violation::DuplicateVertex(v.name.clone()));
            }
            let mut symbols = Vec::new();
            for g in &v.generators {
                match table.declare(g, Sort::Vertex(i)) {
                    Ok(id) => symbols.push(id),
                    Err(WordError::DuplicateSymbol(n)) => violations.push(Violation::NameClash(n)),
                    Err(_) => violations.push(Violation::InvalidName(g.clone())),
                }
            }
            vertices.push(VertexData {
                name: v.name.clone(),
                alphabet: VertexAlphabet { index: i, kind: v.kind, symbols },
            });
        }
        let vertex_index = |name: &str| spec.vertices.iter().position(|v| v.name == name);

        let mut edge_names = HashSet::new();
        let mut edges = Vec::new();
        for (j, e) in spec.edges.iter().enumerate() {
            if !edge_names.insert(e.name.as_str()) {
                violations.push(Violation::DuplicateEdge(e.name.clone()));
            }
            let symbol = match table.declare(&e.name, Sort::Edge(j)) {
                Ok(id) => Some(id),
                Err(WordError::DuplicateSymbol(n)) => {
                    violations.push(Violation::NameClash(n));
                    None
                }
                Err(_) => {
                    violations.push(Violation::InvalidName(e.name.clone()));
                    None
                }
            };
            let mut ends = Vec::new();
            for name in [&e.from, &e.to] {
                match vertex_index(name) {
                    Some(v) => ends.push(v),
                    None => violations.push(Violation::UnknownVertex { edge: e.name.clone(), vertex: name.clone() }),
                }
            }
            let mut seen = HashSet::new();
            for g in &e.edge_generators {
                if !seen.insert(g.as_str()) {
                    violations.push(Violation::DuplicateEdgeGenerator { edge: e.name.clone(), generator: g.clone() });
                }
            }
            let (Some(symbol), &[from, to]) = (symbol, &ends[..]) else {
                continue;
            };
            let alpha = end_map(&table, &vertices[from], e, End::Alpha, j, &mut violations);
            let omega = end_map(&table, &vertices[to], e, End::Omega, j, &mut violations);
            if let (Some(alpha), Some(omega)) = (alpha, omega) {
                edges.push(EdgeData {
                    name: e.name.clone(),
                    from,
                    to,
                    rank: e.edge_generators.len(),
                    alpha,
                    omega,
                    symbol,
                    generators: e.edge_generators.clone(),
                });
            }
        }

        let basepoint = match &spec.basepoint {
            None => 0,
            Some(name) => match vertex_index(name) {
                Some(v) => v,
                None => {
                    violations.push(Violation::UnknownBasepoint(name.clone()));
                    0
                }
            },
        };
        if !violations.is_empty() {
            return Err(GogError::Invalid(violations));
        }

        // Spanning tree by BFS from the basepoint, edges in declaration order.
        let n = vertices.len();
        let mut tree = vec![false; edges.len()];
        let mut tree_paths: Vec<Option<Word>> = vec![None; n];
        tree_paths[basepoint] = Some(Word::empty());
        let mut queue = VecDeque::from([basepoint]);
        while let Some(x) = queue.pop_front() {
            for (j, e) in edges.iter().enumerate() {
                let (next, letter) = if e.from == x {
                    (e.to, Letter::new(e.symbol, Sort::Edge(j)))
                } else if e.to == x {
                    (e.from, Letter::new(e.symbol, Sort::Edge(j)).inv())
                } else {
                    continue;
                };
                if tree_paths[next].is_none() {
                    let mut p = tree_paths[x].clone().expect("visited");
                    p.push(letter);
                    tree_paths[next] = Some(p);
                    tree[j] = true;
                    queue.push_back(next);
                }
            }
        }
        if tree_paths.iter().any(Option::is_none) {
            return Err(GogError::Invalid(vec![Violation::Disconnected]));
        }
        let tree_paths = tree_paths.into_iter().map(|p| p.expect("connected")).collect();
        Ok(GraphOfGroups { table, vertices, edges, basepoint, tree, tree_paths })
    }

    pub fn from_json(text: &str) -> Result<GraphOfGroups, SpecError> {
        let spec: SpecFile = serde_json::from_str(text).map_err(|e| SpecError::Parse(e.to_string()))?;
        Ok(GraphOfGroups::validate(&spec)?)
    }

    pub fn table(&self) -> &SymbolTable {
        &self.table
    }

    pub fn vertices(&self) -> &[VertexData] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeData] {
        &self.edges
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn is_tree_edge(&self, e: usize) -> bool {
        self.tree[e]
    }

    /// Tree path of edge letters from the basepoint to `v`.
    pub fn tree_path(&self, v: usize) -> &Word {
        &self.tree_paths[v]
    }

    pub fn alphabet(&self, v: usize) -> &VertexAlphabet {
        &self.vertices[v].alphabet
    }

    fn edge_of(&self, y: Letter) -> &EdgeData {
        match y.sort {
            Sort::Edge(j) => &self.edges[j],
            Sort::Vertex(_) => panic!("not an edge letter"),
        }
    }

    /// Start vertex of an oriented edge letter.
    pub fn edge_source(&self, y: Letter) -> usize {
        let e = self.edge_of(y);
        if y.inverse {
            e.to
        } else {
            e.from
        }
    }

    pub fn edge_target(&self, y: Letter) -> usize {
        self.edge_source(y.inv())
    }

    /// The map into the start vertex group (alpha of the oriented letter).
    pub fn source_end(&self, y: Letter) -> &EdgeEndMap {
        let e = self.edge_of(y);
        if y.inverse {
            &e.omega
        } else {
            &e.alpha
        }
    }

    /// The map into the end vertex group (omega of the oriented letter).
    pub fn target_end(&self, y: Letter) -> &EdgeEndMap {
        self.source_end(y.inv())
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        self.table.parse_word(text)
    }

    pub fn parse_cycle(&self, text: &str) -> Result<CycleTypeWord, GogError> {
        Ok(self.check_cycle_type(&self.parse_word(text)?)?)
    }

    pub fn render(&self, w: &Word) -> String {
        self.table.render(w)
    }

    pub fn render_cycle(&self, w: &CycleTypeWord) -> String {
        self.table.render(&w.to_word())
    }

    /// Splits `w` at its edge letters, checking that they form a closed path
    /// at the basepoint and that every syllable lies in the right alphabet.
    pub fn check_cycle_type(&self, w: &Word) -> Result<CycleTypeWord, CycleTypeError> {
        let mut at = self.basepoint;
        let mut out = CycleTypeWord::identity();
        for (position, &l) in w.letters().iter().enumerate() {
            match l.sort {
                Sort::Vertex(v) => {
                    if v != at {
                        return Err(CycleTypeError::WrongAlphabet { position });
                    }
                    match out.segments.last_mut() {
                        Some((_, seg)) => seg.push(l),
                        None => out.w0.push(l),
                    }
                }
                Sort::Edge(_) => {
                    if self.edge_source(l) != at {
                        return Err(CycleTypeError::EdgeMismatch { position });
                    }
                    at = self.edge_target(l);
                    out.segments.push((l, Word::empty()));
                }
            }
        }
        if at != self.basepoint {
            return Err(CycleTypeError::NotClosed);
        }
        Ok(out)
    }

    /// `p_v x p_v^-1` for every vertex generator and `p_a y p_b^-1` for every
    /// edge outside the spanning tree.
    pub fn fundamental_generators(&self) -> Vec<CycleTypeWord> {
        let mut out = Vec::new();
        for v in &self.vertices {
            let p = &self.tree_paths[v.alphabet.index];
            for i in 0..v.alphabet.rank() {
                let w = p.concat(&Word::letter(v.alphabet.letter(i))).concat(&p.invert());
                out.push(self.check_cycle_type(&w).expect("tree conjugate is cycle type"));
            }
        }
        for (j, e) in self.edges.iter().enumerate() {
            if self.tree[j] {
                continue;
            }
            let y = Letter::new(e.symbol, Sort::Edge(j));
            let w = self.tree_paths[e.from].concat(&Word::letter(y)).concat(&self.tree_paths[e.to].invert());
            out.push(self.check_cycle_type(&w).expect("edge loop is cycle type"));
        }
        out
    }

    fn normalize_syllables(&self, w: &CycleTypeWord) -> Result<CycleTypeWord, GogError> {
        let w0 = self.alphabet(self.basepoint).normalize(&w.w0)?;
        let segments = w
            .segments
            .iter()
            .map(|(y, s)| Ok((*y, self.alphabet(self.edge_target(*y)).normalize(s)?)))
            .collect::<Result<Vec<_>, GogError>>()?;
        Ok(CycleTypeWord { w0, segments })
    }

    /// If `y w y^-1` is a pinch, the word for it in the group at the start of `y`.
    fn pinch(&self, y: Letter, w: &Word) -> Result<Option<Word>, GogError> {
        let end = self.target_end(y);
        let c = self.alphabet(end.vertex).intersect_edge_image(&VertexCoset::singleton(w.clone()), end)?;
        match c.offset() {
            None => Ok(None),
            Some(t) => {
                let start = self.source_end(y);
                Ok(Some(self.alphabet(start.vertex).embed(start, t)?))
            }
        }
    }

    /// Removes pinches, leftmost first, until none is left. The result
    /// represents the same element; it is not a normal form.
    pub fn britton_reduce(&self, w: &CycleTypeWord) -> Result<CycleTypeWord, GogError> {
        let mut w = self.normalize_syllables(w)?;
        let mut i = 0;
        while i + 1 < w.segments.len() {
            let (y, ref inner) = w.segments[i];
            if w.segments[i + 1].0 == y.inv() {
                if let Some(u) = self.pinch(y, inner)? {
                    let after = w.segments[i + 1].1.clone();
                    let v = self.edge_source(y);
                    let prev = if i == 0 { &mut w.w0 } else { &mut w.segments[i - 1].1 };
                    *prev = self.alphabet(v).normalize(&prev.concat(&u).concat(&after))?;
                    w.segments.drain(i..i + 2);
                    i = i.saturating_sub(1);
                    continue;
                }
            }
            i += 1;
        }
        Ok(w)
    }

    pub fn is_trivial(&self, w: &CycleTypeWord) -> Result<bool, GogError> {
        let r = self.britton_reduce(w)?;
        Ok(r.segments.is_empty() && self.alphabet(self.basepoint).is_identity(&r.w0)?)
    }

    /// Whether two words of cycle type represent the same element.
    pub fn equal(&self, a: &CycleTypeWord, b: &CycleTypeWord) -> Result<bool, GogError> {
        self.is_trivial(&a.concat(&b.inverse()))
    }

    /// String key of the pinch-free form; equal keys mean equal elements.
    pub fn reduced_key(&self, w: &CycleTypeWord) -> Result<String, GogError> {
        let r = self.britton_reduce(w)?;
        let mut key = self.table.render(&r.w0);
        for (y, s) in &r.segments {
            key.push_str(" | ");
            key.push_str(&self.table.render_letter(*y));
            key.push_str(" | ");
            key.push_str(&self.table.render(s));
        }
        Ok(key)
    }

    /// Vertex names and a short summary, for reports.
    pub fn summary(&self) -> String {
        let mut kinds = BTreeSet::new();
        for v in &self.vertices {
            kinds.insert(match v.alphabet.kind {
                VertexKind::Free => "free",
                VertexKind::FreeAbelian => "free_abelian",
            });
        }
        format!(
            "{} vertices, {} edges ({} outside the spanning tree), basepoint {}, vertex kinds: {}",
            self.vertices.len(),
            self.edges.len(),
            self.tree.iter().filter(|t| !**t).count(),
            self.vertices[self.basepoint].name,
            kinds.into_iter().collect::<Vec<_>>().join(", ")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("malformed spec: {0}")]
    Parse(String),
    #[error(transparent)]
    Invalid(#[from] GogError),
}

fn end_map(
    table: &SymbolTable,
    vertex: &VertexData,
    e: &crate::spec::EdgeSpec,
    end: End,
    edge_index: usize,
    violations: &mut Vec<Violation>,
) -> Option<EdgeMapResult> {
    let (images, label) = match end {
        End::Alpha => (&e.alpha, ALPHA),
        End::Omega => (&e.omega, OMEGA),
    };
    let rank = e.edge_generators.len();
    let alphabet = &vertex.alphabet;
    let before = violations.len();
    for key in images.keys() {
        if !e.edge_generators.contains(key) {
            violations.push(Violation::ExtraImage { edge: e.name.clone(), end: label, generator: key.clone() });
        }
    }
    let bad = |generator: &str, reason: String| Violation::BadImage {
        edge: e.name.clone(),
        end: label,
        generator: generator.to_string(),
        reason,
    };
    let mut words = Vec::new();
    let mut columns = Vec::new();
    for g in &e.edge_generators {
        let Some(value) = images.get(g) else {
            violations.push(Violation::MissingImage { edge: e.name.clone(), end: label, generator: g.clone() });
            continue;
        };
        match (value, alphabet.kind) {
            (EndValue::Word(text), kind) => {
                let w = match table.parse_word(text) {
                    Ok(w) => w,
                    Err(err) => {
                        violations.push(bad(g, err.to_string()));
                        continue;
                    }
                };
                if !w.is_over_vertex(alphabet.index) {
                    violations.push(bad(g, format!("not a word over the generators of `{}`", vertex.name)));
                    continue;
                }
                match kind {
                    VertexKind::Free => words.push(w.free_reduce()),
                    VertexKind::FreeAbelian => {
                        columns.push(alphabet.word_to_vector(&w).expect("checked alphabet"))
                    }
                }
            }
            (EndValue::Vector(v), VertexKind::FreeAbelian) => {
                if v.len() != alphabet.rank() {
                    violations.push(bad(g, format!("vector has length {}, expected {}", v.len(), alphabet.rank())));
                    continue;
                }
                columns.push(int_vec(v));
            }
            (EndValue::Vector(_), VertexKind::Free) => {
                violations.push(bad(g, "vector images need a free_abelian vertex".to_string()));
            }
        }
    }
    let image = match alphabet.kind {
        VertexKind::Free => {
            if rank >= 2 {
                violations.push(Violation::FreeRank { edge: e.name.clone(), vertex: vertex.name.clone(), rank });
                return None;
            }
            if violations.len() > before {
                return None;
            }
            match words.pop() {
                None => EndImage::Free(None),
                Some(w) if w.is_empty() => {
                    violations.push(Violation::NotInjective { edge: e.name.clone(), end: label });
                    return None;
                }
                Some(w) => EndImage::Free(Some(w)),
            }
        }
        VertexKind::FreeAbelian => {
            if violations.len() > before {
                return None;
            }
            let m = IntMatrix::from_columns(alphabet.rank(), columns).expect("checked lengths");
            if m.rank() != rank {
                violations.push(Violation::NotInjective { edge: e.name.clone(), end: label });
                return None;
            }
            EndImage::Abelian(m)
        }
    };
    Some(EdgeEndMap { edge: edge_index, end, vertex: alphabet.index, rank, image })
}

type EdgeMapResult = EdgeEndMap;
