//! Letters and words over the free monoid with involution.
//!
//! Every generator name is declared once in a [`SymbolTable`], tagged with the
//! alphabet it belongs to: one vertex-group alphabet, or the edge set of the
//! graph of groups. Words are stored unreduced; [`Word::free_reduce`] is the
//! explicit projection onto the free group.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Largest absolute exponent accepted by the word grammar.
pub const MAX_EXPONENT: i64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("unknown generator `{0}`")]
    UnknownSymbol(String),
    #[error("malformed exponent in token `{0}`")]
    MalformedExponent(String),
    #[error("zero exponent in token `{0}`")]
    ZeroExponent(String),
    #[error("generator `{0}` declared twice")]
    DuplicateSymbol(String),
    #[error("invalid generator name `{0}`")]
    InvalidName(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId(pub u32);

/// Which alphabet a symbol belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    /// Generator of the vertex group with this index.
    Vertex(usize),
    /// Letter for the edge with this index.
    Edge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub symbol: SymbolId,
    pub sort: Sort,
    pub inverse: bool,
}

impl Letter {
    pub fn new(symbol: SymbolId, sort: Sort) -> Self {
        Letter { symbol, sort, inverse: false }
    }

    pub fn inv(self) -> Self {
        Letter { inverse: !self.inverse, ..self }
    }

    pub fn sign(self) -> i32 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn is_inverse_of(self, other: Letter) -> bool {
        self.symbol == other.symbol && self.inverse != other.inverse
    }

    pub fn vertex(self) -> Option<usize> {
        match self.sort {
            Sort::Vertex(v) => Some(v),
            Sort::Edge(_) => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    /// Concatenation, no reduction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn invert(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            match out.last() {
                Some(&top) if top.is_inverse_of(l) => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        Word(out)
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| !w[0].is_inverse_of(w[1]))
    }

    /// Splits a reduced word as `u c u^-1` with `c` cyclically reduced and `u`
    /// as long as possible.
    pub fn cyclic_decompose(&self) -> (Word, Word) {
        let letters = &self.0;
        let mut lo = 0;
        let mut hi = letters.len();
        while hi - lo >= 2 && letters[lo].is_inverse_of(letters[hi - 1]) {
            lo += 1;
            hi -= 1;
        }
        (Word(letters[..lo].to_vec()), Word(letters[lo..hi].to_vec()))
    }

    /// `self^n`, freely reduced.
    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.invert() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..n.unsigned_abs() {
            out.extend_from(&base);
        }
        out.free_reduce()
    }

    /// The common vertex alphabet of all letters, if there is exactly one.
    /// `Ok(None)` for the empty word.
    pub fn vertex_alphabet(&self) -> Result<Option<usize>, MixedAlphabet> {
        let mut found = None;
        for l in &self.0 {
            match (l.sort, found) {
                (Sort::Edge(_), _) => return Err(MixedAlphabet),
                (Sort::Vertex(v), None) => found = Some(v),
                (Sort::Vertex(v), Some(w)) if v != w => return Err(MixedAlphabet),
                _ => {}
            }
        }
        Ok(found)
    }

    pub fn is_over_vertex(&self, v: usize) -> bool {
        self.0.iter().all(|l| l.sort == Sort::Vertex(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("word mixes letters from different alphabets")]
pub struct MixedAlphabet;

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone)]
struct SymbolInfo {
    name: String,
    sort: Sort,
    position: usize,
}

/// Global generator table. Names are unique across all alphabets.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    symbols: Vec<SymbolInfo>,
    index: HashMap<String, SymbolId>,
    alphabet_sizes: HashMap<Sort, usize>,
}

pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty() && name != "1" && !name.contains('^') && !name.chars().any(char::is_whitespace)
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a fresh symbol. Its position within the alphabet is the
    /// number of symbols of the same sort declared before it.
    pub fn declare(&mut self, name: &str, sort: Sort) -> Result<SymbolId, WordError> {
        if !is_valid_name(name) {
            return Err(WordError::InvalidName(name.to_string()));
        }
        if self.index.contains_key(name) {
            return Err(WordError::DuplicateSymbol(name.to_string()));
        }
        let key = match sort {
            Sort::Vertex(_) => sort,
            Sort::Edge(_) => Sort::Edge(usize::MAX),
        };
        let pos = self.alphabet_sizes.entry(key).or_insert(0);
        let id = SymbolId(self.symbols.len() as u32);
        self.symbols.push(SymbolInfo { name: name.to_string(), sort, position: *pos });
        *pos += 1;
        self.index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.symbols[id.0 as usize].name
    }

    pub fn sort(&self, id: SymbolId) -> Sort {
        self.symbols[id.0 as usize].sort
    }

    /// Index of the symbol inside its own alphabet.
    pub fn position(&self, id: SymbolId) -> usize {
        self.symbols[id.0 as usize].position
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.lookup(name).map(|id| Letter::new(id, self.sort(id)))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Parses the word grammar: whitespace-separated `NAME` or `NAME^k`
    /// tokens, `k` a nonzero integer; `1` and the empty string are the
    /// empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        let mut out = Vec::new();
        for token in text.split_whitespace() {
            if token == "1" {
                continue;
            }
            let (name, exp) = match token.split_once('^') {
                None => (token, 1i64),
                Some((name, exp)) => {
                    let k: i64 = exp
                        .parse()
                        .map_err(|_| WordError::MalformedExponent(token.to_string()))?;
                    if k == 0 {
                        return Err(WordError::ZeroExponent(token.to_string()));
                    }
                    if k.abs() > MAX_EXPONENT {
                        return Err(WordError::MalformedExponent(token.to_string()));
                    }
                    (name, k)
                }
            };
            let letter = self
                .letter(name)
                .ok_or_else(|| WordError::UnknownSymbol(name.to_string()))?;
            let letter = if exp < 0 { letter.inv() } else { letter };
            for _ in 0..exp.unsigned_abs() {
                out.push(letter);
            }
        }
        Ok(Word(out))
    }

    pub fn render_letter(&self, l: Letter) -> String {
        if l.inverse {
            format!("{}^-1", self.name(l.symbol))
        } else {
            self.name(l.symbol).to_string()
        }
    }

    /// Space-separated letters, `^-1` for inverses; the empty word renders
    /// as the empty string.
    pub fn render(&self, w: &Word) -> String {
        let parts: Vec<String> = w.letters().iter().map(|&l| self.render_letter(l)).collect();
        parts.join(" ")
    }

    pub fn display<'a>(&'a self, w: &'a Word) -> WordDisplay<'a> {
        WordDisplay { table: self, word: w }
    }
}

/// Renders the empty word as `1`.
pub struct WordDisplay<'a> {
    table: &'a SymbolTable,
    word: &'a Word,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&self.table.render(self.word))
        }
    }
}
