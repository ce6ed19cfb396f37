//! Vertex-group oracles consumed by the saturation engine and the word
//! problem reducer.
//!
//! Two kinds of vertex group are supported: free groups on their generators
//! (via folding) and free-abelian groups `Z^n` (via lattice arithmetic). Edge
//! groups are always `Z^m`; a free vertex group only meets edges of rank at
//! most one. The primitive query is [`VertexAlphabet::intersect_edge_image`]:
//! intersect a finitely generated coset with the image of an edge group and
//! report the result in edge-group coordinates.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dual_automaton::VertexCoset;
use crate::free_oracle::{self, FreeError};
use crate::lattice::{preimage_coset, IntMatrix, IntVec, LatticeCoset, LatticeError};
use crate::words::{Letter, Sort, SymbolId, Word};

/// Cosets of an edge group `Z^m` in its own coordinates.
pub type EdgeCoset = LatticeCoset;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("word is not over the alphabet of vertex group {0}")]
    WrongAlphabet(usize),
    #[error("edge map of rank {rank} cannot target a free vertex group")]
    RankViolation { rank: usize },
    #[error("edge map targets vertex {expected}, not {got}")]
    WrongVertex { expected: usize, got: usize },
    #[error("cannot transfer an empty coset")]
    EmptyCoset,
    #[error("exponent {0} out of range")]
    ExponentRange(BigInt),
    #[error(transparent)]
    Free(#[from] FreeError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    Free,
    FreeAbelian,
}

/// Generators of one vertex group, in coordinate order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexAlphabet {
    pub index: usize,
    pub kind: VertexKind,
    pub symbols: Vec<SymbolId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum End {
    Alpha,
    Omega,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EndImage {
    /// Rank 0 (`None`) or the image of the single edge generator.
    Free(Option<Word>),
    /// Columns are the images of the edge generators.
    Abelian(IntMatrix),
}

/// One end monomorphism of an edge group, `Z^rank -> G_vertex`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeEndMap {
    pub edge: usize,
    pub end: End,
    pub vertex: usize,
    pub rank: usize,
    pub image: EndImage,
}

impl VertexAlphabet {
    pub fn letter(&self, i: usize) -> Letter {
        Letter::new(self.symbols[i], Sort::Vertex(self.index))
    }

    pub fn rank(&self) -> usize {
        self.symbols.len()
    }

    fn check(&self, w: &Word) -> Result<(), OracleError> {
        if w.is_over_vertex(self.index) {
            Ok(())
        } else {
            Err(OracleError::WrongAlphabet(self.index))
        }
    }

    fn coordinate(&self, l: Letter) -> Result<usize, OracleError> {
        if l.sort != Sort::Vertex(self.index) {
            return Err(OracleError::WrongAlphabet(self.index));
        }
        self.symbols
            .iter()
            .position(|&s| s == l.symbol)
            .ok_or(OracleError::WrongAlphabet(self.index))
    }

    /// Exponent sums per generator.
    pub fn word_to_vector(&self, w: &Word) -> Result<IntVec, OracleError> {
        let mut v = vec![0i64; self.rank()];
        for &l in w.letters() {
            v[self.coordinate(l)?] += i64::from(l.sign());
        }
        Ok(v.into_iter().map(BigInt::from).collect())
    }

    /// `x1^k1 x2^k2 ...` in coordinate order.
    pub fn vector_to_word(&self, v: &[BigInt]) -> Result<Word, OracleError> {
        let mut out = Word::empty();
        for (i, k) in v.iter().enumerate() {
            let k = k.to_i64().filter(|k| k.abs() <= crate::words::MAX_EXPONENT);
            let k = k.ok_or_else(|| OracleError::ExponentRange(v[i].clone()))?;
            out.extend_from(&Word::letter(self.letter(i)).pow(k));
        }
        Ok(out)
    }

    /// A canonical word for the element `w`: freely reduced for free groups,
    /// the sorted exponent word for free-abelian groups.
    pub fn normalize(&self, w: &Word) -> Result<Word, OracleError> {
        self.check(w)?;
        match self.kind {
            VertexKind::Free => Ok(w.free_reduce()),
            VertexKind::FreeAbelian => self.vector_to_word(&self.word_to_vector(w)?),
        }
    }

    pub fn is_identity(&self, w: &Word) -> Result<bool, OracleError> {
        Ok(self.normalize(w)?.is_empty())
    }

    fn lattice_coset(&self, generators: &[Word], representative: &Word) -> Result<LatticeCoset, OracleError> {
        let columns = generators.iter().map(|g| self.word_to_vector(g)).collect::<Result<Vec<_>, _>>()?;
        let lattice = IntMatrix::from_columns(self.rank(), columns)?;
        Ok(LatticeCoset::new(self.word_to_vector(representative)?, &lattice)?)
    }

    fn check_coset(&self, coset: &VertexCoset) -> Result<(), OracleError> {
        if let VertexCoset::Coset { generators, representative } = coset {
            for g in generators.iter().chain(std::iter::once(representative)) {
                self.check(g)?;
            }
        }
        Ok(())
    }

    /// Membership of `w` in a finitely generated coset.
    pub fn vertex_contains(&self, coset: &VertexCoset, w: &Word) -> Result<bool, OracleError> {
        self.check_coset(coset)?;
        self.check(w)?;
        let VertexCoset::Coset { generators, representative } = coset else {
            return Ok(false);
        };
        match self.kind {
            VertexKind::Free => Ok(free_oracle::coset_contains(generators, representative, w)?),
            VertexKind::FreeAbelian => {
                Ok(self.lattice_coset(generators, representative)?.contains(&self.word_to_vector(w)?)?)
            }
        }
    }

    /// Class labels for right cosets `H x`: equal labels iff `x y^-1` is in
    /// `H = <generators>`.
    pub fn right_coset_classes(&self, generators: &[Word], words: &[Word]) -> Result<Vec<usize>, OracleError> {
        for w in generators.iter().chain(words) {
            self.check(w)?;
        }
        match self.kind {
            VertexKind::Free => Ok(free_oracle::right_coset_classes(generators, words)?),
            VertexKind::FreeAbelian => {
                let mut keys: Vec<LatticeCoset> = Vec::new();
                let mut out = Vec::with_capacity(words.len());
                for w in words {
                    let key = self.lattice_coset(generators, w)?;
                    let id = match keys.iter().position(|k| *k == key) {
                        Some(i) => i,
                        None => {
                            keys.push(key);
                            keys.len() - 1
                        }
                    };
                    out.push(id);
                }
                Ok(out)
            }
        }
    }

    /// `{t in Z^m : embed(end, t) in coset}`.
    pub fn intersect_edge_image(&self, coset: &VertexCoset, end: &EdgeEndMap) -> Result<EdgeCoset, OracleError> {
        if end.vertex != self.index {
            return Err(OracleError::WrongVertex { expected: end.vertex, got: self.index });
        }
        self.check_coset(coset)?;
        let VertexCoset::Coset { generators, representative } = coset else {
            return Ok(EdgeCoset::empty(end.rank));
        };
        match (&end.image, self.kind) {
            (EndImage::Free(None), VertexKind::Free) => {
                if free_oracle::coset_contains(generators, representative, &Word::empty())? {
                    Ok(EdgeCoset::whole(0))
                } else {
                    Ok(EdgeCoset::empty(0))
                }
            }
            (EndImage::Free(Some(w)), VertexKind::Free) => {
                let prog = free_oracle::intersect_cyclic(generators, representative, w)?;
                Ok(match (prog.offset(), prog.period()) {
                    (Some(a), Some(d)) => {
                        let lattice = IntMatrix::from_columns(1, if d == 0 { vec![] } else { vec![vec![BigInt::from(d)]] })?;
                        EdgeCoset::new(vec![BigInt::from(a)], &lattice)?
                    }
                    _ => EdgeCoset::empty(1),
                })
            }
            (EndImage::Abelian(m), VertexKind::FreeAbelian) => {
                Ok(preimage_coset(m, &self.lattice_coset(generators, representative)?)?)
            }
            _ => Err(OracleError::RankViolation { rank: end.rank }),
        }
    }

    /// The word for `end(t)` over this vertex alphabet.
    pub fn embed(&self, end: &EdgeEndMap, t: &[BigInt]) -> Result<Word, OracleError> {
        if t.len() != end.rank {
            return Err(LatticeError::DimensionMismatch { expected: end.rank, got: t.len() }.into());
        }
        match &end.image {
            EndImage::Free(None) => Ok(Word::empty()),
            EndImage::Free(Some(w)) => {
                let k = t[0].to_i64().filter(|k| k.abs() <= crate::words::MAX_EXPONENT);
                let k = k.ok_or_else(|| OracleError::ExponentRange(t[0].clone()))?;
                Ok(w.pow(k))
            }
            EndImage::Abelian(m) => self.vector_to_word(&m.mul_vec(t)?),
        }
    }
}

/// Coset generators `(rep, subgroup generators)` of the image of `c` under
/// the `to` end map. `c` is a nonempty coset in edge coordinates.
pub fn coset_transfer(
    to_alphabet: &VertexAlphabet,
    from_end: &EdgeEndMap,
    to_end: &EdgeEndMap,
    c: &EdgeCoset,
) -> Result<(Word, Vec<Word>), OracleError> {
    debug_assert_eq!(from_end.edge, to_end.edge);
    debug_assert_eq!(from_end.rank, to_end.rank);
    let (Some(offset), Some(basis)) = (c.offset(), c.basis()) else {
        return Err(OracleError::EmptyCoset);
    };
    let rep = to_alphabet.embed(to_end, offset)?;
    let gens = basis
        .columns()
        .iter()
        .map(|col| to_alphabet.embed(to_end, col))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((rep, gens))
}

pub fn zero_vector(m: usize) -> IntVec {
    vec![BigInt::zero(); m]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::int_vec;
    use crate::words::SymbolTable;
    use proptest::prelude::*;

    struct Fixture {
        table: SymbolTable,
        free: VertexAlphabet,
        ab: VertexAlphabet,
    }

    fn fixture() -> Fixture {
        let mut table = SymbolTable::new();
        let a = table.declare("a", Sort::Vertex(0)).unwrap();
        let b = table.declare("b", Sort::Vertex(0)).unwrap();
        let x = table.declare("x", Sort::Vertex(1)).unwrap();
        let y = table.declare("y", Sort::Vertex(1)).unwrap();
        Fixture {
            table,
            free: VertexAlphabet { index: 0, kind: VertexKind::Free, symbols: vec![a, b] },
            ab: VertexAlphabet { index: 1, kind: VertexKind::FreeAbelian, symbols: vec![x, y] },
        }
    }

    impl Fixture {
        fn w(&self, s: &str) -> Word {
            self.table.parse_word(s).unwrap()
        }

        fn coset(&self, gens: &[&str], rep: &str) -> VertexCoset {
            VertexCoset::Coset { generators: gens.iter().map(|g| self.w(g)).collect(), representative: self.w(rep) }
        }

        fn free_end(&self, word: Option<&str>) -> EdgeEndMap {
            EdgeEndMap {
                edge: 0,
                end: End::Omega,
                vertex: 0,
                rank: usize::from(word.is_some()),
                image: EndImage::Free(word.map(|s| self.w(s))),
            }
        }

        fn ab_end(&self, columns: &[&[i64]]) -> EdgeEndMap {
            EdgeEndMap {
                edge: 0,
                end: End::Omega,
                vertex: 1,
                rank: columns.len(),
                image: EndImage::Abelian(IntMatrix::from_i64_columns(2, columns)),
            }
        }
    }

    #[test]
    fn vertex_contains_examples() {
        let f = fixture();
        assert!(!f.free.vertex_contains(&f.coset(&["a^2", "a b"], ""), &f.w("b a")).unwrap());
        let c = f.coset(&["x^2", "y^2"], "x y");
        assert!(f.ab.vertex_contains(&c, &f.w("x^3 y^5")).unwrap());
        assert!(!f.ab.vertex_contains(&c, &f.w("x^2 y")).unwrap());
        assert!(!f.free.vertex_contains(&VertexCoset::Empty, &f.w("a")).unwrap());
        assert!(!f.ab.vertex_contains(&VertexCoset::Empty, &f.w("")).unwrap());
        assert_eq!(f.free.vertex_contains(&c, &f.w("x")), Err(OracleError::WrongAlphabet(0)));
    }

    #[test]
    fn intersect_examples() {
        let f = fixture();
        let r = f.free.intersect_edge_image(&f.coset(&["a^4"], "a^2"), &f.free_end(Some("a^2"))).unwrap();
        assert_eq!(r, EdgeCoset::new(int_vec(&[1]), &IntMatrix::from_i64_columns(1, &[&[2]])).unwrap());

        let whole = f.coset(&["x", "y"], "");
        let end = f.ab_end(&[&[1, 1]]);
        assert_eq!(f.ab.intersect_edge_image(&whole, &end).unwrap(), EdgeCoset::whole(1));
        let end2 = f.ab_end(&[&[2, 1], &[0, 3]]);
        assert_eq!(f.ab.intersect_edge_image(&whole, &end2).unwrap(), EdgeCoset::whole(2));

        let r = f.free.intersect_edge_image(&f.coset(&[], "a"), &f.free_end(None)).unwrap();
        assert!(r.is_empty());
        assert_eq!(r.dim(), 0);
        let r = f.free.intersect_edge_image(&f.coset(&["a"], "a^3"), &f.free_end(None)).unwrap();
        assert_eq!(r, EdgeCoset::whole(0));

        assert!(f.free.intersect_edge_image(&f.coset(&[], ""), &f.ab_end(&[&[1, 0]])).is_err());
    }

    #[test]
    fn embed_examples() {
        let f = fixture();
        assert_eq!(f.free.embed(&f.free_end(Some("a^2")), &int_vec(&[3])).unwrap(), f.w("a^6"));
        assert_eq!(f.ab.embed(&f.ab_end(&[&[1, 1]]), &int_vec(&[2])).unwrap(), f.w("x^2 y^2"));
        assert_eq!(f.free.embed(&f.free_end(None), &[]).unwrap(), Word::empty());
        assert_eq!(f.free.embed(&f.free_end(Some("a b")), &int_vec(&[-1])).unwrap(), f.w("b^-1 a^-1"));
    }

    #[test]
    fn transfer_examples() {
        let f = fixture();
        let mut from = f.free_end(Some("a"));
        from.end = End::Alpha;
        let to = f.free_end(Some("b^3"));
        let c = EdgeCoset::new(int_vec(&[1]), &IntMatrix::from_i64_columns(1, &[&[2]])).unwrap();
        let (rep, gens) = coset_transfer(&f.free, &from, &to, &c).unwrap();
        assert_eq!(rep, f.w("b^3"));
        assert_eq!(gens, vec![f.w("b^6")]);

        let (rep, gens) = coset_transfer(&f.free, &f.free_end(None), &f.free_end(None), &EdgeCoset::whole(0)).unwrap();
        assert!(rep.is_empty() && gens.is_empty());

        let id = f.ab_end(&[&[1, 0], &[0, 1]]);
        let c = EdgeCoset::new(int_vec(&[1, 0]), &IntMatrix::from_i64_columns(2, &[&[0, 2]])).unwrap();
        let (rep, gens) = coset_transfer(&f.ab, &id, &id, &c).unwrap();
        assert_eq!(rep, f.w("x"));
        assert_eq!(gens, vec![f.w("y^2")]);

        assert_eq!(
            coset_transfer(&f.ab, &id, &id, &EdgeCoset::empty(2)),
            Err(OracleError::EmptyCoset)
        );
    }

    #[test]
    fn normalize_abelian() {
        let f = fixture();
        assert_eq!(f.ab.normalize(&f.w("y x y^-1 x")).unwrap(), f.w("x^2"));
        assert!(f.ab.is_identity(&f.w("x y x^-1 y^-1")).unwrap());
        assert!(!f.free.is_identity(&f.w("a b a^-1 b^-1")).unwrap());
    }

    #[test]
    fn abelian_classes() {
        let f = fixture();
        let words: Vec<Word> = ["", "x^2", "y", "x y^3", "x^-1 y"].iter().map(|s| f.w(s)).collect();
        let gens = vec![f.w("x^2"), f.w("y^2")];
        let classes = f.ab.right_coset_classes(&gens, &words).unwrap();
        assert_eq!(classes, vec![0, 0, 1, 2, 2]);
    }

    fn free_word(max: usize) -> impl Strategy<Value = String> {
        proptest::collection::vec(proptest::sample::select(vec!["a", "b", "a^-1", "b^-1"]), 0..=max).prop_map(|v| v.join(" "))
    }

    proptest! {
        #[test]
        fn free_intersection_complete(gens in proptest::collection::vec(free_word(4), 0..3), rep in free_word(3), w in free_word(3)) {
            let f = fixture();
            let w_word = f.w(&w).free_reduce();
            prop_assume!(!w_word.is_empty());
            let coset = VertexCoset::Coset { generators: gens.iter().map(|g| f.w(g)).collect(), representative: f.w(&rep) };
            let end = EdgeEndMap { edge: 0, end: End::Omega, vertex: 0, rank: 1, image: EndImage::Free(Some(w_word.clone())) };
            let c = f.free.intersect_edge_image(&coset, &end).unwrap();
            for t in -20i64..=20 {
                let image = f.free.embed(&end, &int_vec(&[t])).unwrap();
                prop_assert_eq!(c.contains(&int_vec(&[t])).unwrap(), f.free.vertex_contains(&coset, &image).unwrap());
            }
        }

        #[test]
        fn abelian_intersection_complete(
            gens in proptest::collection::vec((-3i64..=3, -3i64..=3), 0..3),
            rep in (-3i64..=3, -3i64..=3),
            col in (-3i64..=3, -3i64..=3),
        ) {
            prop_assume!(col != (0, 0));
            let f = fixture();
            let word = |(i, j): (i64, i64)| f.ab.vector_to_word(&int_vec(&[i, j])).unwrap();
            let coset = VertexCoset::Coset { generators: gens.iter().map(|&g| word(g)).collect(), representative: word(rep) };
            let end = f.ab_end(&[&[col.0, col.1]]);
            let c = f.ab.intersect_edge_image(&coset, &end).unwrap();
            for t in -12i64..=12 {
                let image = f.ab.embed(&end, &int_vec(&[t])).unwrap();
                prop_assert_eq!(c.contains(&int_vec(&[t])).unwrap(), f.ab.vertex_contains(&coset, &image).unwrap());
            }
            if let Some(basis) = c.basis() {
                let to = end.clone();
                let (rep_w, gens_w) = coset_transfer(&f.ab, &end, &to, &c).unwrap();
                prop_assert_eq!(gens_w.len(), basis.cols());
                prop_assert!(f.ab.vertex_contains(&coset, &rep_w).unwrap());
                for g in &gens_w {
                    prop_assert!(f.ab.vertex_contains(&coset, &g.concat(&rep_w)).unwrap());
                }
            }
        }
    }
}
