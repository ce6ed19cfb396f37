//! Brute-force membership search: breadth-first over products of subgroup
//! generators, with equality decided by the pinch reducer. A semi-decision
//! procedure used as an independent test oracle.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::gog::{CycleTypeWord, GogError, GraphOfGroups};

pub const DEFAULT_DEPTH_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BruteError {
    #[error("depth {depth} exceeds the cap of {cap}")]
    DepthCap { depth: usize, cap: usize },
    #[error(transparent)]
    Gog(#[from] GogError),
}

/// A factor `k_index^{+-1}` of a witness product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Factor {
    pub index: usize,
    pub inverse: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BruteResult {
    Witness(Vec<Factor>),
    NotFound(usize),
}

impl BruteResult {
    pub fn is_witness(&self) -> bool {
        matches!(self, BruteResult::Witness(_))
    }
}

/// Renders a witness: single-letter generators bare, longer ones in
/// parentheses, inverses with `^-1`.
pub fn render_witness(g: &GraphOfGroups, k_gens: &[CycleTypeWord], factors: &[Factor]) -> String {
    factors
        .iter()
        .map(|f| {
            let w = k_gens[f.index].to_word();
            let body = g.render(&w);
            let body = if w.len() == 1 { body } else { format!("({body})") };
            if f.inverse {
                format!("{body}^-1")
            } else {
                body
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

impl BruteResult {
    pub fn render(&self, g: &GraphOfGroups, k_gens: &[CycleTypeWord]) -> String {
        match self {
            BruteResult::Witness(fs) => format!("WITNESS \"{}\"", render_witness(g, k_gens, fs)),
            BruteResult::NotFound(d) => format!("NOT-FOUND-UP-TO({d})"),
        }
    }
}

/// The product a witness stands for.
pub fn evaluate(k_gens: &[CycleTypeWord], factors: &[Factor]) -> CycleTypeWord {
    factors.iter().fold(CycleTypeWord::identity(), |acc, f| {
        let k = &k_gens[f.index];
        acc.concat(&if f.inverse { k.inverse() } else { k.clone() })
    })
}

/// Searches products of at most `depth` factors for one equal to `g`.
pub fn brute_member(
    g: &GraphOfGroups,
    k_gens: &[CycleTypeWord],
    target: &CycleTypeWord,
    depth: usize,
) -> Result<BruteResult, BruteError> {
    brute_member_capped(g, k_gens, target, depth, DEFAULT_DEPTH_CAP)
}

pub fn brute_member_capped(
    g: &GraphOfGroups,
    k_gens: &[CycleTypeWord],
    target: &CycleTypeWord,
    depth: usize,
    cap: usize,
) -> Result<BruteResult, BruteError> {
    if depth > cap {
        return Err(BruteError::DepthCap { depth, cap });
    }
    let target_inv = target.inverse();
    let found = |factors: &[Factor]| -> Result<bool, GogError> {
        g.is_trivial(&evaluate(k_gens, factors).concat(&target_inv))
    };
    if found(&[])? {
        return Ok(BruteResult::Witness(Vec::new()));
    }
    let letters: Vec<Factor> = (0..k_gens.len())
        .flat_map(|index| [Factor { index, inverse: false }, Factor { index, inverse: true }])
        .collect();
    let mut seen = HashSet::from([g.reduced_key(&CycleTypeWord::identity())?]);
    let mut frontier: Vec<(Vec<Factor>, CycleTypeWord)> = vec![(Vec::new(), CycleTypeWord::identity())];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (factors, product) in &frontier {
            for f in &letters {
                let k = &k_gens[f.index];
                let step = product.concat(&if f.inverse { k.inverse() } else { k.clone() });
                let reduced = g.britton_reduce(&step)?;
                if !seen.insert(g.reduced_key(&reduced)?) {
                    continue;
                }
                let mut fs = factors.clone();
                fs.push(*f);
                if g.is_trivial(&reduced.concat(&target_inv))? {
                    debug_assert!(found(&fs)?);
                    return Ok(BruteResult::Witness(fs));
                }
                next.push((fs, reduced));
            }
        }
        frontier = next;
    }
    Ok(BruteResult::NotFound(depth))
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k{}{}", self.index, if self.inverse { "^-1" } else { "" })
    }
}
