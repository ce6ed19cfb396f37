//! Exact integer lattice arithmetic for free-abelian vertex and edge groups.
//!
//! Matrices are stored by columns; a lattice is the Z-span of the columns.
//! The normal form is the column Hermite normal form in lower echelon shape:
//! pivot rows strictly increase from left to right, each pivot is positive,
//! entries above a pivot are zero and entries of earlier columns in a pivot
//! row lie in `[0, pivot)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type IntVec = Vec<BigInt>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("map is not injective (rank {rank} < {cols})")]
    NotInjective { rank: usize, cols: usize },
}

pub fn int_vec(v: &[i64]) -> IntVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn zero_vec(n: usize) -> IntVec {
    vec![BigInt::zero(); n]
}

fn is_zero_vec(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// `dst += k * src`
fn axpy(dst: &mut [BigInt], k: &BigInt, src: &[BigInt]) {
    if k.is_zero() {
        return;
    }
    for (d, s) in dst.iter_mut().zip(src) {
        *d += k * s;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    columns: Vec<IntVec>,
}

impl IntMatrix {
    pub fn from_columns(rows: usize, columns: Vec<IntVec>) -> Result<Self, LatticeError> {
        for c in &columns {
            if c.len() != rows {
                return Err(LatticeError::DimensionMismatch { expected: rows, got: c.len() });
            }
        }
        Ok(IntMatrix { rows, columns })
    }

    /// Convenience constructor for tests and literals.
    pub fn from_i64_columns(rows: usize, columns: &[&[i64]]) -> Self {
        Self::from_columns(rows, columns.iter().map(|c| int_vec(c)).collect())
            .expect("column length")
    }

    pub fn identity(n: usize) -> Self {
        let columns = (0..n)
            .map(|j| (0..n).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        IntMatrix { rows: n, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[IntVec] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &[BigInt] {
        &self.columns[j]
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Result<IntVec, LatticeError> {
        if x.len() != self.cols() {
            return Err(LatticeError::DimensionMismatch { expected: self.cols(), got: x.len() });
        }
        let mut out = zero_vec(self.rows);
        for (c, k) in self.columns.iter().zip(x) {
            axpy(&mut out, k, c);
        }
        Ok(out)
    }

    pub fn hnf(&self) -> IntMatrix {
        self.echelon().basis
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivot_rows.len()
    }

    /// Column echelon reduction tracking the unimodular transform.
    fn echelon(&self) -> Echelon {
        let n = self.rows;
        let m = self.cols();
        let mut cols = self.columns.clone();
        let mut trans: Vec<IntVec> = IntMatrix::identity(m).columns;
        let mut pivot_rows = Vec::new();
        let mut p = 0usize;
        for row in 0..n {
            if p == m {
                break;
            }
            for k in p + 1..m {
                if cols[k][row].is_zero() {
                    continue;
                }
                let a = cols[p][row].clone();
                let b = cols[k][row].clone();
                let eg = a.extended_gcd(&b);
                let (g, x, y) = (eg.gcd, eg.x, eg.y);
                let kp = -(&b / &g);
                let kk = &a / &g;
                combine(&mut cols, p, k, &x, &y, &kp, &kk);
                combine(&mut trans, p, k, &x, &y, &kp, &kk);
            }
            if cols[p][row].is_zero() {
                continue;
            }
            if cols[p][row].is_negative() {
                for e in cols[p].iter_mut() {
                    *e = -&*e;
                }
                for e in trans[p].iter_mut() {
                    *e = -&*e;
                }
            }
            let pivot = cols[p][row].clone();
            for j in 0..p {
                let q = cols[j][row].div_floor(&pivot);
                if q.is_zero() {
                    continue;
                }
                let neg_q = -q;
                let (left, right) = cols.split_at_mut(p);
                axpy(&mut left[j], &neg_q, &right[0]);
                let (left, right) = trans.split_at_mut(p);
                axpy(&mut left[j], &neg_q, &right[0]);
            }
            pivot_rows.push(row);
            p += 1;
        }
        let kernel = trans.split_off(p);
        cols.truncate(p);
        Echelon { basis: IntMatrix { rows: n, columns: cols }, transform: trans, kernel, pivot_rows }
    }

    /// Some integer `x` with `self * x = t`, if one exists.
    pub fn solve(&self, t: &[BigInt]) -> Result<Option<IntVec>, LatticeError> {
        if t.len() != self.rows {
            return Err(LatticeError::DimensionMismatch { expected: self.rows, got: t.len() });
        }
        let ech = self.echelon();
        let y = match ech.solve_echelon(t) {
            Some(y) => y,
            None => return Ok(None),
        };
        let mut x = zero_vec(self.cols());
        for (u, k) in ech.transform.iter().zip(&y) {
            axpy(&mut x, k, u);
        }
        Ok(Some(x))
    }

    /// A basis of the integer kernel `{x : self * x = 0}`.
    pub fn kernel(&self) -> IntMatrix {
        let ech = self.echelon();
        IntMatrix { rows: self.cols(), columns: ech.kernel }
    }
}

/// Replaces columns `p`, `k` by `x*p + y*k` and `kp*p + kk*k`.
fn combine(
    cols: &mut [IntVec],
    p: usize,
    k: usize,
    x: &BigInt,
    y: &BigInt,
    kp: &BigInt,
    kk: &BigInt,
) {
    let cp = cols[p].clone();
    let ck = cols[k].clone();
    for i in 0..cp.len() {
        cols[p][i] = x * &cp[i] + y * &ck[i];
        cols[k][i] = kp * &cp[i] + kk * &ck[i];
    }
}

struct Echelon {
    basis: IntMatrix,
    transform: Vec<IntVec>,
    kernel: Vec<IntVec>,
    pivot_rows: Vec<usize>,
}

impl Echelon {
    fn solve_echelon(&self, t: &[BigInt]) -> Option<IntVec> {
        let mut res: IntVec = t.to_vec();
        let mut y = Vec::with_capacity(self.pivot_rows.len());
        for (col, &row) in self.basis.columns.iter().zip(&self.pivot_rows) {
            let (q, r) = res[row].div_rem(&col[row]);
            if !r.is_zero() {
                return None;
            }
            axpy(&mut res, &-&q, col);
            y.push(q);
        }
        if is_zero_vec(&res) {
            Some(y)
        } else {
            None
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (j, c) in self.columns.iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (i, e) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "]")
    }
}

/// `offset + L` for a sublattice `L` of `Z^dim`, or the empty coset.
///
/// Nonempty cosets are kept canonical: the basis is in HNF and the offset is
/// reduced against its pivots, so equal cosets compare equal structurally.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeCoset {
    dim: usize,
    data: Option<(IntVec, IntMatrix)>,
}

impl LatticeCoset {
    pub fn empty(dim: usize) -> Self {
        LatticeCoset { dim, data: None }
    }

    pub fn singleton(point: IntVec) -> Self {
        let dim = point.len();
        LatticeCoset { dim, data: Some((point, IntMatrix { rows: dim, columns: vec![] })) }
    }

    pub fn whole(dim: usize) -> Self {
        Self::new(zero_vec(dim), &IntMatrix::identity(dim)).expect("dims agree")
    }

    pub fn new(offset: IntVec, generators: &IntMatrix) -> Result<Self, LatticeError> {
        if offset.len() != generators.rows() {
            return Err(LatticeError::DimensionMismatch {
                expected: generators.rows(),
                got: offset.len(),
            });
        }
        let ech = generators.echelon();
        let mut offset = offset;
        for (col, &row) in ech.basis.columns.iter().zip(&ech.pivot_rows) {
            let q = offset[row].div_floor(&col[row]);
            axpy(&mut offset, &-q, col);
        }
        Ok(LatticeCoset { dim: generators.rows(), data: Some((offset, ech.basis)) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_none()
    }

    pub fn offset(&self) -> Option<&[BigInt]> {
        self.data.as_ref().map(|(o, _)| o.as_slice())
    }

    pub fn basis(&self) -> Option<&IntMatrix> {
        self.data.as_ref().map(|(_, b)| b)
    }

    pub fn contains(&self, p: &[BigInt]) -> Result<bool, LatticeError> {
        if p.len() != self.dim {
            return Err(LatticeError::DimensionMismatch { expected: self.dim, got: p.len() });
        }
        let Some((offset, basis)) = &self.data else {
            return Ok(false);
        };
        let diff: IntVec = p.iter().zip(offset).map(|(a, b)| a - b).collect();
        Ok(basis.solve(&diff)?.is_some())
    }

    /// Inclusion of cosets of the same ambient lattice.
    pub fn is_subset_of(&self, other: &LatticeCoset) -> Result<bool, LatticeError> {
        if self.dim != other.dim {
            return Err(LatticeError::DimensionMismatch { expected: other.dim, got: self.dim });
        }
        let Some((offset, basis)) = &self.data else {
            return Ok(true);
        };
        let Some((_, other_basis)) = &other.data else {
            return Ok(false);
        };
        if !other.contains(offset)? {
            return Ok(false);
        }
        for c in basis.columns() {
            if other_basis.solve(c)?.is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The element `offset + basis * coeffs`.
    pub fn element(&self, coeffs: &[BigInt]) -> Option<IntVec> {
        let (offset, basis) = self.data.as_ref()?;
        let mut v = offset.clone();
        for (c, k) in basis.columns().iter().zip(coeffs) {
            axpy(&mut v, k, c);
        }
        Some(v)
    }
}

impl fmt::Display for LatticeCoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.data {
            None => write!(f, "empty(Z^{})", self.dim),
            Some((o, b)) => {
                let o: Vec<String> = o.iter().map(ToString::to_string).collect();
                write!(f, "({}) + span{}", o.join(","), b)
            }
        }
    }
}

pub fn hnf(b: &IntMatrix) -> IntMatrix {
    b.hnf()
}

pub fn solve(b: &IntMatrix, t: &[BigInt]) -> Result<Option<IntVec>, LatticeError> {
    b.solve(t)
}

pub fn coset_contains_ab(c: &LatticeCoset, p: &[BigInt]) -> Result<bool, LatticeError> {
    c.contains(p)
}

/// `{x in Z^m : M x in C}` for an injective `M : Z^m -> Z^n`.
pub fn preimage_coset(m: &IntMatrix, c: &LatticeCoset) -> Result<LatticeCoset, LatticeError> {
    if c.dim() != m.rows() {
        return Err(LatticeError::DimensionMismatch { expected: m.rows(), got: c.dim() });
    }
    let rank = m.rank();
    if rank != m.cols() {
        return Err(LatticeError::NotInjective { rank, cols: m.cols() });
    }
    let Some((offset, basis)) = &c.data else {
        return Ok(LatticeCoset::empty(m.cols()));
    };
    // [M | -B] (x, y) = offset
    let mut columns = m.columns().to_vec();
    columns.extend(basis.columns().iter().map(|col| col.iter().map(|e| -e).collect()));
    let joint = IntMatrix { rows: m.rows(), columns };
    let Some(z) = joint.solve(offset)? else {
        return Ok(LatticeCoset::empty(m.cols()));
    };
    let x0 = z[..m.cols()].to_vec();
    let projected: Vec<IntVec> =
        joint.kernel().columns.into_iter().map(|k| k[..m.cols()].to_vec()).collect();
    let lattice = IntMatrix { rows: m.cols(), columns: projected };
    LatticeCoset::new(x0, &lattice)
}
