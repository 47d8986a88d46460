//! Integer Seifert matrices and epsilon-symmetric Seifert forms.
//!
//! A Seifert matrix is a square integer matrix `psi` with a symmetry sign
//! epsilon. When the pairing `psi + eps*psi^T` is unimodular it induces a form
//! `(rank, b, t)` with `b = psi + eps*psi^T` and `t = b^{-1}*psi`. This module
//! constructs forms, takes block sums, verifies metabolizers and hyperbolic
//! splittings, and runs a small exhaustive metabolizer search over
//! Hermite-echelon bases.
//!
//! Absence of a metabolizer within a coefficient bound is only ever "not
//! found": ruling metabolic out for good is the signature module's job.

use crate::intmat::IntMat;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeifertError {
    #[error("matrix is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("pairing psi + eps*psi^T has determinant {det}, expected a unit")]
    NonUnimodular { det: BigInt },
    #[error("summands carry different symmetry signs")]
    EpsilonMismatch,
    #[error("ambient dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("basis vectors are linearly dependent over the rationals")]
    DependentBasis,
    #[error("sublattice is not primitive: elementary divisor {divisor}")]
    NotPrimitive { divisor: BigInt },
    #[error("epsilon must be +1 or -1, got {value}")]
    InvalidEpsilon { value: String },
    #[error("matrix document: {0}")]
    Document(String),
}

/// Symmetry sign of a Seifert pairing: `b^T = eps * b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Epsilon {
    Plus,
    Minus,
}

impl Epsilon {
    pub fn sign(self) -> i64 {
        match self {
            Epsilon::Plus => 1,
            Epsilon::Minus => -1,
        }
    }

    fn from_i64(value: i64) -> Result<Self, SeifertError> {
        match value {
            1 => Ok(Epsilon::Plus),
            -1 => Ok(Epsilon::Minus),
            other => Err(SeifertError::InvalidEpsilon { value: other.to_string() }),
        }
    }
}

impl FromStr for Epsilon {
    type Err = SeifertError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+1" | "1" => Ok(Epsilon::Plus),
            "-1" => Ok(Epsilon::Minus),
            other => Err(SeifertError::InvalidEpsilon { value: other.to_string() }),
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Epsilon::Plus => write!(f, "+1"),
            Epsilon::Minus => write!(f, "-1"),
        }
    }
}

impl Serialize for Epsilon {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_i64(self.sign())
    }
}

impl<'de> Deserialize<'de> for Epsilon {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(deserializer)?;
        Epsilon::from_i64(v).map_err(serde::de::Error::custom)
    }
}

/// A square integer matrix together with its symmetry sign.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeifertMatrix {
    psi: IntMat,
    epsilon: Epsilon,
}

/// On-disk shape: `name`, `epsilon`, `rows`.
#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    name: String,
    epsilon: i64,
    rows: Vec<Vec<i64>>,
}

impl SeifertMatrix {
    pub fn new(psi: IntMat, epsilon: Epsilon) -> Result<Self, SeifertError> {
        if !psi.is_square() {
            return Err(SeifertError::NonSquare { rows: psi.rows(), cols: psi.cols() });
        }
        Ok(Self { psi, epsilon })
    }

    pub fn psi(&self) -> &IntMat {
        &self.psi
    }

    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }

    /// Ambient rank: the matrix is `rank x rank`.
    pub fn rank(&self) -> usize {
        self.psi.rows()
    }

    /// The pairing `psi + eps * psi^T`.
    pub fn pairing(&self) -> IntMat {
        let pt = self.psi.transpose();
        match self.epsilon {
            Epsilon::Plus => self.psi.add(&pt),
            Epsilon::Minus => self.psi.sub(&pt),
        }
    }

    /// Whether the pairing is unimodular, as form construction requires.
    pub fn is_admissible(&self) -> bool {
        self.pairing().is_unimodular()
    }

    /// Parse a matrix document; returns the document name alongside the matrix.
    pub fn from_toml_str(s: &str) -> Result<(String, Self), SeifertError> {
        let doc: MatrixDoc = toml::from_str(s).map_err(|e| SeifertError::Document(e.to_string()))?;
        let n = doc.rows.len();
        if doc.rows.iter().any(|r| r.len() != n) {
            return Err(SeifertError::NonSquare {
                rows: n,
                cols: doc.rows.iter().map(Vec::len).max().unwrap_or(0),
            });
        }
        let epsilon = Epsilon::from_i64(doc.epsilon)?;
        Ok((doc.name, Self { psi: IntMat::from_rows(&doc.rows), epsilon }))
    }

    pub fn to_toml_string(&self, name: &str) -> Result<String, SeifertError> {
        let mut rows = Vec::with_capacity(self.rank());
        for i in 0..self.rank() {
            let mut row = Vec::with_capacity(self.rank());
            for j in 0..self.rank() {
                let v = i64::try_from(self.psi.get(i, j)).map_err(|_| {
                    SeifertError::Document(format!("entry at ({i}, {j}) exceeds the document range"))
                })?;
                row.push(v);
            }
            rows.push(row);
        }
        let doc = MatrixDoc { name: name.to_string(), epsilon: self.epsilon.sign(), rows };
        toml::to_string(&doc).map_err(|e| SeifertError::Document(e.to_string()))
    }
}

/// The triple `(rank, b, t)` induced by an admissible Seifert matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeifertForm {
    rank: usize,
    b: IntMat,
    t: IntMat,
    epsilon: Epsilon,
}

impl SeifertForm {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn b(&self) -> &IntMat {
        &self.b
    }

    pub fn t(&self) -> &IntMat {
        &self.t
    }

    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }
}

/// Build `(rank, b, t)` with `b = psi + eps*psi^T` and `t = b^{-1}*psi`.
/// Unimodularity of `b` makes `t` integral.
pub fn form_from_matrix(m: &SeifertMatrix) -> Result<SeifertForm, SeifertError> {
    let b = m.pairing();
    let Some(b_inv) = b.unimodular_inverse() else {
        return Err(SeifertError::NonUnimodular { det: b.det() });
    };
    let t = b_inv.mul(m.psi());
    debug_assert_eq!(b.mul(&t), *m.psi());
    debug_assert_eq!(
        t.transpose().mul(&b),
        b.mul(&IntMat::identity(m.rank()).sub(&t)),
        "form axiom t^T b = b (I - t)"
    );
    Ok(SeifertForm { rank: m.rank(), b, t, epsilon: m.epsilon() })
}

/// Block sum `diag(psi1, psi2)`; the summands must share a symmetry sign.
pub fn connected_sum(m1: &SeifertMatrix, m2: &SeifertMatrix) -> Result<SeifertMatrix, SeifertError> {
    if m1.epsilon() != m2.epsilon() {
        return Err(SeifertError::EpsilonMismatch);
    }
    Ok(SeifertMatrix { psi: m1.psi().block_diag(m2.psi()), epsilon: m1.epsilon() })
}

/// `diag(psi, psi^T)`: the matrix of the sum with the reversed-orientation copy.
pub fn reverse_sum(m: &SeifertMatrix) -> SeifertMatrix {
    SeifertMatrix { psi: m.psi().block_diag(&m.psi().transpose()), epsilon: m.epsilon() }
}

/// A finitely generated direct summand of the ambient lattice, stored as a
/// basis matrix whose columns are the generating vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    basis: IntMat,
}

impl Sublattice {
    /// Validates rational independence of the columns and primitivity (all
    /// Smith invariant factors 1, so the lattice is a direct summand).
    pub fn new(basis: IntMat) -> Result<Self, SeifertError> {
        if basis.rank() < basis.cols() {
            return Err(SeifertError::DependentBasis);
        }
        for d in basis.smith_invariant_factors() {
            if d.abs() != BigInt::one() {
                return Err(SeifertError::NotPrimitive { divisor: d });
            }
        }
        Ok(Self { basis })
    }

    /// The span of the chosen standard basis vectors (zero-based indices).
    pub fn standard_span(ambient: usize, indices: &[usize]) -> Result<Self, SeifertError> {
        for &i in indices {
            if i >= ambient {
                return Err(SeifertError::DimensionMismatch { expected: ambient, got: i + 1 });
            }
        }
        let basis = IntMat::from_fn(ambient, indices.len(), |i, j| {
            if i == indices[j] {
                BigInt::one()
            } else {
                BigInt::zero()
            }
        });
        Self::new(basis)
    }

    pub fn ambient(&self) -> usize {
        self.basis.rows()
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    /// Basis matrix, one generating vector per column.
    pub fn basis(&self) -> &IntMat {
        &self.basis
    }

    /// The `j`-th basis vector.
    pub fn basis_vector(&self, j: usize) -> Vec<BigInt> {
        (0..self.ambient()).map(|i| self.basis.get(i, j).clone()).collect()
    }

    fn basis_vectors(&self) -> Vec<Vec<BigInt>> {
        (0..self.rank()).map(|j| self.basis_vector(j)).collect()
    }
}

impl fmt::Display for Sublattice {
    /// `span{e1, e2}` when every basis vector is a standard one, otherwise
    /// `span{(1, 0, -1), ...}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vectors = self.basis_vectors();
        let standard: Vec<Option<usize>> = vectors
            .iter()
            .map(|v| {
                let nonzero: Vec<usize> =
                    (0..v.len()).filter(|&i| !v[i].is_zero()).collect();
                match nonzero.as_slice() {
                    [i] if v[*i].is_one() => Some(*i),
                    _ => None,
                }
            })
            .collect();
        write!(f, "span{{")?;
        for (j, v) in vectors.iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            match standard[j] {
                Some(i) => write!(f, "e{}", i + 1)?,
                None => {
                    write!(f, "(")?;
                    for (i, c) in v.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{c}")?;
                    }
                    write!(f, ")")?;
                }
            }
        }
        write!(f, "}}")
    }
}

impl Serialize for Sublattice {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut state = serializer.serialize_struct("Sublattice", 2)?;
        state.serialize_field("ambient", &self.ambient())?;
        let mut vectors: Vec<Vec<i64>> = Vec::with_capacity(self.rank());
        for v in self.basis_vectors() {
            let mut out = Vec::with_capacity(v.len());
            for c in &v {
                out.push(i64::try_from(c).map_err(|_| {
                    serde::ser::Error::custom("sublattice entry exceeds the serializable range")
                })?);
            }
            vectors.push(out);
        }
        state.serialize_field("vectors", &vectors)?;
        state.end()
    }
}

/// True when `l` has half the ambient rank and all its basis pairs are
/// psi-isotropic. Primitivity and independence are `Sublattice` invariants.
pub fn verify_metabolizer(m: &SeifertMatrix, l: &Sublattice) -> Result<bool, SeifertError> {
    let n = m.rank();
    if l.ambient() != n {
        return Err(SeifertError::DimensionMismatch { expected: n, got: l.ambient() });
    }
    if l.rank() * 2 != n {
        return Ok(false);
    }
    let vectors = l.basis_vectors();
    for x in &vectors {
        for y in &vectors {
            if !m.psi().bilinear(x, y).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True when `l1 (+) l2` spans the ambient lattice, both summands are
/// t-invariant, and each equals its own b-orthogonal complement.
///
/// With `C = [B1 | B2]` unimodular the three conditions reduce to: both
/// diagonal blocks of `C^T b C` vanish (unimodularity of `b` then forces the
/// complements to be exact, not just containments) and `C^{-1} t C` is block
/// diagonal.
pub fn verify_hyperbolic_splitting(
    f: &SeifertForm,
    l1: &Sublattice,
    l2: &Sublattice,
) -> Result<bool, SeifertError> {
    let n = f.rank();
    for l in [l1, l2] {
        if l.ambient() != n {
            return Err(SeifertError::DimensionMismatch { expected: n, got: l.ambient() });
        }
    }
    let (k1, k2) = (l1.rank(), l2.rank());
    if k1 + k2 != n {
        return Ok(false);
    }
    let c = l1.basis().hstack(l2.basis());
    let Some(c_inv) = c.unimodular_inverse() else {
        return Ok(false);
    };
    let g = c.transpose().mul(f.b()).mul(&c);
    if !g.block(0, 0, k1, k1).is_zero() || !g.block(k1, k1, k2, k2).is_zero() {
        return Ok(false);
    }
    let tc = c_inv.mul(f.t()).mul(&c);
    if !tc.block(0, k1, k1, k2).is_zero() || !tc.block(k1, 0, k2, k1).is_zero() {
        return Ok(false);
    }
    Ok(true)
}

/// Pivot rows and pivot values shared by one batch of echelon bases.
#[derive(Clone)]
struct PivotLayout {
    rows: Vec<usize>,
    divisors: Vec<i64>,
}

/// Every strictly increasing `k`-subset of `0..n`, lexicographically, crossed
/// with every pivot-value vector in `[1, bound]^k`.
fn pivot_layouts(n: usize, k: usize, bound: i64) -> Vec<PivotLayout> {
    let mut combos: Vec<Vec<usize>> = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn choose(n: usize, k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            choose(n, k, i + 1, current, out);
            current.pop();
        }
    }
    choose(n, k, 0, &mut current, &mut combos);
    let mut layouts = Vec::new();
    for rows in combos {
        let mut divisors = vec![1i64; k];
        loop {
            layouts.push(PivotLayout { rows: rows.clone(), divisors: divisors.clone() });
            let mut carry = k;
            while carry > 0 {
                if divisors[carry - 1] < bound {
                    divisors[carry - 1] += 1;
                    break;
                }
                divisors[carry - 1] = 1;
                carry -= 1;
            }
            if carry == 0 {
                break;
            }
        }
    }
    layouts
}

/// Depth-first walk over the echelon bases of one layout. Column `j` is zero
/// above its pivot row, carries the pivot value there, is reduced modulo the
/// later pivots' values at their rows, and ranges over `[-bound, bound]`
/// elsewhere below. `prune` sees the columns placed so far after each new
/// column; `visit` sees complete bases and returns true to stop the walk.
fn visit_echelon_bases(
    n: usize,
    layout: &PivotLayout,
    bound: i64,
    prune: &dyn Fn(&[Vec<BigInt>]) -> bool,
    visit: &mut dyn FnMut(&[Vec<BigInt>]) -> bool,
) -> bool {
    fn fill(
        n: usize,
        layout: &PivotLayout,
        bound: i64,
        columns: &mut Vec<Vec<BigInt>>,
        prune: &dyn Fn(&[Vec<BigInt>]) -> bool,
        visit: &mut dyn FnMut(&[Vec<BigInt>]) -> bool,
    ) -> bool {
        let j = columns.len();
        if j == layout.rows.len() {
            return visit(columns);
        }
        let pivot_row = layout.rows[j];
        let mut column = vec![BigInt::zero(); n];
        column[pivot_row] = BigInt::from(layout.divisors[j]);
        let free: Vec<(usize, i64, i64)> = (pivot_row + 1..n)
            .map(|r| match layout.rows.iter().position(|&p| p == r) {
                Some(i) => (r, 0, layout.divisors[i] - 1),
                None => (r, -bound, bound),
            })
            .collect();
        fn entries(
            n: usize,
            layout: &PivotLayout,
            bound: i64,
            columns: &mut Vec<Vec<BigInt>>,
            column: &mut Vec<BigInt>,
            free: &[(usize, i64, i64)],
            idx: usize,
            prune: &dyn Fn(&[Vec<BigInt>]) -> bool,
            visit: &mut dyn FnMut(&[Vec<BigInt>]) -> bool,
        ) -> bool {
            if idx == free.len() {
                columns.push(column.clone());
                let stopped = prune(columns)
                    && fill(n, layout, bound, columns, prune, visit);
                columns.pop();
                return stopped;
            }
            let (row, lo, hi) = free[idx];
            for v in lo..=hi {
                column[row] = BigInt::from(v);
                if entries(n, layout, bound, columns, column, free, idx + 1, prune, visit) {
                    return true;
                }
            }
            column[row] = BigInt::zero();
            false
        }
        entries(n, layout, bound, columns, &mut column, &free, 0, prune, visit)
    }
    let mut columns = Vec::new();
    fill(n, layout, bound, &mut columns, prune, visit)
}

fn columns_to_basis(ambient: usize, columns: &[Vec<BigInt>]) -> IntMat {
    IntMat::from_fn(ambient, columns.len(), |i, j| columns[j][i].clone())
}

/// All rank-`rank` primitive sublattices of `Z^ambient` whose Hermite-echelon
/// basis has pivot values at most `bound` and remaining entries in
/// `[-bound, bound]`. Deterministic order; no isotropy filtering.
pub fn enumerate_primitive_sublattices(ambient: usize, rank: usize, bound: i64) -> Vec<Sublattice> {
    assert!(bound >= 1, "coefficient bound must be positive");
    assert!(rank <= ambient, "sublattice rank exceeds ambient dimension");
    let mut out = Vec::new();
    for layout in pivot_layouts(ambient, rank, bound) {
        visit_echelon_bases(ambient, &layout, bound, &|_| true, &mut |columns| {
            if let Ok(l) = Sublattice::new(columns_to_basis(ambient, columns)) {
                out.push(l);
            }
            false
        });
    }
    out
}

/// Search one layout's bases for a verified metabolizer, pruning any partial
/// basis whose newest column breaks psi-isotropy.
fn search_layout(m: &SeifertMatrix, layout: &PivotLayout, bound: i64) -> Option<Sublattice> {
    let n = m.rank();
    let prune = |columns: &[Vec<BigInt>]| -> bool {
        let v = columns.last().expect("prune runs after a column is placed");
        if !m.psi().bilinear(v, v).is_zero() {
            return false;
        }
        columns[..columns.len() - 1]
            .iter()
            .all(|u| m.psi().bilinear(u, v).is_zero() && m.psi().bilinear(v, u).is_zero())
    };
    let mut found = None;
    visit_echelon_bases(n, layout, bound, &prune, &mut |columns| {
        let Ok(l) = Sublattice::new(columns_to_basis(n, columns)) else {
            return false;
        };
        if verify_metabolizer(m, &l) == Ok(true) {
            found = Some(l);
            true
        } else {
            false
        }
    });
    found
}

/// Exhaustive metabolizer search over half-rank echelon bases with pivot
/// values and entries bounded by `coefficient_bound`. Returns the first
/// verified metabolizer in layout order, or nothing; absence within a bound
/// never certifies non-metabolic. Any returned sublattice passes
/// [`verify_metabolizer`].
pub fn search_metabolizer(m: &SeifertMatrix, coefficient_bound: i64) -> Option<Sublattice> {
    #[cfg(feature = "parallel")]
    {
        search_metabolizer_par(m, coefficient_bound)
    }
    #[cfg(not(feature = "parallel"))]
    {
        search_metabolizer_seq(m, coefficient_bound)
    }
}

pub fn search_metabolizer_seq(m: &SeifertMatrix, coefficient_bound: i64) -> Option<Sublattice> {
    assert!(coefficient_bound >= 1, "coefficient bound must be positive");
    let n = m.rank();
    if n % 2 != 0 {
        return None;
    }
    pivot_layouts(n, n / 2, coefficient_bound)
        .iter()
        .find_map(|layout| search_layout(m, layout, coefficient_bound))
}

/// Parallel variant: layouts are searched across workers; the result is the
/// same first-in-layout-order metabolizer the sequential search returns.
#[cfg(feature = "parallel")]
pub fn search_metabolizer_par(m: &SeifertMatrix, coefficient_bound: i64) -> Option<Sublattice> {
    use rayon::prelude::*;
    assert!(coefficient_bound >= 1, "coefficient bound must be positive");
    let n = m.rank();
    if n % 2 != 0 {
        return None;
    }
    pivot_layouts(n, n / 2, coefficient_bound)
        .par_iter()
        .find_map_first(|layout| search_layout(m, layout, coefficient_bound))
}

static BUILTIN_SOURCES: [&str; 4] = [
    include_str!("../data/8_20.toml"),
    include_str!("../data/evenq_example.toml"),
    include_str!("../data/trefoil.toml"),
    include_str!("../data/unknot.toml"),
];

static BUILTINS: LazyLock<BTreeMap<String, SeifertMatrix>> = LazyLock::new(|| {
    BUILTIN_SOURCES
        .iter()
        .map(|src| SeifertMatrix::from_toml_str(src).expect("builtin matrix table"))
        .collect()
});

/// Look up a built-in Seifert matrix by name (see [`builtin_names`]).
pub fn builtin_matrix(name: &str) -> Option<SeifertMatrix> {
    BUILTINS.get(name).cloned()
}

/// Sorted names of the built-in matrices.
pub fn builtin_names() -> Vec<&'static str> {
    BUILTINS.keys().map(String::as_str).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(rows: &[Vec<i64>]) -> IntMat {
        IntMat::from_rows(rows)
    }

    fn eight_twenty() -> SeifertMatrix {
        builtin_matrix("8_20").unwrap()
    }

    fn evenq() -> SeifertMatrix {
        builtin_matrix("evenq_example").unwrap()
    }

    #[test]
    fn builtin_table() {
        assert_eq!(builtin_names(), vec!["8_20", "evenq_example", "trefoil", "unknot"]);
        let tref = builtin_matrix("trefoil").unwrap();
        assert_eq!(*tref.psi(), mat(&[vec![-1, 1], vec![0, -1]]));
        assert_eq!(tref.epsilon(), Epsilon::Minus);
        let unknot = builtin_matrix("unknot").unwrap();
        assert_eq!(unknot.rank(), 0);
        assert!(builtin_matrix("missing").is_none());
        for name in builtin_names() {
            assert!(builtin_matrix(name).unwrap().is_admissible(), "{name} admissible");
        }
    }

    #[test]
    fn form_for_8_20() {
        let f = form_from_matrix(&eight_twenty()).unwrap();
        assert_eq!(f.rank(), 4);
        assert_eq!(
            *f.b(),
            mat(&[vec![0, -1, -1, -1], vec![1, 0, 0, -1], vec![1, 0, 0, 0], vec![1, 1, 0, 0]])
        );
        assert_eq!(
            *f.t(),
            mat(&[vec![0, -1, 0, -1], vec![0, 1, -1, 1], vec![1, 1, 1, 0], vec![0, -1, 1, 0]])
        );
    }

    #[test]
    fn form_for_evenq() {
        let f = form_from_matrix(&evenq()).unwrap();
        assert_eq!(
            *f.b(),
            mat(&[vec![0, 0, 1, -1], vec![0, 0, 1, 0], vec![1, 1, 2, 0], vec![-1, 0, 0, 2]])
        );
        assert_eq!(
            *f.t(),
            mat(&[vec![0, -1, 2, -1], vec![1, 1, -3, 3], vec![0, 0, 1, -1], vec![0, 0, 1, 0]])
        );
    }

    #[test]
    fn skew_rank_one_is_degenerate() {
        let m = SeifertMatrix::new(mat(&[vec![1]]), Epsilon::Minus).unwrap();
        assert!(!m.is_admissible());
        match form_from_matrix(&m) {
            Err(SeifertError::NonUnimodular { det }) => assert_eq!(det, BigInt::zero()),
            other => panic!("expected NonUnimodular, got {other:?}"),
        }
    }

    #[test]
    fn connected_sum_blocks() {
        let m = eight_twenty();
        let s = connected_sum(&m, &m).unwrap();
        assert_eq!(s.rank(), 8);
        assert_eq!(s.psi().block(0, 0, 4, 4), *m.psi());
        assert_eq!(s.psi().block(4, 4, 4, 4), *m.psi());
        assert!(s.psi().block(0, 4, 4, 4).is_zero());
        assert!(s.psi().block(4, 0, 4, 4).is_zero());

        let empty = builtin_matrix("unknot").unwrap();
        assert_eq!(connected_sum(&m, &empty).unwrap(), m);

        let plus = evenq();
        assert!(matches!(connected_sum(&m, &plus), Err(SeifertError::EpsilonMismatch)));
    }

    #[test]
    fn reverse_sum_blocks() {
        let m = eight_twenty();
        let r = reverse_sum(&m);
        assert_eq!(r.rank(), 8);
        assert_eq!(r.psi().block(0, 0, 4, 4), *m.psi());
        assert_eq!(r.psi().block(4, 4, 4, 4), m.psi().transpose());

        let empty = reverse_sum(&builtin_matrix("unknot").unwrap());
        assert_eq!(empty.rank(), 0);
    }

    #[test]
    fn sublattice_validation() {
        let dependent = IntMat::from_rows(&[vec![1, 2], vec![0, 0]]);
        assert!(matches!(Sublattice::new(dependent), Err(SeifertError::DependentBasis)));

        let imprimitive = IntMat::from_rows(&[vec![2], vec![0]]);
        match Sublattice::new(imprimitive) {
            Err(SeifertError::NotPrimitive { divisor }) => assert_eq!(divisor, BigInt::from(2)),
            other => panic!("expected NotPrimitive, got {other:?}"),
        }

        let l = Sublattice::standard_span(4, &[0, 1]).unwrap();
        assert_eq!(l.ambient(), 4);
        assert_eq!(l.rank(), 2);
        assert_eq!(l.to_string(), "span{e1, e2}");

        let skewed = Sublattice::new(IntMat::from_rows(&[vec![1], vec![-1], vec![2]])).unwrap();
        assert_eq!(skewed.to_string(), "span{(1, -1, 2)}");

        let empty = Sublattice::new(IntMat::zeros(3, 0)).unwrap();
        assert_eq!(empty.rank(), 0);
        assert_eq!(empty.to_string(), "span{}");
    }

    #[test]
    fn metabolizer_checks_on_evenq() {
        let m = evenq();
        let front = Sublattice::standard_span(4, &[0, 1]).unwrap();
        assert_eq!(verify_metabolizer(&m, &front), Ok(true));
        let back = Sublattice::standard_span(4, &[2, 3]).unwrap();
        assert_eq!(verify_metabolizer(&m, &back), Ok(false));
        let half = Sublattice::standard_span(4, &[0]).unwrap();
        assert_eq!(verify_metabolizer(&m, &half), Ok(false));
    }

    #[test]
    fn metabolizer_rank_zero() {
        let m = builtin_matrix("unknot").unwrap();
        let empty = Sublattice::new(IntMat::zeros(0, 0)).unwrap();
        assert_eq!(verify_metabolizer(&m, &empty), Ok(true));
    }

    #[test]
    fn metabolizer_dimension_mismatch() {
        let m = eight_twenty();
        let l = Sublattice::standard_span(6, &[0, 1, 2]).unwrap();
        assert!(matches!(
            verify_metabolizer(&m, &l),
            Err(SeifertError::DimensionMismatch { expected: 4, got: 6 })
        ));
    }

    #[test]
    fn search_finds_evenq_metabolizer() {
        let m = evenq();
        let l = search_metabolizer_seq(&m, 1).expect("bound-1 metabolizer");
        assert_eq!(verify_metabolizer(&m, &l), Ok(true));
        // First layout in order is pivots (0, 1) with all free entries zero.
        assert_eq!(l, Sublattice::standard_span(4, &[0, 1]).unwrap());
    }

    #[test]
    fn search_finds_8_20_metabolizer() {
        let m = eight_twenty();
        let l = search_metabolizer_seq(&m, 2).expect("bound-2 metabolizer");
        assert_eq!(verify_metabolizer(&m, &l), Ok(true));
    }

    #[test]
    fn search_trefoil_exhausts() {
        let m = builtin_matrix("trefoil").unwrap();
        assert_eq!(search_metabolizer_seq(&m, 3), None);
    }

    #[test]
    fn search_unknot_trivial() {
        let m = builtin_matrix("unknot").unwrap();
        let l = search_metabolizer_seq(&m, 1).expect("empty metabolizer");
        assert_eq!(l.rank(), 0);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn search_dispatch_agrees() {
        for (name, bound) in [("8_20", 2), ("evenq_example", 1), ("trefoil", 2)] {
            let m = builtin_matrix(name).unwrap();
            assert_eq!(
                search_metabolizer_seq(&m, bound),
                search_metabolizer_par(&m, bound),
                "{name}"
            );
        }
    }

    #[test]
    fn enumeration_is_primitive_and_deduplicated() {
        let all = enumerate_primitive_sublattices(3, 1, 1);
        for l in &all {
            assert_eq!(l.rank(), 1);
        }
        // Echelon representatives are distinct sublattices.
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                assert_ne!(a, b);
            }
        }
        // Lines in Z^3 with entries in [-1, 1]: 13 up to sign.
        assert_eq!(all.len(), 13);
    }

    #[test]
    fn hyperbolic_elementary_example() {
        let m = SeifertMatrix::new(mat(&[vec![0, 1], vec![0, 0]]), Epsilon::Minus).unwrap();
        let f = form_from_matrix(&m).unwrap();
        assert_eq!(*f.b(), mat(&[vec![0, 1], vec![-1, 0]]));
        assert_eq!(*f.t(), mat(&[vec![0, 0], vec![0, 1]]));
        let l1 = Sublattice::standard_span(2, &[0]).unwrap();
        let l2 = Sublattice::standard_span(2, &[1]).unwrap();
        assert_eq!(verify_hyperbolic_splitting(&f, &l1, &l2), Ok(true));
        // Swapped the pair still splits; doubled first factor does not span.
        assert_eq!(verify_hyperbolic_splitting(&f, &l2, &l1), Ok(true));
        assert_eq!(verify_hyperbolic_splitting(&f, &l1, &l1), Ok(false));
    }

    #[test]
    fn hyperbolic_rank_zero() {
        let f = form_from_matrix(&builtin_matrix("unknot").unwrap()).unwrap();
        let empty = Sublattice::new(IntMat::zeros(0, 0)).unwrap();
        assert_eq!(verify_hyperbolic_splitting(&f, &empty.clone(), &empty), Ok(true));
    }

    #[test]
    fn evenq_admits_no_small_hyperbolic_splitting() {
        let m = evenq();
        let f = form_from_matrix(&m).unwrap();
        // Any valid summand must be isotropic for b, so pre-filter the
        // bound-2 enumeration down to those before pairing.
        let isotropic: Vec<Sublattice> = enumerate_primitive_sublattices(4, 2, 2)
            .into_iter()
            .filter(|l| {
                let vs = (0..2).map(|j| l.basis_vector(j)).collect::<Vec<_>>();
                vs.iter().all(|x| vs.iter().all(|y| f.b().bilinear(x, y).is_zero()))
            })
            .collect();
        assert!(!isotropic.is_empty(), "b-isotropic planes exist; the lemma rules out pairings");
        for l1 in &isotropic {
            for l2 in &isotropic {
                assert_eq!(verify_hyperbolic_splitting(&f, l1, l2), Ok(false));
            }
        }
    }

    /// A skew elementary matrix with one off-diagonal entry.
    fn elementary(n: usize, i: usize, j: usize, v: i64) -> IntMat {
        let mut m = IntMat::identity(n);
        m.set(i, j, BigInt::from(v));
        m
    }

    fn unimodular_from(seed: &[(usize, usize, i64)], n: usize) -> IntMat {
        seed.iter().fold(IntMat::identity(n), |acc, &(i, j, v)| {
            acc.mul(&elementary(n, i % n, j % n, v))
        })
    }

    proptest! {
        /// Random admissible matrices for both signs: build psi with a
        /// prescribed unimodular pairing, then change basis.
        #[test]
        fn form_axioms_hold(
            sym in proptest::collection::vec(-2i64..=2, 6),
            ops in proptest::collection::vec((0usize..4, 0usize..4, -1i64..=1), 0..4),
            minus in proptest::bool::ANY,
        ) {
            let eps = if minus { Epsilon::Minus } else { Epsilon::Plus };
            let block = if minus {
                mat(&[vec![0, 1], vec![-1, 0]])
            } else {
                mat(&[vec![0, 1], vec![1, 0]])
            };
            let pairing = block.block_diag(&block);
            // Strict upper part of the pairing plus a matching lower fill:
            // psi + eps*psi^T reproduces the pairing for any such completion.
            let mut psi = IntMat::zeros(4, 4);
            let mut idx = 0;
            for i in 0..4 {
                for j in 0..4 {
                    if i < j {
                        psi.set(i, j, pairing.get(i, j) + BigInt::from(sym[idx % sym.len()]));
                        idx += 1;
                    } else if i > j {
                        // psi[i][j] = pairing[i][j] - eps*psi[j][i] = -eps*shift.
                        let shift = psi.get(j, i) - pairing.get(j, i);
                        let v = match eps {
                            Epsilon::Minus => shift,
                            Epsilon::Plus => -shift,
                        };
                        psi.set(i, j, v);
                    } else if eps == Epsilon::Minus {
                        // Skew pairings leave the diagonal free.
                        psi.set(i, i, BigInt::from(sym[(idx + i) % sym.len()]));
                    }
                }
            }
            let ops: Vec<(usize, usize, i64)> = ops.into_iter()
                .filter(|&(i, j, _)| i % 4 != j % 4)
                .collect();
            let u = unimodular_from(&ops, 4);
            let conjugated = u.transpose().mul(&psi).mul(&u);
            let m = SeifertMatrix::new(conjugated, eps).unwrap();
            prop_assert!(m.is_admissible());
            let f = form_from_matrix(&m).unwrap();
            let b = f.b();
            let t = f.t();
            let eps_b = match eps {
                Epsilon::Plus => b.clone(),
                Epsilon::Minus => b.neg(),
            };
            prop_assert_eq!(b.transpose(), eps_b);
            prop_assert_eq!(b.det().abs(), BigInt::one());
            prop_assert_eq!(b.mul(t), m.psi().clone());
            prop_assert_eq!(
                t.transpose().mul(b),
                b.mul(&IntMat::identity(4).sub(t))
            );
        }

        /// Hyperbolic splittings certify both summands as metabolizers, in
        /// any basis.
        #[test]
        fn hyperbolic_implies_metabolic(
            q_entries in proptest::collection::vec(-2i64..=2, 4),
            v_ops in proptest::collection::vec((0usize..2, 0usize..2, -1i64..=1), 0..3),
            w_ops in proptest::collection::vec((0usize..4, 0usize..4, -2i64..=2), 0..4),
            minus in proptest::bool::ANY,
        ) {
            let eps = if minus { Epsilon::Minus } else { Epsilon::Plus };
            let q = IntMat::from_fn(2, 2, |i, j| BigInt::from(q_entries[2 * i + j]));
            let v_ops: Vec<_> = v_ops.into_iter().filter(|&(i, j, _)| i != j).collect();
            let v = unimodular_from(&v_ops, 2);
            // p + eps*q^T = v keeps the pairing unimodular by construction.
            let p = match eps {
                Epsilon::Plus => v.sub(&q.transpose()),
                Epsilon::Minus => v.add(&q.transpose()),
            };
            // [[0, p], [q, 0]] splits hyperbolically along the two halves.
            let psi = IntMat::from_fn(4, 4, |i, j| {
                if i < 2 && j >= 2 {
                    p.get(i, j - 2).clone()
                } else if i >= 2 && j < 2 {
                    q.get(i - 2, j).clone()
                } else {
                    BigInt::zero()
                }
            });
            let w_ops: Vec<_> = w_ops.into_iter().filter(|&(i, j, _)| i % 4 != j % 4).collect();
            let w = unimodular_from(&w_ops, 4);
            let conjugated = w.transpose().mul(&psi).mul(&w);
            let m = SeifertMatrix::new(conjugated, eps).unwrap();
            let f = form_from_matrix(&m).unwrap();
            let w_inv = w.unimodular_inverse().unwrap();
            let half = |offset: usize| {
                IntMat::from_fn(4, 2, |i, j| w_inv.get(i, j + offset).clone())
            };
            let l1 = Sublattice::new(half(0)).unwrap();
            let l2 = Sublattice::new(half(2)).unwrap();
            prop_assert_eq!(verify_hyperbolic_splitting(&f, &l1, &l2), Ok(true));
            prop_assert_eq!(verify_metabolizer(&m, &l1), Ok(true));
            prop_assert_eq!(verify_metabolizer(&m, &l2), Ok(true));
        }
    }

    #[test]
    fn search_results_always_verify() {
        for name in ["8_20", "evenq_example"] {
            let m = builtin_matrix(name).unwrap();
            if let Some(l) = search_metabolizer_seq(&m, 2) {
                assert_eq!(verify_metabolizer(&m, &l), Ok(true), "{name}");
            } else {
                panic!("{name} has a bound-2 metabolizer");
            }
        }
    }

    #[test]
    fn toml_round_trip() {
        let m = eight_twenty();
        let text = m.to_toml_string("8_20").unwrap();
        let (name, back) = SeifertMatrix::from_toml_str(&text).unwrap();
        assert_eq!(name, "8_20");
        assert_eq!(back, m);

        let empty = builtin_matrix("unknot").unwrap();
        let text = empty.to_toml_string("unknot").unwrap();
        let (_, back) = SeifertMatrix::from_toml_str(&text).unwrap();
        assert_eq!(back.rank(), 0);
    }

    #[test]
    fn toml_rejects_bad_documents() {
        assert!(matches!(
            SeifertMatrix::from_toml_str("name = \"x\"\nepsilon = 2\nrows = []"),
            Err(SeifertError::InvalidEpsilon { .. })
        ));
        assert!(matches!(
            SeifertMatrix::from_toml_str("name = \"x\"\nepsilon = 1\nrows = [[1, 0], [2]]"),
            Err(SeifertError::NonSquare { .. })
        ));
        assert!(matches!(
            SeifertMatrix::from_toml_str("rows = [[0]]"),
            Err(SeifertError::Document(_))
        ));
    }

    #[test]
    fn epsilon_parsing() {
        assert_eq!("+1".parse::<Epsilon>().unwrap(), Epsilon::Plus);
        assert_eq!("1".parse::<Epsilon>().unwrap(), Epsilon::Plus);
        assert_eq!("-1".parse::<Epsilon>().unwrap(), Epsilon::Minus);
        assert!("0".parse::<Epsilon>().is_err());
        assert_eq!(Epsilon::Minus.to_string(), "-1");
    }
}
