//! Exact sparse linear algebra over a field, plus graded chain complexes.
//!
//! Everything here is exact: the two coefficient fields in use are the
//! rationals (arbitrary precision) and F2. No floating point anywhere.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Coefficient field for sparse elimination.
pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn inv(&self) -> Self;

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
}

/// Rationals with big integer numerator/denominator.
pub type Q = BigRational;

impl Field for Q {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn is_zero(&self) -> bool {
        <BigRational as Zero>::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn inv(&self) -> Self {
        assert!(!<BigRational as Zero>::is_zero(self), "division by zero");
        self.recip()
    }
}

/// The two-element field.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct F2(pub bool);

impl Field for F2 {
    fn zero() -> Self {
        F2(false)
    }
    fn one() -> Self {
        F2(true)
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
    fn add(&self, rhs: &Self) -> Self {
        F2(self.0 ^ rhs.0)
    }
    fn neg(&self) -> Self {
        *self
    }
    fn mul(&self, rhs: &Self) -> Self {
        F2(self.0 & rhs.0)
    }
    fn inv(&self) -> Self {
        assert!(self.0, "division by zero in F2");
        *self
    }
}

/// Sparse matrix stored row-major; column indices kept sorted per row.
#[derive(Clone, Debug)]
pub struct SparseMatrix<F: Field> {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<(usize, F)>>,
}

/// Below this size elimination just runs on a dense copy.
const DENSE_CUTOFF: usize = 64;

impl<F: Field> SparseMatrix<F> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: vec![Vec::new(); rows] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.iter().map(Vec::len).sum()
    }

    pub fn set(&mut self, r: usize, c: usize, v: F) {
        assert!(r < self.rows && c < self.cols, "entry out of bounds");
        let row = &mut self.entries[r];
        match row.binary_search_by_key(&c, |(j, _)| *j) {
            Ok(k) => {
                if v.is_zero() {
                    row.remove(k);
                } else {
                    row[k].1 = v;
                }
            }
            Err(k) => {
                if !v.is_zero() {
                    row.insert(k, (c, v));
                }
            }
        }
    }

    pub fn get(&self, r: usize, c: usize) -> F {
        match self.entries[r].binary_search_by_key(&c, |(j, _)| *j) {
            Ok(k) => self.entries[r][k].1.clone(),
            Err(_) => F::zero(),
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &F) {
        let cur = self.get(r, c);
        self.set(r, c, cur.add(v));
    }

    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, F)]) -> Self {
        let mut m = Self::zero(rows, cols);
        for (r, c, v) in triplets {
            m.add_to(*r, *c, v);
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.cols, self.rows);
        for (r, row) in self.entries.iter().enumerate() {
            for (c, v) in row {
                t.entries[*c].push((r, v.clone()));
            }
        }
        // rows were visited in order, so each transposed row is already sorted
        t
    }

    /// y = M x for a dense vector x.
    pub fn apply(&self, x: &[F]) -> Vec<F> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![F::zero(); self.rows];
        for (r, row) in self.entries.iter().enumerate() {
            let mut acc = F::zero();
            for (c, v) in row {
                if !x[*c].is_zero() {
                    acc = acc.add(&v.mul(&x[*c]));
                }
            }
            y[r] = acc;
        }
        y
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "composition shape mismatch");
        let mut out = Self::zero(self.rows, rhs.cols);
        for (r, row) in self.entries.iter().enumerate() {
            let mut acc: BTreeMap<usize, F> = BTreeMap::new();
            for (k, v) in row {
                for (c, w) in &rhs.entries[*k] {
                    let term = v.mul(w);
                    let slot = acc.entry(*c).or_insert_with(F::zero);
                    *slot = slot.add(&term);
                }
            }
            out.entries[r] = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        }
        out
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.entries.iter().all(Vec::is_empty)
    }

    /// Exact rank by Gaussian elimination. Small matrices go through a dense
    /// sweep; larger ones use sparse elimination with a Markowitz-style pivot
    /// choice (minimize fill estimate (r-1)(c-1) among candidate entries).
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        if self.rows < DENSE_CUTOFF && self.cols < DENSE_CUTOFF {
            return self.rank_dense();
        }
        self.rank_sparse()
    }

    fn rank_dense(&self) -> usize {
        let mut m: Vec<Vec<F>> = vec![vec![F::zero(); self.cols]; self.rows];
        for (r, row) in self.entries.iter().enumerate() {
            for (c, v) in row {
                m[r][*c] = v.clone();
            }
        }
        let mut rank = 0;
        let mut row_cursor = 0;
        for col in 0..self.cols {
            let Some(pr) = (row_cursor..self.rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(row_cursor, pr);
            let inv = m[row_cursor][col].inv();
            for r in (row_cursor + 1)..self.rows {
                if m[r][col].is_zero() {
                    continue;
                }
                let factor = m[r][col].mul(&inv);
                for c in col..self.cols {
                    let t = m[row_cursor][c].mul(&factor);
                    m[r][c] = m[r][c].sub(&t);
                }
            }
            row_cursor += 1;
            rank += 1;
            if row_cursor == self.rows {
                break;
            }
        }
        rank
    }

    fn rank_sparse(&self) -> usize {
        // rows as maps for cheap random access during elimination
        let mut rows: Vec<BTreeMap<usize, F>> = self
            .entries
            .iter()
            .map(|row| row.iter().cloned().collect())
            .collect();
        let mut col_count: Vec<usize> = vec![0; self.cols];
        for row in &rows {
            for c in row.keys() {
                col_count[*c] += 1;
            }
        }
        let mut live: Vec<bool> = rows.iter().map(|r| !r.is_empty()).collect();
        let mut rank = 0;
        loop {
            // Markowitz: among a bounded sample of the shortest live rows, pick
            // the entry minimizing (row_len - 1) * (col_count - 1).
            let mut candidates: Vec<usize> =
                (0..rows.len()).filter(|&r| live[r] && !rows[r].is_empty()).collect();
            if candidates.is_empty() {
                break;
            }
            candidates.sort_by_key(|&r| rows[r].len());
            candidates.truncate(8);
            let mut best: Option<(usize, usize, usize)> = None; // (score, row, col)
            for &r in &candidates {
                for (c, _) in rows[r].iter() {
                    let score = (rows[r].len() - 1) * col_count[*c].saturating_sub(1);
                    if best.as_ref().map_or(true, |b| score < b.0) {
                        best = Some((score, r, *c));
                    }
                }
            }
            let (_, pr, pc) = best.unwrap();
            rank += 1;
            let pivot_row = std::mem::take(&mut rows[pr]);
            live[pr] = false;
            for c in pivot_row.keys() {
                col_count[*c] -= 1;
            }
            let pinv = pivot_row[&pc].inv();
            for r in 0..rows.len() {
                if !live[r] {
                    continue;
                }
                let Some(lead) = rows[r].get(&pc).cloned() else { continue };
                let factor = lead.mul(&pinv);
                for (c, v) in &pivot_row {
                    let delta = v.mul(&factor);
                    match rows[r].get(c).cloned() {
                        Some(old) => {
                            let new = old.sub(&delta);
                            if new.is_zero() {
                                rows[r].remove(c);
                                col_count[*c] -= 1;
                            } else {
                                rows[r].insert(*c, new);
                            }
                        }
                        None => {
                            if !delta.is_zero() {
                                rows[r].insert(*c, delta.neg());
                                col_count[*c] += 1;
                            }
                        }
                    }
                }
                debug_assert!(rows[r].get(&pc).is_none());
                if rows[r].is_empty() {
                    live[r] = false;
                }
            }
        }
        rank
    }
}

/// Integer multidegree used to index chain groups.
pub type Grading = Vec<i32>;

/// A finitely supported chain complex graded by integer tuples.
///
/// `shift` is the degree of the differential: the map stored at grading `g`
/// goes from the chain group at `g` to the one at `g + shift`. Gradings not
/// present have zero chain group.
#[derive(Clone, Debug)]
pub struct GradedChainComplex<F: Field> {
    shift: Grading,
    dims: BTreeMap<Grading, usize>,
    diffs: BTreeMap<Grading, SparseMatrix<F>>,
}

#[derive(Debug, thiserror::Error)]
pub enum ComplexError {
    #[error("differential at {0:?} has shape {1}x{2}, expected {3}x{4}")]
    Shape(Grading, usize, usize, usize, usize),
    #[error("d² != 0 from grading {0:?}")]
    SquareNonzero(Grading),
}

impl<F: Field> GradedChainComplex<F> {
    pub fn new(shift: Grading) -> Self {
        GradedChainComplex { shift, dims: BTreeMap::new(), diffs: BTreeMap::new() }
    }

    pub fn shift(&self) -> &Grading {
        &self.shift
    }

    pub fn set_dim(&mut self, g: Grading, dim: usize) {
        if dim == 0 {
            self.dims.remove(&g);
        } else {
            self.dims.insert(g, dim);
        }
    }

    pub fn dim(&self, g: &Grading) -> usize {
        self.dims.get(g).copied().unwrap_or(0)
    }

    pub fn gradings(&self) -> impl Iterator<Item = &Grading> {
        self.dims.keys()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    fn shifted(&self, g: &Grading) -> Grading {
        g.iter().zip(&self.shift).map(|(a, b)| a + b).collect()
    }

    fn unshifted(&self, g: &Grading) -> Grading {
        g.iter().zip(&self.shift).map(|(a, b)| a - b).collect()
    }

    /// Install the differential leaving grading `g`. Rows index the target
    /// group at `g + shift`, columns index the source group at `g`.
    pub fn set_diff(&mut self, g: Grading, m: SparseMatrix<F>) {
        if m.is_zero_matrix() {
            self.diffs.remove(&g);
        } else {
            self.diffs.insert(g, m);
        }
    }

    pub fn diff(&self, g: &Grading) -> Option<&SparseMatrix<F>> {
        self.diffs.get(g)
    }

    /// Shape sanity plus d∘d == 0 wherever two differentials compose.
    pub fn verify_complex(&self) -> Result<(), ComplexError> {
        for (g, m) in &self.diffs {
            let tgt = self.shifted(g);
            let (want_r, want_c) = (self.dim(&tgt), self.dim(g));
            if m.rows() != want_r || m.cols() != want_c {
                return Err(ComplexError::Shape(g.clone(), m.rows(), m.cols(), want_r, want_c));
            }
        }
        for (g, m) in &self.diffs {
            let tgt = self.shifted(g);
            if let Some(m2) = self.diffs.get(&tgt) {
                if !m2.compose(m).is_zero_matrix() {
                    return Err(ComplexError::SquareNonzero(g.clone()));
                }
            }
        }
        Ok(())
    }

    /// Dimension of homology at every grading with a nonzero chain group:
    /// dim ker(d out) - rank(d in).
    pub fn homology_dims(&self) -> BTreeMap<Grading, usize> {
        let mut out = BTreeMap::new();
        for (g, &n) in &self.dims {
            let rank_out = self.diffs.get(g).map_or(0, SparseMatrix::rank);
            let prev = self.unshifted(g);
            let rank_in = self.diffs.get(&prev).map_or(0, SparseMatrix::rank);
            let h = n - rank_out - rank_in;
            if h > 0 {
                out.insert(g.clone(), h);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;
    use proptest::prelude::*;

    fn q(n: i64) -> Q {
        Q::from_i64(n).unwrap()
    }

    #[test]
    fn rank_zero_matrix() {
        let m: SparseMatrix<Q> = SparseMatrix::zero(7, 5);
        assert_eq!(m.rank(), 0);
    }

    #[test]
    fn rank_identity() {
        let mut m: SparseMatrix<Q> = SparseMatrix::zero(5, 5);
        for i in 0..5 {
            m.set(i, i, q(1));
        }
        assert_eq!(m.rank(), 5);
    }

    #[test]
    fn rank_all_ones_is_one() {
        let mut m: SparseMatrix<Q> = SparseMatrix::zero(3, 3);
        for r in 0..3 {
            for c in 0..3 {
                m.set(r, c, q(1));
            }
        }
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn rank_exact_rationals_no_drift() {
        // A matrix whose elimination forces nontrivial fractions.
        let mut m: SparseMatrix<Q> = SparseMatrix::zero(3, 3);
        let vals = [[2, 3, 5], [7, 11, 13], [17, 19, 23]];
        for r in 0..3 {
            for c in 0..3 {
                m.set(r, c, q(vals[r][c]));
            }
        }
        assert_eq!(m.rank(), 3);
        // make one row a rational combination of the others
        let mut s: SparseMatrix<Q> = SparseMatrix::zero(3, 3);
        for c in 0..3 {
            s.set(0, c, q(vals[0][c]));
            s.set(1, c, q(vals[1][c]));
            let combo = q(vals[0][c]) * q(1) / q(3) + q(vals[1][c]) * q(5) / q(7);
            s.set(2, c, combo);
        }
        assert_eq!(s.rank(), 2);
    }

    #[test]
    fn rank_f2() {
        let mut m: SparseMatrix<F2> = SparseMatrix::zero(3, 3);
        // rows: 110, 011, 101 -> third = first + second over F2
        m.set(0, 0, F2(true));
        m.set(0, 1, F2(true));
        m.set(1, 1, F2(true));
        m.set(1, 2, F2(true));
        m.set(2, 0, F2(true));
        m.set(2, 2, F2(true));
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn sparse_path_matches_dense_path() {
        // large enough to avoid the dense cutoff
        let n = 80;
        let mut m: SparseMatrix<Q> = SparseMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, q(1));
            if i + 1 < n {
                m.set(i, i + 1, q(1));
            }
        }
        // duplicate one row to knock the rank down deterministically
        let row = 17;
        for c in 0..n {
            let v = m.get(40, c);
            m.set(row, c, v);
        }
        assert_eq!(m.rank(), n - 1);
    }

    #[test]
    fn two_step_complex_homology() {
        // 0 -> Q --(1)--> Q -> 0 at gradings [0] and [1]: acyclic.
        let mut c: GradedChainComplex<Q> = GradedChainComplex::new(vec![1]);
        c.set_dim(vec![0], 1);
        c.set_dim(vec![1], 1);
        let mut d = SparseMatrix::zero(1, 1);
        d.set(0, 0, q(1));
        c.set_diff(vec![0], d);
        c.verify_complex().unwrap();
        assert!(c.homology_dims().is_empty());
    }

    #[test]
    fn complex_detects_bad_square() {
        let mut c: GradedChainComplex<Q> = GradedChainComplex::new(vec![1]);
        for g in 0..3 {
            c.set_dim(vec![g], 1);
        }
        let mut d = SparseMatrix::zero(1, 1);
        d.set(0, 0, q(1));
        c.set_diff(vec![0], d.clone());
        c.set_diff(vec![1], d);
        assert!(matches!(c.verify_complex(), Err(ComplexError::SquareNonzero(_))));
    }

    proptest! {
        #[test]
        fn rank_equals_transpose_rank(seed in proptest::collection::vec(0u8..=2, 1..120), rows in 1usize..12, cols in 1usize..12) {
            let mut m: SparseMatrix<Q> = SparseMatrix::zero(rows, cols);
            for (k, v) in seed.iter().enumerate() {
                let r = k % rows;
                let c = (k / rows) % cols;
                let val = match v { 0 => 0i64, 1 => 1, _ => -1 };
                if val != 0 {
                    m.set(r, c, q(val));
                }
            }
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }
    }
}
