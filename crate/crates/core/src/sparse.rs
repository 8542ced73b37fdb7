//! Compressed sparse matrices and a thin wrapper over faer's sparse LU.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::traits::ComplexField;
use faer::MatMut;
use std::ops::{Add, AddAssign, Mul, MulAssign};

use crate::fock::C64;

/// Entry type of a [`SparseMatrix`]: `f64` or [`C64`].
pub trait Scalar:
    ComplexField
    + Copy
    + PartialEq
    + std::fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Mul<Output = Self>
    + AddAssign
    + MulAssign
{
    const ZERO: Self;
    const ONE: Self;
    fn modulus(self) -> f64;
    fn modulus_sqr(self) -> f64;
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn modulus_sqr(self) -> f64 {
        self * self
    }
}

impl Scalar for C64 {
    const ZERO: Self = C64::new(0.0, 0.0);
    const ONE: Self = C64::new(1.0, 0.0);
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn modulus_sqr(self) -> f64 {
        self.norm_sqr()
    }
}

/// Square sparse matrix in compressed-row form. Duplicate entries are summed
/// and exact zeros are dropped on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T = C64> {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> SparseMatrix<T> {
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, T)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<T> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            debug_assert!(r < n && c < n);
            if last == Some((r, c)) {
                *values.last_mut().expect("entry exists") += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        let mut m = Self { n, row_ptr, col_idx, values };
        m.prune();
        m
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, row_ptr: vec![0; n + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    fn prune(&mut self) {
        if self.values.iter().all(|v| *v != T::ZERO) {
            return;
        }
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut col_idx = Vec::with_capacity(self.col_idx.len());
        let mut values = Vec::with_capacity(self.values.len());
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.values[k] != T::ZERO {
                    col_idx.push(self.col_idx[k]);
                    values.push(self.values[k]);
                }
            }
            row_ptr[r + 1] = values.len();
        }
        self.row_ptr = row_ptr;
        self.col_idx = col_idx;
        self.values = values;
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.col_idx[range.clone()].binary_search(&col) {
            Ok(k) => self.values[range.start + k],
            Err(_) => T::ZERO,
        }
    }

    /// Iterate over stored `(row, col, value)` entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    pub fn triplets(&self) -> Vec<(usize, usize, T)> {
        self.iter().collect()
    }

    /// `y = A x`
    pub fn matvec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = T::ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *out = acc;
        }
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::ZERO; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v.modulus_sqr()).sum::<f64>().sqrt()
    }

    /// Max absolute row sum, an upper bound on the spectral radius.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|r| self.values[self.row_ptr[r]..self.row_ptr[r + 1]].iter().map(|v| v.modulus()).sum())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: T) -> Self {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= factor);
        m.prune();
        m
    }

    /// `alpha * I + beta * A`, keeping every diagonal slot structurally present.
    pub fn affine(&self, alpha: T, beta: T) -> Self {
        let mut trip: Vec<_> = self.iter().map(|(r, c, v)| (r, c, beta * v)).collect();
        trip.extend((0..self.n).map(|i| (i, i, alpha)));
        let mut m = Self::from_triplets_keep_zeros(self.n, trip);
        m.ensure_diagonal();
        m
    }

    fn from_triplets_keep_zeros(n: usize, mut triplets: Vec<(usize, usize, T)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<T> = Vec::with_capacity(triplets.len());
        let mut last = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().expect("entry exists") += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self { n, row_ptr, col_idx, values }
    }

    fn ensure_diagonal(&mut self) {
        debug_assert!((0..self.n).all(|i| {
            self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]].binary_search(&i).is_ok()
        }));
    }

    /// Replace row `row` by the given entries.
    pub fn with_row_replaced(&self, row: usize, entries: &[(usize, T)]) -> Self {
        let mut trip: Vec<_> = self.iter().filter(|&(r, _, _)| r != row).collect();
        trip.extend(entries.iter().map(|&(c, v)| (row, c, v)));
        Self::from_triplets(self.n, trip)
    }

    /// Compressed-column arrays (col_ptr, row_idx, values) for factorization.
    fn to_csc(&self) -> (Vec<usize>, Vec<usize>, Vec<T>) {
        let mut counts = vec![0usize; self.n + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for c in 0..self.n {
            counts[c + 1] += counts[c];
        }
        let col_ptr = counts.clone();
        let mut next = counts;
        let mut row_idx = vec![0usize; self.nnz()];
        let mut values = vec![T::ZERO; self.nnz()];
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k];
                let slot = next[c];
                row_idx[slot] = r;
                values[slot] = self.values[k];
                next[c] += 1;
            }
        }
        (col_ptr, row_idx, values)
    }
}

/// Failure modes of the sparse factorization.
#[derive(Debug, Clone, PartialEq)]
pub enum FactorError {
    StructurallySingular,
    Numerical(String),
}

/// Sparse LU factorization with row pivoting.
pub struct SparseLu<T: Scalar = C64> {
    n: usize,
    lu: Lu<usize, T>,
}

impl<T: Scalar> SparseLu<T> {
    pub fn factor(a: &SparseMatrix<T>) -> Result<Self, FactorError> {
        let pattern = LuPattern::analyze(a)?;
        pattern.factor(a)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solve `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [T]) {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        self.lu.solve_in_place(MatMut::from_column_major_slice_mut(b, n, 1));
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Reusable symbolic analysis for matrices sharing one sparsity pattern.
#[derive(Clone)]
pub struct LuPattern {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    symbolic: SymbolicLu<usize>,
}

impl LuPattern {
    pub fn analyze<T: Scalar>(a: &SparseMatrix<T>) -> Result<Self, FactorError> {
        let (col_ptr, row_idx, _) = a.to_csc();
        let sym = SymbolicSparseColMatRef::new_checked(a.n, a.n, &col_ptr, None, &row_idx);
        let symbolic =
            SymbolicLu::try_new(sym).map_err(|e| FactorError::Numerical(format!("{e:?}")))?;
        Ok(Self { n: a.n, col_ptr, row_idx, symbolic })
    }

    /// Numeric factorization of a matrix with exactly the analyzed pattern.
    pub fn factor<T: Scalar>(&self, a: &SparseMatrix<T>) -> Result<SparseLu<T>, FactorError> {
        let (col_ptr, row_idx, values) = a.to_csc();
        if col_ptr != self.col_ptr || row_idx != self.row_idx {
            return Err(FactorError::Numerical("sparsity pattern changed".into()));
        }
        let sym = SymbolicSparseColMatRef::new_checked(self.n, self.n, &self.col_ptr, None, &self.row_idx);
        let mat = SparseColMatRef::new(sym, &values);
        let lu = Lu::try_new_with_symbolic(self.symbolic.clone(), mat).map_err(|e| match e {
            faer::sparse::linalg::LuError::SymbolicSingular { .. } => FactorError::StructurallySingular,
            other => FactorError::Numerical(format!("{other:?}")),
        })?;
        Ok(SparseLu { n: self.n, lu })
    }
}

pub fn norm2<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(|z| z.modulus_sqr()).sum::<f64>().sqrt()
}
