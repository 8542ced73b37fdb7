//! Dense operators on truncated single- and two-mode Fock spaces.
//!
//! Each mode keeps the levels `0..n_max`. Composite spaces are ordered with
//! oscillator 1 as the left Kronecker factor, so the basis index of
//! `|n1, n2>` is `n1 * n2_max + n2`. Build two-mode ladder operators with
//! [`mode_annihilation`] instead of assembling tensors by hand.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerances a [`DensityMatrix`] must satisfy.
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;
pub const POSITIVITY_TOL: f64 = 1e-8;

/// Per-mode truncation sizes of a (possibly composite) Fock space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct FockDim {
    dims: Vec<usize>,
}

impl TryFrom<Vec<usize>> for FockDim {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<FockDim> for Vec<usize> {
    fn from(d: FockDim) -> Self {
        d.dims
    }
}

impl FockDim {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDimension("no modes".into()));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDimension(format!(
                "truncation {d} < 2"
            )));
        }
        Ok(Self { dims })
    }

    pub fn single(n_max: usize) -> Result<Self> {
        Self::new(vec![n_max])
    }

    pub fn two_mode(n1: usize, n2: usize) -> Result<Self> {
        Self::new(vec![n1, n2])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_modes(&self) -> usize {
        self.dims.len()
    }

    /// Total Hilbert-space dimension.
    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    fn concat(&self, other: &FockDim) -> FockDim {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        FockDim { dims }
    }

    /// Occupation numbers of each mode for a flat basis index.
    pub fn occupations(&self, mut index: usize) -> Vec<usize> {
        let mut occ = vec![0; self.dims.len()];
        for (slot, &d) in occ.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        occ
    }

    /// Flat basis index for the given per-mode occupations.
    pub fn index_of(&self, occupations: &[usize]) -> usize {
        occupations
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&n, &d)| acc * d + n)
    }
}

/// A complex matrix acting on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: FockDim,
    mat: DMatrix<C64>,
}

impl Operator {
    pub fn from_matrix(dim: FockDim, mat: DMatrix<C64>) -> Result<Self> {
        let n = dim.total();
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::InvalidDimension(format!(
                "matrix is {}x{}, Fock space has dimension {n}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { dim, mat })
    }

    pub fn zeros(dim: &FockDim) -> Self {
        let n = dim.total();
        Self { dim: dim.clone(), mat: DMatrix::zeros(n, n) }
    }

    pub fn identity(dim: &FockDim) -> Self {
        let n = dim.total();
        Self { dim: dim.clone(), mat: DMatrix::identity(n, n) }
    }

    pub fn dim(&self) -> &FockDim {
        &self.dim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn size(&self) -> usize {
        self.mat.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    fn check_dim(&self, other: &Operator) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim.dims.clone(),
                right: other.dim.dims.clone(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.check_dim(other)?;
        Ok(Self { dim: self.dim.clone(), mat: &self.mat + &other.mat })
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.check_dim(other)?;
        Ok(Self { dim: self.dim.clone(), mat: &self.mat - &other.mat })
    }

    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.check_dim(other)?;
        Ok(Self { dim: self.dim.clone(), mat: &self.mat * &other.mat })
    }

    pub fn scale(&self, factor: C64) -> Operator {
        Self { dim: self.dim.clone(), mat: &self.mat * factor }
    }

    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.size();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                worst = worst.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Nonzero entries as `(row, col, value)`.
    pub fn nonzeros(&self) -> Vec<(usize, usize, C64)> {
        let n = self.size();
        let mut out = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let v = self.mat[(i, j)];
                if v.re != 0.0 || v.im != 0.0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

/// Single-mode lowering operator with `(m, m+1)` entry `sqrt(m+1)`.
pub fn annihilation(n_max: usize) -> Result<Operator> {
    let dim = FockDim::single(n_max)?;
    let mut mat = DMatrix::zeros(n_max, n_max);
    for m in 0..n_max - 1 {
        mat[(m, m + 1)] = C64::new(((m + 1) as f64).sqrt(), 0.0);
    }
    Ok(Operator { dim, mat })
}

pub fn creation(n_max: usize) -> Result<Operator> {
    Ok(dagger(&annihilation(n_max)?))
}

/// Single-mode number operator `diag(0, 1, ..., n_max-1)`.
pub fn number(n_max: usize) -> Result<Operator> {
    let dim = FockDim::single(n_max)?;
    let mat = DMatrix::from_fn(n_max, n_max, |i, j| {
        if i == j { C64::new(i as f64, 0.0) } else { C64::new(0.0, 0.0) }
    });
    Ok(Operator { dim, mat })
}

/// Conjugate transpose.
pub fn dagger(op: &Operator) -> Operator {
    Operator { dim: op.dim.clone(), mat: op.mat.adjoint() }
}

/// Kronecker product; `left` acts on the leading modes of the result.
pub fn tensor(left: &Operator, right: &Operator) -> Operator {
    Operator { dim: left.dim.concat(&right.dim), mat: left.mat.kronecker(&right.mat) }
}

/// Lowering operator of `mode` embedded in the composite space `dim`.
pub fn mode_annihilation(dim: &FockDim, mode: usize) -> Result<Operator> {
    embed(dim, mode, &annihilation(*dim.dims.get(mode).ok_or_else(|| {
        Error::InvalidDimension(format!("mode {mode} out of range for {:?}", dim.dims))
    })?)?)
}

/// Embed a single-mode operator as `1 ⊗ .. ⊗ op ⊗ .. ⊗ 1`.
pub fn embed(dim: &FockDim, mode: usize, op: &Operator) -> Result<Operator> {
    if mode >= dim.n_modes() || op.dim.dims != [dim.dims[mode]] {
        return Err(Error::InvalidDimension(format!(
            "cannot embed {:?} as mode {mode} of {:?}",
            op.dim.dims, dim.dims
        )));
    }
    let mut acc: Option<Operator> = None;
    for (k, &d) in dim.dims.iter().enumerate() {
        let factor = if k == mode {
            op.clone()
        } else {
            Operator::identity(&FockDim { dims: vec![d] })
        };
        acc = Some(match acc {
            None => factor,
            Some(a) => tensor(&a, &factor),
        });
    }
    Ok(acc.expect("at least one mode"))
}

/// Total photon-number parity `(-1)^(n1 + n2 + ...)`.
pub fn parity(dim: &FockDim) -> Operator {
    let n = dim.total();
    let mat = DMatrix::from_fn(n, n, |i, j| {
        if i != j {
            return C64::new(0.0, 0.0);
        }
        let total: usize = dim.occupations(i).iter().sum();
        C64::new(if total % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
    });
    Operator { dim: dim.clone(), mat }
}

/// `Tr[obs · rho]`.
pub fn expectation(state: &DensityMatrix, obs: &Operator) -> Result<C64> {
    state.op.check_dim(obs)?;
    let (r, o) = (&state.op.mat, &obs.mat);
    let n = r.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += o[(i, k)] * r[(k, i)];
        }
    }
    Ok(acc)
}

/// A Hermitian, unit-trace, positive-semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    /// Validate all density-matrix invariants.
    pub fn new(op: Operator) -> Result<Self> {
        let herm = op.hermiticity_error();
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!("not Hermitian: {herm:.3e}")));
        }
        let tr = op.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min_ev = min_eigenvalue(&op);
        if min_ev < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_ev:.3e}")));
        }
        Ok(Self { op })
    }

    /// Pure state `|psi><psi|`, normalized.
    pub fn from_pure(dim: &FockDim, amplitudes: &[C64]) -> Result<Self> {
        if amplitudes.len() != dim.total() {
            return Err(Error::InvalidDimension(format!(
                "{} amplitudes for dimension {}",
                amplitudes.len(),
                dim.total()
            )));
        }
        let v = DVector::from_column_slice(amplitudes);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v = v / C64::new(norm, 0.0);
        Self::new(Operator { dim: dim.clone(), mat: &v * v.adjoint() })
    }

    /// Fock basis state with the given per-mode occupations.
    pub fn fock(dim: &FockDim, occupations: &[usize]) -> Result<Self> {
        if occupations.len() != dim.n_modes()
            || occupations.iter().zip(dim.dims()).any(|(&n, &d)| n >= d)
        {
            return Err(Error::InvalidDimension(format!(
                "occupations {occupations:?} outside {:?}",
                dim.dims()
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim.total()];
        amps[dim.index_of(occupations)] = C64::new(1.0, 0.0);
        Self::from_pure(dim, &amps)
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn dim(&self) -> &FockDim {
        &self.op.dim
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.op)
    }
}

fn hermitian_eigenvalues(op: &Operator) -> Vec<f64> {
    let sym = (&op.mat + op.mat.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Smallest eigenvalue of the Hermitian part of `op`.
pub fn min_eigenvalue(op: &Operator) -> f64 {
    hermitian_eigenvalues(op).first().copied().unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn annihilation_two_levels() {
        let a = annihilation(2).unwrap();
        assert_eq!(a.get(0, 1), c(1.0, 0.0));
        assert_eq!(a.get(0, 0), c(0.0, 0.0));
        assert_eq!(a.get(1, 0), c(0.0, 0.0));
        assert_eq!(a.get(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn annihilation_sqrt_entries() {
        let a = annihilation(3).unwrap();
        assert!((a.get(1, 2).re - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn number_from_ladder() {
        let a = annihilation(4).unwrap();
        let n = dagger(&a).mul(&a).unwrap();
        assert!(n.max_abs_diff(&number(4).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn rejects_small_truncation() {
        assert!(matches!(annihilation(1), Err(Error::InvalidDimension(_))));
        assert!(FockDim::new(vec![3, 1]).is_err());
        assert!(FockDim::new(vec![]).is_err());
    }

    #[test]
    fn dagger_examples() {
        let ad = dagger(&annihilation(2).unwrap());
        assert_eq!(ad.get(1, 0), c(1.0, 0.0));
        assert_eq!(ad.get(0, 1), c(0.0, 0.0));

        let n = number(3).unwrap();
        assert_eq!(dagger(&n), n);

        let dim = FockDim::single(2).unwrap();
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let d = dagger(&Operator::from_matrix(dim, m).unwrap());
        assert_eq!(d.get(1, 0), c(0.0, -1.0));
        assert_eq!(d.get(0, 1), c(0.0, 0.0));
    }

    #[test]
    fn tensor_identities() {
        let i2 = Operator::identity(&FockDim::single(2).unwrap());
        let i3 = Operator::identity(&FockDim::single(3).unwrap());
        let i6 = tensor(&i2, &i3);
        assert_eq!(i6.matrix(), &DMatrix::<C64>::identity(6, 6));
        assert_eq!(i6.dim().dims(), &[2, 3]);

        // <n1=0, n2=0| a1 |n1=1, n2=0>
        let a1 = tensor(&annihilation(2).unwrap(), &i2);
        let dim = a1.dim().clone();
        let row = dim.index_of(&[0, 0]);
        let col = dim.index_of(&[1, 0]);
        assert_eq!(a1.get(row, col), c(1.0, 0.0));
        assert_eq!(mode_annihilation(&dim, 0).unwrap(), a1);
    }

    #[test]
    fn mismatched_dims_refuse_to_combine() {
        let a = annihilation(3).unwrap();
        let b = annihilation(4).unwrap();
        assert!(matches!(a.add(&b), Err(Error::DimensionMismatch { .. })));
        let rho = DensityMatrix::fock(&FockDim::single(4).unwrap(), &[0]).unwrap();
        assert!(expectation(&rho, &a).is_err());
    }

    #[test]
    fn fock_expectations() {
        let dim = FockDim::single(4).unwrap();
        let one = DensityMatrix::fock(&dim, &[1]).unwrap();
        let n = number(4).unwrap();
        assert!((expectation(&one, &n).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let vac = DensityMatrix::fock(&dim, &[0]).unwrap();
        assert_eq!(expectation(&vac, &annihilation(4).unwrap()).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn density_matrix_validation() {
        let dim = FockDim::single(2).unwrap();
        let bad_trace = Operator::identity(&dim);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let negative = Operator::from_matrix(
            dim.clone(),
            DMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]),
        )
        .unwrap();
        assert!(DensityMatrix::new(negative).is_err());
        let non_herm = Operator::from_matrix(
            dim,
            DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.5, 0.0)]),
        )
        .unwrap();
        assert!(DensityMatrix::new(non_herm).is_err());
    }

    #[test]
    fn occupations_round_trip() {
        let dim = FockDim::two_mode(3, 5).unwrap();
        for i in 0..dim.total() {
            assert_eq!(dim.index_of(&dim.occupations(i)), i);
        }
        assert_eq!(dim.occupations(7), vec![1, 2]);
    }

    #[test]
    fn parity_signs() {
        let dim = FockDim::two_mode(2, 2).unwrap();
        let p = parity(&dim);
        let diag: Vec<f64> = (0..4).map(|i| p.get(i, i).re).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
    }
}
