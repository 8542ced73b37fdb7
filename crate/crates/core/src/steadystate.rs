//! Stationary states of a Liouvillian.
//!
//! The primary path replaces the row of `L` belonging to the `(0, 0)` matrix
//! element with the trace functional and solves the bordered system with a
//! sparse LU factorization. Shifted inverse iteration on `L` serves as the
//! fallback and as an independent cross-check.
//!
//! Both paths work on an exactly reduced problem. Only the block of `L`
//! containing the diagonal matrix elements is kept; the stationary state is
//! Hermitian, so that block is rewritten as a real system in the real and
//! imaginary parts of one representative per conjugate pair; when the two
//! oscillators are interchangeable, mode-swapped elements are identified as
//! well. Uncoupled oscillators are solved one at a time and recombined as a
//! product state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{min_eigenvalue, tensor, DensityMatrix, Operator, C64, POSITIVITY_TOL};
use crate::liouvillian::{build_liouvillian, devectorize, vectorize, Liouvillian, Subspace};
use crate::sparse::{norm2, FactorError, SparseLu, SparseMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Bound on `||L x|| / (||L||_F ||x||)`.
    pub residual_tol: f64,
    /// Maximum Frobenius distance between the two solver paths.
    pub agreement_tol: f64,
    /// Run both solver paths and record their distance.
    pub cross_check: bool,
    /// Shift relative to `||L||_inf` used by inverse iteration.
    pub relative_shift: f64,
    pub max_inverse_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-8,
            agreement_tol: 1e-6,
            cross_check: false,
            relative_shift: 1e-8,
            max_inverse_iterations: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverMethod {
    BorderedLu,
    InverseIteration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverInfo {
    pub method: SolverMethod,
    /// `||L x|| / (||L||_F ||x||)` of the returned state.
    pub relative_residual: f64,
    /// Inverse-iteration steps, when that path ran.
    pub inverse_iterations: Option<usize>,
    /// Frobenius distance between the two paths when cross-checked.
    pub cross_method_difference: Option<f64>,
    pub superoperator_nnz: usize,
    /// Real unknowns of the reduced linear system(s) actually solved.
    pub unknowns: usize,
    /// Solved as a product of independent single-oscillator states.
    pub separable: bool,
}

#[derive(Debug, Clone)]
pub struct SteadyStateResult {
    pub rho: DensityMatrix,
    /// `||L vec(rho)||_2`.
    pub residual: f64,
    pub solver_info: SolverInfo,
}

pub fn solve_steady_state(liouvillian: &Liouvillian) -> Result<SteadyStateResult> {
    solve_steady_state_with(liouvillian, &SolverOptions::default())
}

pub fn solve_steady_state_with(
    liouvillian: &Liouvillian,
    opts: &SolverOptions,
) -> Result<SteadyStateResult> {
    if liouvillian.matrix().frobenius_norm() == 0.0 {
        return Err(Error::DegenerateSteadyState("Liouvillian is identically zero".into()));
    }
    match liouvillian.spec() {
        Some(spec) if spec.is_separable() => {
            let mut factors = Vec::with_capacity(2);
            for mode in 0..2 {
                let part = build_liouvillian(&spec.mode_factor(mode)?)?;
                factors.push(solve_reduced(&part, opts)?);
            }
            let (a, b) = (&factors[0], &factors[1]);
            let rho = tensor(a.0.operator(), b.0.operator());
            let info = SolverInfo {
                method: a.1.method,
                relative_residual: 0.0,
                inverse_iterations: match (a.1.inverse_iterations, b.1.inverse_iterations) {
                    (None, None) => None,
                    (x, y) => Some(x.unwrap_or(0).max(y.unwrap_or(0))),
                },
                // ||A⊗B - A'⊗B'||_F <= ||A - A'||_F + ||B - B'||_F for states.
                cross_method_difference: a.1.cross_method_difference.zip(b.1.cross_method_difference).map(|(x, y)| x + y),
                superoperator_nnz: 0,
                unknowns: a.1.unknowns + b.1.unknowns,
                separable: true,
            };
            accept(liouvillian, rho, info, opts)
        }
        _ => {
            let (rho, info) = solve_reduced(liouvillian, opts)?;
            accept(liouvillian, rho.into_operator(), info, opts)
        }
    }
}

/// Final residual and positivity checks against the full generator.
fn accept(liouvillian: &Liouvillian, rho: Operator, mut info: SolverInfo, opts: &SolverOptions) -> Result<SteadyStateResult> {
    let l = liouvillian.matrix();
    let x = vectorize(&rho);
    let residual = norm2(&l.matvec(&x));
    let rel = residual / (l.frobenius_norm() * norm2(&x));
    if !(rel <= opts.residual_tol) {
        return Err(Error::SolverFailure {
            residual,
            reason: format!("relative residual {rel:.3e} exceeds {:.1e}", opts.residual_tol),
        });
    }
    info.relative_residual = rel;
    info.superoperator_nnz = l.nnz();
    let rho = DensityMatrix::new(rho).map_err(|e| Error::SolverFailure { residual, reason: e.to_string() })?;
    Ok(SteadyStateResult { rho, residual, solver_info: info })
}

fn solve_reduced(liouvillian: &Liouvillian, opts: &SolverOptions) -> Result<(DensityMatrix, SolverInfo)> {
    let sys = RealSystem::new(liouvillian)?;
    let m_norm = sys.matrix.frobenius_norm();
    let bordered = sys.bordered()?;
    let (method, raw, iterations) = if relative_residual(&sys.matrix, &bordered, m_norm) <= opts.residual_tol {
        (SolverMethod::BorderedLu, bordered, None)
    } else {
        let (x, its) = sys.inverse_iteration(opts)?;
        (SolverMethod::InverseIteration, x, Some(its))
    };
    let rho = finalize(liouvillian, &sys.expand(&raw))?;
    let min_ev = min_eigenvalue(&rho);
    if min_ev < -POSITIVITY_TOL {
        return Err(Error::SolverFailure {
            residual: f64::NAN,
            reason: format!("steady state has negative eigenvalue {min_ev:.3e}"),
        });
    }

    let mut cross = None;
    let mut inverse_iterations = iterations;
    if opts.cross_check {
        let other = match method {
            SolverMethod::BorderedLu => {
                let (v, its) = sys.inverse_iteration(opts)?;
                inverse_iterations = Some(its);
                v
            }
            SolverMethod::InverseIteration => sys.bordered()?,
        };
        let other = finalize(liouvillian, &sys.expand(&other))?;
        let diff = rho.sub(&other)?.frobenius_norm();
        if diff > opts.agreement_tol {
            return Err(Error::SolverFailure {
                residual: f64::NAN,
                reason: format!("solver paths disagree by {diff:.3e}"),
            });
        }
        cross = Some(diff);
    }
    let rho = DensityMatrix::new(rho).map_err(|e| Error::SolverFailure { residual: f64::NAN, reason: e.to_string() })?;
    let info = SolverInfo {
        method,
        relative_residual: 0.0,
        inverse_iterations,
        cross_method_difference: cross,
        superoperator_nnz: 0,
        unknowns: sys.matrix.dim(),
        separable: false,
    };
    Ok((rho, info))
}

fn relative_residual(m: &SparseMatrix<f64>, x: &[f64], m_norm: f64) -> f64 {
    let xn = norm2(x);
    if xn == 0.0 || !xn.is_finite() {
        return f64::INFINITY;
    }
    norm2(&m.matvec(x)) / (m_norm * xn)
}

/// Solve `L x = 0` with the `(0,0)` row replaced by `Tr x = 1`. Returns the
/// vectorized (not yet normalized) solution in the full space.
pub fn bordered_solve(liouvillian: &Liouvillian) -> Result<Vec<C64>> {
    let sys = RealSystem::new(liouvillian)?;
    Ok(sys.expand(&sys.bordered()?))
}

/// Null vector of `L` by shifted inverse iteration, with the step count.
pub fn inverse_iteration(liouvillian: &Liouvillian, opts: &SolverOptions) -> Result<(Vec<C64>, usize)> {
    let sys = RealSystem::new(liouvillian)?;
    let (x, its) = sys.inverse_iteration(opts)?;
    Ok((sys.expand(&x), its))
}

/// One class of vectorized matrix elements tied together by Hermiticity
/// and, when present, mode exchange.
#[derive(Debug, Clone, Copy)]
struct Orbit {
    /// Subspace position of the representative element.
    rep: usize,
    /// First real unknown (real part; imaginary part follows when complex).
    col: usize,
    real: bool,
}

/// The diagonal block of `L` as a real linear system.
struct RealSystem {
    d: usize,
    sub: Subspace,
    /// Per subspace position: orbit and whether the element is conjugated
    /// relative to the representative.
    map: Vec<(usize, bool)>,
    orbits: Vec<Orbit>,
    matrix: SparseMatrix<f64>,
}

impl RealSystem {
    fn new(liouvillian: &Liouvillian) -> Result<Self> {
        let d = liouvillian.hilbert_dim();
        let full = liouvillian.matrix();
        let diagonal: Vec<usize> = (0..d).map(|i| i + i * d).collect();
        let sub = liouvillian.invariant_subspace(&diagonal);
        if sub.blocks() > 1 {
            return Err(Error::DegenerateSteadyState(format!(
                "diagonal elements fall into {} decoupled blocks",
                sub.blocks()
            )));
        }
        let scale = full.max_abs();
        let tol = 1e-13 * scale;
        let transpose = |v: usize| v / d + (v % d) * d;
        let hermitian = full
            .iter()
            .all(|(r, c, v)| (full.get(transpose(r), transpose(c)) - v.conj()).norm() <= tol);
        if !hermitian {
            return Err(Error::InvalidSpec("generator does not preserve Hermiticity".into()));
        }
        let swap = mode_swap(liouvillian).filter(|sw| {
            let sigma = |v: usize| sw[v % d] + sw[v / d] * d;
            full.iter().all(|(r, c, v)| (full.get(sigma(r), sigma(c)) - v).norm() <= tol)
        });

        let n = sub.len();
        let mut map = vec![(usize::MAX, false); n];
        let mut orbits = Vec::new();
        let mut cols = 0;
        for p in 0..n {
            if map[p].0 != usize::MAX {
                continue;
            }
            let v = sub.indices()[p];
            let mut same = vec![v];
            if let Some(sw) = &swap {
                same.push(sw[v % d] + sw[v / d] * d);
            }
            let conj: Vec<usize> = same.iter().map(|&u| transpose(u)).collect();
            let real = conj.iter().any(|u| same.contains(u));
            let o = orbits.len();
            for (members, flag) in [(&same, false), (&conj, true)] {
                for &u in members.iter() {
                    let q = sub.position(u).ok_or_else(|| {
                        Error::InvalidSpec("invariant block is not closed under conjugation".into())
                    })?;
                    if map[q].0 == usize::MAX {
                        map[q] = (o, flag && !real);
                    }
                }
            }
            orbits.push(Orbit { rep: p, col: cols, real });
            cols += if real { 1 } else { 2 };
        }

        let m = sub.matrix();
        let mut trip = Vec::new();
        for orbit in &orbits {
            let row = orbit.col;
            for (_, q, val) in m.iter().filter(|&(r, _, _)| r == orbit.rep) {
                let (o2, conj) = map[q];
                let target = orbits[o2];
                let (re, im) = (val.re, val.im);
                trip.push((row, target.col, re));
                if !orbit.real {
                    trip.push((row + 1, target.col, im));
                }
                if !target.real {
                    let s = if conj { -1.0 } else { 1.0 };
                    trip.push((row, target.col + 1, -s * im));
                    if !orbit.real {
                        trip.push((row + 1, target.col + 1, s * re));
                    }
                }
            }
        }
        let matrix = SparseMatrix::from_triplets(cols, trip);
        Ok(Self { d, sub, map, orbits, matrix })
    }

    fn diagonal_unknowns(&self) -> Vec<usize> {
        (0..self.d)
            .map(|i| {
                let p = self.sub.position(i + i * self.d).expect("diagonal lies in the block");
                self.orbits[self.map[p].0].col
            })
            .collect()
    }

    fn bordered(&self) -> Result<Vec<f64>> {
        let diag = self.diagonal_unknowns();
        let mut trace_row: Vec<(usize, f64)> = diag.iter().map(|&c| (c, 1.0)).collect();
        trace_row.sort_unstable_by_key(|e| e.0);
        let row = diag[0];
        let a = self.matrix.with_row_replaced(row, &trace_row);
        let lu = SparseLu::factor(&a).map_err(|e| match e {
            FactorError::StructurallySingular => {
                Error::DegenerateSteadyState("bordered system is structurally singular".into())
            }
            FactorError::Numerical(msg) => Error::SolverFailure { residual: f64::NAN, reason: msg },
        })?;
        let mut b = vec![0.0; self.matrix.dim()];
        b[row] = 1.0;
        lu.solve_in_place(&mut b);
        // A genuine density matrix has ||vec(rho)||_2 <= 1; a blow-up means the
        // bordered matrix is numerically singular, i.e. the null space of L is
        // not one-dimensional.
        let size = norm2(&b);
        if !size.is_finite() || size > 1e6 {
            return Err(Error::DegenerateSteadyState(format!(
                "bordered system is numerically singular (||x|| = {size:.3e})"
            )));
        }
        Ok(b)
    }

    fn inverse_iteration(&self, opts: &SolverOptions) -> Result<(Vec<f64>, usize)> {
        let m = &self.matrix;
        let m_norm = m.frobenius_norm();
        let shift = opts.relative_shift * m.inf_norm().max(1.0);
        let shifted = m.affine(-shift, 1.0);
        let lu = SparseLu::factor(&shifted).map_err(|e| Error::SolverFailure {
            residual: f64::NAN,
            reason: format!("shifted factorization failed: {e:?}"),
        })?;
        let mut x = vec![0.0; m.dim()];
        for c in self.diagonal_unknowns() {
            x[c] = 1.0 / self.d as f64;
        }
        let mut last_rel = f64::INFINITY;
        for it in 1..=opts.max_inverse_iterations {
            lu.solve_in_place(&mut x);
            let n = norm2(&x);
            if !n.is_finite() || n == 0.0 {
                return Err(Error::SolverFailure { residual: f64::NAN, reason: "inverse iteration diverged".into() });
            }
            x.iter_mut().for_each(|v| *v /= n);
            let rel = relative_residual(m, &x, m_norm);
            if rel <= opts.residual_tol * 1e-2 || (rel <= opts.residual_tol && rel >= 0.5 * last_rel) {
                return Ok((x, it));
            }
            last_rel = rel;
        }
        Err(Error::SolverFailure {
            residual: norm2(&m.matvec(&x)),
            reason: format!("inverse iteration did not converge in {} steps", opts.max_inverse_iterations),
        })
    }

    /// Full-space complex vector from real unknowns.
    fn expand(&self, x: &[f64]) -> Vec<C64> {
        let part: Vec<C64> = self
            .map
            .iter()
            .map(|&(o, conj)| {
                let orbit = self.orbits[o];
                if orbit.real {
                    C64::new(x[orbit.col], 0.0)
                } else {
                    let im = x[orbit.col + 1];
                    C64::new(x[orbit.col], if conj { -im } else { im })
                }
            })
            .collect();
        self.sub.embed(&part)
    }
}

/// Basis permutation exchanging two equally truncated oscillators.
fn mode_swap(liouvillian: &Liouvillian) -> Option<Vec<usize>> {
    let dim = liouvillian.dim();
    match dim.dims() {
        [a, b] if a == b => Some(
            (0..dim.total())
                .map(|i| {
                    let occ = dim.occupations(i);
                    dim.index_of(&[occ[1], occ[0]])
                })
                .collect(),
        ),
        _ => None,
    }
}

/// Hermitize and normalize the trace of a raw null vector.
fn finalize(liouvillian: &Liouvillian, raw: &[C64]) -> Result<Operator> {
    let op = devectorize(liouvillian.dim(), raw)?;
    let herm = op.add(&crate::fock::dagger(&op))?.scale(C64::new(0.5, 0.0));
    let tr = herm.trace();
    if tr.norm() < 1e-300 || !tr.re.is_finite() {
        return Err(Error::DegenerateSteadyState("null vector has zero trace".into()));
    }
    Ok(herm.scale(C64::new(1.0 / tr.re, 0.0)))
}
