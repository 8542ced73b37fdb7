//! Hamiltonians and Lindblad superoperators for the coupled oscillators.
//!
//! Density matrices are vectorized by stacking columns: `vec(rho)[i + j*D] =
//! rho[i, j]`. Under that convention `vec(A rho B) = (B^T ⊗ A) vec(rho)`,
//! which fixes every superoperator formula below.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{dagger, mode_annihilation, DensityMatrix, FockDim, Operator, C64};
use crate::sparse::SparseMatrix;

/// How the two oscillators interact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingKind {
    /// Coherent exchange `V (a1† a2 + a1 a2†)`.
    Reactive,
    /// Shared loss `V D[a1 - a2]`.
    Dissipative,
    None,
}

impl std::fmt::Display for CouplingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CouplingKind::Reactive => "reactive",
            CouplingKind::Dissipative => "dissipative",
            CouplingKind::None => "none",
        })
    }
}

/// Full parameter record. Rates are in units of `gamma1[0]` by convention.
///
/// A single-entry `truncation` describes one uncoupled oscillator; only the
/// first entry of each per-oscillator pair is then used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    /// Linear excitation rates.
    pub gamma1: [f64; 2],
    /// Two-photon (nonlinear) dissipation rates.
    pub gamma2: [f64; 2],
    /// Detunings.
    #[serde(default)]
    pub delta: [f64; 2],
    /// Squeezing strengths.
    #[serde(default)]
    pub eta: [f64; 2],
    /// Squeezing phase in radians.
    #[serde(default)]
    pub theta: f64,
    /// Coupling strength `V`.
    #[serde(default)]
    pub coupling: f64,
    pub coupling_kind: CouplingKind,
    /// Single-photon loss rates `kappa D[a]`; zero in every bundled scenario.
    #[serde(default, skip_serializing_if = "is_zero_pair")]
    pub loss: [f64; 2],
    pub truncation: FockDim,
}

fn is_zero_pair(v: &[f64; 2]) -> bool {
    v[0] == 0.0 && v[1] == 0.0
}

impl SystemSpec {
    /// Symmetric two-oscillator spec with shared rates and no squeezing.
    pub fn symmetric(gamma1: f64, gamma2: f64, n_max: usize) -> Result<Self> {
        let s = Self {
            gamma1: [gamma1; 2],
            gamma2: [gamma2; 2],
            delta: [0.0; 2],
            eta: [0.0; 2],
            theta: 0.0,
            coupling: 0.0,
            coupling_kind: CouplingKind::None,
            loss: [0.0; 2],
            truncation: FockDim::two_mode(n_max, n_max)?,
        };
        s.validate()?;
        Ok(s)
    }

    /// One uncoupled oscillator.
    pub fn single(gamma1: f64, gamma2: f64, n_max: usize) -> Result<Self> {
        let s = Self {
            gamma1: [gamma1, 0.0],
            gamma2: [gamma2, 0.0],
            delta: [0.0; 2],
            eta: [0.0; 2],
            theta: 0.0,
            coupling: 0.0,
            coupling_kind: CouplingKind::None,
            loss: [0.0; 2],
            truncation: FockDim::single(n_max)?,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn n_modes(&self) -> usize {
        self.truncation.n_modes()
    }

    /// True for two oscillators with no coupling term at all.
    pub fn is_separable(&self) -> bool {
        self.n_modes() == 2 && (self.coupling == 0.0 || self.coupling_kind == CouplingKind::None)
    }

    /// Single-oscillator spec of `mode` (0 or 1) of a separable spec.
    pub fn mode_factor(&self, mode: usize) -> Result<SystemSpec> {
        if !self.is_separable() || mode > 1 {
            return Err(Error::InvalidSpec(format!("mode {mode} is not an independent factor")));
        }
        let pick = |v: [f64; 2]| [v[mode], 0.0];
        let s = SystemSpec {
            gamma1: pick(self.gamma1),
            gamma2: pick(self.gamma2),
            delta: pick(self.delta),
            eta: pick(self.eta),
            theta: self.theta,
            coupling: 0.0,
            coupling_kind: CouplingKind::None,
            loss: pick(self.loss),
            truncation: FockDim::single(self.truncation.dims()[mode])?,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let modes = self.n_modes();
        if modes > 2 {
            return Err(Error::InvalidSpec(format!("{modes} modes; at most two oscillators")));
        }
        let all = [
            ("gamma1", &self.gamma1[..modes]),
            ("gamma2", &self.gamma2[..modes]),
            ("eta", &self.eta[..modes]),
            ("loss", &self.loss[..modes]),
        ];
        for (name, vals) in all {
            if let Some(v) = vals.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
                return Err(Error::InvalidSpec(format!("{name} = {v} must be finite and >= 0")));
            }
        }
        if let Some(v) = self.gamma2[..modes].iter().find(|v| **v <= 0.0) {
            return Err(Error::InvalidSpec(format!("gamma2 = {v} must be > 0")));
        }
        if !self.delta.iter().chain([&self.theta]).all(|v| v.is_finite()) {
            return Err(Error::InvalidSpec("non-finite detuning or phase".into()));
        }
        if !(self.coupling >= 0.0) || !self.coupling.is_finite() {
            return Err(Error::InvalidSpec(format!("coupling = {} must be >= 0", self.coupling)));
        }
        if self.coupling_kind == CouplingKind::None && self.coupling != 0.0 {
            return Err(Error::InvalidSpec("coupling_kind = none requires coupling = 0".into()));
        }
        if modes == 1 && self.coupling != 0.0 {
            return Err(Error::InvalidSpec("a single oscillator cannot be coupled".into()));
        }
        Ok(())
    }
}

/// Sparse generator of `d rho/dt = L[rho]` acting on column-stacked density matrices.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    spec: Option<SystemSpec>,
    dim: FockDim,
    matrix: SparseMatrix,
}

impl Liouvillian {
    /// Generator `-i[H, .] + sum_k rate_k D[O_k]` from explicit parts.
    pub fn from_parts(hamiltonian: &Operator, collapse: &[(f64, Operator)]) -> Result<Self> {
        let dim = hamiltonian.dim().clone();
        let mut trip = hamiltonian_triplets(hamiltonian);
        for (rate, op) in collapse {
            if op.dim() != &dim {
                return Err(Error::DimensionMismatch {
                    left: dim.dims().to_vec(),
                    right: op.dim().dims().to_vec(),
                });
            }
            if *rate != 0.0 {
                trip.extend(dissipator_triplets(op, *rate));
            }
        }
        let n = dim.total();
        Ok(Self { spec: None, dim, matrix: SparseMatrix::from_triplets(n * n, trip) })
    }

    pub fn spec(&self) -> Option<&SystemSpec> {
        self.spec.as_ref()
    }

    pub fn dim(&self) -> &FockDim {
        &self.dim
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    /// Hilbert-space dimension `D`; the superoperator is `D^2 x D^2`.
    pub fn hilbert_dim(&self) -> usize {
        self.dim.total()
    }

    pub fn apply(&self, op: &Operator) -> Result<Operator> {
        if op.dim() != &self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim.dims().to_vec(),
                right: op.dim().dims().to_vec(),
            });
        }
        devectorize(&self.dim, &self.matrix.matvec(&vectorize(op)))
    }

    /// `||L vec(rho)||_2`.
    pub fn residual(&self, rho: &DensityMatrix) -> Result<f64> {
        let out = self.apply(rho.operator())?;
        Ok(out.frobenius_norm())
    }

    /// Restriction of `L` to matrix elements `|m><n|` whose total photon
    /// numbers have even (or odd) difference. Returns `None` when `L` mixes
    /// the two sectors.
    pub fn parity_sector(&self, odd: bool) -> Option<Subspace> {
        let d = self.hilbert_dim();
        let parity: Vec<bool> = (0..d).map(|i| self.dim.occupations(i).iter().sum::<usize>() % 2 == 1).collect();
        let in_sector = |v: usize| (parity[v % d] ^ parity[v / d]) == odd;
        if self.matrix.iter().any(|(r, c, _)| in_sector(r) != in_sector(c)) {
            return None;
        }
        let indices: Vec<usize> = (0..d * d).filter(|&v| in_sector(v)).collect();
        Some(self.subspace(indices, 1))
    }

    /// Smallest union of blocks of `L` (connected components of its sparsity
    /// graph) that contains every `seed` index. Such a subspace is invariant
    /// under `L` exactly.
    pub fn invariant_subspace(&self, seeds: &[usize]) -> Subspace {
        let n = self.matrix.dim();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (r, c, _) in self.matrix.iter() {
            let (a, b) = (find(&mut parent, r), find(&mut parent, c));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut roots: Vec<usize> = seeds.iter().map(|&s| find(&mut parent, s)).collect();
        roots.sort_unstable();
        roots.dedup();
        let indices: Vec<usize> =
            (0..n).filter(|&v| roots.binary_search(&find(&mut parent, v)).is_ok()).collect();
        self.subspace(indices, roots.len())
    }

    fn subspace(&self, indices: Vec<usize>, blocks: usize) -> Subspace {
        let full_len = self.matrix.dim();
        let mut position = vec![usize::MAX; full_len];
        for (k, &i) in indices.iter().enumerate() {
            position[i] = k;
        }
        let trip = self
            .matrix
            .iter()
            .filter(|&(r, _, _)| position[r] != usize::MAX)
            .map(|(r, c, v)| (position[r], position[c], v))
            .collect();
        let matrix = SparseMatrix::from_triplets(indices.len(), trip);
        Subspace { full_len, indices, blocks, matrix }
    }
}

/// Restriction of `L` to an invariant set of vectorized matrix elements.
#[derive(Debug, Clone)]
pub struct Subspace {
    full_len: usize,
    indices: Vec<usize>,
    blocks: usize,
    matrix: SparseMatrix,
}

impl Subspace {
    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    /// Positions in the full vectorized space, ascending.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Number of disconnected blocks of `L` the subspace is made of.
    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn restrict(&self, full: &[C64]) -> Vec<C64> {
        self.indices.iter().map(|&i| full[i]).collect()
    }

    pub fn embed(&self, part: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.full_len];
        for (&i, &v) in self.indices.iter().zip(part) {
            out[i] = v;
        }
        out
    }

    /// Subspace position of a full-space index, if it belongs to the subspace.
    pub fn position(&self, full_index: usize) -> Option<usize> {
        self.indices.binary_search(&full_index).ok()
    }
}

/// Column-stacking vectorization.
pub fn vectorize(op: &Operator) -> Vec<C64> {
    op.matrix().as_slice().to_vec()
}

pub fn devectorize(dim: &FockDim, v: &[C64]) -> Result<Operator> {
    let n = dim.total();
    if v.len() != n * n {
        return Err(Error::InvalidDimension(format!("vector of length {} for D = {n}", v.len())));
    }
    Operator::from_matrix(dim.clone(), nalgebra::DMatrix::from_column_slice(n, n, v))
}

/// Triplets of the superoperator `rho -> scale * A rho B`.
fn sandwich_triplets(a: &Operator, b: &Operator, scale: C64, out: &mut Vec<(usize, usize, C64)>) {
    let d = a.size();
    let a_nz = a.nonzeros();
    let b_nz = b.nonzeros();
    for &(l, j, bv) in &b_nz {
        for &(i, k, av) in &a_nz {
            out.push((i + j * d, k + l * d, scale * av * bv));
        }
    }
}

fn hamiltonian_triplets(h: &Operator) -> Vec<(usize, usize, C64)> {
    let id = Operator::identity(h.dim());
    let mut trip = Vec::new();
    sandwich_triplets(h, &id, C64::new(0.0, -1.0), &mut trip);
    sandwich_triplets(&id, h, C64::new(0.0, 1.0), &mut trip);
    trip
}

fn dissipator_triplets(collapse: &Operator, rate: f64) -> Vec<(usize, usize, C64)> {
    let id = Operator::identity(collapse.dim());
    let cd = dagger(collapse);
    let cdc = cd.mul(collapse).expect("same dimension");
    let mut trip = Vec::new();
    sandwich_triplets(collapse, &cd, C64::new(rate, 0.0), &mut trip);
    sandwich_triplets(&cdc, &id, C64::new(-0.5 * rate, 0.0), &mut trip);
    sandwich_triplets(&id, &cdc, C64::new(-0.5 * rate, 0.0), &mut trip);
    trip
}

/// Superoperator of `D[O] rho = O rho O† - {O†O, rho}/2`.
pub fn dissipator_superop(collapse: &Operator) -> SparseMatrix {
    let n = collapse.size();
    SparseMatrix::from_triplets(n * n, dissipator_triplets(collapse, 1.0))
}

fn check_kind(spec: &SystemSpec, expected: CouplingKind) -> Result<()> {
    if spec.coupling_kind != expected {
        return Err(Error::WrongCouplingKind {
            expected: expected.to_string(),
            found: spec.coupling_kind.to_string(),
        });
    }
    Ok(())
}

/// `sum_i Delta_i a_i† a_i + i sum_i eta_i (a_i^2 e^{-i theta} - a_i†^2 e^{i theta})`
fn local_hamiltonian(spec: &SystemSpec) -> Result<Operator> {
    let dim = &spec.truncation;
    let mut h = Operator::zeros(dim);
    let phase = C64::from_polar(1.0, spec.theta);
    for mode in 0..spec.n_modes() {
        let a = mode_annihilation(dim, mode)?;
        let ad = dagger(&a);
        let n = ad.mul(&a)?;
        let a2 = a.mul(&a)?;
        let ad2 = ad.mul(&ad)?;
        h = h.add(&n.scale(C64::new(spec.delta[mode], 0.0)))?;
        let sq = a2.scale(phase.conj()).sub(&ad2.scale(phase))?;
        h = h.add(&sq.scale(C64::new(0.0, spec.eta[mode])))?;
    }
    Ok(h)
}

/// Detuning, reactive exchange and squeezing Hamiltonian.
pub fn hamiltonian_reactive(spec: &SystemSpec) -> Result<Operator> {
    check_kind(spec, CouplingKind::Reactive)?;
    spec.validate()?;
    let mut h = local_hamiltonian(spec)?;
    if spec.n_modes() == 2 && spec.coupling != 0.0 {
        let a1 = mode_annihilation(&spec.truncation, 0)?;
        let a2 = mode_annihilation(&spec.truncation, 1)?;
        let hop = dagger(&a1).mul(&a2)?.add(&a1.mul(&dagger(&a2))?)?;
        h = h.add(&hop.scale(C64::new(spec.coupling, 0.0)))?;
    }
    Ok(h)
}

/// Detuning and squeezing only; the coupling acts through a shared dissipator.
pub fn hamiltonian_dissipative(spec: &SystemSpec) -> Result<Operator> {
    check_kind(spec, CouplingKind::Dissipative)?;
    spec.validate()?;
    local_hamiltonian(spec)
}

/// Hamiltonian appropriate to the spec's coupling kind.
pub fn hamiltonian(spec: &SystemSpec) -> Result<Operator> {
    match spec.coupling_kind {
        CouplingKind::Reactive => hamiltonian_reactive(spec),
        CouplingKind::Dissipative => hamiltonian_dissipative(spec),
        CouplingKind::None => {
            spec.validate()?;
            local_hamiltonian(spec)
        }
    }
}

/// Collapse channels `(rate, operator)` of the master equation.
pub fn collapse_operators(spec: &SystemSpec) -> Result<Vec<(f64, Operator)>> {
    spec.validate()?;
    let dim = &spec.truncation;
    let mut out = Vec::new();
    for mode in 0..spec.n_modes() {
        let a = mode_annihilation(dim, mode)?;
        out.push((spec.gamma1[mode], dagger(&a)));
        out.push((spec.gamma2[mode], a.mul(&a)?));
        if spec.loss[mode] != 0.0 {
            out.push((spec.loss[mode], a));
        }
    }
    if spec.coupling_kind == CouplingKind::Dissipative && spec.coupling != 0.0 {
        let diff = mode_annihilation(dim, 0)?.sub(&mode_annihilation(dim, 1)?)?;
        out.push((spec.coupling, diff));
    }
    Ok(out)
}

/// Assemble the full Liouvillian for `spec`.
pub fn build_liouvillian(spec: &SystemSpec) -> Result<Liouvillian> {
    let h = hamiltonian(spec)?;
    let collapse = collapse_operators(spec)?;
    let mut l = Liouvillian::from_parts(&h, &collapse)?;
    l.spec = Some(spec.clone());
    Ok(l)
}
