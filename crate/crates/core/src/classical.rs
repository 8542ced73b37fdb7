//! Mean-field amplitude/phase equations, their fixed points and
//! squeezing-parameter continuation.
//!
//! With `<a_i> = R_i e^{i phi_i}` the reactive equations are
//!
//! ```text
//! R1'   = (g1_1/2) R1 - g2_1 R1^3 - V R2 sin(phi2 - phi1) - 2 eta R1 cos(2 phi1 - theta)
//! R2'   = (g1_2/2) R2 - g2_2 R2^3 - V R1 sin(phi2 - phi1) - 2 eta R2 cos(2 phi2 - theta)
//! phi1' = -Delta1 + V (R2/R1) cos(phi2 - phi1) + 2 eta sin(2 phi1 - theta)
//! phi2' = -Delta2 + V (R1/R2) cos(phi2 - phi1) + 2 eta sin(2 phi2 - theta)
//! ```
//!
//! For dissipative coupling the `V` terms are replaced by the mean field of
//! `V D[a1 - a2]`, i.e. `d<a1>/dt = -(V/2)(<a1> - <a2>)`:
//!
//! ```text
//! R1'   += (V/2)(R2 cos(phi2 - phi1) - R1)     phi1' += (V/2)(R2/R1) sin(phi2 - phi1)
//! R2'   += (V/2)(R1 cos(phi1 - phi2) - R2)     phi2' += (V/2)(R1/R2) sin(phi1 - phi2)
//! ```
//!
//! A single-photon loss `kappa D[a]` adds `-(kappa/2) R`.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::C64;
use crate::liouvillian::{CouplingKind, SystemSpec};

/// Amplitudes and phases of the two oscillators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalState {
    pub r1: f64,
    pub r2: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl ClassicalState {
    pub fn new(r1: f64, r2: f64, phi1: f64, phi2: f64) -> Self {
        Self { r1, r2, phi1, phi2 }
    }

    fn to_vector(self) -> Vector4<f64> {
        Vector4::new(self.r1, self.r2, self.phi1, self.phi2)
    }

    fn from_vector(v: &Vector4<f64>) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    /// Canonical form: non-negative amplitudes (using the exact symmetry
    /// `(R, phi) -> (-R, phi + π)`) and phases in `[0, 2π)`.
    pub fn normalized(self) -> Self {
        let fix = |r: f64, phi: f64| if r < 0.0 { (-r, phi + PI) } else { (r, phi) };
        let (r1, phi1) = fix(self.r1, self.phi1);
        let (r2, phi2) = fix(self.r2, self.phi2);
        Self::new(r1, r2, wrap_phase(phi1), wrap_phase(phi2))
    }

    /// Both phases advanced by `π`.
    pub fn pi_shifted(self) -> Self {
        Self::new(self.r1, self.r2, self.phi1 + PI, self.phi2 + PI).normalized()
    }

    /// Max-norm distance with phases compared modulo `2π`.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.r1 - other.r1)
            .abs()
            .max((self.r2 - other.r2).abs())
            .max(phase_distance(self.phi1, other.phi1))
            .max(phase_distance(self.phi2, other.phi2))
    }
}

/// Phase folded into `[0, 2π)`.
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU { 0.0 } else { w }
}

fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn check_amplitudes(s: &ClassicalState) -> Result<()> {
    if s.r1 == 0.0 || s.r2 == 0.0 || !s.r1.is_finite() || !s.r2.is_finite() {
        return Err(Error::SingularState);
    }
    Ok(())
}

fn check_two_modes(spec: &SystemSpec) -> Result<()> {
    if spec.n_modes() != 2 {
        return Err(Error::InvalidSpec("mean-field equations need two oscillators".into()));
    }
    Ok(())
}

/// Uncoupled part: gain, saturation, loss, detuning and squeezing.
fn local_terms(s: &ClassicalState, spec: &SystemSpec) -> [f64; 4] {
    let th = spec.theta;
    let amp = |i: usize, r: f64, phi: f64| {
        0.5 * spec.gamma1[i] * r - spec.gamma2[i] * r.powi(3) - 0.5 * spec.loss[i] * r
            - 2.0 * spec.eta[i] * r * (2.0 * phi - th).cos()
    };
    let phase = |i: usize, phi: f64| -spec.delta[i] + 2.0 * spec.eta[i] * (2.0 * phi - th).sin();
    [amp(0, s.r1, s.phi1), amp(1, s.r2, s.phi2), phase(0, s.phi1), phase(1, s.phi2)]
}

/// Right-hand side of the reactive equations.
pub fn rhs_reactive(state: &ClassicalState, spec: &SystemSpec) -> Result<[f64; 4]> {
    check_two_modes(spec)?;
    check_amplitudes(state)?;
    let v = spec.coupling;
    let dphi = state.phi2 - state.phi1;
    let mut out = local_terms(state, spec);
    out[0] -= v * state.r2 * dphi.sin();
    out[1] -= v * state.r1 * dphi.sin();
    out[2] += v * state.r2 / state.r1 * dphi.cos();
    out[3] += v * state.r1 / state.r2 * dphi.cos();
    Ok(out)
}

/// Right-hand side of the dissipatively coupled equations.
pub fn rhs_dissipative(state: &ClassicalState, spec: &SystemSpec) -> Result<[f64; 4]> {
    check_two_modes(spec)?;
    check_amplitudes(state)?;
    let h = 0.5 * spec.coupling;
    let dphi = state.phi2 - state.phi1;
    let mut out = local_terms(state, spec);
    out[0] += h * (state.r2 * dphi.cos() - state.r1);
    out[1] += h * (state.r1 * dphi.cos() - state.r2);
    out[2] += h * state.r2 / state.r1 * dphi.sin();
    out[3] -= h * state.r1 / state.r2 * dphi.sin();
    Ok(out)
}

/// Dispatch on the spec's coupling kind; `none` uses the reactive form with
/// `V = 0`.
pub fn rhs(state: &ClassicalState, spec: &SystemSpec) -> Result<[f64; 4]> {
    match spec.coupling_kind {
        CouplingKind::Dissipative => rhs_dissipative(state, spec),
        CouplingKind::Reactive | CouplingKind::None => rhs_reactive(state, spec),
    }
}

/// Complex mean-field amplitudes `R e^{i phi}`.
pub fn amplitudes(state: &ClassicalState) -> [C64; 2] {
    [C64::from_polar(state.r1, state.phi1), C64::from_polar(state.r2, state.phi2)]
}

/// Finite-difference step for Jacobians.
pub const JACOBIAN_STEP: f64 = 1e-7;

fn eval(v: &Vector4<f64>, spec: &SystemSpec) -> Result<Vector4<f64>> {
    Ok(Vector4::from(rhs(&ClassicalState::from_vector(v), spec)?))
}

/// Forward-difference Jacobian.
pub fn jacobian_forward(state: &ClassicalState, spec: &SystemSpec) -> Result<Matrix4<f64>> {
    let x = state.to_vector();
    let f0 = eval(&x, spec)?;
    let mut j = Matrix4::zeros();
    for k in 0..4 {
        let mut xp = x;
        xp[k] += JACOBIAN_STEP;
        j.set_column(k, &((eval(&xp, spec)? - f0) / JACOBIAN_STEP));
    }
    Ok(j)
}

/// Central-difference Jacobian.
pub fn jacobian_central(state: &ClassicalState, spec: &SystemSpec) -> Result<Matrix4<f64>> {
    let x = state.to_vector();
    let mut j = Matrix4::zeros();
    for k in 0..4 {
        let (mut xp, mut xm) = (x, x);
        xp[k] += JACOBIAN_STEP;
        xm[k] -= JACOBIAN_STEP;
        j.set_column(k, &((eval(&xp, spec)? - eval(&xm, spec)?) / (2.0 * JACOBIAN_STEP)));
    }
    Ok(j)
}

/// Linear stability of a fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Saddle,
    Unstable,
    /// Some eigenvalue has `|Re λ| < ε`.
    Marginal,
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stability::Stable => "stable",
            Stability::Saddle => "saddle",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        })
    }
}

/// Threshold `ε` on eigenvalue real parts.
pub const MARGINAL_EPS: f64 = 1e-6;

pub fn classify(eigenvalues: &[C64]) -> Stability {
    if eigenvalues.iter().any(|l| l.re.abs() < MARGINAL_EPS) {
        Stability::Marginal
    } else if eigenvalues.iter().all(|l| l.re < 0.0) {
        Stability::Stable
    } else if eigenvalues.iter().all(|l| l.re > 0.0) {
        Stability::Unstable
    } else {
        Stability::Saddle
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub state: ClassicalState,
    pub stability: Stability,
    pub eigenvalues: Vec<C64>,
    /// `||rhs||_2` at the state.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// States closer than this are merged.
    pub dedup_tol: f64,
    /// Multistart amplitudes and phases (used for both oscillators).
    pub start_amplitudes: Vec<f64>,
    pub start_phases: Vec<f64>,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 100,
            dedup_tol: 1e-6,
            start_amplitudes: (0..7).map(|k| 0.2 + 0.3 * k as f64).collect(),
            start_phases: (0..8).map(|k| k as f64 * PI / 4.0).collect(),
        }
    }
}

impl NewtonOptions {
    /// Multistart grid. A start whose joint π-shift is also on the grid is
    /// dropped, since both converge to the same normalized state.
    pub fn starts(&self) -> Vec<ClassicalState> {
        let on_grid = |phi: f64| self.start_phases.iter().any(|&q| phase_distance(q, phi) < 1e-12);
        let mut out = Vec::new();
        for &r1 in &self.start_amplitudes {
            for &r2 in &self.start_amplitudes {
                for &p1 in &self.start_phases {
                    for &p2 in &self.start_phases {
                        let twin = wrap_phase(p1) >= PI && on_grid(p1 - PI) && on_grid(p2 - PI);
                        if !twin {
                            out.push(ClassicalState::new(r1, r2, p1, p2));
                        }
                    }
                }
            }
        }
        out
    }
}

fn norm(v: &Vector4<f64>) -> f64 {
    v.norm()
}

/// Damped Newton iteration from `start`. Singular Jacobians fall back to a
/// least-squares (pseudo-inverse) step.
pub fn newton(start: ClassicalState, spec: &SystemSpec, opts: &NewtonOptions) -> Option<ClassicalState> {
    let mut x = start.to_vector();
    let mut f = eval(&x, spec).ok()?;
    for _ in 0..opts.max_iter {
        if norm(&f) <= opts.tol {
            break;
        }
        let j = jacobian_forward(&ClassicalState::from_vector(&x), spec).ok()?;
        let dx = match j.lu().solve(&f) {
            Some(d) if d.iter().all(|v| v.is_finite()) => d,
            _ => j.svd(true, true).solve(&f, 1e-12).ok()?,
        };
        let mut t = 1.0;
        let mut accepted = false;
        while t >= 1.0 / 1024.0 {
            let trial = x - dx * t;
            if let Ok(ft) = eval(&trial, spec) {
                if norm(&ft) < norm(&f) {
                    x = trial;
                    f = ft;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    if norm(&f) > opts.tol {
        return None;
    }
    let s = ClassicalState::from_vector(&x).normalized();
    if s.r1 < 1e-8 || s.r2 < 1e-8 {
        return None;
    }
    // Re-evaluate after normalization; the symmetry is exact but rounding is not.
    let r = Vector4::from(rhs(&s, spec).ok()?);
    (norm(&r) <= opts.tol).then_some(s)
}

impl FixedPoint {
    /// Number of eigenvalues with positive real part.
    pub fn unstable_dimension(&self) -> usize {
        self.eigenvalues.iter().filter(|l| l.re > 0.0).count()
    }
}

/// Classify a converged state.
pub fn fixed_point(state: ClassicalState, spec: &SystemSpec) -> Result<FixedPoint> {
    let j = jacobian_forward(&state, spec)?;
    let eigenvalues: Vec<C64> = j.complex_eigenvalues().iter().copied().collect();
    let residual = Vector4::from(rhs(&state, spec)?).norm();
    Ok(FixedPoint { state, stability: classify(&eigenvalues), eigenvalues, residual })
}

fn insert_unique(found: &mut Vec<ClassicalState>, s: ClassicalState, tol: f64) {
    if !found.iter().any(|f| f.distance(&s) <= tol) {
        found.push(s);
    }
}

/// All fixed points reached by Newton from the multistart grid and the
/// extra `seeds`, deduplicated and sorted by `(R1, R2, phi1, phi2)`.
pub fn find_fixed_points_seeded(
    spec: &SystemSpec,
    seeds: &[ClassicalState],
    opts: &NewtonOptions,
) -> Result<Vec<FixedPoint>> {
    check_two_modes(spec)?;
    spec.validate()?;
    let mut found = Vec::new();
    for start in seeds.iter().copied().chain(opts.starts()) {
        if let Some(s) = newton(start, spec, opts) {
            insert_unique(&mut found, s, opts.dedup_tol);
        }
    }
    found.sort_by(|a, b| {
        [a.r1, a.r2, a.phi1, a.phi2]
            .partial_cmp(&[b.r1, b.r2, b.phi1, b.phi2])
            .expect("finite states")
    });
    found.into_iter().map(|s| fixed_point(s, spec)).collect()
}

/// Fixed points from the default multistart grid.
pub fn find_fixed_points(spec: &SystemSpec) -> Result<Vec<FixedPoint>> {
    find_fixed_points_seeded(spec, &[], &NewtonOptions::default())
}

/// Kind of a detected bifurcation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    /// A stable and an unstable branch appear or disappear together.
    SaddleNode,
    /// Two saddles whose unstable dimensions differ by one appear or
    /// disappear together.
    Fold,
    /// A continuing branch changes stability type.
    StabilityChange,
}

impl std::fmt::Display for EventKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EventKind::SaddleNode => "saddle-node",
            EventKind::Fold => "fold",
            EventKind::StabilityChange => "stability-change",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationEvent {
    /// Estimated parameter value (midpoint of the bracketing step).
    pub eta: f64,
    pub kind: EventKind,
    /// Indices of the branches involved.
    pub branches: Vec<usize>,
}

/// One continued family of fixed points.
#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationBranch {
    pub parameter_axis: Vec<f64>,
    pub states: Vec<ClassicalState>,
    pub stability: Vec<Stability>,
    /// Number of eigenvalues with positive real part at each point.
    pub unstable_dims: Vec<usize>,
    pub events: Vec<BifurcationEvent>,
}

impl BifurcationBranch {
    pub fn len(&self) -> usize {
        self.parameter_axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parameter_axis.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("eta,R1,R2,phi1,phi2,stability\n");
        for ((eta, s), st) in self.parameter_axis.iter().zip(&self.states).zip(&self.stability) {
            writeln!(out, "{eta:.6},{:.10},{:.10},{:.10},{:.10},{st}", s.r1, s.r2, s.phi1, s.phi2).unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationDiagram {
    pub branches: Vec<BifurcationBranch>,
    pub events: Vec<BifurcationEvent>,
    /// Fixed points found at every parameter value.
    pub points: Vec<(f64, Vec<FixedPoint>)>,
}

impl BifurcationDiagram {
    pub fn events_csv(&self) -> String {
        let mut out = String::from("eta,type\n");
        for e in &self.events {
            writeln!(out, "{:.6},{}", e.eta, e.kind).unwrap();
        }
        out
    }

    /// All points as one CSV with a branch column.
    pub fn points_csv(&self) -> String {
        let mut out = String::from("branch,eta,R1,R2,phi1,phi2,stability\n");
        for (k, b) in self.branches.iter().enumerate() {
            for line in b.to_csv().lines().skip(1) {
                writeln!(out, "{k},{line}").unwrap();
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub newton: NewtonOptions,
    /// Largest state change between consecutive points of one branch.
    pub max_jump: f64,
    /// Largest distance between the two members of a saddle-node pair at
    /// the step where they appear or vanish.
    pub fold_radius: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { newton: NewtonOptions::default(), max_jump: 0.25, fold_radius: 0.5 }
    }
}

/// Natural-parameter continuation in `eta` (applied to both oscillators).
pub fn bifurcation_sweep(template: &SystemSpec, etas: &[f64], opts: &SweepOptions) -> Result<BifurcationDiagram> {
    if etas.is_empty() || etas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid("eta values must be nonempty and increasing".into()));
    }
    let mut points: Vec<(f64, Vec<FixedPoint>)> = Vec::with_capacity(etas.len());
    let mut seeds: Vec<ClassicalState> = Vec::new();
    for &eta in etas {
        let mut spec = template.clone();
        spec.eta = [eta, eta];
        let found = find_fixed_points_seeded(&spec, &seeds, &opts.newton)?;
        seeds = found.iter().map(|p| p.state).collect();
        points.push((eta, found));
    }
    Ok(assemble(points, opts))
}

/// Link fixed points of consecutive parameter values into branches and
/// detect events.
fn assemble(points: Vec<(f64, Vec<FixedPoint>)>, opts: &SweepOptions) -> BifurcationDiagram {
    let mut branches: Vec<BifurcationBranch> = Vec::new();
    // (branch index, last state) for branches alive at the previous step.
    let mut alive: Vec<usize> = Vec::new();
    let mut born: Vec<Vec<usize>> = Vec::with_capacity(points.len());
    let mut died: Vec<Vec<usize>> = Vec::with_capacity(points.len());
    for (step, (eta, found)) in points.iter().enumerate() {
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (ai, &b) in alive.iter().enumerate() {
            let last = branches[b].states.last().expect("branch nonempty");
            for (fi, p) in found.iter().enumerate() {
                let d = last.distance(&p.state);
                if d <= opts.max_jump {
                    pairs.push((d, ai, fi));
                }
            }
        }
        pairs.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
        let mut taken_branch = vec![false; alive.len()];
        let mut taken_point = vec![None; found.len()];
        for (_, ai, fi) in pairs {
            if !taken_branch[ai] && taken_point[fi].is_none() {
                taken_branch[ai] = true;
                taken_point[fi] = Some(alive[ai]);
            }
        }
        let mut next_alive = Vec::new();
        let mut born_here = Vec::new();
        for (fi, p) in found.iter().enumerate() {
            let b = match taken_point[fi] {
                Some(b) => b,
                None => {
                    branches.push(BifurcationBranch {
                        parameter_axis: Vec::new(),
                        states: Vec::new(),
                        stability: Vec::new(),
                        unstable_dims: Vec::new(),
                        events: Vec::new(),
                    });
                    if step > 0 {
                        born_here.push(branches.len() - 1);
                    }
                    branches.len() - 1
                }
            };
            branches[b].parameter_axis.push(*eta);
            branches[b].states.push(p.state);
            branches[b].stability.push(p.stability);
            branches[b].unstable_dims.push(p.unstable_dimension());
            next_alive.push(b);
        }
        let died_here: Vec<usize> =
            alive.iter().zip(&taken_branch).filter(|(_, t)| !**t).map(|(b, _)| *b).collect();
        born.push(born_here);
        died.push(died_here);
        alive = next_alive;
    }

    let mut events = Vec::new();
    let etas: Vec<f64> = points.iter().map(|p| p.0).collect();
    for step in 1..points.len() {
        let mid = 0.5 * (etas[step - 1] + etas[step]);
        // Appearing pairs are compared at their first point, vanishing pairs
        // at their last.
        for (group, first) in [(&born[step], true), (&died[step], false)] {
            let ends: Vec<(usize, ClassicalState, Stability, usize)> = group
                .iter()
                .map(|&b| {
                    let br = &branches[b];
                    let k = if first { 0 } else { br.len() - 1 };
                    (b, br.states[k], br.stability[k], br.unstable_dims[k])
                })
                .collect();
            let mut used = vec![false; ends.len()];
            let mut reported: Vec<ClassicalState> = Vec::new();
            // Pairs with a stable member are matched before saddle pairs.
            for stable_pass in [true, false] {
                for i in 0..ends.len() {
                    for j in 0..ends.len() {
                        let (bi, si, ti, ui) = ends[i];
                        let (bj, sj, _, uj) = ends[j];
                        if i == j || used[i] || used[j] || uj != ui + 1 {
                            continue;
                        }
                        if (ti == Stability::Stable) != stable_pass || ti == Stability::Marginal {
                            continue;
                        }
                        if si.distance(&sj) > opts.fold_radius {
                            continue;
                        }
                        used[i] = true;
                        used[j] = true;
                        // A π-shifted twin of an already reported fold is the same event.
                        let twin = reported.iter().any(|r| r.distance(&si.pi_shifted()) <= opts.fold_radius);
                        reported.push(si);
                        if !twin {
                            let kind = if stable_pass { EventKind::SaddleNode } else { EventKind::Fold };
                            events.push(BifurcationEvent { eta: mid, kind, branches: vec![bi, bj] });
                        }
                    }
                }
            }
        }
    }
    for (b, br) in branches.iter().enumerate() {
        for k in 1..br.len() {
            let (a, c) = (br.stability[k - 1], br.stability[k]);
            if a != c && a != Stability::Marginal && c != Stability::Marginal {
                let eta = 0.5 * (br.parameter_axis[k - 1] + br.parameter_axis[k]);
                events.push(BifurcationEvent { eta, kind: EventKind::StabilityChange, branches: vec![b] });
            }
        }
    }
    events.sort_by(|a, b| a.eta.partial_cmp(&b.eta).expect("finite").then(a.branches.cmp(&b.branches)));
    for e in &events {
        for &b in &e.branches {
            branches[b].events.push(e.clone());
        }
    }
    BifurcationDiagram { branches, events, points }
}

/// Explicit RK4 trajectory of the mean-field equations; used to check that
/// the right-hand sides agree with direct time stepping.
pub fn integrate(start: ClassicalState, spec: &SystemSpec, dt: f64, steps: usize) -> Result<ClassicalState> {
    let mut x = start.to_vector();
    for _ in 0..steps {
        let k1 = eval(&x, spec)?;
        let k2 = eval(&(x + k1 * (dt / 2.0)), spec)?;
        let k3 = eval(&(x + k2 * (dt / 2.0)), spec)?;
        let k4 = eval(&(x + k3 * dt), spec)?;
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    }
    Ok(ClassicalState::from_vector(&x))
}

/// Reference parameters: `V = 1, Delta = 1, theta = π/4`, `gamma2 = 3` on
/// oscillator 1, all other rates 1.
pub fn reference_spec(kind: CouplingKind, coupling: f64, delta: [f64; 2]) -> SystemSpec {
    SystemSpec {
        gamma1: [1.0, 1.0],
        gamma2: [3.0, 1.0],
        delta,
        eta: [0.0, 0.0],
        theta: PI / 4.0,
        coupling,
        coupling_kind: kind,
        loss: [0.0, 0.0],
        truncation: crate::fock::FockDim::two_mode(2, 2).expect("valid"),
    }
}
