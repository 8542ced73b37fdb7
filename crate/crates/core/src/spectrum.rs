//! Stationary two-time correlations and power spectra.
//!
//! The correlation `g(tau) = Tr[a† e^{L tau}(a rho_ss)]` follows from the
//! quantum regression theorem. It is propagated with classical fourth-order
//! Runge-Kutta on the smallest block of `L` that contains `a rho_ss`, and
//! transformed with the one-sided convention
//! `S(omega) = 2 Re ∫_0^∞ g(tau) e^{-i omega tau} dtau`, which puts the peak of
//! a free oscillator at `+Delta`. The resolvent form
//! `S(omega) = 2 Re Tr[a† x]`, `(L - i omega) x = -a rho_ss`, is an
//! independent second path.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{dagger, expectation, mode_annihilation, DensityMatrix, Operator, C64};
use crate::liouvillian::{build_liouvillian, vectorize, Liouvillian};
use crate::observables::partial_trace;
use crate::sparse::{norm2, LuPattern, SparseMatrix};

/// Which field operator the spectrum is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "ModeRepr", into = "ModeRepr")]
pub enum SpectrumMode {
    /// `a1`.
    #[default]
    One,
    /// `a2`.
    Two,
    /// `(a1 + a2) / sqrt(2)`.
    Symmetric,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ModeRepr {
    Index(u8),
    Name(String),
}

impl TryFrom<ModeRepr> for SpectrumMode {
    type Error = Error;

    fn try_from(r: ModeRepr) -> Result<Self> {
        match r {
            ModeRepr::Index(i) => i.to_string().parse(),
            ModeRepr::Name(s) => s.parse(),
        }
    }
}

impl From<SpectrumMode> for ModeRepr {
    fn from(m: SpectrumMode) -> Self {
        match m {
            SpectrumMode::One => ModeRepr::Index(1),
            SpectrumMode::Two => ModeRepr::Index(2),
            SpectrumMode::Symmetric => ModeRepr::Name("symmetric".into()),
        }
    }
}

impl FromStr for SpectrumMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Self::One),
            "2" => Ok(Self::Two),
            "symmetric" | "s" => Ok(Self::Symmetric),
            other => Err(Error::InvalidSpec(format!("unknown spectrum mode `{other}`"))),
        }
    }
}

impl fmt::Display for SpectrumMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::One => "1",
            Self::Two => "2",
            Self::Symmetric => "symmetric",
        })
    }
}

impl SpectrumMode {
    /// Field operator on the space of `rho`.
    pub fn operator(&self, dim: &crate::fock::FockDim) -> Result<Operator> {
        match self {
            Self::One => mode_annihilation(dim, 0),
            Self::Two => mode_annihilation(dim, 1),
            Self::Symmetric => {
                let s = mode_annihilation(dim, 0)?.add(&mode_annihilation(dim, 1)?)?;
                Ok(s.scale(C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumOptions {
    /// Initial correlation window.
    pub tau_max: f64,
    /// Longest window reached by doubling before giving up.
    pub tau_limit: f64,
    /// Sampling interval of `g`.
    pub tau_step: f64,
    /// Required decay `|g(tau_max)| <= decay_tol |g(0)|`.
    pub decay_tol: f64,
    /// Bound on `||L rho|| / (||L||_F ||rho||_F)` for the input state.
    pub stationarity_tol: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_count: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            tau_max: 50.0,
            tau_limit: 1600.0,
            tau_step: 0.02,
            decay_tol: 1e-6,
            stationarity_tol: 1e-8,
            omega_min: -5.0,
            omega_max: 5.0,
            omega_count: 1001,
        }
    }
}

impl SpectrumOptions {
    pub fn omega_axis(&self) -> Vec<f64> {
        uniform(self.omega_min, self.omega_max, self.omega_count)
    }
}

fn uniform(min: f64, max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![min];
    }
    let h = (max - min) / (count - 1) as f64;
    (0..count).map(|i| min + i as f64 * h).collect()
}

/// Sampled stationary correlation `g(tau)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    pub tau: Vec<f64>,
    pub values: Vec<C64>,
    /// Internal integrator step.
    pub step: f64,
}

impl Correlation {
    /// `|g(tau_max)| / |g(0)|`, zero for an identically vanishing `g`.
    pub fn decay_ratio(&self) -> f64 {
        let g0 = self.values[0].norm();
        let last = self.values.last().expect("nonempty").norm();
        if g0 == 0.0 {
            if last == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            last / g0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub omega_axis: Vec<f64>,
    pub values: Vec<f64>,
    pub omega_obs: f64,
    pub mode: SpectrumMode,
}

impl SpectrumResult {
    fn new(omega_axis: Vec<f64>, values: Vec<f64>, mode: SpectrumMode) -> Self {
        let mut best = 0;
        for (i, v) in values.iter().enumerate() {
            if *v > values[best] {
                best = i;
            }
        }
        let omega_obs = omega_axis.get(best).copied().unwrap_or(f64::NAN);
        Self { omega_axis, values, omega_obs, mode }
    }

    pub fn peak_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `(1/2π) ∫ S dω` over the sampled window by the trapezoid rule.
    pub fn integrated_weight(&self) -> f64 {
        let w = &self.omega_axis;
        let s = &self.values;
        let mut acc = 0.0;
        for i in 1..w.len() {
            acc += 0.5 * (s[i] + s[i - 1]) * (w[i] - w[i - 1]);
        }
        acc / (2.0 * std::f64::consts::PI)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# omega_obs: {:.12e}", self.omega_obs).unwrap();
        writeln!(out, "# mode: {}", self.mode).unwrap();
        for (w, s) in self.omega_axis.iter().zip(&self.values) {
            writeln!(out, "{w:.12e} {s:.12e}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: String| Error::InvalidGrid(m);
        let mut mode = SpectrumMode::One;
        let mut omega_obs = None;
        let (mut omega, mut values) = (Vec::new(), Vec::new());
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(rest) = line.strip_prefix("# omega_obs:") {
                omega_obs = Some(rest.trim().parse::<f64>().map_err(|e| bad(e.to_string()))?);
            } else if let Some(rest) = line.strip_prefix("# mode:") {
                mode = rest.trim().parse()?;
            } else if !line.starts_with('#') {
                let mut it = line.split_whitespace().map(str::parse::<f64>);
                match (it.next(), it.next(), it.next()) {
                    (Some(Ok(w)), Some(Ok(s)), None) => {
                        omega.push(w);
                        values.push(s);
                    }
                    _ => return Err(bad(format!("malformed spectrum row `{line}`"))),
                }
            }
        }
        let omega_obs = omega_obs.ok_or_else(|| bad("missing omega_obs header".into()))?;
        Ok(Self { omega_axis: omega, values, omega_obs, mode })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

/// `a rho_ss` and the functional `x -> Tr[a† x]` restricted to the block of
/// `L` they live in.
struct Problem {
    matrix: SparseMatrix,
    initial: Vec<C64>,
    readout: Vec<(usize, C64)>,
    rate_scale: f64,
}

impl Problem {
    fn new(liouvillian: &Liouvillian, rho: &DensityMatrix, mode: SpectrumMode, stationarity_tol: f64) -> Result<Self> {
        if let (Some(spec), SpectrumMode::One | SpectrumMode::Two) = (liouvillian.spec(), mode) {
            if spec.is_separable() {
                // g depends only on the addressed oscillator.
                let k = if mode == SpectrumMode::One { 0 } else { 1 };
                let part = build_liouvillian(&spec.mode_factor(k)?)?;
                return Self::new(&part, &partial_trace(rho, k)?, SpectrumMode::One, stationarity_tol);
            }
        }
        if rho.dim() != liouvillian.dim() {
            return Err(Error::DimensionMismatch {
                left: liouvillian.dim().dims().to_vec(),
                right: rho.dim().dims().to_vec(),
            });
        }
        let l = liouvillian.matrix();
        let x = vectorize(rho.operator());
        let rel = norm2(&l.matvec(&x)) / (l.frobenius_norm().max(f64::MIN_POSITIVE) * norm2(&x));
        if !(rel <= stationarity_tol) {
            return Err(Error::NotStationary(rel));
        }
        let a = mode.operator(liouvillian.dim())?;
        let b = vectorize(&a.mul(rho.operator())?);
        let mut seeds: Vec<usize> = (0..b.len()).filter(|&i| b[i] != C64::new(0.0, 0.0)).collect();
        if seeds.is_empty() {
            seeds.push(0);
        }
        let sub = liouvillian.invariant_subspace(&seeds);
        let d = liouvillian.hilbert_dim();
        // Tr[A X] = sum_ij A_ij X_ji and X_ji sits at j + i*D.
        let readout = dagger(&a)
            .nonzeros()
            .into_iter()
            .filter_map(|(i, j, v)| sub.position(j + i * d).map(|p| (p, v)))
            .collect();
        let rate_scale = match liouvillian.spec() {
            Some(s) => s
                .gamma1
                .iter()
                .chain(&s.gamma2)
                .chain(&s.delta)
                .chain(&s.eta)
                .chain(&s.loss)
                .chain([&s.coupling])
                .fold(1.0f64, |m, v| m.max(v.abs())),
            None => l.max_abs().max(1.0),
        };
        Ok(Self { initial: sub.restrict(&b), matrix: sub.matrix().clone(), readout, rate_scale })
    }

    fn read(&self, x: &[C64]) -> C64 {
        self.readout.iter().map(|&(p, v)| v * x[p]).sum()
    }

    /// Fixed RK4 step: `0.01 / rate scale`, tightened to `2.5 / ||L||_inf` so
    /// every eigenvalue of the block lies inside the stability region.
    fn step(&self) -> f64 {
        let stiff = self.matrix.inf_norm();
        let h = 0.01 / self.rate_scale;
        if stiff > 0.0 { h.min(2.5 / stiff) } else { h }
    }
}

/// Fixed-step RK4 propagation of `dB/dtau = L[B]`, sampled every `stride`
/// steps.
struct Rk4<'a> {
    m: &'a SparseMatrix,
    h: f64,
    x: Vec<C64>,
    k: [Vec<C64>; 4],
    tmp: Vec<C64>,
}

impl<'a> Rk4<'a> {
    fn new(m: &'a SparseMatrix, h: f64, x: Vec<C64>) -> Self {
        let n = x.len();
        let z = || vec![C64::new(0.0, 0.0); n];
        Self { m, h, x, k: [z(), z(), z(), z()], tmp: z() }
    }

    fn advance(&mut self, steps: usize) {
        let h = C64::new(self.h, 0.0);
        let half = h * 0.5;
        for _ in 0..steps {
            let [k1, k2, k3, k4] = &mut self.k;
            self.m.matvec_into(&self.x, k1);
            for (t, (x, k)) in self.tmp.iter_mut().zip(self.x.iter().zip(k1.iter())) {
                *t = x + half * k;
            }
            self.m.matvec_into(&self.tmp, k2);
            for (t, (x, k)) in self.tmp.iter_mut().zip(self.x.iter().zip(k2.iter())) {
                *t = x + half * k;
            }
            self.m.matvec_into(&self.tmp, k3);
            for (t, (x, k)) in self.tmp.iter_mut().zip(self.x.iter().zip(k3.iter())) {
                *t = x + h * k;
            }
            self.m.matvec_into(&self.tmp, k4);
            let sixth = h / 6.0;
            for i in 0..self.x.len() {
                self.x[i] += sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
    }
}

/// Integrator steps per sampling interval and the resulting step size.
fn subdivide(interval: f64, max_step: f64) -> (usize, f64) {
    let n = (interval / max_step).ceil().max(1.0) as usize;
    (n, interval / n as f64)
}

/// `g(tau) = Tr[a† e^{L tau}(a rho_ss)]` on a uniform axis starting at zero.
pub fn two_time_correlation(
    liouvillian: &Liouvillian,
    rho_ss: &DensityMatrix,
    mode: SpectrumMode,
    tau_axis: &[f64],
) -> Result<Vec<C64>> {
    let dt = check_tau_axis(tau_axis)?;
    let problem = Problem::new(liouvillian, rho_ss, mode, SpectrumOptions::default().stationarity_tol)?;
    let (stride, h) = subdivide(dt, problem.step());
    let mut rk = Rk4::new(&problem.matrix, h, problem.initial.clone());
    let mut out = Vec::with_capacity(tau_axis.len());
    out.push(problem.read(&rk.x));
    for _ in 1..tau_axis.len() {
        rk.advance(stride);
        out.push(problem.read(&rk.x));
    }
    Ok(out)
}

fn check_tau_axis(tau: &[f64]) -> Result<f64> {
    if tau.len() < 2 || tau[0] != 0.0 {
        return Err(Error::InvalidGrid("tau axis must start at 0 with at least two points".into()));
    }
    let dt = tau[1] - tau[0];
    let uniform = tau
        .windows(2)
        .enumerate()
        .all(|(i, w)| (w[1] - w[0] - dt).abs() <= 1e-9 * dt.max(1.0) * (i + 1) as f64);
    if !(dt > 0.0) || !uniform {
        return Err(Error::InvalidGrid("tau axis must be uniform and increasing".into()));
    }
    Ok(dt)
}

/// Correlation over `[0, tau_max]`, doubling the window until `g` has decayed
/// or `tau_limit` is reached. The last window is returned either way; use
/// [`Correlation::decay_ratio`] or [`power_spectrum`] to check it.
pub fn stationary_correlation(
    liouvillian: &Liouvillian,
    rho_ss: &DensityMatrix,
    mode: SpectrumMode,
    opts: &SpectrumOptions,
) -> Result<Correlation> {
    let problem = Problem::new(liouvillian, rho_ss, mode, opts.stationarity_tol)?;
    let (stride, h) = subdivide(opts.tau_step, problem.step());
    let mut rk = Rk4::new(&problem.matrix, h, problem.initial.clone());
    let mut values = vec![problem.read(&rk.x)];
    let mut window = opts.tau_max;
    loop {
        let target = (window / opts.tau_step).round() as usize;
        while values.len() <= target {
            rk.advance(stride);
            values.push(problem.read(&rk.x));
        }
        let corr = Correlation {
            tau: (0..values.len()).map(|i| i as f64 * opts.tau_step).collect(),
            values: values.clone(),
            step: h,
        };
        if corr.decay_ratio() <= opts.decay_tol || 2.0 * window > opts.tau_limit {
            return Ok(corr);
        }
        window *= 2.0;
    }
}

/// `S(omega) = 2 Re ∫_0^T g(tau) e^{-i omega tau} dtau` by the trapezoid rule.
pub fn power_spectrum(
    correlation: &[C64],
    tau_axis: &[f64],
    omega_axis: &[f64],
    mode: SpectrumMode,
    decay_tol: f64,
) -> Result<SpectrumResult> {
    if correlation.len() != tau_axis.len() {
        return Err(Error::InvalidGrid("correlation and tau axis differ in length".into()));
    }
    let dt = check_tau_axis(tau_axis)?;
    let g0 = correlation[0].norm();
    let last = correlation.last().expect("checked length").norm();
    if last > decay_tol * g0 {
        return Err(Error::WindowTooShort(if g0 > 0.0 { last / g0 } else { f64::INFINITY }));
    }
    let n = correlation.len();
    let values = omega_axis
        .iter()
        .map(|&w| {
            // e^{-i w tau_k} by recurrence, refreshed periodically.
            let rot = C64::from_polar(1.0, -w * dt);
            let mut phase = C64::new(1.0, 0.0);
            let mut acc = C64::new(0.0, 0.0);
            for (k, g) in correlation.iter().enumerate() {
                if k % 256 == 0 {
                    phase = C64::from_polar(1.0, -w * tau_axis[k]);
                }
                let weight = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
                acc += g * phase * weight;
                phase *= rot;
            }
            2.0 * (acc * dt).re
        })
        .collect();
    Ok(SpectrumResult::new(omega_axis.to_vec(), values, mode))
}

/// Regression-theorem spectrum with the default window and frequency grid.
pub fn spectrum(
    liouvillian: &Liouvillian,
    rho_ss: &DensityMatrix,
    mode: SpectrumMode,
    opts: &SpectrumOptions,
) -> Result<(SpectrumResult, Correlation)> {
    let corr = stationary_correlation(liouvillian, rho_ss, mode, opts)?;
    let s = power_spectrum(&corr.values, &corr.tau, &opts.omega_axis(), mode, opts.decay_tol)?;
    Ok((s, corr))
}

/// `S(omega) = 2 Re Tr[a† x]` with `(L - i omega) x = -vec(a rho_ss)`, one
/// sparse solve per frequency.
pub fn spectrum_via_resolvent(
    liouvillian: &Liouvillian,
    rho_ss: &DensityMatrix,
    mode: SpectrumMode,
    omega_axis: &[f64],
) -> Result<SpectrumResult> {
    let problem = Problem::new(liouvillian, rho_ss, mode, SpectrumOptions::default().stationarity_tol)?;
    let b_norm = norm2(&problem.initial);
    if b_norm == 0.0 {
        return Ok(SpectrumResult::new(omega_axis.to_vec(), vec![0.0; omega_axis.len()], mode));
    }
    let one = C64::new(1.0, 0.0);
    let shifted = |w: f64| problem.matrix.affine(C64::new(0.0, -w), one);
    let pattern = match omega_axis.first() {
        Some(&w) => LuPattern::analyze(&shifted(w)).map_err(|_| Error::SingularResolvent(w))?,
        None => return Ok(SpectrumResult::new(Vec::new(), Vec::new(), mode)),
    };
    let values = omega_axis
        .iter()
        .map(|&w| {
            let lu = pattern.factor(&shifted(w)).map_err(|_| Error::SingularResolvent(w))?;
            let mut x: Vec<C64> = problem.initial.iter().map(|v| -v).collect();
            lu.solve_in_place(&mut x);
            let size = norm2(&x);
            if !size.is_finite() || size > 1e12 * b_norm {
                return Err(Error::SingularResolvent(w));
            }
            Ok(2.0 * problem.read(&x).re)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(SpectrumResult::new(omega_axis.to_vec(), values, mode))
}

/// `<a† a>` of the selected field, the `tau = 0` value of `g`.
pub fn occupation(rho: &DensityMatrix, mode: SpectrumMode) -> Result<f64> {
    let a = mode.operator(rho.dim())?;
    Ok(expectation(rho, &dagger(&a).mul(&a)?)?.re)
}
