//! Scenario files and the figure pipelines they drive.
//!
//! A scenario is one TOML document:
//!
//! ```toml
//! name = "fig3a"
//! kind = "entrainment-sweep"      # wigner | spectrum | bifurcation | entrainment-sweep
//! description = "free text"
//!
//! [system]                        # a SystemSpec
//! gamma1 = [1.0, 1.0]
//! gamma2 = [3.0, 3.0]
//! delta = [0.3, 0.3]
//! coupling_kind = "none"
//! truncation = [15, 15]
//!
//! [sweep]                         # optional; required for entrainment-sweep
//! parameter = "eta"               # gamma1 gamma2 delta eta theta coupling loss truncation
//! values = [0.0, 0.5, 1.0, 2.0]
//!
//! [wigner]                        # optional settings per kind
//! [spectrum]
//! [bifurcation]
//! [output]
//! dir = "out/fig3a"
//! plot = true
//! ```
//!
//! Every point of a sweep is computed in memory by a pure function; a single
//! writer then emits the files in sweep order and finishes with
//! `manifest.toml`, which lists every file with its SHA-256.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classical::{bifurcation_sweep, BifurcationDiagram, Stability, SweepOptions};
use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, FockDim};
use crate::liouvillian::{build_liouvillian, SystemSpec};
use crate::observables::{
    local_maxima, partial_trace, point_reflection_asymmetry, rotational_asymmetry, wigner, AxisSpec,
};
use crate::spectrum::{occupation, spectrum, spectrum_via_resolvent, SpectrumMode, SpectrumOptions, SpectrumResult};
use crate::steadystate::{solve_steady_state, SolverInfo};
use crate::svg::{line_plot, wigner_heatmap, Series};

/// Environment variable that overrides the output directory of a scenario.
pub const OUTPUT_DIR_ENV: &str = "QVDP_OUTPUT_DIR";

/// Name of the manifest written last into every output directory.
pub const MANIFEST_FILE: &str = "manifest.toml";

/// Parameters a sweep may vary. Pair-valued fields are set on both oscillators.
pub const SWEEP_PARAMETERS: [&str; 8] = ["gamma1", "gamma2", "delta", "eta", "theta", "coupling", "loss", "truncation"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Wigner,
    Spectrum,
    Bifurcation,
    EntrainmentSweep,
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScenarioKind::Wigner => "wigner",
            ScenarioKind::Spectrum => "spectrum",
            ScenarioKind::Bifurcation => "bifurcation",
            ScenarioKind::EntrainmentSweep => "entrainment-sweep",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WignerSettings {
    /// Oscillator whose reduced state is shown (1 or 2).
    pub mode: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub points: usize,
    /// Local maxima below this fraction of `max W` are ignored.
    pub peak_threshold: f64,
}

impl Default for WignerSettings {
    fn default() -> Self {
        Self { mode: 1, x_min: -5.0, x_max: 5.0, p_min: -5.0, p_max: 5.0, points: 201, peak_threshold: 0.01 }
    }
}

impl WignerSettings {
    pub fn axes(&self) -> Result<(AxisSpec, AxisSpec)> {
        Ok((AxisSpec::new(self.x_min, self.x_max, self.points)?, AxisSpec::new(self.p_min, self.p_max, self.points)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSettings {
    pub mode: SpectrumMode,
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_points: usize,
    pub tau_max: f64,
    pub tau_limit: f64,
    pub tau_step: f64,
    /// Also evaluate the resolvent path and report its peak deviation.
    pub resolvent_check: bool,
}

impl Default for SpectrumSettings {
    fn default() -> Self {
        let o = SpectrumOptions::default();
        Self {
            mode: SpectrumMode::One,
            omega_min: o.omega_min,
            omega_max: o.omega_max,
            omega_points: o.omega_count,
            tau_max: o.tau_max,
            tau_limit: o.tau_limit,
            tau_step: o.tau_step,
            resolvent_check: false,
        }
    }
}

impl SpectrumSettings {
    pub fn options(&self) -> SpectrumOptions {
        SpectrumOptions {
            tau_max: self.tau_max,
            tau_limit: self.tau_limit,
            tau_step: self.tau_step,
            omega_min: self.omega_min,
            omega_max: self.omega_max,
            omega_count: self.omega_points,
            ..SpectrumOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BifurcationSettings {
    pub eta_min: f64,
    pub eta_max: f64,
    pub eta_step: f64,
}

impl Default for BifurcationSettings {
    fn default() -> Self {
        Self { eta_min: 0.0, eta_max: 3.0, eta_step: 0.01 }
    }
}

impl BifurcationSettings {
    pub fn etas(&self) -> Vec<f64> {
        let n = ((self.eta_max - self.eta_min) / self.eta_step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.eta_min + k as f64 * self.eta_step).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    /// Output directory; defaults to `out/<name>`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Also emit SVG previews.
    pub plot: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub system: SystemSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wigner: Option<WignerSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bifurcation: Option<BifurcationSettings>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn config_error(path: impl Into<String>, message: impl std::fmt::Display) -> Error {
    Error::Config { path: path.into(), message: message.to_string() }
}

impl Scenario {
    /// Parse and validate a scenario document.
    pub fn from_toml(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| config_error("<document>", e.message()))?;
        let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(if path == "." { "<document>".into() } else { path }, e.inner().message())
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| config_error("<document>", e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn wigner_settings(&self) -> WignerSettings {
        self.wigner.clone().unwrap_or_default()
    }

    pub fn spectrum_settings(&self) -> SpectrumSettings {
        self.spectrum.clone().unwrap_or_default()
    }

    pub fn bifurcation_settings(&self) -> BifurcationSettings {
        self.bifurcation.clone().unwrap_or_default()
    }

    /// Semantic checks, each reported with the offending field path.
    pub fn validate(&self) -> Result<()> {
        let safe = |c: char| c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.';
        if self.name.is_empty() || !self.name.chars().all(safe) || self.name.starts_with('.') {
            return Err(config_error("name", "must be nonempty and use only [A-Za-z0-9._-]"));
        }
        self.system.validate().map_err(|e| config_error("system", e))?;
        if let Some(sweep) = &self.sweep {
            if !SWEEP_PARAMETERS.contains(&sweep.parameter.as_str()) {
                return Err(config_error(
                    "sweep.parameter",
                    format!("`{}` is not one of {}", sweep.parameter, SWEEP_PARAMETERS.join(", ")),
                ));
            }
            if sweep.values.is_empty() {
                return Err(config_error("sweep.values", "must be nonempty"));
            }
            for (k, &v) in sweep.values.iter().enumerate() {
                let path = format!("sweep.values[{k}]");
                if !v.is_finite() {
                    return Err(config_error(path, "must be finite"));
                }
                if sweep.parameter == "truncation" && (v.fract() != 0.0 || v < 2.0) {
                    return Err(config_error(path, "truncation must be an integer >= 2"));
                }
                self.point_spec(v).map_err(|e| config_error(path, e))?;
            }
        }
        match self.kind {
            ScenarioKind::Bifurcation => {
                if self.sweep.is_some() {
                    return Err(config_error("sweep", "bifurcation scenarios sweep eta through [bifurcation]"));
                }
                if self.system.n_modes() != 2 {
                    return Err(config_error("system.truncation", "bifurcation needs two oscillators"));
                }
                let b = self.bifurcation_settings();
                if !(b.eta_step > 0.0) || !(b.eta_max > b.eta_min) || !b.eta_min.is_finite() || !b.eta_max.is_finite() {
                    return Err(config_error("bifurcation", "need eta_min < eta_max and eta_step > 0"));
                }
            }
            ScenarioKind::EntrainmentSweep if self.sweep.is_none() => {
                return Err(config_error("sweep", "entrainment-sweep requires a [sweep] table"));
            }
            _ => {}
        }
        if let Some(w) = &self.wigner {
            if w.mode != 1 && w.mode != 2 {
                return Err(config_error("wigner.mode", "must be 1 or 2"));
            }
            w.axes().map_err(|e| config_error("wigner", e))?;
        }
        if matches!(self.kind, ScenarioKind::Wigner) && self.wigner_settings().mode > self.system.n_modes() {
            return Err(config_error("wigner.mode", "oscillator 2 requested for a single-mode system"));
        }
        if let Some(s) = &self.spectrum {
            if !(s.omega_max > s.omega_min) || s.omega_points < 2 {
                return Err(config_error("spectrum", "need omega_min < omega_max and omega_points >= 2"));
            }
            if !(s.tau_step > 0.0) || !(s.tau_max > 0.0) || s.tau_limit < s.tau_max {
                return Err(config_error("spectrum", "need tau_step > 0 and 0 < tau_max <= tau_limit"));
            }
        }
        if matches!(self.kind, ScenarioKind::Spectrum | ScenarioKind::EntrainmentSweep)
            && self.spectrum_settings().mode != SpectrumMode::One
            && self.system.n_modes() != 2
        {
            return Err(config_error("spectrum.mode", "single-mode systems only have mode 1"));
        }
        Ok(())
    }

    /// Spec of one sweep point.
    pub fn point_spec(&self, value: f64) -> Result<SystemSpec> {
        let mut s = self.system.clone();
        let Some(sweep) = &self.sweep else { return Ok(s) };
        match sweep.parameter.as_str() {
            "gamma1" => s.gamma1 = [value; 2],
            "gamma2" => s.gamma2 = [value; 2],
            "delta" => s.delta = [value; 2],
            "eta" => s.eta = [value; 2],
            "theta" => s.theta = value,
            "coupling" => s.coupling = value,
            "loss" => s.loss = [value; 2],
            "truncation" => {
                s.truncation = FockDim::new(vec![value as usize; s.n_modes()])?;
            }
            other => return Err(Error::InvalidSpec(format!("unknown sweep parameter `{other}`"))),
        }
        s.validate()?;
        Ok(s)
    }

    /// Apply command-line overrides.
    pub fn with_overrides(mut self, truncation: Option<usize>, mode: Option<usize>) -> Result<Self> {
        if let Some(n) = truncation {
            self.system.truncation =
                FockDim::new(vec![n; self.system.n_modes()]).map_err(|e| config_error("--truncation", e))?;
        }
        if let Some(m) = mode {
            if m != 1 && m != 2 {
                return Err(config_error("--mode", "must be 1 or 2"));
            }
            let mut w = self.wigner_settings();
            w.mode = m;
            self.wigner = Some(w);
            let mut s = self.spectrum_settings();
            s.mode = if m == 1 { SpectrumMode::One } else { SpectrumMode::Two };
            self.spectrum = Some(s);
        }
        self.validate()?;
        Ok(self)
    }

    /// Output directory: explicit argument, then the environment override,
    /// then `[output] dir`, then `out/<name>`.
    pub fn output_dir(&self, explicit: Option<&Path>) -> PathBuf {
        if let Some(p) = explicit {
            return p.to_path_buf();
        }
        if let Some(p) = std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()) {
            return PathBuf::from(p);
        }
        self.output.dir.clone().unwrap_or_else(|| Path::new("out").join(&self.name))
    }

    /// Sweep values, or a single `None` point without a sweep.
    pub fn points(&self) -> Vec<Option<f64>> {
        match &self.sweep {
            Some(s) => s.values.iter().map(|&v| Some(v)).collect(),
            None => vec![None],
        }
    }
}

/// One emitted file held in memory until the writer runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: Vec<u8>,
}

impl Artifact {
    fn text(name: impl Into<String>, contents: String) -> Self {
        Self { name: name.into(), contents: contents.into_bytes() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverInfo>,
}

/// Result of one sweep point: its files, a summary row and diagnostics.
#[derive(Debug, Clone)]
pub struct PointOutcome {
    pub record: PointRecord,
    pub artifacts: Vec<Artifact>,
    pub summary_row: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub duration_seconds: f64,
    pub workers: usize,
    pub points_failed: usize,
    pub scenario: Scenario,
    pub outputs: Vec<OutputEntry>,
    pub points: Vec<PointRecord>,
}

impl RunManifest {
    pub fn all_succeeded(&self) -> bool {
        self.points_failed == 0
    }

    /// Process exit code: 0 when every point succeeded, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_succeeded() { 0 } else { 2 }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| config_error("manifest", e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| config_error(path.display().to_string(), e.message()))
    }

    pub fn checksum(&self, path: &str) -> Option<&str> {
        self.outputs.iter().find(|o| o.path == path).map(|o| o.sha256.as_str())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn point_suffix(scenario: &Scenario, value: Option<f64>) -> String {
    match (value, &scenario.sweep) {
        (Some(v), Some(s)) => format!("_{}_{}", s.parameter, format_value(v)),
        _ => String::new(),
    }
}

fn format_value(v: f64) -> String {
    let s = format!("{v:.4}");
    s.trim_end_matches('0').trim_end_matches('.').replace('-', "m")
}

fn steady_state(spec: &SystemSpec) -> Result<(crate::liouvillian::Liouvillian, DensityMatrix, SolverInfo)> {
    let l = build_liouvillian(spec)?;
    let ss = solve_steady_state(&l)?;
    Ok((l, ss.rho, ss.solver_info))
}

fn reduced(rho: &DensityMatrix, mode: usize) -> Result<DensityMatrix> {
    if rho.dim().n_modes() == 1 { Ok(rho.clone()) } else { partial_trace(rho, mode - 1) }
}

/// Header of the per-kind summary CSV.
fn summary_header(scenario: &Scenario) -> &'static str {
    match scenario.kind {
        ScenarioKind::Wigner => "label,value,n_mode,w_max,w_min,rotational_asymmetry,peaks,reflection_asymmetry,residual",
        ScenarioKind::Spectrum | ScenarioKind::EntrainmentSweep => {
            "label,value,omega_obs,peak,occupation,weight,resolvent_peak_deviation"
        }
        ScenarioKind::Bifurcation => "",
    }
}

fn wigner_point(scenario: &Scenario, value: Option<f64>, plot: bool) -> Result<(Vec<Artifact>, String, SolverInfo)> {
    let spec = match value {
        Some(v) => scenario.point_spec(v)?,
        None => scenario.system.clone(),
    };
    let settings = scenario.wigner_settings();
    let (_, rho, info) = steady_state(&spec)?;
    let r = reduced(&rho, settings.mode)?;
    let (x, p) = settings.axes()?;
    let grid = wigner(&r, &x, &p)?;
    let suffix = point_suffix(scenario, value);
    let stem = format!("wigner_mode{}{suffix}", settings.mode);
    let peaks = local_maxima(&grid, settings.peak_threshold);
    let n = occupation(&r, SpectrumMode::One)?;
    let row = format!(
        "{},{},{:.10e},{:.10e},{:.10e},{:.6e},{},{:.6e},{:.3e}",
        if suffix.is_empty() { "base" } else { &suffix[1..] },
        value.map(|v| v.to_string()).unwrap_or_default(),
        n,
        grid.max_value(),
        grid.min_value(),
        rotational_asymmetry(&grid)?,
        peaks.len(),
        point_reflection_asymmetry(&grid),
        info.relative_residual
    );
    let mut files = vec![Artifact::text(format!("{stem}.dat"), grid.to_text())];
    if plot {
        let title = format!("{} W(x, p), oscillator {}{}", scenario.name, settings.mode, suffix.replace('_', " "));
        files.push(Artifact::text(format!("{stem}.svg"), wigner_heatmap(&grid, &title)));
    }
    Ok((files, row, info))
}

fn spectrum_point(scenario: &Scenario, value: Option<f64>, plot: bool) -> Result<(Vec<Artifact>, String, SolverInfo)> {
    let spec = match value {
        Some(v) => scenario.point_spec(v)?,
        None => scenario.system.clone(),
    };
    let settings = scenario.spectrum_settings();
    let (l, rho, info) = steady_state(&spec)?;
    let (s, _) = spectrum(&l, &rho, settings.mode, &settings.options())?;
    let deviation = if settings.resolvent_check {
        let r = spectrum_via_resolvent(&l, &rho, settings.mode, &s.omega_axis)?;
        let k = s.values.iter().enumerate().fold(0, |b, (i, v)| if *v > s.values[b] { i } else { b });
        format!("{:.6e}", (r.values[k] - s.values[k]).abs() / s.values[k].abs())
    } else {
        String::new()
    };
    let suffix = point_suffix(scenario, value);
    let stem = format!("spectrum_mode{}{suffix}", settings.mode);
    let row = format!(
        "{},{},{:.10e},{:.10e},{:.10e},{:.10e},{deviation}",
        if suffix.is_empty() { "base" } else { &suffix[1..] },
        value.map(|v| v.to_string()).unwrap_or_default(),
        s.omega_obs,
        s.peak_value(),
        occupation(&rho, settings.mode)?,
        s.integrated_weight()
    );
    let mut files = vec![Artifact::text(format!("{stem}.dat"), s.to_text())];
    if plot {
        files.push(Artifact::text(format!("{stem}.svg"), spectrum_svg(&format!("{}{}", scenario.name, suffix), &[&s])));
    }
    Ok((files, row, info))
}

fn spectrum_svg(title: &str, spectra: &[&SpectrumResult]) -> String {
    let series: Vec<Series> = spectra
        .iter()
        .map(|s| {
            Series::new(
                format!("omega_obs = {:.3}", s.omega_obs),
                s.omega_axis.iter().copied().zip(s.values.iter().copied()).collect(),
            )
        })
        .collect();
    line_plot(&series, title, "omega / gamma1", "S(omega)")
}

/// Compute one sweep point without touching the filesystem.
pub fn run_point(scenario: &Scenario, value: Option<f64>, plot: bool) -> PointOutcome {
    let suffix = point_suffix(scenario, value);
    let label = if suffix.is_empty() { "base".to_string() } else { suffix[1..].to_string() };
    let result = match scenario.kind {
        ScenarioKind::Wigner => wigner_point(scenario, value, plot),
        ScenarioKind::Spectrum | ScenarioKind::EntrainmentSweep => spectrum_point(scenario, value, plot),
        ScenarioKind::Bifurcation => Err(Error::InvalidSpec("bifurcation scenarios have no sweep points".into())),
    };
    match result {
        Ok((artifacts, row, info)) => PointOutcome {
            record: PointRecord { label, value, ok: true, error: None, solver: Some(info) },
            artifacts,
            summary_row: Some(row),
        },
        Err(e) => PointOutcome {
            record: PointRecord { label, value, ok: false, error: Some(e.to_string()), solver: None },
            artifacts: Vec::new(),
            summary_row: None,
        },
    }
}

fn bifurcation_artifacts(scenario: &Scenario, diagram: &BifurcationDiagram, plot: bool) -> Vec<Artifact> {
    let mut files = vec![
        Artifact::text("branches.csv", branches_csv(diagram)),
        Artifact::text("events.csv", diagram.events_csv()),
    ];
    if plot {
        let pick: [(&str, fn(&crate::classical::ClassicalState) -> f64); 4] =
            [("R1", |s| s.r1), ("R2", |s| s.r2), ("phi1", |s| s.phi1), ("phi2", |s| s.phi2)];
        for (name, f) in pick {
            let mut series = Vec::new();
            for (b, br) in diagram.branches.iter().enumerate() {
                // Stable segments solid, everything else dashed; NaN splits runs.
                for stable in [true, false] {
                    let pts: Vec<(f64, f64)> = br
                        .parameter_axis
                        .iter()
                        .zip(&br.states)
                        .zip(&br.stability)
                        .map(|((e, s), st)| if (*st == Stability::Stable) == stable { (*e, f(s)) } else { (f64::NAN, f64::NAN) })
                        .collect();
                    if pts.iter().any(|p| p.0.is_finite()) {
                        let label = format!("branch {b}{}", if stable { "" } else { " (unstable)" });
                        let s = Series::new(label, pts);
                        series.push(if stable { s } else { s.dashed() });
                    }
                }
            }
            files.push(Artifact::text(
                format!("bifurcation_{name}.svg"),
                line_plot(&series, &format!("{} {name}", scenario.name), "eta / gamma1", name),
            ));
        }
    }
    files
}

/// Branch points as CSV: `eta,R1,R2,phi1,phi2,stability,branch`.
pub fn branches_csv(diagram: &BifurcationDiagram) -> String {
    let mut out = String::from("eta,R1,R2,phi1,phi2,stability,branch\n");
    for (k, b) in diagram.branches.iter().enumerate() {
        for line in b.to_csv().lines().skip(1) {
            writeln!(out, "{line},{k}").unwrap();
        }
    }
    out
}

/// Run a scenario on one worker.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path, plot: bool) -> Result<RunManifest> {
    run_sweep_parallel(scenario, out_dir, 1, plot)
}

/// Run a scenario with sweep points distributed over `workers` threads.
/// Outputs are identical for every worker count.
pub fn run_sweep_parallel(scenario: &Scenario, out_dir: &Path, workers: usize, plot: bool) -> Result<RunManifest> {
    if workers == 0 {
        return Err(config_error("--workers", "must be >= 1"));
    }
    scenario.validate()?;
    let plot = plot || scenario.output.plot;
    let start = Instant::now();
    let mut artifacts = Vec::new();
    let mut records = Vec::new();
    match scenario.kind {
        ScenarioKind::Bifurcation => {
            let b = scenario.bifurcation_settings();
            let outcome = bifurcation_sweep(&scenario.system, &b.etas(), &SweepOptions::default());
            let ok = outcome.is_ok();
            let (files, error) = match outcome {
                Ok(d) => (bifurcation_artifacts(scenario, &d, plot), None),
                Err(e) => (Vec::new(), Some(e.to_string())),
            };
            artifacts.extend(files);
            records.push(PointRecord { label: "eta-sweep".into(), value: None, ok, error, solver: None });
        }
        _ => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| config_error("--workers", e))?;
            let outcomes: Vec<PointOutcome> =
                pool.install(|| scenario.points().into_par_iter().map(|v| run_point(scenario, v, plot)).collect());
            let mut summary = format!("{}\n", summary_header(scenario));
            let mut spectra = Vec::new();
            for o in outcomes {
                if let Some(row) = &o.summary_row {
                    summary.push_str(row);
                    summary.push('\n');
                }
                if plot && scenario.kind != ScenarioKind::Wigner {
                    if let Some(a) = o.artifacts.iter().find(|a| a.name.ends_with(".dat")) {
                        if let Ok(s) = SpectrumResult::from_text(&String::from_utf8_lossy(&a.contents)) {
                            spectra.push(s);
                        }
                    }
                }
                artifacts.extend(o.artifacts);
                records.push(o.record);
            }
            artifacts.push(Artifact::text("summary.csv", summary));
            if spectra.len() > 1 {
                let refs: Vec<&SpectrumResult> = spectra.iter().collect();
                artifacts.push(Artifact::text("spectra.svg", spectrum_svg(&scenario.name, &refs)));
            }
        }
    }
    write_outputs(scenario, out_dir, workers, start, artifacts, records)
}

/// Single writer: remove files of a previous manifest, write artifacts in
/// order, then the manifest.
fn write_outputs(
    scenario: &Scenario,
    out_dir: &Path,
    workers: usize,
    start: Instant,
    artifacts: Vec<Artifact>,
    points: Vec<PointRecord>,
) -> Result<RunManifest> {
    fs::create_dir_all(out_dir)?;
    let manifest_path = out_dir.join(MANIFEST_FILE);
    if let Ok(old) = RunManifest::read(&manifest_path) {
        for o in &old.outputs {
            let p = out_dir.join(&o.path);
            if p.is_file() {
                fs::remove_file(p)?;
            }
        }
    }
    let mut outputs = Vec::with_capacity(artifacts.len());
    for a in &artifacts {
        fs::write(out_dir.join(&a.name), &a.contents)?;
        outputs.push(OutputEntry { path: a.name.clone(), bytes: a.contents.len() as u64, sha256: sha256_hex(&a.contents) });
    }
    let manifest = RunManifest {
        tool: "qvdp".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        duration_seconds: start.elapsed().as_secs_f64(),
        workers,
        points_failed: points.iter().filter(|p| !p.ok).count(),
        scenario: scenario.clone(),
        outputs,
        points,
    };
    fs::write(&manifest_path, manifest.to_toml()?)?;
    Ok(manifest)
}

/// Scenario files shipped with the crate, by file stem.
pub const BUNDLED: [(&str, &str); 26] = [
    ("fig1", include_str!("../scenarios/fig1.toml")),
    ("fig2a", include_str!("../scenarios/fig2a.toml")),
    ("fig2b", include_str!("../scenarios/fig2b.toml")),
    ("fig2c", include_str!("../scenarios/fig2c.toml")),
    ("fig2d", include_str!("../scenarios/fig2d.toml")),
    ("fig2e", include_str!("../scenarios/fig2e.toml")),
    ("fig2f", include_str!("../scenarios/fig2f.toml")),
    ("fig2g", include_str!("../scenarios/fig2g.toml")),
    ("fig2h", include_str!("../scenarios/fig2h.toml")),
    ("fig2i", include_str!("../scenarios/fig2i.toml")),
    ("fig3a", include_str!("../scenarios/fig3a.toml")),
    ("fig3b", include_str!("../scenarios/fig3b.toml")),
    ("fig4", include_str!("../scenarios/fig4.toml")),
    ("fig5", include_str!("../scenarios/fig5.toml")),
    ("fig6", include_str!("../scenarios/fig6.toml")),
    ("fig7a", include_str!("../scenarios/fig7a.toml")),
    ("fig7b", include_str!("../scenarios/fig7b.toml")),
    ("fig7c", include_str!("../scenarios/fig7c.toml")),
    ("fig7d", include_str!("../scenarios/fig7d.toml")),
    ("fig7e", include_str!("../scenarios/fig7e.toml")),
    ("fig7f", include_str!("../scenarios/fig7f.toml")),
    ("fig7g", include_str!("../scenarios/fig7g.toml")),
    ("fig7h", include_str!("../scenarios/fig7h.toml")),
    ("fig7i", include_str!("../scenarios/fig7i.toml")),
    ("fig8a", include_str!("../scenarios/fig8a.toml")),
    ("fig8b", include_str!("../scenarios/fig8b.toml")),
];

/// A bundled scenario by name.
pub fn bundled(name: &str) -> Result<Scenario> {
    let (_, text) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| config_error("<scenario>", format!("no bundled scenario `{name}`")))?;
    Scenario::from_toml(text)
}

/// Load a scenario from a path, falling back to a bundled name.
pub fn resolve(arg: &str) -> Result<Scenario> {
    let path = Path::new(arg);
    if path.is_file() {
        return Scenario::load(path);
    }
    match bundled(arg) {
        Ok(s) => Ok(s),
        Err(_) => Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("`{arg}` is neither a file nor a bundled scenario"),
        ))),
    }
}
