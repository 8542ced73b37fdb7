//! Reduced states, Wigner functions and phase-space symmetry measures.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, FockDim, Operator, C64};

/// Trace out every mode except `keep`.
pub fn partial_trace(state: &DensityMatrix, keep: usize) -> Result<DensityMatrix> {
    let dim = state.dim();
    if dim.n_modes() != 2 {
        return Err(Error::InvalidDimension(format!(
            "partial trace needs a two-mode state, got {:?}",
            dim.dims()
        )));
    }
    if keep > 1 {
        return Err(Error::InvalidDimension(format!("mode index {keep} out of range")));
    }
    let (n1, n2) = (dim.dims()[0], dim.dims()[1]);
    let rho = state.operator().matrix();
    let n_keep = dim.dims()[keep];
    let mut out = DMatrix::<C64>::zeros(n_keep, n_keep);
    for i in 0..n_keep {
        for j in 0..n_keep {
            let mut acc = C64::new(0.0, 0.0);
            if keep == 0 {
                for k in 0..n2 {
                    acc += rho[(i * n2 + k, j * n2 + k)];
                }
            } else {
                for k in 0..n1 {
                    acc += rho[(k * n2 + i, k * n2 + j)];
                }
            }
            out[(i, j)] = acc;
        }
    }
    DensityMatrix::new(Operator::from_matrix(FockDim::single(n_keep)?, out)?)
}

/// Uniform axis `[min, max]` with `count` samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 || !(max > min) || !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidGrid(format!("axis [{min}, {max}] with {count} points")));
        }
        Ok(Self { min, max, count })
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.count).map(|i| self.min + i as f64 * h).collect()
    }
}

impl Default for AxisSpec {
    /// 201 points over `[-5, 5]`.
    fn default() -> Self {
        Self { min: -5.0, max: 5.0, count: 201 }
    }
}

/// Wigner function sampled on a rectangular grid, normalized so that
/// `∫∫ W dx dp = 1`. Values are stored row-major with `p` as the row index.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub x: AxisSpec,
    pub p: AxisSpec,
    values: Vec<f64>,
}

impl WignerGrid {
    pub fn from_values(x: AxisSpec, p: AxisSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != x.count * p.count {
            return Err(Error::InvalidGrid(format!(
                "{} values for a {}x{} grid",
                values.len(),
                p.count,
                x.count
            )));
        }
        Ok(Self { x, p, values })
    }

    pub fn x_axis(&self) -> Vec<f64> {
        self.x.points()
    }

    pub fn p_axis(&self) -> Vec<f64> {
        self.p.points()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at column `ix` (x) and row `ip` (p).
    pub fn at(&self, ix: usize, ip: usize) -> f64 {
        self.values[ip * self.x.count + ix]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Riemann sum `sum W dx dp`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.x.step() * self.p.step()
    }

    /// `∫ W dp` at each x sample.
    pub fn x_marginal(&self) -> Vec<f64> {
        let dp = self.p.step();
        (0..self.x.count)
            .map(|ix| (0..self.p.count).map(|ip| self.at(ix, ip)).sum::<f64>() * dp)
            .collect()
    }

    /// Linear combination `a * self + b * other` on identical grids.
    pub fn combine(&self, a: f64, other: &WignerGrid, b: f64) -> Result<WignerGrid> {
        if self.x != other.x || self.p != other.p {
            return Err(Error::InvalidGrid("grids differ".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(u, v)| a * u + b * v).collect();
        Ok(Self { x: self.x, p: self.p, values })
    }

    /// Plain-text grid file: two axis header lines, then one row per p sample.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# x: {} {} {}", fmt_num(self.x.min), fmt_num(self.x.max), self.x.count);
        let _ = writeln!(s, "# p: {} {} {}", fmt_num(self.p.min), fmt_num(self.p.max), self.p.count);
        for row in self.values.chunks(self.x.count) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.12e}")).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let x = parse_axis_header(lines.next(), "x")?;
        let p = parse_axis_header(lines.next(), "p")?;
        let mut values = Vec::with_capacity(x.count * p.count);
        for (row, line) in lines.filter(|l| !l.trim().is_empty()).enumerate() {
            let before = values.len();
            for tok in line.split_whitespace() {
                values.push(tok.parse::<f64>().map_err(|e| {
                    Error::InvalidGrid(format!("row {row}: {e}"))
                })?);
            }
            if values.len() - before != x.count {
                return Err(Error::InvalidGrid(format!("row {row} has {} values", values.len() - before)));
            }
        }
        Self::from_values(x, p, values)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

fn parse_axis_header(line: Option<&str>, name: &str) -> Result<AxisSpec> {
    let line = line.ok_or_else(|| Error::InvalidGrid(format!("missing `# {name}:` header")))?;
    let rest = line
        .strip_prefix(&format!("# {name}:"))
        .ok_or_else(|| Error::InvalidGrid(format!("expected `# {name}:` header, got `{line}`")))?;
    let toks: Vec<&str> = rest.split_whitespace().collect();
    if toks.len() != 3 {
        return Err(Error::InvalidGrid(format!("malformed header `{line}`")));
    }
    let bad = |e: String| Error::InvalidGrid(format!("header `{line}`: {e}"));
    AxisSpec::new(
        toks[0].parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
        toks[1].parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
        toks[2].parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
    )
}

/// Wigner function of a single-mode state.
///
/// Uses `W(x, p) = (1/π) Tr[rho D(α) Π D(α)†]` with `α = (x + i p)/√2`,
/// expanded in the Fock basis: for `m >= n`,
/// `<n| D Π D† |m> = (-1)^n sqrt(n!/m!) (2α*)^(m-n) e^{-2|α|²} L_n^(m-n)(4|α|²)`.
pub fn wigner(state: &DensityMatrix, x: &AxisSpec, p: &AxisSpec) -> Result<WignerGrid> {
    if state.dim().n_modes() != 1 {
        return Err(Error::InvalidDimension(format!(
            "Wigner function needs a single-mode state, got {:?}",
            state.dim().dims()
        )));
    }
    let rho = state.operator().matrix();
    let n = rho.nrows();
    // coef[n][k] = (-1)^n sqrt(n! / (n+k)!)
    let mut coef = vec![vec![0.0; n]; n];
    for (nn, row) in coef.iter_mut().enumerate() {
        let mut ratio = 1.0f64;
        for (k, slot) in row.iter_mut().enumerate().take(n - nn) {
            if k > 0 {
                ratio /= ((nn + k) as f64).sqrt();
            }
            *slot = if nn % 2 == 0 { ratio } else { -ratio };
        }
    }
    let xs = x.points();
    let ps = p.points();
    let mut values = vec![0.0; xs.len() * ps.len()];
    let mut lag = vec![0.0; n];
    for (ip, &pv) in ps.iter().enumerate() {
        for (ix, &xv) in xs.iter().enumerate() {
            let r2 = 2.0 * (xv * xv + pv * pv);
            let two_alpha_conj = C64::new(xv, -pv) * std::f64::consts::SQRT_2;
            let mut power = C64::new(1.0, 0.0);
            let mut total = 0.0;
            for k in 0..n {
                laguerre_column(k, r2, &mut lag[..n - k]);
                let mut acc = C64::new(0.0, 0.0);
                for nn in 0..n - k {
                    acc += rho[(nn + k, nn)] * (coef[nn][k] * lag[nn]);
                }
                let term = acc * power;
                total += if k == 0 { term.re } else { 2.0 * term.re };
                power *= two_alpha_conj;
            }
            values[ip * xs.len() + ix] = total * (-0.5 * r2).exp() / PI;
        }
    }
    WignerGrid::from_values(*x, *p, values)
}

/// Generalized Laguerre polynomials `L_n^(k)(t)` for `n = 0..out.len()`.
fn laguerre_column(k: usize, t: f64, out: &mut [f64]) {
    let kf = k as f64;
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = 1.0 + kf - t;
    }
    for nn in 1..out.len().saturating_sub(1) {
        let nf = nn as f64;
        out[nn + 1] = ((2.0 * nf + 1.0 + kf - t) * out[nn] - (nf + kf) * out[nn - 1]) / (nf + 1.0);
    }
}

/// Test angles used by [`rotational_asymmetry`].
pub const ROTATION_TEST_ANGLES: [f64; 3] = [PI / 6.0, PI / 4.0, PI / 2.0];

/// Largest deviation `|W(R·v) - W(v)|` over the test angles, in excess of the
/// bilinear interpolation error estimated from local second differences.
/// Rotated points that leave the grid are skipped.
pub fn rotational_asymmetry(grid: &WignerGrid) -> Result<f64> {
    let tol = 1e-9 * grid.x.step();
    if grid.x != grid.p {
        return Err(Error::InvalidGrid("rotation test needs identical x and p axes".into()));
    }
    if (grid.x.min + grid.x.max).abs() > tol {
        return Err(Error::InvalidGrid("rotation test needs a grid centered at the origin".into()));
    }
    let axis = grid.x;
    let h = axis.step();
    let m = axis.count;
    let pts = axis.points();

    // Second differences along each axis, replicated to the border.
    let d2 = |ix: usize, ip: usize, along_x: bool| -> f64 {
        let (i, len) = if along_x { (ix, m) } else { (ip, m) };
        let c = i.clamp(1, len - 2);
        let get = |j: usize| if along_x { grid.at(j, ip) } else { grid.at(ix, j) };
        (get(c - 1) - 2.0 * get(c) + get(c + 1)).abs()
    };

    let mut worst = 0.0f64;
    for &angle in &ROTATION_TEST_ANGLES {
        let (s, c) = angle.sin_cos();
        for ip in 0..m {
            for ix in 0..m {
                let (xv, pv) = (pts[ix], pts[ip]);
                let xr = c * xv - s * pv;
                let pr = s * xv + c * pv;
                let fx = (xr - axis.min) / h;
                let fp = (pr - axis.min) / h;
                if fx < -1e-9 || fp < -1e-9 || fx > (m - 1) as f64 + 1e-9 || fp > (m - 1) as f64 + 1e-9 {
                    continue;
                }
                let i0 = (fx.floor().max(0.0) as usize).min(m - 2);
                let j0 = (fp.floor().max(0.0) as usize).min(m - 2);
                let tx = (fx - i0 as f64).clamp(0.0, 1.0);
                let tp = (fp - j0 as f64).clamp(0.0, 1.0);
                let w00 = grid.at(i0, j0);
                let w10 = grid.at(i0 + 1, j0);
                let w01 = grid.at(i0, j0 + 1);
                let w11 = grid.at(i0 + 1, j0 + 1);
                let interp = (1.0 - tx) * (1.0 - tp) * w00
                    + tx * (1.0 - tp) * w10
                    + (1.0 - tx) * tp * w01
                    + tx * tp * w11;
                let corners = [(i0, j0), (i0 + 1, j0), (i0, j0 + 1), (i0 + 1, j0 + 1)];
                let dxx = corners.iter().map(|&(a, b)| d2(a, b, true)).fold(0.0, f64::max);
                let dpp = corners.iter().map(|&(a, b)| d2(a, b, false)).fold(0.0, f64::max);
                let est = 0.5 * (tx * (1.0 - tx) * dxx + tp * (1.0 - tp) * dpp);
                let excess = (interp - grid.at(ix, ip)).abs() - 2.0 * est;
                worst = worst.max(excess);
            }
        }
    }
    Ok(worst.max(0.0))
}

/// A local maximum of a sampled Wigner function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub x: f64,
    pub p: f64,
    pub value: f64,
}

/// Interior grid points that exceed all eight neighbours (ties broken by
/// index order) and reach at least `rel_threshold * max W`.
pub fn local_maxima(grid: &WignerGrid, rel_threshold: f64) -> Vec<Peak> {
    let (nx, np) = (grid.x.count, grid.p.count);
    let floor = rel_threshold * grid.max_value();
    let xs = grid.x_axis();
    let ps = grid.p_axis();
    let mut peaks = Vec::new();
    for ip in 1..np - 1 {
        for ix in 1..nx - 1 {
            let v = grid.at(ix, ip);
            if v < floor {
                continue;
            }
            let mut is_max = true;
            'nb: for dp in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dp == 0 && dx == 0 {
                        continue;
                    }
                    let w = grid.at((ix as i64 + dx) as usize, (ip as i64 + dp) as usize);
                    let earlier = (dp, dx) < (0, 0);
                    if (earlier && w >= v) || (!earlier && w > v) {
                        is_max = false;
                        break 'nb;
                    }
                }
            }
            if is_max {
                peaks.push(Peak { x: xs[ix], p: ps[ip], value: v });
            }
        }
    }
    peaks
}

/// Largest `|W(-x, -p) - W(x, p)|` on a grid symmetric about the origin.
pub fn point_reflection_asymmetry(grid: &WignerGrid) -> f64 {
    let (nx, np) = (grid.x.count, grid.p.count);
    let mut worst = 0.0f64;
    for ip in 0..np {
        for ix in 0..nx {
            worst = worst.max((grid.at(ix, ip) - grid.at(nx - 1 - ix, np - 1 - ip)).abs());
        }
    }
    worst
}
