//! Render a Wigner heatmap and a line chart without running a scenario.

use squeezed_vdp::fock::{DensityMatrix, FockDim, C64};
use squeezed_vdp::observables::{wigner, AxisSpec};
use squeezed_vdp::svg::{line_plot, wigner_heatmap, Series};
use squeezed_vdp::Result;

fn main() -> Result<()> {
    let dir = std::env::temp_dir();
    // Cat-like superposition of |0> and |2>.
    let dim = FockDim::single(4)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let rho = DensityMatrix::from_pure(&dim, &[C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(0.0, 0.0)])?;
    let axis = AxisSpec::new(-3.0, 3.0, 81)?;
    let grid = wigner(&rho, &axis, &axis)?;
    let heat = dir.join("qvdp_wigner.svg");
    std::fs::write(&heat, wigner_heatmap(&grid, "(|0> + |2>)/sqrt 2"))?;

    let xs: Vec<f64> = (0..200).map(|k| -5.0 + 0.05 * k as f64).collect();
    let lorentz = |w0: f64, g: f64| xs.iter().map(|&w| (w, g / ((w - w0).powi(2) + g * g / 4.0))).collect();
    let chart = dir.join("qvdp_lines.svg");
    std::fs::write(
        &chart,
        line_plot(
            &[Series::new("w0 = 0.3", lorentz(0.3, 1.0)), Series::new("w0 = 0", lorentz(0.0, 0.5)).dashed()],
            "Lorentzians",
            "omega",
            "S",
        ),
    )?;
    println!("wrote {} and {}", heat.display(), chart.display());
    Ok(())
}
