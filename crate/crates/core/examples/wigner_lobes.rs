//! Squeezing splits the single-oscillator Wigner function into two lobes.

use squeezed_vdp::observables::{local_maxima, point_reflection_asymmetry, rotational_asymmetry, wigner, AxisSpec};
use squeezed_vdp::steadystate::solve_steady_state;
use squeezed_vdp::{build_liouvillian, Result, SystemSpec};

fn main() -> Result<()> {
    let axis = AxisSpec::new(-4.0, 4.0, 121)?;
    for eta in [0.0, 1.5, 3.0] {
        let mut spec = SystemSpec::single(1.0, 3.0, 20)?;
        spec.eta = [eta, 0.0];
        let rho = solve_steady_state(&build_liouvillian(&spec)?)?.rho;
        let w = wigner(&rho, &axis, &axis)?;
        let peaks = local_maxima(&w, 0.01);
        println!(
            "eta = {eta:.1}: max W = {:.4}, rotational asymmetry = {:.2e}, point-reflection asymmetry = {:.1e}, lobes = {}",
            w.max_value(),
            rotational_asymmetry(&w)?,
            point_reflection_asymmetry(&w),
            peaks.len()
        );
        for p in peaks.iter().filter(|_| peaks.len() <= 4) {
            println!("    peak at ({:+.2}, {:+.2})", p.x, p.p);
        }
    }
    Ok(())
}
