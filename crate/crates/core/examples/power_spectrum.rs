//! Frequency entrainment: the spectral peak of a detuned oscillator moves
//! to zero as squeezing grows. Both spectrum paths are compared.

use squeezed_vdp::spectrum::{occupation, spectrum, spectrum_via_resolvent, SpectrumMode, SpectrumOptions};
use squeezed_vdp::steadystate::solve_steady_state;
use squeezed_vdp::{build_liouvillian, Result, SystemSpec};

fn main() -> Result<()> {
    let opts = SpectrumOptions::default();
    for eta in [0.0, 0.5, 1.0, 2.0] {
        let mut spec = SystemSpec::single(1.0, 3.0, 15)?;
        spec.delta = [0.3, 0.0];
        spec.eta = [eta, 0.0];
        let l = build_liouvillian(&spec)?;
        let rho = solve_steady_state(&l)?.rho;
        let (s, corr) = spectrum(&l, &rho, SpectrumMode::One, &opts)?;
        let r = spectrum_via_resolvent(&l, &rho, SpectrumMode::One, &s.omega_axis)?;
        let k = s.omega_axis.iter().position(|w| *w == s.omega_obs).unwrap_or(0);
        println!(
            "eta = {eta:.1}: omega_obs = {:+.3}, window = {:.0}, peak regression/resolvent = {:.4}/{:.4}, weight = {:.4}, <n> = {:.4}",
            s.omega_obs,
            corr.tau.last().copied().unwrap_or(0.0),
            s.values[k],
            r.values[k],
            s.integrated_weight(),
            occupation(&rho, SpectrumMode::One)?
        );
    }
    Ok(())
}
