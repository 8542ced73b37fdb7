//! Mean-field fixed points versus squeezing strength and the folds between them.

use squeezed_vdp::classical::{bifurcation_sweep, find_fixed_points, reference_spec, Stability, SweepOptions};
use squeezed_vdp::{CouplingKind, Result};

fn main() -> Result<()> {
    let mut spec = reference_spec(CouplingKind::Reactive, 1.0, [1.0, 1.0]);
    spec.eta = [2.0, 2.0];
    println!("fixed points at eta = 2:");
    for p in find_fixed_points(&spec)? {
        let s = p.state;
        println!(
            "  R = ({:.4}, {:.4})  phi = ({:.4}, {:.4})  {}",
            s.r1, s.r2, s.phi1, s.phi2, p.stability
        );
    }

    let etas: Vec<f64> = (0..=125).map(|k| 0.5 + 0.02 * k as f64).collect();
    let d = bifurcation_sweep(&spec, &etas, &SweepOptions::default())?;
    println!("\n{} branches over eta in [0.5, 3]", d.branches.len());
    for e in &d.events {
        println!("  {} near eta = {:.3} (branches {:?})", e.kind, e.eta, e.branches);
    }
    let stable = d.branches.iter().filter(|b| b.stability.iter().all(|s| *s == Stability::Stable)).count();
    println!("  branches stable everywhere they exist: {stable}");
    Ok(())
}
