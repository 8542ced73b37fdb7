//! Steady state of two reactively coupled, squeezed oscillators.

use squeezed_vdp::fock::{expectation, number, parity};
use squeezed_vdp::observables::partial_trace;
use squeezed_vdp::steadystate::solve_steady_state;
use squeezed_vdp::{build_liouvillian, CouplingKind, Result, SystemSpec};

fn main() -> Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let mut spec = SystemSpec::symmetric(1.0, 3.0, n)?;
    spec.coupling_kind = CouplingKind::Reactive;
    spec.coupling = 5.0;
    spec.eta = [1.5, 1.5];
    let l = build_liouvillian(&spec)?;
    let t = std::time::Instant::now();
    let ss = solve_steady_state(&l)?;
    let info = &ss.solver_info;
    println!("n_max = {n}: solved in {:.2?} ({:?}, {} real unknowns)", t.elapsed(), info.method, info.unknowns);
    println!("relative residual = {:.2e}", info.relative_residual);
    let rho1 = partial_trace(&ss.rho, 0)?;
    println!("<n1> = {:.6}", expectation(&rho1, &number(n)?)?.re);
    println!("<P>  = {:.6}", expectation(&ss.rho, &parity(ss.rho.dim()))?.re);
    let pops: Vec<String> = (0..n.min(6)).map(|k| format!("{:.4}", rho1.operator().get(k, k).re)).collect();
    println!("P(n1) = [{} ...]", pops.join(", "));
    Ok(())
}
