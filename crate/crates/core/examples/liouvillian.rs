//! Build the Lindblad superoperator for both coupling kinds and inspect it.

use squeezed_vdp::{build_liouvillian, CouplingKind, Result, SystemSpec};

fn main() -> Result<()> {
    for kind in [CouplingKind::Reactive, CouplingKind::Dissipative] {
        let mut spec = SystemSpec::symmetric(1.0, 3.0, 8)?;
        spec.coupling_kind = kind;
        spec.coupling = 2.0;
        spec.eta = [0.5, 0.5];
        spec.delta = [0.3, 0.3];
        let l = build_liouvillian(&spec)?;
        let m = l.matrix();
        let density = m.nnz() as f64 / (m.dim() as f64 * m.dim() as f64);
        println!(
            "{kind:<11} D = {:>3}  L is {}x{}  nnz = {:>6}  density = {:.3}%",
            l.hilbert_dim(),
            m.dim(),
            m.dim(),
            m.nnz(),
            100.0 * density
        );
        let even = l.parity_sector(false).map_or(0, |s| s.len());
        println!("            even-parity sector: {even} of {} entries", m.dim());
    }
    Ok(())
}
