//! Ladder-operator identities on a truncated Fock space.

use squeezed_vdp::fock::{annihilation, creation, embed, mode_annihilation, number, tensor, FockDim};
use squeezed_vdp::Result;

fn main() -> Result<()> {
    let n = 5;
    let a = annihilation(n)?;
    let ad = creation(n)?;
    let comm = a.commutator(&ad)?;
    println!("[a, a†] diagonal for n_max = {n}:");
    for k in 0..n {
        println!("  {k}: {:+.3}", comm.get(k, k).re);
    }

    let num_err = ad.mul(&a)?.max_abs_diff(&number(n)?)?;
    println!("max |a†a - N| = {num_err:.1e}");

    let dim = FockDim::two_mode(3, 4)?;
    let a2 = mode_annihilation(&dim, 1)?;
    let by_hand = tensor(&squeezed_vdp::Operator::identity(&FockDim::single(3)?), &annihilation(4)?);
    println!("two-mode a2 vs 1 ⊗ a: {:.1e}", a2.max_abs_diff(&by_hand)?);
    println!("embed(a, mode 0) size = {}", embed(&dim, 0, &annihilation(3)?)?.size());
    Ok(())
}
