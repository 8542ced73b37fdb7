//! Run a bundled scenario into a directory and print its manifest summary.
//!
//! `cargo run --example run_scenario -- fig1 /tmp/fig1`

use std::path::PathBuf;

use squeezed_vdp::scenario::{bundled, run_sweep_parallel};
use squeezed_vdp::Result;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "fig1".into());
    let dir = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join(format!("qvdp-{name}")));
    let scenario = bundled(&name)?;
    let manifest = run_sweep_parallel(&scenario, &dir, 1, true)?;
    println!("{} ({}) -> {}", scenario.name, scenario.kind, dir.display());
    for o in &manifest.outputs {
        println!("  {:<32} {:>9} B  {}", o.path, o.bytes, &o.sha256[..16]);
    }
    println!("failed points: {}", manifest.points_failed);
    Ok(())
}
