use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use squeezed_vdp::scenario::{resolve, run_sweep_parallel, Scenario, BUNDLED, OUTPUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "qvdp", version, about = "Coupled quantum van der Pol oscillators with squeezing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (or a bundled scenario name).
    Run {
        scenario: String,
        /// Output directory; overrides the scenario and the environment.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Sweep points computed concurrently.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Also write SVG previews.
        #[arg(long)]
        plot: bool,
        /// Levels kept per oscillator.
        #[arg(long)]
        truncation: Option<usize>,
        /// Oscillator for Wigner functions and spectra.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        mode: Option<u8>,
    },
    /// List the bundled scenarios.
    ListScenarios,
    /// Parse and check a scenario without running it.
    Validate { scenario: String },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors share exit code 1 with configuration errors; 2 means failed points.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match cli.command {
        Command::ListScenarios => {
            for (name, text) in BUNDLED {
                match Scenario::from_toml(text) {
                    Ok(s) => println!("{name:<6} {:<18} {}", s.kind.to_string(), s.description),
                    Err(e) => println!("{name:<6} invalid: {e}"),
                }
            }
            ExitCode::SUCCESS
        }
        Command::Validate { scenario } => match resolve(&scenario) {
            Ok(s) => {
                let points = s.sweep.as_ref().map_or(1, |w| w.values.len());
                println!("ok: {} ({}, {} point(s))", s.name, s.kind, points);
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Command::Run { scenario, out, workers, plot, truncation, mode } => {
            let s = match resolve(&scenario).and_then(|s| s.with_overrides(truncation, mode.map(usize::from))) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            let dir = s.output_dir(out.as_deref());
            match run_sweep_parallel(&s, &dir, workers, plot) {
                Ok(m) => {
                    for p in m.points.iter().filter(|p| !p.ok) {
                        eprintln!("point {} failed: {}", p.label, p.error.as_deref().unwrap_or("unknown"));
                    }
                    println!(
                        "{}: {} file(s) in {} ({:.1} s, {} failed point(s))",
                        s.name,
                        m.outputs.len(),
                        dir.display(),
                        m.duration_seconds,
                        m.points_failed
                    );
                    ExitCode::from(m.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("error: {e} (output directory: {}, override with {OUTPUT_DIR_ENV})", dir.display());
                    ExitCode::from(1)
                }
            }
        }
    }
}
