//! Acceptance criteria 1 to 9, one PASS/FAIL line each.
//!
//! Runs without the libtest harness. The process exits 0 and reports every
//! criterion so that later test targets still run; set `ACCEPTANCE_STRICT=1`
//! to exit 1 when any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use squeezed_vdp::classical::{bifurcation_sweep, BifurcationDiagram, EventKind, Stability, SweepOptions};
use squeezed_vdp::fock::{
    annihilation, creation, dagger, expectation, min_eigenvalue, mode_annihilation, number, parity, tensor,
    FockDim, HERMITICITY_TOL, POSITIVITY_TOL, TRACE_TOL,
};
use squeezed_vdp::observables::{local_maxima, partial_trace, point_reflection_asymmetry, rotational_asymmetry, wigner};
use squeezed_vdp::scenario::{bundled, run_sweep_parallel, OutputEntry, Scenario};
use squeezed_vdp::spectrum::{
    occupation, power_spectrum, spectrum, spectrum_via_resolvent, Correlation, SpectrumResult,
};
use squeezed_vdp::steadystate::solve_steady_state;
use squeezed_vdp::{build_liouvillian, CouplingKind, DensityMatrix, Liouvillian, Operator, SystemSpec, C64};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

// Criterion 1

fn random_operator(rng: &mut ChaCha8Rng, n: usize) -> Operator {
    let m = DMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    Operator::from_matrix(FockDim::single(n).unwrap(), m).unwrap()
}

fn operator_algebra() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for n in [2, 5, 20] {
        let a = annihilation(n).unwrap();
        let mut ccr = DMatrix::identity(n, n);
        ccr[(n - 1, n - 1)] = C64::new(-((n - 1) as f64), 0.0);
        let ccr = Operator::from_matrix(FockDim::single(n).unwrap(), ccr).unwrap();
        worst = worst.max(a.commutator(&creation(n).unwrap()).unwrap().max_abs_diff(&ccr).unwrap());
        worst = worst.max(dagger(&a).mul(&a).unwrap().max_abs_diff(&number(n).unwrap()).unwrap());
        let (x, y) = (random_operator(&mut rng, n), random_operator(&mut rng, n));
        worst = worst.max(dagger(&dagger(&x)).max_abs_diff(&x).unwrap());
        let lhs = dagger(&x.mul(&y).unwrap());
        worst = worst.max(lhs.max_abs_diff(&dagger(&y).mul(&dagger(&x)).unwrap()).unwrap());
        let (u, v) = (random_operator(&mut rng, 2), random_operator(&mut rng, 2));
        let mixed = tensor(&x, &u).mul(&tensor(&y, &v)).unwrap();
        worst = worst.max(mixed.max_abs_diff(&tensor(&x.mul(&y).unwrap(), &u.mul(&v).unwrap())).unwrap());
        worst = worst.max(dagger(&tensor(&x, &u)).max_abs_diff(&tensor(&dagger(&x), &dagger(&u))).unwrap());
        let dim = FockDim::two_mode(n, n).unwrap();
        let (a1, a2) = (mode_annihilation(&dim, 0).unwrap(), mode_annihilation(&dim, 1).unwrap());
        worst = worst.max(a1.commutator(&dagger(&a2)).unwrap().frobenius_norm());
    }
    verdict(worst <= 1e-12, format!("max deviation {worst:.1e} over n_max in {{2, 5, 20}}"))
}

// Criterion 2

fn liouvillian_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for kind in [CouplingKind::Reactive, CouplingKind::Dissipative, CouplingKind::None] {
        for _ in 0..5 {
            let spec = common::random_spec(&mut rng, kind, 3, false);
            worst = worst.max(common::max_entry_deviation(&spec, 3));
        }
    }
    verdict(worst <= 1e-12, format!("15 random specs on 3x3 levels, max entry deviation {worst:.1e}"))
}

// Criteria 3 and 4

struct Fig2Point {
    name: &'static str,
    scenario: Scenario,
    rho: DensityMatrix,
}

const FIG2: [&str; 9] = ["fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig2f", "fig2g", "fig2h", "fig2i"];

fn fig2_states() -> Vec<Fig2Point> {
    FIG2.iter()
        .map(|&name| {
            let scenario = bundled(name).unwrap();
            let l = build_liouvillian(&scenario.system).unwrap();
            let rho = solve_steady_state(&l).unwrap().rho;
            Fig2Point { name, scenario, rho }
        })
        .collect()
}

fn off_diagonal(op: &Operator) -> f64 {
    op.nonzeros().into_iter().filter(|(i, j, _)| i != j).map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
}

fn steady_state_properties(points: &[Fig2Point], elapsed: Duration) -> Verdict {
    let mut failures = Vec::new();
    let (mut trace, mut herm, mut neg, mut par, mut coh) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for p in points {
        let op = p.rho.operator();
        let t = (op.trace() - C64::new(1.0, 0.0)).norm();
        let h = op.hermiticity_error();
        let m = -min_eigenvalue(op);
        let pi = parity(op.dim());
        let r = pi.mul(op).unwrap().mul(&pi).unwrap().max_abs_diff(op).unwrap();
        trace = trace.max(t);
        herm = herm.max(h);
        neg = neg.max(m);
        par = par.max(r);
        if t > TRACE_TOL || h > HERMITICITY_TOL || m > POSITIVITY_TOL || r > 1e-8 {
            failures.push(p.name);
        }
        if p.scenario.system.eta[0] == 0.0 {
            for keep in 0..2 {
                let c = off_diagonal(partial_trace(&p.rho, keep).unwrap().operator());
                coh = coh.max(c);
                if c > 1e-8 {
                    failures.push(p.name);
                }
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "9 states at n_max 15: trace {trace:.1e}, hermiticity {herm:.1e}, negativity {neg:.1e}, parity {par:.1e}, \
             eta=0 coherences {coh:.1e}; {:.1} s{}",
            elapsed.as_secs_f64(),
            if failures.is_empty() { String::new() } else { format!("; failing: {failures:?}") }
        ),
    )
}

fn wigner_lobes(points: &[Fig2Point]) -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for p in points {
        let ws = p.scenario.wigner_settings();
        let (x, pax) = ws.axes().unwrap();
        let reduced = partial_trace(&p.rho, ws.mode - 1).unwrap();
        let grid = wigner(&reduced, &x, &pax).unwrap();
        let w_max = grid.max_value();
        if p.scenario.system.eta[0] == 0.0 {
            let asym = rotational_asymmetry(&grid).unwrap();
            let good = asym <= 1e-3 * w_max;
            ok &= good;
            notes.push(format!("{} asym/max {:.1e}", &p.name[4..], asym / w_max));
        } else {
            let peaks = local_maxima(&grid, ws.peak_threshold);
            let reflected = peaks.len() == 2
                && (peaks[0].x + peaks[1].x).abs() <= 1e-9
                && (peaks[0].p + peaks[1].p).abs() <= 1e-9
                && point_reflection_asymmetry(&grid) <= 1e-8 * w_max.max(1.0);
            ok &= reflected;
            let at = peaks.first().map(|q| format!(" at ({:+.2}, {:+.2})", q.x, q.p)).unwrap_or_default();
            notes.push(format!("{} {} peaks{at}", &p.name[4..], peaks.len()));
        }
    }
    verdict(ok, notes.join(", "))
}

// Criteria 5 and 6

struct SpectrumPoint {
    label: String,
    liouvillian: Liouvillian,
    rho: DensityMatrix,
    result: SpectrumResult,
    correlation: Correlation,
    scenario: Scenario,
}

fn spectrum_points(name: &str) -> Vec<SpectrumPoint> {
    let scenario = bundled(name).unwrap();
    let values = scenario.sweep.as_ref().unwrap().values.clone();
    let settings = scenario.spectrum_settings();
    values
        .iter()
        .map(|&v| {
            let spec = scenario.point_spec(v).unwrap();
            let l = build_liouvillian(&spec).unwrap();
            let rho = solve_steady_state(&l).unwrap().rho;
            let (result, correlation) = spectrum(&l, &rho, settings.mode, &settings.options()).unwrap();
            SpectrumPoint {
                label: format!("{name} {}={v}", scenario.sweep.as_ref().unwrap().parameter),
                liouvillian: l,
                rho,
                result,
                correlation,
                scenario: scenario.clone(),
            }
        })
        .collect()
}

fn obs(points: &[SpectrumPoint]) -> Vec<f64> {
    points.iter().map(|p| p.result.omega_obs).collect()
}

fn non_increasing_to_zero(w: &[f64]) -> bool {
    w.windows(2).all(|p| p[1] <= p[0] + 1e-12) && *w.last().unwrap() < 0.1
}

fn entrainment(eta_r: &[SpectrumPoint], v_r: &[SpectrumPoint], eta_d: &[SpectrumPoint], elapsed: Duration) -> Verdict {
    let (a, b, c) = (obs(eta_r), obs(v_r), obs(eta_d));
    let ok_a = non_increasing_to_zero(&a);
    let ok_b = b.iter().all(|w| w.abs() > 0.2);
    let ok_c = non_increasing_to_zero(&c);
    verdict(
        ok_a && ok_b && ok_c,
        format!(
            "reactive eta sweep {a:?} ({}), V sweep {b:?} (|w| > 0.2: {}), dissipative eta sweep {c:?} ({}); {:.0} s",
            pass_word(ok_a),
            pass_word(ok_b),
            pass_word(ok_c),
            elapsed.as_secs_f64()
        ),
    )
}

/// Fold a runtime limit into a verdict.
fn within(v: Verdict, elapsed: Duration, limit_s: u64) -> Verdict {
    if elapsed < Duration::from_secs(limit_s) {
        v
    } else {
        verdict(false, format!("{}; runtime limit {limit_s} s exceeded", v.detail))
    }
}

fn pass_word(ok: bool) -> &'static str {
    if ok { "ok" } else { "not met" }
}

const WIDE_WINDOW: f64 = 20.0;

/// `(1/2π) ∫ S` over `[-W, W]` plus the `1/ω²` tail beyond it.
fn tail_corrected_weight(p: &SpectrumPoint) -> f64 {
    let count = (2.0 * WIDE_WINDOW / 0.01).round() as usize + 1;
    let axis: Vec<f64> = (0..count).map(|k| -WIDE_WINDOW + 0.01 * k as f64).collect();
    let decay = p.scenario.spectrum_settings().options().decay_tol;
    let s = power_spectrum(&p.correlation.values, &p.correlation.tau, &axis, p.result.mode, decay).unwrap();
    let tail = (s.values[0] + s.values[count - 1]) * WIDE_WINDOW / (2.0 * PI);
    s.integrated_weight() + tail
}

fn spectrum_cross_validation(points: &[&SpectrumPoint]) -> Verdict {
    let (mut peak_dev, mut sum_dev, mut raw_dev) = (0.0f64, 0.0f64, 0.0f64);
    let mut worst_label = String::new();
    for p in points {
        let w = p.result.omega_obs;
        let res = spectrum_via_resolvent(&p.liouvillian, &p.rho, p.result.mode, &[w]).unwrap();
        peak_dev = peak_dev.max((res.values[0] - p.result.peak_value()).abs() / res.values[0]);
        let n = occupation(&p.rho, p.result.mode).unwrap();
        let dev = (tail_corrected_weight(p) - n).abs() / n;
        if dev > sum_dev {
            sum_dev = dev;
            worst_label = p.label.clone();
        }
        raw_dev = raw_dev.max((p.result.integrated_weight() - n).abs() / n);
    }
    verdict(
        peak_dev <= 0.01 && sum_dev <= 0.02,
        format!(
            "{} points: peak deviation {peak_dev:.1e}; sum rule on +-{WIDE_WINDOW} with 1/w^2 tail {:.2}% (worst {worst_label}); \
             raw +-5 window deficit up to {:.1}%",
            points.len(),
            100.0 * sum_dev,
            100.0 * raw_dev
        ),
    )
}

// Criterion 7

fn diagram(name: &str) -> BifurcationDiagram {
    let s = bundled(name).unwrap();
    bifurcation_sweep(&s.system, &s.bifurcation_settings().etas(), &SweepOptions::default()).unwrap()
}

fn events_text(d: &BifurcationDiagram) -> String {
    let list: Vec<String> = d
        .events
        .iter()
        .filter(|e| e.kind != EventKind::StabilityChange)
        .map(|e| format!("{} {:.3}", e.kind, e.eta))
        .collect();
    if list.is_empty() { "none".into() } else { list.join(", ") }
}

fn stable_at(d: &BifurcationDiagram, eta: f64) -> Vec<squeezed_vdp::classical::ClassicalState> {
    d.points
        .iter()
        .find(|(e, _)| (e - eta).abs() < 1e-9)
        .map(|(_, pts)| pts.iter().filter(|p| p.stability == Stability::Stable).map(|p| p.state).collect())
        .unwrap_or_default()
}

/// A branch that stays stable from its first point to the end of the sweep.
fn persistent_stable_branch(d: &BifurcationDiagram, eta_max: f64) -> bool {
    d.branches.iter().any(|b| {
        b.len() > 1
            && (b.parameter_axis.last().unwrap() - eta_max).abs() < 1e-9
            && b.stability.iter().all(|s| *s == Stability::Stable)
    })
}

fn bifurcations() -> Verdict {
    let main = diagram("fig1");
    let fold = main.events.iter().find(|e| e.kind == EventKind::SaddleNode && (e.eta - 1.0).abs() <= 0.1);
    let stable = stable_at(&main, 2.0);
    let pair = stable.len() == 2 && {
        let (a, b) = (stable[0], stable[1]);
        (a.r1 - b.r1).abs() < 1e-6 && (a.r2 - b.r2).abs() < 1e-6 && a.distance(&b) > 1.0
    };
    let mut appendix_ok = true;
    let mut appendix = Vec::new();
    for name in ["fig4", "fig5", "fig6"] {
        let d = diagram(name);
        let eta_max = bundled(name).unwrap().bifurcation_settings().eta_max;
        let persistent = persistent_stable_branch(&d, eta_max);
        let bifurcates = d.events.iter().any(|e| e.kind == EventKind::SaddleNode);
        appendix_ok &= persistent && bifurcates;
        appendix.push(format!("{name}: persistent stable branch {}, events {}", pass_word(persistent), events_text(&d)));
    }
    verdict(
        fold.is_some() && pair && appendix_ok,
        format!(
            "fig1 events {}; saddle-node within 1.0 +- 0.1: {}; stable points at eta=2: {} (two sharing R: {}); {}",
            events_text(&main),
            pass_word(fold.is_some()),
            stable.len(),
            pass_word(pair),
            appendix.join("; ")
        ),
    )
}

// Criterion 8

fn mode_occupation(spec: &SystemSpec) -> f64 {
    let rho = solve_steady_state(&build_liouvillian(spec).unwrap()).unwrap().rho;
    let a = mode_annihilation(rho.dim(), 0).unwrap();
    expectation(&rho, &dagger(&a).mul(&a).unwrap()).unwrap().re
}

fn classical_quantum_consistency() -> Verdict {
    let large = mode_occupation(&SystemSpec::single(1.0, 0.05, 60).unwrap());
    let target = 1.0 / (2.0 * 0.05);
    let ok_large = (large - target).abs() <= 0.2 * target;
    let mut single = 0.0f64;
    for eta in [0.0, 1.5, 3.0] {
        let at = |levels| {
            let mut s = SystemSpec::single(1.0, 3.0, levels).unwrap();
            s.eta = [eta, 0.0];
            mode_occupation(&s)
        };
        single = single.max((at(30) - at(35)).abs());
    }
    let mut coupled = 0.0f64;
    for name in ["fig2e", "fig7e"] {
        let base = bundled(name).unwrap().system;
        let mut wider = base.clone();
        wider.truncation = FockDim::two_mode(20, 20).unwrap();
        coupled = coupled.max((mode_occupation(&base) - mode_occupation(&wider)).abs());
    }
    verdict(
        ok_large && single < 1e-6 && coupled < 1e-6,
        format!(
            "gamma2=0.05: <n> {large:.3} vs {target:.1} ({:+.1}%); n_max 30 -> 35 change {single:.1e} single mode, \
             15 -> 20 change {coupled:.1e} for fig2e/fig7e",
            100.0 * (large - target) / target
        ),
    )
}

// Criterion 9

fn checksums(s: &Scenario, workers: usize) -> Vec<OutputEntry> {
    let dir = tempfile::tempdir().unwrap();
    run_sweep_parallel(s, dir.path(), workers, true).unwrap().outputs
}

fn determinism() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for name in ["fig8a", "fig2b", "fig1"] {
        let s = bundled(name).unwrap();
        let first = checksums(&s, 1);
        let repeat = checksums(&s, 1);
        let parallel = checksums(&s, 3);
        let same = first == repeat && first == parallel;
        ok &= same;
        notes.push(format!("{name} {} files {}", first.len(), if same { "identical" } else { "differ" }));
    }
    verdict(ok, notes.join(", "))
}

fn main() {
    let mut results: Vec<(usize, Verdict, Duration)> = Vec::new();
    let mut record = |n: usize, v: Verdict, d: Duration| {
        println!("criterion {n} {}: {} [{:.1} s]", if v.pass { "PASS" } else { "FAIL" }, v.detail, d.as_secs_f64());
        results.push((n, v, d));
    };

    let (v, d) = timed(operator_algebra);
    record(1, within(v, d, 1), d);
    let (v, d) = timed(liouvillian_oracle);
    record(2, within(v, d, 10), d);

    let (states, solve_time) = timed(fig2_states);
    let (v, d) = timed(|| steady_state_properties(&states, solve_time));
    record(3, within(v, solve_time + d, 120), solve_time + d);
    let (v, d) = timed(|| wigner_lobes(&states));
    record(4, v, d);
    drop(states);

    let ((eta_r, v_r, eta_d), spec_time) =
        timed(|| (spectrum_points("fig3a"), spectrum_points("fig3b"), spectrum_points("fig8a")));
    let (v, d) = timed(|| entrainment(&eta_r, &v_r, &eta_d, spec_time));
    record(5, within(v, spec_time + d, 600), spec_time + d);
    let all: Vec<&SpectrumPoint> = eta_r.iter().chain(&v_r).chain(&eta_d).collect();
    let (v, d) = timed(|| spectrum_cross_validation(&all));
    record(6, v, d);
    drop((eta_r, v_r, eta_d));

    let (v, d) = timed(bifurcations);
    record(7, within(v, d, 30), d);
    let (v, d) = timed(classical_quantum_consistency);
    record(8, v, d);
    let (v, d) = timed(determinism);
    record(9, v, d);

    let passed = results.iter().filter(|r| r.1.pass).count();
    let failed: Vec<String> = results.iter().filter(|r| !r.1.pass).map(|r| r.0.to_string()).collect();
    println!(
        "acceptance: {passed}/{} criteria passed{}",
        results.len(),
        if failed.is_empty() { String::new() } else { format!("; failed: {}", failed.join(", ")) }
    );
    if !failed.is_empty() && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
