use squeezed_vdp::spectrum::{
    occupation, spectrum, spectrum_via_resolvent, two_time_correlation, SpectrumMode, SpectrumOptions,
};
use squeezed_vdp::steadystate::solve_steady_state;
use squeezed_vdp::{build_liouvillian, SystemSpec, C64};

const PUMP: f64 = 0.05;
const LOSS: f64 = 1.0;
const DETUNING: f64 = 0.7;

/// Weakly pumped lossy mode; the two-photon term is negligible at this
/// occupation.
fn linear_mode() -> SystemSpec {
    let mut s = SystemSpec::single(PUMP, 1e-9, 15).unwrap();
    s.loss = [LOSS, 0.0];
    s.delta = [DETUNING, 0.0];
    s
}

fn lorentzian(omega: f64, n: f64) -> f64 {
    let half = (LOSS - PUMP) / 2.0;
    2.0 * n * half / (half * half + (omega - DETUNING).powi(2))
}

#[test]
fn linear_mode_correlation_is_a_damped_exponential() {
    let spec = linear_mode();
    let l = build_liouvillian(&spec).unwrap();
    let rho = solve_steady_state(&l).unwrap().rho;
    let n = PUMP / (LOSS - PUMP);
    assert!((occupation(&rho, SpectrumMode::One).unwrap() - n).abs() <= 1e-6 * n);
    let tau: Vec<f64> = (0..=400).map(|k| k as f64 * 0.05).collect();
    let g = two_time_correlation(&l, &rho, SpectrumMode::One, &tau).unwrap();
    for (t, v) in tau.iter().zip(&g) {
        let exact = C64::new(-(LOSS - PUMP) / 2.0 * t, DETUNING * t).exp() * n;
        assert!((v - exact).norm() <= 1e-4 * n, "tau = {t}");
    }
}

#[test]
fn linear_mode_spectrum_is_lorentzian() {
    let spec = linear_mode();
    let l = build_liouvillian(&spec).unwrap();
    let rho = solve_steady_state(&l).unwrap().rho;
    let n = occupation(&rho, SpectrumMode::One).unwrap();
    let omega: Vec<f64> = (0..=40).map(|k| -3.0 + 0.15 * k as f64).collect();
    let s = spectrum_via_resolvent(&l, &rho, SpectrumMode::One, &omega).unwrap();
    for (w, v) in omega.iter().zip(&s.values) {
        let exact = lorentzian(*w, n);
        assert!((v - exact).abs() <= 1e-4 * exact, "omega = {w}");
    }
    let (reg, _) = spectrum(&l, &rho, SpectrumMode::One, &SpectrumOptions::default()).unwrap();
    assert!((reg.omega_obs - DETUNING).abs() <= 0.01 + 1e-12);
    let peak = lorentzian(reg.omega_obs, n);
    assert!((reg.peak_value() - peak).abs() <= 1e-3 * peak);
}

#[test]
fn vacuum_has_no_spectrum() {
    let mut spec = SystemSpec::single(0.0, 1.0, 6).unwrap();
    spec.loss = [1.0, 0.0];
    let l = build_liouvillian(&spec).unwrap();
    let rho = solve_steady_state(&l).unwrap().rho;
    let tau: Vec<f64> = (0..50).map(|k| k as f64 * 0.1).collect();
    let g = two_time_correlation(&l, &rho, SpectrumMode::One, &tau).unwrap();
    assert!(g.iter().all(|v| v.norm() <= 1e-10));
    let s = spectrum_via_resolvent(&l, &rho, SpectrumMode::One, &[-1.0, 0.0, 1.0]).unwrap();
    assert!(s.values.iter().all(|v| v.abs() <= 1e-10));
}

#[test]
fn regression_and_resolvent_agree_for_the_detuned_oscillator() {
    let mut spec = SystemSpec::single(1.0, 3.0, 15).unwrap();
    spec.delta = [0.3, 0.0];
    let l = build_liouvillian(&spec).unwrap();
    let rho = solve_steady_state(&l).unwrap().rho;
    let (reg, corr) = spectrum(&l, &rho, SpectrumMode::One, &SpectrumOptions::default()).unwrap();
    let n = occupation(&rho, SpectrumMode::One).unwrap();
    assert!((corr.values[0].re - n).abs() <= 1e-6);
    assert!((reg.omega_obs - 0.3).abs() <= 0.05);
    let res = spectrum_via_resolvent(&l, &rho, SpectrumMode::One, &[reg.omega_obs]).unwrap();
    let rel = (res.values[0] - reg.peak_value()).abs() / res.values[0];
    assert!(rel <= 0.01, "peak deviation {rel:e}");
    let floor = -1e-6 * reg.peak_value();
    assert!(reg.values.iter().all(|v| *v >= floor));
}
