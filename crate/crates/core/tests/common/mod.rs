//! Dense reference implementations shared by the integration tests.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use squeezed_vdp::fock::FockDim;
use squeezed_vdp::{build_liouvillian, CouplingKind, SystemSpec};

pub type M = DMatrix<C64>;

pub fn lowering(n: usize) -> M {
    M::from_fn(n, n, |i, j| if j == i + 1 { C64::new((j as f64).sqrt(), 0.0) } else { C64::new(0.0, 0.0) })
}

pub fn kron(a: &M, b: &M) -> M {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    M::from_fn(ra * rb, ca * cb, |i, j| a[(i / rb, j / cb)] * b[(i % rb, j % cb)])
}

pub fn dissipate(o: &M, rho: &M) -> M {
    let od = o.adjoint();
    let ood = &od * o;
    o * rho * &od - (&ood * rho + rho * &ood) * C64::new(0.5, 0.0)
}

/// Dense right-hand side of the master equation evaluated on `rho`.
pub fn master_rhs(spec: &SystemSpec, n: usize, rho: &M) -> M {
    let eye = M::identity(n, n);
    let a = [kron(&lowering(n), &eye), kron(&eye, &lowering(n))];
    let i = C64::new(0.0, 1.0);
    let mut h = M::zeros(n * n, n * n);
    for k in 0..2 {
        let ad = a[k].adjoint();
        h += &ad * &a[k] * C64::new(spec.delta[k], 0.0);
        let sq = &a[k] * &a[k] * C64::from_polar(1.0, -spec.theta) - &ad * &ad * C64::from_polar(1.0, spec.theta);
        h += sq * (i * spec.eta[k]);
    }
    if spec.coupling_kind == CouplingKind::Reactive {
        h += (a[0].adjoint() * &a[1] + &a[0] * a[1].adjoint()) * C64::new(spec.coupling, 0.0);
    }
    let mut out = (&h * rho - rho * &h) * (-i);
    for k in 0..2 {
        out += dissipate(&a[k].adjoint(), rho) * C64::new(spec.gamma1[k], 0.0);
        out += dissipate(&(&a[k] * &a[k]), rho) * C64::new(spec.gamma2[k], 0.0);
        out += dissipate(&a[k], rho) * C64::new(spec.loss[k], 0.0);
    }
    if spec.coupling_kind == CouplingKind::Dissipative {
        out += dissipate(&(&a[0] - &a[1]), rho) * C64::new(spec.coupling, 0.0);
    }
    out
}

pub fn random_spec(rng: &mut ChaCha8Rng, kind: CouplingKind, n: usize, with_loss: bool) -> SystemSpec {
    let mut pair = |lo: f64, hi: f64| [rng.random_range(lo..hi), rng.random_range(lo..hi)];
    let gamma1 = pair(0.1, 2.0);
    let gamma2 = pair(0.1, 4.0);
    let delta = pair(-3.0, 3.0);
    let eta = pair(0.0, 2.0);
    let loss = if with_loss { pair(0.0, 1.0) } else { [0.0; 2] };
    let theta = rng.random_range(-3.2..3.2);
    let coupling = if kind == CouplingKind::None { 0.0 } else { rng.random_range(0.1..5.0) };
    SystemSpec {
        gamma1,
        gamma2,
        delta,
        eta,
        theta,
        coupling,
        coupling_kind: kind,
        loss,
        truncation: FockDim::two_mode(n, n).unwrap(),
    }
}

pub fn max_entry_deviation(spec: &SystemSpec, n: usize) -> f64 {
    let l = build_liouvillian(spec).unwrap();
    let d = n * n;
    assert_eq!(l.matrix().dim(), d * d);
    let mut worst = 0.0f64;
    for col in 0..d * d {
        let mut basis = M::zeros(d, d);
        basis[(col % d, col / d)] = C64::new(1.0, 0.0);
        let image = master_rhs(spec, n, &basis);
        for row in 0..d * d {
            let expected = image[(row % d, row / d)];
            worst = worst.max((l.matrix().get(row, col) - expected).norm());
        }
    }
    worst
}
