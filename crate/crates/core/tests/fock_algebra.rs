use nalgebra::DMatrix;
use proptest::prelude::*;
use squeezed_vdp::fock::{annihilation, creation, dagger, embed, mode_annihilation, number, tensor, FockDim};
use squeezed_vdp::observables::partial_trace;
use squeezed_vdp::{DensityMatrix, Operator, C64};

fn operator(n: usize, entries: &[(f64, f64)]) -> Operator {
    let mat = DMatrix::from_fn(n, n, |i, j| {
        let (re, im) = entries[i * n + j];
        C64::new(re, im)
    });
    Operator::from_matrix(FockDim::single(n).unwrap(), mat).unwrap()
}

fn entries(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n * n)
}

fn truncated_ccr(n: usize) -> Operator {
    let mut m = DMatrix::identity(n, n);
    m[(n - 1, n - 1)] = C64::new(-((n - 1) as f64), 0.0);
    Operator::from_matrix(FockDim::single(n).unwrap(), m).unwrap()
}

#[test]
fn canonical_commutator_up_to_the_cutoff() {
    for n in [2, 5, 20] {
        let a = annihilation(n).unwrap();
        let c = a.commutator(&creation(n).unwrap()).unwrap();
        assert!(c.max_abs_diff(&truncated_ccr(n)).unwrap() <= 1e-12, "n = {n}");
        let ad_a = dagger(&a).mul(&a).unwrap();
        assert!(ad_a.max_abs_diff(&number(n).unwrap()).unwrap() <= 1e-12);
    }
}

#[test]
fn modes_commute_and_count_independently() {
    for n in [2, 5] {
        let dim = FockDim::two_mode(n, n).unwrap();
        let a1 = mode_annihilation(&dim, 0).unwrap();
        let a2 = mode_annihilation(&dim, 1).unwrap();
        let zero = Operator::zeros(&dim);
        assert!(a1.commutator(&a2).unwrap().max_abs_diff(&zero).unwrap() <= 1e-12);
        assert!(a1.commutator(&dagger(&a2)).unwrap().max_abs_diff(&zero).unwrap() <= 1e-12);
        let n1 = embed(&dim, 0, &number(n).unwrap()).unwrap();
        for occ in [[0, n - 1], [n - 1, 1], [1, 0]] {
            let state = DensityMatrix::fock(&dim, &occ).unwrap();
            let value = squeezed_vdp::fock::expectation(&state, &n1).unwrap();
            assert!((value - C64::new(occ[0] as f64, 0.0)).norm() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dagger_is_an_anti_involution(x in entries(4), y in entries(4)) {
        let (a, b) = (operator(4, &x), operator(4, &y));
        prop_assert!(dagger(&dagger(&a)).max_abs_diff(&a).unwrap() == 0.0);
        let lhs = dagger(&a.mul(&b).unwrap());
        let rhs = dagger(&b).mul(&dagger(&a)).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12);
    }

    #[test]
    fn tensor_mixed_product(w in entries(2), x in entries(3), y in entries(2), z in entries(3)) {
        let (a, b, c, d) = (operator(2, &w), operator(3, &x), operator(2, &y), operator(3, &z));
        let lhs = tensor(&a, &b).mul(&tensor(&c, &d)).unwrap();
        let rhs = tensor(&a.mul(&c).unwrap(), &b.mul(&d).unwrap());
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12);
        prop_assert!(dagger(&tensor(&a, &b)).max_abs_diff(&tensor(&dagger(&a), &dagger(&b))).unwrap() <= 1e-12);
    }

    #[test]
    fn commutator_is_antisymmetric_and_traceless(x in entries(5), y in entries(5)) {
        let (a, b) = (operator(5, &x), operator(5, &y));
        let ab = a.commutator(&b).unwrap();
        let ba = b.commutator(&a).unwrap();
        prop_assert!(ab.add(&ba).unwrap().frobenius_norm() <= 1e-12);
        prop_assert!(ab.trace().norm() <= 1e-12);
    }

    #[test]
    fn partial_trace_of_product_recovers_factors(x in entries(3), y in entries(2)) {
        let (g, h) = (operator(3, &x), operator(2, &y));
        let normalize = |op: Operator| {
            let p = op.mul(&dagger(&op)).unwrap();
            let t = p.trace();
            DensityMatrix::new(p.scale(C64::new(1.0, 0.0) / t)).unwrap()
        };
        let (r1, r2) = (normalize(g), normalize(h));
        let joint = DensityMatrix::new(tensor(r1.operator(), r2.operator())).unwrap();
        let k0 = partial_trace(&joint, 0).unwrap();
        let k1 = partial_trace(&joint, 1).unwrap();
        prop_assert!(k0.operator().max_abs_diff(r1.operator()).unwrap() <= 1e-12);
        prop_assert!(k1.operator().max_abs_diff(r2.operator()).unwrap() <= 1e-12);
    }
}
