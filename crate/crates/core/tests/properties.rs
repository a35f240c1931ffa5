use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qatm_core::infomeasures::{concurrence, mutual_information};
use qatm_core::model::dephase;
use qatm_core::qcore::{
    expm, kron, partial_trace, trace_distance, von_neumann_entropy, ComplexMatrix, DensityMatrix,
    LogBase,
};

fn matrix(dim: usize, entries: &[(f64, f64)]) -> ComplexMatrix {
    ComplexMatrix::new(
        dim,
        dim,
        entries.iter().map(|&(re, im)| C64::new(re, im)).collect(),
    )
    .unwrap()
}

fn density(dim: usize, entries: &[(f64, f64)]) -> DensityMatrix {
    let a = matrix(dim, entries);
    let p = &a * &a.dagger();
    let tr = p.trace();
    DensityMatrix::new(p.scale(C64::new(1.0, 0.0) / tr)).unwrap()
}

fn unitary(entries: &[(f64, f64)]) -> ComplexMatrix {
    let a = matrix(2, entries);
    let hermitian = (&a + &a.dagger()).scale(C64::new(0.0, 1.0));
    expm(&hermitian).unwrap()
}

fn entries(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n).prop_filter("nonzero", |v| {
        v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn concurrence_is_invariant_under_local_unitaries(r in entries(16), u in entries(4), v in entries(4)) {
        let rho = density(4, &r);
        let uv = kron(&unitary(&u), &unitary(&v));
        let rotated = rho.conjugate_by(&uv).unwrap();
        let (a, b) = (concurrence(&rho).unwrap(), concurrence(&rotated).unwrap());
        prop_assert!((a - b).abs() <= 1e-9, "{} vs {}", a, b);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn trace_distance_is_a_metric(a in entries(16), b in entries(16), c in entries(16)) {
        let (x, y, z) = (density(4, &a), density(4, &b), density(4, &c));
        let xy = trace_distance(&x, &y).unwrap();
        let yz = trace_distance(&y, &z).unwrap();
        let xz = trace_distance(&x, &z).unwrap();
        prop_assert!(xz <= xy + yz + 1e-12);
        prop_assert!((xy - trace_distance(&y, &x).unwrap()).abs() < 1e-12);
        prop_assert!(trace_distance(&x, &x).unwrap() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&xy));
    }

    #[test]
    fn entropy_is_additive_on_products(a in entries(4), b in entries(4)) {
        let (x, y) = (density(2, &a), density(2, &b));
        let joint = von_neumann_entropy(&x.tensor(&y), LogBase::Two);
        let sum = von_neumann_entropy(&x, LogBase::Two) + von_neumann_entropy(&y, LogBase::Two);
        prop_assert!((joint - sum).abs() < 1e-9);
        prop_assert!(mutual_information(&x.tensor(&y), &[2, 2], &[0], &[1], LogBase::Two).unwrap().abs() < 1e-9);
    }

    #[test]
    fn mutual_information_is_nonnegative(r in entries(64)) {
        let rho = density(8, &r);
        let mi = mutual_information(&rho, &[2, 2, 2], &[0], &[1, 2], LogBase::Two).unwrap();
        prop_assert!(mi >= -1e-9);
        prop_assert!(mi <= 2.0 + 1e-9);
    }

    #[test]
    fn pure_states_have_equal_marginal_entropies(psi in entries(8)) {
        let norm: f64 = psi.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
        let v: Vec<C64> = psi.iter().map(|&(a, b)| C64::new(a, b) / norm).collect();
        let rho = DensityMatrix::pure(&v).unwrap();
        let dims = [2, 4];
        let sa = von_neumann_entropy(&partial_trace(&rho, &dims, &[0]).unwrap(), LogBase::Two);
        let sb = von_neumann_entropy(&partial_trace(&rho, &dims, &[1]).unwrap(), LogBase::Two);
        prop_assert!((sa - sb).abs() < 1e-8);
        let mi = mutual_information(&rho, &dims, &[0], &[1], LogBase::Two).unwrap();
        prop_assert!((mi - sa - sb).abs() < 1e-8);
    }

    #[test]
    fn partial_traces_compose(r in entries(64)) {
        let rho = density(8, &r);
        let direct = partial_trace(&rho, &[2, 2, 2], &[2]).unwrap();
        let staged = partial_trace(&partial_trace(&rho, &[2, 2, 2], &[1, 2]).unwrap(), &[2, 2], &[1]).unwrap();
        prop_assert!(direct.matrix().approx_eq(staged.matrix(), 1e-12));
    }

    #[test]
    fn dephasing_is_idempotent_and_commutes_with_partial_trace(r in entries(16)) {
        let rho = density(4, &r);
        let once = dephase(&rho);
        prop_assert_eq!(dephase(&once), once.clone());
        let a = partial_trace(&once, &[2, 2], &[0]).unwrap();
        let b = dephase(&partial_trace(&rho, &[2, 2], &[0]).unwrap());
        prop_assert!(a.matrix().approx_eq(b.matrix(), 1e-12));
    }
}
