use proptest::prelude::*;

use mergelab::linalg::{frob2, re, CMat};
use mergelab::qstate::{
    closeness, fidelity, haar_unitary, max_entangled, partial_trace, purify, random_density, random_pure,
    schmidt_decomposition, state_from_json, state_to_json, tensor_product, uhlmann_isometry, QuantumState, Role,
    Subsystem, SystemLayout,
};
use mergelab::rng::stream;

fn layout(dims: &[usize]) -> SystemLayout {
    let names = ["A", "B", "C"];
    SystemLayout::new(dims.iter().zip(names).map(|(&d, n)| Subsystem::new(n, d, Role::Ancilla)).collect()).unwrap()
}

fn dist(a: &CMat, b: &CMat) -> f64 {
    frob2(&(a - b)).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_composes(da in 1usize..4, db in 1usize..4, dc in 1usize..4, seed in any::<u64>()) {
        let psi = random_pure(layout(&[da, db, dc]), &mut stream(seed, 0));
        let step = partial_trace(&partial_trace(&psi, &["C"]).unwrap(), &["B"]).unwrap();
        let direct = partial_trace(&psi, &["B", "C"]).unwrap();
        prop_assert!(dist(&step.to_density(), &direct.to_density()) < 1e-12);
        prop_assert!((direct.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reduced_matches_partial_trace(da in 1usize..4, db in 1usize..4, dc in 1usize..4, seed in any::<u64>()) {
        let psi = random_pure(layout(&[da, db, dc]), &mut stream(seed, 1));
        let a = psi.reduced(&["C", "A"]).unwrap();
        let b = partial_trace(&psi, &["B"]).unwrap().permuted(&["C", "A"]).unwrap();
        prop_assert!(dist(&a.to_density(), &b.to_density()) < 1e-12);
    }

    #[test]
    fn json_round_trip(da in 1usize..4, db in 1usize..4, rank in 1usize..4, seed in any::<u64>()) {
        let mut rng = stream(seed, 2);
        for s in [random_pure(layout(&[da, db]), &mut rng), random_density(layout(&[da, db]), rank.min(da * db), &mut rng)] {
            let back = state_from_json(&state_to_json(&s)).unwrap();
            prop_assert_eq!(back.layout(), s.layout());
            prop_assert!(dist(&back.to_density(), &s.to_density()) < 1e-15);
        }
    }

    #[test]
    fn purification_restores_marginal(d in 1usize..6, rank in 1usize..6, seed in any::<u64>()) {
        let rho = random_density(layout(&[d]), rank.min(d), &mut stream(seed, 3));
        let psi = purify(&rho, "R").unwrap();
        prop_assert_eq!(psi.layout().subsystem("R").unwrap().dim, rank.min(d));
        prop_assert!(dist(&psi.reduced(&["A"]).unwrap().to_density(), &rho.to_density()) < 1e-10);
    }

    #[test]
    fn schmidt_reconstructs(da in 1usize..5, db in 1usize..5, seed in any::<u64>()) {
        let psi = random_pure(layout(&[da, db]), &mut stream(seed, 4));
        let s = schmidt_decomposition(&psi, &["A"]).unwrap();
        let total: f64 = s.coefficients.iter().map(|c| c * c).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(s.coefficients.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(dist(&s.reconstruct(), &psi.reshape(&["A"]).unwrap()) < 1e-12);
    }

    #[test]
    fn fidelity_symmetric_and_bounded(d in 1usize..6, ra in 1usize..6, rb in 1usize..6, seed in any::<u64>()) {
        let mut rng = stream(seed, 5);
        let a = random_density(layout(&[d]), ra.min(d), &mut rng).to_density();
        let b = random_density(layout(&[d]), rb.min(d), &mut rng).to_density();
        let (f, g) = (fidelity(&a, &b), fidelity(&b, &a));
        prop_assert!((f - g).abs() < 1e-10);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        prop_assert!((fidelity(&a, &a) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn uhlmann_attains_marginal_fidelity(d in 1usize..4, seed in any::<u64>()) {
        let mut rng = stream(seed, 6);
        let psi = random_pure(layout(&[d, d]), &mut rng);
        let phi = random_pure(layout(&[d, d]), &mut rng);
        let dec = uhlmann_isometry(&psi, &phi, &["B"]).unwrap();
        let f = closeness(&psi.reduced(&["A"]).unwrap(), &phi.reduced(&["A"]).unwrap()).unwrap().fidelity;
        prop_assert!((dec.fidelity - f).abs() < 1e-9);
        let moved = dec.isometry.apply(&psi).unwrap().permuted(&["A", "B"]).unwrap();
        let ov = moved.pure_vector().unwrap().dotc(phi.pure_vector().unwrap()).norm();
        prop_assert!((ov - f).abs() < 1e-9);
    }
}

#[test]
fn pure_fidelity_is_overlap() {
    let mut rng = stream(11, 0);
    // d = 1 sits at F = 1, where √(1 − F²) magnifies rounding.
    for d in 2..8 {
        let a = random_pure(layout(&[d]), &mut rng);
        let b = random_pure(layout(&[d]), &mut rng);
        let ov = a.pure_vector().unwrap().dotc(b.pure_vector().unwrap()).norm();
        let c = closeness(&a, &b).unwrap();
        assert!((c.fidelity - ov).abs() < 1e-12);
        assert!((c.trace_distance - (1.0 - ov * ov).sqrt()).abs() < 1e-12);
        assert!((c.purified_distance - c.trace_distance).abs() < 1e-12);
    }
}

#[test]
fn tensor_with_unitary_keeps_norm() {
    let u = haar_unitary(6, 3);
    assert!(dist(&(u.adjoint() * &u), &CMat::identity(6, 6)) < 1e-12);
    let phi = max_entangled(3, "X", "Y").unwrap();
    let psi = random_pure(layout(&[2]), &mut stream(3, 1));
    let joint = tensor_product(&psi, &phi).unwrap();
    assert_eq!(joint.layout().labels(), ["A", "X", "Y"]);
    let v = joint.pure_vector().unwrap();
    assert!((v.norm() - 1.0).abs() < 1e-12);
    let rotated = &u * v.rows(0, 6).into_owned();
    assert!((rotated.norm() - v.rows(0, 6).norm()).abs() < 1e-12);
}

#[test]
fn malformed_json_reports_position() {
    let err = state_from_json("{\n  \"kind\": \"vector\",\n  oops }").unwrap_err().to_string();
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn rejects_mismatched_layouts() {
    let a = QuantumState::pure(layout(&[2]), mergelab::linalg::CVec::from_element(2, re(0.5f64.sqrt()))).unwrap();
    let b = random_pure(layout(&[3]), &mut stream(0, 0));
    assert!(closeness(&a, &b).is_err());
    assert!(
        SystemLayout::new(vec![Subsystem::new("A", 2, Role::Sender), Subsystem::new("A", 2, Role::Sender)]).is_err()
    );
    assert!(SystemLayout::new(vec![Subsystem::new("A", 0, Role::Sender)]).is_err());
}
