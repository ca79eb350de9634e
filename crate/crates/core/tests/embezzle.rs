use std::time::Instant;

use mergelab::embezzle::*;
use mergelab::entropy::{
    h_max_of_spectrum, h_min_conditional_on, h_min_relative_on, hmin_feasibility_margin, SolverOptions,
};
use mergelab::qstate::schmidt_decomposition;
use mergelab::Error;

fn tilt(d: usize, alpha: f64) -> EmbezzleParams {
    EmbezzleParams::new(d, alpha, Family::CommonTilt, 0.5).unwrap()
}

#[test]
fn harmonic_numbers() {
    assert_eq!(harmonic(1), 1.0);
    assert!((harmonic(2) - 1.5).abs() < 1e-15);
    assert!((harmonic(4) - 25.0 / 12.0).abs() < 1e-15);
    for d in [1usize, 2, 10, 1000, 100_000] {
        let h = harmonic(d);
        let df = d as f64;
        assert!((df + 1.0).ln() <= h && h <= df.ln() + 1.0);
    }
}

#[test]
fn trivial_dimension_is_a_product_state() {
    let p = EmbezzleParams::new(1, 0.0, Family::Orthonormal, 0.5).unwrap();
    let psi = build_embezzling(&p).unwrap();
    assert_eq!(psi.dim(), 1);
    assert_eq!(hmax_formula(1), 0.0);
}

#[test]
fn orthonormal_spectrum_for_two() {
    let p = EmbezzleParams::new(2, 0.0, Family::Orthonormal, 0.5).unwrap();
    let psi = build_embezzling(&p).unwrap();
    let s = schmidt_decomposition(&psi, &["C1", "C2"]).unwrap();
    assert!((s.coefficients[0].powi(2) - 2.0 / 3.0).abs() < 1e-12);
    assert!((s.coefficients[1].powi(2) - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn schmidt_coefficients_are_harmonic() {
    let p = tilt(4, 0.3);
    let psi = build_embezzling(&p).unwrap();
    let s = schmidt_decomposition(&psi, &["C1", "C2"]).unwrap();
    let h4 = harmonic(4);
    for (j, c) in s.coefficients.iter().take(4).enumerate() {
        assert!((c - (1.0 / ((j + 1) as f64 * h4)).sqrt()).abs() < 1e-12);
    }
    let c1 = psi.marginal_spectrum(&["C1"]).unwrap();
    for (a, b) in c1.iter().zip(embezzling_spectrum(4)) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn common_tilt_overlaps_are_exact() {
    let g = gram(&tilt(8, 1.0 / 8.0));
    for i in 0..8 {
        assert!((g[(i, i)] - 1.0).abs() < 1e-12);
        for j in 0..8 {
            if i != j {
                assert!((g[(i, j)] - 0.125).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn tilt_needs_valid_parameters() {
    assert!(matches!(EmbezzleParams::new(0, 0.0, Family::Orthonormal, 0.5), Err(Error::Input(_))));
    assert!(matches!(EmbezzleParams::new(4, 0.2, Family::Orthonormal, 0.5), Err(Error::Input(_))));
    assert!(matches!(build_embezzling(&tilt(128, 0.1)), Err(Error::Scale(_))));
}

#[test]
fn gershgorin_exact_matches_generic_evaluation() {
    for (d, alpha) in [(4usize, 0.25), (8, 0.125), (16, 1.0 / 16.0), (6, 0.7)] {
        let p = tilt(d, alpha);
        let rec = gershgorin_bound(&p).unwrap();
        let psi = build_embezzling(&p).unwrap();
        let sigma = psi.reduced(&["R"]).unwrap();
        let generic = -h_min_relative_on(&psi, &["C1"], &sigma).unwrap().value;
        assert!((rec.hmin_exact - generic).abs() < 1e-9, "d={d}: {} vs {generic}", rec.hmin_exact);
        assert!((rec.hmin_exact - (1.0 + alpha * (d as f64 - 1.0)).log2()).abs() < 1e-10);
        assert!(rec.hmin_exact <= rec.hmin_upper + 1e-12);
        assert!(rec.eigencheck_min >= -1e-8);
        if d <= 8 {
            let rho = psi.reduced(&["C1", "R"]).unwrap().to_density();
            let dense = hmin_feasibility_margin(&rho, &sigma.to_density(), rec.lambda_bound);
            assert!(dense >= -1e-8);
            assert!((dense - rec.eigencheck_min).abs() < 1e-9);
        }
    }
}

#[test]
fn gershgorin_specific_bounds() {
    let r = gershgorin_bound(&tilt(16, 1.0 / 16.0)).unwrap();
    assert!(r.hmin_exact <= 3f64.log2());
    let p = EmbezzleParams::new(64, 0.125, Family::CommonTilt, 0.1).unwrap();
    let r = gershgorin_bound(&p).unwrap();
    assert!(r.hmin_exact <= 17f64.log2());
    assert!(r.hmin_upper <= r.loose_upper.unwrap());
    let e1 = r.e1_sufficient.unwrap();
    assert!((e1 - (3.0 + 4.0 * 10f64.log2() + 14.0)).abs() < 1e-12);
    assert!(r.e1_exact <= e1);
    let o = gershgorin_bound(&EmbezzleParams::new(8, 0.0, Family::Orthonormal, 0.5).unwrap()).unwrap();
    assert_eq!(o.hmin_upper, 0.0);
    assert!(o.hmin_exact.abs() < 1e-12);
}

#[test]
fn alpha_one_over_d_makes_e1_constant() {
    for d in [8usize, 64, 1024] {
        let r = gershgorin_bound(&EmbezzleParams::new(d, 1.0 / d as f64, Family::CommonTilt, 0.5).unwrap()).unwrap();
        assert!((r.e1_sufficient.unwrap() - (4.0 + 14.0)).abs() < 1e-9);
    }
}

#[test]
fn second_sender_conditional_entropy_is_zero() {
    let p = tilt(8, 0.125);
    let psi = build_embezzling(&p).unwrap();
    let (rep, _) = h_min_conditional_on(&psi, &["C2"], &["R"], &SolverOptions::default()).unwrap();
    assert!(rep.value.abs() < 1e-6, "{}", rep.value);
    assert!(rep.gap() <= 1e-6);
}

#[test]
fn max_entropy_formula_and_duality() {
    let p = tilt(8, 0.125);
    let psi = build_embezzling(&p).unwrap();
    let spec = psi.marginal_spectrum(&["C1"]).unwrap();
    assert!((h_max_of_spectrum(&spec) - hmax_formula(8)).abs() < 1e-10);
    let (rep, _) = h_min_conditional_on(&psi, &["C1"], &["R", "C2"], &SolverOptions::default()).unwrap();
    assert!((-rep.value - hmax_formula(8)).abs() <= rep.gap() + 1e-9);
}

#[test]
fn singlet_fraction_values() {
    let r = singlet_fraction(2).unwrap();
    let want = (1.0 + 0.5f64.sqrt()).powi(2) / 3.0;
    assert!((r.aligned_overlap - want).abs() < 1e-12);
    assert!((r.aligned_overlap - 0.971).abs() < 1e-3);
    let r = singlet_fraction(1024).unwrap();
    assert!(r.aligned_overlap >= 0.5);
    assert!(r.overlap_claim_holds);
    assert!(r.hmin_lower_aligned <= r.hmax + 1e-12);
    assert!(matches!(singlet_fraction(1), Err(Error::Input(_))));
}

#[test]
fn singlet_threshold_is_discovered() {
    let t = singlet_threshold(4096).unwrap();
    assert!(singlet_fraction(t).unwrap().overlap_claim_holds);
    if t > 2 {
        assert!(!singlet_fraction(t - 1).unwrap().overlap_claim_holds);
    }
}

#[test]
fn smoothing_estimate_at_1024() {
    let p = EmbezzleParams::new(1024, 0.0, Family::Orthonormal, 0.5).unwrap();
    let r = smoothing_estimate(&p).unwrap();
    assert!(r.threshold_consistent);
    assert!(r.bound_bits <= r.truncation_bits + 1e-12);
    assert!(r.bound_bits <= r.hmax);
    let lo = (r.k as f64).log2() - 10f64.log2() + 2.0;
    assert!(r.bound_bits >= lo, "{} < {lo}", r.bound_bits);
    let p = EmbezzleParams::new(1024, 0.0, Family::Orthonormal, 0.1).unwrap();
    assert!(smoothing_estimate(&p).unwrap().savings_bits < 0.01);
}

#[test]
fn smoothing_threshold_decreases_with_delta() {
    let mut last = f64::INFINITY;
    for delta in [0.01, 0.2, 0.5, 0.9, 0.999] {
        let p = EmbezzleParams { d: 100, alpha: 0.0, family: Family::Orthonormal, epsilon: 0.5, delta };
        let k = smoothing_estimate(&p).unwrap().k_threshold;
        assert!(k < last);
        last = k;
    }
    assert!((last - 101f64.powf(1.0 - 0.999f64.powi(2) / 2.0) / std::f64::consts::E).abs() < 1e-12);
}

#[test]
fn cost_table_at_1024() {
    let t = cost_comparison(&EmbezzleParams::new(1024, 1.0 / 32.0, Family::CommonTilt, 0.1).unwrap()).unwrap();
    assert!((t.thm4_sum - 35.2877).abs() < 0.01);
    assert!((t.prop5_lower - 67.2535).abs() < 0.01);
    assert!(t.thm4_below);
    assert!(t.difference > 0.0);
    assert!(t.prop5_lower_smoothed < t.prop5_lower);
}

#[test]
fn large_d_records_are_cheap() {
    let start = Instant::now();
    let p = EmbezzleParams::new(1024, 1.0 / 1024.0, Family::CommonTilt, 0.1).unwrap();
    let g = gershgorin_bound(&p).unwrap();
    assert!(g.hmin_exact <= g.hmin_upper);
    assert!(start.elapsed().as_secs() < 30);
}
