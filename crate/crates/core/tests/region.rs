use mergelab::entropy::cond_von_neumann;
use mergelab::merge::{MergeSetup, SplitSetup};
use mergelab::qstate::*;
use mergelab::region::*;
use mergelab::rng::stream;
use mergelab::Error;

fn layout(parts: &[(&str, usize, Role)]) -> SystemLayout {
    SystemLayout::new(parts.iter().map(|&(l, d, r)| Subsystem::new(l, d, r)).collect()).unwrap()
}

fn random_state(parts: &[(&str, usize, Role)], seed: u64) -> QuantumState {
    random_pure(layout(parts), &mut stream(seed, 0))
}

fn shannon(psi: &QuantumState, keep: &[&str]) -> f64 {
    psi.marginal_spectrum(keep).unwrap().iter().filter(|&&p| p > 1e-15).map(|p| -p * p.log2()).sum()
}

fn three_party(seed: u64) -> QuantumState {
    random_state(
        &[("C1", 2, Role::Sender), ("C2", 2, Role::Sender), ("B", 2, Role::ReceiverB), ("R", 4, Role::Reference)],
        seed,
    )
}

#[test]
fn single_sender_epr_has_negative_cost() {
    let psi = max_entangled(2, "C1", "B").unwrap();
    let r = build_merge_region(&psi, &["C1"], &["B"]).unwrap();
    assert_eq!(r.provenance, Provenance::Thm1);
    assert_eq!(r.inequalities.len(), 1);
    assert!((r.rhs(&[0]).unwrap() + 1.0).abs() < 1e-12);
    assert!(r.contains(&[-1.0]).unwrap().inside);
    assert!(!r.contains(&[-1.1]).unwrap().inside);
}

#[test]
fn compression_corners_of_an_entangled_pair() {
    let psi = max_entangled(2, "C1", "C2").unwrap();
    let no_receiver: [&str; 0] = [];
    let r = build_merge_region(&psi, &["C1", "C2"], &no_receiver).unwrap();
    assert_eq!(r.provenance, Provenance::Compression);
    let corners = corner_points_m2(&psi, &["C1", "C2"], &no_receiver).unwrap();
    assert!((corners[0][0] - 1.0).abs() < 1e-12 && (corners[0][1] + 1.0).abs() < 1e-12);
    assert!((corners[1][0] + 1.0).abs() < 1e-12 && (corners[1][1] - 1.0).abs() < 1e-12);
    let v = r.vertices_m2().unwrap();
    assert_eq!(v.len(), 2);
    for c in corners {
        let mem = r.contains(&c).unwrap();
        assert!(mem.inside);
        assert_eq!(mem.saturated(&r).len(), 2);
    }
}

#[test]
fn corners_saturate_their_inequalities() {
    for seed in 0..5 {
        let psi = three_party(seed);
        let r = build_merge_region(&psi, &["C1", "C2"], &["B"]).unwrap();
        let corners = corner_points_m2(&psi, &["C1", "C2"], &["B"]).unwrap();
        let first = r.contains(&corners[0]).unwrap();
        assert!(first.inside);
        let sat = first.saturated(&r);
        assert!(sat.contains(&[1usize].as_slice()) && sat.contains(&[0usize, 1].as_slice()));
        let second = r.contains(&corners[1]).unwrap();
        let sat = second.saturated(&r);
        assert!(sat.contains(&[0usize].as_slice()) && sat.contains(&[0usize, 1].as_slice()));
        let v = r.vertices_m2().unwrap();
        for (a, b) in v.iter().zip([corners[1], corners[0]]) {
            assert!((a[0] - b[0]).abs() < 1e-9 && (a[1] - b[1]).abs() < 1e-9);
        }
    }
}

#[test]
fn membership_reports_violations_and_upward_closure() {
    let psi = three_party(7);
    let r = build_merge_region(&psi, &["C1", "C2"], &["B"]).unwrap();
    let c = corner_points_m2(&psi, &["C1", "C2"], &["B"]).unwrap()[0];
    let below = [c[0] - 0.1, c[1] - 0.1];
    let mem = r.contains(&below).unwrap();
    assert!(!mem.inside);
    assert!(mem.violated.contains(&vec![0, 1]));
    assert!(r.contains(&[c[0] + 10.0, c[1] + 10.0]).unwrap().inside);
    assert!(matches!(r.contains(&[0.0]), Err(Error::Dimension(_))));
}

#[test]
fn rhs_matches_brute_force_conditional_entropies() {
    let psi = random_state(
        &[
            ("C1", 2, Role::Sender),
            ("C2", 2, Role::Sender),
            ("C3", 2, Role::Sender),
            ("B", 2, Role::ReceiverB),
            ("R", 2, Role::Reference),
        ],
        11,
    );
    let senders = ["C1", "C2", "C3"];
    let r = build_merge_region(&psi, &senders, &["B"]).unwrap();
    assert_eq!(r.inequalities.len(), 7);
    for q in &r.inequalities {
        let part: Vec<&str> = q.subset.iter().map(|&i| senders[i]).collect();
        let mut cond: Vec<&str> = (0..3).filter(|i| !q.subset.contains(i)).map(|i| senders[i]).collect();
        cond.push("B");
        let joint: Vec<&str> = part.iter().chain(&cond).copied().collect();
        let direct = shannon(&psi, &joint) - shannon(&psi, &cond);
        assert!((q.rhs - direct).abs() < 1e-9);
        assert!((q.rhs - cond_von_neumann(&psi, &part, &cond).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn split_region_with_everything_on_one_side_is_merging() {
    let psi = random_state(
        &[("C1", 2, Role::Sender), ("C2", 2, Role::Sender), ("A", 2, Role::ReceiverA), ("B", 3, Role::ReceiverB)],
        3,
    );
    let setup = SplitSetup {
        t: vec!["C1".into(), "C2".into()],
        tbar: vec![],
        a: vec!["A".into()],
        b: vec!["B".into()],
        reference: vec![],
    };
    let split = build_split_region(&psi, &setup).unwrap();
    let merge = build_merge_region(&psi, &["C1", "C2"], &["A"]).unwrap();
    assert!(split.tbar_side.inequalities.is_empty());
    for (a, b) in split.t_side.inequalities.iter().zip(&merge.inequalities) {
        assert_eq!(a.subset, b.subset);
        assert!((a.rhs - b.rhs).abs() < 1e-12);
    }
}

#[test]
fn assisted_rates_of_simple_states() {
    let psi = ghz(&["A", "B", "C1"]).unwrap();
    assert!((assisted_rate(&psi, &["A"], &["B"], &["C1"]).unwrap() - 1.0).abs() < 1e-12);
    let prod = tensor_product(&max_entangled(2, "A", "C1").unwrap(), &basis_state("B", 2, 0).unwrap()).unwrap();
    assert!(assisted_rate(&prod, &["A"], &["B"], &["C1"]).unwrap().abs() < 1e-12);
}

#[test]
fn min_cut_signs_on_random_states() {
    for seed in 0..10 {
        let psi = random_state(
            &[("C1", 2, Role::Sender), ("C2", 2, Role::Sender), ("A", 2, Role::ReceiverA), ("B", 2, Role::ReceiverB)],
            100 + seed,
        );
        let signs = min_cut_signs(&psi, &["A"], &["B"], &["C1", "C2"]).unwrap();
        let oracle = cut_entropies(&psi, &["A"], &["C1", "C2"]).unwrap();
        let best = oracle.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        assert!((assisted_rate(&psi, &["A"], &["B"], &["C1", "C2"]).unwrap() - best).abs() < 1e-12);
        if !signs.tied {
            assert!(signs.t_side_negative, "seed {seed}: {:?}", signs.max_t_side);
            assert!(signs.tbar_side_nonpositive, "seed {seed}: {:?}", signs.max_tbar_side);
        }
    }
}

#[test]
fn one_shot_points_for_two_senders() {
    let psi = ghz(&["C1", "C2", "B", "R"]).unwrap();
    let setup = MergeSetup::new(&["C1", "C2"], &["B"], &["R"]);
    let regions = one_shot_regions(&psi, &setup, 0.5).unwrap();
    assert_eq!(regions.prop5_points.len(), 2);
    assert_eq!(regions.thm4.provenance, Provenance::Thm4);
    assert_eq!(regions.thm4.inequalities.len(), 3);
    for p in &regions.prop5_points {
        assert_eq!(p.costs.len(), 2);
        assert!(p.upward_closed);
    }
}

#[test]
fn single_sender_constants_differ_by_two() {
    let psi = ghz(&["C1", "B", "R"]).unwrap();
    let setup = MergeSetup::new(&["C1"], &["B"], &["R"]);
    let regions = one_shot_regions(&psi, &setup, 0.25).unwrap();
    let joint = regions.thm4.rhs(&[0]).unwrap();
    let seq = regions.prop5_points[0].costs[0];
    assert!((seq - joint - 2.0).abs() < 1e-6, "{seq} vs {joint}");
    assert!(regions.prop5_points[0].inside_thm4);
}

#[test]
fn json_round_trip_and_scope() {
    let psi = three_party(2);
    let r = build_merge_region(&psi, &["C1", "C2"], &["B"]).unwrap();
    let text = r.to_json();
    assert!(text.contains("\"thm1\""));
    assert_eq!(CostRegion::from_json(&text).unwrap(), r);
    let single = build_merge_region(&psi, &["C1"], &["C2", "B"]).unwrap();
    assert!(matches!(single.vertices_m2(), Err(Error::Scope(_))));
    assert!(matches!(corner_points_m2(&psi, &["C1"], &["B"]), Err(Error::Scope(_))));
    let broken = text.replacen("\"rhs\": ", "\"rhs\": \"x\", \"_\": ", 1);
    assert!(matches!(CostRegion::from_json(&broken), Err(Error::Input(_))));
    let partial = CostRegion::new(
        vec!["C1".into(), "C2".into()],
        vec![Inequality { subset: vec![0], rhs: 0.0 }],
        Provenance::Thm1,
    );
    assert!(matches!(partial, Err(Error::Input(_))));
}

#[test]
fn split_cost_regions_carry_provenance() {
    let psi = ghz(&["C1", "C2", "A", "B"]).unwrap();
    let setup = SplitSetup {
        t: vec!["C1".into()],
        tbar: vec!["C2".into()],
        a: vec!["A".into()],
        b: vec!["B".into()],
        reference: vec![],
    };
    let (t, tb) = split_cost_regions(&psi, &setup, 0.5, 0.5).unwrap();
    assert_eq!(t.provenance, Provenance::Prop8);
    assert_eq!(tb.provenance, Provenance::Prop8);
    assert!(t.to_json().contains("prop8"));
}
