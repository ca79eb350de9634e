//! Property checks runnable from the command line.

use std::fmt::Write as _;

use mergelab::embezzle::{cost_comparison, EmbezzleParams, Family};
use mergelab::entropy::{
    cond_von_neumann, h2_collision, h_min_conditional, h_min_relative, smooth_h_max_truncation, typicality,
    typicality_operator_inequality,
};
use mergelab::merge::{lemma3_residual_and_bound, run_merging, solve_integral_costs, MergeSetup};
use mergelab::qstate::{
    basis_state, ghz, max_entangled, max_mixed, random_density, random_pure, state_from_json, state_to_json,
    tensor_product, Role, Subsystem, SystemLayout,
};
use mergelab::region::{assisted_rate, build_merge_region, corner_points_m2, cut_entropies, min_cut_signs};
use mergelab::rng::stream;

use crate::args::SelftestArgs;
use crate::error::{CliError, CliResult};
use crate::output::emit;

type Check = (&'static str, fn() -> mergelab::Result<Option<String>>);

fn close(a: f64, b: f64, tol: f64) -> Option<String> {
    ((a - b).abs() > tol).then(|| format!("{a} differs from {b}"))
}

fn layout(parts: &[(&str, usize)]) -> SystemLayout {
    SystemLayout::new(parts.iter().map(|&(l, d)| Subsystem::new(l, d, Role::Sender)).collect()).expect("valid layout")
}

fn epr_conditional() -> mergelab::Result<Option<String>> {
    let phi = max_entangled(2, "C1", "B")?;
    Ok(close(cond_von_neumann(&phi, &["C1"], &["B"])?, -1.0, 1e-12))
}

fn maximally_entangled_hmin() -> mergelab::Result<Option<String>> {
    let phi = max_entangled(4, "A", "B")?;
    Ok(close(h_min_conditional(&phi, &["B"])?.value, -2.0, 1e-6))
}

fn compression_corners() -> mergelab::Result<Option<String>> {
    let phi = max_entangled(2, "C1", "C2")?;
    let none: [&str; 0] = [];
    let c = corner_points_m2(&phi, &["C1", "C2"], &none)?;
    Ok(close(c[0][0], 1.0, 1e-12).or(close(c[0][1], -1.0, 1e-12)).or(close(c[1][0], -1.0, 1e-12)))
}

fn ghz_assisted_rate() -> mergelab::Result<Option<String>> {
    let g = ghz(&["A", "B", "C1"])?;
    Ok(close(assisted_rate(&g, &["A"], &["B"], &["C1"])?, 1.0, 1e-12))
}

fn quarter_truncation() -> mergelab::Result<Option<String>> {
    let t = smooth_h_max_truncation(&[0.5, 0.25, 0.25], 0.5f64.sqrt())?;
    Ok(close(t.lower_bound_bits, -1.0, 0.0))
}

fn product_state_merges_exactly() -> mergelab::Result<Option<String>> {
    let psi = tensor_product(&basis_state("C1", 2, 0)?, &basis_state("B", 2, 1)?)?;
    let rep = run_merging(&psi, &MergeSetup::new(&["C1"], &["B"], &[]), &[1], &[1], 3)?;
    Ok((rep.end_to_end_error > 1e-9 || rep.q_error > 1e-9).then(|| format!("error {}", rep.end_to_end_error)))
}

fn embezzling_costs() -> mergelab::Result<Option<String>> {
    let t = cost_comparison(&EmbezzleParams::new(1024, 1.0 / 1024.0, Family::CommonTilt, 0.1)?)?;
    Ok(close(t.thm4_sum, 35.29, 0.01)
        .or(close(t.prop5_lower, 67.25, 0.01))
        .or((!t.thm4_below).then(|| "ordering".into())))
}

fn integral_costs() -> mergelab::Result<Option<String>> {
    let e = solve_integral_costs(2, &[(0b01, 1.5), (0b10, -0.5), (0b11, 3.2)]);
    Ok((e != vec![3, 1]).then(|| format!("{e:?}")))
}

fn state_round_trip() -> mergelab::Result<Option<String>> {
    let g = ghz(&["C1", "C2", "B"])?;
    let back = state_from_json(&state_to_json(&g))?;
    Ok((back != g).then(|| "state changed".into()))
}

fn maximally_mixed_typicality() -> mergelab::Result<Option<String>> {
    let t = typicality(&max_mixed(2, "X")?, 4, 0.1)?;
    Ok((t.rank != 16).then(|| format!("rank {}", t.rank)))
}

const QUICK: [Check; 10] = [
    ("epr_conditional_entropy", epr_conditional),
    ("maximally_entangled_hmin", maximally_entangled_hmin),
    ("compression_corners", compression_corners),
    ("ghz_assisted_rate", ghz_assisted_rate),
    ("quarter_truncation", quarter_truncation),
    ("product_state_merges_exactly", product_state_merges_exactly),
    ("embezzling_costs", embezzling_costs),
    ("integral_costs", integral_costs),
    ("state_round_trip", state_round_trip),
    ("maximally_mixed_typicality", maximally_mixed_typicality),
];

fn collision_dominates() -> mergelab::Result<Option<String>> {
    let mut rng = stream(101, 0);
    for i in 0..200 {
        let (da, db) = (1 + i % 3, 1 + (i / 3) % 3);
        let rho = random_density(layout(&[("A", da), ("B", db)]), 1 + i % 4, &mut rng);
        let sigma = random_density(layout(&[("B", db)]), db, &mut rng);
        if h_min_relative(&rho, &sigma)?.value > h2_collision(&rho, &sigma)? + 1e-9 {
            return Ok(Some(format!("case {i}")));
        }
    }
    Ok(None)
}

fn decoupling_in_expectation() -> mergelab::Result<Option<String>> {
    let senders = vec!["C1".to_string(), "C2".to_string()];
    let reference = vec!["R".to_string()];
    for s in 0..3u64 {
        let psi = random_pure(layout(&[("C1", 4), ("C2", 4), ("R", 4)]), &mut stream(200 + s, 0));
        let mut mean = 0.0;
        let mut rhs = 0.0;
        for seed in 0..100 {
            let (lhs, r) = lemma3_residual_and_bound(&psi, &senders, &reference, &[2, 2], seed)?;
            mean += lhs / 100.0;
            rhs = r;
        }
        if mean > rhs {
            return Ok(Some(format!("state {s}: {mean} > {rhs}")));
        }
    }
    Ok(None)
}

fn min_cut_agrees_with_brute_force() -> mergelab::Result<Option<String>> {
    for s in 0..20u64 {
        let psi = random_pure(layout(&[("C1", 2), ("C2", 2), ("A", 2), ("B", 2)]), &mut stream(300 + s, 0));
        let brute = cut_entropies(&psi, &["A"], &["C1", "C2"])?.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        let rate = assisted_rate(&psi, &["A"], &["B"], &["C1", "C2"])?;
        if rate != brute {
            return Ok(Some(format!("state {s}: {rate} vs {brute}")));
        }
        let signs = min_cut_signs(&psi, &["A"], &["B"], &["C1", "C2"])?;
        if !signs.tied && !(signs.t_side_negative && signs.tbar_side_nonpositive) {
            return Ok(Some(format!("state {s}: sign conditions")));
        }
    }
    Ok(None)
}

fn merge_region_is_consistent() -> mergelab::Result<Option<String>> {
    let psi = random_pure(layout(&[("C1", 2), ("C2", 2), ("B", 2), ("R", 2)]), &mut stream(400, 0));
    let r = build_merge_region(&psi, &["C1", "C2"], &["B"])?;
    for c in corner_points_m2(&psi, &["C1", "C2"], &["B"])? {
        if !r.contains(&c)?.inside {
            return Ok(Some(format!("corner {c:?} outside")));
        }
    }
    Ok(None)
}

fn typical_projectors() -> mergelab::Result<Option<String>> {
    let rho = random_density(layout(&[("X", 2)]), 2, &mut stream(500, 0));
    let mut projs = Vec::new();
    for n in 1..=4 {
        let t = typicality(&rho, n, 0.2)?;
        let (lo, hi) = t.sandwich();
        if !(lo <= t.rank as f64 && t.rank as f64 <= hi) {
            return Ok(Some(format!("n={n}: rank {} outside [{lo}, {hi}]", t.rank)));
        }
        if n == 3 {
            projs = vec![t.projector(); 2];
        }
    }
    let min = typicality_operator_inequality(&projs)?;
    Ok((min < -1e-9).then(|| format!("minimum eigenvalue {min}")))
}

const FULL: [Check; 5] = [
    ("collision_dominates_min_entropy", collision_dominates),
    ("decoupling_in_expectation", decoupling_in_expectation),
    ("min_cut_agrees_with_brute_force", min_cut_agrees_with_brute_force),
    ("merge_region_is_consistent", merge_region_is_consistent),
    ("typical_projectors", typical_projectors),
];

pub fn run(a: &SelftestArgs) -> CliResult<()> {
    let checks: Vec<&Check> = if a.quick { QUICK.iter().collect() } else { QUICK.iter().chain(&FULL).collect() };
    let mut report = String::new();
    let mut failed = Vec::new();
    for (name, f) in checks {
        let outcome = match f() {
            Ok(None) => None,
            Ok(Some(why)) => Some(why),
            Err(e) => Some(e.to_string()),
        };
        match outcome {
            None => {
                let _ = writeln!(report, "PASS {name}");
            }
            Some(why) => {
                let _ = writeln!(report, "FAIL {name}: {why}");
                failed.push(*name);
            }
        }
    }
    emit(a.out.as_deref(), &report)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(format!("selftest failures: {}", failed.join(", "))))
    }
}
