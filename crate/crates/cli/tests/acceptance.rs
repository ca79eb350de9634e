//! The twelve acceptance criteria, each reported as one PASS/FAIL line.

use std::io::Write;
use std::process::Command;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use mergelab::embezzle::{build_embezzling, cost_comparison, gershgorin_bound, hmax_formula, EmbezzleParams, Family};
use mergelab::entropy::{
    h2_collision, h_max_of_spectrum, h_min_conditional, h_min_conditional_on, h_min_relative, h_min_relative_on,
    lemma2_sides, marginal_entropy, smooth_h_max_oracle, smooth_h_max_truncation, typicality,
    typicality_operator_inequality, typicality_operator_inequality_dense, SolverOptions,
};
use mergelab::linalg::re;
use mergelab::merge::{
    lemma3_residual_and_bound, lemma4_bound, run_merging, split_transfer_sim, MergeSetup, SplitSetup,
};
use mergelab::qstate::{
    closeness, ginibre, max_entangled, random_density, random_pure, tensor_product, QuantumState, Role, Subsystem,
    SystemLayout,
};
use mergelab::region::{assisted_rate, min_cut_signs};
use mergelab::rng::{derive_seed, stream};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn layout(parts: &[(&str, usize, Role)]) -> SystemLayout {
    SystemLayout::new(parts.iter().map(|&(l, d, r)| Subsystem::new(l, d, r)).collect()).unwrap()
}

fn plain(parts: &[(&str, usize)]) -> SystemLayout {
    SystemLayout::new(parts.iter().map(|&(l, d)| Subsystem::new(l, d, Role::Ancilla)).collect()).unwrap()
}

// Criteria 1-3 share one sweep: 20 states, 200 Haar seeds each.
const STATES: u64 = 20;
const SEEDS: u64 = 200;
const SWEEP_SEED: u64 = 0x5EED_0001;

struct StateSweep {
    mean_lhs: f64,
    lemma3_rhs: f64,
    mean_q: f64,
    delta: f64,
    lemma4: f64,
    bound_failures: usize,
    worst_slack: f64,
}

fn sweep_states(with_merging: bool) -> Vec<StateSweep> {
    let senders = vec!["C1".to_string(), "C2".to_string()];
    let reference = vec!["R".to_string()];
    let setup = MergeSetup::new(&["C1", "C2"], &["B"], &["R"]);
    (0..STATES)
        .into_par_iter()
        .map(|i| {
            let l = layout(&[
                ("C1", 4, Role::Sender),
                ("C2", 4, Role::Sender),
                ("B", 4, Role::ReceiverB),
                ("R", 4, Role::Reference),
            ]);
            let psi = random_pure(l, &mut stream(SWEEP_SEED, i));
            let mut s = StateSweep {
                mean_lhs: 0.0,
                lemma3_rhs: 0.0,
                mean_q: 0.0,
                delta: 0.0,
                lemma4: lemma4_bound(&psi, &senders, &psi.reduced(&reference).unwrap(), &[2, 2]).unwrap(),
                bound_failures: 0,
                worst_slack: f64::INFINITY,
            };
            for j in 0..SEEDS {
                let seed = derive_seed(derive_seed(SWEEP_SEED, i), j);
                let (lhs, rhs) = lemma3_residual_and_bound(&psi, &senders, &reference, &[2, 2], seed).unwrap();
                s.mean_lhs += lhs / SEEDS as f64;
                s.lemma3_rhs = rhs;
                if with_merging {
                    let rep = run_merging(&psi, &setup, &[1, 1], &[2, 2], seed).unwrap();
                    s.mean_q += rep.q_error / SEEDS as f64;
                    s.delta = rep.delta_bound;
                    let slack = 2.0 * rep.q_error.sqrt() + 1e-6 - rep.end_to_end_error;
                    s.worst_slack = s.worst_slack.min(slack);
                    if slack < 0.0 {
                        s.bound_failures += 1;
                    }
                }
            }
            s
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let sweep = sweep_states(false);
    let secs = start.elapsed().as_secs_f64();
    let bad = sweep.iter().filter(|s| s.mean_lhs > s.lemma3_rhs).count();
    let ratio = sweep.iter().map(|s| s.mean_lhs / s.lemma3_rhs).fold(0.0, f64::max);
    outcome(
        bad == 0 && secs < 60.0,
        format!("{bad}/{STATES} states with mean residual above the bound; max mean/rhs {ratio:.4}; {secs:.2} s"),
    )
}

fn criteria_2_and_3() -> (Outcome, Outcome) {
    let sweep = sweep_states(true);
    let q_bad = sweep.iter().filter(|s| s.mean_q > s.delta).count();
    let runs_bad: usize = sweep.iter().map(|s| s.bound_failures).sum();
    let slack = sweep.iter().map(|s| s.worst_slack).fold(f64::INFINITY, f64::min);
    let q_ratio = sweep.iter().map(|s| s.mean_q / s.delta).fold(0.0, f64::max);
    let c2 = outcome(
        q_bad == 0 && runs_bad == 0,
        format!(
            "{q_bad}/{STATES} states with mean Q above Δ (max ratio {q_ratio:.4}); {runs_bad}/{} runs above 2√Q + 1e-6 (min slack {slack:.3e})",
            STATES * SEEDS
        ),
    );
    let l4_bad = sweep.iter().filter(|s| s.mean_lhs > s.lemma4).count();
    let l4_ratio = sweep.iter().map(|s| s.mean_lhs / s.lemma4).fold(0.0, f64::max);
    let c3 =
        outcome(l4_bad == 0, format!("{l4_bad}/{STATES} states above the min-entropy bound; max ratio {l4_ratio:.4}"));
    (c2, c3)
}

fn criterion_4() -> Outcome {
    let mut rng = stream(0x5EED_0004, 0);
    let mut v = [0usize; 5];
    let mut worst_add: f64 = 0.0;
    for i in 0..1000usize {
        let da = 1 + rng.random_range(0..4usize);
        let db = 1 + rng.random_range(0..4usize);
        let n = da * db;
        let rho = random_density(plain(&[("A", da), ("B", db)]), 1 + rng.random_range(0..n), &mut rng);
        let sigma = random_density(plain(&[("B", db)]), db, &mut rng);
        if h_min_relative(&rho, &sigma).unwrap().value > h2_collision(&rho, &sigma).unwrap() + 1e-9 {
            v[0] += 1;
        }
        let rho2 = random_density(plain(&[("C", 2), ("D", 2)]), 1 + i % 4, &mut rng);
        let sigma2 = random_density(plain(&[("D", 2)]), 2, &mut rng);
        let joint =
            h_min_relative(&tensor_product(&rho, &rho2).unwrap(), &tensor_product(&sigma, &sigma2).unwrap()).unwrap();
        let sum = h_min_relative(&rho, &sigma).unwrap().value + h_min_relative(&rho2, &sigma2).unwrap().value;
        worst_add = worst_add.max((joint.value - sum).abs());
        if (joint.value - sum).abs() > 1e-8 {
            v[1] += 1;
        }
        let g = ginibre(n, n, &mut rng);
        let s = (&g + g.adjoint()) * re(0.5);
        let tau = random_density(plain(&[("X", n)]), n, &mut rng).to_density();
        let (lhs, rhs) = lemma2_sides(&s, &tau);
        if lhs > rhs + 1e-9 {
            v[2] += 1;
        }
        let a = random_density(plain(&[("X", n)]), 1 + rng.random_range(0..n), &mut rng);
        let b = random_density(plain(&[("X", n)]), 1 + rng.random_range(0..n), &mut rng);
        let c = closeness(&a, &b).unwrap();
        let (f, d, p) = (c.fidelity, c.trace_distance, c.purified_distance);
        if 1.0 - f > d + 1e-9 || d > (1.0 - f * f).max(0.0).sqrt() + 1e-9 {
            v[3] += 1;
        }
        if d > p + 1e-9 || p > 2.0 * d.sqrt() + 1e-9 {
            v[4] += 1;
        }
    }
    outcome(
        v.iter().all(|&x| x == 0),
        format!(
            "violations: H_min≤H_2 {}, additivity {} (max dev {worst_add:.2e}), trace-norm {}, fidelity sandwich {}, purified sandwich {}",
            v[0], v[1], v[2], v[3], v[4]
        ),
    )
}

fn criterion_5() -> Outcome {
    let opts = SolverOptions::default();
    let gaps: Vec<f64> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(0x5EED_0005, i);
            let da = rng.random_range(2..=8usize);
            let db = rng.random_range(2..=8usize);
            let rank = rng.random_range(1..=da * db);
            let rho = random_density(plain(&[("A", da), ("B", db)]), rank, &mut rng);
            h_min_conditional_on(&rho, &["A"], &["B"], &opts).unwrap().0.gap()
        })
        .collect();
    let worst = gaps.iter().cloned().fold(0.0, f64::max);
    let over = gaps.iter().filter(|&&g| g > 1e-6).count();
    let mut phi_dev: f64 = 0.0;
    for d in 1..=8usize {
        let phi = max_entangled(d, "A", "B").unwrap();
        let v = h_min_conditional(&phi, &["B"]).unwrap().value;
        phi_dev = phi_dev.max((v + (d as f64).log2()).abs());
    }
    outcome(
        over == 0 && phi_dev <= 1e-6,
        format!("{over}/200 gaps above 1e-6 (max {worst:.2e}); max |H_min(Φ^d) + log d| {phi_dev:.2e}"),
    )
}

fn criterion_6() -> Outcome {
    let opts = SolverOptions::default();
    let mut lines = Vec::new();
    let mut pass = true;
    for d in [8usize, 16, 32, 64] {
        let p = EmbezzleParams::new(d, 1.0 / d as f64, Family::CommonTilt, 0.1).unwrap();
        let g = gershgorin_bound(&p).unwrap();
        let bound = (2.0 * p.alpha * d as f64 + 1.0).log2();
        let psi = build_embezzling(&p).unwrap();
        let mut ok = g.hmin_exact <= bound && g.eigencheck_min >= -1e-8;
        if d <= 16 {
            let generic = -h_min_relative_on(&psi, &["C1"], &psi.reduced(&["R"]).unwrap()).unwrap().value;
            ok &= (generic - g.hmin_exact).abs() <= 1e-8;
        }
        let (c2, _) = h_min_conditional_on(&psi, &["C2"], &["R"], &opts).unwrap();
        ok &= c2.value.abs() <= 1e-6;
        let hmax = h_max_of_spectrum(&psi.marginal_spectrum(&["C1"]).unwrap());
        let formula = hmax_formula(d);
        ok &= (hmax - formula).abs() <= 1e-10;
        let (dual, _) = h_min_conditional_on(&psi, &["C1"], &["R", "C2"], &opts).unwrap();
        ok &= (-dual.value - hmax).abs() <= dual.gap() + 1e-9;
        pass &= ok;
        lines.push(format!(
            "d={d}: -H_min {:.6} ≤ {bound:.6} (eig {:.1e}), H_min(C2|R) {:.1e}, H_max {:.10}, duality dev {:.1e}",
            g.hmin_exact,
            g.eigencheck_min,
            c2.value,
            formula,
            (-dual.value - hmax).abs()
        ));
    }
    outcome(pass, lines.join("; "))
}

fn criterion_7() -> Outcome {
    let mut rng = stream(0x5EED_0007, 0);
    let mut violations = 0;
    for _ in 0..1000 {
        let mut r: Vec<f64> = (0..16).map(|_| rng.random::<f64>().powi(3)).collect();
        let s: f64 = r.iter().sum();
        r.iter_mut().for_each(|x| *x /= s);
        let eps = rng.random_range(0.01..0.99);
        let t = smooth_h_max_truncation(&r, eps).unwrap().lower_bound_bits;
        let o = smooth_h_max_oracle(&r, eps).unwrap();
        let h = h_max_of_spectrum(&r);
        if !(t <= o && o <= h) {
            violations += 1;
        }
    }
    // δ = ε²/2 = 1/4.
    let quarter = smooth_h_max_truncation(&[0.5, 0.25, 0.25], 0.5f64.sqrt()).unwrap().lower_bound_bits;
    outcome(
        violations == 0 && quarter == -1.0,
        format!("{violations}/1000 ordering violations; quarter case {quarter}"),
    )
}

fn mergelab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mergelab")).args(args).output().expect("binary runs")
}

fn criterion_8() -> Outcome {
    let p = EmbezzleParams::new(1024, 1.0 / 1024.0, Family::CommonTilt, 0.1).unwrap();
    let t = cost_comparison(&p).unwrap();
    let formula = 10.0 + 4.0 * 10f64.log2() + 12.0;
    let out = mergelab(&["embezzle", "--d", "1024", "--eps", "0.1"]);
    let text = String::from_utf8_lossy(&out.stdout);
    let row: Vec<&str> = text.lines().nth(1).unwrap_or("").split(',').collect();
    let cli_thm4: f64 = row.get(8).and_then(|x| x.parse().ok()).unwrap_or(f64::NAN);
    let cli_prop5: f64 = row.get(9).and_then(|x| x.parse().ok()).unwrap_or(f64::NAN);
    let pass = (t.thm4_sum - formula).abs() <= 0.01
        && (t.thm4_sum - 35.29).abs() <= 0.01
        && (t.prop5_lower - 67.25).abs() <= 0.01
        && t.thm4_below
        && out.status.success()
        && (cli_thm4 - t.thm4_sum).abs() <= 1e-9
        && (cli_prop5 - t.prop5_lower).abs() <= 1e-9
        && cli_thm4 < cli_prop5;
    outcome(
        pass,
        format!("thm4_sum {:.4}, prop5_lower {:.4}, CLI row {cli_thm4} < {cli_prop5}", t.thm4_sum, t.prop5_lower),
    )
}

fn four_qubits(seed: u64, i: u64) -> QuantumState {
    let l = layout(&[
        ("C1", 2, Role::Sender),
        ("C2", 2, Role::Sender),
        ("A", 2, Role::ReceiverA),
        ("B", 2, Role::ReceiverB),
    ]);
    random_pure(l, &mut stream(seed, i))
}

/// `Φ_{A C1} ⊗ Φ_{C2 B}` mixed with a Haar vector of weight `t`. Small `t` keeps `{C1}` the
/// unique minimizing cut, so the sign conditions are exercised on a proper subset.
fn near_chain(seed: u64, i: u64, t: f64) -> QuantumState {
    let noise = four_qubits(seed, i);
    let mut v = noise.pure_vector().unwrap() * re(t.sqrt());
    for c1 in 0..2 {
        for c2 in 0..2 {
            v[c1 * 8 + c2 * 4 + c1 * 2 + c2] += re(0.5 * (1.0 - t).sqrt());
        }
    }
    let norm = v.norm();
    QuantumState::pure(noise.layout().clone(), v / re(norm)).unwrap()
}

fn criterion_9() -> Outcome {
    let helpers = ["C1", "C2"];
    let cuts: [&[&str]; 4] = [&[], &["C1"], &["C2"], &["C1", "C2"]];
    let (mut mismatch, mut checked, mut sign_fail) = (0, 0, 0);
    for i in 0..200 {
        let psi =
            if i < 100 { four_qubits(0x5EED_0009, i) } else { near_chain(0x5EED_0019, i, 0.002 * (i - 99) as f64) };
        let brute = cuts
            .iter()
            .map(|t| {
                let mut keep = vec!["A"];
                keep.extend_from_slice(t);
                marginal_entropy(&psi, &keep).unwrap()
            })
            .fold(f64::INFINITY, f64::min);
        if assisted_rate(&psi, &["A"], &["B"], &helpers).unwrap() != brute {
            mismatch += 1;
        }
        let signs = min_cut_signs(&psi, &["A"], &["B"], &helpers).unwrap();
        let proper = !signs.cut.is_empty() && signs.cut.len() < helpers.len();
        if proper && !signs.tied {
            checked += 1;
            if !(signs.t_side_negative && signs.tbar_side_nonpositive) {
                sign_fail += 1;
            }
        }
    }
    outcome(
        mismatch == 0 && sign_fail == 0,
        format!("{mismatch}/200 rate mismatches; sign conditions failed on {sign_fail}/{checked} proper unique cuts"),
    )
}

fn criterion_10() -> Outcome {
    let setup = SplitSetup {
        t: vec!["C1".into()],
        tbar: vec!["C2".into()],
        a: vec!["A".into()],
        b: vec!["B".into()],
        reference: vec![],
    };
    // Five states, ten seeds each: fifty runs, Monte Carlo means per state.
    let (mut bad_runs, mut bad_means) = (0, 0);
    let mut worst: f64 = f64::INFINITY;
    for s in 0..5u64 {
        let psi = four_qubits(0x5EED_0010, s);
        let reps: Vec<_> = (0..10u64)
            .into_par_iter()
            .map(|j| split_transfer_sim(&psi, &setup, (&[2], &[1]), (&[2], &[1]), derive_seed(s, j)).unwrap())
            .collect();
        for r in &reps {
            let slack = 2.0 * r.q1.sqrt() + 2.0 * r.q2.sqrt() + 1e-6 - r.end_error;
            worst = worst.min(slack);
            if slack < 0.0 {
                bad_runs += 1;
            }
        }
        let q1 = reps.iter().map(|r| r.q1).sum::<f64>() / 10.0;
        let q2 = reps.iter().map(|r| r.q2).sum::<f64>() / 10.0;
        if q1 > reps[0].delta1 || q2 > reps[0].delta2 {
            bad_means += 1;
        }
    }
    outcome(
        bad_runs == 0 && bad_means == 0,
        format!(
            "{bad_runs}/50 runs above the error bound (min slack {worst:.3e}); {bad_means}/5 states with means above Δ"
        ),
    )
}

fn criterion_11() -> Outcome {
    let mut rng = stream(0x5EED_0011, 0);
    let (mut sandwich_fail, mut op_fail, mut checked) = (0, 0, 0);
    let mut worst: f64 = f64::INFINITY;
    for _ in 0..4 {
        let rho = random_density(plain(&[("X", 2)]), 2, &mut rng);
        let other = random_density(plain(&[("Y", 2)]), 2, &mut rng);
        for n in 1..=8usize {
            let delta = 0.15;
            let t = typicality(&rho, n, delta).unwrap();
            let (lo, hi) = t.sandwich();
            checked += 1;
            if !(lo <= t.rank as f64 && t.rank as f64 <= hi) {
                sandwich_fail += 1;
            }
            let u = typicality(&other, n.min(4), delta).unwrap();
            let projs = vec![t.projector(), u.projector()];
            let min = typicality_operator_inequality(&projs).unwrap();
            worst = worst.min(min);
            if min < -1e-9 {
                op_fail += 1;
            }
            if n <= 4 && (typicality_operator_inequality_dense(&projs) - min).abs() > 1e-9 {
                op_fail += 1;
            }
        }
    }
    outcome(
        sandwich_fail == 0 && op_fail == 0,
        format!("{sandwich_fail}/{checked} sandwich failures; {op_fail} operator-inequality failures (min eigenvalue {worst:.3e})"),
    )
}

fn criterion_12() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    let mut ok = true;
    for (i, format) in ["csv", "csv", "json", "json"].iter().enumerate() {
        let path = dir.path().join(format!("run{i}.{format}"));
        let out = mergelab(&[
            "simulate",
            "--generator",
            "random",
            "--dims",
            "2,2",
            "--dR",
            "2",
            "--dB",
            "2",
            "--K",
            "1,1",
            "--L",
            "2,1",
            "--samples",
            "16",
            "--seed",
            "12",
            "--format",
            format,
            "--out",
            path.to_str().unwrap(),
        ]);
        ok &= out.status.success();
        texts.push(std::fs::read(&path).unwrap_or_default());
        ok &= std::fs::metadata(dir.path().join(format!("run{i}.{format}.timing.csv"))).is_ok();
    }
    let env_run = Command::new(env!("CARGO_BIN_EXE_mergelab"))
        .env("MERGELAB_THREADS", "1")
        .args([
            "simulate",
            "--generator",
            "random",
            "--dims",
            "2,2",
            "--dR",
            "2",
            "--dB",
            "2",
            "--K",
            "1,1",
            "--L",
            "2,1",
        ])
        .args(["--samples", "16", "--seed", "12"])
        .output()
        .unwrap();
    let same_csv = texts[0] == texts[1] && !texts[0].is_empty();
    let same_json = texts[2] == texts[3] && !texts[2].is_empty();
    let same_threads = env_run.stdout == texts[0];
    outcome(
        ok && same_csv && same_json && same_threads,
        format!("csv identical {same_csv}, json identical {same_json}, single-thread identical {same_threads}"),
    )
}

#[test]
fn acceptance() {
    let c1 = criterion_1();
    let (c2, c3) = criteria_2_and_3();
    let results = [
        ("1 decoupling bound", c1),
        ("2 quantum-error bound", c2),
        ("3 min-entropy decoupling bound", c3),
        ("4 entropy lemma suite", criterion_4()),
        ("5 conditional min-entropy solver", criterion_5()),
        ("6 embezzling state", criterion_6()),
        ("7 smoothing bounds", criterion_7()),
        ("8 cost comparison", criterion_8()),
        ("9 min-cut and assisted rate", criterion_9()),
        ("10 split transfer", criterion_10()),
        ("11 typicality", criterion_11()),
        ("12 determinism", criterion_12()),
    ];
    let mut failed = Vec::new();
    // Written to the raw handle so the summary shows up even when the harness captures output.
    let mut out = std::io::stdout().lock();
    for (name, o) in &results {
        writeln!(out, "{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail).unwrap();
        if !o.pass {
            failed.push(*name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
