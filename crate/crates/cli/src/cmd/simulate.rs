use std::time::Instant;

use rayon::prelude::*;

use mergelab::merge::{lemma3_residual_and_bound, run_merging, MergeSetup, SimulationReport};
use mergelab::rng::derive_seed;

use crate::args::{Common, Format};
use crate::error::{CliError, CliResult};
use crate::output::{emit, join_usize, num, timing_path, to_json, Table};
use crate::states::{load_state, require_seed, Shape};

pub struct Run {
    pub report: SimulationReport,
    /// Decoupling residual for an independent Haar sample with the same `L`.
    pub lhs: f64,
    pub rhs: f64,
    pub wall_ms: f64,
}

pub const SIMULATE_HEADER: [&str; 12] =
    ["seed", "m", "dims", "K", "L", "q_error", "delta_bound", "gamma", "end_error", "bound_2sqrt", "lhs", "rhs"];

pub fn costs(v: &[usize], m: usize, flag: &str) -> CliResult<Vec<usize>> {
    match v.len() {
        0 => Ok(vec![1; m]),
        n if n == m => Ok(v.to_vec()),
        n => Err(CliError::Input(format!("--{flag} has {n} entries for {m} senders"))),
    }
}

/// Run `i` uses the child seed `derive_seed(seed, i + 1)`; results come back in index order.
pub fn sweep(
    psi: &mergelab::qstate::QuantumState,
    setup: &MergeSetup,
    k: &[usize],
    l: &[usize],
    seed: u64,
    samples: usize,
) -> CliResult<Vec<Run>> {
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let s = derive_seed(seed, i as u64 + 1);
            let start = Instant::now();
            let report = run_merging(psi, setup, k, l, s)?;
            let (lhs, rhs) = lemma3_residual_and_bound(psi, &setup.senders, &setup.reference, l, s)?;
            Ok(Run { report, lhs, rhs, wall_ms: start.elapsed().as_secs_f64() * 1e3 })
        })
        .collect()
}

pub fn table(runs: &[Run]) -> Table {
    let mut t = Table::new(SIMULATE_HEADER.to_vec());
    for r in runs {
        let p = &r.report;
        t.push(vec![
            p.seed.to_string(),
            p.m.to_string(),
            join_usize(&p.dims),
            join_usize(&p.k),
            join_usize(&p.l),
            num(p.q_error),
            num(p.delta_bound),
            num(p.gamma),
            num(p.end_to_end_error),
            num(p.bound_2sqrt),
            num(r.lhs),
            num(r.rhs),
        ]);
    }
    t
}

/// Failed checks: any per-run error bound, or a Monte Carlo mean above its bound.
pub fn check(runs: &[Run]) -> Vec<String> {
    let n = runs.len() as f64;
    let mut fails = Vec::new();
    let bad = runs.iter().filter(|r| !r.report.bound_holds).count();
    if bad > 0 {
        fails.push(format!("{bad} runs exceed the 2√Q error bound"));
    }
    let mean_lhs = runs.iter().map(|r| r.lhs).sum::<f64>() / n;
    let mean_q = runs.iter().map(|r| r.report.q_error).sum::<f64>() / n;
    if let Some(r) = runs.first() {
        if mean_lhs > r.rhs {
            fails.push(format!("mean decoupling residual {mean_lhs} exceeds {}", r.rhs));
        }
        if mean_q > r.report.delta_bound {
            fails.push(format!("mean quantum error {mean_q} exceeds {}", r.report.delta_bound));
        }
    }
    fails
}

pub fn run(c: &Common) -> CliResult<()> {
    let seed = require_seed(c, "simulate")?;
    let samples = c.samples.unwrap_or(100);
    if samples == 0 {
        return Err(CliError::Input("--samples must be at least 1".into()));
    }
    let psi = load_state(c, Shape::Merge)?;
    let setup = MergeSetup::from_roles(&psi)?;
    let k = costs(&c.k, setup.m(), "K")?;
    let l = costs(&c.l, setup.m(), "L")?;
    let runs = sweep(&psi, &setup, &k, &l, seed, samples)?;
    match c.format.unwrap_or(Format::Csv) {
        Format::Csv => emit(c.out.as_deref(), &table(&runs).to_csv())?,
        Format::Json => {
            let reports: Vec<&SimulationReport> = runs.iter().map(|r| &r.report).collect();
            emit(c.out.as_deref(), &to_json(&reports))?
        }
        Format::Svg => return Err(CliError::Input("simulate has no plot output".into())),
    }
    if let Some(out) = &c.out {
        let mut t = Table::new(vec!["seed", "wall_ms"]);
        for r in &runs {
            t.push(vec![r.report.seed.to_string(), format!("{:.3}", r.wall_ms)]);
        }
        emit(Some(&timing_path(out)), &t.to_csv())?;
    }
    let fails = check(&runs);
    if fails.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(fails.join("; ")))
    }
}
