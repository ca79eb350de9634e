use rayon::prelude::*;

use mergelab::merge::{split_transfer_sim, SplitReport, SplitSetup};
use mergelab::qstate::{QuantumState, Role};
use mergelab::rng::derive_seed;

use crate::args::{Common, Format};
use crate::cmd::simulate::costs;
use crate::error::{CliError, CliResult};
use crate::output::{emit, num, to_json, Table};
use crate::states::{load_state, parse_partition, require_seed, Shape};

pub fn setup_for(psi: &QuantumState, partition: &str) -> CliResult<SplitSetup> {
    let (t, tbar) = parse_partition(partition)?;
    let l = psi.layout();
    let helpers = l.labels_with_role(Role::Sender);
    let mut seen: Vec<&String> = t.iter().chain(&tbar).collect();
    seen.sort();
    seen.dedup();
    if seen.len() != t.len() + tbar.len() || seen.len() != helpers.len() || seen.iter().any(|h| !helpers.contains(h)) {
        return Err(CliError::Input(format!("partition {partition:?} must split the helpers {helpers:?}")));
    }
    Ok(SplitSetup {
        t,
        tbar,
        a: l.labels_with_role(Role::ReceiverA),
        b: l.labels_with_role(Role::ReceiverB),
        reference: l.labels_with_role(Role::Reference),
    })
}

pub fn run(c: &Common) -> CliResult<()> {
    let seed = require_seed(c, "split")?;
    let samples = c.samples.unwrap_or(50);
    if samples == 0 {
        return Err(CliError::Input("--samples must be at least 1".into()));
    }
    let partition = c.partition.as_deref().ok_or_else(|| CliError::Input("split needs --partition T|Tbar".into()))?;
    let psi = load_state(c, Shape::Split)?;
    let setup = setup_for(&psi, partition)?;
    let (k, l) = (costs(&c.k, setup.t.len(), "K")?, costs(&c.l, setup.t.len(), "L")?);
    let (mm, nn) = (costs(&c.m, setup.tbar.len(), "M")?, costs(&c.n, setup.tbar.len(), "N")?);
    let reports: Vec<SplitReport> = (0..samples)
        .into_par_iter()
        .map(|i| split_transfer_sim(&psi, &setup, (&k, &l), (&mm, &nn), derive_seed(seed, i as u64 + 1)))
        .collect::<Result<_, _>>()?;
    match c.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut t = Table::new(vec!["seed", "q1", "q2", "delta1", "delta2", "end_error", "bound"]);
            for r in &reports {
                t.push(vec![
                    r.seed.to_string(),
                    num(r.q1),
                    num(r.q2),
                    num(r.delta1),
                    num(r.delta2),
                    num(r.end_error),
                    num(r.bound),
                ]);
            }
            emit(c.out.as_deref(), &t.to_csv())?;
        }
        Format::Json => emit(c.out.as_deref(), &to_json(&reports))?,
        Format::Svg => return Err(CliError::Input("split has no plot output".into())),
    }
    let n = reports.len() as f64;
    let mut fails = Vec::new();
    let bad = reports.iter().filter(|r| !r.bound_holds).count();
    if bad > 0 {
        fails.push(format!("{bad} runs exceed the 2√Q¹ + 2√Q² bound"));
    }
    let (q1, q2) = (reports.iter().map(|r| r.q1).sum::<f64>() / n, reports.iter().map(|r| r.q2).sum::<f64>() / n);
    if q1 > reports[0].delta1 || q2 > reports[0].delta2 {
        fails.push(format!("mean errors ({q1}, {q2}) exceed ({}, {})", reports[0].delta1, reports[0].delta2));
    }
    if fails.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(fails.join("; ")))
    }
}
