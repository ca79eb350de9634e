use mergelab::entropy::{
    cond_von_neumann, h_max_conditional, h_max_of_spectrum, h_min_conditional_on, marginal_entropy, EntropyReport,
    Quantity, SolverOptions,
};

use crate::args::{Common, Format};
use crate::error::{CliError, CliResult};
use crate::output::{emit, num, to_json, Table};
use crate::states::{load_state, parse_partition, Shape};

pub fn run(c: &Common) -> CliResult<()> {
    let psi = load_state(c, Shape::Merge)?;
    let mut reports = Vec::new();
    for label in psi.layout().labels() {
        let keep = [label.as_str()];
        reports.push(EntropyReport::closed(Quantity::VonNeumann, marginal_entropy(&psi, &keep)?, label.clone()));
        let spec = psi.marginal_spectrum(&keep)?;
        reports.push(EntropyReport::closed(Quantity::HMax, h_max_of_spectrum(&spec), label.clone()));
    }
    if let Some(p) = &c.partition {
        let (x, y) = parse_partition(p)?;
        if x.is_empty() {
            return Err(CliError::Input("the conditioned side of --partition is empty".into()));
        }
        let systems = format!("{}|{}", x.join(","), y.join(","));
        reports.push(EntropyReport::closed(Quantity::CondVN, cond_von_neumann(&psi, &x, &y)?, systems));
        if !y.is_empty() {
            let (rep, _) = h_min_conditional_on(&psi, &x, &y, &SolverOptions::default())?;
            reports.push(rep);
            if psi.is_vector() {
                reports.push(h_max_conditional(&psi, &x, &y)?);
            }
        }
    }
    match c.format.unwrap_or(Format::Json) {
        Format::Json => emit(c.out.as_deref(), &to_json(&reports)),
        Format::Csv => {
            let mut t = Table::new(vec!["quantity", "systems", "value", "gap"]);
            for r in &reports {
                let q = serde_json::to_value(r.quantity).expect("quantity serializes");
                t.push(vec![q.as_str().unwrap_or_default().to_string(), r.systems.clone(), num(r.value), num(r.gap())]);
            }
            emit(c.out.as_deref(), &t.to_csv())
        }
        Format::Svg => Err(CliError::Input("entropy has no plot output".into())),
    }
}
