use rayon::prelude::*;
use serde::Serialize;

use mergelab::embezzle::{
    cost_comparison, gershgorin_bound, hmax_formula, singlet_fraction, singlet_threshold, smoothing_estimate,
    CostTable, EmbezzleParams, GershgorinRecord, SingletRecord, SmoothingRecord,
};

use crate::args::{Common, Format};
use crate::error::{CliError, CliResult};
use crate::output::{emit, num, to_json, Table};
use crate::plot::{emit_plot, region_boundary, Axes, Series};
use crate::states::embezzle_params;

#[derive(Clone, Debug, Serialize)]
pub struct EmbezzleRow {
    pub params: EmbezzleParams,
    pub gershgorin: GershgorinRecord,
    pub singlet: Option<SingletRecord>,
    pub smoothing: SmoothingRecord,
    pub costs: Option<CostTable>,
}

pub const EMBEZZLE_HEADER: [&str; 10] =
    ["d", "alpha", "eps", "hmin_exact", "gersh_bound", "singlet", "hmax", "smooth_bound", "thm4_sum", "prop5_lower"];

pub fn row(p: &EmbezzleParams) -> CliResult<EmbezzleRow> {
    Ok(EmbezzleRow {
        params: *p,
        gershgorin: gershgorin_bound(p)?,
        singlet: if p.d >= 2 { Some(singlet_fraction(p.d)?) } else { None },
        smoothing: smoothing_estimate(p)?,
        costs: if p.d >= 2 { Some(cost_comparison(p)?) } else { None },
    })
}

pub fn csv_cells(r: &EmbezzleRow) -> Vec<String> {
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    vec![
        r.params.d.to_string(),
        num(r.params.alpha),
        num(r.params.epsilon),
        num(r.gershgorin.hmin_exact),
        num(r.gershgorin.hmin_upper),
        opt(r.singlet.as_ref().map(|s| s.aligned_overlap)),
        num(r.smoothing.hmax),
        num(r.smoothing.bound_bits),
        opt(r.costs.as_ref().map(|t| t.thm4_sum)),
        opt(r.costs.as_ref().map(|t| t.prop5_lower)),
    ]
}

#[derive(Serialize)]
struct EmbezzleOutput<'a> {
    rows: &'a [EmbezzleRow],
    /// Smallest d ≤ 2^16 from which the singlet-overlap claim holds.
    singlet_threshold: Option<usize>,
}

pub fn run(c: &Common) -> CliResult<()> {
    let ds = if c.d.is_empty() { vec![1024] } else { c.d.clone() };
    let eps = c.eps.unwrap_or(0.1);
    let params: Vec<EmbezzleParams> = ds.iter().map(|&d| embezzle_params(d, c.alpha, eps)).collect::<CliResult<_>>()?;
    let rows: Vec<EmbezzleRow> = params.par_iter().map(row).collect::<CliResult<_>>()?;
    match c.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut t = Table::new(EMBEZZLE_HEADER.to_vec());
            for r in &rows {
                t.push(csv_cells(r));
            }
            emit(c.out.as_deref(), &t.to_csv())
        }
        Format::Json => {
            let out = EmbezzleOutput { rows: &rows, singlet_threshold: singlet_threshold(1 << 16) };
            emit(c.out.as_deref(), &to_json(&out))
        }
        Format::Svg => plot(&rows, c),
    }
}

/// The joint one-shot region against the one-at-a-time point that merges `C1` first, both with
/// unsmoothed entropies: `C1` pays `H_max(C1) + 4 log(2/ε) + 12`, `C2` pays `4 log(2/ε) + 12`.
fn plot(rows: &[EmbezzleRow], c: &Common) -> CliResult<()> {
    let [r] = rows else {
        return Err(CliError::Input("the embezzling plot takes a single --d".into()));
    };
    let t = r.costs.as_ref().ok_or_else(|| CliError::Input("the embezzling plot needs d ≥ 2".into()))?;
    let e1 = t.thm4_e1.unwrap_or(t.thm4_e2);
    let (a, b, sum) = (e1, t.thm4_e2, t.thm4_sum);
    let vertices = if sum <= a + b { vec![[a, b]] } else { vec![[a, sum - a], [sum - b, b]] };
    let seq = 4.0 * (2.0 / r.params.epsilon).log2() + 12.0;
    let point = [hmax_formula(r.params.d) + seq, seq];
    let series = vec![
        Series { name: "thm4".into(), points: region_boundary(&vertices, 8.0), markers: false },
        Series { name: "prop5 point (unsmoothed)".into(), points: vec![point], markers: true },
    ];
    emit_plot(&series, &Axes { x: "E_1", y: "E_2" }, c.out.as_deref())
}
