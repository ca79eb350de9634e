use serde::Serialize;

use mergelab::merge::MergeSetup;
use mergelab::qstate::Role;
use mergelab::region::{
    assisted_rate, build_merge_region, build_split_region, corner_points_m2, min_cut_signs, one_shot_regions,
    split_cost_regions, CostRegion, Membership, MinCutSigns, SequentialPoint,
};

use crate::args::{Common, Format};
use crate::cmd::split::setup_for;
use crate::error::CliResult;
use crate::output::{emit, num, to_json, Table};
use crate::plot::{emit_plot, region_boundary, Axes, Series};
use crate::states::{load_state, Shape};

#[derive(Serialize)]
struct RegionOutput {
    regions: Vec<CostRegion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    corners: Option<[[f64; 2]; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    membership: Option<Membership>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    prop5_points: Vec<SequentialPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    assisted_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_cut: Option<MinCutSigns>,
}

pub fn run(c: &Common) -> CliResult<()> {
    let out = match &c.partition {
        None => merge_regions(c)?,
        Some(p) => split_regions(c, p)?,
    };
    match c.format.unwrap_or(Format::Json) {
        Format::Json => emit(c.out.as_deref(), &to_json(&out)),
        Format::Csv => {
            let mut t = Table::new(vec!["provenance", "senders", "subset", "rhs"]);
            for r in &out.regions {
                let prov = serde_json::to_value(r.provenance).expect("provenance serializes");
                for q in &r.inequalities {
                    let subset: Vec<&str> = q.subset.iter().map(|&i| r.senders[i].as_str()).collect();
                    t.push(vec![
                        prov.as_str().unwrap_or_default().to_string(),
                        r.senders.join(";"),
                        subset.join(";"),
                        num(q.rhs),
                    ]);
                }
            }
            emit(c.out.as_deref(), &t.to_csv())
        }
        Format::Svg => plot(&out, c),
    }
}

fn merge_regions(c: &Common) -> CliResult<RegionOutput> {
    let psi = load_state(c, Shape::Merge)?;
    let setup = MergeSetup::from_roles(&psi)?;
    let region = build_merge_region(&psi, &setup.senders, &setup.receiver)?;
    let corners = if setup.m() == 2 { Some(corner_points_m2(&psi, &setup.senders, &setup.receiver)?) } else { None };
    let membership = if c.point.is_empty() { None } else { Some(region.contains(&c.point)?) };
    let mut regions = vec![region];
    let mut prop5_points = Vec::new();
    if let Some(eps) = c.eps {
        let one = one_shot_regions(&psi, &setup, eps)?;
        regions.push(one.thm4);
        prop5_points = one.prop5_points;
    }
    Ok(RegionOutput { regions, corners, membership, prop5_points, assisted_rate: None, min_cut: None })
}

fn split_regions(c: &Common, partition: &str) -> CliResult<RegionOutput> {
    let psi = load_state(c, Shape::Split)?;
    let setup = setup_for(&psi, partition)?;
    let split = build_split_region(&psi, &setup)?;
    let helpers: Vec<String> = psi.layout().labels_with_role(Role::Sender);
    let (rate, min_cut) = if setup.reference.is_empty() {
        (
            Some(assisted_rate(&psi, &setup.a, &setup.b, &helpers)?),
            Some(min_cut_signs(&psi, &setup.a, &setup.b, &helpers)?),
        )
    } else {
        (None, None)
    };
    let mut regions = vec![split.t_side, split.tbar_side];
    if let Some(eps) = c.eps {
        let (t, tb) = split_cost_regions(&psi, &setup, eps, c.eps2.unwrap_or(eps))?;
        regions.push(t);
        regions.push(tb);
    }
    Ok(RegionOutput {
        regions,
        corners: None,
        membership: None,
        prop5_points: Vec::new(),
        assisted_rate: rate,
        min_cut,
    })
}

fn plot(out: &RegionOutput, c: &Common) -> CliResult<()> {
    let mut series = Vec::new();
    for r in out.regions.iter().filter(|r| r.m() == 2) {
        let v = r.vertices_m2()?;
        let name = serde_json::to_value(r.provenance).expect("provenance serializes");
        series.push(Series {
            name: name.as_str().unwrap_or_default().into(),
            points: region_boundary(&v, 2.0),
            markers: false,
        });
    }
    if !out.prop5_points.is_empty() {
        let pts = out.prop5_points.iter().filter(|p| p.costs.len() == 2).map(|p| [p.costs[0], p.costs[1]]).collect();
        series.push(Series { name: "prop5 points".into(), points: pts, markers: true });
    }
    if let Some(m) = &out.membership {
        if c.point.len() == 2 {
            let name = if m.inside { "point (inside)" } else { "point (outside)" };
            series.push(Series { name: name.into(), points: vec![[c.point[0], c.point[1]]], markers: true });
        }
    }
    emit_plot(&series, &Axes { x: "R_1", y: "R_2" }, c.out.as_deref())
}
