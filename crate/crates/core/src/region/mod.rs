//! Achievable cost and rate regions as systems of subset inequalities `Σ_{i∈T} x_i ≥ rhs_T`.

use serde::{Deserialize, Serialize};

use crate::entropy::{cond_von_neumann, marginal_entropy, min_cut_entanglement};
use crate::error::{Error, Result};
use crate::merge::{
    mask_members, prop8_split_costs, sequential_costs, theorem4_cost, CostAssignment, MergeSetup, SplitSetup,
};
use crate::qstate::QuantumState;

/// Slack below which an inequality counts as violated or saturated.
pub const REGION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "thm1")]
    Thm1,
    #[serde(rename = "compression")]
    Compression,
    #[serde(rename = "thm4")]
    Thm4,
    #[serde(rename = "prop5_point")]
    Prop5Point,
    #[serde(rename = "thm5_T_side")]
    Thm5TSide,
    #[serde(rename = "thm5_Tbar_side")]
    Thm5TbarSide,
    #[serde(rename = "prop8")]
    Prop8,
}

impl Provenance {
    /// Regions that carry one inequality for every nonempty subset.
    fn is_complete_lattice(self) -> bool {
        matches!(self, Provenance::Thm1 | Provenance::Thm4 | Provenance::Compression)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    /// Sender indices, ascending.
    pub subset: Vec<usize>,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostRegion {
    pub senders: Vec<String>,
    pub inequalities: Vec<Inequality>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub inside: bool,
    pub violated: Vec<Vec<usize>>,
    /// `Σ_{i∈T} x_i − rhs_T` per inequality, in region order.
    pub slack: Vec<f64>,
}

impl Membership {
    /// Inequalities met with equality (within [`REGION_TOL`]).
    pub fn saturated<'a>(&self, region: &'a CostRegion) -> Vec<&'a [usize]> {
        region
            .inequalities
            .iter()
            .zip(&self.slack)
            .filter(|(_, s)| s.abs() <= REGION_TOL)
            .map(|(q, _)| q.subset.as_slice())
            .collect()
    }
}

impl CostRegion {
    pub fn new(senders: Vec<String>, inequalities: Vec<Inequality>, provenance: Provenance) -> Result<Self> {
        let region = CostRegion { senders, inequalities, provenance };
        region.validate()?;
        Ok(region)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.senders.len();
        let mut seen = std::collections::BTreeSet::new();
        for q in &self.inequalities {
            if !q.rhs.is_finite() {
                return Err(Error::Input(format!("non-finite bound for subset {:?}", q.subset)));
            }
            if q.subset.is_empty() || q.subset.iter().any(|&i| i >= m) || q.subset.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Input(format!("invalid subset {:?} for {m} senders", q.subset)));
            }
            if !seen.insert(q.subset.clone()) {
                return Err(Error::Input(format!("duplicate subset {:?}", q.subset)));
            }
        }
        if self.provenance.is_complete_lattice() && m > 0 && seen.len() != (1usize << m) - 1 {
            return Err(Error::Input(format!("{} inequalities, expected one per nonempty subset", seen.len())));
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.senders.len()
    }

    pub fn rhs(&self, subset: &[usize]) -> Option<f64> {
        self.inequalities.iter().find(|q| q.subset == subset).map(|q| q.rhs)
    }

    pub fn contains(&self, x: &[f64]) -> Result<Membership> {
        if x.len() != self.m() {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, region has {} senders",
                x.len(),
                self.m()
            )));
        }
        let slack: Vec<f64> =
            self.inequalities.iter().map(|q| q.subset.iter().map(|&i| x[i]).sum::<f64>() - q.rhs).collect();
        let violated: Vec<Vec<usize>> = self
            .inequalities
            .iter()
            .zip(&slack)
            .filter(|(_, &s)| s < -REGION_TOL)
            .map(|(q, _)| q.subset.clone())
            .collect();
        Ok(Membership { inside: violated.is_empty(), violated, slack })
    }

    /// Boundary vertices of a two-sender region, ordered by the first coordinate.
    pub fn vertices_m2(&self) -> Result<Vec<[f64; 2]>> {
        if self.m() != 2 {
            return Err(Error::Scope(format!("vertices are only enumerated for two senders, not {}", self.m())));
        }
        let a = self.rhs(&[0]).unwrap_or(f64::NEG_INFINITY);
        let b = self.rhs(&[1]).unwrap_or(f64::NEG_INFINITY);
        let c = self.rhs(&[0, 1]).unwrap_or(f64::NEG_INFINITY);
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::Scope("a bounded corner needs both singleton inequalities".into()));
        }
        if c <= a + b {
            Ok(vec![[a, b]])
        } else {
            Ok(vec![[a, c - a], [c - b, b]])
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("region serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: CostRegion = serde_json::from_str(text).map_err(|e| Error::Input(format!("region JSON: {e}")))?;
        r.validate()?;
        Ok(r)
    }

    /// The real-valued constraint set of a one-shot cost assignment.
    pub fn from_assignment(cost: &CostAssignment) -> Result<Self> {
        let provenance: Provenance = serde_json::from_value(serde_json::Value::String(cost.provenance.clone()))
            .map_err(|_| Error::Input(format!("unknown provenance {}", cost.provenance)))?;
        let inequalities =
            cost.constraints.iter().map(|c| Inequality { subset: c.subset.clone(), rhs: c.rhs }).collect();
        CostRegion::new(cost.senders.clone(), inequalities, provenance)
    }
}

fn own<S: AsRef<str>>(v: &[S]) -> Vec<String> {
    v.iter().map(|s| s.as_ref().to_string()).collect()
}

fn conditional_lattice(psi: &QuantumState, senders: &[String], side: &[String]) -> Result<Vec<Inequality>> {
    let m = senders.len();
    let mut out = Vec::with_capacity((1 << m) - 1);
    for mask in 1u32..(1 << m) {
        let members = mask_members(mask);
        let part: Vec<&String> = members.iter().map(|&i| &senders[i]).collect();
        let mut cond: Vec<&String> = (0..m).filter(|i| mask >> i & 1 == 0).map(|i| &senders[i]).collect();
        cond.extend(side);
        out.push(Inequality { subset: members, rhs: cond_von_neumann(psi, &part, &cond)? });
    }
    Ok(out)
}

/// `Σ_{i∈T} R_i ≥ S(T|T̄B)` for every nonempty `T`. With no receiver this is the
/// distributed-compression region.
pub fn build_merge_region<S: AsRef<str>>(psi: &QuantumState, senders: &[S], receiver: &[S]) -> Result<CostRegion> {
    psi.pure_vector()?;
    if senders.is_empty() || senders.len() > 12 {
        return Err(Error::Input(format!("{} senders; between 1 and 12 are supported", senders.len())));
    }
    let senders = own(senders);
    let receiver = own(receiver);
    let provenance = if receiver.is_empty() { Provenance::Compression } else { Provenance::Thm1 };
    let ineq = conditional_lattice(psi, &senders, &receiver)?;
    CostRegion::new(senders, ineq, provenance)
}

/// The two corners `(S(C₁|B), S(C₂|C₁B))` and `(S(C₁|C₂B), S(C₂|B))` of a two-sender region.
pub fn corner_points_m2<S: AsRef<str>>(psi: &QuantumState, senders: &[S], receiver: &[S]) -> Result<[[f64; 2]; 2]> {
    if senders.len() != 2 {
        return Err(Error::Scope(format!("corner points need exactly two senders, got {}", senders.len())));
    }
    let (c1, c2) = (senders[0].as_ref(), senders[1].as_ref());
    let b = own(receiver);
    let with = |extra: &str| {
        let mut v = b.clone();
        v.push(extra.to_string());
        v
    };
    Ok([
        [cond_von_neumann(psi, &[c1], &b)?, cond_von_neumann(psi, &[c2], &with(c1))?],
        [cond_von_neumann(psi, &[c1], &with(c2))?, cond_von_neumann(psi, &[c2], &b)?],
    ])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitRegion {
    #[serde(rename = "T_side")]
    pub t_side: CostRegion,
    #[serde(rename = "Tbar_side")]
    pub tbar_side: CostRegion,
}

/// `Σ_{i∈X} R_i ≥ S(X|X̄A)` over `X ⊆ T` and `Σ_{i∈Y} R_i ≥ S(Y|ȲB)` over `Y ⊆ T̄`, with the
/// complements taken inside `T` and `T̄`.
pub fn build_split_region(psi: &QuantumState, setup: &SplitSetup) -> Result<SplitRegion> {
    psi.pure_vector()?;
    setup.check(psi)?;
    let t_side =
        CostRegion::new(setup.t.clone(), conditional_lattice(psi, &setup.t, &setup.a)?, Provenance::Thm5TSide)?;
    let tbar_side = CostRegion::new(
        setup.tbar.clone(),
        conditional_lattice(psi, &setup.tbar, &setup.b)?,
        Provenance::Thm5TbarSide,
    )?;
    Ok(SplitRegion { t_side, tbar_side })
}

/// Optimal assisted EPR rate between A and B: `min_T S(A T)` over helper subsets.
pub fn assisted_rate<S: AsRef<str>>(psi: &QuantumState, a: &[S], b: &[S], helpers: &[S]) -> Result<f64> {
    Ok(min_cut_entanglement(psi, a, b, helpers)?.value)
}

/// Sign pattern of the split region at the smallest minimizing cut.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinCutSigns {
    pub cut: Vec<String>,
    /// More than one cut attains the minimum.
    pub tied: bool,
    /// Largest `S(X|X̄A)` over nonempty `X ⊆ T_min` (expected `< 0`).
    pub max_t_side: Option<f64>,
    /// Largest `S(Y|ȲB)` over nonempty `Y ⊆ T̄_min` (expected `≤ 0`).
    pub max_tbar_side: Option<f64>,
    pub t_side_negative: bool,
    pub tbar_side_nonpositive: bool,
}

/// Evaluate both split families at the smallest minimizing cut of `S(A T)`.
pub fn min_cut_signs<S: AsRef<str>>(psi: &QuantumState, a: &[S], b: &[S], helpers: &[S]) -> Result<MinCutSigns> {
    let mc = min_cut_entanglement(psi, a, b, helpers)?;
    let helpers = own(helpers);
    let t: Vec<String> = helpers.iter().filter(|h| mc.cut.contains(h)).cloned().collect();
    let tbar: Vec<String> = helpers.iter().filter(|h| !mc.cut.contains(h)).cloned().collect();
    let setup = SplitSetup {
        t: t.clone(),
        tbar,
        a: own(a),
        b: own(b),
        reference: psi.layout().complement(&[own(a), own(b), helpers].concat()),
    };
    let region = build_split_region(psi, &setup)?;
    let max = |r: &CostRegion| r.inequalities.iter().map(|q| q.rhs).reduce(f64::max);
    let max_t_side = max(&region.t_side);
    let max_tbar_side = max(&region.tbar_side);
    Ok(MinCutSigns {
        cut: mc.cut,
        tied: mc.ties.len() > 1,
        max_t_side,
        max_tbar_side,
        t_side_negative: max_t_side.is_none_or(|v| v < -REGION_TOL),
        tbar_side_nonpositive: max_tbar_side.is_none_or(|v| v <= REGION_TOL),
    })
}

/// `S(A T)` for every helper subset, as an independent oracle for the min-cut search.
pub fn cut_entropies<S: AsRef<str>>(psi: &QuantumState, a: &[S], helpers: &[S]) -> Result<Vec<(u32, f64)>> {
    let mut out = Vec::with_capacity(1 << helpers.len());
    for mask in 0u32..(1 << helpers.len()) {
        let mut keep = own(a);
        keep.extend(mask_members(mask).into_iter().map(|i| helpers[i].as_ref().to_string()));
        out.push((mask, marginal_entropy(psi, &keep)?));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequentialPoint {
    /// Sender indices in the order they merge.
    pub order: Vec<usize>,
    /// Real-valued per-sender costs.
    pub costs: Vec<f64>,
    pub integral: Vec<i64>,
    /// Every componentwise larger cost vector is also achievable.
    pub upward_closed: bool,
    /// Whether the point satisfies the joint one-shot region (reported, never assumed).
    pub inside_thm4: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneShotRegions {
    pub thm4: CostRegion,
    pub prop5_points: Vec<SequentialPoint>,
    pub epsilon: f64,
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, m - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// The joint one-shot cost region and the `m!` one-at-a-time cost points.
pub fn one_shot_regions(psi: &QuantumState, setup: &MergeSetup, eps: f64) -> Result<OneShotRegions> {
    if setup.m() > 6 {
        return Err(Error::Scale(format!("{}! orderings exceed the enumeration limit", setup.m())));
    }
    let thm4 = CostRegion::from_assignment(&theorem4_cost(psi, setup, eps)?)?;
    let mut prop5_points = Vec::new();
    for order in permutations(setup.m()) {
        let c = sequential_costs(psi, setup, eps, &order)?;
        let costs: Vec<f64> = c.constraints.iter().map(|q| q.rhs).collect();
        let inside_thm4 = thm4.contains(&costs)?.inside;
        prop5_points.push(SequentialPoint { order, costs, integral: c.costs(), upward_closed: true, inside_thm4 });
    }
    Ok(OneShotRegions { thm4, prop5_points, epsilon: eps })
}

/// Both one-shot split-transfer cost regions.
pub fn split_cost_regions(
    psi: &QuantumState,
    setup: &SplitSetup,
    eps1: f64,
    eps2: f64,
) -> Result<(CostRegion, CostRegion)> {
    let (a, b) = prop8_split_costs(psi, setup, eps1, eps2)?;
    Ok((CostRegion::from_assignment(&a)?, CostRegion::from_assignment(&b)?))
}
