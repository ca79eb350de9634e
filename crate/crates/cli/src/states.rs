use mergelab::embezzle::{build_embezzling, EmbezzleParams, Family};
use mergelab::qstate::{ghz, random_pure, state_from_json, QuantumState, Role, Subsystem, SystemLayout};
use mergelab::rng::stream;

use crate::args::{Common, Generator};
use crate::error::{CliError, CliResult};
use crate::output::io_err;

/// Which parties the generated state carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// Senders `C1..Cm`, receiver `B`, reference `R`.
    Merge,
    /// Helpers `C1..Cm`, receivers `A` and `B`, reference `R`.
    Split,
}

pub fn require_seed(c: &Common, what: &str) -> CliResult<u64> {
    c.seed.ok_or_else(|| CliError::Input(format!("{what} is stochastic and needs --seed")))
}

fn parties(c: &Common, shape: Shape, default_b: usize) -> CliResult<Vec<(String, usize, Role)>> {
    let dims = if c.dims.is_empty() { vec![2, 2] } else { c.dims.clone() };
    if dims.contains(&0) {
        return Err(CliError::Input("dimensions must be positive".into()));
    }
    let mut out: Vec<(String, usize, Role)> =
        dims.iter().enumerate().map(|(i, &d)| (format!("C{}", i + 1), d, Role::Sender)).collect();
    let db = c.d_b.unwrap_or(default_b);
    match shape {
        Shape::Merge => {
            if db > 1 {
                out.push(("B".into(), db, Role::ReceiverB));
            }
        }
        Shape::Split => {
            out.push(("A".into(), db, Role::ReceiverA));
            out.push(("B".into(), db, Role::ReceiverB));
        }
    }
    let dr = c.d_r.unwrap_or(1);
    if dr > 1 {
        out.push(("R".into(), dr, Role::Reference));
    }
    if out.iter().any(|p| p.1 == 0) {
        return Err(CliError::Input("dimensions must be positive".into()));
    }
    Ok(out)
}

/// State from `--input` or `--generator`. Random states use the `(seed, 0)` stream.
pub fn load_state(c: &Common, shape: Shape) -> CliResult<QuantumState> {
    match (&c.input, c.generator) {
        (Some(_), Some(_)) => Err(CliError::Input("--input and --generator are exclusive".into())),
        (None, None) => Err(CliError::Input("a state needs --input or --generator".into())),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            let psi = state_from_json(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            Ok(psi)
        }
        (None, Some(Generator::Random)) => {
            let seed = require_seed(c, "the random generator")?;
            let p = parties(c, shape, if shape == Shape::Split { 2 } else { 1 })?;
            let layout = SystemLayout::new(p.into_iter().map(|(l, d, r)| Subsystem::new(l, d, r)).collect())?;
            let total = layout.total_dim();
            if total > 1 << 16 {
                return Err(CliError::Input(format!("random state of dimension {total} is too large")));
            }
            Ok(random_pure(layout, &mut stream(seed, 0)))
        }
        (None, Some(Generator::Ghz)) => {
            let p = parties(c, shape, 2)?;
            if p.iter().any(|x| x.1 != 2) {
                return Err(CliError::Input("the GHZ generator is defined on qubits only".into()));
            }
            let labels: Vec<&str> = p.iter().map(|x| x.0.as_str()).collect();
            let mut psi = ghz(&labels)?;
            for (l, _, r) in &p {
                psi = psi.with_role(l, *r)?;
            }
            Ok(psi)
        }
        (None, Some(Generator::Embezzle)) => {
            if shape == Shape::Split {
                return Err(CliError::Input("the embezzling state has no split-transfer roles".into()));
            }
            let d = match c.d.as_slice() {
                [d] => *d,
                [] => return Err(CliError::Input("the embezzle generator needs --d".into())),
                _ => return Err(CliError::Input("the embezzle generator takes a single --d".into())),
            };
            build_embezzling(&embezzle_params(d, c.alpha, c.eps.unwrap_or(0.1))?).map_err(Into::into)
        }
    }
}

/// Orthonormal family for `α = 0`, common tilt otherwise; `α` defaults to `1/d`.
pub fn embezzle_params(d: usize, alpha: Option<f64>, eps: f64) -> CliResult<EmbezzleParams> {
    if d == 0 {
        return Err(CliError::Input("--d must be positive".into()));
    }
    let alpha = alpha.unwrap_or(1.0 / d as f64);
    let family = if alpha == 0.0 { Family::Orthonormal } else { Family::CommonTilt };
    EmbezzleParams::new(d, alpha, family, eps).map_err(Into::into)
}

/// Split `"X|Y"` into trimmed, comma-separated label lists; either side may be empty.
pub fn parse_partition(text: &str) -> CliResult<(Vec<String>, Vec<String>)> {
    let (x, y) =
        text.split_once('|').ok_or_else(|| CliError::Input(format!("partition {text:?} must look like X|Y")))?;
    let side =
        |s: &str| -> Vec<String> { s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(String::from).collect() };
    Ok((side(x), side(y)))
}
