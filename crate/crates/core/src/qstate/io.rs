//! JSON interchange for states: `{"layout":[…], "kind":"density", "re":[[…]], "im":[[…]]}`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_defect, CMat, CVec};

use super::layout::{Subsystem, SystemLayout};
use super::state::{QuantumState, StateData};

/// Readers reject density matrices further than this from Hermitian.
pub const READ_HERMITIAN_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Vector,
    Density,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RealArray {
    Matrix(Vec<Vec<f64>>),
    Vector(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub layout: Vec<Subsystem>,
    pub kind: StateKind,
    pub re: RealArray,
    pub im: RealArray,
}

impl StateJson {
    pub fn from_state(state: &QuantumState) -> Self {
        let layout = state.layout().subsystems().to_vec();
        match state.data() {
            StateData::Vector(v) => StateJson {
                layout,
                kind: StateKind::Vector,
                re: RealArray::Vector(v.iter().map(|z| z.re).collect()),
                im: RealArray::Vector(v.iter().map(|z| z.im).collect()),
            },
            StateData::Density(m) => {
                let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
                    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
                };
                StateJson {
                    layout,
                    kind: StateKind::Density,
                    re: RealArray::Matrix(rows(|z| z.re)),
                    im: RealArray::Matrix(rows(|z| z.im)),
                }
            }
        }
    }

    pub fn into_state(self) -> Result<QuantumState> {
        let layout = SystemLayout::new(self.layout)?;
        let d = layout.total_dim();
        match (self.kind, self.re, self.im) {
            (StateKind::Vector, RealArray::Vector(r), RealArray::Vector(i)) => {
                if r.len() != d || i.len() != d {
                    return Err(Error::Input(format!("vector arrays must have length {d}")));
                }
                QuantumState::pure(layout, CVec::from_fn(d, |k, _| C64::new(r[k], i[k])))
            }
            (StateKind::Density, RealArray::Matrix(r), RealArray::Matrix(i)) => {
                let square = |a: &Vec<Vec<f64>>| a.len() == d && a.iter().all(|row| row.len() == d);
                if !square(&r) || !square(&i) {
                    return Err(Error::Input(format!("density arrays must be {d}x{d}")));
                }
                let m = CMat::from_fn(d, d, |a, b| C64::new(r[a][b], i[a][b]));
                let defect = hermiticity_defect(&m);
                if defect > READ_HERMITIAN_TOL {
                    return Err(Error::Input(format!("density matrix not Hermitian (defect {defect:.3e})")));
                }
                QuantumState::density(layout, crate::linalg::hermitize(&m))
            }
            _ => Err(Error::Input("array shapes do not match the declared kind".into())),
        }
    }
}

pub fn state_to_json(state: &QuantumState) -> String {
    serde_json::to_string(&StateJson::from_state(state)).expect("state serializes")
}

/// Parse a state, reporting schema violations with line and column.
pub fn state_from_json(text: &str) -> Result<QuantumState> {
    let parsed: StateJson = serde_json::from_str(text)
        .map_err(|e| Error::Input(format!("line {} column {}: {e}", e.line(), e.column())))?;
    parsed.into_state()
}

/// A complex matrix as separate real and imaginary row-major arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMat) -> Self {
        MatrixJson {
            re: (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect()).collect(),
            im: (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect()).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        let r = self.re.len();
        let c = self.re.first().map_or(0, |row| row.len());
        if self.im.len() != r || self.re.iter().chain(self.im.iter()).any(|row| row.len() != c) {
            return Err(Error::Input("ragged matrix arrays".into()));
        }
        Ok(CMat::from_fn(r, c, |i, j| C64::new(self.re[i][j], self.im[i][j])))
    }
}

/// Serde adapter writing non-finite reals as the strings `"inf"`, `"-inf"`, `"nan"`.
pub mod bits {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}
