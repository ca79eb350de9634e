use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The part a subsystem plays in a protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Role {
    Sender,
    ReceiverA,
    ReceiverB,
    Reference,
    Ancilla,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsystem {
    pub label: String,
    pub dim: usize,
    pub role: Role,
}

impl Subsystem {
    pub fn new(label: impl Into<String>, dim: usize, role: Role) -> Self {
        Subsystem { label: label.into(), dim, role }
    }
}

/// Ordered named tensor factors. The first subsystem is the most significant index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Subsystem>", into = "Vec<Subsystem>")]
pub struct SystemLayout {
    subsystems: Vec<Subsystem>,
}

impl TryFrom<Vec<Subsystem>> for SystemLayout {
    type Error = Error;
    fn try_from(v: Vec<Subsystem>) -> Result<Self> {
        SystemLayout::new(v)
    }
}

impl From<SystemLayout> for Vec<Subsystem> {
    fn from(l: SystemLayout) -> Self {
        l.subsystems
    }
}

impl SystemLayout {
    pub fn new(subsystems: Vec<Subsystem>) -> Result<Self> {
        for (i, s) in subsystems.iter().enumerate() {
            if s.dim == 0 {
                return Err(Error::Layout(format!("subsystem {} has dimension 0", s.label)));
            }
            if s.label.is_empty() {
                return Err(Error::Layout("empty subsystem label".into()));
            }
            if subsystems[..i].iter().any(|t| t.label == s.label) {
                return Err(Error::Composition(format!("duplicate label {}", s.label)));
            }
        }
        Ok(SystemLayout { subsystems })
    }

    /// The trivial layout with no factors (total dimension 1).
    pub fn empty() -> Self {
        SystemLayout { subsystems: vec![] }
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(|s| s.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.subsystems.iter().map(|s| s.dim).product()
    }

    pub fn labels(&self) -> Vec<String> {
        self.subsystems.iter().map(|s| s.label.clone()).collect()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.subsystems.iter().any(|s| s.label == label)
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.subsystems
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::Layout(format!("unknown label {label}")))
    }

    /// Positions of `labels`, rejecting unknown or repeated labels.
    pub fn positions<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            let p = self.position(l.as_ref())?;
            if out.contains(&p) {
                return Err(Error::Layout(format!("label {} repeated", l.as_ref())));
            }
            out.push(p);
        }
        Ok(out)
    }

    pub fn subsystem(&self, label: &str) -> Result<&Subsystem> {
        Ok(&self.subsystems[self.position(label)?])
    }

    pub fn dim_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<usize> {
        Ok(self.positions(labels)?.iter().map(|&p| self.subsystems[p].dim).product())
    }

    pub fn labels_with_role(&self, role: Role) -> Vec<String> {
        self.subsystems.iter().filter(|s| s.role == role).map(|s| s.label.clone()).collect()
    }

    /// Labels not in `labels`, in layout order.
    pub fn complement<S: AsRef<str>>(&self, labels: &[S]) -> Vec<String> {
        self.subsystems
            .iter()
            .filter(|s| !labels.iter().any(|l| l.as_ref() == s.label))
            .map(|s| s.label.clone())
            .collect()
    }

    pub fn select(&self, positions: &[usize]) -> SystemLayout {
        SystemLayout { subsystems: positions.iter().map(|&p| self.subsystems[p].clone()).collect() }
    }

    pub fn concat(&self, other: &SystemLayout) -> Result<SystemLayout> {
        let mut v = self.subsystems.clone();
        v.extend(other.subsystems.iter().cloned());
        SystemLayout::new(v)
    }

    pub fn with_role(&self, label: &str, role: Role) -> Result<SystemLayout> {
        let p = self.position(label)?;
        let mut v = self.subsystems.clone();
        v[p].role = role;
        Ok(SystemLayout { subsystems: v })
    }

    pub fn relabel(&self, from: &str, to: &str) -> Result<SystemLayout> {
        let p = self.position(from)?;
        let mut v = self.subsystems.clone();
        v[p].label = to.to_string();
        SystemLayout::new(v)
    }
}

/// Row-major strides for `dims`.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut st = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        st[k] = st[k + 1] * dims[k + 1];
    }
    st
}

/// Flat offsets contributed by every joint index of the factors at `subset`
/// (enumerated with the first listed factor most significant).
pub fn subset_offsets(dims: &[usize], subset: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut offs = vec![0usize];
    for &k in subset {
        let mut next = Vec::with_capacity(offs.len() * dims[k]);
        for &o in &offs {
            for i in 0..dims[k] {
                next.push(o + i * st[k]);
            }
        }
        offs = next;
    }
    offs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_follow_row_major_order() {
        let dims = [2, 3, 2];
        assert_eq!(strides(&dims), vec![6, 2, 1]);
        assert_eq!(subset_offsets(&dims, &[2, 0]), vec![0, 6, 1, 7]);
        assert_eq!(subset_offsets(&dims, &[]), vec![0]);
    }

    #[test]
    fn duplicate_labels_rejected() {
        let r = SystemLayout::new(vec![Subsystem::new("A", 2, Role::Sender), Subsystem::new("A", 2, Role::Reference)]);
        assert!(matches!(r, Err(Error::Composition(_))));
        let r = SystemLayout::new(vec![Subsystem::new("A", 0, Role::Sender)]);
        assert!(matches!(r, Err(Error::Layout(_))));
    }
}
