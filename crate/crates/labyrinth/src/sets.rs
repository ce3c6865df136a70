//! Ordered finite index sets with symbolic element names.
//!
//! The order of the names fixes the coordinates of the free module on the
//! set, so maze endpoints and matrix indices share one naming scheme.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct IndexSet {
    names: Vec<String>,
}

impl IndexSet {
    pub fn new<S: Into<String>>(names: Vec<S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::DuplicateElement(n.clone()));
            }
        }
        Ok(IndexSet { names })
    }

    pub fn empty() -> Self {
        IndexSet { names: Vec::new() }
    }

    /// The set `{"1", "2", ..., "n"}`.
    pub fn numeric(n: usize) -> Self {
        IndexSet { names: (1..=n).map(|i| i.to_string()).collect() }
    }

    /// The set `{"<prefix>1", ..., "<prefix>n"}`.
    pub fn prefixed(prefix: &str, n: usize) -> Self {
        IndexSet { names: (1..=n).map(|i| format!("{prefix}{i}")).collect() }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, pos: usize) -> &str {
        &self.names[pos]
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    /// The ordered subset selected by a bitmask over positions.
    pub fn subset(&self, mask: u32) -> IndexSet {
        let names = self
            .names
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, n)| n.clone())
            .collect();
        IndexSet { names }
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names.join(","))
    }
}

impl Serialize for IndexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.names.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let names = Vec::<String>::deserialize(d)?;
        IndexSet::new(names).map_err(serde::de::Error::custom)
    }
}
