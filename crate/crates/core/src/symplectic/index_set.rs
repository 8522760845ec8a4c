use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// A subset `J ⊆ {1, …, d}`, stored as sorted zero-based coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexSet {
    dim: usize,
    members: Vec<usize>,
}

impl IndexSet {
    pub fn empty(dim: usize) -> Self {
        Self { dim, members: Vec::new() }
    }

    pub fn full(dim: usize) -> Self {
        Self { dim, members: (0..dim).collect() }
    }

    /// Zero-based constructor; duplicates are merged.
    pub fn new(dim: usize, members: &[usize]) -> Result<Self> {
        if let Some(&bad) = members.iter().find(|&&m| m >= dim) {
            return Err(Error::Dimension(format!("index {bad} out of range for d = {dim}")));
        }
        let mut members = members.to_vec();
        members.sort_unstable();
        members.dedup();
        Ok(Self { dim, members })
    }

    pub fn from_one_based(dim: usize, members: &[usize]) -> Result<Self> {
        if members.contains(&0) {
            return Err(Error::Dimension("one-based index 0".into()));
        }
        Self::new(dim, &members.iter().map(|m| m - 1).collect::<Vec<_>>())
    }

    /// Bit `k` of `mask` selects zero-based coordinate `k`.
    pub fn from_mask(dim: usize, mask: u64) -> Self {
        Self { dim, members: (0..dim).filter(|k| mask >> k & 1 == 1).collect() }
    }

    pub fn mask(&self) -> u64 {
        self.members.iter().fold(0, |acc, k| acc | 1 << k)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.members.iter().map(|m| m + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.dim
    }

    pub fn contains(&self, k: usize) -> bool {
        self.members.binary_search(&k).is_ok()
    }

    pub fn complement(&self) -> Self {
        Self { dim: self.dim, members: (0..self.dim).filter(|k| !self.contains(*k)).collect() }
    }

    /// Union of two disjoint sets.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Dimension("index sets live in different dimensions".into()));
        }
        if self.members.iter().any(|k| other.contains(*k)) {
            return Err(Error::Precondition("index sets are not disjoint".into()));
        }
        let mut members = [self.members.clone(), other.members.clone()].concat();
        members.sort_unstable();
        Ok(Self { dim: self.dim, members })
    }

    /// `I_J`.
    pub fn projector(&self) -> Mat {
        let mut m = Mat::zeros(self.dim, self.dim);
        for &k in &self.members {
            m[(k, k)] = 1.0;
        }
        m
    }

    /// All `2^d` subsets, in increasing mask order.
    pub fn all_subsets(dim: usize) -> impl Iterator<Item = IndexSet> {
        (0..1u64 << dim).map(move |mask| IndexSet::from_mask(dim, mask))
    }

    /// Shift to a larger ambient dimension (`k ↦ k + offset`).
    pub fn embed(&self, dim: usize, offset: usize) -> Result<Self> {
        Self::new(dim, &self.members.iter().map(|k| k + offset).collect::<Vec<_>>())
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.one_based().iter().map(|k| k.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}
