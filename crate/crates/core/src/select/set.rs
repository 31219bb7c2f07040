use crate::error::{Error, Result};
use serde::Serialize;

/// A chosen subset of RF chains (or beams), stored as strictly increasing
/// 1-based chain numbers over a fixed universe.
///
/// Chain numbers match how arrays are labeled in configs and output files;
/// [`SelectionSet::zero_based`] gives the matrix row/column positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelectionSet {
    indices: Vec<usize>,
    universe: usize,
}

impl SelectionSet {
    /// Validates and wraps 1-based indices; they must be strictly increasing
    /// and within `[1, universe]`.
    pub fn new(indices: Vec<usize>, universe: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::model("selection set is empty"));
        }
        for w in indices.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::model(format!(
                    "selection indices not strictly increasing at {} -> {}",
                    w[0], w[1]
                )));
            }
        }
        let (&lo, &hi) = (indices.first().unwrap(), indices.last().unwrap());
        if lo < 1 || hi > universe {
            return Err(Error::model(format!(
                "selection index out of range: {lo}..={hi} against universe {universe}"
            )));
        }
        Ok(SelectionSet { indices, universe })
    }

    /// Builds from 0-based positions in any order.
    pub fn from_zero_based(mut positions: Vec<usize>, universe: usize) -> Result<Self> {
        positions.sort_unstable();
        SelectionSet::new(positions.into_iter().map(|p| p + 1).collect(), universe)
    }

    pub fn full(universe: usize) -> Self {
        SelectionSet {
            indices: (1..=universe).collect(),
            universe,
        }
    }

    /// 1-based chain numbers, strictly increasing.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// 0-based positions for matrix subselection.
    pub fn zero_based(&self) -> Vec<usize> {
        self.indices.iter().map(|&i| i - 1).collect()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn universe_size(&self) -> usize {
        self.universe
    }

    pub fn is_full(&self) -> bool {
        self.indices.len() == self.universe
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }
}

impl std::fmt::Display for SelectionSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, idx) in self.indices.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{idx}")?;
        }
        write!(f, "}}")
    }
}
