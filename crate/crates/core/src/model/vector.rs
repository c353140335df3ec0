use super::exact::ExactSum;
use super::{BayesianNetwork, ModelError};

/// A local vector keyed by the index of the variable it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexedElement {
    pub index: usize,
    pub local: Vec<f64>,
}

/// Global sufficient-statistics vector: a list of independent per-variable
/// elements with unique, ascending indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CompoundVector {
    elements: Vec<IndexedElement>,
}

impl CompoundVector {
    pub fn new(elements: Vec<IndexedElement>) -> Result<Self, ModelError> {
        if elements.windows(2).any(|w| w[0].index >= w[1].index) {
            return Err(ModelError::SkeletonMismatch(
                "element indices must be unique and ascending".into(),
            ));
        }
        Ok(CompoundVector { elements })
    }

    /// All-zero vector with the statistics skeleton of `bn`.
    pub fn zero_like(bn: &BayesianNetwork) -> Self {
        CompoundVector {
            elements: bn
                .distributions()
                .iter()
                .map(|d| IndexedElement {
                    index: d.main_var().index(),
                    local: vec![0.0; d.layout().len()],
                })
                .collect(),
        }
    }

    pub fn elements(&self) -> &[IndexedElement] {
        &self.elements
    }

    pub fn element(&self, index: usize) -> Option<&IndexedElement> {
        self.elements
            .binary_search_by_key(&index, |e| e.index)
            .ok()
            .map(|i| &self.elements[i])
    }

    /// `(index, length)` of every element.
    pub fn skeleton(&self) -> Vec<(usize, usize)> {
        self.elements.iter().map(|e| (e.index, e.local.len())).collect()
    }

    pub fn same_skeleton(&self, other: &CompoundVector) -> bool {
        self.elements.len() == other.elements.len()
            && self
                .elements
                .iter()
                .zip(&other.elements)
                .all(|(a, b)| a.index == b.index && a.local.len() == b.local.len())
    }

    /// Every entry, element by element.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.elements.iter().flat_map(|e| e.local.iter().copied())
    }

    pub fn add(&self, other: &CompoundVector) -> Result<CompoundVector, ModelError> {
        let mut sum = self.clone();
        sum.add_assign(other)?;
        Ok(sum)
    }

    pub fn add_assign(&mut self, other: &CompoundVector) -> Result<(), ModelError> {
        if !self.same_skeleton(other) {
            return Err(ModelError::SkeletonMismatch(format!(
                "{:?} vs {:?}",
                self.skeleton(),
                other.skeleton()
            )));
        }
        for (a, b) in self.elements.iter_mut().zip(&other.elements) {
            for (x, y) in a.local.iter_mut().zip(&b.local) {
                *x += y;
            }
        }
        Ok(())
    }

    pub fn scale(&self, c: f64) -> CompoundVector {
        CompoundVector {
            elements: self
                .elements
                .iter()
                .map(|e| IndexedElement {
                    index: e.index,
                    local: e.local.iter().map(|v| v * c).collect(),
                })
                .collect(),
        }
    }

    /// Divides every entry by `n`.
    pub fn divide_by(&self, n: f64) -> CompoundVector {
        CompoundVector {
            elements: self
                .elements
                .iter()
                .map(|e| IndexedElement {
                    index: e.index,
                    local: e.local.iter().map(|v| v / n).collect(),
                })
                .collect(),
        }
    }
}

/// Order-independent running sum of global sufficient statistics.
///
/// Entries are accumulated exactly, so any partition of a dataset into
/// batches, merged in any order, rounds to the same [`CompoundVector`].
#[derive(Debug, Clone)]
pub struct CompoundAccumulator {
    elements: Vec<(usize, Vec<ExactSum>)>,
    count: u64,
    block: Vec<f64>,
}

impl CompoundAccumulator {
    pub fn new(bn: &BayesianNetwork) -> Self {
        CompoundAccumulator {
            elements: bn
                .distributions()
                .iter()
                .map(|d| (d.main_var().index(), vec![ExactSum::new(); d.layout().len()]))
                .collect(),
            count: 0,
            block: Vec::new(),
        }
    }

    /// Adds `s(x)` for one instance.
    pub fn add_instance(&mut self, bn: &BayesianNetwork, x: &[f64]) -> Result<(), ModelError> {
        for (d, (_, sums)) in bn.distributions().iter().zip(self.elements.iter_mut()) {
            let offset = d.statistics_block(x, &mut self.block)?;
            for (sum, &v) in sums[offset..].iter_mut().zip(&self.block) {
                sum.add(v);
            }
        }
        self.count += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &CompoundAccumulator) -> Result<(), ModelError> {
        let same = self.elements.len() == other.elements.len()
            && self
                .elements
                .iter()
                .zip(&other.elements)
                .all(|(a, b)| a.0 == b.0 && a.1.len() == b.1.len());
        if !same {
            return Err(ModelError::SkeletonMismatch(
                "accumulators belong to different networks".into(),
            ));
        }
        for ((_, a), (_, b)) in self.elements.iter_mut().zip(&other.elements) {
            for (x, y) in a.iter_mut().zip(b) {
                x.merge(y);
            }
        }
        self.count += other.count;
        Ok(())
    }

    /// Number of instances added so far.
    pub fn count(&self) -> u64 {
        self.count
    }

    /// The accumulated sums, each rounded once to the nearest `f64`.
    pub fn to_vector(&self) -> CompoundVector {
        CompoundVector {
            elements: self
                .elements
                .iter()
                .map(|(index, sums)| IndexedElement {
                    index: *index,
                    local: sums.iter().map(ExactSum::value).collect(),
                })
                .collect(),
        }
    }
}
