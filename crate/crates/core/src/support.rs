use std::fmt;

use crate::error::{Error, Result};

/// Binary indicator of which regressor coordinates may be nonzero.
///
/// The derived ordering is lexicographic on the bit tuple with 0 < 1, which
/// is the tie-break rule used by the master solver and the enumeration
/// oracles.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SupportVector {
    bits: Vec<bool>,
}

impl SupportVector {
    pub fn zeros(p: usize) -> Self {
        SupportVector { bits: vec![false; p] }
    }

    pub fn ones(p: usize) -> Self {
        SupportVector { bits: vec![true; p] }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        SupportVector { bits }
    }

    pub fn from_indices(p: usize, indices: &[usize]) -> Result<Self> {
        let mut s = SupportVector::zeros(p);
        for &i in indices {
            if i >= p {
                return Err(Error::InvalidParams(format!(
                    "support index {i} out of range for p={p}"
                )));
            }
            s.bits[i] = true;
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Number of selected coordinates.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, v: bool) {
        self.bits[i] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Sorted indices of the selected coordinates.
    pub fn indices(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.then_some(i))
            .collect()
    }

    /// The support as a point of the relaxed cube, 0.0/1.0 per coordinate.
    pub fn to_relaxed(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| f64::from(u8::from(b))).collect()
    }

    /// True when every selected coordinate of `self` is selected in `other`.
    pub fn is_subset_of(&self, other: &SupportVector) -> bool {
        self.bits.len() == other.bits.len()
            && self.bits.iter().zip(&other.bits).all(|(a, b)| !a || *b)
    }
}

impl fmt::Display for SupportVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", u8::from(b))?;
        }
        Ok(())
    }
}
