use std::fmt;

use crate::chart::MAX_DIM;
use crate::error::{Error, Result};

/// A strictly increasing tuple of coordinate indices, stored as a bitmask.
///
/// The empty index (degree 0) is allowed and represents the scalar slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    bits: u32,
}

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex { bits: 0 };

    /// Build from an index list, which must be strictly increasing.
    pub fn new(indices: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        let mut prev: Option<usize> = None;
        for &i in indices {
            if i >= MAX_DIM {
                return Err(Error::Invalid(format!(
                    "index {i} exceeds maximum {MAX_DIM}"
                )));
            }
            if let Some(p) = prev {
                if i <= p {
                    return Err(Error::Invalid(format!(
                        "multi-index {indices:?} is not strictly increasing"
                    )));
                }
            }
            prev = Some(i);
            bits |= 1 << i;
        }
        Ok(MultiIndex { bits })
    }

    /// A single-index multi-index.
    pub fn single(i: usize) -> Self {
        debug_assert!(i < MAX_DIM);
        MultiIndex { bits: 1 << i }
    }

    pub fn degree(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits & (1 << i) != 0
    }

    /// Indices in increasing order.
    pub fn indices(&self) -> Vec<usize> {
        (0..MAX_DIM).filter(|&i| self.contains(i)).collect()
    }

    /// Largest index plus one, i.e. the smallest ambient dimension that fits.
    pub fn min_dim(&self) -> usize {
        (32 - self.bits.leading_zeros()) as usize
    }

    /// Merge with another multi-index. Returns `None` when they share an
    /// index (the wedge vanishes); otherwise the sign of the permutation
    /// sorting the concatenation `(self, other)` together with the union.
    pub fn merge(&self, other: &MultiIndex) -> Option<(f64, MultiIndex)> {
        if self.bits & other.bits != 0 {
            return None;
        }
        // Inversions: pairs (i in self, j in other) with i > j.
        let mut inversions = 0u32;
        for j in other.indices() {
            let above = self.bits >> (j + 1);
            inversions += above.count_ones();
        }
        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        Some((
            sign,
            MultiIndex {
                bits: self.bits | other.bits,
            },
        ))
    }

    /// Remove the element at position `pos` (0-based within the increasing
    /// order), returning the removed index and the remainder.
    pub fn remove_position(&self, pos: usize) -> (usize, MultiIndex) {
        let idx = self.indices()[pos];
        (
            idx,
            MultiIndex {
                bits: self.bits & !(1 << idx),
            },
        )
    }

    /// The complement within ambient dimension `n`.
    pub fn complement(&self, n: usize) -> MultiIndex {
        let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        MultiIndex {
            bits: full & !self.bits,
        }
    }

    pub fn is_subset_of(&self, other: &MultiIndex) -> bool {
        self.bits & !other.bits == 0
    }

    /// Indices of `self` not in `other`.
    pub fn difference(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex {
            bits: self.bits & !other.bits,
        }
    }

    /// All multi-indices of the given degree in ambient dimension `n`,
    /// in lexicographic order of the index tuples.
    pub fn enumerate(n: usize, degree: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(degree);
        fn rec(
            n: usize,
            degree: usize,
            start: usize,
            current: &mut Vec<usize>,
            out: &mut Vec<MultiIndex>,
        ) {
            if current.len() == degree {
                out.push(MultiIndex::new(current).expect("indices are strictly increasing"));
                return;
            }
            let remaining = degree - current.len();
            for i in start..=(n.saturating_sub(remaining)) {
                current.push(i);
                rec(n, degree, i + 1, current, out);
                current.pop();
            }
        }
        if degree <= n {
            rec(n, degree, 0, &mut current, &mut out);
        }
        out
    }

    /// Parse a comma-separated index list, e.g. `"0,2"`. The empty string is
    /// the empty multi-index.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(MultiIndex::EMPTY);
        }
        let mut indices = Vec::new();
        for part in s.split(',') {
            let i: usize = part.trim().parse().map_err(|_| {
                Error::Invalid(format!("bad multi-index component `{part}` in `{s}`"))
            })?;
            indices.push(i);
        }
        MultiIndex::new(&indices)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices().iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// (-1)^e for possibly negative exponents.
pub(crate) fn parity_sign(e: i64) -> f64 {
    if e.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_signs() {
        let i0 = MultiIndex::new(&[0]).unwrap();
        let i1 = MultiIndex::new(&[1]).unwrap();
        let i01 = MultiIndex::new(&[0, 1]).unwrap();
        assert_eq!(i0.merge(&i1), Some((1.0, i01)));
        assert_eq!(i1.merge(&i0), Some((-1.0, i01)));
        assert_eq!(i01.merge(&i1), None);
    }

    #[test]
    fn merge_sign_counts_inversions() {
        // (0,2) then (1): 2 > 1 gives one inversion.
        let i02 = MultiIndex::new(&[0, 2]).unwrap();
        let i1 = MultiIndex::new(&[1]).unwrap();
        let (s, m) = i02.merge(&i1).unwrap();
        assert_eq!(s, -1.0);
        assert_eq!(m.indices(), vec![0, 1, 2]);
        // (2) then (0,1): 2 > 0 and 2 > 1, two inversions.
        let i2 = MultiIndex::new(&[2]).unwrap();
        let i01 = MultiIndex::new(&[0, 1]).unwrap();
        let (s, _) = i2.merge(&i01).unwrap();
        assert_eq!(s, 1.0);
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(MultiIndex::enumerate(4, 2).len(), 6);
        assert_eq!(MultiIndex::enumerate(3, 0), vec![MultiIndex::EMPTY]);
        assert_eq!(MultiIndex::enumerate(3, 4), Vec::<MultiIndex>::new());
        let all: Vec<_> = MultiIndex::enumerate(3, 2)
            .iter()
            .map(|m| m.indices())
            .collect();
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(MultiIndex::parse("0,2").unwrap().indices(), vec![0, 2]);
        assert_eq!(MultiIndex::parse("").unwrap(), MultiIndex::EMPTY);
        assert!(MultiIndex::parse("1,0").is_err());
        assert!(MultiIndex::parse("1,1").is_err());
        assert_eq!(MultiIndex::parse("0,2").unwrap().to_string(), "0,2");
    }

    #[test]
    fn remove_position_signs() {
        let i = MultiIndex::new(&[1, 3, 4]).unwrap();
        let (idx, rest) = i.remove_position(1);
        assert_eq!(idx, 3);
        assert_eq!(rest.indices(), vec![1, 4]);
    }
}
