//! Bitmask indexing of the subset lattice of `{1, ..., d}`.
//!
//! A subset `u` of `{1, ..., d}` is encoded as a machine word with bit `j-1`
//! set exactly when `j` is a member. Dense tables are indexed by this word,
//! so all lattice sweeps are cache-friendly loops over `0..2^d`.

use crate::error::{Error, Result};
use std::fmt;

/// Largest dimension for which dense `2^d` tables are supported.
pub const MAX_DENSE_DIM: u32 = 24;

/// A subset of `{1, ..., d}` encoded as a bitmask.
///
/// ```
/// use weightlat::Subset;
/// let u = Subset::from_members(&[1, 3]);
/// assert_eq!(u.bits(), 0b101);
/// assert_eq!(u.to_string(), "{1,3}");
/// assert!(u.is_subset_of(Subset::from_members(&[1, 2, 3])));
/// ```
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    /// Builds a subset from 1-based member indices.
    pub fn from_members(members: &[u32]) -> Self {
        let mut bits = 0u32;
        for &j in members {
            debug_assert!(j >= 1);
            bits |= 1 << (j - 1);
        }
        Subset(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn cardinality(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, j: u32) -> bool {
        debug_assert!(j >= 1);
        self.0 & (1 << (j - 1)) != 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Complement within `{1, ..., d}`.
    pub fn complement(self, d: u32) -> Subset {
        Subset(!self.0 & mask_all(d))
    }

    /// Largest member, with `max ∅ = 0`.
    pub fn max_member(self) -> u32 {
        if self.0 == 0 {
            0
        } else {
            32 - self.0.leading_zeros()
        }
    }

    /// 1-based member indices in increasing order.
    pub fn members(self) -> impl Iterator<Item = u32> {
        let bits = self.0;
        (0..32).filter(move |i| bits & (1 << i) != 0).map(|i| i + 1)
    }

    /// All subsets of `self`, in increasing bitmask order.
    pub fn subsets(self) -> SubsetsIter {
        SubsetsIter {
            mask: self.0,
            next: Some(0),
        }
    }

    pub fn valid_for(self, d: u32) -> Result<()> {
        if self.0 & !mask_all(d) != 0 {
            return Err(Error::DimensionMismatch(self.max_member(), d));
        }
        Ok(())
    }

    /// Member list as sorted 1-based coordinates.
    pub fn to_coords(self) -> Coords {
        self.members().collect()
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for j in self.members() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
            first = false;
        }
        write!(f, "}}")
    }
}

/// Iterates over all subsets of a fixed mask in increasing bitmask order.
pub struct SubsetsIter {
    mask: u32,
    next: Option<u32>,
}

impl Iterator for SubsetsIter {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        let cur = self.next?;
        // Enumerate submasks ascending: the standard (cur - mask) & mask walk
        // runs descending, so climb by adding the complement bits instead.
        self.next = if cur == self.mask {
            None
        } else {
            Some(((cur | !self.mask).wrapping_add(1)) & self.mask)
        };
        Some(Subset(cur))
    }
}

/// Bitmask of the full set `{1, ..., d}`.
pub fn mask_all(d: u32) -> u32 {
    debug_assert!(d <= 32);
    if d == 32 {
        u32::MAX
    } else {
        (1u32 << d) - 1
    }
}

/// Number of subsets of `{1, ..., d}`.
pub fn table_len(d: u32) -> usize {
    1usize << d
}

/// Checks that a dense table of dimension `d` is representable.
pub fn check_dense_dim(d: u32) -> Result<()> {
    if d > MAX_DENSE_DIM {
        return Err(Error::DimensionTooLarge(d, MAX_DENSE_DIM));
    }
    Ok(())
}

/// Sorted list of 1-based coordinates; the subset representation used for
/// infinite-dimensional weight families.
pub type Coords = Vec<u32>;

/// Validates that coordinates are 1-based, sorted, and distinct.
pub fn check_coords(coords: &[u32]) -> Result<()> {
    for (i, &c) in coords.iter().enumerate() {
        if c == 0 {
            return Err(Error::InvalidArgument("coordinates are 1-based".into()));
        }
        if i > 0 && coords[i - 1] >= c {
            return Err(Error::InvalidArgument(
                "coordinates must be strictly increasing".into(),
            ));
        }
    }
    Ok(())
}

/// Formats coordinates in the weight-file syntax, e.g. `{1,3}`.
pub fn format_coords(coords: &[u32]) -> String {
    let inner: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// Dimension of a weight family: finite or countably infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dim {
    Finite(u32),
    Infinite,
}

impl Dim {
    pub fn finite(self) -> Option<u32> {
        match self {
            Dim::Finite(d) => Some(d),
            Dim::Infinite => None,
        }
    }

    pub fn require_finite(self) -> Result<u32> {
        self.finite().ok_or(Error::InfiniteDimension)
    }

    /// Whether coordinate `j` (1-based) exists in this dimension.
    pub fn admits(self, j: u32) -> bool {
        match self {
            Dim::Finite(d) => j >= 1 && j <= d,
            Dim::Infinite => j >= 1,
        }
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dim::Finite(d) => write!(f, "{d}"),
            Dim::Infinite => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_basics() {
        let u = Subset::from_members(&[1, 3]);
        assert_eq!(u.bits(), 0b101);
        assert_eq!(u.cardinality(), 2);
        assert!(u.contains(1) && !u.contains(2) && u.contains(3));
        assert_eq!(u.max_member(), 3);
        assert_eq!(Subset::EMPTY.max_member(), 0);
        assert_eq!(u.complement(3), Subset(0b010));
        assert_eq!(format!("{u}"), "{1,3}");
        assert_eq!(format!("{}", Subset::EMPTY), "{}");
    }

    #[test]
    fn subsets_iterate_ascending_and_complete() {
        let v = Subset(0b1011);
        let subs: Vec<u32> = v.subsets().map(|s| s.bits()).collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.windows(2).all(|w| w[0] < w[1]));
        for s in &subs {
            assert_eq!(s & !0b1011, 0);
        }
        let empty: Vec<u32> = Subset::EMPTY.subsets().map(|s| s.bits()).collect();
        assert_eq!(empty, vec![0]);
    }

    #[test]
    fn coords_validation() {
        assert!(check_coords(&[1, 2, 5]).is_ok());
        assert!(check_coords(&[0]).is_err());
        assert!(check_coords(&[2, 2]).is_err());
        assert!(check_coords(&[3, 1]).is_err());
    }
}
