//! Ground sets and bitset-backed element subsets.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ground set representable by [`ElementSet`].
pub const MAX_GROUND: usize = 64;

/// A ground set `{0, .., n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_GROUND {
            return Err(Error::Input(format!(
                "ground set size must be in 1..={MAX_GROUND}, got {n}"
            )));
        }
        Ok(GroundSet { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn full(&self) -> ElementSet {
        ElementSet::full(self.n)
    }

    pub fn contains_set(&self, s: ElementSet) -> bool {
        s.is_subset(self.full())
    }

    pub fn check(&self, s: ElementSet) -> Result<()> {
        if self.contains_set(s) {
            Ok(())
        } else {
            Err(Error::Input(format!(
                "set {s} has element ids outside the ground set of size {}",
                self.n
            )))
        }
    }

    /// All `2^n` subsets as bitmasks, in increasing mask order.
    pub fn subsets(&self) -> impl Iterator<Item = ElementSet> {
        let n = self.n;
        assert!(
            n < 64,
            "cannot enumerate subsets of a 64-element ground set"
        );
        (0u64..(1u64 << n)).map(ElementSet)
    }
}

/// A subset of the ground set; bit `i` set means element `i` is a member.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct ElementSet(pub u64);

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            ElementSet(u64::MAX)
        } else {
            ElementSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(e: usize) -> Self {
        debug_assert!(e < MAX_GROUND);
        ElementSet(1u64 << e)
    }

    pub fn from_mask(mask: u64) -> Self {
        ElementSet(mask)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn contains(self, e: usize) -> bool {
        e < MAX_GROUND && self.0 & (1u64 << e) != 0
    }

    pub fn with(self, e: usize) -> Self {
        ElementSet(self.0 | (1u64 << e))
    }

    pub fn without(self, e: usize) -> Self {
        ElementSet(self.0 & !(1u64 << e))
    }

    pub fn union(self, other: Self) -> Self {
        ElementSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        ElementSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        ElementSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Members in increasing id order.
    pub fn iter(self) -> Elements {
        Elements(self.0)
    }

    /// Every subset of `self`, including `self` and the empty set.
    pub fn subsets(self) -> impl Iterator<Item = ElementSet> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(ElementSet(cur))
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Order used for tie-breaking between sets: smaller cardinality first,
    /// then lexicographic on the sorted member lists.
    pub fn canonical_cmp(self, other: Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl FromIterator<usize> for ElementSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(ElementSet::EMPTY, |s, e| s.with(e))
    }
}

impl From<ElementSet> for Vec<usize> {
    fn from(s: ElementSet) -> Self {
        s.to_vec()
    }
}

impl TryFrom<Vec<usize>> for ElementSet {
    type Error = String;

    fn try_from(v: Vec<usize>) -> std::result::Result<Self, Self::Error> {
        match v.iter().find(|&&e| e >= MAX_GROUND) {
            Some(e) => Err(format!(
                "element id {e} exceeds the {MAX_GROUND}-element limit"
            )),
            None => Ok(v.into_iter().collect()),
        }
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

pub struct Elements(u64);

impl Iterator for Elements {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let e = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(e)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Elements {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a: ElementSet = [0, 2, 5].into_iter().collect();
        let b: ElementSet = [2, 3].into_iter().collect();
        assert_eq!(a.union(b).to_vec(), vec![0, 2, 3, 5]);
        assert_eq!(a.intersection(b).to_vec(), vec![2]);
        assert_eq!(a.difference(b).to_vec(), vec![0, 5]);
        assert_eq!(a.with(1).without(0).to_vec(), vec![1, 2, 5]);
        assert!(ElementSet::singleton(2).is_subset(a));
        assert_eq!(a.len(), 3);
    }

    #[test]
    fn subset_enumeration_counts() {
        let a: ElementSet = [1, 4, 6].into_iter().collect();
        let subs: Vec<_> = a.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|s| s.is_subset(a)));
        assert_eq!(GroundSet::new(5).unwrap().subsets().count(), 32);
    }

    #[test]
    fn canonical_order() {
        let s = |v: &[usize]| v.iter().copied().collect::<ElementSet>();
        use std::cmp::Ordering::*;
        assert_eq!(s(&[3]).canonical_cmp(s(&[0, 1])), Less);
        assert_eq!(s(&[0, 2]).canonical_cmp(s(&[1, 2])), Less);
        assert_eq!(s(&[1, 2]).canonical_cmp(s(&[0, 3])), Greater);
    }

    #[test]
    fn ground_set_bounds() {
        assert!(GroundSet::new(0).is_err());
        assert!(GroundSet::new(65).is_err());
        let g = GroundSet::new(3).unwrap();
        assert!(g.check(ElementSet::singleton(3)).is_err());
        assert!(g.check(ElementSet::full(3)).is_ok());
    }

    #[test]
    fn serde_as_sorted_list() {
        let a: ElementSet = [4, 1].into_iter().collect();
        assert_eq!(serde_json::to_string(&a).unwrap(), "[1,4]");
        let b: ElementSet = serde_json::from_str("[4,1]").unwrap();
        assert_eq!(a, b);
        assert!(serde_json::from_str::<ElementSet>("[64]").is_err());
    }
}
