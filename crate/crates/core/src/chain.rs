//! Partial transformations of a finite chain `[n] = {1, ..., n}`.
//!
//! Maps compose left to right: `f.then(&g)` sends `x` to `(x f) g`.
//! Points are 1-based throughout.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest chain size a [`PartialMap`] can represent.
pub const MAX_CHAIN: u8 = 16;

/// A set of points of `[n]`, stored as a bitmask (bit `x - 1` for point `x`).
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet(u32);

impl PointSet {
    pub const fn empty() -> Self {
        PointSet(0)
    }

    /// The whole chain `[n]`.
    pub fn full(n: u8) -> Self {
        PointSet(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(x: u8) -> Self {
        PointSet(1 << (x - 1))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn insert(&mut self, x: u8) {
        self.0 |= 1 << (x - 1);
    }

    pub fn remove(&mut self, x: u8) {
        self.0 &= !(1 << (x - 1));
    }

    pub fn with(mut self, x: u8) -> Self {
        self.insert(x);
        self
    }

    pub fn without(mut self, x: u8) -> Self {
        self.remove(x);
        self
    }

    pub fn contains(self, x: u8) -> bool {
        (1..=32).contains(&x) && self.0 & (1 << (x - 1)) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn first(self) -> Option<u8> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as u8 + 1)
    }

    pub fn last(self) -> Option<u8> {
        (self.0 != 0).then(|| 32 - self.0.leading_zeros() as u8)
    }

    pub fn union(self, other: PointSet) -> PointSet {
        PointSet(self.0 | other.0)
    }

    pub fn intersection(self, other: PointSet) -> PointSet {
        PointSet(self.0 & other.0)
    }

    pub fn difference(self, other: PointSet) -> PointSet {
        PointSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: PointSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Points in increasing order.
    pub fn iter(self) -> impl Iterator<Item = u8> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let x = bits.trailing_zeros() as u8 + 1;
            bits &= bits - 1;
            Some(x)
        })
    }

    /// True iff the set is an integer interval. The empty set is not convex.
    pub fn is_interval(self) -> bool {
        if self.0 == 0 {
            return false;
        }
        let shifted = self.0 >> self.0.trailing_zeros();
        shifted & (shifted + 1) == 0
    }
}

impl FromIterator<u8> for PointSet {
    fn from_iter<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        let mut s = PointSet::empty();
        for x in iter {
            s.insert(x);
        }
        s
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

/// Convexity test for a nonempty subset of `[n]`.
pub fn is_convex(set: PointSet, n: u8) -> Result<bool> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if let Some(m) = set.last() {
        if m > n {
            return Err(Error::PointOutOfRange { point: m as usize, n });
        }
    }
    Ok(set.is_interval())
}

/// A nonempty partial transformation of `[n]`.
///
/// `images[x - 1]` holds `x f`, or 0 when `x` is outside the domain. Entries
/// past `n` are always 0, so derived equality and hashing agree with equality
/// of the assignment lists.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MapRecord", into = "MapRecord")]
pub struct PartialMap {
    n: u8,
    images: [u8; MAX_CHAIN as usize],
}

fn check_chain(n: usize) -> Result<u8> {
    if n == 0 {
        return Err(Error::ZeroChain);
    }
    if n > MAX_CHAIN as usize {
        return Err(Error::ChainTooLarge { n, max: MAX_CHAIN });
    }
    Ok(n as u8)
}

impl PartialMap {
    /// Builds a map from `(x, y)` assignments given in any order.
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = check_chain(n)?;
        let mut images = [0u8; MAX_CHAIN as usize];
        for &(x, y) in pairs {
            for p in [x, y] {
                if p == 0 || p > n as usize {
                    return Err(Error::PointOutOfRange { point: p, n });
                }
            }
            if images[x - 1] != 0 {
                return Err(Error::DuplicateDomainPoint(x as u8));
            }
            images[x - 1] = y as u8;
        }
        if pairs.is_empty() {
            return Err(Error::EmptyMap);
        }
        Ok(PartialMap { n, images })
    }

    /// Builds a map from a per-point image list (`None` = undefined).
    pub fn from_images(images: &[Option<u8>]) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = images
            .iter()
            .enumerate()
            .filter_map(|(i, y)| y.map(|y| (i + 1, y as usize)))
            .collect();
        if pairs.is_empty() {
            check_chain(images.len())?;
            return Err(Error::EmptyMap);
        }
        PartialMap::new(images.len(), &pairs)
    }

    /// Unchecked constructor for callers that already hold a valid image row.
    pub(crate) fn from_raw(n: u8, images: [u8; MAX_CHAIN as usize]) -> Self {
        debug_assert!(images.iter().any(|&y| y != 0));
        debug_assert!(images[n as usize..].iter().all(|&y| y == 0));
        PartialMap { n, images }
    }

    /// `1_[n]`.
    pub fn identity(n: u8) -> Self {
        PartialMap::partial_identity(n, PointSet::full(n)).expect("[n] is nonempty")
    }

    /// `1*_[n]`, the order-reversing permutation `x -> n + 1 - x`.
    pub fn reversal(n: u8) -> Self {
        let mut images = [0u8; MAX_CHAIN as usize];
        for x in 1..=n {
            images[x as usize - 1] = n + 1 - x;
        }
        PartialMap { n, images }
    }

    /// `1_A`, the partial identity on `A`.
    pub fn partial_identity(n: u8, set: PointSet) -> Result<Self> {
        check_chain(n as usize)?;
        if set.is_empty() {
            return Err(Error::EmptyMap);
        }
        let mut images = [0u8; MAX_CHAIN as usize];
        for x in set.iter() {
            if x > n {
                return Err(Error::PointOutOfRange { point: x as usize, n });
            }
            images[x as usize - 1] = x;
        }
        Ok(PartialMap { n, images })
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    /// Image of `x`, if `x` is in the domain.
    pub fn get(&self, x: u8) -> Option<u8> {
        if x == 0 || x > self.n {
            return None;
        }
        match self.images[x as usize - 1] {
            0 => None,
            y => Some(y),
        }
    }

    /// Assignments `(x, x f)` in increasing `x`.
    pub fn pairs(&self) -> impl Iterator<Item = (u8, u8)> + '_ {
        self.images[..self.n as usize]
            .iter()
            .enumerate()
            .filter(|(_, &y)| y != 0)
            .map(|(i, &y)| (i as u8 + 1, y))
    }

    pub fn domain(&self) -> PointSet {
        self.pairs().map(|(x, _)| x).collect()
    }

    pub fn image(&self) -> PointSet {
        self.pairs().map(|(_, y)| y).collect()
    }

    pub fn height(&self) -> usize {
        self.image().len()
    }

    pub fn is_full(&self) -> bool {
        self.images[..self.n as usize].iter().all(|&y| y != 0)
    }

    /// Left-to-right product `self · g`; `None` when no point survives.
    ///
    /// Both maps must live on the same chain (checked in debug builds; use
    /// [`compose`] for a checked version).
    #[inline]
    pub fn then(&self, g: &PartialMap) -> Option<PartialMap> {
        debug_assert_eq!(self.n, g.n);
        let mut images = [0u8; MAX_CHAIN as usize];
        let mut any = 0u8;
        let n = self.n as usize;
        for (out, &y) in images[..n].iter_mut().zip(&self.images[..n]) {
            if y != 0 {
                let z = g.images[y as usize - 1];
                *out = z;
                any |= z;
            }
        }
        (any != 0).then_some(PartialMap { n: self.n, images })
    }

    pub fn characteristics(&self) -> Characteristics {
        let domain = self.domain();
        let image = self.image();
        Characteristics {
            domain,
            image,
            height: image.len(),
            projection: (domain.len(), image.len()),
        }
    }

    /// Preimage classes, ordered by their least element.
    pub fn kernel_partition(&self) -> KernelPartition {
        let mut blocks: Vec<(u8, PointSet)> = Vec::new();
        for (x, y) in self.pairs() {
            match blocks.iter_mut().find(|(img, _)| *img == y) {
                Some((_, block)) => block.insert(x),
                None => blocks.push((y, PointSet::singleton(x))),
            }
        }
        KernelPartition {
            blocks: blocks.into_iter().map(|(_, b)| b).collect(),
        }
    }

    pub fn classify(&self) -> PropertyFlags {
        let pairs: Vec<(u8, u8)> = self.pairs().collect();
        let mut flags = PropertyFlags {
            order_preserving: true,
            order_reversing: true,
            contraction: true,
            isometry: true,
        };
        for (i, &(x, a)) in pairs.iter().enumerate() {
            for &(y, b) in &pairs[i + 1..] {
                if a > b {
                    flags.order_preserving = false;
                }
                if a < b {
                    flags.order_reversing = false;
                }
                let dy = a.abs_diff(b);
                let dx = y - x;
                if dy > dx {
                    flags.contraction = false;
                }
                if dy != dx {
                    flags.isometry = false;
                }
            }
        }
        flags
    }

    /// Injective, order-stable byte encoding: `n` followed by `x, y` pairs in
    /// domain order. Byte-wise comparison of keys is the canonical order.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut key = Vec::with_capacity(1 + 2 * self.n as usize);
        key.push(self.n);
        for (x, y) in self.pairs() {
            key.push(x);
            key.push(y);
        }
        key
    }

    pub fn from_canonical_key(key: &[u8]) -> Result<Self> {
        let (&n, rest) = key.split_first().ok_or(Error::BadKey)?;
        if rest.len() % 2 != 0 {
            return Err(Error::BadKey);
        }
        let pairs: Vec<(usize, usize)> = rest
            .chunks(2)
            .map(|c| (c[0] as usize, c[1] as usize))
            .collect();
        if pairs.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::BadKey);
        }
        PartialMap::new(n as usize, &pairs)
    }
}

/// Checked left-to-right composition.
pub fn compose(f: &PartialMap, g: &PartialMap) -> Result<Option<PartialMap>> {
    if f.n != g.n {
        return Err(Error::SizeMismatch {
            left: f.n,
            right: g.n,
        });
    }
    Ok(f.then(g))
}

impl Ord for PartialMap {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.pairs().cmp(other.pairs()))
    }
}

impl PartialOrd for PartialMap {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={};", self.n)?;
        for (i, (x, y)) in self.pairs().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}{x}->{y}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartialMap({self})")
    }
}

/// Parses the text literal `n=4; 1->2, 3->3`. Whitespace is ignored.
impl FromStr for PartialMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fail = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (head, body) = compact
            .split_once(';')
            .ok_or_else(|| fail("expected `n=<size>;`"))?;
        let n: usize = head
            .strip_prefix("n=")
            .ok_or_else(|| fail("expected `n=<size>`"))?
            .parse()
            .map_err(|_| fail("chain size is not an integer"))?;
        let mut pairs = Vec::new();
        for item in body.split(',').filter(|t| !t.is_empty()) {
            let (x, y) = item
                .split_once("->")
                .ok_or_else(|| fail("assignment must look like `x->y`"))?;
            let x = x.parse().map_err(|_| fail("bad domain point"))?;
            let y = y.parse().map_err(|_| fail("bad image point"))?;
            pairs.push((x, y));
        }
        PartialMap::new(n, &pairs)
    }
}

/// JSON interchange record `{"n": 4, "pairs": [[1,2],[3,3]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapRecord {
    pub n: usize,
    pub pairs: Vec<[usize; 2]>,
}

impl From<PartialMap> for MapRecord {
    fn from(f: PartialMap) -> Self {
        MapRecord {
            n: f.n as usize,
            pairs: f.pairs().map(|(x, y)| [x as usize, y as usize]).collect(),
        }
    }
}

impl TryFrom<MapRecord> for PartialMap {
    type Error = Error;

    fn try_from(rec: MapRecord) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = rec.pairs.iter().map(|p| (p[0], p[1])).collect();
        PartialMap::new(rec.n, &pairs)
    }
}

/// `kp(α)`: the kernel classes of a map, ordered by least element.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KernelPartition {
    pub blocks: Vec<PointSet>,
}

impl KernelPartition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Union of the blocks.
    pub fn support(&self) -> PointSet {
        self.blocks
            .iter()
            .fold(PointSet::empty(), |acc, b| acc.union(*b))
    }

    /// The partition obtained by reflecting every point `x -> n + 1 - x`.
    pub fn reflected(&self, n: u8) -> KernelPartition {
        let mut blocks: Vec<PointSet> = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|x| n + 1 - x).collect())
            .collect();
        blocks.sort_by_key(|b| b.first());
        KernelPartition { blocks }
    }
}

impl fmt::Display for KernelPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for KernelPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PropertyFlags {
    pub order_preserving: bool,
    pub order_reversing: bool,
    pub contraction: bool,
    pub isometry: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Characteristics {
    pub domain: PointSet,
    pub image: PointSet,
    /// `h(α) = |im α|`
    pub height: usize,
    /// `(|dom α|, |im α|)`
    pub projection: (usize, usize),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(s: &str) -> PartialMap {
        s.parse().unwrap()
    }

    #[test]
    fn shift_down_then_up_is_partial_identity() {
        let down = map("n=4; 2->1, 3->2, 4->3");
        let up = map("n=4; 1->2, 2->3, 3->4");
        let got = compose(&down, &up).unwrap().unwrap();
        assert_eq!(got, map("n=4; 2->2, 3->3, 4->4"));
    }

    #[test]
    fn identity_is_neutral() {
        let f = map("n=5; 1->3, 4->4, 5->4");
        let id = PartialMap::identity(5);
        assert_eq!(f.then(&id), Some(f));
        assert_eq!(id.then(&f), Some(f));
    }

    #[test]
    fn disjoint_composition_is_empty() {
        let f = map("n=3; 1->3");
        let g = map("n=3; 1->2");
        assert_eq!(compose(&f, &g).unwrap(), None);
    }

    #[test]
    fn compose_rejects_mismatched_chains() {
        let f = PartialMap::identity(3);
        let g = PartialMap::identity(4);
        assert_eq!(
            compose(&f, &g),
            Err(Error::SizeMismatch { left: 3, right: 4 })
        );
    }

    #[test]
    fn characteristics_of_merge_map() {
        let pi = map("n=4; 1->2, 2->3, 3->3, 4->4");
        let c = pi.characteristics();
        assert_eq!(c.projection, (4, 3));
        assert_eq!(c.height, 3);

        let id = PartialMap::identity(6);
        assert_eq!(id.characteristics().projection, (6, 6));

        let c = map("n=4; 1->2, 3->2").characteristics();
        assert_eq!(c.domain, PointSet::from_iter([1, 3]));
        assert_eq!(c.image, PointSet::singleton(2));
        assert_eq!((c.height, c.projection), (1, (2, 1)));
    }

    #[test]
    fn kernel_partitions() {
        let pi = map("n=4; 1->2, 2->3, 3->3, 4->4");
        let blocks: Vec<String> = pi
            .kernel_partition()
            .blocks
            .iter()
            .map(|b| b.to_string())
            .collect();
        assert_eq!(blocks, ["{1}", "{2,3}", "{4}"]);

        let inj = map("n=4; 1->4, 2->1, 4->2");
        assert!(inj.kernel_partition().blocks.iter().all(|b| b.len() == 1));

        let f = map("n=5; 1->2, 2->2, 4->3, 5->3");
        assert_eq!(
            f.kernel_partition().blocks,
            vec![PointSet::from_iter([1, 2]), PointSet::from_iter([4, 5])]
        );
    }

    #[test]
    fn kernel_of_non_monotone_map_orders_by_minimum() {
        let f = map("n=4; 1->3, 2->1, 3->3, 4->1");
        assert_eq!(
            f.kernel_partition().blocks,
            vec![PointSet::from_iter([1, 3]), PointSet::from_iter([2, 4])]
        );
    }

    #[test]
    fn classify_flags() {
        let rev = map("n=4; 1->4, 3->3, 4->2");
        let fl = rev.classify();
        assert!(fl.order_reversing && fl.contraction && !fl.order_preserving);

        let fl = PartialMap::identity(5).classify();
        assert!(fl.order_preserving && fl.contraction && fl.isometry);

        assert!(!map("n=3; 1->1, 2->3").classify().contraction);

        let fl = map("n=3; 2->1").classify();
        assert!(fl.order_preserving && fl.order_reversing && fl.contraction && fl.isometry);
    }

    #[test]
    fn convexity() {
        assert_eq!(is_convex(PointSet::from_iter([2, 3, 4]), 5), Ok(true));
        assert_eq!(is_convex(PointSet::from_iter([1, 3]), 3), Ok(false));
        assert_eq!(is_convex(PointSet::singleton(7), 7), Ok(true));
        assert_eq!(is_convex(PointSet::empty(), 3), Err(Error::EmptySet));
    }

    #[test]
    fn keys_distinguish_maps() {
        let f = map("n=4; 1->2, 3->3");
        let g = map("n=4;3->3,1->2");
        assert_eq!(f.canonical_key(), g.canonical_key());
        let h = map("n=4; 1->2, 3->4");
        assert_ne!(f.canonical_key(), h.canonical_key());
        assert_eq!(f.canonical_key(), vec![4, 1, 2, 3, 3]);
    }

    #[test]
    fn key_round_trip_exhaustive_small_chains() {
        for n in 1..=4u8 {
            let total = (n as u32 + 1).pow(n as u32);
            let mut seen = std::collections::HashSet::new();
            for code in 1..total {
                let mut c = code;
                let images: Vec<Option<u8>> = (0..n)
                    .map(|_| {
                        let v = (c % (n as u32 + 1)) as u8;
                        c /= n as u32 + 1;
                        (v != 0).then_some(v)
                    })
                    .collect();
                let f = PartialMap::from_images(&images).unwrap();
                let key = f.canonical_key();
                assert_eq!(PartialMap::from_canonical_key(&key).unwrap(), f);
                assert!(seen.insert(key));
            }
        }
    }

    #[test]
    fn text_and_json_formats() {
        let f = map(" n = 4 ;  3->3 , 1 -> 2 ");
        assert_eq!(f.to_string(), "n=4; 1->2, 3->3");
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"n":4,"pairs":[[1,2],[3,3]]}"#);
        let back: PartialMap = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert_eq!(PartialMap::new(3, &[]), Err(Error::EmptyMap));
        assert_eq!(
            PartialMap::new(3, &[(1, 4)]),
            Err(Error::PointOutOfRange { point: 4, n: 3 })
        );
        assert_eq!(
            PartialMap::new(3, &[(1, 1), (1, 2)]),
            Err(Error::DuplicateDomainPoint(1))
        );
        assert_eq!(PartialMap::new(0, &[(1, 1)]), Err(Error::ZeroChain));
        assert!("n=3 1->1".parse::<PartialMap>().is_err());
        assert!(serde_json::from_str::<PartialMap>(r#"{"n":2,"pairs":[]}"#).is_err());
    }

    #[test]
    fn canonical_order_matches_key_order() {
        let mut maps = [
            map("n=3; 2->1"),
            map("n=3; 1->1, 2->1"),
            map("n=3; 1->1"),
            map("n=3; 1->2"),
            map("n=3; 1->1, 3->1"),
        ];
        maps.sort();
        let keys: Vec<Vec<u8>> = maps.iter().map(|m| m.canonical_key()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }
}
