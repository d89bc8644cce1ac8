//! Exhaustive enumeration of the map families and their height levels.
//!
//! Members are produced by a depth-first walk over assignment lists
//! `(x1, y1), (x2, y2), ...` with strictly increasing domain points. Every
//! defining predicate is pairwise, so an invalid prefix prunes its whole
//! subtree, and the preorder of the walk is exactly the canonical-key order.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::chain::{PartialMap, MAX_CHAIN};
use crate::error::{Error, Result};

/// Default upper bound on `n` for enumeration.
pub const ENUMERATION_GUARD: u8 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// All partial maps.
    P,
    /// Partial contractions.
    CP,
    /// Order-preserving partial contractions.
    OCP,
    /// Order-preserving or order-reversing partial contractions.
    ORCP,
    /// Order-preserving full contractions.
    OCT,
    /// Order-preserving or order-reversing full contractions.
    ORCT,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::P,
        Family::CP,
        Family::OCP,
        Family::ORCP,
        Family::OCT,
        Family::ORCT,
    ];

    fn needs_contraction(self) -> bool {
        self != Family::P
    }

    fn needs_full_domain(self) -> bool {
        matches!(self, Family::OCT | Family::ORCT)
    }

    fn allows_reversing(self) -> bool {
        matches!(self, Family::ORCP | Family::ORCT)
    }

    fn needs_monotone(self) -> bool {
        !matches!(self, Family::P | Family::CP)
    }

    pub fn contains(self, f: &PartialMap) -> bool {
        let flags = f.classify();
        if self.needs_contraction() && !flags.contraction {
            return false;
        }
        if self.needs_full_domain() && !f.is_full() {
            return false;
        }
        if self.needs_monotone() {
            return flags.order_preserving || (self.allows_reversing() && flags.order_reversing);
        }
        true
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::P => "P",
            Family::CP => "CP",
            Family::OCP => "OCP",
            Family::ORCP => "ORCP",
            Family::OCT => "OCT",
            Family::ORCT => "ORCT",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse {
                input: s.to_string(),
                reason: "unknown family (expected p, cp, ocp, orcp, oct or orct)".into(),
            })
    }
}

/// Height filter on a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    All,
    /// Height exactly `p` (`K_p`, `W_p`).
    Exact(u8),
    /// Height at most `p` (`OCP_{n,p}`, `ORCP_{n,p}`).
    Ideal(u8),
}

impl Level {
    fn admits(self, height: usize) -> bool {
        match self {
            Level::All => true,
            Level::Exact(p) => height == p as usize,
            Level::Ideal(p) => height <= p as usize,
        }
    }

    fn cap(self) -> Option<usize> {
        match self {
            Level::All => None,
            Level::Exact(p) | Level::Ideal(p) => Some(p as usize),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::All => f.write_str("all"),
            Level::Exact(p) => write!(f, "height={p}"),
            Level::Ideal(p) => write!(f, "height<={p}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    pub n: u8,
    pub level: Level,
}

impl FamilySpec {
    pub fn new(family: Family, n: u8) -> Self {
        FamilySpec {
            family,
            n,
            level: Level::All,
        }
    }

    pub fn exact(family: Family, n: u8, p: u8) -> Self {
        FamilySpec {
            family,
            n,
            level: Level::Exact(p),
        }
    }

    pub fn ideal(family: Family, n: u8, p: u8) -> Self {
        FamilySpec {
            family,
            n,
            level: Level::Ideal(p),
        }
    }

    pub fn contains(&self, f: &PartialMap) -> bool {
        f.n() == self.n && self.level.admits(f.height()) && self.family.contains(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::ZeroChain);
        }
        if self.n > MAX_CHAIN {
            return Err(Error::ChainTooLarge {
                n: self.n as usize,
                max: MAX_CHAIN,
            });
        }
        if let Some(p) = self.level.cap() {
            if p == 0 || p > self.n as usize {
                return Err(Error::Index(format!(
                    "height {p} is outside 1..={}",
                    self.n
                )));
            }
        }
        Ok(())
    }

    /// Members in canonical order, subject to [`ENUMERATION_GUARD`].
    pub fn iter(&self) -> Result<FamilyIter> {
        if self.n > ENUMERATION_GUARD {
            self.validate()?;
            return Err(Error::ResourceGuard {
                what: "enumeration",
                n: self.n,
                limit: ENUMERATION_GUARD,
            });
        }
        self.iter_unguarded()
    }

    /// Members in canonical order, without the size guard.
    pub fn iter_unguarded(&self) -> Result<FamilyIter> {
        self.validate()?;
        Ok(FamilyIter::new(*self))
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.family, self.n)?;
        if self.level != Level::All {
            write!(f, "[{}]", self.level)?;
        }
        Ok(())
    }
}

/// All members of `spec`, in canonical order.
pub fn enumerate(spec: &FamilySpec) -> Result<Vec<PartialMap>> {
    Ok(spec.iter()?.collect())
}

/// Number of members of `spec`. Results are cached per spec.
pub fn count(spec: &FamilySpec) -> Result<usize> {
    static CACHE: OnceLock<Mutex<HashMap<FamilySpec, usize>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(&c) = cache.lock().unwrap().get(spec) {
        return Ok(c);
    }
    let c = spec.iter()?.count();
    cache.lock().unwrap().insert(*spec, c);
    Ok(c)
}

#[derive(Debug, Clone, Copy)]
struct Frame {
    x: u8,
    y: u8,
    preserving: bool,
    reversing: bool,
    height: usize,
}

/// Depth-first iterator over a family's members.
#[derive(Debug, Clone)]
pub struct FamilyIter {
    spec: FamilySpec,
    stack: Vec<Frame>,
    done: bool,
}

impl FamilyIter {
    fn new(spec: FamilySpec) -> Self {
        FamilyIter {
            spec,
            stack: Vec::with_capacity(spec.n as usize),
            done: false,
        }
    }

    /// Frame for appending `(x, y)` to the current stack, if the extended
    /// prefix can still belong to the family.
    fn extend(&self, x: u8, y: u8) -> Option<Frame> {
        let family = self.spec.family;
        let (mut preserving, mut reversing) = (true, true);
        let mut height = 1;
        if let Some(last) = self.stack.last() {
            preserving = last.preserving && y >= last.y;
            reversing = last.reversing && y <= last.y;
            height = last.height + usize::from(self.stack.iter().all(|f| f.y != y));
        }
        if family.needs_monotone() && !(preserving || (family.allows_reversing() && reversing)) {
            return None;
        }
        if family.needs_contraction() && self.stack.iter().any(|f| f.y.abs_diff(y) > x - f.x) {
            return None;
        }
        if self.spec.level.cap().is_some_and(|p| height > p) {
            return None;
        }
        Some(Frame {
            x,
            y,
            preserving,
            reversing,
            height,
        })
    }

    /// First valid `(x, y)` at or after `(from_x, from_y)` at the current depth.
    fn seek(&self, from_x: u8, from_y: u8) -> Option<Frame> {
        let n = self.spec.n;
        let last_x = if self.spec.family.needs_full_domain() {
            from_x
        } else {
            n
        };
        for x in from_x..=last_x.min(n) {
            let start = if x == from_x { from_y } else { 1 };
            for y in start..=n {
                if let Some(frame) = self.extend(x, y) {
                    return Some(frame);
                }
            }
        }
        None
    }

    fn advance(&mut self) -> bool {
        let child_x = self.stack.last().map_or(1, |f| f.x + 1);
        if child_x <= self.spec.n {
            if let Some(frame) = self.seek(child_x, 1) {
                self.stack.push(frame);
                return true;
            }
        }
        while let Some(top) = self.stack.pop() {
            if let Some(frame) = self.seek(top.x, top.y + 1) {
                self.stack.push(frame);
                return true;
            }
        }
        false
    }

    fn emittable(&self) -> bool {
        let top = self.stack.last().expect("nonempty after advance");
        (!self.spec.family.needs_full_domain() || self.stack.len() == self.spec.n as usize)
            && self.spec.level.admits(top.height)
    }

    fn current(&self) -> PartialMap {
        let mut images = [0u8; MAX_CHAIN as usize];
        for f in &self.stack {
            images[f.x as usize - 1] = f.y;
        }
        PartialMap::from_raw(self.spec.n, images)
    }
}

impl Iterator for FamilyIter {
    type Item = PartialMap;

    fn next(&mut self) -> Option<PartialMap> {
        while !self.done {
            if !self.advance() {
                self.done = true;
                break;
            }
            if self.emittable() {
                return Some(self.current());
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle: filter every nonempty partial map on [n].
    fn brute(spec: &FamilySpec) -> Vec<PartialMap> {
        let n = spec.n as u32;
        let mut out = Vec::new();
        for code in 1..(n + 1).pow(n) {
            let mut c = code;
            let images: Vec<Option<u8>> = (0..n)
                .map(|_| {
                    let v = (c % (n + 1)) as u8;
                    c /= n + 1;
                    (v != 0).then_some(v)
                })
                .collect();
            let f = PartialMap::from_images(&images).unwrap();
            if spec.contains(&f) {
                out.push(f);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn matches_brute_force_filter() {
        for n in 1..=4 {
            for family in Family::ALL {
                let mut specs = vec![FamilySpec::new(family, n)];
                for p in 1..=n {
                    specs.push(FamilySpec::exact(family, n, p));
                    specs.push(FamilySpec::ideal(family, n, p));
                }
                for spec in specs {
                    assert_eq!(enumerate(&spec).unwrap(), brute(&spec), "{spec}");
                }
            }
        }
    }

    #[test]
    fn stream_is_strictly_increasing_in_key_order() {
        let all = enumerate(&FamilySpec::new(Family::ORCP, 5)).unwrap();
        assert!(all
            .windows(2)
            .all(|w| w[0].canonical_key() < w[1].canonical_key()));
    }

    #[test]
    fn single_point_chain() {
        let all = enumerate(&FamilySpec::new(Family::OCP, 1)).unwrap();
        assert_eq!(all, vec![PartialMap::identity(1)]);
    }

    #[test]
    fn top_levels() {
        let k3 = enumerate(&FamilySpec::exact(Family::OCP, 3, 3)).unwrap();
        assert_eq!(k3, vec![PartialMap::identity(3)]);
        let w3 = enumerate(&FamilySpec::exact(Family::ORCP, 3, 3)).unwrap();
        assert_eq!(w3, vec![PartialMap::identity(3), PartialMap::reversal(3)]);
        assert_eq!(count(&FamilySpec::exact(Family::OCT, 3, 3)).unwrap(), 1);
    }

    #[test]
    fn small_counts_against_oracle() {
        // Nonempty partial maps on [2]: 8. Order-preserving contractions drop
        // only 1->2, 2->1.
        let spec = FamilySpec::new(Family::OCP, 2);
        assert_eq!(count(&spec).unwrap(), brute(&spec).len());
        assert_eq!(count(&spec).unwrap(), 7);
        assert_eq!(count(&FamilySpec::new(Family::P, 2)).unwrap(), 8);
        // Frozen from the brute-force filter.
        assert_eq!(count(&FamilySpec::exact(Family::OCP, 3, 2)).unwrap(), 11);
        assert_eq!(count(&FamilySpec::new(Family::OCP, 4)).unwrap(), 139);
        assert_eq!(count(&FamilySpec::new(Family::ORCP, 5)).unwrap(), 963);
        assert_eq!(count(&FamilySpec::exact(Family::ORCP, 4, 3)).unwrap(), 32);
    }

    #[test]
    fn guard_and_validation() {
        let spec = FamilySpec::new(Family::OCP, 9);
        assert!(matches!(spec.iter(), Err(Error::ResourceGuard { .. })));
        assert!(spec.iter_unguarded().is_ok());
        assert!(matches!(
            FamilySpec::exact(Family::OCP, 3, 4).iter(),
            Err(Error::Index(_))
        ));
        assert_eq!(FamilySpec::new(Family::OCP, 0).iter().err(), Some(Error::ZeroChain));
    }

    #[test]
    fn family_names_parse() {
        assert_eq!("orcp".parse::<Family>().unwrap(), Family::ORCP);
        assert_eq!("OCT".parse::<Family>().unwrap(), Family::OCT);
        assert!("xyz".parse::<Family>().is_err());
    }
}
