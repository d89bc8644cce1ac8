//! Starred Green's relations on sets of partial contractions.
//!
//! In `CP_n`, `ORCP_n` and `OCP_n` the relation `L*` is equality of images,
//! `R*` is equality of kernels, `H*` is both, and `D*` is equality of heights.
//! [`classify`] groups by those keys. [`lstar_oracle`] and [`rstar_oracle`]
//! decide the relations from their internal definition instead, so the two
//! routes can be compared.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::chain::{KernelPartition, PartialMap, PointSet};
use crate::closure::common_chain;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    LStar,
    RStar,
    HStar,
    DStar,
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lstar" | "l*" => Ok(Relation::LStar),
            "rstar" | "r*" => Ok(Relation::RStar),
            "hstar" | "h*" => Ok(Relation::HStar),
            "dstar" | "d*" => Ok(Relation::DStar),
            _ => Err(Error::Parse {
                input: s.to_string(),
                reason: "expected lstar, rstar, hstar or dstar".into(),
            }),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::LStar => "lstar",
            Relation::RStar => "rstar",
            Relation::HStar => "hstar",
            Relation::DStar => "dstar",
        })
    }
}

/// Classes of each relation; every class is in canonical order and classes
/// are ordered by their key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreenStarPartition {
    pub elements: Vec<PartialMap>,
    pub lstar: Vec<Vec<PartialMap>>,
    pub rstar: Vec<Vec<PartialMap>>,
    pub hstar: Vec<Vec<PartialMap>>,
    pub dstar: Vec<Vec<PartialMap>>,
}

impl GreenStarPartition {
    pub fn classes(&self, relation: Relation) -> &[Vec<PartialMap>] {
        match relation {
            Relation::LStar => &self.lstar,
            Relation::RStar => &self.rstar,
            Relation::HStar => &self.hstar,
            Relation::DStar => &self.dstar,
        }
    }
}

fn group_by<K: Ord>(elements: &[PartialMap], key: impl Fn(&PartialMap) -> K) -> Vec<Vec<PartialMap>> {
    let mut groups: BTreeMap<K, Vec<PartialMap>> = BTreeMap::new();
    for e in elements {
        groups.entry(key(e)).or_default().push(*e);
    }
    groups.into_values().collect()
}

pub fn classify(elements: &[PartialMap]) -> Result<GreenStarPartition> {
    common_chain(elements)?;
    let mut elements = elements.to_vec();
    elements.sort();
    elements.dedup();
    let image = |e: &PartialMap| e.image();
    let kernel = |e: &PartialMap| e.kernel_partition();
    let both = |e: &PartialMap| -> (KernelPartition, PointSet) { (e.kernel_partition(), e.image()) };
    Ok(GreenStarPartition {
        lstar: group_by(&elements, image),
        rstar: group_by(&elements, kernel),
        hstar: group_by(&elements, both),
        dstar: group_by(&elements, |e| e.height()),
        elements,
    })
}

/// A semigroup given by its elements, with the adjoined identity used by the
/// oracles.
pub struct OracleSemigroup {
    elements: Vec<PartialMap>,
    members: HashSet<PartialMap>,
}

impl OracleSemigroup {
    /// `elements` must be closed under composition (up to empty products).
    pub fn new(elements: &[PartialMap]) -> Result<Self> {
        common_chain(elements)?;
        let members: HashSet<PartialMap> = elements.iter().copied().collect();
        for a in elements {
            for b in elements {
                if let Some(p) = a.then(b) {
                    if !members.contains(&p) {
                        return Err(Error::NotAMember(format!("{p} (product of {a} and {b})")));
                    }
                }
            }
        }
        let mut elements = elements.to_vec();
        elements.sort();
        elements.dedup();
        Ok(OracleSemigroup { elements, members })
    }

    fn check(&self, a: &PartialMap) -> Result<()> {
        if self.members.contains(a) {
            Ok(())
        } else {
            Err(Error::NotAMember(a.to_string()))
        }
    }

    /// `S¹`: the elements plus an adjoined identity (`None`).
    fn with_identity(&self) -> impl Iterator<Item = Option<&PartialMap>> + Clone {
        std::iter::once(None).chain(self.elements.iter().map(Some))
    }
}

/// Product in `S¹ ∪ {empty}`: `None` on the right is the adjoined identity;
/// an empty composition is its own value.
fn right_mul(a: &PartialMap, x: Option<&PartialMap>) -> Option<PartialMap> {
    match x {
        None => Some(*a),
        Some(x) => a.then(x),
    }
}

fn left_mul(x: Option<&PartialMap>, a: &PartialMap) -> Option<PartialMap> {
    match x {
        None => Some(*a),
        Some(x) => x.then(a),
    }
}

/// `a L* b` iff for all `x, y` in `S¹`: `ax = ay ⇔ bx = by`.
pub fn lstar_oracle(s: &OracleSemigroup, a: &PartialMap, b: &PartialMap) -> Result<bool> {
    s.check(a)?;
    s.check(b)?;
    let s1 = s.with_identity();
    for x in s1.clone() {
        let (ax, bx) = (right_mul(a, x), right_mul(b, x));
        for y in s1.clone() {
            if (ax == right_mul(a, y)) != (bx == right_mul(b, y)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `a R* b` iff for all `x, y` in `S¹`: `xa = ya ⇔ xb = yb`.
pub fn rstar_oracle(s: &OracleSemigroup, a: &PartialMap, b: &PartialMap) -> Result<bool> {
    s.check(a)?;
    s.check(b)?;
    let s1 = s.with_identity();
    for x in s1.clone() {
        let (xa, xb) = (left_mul(x, a), left_mul(x, b));
        for y in s1.clone() {
            if (xa == left_mul(y, a)) != (xb == left_mul(y, b)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{enumerate, Family, FamilySpec};

    #[test]
    fn top_level_kernel_counts() {
        let k3 = enumerate(&FamilySpec::exact(Family::OCP, 4, 3)).unwrap();
        assert_eq!(classify(&k3).unwrap().rstar.len(), 7);
        let w3 = enumerate(&FamilySpec::exact(Family::ORCP, 4, 3)).unwrap();
        assert_eq!(classify(&w3).unwrap().rstar.len(), 7);
    }

    #[test]
    fn singleton_set() {
        let p = classify(&[PartialMap::identity(3)]).unwrap();
        for r in [Relation::LStar, Relation::RStar, Relation::HStar, Relation::DStar] {
            assert_eq!(p.classes(r).len(), 1);
        }
    }

    #[test]
    fn refinement() {
        let all = enumerate(&FamilySpec::new(Family::ORCP, 4)).unwrap();
        let p = classify(&all).unwrap();
        let class_of = |classes: &[Vec<PartialMap>], e: &PartialMap| {
            classes.iter().position(|c| c.contains(e)).unwrap()
        };
        for h in &p.hstar {
            for e in h {
                assert_eq!(class_of(&p.lstar, e), class_of(&p.lstar, &h[0]));
                assert_eq!(class_of(&p.rstar, e), class_of(&p.rstar, &h[0]));
                assert_eq!(class_of(&p.dstar, e), class_of(&p.dstar, &h[0]));
            }
        }
        assert_eq!(p.dstar.len(), 4);
    }

    #[test]
    fn oracle_reflexive_and_membership_checked() {
        let all = enumerate(&FamilySpec::new(Family::OCP, 3)).unwrap();
        let s = OracleSemigroup::new(&all).unwrap();
        for a in &all {
            assert!(lstar_oracle(&s, a, a).unwrap());
            assert!(rstar_oracle(&s, a, a).unwrap());
        }
        let outsider: PartialMap = "n=3; 1->3, 2->1".parse().unwrap();
        assert!(lstar_oracle(&s, &outsider, &all[0]).is_err());
    }

    #[test]
    fn oracle_needs_closed_set() {
        let top = enumerate(&FamilySpec::exact(Family::OCP, 3, 2)).unwrap();
        assert!(OracleSemigroup::new(&top).is_err());
    }

    #[test]
    fn relation_names() {
        assert_eq!("rstar".parse::<Relation>().unwrap(), Relation::RStar);
        assert!("jstar".parse::<Relation>().is_err());
    }
}
