//! Splitting a map of height `p <= n-2` into two maps of height `p+1`.
//!
//! For a map `α` with kernel blocks `A_1 < ... < A_p` and images `b_1..b_p`:
//!
//! * **Case II** (image not convex): at the least gap `|b_{i+1} - b_i| >= 2`
//!   the blocks are at least two apart as well, so `β` adds the point
//!   `max A_i + 1` with an image one step from `b_i` towards `b_{i+1}`. Then
//!   `γ` is the partial identity on `im α ∪ {x}`, with `x` the least point
//!   outside `im β`. `γ` must leave out the new image point, or `βγ` would
//!   not drop `max A_i + 1` again.
//! * **Case I** (image convex, domain partial): with `c` the least point
//!   outside the domain, `β` sends the blocks, with `c` slotted in at its
//!   place, onto `p + 1` consecutive points. When `c` falls inside a block,
//!   the block is split at `c` instead. `γ` sends those slots back onto
//!   `b_1..b_p` and adds one more point on whichever end of the image still
//!   has room. The slot holding `c` is left out of `γ`'s domain.
//! * **Full domain**: a bounded search over splits of one kernel block.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::chain::{PartialMap, PointSet, MAX_CHAIN};
use crate::enumeration::Family;
use crate::error::{Error, Result};

/// Which construction produced a factor pair.
///
/// `Op5`..`Op12` follow the eight order-preserving Case I constructions in
/// the order: `c` before the first block, between blocks, inside a block,
/// after the last block, each split by `b_p < n` / `b_p = n`. The
/// order-reversing constructions use the same positions split by
/// `p < k` / `p = k`, where `k` is the largest image point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Op5,
    Op6,
    Op7,
    Op8,
    Op9,
    Op10,
    Op11,
    Op12,
    OpCaseII,
    RevN1,
    RevN2,
    RevN3,
    RevN4,
    RevN31,
    RevN41,
    RevN5,
    RevN6,
    RevCaseII,
    FullFallback,
}

impl Branch {
    pub const ALL: [Branch; 19] = [
        Branch::Op5,
        Branch::Op6,
        Branch::Op7,
        Branch::Op8,
        Branch::Op9,
        Branch::Op10,
        Branch::Op11,
        Branch::Op12,
        Branch::OpCaseII,
        Branch::RevN1,
        Branch::RevN2,
        Branch::RevN3,
        Branch::RevN4,
        Branch::RevN31,
        Branch::RevN41,
        Branch::RevN5,
        Branch::RevN6,
        Branch::RevCaseII,
        Branch::FullFallback,
    ];

    /// Branches reachable for inputs from `family`.
    pub fn reachable(family: Family) -> Vec<Branch> {
        Branch::ALL
            .into_iter()
            .filter(|b| family == Family::ORCP || !b.is_reversing())
            .collect()
    }

    pub fn is_reversing(self) -> bool {
        matches!(
            self,
            Branch::RevN1
                | Branch::RevN2
                | Branch::RevN3
                | Branch::RevN4
                | Branch::RevN31
                | Branch::RevN41
                | Branch::RevN5
                | Branch::RevN6
                | Branch::RevCaseII
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            Branch::Op5 => "OP-(5)",
            Branch::Op6 => "OP-(6)",
            Branch::Op7 => "OP-(7)",
            Branch::Op8 => "OP-(8)",
            Branch::Op9 => "OP-(9)",
            Branch::Op10 => "OP-(10)",
            Branch::Op11 => "OP-(11)",
            Branch::Op12 => "OP-(12)",
            Branch::OpCaseII => "OP-CaseII",
            Branch::RevN1 => "REV-(n1)",
            Branch::RevN2 => "REV-(n2)",
            Branch::RevN3 => "REV-(n3)",
            Branch::RevN4 => "REV-(n4)",
            Branch::RevN31 => "REV-(n31)",
            Branch::RevN41 => "REV-(n41)",
            Branch::RevN5 => "REV-(n5)",
            Branch::RevN6 => "REV-(n6)",
            Branch::RevCaseII => "REV-CaseII",
            Branch::FullFallback => "FULL-fallback",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for Branch {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FactorPair {
    pub beta: PartialMap,
    pub gamma: PartialMap,
    pub branch: Branch,
}

impl FactorPair {
    pub fn product(&self) -> Option<PartialMap> {
        self.beta.then(&self.gamma)
    }
}

/// Where the least missing domain point sits relative to the kernel blocks.
/// Block indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gap {
    Before,
    Between(usize),
    Inside(usize),
    After,
}

pub fn locate(c: u8, blocks: &[PointSet]) -> Gap {
    let first = blocks[0].first().expect("blocks are nonempty");
    if c < first {
        return Gap::Before;
    }
    for (j, b) in blocks.iter().enumerate() {
        let (lo, hi) = (b.first().unwrap(), b.last().unwrap());
        if lo < c && c < hi {
            return Gap::Inside(j + 1);
        }
        if let Some(next) = blocks.get(j + 1) {
            if hi < c && c < next.first().unwrap() {
                return Gap::Between(j + 1);
            }
        }
    }
    Gap::After
}

struct Builder {
    n: u8,
    images: [u8; MAX_CHAIN as usize],
}

impl Builder {
    fn new(n: u8) -> Self {
        Builder {
            n,
            images: [0; MAX_CHAIN as usize],
        }
    }

    fn set(&mut self, points: PointSet, y: u8) {
        for x in points.iter() {
            self.images[x as usize - 1] = y;
        }
    }

    fn build(self) -> PartialMap {
        PartialMap::from_raw(self.n, self.images)
    }
}

fn check_family(family: Family) -> Result<()> {
    match family {
        Family::OCP | Family::ORCP => Ok(()),
        other => Err(Error::UnsupportedTarget(format!(
            "factorization is defined for OCP and ORCP, not {other}"
        ))),
    }
}

fn check_input(alpha: &PartialMap, family: Family) -> Result<usize> {
    check_family(family)?;
    if !family.contains(alpha) {
        return Err(Error::NotInFamily {
            map: alpha.to_string(),
            family,
        });
    }
    let n = alpha.n();
    let p = alpha.height();
    let max = (n as usize).saturating_sub(2);
    if p < 1 || p > max {
        return Err(Error::HeightOutOfRange { height: p, max, n });
    }
    Ok(p)
}

/// Factors `alpha` (height `1..=n-2`) as `β · γ` with both factors of
/// height one more, inside the same family.
pub fn factor_step(alpha: &PartialMap, family: Family) -> Result<FactorPair> {
    let p = check_input(alpha, family)?;
    if alpha.is_full() {
        return factor_full(alpha, family);
    }
    let n = alpha.n();
    let blocks = alpha.kernel_partition().blocks;
    let images: Vec<u8> = blocks
        .iter()
        .map(|b| alpha.get(b.first().unwrap()).unwrap())
        .collect();
    let preserving = alpha.classify().order_preserving;
    let step: i16 = if preserving { 1 } else { -1 };

    // Case II: image has a hole.
    if let Some(i) = (0..p - 1).find(|&i| images[i].abs_diff(images[i + 1]) >= 2) {
        let inserted = blocks[i].last().unwrap() + 1;
        let mut beta = Builder::new(n);
        for (b, &y) in blocks.iter().zip(&images) {
            beta.set(*b, y);
        }
        beta.set(
            PointSet::singleton(inserted),
            (images[i] as i16 + step) as u8,
        );
        let beta = beta.build();
        let outside = PointSet::full(n).difference(beta.image());
        let x = outside.first().expect("height of beta is at most n-1");
        let gamma = PartialMap::partial_identity(n, alpha.image().with(x))?;
        let branch = if preserving {
            Branch::OpCaseII
        } else {
            Branch::RevCaseII
        };
        return Ok(FactorPair {
            beta,
            gamma,
            branch,
        });
    }

    // Case I: image convex, some point missing from the domain.
    let c = PointSet::full(n)
        .difference(alpha.domain())
        .first()
        .expect("domain is partial");
    let gap = locate(c, &blocks);
    let (first, last) = (images[0], images[p - 1]);
    // Room above (preserving) or below (reversing) the image decides whether
    // the extra image point goes after the last slot or before the first.
    let room_at_end = if preserving {
        last < n
    } else {
        // image = {k-p+1, ..., k} with k = first; room below iff p < k.
        (p as u8) < first
    };
    let offset: u8 = if room_at_end { 0 } else { 1 };

    let mut beta = Builder::new(n);
    let mut gamma = Builder::new(n);
    let mut slot = 1 + offset;
    let place = |beta: &mut Builder, points: PointSet, slot: &mut u8| {
        beta.set(points, *slot);
        *slot += 1;
        *slot - 1
    };
    if gap == Gap::Before {
        place(&mut beta, PointSet::singleton(c), &mut slot);
    }
    for (j, (block, &y)) in blocks.iter().zip(&images).enumerate() {
        let idx = j + 1;
        if gap == Gap::Inside(idx) {
            let lower: PointSet = block.iter().filter(|&a| a < c).collect();
            let upper = block.difference(lower);
            let s1 = place(&mut beta, lower, &mut slot);
            let s2 = place(&mut beta, upper, &mut slot);
            gamma.set(PointSet::from_iter([s1, s2]), y);
        } else {
            let s = place(&mut beta, *block, &mut slot);
            gamma.set(PointSet::singleton(s), y);
        }
        if gap == Gap::Between(idx) {
            place(&mut beta, PointSet::singleton(c), &mut slot);
        }
    }
    if gap == Gap::After {
        place(&mut beta, PointSet::singleton(c), &mut slot);
    }
    if room_at_end {
        gamma.set(
            PointSet::singleton(p as u8 + 2),
            (last as i16 + step) as u8,
        );
    } else {
        gamma.set(PointSet::singleton(1), (first as i16 - step) as u8);
    }

    let branch = match (preserving, gap, room_at_end) {
        (true, Gap::Before, true) => Branch::Op5,
        (true, Gap::Before, false) => Branch::Op6,
        (true, Gap::Between(_), true) => Branch::Op7,
        (true, Gap::Between(_), false) => Branch::Op8,
        (true, Gap::Inside(_), true) => Branch::Op9,
        (true, Gap::Inside(_), false) => Branch::Op10,
        (true, Gap::After, true) => Branch::Op11,
        (true, Gap::After, false) => Branch::Op12,
        (false, Gap::Before, true) => Branch::RevN1,
        (false, Gap::Before, false) => Branch::RevN2,
        (false, Gap::Between(_), true) => Branch::RevN3,
        (false, Gap::Between(_), false) => Branch::RevN4,
        (false, Gap::Inside(_), true) => Branch::RevN31,
        (false, Gap::Inside(_), false) => Branch::RevN41,
        (false, Gap::After, true) => Branch::RevN5,
        (false, Gap::After, false) => Branch::RevN6,
    };
    Ok(FactorPair {
        beta: beta.build(),
        gamma: gamma.build(),
        branch,
    })
}

/// Factor pair for a full-domain map by bounded search.
///
/// `β` ranges over the full maps of the family whose kernel splits one block
/// of `ker α` in two (their images are then `p + 1` consecutive points);
/// `γ` is forced on `im β` and gets one extra assignment `y -> z` with
/// `y ∉ im β`, `z ∉ im α`. The first valid pair in canonical order of
/// `(β, y, z)` is returned.
pub fn factor_full(alpha: &PartialMap, family: Family) -> Result<FactorPair> {
    check_family(family)?;
    if !alpha.is_full() {
        return Err(Error::NotFullDomain);
    }
    let p = check_input(alpha, family)?;
    let n = alpha.n();
    let blocks = alpha.kernel_partition().blocks;

    let mut betas: Vec<PartialMap> = Vec::new();
    for (j, block) in blocks.iter().enumerate() {
        let points: Vec<u8> = block.iter().collect();
        for cut in 1..points.len() {
            let mut split = blocks.clone();
            split[j] = points[..cut].iter().copied().collect();
            split.insert(j + 1, points[cut..].iter().copied().collect());
            for start in 1..=n {
                for reversed in [false, true] {
                    if reversed && family != Family::ORCP {
                        continue;
                    }
                    let values: Option<Vec<u8>> = (0..=p as u8)
                        .map(|d| {
                            if reversed {
                                start.checked_sub(d).filter(|&v| v >= 1)
                            } else {
                                Some(start + d).filter(|&v| v <= n)
                            }
                        })
                        .collect();
                    if let Some(values) = values {
                        let mut b = Builder::new(n);
                        for (blk, v) in split.iter().zip(values) {
                            b.set(*blk, v);
                        }
                        betas.push(b.build());
                    }
                }
            }
        }
    }
    betas.sort();
    betas.dedup();

    for beta in betas {
        if !family.contains(&beta) {
            continue;
        }
        let mut base = Builder::new(n);
        for (x, y) in beta.pairs() {
            base.set(PointSet::singleton(y), alpha.get(x).unwrap());
        }
        let outside_beta = PointSet::full(n).difference(beta.image());
        let outside_alpha = PointSet::full(n).difference(alpha.image());
        for y in outside_beta.iter() {
            for z in outside_alpha.iter() {
                let mut images = base.images;
                images[y as usize - 1] = z;
                let gamma = PartialMap::from_raw(n, images);
                if gamma.height() == p + 1 && family.contains(&gamma) {
                    return Ok(FactorPair {
                        beta,
                        gamma,
                        branch: Branch::FullFallback,
                    });
                }
            }
        }
    }
    Err(Error::SearchExhausted(alpha.to_string()))
}

/// Writes `alpha` (height `1..=n-1`) as a product of height `n-1` maps,
/// listed left to right.
pub fn factor_to_top(alpha: &PartialMap, family: Family) -> Result<Vec<PartialMap>> {
    check_family(family)?;
    let n = alpha.n() as usize;
    let h = alpha.height();
    if n >= 2 && h == n - 1 {
        if !family.contains(alpha) {
            return Err(Error::NotInFamily {
                map: alpha.to_string(),
                family,
            });
        }
        return Ok(vec![*alpha]);
    }
    let pair = factor_step(alpha, family)?;
    let mut out = factor_to_top(&pair.beta, family)?;
    out.extend(factor_to_top(&pair.gamma, family)?);
    Ok(out)
}

/// Left-to-right product of a nonempty list.
pub fn product(maps: &[PartialMap]) -> Option<PartialMap> {
    let (first, rest) = maps.split_first()?;
    rest.iter().try_fold(*first, |acc, m| acc.then(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(s: &str) -> PartialMap {
        s.parse().unwrap()
    }

    #[test]
    fn before_first_block_with_room() {
        let alpha = map("n=4; 2->2, 3->3");
        let pair = factor_step(&alpha, Family::OCP).unwrap();
        assert_eq!(pair.branch, Branch::Op5);
        assert_eq!(pair.beta, map("n=4; 1->1, 2->2, 3->3"));
        assert_eq!(pair.gamma, map("n=4; 2->2, 3->3, 4->4"));
        assert_eq!(pair.product(), Some(alpha));
    }

    #[test]
    fn reversing_with_room_below() {
        // c = 3 after the last block; p = 2 < k = 4.
        let alpha = map("n=4; 1->4, 2->3");
        let pair = factor_step(&alpha, Family::ORCP).unwrap();
        assert_eq!(pair.branch, Branch::RevN5);
        assert_eq!(pair.beta, map("n=4; 1->1, 2->2, 3->3"));
        assert_eq!(pair.gamma, map("n=4; 1->4, 2->3, 4->2"));
        assert_eq!(pair.product(), Some(alpha));
    }

    #[test]
    fn case_two_drops_the_inserted_point() {
        let alpha = map("n=4; 1->1, 4->3");
        let pair = factor_step(&alpha, Family::OCP).unwrap();
        assert_eq!(pair.branch, Branch::OpCaseII);
        assert_eq!(pair.beta, map("n=4; 1->1, 2->2, 4->3"));
        assert_eq!(pair.gamma, map("n=4; 1->1, 3->3, 4->4"));
        assert_eq!(pair.product(), Some(alpha));
    }

    #[test]
    fn inside_a_block() {
        // block {1,3} with 2 missing
        let alpha = map("n=4; 1->2, 3->2");
        let pair = factor_step(&alpha, Family::OCP).unwrap();
        assert_eq!(pair.branch, Branch::Op9);
        assert_eq!(pair.beta, map("n=4; 1->1, 3->2"));
        assert_eq!(pair.gamma, map("n=4; 1->2, 2->2, 3->3"));
        assert_eq!(pair.product(), Some(alpha));
    }

    #[test]
    fn full_domain_examples() {
        let alpha = map("n=3; 1->1, 2->1, 3->1");
        let pair = factor_step(&alpha, Family::OCP).unwrap();
        assert_eq!(pair.branch, Branch::FullFallback);
        assert_eq!(pair.product(), Some(alpha));
        assert_eq!((pair.beta.height(), pair.gamma.height()), (2, 2));

        let alpha = map("n=4; 1->2, 2->2, 3->3, 4->3");
        let pair = factor_full(&alpha, Family::OCP).unwrap();
        assert_eq!(pair.product(), Some(alpha));
        assert_eq!((pair.beta.height(), pair.gamma.height()), (3, 3));
        assert!(pair.beta.is_full());
    }

    #[test]
    fn precondition_errors() {
        assert_eq!(
            factor_full(&map("n=4; 1->1, 2->1"), Family::OCP),
            Err(Error::NotFullDomain)
        );
        assert!(matches!(
            factor_step(&map("n=4; 1->1, 2->2, 3->3"), Family::OCP),
            Err(Error::HeightOutOfRange { height: 3, max: 2, n: 4 })
        ));
        assert!(matches!(
            factor_step(&map("n=4; 1->2, 2->1"), Family::OCP),
            Err(Error::NotInFamily { .. })
        ));
        assert!(matches!(
            factor_step(&map("n=4; 1->1"), Family::CP),
            Err(Error::UnsupportedTarget(_))
        ));
    }

    #[test]
    fn to_top_lists() {
        let alpha = map("n=4; 1->1, 2->2, 4->3");
        assert_eq!(factor_to_top(&alpha, Family::OCP).unwrap(), vec![alpha]);

        let alpha = map("n=4; 2->2");
        let list = factor_to_top(&alpha, Family::OCP).unwrap();
        assert!(list.iter().all(|f| f.height() == 3));
        assert!(list.len() <= 4);
        assert_eq!(product(&list), Some(alpha));
    }
}
