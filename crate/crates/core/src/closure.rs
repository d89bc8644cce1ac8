//! Generated subsemigroups.
//!
//! [`closure`] works directly on maps with a frontier worklist: each round
//! multiplies only the newly found elements against everything known so far,
//! on both sides. [`CayleyTable`] is the indexed variant used by the rank
//! searches, where thousands of candidate sets are closed inside one fixed
//! semigroup.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use crate::chain::PartialMap;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ClosureResult {
    /// Members in canonical order.
    pub elements: Vec<PartialMap>,
    members: HashSet<PartialMap>,
    pub generator_count: usize,
    /// Number of frontier expansions.
    pub rounds: usize,
    /// Number of compositions evaluated.
    pub product_count: u64,
    /// Compositions that came out empty and were dropped.
    pub empty_products: u64,
}

impl ClosureResult {
    pub fn contains(&self, f: &PartialMap) -> bool {
        self.members.contains(f)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

pub(crate) fn common_chain(maps: &[PartialMap]) -> Result<u8> {
    let first = maps.first().ok_or(Error::EmptyGenerators)?;
    for m in maps {
        if m.n() != first.n() {
            return Err(Error::SizeMismatch {
                left: first.n(),
                right: m.n(),
            });
        }
    }
    Ok(first.n())
}

/// The subsemigroup generated by `generators`. Empty products are dropped.
pub fn closure(generators: &[PartialMap]) -> Result<ClosureResult> {
    common_chain(generators)?;
    let mut members: HashSet<PartialMap> = HashSet::new();
    let mut all: Vec<PartialMap> = Vec::new();
    for g in generators {
        if members.insert(*g) {
            all.push(*g);
        }
    }
    let generator_count = all.len();
    let mut frontier = all.clone();
    let mut rounds = 0;
    let mut product_count = 0u64;
    let mut empty_products = 0u64;

    while !frontier.is_empty() {
        rounds += 1;
        product_count += 2 * frontier.len() as u64 * all.len() as u64;
        let found: Vec<(Vec<PartialMap>, u64)> = frontier
            .par_iter()
            .map(|f| {
                let mut out = Vec::new();
                let mut empty = 0;
                for a in &all {
                    for p in [f.then(a), a.then(f)] {
                        match p {
                            Some(p) if !members.contains(&p) => out.push(p),
                            Some(_) => {}
                            None => empty += 1,
                        }
                    }
                }
                (out, empty)
            })
            .collect();
        frontier = Vec::new();
        empty_products += found.iter().map(|(_, e)| e).sum::<u64>();
        for p in found.into_iter().flat_map(|(out, _)| out) {
            if members.insert(p) {
                frontier.push(p);
            }
        }
        all.extend_from_slice(&frontier);
    }

    all.sort();
    Ok(ClosureResult {
        elements: all,
        members,
        generator_count,
        rounds,
        product_count,
        empty_products,
    })
}

/// Outcome of comparing a closure against a target set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generation {
    pub generates: bool,
    /// Least target element (canonical order) that was not generated.
    pub missing: Option<PartialMap>,
    /// Least generated element that lies outside the target.
    pub extraneous: Option<PartialMap>,
}

pub fn generates(generators: &[PartialMap], target: &[PartialMap]) -> Result<Generation> {
    let closed = closure(generators)?;
    let target_set: HashSet<&PartialMap> = target.iter().collect();
    let mut sorted_target: Vec<&PartialMap> = target.iter().collect();
    sorted_target.sort();
    let missing = sorted_target
        .into_iter()
        .find(|t| !closed.contains(t))
        .copied();
    let extraneous = closed
        .elements
        .iter()
        .find(|e| !target_set.contains(e))
        .copied();
    Ok(Generation {
        generates: missing.is_none() && extraneous.is_none(),
        missing,
        extraneous,
    })
}

/// True iff `generators` generates `target` and no single removal still does.
pub fn is_minimal_generating(generators: &[PartialMap], target: &[PartialMap]) -> Result<bool> {
    if !generates(generators, target)?.generates {
        return Err(Error::NotAGeneratingSet);
    }
    for skip in 0..generators.len() {
        let rest: Vec<PartialMap> = generators
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, g)| *g)
            .collect();
        if rest.is_empty() {
            continue;
        }
        if generates(&rest, target)?.generates {
            return Ok(false);
        }
    }
    Ok(true)
}

const EMPTY: u32 = u32::MAX;
const OUTSIDE: u32 = u32::MAX - 1;

/// Multiplication table of a finite set of maps, indexed in canonical order.
///
/// Products that are empty or fall outside the set are recorded as such, so
/// the table also answers whether the set is closed.
#[derive(Debug, Clone)]
pub struct CayleyTable {
    elements: Vec<PartialMap>,
    index: HashMap<PartialMap, u32>,
    table: Vec<u32>,
}

impl CayleyTable {
    pub fn new(elements: &[PartialMap]) -> Result<Self> {
        common_chain(elements)?;
        let mut elements = elements.to_vec();
        elements.sort();
        elements.dedup();
        let index: HashMap<PartialMap, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (*e, i as u32))
            .collect();
        let table: Vec<u32> = elements
            .par_iter()
            .flat_map_iter(|a| {
                elements.iter().map(|b| match a.then(b) {
                    None => EMPTY,
                    Some(p) => index.get(&p).copied().unwrap_or(OUTSIDE),
                })
            })
            .collect();
        Ok(CayleyTable {
            elements,
            index,
            table,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[PartialMap] {
        &self.elements
    }

    pub fn index_of(&self, f: &PartialMap) -> Option<usize> {
        self.index.get(f).map(|&i| i as usize)
    }

    /// `elements[a] · elements[b]` as an index; `None` if empty or outside.
    pub fn product(&self, a: usize, b: usize) -> Option<usize> {
        match self.table[a * self.elements.len() + b] {
            EMPTY | OUTSIDE => None,
            i => Some(i as usize),
        }
    }

    /// True iff every nonempty product lands back in the set.
    pub fn is_closed(&self) -> bool {
        !self.table.contains(&OUTSIDE)
    }

    /// Indices generated by `gens`, as a membership vector.
    pub fn closure_of(&self, gens: &[usize]) -> Vec<bool> {
        let size = self.elements.len();
        let mut member = vec![false; size];
        let mut all: Vec<usize> = Vec::with_capacity(size);
        for &g in gens {
            if !member[g] {
                member[g] = true;
                all.push(g);
            }
        }
        let mut next = 0;
        while next < all.len() {
            let f = all[next];
            next += 1;
            let mut i = 0;
            while i < all.len() {
                let a = all[i];
                i += 1;
                for p in [self.table[f * size + a], self.table[a * size + f]] {
                    if p < OUTSIDE && !member[p as usize] {
                        member[p as usize] = true;
                        all.push(p as usize);
                    }
                }
            }
        }
        member
    }

    /// True iff `gens` generates the whole (closed) set.
    pub fn generates_all(&self, gens: &[usize]) -> bool {
        self.closure_of(gens).iter().all(|&m| m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{enumerate, Family, FamilySpec};

    #[test]
    fn identity_generates_itself() {
        for n in 1..=5 {
            let id = PartialMap::identity(n);
            let c = closure(&[id]).unwrap();
            assert_eq!(c.elements, vec![id]);
        }
    }

    #[test]
    fn reversal_generates_top_class() {
        let star = PartialMap::reversal(3);
        let c = closure(&[star]).unwrap();
        assert_eq!(c.elements, vec![PartialMap::identity(3), star]);
    }

    #[test]
    fn top_level_generates_ideal_at_three() {
        let k2 = enumerate(&FamilySpec::exact(Family::OCP, 3, 2)).unwrap();
        let ideal = enumerate(&FamilySpec::ideal(Family::OCP, 3, 2)).unwrap();
        assert_eq!(closure(&k2).unwrap().elements, ideal);
    }

    #[test]
    fn rejects_bad_generator_lists() {
        assert_eq!(closure(&[]).err(), Some(Error::EmptyGenerators));
        let mixed = [PartialMap::identity(3), PartialMap::identity(4)];
        assert!(matches!(closure(&mixed), Err(Error::SizeMismatch { .. })));
        assert_eq!(
            generates(&[], &[PartialMap::identity(3)]).err(),
            Some(Error::EmptyGenerators)
        );
    }

    #[test]
    fn statistics_are_reproducible() {
        let gens = enumerate(&FamilySpec::exact(Family::ORCP, 4, 3)).unwrap();
        let a = closure(&gens).unwrap();
        let b = closure(&gens).unwrap();
        assert_eq!(a.elements, b.elements);
        assert_eq!((a.rounds, a.product_count), (b.rounds, b.product_count));
    }

    #[test]
    fn generation_reports_witnesses() {
        let id = PartialMap::identity(3);
        let star = PartialMap::reversal(3);
        let g = generates(&[id], &[id, star]).unwrap();
        assert!(!g.generates);
        assert_eq!(g.missing, Some(star));
        assert_eq!(g.extraneous, None);

        let g = generates(&[star], &[star]).unwrap();
        assert!(!g.generates);
        assert_eq!(g.extraneous, Some(id));
    }

    #[test]
    fn minimality() {
        let id = PartialMap::identity(3);
        let star = PartialMap::reversal(3);
        assert_eq!(is_minimal_generating(&[star], &[id, star]), Ok(true));
        assert_eq!(is_minimal_generating(&[star, id], &[id, star]), Ok(false));
        assert_eq!(
            is_minimal_generating(&[id], &[id, star]),
            Err(Error::NotAGeneratingSet)
        );
    }

    #[test]
    fn table_agrees_with_direct_closure() {
        let all = enumerate(&FamilySpec::new(Family::ORCP, 3)).unwrap();
        let table = CayleyTable::new(&all).unwrap();
        assert!(table.is_closed());
        let top = enumerate(&FamilySpec::exact(Family::ORCP, 3, 2)).unwrap();
        let idx: Vec<usize> = top.iter().map(|t| table.index_of(t).unwrap()).collect();
        let member = table.closure_of(&idx);
        let via_table: Vec<PartialMap> = member
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| table.elements()[i])
            .collect();
        assert_eq!(via_table, closure(&top).unwrap().elements);
    }

    #[test]
    fn level_alone_is_not_closed() {
        let top = enumerate(&FamilySpec::exact(Family::OCP, 4, 3)).unwrap();
        assert!(!CayleyTable::new(&top).unwrap().is_closed());
    }
}
