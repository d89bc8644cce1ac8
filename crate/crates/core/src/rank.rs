//! Exact ranks of the order-preserving (or -reversing) contraction monoids
//! and of their height `<= n-1` ideals.
//!
//! Both modes rest on two facts about a product of maps:
//!
//! * its height is at most the height of every factor, so the elements of
//!   height `n` (the units) and `n-1` (the top level) can only be products of
//!   elements of height `>= n-1`, and any generating set can be cut down to
//!   those two levels;
//! * if `a · b` still has height `n-1` with `a` on the top level, then
//!   `ker(a · b) = ker a`; a unit `u` in front only moves the kernel,
//!   `ker(u · a) = u⁻¹(ker a)`.
//!
//! So a generating set must generate the group of units on its own and must
//! meet every orbit of top-level kernels under the units. The number of those
//! orbits plus the rank of the unit group is the lower bound used here. When
//! the units are trivial this is just the number of distinct top-level kernels.
//! The exhaustive mode uses the same condition to prune candidate subsets,
//! after re-checking it against an unpruned search at `n = 3`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{KernelPartition, PartialMap};
use crate::closure::{self, CayleyTable};
use crate::enumeration::{Family, FamilySpec, Level};
use crate::error::{Error, Result};
use crate::generators::{identity, identity_star, set_g, set_m, values, MVariant};

/// Largest `n` accepted by the exhaustive mode without an override.
pub const EXHAUSTIVE_RANK_GUARD: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankMode {
    Exhaustive,
    Certified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerBoundMethod {
    ExhaustiveSearch,
    KernelClassCount,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankCertificate {
    pub target: FamilySpec,
    pub rank: usize,
    pub witness: Vec<PartialMap>,
    pub lower_bound_method: LowerBoundMethod,
}

/// Units, top level and kernel orbits of a rank target.
#[derive(Debug, Clone)]
pub struct TopStructure {
    pub elements: Vec<PartialMap>,
    pub units: Vec<PartialMap>,
    pub top: Vec<PartialMap>,
    /// Orbit id of each entry of `top`.
    pub orbit_of: Vec<usize>,
    pub orbit_count: usize,
    /// Fewest units that generate all units (0 when there are none).
    pub unit_rank: usize,
}

impl TopStructure {
    pub fn lower_bound(&self) -> usize {
        self.unit_rank + self.orbit_count
    }

    pub fn distinct_kernels(&self) -> usize {
        let mut k: Vec<KernelPartition> = self.top.iter().map(|t| t.kernel_partition()).collect();
        k.sort();
        k.dedup();
        k.len()
    }
}

fn check_target(target: &FamilySpec) -> Result<()> {
    if target.n < 3 {
        return Err(Error::ChainTooSmall(target.n));
    }
    let family_ok = matches!(target.family, Family::OCP | Family::ORCP);
    let level_ok = match target.level {
        Level::All => true,
        Level::Ideal(p) => p + 1 == target.n,
        Level::Exact(_) => false,
    };
    if !(family_ok && level_ok) {
        return Err(Error::UnsupportedTarget(format!(
            "{target} (expected OCP or ORCP, whole or the height <= n-1 ideal)"
        )));
    }
    Ok(())
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

pub fn top_structure(target: &FamilySpec) -> Result<TopStructure> {
    check_target(target)?;
    let n = target.n as usize;
    let elements: Vec<PartialMap> = target.iter_unguarded()?.collect();
    let units: Vec<PartialMap> = elements.iter().filter(|e| e.height() == n).copied().collect();
    let top: Vec<PartialMap> = elements
        .iter()
        .filter(|e| e.height() == n - 1)
        .copied()
        .collect();

    let mut kernel_ids: HashMap<KernelPartition, usize> = HashMap::new();
    let mut ids_of_top = Vec::with_capacity(top.len());
    for t in &top {
        let next = kernel_ids.len();
        ids_of_top.push(*kernel_ids.entry(t.kernel_partition()).or_insert(next));
    }
    let mut parent: Vec<usize> = (0..kernel_ids.len()).collect();
    for (t, &id) in top.iter().zip(&ids_of_top) {
        for u in &units {
            let moved = u.then(t).expect("a unit composed with a map is nonempty");
            let other = kernel_ids[&moved.kernel_partition()];
            let (a, b) = (find(&mut parent, id), find(&mut parent, other));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut orbit_ids: HashMap<usize, usize> = HashMap::new();
    let orbit_of: Vec<usize> = ids_of_top
        .iter()
        .map(|&id| {
            let root = find(&mut parent, id);
            let next = orbit_ids.len();
            *orbit_ids.entry(root).or_insert(next)
        })
        .collect();

    let unit_rank = unit_group_rank(&units)?;
    Ok(TopStructure {
        elements,
        units,
        top,
        orbit_of,
        orbit_count: orbit_ids.len(),
        unit_rank,
    })
}

fn unit_group_rank(units: &[PartialMap]) -> Result<usize> {
    if units.is_empty() {
        return Ok(0);
    }
    for size in 1..=units.len() {
        for subset in Combinations::new(units.len(), size) {
            let gens: Vec<PartialMap> = subset.iter().map(|&i| units[i]).collect();
            if closure::closure(&gens)?.len() == units.len() {
                return Ok(size);
            }
        }
    }
    Ok(units.len())
}

/// The generating set the rank claim is built on: `G`, `G ∪ {1}`,
/// corrected `M`, or corrected `M ∪ {1*}`.
pub fn reference_witness(target: &FamilySpec) -> Result<Vec<PartialMap>> {
    check_target(target)?;
    let n = target.n;
    let mut named = match target.family {
        Family::OCP => set_g(n)?,
        _ => set_m(n, MVariant::Corrected)?,
    };
    if target.level == Level::All {
        named.push(match target.family {
            Family::OCP => identity(n),
            _ => identity_star(n),
        });
    }
    Ok(values(&named))
}

pub fn exact_rank(target: &FamilySpec, mode: RankMode) -> Result<RankCertificate> {
    if mode == RankMode::Exhaustive && target.n > EXHAUSTIVE_RANK_GUARD {
        return Err(Error::ResourceGuard {
            what: "exhaustive rank search",
            n: target.n,
            limit: EXHAUSTIVE_RANK_GUARD,
        });
    }
    exact_rank_unguarded(target, mode)
}

pub fn exact_rank_unguarded(target: &FamilySpec, mode: RankMode) -> Result<RankCertificate> {
    match mode {
        RankMode::Exhaustive => exhaustive(target),
        RankMode::Certified => certified(target),
    }
}

fn certified(target: &FamilySpec) -> Result<RankCertificate> {
    let structure = top_structure(target)?;
    let witness = reference_witness(target)?;
    let report = closure::generates(&witness, &structure.elements)?;
    if !report.generates {
        return Err(Error::Certification(format!(
            "reference witness does not generate {target} (missing {:?}, extraneous {:?})",
            report.missing, report.extraneous
        )));
    }
    let bound = structure.lower_bound();
    if bound != witness.len() {
        return Err(Error::Certification(format!(
            "witness of size {} generates {target}, but the kernel-orbit lower bound is only {bound} \
             ({} unit generator(s) + {} orbit(s) of top-level kernels)",
            witness.len(),
            structure.unit_rank,
            structure.orbit_count
        )));
    }
    Ok(RankCertificate {
        target: *target,
        rank: bound,
        witness,
        lower_bound_method: LowerBoundMethod::KernelClassCount,
    })
}

/// Indexed search space for the exhaustive mode.
struct Space {
    table: CayleyTable,
    /// Candidate indices (units and top level) in canonical order.
    candidates: Vec<usize>,
    is_unit: Vec<bool>,
    /// Orbit id per table index, for top-level elements.
    orbit: Vec<Option<usize>>,
    orbit_count: usize,
    units: Vec<usize>,
}

impl Space {
    fn new(structure: &TopStructure) -> Result<Space> {
        let table = CayleyTable::new(&structure.elements)?;
        let size = table.len();
        let mut is_unit = vec![false; size];
        let mut orbit = vec![None; size];
        let mut units = Vec::new();
        for u in &structure.units {
            let i = table.index_of(u).expect("unit is a member");
            is_unit[i] = true;
            units.push(i);
        }
        for (t, &o) in structure.top.iter().zip(&structure.orbit_of) {
            orbit[table.index_of(t).expect("top element is a member")] = Some(o);
        }
        let candidates: Vec<usize> = (0..size)
            .filter(|&i| is_unit[i] || orbit[i].is_some())
            .collect();
        Ok(Space {
            table,
            candidates,
            is_unit,
            orbit,
            orbit_count: structure.orbit_count,
            units,
        })
    }

    /// Necessary condition for `subset` to generate everything.
    fn passes_rule(&self, subset: &[usize]) -> bool {
        let mut covered = vec![false; self.orbit_count];
        let mut chosen_units = Vec::new();
        for &i in subset {
            if self.is_unit[i] {
                chosen_units.push(i);
            } else if let Some(o) = self.orbit[i] {
                covered[o] = true;
            }
        }
        if !covered.iter().all(|&c| c) {
            return false;
        }
        if self.units.is_empty() {
            return true;
        }
        let member = self.table.closure_of(&chosen_units);
        self.units.iter().all(|&u| member[u])
    }

    fn generates(&self, subset: &[usize]) -> bool {
        self.table.generates_all(subset)
    }

    fn to_maps(&self, subset: &[usize]) -> Vec<PartialMap> {
        subset.iter().map(|&i| self.table.elements()[i]).collect()
    }

    /// First generating subset of `size` candidates, in lexicographic order.
    fn first_generating(&self, size: usize, pruned: bool) -> Option<Vec<usize>> {
        const CHUNK: usize = 4096;
        let mut combos = Combinations::new(self.candidates.len(), size)
            .map(|c| c.into_iter().map(|i| self.candidates[i]).collect::<Vec<usize>>())
            .filter(|s| !pruned || self.passes_rule(s));
        loop {
            let chunk: Vec<Vec<usize>> = combos.by_ref().take(CHUNK).collect();
            if chunk.is_empty() {
                return None;
            }
            if let Some(found) = chunk.into_par_iter().find_first(|s| self.generates(s)) {
                return Some(found);
            }
        }
    }

    fn search(&self, pruned: bool) -> Option<Vec<usize>> {
        (1..=self.candidates.len()).find_map(|size| self.first_generating(size, pruned))
    }
}

/// Result of checking the pruning condition against an unpruned search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruningCheck {
    pub target: FamilySpec,
    pub rank: usize,
    /// Generating sets of size `rank` drawn from the units and top level.
    pub minimum_sets: usize,
    /// How many of those fail the kernel-orbit condition.
    pub violations: usize,
    /// How many of those miss some top-level kernel class outright.
    pub missing_a_kernel_class: usize,
}

impl PruningCheck {
    pub fn sound(&self) -> bool {
        self.violations == 0
    }
}

/// Runs the unpruned search on `target` and tests the pruning condition on
/// every minimum-size generating set.
pub fn check_pruning_rule(target: &FamilySpec) -> Result<PruningCheck> {
    let structure = top_structure(target)?;
    let space = Space::new(&structure)?;
    let witness = space.search(false).ok_or_else(|| {
        Error::Certification(format!("units and top level do not generate {target}"))
    })?;
    let rank = witness.len();
    let mut minimum_sets = 0;
    let mut violations = 0;
    let mut missing_a_kernel_class = 0;
    let kernel_classes = structure.distinct_kernels();
    for combo in Combinations::new(space.candidates.len(), rank) {
        let subset: Vec<usize> = combo.into_iter().map(|i| space.candidates[i]).collect();
        if !space.generates(&subset) {
            continue;
        }
        minimum_sets += 1;
        if !space.passes_rule(&subset) {
            violations += 1;
        }
        let mut kernels: Vec<KernelPartition> = subset
            .iter()
            .filter(|&&i| space.orbit[i].is_some())
            .map(|&i| space.table.elements()[i].kernel_partition())
            .collect();
        kernels.sort();
        kernels.dedup();
        if kernels.len() < kernel_classes {
            missing_a_kernel_class += 1;
        }
    }
    Ok(PruningCheck {
        target: *target,
        rank,
        minimum_sets,
        violations,
        missing_a_kernel_class,
    })
}

fn exhaustive(target: &FamilySpec) -> Result<RankCertificate> {
    let structure = top_structure(target)?;
    let pruned = if target.n > 3 {
        let small = FamilySpec {
            n: 3,
            level: match target.level {
                Level::Ideal(_) => Level::Ideal(2),
                other => other,
            },
            ..*target
        };
        check_pruning_rule(&small)?.sound()
    } else {
        false
    };
    let space = Space::new(&structure)?;
    let witness = space.search(pruned).ok_or_else(|| {
        Error::Certification(format!("units and top level do not generate {target}"))
    })?;
    Ok(RankCertificate {
        target: *target,
        rank: witness.len(),
        witness: space.to_maps(&witness),
        lower_bound_method: LowerBoundMethod::ExhaustiveSearch,
    })
}

/// `k`-subsets of `0..m` in lexicographic order.
#[derive(Debug, Clone)]
pub struct Combinations {
    m: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(m: usize, k: usize) -> Self {
        Combinations {
            m,
            current: (k <= m).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.m - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}
