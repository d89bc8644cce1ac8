//! Named top-level elements and the generating sets built from them.
//!
//! `alpha_{s,t}` is the injective monotone contraction with domain
//! `[n] \ {s}` and image `[n] \ {t}`; `pi_{(i,i+1),k}` is the full monotone
//! contraction whose only nontrivial kernel class is `{i, i+1}` and whose
//! image is `[n] \ {k}`. Starred names are the order-reversing versions.
//! Whether a given index pair exists is decided by building the unique
//! monotone candidate and testing the contraction property.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::chain::{KernelPartition, MapRecord, PartialMap, PointSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementName {
    Alpha { s: u8, t: u8 },
    AlphaStar { s: u8, t: u8 },
    Pi { i: u8, k: u8 },
    PiStar { i: u8, k: u8 },
    Identity,
    IdentityStar,
}

impl fmt::Display for ElementName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ElementName::Alpha { s, t } => write!(f, "alpha_{{{s},{t}}}"),
            ElementName::AlphaStar { s, t } => write!(f, "alpha*_{{{s},{t}}}"),
            ElementName::Pi { i, k } => write!(f, "pi_{{({i},{}),{k}}}", i + 1),
            ElementName::PiStar { i, k } => write!(f, "pi*_{{({i},{}),{k}}}", i + 1),
            ElementName::Identity => f.write_str("1_[n]"),
            ElementName::IdentityStar => f.write_str("1*_[n]"),
        }
    }
}

impl Serialize for ElementName {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NamedElement {
    pub name: ElementName,
    pub value: PartialMap,
}

impl Serialize for NamedElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Labelled {
            name: ElementName,
            #[serde(flatten)]
            record: MapRecord,
        }
        Labelled {
            name: self.name,
            record: self.value.into(),
        }
        .serialize(serializer)
    }
}

impl fmt::Display for NamedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.name, self.value)
    }
}

fn monotone_bijection(
    n: u8,
    domain: &[u8],
    mut image: Vec<u8>,
    reversed: bool,
) -> Option<PartialMap> {
    if reversed {
        image.reverse();
    }
    let pairs: Vec<(usize, usize)> = domain
        .iter()
        .zip(&image)
        .map(|(&x, &y)| (x as usize, y as usize))
        .collect();
    let f = PartialMap::new(n as usize, &pairs).ok()?;
    f.classify().contraction.then_some(f)
}

fn check_points(n: u8, what: &str, points: &[u8]) -> Result<()> {
    if n < 2 {
        return Err(Error::Index(format!("{what} needs n >= 2")));
    }
    for &p in points {
        if p == 0 || p > n {
            return Err(Error::Index(format!("{what}: index {p} outside 1..={n}")));
        }
    }
    Ok(())
}

/// `alpha_{s,t}` (or `alpha*_{s,t}`), if it is a contraction.
pub fn make_alpha(n: u8, s: u8, t: u8, reversed: bool) -> Result<Option<NamedElement>> {
    check_points(n, "alpha", &[s, t])?;
    let domain: Vec<u8> = (1..=n).filter(|&x| x != s).collect();
    let image: Vec<u8> = (1..=n).filter(|&y| y != t).collect();
    let name = if reversed {
        ElementName::AlphaStar { s, t }
    } else {
        ElementName::Alpha { s, t }
    };
    Ok(monotone_bijection(n, &domain, image, reversed).map(|value| NamedElement { name, value }))
}

/// `pi_{(i,i+1),k}` (or its starred version) for `k` in `{1, n}`, if it is
/// a contraction.
pub fn make_pi(n: u8, i: u8, k: u8, reversed: bool) -> Result<Option<NamedElement>> {
    check_points(n, "pi", &[i, k])?;
    if i >= n {
        return Err(Error::Index(format!("pi: merge index {i} outside 1..={}", n - 1)));
    }
    if k != 1 && k != n {
        return Err(Error::Index(format!("pi: image index {k} must be 1 or {n}")));
    }
    let mut image: Vec<u8> = (1..=n).filter(|&y| y != k).collect();
    if reversed {
        image.reverse();
    }
    let pairs: Vec<(usize, usize)> = (1..=n)
        .map(|x| {
            let block = if x <= i { x } else { x - 1 };
            (x as usize, image[block as usize - 1] as usize)
        })
        .collect();
    let value = PartialMap::new(n as usize, &pairs)?;
    let name = if reversed {
        ElementName::PiStar { i, k }
    } else {
        ElementName::Pi { i, k }
    };
    Ok(value
        .classify()
        .contraction
        .then_some(NamedElement { name, value }))
}

pub fn identity(n: u8) -> NamedElement {
    NamedElement {
        name: ElementName::Identity,
        value: PartialMap::identity(n),
    }
}

pub fn identity_star(n: u8) -> NamedElement {
    NamedElement {
        name: ElementName::IdentityStar,
        value: PartialMap::reversal(n),
    }
}

fn need_three(n: u8) -> Result<()> {
    if n < 3 {
        return Err(Error::ChainTooSmall(n));
    }
    Ok(())
}

fn existing(elem: Result<Option<NamedElement>>, what: &str) -> Result<NamedElement> {
    elem?.ok_or_else(|| Error::Index(format!("{what} does not exist")))
}

pub fn alpha(n: u8, s: u8, t: u8) -> Result<NamedElement> {
    existing(make_alpha(n, s, t, false), &format!("alpha_{{{s},{t}}}"))
}

pub fn alpha_star(n: u8, s: u8, t: u8) -> Result<NamedElement> {
    existing(make_alpha(n, s, t, true), &format!("alpha*_{{{s},{t}}}"))
}

pub fn pi(n: u8, i: u8, k: u8) -> Result<NamedElement> {
    existing(make_pi(n, i, k, false), &format!("pi_{{({i},{}),{k}}}", i + 1))
}

pub fn pi_star(n: u8, i: u8, k: u8) -> Result<NamedElement> {
    existing(make_pi(n, i, k, true), &format!("pi*_{{({i},{}),{k}}}", i + 1))
}

/// `G = {alpha_{n,1}, alpha_{1,n}, alpha_{j,j}, pi_{(i,i+1),n}}` with
/// `2 <= j <= n-1`, `1 <= i <= n-1`; generates the height `<= n-1` ideal of
/// the order-preserving family.
pub fn set_g(n: u8) -> Result<Vec<NamedElement>> {
    need_three(n)?;
    let mut out = vec![alpha(n, n, 1)?, alpha(n, 1, n)?];
    for j in 2..n {
        out.push(alpha(n, j, j)?);
    }
    for i in 1..n {
        out.push(pi(n, i, n)?);
    }
    Ok(out)
}

/// `Z = {alpha*_{n,n}, alpha*_{1,1}, alpha*_{j,n-j+1} : 2 <= j <= n-1}`.
pub fn set_z(n: u8) -> Result<Vec<NamedElement>> {
    need_three(n)?;
    let mut out = vec![alpha_star(n, n, n)?, alpha_star(n, 1, 1)?];
    for j in 2..n {
        out.push(alpha_star(n, j, n - j + 1)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MVariant {
    /// Starred family indexed by `1 <= j <= n`; `2n` elements.
    AsWritten,
    /// Starred family indexed by `2 <= j <= n`; `2n - 1` elements.
    Corrected,
}

/// `M = {alpha_{1,n}, pi_{(i,i+1),n}, alpha*_{j,n-j+1}}`.
///
/// With `j` running over all of `[n]` the set has `2n` elements and
/// `alpha*_{1,n}` is redundant. Dropping `j = 1` leaves a minimal
/// generating set of size `2n - 1` for the height `<= n-1` ideal of the
/// order-preserving-or-reversing family.
pub fn set_m(n: u8, variant: MVariant) -> Result<Vec<NamedElement>> {
    need_three(n)?;
    let mut out = vec![alpha(n, 1, n)?];
    for i in 1..n {
        out.push(pi(n, i, n)?);
    }
    let first_j = match variant {
        MVariant::AsWritten => 1,
        MVariant::Corrected => 2,
    };
    for j in first_j..=n {
        out.push(alpha_star(n, j, n - j + 1)?);
    }
    Ok(out)
}

pub fn values(named: &[NamedElement]) -> Vec<PartialMap> {
    named.iter().map(|e| e.value).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Preserving,
    Reversing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableColumn {
    pub image: PointSet,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub kernel: KernelPartition,
    pub label: String,
    pub orientation: Orientation,
    /// One cell per column.
    pub cells: Vec<Vec<NamedElement>>,
}

/// The top level laid out by kernel (rows) and image (columns).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassTable {
    pub n: u8,
    pub which: u8,
    pub columns: Vec<TableColumn>,
    pub rows: Vec<TableRow>,
}

#[derive(Clone, Copy)]
enum RowKind {
    Deleted(u8),
    Merged(u8),
}

fn kernel_of(n: u8, kind: RowKind) -> KernelPartition {
    let blocks = match kind {
        RowKind::Deleted(s) => (1..=n)
            .filter(|&x| x != s)
            .map(PointSet::singleton)
            .collect(),
        RowKind::Merged(i) => (1..=n)
            .filter(|&x| x != i + 1)
            .map(|x| {
                if x == i {
                    PointSet::from_iter([i, i + 1])
                } else {
                    PointSet::singleton(x)
                }
            })
            .collect(),
    };
    KernelPartition { blocks }
}

/// Table 1 (`which = 1`, order-preserving rows only) or Table 2
/// (`which = 2`, a preserving and a reversing row per kernel).
pub fn build_table(n: u8, which: u8) -> Result<ClassTable> {
    need_three(n)?;
    let orientations: &[Orientation] = match which {
        1 => &[Orientation::Preserving],
        2 => &[Orientation::Preserving, Orientation::Reversing],
        _ => return Err(Error::Index(format!("table {which} (expected 1 or 2)"))),
    };
    let columns: Vec<TableColumn> = (1..=n)
        .map(|t| TableColumn {
            image: PointSet::full(n).without(t),
            label: format!("[n]\\{{{t}}}"),
        })
        .collect();
    let kinds = (1..=n)
        .map(RowKind::Deleted)
        .chain((1..n).map(RowKind::Merged));
    let mut rows = Vec::new();
    for kind in kinds {
        let label = match kind {
            RowKind::Deleted(s) => format!("P_[n]\\{{{s}}}"),
            RowKind::Merged(i) => format!("P_{{{i},{}}}", i + 1),
        };
        for &orientation in orientations {
            let reversed = orientation == Orientation::Reversing;
            let mut cells = Vec::with_capacity(columns.len());
            for t in 1..=n {
                let elem = match kind {
                    RowKind::Deleted(s) => make_alpha(n, s, t, reversed)?,
                    RowKind::Merged(i) if t == 1 || t == n => make_pi(n, i, t, reversed)?,
                    RowKind::Merged(_) => None,
                };
                cells.push(elem.into_iter().collect());
            }
            rows.push(TableRow {
                kernel: kernel_of(n, kind),
                label: label.clone(),
                orientation,
                cells,
            });
        }
    }
    Ok(ClassTable {
        n,
        which,
        columns,
        rows,
    })
}

impl ClassTable {
    pub fn elements(&self) -> Vec<NamedElement> {
        self.rows
            .iter()
            .flat_map(|r| r.cells.iter().flatten().copied())
            .collect()
    }

    /// Distinct kernels among the rows.
    pub fn kernel_count(&self) -> usize {
        let mut kernels: Vec<&KernelPartition> = self.rows.iter().map(|r| &r.kernel).collect();
        kernels.sort();
        kernels.dedup();
        kernels.len()
    }

    fn cell_text(cell: &[NamedElement]) -> String {
        cell.iter()
            .map(|e| e.name.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| kernel partition / image |");
        for c in &self.columns {
            out.push_str(&format!(" {} |", c.label));
        }
        out.push_str("\n|---|");
        out.push_str(&"---|".repeat(self.columns.len()));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("| {} |", r.label));
            for cell in &r.cells {
                out.push_str(&format!(" {} |", Self::cell_text(cell)));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("kernel,orientation");
        for c in &self.columns {
            out.push_str(&format!(",\"{}\"", c.label));
        }
        out.push('\n');
        for r in &self.rows {
            let orientation = match r.orientation {
                Orientation::Preserving => "preserving",
                Orientation::Reversing => "reversing",
            };
            out.push_str(&format!("\"{}\",{orientation}", r.label));
            for cell in &r.cells {
                out.push_str(&format!(",\"{}\"", Self::cell_text(cell)));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{enumerate, Family, FamilySpec};

    fn map(s: &str) -> PartialMap {
        s.parse().unwrap()
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha(4, 4, 1).unwrap().value, map("n=4; 1->2, 2->3, 3->4"));
        assert_eq!(alpha(4, 2, 2).unwrap().value, map("n=4; 1->1, 3->3, 4->4"));
        assert_eq!(
            alpha_star(4, 2, 1).unwrap().value,
            map("n=4; 1->4, 3->3, 4->2")
        );
        // {1,3,4} -> {1,2,4} squeezes 3,4 onto 2,4.
        assert_eq!(make_alpha(4, 2, 3, false).unwrap(), None);
        assert!(make_alpha(4, 5, 1, false).is_err());
    }

    #[test]
    fn pi_examples() {
        assert_eq!(pi(4, 2, 1).unwrap().value, map("n=4; 1->2, 2->3, 3->3, 4->4"));
        assert_eq!(pi(3, 1, 3).unwrap().value, map("n=3; 1->1, 2->1, 3->2"));
        assert_eq!(
            pi_star(4, 2, 1).unwrap().value,
            map("n=4; 1->4, 2->3, 3->3, 4->2")
        );
        assert!(make_pi(4, 2, 2, false).is_err());
        assert!(make_pi(4, 4, 1, false).is_err());
    }

    #[test]
    fn set_sizes() {
        let g3: Vec<String> = set_g(3)
            .unwrap()
            .iter()
            .map(|e| e.name.to_string())
            .collect();
        assert_eq!(
            g3,
            [
                "alpha_{3,1}",
                "alpha_{1,3}",
                "alpha_{2,2}",
                "pi_{(1,2),3}",
                "pi_{(2,3),3}"
            ]
        );
        assert_eq!(set_g(4).unwrap().len(), 7);
        assert_eq!(set_z(4).unwrap().len(), 4);
        assert_eq!(set_m(3, MVariant::Corrected).unwrap().len(), 5);
        let written = values(&set_m(3, MVariant::AsWritten).unwrap());
        assert_eq!(written.len(), 6);
        assert!(written.contains(&alpha(3, 1, 3).unwrap().value));
        assert!(written.contains(&alpha_star(3, 1, 3).unwrap().value));
        assert_eq!(set_g(2).err(), Some(Error::ChainTooSmall(2)));
    }

    #[test]
    fn named_elements_have_declared_shape() {
        for n in 3..=6u8 {
            for s in 1..=n {
                for t in 1..=n {
                    for reversed in [false, true] {
                        if let Some(e) = make_alpha(n, s, t, reversed).unwrap() {
                            let fl = e.value.classify();
                            assert!(fl.contraction);
                            assert_eq!(fl.order_reversing, reversed);
                            assert_eq!(e.value.domain(), PointSet::full(n).without(s));
                            assert_eq!(e.value.image(), PointSet::full(n).without(t));
                        }
                    }
                }
            }
            for i in 1..n {
                for k in [1, n] {
                    for reversed in [false, true] {
                        let e = make_pi(n, i, k, reversed).unwrap().unwrap();
                        assert!(e.value.is_full());
                        assert_eq!(e.value.image(), PointSet::full(n).without(k));
                        assert_eq!(
                            e.value.kernel_partition(),
                            kernel_of(n, RowKind::Merged(i))
                        );
                        assert_eq!(e.value.classify().order_reversing, reversed);
                    }
                }
            }
        }
    }

    #[test]
    fn table_one_shape() {
        let t = build_table(4, 1).unwrap();
        assert_eq!(t.rows.len(), 7);
        for r in t.rows.iter().filter(|r| r.label.starts_with("P_{")) {
            let populated: Vec<usize> = (0..4).filter(|&c| !r.cells[c].is_empty()).collect();
            assert_eq!(populated, [0, 3]);
        }
    }

    #[test]
    fn table_two_middle_row_pair() {
        let t = build_table(3, 2).unwrap();
        let pair: Vec<&TableRow> = t.rows.iter().filter(|r| r.label == "P_[n]\\{2}").collect();
        assert_eq!(pair.len(), 2);
        assert_eq!(pair[0].cells[1][0].name, ElementName::Alpha { s: 2, t: 2 });
        assert_eq!(pair[1].cells[1][0].name, ElementName::AlphaStar { s: 2, t: 2 });
        assert!(pair[1].cells[1][0].value.classify().order_reversing);
    }

    #[test]
    fn tables_cover_the_top_level_exactly() {
        for n in 3..=6u8 {
            for (which, family) in [(1, Family::OCP), (2, Family::ORCP)] {
                let mut cells = values(&build_table(n, which).unwrap().elements());
                cells.sort();
                let level = enumerate(&FamilySpec::exact(family, n, n - 1)).unwrap();
                assert_eq!(cells, level, "n={n} table {which}");
            }
        }
    }

    #[test]
    fn named_json_record() {
        let e = alpha(3, 3, 1).unwrap();
        assert_eq!(
            serde_json::to_string(&e).unwrap(),
            r#"{"name":"alpha_{3,1}","n":3,"pairs":[[1,2],[2,3]]}"#
        );
    }

    #[test]
    fn renderers() {
        let t = build_table(3, 1).unwrap();
        let md = t.to_markdown();
        assert!(md.contains("| P_[n]\\{2} | alpha_{2,1} | alpha_{2,2} | alpha_{2,3} |"));
        assert_eq!(t.to_csv().lines().count(), 1 + 5);
    }
}
