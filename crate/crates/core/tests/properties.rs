use std::sync::OnceLock;

use orcp_core::closure::closure;
use orcp_core::enumeration::{count, enumerate, Family, FamilySpec};
use orcp_core::factorization::{factor_step, factor_to_top, product};
use orcp_core::PartialMap;
use proptest::prelude::*;

/// Any nonempty partial map on `[n]`.
fn any_map(n: u8) -> impl Strategy<Value = PartialMap> {
    prop::collection::vec(prop::option::of(1..=n), n as usize)
        .prop_filter("nonempty", |v| v.iter().any(Option::is_some))
        .prop_map(|v| PartialMap::from_images(&v).unwrap())
}

fn sized_map() -> impl Strategy<Value = (PartialMap, PartialMap, PartialMap)> {
    (1u8..=6).prop_flat_map(|n| (any_map(n), any_map(n), any_map(n)))
}

fn members(family: Family, n: u8) -> &'static [PartialMap] {
    static CACHE: OnceLock<Vec<Vec<PartialMap>>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        Family::ALL
            .iter()
            .flat_map(|&f| (1..=6).map(move |n| enumerate(&FamilySpec::new(f, n)).unwrap()))
            .collect()
    });
    let i = Family::ALL.iter().position(|&f| f == family).unwrap();
    &all[i * 6 + n as usize - 1]
}

fn member(family: Family, n: u8) -> impl Strategy<Value = PartialMap> {
    prop::sample::select(members(family, n).to_vec())
}

fn family() -> impl Strategy<Value = Family> {
    prop::sample::select(Family::ALL.to_vec())
}

proptest! {
    #[test]
    fn composition_is_associative((f, g, h) in sized_map()) {
        let left = f.then(&g).and_then(|fg| fg.then(&h));
        let right = g.then(&h).and_then(|gh| f.then(&gh));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn product_height_is_at_most_each_factor((f, g, _) in sized_map()) {
        if let Some(fg) = f.then(&g) {
            prop_assert!(fg.height() <= f.height().min(g.height()));
        }
    }

    #[test]
    fn families_are_closed(
        (fam, f, g) in (family(), 1u8..=5).prop_flat_map(|(fam, n)| (Just(fam), member(fam, n), member(fam, n)))
    ) {
        if let Some(fg) = f.then(&g) {
            prop_assert!(fam.contains(&fg), "{} * {} = {} left {}", f, g, fg, fam);
        }
    }

    #[test]
    fn families_nest(f in (1u8..=6).prop_flat_map(any_map)) {
        let c = |fam: Family| fam.contains(&f);
        prop_assert!(!c(Family::OCP) || c(Family::ORCP));
        prop_assert!(!c(Family::ORCP) || c(Family::CP));
        prop_assert!(c(Family::P));
        prop_assert!(!c(Family::OCT) || (c(Family::ORCT) && c(Family::OCP) && f.is_full()));
        prop_assert!(!c(Family::ORCT) || (c(Family::ORCP) && f.is_full()));
    }

    #[test]
    fn levels_partition_the_family(fam in family(), n in 1u8..=5) {
        let total = count(&FamilySpec::new(fam, n)).unwrap();
        let by_level: usize = (1..=n).map(|p| count(&FamilySpec::exact(fam, n, p)).unwrap()).sum();
        prop_assert_eq!(total, by_level);
        for p in 1..=n {
            let ideal = count(&FamilySpec::ideal(fam, n, p)).unwrap();
            let below: usize = (1..=p).map(|q| count(&FamilySpec::exact(fam, n, q)).unwrap()).sum();
            prop_assert_eq!(ideal, below);
        }
    }

    #[test]
    fn ideals_absorb(
        (fam, p, f, g) in (prop::sample::select(vec![Family::OCP, Family::ORCP]), 3u8..=5)
            .prop_flat_map(|(fam, n)| (Just(fam), 1..n, member(fam, n), member(fam, n)))
    ) {
        let spec = FamilySpec::ideal(fam, f.n(), p);
        if spec.contains(&f) {
            for prod in [f.then(&g), g.then(&f)].into_iter().flatten() {
                prop_assert!(spec.contains(&prod));
            }
        }
    }

    #[test]
    fn closure_is_monotone(
        (a, b) in (2u8..=4).prop_flat_map(|n| (
            prop::collection::vec(member(Family::ORCP, n), 1..4),
            prop::collection::vec(member(Family::ORCP, n), 1..3),
        ))
    ) {
        let small = closure(&a).unwrap();
        let mut both = a.clone();
        both.extend(&b);
        let big = closure(&both).unwrap();
        for e in &small.elements {
            prop_assert!(big.contains(e));
        }
        for g in &a {
            prop_assert!(small.contains(g));
        }
    }

    #[test]
    fn factorization_round_trips_at_six(
        (fam, f) in prop::sample::select(vec![Family::OCP, Family::ORCP])
            .prop_flat_map(|fam| (Just(fam), member(fam, 6)))
    ) {
        prop_assume!(f.height() <= 4);
        let pair = factor_step(&f, fam).unwrap();
        prop_assert_eq!(pair.product(), Some(f));
        prop_assert_eq!(pair.beta.height(), f.height() + 1);
        prop_assert_eq!(pair.gamma.height(), f.height() + 1);
        let top = factor_to_top(&f, fam).unwrap();
        prop_assert!(top.iter().all(|t| t.height() == 5 && fam.contains(t)));
        prop_assert_eq!(product(&top), Some(f));
    }

    #[test]
    fn formats_round_trip(f in (1u8..=6).prop_flat_map(any_map)) {
        prop_assert_eq!(PartialMap::from_canonical_key(&f.canonical_key()).unwrap(), f);
        prop_assert_eq!(f.to_string().parse::<PartialMap>().unwrap(), f);
        let json = serde_json::to_string(&f).unwrap();
        prop_assert_eq!(serde_json::from_str::<PartialMap>(&json).unwrap(), f);
    }
}
