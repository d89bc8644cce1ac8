use orcp_core::enumeration::{Family, FamilySpec};
use orcp_core::rank::{exact_rank, exact_rank_unguarded, top_structure, RankMode};
use orcp_core::{closure, Error, PartialMap};

fn map(s: &str) -> PartialMap {
    s.parse().unwrap()
}

#[test]
fn orcp_ranks_found_by_search() {
    for (n, rank) in [(3, 4), (4, 5)] {
        let cert = exact_rank(&FamilySpec::new(Family::ORCP, n), RankMode::Exhaustive).unwrap();
        assert_eq!(cert.rank, rank, "n = {n}");
        assert!(cert.witness.contains(&PartialMap::reversal(n)));
    }
}

#[test]
fn four_maps_generate_orcp_3() {
    let gens = [
        PartialMap::reversal(3),
        map("n=3; 2->1, 3->2"),
        map("n=3; 1->1, 3->3"),
        map("n=3; 1->1, 2->1, 3->2"),
    ];
    let all = orcp_core::enumerate(&FamilySpec::new(Family::ORCP, 3)).unwrap();
    assert_eq!(closure(&gens).unwrap().elements, all);
}

#[test]
fn reversal_pairs_up_top_kernels() {
    for n in 3..=5 {
        let s = top_structure(&FamilySpec::new(Family::ORCP, n)).unwrap();
        assert_eq!(s.distinct_kernels(), 2 * n as usize - 1);
        assert_eq!(s.orbit_count, n as usize);
        assert_eq!(s.lower_bound(), n as usize + 1);
    }
}

#[test]
fn certification_refuses_a_loose_bound() {
    let err = exact_rank(&FamilySpec::new(Family::ORCP, 4), RankMode::Certified).unwrap_err();
    assert!(matches!(err, Error::Certification(_)), "{err}");
}

#[test]
fn ocp_and_ideal_ranks_certify() {
    for n in 3..=6 {
        let whole = exact_rank_unguarded(&FamilySpec::new(Family::OCP, n), RankMode::Certified).unwrap();
        assert_eq!(whole.rank, 2 * n as usize);
        for family in [Family::OCP, Family::ORCP] {
            let ideal = FamilySpec::ideal(family, n, n - 1);
            let cert = exact_rank_unguarded(&ideal, RankMode::Certified).unwrap();
            assert_eq!(cert.rank, 2 * n as usize - 1);
        }
    }
}

#[test]
fn exhaustive_guard() {
    let err = exact_rank(&FamilySpec::new(Family::OCP, 5), RankMode::Exhaustive).unwrap_err();
    assert!(matches!(err, Error::ResourceGuard { .. }));
}
