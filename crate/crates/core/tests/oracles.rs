//! Independent oracles for the enumeration and variation engines.

mod support;

use pvar2d::geometry::{index_sub_dissections, Limits};
use pvar2d::random;
use pvar2d::variation::{gridlike_power_sum, pvar_1d, vp_2d_exact};
use support::{library_set, occupancy_oracle, pvar_1d_brute, wall_oracle};

#[test]
fn enumerator_matches_occupancy_and_wall_oracles() {
    for nx in 1..=3 {
        for ny in 1..=3 {
            let (count, set) = library_set(nx, ny);
            assert_eq!(count, set.len(), "{nx}x{ny}: duplicates emitted");
            let occ = occupancy_oracle(nx, ny);
            let walls = wall_oracle(nx, ny);
            assert_eq!(set, occ, "{nx}x{ny} vs occupancy oracle");
            assert_eq!(set, walls, "{nx}x{ny} vs wall oracle");
        }
    }
}

#[test]
fn enumerator_counts_beyond_three_by_three() {
    for (nx, ny, known) in [(3, 4, 3164), (4, 3, 3164), (1, 6, 32), (2, 4, 148)] {
        let (count, set) = library_set(nx, ny);
        assert_eq!(set, wall_oracle(nx, ny), "{nx}x{ny}");
        assert_eq!(count, set.len());
        assert_eq!(count, known);
    }
}

#[test]
fn pvar_1d_matches_exhaustive_search() {
    let mut rng = random::rng(9);
    for k in 0..500 {
        let len = 2 + k % 11;
        let path = random::path(&mut rng, len);
        for p in [1.0, 1.5, 2.0, 3.0] {
            let brute = pvar_1d_brute(&path, p);
            let dp = pvar_1d(&path, p).unwrap();
            assert!((dp.power_sum - brute).abs() <= 1e-12 * brute.max(1.0), "len {len} p {p}");
        }
    }
}

#[test]
fn exact_vp_matches_joint_enumeration() {
    let mut rng = random::rng(10);
    for (nx, ny) in [(2, 2), (3, 2), (3, 3), (4, 3), (2, 5)] {
        for _ in 0..5 {
            let f = random::grid_function(&mut rng, nx, ny).unwrap();
            for p in [1.0, 2.0, 3.0] {
                let brute = index_sub_dissections(0, nx)
                    .flat_map(|dx| index_sub_dissections(0, ny).map(move |dy| (dx.clone(), dy)))
                    .map(|(dx, dy)| gridlike_power_sum(&f, p, &dx, &dy))
                    .fold(f64::NEG_INFINITY, f64::max);
                let v = vp_2d_exact(&f, p, &f.domain(), &Limits::default()).unwrap();
                assert!((v.power_sum - brute).abs() <= 1e-12 * brute.max(1.0));
            }
        }
    }
}
