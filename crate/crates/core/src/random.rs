//! Seeded random inputs for the randomized suites.
//!
//! The generator is `ChaCha8Rng::seed_from_u64(seed)` from `rand_chacha`;
//! grid values are drawn uniformly from `[-1, 1]` in row-major order
//! (`s` index outer, `t` index inner).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::{Dissection, GridIndexRect, IndexRectangulations, Limits, RectPartition};
use crate::gridfunc::GridFunction;

pub type SuiteRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut SuiteRng) -> f64 {
    rng.gen_range(-1.0..=1.0)
}

/// Grid function on the integer grid `{0..nx} x {0..ny}` (so `nx x ny`
/// cells) with independent uniform values.
pub fn grid_function(rng: &mut SuiteRng, nx_cells: usize, ny_cells: usize) -> Result<GridFunction> {
    let xs = Dissection::integers(nx_cells + 1)?;
    let ys = Dissection::integers(ny_cells + 1)?;
    let table: Vec<Vec<f64>> = (0..=nx_cells)
        .map(|_| (0..=ny_cells).map(|_| uniform(rng)).collect())
        .collect();
    GridFunction::new(xs, ys, table)
}

/// As [`grid_function`] with the values on `s = 0` and `t = 0` set to 0.
pub fn axis_zeroed(rng: &mut SuiteRng, nx_cells: usize, ny_cells: usize) -> Result<GridFunction> {
    Ok(grid_function(rng, nx_cells, ny_cells)?.zero_axes())
}

/// Path of `len` uniform samples.
pub fn path(rng: &mut SuiteRng, len: usize) -> Vec<f64> {
    (0..len).map(|_| uniform(rng)).collect()
}

/// Path of `len` samples starting at 0.
pub fn path_from_zero(rng: &mut SuiteRng, len: usize) -> Vec<f64> {
    let mut v = path(rng, len);
    if let Some(first) = v.first_mut() {
        *first = 0.0;
    }
    v
}

/// Uniformly chosen rectangulation of the `nx x ny` cell grid of `f`.
/// Enumerates all of them, so keep the grid small.
pub fn rectangulation(rng: &mut SuiteRng, f: &GridFunction, limits: &Limits) -> Result<RectPartition> {
    let all: Vec<Vec<GridIndexRect>> = IndexRectangulations::new(f.nx() - 1, f.ny() - 1, limits)?.collect();
    let pick = all.choose(rng).expect("at least one rectangulation");
    Ok(RectPartition::from_index(f.xs(), f.ys(), pick))
}

/// Random grid-like partition of the cell grid of `f`.
pub fn gridlike_partition(rng: &mut SuiteRng, f: &GridFunction) -> Result<RectPartition> {
    let pick = |rng: &mut SuiteRng, n: usize| {
        let mut d = vec![0];
        d.extend((1..n - 1).filter(|_| rng.gen_bool(0.5)));
        d.push(n - 1);
        d
    };
    let dx = pick(rng, f.nx());
    let dy = pick(rng, f.ny());
    let mut rects = Vec::new();
    for w in dx.windows(2) {
        for h in dy.windows(2) {
            rects.push(GridIndexRect {
                i0: w[0],
                i1: w[1],
                j0: h[0],
                j1: h[1],
            });
        }
    }
    Ok(RectPartition::from_index(f.xs(), f.ys(), &rects))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::validate_partition;

    #[test]
    fn deterministic_per_seed() {
        let a = grid_function(&mut rng(7), 3, 2).unwrap();
        let b = grid_function(&mut rng(7), 3, 2).unwrap();
        assert_eq!(a, b);
        let c = grid_function(&mut rng(8), 3, 2).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn partitions_are_valid() {
        let mut r = rng(1);
        let f = grid_function(&mut r, 3, 3).unwrap();
        for _ in 0..20 {
            assert!(validate_partition(&rectangulation(&mut r, &f, &Limits::default()).unwrap()));
            assert!(validate_partition(&gridlike_partition(&mut r, &f).unwrap()));
        }
    }

    #[test]
    fn values_in_range() {
        let mut r = rng(3);
        assert!(path(&mut r, 100).iter().all(|v| (-1.0..=1.0).contains(v)));
        assert_eq!(path_from_zero(&mut r, 4)[0], 0.0);
    }
}
