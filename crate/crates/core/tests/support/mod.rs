//! Independent oracles shared by the oracle and acceptance targets.

use std::collections::BTreeSet;

use pvar2d::geometry::{enumerate_rect_partitions, index_sub_dissections, Limits};

pub type Piece = (usize, usize, usize, usize);
pub type Tiling = Vec<Piece>;

/// Occupancy recursion scanning cells column by column, tallest pieces
/// first: a different traversal from the library's.
pub fn occupancy_oracle(nx: usize, ny: usize) -> BTreeSet<Tiling> {
    fn go(nx: usize, ny: usize, used: &mut Vec<Vec<bool>>, acc: &mut Tiling, out: &mut BTreeSet<Tiling>) {
        let first = (0..nx).flat_map(|i| (0..ny).map(move |j| (i, j))).find(|&(i, j)| !used[i][j]);
        let Some((i, j)) = first else {
            let mut t = acc.clone();
            t.sort();
            out.insert(t);
            return;
        };
        for h in (1..=ny - j).rev() {
            if (j..j + h).any(|jj| used[i][jj]) {
                continue;
            }
            for w in (1..=nx - i).rev() {
                let free = (i..i + w).all(|ii| (j..j + h).all(|jj| !used[ii][jj]));
                if !free {
                    continue;
                }
                for ii in i..i + w {
                    for jj in j..j + h {
                        used[ii][jj] = true;
                    }
                }
                acc.push((i, i + w, j, j + h));
                go(nx, ny, used, acc, out);
                acc.pop();
                for ii in i..i + w {
                    for jj in j..j + h {
                        used[ii][jj] = false;
                    }
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    go(nx, ny, &mut vec![vec![false; ny]; nx], &mut Vec::new(), &mut out);
    out
}

/// Rectangulations as wall sets: every subset of interior unit edges whose
/// cell components are rectangles and whose walls all separate distinct
/// components.
pub fn wall_oracle(nx: usize, ny: usize) -> BTreeSet<Tiling> {
    // vertical walls between (i, j) and (i + 1, j), then horizontal walls
    // between (i, j) and (i, j + 1)
    let mut edges = Vec::new();
    for i in 0..nx - 1 {
        for j in 0..ny {
            edges.push(((i, j), (i + 1, j)));
        }
    }
    for i in 0..nx {
        for j in 0..ny - 1 {
            edges.push(((i, j), (i, j + 1)));
        }
    }
    let mut out = BTreeSet::new();
    for mask in 0u64..(1 << edges.len()) {
        let mut label = vec![usize::MAX; nx * ny];
        let mut next = 0;
        for start in 0..nx * ny {
            if label[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            label[start] = next;
            while let Some(c) = stack.pop() {
                let (ci, cj) = (c / ny, c % ny);
                for (k, &(a, b)) in edges.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        continue;
                    }
                    let other = if a == (ci, cj) {
                        b
                    } else if b == (ci, cj) {
                        a
                    } else {
                        continue;
                    };
                    let o = other.0 * ny + other.1;
                    if label[o] == usize::MAX {
                        label[o] = next;
                        stack.push(o);
                    }
                }
            }
            next += 1;
        }
        let dangling = edges
            .iter()
            .enumerate()
            .any(|(k, &(a, b))| mask >> k & 1 == 1 && label[a.0 * ny + a.1] == label[b.0 * ny + b.1]);
        if dangling {
            continue;
        }
        let mut tiling = Vec::new();
        let mut ok = true;
        for l in 0..next {
            let cells: Vec<(usize, usize)> = (0..nx * ny).filter(|&c| label[c] == l).map(|c| (c / ny, c % ny)).collect();
            let i0 = cells.iter().map(|c| c.0).min().unwrap();
            let i1 = cells.iter().map(|c| c.0).max().unwrap() + 1;
            let j0 = cells.iter().map(|c| c.1).min().unwrap();
            let j1 = cells.iter().map(|c| c.1).max().unwrap() + 1;
            if cells.len() != (i1 - i0) * (j1 - j0) {
                ok = false;
                break;
            }
            tiling.push((i0, i1, j0, j1));
        }
        if ok {
            tiling.sort();
            out.insert(tiling);
        }
    }
    out
}

pub fn library_set(nx: usize, ny: usize) -> (usize, BTreeSet<Tiling>) {
    let mut count = 0;
    let mut set = BTreeSet::new();
    for part in enumerate_rect_partitions(nx, ny, &Limits::default()).unwrap() {
        count += 1;
        let t: Tiling = part
            .canonical()
            .into_iter()
            .map(|[a, b, c, d]| (a as usize, b as usize, c as usize, d as usize))
            .collect();
        set.insert(t);
    }
    (count, set)
}

/// Largest `sum |path_{k+1} - path_k|^p` over every sub-dissection.
pub fn pvar_1d_brute(path: &[f64], p: f64) -> f64 {
    index_sub_dissections(0, path.len() - 1)
        .map(|d| d.windows(2).map(|w| (path[w[1]] - path[w[0]]).abs().powf(p)).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}
