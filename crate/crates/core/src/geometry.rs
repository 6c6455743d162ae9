//! Rectangles, dissections and rectangle partitions.
//!
//! Real-coordinate types ([`Rect`], [`Dissection`], [`RectPartition`]) are
//! what callers see; the search code works on [`GridIndexRect`], the integer
//! shadow of a rectangle on a base grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinates closer than this are treated as the same point.
pub const COORD_TOL: f64 = 1e-12;

/// Caps for the exhaustive searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Maximum number of grid cells for rectangulation enumeration.
    pub max_cells: usize,
    /// Maximum number of interior grid points per axis for exact `V_p`.
    pub max_interior: usize,
}

impl Limits {
    pub const DEFAULT_MAX_CELLS: usize = 16;
    pub const DEFAULT_MAX_INTERIOR: usize = 12;
    /// Hard ceiling imposed by the 64-bit cell mask.
    pub const MASK_BITS: usize = 64;

    pub fn new(max_cells: usize, max_interior: usize) -> Result<Self> {
        if max_cells == 0 || max_interior == 0 {
            return Err(Error::Usage("caps must be positive".into()));
        }
        if max_cells > Self::MASK_BITS {
            return Err(Error::CapExceeded {
                what: "cell cap",
                value: max_cells,
                cap: Self::MASK_BITS,
            });
        }
        if max_interior > 62 {
            return Err(Error::CapExceeded {
                what: "interior point cap",
                value: max_interior,
                cap: 62,
            });
        }
        Ok(Limits {
            max_cells,
            max_interior,
        })
    }

    pub(crate) fn check_cells(&self, cells: usize) -> Result<()> {
        if cells > self.max_cells {
            Err(Error::CapExceeded {
                what: "cell count",
                value: cells,
                cap: self.max_cells,
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_interior(&self, interior: usize) -> Result<()> {
        if interior > self.max_interior {
            Err(Error::CapExceeded {
                what: "interior points per axis",
                value: interior,
                cap: self.max_interior,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_cells: Self::DEFAULT_MAX_CELLS,
            max_interior: Self::DEFAULT_MAX_INTERIOR,
        }
    }
}

/// Closed rectangle `[a, b] x [c, d]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Rect {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let finite = a.is_finite() && b.is_finite() && c.is_finite() && d.is_finite();
        if !finite || a > b || c > d {
            return Err(Error::InvalidRect { a, b, c, d });
        }
        Ok(Rect { a, b, c, d })
    }

    pub fn square(lo: f64, hi: f64) -> Result<Self> {
        Rect::new(lo, hi, lo, hi)
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn height(&self) -> f64 {
        self.d - self.c
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn is_degenerate(&self) -> bool {
        self.width() <= COORD_TOL || self.height() <= COORD_TOL
    }

    /// Intersection rectangle, `None` when the rectangles do not meet.
    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        let a = self.a.max(other.a);
        let b = self.b.min(other.b);
        let c = self.c.max(other.c);
        let d = self.d.min(other.d);
        if a > b + COORD_TOL || c > d + COORD_TOL {
            None
        } else {
            Some(Rect {
                a,
                b: b.max(a),
                c,
                d: d.max(c),
            })
        }
    }

    pub fn contains(&self, other: &Rect) -> bool {
        other.a >= self.a - COORD_TOL
            && other.b <= self.b + COORD_TOL
            && other.c >= self.c - COORD_TOL
            && other.d <= self.d + COORD_TOL
    }

    pub fn contains_point(&self, s: f64, t: f64) -> bool {
        s >= self.a - COORD_TOL
            && s <= self.b + COORD_TOL
            && t >= self.c - COORD_TOL
            && t <= self.d + COORD_TOL
    }

    /// Swap the two axes.
    pub fn transpose(&self) -> Rect {
        Rect {
            a: self.c,
            b: self.d,
            c: self.a,
            d: self.b,
        }
    }
}

impl std::fmt::Display for Rect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}] x [{}, {}]", self.a, self.b, self.c, self.d)
    }
}

/// True iff the intersection of the two rectangles is empty or degenerate.
pub fn essentially_disjoint(r1: &Rect, r2: &Rect) -> bool {
    match r1.intersection(r2) {
        None => true,
        Some(i) => i.is_degenerate(),
    }
}

/// Strictly increasing sequence of points; the first and last are the
/// endpoints of the dissected interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Dissection {
    points: Vec<f64>,
}

impl Dissection {
    /// Build from a nondecreasing sequence. Points closer than
    /// [`COORD_TOL`] to their predecessor are dropped.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if let Some(bad) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidDissection(format!("non-finite point {bad}")));
        }
        let mut out: Vec<f64> = Vec::with_capacity(points.len());
        for p in points {
            match out.last() {
                Some(&last) if p < last - COORD_TOL => {
                    return Err(Error::InvalidDissection(format!(
                        "points must be nondecreasing ({p} after {last})"
                    )))
                }
                Some(&last) if p - last <= COORD_TOL => {}
                _ => out.push(p),
            }
        }
        if out.len() < 2 {
            return Err(Error::InvalidDissection(
                "need at least two distinct points".into(),
            ));
        }
        Ok(Dissection { points: out })
    }

    /// `n` equally spaced points from `lo` to `hi` inclusive.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(hi > lo) {
            return Err(Error::InvalidDissection(format!(
                "uniform dissection needs n >= 2 and lo < hi (got n={n}, [{lo}, {hi}])"
            )));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let mut pts: Vec<f64> = (0..n).map(|k| lo + step * k as f64).collect();
        pts[n - 1] = hi;
        Dissection::new(pts)
    }

    /// The integer points `0, 1, ..., n - 1`.
    pub fn integers(n: usize) -> Result<Self> {
        Dissection::new((0..n).map(|k| k as f64).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn lo(&self) -> f64 {
        self.points[0]
    }

    pub fn hi(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn interior_len(&self) -> usize {
        self.points.len() - 2
    }

    /// Index of the point within [`COORD_TOL`] of `x`.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let k = self.points.partition_point(|&p| p < x - COORD_TOL);
        (k < self.points.len() && (self.points[k] - x).abs() <= COORD_TOL).then_some(k)
    }

    /// Sub-dissection made of the points at `indices` (increasing).
    pub fn select(&self, indices: &[usize]) -> Result<Dissection> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDissection(
                "selection indices must be strictly increasing".into(),
            ));
        }
        let pts = indices
            .iter()
            .map(|&k| {
                self.points.get(k).copied().ok_or_else(|| {
                    Error::InvalidDissection(format!("index {k} out of range"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Dissection::new(pts)
    }

    /// Indices of this dissection's points on `grid`.
    pub fn indices_on(&self, grid: &Dissection) -> Result<Vec<usize>> {
        self.points
            .iter()
            .map(|&x| grid.index_of(x).ok_or(Error::OffGrid { s: x, t: f64::NAN }))
            .collect()
    }
}

impl TryFrom<Vec<f64>> for Dissection {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Dissection::new(v)
    }
}

impl From<Dissection> for Vec<f64> {
    fn from(d: Dissection) -> Self {
        d.points
    }
}

/// Every increasing index sequence from `lo` to `hi` (both included),
/// ordered by the bitmask of chosen interior points.
pub fn index_sub_dissections(lo: usize, hi: usize) -> impl Iterator<Item = Vec<usize>> {
    assert!(lo < hi, "index_sub_dissections needs lo < hi");
    let interior = hi - lo - 1;
    assert!(interior < 63, "too many interior points to enumerate");
    (0u64..(1u64 << interior)).map(move |mask| {
        let mut v = Vec::with_capacity(mask.count_ones() as usize + 2);
        v.push(lo);
        v.extend((0..interior).filter(|k| mask >> k & 1 == 1).map(|k| lo + 1 + k));
        v.push(hi);
        v
    })
}

/// Rectangle given by indices into the axes of a base grid,
/// `[xs[i0], xs[i1]] x [ys[j0], ys[j1]]` with `i0 < i1`, `j0 < j1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridIndexRect {
    pub i0: usize,
    pub i1: usize,
    pub j0: usize,
    pub j1: usize,
}

impl GridIndexRect {
    pub fn new(i0: usize, i1: usize, j0: usize, j1: usize) -> Result<Self> {
        if i0 >= i1 || j0 >= j1 {
            return Err(Error::InvalidPartition(format!(
                "degenerate index rectangle [{i0},{i1}]x[{j0},{j1}]"
            )));
        }
        Ok(GridIndexRect { i0, i1, j0, j1 })
    }

    pub fn cells(&self) -> usize {
        (self.i1 - self.i0) * (self.j1 - self.j0)
    }

    pub fn to_rect(&self, xs: &Dissection, ys: &Dissection) -> Rect {
        Rect {
            a: xs.points()[self.i0],
            b: xs.points()[self.i1],
            c: ys.points()[self.j0],
            d: ys.points()[self.j1],
        }
    }

    pub fn transpose(&self) -> GridIndexRect {
        GridIndexRect {
            i0: self.j0,
            i1: self.j1,
            j0: self.i0,
            j1: self.i1,
        }
    }

    pub(crate) fn offset(&self, di: usize, dj: usize) -> GridIndexRect {
        GridIndexRect {
            i0: self.i0 + di,
            i1: self.i1 + di,
            j0: self.j0 + dj,
            j1: self.j1 + dj,
        }
    }

    /// Every non-degenerate grid rectangle with `i0 < i1 < nx_points`,
    /// `j0 < j1 < ny_points`.
    pub fn all(nx_points: usize, ny_points: usize) -> impl Iterator<Item = GridIndexRect> {
        (0..nx_points).flat_map(move |i0| {
            (i0 + 1..nx_points).flat_map(move |i1| {
                (0..ny_points).flat_map(move |j0| {
                    (j0 + 1..ny_points).map(move |j1| GridIndexRect { i0, i1, j0, j1 })
                })
            })
        })
    }
}

/// Finite set of essentially disjoint rectangles whose union is `target`.
///
/// Construction does not validate; see [`validate_partition`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectPartition {
    pub target: Rect,
    pub rects: Vec<Rect>,
}

impl RectPartition {
    pub fn new(target: Rect, rects: Vec<Rect>) -> Self {
        RectPartition { target, rects }
    }

    pub fn from_index(xs: &Dissection, ys: &Dissection, rects: &[GridIndexRect]) -> Self {
        let target = Rect {
            a: rects.iter().map(|r| xs.points()[r.i0]).fold(f64::INFINITY, f64::min),
            b: rects.iter().map(|r| xs.points()[r.i1]).fold(f64::NEG_INFINITY, f64::max),
            c: rects.iter().map(|r| ys.points()[r.j0]).fold(f64::INFINITY, f64::min),
            d: rects.iter().map(|r| ys.points()[r.j1]).fold(f64::NEG_INFINITY, f64::max),
        };
        RectPartition {
            target,
            rects: rects.iter().map(|r| r.to_rect(xs, ys)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    /// Members mapped to index rectangles on the grid `xs x ys`.
    pub fn to_index(&self, xs: &Dissection, ys: &Dissection) -> Result<Vec<GridIndexRect>> {
        self.rects
            .iter()
            .map(|r| {
                let look = |axis: &Dissection, v: f64, other: f64, s_axis: bool| {
                    axis.index_of(v).ok_or(if s_axis {
                        Error::OffGrid { s: v, t: other }
                    } else {
                        Error::OffGrid { s: other, t: v }
                    })
                };
                GridIndexRect::new(
                    look(xs, r.a, r.c, true)?,
                    look(xs, r.b, r.c, true)?,
                    look(ys, r.c, r.a, false)?,
                    look(ys, r.d, r.a, false)?,
                )
            })
            .collect()
    }

    /// Canonical form for set comparison: members sorted lexicographically.
    pub fn canonical(&self) -> Vec<[f64; 4]> {
        let mut v: Vec<[f64; 4]> = self.rects.iter().map(|r| [r.a, r.b, r.c, r.d]).collect();
        v.sort_by(|x, y| x.partial_cmp(y).expect("finite coordinates"));
        v
    }

    pub fn transpose(&self) -> RectPartition {
        RectPartition {
            target: self.target.transpose(),
            rects: self.rects.iter().map(Rect::transpose).collect(),
        }
    }
}

fn distinct_sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(v.len());
    for x in v {
        if out.last().is_none_or(|&l| x - l > COORD_TOL) {
            out.push(x);
        }
    }
    out
}

/// Checks every `RectPartition` invariant: members non-degenerate, inside
/// the target, pairwise essentially disjoint, area sum equal to the target
/// area, and every cell of the edge grid covered exactly once.
pub fn validate_partition(p: &RectPartition) -> bool {
    let t = &p.target;
    if t.is_degenerate() || p.rects.is_empty() {
        return false;
    }
    for (k, r) in p.rects.iter().enumerate() {
        if r.a > r.b || r.c > r.d || r.is_degenerate() || !t.contains(r) {
            return false;
        }
        if p.rects[k + 1..].iter().any(|s| !essentially_disjoint(r, s)) {
            return false;
        }
    }
    let area: f64 = p.rects.iter().map(Rect::area).sum();
    if (area - t.area()).abs() > 1e-9 * t.area().max(1.0) {
        return false;
    }
    let xs = distinct_sorted(
        p.rects
            .iter()
            .flat_map(|r| [r.a, r.b])
            .chain([t.a, t.b])
            .collect(),
    );
    let ys = distinct_sorted(
        p.rects
            .iter()
            .flat_map(|r| [r.c, r.d])
            .chain([t.c, t.d])
            .collect(),
    );
    for w in xs.windows(2) {
        for h in ys.windows(2) {
            let (ms, mt) = (0.5 * (w[0] + w[1]), 0.5 * (h[0] + h[1]));
            let covering = p
                .rects
                .iter()
                .filter(|r| ms > r.a && ms < r.b && mt > r.c && mt < r.d)
                .count();
            if covering != 1 {
                return false;
            }
        }
    }
    true
}

/// Grid-like partition `{[t_i, t_{i+1}] x [t'_j, t'_{j+1}]}`.
pub fn enumerate_gridlike(dx: &Dissection, dy: &Dissection) -> RectPartition {
    let target = Rect {
        a: dx.lo(),
        b: dx.hi(),
        c: dy.lo(),
        d: dy.hi(),
    };
    let mut rects = Vec::with_capacity((dx.len() - 1) * (dy.len() - 1));
    for w in dx.points().windows(2) {
        for h in dy.points().windows(2) {
            rects.push(Rect {
                a: w[0],
                b: w[1],
                c: h[0],
                d: h[1],
            });
        }
    }
    RectPartition { target, rects }
}

/// Result of [`refine_to_gridlike`].
#[derive(Clone, Debug, PartialEq)]
pub struct Refinement {
    pub dx: Dissection,
    pub dy: Dissection,
    /// For each input rectangle (same order), the grid cells `(i, j)` it
    /// covers; cell `(i, j)` is `[dx[i], dx[i+1]] x [dy[j], dy[j+1]]`.
    pub cells: Vec<Vec<(usize, usize)>>,
}

/// Coarsest grid-like partition refining `p`: the dissections are all edge
/// coordinates of the members.
pub fn refine_to_gridlike(p: &RectPartition) -> Result<Refinement> {
    if !validate_partition(p) {
        return Err(Error::InvalidPartition(
            "cannot refine an invalid partition".into(),
        ));
    }
    let dx = Dissection::new(distinct_sorted(
        p.rects.iter().flat_map(|r| [r.a, r.b]).collect(),
    ))?;
    let dy = Dissection::new(distinct_sorted(
        p.rects.iter().flat_map(|r| [r.c, r.d]).collect(),
    ))?;
    let index = p.to_index(&dx, &dy)?;
    let cells = index
        .iter()
        .map(|r| {
            (r.i0..r.i1)
                .flat_map(|i| (r.j0..r.j1).map(move |j| (i, j)))
                .collect()
        })
        .collect();
    Ok(Refinement { dx, dy, cells })
}

/// Depth-first generator of all rectangulations of an `nx x ny` cell grid.
///
/// State is the bitmask of covered cells (bit `j * nx + i`). At each node
/// the first uncovered cell in row-major order (bottom row first) becomes
/// the lower-left corner of the next piece; every rectangle anchored there
/// that fits in the uncovered region is tried, widths first. Each
/// rectangulation is produced exactly once.
pub struct IndexRectangulations {
    nx: usize,
    ny: usize,
    full: u64,
    stack: Vec<Frame>,
    chosen: Vec<GridIndexRect>,
    started: bool,
}

struct Frame {
    mask: u64,
    candidates: Vec<(GridIndexRect, u64)>,
    next: usize,
}

impl IndexRectangulations {
    pub fn new(nx: usize, ny: usize, limits: &Limits) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::Dimension(format!(
                "grid must have at least one cell per axis (got {nx} x {ny})"
            )));
        }
        limits.check_cells(nx * ny)?;
        if nx * ny > Limits::MASK_BITS {
            return Err(Error::CapExceeded {
                what: "cell count",
                value: nx * ny,
                cap: Limits::MASK_BITS,
            });
        }
        let full = if nx * ny == 64 {
            u64::MAX
        } else {
            (1u64 << (nx * ny)) - 1
        };
        Ok(IndexRectangulations {
            nx,
            ny,
            full,
            stack: Vec::new(),
            chosen: Vec::new(),
            started: false,
        })
    }

    fn frame(&self, mask: u64) -> Frame {
        let first = (!mask).trailing_zeros() as usize;
        let (i, j) = (first % self.nx, first / self.nx);
        let bit = |ii: usize, jj: usize| 1u64 << (jj * self.nx + ii);
        let mut candidates = Vec::new();
        let mut row = 0u64;
        for w in 1..=self.nx - i {
            if mask & bit(i + w - 1, j) != 0 {
                break;
            }
            row |= bit(i + w - 1, j);
            let mut block = 0u64;
            for h in 1..=self.ny - j {
                let strip = row << (self.nx * (h - 1));
                if mask & strip != 0 {
                    break;
                }
                block |= strip;
                candidates.push((
                    GridIndexRect {
                        i0: i,
                        i1: i + w,
                        j0: j,
                        j1: j + h,
                    },
                    block,
                ));
            }
        }
        Frame {
            mask,
            candidates,
            next: 0,
        }
    }
}

impl Iterator for IndexRectangulations {
    type Item = Vec<GridIndexRect>;

    fn next(&mut self) -> Option<Self::Item> {
        if !self.started {
            self.started = true;
            let root = self.frame(0);
            self.stack.push(root);
        }
        loop {
            let depth = self.stack.len();
            let top = self.stack.last_mut()?;
            if top.next < top.candidates.len() {
                let (rect, bits) = top.candidates[top.next];
                top.next += 1;
                let mask = top.mask | bits;
                self.chosen.truncate(depth - 1);
                self.chosen.push(rect);
                if mask == self.full {
                    return Some(self.chosen.clone());
                }
                let child = self.frame(mask);
                self.stack.push(child);
            } else {
                self.stack.pop();
            }
        }
    }
}

/// Every rectangulation of the `nx x ny` cell grid, as partitions of
/// `[0, nx] x [0, ny]` with integer coordinates.
pub fn enumerate_rect_partitions(
    nx: usize,
    ny: usize,
    limits: &Limits,
) -> Result<impl Iterator<Item = RectPartition>> {
    let inner = IndexRectangulations::new(nx, ny, limits)?;
    let xs = Dissection::integers(nx + 1)?;
    let ys = Dissection::integers(ny + 1)?;
    Ok(inner.map(move |rs| RectPartition::from_index(&xs, &ys, &rs)))
}

/// Rectangulations of the cells inside `r` (an index rectangle of some
/// grid), expressed in that grid's indices.
pub(crate) fn rectangulations_of(
    r: &GridIndexRect,
    limits: &Limits,
) -> Result<impl Iterator<Item = Vec<GridIndexRect>>> {
    let (di, dj) = (r.i0, r.j0);
    Ok(
        IndexRectangulations::new(r.i1 - r.i0, r.j1 - r.j0, limits)?.map(move |rs| {
            rs.into_iter().map(|q| q.offset(di, dj)).collect()
        }),
    )
}
