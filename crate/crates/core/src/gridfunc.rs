//! Functions of two variables sampled on a rectangular grid.

use crate::error::{Error, Result};
use crate::geometry::{validate_partition, Dissection, GridIndexRect, Rect, RectPartition};

/// Real function on the grid `xs x ys`; `value(i, j) = f(xs[i], ys[j])`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    xs: Dissection,
    ys: Dissection,
    // row-major in i: values[i * ny + j]
    values: Vec<f64>,
}

impl GridFunction {
    /// `table[i][j] = f(xs[i], ys[j])`.
    pub fn new(xs: Dissection, ys: Dissection, table: Vec<Vec<f64>>) -> Result<Self> {
        if table.len() != xs.len() {
            return Err(Error::Dimension(format!(
                "table has {} rows for {} s-axis points",
                table.len(),
                xs.len()
            )));
        }
        let ny = ys.len();
        let mut values = Vec::with_capacity(xs.len() * ny);
        for (i, row) in table.into_iter().enumerate() {
            if row.len() != ny {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries for {ny} t-axis points",
                    row.len()
                )));
            }
            values.extend(row);
        }
        Self::from_flat(xs, ys, values)
    }

    pub(crate) fn from_flat(xs: Dissection, ys: Dissection, values: Vec<f64>) -> Result<Self> {
        let ny = ys.len();
        if values.len() != xs.len() * ny {
            return Err(Error::Dimension(format!(
                "{} values for a {}x{} grid",
                values.len(),
                xs.len(),
                ny
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { i: k / ny, j: k % ny });
        }
        Ok(GridFunction { xs, ys, values })
    }

    /// Sample a closure on `xs x ys`.
    pub fn sample(xs: Dissection, ys: Dissection, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = xs
            .points()
            .iter()
            .flat_map(|&s| ys.points().iter().map(move |&t| (s, t)))
            .map(|(s, t)| f(s, t))
            .collect();
        Self::from_flat(xs, ys, values)
    }

    pub fn xs(&self) -> &Dissection {
        &self.xs
    }

    pub fn ys(&self) -> &Dissection {
        &self.ys
    }

    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn ny(&self) -> usize {
        self.ys.len()
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ys.len() + j]
    }

    /// Table with `table[i][j] = f(xs[i], ys[j])`.
    pub fn table(&self) -> Vec<Vec<f64>> {
        self.values
            .chunks(self.ys.len())
            .map(<[f64]>::to_vec)
            .collect()
    }

    /// Whole sample domain.
    pub fn domain(&self) -> Rect {
        Rect {
            a: self.xs.lo(),
            b: self.xs.hi(),
            c: self.ys.lo(),
            d: self.ys.hi(),
        }
    }

    pub fn full_index_rect(&self) -> GridIndexRect {
        GridIndexRect {
            i0: 0,
            i1: self.nx() - 1,
            j0: 0,
            j1: self.ny() - 1,
        }
    }

    /// Rectangular increment over `[xs[i0], xs[i1]] x [ys[j0], ys[j1]]`;
    /// degenerate index ranges give exactly zero.
    #[inline]
    pub fn increment_idx(&self, i0: usize, i1: usize, j0: usize, j1: usize) -> f64 {
        if i0 == i1 || j0 == j1 {
            return 0.0;
        }
        self.value(i1, j1) - self.value(i0, j1) - self.value(i1, j0) + self.value(i0, j0)
    }

    #[inline]
    pub fn increment(&self, r: &GridIndexRect) -> f64 {
        self.increment_idx(r.i0, r.i1, r.j0, r.j1)
    }

    /// Grid indices of the corners of `r`, allowing degenerate rectangles.
    pub fn corner_indices(&self, r: &Rect) -> Result<(usize, usize, usize, usize)> {
        let s = |x: f64, t: f64| self.xs.index_of(x).ok_or(Error::OffGrid { s: x, t });
        let t = |y: f64, s: f64| self.ys.index_of(y).ok_or(Error::OffGrid { s, t: y });
        Ok((s(r.a, r.c)?, s(r.b, r.c)?, t(r.c, r.a)?, t(r.d, r.a)?))
    }

    /// Index rectangle for a non-degenerate `r` with corners on the grid.
    pub fn index_rect(&self, r: &Rect) -> Result<GridIndexRect> {
        let (i0, i1, j0, j1) = self.corner_indices(r)?;
        GridIndexRect::new(i0, i1, j0, j1)
    }

    /// Restriction to the points inside `r` (corners on the grid).
    pub fn restrict(&self, r: &GridIndexRect) -> GridFunction {
        let xs = Dissection::new(self.xs.points()[r.i0..=r.i1].to_vec()).expect("sub-axis");
        let ys = Dissection::new(self.ys.points()[r.j0..=r.j1].to_vec()).expect("sub-axis");
        let values = (r.i0..=r.i1)
            .flat_map(|i| (r.j0..=r.j1).map(move |j| (i, j)))
            .map(|(i, j)| self.value(i, j))
            .collect();
        GridFunction { xs, ys, values }
    }

    /// Same values on new axes of identical lengths (e.g. an affine
    /// reparametrization).
    pub fn with_axes(&self, xs: Dissection, ys: Dissection) -> Result<GridFunction> {
        if xs.len() != self.nx() || ys.len() != self.ny() {
            return Err(Error::Dimension("replacement axes change the grid size".into()));
        }
        Ok(GridFunction {
            xs,
            ys,
            values: self.values.clone(),
        })
    }

    /// `g(t, s) = f(s, t)`.
    pub fn transpose(&self) -> GridFunction {
        let (nx, ny) = (self.nx(), self.ny());
        let values = (0..ny)
            .flat_map(|j| (0..nx).map(move |i| (i, j)))
            .map(|(i, j)| self.value(i, j))
            .collect();
        GridFunction {
            xs: self.ys.clone(),
            ys: self.xs.clone(),
            values,
        }
    }

    /// `f(s, t) = 0` whenever `s = xs[0]` or `t = ys[0]`.
    pub fn vanishes_on_axes(&self) -> bool {
        (0..self.nx()).all(|i| self.value(i, 0) == 0.0)
            && (0..self.ny()).all(|j| self.value(0, j) == 0.0)
    }

    /// Copy with the first row and first column set to zero.
    pub fn zero_axes(&self) -> GridFunction {
        let mut g = self.clone();
        let ny = self.ny();
        for i in 0..self.nx() {
            g.values[i * ny] = 0.0;
        }
        for j in 0..ny {
            g.values[j] = 0.0;
        }
        g
    }
}

/// Four-corner increment `f(b,d) - f(a,d) - f(b,c) + f(a,c)` of a grid
/// function over a rectangle whose corners lie on its grid.
pub fn rect_increment(f: &GridFunction, r: &Rect) -> Result<f64> {
    let (i0, i1, j0, j1) = f.corner_indices(r)?;
    Ok(f.increment_idx(i0, i1, j0, j1))
}

/// `f(r) = sum f(A_i)` over the pieces of `split`, within `tol` absolute.
pub fn increment_additivity_check(
    f: &GridFunction,
    r: &Rect,
    split: &RectPartition,
    tol: f64,
) -> bool {
    if !validate_partition(split) || split.target != *r {
        return false;
    }
    let whole = match rect_increment(f, r) {
        Ok(v) => v,
        Err(_) => return false,
    };
    let mut sum = 0.0;
    for piece in &split.rects {
        match rect_increment(f, piece) {
            Ok(v) => sum += v,
            Err(_) => return false,
        }
    }
    (whole - sum).abs() <= tol
}

/// `|v|^e * sgn(v)` with `sgn(0) = 0`, so zero increments map to zero for
/// every exponent.
pub fn signed_power(v: f64, e: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.abs().powf(e) * v.signum()
    }
}

/// Step function `y = sum_j c_j 1_{Q^_j}` with `c_j = |x(Q_j)|^{p-1} sgn x(Q_j)`
/// and `Q^_j = (a, b] x (c, d]` for `Q_j = [a, b] x [c, d]`.
///
/// `y` lives on the grid of `x`: grid point `(i, j)` belongs to the piece
/// `[i0, i1] x [j0, j1]` iff `i0 < i <= i1` and `j0 < j <= j1`. The first row
/// and column lie in no piece and are zero.
pub fn build_dual_step_function(x: &GridFunction, q: &RectPartition, p: f64) -> Result<GridFunction> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Exponent(format!("dual step function needs p >= 1, got {p}")));
    }
    if !validate_partition(q) {
        return Err(Error::InvalidPartition("not a valid partition".into()));
    }
    let dom = x.domain();
    let same = |u: f64, v: f64| (u - v).abs() <= crate::geometry::COORD_TOL;
    if !(same(q.target.a, dom.a) && same(q.target.b, dom.b) && same(q.target.c, dom.c) && same(q.target.d, dom.d)) {
        return Err(Error::InvalidPartition(
            "partition must cover the whole sample domain".into(),
        ));
    }
    let pieces = q.to_index(x.xs(), x.ys())?;
    let (nx, ny) = (x.nx(), x.ny());
    let mut values = vec![0.0; nx * ny];
    for piece in &pieces {
        let c = signed_power(x.increment(piece), p - 1.0);
        for i in piece.i0 + 1..=piece.i1 {
            for j in piece.j0 + 1..=piece.j1 {
                values[i * ny + j] = c;
            }
        }
    }
    GridFunction::from_flat(x.xs().clone(), x.ys().clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis(n: usize) -> Dissection {
        Dissection::uniform(0.0, 1.0, n).unwrap()
    }

    #[test]
    fn product_increment() {
        let f = GridFunction::sample(axis(3), axis(4), |s, t| s * t).unwrap();
        let r = Rect::square(0.0, 1.0).unwrap();
        assert!((rect_increment(&f, &r).unwrap() - 1.0).abs() < 1e-15);
        let sub = Rect::new(0.5, 1.0, 0.0, 1.0 / 3.0).unwrap();
        assert!((rect_increment(&f, &sub).unwrap() - 0.5 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_and_separable_increments_vanish() {
        let f = GridFunction::sample(axis(4), axis(4), |s, t| (3.0 * s).sin() + t * t).unwrap();
        let deg = Rect::new(0.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(rect_increment(&f, &deg).unwrap(), 0.0);
        let r = Rect::new(1.0 / 3.0, 1.0, 0.0, 2.0 / 3.0).unwrap();
        assert!(rect_increment(&f, &r).unwrap().abs() < 1e-15);
    }

    #[test]
    fn off_grid_corner_is_an_error() {
        let f = GridFunction::sample(axis(3), axis(3), |s, t| s + t).unwrap();
        let r = Rect::new(0.0, 0.7, 0.0, 1.0).unwrap();
        assert!(matches!(rect_increment(&f, &r), Err(Error::OffGrid { .. })));
    }

    #[test]
    fn dimension_and_finiteness_checked() {
        assert!(matches!(
            GridFunction::new(axis(2), axis(2), vec![vec![0.0, 1.0], vec![0.0]]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            GridFunction::new(axis(2), axis(2), vec![vec![0.0, 1.0], vec![0.0, f64::NAN]]),
            Err(Error::NonFinite { i: 1, j: 1 })
        ));
    }

    #[test]
    fn additivity_over_halves_and_full_refinement() {
        let f = GridFunction::sample(axis(5), axis(5), |s, t| (s - 2.0 * t).exp() * s).unwrap();
        let r = f.domain();
        let halves = RectPartition::new(
            r,
            vec![Rect::new(0.0, 0.5, 0.0, 1.0).unwrap(), Rect::new(0.5, 1.0, 0.0, 1.0).unwrap()],
        );
        assert!(increment_additivity_check(&f, &r, &halves, 1e-12));
        let full = crate::geometry::enumerate_gridlike(f.xs(), f.ys());
        assert!(increment_additivity_check(&f, &r, &full, 1e-12));
    }

    #[test]
    fn dual_step_single_piece() {
        let x = GridFunction::sample(axis(3), axis(3), |s, t| -2.0 * s * t).unwrap();
        let q = RectPartition::new(x.domain(), vec![x.domain()]);
        let y = build_dual_step_function(&x, &q, 3.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == 0 || j == 0 { 0.0 } else { -4.0 };
                assert_eq!(y.value(i, j), want);
            }
        }
        assert!(y.vanishes_on_axes());
    }

    #[test]
    fn dual_step_p_one_is_a_sign() {
        let x = GridFunction::sample(axis(4), axis(4), |s, t| (7.0 * s * t).sin() - s).unwrap();
        let q = crate::geometry::enumerate_gridlike(x.xs(), x.ys());
        let y = build_dual_step_function(&x, &q, 1.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!([-1.0, 0.0, 1.0].contains(&y.value(i, j)));
            }
        }
    }

    #[test]
    fn dual_step_two_by_two_by_hand() {
        // values on {0,1,2}^2; cell increments computed by hand below
        let xs = Dissection::integers(3).unwrap();
        let table = vec![vec![0.0, 0.0, 0.0], vec![0.0, 2.0, 1.0], vec![0.0, -1.0, 3.0]];
        let x = GridFunction::new(xs.clone(), xs.clone(), table).unwrap();
        // cell (0,0): 2 ; cell (0,1): 1 - 0 - 2 + 0 = -1
        // cell (1,0): -1 - 2 = -3 ; cell (1,1): 3 - 1 - (-1) + 2 = 5
        let q = crate::geometry::enumerate_gridlike(&xs, &xs);
        let y = build_dual_step_function(&x, &q, 2.0).unwrap();
        assert_eq!(y.table(), vec![vec![0.0, 0.0, 0.0], vec![0.0, 2.0, -1.0], vec![0.0, -3.0, 5.0]]);
    }

    #[test]
    fn dual_step_rejects_partial_cover() {
        let x = GridFunction::sample(axis(3), axis(3), |s, t| s * t).unwrap();
        let q = RectPartition::new(
            Rect::new(0.0, 0.5, 0.0, 1.0).unwrap(),
            vec![Rect::new(0.0, 0.5, 0.0, 1.0).unwrap()],
        );
        assert!(build_dual_step_function(&x, &q, 2.0).is_err());
    }

    #[test]
    fn transpose_swaps_values() {
        let f = GridFunction::sample(axis(2), axis(3), |s, t| s + 10.0 * t).unwrap();
        let g = f.transpose();
        assert_eq!(g.nx(), 3);
        assert_eq!(g.value(2, 1), f.value(1, 2));
    }
}
