//! Rectangle set-functions on a grid and the finite-grid control checks:
//! super-additivity over every rectangulation, vanishing on degenerate
//! rectangles, domination of increments, and almost-subadditivity.
//!
//! Continuity cannot be observed on a finite grid; "control" in reports
//! means control in the finite-grid sense.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{rectangulations_of, Dissection, GridIndexRect, Limits, Rect, RectPartition};
use crate::gridfunc::GridFunction;
use crate::report::{InequalityReport, Tolerance, Witness, WorstCase};
use crate::variation::{abs_pow, controlled_exact_idx, vp_exact_idx};

/// Dense table `R -> w(R)` over every grid-aligned rectangle of a base
/// grid. Degenerate rectangles are not stored and read as 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlTable {
    xs: Dissection,
    ys: Dissection,
    /// Indexed by `((i0 * nx + i1) * ny + j0) * ny + j1`.
    entries: Vec<f64>,
}

impl ControlTable {
    /// Table from a function of index rectangles. Values must be finite and
    /// nonnegative.
    pub fn from_index_fn(
        xs: Dissection,
        ys: Dissection,
        mut w: impl FnMut(&GridIndexRect) -> Result<f64>,
    ) -> Result<Self> {
        let (nx, ny) = (xs.len(), ys.len());
        let mut entries = vec![0.0; nx * nx * ny * ny];
        for r in GridIndexRect::all(nx, ny) {
            let v = w(&r)?;
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Domain(format!(
                    "control value {v} on [{}, {}] x [{}, {}] is not a finite nonnegative number",
                    r.i0, r.i1, r.j0, r.j1
                )));
            }
            entries[((r.i0 * nx + r.i1) * ny + r.j0) * ny + r.j1] = v;
        }
        Ok(ControlTable { xs, ys, entries })
    }

    /// Table from a function of real rectangles.
    pub fn from_rect_fn(xs: Dissection, ys: Dissection, mut w: impl FnMut(&Rect) -> f64) -> Result<Self> {
        let (gx, gy) = (xs.clone(), ys.clone());
        Self::from_index_fn(xs, ys, |r| Ok(w(&r.to_rect(&gx, &gy))))
    }

    /// `w(R) = area(R)`, an additive control.
    pub fn area(xs: Dissection, ys: Dissection) -> Result<Self> {
        Self::from_rect_fn(xs, ys, |r| r.area())
    }

    pub fn xs(&self) -> &Dissection {
        &self.xs
    }

    pub fn ys(&self) -> &Dissection {
        &self.ys
    }

    pub fn get_idx(&self, i0: usize, i1: usize, j0: usize, j1: usize) -> f64 {
        if i0 >= i1 || j0 >= j1 {
            return 0.0;
        }
        let (nx, ny) = (self.xs.len(), self.ys.len());
        self.entries[((i0 * nx + i1) * ny + j0) * ny + j1]
    }

    pub fn get(&self, r: &GridIndexRect) -> f64 {
        self.get_idx(r.i0, r.i1, r.j0, r.j1)
    }

    /// Entry for a rectangle whose corners lie on the base grid.
    pub fn get_rect(&self, r: &Rect) -> Result<f64> {
        let i0 = self.xs.index_of(r.a).ok_or(Error::OffGrid { s: r.a, t: r.c })?;
        let i1 = self.xs.index_of(r.b).ok_or(Error::OffGrid { s: r.b, t: r.d })?;
        let j0 = self.ys.index_of(r.c).ok_or(Error::OffGrid { s: r.a, t: r.c })?;
        let j1 = self.ys.index_of(r.d).ok_or(Error::OffGrid { s: r.b, t: r.d })?;
        Ok(self.get_idx(i0, i1, j0, j1))
    }

    pub fn domain(&self) -> Rect {
        Rect {
            a: self.xs.lo(),
            b: self.xs.hi(),
            c: self.ys.lo(),
            d: self.ys.hi(),
        }
    }

    pub fn transpose(&self) -> ControlTable {
        let t = ControlTable::from_index_fn(self.ys.clone(), self.xs.clone(), |r| Ok(self.get(&r.transpose())));
        t.expect("transposed entries are already valid")
    }

    /// Every stored (non-degenerate) entry with its rectangle.
    pub fn iter(&self) -> impl Iterator<Item = (GridIndexRect, f64)> + '_ {
        GridIndexRect::all(self.xs.len(), self.ys.len()).map(move |r| (r, self.get(&r)))
    }
}

/// `w(R) = |f|^p_{p-var; R}` for every grid-aligned `R`, each by exhaustive
/// rectangulation search.
pub fn control_from_cpvar(f: &GridFunction, p: f64, limits: &Limits) -> Result<ControlTable> {
    check_p(p)?;
    limits.check_cells((f.nx() - 1) * (f.ny() - 1))?;
    ControlTable::from_index_fn(f.xs().clone(), f.ys().clone(), |r| {
        Ok(controlled_exact_idx(f, p, r, limits)?.0)
    })
}

/// `w(R) = V_p(f; R)^p` for every grid-aligned `R`. Not a control in
/// general: it can fail super-additivity.
pub fn table_from_vp(f: &GridFunction, p: f64, limits: &Limits) -> Result<ControlTable> {
    check_p(p)?;
    ControlTable::from_index_fn(f.xs().clone(), f.ys().clone(), |r| {
        Ok(vp_exact_idx(f, p, r, limits)?.0)
    })
}

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::Exponent(format!("p must be finite and >= 1, got {p}")))
    }
}

/// `sum_i w(R_i) <= w(R)` for every grid-aligned `R` and every
/// rectangulation of `R` into at least two pieces. One record per `R`,
/// carrying the partition with the least slack.
pub fn check_superadditive(w: &ControlTable, limits: &Limits, tol: Tolerance) -> Result<InequalityReport> {
    let (nx, ny) = (w.xs.len(), w.ys.len());
    limits.check_cells((nx - 1) * (ny - 1))?;
    let mut rep = InequalityReport::new("super-additivity (finite-grid control)", tol);
    for r in GridIndexRect::all(nx, ny) {
        if r.cells() < 2 {
            continue;
        }
        let whole = w.get(&r);
        let name = format!("sum w(R_i) <= w({})", r.to_rect(&w.xs, &w.ys));
        let mut fold = WorstCase::new(name, None, tol);
        for part in rectangulations_of(&r, limits)? {
            if part.len() < 2 {
                continue;
            }
            let sum: f64 = part.iter().map(|q| w.get(q)).sum();
            fold.push(sum, whole, || Witness::Partition {
                partition: RectPartition::from_index(&w.xs, &w.ys, &part),
            });
        }
        fold.finish_into(&mut rep);
    }
    Ok(rep)
}

/// `|f(R)|^p <= w(R)` for every grid-aligned `R`.
pub fn dominates_increments(w: &ControlTable, f: &GridFunction, p: f64, tol: Tolerance) -> Result<InequalityReport> {
    check_p(p)?;
    if w.xs.len() != f.nx() || w.ys.len() != f.ny() || w.xs.points() != f.xs().points() || w.ys.points() != f.ys().points()
    {
        return Err(Error::Dimension("table and function must share a base grid".into()));
    }
    let mut fold = WorstCase::new("|f(R)|^p <= w(R)", None, tol);
    for (r, v) in w.iter() {
        fold.push(abs_pow(f.increment(&r), p), v, || Witness::Rect {
            rect: r.to_rect(&w.xs, &w.ys),
        });
    }
    let mut rep = InequalityReport::new(format!("domination of increments p={p}"), tol);
    fold.finish_into(&mut rep);
    Ok(rep)
}

fn almost_subadd_terms(w: &ControlTable, i0: usize, i1: usize, j0: usize, j1: usize, j2: usize, p: f64) -> (f64, f64) {
    let whole = w.get_idx(i0, i1, j0, j2);
    let lower = w.get_idx(i0, i1, j0, j1);
    let upper = w.get_idx(i0, i1, j1, j2);
    let extra = p * 2f64.powf(p - 1.0) * whole.powf(1.0 - 1.0 / p) * lower.min(upper).powf(1.0 / p);
    (whole, lower + upper + extra)
}

/// `w([a,b] x [s,u]) <= w([a,b] x [s,t]) + w([a,b] x [t,u])
///   + p 2^{p-1} w([a,b] x [s,u])^{1-1/p} min(w([a,b] x [s,t]), w([a,b] x [t,u]))^{1/p}`,
/// for `w = |f|^p_{p-var}`.
#[allow(clippy::too_many_arguments)]
pub fn almost_subadd_check(
    w: &ControlTable,
    a: f64,
    b: f64,
    s: f64,
    t: f64,
    u: f64,
    p: f64,
    tol: Tolerance,
) -> Result<InequalityReport> {
    check_p(p)?;
    if !(a < b && s < t && t < u) {
        return Err(Error::Precondition(format!(
            "need a < b and s < t < u, got a={a} b={b} s={s} t={t} u={u}"
        )));
    }
    let ix = |v: f64, other: f64| w.xs.index_of(v).ok_or(Error::OffGrid { s: v, t: other });
    let iy = |v: f64, other: f64| w.ys.index_of(v).ok_or(Error::OffGrid { s: other, t: v });
    let (i0, i1) = (ix(a, s)?, ix(b, s)?);
    let (j0, j1, j2) = (iy(s, a)?, iy(t, a)?, iy(u, a)?);
    let (lhs, rhs) = almost_subadd_terms(w, i0, i1, j0, j1, j2, p);
    let mut rep = InequalityReport::new(format!("almost subadditivity p={p}"), tol);
    rep.check_le_with(
        format!("w([{a},{b}]x[{s},{u}]) <= split at t={t} plus correction"),
        lhs,
        rhs,
        None,
        || Witness::Rect {
            rect: Rect { a, b, c: s, d: u },
        },
    );
    Ok(rep)
}

/// [`almost_subadd_check`] over every `a < b`, `s < t < u` of the base
/// grid, folded into one record.
pub fn almost_subadd_sweep(w: &ControlTable, p: f64, tol: Tolerance) -> Result<InequalityReport> {
    check_p(p)?;
    let (nx, ny) = (w.xs.len(), w.ys.len());
    let mut fold = WorstCase::new("almost subadditivity over all vertical splits", None, tol);
    for i0 in 0..nx {
        for i1 in i0 + 1..nx {
            for j0 in 0..ny {
                for j1 in j0 + 1..ny {
                    for j2 in j1 + 1..ny {
                        let (lhs, rhs) = almost_subadd_terms(w, i0, i1, j0, j1, j2, p);
                        fold.push(lhs, rhs, || Witness::Rect {
                            rect: GridIndexRect { i0, i1, j0, j1: j2 }.to_rect(&w.xs, &w.ys),
                        });
                    }
                }
            }
        }
    }
    let mut rep = InequalityReport::new(format!("almost subadditivity p={p}"), tol);
    fold.finish_into(&mut rep);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis(n: usize) -> Dissection {
        Dissection::integers(n).unwrap()
    }

    fn wobbly(nx: usize, ny: usize) -> GridFunction {
        GridFunction::sample(axis(nx), axis(ny), |s, t| (1.7 * s + 0.3 * t * t).sin() * (t - 0.4 * s).cos()).unwrap()
    }

    #[test]
    fn area_is_additive_with_zero_slack() {
        let w = ControlTable::area(axis(4), axis(4)).unwrap();
        let rep = check_superadditive(&w, &Limits::default(), Tolerance::default()).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.worst_slack(), Some(0.0));
    }

    #[test]
    fn cpvar_table_is_a_control() {
        let f = wobbly(4, 4);
        for p in [1.0, 2.0] {
            let w = control_from_cpvar(&f, p, &Limits::default()).unwrap();
            assert!(check_superadditive(&w, &Limits::default(), Tolerance::default()).unwrap().passed());
            assert!(dominates_increments(&w, &f, p, Tolerance::default()).unwrap().passed());
            assert!(almost_subadd_sweep(&w, p, Tolerance::default()).unwrap().passed());
        }
    }

    #[test]
    fn degenerate_reads_zero_and_full_entry_matches() {
        let f = wobbly(3, 4);
        let w = control_from_cpvar(&f, 1.5, &Limits::default()).unwrap();
        assert_eq!(w.get_idx(1, 1, 0, 3), 0.0);
        let full = crate::variation::controlled_pvar_exact(&f, 1.5, &f.domain(), &Limits::default()).unwrap();
        assert!((w.get(&f.full_index_rect()) - full.power_sum).abs() < 1e-14);
    }

    #[test]
    fn transpose_commutes_with_construction() {
        let f = wobbly(3, 4);
        let a = control_from_cpvar(&f, 2.0, &Limits::default()).unwrap().transpose();
        let b = control_from_cpvar(&f.transpose(), 2.0, &Limits::default()).unwrap();
        for (r, v) in b.iter() {
            assert!((a.get(&r) - v).abs() <= 1e-12 * v.max(1.0));
        }
    }

    #[test]
    fn zero_table_fails_domination_with_witness() {
        let f = wobbly(3, 3);
        let w = ControlTable::from_index_fn(axis(3), axis(3), |_| Ok(0.0)).unwrap();
        let rep = dominates_increments(&w, &f, 2.0, Tolerance::default()).unwrap();
        assert!(!rep.passed());
        assert!(matches!(rep.records[0].witness, Some(Witness::Rect { .. })));
    }

    #[test]
    fn almost_subadd_single_split_and_off_grid() {
        let f = wobbly(3, 4);
        let w = control_from_cpvar(&f, 1.0, &Limits::default()).unwrap();
        assert!(almost_subadd_check(&w, 0.0, 2.0, 0.0, 1.0, 3.0, 1.0, Tolerance::default()).unwrap().passed());
        assert!(matches!(
            almost_subadd_check(&w, 0.0, 2.0, 0.0, 0.5, 3.0, 1.0, Tolerance::default()),
            Err(Error::OffGrid { .. })
        ));
    }

    #[test]
    fn negative_values_rejected() {
        assert!(ControlTable::from_index_fn(axis(2), axis(2), |_| Ok(-1.0)).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let w = ControlTable::area(axis(6), axis(6)).unwrap();
        assert!(matches!(
            check_superadditive(&w, &Limits::default(), Tolerance::default()),
            Err(Error::CapExceeded { .. })
        ));
    }
}
