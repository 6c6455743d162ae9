//! Covariance of fractional Brownian motion,
//! `C^H(s, t) = (t^{2H} + s^{2H} - |t - s|^{2H}) / 2` for `H in (0, 1/2]`,
//! viewed as a two-parameter function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Dissection, Limits, Rect};
use crate::gridfunc::GridFunction;
use crate::report::{CheckRecord, InequalityReport, Tolerance, Witness, WorstCase};
use crate::variation::{vp_2d, Method};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HurstKernel {
    h: f64,
}

impl HurstKernel {
    pub fn new(h: f64) -> Result<Self> {
        if h > 0.0 && h <= 0.5 {
            Ok(HurstKernel { h })
        } else {
            Err(Error::Domain(format!("Hurst parameter must lie in (0, 1/2], got {h}")))
        }
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Variation exponent `1 / (2H)` at which the covariance has finite
    /// variation.
    pub fn p(&self) -> f64 {
        1.0 / (2.0 * self.h)
    }

    pub fn is_brownian(&self) -> bool {
        self.h == 0.5
    }

    fn pow(&self, v: f64) -> f64 {
        if self.is_brownian() {
            v
        } else {
            v.powf(2.0 * self.h)
        }
    }

    fn cov_unchecked(&self, s: f64, t: f64) -> f64 {
        if self.is_brownian() {
            return s.min(t);
        }
        0.5 * (self.pow(t) + self.pow(s) - self.pow((t - s).abs()))
    }
}

/// `C^H(s, t)`; negative times are rejected.
pub fn fbm_cov(k: &HurstKernel, s: f64, t: f64) -> Result<f64> {
    if !(s >= 0.0 && t >= 0.0) {
        return Err(Error::Domain(format!("times must be nonnegative, got ({s}, {t})")));
    }
    Ok(k.cov_unchecked(s, t))
}

/// `E[(B_b - B_a)(B_d - B_c)]`, the rectangular increment of `C^H` over
/// `[a, b] x [c, d]`.
pub fn fbm_rect_cov(k: &HurstKernel, r: &Rect) -> Result<f64> {
    if r.a < 0.0 || r.c < 0.0 {
        return Err(Error::Domain(format!("rectangle {r} leaves the first quadrant")));
    }
    Ok(k.cov_unchecked(r.b, r.d) - k.cov_unchecked(r.a, r.d) - k.cov_unchecked(r.b, r.c)
        + k.cov_unchecked(r.a, r.c))
}

/// `C^H` sampled on `xs x ys`.
pub fn sample_cov(k: &HurstKernel, xs: Dissection, ys: Dissection) -> Result<GridFunction> {
    if xs.lo() < 0.0 || ys.lo() < 0.0 {
        return Err(Error::Domain("sample grid must lie in the first quadrant".into()));
    }
    GridFunction::sample(xs, ys, |s, t| k.cov_unchecked(s, t))
}

/// `E[(B_b - B_a)(B_d - B_c)] <= 0` for every pair of grid intervals with
/// `b <= c`. For `H = 1/2` the covariances vanish and the report carries a
/// single degenerate record.
pub fn neg_correlation_check(k: &HurstKernel, grid: &Dissection, tol: Tolerance) -> Result<InequalityReport> {
    if grid.lo() < 0.0 {
        return Err(Error::Domain("grid must lie in [0, inf)".into()));
    }
    let mut rep = InequalityReport::new(format!("negative correlation H={}", k.h), tol);
    let pts = grid.points();
    let mut fold = WorstCase::new("cov(B_{a,b}, B_{c,d}) <= 0 for b <= c", None, tol);
    for i0 in 0..pts.len() {
        for i1 in i0 + 1..pts.len() {
            for j0 in i1..pts.len() {
                for j1 in j0 + 1..pts.len() {
                    let r = Rect {
                        a: pts[i0],
                        b: pts[i1],
                        c: pts[j0],
                        d: pts[j1],
                    };
                    fold.push(fbm_rect_cov(k, &r)?, 0.0, || Witness::Rect { rect: r });
                }
            }
        }
    }
    if k.is_brownian() {
        // every disjoint-interval covariance is 0: report as a degenerate pass
        let passed = fold.passed();
        let cases = fold.cases();
        rep.record(CheckRecord {
            name: "H = 1/2: disjoint increments uncorrelated (degenerate)".into(),
            lhs: 0.0,
            rhs: 0.0,
            constant: None,
            slack: 0.0,
            pass: passed,
            witness: None,
            cases,
        });
    } else {
        fold.finish_into(&mut rep);
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    /// Points per axis.
    pub n: usize,
    /// `V_{1/(2H)}(C^H; [s,t]^2)`.
    pub value: f64,
    /// `value / (t - s)^{2H}`.
    pub ratio: f64,
    pub method: Method,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationScan {
    pub h: f64,
    pub p: f64,
    pub s: f64,
    pub t: f64,
    pub entries: Vec<ScanEntry>,
    /// Largest ratio over the scan.
    pub c_h_empirical: f64,
}

impl VariationScan {
    pub fn ratio_at(&self, n: usize) -> Option<f64> {
        self.entries.iter().find(|e| e.n == n).map(|e| e.ratio)
    }
}

/// `V_{1/(2H)}(C^H; [s,t]^2)` on uniform `n x n` grids for each `n` in
/// `sizes`, exact within `limits` and by coordinate ascent beyond.
pub fn fbm_variation_scan(k: &HurstKernel, s: f64, t: f64, sizes: &[usize], limits: &Limits) -> Result<VariationScan> {
    if !(s >= 0.0 && s < t) {
        return Err(Error::Domain(format!("need 0 <= s < t, got s={s} t={t}")));
    }
    let p = k.p();
    let scale = k.pow(t - s);
    let mut entries = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let axis = Dissection::uniform(s, t, n)?;
        let f = sample_cov(k, axis.clone(), axis)?;
        let v = vp_2d(&f, p, &f.domain(), limits)?;
        entries.push(ScanEntry {
            n,
            value: v.value,
            ratio: v.value / scale,
            method: v.method,
        });
    }
    let c_h_empirical = entries.iter().map(|e| e.ratio).fold(f64::NEG_INFINITY, f64::max);
    Ok(VariationScan {
        h: k.h,
        p,
        s,
        t,
        entries,
        c_h_empirical,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexamplePiece {
    pub rect: Rect,
    /// `V_{1/(2H)}(C^H; rect)^{1/(2H)}`.
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub h: f64,
    pub points_per_unit: usize,
    pub pieces: Vec<CounterexamplePiece>,
    pub whole: f64,
    pub sum: f64,
    /// `sum - whole`; positive when super-additivity fails.
    pub excess: f64,
    pub violation_found: bool,
    pub report: InequalityReport,
}

pub const DEFAULT_POINTS_PER_UNIT: usize = 5;

/// Evaluate `w(R) = V_{1/(2H)}(C^H; R)^{1/(2H)}` on
/// `[0,2]^2 = [0,1]^2 u [1,2]^2 u [0,1]x[1,2] u [1,2]x[0,1]`, each unit
/// axis sampled at `points_per_unit` points.
///
/// For `H < 1/2` the report passes when the pieces outweigh the whole, so
/// `w` is not super-additive. For `H = 1/2` it passes when the two sides
/// agree, which is the additive Brownian case.
pub fn superadditivity_counterexample(
    k: &HurstKernel,
    points_per_unit: usize,
    limits: &Limits,
    tol: Tolerance,
) -> Result<Counterexample> {
    if points_per_unit < 2 {
        return Err(Error::Usage("points_per_unit must be at least 2".into()));
    }
    let p = k.p();
    let axis = Dissection::uniform(0.0, 2.0, 2 * points_per_unit - 1)?;
    let f = sample_cov(k, axis.clone(), axis)?;
    let weight = |r: &Rect| -> Result<f64> {
        let v = crate::variation::vp_2d_exact(&f, p, r, limits)?;
        Ok(v.power_sum)
    };
    let whole_rect = Rect::square(0.0, 2.0)?;
    let rects = [
        Rect::square(0.0, 1.0)?,
        Rect::square(1.0, 2.0)?,
        Rect::new(0.0, 1.0, 1.0, 2.0)?,
        Rect::new(1.0, 2.0, 0.0, 1.0)?,
    ];
    let mut pieces = Vec::with_capacity(4);
    for r in rects {
        pieces.push(CounterexamplePiece {
            rect: r,
            weight: weight(&r)?,
        });
    }
    let whole = weight(&whole_rect)?;
    let sum: f64 = pieces.iter().map(|c| c.weight).sum();
    let excess = sum - whole;
    let allowance = tol.allowance(sum, whole);
    let violation_found = excess > allowance;

    let mut rep = InequalityReport::new(format!("super-additivity counterexample H={}", k.h), tol);
    let witness = Some(Witness::Partition {
        partition: crate::geometry::RectPartition::new(whole_rect, rects.to_vec()),
    });
    if k.is_brownian() {
        rep.check_eq("sum of pieces == whole (additive)", sum, whole, witness);
    } else {
        rep.record(CheckRecord {
            name: "sum of pieces > whole (super-additivity fails)".into(),
            lhs: whole,
            rhs: sum,
            constant: None,
            slack: excess,
            pass: violation_found,
            witness,
            cases: 1,
        });
        let off = pieces[2].weight;
        rep.record(CheckRecord {
            name: "w([0,1]x[1,2]) > 0".into(),
            lhs: 0.0,
            rhs: off,
            constant: None,
            slack: off,
            pass: off > 0.0,
            witness: Some(Witness::Rect { rect: rects[2] }),
            cases: 1,
        });
    }
    Ok(Counterexample {
        h: k.h,
        points_per_unit,
        pieces,
        whole,
        sum,
        excess,
        violation_found,
        report: rep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridfunc::rect_increment;

    fn k(h: f64) -> HurstKernel {
        HurstKernel::new(h).unwrap()
    }

    #[test]
    fn kernel_domain() {
        assert!(HurstKernel::new(0.0).is_err());
        assert!(HurstKernel::new(0.6).is_err());
        assert!(fbm_cov(&k(0.25), -1.0, 1.0).is_err());
    }

    #[test]
    fn cov_examples() {
        for (s, t) in [(0.3, 0.7), (1.5, 0.2), (2.0, 2.0)] {
            assert_eq!(fbm_cov(&k(0.5), s, t).unwrap(), f64::min(s, t));
            assert_eq!(fbm_cov(&k(0.25), 0.0, t).unwrap(), 0.0);
            assert_eq!(fbm_cov(&k(0.3), s, t).unwrap(), fbm_cov(&k(0.3), t, s).unwrap());
        }
        assert_eq!(fbm_cov(&k(0.25), 1.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn adjacent_unit_intervals() {
        for h in [0.25, 0.4, 0.5] {
            let r = Rect::new(0.0, 1.0, 1.0, 2.0).unwrap();
            let want = 2f64.powf(2.0 * h - 1.0) - 1.0;
            assert!((fbm_rect_cov(&k(h), &r).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn squares_give_variance() {
        let kk = k(0.3);
        for (a, b) in [(0.0, 1.0), (0.5, 2.0), (1.25, 1.5)] {
            let r = Rect::square(a, b).unwrap();
            let want = (b - a).powf(0.6);
            let closed = fbm_rect_cov(&kk, &r).unwrap();
            assert!((closed - want).abs() <= 1e-12 * want);
            let axis = Dissection::new(vec![a, b]).unwrap();
            let f = sample_cov(&kk, axis.clone(), axis).unwrap();
            assert!((rect_increment(&f, &r).unwrap() - want).abs() <= 1e-12 * want);
        }
    }

    #[test]
    fn fractional_scaling() {
        let kk = k(0.2);
        let r = Rect::new(0.1, 0.7, 0.4, 1.3).unwrap();
        let base = fbm_rect_cov(&kk, &r).unwrap();
        for lam in [0.5, 2.0, 3.0] {
            let scaled = Rect::new(lam * r.a, lam * r.b, lam * r.c, lam * r.d).unwrap();
            let v = fbm_rect_cov(&kk, &scaled).unwrap();
            assert!((v - lam.powf(0.4) * base).abs() <= 1e-12 * v.abs());
        }
    }

    #[test]
    fn negative_correlation() {
        let grid = Dissection::uniform(0.0, 2.0, 9).unwrap();
        let rep = neg_correlation_check(&k(0.25), &grid, Tolerance::default()).unwrap();
        assert!(rep.passed());
        let rep = neg_correlation_check(&k(0.5), &grid, Tolerance::default()).unwrap();
        assert!(rep.passed());
        assert!(rep.records[0].name.contains("degenerate"));
    }

    #[test]
    fn brownian_scan_is_one() {
        let scan = fbm_variation_scan(&k(0.5), 0.0, 1.0, &[3, 5], &Limits::default()).unwrap();
        for e in &scan.entries {
            assert!((e.value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn counterexample_small() {
        let c = superadditivity_counterexample(&k(0.25), 3, &Limits::default(), Tolerance::default()).unwrap();
        assert!(c.violation_found && c.report.passed());
        let c = superadditivity_counterexample(&k(0.5), 3, &Limits::default(), Tolerance::default()).unwrap();
        assert!(!c.violation_found && c.report.passed());
        assert!(c.excess.abs() < 1e-9);
    }
}
