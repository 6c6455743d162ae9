//! Variation engines: 1D p-variation, grid-like `V_p`, controlled
//! `|f|_{p-var}`, and the sandwich between them.
//!
//! `value` in a [`VariationResult`] is always the norm (the `1/p`-th root of
//! the optimal power sum); `power_sum` keeps the unrooted optimum so that
//! controls can use `|f|^p_{p-var}` without a round trip through `powf`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{rectangulations_of, Dissection, GridIndexRect, Limits, Rect, RectPartition};
use crate::gridfunc::GridFunction;
use crate::report::{InequalityReport, Tolerance, Witness};
use crate::young;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Heuristic,
}

/// What the reported value is relative to the true supremum over
/// grid-point dissections.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Exact,
    Lower,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationResult {
    pub value: f64,
    pub power_sum: f64,
    pub p: f64,
    pub witness: Witness,
    pub method: Method,
    pub bound: Bound,
    /// `None` for 1D results.
    pub domain: Option<Rect>,
}

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::Exponent(format!("p must be finite and >= 1, got {p}")))
    }
}

#[inline]
pub(crate) fn abs_pow(v: f64, p: f64) -> f64 {
    let a = v.abs();
    if p == 1.0 {
        a
    } else if p == 2.0 {
        a * a
    } else {
        a.powf(p)
    }
}

pub(crate) fn root(power_sum: f64, p: f64) -> f64 {
    if p == 1.0 {
        power_sum
    } else {
        power_sum.powf(1.0 / p)
    }
}

/// Maximise `sum_k w(t_k, t_{k+1})` over increasing index sequences from
/// `lo` to `hi`. Ties go to the sequence with fewer points.
pub(crate) fn best_interval_chain(
    lo: usize,
    hi: usize,
    mut w: impl FnMut(usize, usize) -> f64,
) -> (f64, Vec<usize>) {
    let n = hi - lo + 1;
    let mut best = vec![0.0f64; n];
    let mut count = vec![1usize; n];
    let mut prev = vec![usize::MAX; n];
    for b in 1..n {
        let mut bv = f64::NEG_INFINITY;
        let mut bc = usize::MAX;
        let mut bp = 0;
        for a in 0..b {
            let v = best[a] + w(lo + a, lo + b);
            let c = count[a] + 1;
            if v > bv || (v == bv && c < bc) {
                bv = v;
                bc = c;
                bp = a;
            }
        }
        best[b] = bv;
        count[b] = bc;
        prev[b] = bp;
    }
    let mut chain = vec![hi];
    let mut k = n - 1;
    while k != 0 {
        k = prev[k];
        chain.push(lo + k);
    }
    chain.reverse();
    (best[n - 1], chain)
}

/// Exact p-variation of a sampled path: maximum over sub-dissections of
/// `sum |x_{t_{i+1}} - x_{t_i}|^p`, by the interval recursion
/// `M(j) = max_{i<j} M(i) + |x_j - x_i|^p`.
pub fn pvar_1d(path: &[f64], p: f64) -> Result<VariationResult> {
    check_p(p)?;
    if path.len() < 2 {
        return Err(Error::Precondition("path needs at least two samples".into()));
    }
    if path.iter().any(|v| !v.is_finite()) {
        return Err(Error::Precondition("path contains non-finite samples".into()));
    }
    let (sum, indices) = best_interval_chain(0, path.len() - 1, |a, b| abs_pow(path[b] - path[a], p));
    Ok(VariationResult {
        value: root(sum, p),
        power_sum: sum,
        p,
        witness: Witness::Path { indices },
        method: Method::Exact,
        bound: Bound::Exact,
        domain: None,
    })
}

/// Norm of the 1D p-variation, skipping witness bookkeeping.
pub(crate) fn pvar_1d_norm(path: &[f64], p: f64) -> f64 {
    let (sum, _) = best_interval_chain(0, path.len() - 1, |a, b| abs_pow(path[b] - path[a], p));
    root(sum, p)
}

/// Best s-axis dissection of `r` when the t-axis dissection is fixed.
fn best_s_given_t(f: &GridFunction, p: f64, r: &GridIndexRect, dy: &[usize]) -> (f64, Vec<usize>) {
    best_interval_chain(r.i0, r.i1, |a, b| {
        dy.windows(2)
            .map(|h| abs_pow(f.increment_idx(a, b, h[0], h[1]), p))
            .sum()
    })
}

fn best_t_given_s(f: &GridFunction, p: f64, r: &GridIndexRect, dx: &[usize]) -> (f64, Vec<usize>) {
    best_interval_chain(r.j0, r.j1, |a, b| {
        dx.windows(2)
            .map(|w| abs_pow(f.increment_idx(w[0], w[1], a, b), p))
            .sum()
    })
}

/// `sum_{i,j} |f([t_i, t_{i+1}] x [t'_j, t'_{j+1}])|^p` for index dissections.
pub fn gridlike_power_sum(f: &GridFunction, p: f64, dx: &[usize], dy: &[usize]) -> f64 {
    dx.windows(2)
        .map(|w| {
            dy.windows(2)
                .map(|h| abs_pow(f.increment_idx(w[0], w[1], h[0], h[1]), p))
                .sum::<f64>()
        })
        .sum()
}

/// Exact `V_p^p` over index rectangle `r` with its maximising dissections.
///
/// Every subset of interior points of the shorter axis is enumerated; for
/// each, the optimal dissection of the other axis is found exactly by the
/// interval recursion, since the objective is a sum over consecutive pairs
/// once one axis is fixed.
pub(crate) fn vp_exact_idx(
    f: &GridFunction,
    p: f64,
    r: &GridIndexRect,
    limits: &Limits,
) -> Result<(f64, Vec<usize>, Vec<usize>)> {
    let ni = r.i1 - r.i0 - 1;
    let nj = r.j1 - r.j0 - 1;
    limits.check_interior(ni)?;
    limits.check_interior(nj)?;
    let mut best: Option<(f64, usize, Vec<usize>, Vec<usize>)> = None;
    let mut consider = |v: f64, dx: Vec<usize>, dy: Vec<usize>| {
        let c = dx.len() + dy.len();
        let better = match &best {
            None => true,
            Some((bv, bc, _, _)) => v > *bv || (v == *bv && c < *bc),
        };
        if better {
            best = Some((v, c, dx, dy));
        }
    };
    if nj <= ni {
        for dy in crate::geometry::index_sub_dissections(r.j0, r.j1) {
            let (v, dx) = best_s_given_t(f, p, r, &dy);
            consider(v, dx, dy);
        }
    } else {
        for dx in crate::geometry::index_sub_dissections(r.i0, r.i1) {
            let (v, dy) = best_t_given_s(f, p, r, &dx);
            consider(v, dx, dy);
        }
    }
    let (v, _, dx, dy) = best.expect("at least one dissection pair");
    Ok((v, dx, dy))
}

fn grid_witness(f: &GridFunction, dx: &[usize], dy: &[usize]) -> Witness {
    Witness::Grid {
        dx: f.xs().select(dx).expect("grid indices"),
        dy: f.ys().select(dy).expect("grid indices"),
    }
}

/// Norm `V_p(f; r)` computed exactly over grid-point dissections.
pub fn vp_2d_exact(f: &GridFunction, p: f64, r: &Rect, limits: &Limits) -> Result<VariationResult> {
    check_p(p)?;
    let ir = f.index_rect(r)?;
    let (sum, dx, dy) = vp_exact_idx(f, p, &ir, limits)?;
    Ok(VariationResult {
        value: root(sum, p),
        power_sum: sum,
        p,
        witness: grid_witness(f, &dx, &dy),
        method: Method::Exact,
        bound: Bound::Exact,
        domain: Some(*r),
    })
}

const SWEEP_REL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 200;

fn alternate_from(
    f: &GridFunction,
    p: f64,
    r: &GridIndexRect,
    mut dy: Vec<usize>,
) -> (f64, Vec<usize>, Vec<usize>) {
    let (mut value, mut dx) = best_s_given_t(f, p, r, &dy);
    for _ in 0..MAX_SWEEPS {
        // each half-sweep is an exact optimum over a set containing the
        // current pair, so the value can only grow
        let (_, new_dy) = best_t_given_s(f, p, r, &dx);
        let (v, new_dx) = best_s_given_t(f, p, r, &new_dy);
        let gained = v > value * (1.0 + SWEEP_REL_TOL) && v > value;
        if v >= value {
            value = v;
            dx = new_dx;
            dy = new_dy;
        }
        if !gained {
            break;
        }
    }
    (value, dx, dy)
}

/// Coordinate-ascent lower bound for `V_p^p`: with one axis fixed the other
/// is optimised exactly; axes alternate until a sweep gains less than a
/// relative `1e-12`. Two starts (full t-axis, coarse t-axis) are run and
/// the better kept.
pub(crate) fn vp_alternating_idx(f: &GridFunction, p: f64, r: &GridIndexRect) -> (f64, Vec<usize>, Vec<usize>) {
    let full: Vec<usize> = (r.j0..=r.j1).collect();
    let coarse = vec![r.j0, r.j1];
    let a = alternate_from(f, p, r, full);
    let b = alternate_from(f, p, r, coarse);
    if b.0 > a.0 {
        b
    } else {
        a
    }
}

/// Heuristic `V_p(f; r)`: a certified lower bound with no grid-size cap.
pub fn vp_2d_alternating(f: &GridFunction, p: f64, r: &Rect) -> Result<VariationResult> {
    check_p(p)?;
    let ir = f.index_rect(r)?;
    let (sum, dx, dy) = vp_alternating_idx(f, p, &ir);
    Ok(VariationResult {
        value: root(sum, p),
        power_sum: sum,
        p,
        witness: grid_witness(f, &dx, &dy),
        method: Method::Heuristic,
        bound: Bound::Lower,
        domain: Some(*r),
    })
}

/// Exact `V_p` when within the interior-point cap, alternating otherwise.
pub fn vp_2d(f: &GridFunction, p: f64, r: &Rect, limits: &Limits) -> Result<VariationResult> {
    match vp_2d_exact(f, p, r, limits) {
        Err(Error::CapExceeded { .. }) => vp_2d_alternating(f, p, r),
        other => other,
    }
}

/// Exact `|f|^p_{p-var}` over index rectangle `r` with a maximising
/// rectangulation.
pub(crate) fn controlled_exact_idx(
    f: &GridFunction,
    p: f64,
    r: &GridIndexRect,
    limits: &Limits,
) -> Result<(f64, Vec<GridIndexRect>)> {
    let w = r.i1 - r.i0;
    let h = r.j1 - r.j0;
    let side_i = w + 1;
    let side_j = h + 1;
    // |f(A)|^p for every sub-rectangle A of r, indexed by local corners
    let mut weights = vec![0.0f64; side_i * side_i * side_j * side_j];
    let slot = |q: &GridIndexRect| {
        (((q.i0 - r.i0) * side_i + (q.i1 - r.i0)) * side_j + (q.j0 - r.j0)) * side_j + (q.j1 - r.j0)
    };
    for i0 in r.i0..r.i1 {
        for i1 in i0 + 1..=r.i1 {
            for j0 in r.j0..r.j1 {
                for j1 in j0 + 1..=r.j1 {
                    let q = GridIndexRect { i0, i1, j0, j1 };
                    weights[slot(&q)] = abs_pow(f.increment(&q), p);
                }
            }
        }
    }
    let mut best_sum = f64::NEG_INFINITY;
    let mut best_part = Vec::new();
    for part in rectangulations_of(r, limits)? {
        let s: f64 = part.iter().map(|q| weights[slot(q)]).sum();
        if s > best_sum {
            best_sum = s;
            best_part = part;
        }
    }
    Ok((best_sum, best_part))
}

/// Norm `|f|_{p-var; r}`: maximum over every rectangulation of the grid
/// cells in `r`.
pub fn controlled_pvar_exact(
    f: &GridFunction,
    p: f64,
    r: &Rect,
    limits: &Limits,
) -> Result<VariationResult> {
    check_p(p)?;
    let ir = f.index_rect(r)?;
    let (sum, part) = controlled_exact_idx(f, p, &ir, limits)?;
    Ok(VariationResult {
        value: root(sum, p),
        power_sum: sum,
        p,
        witness: Witness::Partition {
            partition: RectPartition::from_index(f.xs(), f.ys(), &part),
        },
        method: Method::Exact,
        bound: Bound::Exact,
        domain: Some(*r),
    })
}

/// Re-evaluate the objective (power sum) on a witness.
pub fn evaluate_witness(f: &GridFunction, p: f64, witness: &Witness) -> Result<f64> {
    match witness {
        Witness::Grid { dx, dy } => {
            let ix = dx.indices_on(f.xs())?;
            let iy = dy.indices_on(f.ys())?;
            Ok(gridlike_power_sum(f, p, &ix, &iy))
        }
        Witness::Partition { partition } => {
            let parts = partition.to_index(f.xs(), f.ys())?;
            Ok(parts.iter().map(|q| abs_pow(f.increment(q), p)).sum())
        }
        Witness::Rect { rect } => Ok(abs_pow(crate::gridfunc::rect_increment(f, rect)?, p)),
        _ => Err(Error::Usage("witness kind does not describe a 2D objective".into())),
    }
}

/// The pieces of the sandwich constant, for reporting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichConstant {
    pub p: f64,
    pub eps: f64,
    /// Hölder conjugate of `p + eps`.
    pub q: f64,
    pub theta: f64,
    pub alpha: f64,
    pub young_towghi: f64,
    /// `4 * young_towghi`.
    pub value: f64,
}

/// Constant `c(p, eps) = 4 c_YT(p, q)` with `q` the conjugate of `p + eps`
/// and `alpha` chosen to minimise the Young-Towghi constant.
pub fn sandwich_constant_parts(p: f64, eps: f64) -> Result<SandwichConstant> {
    check_p(p)?;
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let pe = p + eps;
    let q = 1.0 / (1.0 - 1.0 / pe);
    let theta = 1.0 / p + 1.0 / q;
    if !(theta > 1.0) {
        return Err(Error::Domain(format!("theta = {theta} must exceed 1")));
    }
    let exps = young::ExponentTriple::new(p, q)?;
    let (alpha, yt) = young::optimal_alpha(&exps)?;
    Ok(SandwichConstant {
        p,
        eps,
        q,
        theta,
        alpha,
        young_towghi: yt,
        value: 4.0 * yt,
    })
}

pub fn sandwich_constant(p: f64, eps: f64) -> Result<f64> {
    sandwich_constant_parts(p, eps).map(|c| c.value)
}

/// Check `|f|_{(p+eps)-var} <= c(p, eps) V_p(f) <= c |f|_{p-var}` (and
/// `V_1 = |f|_{1-var}` when `p == 1`) on `r`.
pub fn verify_sandwich(
    f: &GridFunction,
    p: f64,
    eps: f64,
    r: &Rect,
    limits: &Limits,
    tol: Tolerance,
) -> Result<InequalityReport> {
    let c = sandwich_constant_parts(p, eps)?;
    let vp = vp_2d_exact(f, p, r, limits)?;
    let cp = controlled_pvar_exact(f, p, r, limits)?;
    let cpe = controlled_pvar_exact(f, p + eps, r, limits)?;
    let mut rep = InequalityReport::new(format!("sandwich p={p} eps={eps}"), tol);
    rep.check_le(
        "controlled (p+eps)-variation <= c(p,eps) * V_p",
        cpe.value,
        c.value * vp.value,
        Some(c.value),
        Some(cpe.witness.clone()),
    );
    rep.check_le(
        "V_p <= controlled p-variation",
        vp.value,
        cp.value,
        None,
        Some(vp.witness.clone()),
    );
    if p == 1.0 {
        rep.check_eq("V_1 == controlled 1-variation", vp.value, cp.value, Some(cp.witness));
    }
    Ok(rep)
}

/// Grid-like partition of a witness, mainly for display.
pub fn witness_dissections(w: &Witness) -> Option<(&Dissection, &Dissection)> {
    match w {
        Witness::Grid { dx, dy } => Some((dx, dy)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::index_sub_dissections;

    fn uniform(n: usize) -> Dissection {
        Dissection::uniform(0.0, 1.0, n).unwrap()
    }

    fn lcg_table(nx: usize, ny: usize, seed: u64) -> GridFunction {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let table = (0..nx).map(|_| (0..ny).map(|_| next()).collect()).collect();
        GridFunction::new(Dissection::integers(nx).unwrap(), Dissection::integers(ny).unwrap(), table)
            .unwrap()
    }

    #[test]
    fn pvar_1d_examples() {
        let mono = [0.0, 0.5, 0.7, 2.0];
        assert!((pvar_1d(&mono, 1.0).unwrap().value - 2.0).abs() < 1e-15);
        let tent = pvar_1d(&[0.0, 1.0, 0.0], 2.0).unwrap();
        assert_eq!(tent.power_sum, 2.0);
        assert_eq!(tent.witness, Witness::Path { indices: vec![0, 1, 2] });
        let wiggle = [0.0f64, 0.3, -0.2, 0.9, 0.1];
        let total: f64 = wiggle.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        assert!((pvar_1d(&wiggle, 1.0).unwrap().value - total).abs() < 1e-15);
    }

    #[test]
    fn pvar_1d_rejects_bad_input() {
        assert!(pvar_1d(&[0.0], 2.0).is_err());
        assert!(pvar_1d(&[0.0, 1.0], 0.5).is_err());
    }

    #[test]
    fn pvar_1d_ties_prefer_fewer_points() {
        // p = 1 on a monotone path: every refinement ties
        let r = pvar_1d(&[0.0, 1.0, 2.0, 3.0], 1.0).unwrap();
        assert_eq!(r.witness, Witness::Path { indices: vec![0, 3] });
    }

    #[test]
    fn product_function_has_unit_one_variation() {
        for n in [2, 3, 5] {
            let f = GridFunction::sample(uniform(n), uniform(n + 1), |s, t| s * t).unwrap();
            let v = vp_2d_exact(&f, 1.0, &f.domain(), &Limits::default()).unwrap();
            assert!((v.value - 1.0).abs() < 1e-14);
            let h = vp_2d_alternating(&f, 1.0, &f.domain()).unwrap();
            assert!((h.value - 1.0).abs() < 1e-14);
            assert_eq!(h.method, Method::Heuristic);
        }
    }

    #[test]
    fn constant_function_has_zero_variation() {
        let f = GridFunction::sample(uniform(4), uniform(4), |_, _| 3.5).unwrap();
        let lim = Limits::default();
        assert_eq!(vp_2d_exact(&f, 2.0, &f.domain(), &lim).unwrap().value, 0.0);
        assert_eq!(vp_2d_alternating(&f, 2.0, &f.domain()).unwrap().value, 0.0);
        assert_eq!(controlled_pvar_exact(&f, 2.0, &f.domain(), &lim).unwrap().value, 0.0);
    }

    #[test]
    fn brownian_covariance_one_variation() {
        let f = GridFunction::sample(uniform(6), uniform(6), f64::min).unwrap();
        let v = vp_2d_exact(&f, 1.0, &f.domain(), &Limits::default()).unwrap();
        assert!((v.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exact_matches_joint_enumeration() {
        for seed in 0..20 {
            let f = lcg_table(5, 4, seed);
            let r = f.full_index_rect();
            for p in [1.0, 1.5, 2.0, 3.0] {
                let mut brute = 0.0f64;
                for dx in index_sub_dissections(0, 4) {
                    for dy in index_sub_dissections(0, 3) {
                        brute = brute.max(gridlike_power_sum(&f, p, &dx, &dy));
                    }
                }
                let (v, dx, dy) = vp_exact_idx(&f, p, &r, &Limits::default()).unwrap();
                assert!((v - brute).abs() <= 1e-12 * brute.max(1.0), "seed {seed} p {p}");
                assert!((gridlike_power_sum(&f, p, &dx, &dy) - v).abs() <= 1e-12 * v.max(1.0));
            }
        }
    }

    #[test]
    fn exact_cap() {
        let f = lcg_table(15, 3, 1);
        assert!(matches!(
            vp_2d_exact(&f, 2.0, &f.domain(), &Limits::default()),
            Err(Error::CapExceeded { .. })
        ));
        assert_eq!(vp_2d(&f, 2.0, &f.domain(), &Limits::default()).unwrap().method, Method::Heuristic);
    }

    #[test]
    fn controlled_one_variation_equals_gridlike() {
        let lim = Limits::default();
        for seed in 0..10 {
            let f = lcg_table(4, 4, 100 + seed);
            let v = vp_2d_exact(&f, 1.0, &f.domain(), &lim).unwrap();
            let c = controlled_pvar_exact(&f, 1.0, &f.domain(), &lim).unwrap();
            assert!((v.value - c.value).abs() <= 1e-12 * v.value.max(1.0));
        }
    }

    #[test]
    fn witnesses_reevaluate() {
        let lim = Limits::default();
        let f = lcg_table(4, 4, 7);
        for p in [1.0, 2.0, 2.5] {
            for res in [
                vp_2d_exact(&f, p, &f.domain(), &lim).unwrap(),
                vp_2d_alternating(&f, p, &f.domain()).unwrap(),
                controlled_pvar_exact(&f, p, &f.domain(), &lim).unwrap(),
            ] {
                let again = evaluate_witness(&f, p, &res.witness).unwrap();
                assert!((again - res.power_sum).abs() <= 1e-12 * res.power_sum.max(1e-300));
            }
        }
    }

    #[test]
    fn sandwich_constant_examples() {
        let c = sandwich_constant_parts(2.0, 0.5).unwrap();
        assert!((c.theta - 1.1).abs() < 1e-14);
        assert!(c.value.is_finite() && c.value > 4.0);
        assert!(c.alpha > 1.0 && c.alpha < c.theta);
        let c1 = sandwich_constant(1.0, 1.0).unwrap();
        assert!(c1.is_finite() && c1 > 0.0);
        assert!(sandwich_constant(2.0, 0.0).is_err());
        assert!(sandwich_constant(0.5, 1.0).is_err());
    }

    #[test]
    fn sandwich_constant_decreases_in_eps() {
        for p in [1.0, 1.5, 2.0, 3.0] {
            let vals: Vec<f64> = [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 20.0]
                .iter()
                .map(|&e| sandwich_constant(p, e).unwrap())
                .collect();
            assert!(vals.windows(2).all(|w| w[1] < w[0]), "p={p}: {vals:?}");
        }
    }

    #[test]
    fn verify_sandwich_constant_function() {
        let f = GridFunction::sample(uniform(3), uniform(3), |_, _| 1.0).unwrap();
        let rep = verify_sandwich(&f, 1.0, 0.5, &f.domain(), &Limits::default(), Tolerance::default()).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.len(), 3);
        assert!(rep.records.iter().all(|r| r.lhs == 0.0 && r.rhs == 0.0));
    }
}
