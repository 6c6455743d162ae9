use serde::{Deserialize, Serialize};

use super::{yt_bound_2d, zeta, ExponentTriple, RemovalStep};
use crate::error::{Error, Result};
use crate::geometry::{index_sub_dissections, validate_partition, Dissection, Limits, RectPartition};
use crate::gridfunc::{build_dual_step_function, rect_increment, GridFunction};
use crate::report::{InequalityReport, Tolerance, Witness, WorstCase};
use crate::variation::{controlled_pvar_exact, vp_2d_exact};

/// Exact `V_p(x)` and `V_q(y)` over the full sample domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YoungNorms2d {
    pub vp_x: f64,
    pub vq_y: f64,
}

impl YoungNorms2d {
    pub fn compute(y: &GridFunction, x: &GridFunction, e: &ExponentTriple, limits: &Limits) -> Result<Self> {
        let dom = x.domain();
        Ok(YoungNorms2d {
            vp_x: vp_2d_exact(x, e.p, &dom, limits)?.value,
            vq_y: vp_2d_exact(y, e.q, &dom, limits)?.value,
        })
    }

    pub fn product(&self) -> f64 {
        self.vp_x * self.vq_y
    }
}

fn same_axis(a: &Dissection, b: &Dissection) -> bool {
    a.len() == b.len()
        && a
            .points()
            .iter()
            .zip(b.points())
            .all(|(u, v)| (u - v).abs() <= crate::geometry::COORD_TOL)
}

fn check_pair(y: &GridFunction, x: &GridFunction) -> Result<()> {
    if !same_axis(y.xs(), x.xs()) || !same_axis(y.ys(), x.ys()) {
        return Err(Error::Dimension(
            "integrand and integrator must share a sample grid".into(),
        ));
    }
    Ok(())
}

fn check_axes(y: &GridFunction) -> Result<()> {
    if y.vanishes_on_axes() {
        Ok(())
    } else {
        Err(Error::Precondition(
            "integrand must vanish on the lower-left axes".into(),
        ))
    }
}

fn integral(y: &GridFunction, x: &GridFunction, dx: &[usize], dy: &[usize]) -> f64 {
    let mut total = 0.0;
    for w in dx.windows(2) {
        for h in dy.windows(2) {
            total += y.value(w[1], h[1]) * x.increment_idx(w[0], w[1], h[0], h[1]);
        }
    }
    total
}

/// `sum_{i,j} y(t_i, t'_j) x([t_{i-1}, t_i] x [t'_{j-1}, t'_j])` over the
/// sub-dissections `dx`, `dy` of the common sample grid.
pub fn discrete_integral_2d(y: &GridFunction, x: &GridFunction, dx: &Dissection, dy: &Dissection) -> Result<f64> {
    check_pair(y, x)?;
    let ix = dx.indices_on(x.xs())?;
    let iy = dy.indices_on(x.ys())?;
    Ok(integral(y, x, &ix, &iy))
}

/// `I^{D,D'} - I^{D \ t_k, D'}` for interior position `k` of `dx`:
/// `-sum_b (y(t_{k+1}, t'_b) - y(t_k, t'_b)) x([t_{k-1}, t_k] x [t'_{b-1}, t'_b])`.
fn outer_difference(y: &GridFunction, x: &GridFunction, dx: &[usize], dy: &[usize], k: usize) -> f64 {
    let (a, b, c) = (dx[k - 1], dx[k], dx[k + 1]);
    -dy.windows(2)
        .map(|h| (y.value(c, h[1]) - y.value(b, h[1])) * x.increment_idx(a, b, h[0], h[1]))
        .sum::<f64>()
}

fn best_outer(y: &GridFunction, x: &GridFunction, dx: &[usize], dy: &[usize]) -> (usize, f64) {
    let mut best = (1, outer_difference(y, x, dx, dy, 1));
    for k in 2..dx.len() - 1 {
        let d = outer_difference(y, x, dx, dy, k);
        if d.abs() < best.1.abs() {
            best = (k, d);
        }
    }
    best
}

/// `Delta^{D,D'} = sum_k |I^{D,D'} - I^{D \ t_k, D'}|^{1/alpha}`.
fn delta(y: &GridFunction, x: &GridFunction, dx: &[usize], dy: &[usize], alpha: f64) -> f64 {
    (1..dx.len() - 1)
        .map(|k| outer_difference(y, x, dx, dy, k).abs().powf(1.0 / alpha))
        .sum()
}

fn without(d: &[usize], k: usize) -> Vec<usize> {
    let mut v = d.to_vec();
    v.remove(k);
    v
}

/// Interior position of `dy` minimising the signed drop
/// `Delta^{D,D'} - Delta^{D,D' \ t'_j}`, smallest on ties.
fn best_inner(y: &GridFunction, x: &GridFunction, dx: &[usize], dy: &[usize], alpha: f64) -> (usize, f64, f64) {
    let before = delta(y, x, dx, dy, alpha);
    let mut best: Option<(usize, f64)> = None;
    for j in 1..dy.len() - 1 {
        let after = delta(y, x, dx, &without(dy, j), alpha);
        if best.is_none_or(|(_, a)| before - after < before - a) {
            best = Some((j, after));
        }
    }
    let (j, after) = best.expect("dy has an interior point");
    (j, before, after)
}

struct Constants {
    theta: f64,
    alpha: f64,
    norms: f64,
    /// `(1 + zeta(theta/alpha))^alpha`
    outer_factor: f64,
}

impl Constants {
    fn new(e: &ExponentTriple, norms: f64) -> Result<Self> {
        let alpha = e.alpha_or_optimal()?;
        Ok(Constants {
            theta: e.theta,
            alpha,
            norms,
            outer_factor: (1.0 + zeta(e.theta / alpha)?).powf(alpha),
        })
    }

    fn outer_bound(&self, intervals: usize) -> f64 {
        ((intervals - 1) as f64).powf(-self.alpha) * self.outer_factor * self.norms
    }

    fn inner_bound(&self, intervals: usize) -> f64 {
        ((intervals - 1) as f64).powf(-self.theta / self.alpha) * self.norms.powf(1.0 / self.alpha)
    }
}

fn outer_step(y: &GridFunction, x: &GridFunction, dx: &[usize], dy: &[usize], k: &Constants, tol: &Tolerance) -> RemovalStep {
    let (pos, diff) = best_outer(y, x, dx, dy);
    let before = integral(y, x, dx, dy);
    let bound = k.outer_bound(dx.len() - 1);
    RemovalStep {
        position: pos,
        point: dx[pos],
        before,
        after: before - diff,
        bound,
        signed: false,
        certified: tol.le(diff.abs(), bound),
    }
}

fn inner_step(y: &GridFunction, x: &GridFunction, dx: &[usize], dy: &[usize], k: &Constants, tol: &Tolerance) -> RemovalStep {
    let (pos, before, after) = best_inner(y, x, dx, dy, k.alpha);
    let bound = k.inner_bound(dy.len() - 1);
    RemovalStep {
        position: pos,
        point: dy[pos],
        before,
        after,
        bound,
        signed: true,
        certified: tol.le(before - after, bound),
    }
}

fn prepare(
    y: &GridFunction,
    x: &GridFunction,
    dx: &Dissection,
    dy: &Dissection,
    e: &ExponentTriple,
) -> Result<(Vec<usize>, Vec<usize>, Constants)> {
    check_pair(y, x)?;
    check_axes(y)?;
    e.require_theta()?;
    let ix = dx.indices_on(x.xs())?;
    let iy = dy.indices_on(x.ys())?;
    let norms = YoungNorms2d::compute(y, x, e, &Limits::default())?.product();
    Ok((ix, iy, Constants::new(e, norms)?))
}

/// Remove the point of `dx` whose removal changes the discrete integral
/// least, certified against `(n-1)^{-alpha} (1 + zeta(theta/alpha))^alpha
/// V_p(x) V_q(y)`. `alpha` defaults to the minimiser of the Young-Towghi
/// constant.
pub fn remove_best_point_2d(
    y: &GridFunction,
    x: &GridFunction,
    dx: &Dissection,
    dy: &Dissection,
    e: &ExponentTriple,
) -> Result<RemovalStep> {
    let (ix, iy, k) = prepare(y, x, dx, dy, e)?;
    if ix.len() < 3 {
        return Err(Error::Precondition("dx needs at least three points".into()));
    }
    Ok(outer_step(y, x, &ix, &iy, &k, &Tolerance::default()))
}

/// Remove the point of `dy` with the smallest signed drop of
/// `Delta^{D,D'}`, checked against `(m-1)^{-theta/alpha} (V_p V_q)^{1/alpha}`.
/// `before` and `after` hold `Delta` rather than the integral.
pub fn remove_best_point_inner(
    y: &GridFunction,
    x: &GridFunction,
    dx: &Dissection,
    dy: &Dissection,
    e: &ExponentTriple,
) -> Result<RemovalStep> {
    let (ix, iy, k) = prepare(y, x, dx, dy, e)?;
    if iy.len() < 3 {
        return Err(Error::Precondition("dy needs at least three points".into()));
    }
    Ok(inner_step(y, x, &ix, &iy, &k, &Tolerance::default()))
}

struct Yt2d {
    maximal: WorstCase,
    outer_identity: WorstCase,
    cell_identity: WorstCase,
    outer_steps: WorstCase,
    outer_total: WorstCase,
    outer_base: WorstCase,
    inner_steps: WorstCase,
    inner_base: WorstCase,
    inner_total: WorstCase,
}

fn removal_witness(dx: &[usize], dy: &[usize], removed: usize) -> Witness {
    Witness::Removal {
        dx: dx.to_vec(),
        dy: dy.to_vec(),
        removed,
    }
}

fn identity_allowance(tol: &Tolerance, a: f64, b: f64) -> f64 {
    tol.abs + 1e-12 * a.abs().max(b.abs())
}

/// Every check attached to one dissection pair.
fn visit_pair(y: &GridFunction, x: &GridFunction, dx: &[usize], dy: &[usize], k: &Constants, yt: f64, tol: &Tolerance, acc: &mut Yt2d) {
    let whole = integral(y, x, dx, dy);
    acc.maximal.push(whole.abs(), yt * k.norms, || Witness::Removal {
        dx: dx.to_vec(),
        dy: dy.to_vec(),
        removed: usize::MAX,
    });

    // difference of differences on every interior pair
    for i in 1..dx.len() - 1 {
        let dxi = without(dx, i);
        for j in 1..dy.len() - 1 {
            let dyj = without(dy, j);
            let lhs = (whole - integral(y, x, &dxi, dy)) - (integral(y, x, dx, &dyj) - integral(y, x, &dxi, &dyj));
            let rhs = y.increment_idx(dx[i], dx[i + 1], dy[j], dy[j + 1])
                * x.increment_idx(dx[i - 1], dx[i], dy[j - 1], dy[j]);
            acc.cell_identity.push((lhs - rhs).abs(), identity_allowance(tol, whole, rhs), || {
                removal_witness(dx, dy, dx[i])
            });
        }
    }

    // outer cascade over dx with dy fixed
    let mut cur = dx.to_vec();
    let mut spent = 0.0;
    while cur.len() > 2 {
        let s = outer_step(y, x, &cur, dy, k, tol);
        let next = without(&cur, s.position);
        let direct = integral(y, x, &next, dy);
        acc.outer_identity.push((s.after - direct).abs(), identity_allowance(tol, s.before, direct), || {
            removal_witness(&cur, dy, s.point)
        });
        acc.outer_steps.push(s.difference().abs(), s.bound, || removal_witness(&cur, dy, s.point));
        spent += s.difference().abs();
        cur = next;
    }
    let outer_cap = zeta(k.alpha).unwrap_or(f64::INFINITY) * k.outer_factor * k.norms;
    acc.outer_total.push(spent, outer_cap, || removal_witness(dx, dy, usize::MAX));
    let base = integral(y, x, &cur, dy).abs();
    let base_cap = (1.0 + zeta(k.theta).unwrap_or(f64::INFINITY)) * k.norms;
    acc.outer_base.push(base, base_cap, || removal_witness(&cur, dy, usize::MAX));

    // inner cascade over dy for this dx
    if dx.len() > 2 {
        let start = delta(y, x, dx, dy, k.alpha);
        let root = k.norms.powf(1.0 / k.alpha);
        let inner_cap = (1.0 + zeta(k.theta / k.alpha).unwrap_or(f64::INFINITY)) * root;
        acc.inner_total.push(start, inner_cap, || removal_witness(dx, dy, usize::MAX));
        let mut cur = dy.to_vec();
        while cur.len() > 2 {
            let s = inner_step(y, x, dx, &cur, k, tol);
            acc.inner_steps.push(s.difference(), s.bound, || removal_witness(dx, &cur, s.point));
            cur = without(&cur, s.position);
        }
        acc.inner_base.push(delta(y, x, dx, &cur, k.alpha), root, || removal_witness(dx, &cur, usize::MAX));
    }
}

/// Young-Towghi maximal inequality
/// `|I^{D,D'}| <= c_YT(p, q, alpha) V_p(x) V_q(y)` over every pair of
/// sub-dissections of the sample grid, with both removal cascades replayed
/// and their step bounds, identities and base cases checked.
///
/// The number of pairs is `2^(interior points of both axes)`, capped by
/// `limits.max_interior`.
pub fn verify_yt_2d(
    y: &GridFunction,
    x: &GridFunction,
    e: &ExponentTriple,
    limits: &Limits,
    tol: Tolerance,
) -> Result<InequalityReport> {
    check_pair(y, x)?;
    check_axes(y)?;
    e.require_theta()?;
    let (nx, ny) = (x.nx(), x.ny());
    limits.check_interior((nx - 2) + (ny - 2))?;
    let norms = YoungNorms2d::compute(y, x, e, limits)?;
    let k = Constants::new(e, norms.product())?;
    let e = e.with_alpha(k.alpha)?;
    let yt = yt_bound_2d(&e)?;

    let fold = |name: &str, c: Option<f64>| WorstCase::new(name, c, tol);
    let mut acc = Yt2d {
        maximal: fold("|I^{D,D'}| <= c_YT V_p(x) V_q(y)", Some(yt)),
        outer_identity: fold("outer removal identity", None),
        cell_identity: fold("difference of differences = y(cell) x(shifted cell)", None),
        outer_steps: fold("outer step <= (n-1)^-alpha (1+zeta(theta/alpha))^alpha V_p V_q", None),
        outer_total: fold("outer cascade total <= zeta(alpha) (1+zeta(theta/alpha))^alpha V_p V_q", None),
        outer_base: fold("base |I^{{0,T},D'}| <= (1+zeta(theta)) V_p V_q", None),
        inner_steps: fold("inner signed step <= (m-1)^-(theta/alpha) (V_p V_q)^(1/alpha)", None),
        inner_base: fold("Delta^{D,{0,T}} <= (V_p V_q)^(1/alpha)", None),
        inner_total: fold("Delta^{D,D'} <= (1+zeta(theta/alpha)) (V_p V_q)^(1/alpha)", None),
    };
    let dys: Vec<Vec<usize>> = index_sub_dissections(0, ny - 1).collect();
    for dx in index_sub_dissections(0, nx - 1) {
        for dy in &dys {
            visit_pair(y, x, &dx, dy, &k, yt, &tol, &mut acc);
        }
    }

    let mut rep = InequalityReport::new(
        format!("young-towghi 2d p={} q={} alpha={:.6}", e.p, e.q, k.alpha),
        tol,
    );
    for w in [
        acc.maximal,
        acc.outer_identity,
        acc.cell_identity,
        acc.outer_steps,
        acc.outer_total,
        acc.outer_base,
        acc.inner_steps,
        acc.inner_base,
        acc.inner_total,
    ] {
        w.finish_into(&mut rep);
    }
    Ok(rep)
}

/// Dual step-function bound: with `y` built from `x` and `q` by
/// [`build_dual_step_function`] and `p' = p / (p - 1)`,
/// `V_{p'}(y) <= |y|_{p'-var} <= 4 (sum_j |x(Q_j)|^p)^{1/p'}`.
pub fn crucial_lemma_check(
    x: &GridFunction,
    q: &RectPartition,
    p: f64,
    limits: &Limits,
    tol: Tolerance,
) -> Result<InequalityReport> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Exponent(format!("need finite p > 1, got {p}")));
    }
    if !validate_partition(q) {
        return Err(Error::InvalidPartition("not a valid partition".into()));
    }
    let pc = p / (p - 1.0);
    let y = build_dual_step_function(x, q, p)?;
    let dom = x.domain();
    let controlled = controlled_pvar_exact(&y, pc, &dom, limits)?;
    let grid = vp_2d_exact(&y, pc, &dom, limits)?;
    let mut mass = 0.0;
    for piece in &q.rects {
        mass += rect_increment(x, piece)?.abs().powf(p);
    }
    let rhs = 4.0 * mass.powf(1.0 / pc);
    let mut rep = InequalityReport::new(format!("dual step function p={p} p'={pc}"), tol);
    rep.check_le(
        "V_{p'}(y) <= |y|_{p'-var}",
        grid.value,
        controlled.value,
        None,
        Some(grid.witness),
    );
    rep.check_le(
        "|y|_{p'-var} <= 4 (sum |x(Q_j)|^p)^{1/p'}",
        controlled.value,
        rhs,
        Some(4.0),
        Some(controlled.witness),
    );
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::young::{discrete_integral_1d, remove_best_point_1d};

    fn axis(n: usize) -> Dissection {
        Dissection::integers(n).unwrap()
    }

    fn table(nx: usize, ny: usize, seed: u64) -> GridFunction {
        crate::random::grid_function(&mut crate::random::rng(seed), nx - 1, ny - 1).unwrap()
    }

    #[test]
    fn constant_integrand_gives_full_increment() {
        let x = table(4, 4, 1);
        let y = GridFunction::sample(axis(4), axis(4), |_, _| 1.0).unwrap();
        let full = x.increment_idx(0, 3, 0, 3);
        for dx in index_sub_dissections(0, 3) {
            for dy in index_sub_dissections(0, 3) {
                assert!((integral(&y, &x, &dx, &dy) - full).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn double_sum_oracle() {
        let x = table(3, 3, 2);
        let y = table(3, 3, 3);
        let mut direct = 0.0;
        for j in 1..3 {
            for i in 1..3 {
                let inc = x.value(i, j) - x.value(i - 1, j) - x.value(i, j - 1) + x.value(i - 1, j - 1);
                direct += y.value(i, j) * inc;
            }
        }
        let v = discrete_integral_2d(&y, &x, x.xs(), x.ys()).unwrap();
        assert!((v - direct).abs() < 1e-14);
    }

    #[test]
    fn separable_integrator_gives_zero() {
        let x = GridFunction::sample(axis(4), axis(4), |s, t| s * s - 3.0 * t).unwrap();
        let y = table(4, 4, 4).zero_axes();
        assert_eq!(discrete_integral_2d(&y, &x, x.xs(), x.ys()).unwrap(), 0.0);
    }

    #[test]
    fn coarse_dy_reduces_to_1d_removal() {
        let x = table(5, 3, 5);
        let y = table(5, 3, 6).zero_axes();
        let e = ExponentTriple::new(1.8, 1.8).unwrap();
        let dy = Dissection::new(vec![0.0, 2.0]).unwrap();
        let s2 = remove_best_point_2d(&y, &x, x.xs(), &dy, &e).unwrap();
        // along D' = {0, T}: integrand y(., T), integrator x([0, .] x [0, T])
        let ys: Vec<f64> = (0..5).map(|i| y.value(i, 2)).collect();
        let xs: Vec<f64> = (0..5).map(|i| x.increment_idx(0, i, 0, 2)).collect();
        let d: Vec<usize> = (0..5).collect();
        let s1 = remove_best_point_1d(&ys, &xs, &d, &e).unwrap();
        assert_eq!(s1.point, s2.point);
        assert!((s1.difference() - s2.difference()).abs() < 1e-14);
        let i1 = discrete_integral_1d(&ys, &xs, &d).unwrap();
        assert!((i1 - s2.before).abs() < 1e-14);
    }

    #[test]
    fn zero_row_removal_is_free() {
        let x = table(4, 4, 7);
        // y(t_2, .) = y(t_1, .) makes removing t_1 cost nothing
        let base = table(4, 4, 8).zero_axes();
        let mut t = base.table();
        t[2] = t[1].clone();
        let y = GridFunction::new(axis(4), axis(4), t).unwrap();
        let e = ExponentTriple::new(1.8, 1.8).unwrap();
        let s = remove_best_point_2d(&y, &x, x.xs(), x.ys(), &e).unwrap();
        assert_eq!(s.difference(), 0.0);
        assert_eq!(s.point, 1);
    }

    #[test]
    fn random_tables_pass() {
        let e = ExponentTriple::new(1.5, 1.5).unwrap();
        for seed in 0..4 {
            let x = table(4, 4, 10 + seed);
            let y = table(4, 4, 20 + seed).zero_axes();
            let rep = verify_yt_2d(&y, &x, &e, &Limits::default(), Tolerance::default()).unwrap();
            assert!(rep.passed(), "{:#?}", rep.failures().collect::<Vec<_>>());
            assert_eq!(rep.records[0].cases, 16);
        }
    }

    #[test]
    fn zero_integrand_and_axes_precondition() {
        let e = ExponentTriple::new(1.5, 1.5).unwrap();
        let x = table(4, 4, 30);
        let zero = GridFunction::sample(axis(4), axis(4), |_, _| 0.0).unwrap();
        let rep = verify_yt_2d(&zero, &x, &e, &Limits::default(), Tolerance::default()).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.records[0].lhs, 0.0);
        let bad = table(4, 4, 31);
        assert!(verify_yt_2d(&bad, &x, &e, &Limits::default(), Tolerance::default()).is_err());
    }

    #[test]
    fn crucial_lemma_single_piece_by_hand() {
        // x(s,t) = s t on [0,2]^2: one piece with x(Q) = 4; p = 2 gives c = 4
        // and y = 4 off the axes, whose only non-zero increment is the
        // corner cell, so both variations equal 4 and the bound is 4 * 4.
        let x = GridFunction::sample(axis(3), axis(3), |s, t| s * t).unwrap();
        let q = RectPartition::new(x.domain(), vec![x.domain()]);
        let rep = crucial_lemma_check(&x, &q, 2.0, &Limits::default(), Tolerance::default()).unwrap();
        assert!(rep.passed());
        assert!((rep.records[0].lhs - 4.0).abs() < 1e-12);
        assert!((rep.records[1].lhs - 4.0).abs() < 1e-12);
        assert!((rep.records[1].rhs - 16.0).abs() < 1e-12);
        assert!(crucial_lemma_check(&x, &q, 1.0, &Limits::default(), Tolerance::default()).is_err());
    }
}
