use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{young_bound_1d, zeta, ExponentTriple, RemovalStep};
use crate::error::{Error, Result};
use crate::geometry::index_sub_dissections;
use crate::report::{InequalityReport, Tolerance, Witness, WorstCase};
use crate::variation::pvar_1d_norm;

/// Paths up to this many samples are checked over every sub-dissection.
const EXHAUSTIVE_LEN: usize = 12;
const SAMPLED_DISSECTIONS: usize = 4096;
const SAMPLE_SEED: u64 = 0x005e_ed1d;

fn check_pair(y: &[f64], x: &[f64]) -> Result<()> {
    if y.len() != x.len() {
        return Err(Error::Dimension(format!(
            "y has {} samples, x has {}",
            y.len(),
            x.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::Dimension("paths need at least two samples".into()));
    }
    if y.iter().chain(x).any(|v| !v.is_finite()) {
        return Err(Error::Precondition("paths contain non-finite samples".into()));
    }
    Ok(())
}

fn check_dissection(d: &[usize], len: usize) -> Result<()> {
    if d.len() < 2 || d.windows(2).any(|w| w[0] >= w[1]) || *d.last().unwrap() >= len {
        return Err(Error::InvalidDissection(format!(
            "{d:?} is not an increasing index sequence into {len} samples"
        )));
    }
    Ok(())
}

fn integral(y: &[f64], x: &[f64], d: &[usize]) -> f64 {
    d.windows(2).map(|w| y[w[1]] * (x[w[1]] - x[w[0]])).sum()
}

/// `sum_i y(t_i) (x(t_i) - x(t_{i-1}))` over the index dissection `d`.
pub fn discrete_integral_1d(y: &[f64], x: &[f64], d: &[usize]) -> Result<f64> {
    check_pair(y, x)?;
    check_dissection(d, x.len())?;
    Ok(integral(y, x, d))
}

/// `I^D - I^{D \ t_k}` for interior position `k`, which telescopes to
/// `-(y(t_{k+1}) - y(t_k)) (x(t_k) - x(t_{k-1}))`.
fn removal_difference(y: &[f64], x: &[f64], d: &[usize], k: usize) -> f64 {
    -(y[d[k + 1]] - y[d[k]]) * (x[d[k]] - x[d[k - 1]])
}

/// Interior position minimising `|I^D - I^{D \ t_k}|`, smallest on ties.
fn best_position(y: &[f64], x: &[f64], d: &[usize]) -> (usize, f64) {
    let mut best = (1, removal_difference(y, x, d, 1));
    for k in 2..d.len() - 1 {
        let diff = removal_difference(y, x, d, k);
        if diff.abs() < best.1.abs() {
            best = (k, diff);
        }
    }
    best
}

/// Step bound `(n - 1)^{-theta} |x|_{p-var} |y|_{q-var}` for a dissection
/// with `n` intervals.
fn step_bound(intervals: usize, theta: f64, norms: f64) -> f64 {
    ((intervals - 1) as f64).powf(-theta) * norms
}

fn step(y: &[f64], x: &[f64], d: &[usize], e: &ExponentTriple, norms: f64, tol: &Tolerance) -> RemovalStep {
    let (k, diff) = best_position(y, x, d);
    let before = integral(y, x, d);
    let bound = step_bound(d.len() - 1, e.theta, norms);
    RemovalStep {
        position: k,
        point: d[k],
        before,
        after: before - diff,
        bound,
        signed: false,
        certified: tol.le(diff.abs(), bound),
    }
}

/// Remove the interior point whose removal changes the discrete integral
/// least, certified against `(n-1)^{-theta} |x|_{p-var} |y|_{q-var}`
/// (exact 1D variations of the full paths).
pub fn remove_best_point_1d(y: &[f64], x: &[f64], d: &[usize], e: &ExponentTriple) -> Result<RemovalStep> {
    check_pair(y, x)?;
    check_dissection(d, x.len())?;
    e.require_theta()?;
    if d.len() < 3 {
        return Err(Error::Precondition(
            "removal needs a dissection with at least three points".into(),
        ));
    }
    let norms = pvar_1d_norm(x, e.p) * pvar_1d_norm(y, e.q);
    Ok(step(y, x, d, e, norms, &Tolerance::default()))
}

struct Young1d {
    maximal: WorstCase,
    identity: WorstCase,
    steps: WorstCase,
    total: WorstCase,
}

/// Replay the removal cascade of `d` down to `{0, T}`, folding every step
/// into the accumulators. Returns the removed differences.
fn replay(y: &[f64], x: &[f64], d: &[usize], e: &ExponentTriple, norms: f64, tol: &Tolerance, acc: &mut Young1d) {
    let mut cur = d.to_vec();
    let mut spent = 0.0;
    while cur.len() > 2 {
        let s = step(y, x, &cur, e, norms, tol);
        let mut next = cur.clone();
        next.remove(s.position);
        let direct = integral(y, x, &next);
        let gap = (s.after - direct).abs();
        let scale = s.before.abs().max(direct.abs());
        acc.identity.push(gap, tol.abs + 1e-12 * scale, || Witness::Path {
            indices: cur.clone(),
        });
        acc.steps.push(s.difference().abs(), s.bound, || Witness::Path {
            indices: cur.clone(),
        });
        spent += s.difference().abs();
        cur = next;
    }
    acc.total.push(spent, zeta(e.theta).unwrap_or(f64::INFINITY) * norms, || Witness::Path {
        indices: d.to_vec(),
    });
}

fn sampled_dissections(len: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    (0..SAMPLED_DISSECTIONS).map(move |_| {
        let keep: f64 = rng.gen_range(0.05..0.95);
        let mut d = vec![0];
        d.extend((1..len - 1).filter(|_| rng.gen_bool(keep)));
        d.push(len - 1);
        d
    })
}

/// Young's maximal inequality `|I^D| <= (1 + zeta(theta)) |x|_{p-var}
/// |y|_{q-var}` over sub-dissections of the sample grid (all of them for
/// paths of at most 12 samples, a seeded sample beyond), together with the
/// replayed removal cascades, the removal identity and the two-point base
/// case.
pub fn verify_young_1d(y: &[f64], x: &[f64], e: &ExponentTriple, tol: Tolerance) -> Result<InequalityReport> {
    check_pair(y, x)?;
    e.require_theta()?;
    if y[0] != 0.0 {
        return Err(Error::Precondition(format!("integrand must start at 0, got {}", y[0])));
    }
    let c = young_bound_1d(e)?;
    let z = zeta(e.theta)?;
    let norms = pvar_1d_norm(x, e.p) * pvar_1d_norm(y, e.q);
    let n = x.len();
    let mut acc = Young1d {
        maximal: WorstCase::new("|I^D| <= (1 + zeta(theta)) |x|_p |y|_q", Some(c), tol),
        identity: WorstCase::new("removal identity I^D - I^{D minus t} = -y_{t,t+} x_{t-,t}", None, tol),
        steps: WorstCase::new("removal step <= (n-1)^-theta |x|_p |y|_q", None, tol),
        total: WorstCase::new("cascade total <= zeta(theta) |x|_p |y|_q", Some(z), tol),
    };
    let mut visit = |d: Vec<usize>| {
        let v = integral(y, x, &d).abs();
        acc.maximal.push(v, c * norms, || Witness::Path { indices: d.clone() });
        replay(y, x, &d, e, norms, &tol, &mut acc);
    };
    if n <= EXHAUSTIVE_LEN {
        index_sub_dissections(0, n - 1).for_each(&mut visit);
    } else {
        visit((0..n).collect());
        sampled_dissections(n).for_each(&mut visit);
    }

    let mut rep = InequalityReport::new(format!("young 1d p={} q={}", e.p, e.q), tol);
    let base = integral(y, x, &[0, n - 1]).abs();
    rep.check_le(
        "base |y_{0,T} x_{0,T}| <= |x|_p |y|_q",
        base,
        norms,
        Some(1.0),
        None,
    );
    acc.maximal.finish_into(&mut rep);
    acc.identity.finish_into(&mut rep);
    acc.steps.finish_into(&mut rep);
    acc.total.finish_into(&mut rep);
    Ok(rep)
}
