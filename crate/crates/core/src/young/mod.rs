//! Discrete Young integration in one and two parameters.
//!
//! The maximal inequalities bound discrete Riemann-Stieltjes sums
//! `sum y(t_i) (x(t_i) - x(t_{i-1}))` (and their rectangle analogues)
//! uniformly over dissections, provided `theta = 1/p + 1/q > 1`. Both proofs
//! remove one dissection point at a time, always the point whose removal
//! changes the sum least; the verifiers here replay those cascades and
//! certify every step against its bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod one_dim;
mod two_dim;
mod zeta;

pub use one_dim::{discrete_integral_1d, remove_best_point_1d, verify_young_1d};
pub use two_dim::{
    crucial_lemma_check, discrete_integral_2d, remove_best_point_2d, remove_best_point_inner,
    verify_yt_2d, YoungNorms2d,
};
pub use zeta::zeta;

/// Exponents `p` (integrator), `q` (integrand), `theta = 1/p + 1/q` and,
/// for the 2D inequality, `alpha` in `(1, theta)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentTriple {
    pub p: f64,
    pub q: f64,
    pub theta: f64,
    pub alpha: Option<f64>,
}

impl ExponentTriple {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p >= 1.0 && q >= 1.0) || !p.is_finite() || !q.is_finite() {
            return Err(Error::Exponent(format!("need p, q >= 1 (got p={p}, q={q})")));
        }
        Ok(ExponentTriple {
            p,
            q,
            theta: 1.0 / p + 1.0 / q,
            alpha: None,
        })
    }

    /// `p = q = 2 / theta`; requires `theta <= 2`.
    pub fn symmetric(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= 2.0) {
            return Err(Error::Exponent(format!(
                "symmetric exponents need theta in (0, 2], got {theta}"
            )));
        }
        let p = 2.0 / theta;
        ExponentTriple::new(p, p)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        self.require_theta()?;
        if !(alpha > 1.0 && alpha < self.theta) {
            return Err(Error::Exponent(format!(
                "alpha must lie in (1, {}), got {alpha}",
                self.theta
            )));
        }
        self.alpha = Some(alpha);
        Ok(self)
    }

    /// Set `alpha` to the minimiser of the Young-Towghi constant.
    pub fn with_optimal_alpha(self) -> Result<Self> {
        let (alpha, _) = optimal_alpha(&self)?;
        self.with_alpha(alpha)
    }

    pub fn require_theta(&self) -> Result<()> {
        if self.theta > 1.0 {
            Ok(())
        } else {
            Err(Error::Exponent(format!(
                "maximal inequalities need theta = 1/p + 1/q > 1, got {}",
                self.theta
            )))
        }
    }

    pub(crate) fn alpha_or_optimal(&self) -> Result<f64> {
        match self.alpha {
            Some(a) => Ok(a),
            None => optimal_alpha(self).map(|(a, _)| a),
        }
    }
}

/// Constant `(1 + zeta(theta))` of the 1D maximal inequality.
pub fn young_bound_1d(e: &ExponentTriple) -> Result<f64> {
    e.require_theta()?;
    Ok(1.0 + zeta(e.theta)?)
}

fn yt_constant(theta: f64, alpha: f64) -> Result<f64> {
    Ok((1.0 + zeta(theta / alpha)?).powf(alpha) * zeta(alpha)? + 1.0 + zeta(theta)?)
}

/// Young-Towghi constant `(1 + zeta(theta/alpha))^alpha zeta(alpha) + 1 + zeta(theta)`.
pub fn yt_bound_2d(e: &ExponentTriple) -> Result<f64> {
    e.require_theta()?;
    let alpha = e
        .alpha
        .ok_or_else(|| Error::Exponent("yt_bound_2d needs alpha".into()))?;
    if !(alpha > 1.0 && alpha < e.theta) {
        return Err(Error::Exponent(format!(
            "alpha must lie in (1, {}), got {alpha}",
            e.theta
        )));
    }
    yt_constant(e.theta, alpha)
}

const ALPHA_MARGIN: f64 = 1e-6;

/// Golden-section minimisation of the Young-Towghi constant over
/// `alpha in [1 + 1e-6, theta - 1e-6]`. Returns `(alpha, constant)`.
pub fn optimal_alpha(e: &ExponentTriple) -> Result<(f64, f64)> {
    e.require_theta()?;
    let (mut lo, mut hi) = (1.0 + ALPHA_MARGIN, e.theta - ALPHA_MARGIN);
    if !(lo < hi) {
        return Err(Error::Domain(format!(
            "theta = {} leaves no room for alpha",
            e.theta
        )));
    }
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = yt_constant(e.theta, x1)?;
    let mut f2 = yt_constant(e.theta, x2)?;
    for _ in 0..200 {
        if hi - lo <= 1e-12 * hi {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = yt_constant(e.theta, x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = yt_constant(e.theta, x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// One step of a removal cascade.
///
/// For point-removal steps (`signed == false`) the step is certified when
/// `|before - after| <= bound`; for the inner `Delta` steps of the 2D
/// argument only the one-sided `before - after <= bound` is asserted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemovalStep {
    /// Position of the removed point within the dissection.
    pub position: usize,
    /// Grid index of the removed point.
    pub point: usize,
    pub before: f64,
    pub after: f64,
    pub bound: f64,
    pub signed: bool,
    pub certified: bool,
}

impl RemovalStep {
    pub fn difference(&self) -> f64 {
        self.before - self.after
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn yt_bound_plugs_into_zeta() {
        let e = ExponentTriple::new(1.0, 1.0).unwrap().with_alpha(1.5).unwrap();
        assert_eq!(e.theta, 2.0);
        let want = (1.0 + zeta(4.0 / 3.0).unwrap()).powf(1.5) * zeta(1.5).unwrap()
            + 1.0
            + zeta(2.0).unwrap();
        assert!((yt_bound_2d(&e).unwrap() - want).abs() < 1e-12 * want);
    }

    #[test]
    fn yt_bound_blows_up_at_both_ends() {
        let e = ExponentTriple::new(1.0, 1.0).unwrap();
        let mid = yt_bound_2d(&e.with_alpha(1.5).unwrap()).unwrap();
        let near_one = yt_bound_2d(&e.with_alpha(1.0 + 1e-4).unwrap()).unwrap();
        let near_theta = yt_bound_2d(&e.with_alpha(2.0 - 1e-4).unwrap()).unwrap();
        assert!(near_one > 100.0 * mid);
        assert!(near_theta > 100.0 * mid);
    }

    #[test]
    fn optimal_alpha_beats_a_grid_scan() {
        for theta in [1.1, 1.2, 1.5, 1.9] {
            let e = ExponentTriple::symmetric(theta).unwrap();
            let (alpha, best) = optimal_alpha(&e).unwrap();
            assert!(alpha > 1.0 && alpha < theta);
            for k in 1..200 {
                let a = 1.0 + (theta - 1.0) * k as f64 / 200.0;
                let v = yt_bound_2d(&e.with_alpha(a).unwrap()).unwrap();
                assert!(best <= v * (1.0 + 1e-9), "theta {theta} alpha {a}");
            }
        }
    }

    #[test]
    fn exponent_validation() {
        assert!(ExponentTriple::new(0.5, 2.0).is_err());
        let e = ExponentTriple::new(2.0, 2.0).unwrap();
        assert!(e.require_theta().is_err());
        assert!(e.with_alpha(1.1).is_err());
        assert!(ExponentTriple::symmetric(1.2).unwrap().with_alpha(1.3).is_err());
        assert!(yt_bound_2d(&ExponentTriple::symmetric(1.5).unwrap()).is_err());
    }
}
