//! Fractional Brownian covariance: rectangle increments, negative
//! correlation, the variation scan and the super-additivity counterexample.
//!
//!     cargo run --release --example fbm

use pvar2d::fbm::{fbm_rect_cov, fbm_variation_scan, neg_correlation_check, superadditivity_counterexample, HurstKernel};
use pvar2d::geometry::{Dissection, Limits};
use pvar2d::{Rect, Tolerance};

fn main() -> pvar2d::Result<()> {
    let limits = Limits::default();
    let tol = Tolerance::default();
    let r = Rect::new(0.0, 1.0, 1.0, 2.0)?;
    for h in [0.1, 0.25, 0.4, 0.5] {
        let k = HurstKernel::new(h)?;
        let neg = neg_correlation_check(&k, &Dissection::uniform(0.0, 2.0, 9)?, tol)?;
        println!(
            "H={h}: C({r}) = {:+.6}, disjoint increments non-positive: {}",
            fbm_rect_cov(&k, &r)?,
            neg.passed()
        );
    }

    let k = HurstKernel::new(0.25)?;
    let scan = fbm_variation_scan(&k, 0.0, 1.0, &[4, 6, 8, 10], &limits)?;
    println!("\nV_2 of C^(1/4) on [0,1]^2:");
    for e in &scan.entries {
        println!("  n={:<3} value={:.5} ratio={:.5}", e.n, e.value, e.ratio);
    }

    for h in [0.25, 0.5] {
        let c = superadditivity_counterexample(&HurstKernel::new(h)?, 5, &limits, tol)?;
        println!("\nH={h}: pieces sum {:.5}, whole {:.5}, excess {:+.5}", c.sum, c.whole, c.excess);
        for p in &c.pieces {
            println!("  {}: {:.5}", p.rect, p.weight);
        }
    }
    Ok(())
}
