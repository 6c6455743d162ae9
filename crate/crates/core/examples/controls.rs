//! Rectangle functions as 2D controls: the controlled p-variation power is
//! super-additive, V_p^p need not be.
//!
//!     cargo run --example controls

use pvar2d::controls::{almost_subadd_sweep, check_superadditive, control_from_cpvar, dominates_increments, table_from_vp};
use pvar2d::geometry::Limits;
use pvar2d::random;
use pvar2d::Tolerance;

fn main() -> pvar2d::Result<()> {
    let limits = Limits::default();
    let tol = Tolerance::default();
    let f = random::grid_function(&mut random::rng(11), 3, 3)?;

    for p in [1.0, 2.0] {
        let w = control_from_cpvar(&f, p, &limits)?;
        let sup = check_superadditive(&w, &limits, tol)?;
        let dom = dominates_increments(&w, &f, p, tol)?;
        let sub = almost_subadd_sweep(&w, p, tol)?;
        println!(
            "p={p}: super-additive {} ({} rectangles), dominates |f(R)|^p {}, almost subadditive {}",
            sup.passed(),
            sup.len(),
            dom.passed(),
            sub.passed()
        );
    }

    // no guarantee for the grid-like table; report the worst rectangle
    let v = table_from_vp(&f, 3.0, &limits)?;
    let rep = check_superadditive(&v, &limits, tol)?;
    match rep.worst() {
        Some(r) if !rep.passed() => println!("V_3^3: super-additivity fails, {} > {}", r.lhs, r.rhs),
        _ => println!("V_3^3: super-additive on this sample"),
    }
    Ok(())
}
