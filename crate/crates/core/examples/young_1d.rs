//! Young's maximal inequality for a pair of sampled paths, and one step of
//! the point-removal argument behind it.
//!
//!     cargo run --example young_1d

use pvar2d::random;
use pvar2d::young::{discrete_integral_1d, remove_best_point_1d, verify_young_1d, young_bound_1d, ExponentTriple};
use pvar2d::Tolerance;

fn main() -> pvar2d::Result<()> {
    let mut rng = random::rng(5);
    let y = random::path_from_zero(&mut rng, 10);
    let x = random::path(&mut rng, 10);
    let e = ExponentTriple::new(2.0, 1.5)?;
    println!("p=2 q=1.5 theta={:.4} constant={:.4}", e.theta, young_bound_1d(&e)?);

    let d: Vec<usize> = (0..10).collect();
    println!("I over the full grid: {:.6}", discrete_integral_1d(&y, &x, &d)?);
    let step = remove_best_point_1d(&y, &x, &d, &e)?;
    println!(
        "drop sample {}: {:.6} -> {:.6}, |diff| {:.2e} <= {:.2e}",
        step.point,
        step.before,
        step.after,
        step.difference().abs(),
        step.bound
    );

    let rep = verify_young_1d(&y, &x, &e, Tolerance::default())?;
    for r in &rep.records {
        println!("  [{}] {} ({} cases, slack {:.3e})", if r.pass { "ok" } else { "FAIL" }, r.name, r.cases, r.slack);
    }
    Ok(())
}
