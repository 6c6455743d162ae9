//! Two-parameter Young-Towghi maximal inequality on a 4x4 cell grid.
//!
//!     cargo run --example young_towghi

use pvar2d::geometry::Limits;
use pvar2d::random;
use pvar2d::young::{discrete_integral_2d, optimal_alpha, verify_yt_2d, ExponentTriple, YoungNorms2d};
use pvar2d::Tolerance;

fn main() -> pvar2d::Result<()> {
    let mut rng = random::rng(21);
    let y = random::axis_zeroed(&mut rng, 4, 4)?;
    let x = random::grid_function(&mut rng, 4, 4)?;
    let e = ExponentTriple::symmetric(1.5)?;
    let (alpha, c) = optimal_alpha(&e)?;
    println!("p=q={:.4} alpha={alpha:.4} c_YT={c:.4}", e.p);

    let norms = YoungNorms2d::compute(&y, &x, &e, &Limits::default())?;
    let full = discrete_integral_2d(&y, &x, x.xs(), x.ys())?;
    println!("V_p(x)={:.4} V_q(y)={:.4} I over the full grid={full:.4}", norms.vp_x, norms.vq_y);

    let rep = verify_yt_2d(&y, &x, &e, &Limits::default(), Tolerance::default())?;
    for r in &rep.records {
        println!("  [{}] {} ({} cases)", if r.pass { "ok" } else { "FAIL" }, r.name, r.cases);
    }
    Ok(())
}
