//! Grid-like and controlled p-variation of one grid function, and the
//! sandwich constant between them.
//!
//!     cargo run --example variation

use pvar2d::geometry::Limits;
use pvar2d::random;
use pvar2d::variation::{controlled_pvar_exact, sandwich_constant_parts, verify_sandwich, vp_2d, vp_2d_alternating};
use pvar2d::Tolerance;

fn main() -> pvar2d::Result<()> {
    let limits = Limits::default();
    let f = random::grid_function(&mut random::rng(7), 3, 3)?;
    let dom = f.domain();

    println!("p     V_p (exact)  V_p (ascent)  controlled");
    for p in [1.0, 1.5, 2.0, 3.0] {
        let exact = vp_2d(&f, p, &dom, &limits)?;
        let ascent = vp_2d_alternating(&f, p, &dom)?;
        let cp = controlled_pvar_exact(&f, p, &dom, &limits)?;
        println!("{p:<5} {:<12.6} {:<13.6} {:.6}", exact.value, ascent.value, cp.value);
    }

    let c = sandwich_constant_parts(2.0, 1.0)?;
    println!(
        "\nc(p=2, eps=1) = {:.4} (q = {:.4}, alpha = {:.4})",
        c.value, c.q, c.alpha
    );
    let rep = verify_sandwich(&f, 2.0, 1.0, &dom, &limits, Tolerance::default())?;
    for r in &rep.records {
        println!("  [{}] {}: {:.6} <= {:.6}", if r.pass { "ok" } else { "FAIL" }, r.name, r.lhs, r.rhs);
    }
    Ok(())
}
