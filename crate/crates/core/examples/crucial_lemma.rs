//! Dual step function of a rectangulation and its variation bound.
//!
//!     cargo run --example crucial_lemma

use pvar2d::geometry::Limits;
use pvar2d::gridfunc::build_dual_step_function;
use pvar2d::random;
use pvar2d::young::crucial_lemma_check;
use pvar2d::Tolerance;

fn main() -> pvar2d::Result<()> {
    let limits = Limits::default();
    let mut rng = random::rng(3);
    let x = random::grid_function(&mut rng, 3, 3)?;
    let q = random::rectangulation(&mut rng, &x, &limits)?;
    println!("partition:");
    for r in &q.rects {
        println!("  {r}");
    }

    let y = build_dual_step_function(&x, &q, 2.0)?;
    println!("dual step function values:");
    for j in (0..y.ny()).rev() {
        let row: Vec<String> = (0..y.nx()).map(|i| format!("{:8.4}", y.value(i, j))).collect();
        println!("  {}", row.join(" "));
    }

    for p in [1.5, 2.0, 3.0] {
        let rep = crucial_lemma_check(&x, &q, p, &limits, Tolerance::default())?;
        for r in &rep.records {
            println!("p={p}: [{}] {}: {:.5} <= {:.5}", if r.pass { "ok" } else { "FAIL" }, r.name, r.lhs, r.rhs);
        }
    }
    Ok(())
}
