//! Count rectangulations of small cell grids and print the ones of a 2x2 grid.
//!
//!     cargo run --example rectangulations

use pvar2d::geometry::{enumerate_rect_partitions, enumerate_gridlike, Dissection, Limits};

fn main() -> pvar2d::Result<()> {
    let limits = Limits::default();
    println!("cells  rectangulations");
    for (nx, ny) in [(1, 1), (1, 3), (2, 2), (2, 3), (3, 3), (3, 4)] {
        let n = enumerate_rect_partitions(nx, ny, &limits)?.count();
        println!("{nx}x{ny}    {n}");
    }

    println!("\nall rectangulations of the 2x2 grid:");
    for part in enumerate_rect_partitions(2, 2, &limits)? {
        let pieces: Vec<String> = part.rects.iter().map(|r| r.to_string()).collect();
        println!("  {}", pieces.join("  "));
    }

    // grid-like partitions are the product ones
    let dx = Dissection::new(vec![0.0, 1.0, 3.0])?;
    let dy = Dissection::new(vec![0.0, 2.0])?;
    println!("\ngrid-like partition of {}:", enumerate_gridlike(&dx, &dy).target);
    for r in enumerate_gridlike(&dx, &dy).rects {
        println!("  {r}");
    }
    Ok(())
}
