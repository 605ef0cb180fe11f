//! Farey fractions, major-arc classification and Weyl denominator sums.
//!
//! Run with `cargo run --example major_arcs`.

use sphere_dispersion::arcs::{arc_table, classify, denominator_sum_at, farey, Classification};
use sphere_dispersion::verify::fit_loglog;

pub fn run_example() -> sphere_dispersion::Result<()> {
    println!("farey(5) = {:?}", farey(5));
    for r in arc_table(3, 10.0)? {
        println!("  arc {}/{}: center {}, halfwidth {}", r.a, r.q, r.center, r.halfwidth);
    }
    for tau in [1.0 / 3.0, 0.337, 0.5 + 1e-3, (5f64.sqrt() - 1.0) / 2.0] {
        match classify(tau, 1.0, 100.0)? {
            Classification::Major { arc, distance } => println!("t/T = {tau:.6}: arc {}/{} at distance {distance:.2e}", arc.a, arc.q),
            Classification::Minor { a, q, distance } => println!("t/T = {tau:.6}: minor, best {a}/{q} at {distance:.2e}"),
        }
    }
    for (a, q) in [(0u64, 1u64), (1, 3), (3, 8)] {
        let pts: Vec<(f64, f64)> = (4..=10)
            .map(|k| {
                let n = 2f64.powi(k);
                denominator_sum_at(a, q, n).map(|s| (n, s))
            })
            .collect::<Result<_, _>>()?;
        println!("S(tT = {a}/{q}) grows like N^{:.3}", fit_loglog(&pts)?.slope);
    }
    Ok(())
}

fn main() -> sphere_dispersion::Result<()> {
    run_example()
}
