//! Space-time `L^p` norms of the zonal flow over one period for random and
//! focusing data at frequency `N`, fitted against `N^{d/2 - (d+2)/p}`.
//!
//! Run with `cargo run --release --example strichartz`.

use sphere_dispersion::space::build_unit_space;
use sphere_dispersion::verify::{strichartz_zonal_scan, StrichartzPlan};

pub fn run_example() -> sphere_dispersion::Result<()> {
    let mut plan = StrichartzPlan::new(build_unit_space(&[3])?, 8.0);
    plan.n_list = vec![4.0, 8.0, 16.0];
    let r = strichartz_zonal_scan(&plan)?;
    for (n, ratio) in &r.worst {
        println!("N = {n:>3}: worst normalized norm {ratio:.4}");
    }
    println!("worst-trial exponent {:.3} vs scale-invariant {:.3}", r.raw_slope, r.exponent);
    Ok(())
}

fn main() -> sphere_dispersion::Result<()> {
    run_example()
}
