//! Norms on the `1/N` neighbourhoods of the poles, for exponents on both sides of the threshold.
//!
//! Run with `cargo run --release --example corner_scan`.

use sphere_dispersion::space::build_unit_space;
use sphere_dispersion::verify::{corner_scan, geometric_n_list, ScanPlan};

pub fn run_example() -> sphere_dispersion::Result<()> {
    for p in [0.5, 2.0, 4.0] {
        let mut plan = ScanPlan::new(build_unit_space(&[3])?, p);
        plan.n_list = geometric_n_list(4, 7);
        let r = corner_scan(&plan)?;
        println!("p = {p}: raw slope {:.3} (target {:.3}), ratio slope {:.3}, {:?}", r.raw_slope, r.exponent, r.fitted_slope, r.verdict);
    }
    Ok(())
}

fn main() -> sphere_dispersion::Result<()> {
    run_example()
}
