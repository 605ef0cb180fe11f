//! Away from the poles the decay bound needs `p ≥ 2d/(d-1)`; below it the ratio grows.
//!
//! Run with `cargo run --release --example threshold`.

use sphere_dispersion::space::build_unit_space;
use sphere_dispersion::verify::{geometric_n_list, threshold_check, ScanPlan};

pub fn run_example() -> sphere_dispersion::Result<()> {
    let mut plan = ScanPlan::new(build_unit_space(&[3])?, 3.0);
    plan.n_list = geometric_n_list(4, 7);
    let r = threshold_check(&plan)?;
    println!("threshold 2d/(d-1) = {}", r.threshold);
    println!("p = {}: ratio slope {:.3}, {:?}", r.p, r.at_p.fitted_slope, r.at_p.verdict);
    println!("p = {:.2}: ratio slope {:.3} (should exceed the budget)", r.probe_p, r.probe.fitted_slope);
    println!("consistent: {}", r.consistent);
    Ok(())
}

fn main() -> sphere_dispersion::Result<()> {
    run_example()
}
