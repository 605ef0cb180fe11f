//! Sup norms of the trigonometric numerators `κ^{(ν)}` on S^5 against `N^{λ-ν+1}`.
//!
//! Run with `cargo run --release --example kappa_scan`.

use sphere_dispersion::space::build_unit_space;
use sphere_dispersion::verify::{geometric_n_list, kappa_scan, ScanPlan};

pub fn run_example() -> sphere_dispersion::Result<()> {
    let mut plan = ScanPlan::new(build_unit_space(&[5])?, f64::INFINITY);
    plan.n_list = geometric_n_list(4, 7);
    for nu in 0..2 {
        let r = kappa_scan(&plan, nu)?;
        println!("nu = {nu}: raw slope {:.3} (target {}), ratio slope {:.3}, {:?}", r.raw_slope, r.exponent, r.fitted_slope, r.verdict);
    }
    Ok(())
}

fn main() -> sphere_dispersion::Result<()> {
    run_example()
}
