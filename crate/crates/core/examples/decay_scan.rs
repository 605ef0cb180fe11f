//! Worst-case `L^p` decay on the major arcs: the fitted slope of
//! `‖K_N‖_p · [√q(1 + N‖t/T - a/q‖^{1/2})]^r / N^{d - d/p}` should stay near zero.
//!
//! Run with `cargo run --release --example decay_scan`.

use sphere_dispersion::space::build_unit_space;
use sphere_dispersion::verify::{decay_scan, geometric_n_list, ScanPlan};

pub fn run_example() -> sphere_dispersion::Result<()> {
    let mut plan = ScanPlan::new(build_unit_space(&[3])?, 4.0);
    plan.n_list = geometric_n_list(4, 7);
    let report = decay_scan(&plan)?;
    report.validate()?;
    for (n, ratio) in &report.worst {
        println!("N = {n:>4}: worst ratio {ratio:.4}");
    }
    println!(
        "raw norm slope {:.3} (bound exponent {}), ratio slope {:.3} ± {:.3}, verdict {:?}",
        report.raw_slope, report.exponent, report.fitted_slope, report.slope_ci, report.verdict
    );
    Ok(())
}

fn main() -> sphere_dispersion::Result<()> {
    run_example()
}
