//! Evolve zonal data under `e^{itΔ}`: periodicity in `T` and conservation of Sobolev norms.
//!
//! Run with `cargo run --example zonal_flow`.

use sphere_dispersion::kernel::{evaluate_zonal, evolve_zonal, l2_norm, sobolev_norm, ZonalState};
use sphere_dispersion::rational::Rational;
use sphere_dispersion::space::{build_space, MultiIndex};
use sphere_dispersion::Complex64;

pub fn run_example() -> sphere_dispersion::Result<()> {
    let space = build_space(&[3, 3], &[Rational::from_integer(1), Rational::new(2, 3)])?;
    let mut f = ZonalState::new(space.clone());
    f.insert(MultiIndex(vec![1, 0]), Complex64::new(1.0, 0.0))?;
    f.insert(MultiIndex(vec![2, 5]), Complex64::new(0.0, 0.5))?;
    let period = space.period_seconds();
    let grids = vec![vec![0.0, 0.7], vec![0.0, 2.1]];
    for t in [0.0, 0.25 * period, period] {
        let u = evolve_zonal(&f, t);
        let vals = evaluate_zonal(&u, &grids)?;
        println!("t = {t:.4}: H^1 {:.6}, L2 {:.6}, u(0,0) = {:.6}", sobolev_norm(&u, 1.0), l2_norm(&u), vals[0]);
    }
    Ok(())
}

fn main() -> sphere_dispersion::Result<()> {
    run_example()
}
