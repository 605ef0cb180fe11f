//! Dimensions, exponent thresholds, flow period and low spectrum of a product of spheres.
//!
//! Run with `cargo run --example space_info`.

use sphere_dispersion::cli::space_info;
use sphere_dispersion::rational::{format_rational, Rational};
use sphere_dispersion::space::{build_space, eigenvalue, harmonic_dim_multi, MultiIndex};

pub fn run_example() -> sphere_dispersion::Result<()> {
    let space = build_space(&[3, 5], &[Rational::from_integer(1), Rational::new(2, 3)])?;
    let info = space_info(&space);
    println!("S^3 x S^5 with betas 1, 2/3: d = {}, r = {}", info.d, info.r);
    println!("s = {}, p0 = {}, period = 2π·{}", info.s, info.p0, info.period);
    for idx in [[0, 0], [1, 0], [0, 1], [2, 3]] {
        let idx = MultiIndex(idx.to_vec());
        println!(
            "  n = {:?}: eigenvalue {}, multiplicity {}",
            idx.0,
            format_rational(&eigenvalue(&space, &idx)?),
            harmonic_dim_multi(&space, &idx)?
        );
    }
    Ok(())
}

fn main() -> sphere_dispersion::Result<()> {
    run_example()
}
