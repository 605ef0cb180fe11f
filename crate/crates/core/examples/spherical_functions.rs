//! Zonal spherical functions by recurrence and by the finite trigonometric sum,
//! including angles close to the poles where the sum cancels heavily.
//!
//! Run with `cargo run --example spherical_functions`.

use sphere_dispersion::specialfn::{phi, phi_explicit_guarded, phi_recurrence, phi_s3_closed_form, UltrasphericalCoeffs};

pub fn run_example() -> sphere_dispersion::Result<()> {
    println!("{:>3} {:>4} {:>8} {:>24} {:>10}", "lam", "n", "theta", "recurrence", "|diff|");
    for lam in [1u32, 3, 5] {
        for (n, theta) in [(7u64, 0.01), (120, 0.01), (200, 1.3), (57, 3.1)] {
            let r = phi_recurrence(lam, n, theta);
            let e = phi_explicit_guarded(lam, n, theta, 1e-3)?;
            println!("{lam:>3} {n:>4} {theta:>8} {r:>24.16e} {:>10.2e}", (r - e).abs());
        }
    }
    let (n, theta) = (40, 0.77);
    println!("S^3 closed form check: {:.3e}", (phi(1, n, theta) - phi_s3_closed_form(n, theta)).abs());

    let table = UltrasphericalCoeffs::new(3, 4)?;
    let mut csv = Vec::new();
    table.write_csv(&mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    Ok(())
}

fn main() -> sphere_dispersion::Result<()> {
    run_example()
}
