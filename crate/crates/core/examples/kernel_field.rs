//! Assemble `K_N(t, ·)` on S^3 x S^5, check Parseval, and split one factor into its ν-pieces.
//!
//! Run with `cargo run --example kernel_field`.

use sphere_dispersion::kernel::{kernel_1d, parseval_norm, Bump, KernelField, NuDecomposition};
use sphere_dispersion::measure::{lp_norm, Region};
use sphere_dispersion::rational::Rational;
use sphere_dispersion::space::build_unit_space;

pub fn run_example() -> sphere_dispersion::Result<()> {
    let space = build_unit_space(&[3, 5])?;
    let big_n = 32.0;
    let t = space.period_seconds() / 3.0;
    let bump = Bump::smooth();
    let field = KernelField::build(&space, big_n, t, &bump, 16, 1.0 / big_n)?;
    for (j, f) in field.factors.iter().enumerate() {
        println!("factor {j}: S^{}, degrees up to {}, {} nodes", 2 * f.lam + 1, f.nmax, f.values.len());
    }
    let l2 = lp_norm(&field, 2.0, &Region::Full)?;
    let spectral: f64 = field.factors.iter().map(|f| parseval_norm(f.lam, &f.beta, big_n, &bump)).product();
    println!("L2 by quadrature {l2:.10e}, by Parseval {spectral:.10e}");
    for p in [1.0, 4.0, 8.0] {
        println!("  L^{p} norm {:.6e}", lp_norm(&field, p, &Region::Full)?);
    }

    let one = Rational::from_integer(1);
    let theta = 2.2;
    let dec = NuDecomposition::new(2, &one, big_n, t, &bump)?;
    let pieces = [dec.piece(0, theta)?, dec.piece(1, theta)?];
    let whole = kernel_1d(2, &one, big_n, t, &[theta], &bump)[0];
    println!("S^5 at θ = {theta}: pieces {:.6e} + {:.6e} = {:.6e}, kernel {:.6e}", pieces[0], pieces[1], pieces[0] + pieces[1], whole);
    Ok(())
}

fn main() -> sphere_dispersion::Result<()> {
    run_example()
}
