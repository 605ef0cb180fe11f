use super::*;
use crate::measure::{lp_norm, Region};
use crate::space::{build_space, build_unit_space, harmonic_dim, MultiIndex};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

fn one() -> Rational {
    Rational::one()
}

fn rel(a: Complex64, b: Complex64, scale: f64) -> f64 {
    (a - b).norm() / scale.max(f64::MIN_POSITIVE)
}

fn grid(m: usize) -> Vec<f64> {
    (0..m).map(|k| TAU * (k as f64 + 0.37) / m as f64).collect()
}

fn sup(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn at_identity_and_time_zero_sharp_kernel_counts_dimensions() {
    for lam in 1..=3u32 {
        let big_n = 10.0;
        let b = Bump::sharp();
        let v = kernel_1d(lam, &one(), big_n, 0.0, &[0.0], &b)[0];
        // integer oracle: 4·n(n+2λ) ∈ [N², 16 N²]
        let want: u128 = (0..100u64)
            .filter(|&n| {
                let e = 4 * n * (n + 2 * lam as u64);
                (100..=1600).contains(&e)
            })
            .map(|n| harmonic_dim(2 * lam + 1, n))
            .sum();
        assert_eq!(v.im, 0.0);
        assert!((v.re - want as f64).abs() < 1e-9 * want as f64, "{v} vs {want}");
    }
}

#[test]
fn one_term_kernel() {
    let b = Bump::new(BumpKind::Sharp, 2.5, 3.5).unwrap();
    let (t, th) = (0.731, 0.4);
    let v = kernel_1d(1, &one(), 1.0, t, &[th], &b)[0];
    let want = Complex64::from_polar(4.0 * th.cos(), -3.0 * t);
    assert!(rel(v, want, 4.0) < 1e-14);
}

#[test]
fn nu_pieces_sum_to_kernel() {
    let cases = [(1u32, 64.0, 1.0 / 3.0, 1.0), (2, 32.0, 0.2, 2.2), (3, 24.0, 0.37, 0.9), (5, 16.0, 0.61, 2.9)];
    for (lam, big_n, frac, th) in cases {
        let t = TAU * frac;
        let b = Bump::smooth();
        let k = kernel_1d(lam, &one(), big_n, t, &[th], &b)[0];
        let dec = NuDecomposition::new(lam, &one(), big_n, t, &b).unwrap();
        let s: Complex64 = (0..lam).map(|nu| dec.piece(nu, th).unwrap()).sum();
        assert!(rel(s, k, k.norm()) < 1e-8, "lam {lam}: {s} vs {k}");
    }
}

#[test]
fn lam_one_has_a_single_piece() {
    let b = Bump::smooth();
    let (t, th) = (0.3, 1.3);
    let k = kernel_1d(1, &one(), 20.0, t, &[th], &b)[0];
    let p = kernel_nu(1, &one(), 20.0, 0, t, th, &b).unwrap();
    assert!(rel(p, k, k.norm()) < 1e-10);
    assert!(kernel_nu(1, &one(), 20.0, 1, t, th, &b).is_err());
    assert!(matches!(kernel_nu(2, &one(), 20.0, 0, t, 1e-5, &b), Err(Error::CornerGuard { .. })));
}

#[test]
fn kappa_at_the_identity_is_a_finite_direct_sum() {
    let (lam, big_n, b) = (3u32, 12.0, Bump::smooth());
    for nu in 0..lam {
        let k = kappa_nu(lam, &one(), big_n, nu, 0.0, 0.0, &b).unwrap();
        // at t = θ = 0: Σ φ d_n C_{n,ν} cos(-(ν+λ)π/2), in exact coefficients
        let mut want = 0.0;
        for n in 0..=max_degree(lam, &one(), big_n, &b) {
            let phi = b.eval(scaled(lam, &one(), n, big_n));
            let c = crate::specialfn::cnv_exact(lam, n, nu);
            let c = num_traits::ToPrimitive::to_f64(&c).unwrap();
            want += phi * harmonic_dim_f64(2 * lam + 1, n) * c * (-((nu + lam) as f64) * PI / 2.0).cos();
        }
        assert!(k.re.is_finite() && (k.re - want).abs() <= 1e-9 * want.abs().max(1.0), "{k} vs {want}");
    }
}

#[test]
fn periodic_in_time() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let g = grid(97);
    for (lam, beta) in [(1u32, one()), (2, Rational::new(2, 3)), (3, Rational::new(5, 2))] {
        let sp = build_space(&[2 * lam + 1], &[beta]).unwrap();
        let period = sp.period_seconds();
        let t: f64 = rng.gen_range(0.0..period);
        let b = Bump::smooth();
        let a = kernel_1d(lam, &beta, 32.0, t, &g, &b);
        let c = kernel_1d(lam, &beta, 32.0, t + period, &g, &b);
        let s = sup(&a);
        for (x, y) in a.iter().zip(&c) {
            assert!(rel(*x, *y, s) < 1e-10);
        }
    }
}

#[test]
fn conjugation_and_weyl_symmetry() {
    let g = grid(61);
    let mirrored: Vec<f64> = g.iter().map(|&th| TAU - th).collect();
    for lam in 1..=4u32 {
        let b = Bump::smooth();
        let t = 0.8123;
        let a = kernel_1d(lam, &one(), 40.0, t, &g, &b);
        let c = kernel_1d(lam, &one(), 40.0, -t, &g, &b);
        let m = kernel_1d(lam, &one(), 40.0, t, &mirrored, &b);
        let s = sup(&a);
        for ((x, y), z) in a.iter().zip(&c).zip(&m) {
            assert!(rel(*x, y.conj(), s) < 1e-12);
            assert!(rel(*x, *z, s) < 1e-12);
        }
    }
}

#[test]
fn even_and_odd_parts_translate_by_pi() {
    let g = grid(53);
    let shifted: Vec<f64> = g.iter().map(|&th| (th + PI) % TAU).collect();
    for lam in 1..=3u32 {
        let b = Bump::smooth();
        let t = 1.234;
        for (par, sign) in [(Parity::Even, 1.0), (Parity::Odd, -1.0)] {
            let a = kernel_1d_parity(lam, &one(), 30.0, t, &g, &b, par);
            let c = kernel_1d_parity(lam, &one(), 30.0, t, &shifted, &b, par);
            let s = sup(&a);
            for (x, y) in a.iter().zip(&c) {
                assert!(rel(*y, *x * sign, s) < 1e-10);
            }
        }
    }
}

#[test]
fn parseval_matches_quadrature() {
    for dims in [[3u32], [5], [7]] {
        let sp = build_unit_space(&dims).unwrap();
        let lam = sp.factors[0].lam;
        let b = Bump::smooth();
        let big_n = 24.0;
        let want = parseval_norm(lam, &one(), big_n, &b);
        for t in [0.0, 0.5, 2.9] {
            let f = KernelField::build(&sp, big_n, t, &b, 16, 1.0 / big_n).unwrap();
            let got = lp_norm(&f, 2.0, &Region::Full).unwrap();
            assert!((got - want).abs() < 1e-6 * want, "{got} vs {want}");
        }
    }
}

#[test]
fn product_of_rank_one_is_kernel_1d() {
    let sp = build_unit_space(&[5]).unwrap();
    let b = Bump::smooth();
    let f = KernelField::build(&sp, 12.0, 0.3, &b, 16, 0.1).unwrap();
    let direct = kernel_1d(2, &one(), 12.0, 0.3, &f.factors[0].quadrature.nodes, &b);
    assert_eq!(f.factors[0].values, direct);
}

#[test]
fn product_factorizes_at_the_identity() {
    let sp = build_unit_space(&[3, 3]).unwrap();
    let b = Bump::smooth();
    let grids = vec![TorusQuadrature::trapezoid(3, 64), TorusQuadrature::trapezoid(3, 64)];
    let f = kernel_product(&sp, 16.0, 0.0, grids, &b).unwrap();
    let k0 = kernel_1d(1, &one(), 16.0, 0.0, &[0.0], &b)[0];
    assert!(rel(f.value_at(&[0, 0]), k0 * k0, k0.norm_sqr()) < 1e-14);
}

#[test]
fn product_matches_lattice_sum() {
    let sp = build_space(&[3, 5], &[one(), Rational::new(3, 2)]).unwrap();
    let b = Bump::smooth();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..3 {
        let t: f64 = rng.gen_range(0.0..sp.period_seconds());
        let pt = [rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU)];
        let direct = kernel_direct_multi(&sp, 32.0, t, &pt, Mollifier::Product(b)).unwrap();
        let k: Complex64 = sp
            .factors
            .iter()
            .zip(pt)
            .map(|(f, th)| kernel_1d(f.lam, &f.beta, 32.0, t, &[th], &b)[0])
            .product();
        assert!(rel(direct, k, k.norm()) < 1e-9, "{direct} vs {k}");
    }
}

#[test]
fn direct_rank_one_agrees() {
    let sp = build_unit_space(&[7]).unwrap();
    let b = Bump::smooth();
    for m in [Mollifier::Product(b), Mollifier::Radial(b)] {
        let d = kernel_direct_multi(&sp, 20.0, 0.77, &[1.1], m).unwrap();
        let k = kernel_1d(3, &one(), 20.0, 0.77, &[1.1], &b)[0];
        assert!(rel(d, k, k.norm()) < 1e-12);
    }
}

#[test]
fn sharp_radial_sum_counts_shell_lattice_points() {
    let sp = build_unit_space(&[3, 3]).unwrap();
    let b = Bump::sharp();
    let big_n = 8u64;
    let v = kernel_direct_multi(&sp, big_n as f64, 0.0, &[0.0, 0.0], Mollifier::Radial(b)).unwrap();
    let mut want: u128 = 0;
    for a in 0..40u64 {
        for c in 0..40u64 {
            let e = 4 * (a * (a + 2) + c * (c + 2));
            if e >= big_n * big_n && e <= 16 * big_n * big_n {
                want += harmonic_dim(3, a) * harmonic_dim(3, c);
            }
        }
    }
    assert_eq!(v.re, want as f64);
    assert_eq!(v.im, 0.0);
    let prod = kernel_direct_multi(&sp, big_n as f64, 0.0, &[0.0, 0.0], Mollifier::Product(b)).unwrap();
    assert!(prod.re.is_finite() && prod.re != v.re);
}

#[test]
fn direct_sum_guard() {
    let sp = build_unit_space(&[3, 3, 3, 3]).unwrap();
    let e = kernel_direct_multi(&sp, 200.0, 0.0, &[0.0; 4], Mollifier::Product(Bump::smooth()));
    assert!(matches!(e, Err(Error::EnumerationTooLarge { .. })));
}

#[test]
fn csv_and_header() {
    let sp = build_unit_space(&[3]).unwrap();
    let f = KernelField::build(&sp, 4.0, 0.1, &Bump::smooth(), 16, 0.25).unwrap();
    let mut buf = Vec::new();
    f.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("factor,theta,re,im\n"));
    assert_eq!(text.lines().count(), 1 + f.factors[0].values.len());
    let js = serde_json::to_string(&f.header()).unwrap();
    assert!(js.contains("\"N\":4.0") && js.contains("\"smooth\""));
}

#[test]
fn zonal_flow() {
    let sp = build_space(&[3, 5], &[one(), Rational::new(2, 3)]).unwrap();
    let mut st = ZonalState::new(sp.clone());
    st.insert(MultiIndex(vec![1, 0]), Complex64::new(1.0, 0.5)).unwrap();
    st.insert(MultiIndex(vec![3, 4]), Complex64::new(-0.2, 0.1)).unwrap();
    st.insert(MultiIndex(vec![7, 2]), Complex64::new(0.0, 2.0)).unwrap();
    assert_eq!(evolve_zonal(&st, 0.0), st);
    let back = evolve_zonal(&st, sp.period_seconds());
    for (k, c) in &st.coeffs {
        assert!((back.coeffs[k] - c).norm() < 1e-12);
    }
    let mid = evolve_zonal(&st, 0.3);
    assert!((sobolev_norm(&mid, 1.5) - sobolev_norm(&st, 1.5)).abs() < 1e-12 * sobolev_norm(&st, 1.5));
    assert!(st.insert(MultiIndex(vec![1]), Complex64::new(1.0, 0.0)).is_err());
}

#[test]
fn single_mode_norms() {
    let sp = build_unit_space(&[3]).unwrap();
    let mut st = ZonalState::new(sp);
    st.insert(MultiIndex(vec![1]), Complex64::new(1.0, 0.0)).unwrap();
    assert!((l2_norm(&st) - 2.0).abs() < 1e-15);
    // weights (-eigenvalue)^0 + 1 = 2
    assert!((sobolev_norm(&st, 0.0) - 8f64.sqrt()).abs() < 1e-15);
    let v = evaluate_zonal(&st, &[vec![0.0, PI]]).unwrap();
    assert!((v[0].re - 4.0).abs() < 1e-14 && (v[1].re + 4.0).abs() < 1e-14);
}

#[test]
fn zonal_evaluation_matches_kernel_sum() {
    // K_N(t) is the evolution of the zonal state with c_n = φ(x_n)
    let sp = build_unit_space(&[5]).unwrap();
    let b = Bump::smooth();
    let big_n = 10.0;
    let mut st = ZonalState::new(sp);
    for n in 0..=max_degree(2, &one(), big_n, &b) {
        let w = b.eval(scaled(2, &one(), n, big_n));
        if w > 0.0 {
            st.insert(MultiIndex(vec![n]), Complex64::new(w, 0.0)).unwrap();
        }
    }
    let g = grid(17);
    let z = evaluate_zonal(&evolve_zonal(&st, 0.45), std::slice::from_ref(&g)).unwrap();
    let k = kernel_1d(2, &one(), big_n, 0.45, &g, &b);
    let s = sup(&k);
    for (a, c) in z.iter().zip(&k) {
        assert!(rel(*a, *c, s) < 1e-12);
    }
}

#[test]
fn kappa_grid_matches_double_double_path() {
    let b = Bump::smooth();
    let dec = NuDecomposition::new(3, &one(), 40.0, 1.7, &b).unwrap();
    let g = grid(37);
    for nu in 0..3 {
        let fast = dec.kappa_grid(nu, &g).unwrap();
        let s = sup(&fast);
        for (th, v) in g.iter().zip(&fast) {
            assert!(rel(*v, dec.kappa(nu, *th).unwrap(), s) < 1e-12);
        }
    }
}
