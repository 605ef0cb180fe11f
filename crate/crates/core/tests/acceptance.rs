//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the lines show without `--nocapture`:
//! `cargo test --release --test acceptance`.

use num_integer::Integer;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sphere_dispersion::arcs::{arc_distance, classify, classify_rational, denominator_sum_at, farey, Classification};
use sphere_dispersion::kernel::{
    kernel_1d, kernel_direct_multi, kernel_product, parseval_norm, Bump, KernelField, Mollifier, NuDecomposition,
};
use sphere_dispersion::measure::{lp_norm, region_measure, Pole, Region, TorusQuadrature};
use sphere_dispersion::rational::Rational;
use sphere_dispersion::space::{build_space, build_unit_space};
use sphere_dispersion::specialfn::{phi_recurrence, phi_s3_closed_form, UltrasphericalCoeffs};
use sphere_dispersion::verify::{
    corner_scan, decay_scan, fit_loglog, geometric_n_list, kappa_scan, strichartz_zonal_scan, threshold_check,
    ScalingReport, ScanPlan, StrichartzPlan,
};
use sphere_dispersion::Complex64;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

type Outcome = sphere_dispersion::Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome, u64);

struct Check {
    ok: bool,
    detail: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self { ok: true, detail: Vec::new() }
    }

    fn require(&mut self, ok: bool, what: String) {
        self.ok &= ok;
        self.detail.push(if ok { what } else { format!("{what} [miss]") });
    }

    fn done(self) -> Outcome {
        Ok((self.ok, self.detail.join("; ")))
    }
}

fn rel(a: Complex64, b: Complex64, scale: f64) -> f64 {
    (a - b).norm() / scale
}

fn slope_line(name: &str, r: &ScalingReport, budget: f64) -> (bool, String) {
    let ok = r.fitted_slope <= budget;
    (ok, format!("{name}: ratio slope {:.3} (≤ {budget}), raw {:.3} vs {}", r.fitted_slope, r.raw_slope, r.exponent))
}

fn oracle_equivalence() -> Outcome {
    let thetas: Vec<f64> = (0..=120).map(|i| 0.01 + (PI - 0.02) * i as f64 / 120.0).collect();
    let mut worst: f64 = 0.0;
    for lam in 1..=5u32 {
        let table = UltrasphericalCoeffs::new(lam, 200)?;
        for n in 0..=200u64 {
            for &th in &thetas {
                let e = table.phi_explicit(n, th, 1e-3)?;
                worst = worst.max((e - phi_recurrence(lam, n, th)).abs());
            }
        }
    }
    let mut s3: f64 = 0.0;
    for n in 0..=100u64 {
        for &th in &thetas {
            s3 = s3.max((phi_recurrence(1, n, th) - phi_s3_closed_form(n, th)).abs());
        }
    }
    let mut c = Check::new();
    c.require(worst < 1e-9, format!("explicit vs recurrence {worst:.2e}"));
    c.require(s3 < 1e-12, format!("S^3 closed form {s3:.2e}"));
    c.done()
}

fn structural_identities() -> Outcome {
    let one = Rational::from_integer(1);
    let bump = Bump::smooth();
    let mut c = Check::new();

    let thetas = [0.25, 0.8, 1.3, 2.0, 2.7, 3.5, 4.4, 5.9];
    let mut nu_err: f64 = 0.0;
    for lam in 1..=3u32 {
        for big_n in [16.0, 64.0] {
            for t in [0.0, 0.41, 2.0 * PI / 3.0, 5.17] {
                let dec = NuDecomposition::new(lam, &one, big_n, t, &bump)?;
                let ks = kernel_1d(lam, &one, big_n, t, &thetas, &bump);
                for (&th, &k) in thetas.iter().zip(&ks) {
                    let mut s = Complex64::new(0.0, 0.0);
                    for nu in 0..lam {
                        s += dec.piece(nu, th)?;
                    }
                    nu_err = nu_err.max(rel(s, k, k.norm()));
                }
            }
        }
    }
    c.require(nu_err < 1e-8, format!("nu-sum {nu_err:.2e}"));

    let mut corner: f64 = 0.0;
    for lam in 1..=5u32 {
        let table = UltrasphericalCoeffs::new(lam, 120)?;
        for n in 0..=120u64 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            for th in [0.003, 0.3, 1.1, 2.5, 3.1] {
                corner = corner.max((phi_recurrence(lam, n, th + PI) - sign * phi_recurrence(lam, n, th)).abs());
                let shifted = table.phi_explicit(n, th + PI, 1e-3)?;
                corner = corner.max((shifted - sign * table.phi_explicit(n, th, 1e-3)?).abs());
            }
        }
    }
    c.require(corner < 1e-10, format!("corner identity {corner:.2e}"));

    let grid: Vec<f64> = (0..97).map(|i| 2.0 * PI * (i as f64 + 0.31) / 97.0).collect();
    let mut per: f64 = 0.0;
    for (dim, beta) in [(3u32, one), (5, Rational::new(2, 3)), (7, Rational::new(5, 2))] {
        let space = build_space(&[dim], &[beta])?;
        let lam = space.factors[0].lam;
        let period = space.period_seconds();
        for big_n in [16.0, 64.0] {
            let t = 0.377 * period;
            let a = kernel_1d(lam, &beta, big_n, t, &grid, &bump);
            let b = kernel_1d(lam, &beta, big_n, t + period, &grid, &bump);
            let sup = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (x, y) in a.iter().zip(&b) {
                per = per.max(rel(*x, *y, sup));
            }
        }
    }
    c.require(per < 1e-10, format!("periodicity {per:.2e}"));

    let space = build_unit_space(&[3, 3])?;
    let big_n = 16.0;
    let mut prod: f64 = 0.0;
    for t in [0.0, 0.9, 2.0 * PI / 5.0] {
        for pt in [[0.0, 0.0], [0.4, 2.2], [1.7, PI], [3.0, 5.1]] {
            let grids = vec![TorusQuadrature::trapezoid(3, 1), TorusQuadrature::trapezoid(3, 1)];
            let mut grids = grids;
            for (g, &x) in grids.iter_mut().zip(&pt) {
                g.nodes = vec![x];
                g.weights = vec![1.0];
            }
            let k = kernel_product(&space, big_n, t, grids, &bump)?.value_at(&[0, 0]);
            let d = kernel_direct_multi(&space, big_n, t, &pt, Mollifier::Product(bump))?;
            prod = prod.max(rel(k, d, d.norm()));
        }
    }
    c.require(prod < 1e-9, format!("product vs direct {prod:.2e}"));
    c.done()
}

fn parseval() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let bump = Bump::smooth();
    let mut worst: f64 = 0.0;
    for dims in [vec![3u32], vec![5], vec![3, 5]] {
        let space = build_unit_space(&dims)?;
        for big_n in [32.0, 128.0] {
            let spectral: f64 =
                space.factors.iter().map(|f| parseval_norm(f.lam, &f.beta, big_n, &bump)).product();
            for _ in 0..10 {
                let t = rng.gen_range(0.0..space.period_seconds());
                let field = KernelField::build(&space, big_n, t, &bump, 16, 1.0 / big_n)?;
                let l2 = lp_norm(&field, 2.0, &Region::Full)?;
                worst = worst.max((l2 - spectral).abs() / spectral);
            }
        }
    }
    let mut c = Check::new();
    c.require(worst < 1e-6, format!("worst relative gap {worst:.2e}"));
    c.done()
}

fn decay_exponent() -> Outcome {
    let mut c = Check::new();
    let single = decay_scan(&ScanPlan::new(build_unit_space(&[3])?, 4.0))?;
    let (ok, msg) = slope_line("S^3", &single, 0.30);
    c.require(ok && single.validate().is_ok(), msg);
    let mut plan = ScanPlan::new(build_unit_space(&[3, 3])?, 4.0);
    plan.tolerance = 0.35;
    let product = decay_scan(&plan)?;
    let (ok, msg) = slope_line("S^3xS^3", &product, 0.35);
    c.require(ok && product.validate().is_ok(), msg);
    c.done()
}

fn corner_estimate() -> Outcome {
    let mut c = Check::new();
    for p in [0.5, 2.0, 4.0] {
        let r = corner_scan(&ScanPlan::new(build_unit_space(&[3])?, p))?;
        let (ok, msg) = slope_line(&format!("p={p}"), &r, 0.30);
        c.require(ok, msg);
    }
    c.done()
}

fn kappa_bound() -> Outcome {
    let mut c = Check::new();
    let plan = ScanPlan::new(build_unit_space(&[5])?, f64::INFINITY);
    for nu in 0..2 {
        let r = kappa_scan(&plan, nu)?;
        let (ok, msg) = slope_line(&format!("nu={nu}"), &r, 0.30);
        c.require(ok, msg);
    }
    c.done()
}

fn threshold() -> Outcome {
    let r = threshold_check(&ScanPlan::new(build_unit_space(&[3])?, 3.0))?;
    let mut c = Check::new();
    c.require(r.at_p.passed(), format!("p=3 ratio slope {:.3}", r.at_p.fitted_slope));
    c.require((r.probe_p - 2.1).abs() < 1e-12, format!("probe p={:.2}", r.probe_p));
    c.require(r.probe.fitted_slope > 0.30, format!("p=2.1 ratio slope {:.3} (> 0.30)", r.probe.fitted_slope));
    c.done()
}

fn strichartz() -> Outcome {
    let plan = StrichartzPlan::new(build_unit_space(&[3])?, 8.0);
    let r = strichartz_zonal_scan(&plan)?;
    let budget = r.exponent + 0.30;
    let mut c = Check::new();
    c.require(plan.trials >= 20, format!("{} trials", plan.trials));
    c.require(r.raw_slope <= budget, format!("worst-trial exponent {:.3} (≤ {budget:.3})", r.raw_slope));
    c.done()
}

fn arc_machinery() -> Outcome {
    let big_n = 64u64;
    let fractions = farey(big_n - 1);
    let mut mismatches = 0usize;
    for k in 0..10_000i64 {
        let tau = Rational::new(k, 10_000);
        let brute = fractions
            .iter()
            .filter(|&&(a, q)| {
                let d = (tau - Rational::new(a as i64, q as i64)).abs();
                let d = d.min(Rational::from_integer(1) - d);
                d * Rational::from_integer((q * big_n) as i64) < Rational::from_integer(1)
            })
            .min_by_key(|&&(_, q)| q)
            .copied();
        let float = classify(k as f64, 10_000.0, big_n as f64)?;
        let exact = classify_rational(tau, big_n)?;
        let agree = |cl: &Classification| match (cl.arc(), brute) {
            (Some(arc), Some((a, q))) => arc.a == a && arc.q == q,
            (None, None) => true,
            _ => false,
        };
        if !agree(&float) || !agree(&exact) {
            mismatches += 1;
        }
        if let Some(arc) = float.arc() {
            if arc.a.gcd(&arc.q) != 1 || arc_distance(k as f64 / 1e4, arc.a, arc.q) * (arc.q * big_n) as f64 >= 1.0 {
                mismatches += 1;
            }
        }
    }
    let mut c = Check::new();
    c.require(mismatches == 0, format!("{mismatches} classification mismatches over 10^4 samples"));
    let ns = geometric_n_list(4, 10);
    for q in [1u64, 2, 3, 5, 8] {
        let a = if q == 1 { 0 } else { 1 };
        let pts: Vec<(f64, f64)> = ns.iter().map(|&n| denominator_sum_at(a, q, n).map(|s| (n, s))).collect::<Result<_, _>>()?;
        let slope = fit_loglog(&pts)?.slope;
        c.require(slope <= 2.2, format!("S at {a}/{q}: slope {slope:.3}"));
    }
    c.done()
}

fn region_volume() -> Outcome {
    let mut c = Check::new();
    for dim in [3u32, 5] {
        let pts: Vec<(f64, f64)> = geometric_n_list(4, 9)
            .into_iter()
            .map(|n| region_measure(dim, &Region::Corner { pole: Pole::Identity, radius: 1.0 / n }).map(|m| (n, m)))
            .collect::<Result<_, _>>()?;
        let slope = fit_loglog(&pts)?.slope;
        c.require((slope + dim as f64).abs() <= 0.05, format!("S^{dim}: slope {slope:.4}"));
    }
    c.done()
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", oracle_equivalence, 10),
        ("structural identities", structural_identities, 60),
        ("Parseval cross-check", parseval, 30),
        ("major-arc L^p decay exponent", decay_exponent, 600),
        ("corner estimate", corner_estimate, 300),
        ("kappa sup bound", kappa_bound, 300),
        ("threshold behaviour", threshold, 300),
        ("Strichartz zonal scan", strichartz, 600),
        ("arc machinery", arc_machinery, 120),
        ("region-volume scaling", region_volume, 60),
    ];
    let mut failures = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let (ok, detail) = match result {
            Ok((ok, detail)) => (ok && in_time, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failures += 1;
        }
        let verdict = if ok { "PASS" } else { "FAIL" };
        let timing = format!("{:.1}s of {limit}s{}", elapsed.as_secs_f64(), if in_time { "" } else { " [over]" });
        println!("{verdict} {:>2} {name}: {detail} ({timing})", i + 1);
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
