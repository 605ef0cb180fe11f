//! Zonal spherical functions on `S^{2λ+1}`.
//!
//! `Φ_n^{(λ)}(θ) = C_n^{(λ)}(cos θ) / C_n^{(λ)}(1)` is computed two ways:
//!
//! * [`phi_recurrence`]: the normalized three-term Gegenbauer recurrence in `n`
//!   at fixed `x = cos θ`. Stable everywhere, including the corners `θ ∈ {0, π}`.
//! * [`phi_explicit`]: the finite trigonometric sum
//!   `2 Σ_{ν<λ} C_{n,ν} cos((n-ν+λ)θ - (ν+λ)π/2) / (2 sin θ)^{ν+λ}`,
//!   which the kernel's ν-decomposition is built from. It is evaluated in
//!   double-double arithmetic since its terms cancel strongly near the corners.

use crate::dd;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::f64::consts::TAU;
use std::io::Write;
use twofloat::TwoFloat;

/// Default half-width of the corner band where the explicit sum is not used.
pub const CORNER_GUARD: f64 = 1e-3;

/// Largest amplification `2 Σ_ν |C_{n,ν}| / |2 sin θ|^{ν+λ}` for which the
/// double-double explicit sum is trusted by [`phi`].
pub const MAX_AMPLIFICATION: f64 = 1e14;

fn binom(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

/// `α_n = C(n+λ-1, n)`.
pub fn alpha(lam: u32, n: u64) -> BigInt {
    binom(n + lam as u64 - 1, n)
}

/// `C_{n,ν} = C(n+2λ-1,n)⁻¹ α_n α_ν Π_{k=1}^{ν} (k-λ)/(n+λ-k)`, exact.
pub fn cnv_exact(lam: u32, n: u64, nu: u32) -> BigRational {
    assert!(lam >= 1 && nu < lam, "need 0 <= nu < lam");
    let lam_i = lam as i64;
    let mut c = BigRational::new(
        alpha(lam, n) * alpha(lam, nu as u64),
        binom(n + 2 * lam as u64 - 1, n),
    );
    for k in 1..=nu as i64 {
        c *= BigRational::new(BigInt::from(k - lam_i), BigInt::from(n as i64 + lam_i - k));
    }
    c
}

/// Splits an exact rational into a double-double `(hi, lo)`.
fn to_dd(c: &BigRational) -> (f64, f64) {
    let hi = c.to_f64().unwrap_or(f64::NAN);
    if !hi.is_finite() {
        return (hi, 0.0);
    }
    let rest = c - BigRational::from_float(hi).expect("finite");
    (hi, rest.to_f64().unwrap_or(0.0))
}

/// `C_{n,ν}` for `ν < λ` as double-double `(hi, lo)` pairs.
pub fn cnv_row(lam: u32, n: u64) -> Vec<(f64, f64)> {
    (0..lam).map(|nu| to_dd(&cnv_exact(lam, n, nu))).collect()
}

/// Coefficient tables for the explicit sum on `S^{2λ+1}`.
#[derive(Debug, Clone)]
pub struct UltrasphericalCoeffs {
    pub lam: u32,
    pub nmax: u64,
    /// `α_n` for `n ≤ nmax + 1`.
    pub alpha: Vec<f64>,
    /// `C_{n,ν}` for `n ≤ nmax`, `ν < λ`, as double-double `(hi, lo)` pairs.
    pub cnv: Vec<Vec<(f64, f64)>>,
    exact: Vec<Vec<BigRational>>,
}

impl UltrasphericalCoeffs {
    pub fn new(lam: u32, nmax: u64) -> Result<Self> {
        if lam == 0 {
            return Err(Error::arg("lam must be at least 1"));
        }
        let alpha = (0..=nmax + 1)
            .map(|n| alpha(lam, n).to_f64().unwrap_or(f64::INFINITY))
            .collect();
        let exact: Vec<Vec<BigRational>> = (0..=nmax)
            .map(|n| (0..lam).map(|nu| cnv_exact(lam, n, nu)).collect())
            .collect();
        let cnv = exact.iter().map(|row| row.iter().map(to_dd).collect()).collect();
        Ok(Self { lam, nmax, alpha, cnv, exact })
    }

    pub fn cnv_f64(&self, n: u64, nu: u32) -> f64 {
        self.cnv[n as usize][nu as usize].0
    }

    pub fn cnv_exact(&self, n: u64, nu: u32) -> &BigRational {
        &self.exact[n as usize][nu as usize]
    }

    /// Worst-case growth of rounding errors in the explicit sum at `θ`.
    pub fn amplification(&self, n: u64, theta: f64) -> f64 {
        let two_s = (2.0 * theta.sin()).abs();
        2.0 * self.cnv[n as usize]
            .iter()
            .enumerate()
            .map(|(nu, c)| c.0.abs() / two_s.powi(nu as i32 + self.lam as i32))
            .sum::<f64>()
    }

    /// Explicit finite sum; errors inside the guard band `|sin θ| < guard`.
    pub fn phi_explicit(&self, n: u64, theta: f64, guard: f64) -> Result<f64> {
        if n > self.nmax {
            return Err(Error::arg(format!("n = {n} beyond table nmax = {}", self.nmax)));
        }
        let s = theta.sin();
        if s.abs() < guard {
            return Err(Error::CornerGuard { theta, guard });
        }
        let lam = self.lam as i64;
        let inv_two_s = dd::recip(dd::sin(theta) * 2.0);
        let mut pow = inv_two_s.powi(self.lam as i32);
        let mut sum = TwoFloat::from(0.0);
        for (nu, &(hi, lo)) in self.cnv[n as usize].iter().enumerate() {
            let nu = nu as i64;
            let c = dd::dd(hi, lo);
            sum += c * dd::cos_shifted(n as i64 - nu + lam, theta, nu + lam) * pow;
            pow *= inv_two_s;
        }
        let v = sum * 2.0;
        Ok(v.hi() + v.lo())
    }

    /// Dispatch: explicit sum away from the corners, recurrence otherwise.
    pub fn phi(&self, n: u64, theta: f64, guard: f64) -> f64 {
        if theta.sin().abs() < guard
            || n > self.nmax
            || self.amplification(n, theta) > MAX_AMPLIFICATION
        {
            return phi_recurrence(self.lam, n, theta);
        }
        self.phi_explicit(n, theta, guard)
            .unwrap_or_else(|_| phi_recurrence(self.lam, n, theta))
    }

    /// Audit dump with columns `lam,n,nu,C_num,C_den`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "lam,n,nu,C_num,C_den")?;
        for (n, row) in self.exact.iter().enumerate() {
            for (nu, c) in row.iter().enumerate() {
                writeln!(w, "{},{},{},{},{}", self.lam, n, nu, c.numer(), c.denom())?;
            }
        }
        Ok(())
    }
}

/// Normalized Gegenbauer value `C_n^{(λ)}(cos θ)/C_n^{(λ)}(1)`.
pub fn phi_recurrence(lam: u32, n: u64, theta: f64) -> f64 {
    let mut out = 1.0;
    sweep(lam, n, theta.cos(), |k, v| {
        if k == n {
            out = v;
        }
    });
    out
}

/// `Φ_0, …, Φ_nmax` at one angle, written into `out` (resized).
pub fn phi_table(lam: u32, nmax: u64, theta: f64, out: &mut Vec<f64>) {
    out.clear();
    out.reserve(nmax as usize + 1);
    sweep(lam, nmax, theta.cos(), |_, v| out.push(v));
}

/// Runs `R_k = [2(k+λ-1) x R_{k-1} - (k-1) R_{k-2}] / (k+2λ-1)` for `k ≤ nmax`.
#[inline]
fn sweep(lam: u32, nmax: u64, x: f64, mut visit: impl FnMut(u64, f64)) {
    let lam = lam as f64;
    let mut prev = 1.0;
    visit(0, prev);
    if nmax == 0 {
        return;
    }
    let mut cur = x;
    visit(1, cur);
    for k in 2..=nmax {
        let kf = k as f64;
        let next = (2.0 * (kf + lam - 1.0) * x * cur - (kf - 1.0) * prev) / (kf + 2.0 * lam - 1.0);
        prev = cur;
        cur = next;
        visit(k, cur);
    }
}

/// Explicit sum for a single `(λ, n)`, building only the needed coefficient row.
pub fn phi_explicit(lam: u32, n: u64, theta: f64) -> Result<f64> {
    phi_explicit_guarded(lam, n, theta, CORNER_GUARD)
}

pub fn phi_explicit_guarded(lam: u32, n: u64, theta: f64, guard: f64) -> Result<f64> {
    UltrasphericalCoeffs::new_row(lam, n)
        .ok_or_else(|| Error::arg("lam must be at least 1"))?
        .phi_explicit(n, theta, guard)
}

/// Dispatching evaluator with the default guard.
pub fn phi(lam: u32, n: u64, theta: f64) -> f64 {
    let theta = theta.rem_euclid(TAU);
    if theta.sin().abs() < CORNER_GUARD {
        return phi_recurrence(lam, n, theta);
    }
    match UltrasphericalCoeffs::new_row(lam, n) {
        Some(c) => c.phi(n, theta, CORNER_GUARD),
        None => phi_recurrence(lam, n, theta),
    }
}

impl UltrasphericalCoeffs {
    fn new_row(lam: u32, n: u64) -> Option<Self> {
        if lam == 0 {
            return None;
        }
        let row = cnv_row(lam, n);
        let mut cnv = vec![Vec::new(); n as usize];
        cnv.push(row);
        Some(Self { lam, nmax: n, alpha: Vec::new(), cnv, exact: Vec::new() })
    }
}

/// The `S^3` closed form `sin((n+1)θ) / ((n+1) sin θ)`.
pub fn phi_s3_closed_form(n: u64, theta: f64) -> f64 {
    let s = theta.sin();
    if s.abs() < 1e-300 {
        let c = theta.cos();
        return if c > 0.0 || n % 2 == 0 { 1.0 } else { -1.0 };
    }
    let m = (n + 1) as f64;
    (m * theta).sin() / (m * s)
}
