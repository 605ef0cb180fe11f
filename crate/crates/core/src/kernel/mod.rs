//! The mollified Schrödinger kernel `K_N(t, θ) = Σ_n φ(x_n) e^{itμ_n} d_n Φ_n(θ)`
//! with `μ_n = -n(n+2λ)/β` and `x_n = -μ_n/N²`, its ν-pieces, and its
//! factorization over product spaces.
//!
//! Phases are reduced in double-double: with `β = p/q` in lowest terms,
//! `tμ_n = -(t/p)·n(n+2λ)q` has an integer second factor, so the product is
//! formed exactly before reduction mod 2π.

mod bump;
mod zonal;

pub use bump::{Bump, BumpKind};
pub use zonal::{evaluate_zonal, evolve_zonal, l2_norm, sobolev_norm, ZonalState};

use crate::dd;
use crate::error::{Error, Result};
use crate::measure::TorusQuadrature;
use crate::rational::{self, Rational};
use crate::space::{harmonic_dim_f64, ProductSpace};
use crate::specialfn::{cnv_row, phi_table, CORNER_GUARD};
use crate::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Largest multi-index lattice [`kernel_direct_multi`] will enumerate.
pub const DIRECT_LIMIT: f64 = 1e8;

/// Which degrees enter a kernel sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    All,
    Even,
    Odd,
}

impl Parity {
    fn keeps(self, n: u64) -> bool {
        match self {
            Parity::All => true,
            Parity::Even => n % 2 == 0,
            Parity::Odd => n % 2 == 1,
        }
    }
}

/// Scaled frequency `n(n+2λ)/(βN²)`.
fn scaled(lam: u32, beta: &Rational, n: u64, big_n: f64) -> f64 {
    let e = (n * (n + 2 * lam as u64)) as f64;
    e * *beta.denom() as f64 / (*beta.numer() as f64 * big_n * big_n)
}

/// Largest `n` whose scaled frequency is inside the bump support.
pub fn max_degree(lam: u32, beta: &Rational, big_n: f64, bump: &Bump) -> u64 {
    let mut n = 0;
    while scaled(lam, beta, n + 1, big_n) <= bump.hi {
        n += 1;
    }
    n
}

/// `e^{itμ_n}` for `μ_n = -n(n+2λ)/β`.
pub fn phase(lam: u32, beta: &Rational, n: u64, t: f64) -> Complex64 {
    let m = (n * (n + 2 * lam as u64)) as i64 * *beta.denom();
    let x = t / *beta.numer() as f64;
    let c = dd::cos_shifted(m, x, 0);
    let s = dd::cos_shifted(m, x, 1);
    // 0.0 - x keeps the imaginary part +0.0 at t = 0
    Complex64::new(c.hi() + c.lo(), 0.0 - (s.hi() + s.lo()))
}

/// Nonzero weights `φ(x_n) e^{itμ_n} d_n`, ascending in `n`.
pub fn kernel_weights(
    lam: u32,
    beta: &Rational,
    big_n: f64,
    t: f64,
    bump: &Bump,
    parity: Parity,
) -> Vec<(u64, Complex64)> {
    let dim = 2 * lam + 1;
    (0..=max_degree(lam, beta, big_n, bump))
        .filter(|&n| parity.keeps(n))
        .filter_map(|n| {
            let phi = bump.eval(scaled(lam, beta, n, big_n));
            (phi > 0.0).then(|| (n, phase(lam, beta, n, t) * (phi * harmonic_dim_f64(dim, n))))
        })
        .collect()
}

fn sum_weights(lam: u32, weights: &[(u64, Complex64)], theta: f64, buf: &mut Vec<f64>) -> Complex64 {
    let Some(&(top, _)) = weights.last() else {
        return Complex64::new(0.0, 0.0);
    };
    phi_table(lam, top, theta, buf);
    weights
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &(n, w)| acc + w * buf[n as usize])
}

fn eval_weights(lam: u32, weights: &[(u64, Complex64)], grid: &[f64]) -> Vec<Complex64> {
    grid.par_iter()
        .map_init(Vec::new, |buf, &th| sum_weights(lam, weights, th, buf))
        .collect()
}

/// `K_N(t, θ)` on one sphere factor at every grid angle.
pub fn kernel_1d(lam: u32, beta: &Rational, big_n: f64, t: f64, theta_grid: &[f64], bump: &Bump) -> Vec<Complex64> {
    kernel_1d_parity(lam, beta, big_n, t, theta_grid, bump, Parity::All)
}

/// [`kernel_1d`] restricted to even or odd degrees.
pub fn kernel_1d_parity(
    lam: u32,
    beta: &Rational,
    big_n: f64,
    t: f64,
    theta_grid: &[f64],
    bump: &Bump,
    parity: Parity,
) -> Vec<Complex64> {
    let w = kernel_weights(lam, beta, big_n, t, bump, parity);
    eval_weights(lam, &w, theta_grid)
}

/// Exact `L²` norm of the kernel on one factor: `(Σ φ(x_n)² d_n)^{1/2}`.
pub fn parseval_norm(lam: u32, beta: &Rational, big_n: f64, bump: &Bump) -> f64 {
    let dim = 2 * lam + 1;
    (0..=max_degree(lam, beta, big_n, bump))
        .map(|n| bump.eval(scaled(lam, beta, n, big_n)).powi(2) * harmonic_dim_f64(dim, n))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorField {
    pub lam: u32,
    #[serde(with = "rational::serde_str")]
    pub beta: Rational,
    /// Highest degree in the bump support.
    pub nmax: u64,
    pub quadrature: TorusQuadrature,
    pub values: Vec<Complex64>,
}

/// A kernel sampled on per-factor grids; the value at `(θ_1, …, θ_r)` is the
/// product of the factor values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelField {
    pub space: ProductSpace,
    #[serde(rename = "N")]
    pub n: f64,
    pub t: f64,
    pub bump: Bump,
    pub factors: Vec<FactorField>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldHeader {
    pub schema: u32,
    pub space: ProductSpace,
    #[serde(rename = "N")]
    pub n: f64,
    pub t: f64,
    pub bump: BumpKind,
    pub nodes: Vec<usize>,
}

/// Quadrature grids sized to each factor's bandwidth `nmax + λ`.
pub fn grids_for(space: &ProductSpace, big_n: f64, bump: &Bump, oversample: usize, radius: f64) -> Result<Vec<TorusQuadrature>> {
    space
        .factors
        .iter()
        .map(|f| {
            let bw = (max_degree(f.lam, &f.beta, big_n, bump) + f.lam as u64).max(1) as f64;
            TorusQuadrature::new(f.dim, bw, oversample, radius)
        })
        .collect()
}

fn check_n(big_n: f64) -> Result<()> {
    if big_n >= 1.0 && big_n.is_finite() {
        Ok(())
    } else {
        Err(Error::arg(format!("N = {big_n} must be at least 1")))
    }
}

/// Per-factor kernels on the given grids (product mollifier).
pub fn kernel_product(
    space: &ProductSpace,
    big_n: f64,
    t: f64,
    grids: Vec<TorusQuadrature>,
    bump: &Bump,
) -> Result<KernelField> {
    check_n(big_n)?;
    if grids.len() != space.rank() {
        return Err(Error::arg(format!("{} grids for a rank-{} space", grids.len(), space.rank())));
    }
    let factors = space
        .factors
        .iter()
        .zip(grids)
        .map(|(f, quadrature)| {
            if quadrature.dim != f.dim {
                return Err(Error::arg("grid density dimension does not match its factor"));
            }
            let values = kernel_1d(f.lam, &f.beta, big_n, t, &quadrature.nodes, bump);
            Ok(FactorField {
                lam: f.lam,
                beta: f.beta,
                nmax: max_degree(f.lam, &f.beta, big_n, bump),
                quadrature,
                values,
            })
        })
        .collect::<Result<_>>()?;
    Ok(KernelField { space: space.clone(), n: big_n, t, bump: *bump, factors })
}

impl KernelField {
    /// Kernel on region-aligned grids with breakpoint radius `radius`.
    pub fn build(space: &ProductSpace, big_n: f64, t: f64, bump: &Bump, oversample: usize, radius: f64) -> Result<Self> {
        check_n(big_n)?;
        kernel_product(space, big_n, t, grids_for(space, big_n, bump, oversample, radius)?, bump)
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn bandwidth(&self, j: usize) -> f64 {
        let f = &self.factors[j];
        (f.nmax + f.lam as u64).max(1) as f64
    }

    pub fn oversample(&self) -> usize {
        self.factors.iter().map(|f| f.quadrature.oversample).min().unwrap_or(0)
    }

    /// Fresh evaluation of factor `j` at arbitrary angles.
    pub fn eval_factor(&self, j: usize, thetas: &[f64]) -> Vec<Complex64> {
        let f = &self.factors[j];
        kernel_1d(f.lam, &f.beta, self.n, self.t, thetas, &self.bump)
    }

    /// Same kernel on grids with a different oversampling factor.
    pub fn with_oversample(&self, oversample: usize) -> Result<Self> {
        let grids = self
            .factors
            .iter()
            .map(|f| {
                let q = &f.quadrature;
                TorusQuadrature::new(q.dim, q.bandwidth, oversample, q.radius)
            })
            .collect::<Result<_>>()?;
        kernel_product(&self.space, self.n, self.t, grids, &self.bump)
    }

    /// Full value at one node per factor.
    pub fn value_at(&self, idx: &[usize]) -> Complex64 {
        self.factors
            .iter()
            .zip(idx)
            .map(|(f, &k)| f.values[k])
            .product()
    }

    pub fn header(&self) -> FieldHeader {
        FieldHeader {
            schema: 1,
            space: self.space.clone(),
            n: self.n,
            t: self.t,
            bump: self.bump.kind,
            nodes: self.factors.iter().map(|f| f.values.len()).collect(),
        }
    }

    /// Rows `factor,theta,re,im` for every factor.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        self.write_rows(w, 0..self.factors.len())
    }

    /// Rows `factor,theta,re,im` for factor `j` only.
    pub fn write_factor_csv<W: Write>(&self, j: usize, w: W) -> Result<()> {
        if j >= self.factors.len() {
            return Err(Error::arg(format!("no factor {j}")));
        }
        self.write_rows(w, j..j + 1)
    }

    fn write_rows<W: Write>(&self, w: W, which: std::ops::Range<usize>) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["factor", "theta", "re", "im"])?;
        for j in which {
            let f = &self.factors[j];
            for (th, v) in f.quadrature.nodes.iter().zip(&f.values) {
                out.write_record(&[j.to_string(), th.to_string(), v.re.to_string(), v.im.to_string()])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Frequency cutoff used by [`kernel_direct_multi`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mollifier {
    /// `Π_j φ(x_{n_j})`, the factorized form.
    Product(Bump),
    /// `φ(Σ_j x_{n_j})`, a cutoff in the joint eigenvalue.
    Radial(Bump),
}

/// Brute-force sum over the multi-index lattice at a single point.
pub fn kernel_direct_multi(space: &ProductSpace, big_n: f64, t: f64, point: &[f64], mollifier: Mollifier) -> Result<Complex64> {
    check_n(big_n)?;
    if point.len() != space.rank() {
        return Err(Error::arg("point needs one angle per factor"));
    }
    let bump = match mollifier {
        Mollifier::Product(b) | Mollifier::Radial(b) => b,
    };
    let tops: Vec<u64> = space.factors.iter().map(|f| max_degree(f.lam, &f.beta, big_n, &bump)).collect();
    let size: f64 = tops.iter().map(|&m| (m + 1) as f64).product();
    if size > DIRECT_LIMIT {
        return Err(Error::EnumerationTooLarge { size, limit: DIRECT_LIMIT });
    }
    // per factor: (x_n, e^{itμ_n} d_n Φ_n(θ_j))
    let tables: Vec<Vec<(f64, Complex64)>> = space
        .factors
        .iter()
        .zip(&tops)
        .zip(point)
        .map(|((f, &top), &th)| {
            let mut phis = Vec::new();
            phi_table(f.lam, top, th, &mut phis);
            (0..=top)
                .map(|n| {
                    let x = scaled(f.lam, &f.beta, n, big_n);
                    let v = phase(f.lam, &f.beta, n, t) * (harmonic_dim_f64(f.dim, n) * phis[n as usize]);
                    (x, v)
                })
                .collect()
        })
        .collect();
    let r = tables.len();
    let mut idx = vec![0usize; r];
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        let mut v = Complex64::new(1.0, 0.0);
        let mut x_sum = 0.0;
        let mut w_prod = 1.0;
        for (j, &k) in idx.iter().enumerate() {
            let (x, val) = tables[j][k];
            v *= val;
            x_sum += x;
            w_prod *= bump.eval(x);
        }
        let w = match mollifier {
            Mollifier::Product(_) => w_prod,
            Mollifier::Radial(_) => bump.eval(x_sum),
        };
        if w > 0.0 {
            total += v * w;
        }
        let mut j = r;
        loop {
            if j == 0 {
                return Ok(total);
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < tables[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// Evaluates the ν-pieces `κ_N^{(ν)}` of one factor at many angles.
#[derive(Debug, Clone)]
pub struct NuDecomposition {
    pub lam: u32,
    weights: Vec<(u64, Complex64)>,
    rows: Vec<Vec<(f64, f64)>>,
}

impl NuDecomposition {
    pub fn new(lam: u32, beta: &Rational, big_n: f64, t: f64, bump: &Bump) -> Result<Self> {
        check_n(big_n)?;
        if lam == 0 {
            return Err(Error::arg("lam must be at least 1"));
        }
        let weights = kernel_weights(lam, beta, big_n, t, bump, Parity::All);
        let rows = weights.iter().map(|&(n, _)| cnv_row(lam, n)).collect();
        Ok(Self { lam, weights, rows })
    }

    fn check_nu(&self, nu: u32) -> Result<()> {
        if nu >= self.lam {
            return Err(Error::arg(format!("nu = {nu} must be below lam = {}", self.lam)));
        }
        Ok(())
    }

    /// `κ^{(ν)}(θ) = Σ_n w_n C_{n,ν} cos((n-ν+λ)θ - (ν+λ)π/2)`.
    pub fn kappa(&self, nu: u32, theta: f64) -> Result<Complex64> {
        self.check_nu(nu)?;
        let lam = self.lam as i64;
        let nu_i = nu as i64;
        Ok(self
            .weights
            .iter()
            .zip(&self.rows)
            .fold(Complex64::new(0.0, 0.0), |acc, (&(n, w), row)| {
                let (hi, lo) = row[nu as usize];
                let c = dd::dd(hi, lo) * dd::cos_shifted(n as i64 - nu_i + lam, theta, nu_i + lam);
                acc + w * (c.hi() + c.lo())
            }))
    }

    /// `K^{(ν)}(θ) = 2 (2 sin θ)^{-(ν+λ)} κ^{(ν)}(θ)`.
    pub fn piece(&self, nu: u32, theta: f64) -> Result<Complex64> {
        let s = theta.sin();
        if s.abs() < CORNER_GUARD {
            return Err(Error::CornerGuard { theta, guard: CORNER_GUARD });
        }
        let k = self.kappa(nu, theta)?;
        Ok(k * 2.0 * (2.0 * s).powi(-((nu + self.lam) as i32)))
    }

    /// [`Self::kappa`] at many angles in plain double precision, stepping the
    /// cosines by rotation and reseeding them every 32 degrees.
    pub fn kappa_grid(&self, nu: u32, grid: &[f64]) -> Result<Vec<Complex64>> {
        self.check_nu(nu)?;
        let shift = (nu + self.lam) as f64 * std::f64::consts::FRAC_PI_2;
        let base = self.lam as f64 - nu as f64;
        let coeffs: Vec<f64> = self.rows.iter().map(|row| row[nu as usize].0).collect();
        Ok(grid
            .par_iter()
            .map(|&th| {
                let step = Complex64::from_polar(1.0, th);
                let mut rot = Complex64::new(0.0, 0.0);
                let mut last = None;
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, (&(n, w), &c)) in self.weights.iter().zip(&coeffs).enumerate() {
                    rot = match last {
                        Some(m) if m + 1 == n && k % 32 != 0 => rot * step,
                        _ => Complex64::from_polar(1.0, (n as f64 + base) * th - shift),
                    };
                    last = Some(n);
                    acc += w * (c * rot.re);
                }
                acc
            })
            .collect())
    }
}

pub fn kernel_nu(lam: u32, beta: &Rational, big_n: f64, nu: u32, t: f64, theta: f64, bump: &Bump) -> Result<Complex64> {
    NuDecomposition::new(lam, beta, big_n, t, bump)?.piece(nu, theta)
}

pub fn kappa_nu(lam: u32, beta: &Rational, big_n: f64, nu: u32, t: f64, theta: f64, bump: &Bump) -> Result<Complex64> {
    NuDecomposition::new(lam, beta, big_n, t, bump)?.kappa(nu, theta)
}

#[cfg(test)]
mod tests;
