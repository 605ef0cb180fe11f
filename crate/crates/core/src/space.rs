//! Geometry and spectrum of `S^{d_1} × … × S^{d_r}` with a rational product metric.
//!
//! Each factor is the unit round sphere scaled by a metric coefficient `β_j`,
//! so the degree-`n` zonal harmonic on factor `j` has Laplace eigenvalue
//! `-n(n + d_j - 1)/β_j`.

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereFactor {
    /// Sphere dimension, odd and at least 3.
    pub dim: u32,
    /// `(dim - 1) / 2`; the ultraspherical parameter of the factor.
    pub lam: u32,
    #[serde(with = "rational::serde_str")]
    pub beta: Rational,
}

impl SphereFactor {
    pub fn new(dim: u32, beta: Rational) -> Result<Self> {
        if dim < 3 || dim % 2 == 0 {
            return Err(Error::InvalidSpace(format!(
                "sphere dimension {dim} must be odd and at least 3"
            )));
        }
        if !rational::is_positive(&beta) {
            return Err(Error::InvalidSpace(format!(
                "metric coefficient {} must be positive",
                rational::format_rational(&beta)
            )));
        }
        Ok(Self { dim, lam: (dim - 1) / 2, beta })
    }

    /// `2d/(d-1)`, the single-factor Lebesgue threshold.
    pub fn threshold(&self) -> Rational {
        Rational::new(2 * self.dim as i64, self.dim as i64 - 1)
    }

    /// Eigenvalue of Δ on the degree-`n` zonal harmonic of this factor.
    pub fn eigenvalue(&self, n: u64) -> Rational {
        let n = n as i64;
        -Rational::from_integer(n * (n + self.dim as i64 - 1)) / self.beta
    }

    pub fn eigenvalue_f64(&self, n: u64) -> f64 {
        let n = n as f64;
        -n * (n + self.dim as f64 - 1.0) / rational::to_f64(&self.beta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductSpace {
    pub factors: Vec<SphereFactor>,
    /// Total dimension `Σ d_j`.
    pub d: u32,
    /// Rank, the number of factors.
    pub r: u32,
    #[serde(with = "rational::serde_str")]
    pub s: Rational,
    #[serde(with = "rational::serde_str")]
    pub p0: Rational,
    /// Flow period as a multiple of 2π: `T = 2π · period`.
    #[serde(with = "rational::serde_str")]
    pub period: Rational,
}

/// Builds the product space and its exponent data.
pub fn build_space(dims: &[u32], betas: &[Rational]) -> Result<ProductSpace> {
    if dims.is_empty() {
        return Err(Error::InvalidSpace("no sphere factors given".into()));
    }
    if dims.len() != betas.len() {
        return Err(Error::InvalidSpace(format!(
            "{} dimensions but {} metric coefficients",
            dims.len(),
            betas.len()
        )));
    }
    let factors = dims
        .iter()
        .zip(betas)
        .map(|(&dim, &beta)| SphereFactor::new(dim, beta))
        .collect::<Result<Vec<_>>>()?;
    let d = factors.iter().map(|f| f.dim).sum();
    let r = factors.len() as u32;
    let s = factors.iter().map(SphereFactor::threshold).max().expect("nonempty");
    let one = Rational::one();
    let p0 = Rational::from_integer(2)
        + Rational::from_integer(8) * (s - one) / (s * Rational::from_integer(r as i64));
    let mut space = ProductSpace { factors, d, r, s, p0, period: one };
    space.period = flow_period(&space);
    Ok(space)
}

/// Unit-metric convenience constructor.
pub fn build_unit_space(dims: &[u32]) -> Result<ProductSpace> {
    build_space(dims, &vec![Rational::one(); dims.len()])
}

impl ProductSpace {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Period `T` in time units (`2π · period`).
    pub fn period_seconds(&self) -> f64 {
        2.0 * std::f64::consts::PI * rational::to_f64(&self.period)
    }

    pub fn s_f64(&self) -> f64 {
        rational::to_f64(&self.s)
    }

    pub fn p0_f64(&self) -> f64 {
        rational::to_f64(&self.p0)
    }

    pub fn dims(&self) -> Vec<u32> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    pub fn betas(&self) -> Vec<Rational> {
        self.factors.iter().map(|f| f.beta).collect()
    }
}

/// A dominant weight `(n_1, …, n_r)`, one zonal degree per factor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u64>);

impl MultiIndex {
    pub fn zero(rank: usize) -> Self {
        Self(vec![0; rank])
    }

    pub fn check(&self, space: &ProductSpace) -> Result<()> {
        if self.0.len() != space.rank() {
            return Err(Error::arg(format!(
                "multi-index of length {} for a rank-{} space",
                self.0.len(),
                space.rank()
            )));
        }
        Ok(())
    }
}

/// `-Σ_j n_j (n_j + d_j - 1) / β_j`, exact.
pub fn eigenvalue(space: &ProductSpace, idx: &MultiIndex) -> Result<Rational> {
    idx.check(space)?;
    Ok(space
        .factors
        .iter()
        .zip(&idx.0)
        .map(|(f, &n)| f.eigenvalue(n))
        .fold(Rational::zero(), |acc, x| acc + x))
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    c
}

/// Dimension of the degree-`n` spherical harmonics on `S^dim`:
/// `C(n+dim, dim) - C(n+dim-2, dim)`.
pub fn harmonic_dim(dim: u32, n: u64) -> u128 {
    harmonic_dim_big(dim, n)
        .to_u128()
        .expect("harmonic dimension exceeds u128")
}

pub(crate) fn harmonic_dim_big(dim: u32, n: u64) -> BigUint {
    let dim = dim as u64;
    let hi = binomial(n + dim, dim);
    let lo = if n + dim >= 2 { binomial(n + dim - 2, dim) } else { BigUint::zero() };
    hi - lo
}

pub fn harmonic_dim_f64(dim: u32, n: u64) -> f64 {
    harmonic_dim_big(dim, n).to_f64().unwrap_or(f64::INFINITY)
}

/// Product-space harmonic dimension `Π_j d_{n_j}`.
pub fn harmonic_dim_multi(space: &ProductSpace, idx: &MultiIndex) -> Result<u128> {
    idx.check(space)?;
    Ok(space
        .factors
        .iter()
        .zip(&idx.0)
        .map(|(f, &n)| harmonic_dim(f.dim, n))
        .product())
}

/// Minimal period of the flow as a multiple of 2π: the lcm of the
/// denominators of every `β_j⁻¹`.
pub fn flow_period(space: &ProductSpace) -> Rational {
    let l = space
        .factors
        .iter()
        .map(|f| *f.beta.recip().denom())
        .fold(1i64, |acc, den| acc.lcm(&den));
    Rational::from_integer(l)
}
