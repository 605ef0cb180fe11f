//! Zonal (bi-invariant) data and the free Schrödinger flow on it.

use super::phase;
use crate::error::{Error, Result};
use crate::rational::to_f64;
use crate::space::{eigenvalue, harmonic_dim_f64, MultiIndex, ProductSpace};
use crate::specialfn::phi_table;
use crate::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;

const EVAL_LIMIT: usize = 10_000_000;

/// `f = Σ_n c_n Π_j d_{n_j} Φ_{n_j}(θ_j)` with finitely many `c_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZonalState {
    pub space: ProductSpace,
    pub coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl ZonalState {
    pub fn new(space: ProductSpace) -> Self {
        Self { space, coeffs: BTreeMap::new() }
    }

    pub fn insert(&mut self, idx: MultiIndex, c: Complex64) -> Result<()> {
        idx.check(&self.space)?;
        self.coeffs.insert(idx, c);
        Ok(())
    }

    /// Largest degree used on each factor.
    pub fn max_degrees(&self) -> Vec<u64> {
        let mut top = vec![0; self.space.rank()];
        for idx in self.coeffs.keys() {
            for (t, &n) in top.iter_mut().zip(&idx.0) {
                *t = (*t).max(n);
            }
        }
        top
    }
}

fn dim_product(space: &ProductSpace, idx: &MultiIndex) -> f64 {
    space
        .factors
        .iter()
        .zip(&idx.0)
        .map(|(f, &n)| harmonic_dim_f64(f.dim, n))
        .product()
}

/// Multiplies every `c_n` by `e^{it·eigenvalue(n)}`.
pub fn evolve_zonal(state: &ZonalState, t: f64) -> ZonalState {
    let coeffs = state
        .coeffs
        .iter()
        .map(|(idx, &c)| {
            let ph: Complex64 = state
                .space
                .factors
                .iter()
                .zip(&idx.0)
                .map(|(f, &n)| phase(f.lam, &f.beta, n, t))
                .product();
            (idx.clone(), c * ph)
        })
        .collect();
    ZonalState { space: state.space.clone(), coeffs }
}

/// Values on the product of the per-factor grids, last factor fastest.
pub fn evaluate_zonal(state: &ZonalState, grids: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    let space = &state.space;
    if grids.len() != space.rank() {
        return Err(Error::arg("one grid per factor required"));
    }
    let total: usize = grids.iter().map(Vec::len).product();
    if total > EVAL_LIMIT {
        return Err(Error::EnumerationTooLarge { size: total as f64, limit: EVAL_LIMIT as f64 });
    }
    let tops = state.max_degrees();
    // tables[j][k][n] = d_n Φ_n(θ_{j,k})
    let tables: Vec<Vec<Vec<f64>>> = space
        .factors
        .iter()
        .zip(grids)
        .zip(&tops)
        .map(|((f, grid), &top)| {
            grid.iter()
                .map(|&th| {
                    let mut row = Vec::new();
                    phi_table(f.lam, top, th, &mut row);
                    for (n, v) in row.iter_mut().enumerate() {
                        *v *= harmonic_dim_f64(f.dim, n as u64);
                    }
                    row
                })
                .collect()
        })
        .collect();
    let terms: Vec<(&MultiIndex, &Complex64)> = state.coeffs.iter().collect();
    Ok((0..total)
        .into_par_iter()
        .map(|flat| {
            let mut rest = flat;
            let mut node = vec![0usize; grids.len()];
            for j in (0..grids.len()).rev() {
                node[j] = rest % grids[j].len();
                rest /= grids[j].len();
            }
            terms.iter().fold(Complex64::new(0.0, 0.0), |acc, (idx, &c)| {
                let v: f64 = idx.0.iter().enumerate().map(|(j, &n)| tables[j][node[j]][n as usize]).product();
                acc + c * v
            })
        })
        .collect())
}

/// `(Σ_n |c_n|² Π d_{n_j} ((-eigenvalue(n))^s + 1))^{1/2}`.
pub fn sobolev_norm(state: &ZonalState, s: f64) -> f64 {
    state
        .coeffs
        .iter()
        .map(|(idx, c)| {
            let lam = -to_f64(&eigenvalue(&state.space, idx).expect("indices checked on insert"));
            c.norm_sqr() * dim_product(&state.space, idx) * (lam.powf(s) + 1.0)
        })
        .sum::<f64>()
        .sqrt()
}

/// Plain `L²` norm for the probability measure, `(Σ_n |c_n|² Π d_{n_j})^{1/2}`.
pub fn l2_norm(state: &ZonalState) -> f64 {
    state
        .coeffs
        .iter()
        .map(|(idx, c)| c.norm_sqr() * dim_product(&state.space, idx))
        .sum::<f64>()
        .sqrt()
}
