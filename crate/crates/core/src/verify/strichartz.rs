//! Space-time `L^p` norms of the zonal Schrödinger flow over one period.
//!
//! With `T = 2πP`, every `-P·eigenvalue` is a nonnegative integer `m`, so at a
//! fixed point of the torus the solution is a trigonometric polynomial in
//! `s = t/T` and one FFT gives it on a uniform time grid. The grid length
//! exceeds `(p/2)·(max m - min m)`, which integrates `|u|^p` exactly in time
//! for even `p`.

use super::{ReportSpec, ScalingReport, ScanRecord, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::kernel::{max_degree, Bump, ZonalState};
use crate::kernel::sobolev_norm;
use crate::measure::TorusQuadrature;
use crate::rational::to_f64;
use crate::space::{eigenvalue, harmonic_dim_f64, MultiIndex, ProductSpace};
use crate::specialfn::phi_table;
use crate::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

/// Minimum number of random states per `N`.
pub const MIN_TRIALS: usize = 20;

const POINT_LIMIT: usize = 4_000_000;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrichartzPlan {
    pub space: ProductSpace,
    pub p: f64,
    pub n_list: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub bump: Bump,
    /// Spatial nodes per unit of bandwidth.
    pub oversample: usize,
    /// Also test the focusing state whose coefficients are the bump itself.
    pub include_coherent: bool,
    pub tolerance: f64,
}

impl StrichartzPlan {
    pub fn new(space: ProductSpace, p: f64) -> Self {
        Self {
            space,
            p,
            n_list: vec![4.0, 8.0, 16.0, 32.0],
            trials: MIN_TRIALS,
            seed: 0,
            bump: Bump::smooth(),
            oversample: 8,
            include_coherent: true,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

/// Multi-indices in the product bump support at scale `N`, with `Π φ`.
fn shell(space: &ProductSpace, big_n: f64, bump: &Bump) -> Vec<(MultiIndex, f64)> {
    let per: Vec<Vec<(u64, f64)>> = space
        .factors
        .iter()
        .map(|f| {
            (0..=max_degree(f.lam, &f.beta, big_n, bump))
                .filter_map(|n| {
                    let x = -to_f64(&f.eigenvalue(n)) / (big_n * big_n);
                    let w = bump.eval(x);
                    (w > 0.0).then_some((n, w))
                })
                .collect()
        })
        .collect();
    let mut out = vec![(Vec::new(), 1.0)];
    for list in &per {
        out = out
            .into_iter()
            .flat_map(|(idx, w)| {
                list.iter().map(move |&(n, v)| {
                    let mut idx = idx.clone();
                    idx.push(n);
                    (idx, w * v)
                })
            })
            .collect();
    }
    out.into_iter().map(|(idx, w)| (MultiIndex(idx), w)).collect()
}

fn normalized(mut state: ZonalState) -> ZonalState {
    let norm = sobolev_norm(&state, 0.0);
    if norm > 0.0 {
        for c in state.coeffs.values_mut() {
            *c /= norm;
        }
    }
    state
}

/// The state with `c_n = Π φ(x_{n_j})`, i.e. the kernel at `t = 0`, normalized.
pub fn coherent_state(space: &ProductSpace, big_n: f64, bump: &Bump) -> ZonalState {
    let mut st = ZonalState::new(space.clone());
    st.coeffs = shell(space, big_n, bump).into_iter().map(|(i, w)| (i, Complex64::new(w, 0.0))).collect();
    normalized(st)
}

/// Complex Gaussian coordinates in the orthonormal zonal basis, tapered by the bump.
pub fn random_state<R: Rng>(space: &ProductSpace, big_n: f64, bump: &Bump, rng: &mut R) -> ZonalState {
    let mut st = ZonalState::new(space.clone());
    for (idx, w) in shell(space, big_n, bump) {
        let dims: f64 = space.factors.iter().zip(&idx.0).map(|(f, &n)| harmonic_dim_f64(f.dim, n)).product();
        let g = Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal));
        st.coeffs.insert(idx, g * (w / dims.sqrt()));
    }
    normalized(st)
}

/// `(T⁻¹ ∫_0^T ∫ |e^{itΔ} f|^p dμ dt)^{1/p}` with `μ` the probability measure.
pub fn spacetime_norm(state: &ZonalState, p: f64, oversample: usize) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::arg("p must be positive"));
    }
    let space = &state.space;
    if state.coeffs.is_empty() {
        return Ok(0.0);
    }
    let freqs: Vec<i64> = state
        .coeffs
        .keys()
        .map(|idx| {
            let m = -eigenvalue(space, idx)? * space.period;
            if !m.is_integer() {
                return Err(Error::arg("eigenvalue times period is not an integer"));
            }
            Ok(m.to_integer())
        })
        .collect::<Result<_>>()?;
    let lo = *freqs.iter().min().expect("nonempty");
    let hi = *freqs.iter().max().expect("nonempty");
    let span = (hi - lo) as f64;
    let m_t = ((0.5 * p * span).ceil() as usize + 1).next_power_of_two().max(8);

    let tops = state.max_degrees();
    let grids: Vec<TorusQuadrature> = space
        .factors
        .iter()
        .zip(&tops)
        .map(|(f, &top)| TorusQuadrature::new(f.dim, (top + f.lam as u64).max(1) as f64, oversample, 0.25))
        .collect::<Result<_>>()?;
    let total: usize = grids.iter().map(TorusQuadrature::len).product();
    if total > POINT_LIMIT {
        return Err(Error::EnumerationTooLarge { size: total as f64, limit: POINT_LIMIT as f64 });
    }
    // tables[j][k][n] = d_n Φ_n(θ_{j,k})
    let tables: Vec<Vec<Vec<f64>>> = space
        .factors
        .iter()
        .zip(&grids)
        .zip(&tops)
        .map(|((f, g), &top)| {
            g.nodes
                .iter()
                .map(|&th| {
                    let mut row = Vec::new();
                    phi_table(f.lam, top, th, &mut row);
                    row.iter().enumerate().map(|(n, v)| v * harmonic_dim_f64(f.dim, n as u64)).collect()
                })
                .collect()
        })
        .collect();
    let terms: Vec<(&MultiIndex, Complex64, usize)> = state
        .coeffs
        .iter()
        .zip(&freqs)
        .map(|((idx, &c), &m)| (idx, c, (m - lo) as usize % m_t))
        .collect();
    let fft = FftPlanner::new().plan_fft_forward(m_t);
    let masses: Vec<f64> = grids.iter().map(TorusQuadrature::total_mass).collect();
    let contributions: Vec<f64> = (0..total)
        .into_par_iter()
        .map_init(
            || (vec![Complex64::new(0.0, 0.0); m_t], vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()]),
            |(buf, scratch), flat| {
                let mut rest = flat;
                let mut node = vec![0usize; grids.len()];
                let mut weight = 1.0;
                for j in (0..grids.len()).rev() {
                    let k = rest % grids[j].len();
                    rest /= grids[j].len();
                    node[j] = k;
                    let th = grids[j].nodes[k];
                    weight *= grids[j].weights[k] * grids[j].density(th) / masses[j];
                }
                buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
                for &(idx, c, bin) in &terms {
                    let v: f64 = idx.0.iter().enumerate().map(|(j, &n)| tables[j][node[j]][n as usize]).product();
                    buf[bin] += c * v;
                }
                fft.process_with_scratch(buf, scratch);
                let mean = buf.iter().map(|z| z.norm().powf(p)).sum::<f64>() / m_t as f64;
                weight * mean
            },
        )
        .collect();
    Ok(contributions.iter().sum::<f64>().powf(1.0 / p))
}

fn seed_for(seed: u64, big_n: f64) -> u64 {
    seed ^ (big_n.to_bits().rotate_left(17)).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Worst space-time norm over random (and the coherent) states, fitted
/// against `N^{d/2 - (d+2)/p}`.
pub fn strichartz_zonal_scan(plan: &StrichartzPlan) -> Result<ScalingReport> {
    if plan.trials < MIN_TRIALS {
        return Err(Error::arg(format!("strichartz scans need at least {MIN_TRIALS} trials, got {}", plan.trials)));
    }
    if !(plan.p > 2.0) {
        return Err(Error::arg("strichartz scans need p > 2"));
    }
    if plan.n_list.len() < 3 || plan.n_list.iter().any(|&n| !(n >= 1.0)) {
        return Err(Error::arg("a scan needs at least three values of N, each at least 1"));
    }
    let space = &plan.space;
    let d = space.d as f64;
    let exponent = d / 2.0 - (d + 2.0) / plan.p;
    let mut records = Vec::new();
    for &big_n in &plan.n_list {
        let mut rng = ChaCha8Rng::seed_from_u64(seed_for(plan.seed, big_n));
        let mut states: Vec<(String, ZonalState)> = Vec::new();
        if plan.include_coherent {
            states.push(("coherent".into(), coherent_state(space, big_n, &plan.bump)));
        }
        for _ in 0..plan.trials {
            states.push(("random".into(), random_state(space, big_n, &plan.bump, &mut rng)));
        }
        for (k, (label, st)) in states.into_iter().enumerate() {
            let norm = spacetime_norm(&st, plan.p, plan.oversample)?;
            records.push(ScanRecord {
                n: big_n,
                t: 0.0,
                tau: 0.0,
                a: 0,
                q: 1,
                offset: 0.0,
                p: Some(plan.p),
                region: label,
                norm,
                bound_denominator: 1.0,
                ratio: norm / big_n.powf(exponent),
                trial: Some(k),
            });
        }
    }
    let exploratory = plan.p < space.p0_f64();
    let spec = ReportSpec {
        mode: "strichartz".into(),
        space: space.clone(),
        p: plan.p,
        exponent,
        denominator_power: 0,
        tolerance: plan.tolerance,
        exploratory,
    };
    let mut report = ScalingReport::assemble(spec, records, Vec::new())?;
    if exploratory {
        report.notes.push(format!("p = {} is below p0 = {}", plan.p, space.p0_f64()));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::l2_norm;
    use crate::measure::lp_norm_1d;
    use crate::space::build_unit_space;

    #[test]
    fn single_mode_is_its_spatial_norm() {
        let sp = build_unit_space(&[3]).unwrap();
        let mut st = ZonalState::new(sp);
        st.insert(MultiIndex(vec![5]), Complex64::new(1.0, 0.0)).unwrap();
        let q = TorusQuadrature::new(3, 64.0, 16, 0.25).unwrap();
        let vals: Vec<Complex64> = q
            .nodes
            .iter()
            .map(|&th| Complex64::new(36.0 * crate::specialfn::phi_s3_closed_form(5, th), 0.0))
            .collect();
        for p in [2.0, 4.0, 8.0] {
            let want = lp_norm_1d(&q, &vals, p, &crate::measure::Region::Full);
            let got = spacetime_norm(&st, p, 16).unwrap();
            assert!((got - want).abs() < 1e-9 * want, "p={p}: {got} vs {want}");
        }
    }

    #[test]
    fn l2_in_time_and_space_is_conserved_norm() {
        let sp = build_unit_space(&[5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let st = random_state(&sp, 6.0, &Bump::smooth(), &mut rng);
        let got = spacetime_norm(&st, 2.0, 16).unwrap();
        assert!((got - l2_norm(&st)).abs() < 1e-10);
        assert!((sobolev_norm(&st, 0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_trials() {
        let sp = build_unit_space(&[3]).unwrap();
        let mut plan = StrichartzPlan::new(sp, 8.0);
        plan.trials = 0;
        assert!(strichartz_zonal_scan(&plan).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let sp = build_unit_space(&[3]).unwrap();
        let mut plan = StrichartzPlan::new(sp, 8.0);
        plan.n_list = vec![2.0, 3.0, 4.0];
        let a = strichartz_zonal_scan(&plan).unwrap();
        let b = strichartz_zonal_scan(&plan).unwrap();
        assert_eq!(a, b);
        a.validate().unwrap();
        assert_eq!(a.records.len(), 3 * 21);
    }
}
