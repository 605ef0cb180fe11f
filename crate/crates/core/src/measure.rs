//! Quadrature on the maximal torus with the zonal density `|sin θ|^{d-1}`.
//!
//! Every factor's measure is normalized to a probability measure, so
//! constants never leak into fitted exponents. Grids are composite
//! Gauss–Legendre panels whose breakpoints sit on the region boundaries
//! `0, r, π-r, π, π+r, 2π-r`, which makes the corner and away regions of
//! radius `r` exact unions of panels.

use crate::error::{Error, Result};
use crate::kernel::KernelField;
use crate::Complex64;
use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

/// Minimum node count per unit of kernel bandwidth accepted by [`lp_norm`].
pub const MIN_OVERSAMPLE: usize = 16;

const PANEL_NODES: usize = 16;

fn panel_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(PANEL_NODES.try_into().unwrap()))
        .as_node_weight_pairs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pole {
    /// θ = 0, the identity coset.
    Identity,
    /// θ = π.
    Antipode,
}

impl Pole {
    pub fn angle(self) -> f64 {
        match self {
            Pole::Identity => 0.0,
            Pole::Antipode => PI,
        }
    }

    pub const ALL: [Pole; 2] = [Pole::Identity, Pole::Antipode];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Full,
    Corner { pole: Pole, radius: f64 },
    Away { radius: f64 },
}

/// Circular distance between two angles.
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

impl Region {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Region::Full => Ok(()),
            Region::Corner { radius, .. } | Region::Away { radius } => {
                if radius > 0.0 && radius < PI / 2.0 {
                    Ok(())
                } else {
                    Err(Error::arg(format!("region radius {radius} outside (0, π/2)")))
                }
            }
        }
    }

    pub fn contains(&self, theta: f64) -> bool {
        match *self {
            Region::Full => true,
            Region::Corner { pole, radius } => circle_dist(theta, pole.angle()) <= radius,
            Region::Away { radius } => Pole::ALL
                .iter()
                .all(|p| circle_dist(theta, p.angle()) > radius),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Region::Full => "full".into(),
            Region::Corner { pole: Pole::Identity, .. } => "corner0".into(),
            Region::Corner { pole: Pole::Antipode, .. } => "corner_pi".into(),
            Region::Away { .. } => "away".into(),
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match *self {
            Region::Full => None,
            Region::Corner { radius, .. } | Region::Away { radius } => Some(radius),
        }
    }
}

/// Node set and weights for one sphere factor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TorusQuadrature {
    pub dim: u32,
    /// Highest angular frequency the grid is sized for.
    pub bandwidth: f64,
    pub oversample: usize,
    /// Breakpoint radius around the two poles.
    pub radius: f64,
    pub nodes: Vec<f64>,
    /// Plain `dθ` weights; they sum to 2π.
    pub weights: Vec<f64>,
}

impl TorusQuadrature {
    /// Region-aligned Gauss–Legendre panels with about `oversample · bandwidth` nodes.
    pub fn new(dim: u32, bandwidth: f64, oversample: usize, radius: f64) -> Result<Self> {
        if !(bandwidth > 0.0) || oversample == 0 {
            return Err(Error::arg("quadrature needs positive bandwidth and oversample"));
        }
        Region::Away { radius }.validate()?;
        let breaks = [0.0, radius, PI - radius, PI, PI + radius, TAU - radius, TAU];
        let density = oversample as f64 * bandwidth / TAU;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            // at least oversample/16 panels so that doubling always refines every segment
            let floor = (oversample / MIN_OVERSAMPLE).max(1) as f64;
            let panels = ((b - a) * density / PANEL_NODES as f64).ceil().max(floor) as usize;
            let h = (b - a) / panels as f64;
            for k in 0..panels {
                let lo = a + k as f64 * h;
                for &(x, wt) in panel_rule() {
                    nodes.push(lo + 0.5 * h * (x + 1.0));
                    weights.push(0.5 * h * wt);
                }
            }
        }
        Ok(Self { dim, bandwidth, oversample, radius, nodes, weights })
    }

    /// Uniform periodic trapezoid grid `θ_k = 2πk/m`.
    pub fn trapezoid(dim: u32, m: usize) -> Self {
        let h = TAU / m as f64;
        Self {
            dim,
            bandwidth: m as f64 / MIN_OVERSAMPLE as f64,
            oversample: MIN_OVERSAMPLE,
            radius: 0.0,
            nodes: (0..m).map(|k| k as f64 * h).collect(),
            weights: vec![h; m],
        }
    }

    pub fn doubled(&self) -> Result<Self> {
        Self::new(self.dim, self.bandwidth, 2 * self.oversample, self.radius)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `|sin θ|^{dim-1}`.
    pub fn density(&self, theta: f64) -> f64 {
        theta.sin().abs().powi(self.dim as i32 - 1)
    }

    /// `∫_0^{2π} |sin θ|^{dim-1} dθ`, exact for odd `dim`: `2π C(2λ,λ)/4^λ`.
    pub fn total_mass(&self) -> f64 {
        total_mass(self.dim)
    }
}

pub fn total_mass(dim: u32) -> f64 {
    let lam = (dim - 1) / 2;
    let mut c = 1.0;
    for k in 1..=lam {
        // C(2k,k)/4^k = Π (2k-1)/(2k)
        c *= (2 * k - 1) as f64 / (2 * k) as f64;
    }
    TAU * c
}

/// `(∫_region |v|^p dμ)^{1/p}` for one factor with the probability measure `dμ`.
pub fn lp_norm_1d(quad: &TorusQuadrature, values: &[Complex64], p: f64, region: &Region) -> f64 {
    lp_power_1d(quad, values, p, region).powf(1.0 / p)
}

/// `∫_region |v|^p dμ`, the p-th power of [`lp_norm_1d`].
pub fn lp_power_1d(quad: &TorusQuadrature, values: &[Complex64], p: f64, region: &Region) -> f64 {
    let mut acc = 0.0;
    for ((&th, &w), v) in quad.nodes.iter().zip(&quad.weights).zip(values) {
        if region.contains(th) {
            acc += w * quad.density(th) * v.norm().powf(p);
        }
    }
    acc / quad.total_mass()
}

fn check_field(field: &KernelField, p: f64) -> Result<()> {
    if !(p > 0.0) {
        return Err(Error::arg(format!("p = {p} must be positive")));
    }
    for (j, f) in field.factors.iter().enumerate() {
        let need = MIN_OVERSAMPLE as f64 * field.bandwidth(j);
        if (f.quadrature.len() as f64) < need {
            return Err(Error::Quadrature(format!(
                "factor {j}: {} nodes < {MIN_OVERSAMPLE} x bandwidth {}",
                f.quadrature.len(),
                field.bandwidth(j)
            )));
        }
    }
    Ok(())
}

/// Product `L^p` norm with the same region applied on every factor.
pub fn lp_norm(field: &KernelField, p: f64, region: &Region) -> Result<f64> {
    lp_norm_regions(field, p, &vec![*region; field.factors.len()])
}

/// Product `L^p` norm with one region per factor.
pub fn lp_norm_regions(field: &KernelField, p: f64, regions: &[Region]) -> Result<f64> {
    check_field(field, p)?;
    lp_norm_unchecked(field, p, regions)
}

fn lp_norm_unchecked(field: &KernelField, p: f64, regions: &[Region]) -> Result<f64> {
    if regions.len() != field.factors.len() {
        return Err(Error::arg("one region per factor required"));
    }
    regions.iter().try_for_each(Region::validate)?;
    Ok(field
        .factors
        .iter()
        .zip(regions)
        .map(|(f, r)| lp_norm_1d(&f.quadrature, &f.values, p, r))
        .product())
}

/// Probability mass of a region under `|sin θ|^{dim-1}`.
pub fn region_measure(dim: u32, region: &Region) -> Result<f64> {
    region.validate()?;
    let radius = region.radius().unwrap_or(0.25);
    let quad = TorusQuadrature::new(dim, dim as f64, MIN_OVERSAMPLE, radius)?;
    let one = vec![Complex64::new(1.0, 0.0); quad.len()];
    Ok(lp_power_1d(&quad, &one, 1.0, region))
}

/// Largest `|f(θ)|` over a region, refined around the best grid nodes by
/// repeated local doubling until successive maxima agree to `1e-4`.
pub fn sup_norm_by<F>(eval: F, grid: &[f64], region: &Region) -> f64
where
    F: Fn(&[f64]) -> Vec<Complex64>,
{
    const CANDIDATES: usize = 4;
    const REL_TOL: f64 = 1e-4;
    let mut pts: Vec<f64> = grid.iter().copied().filter(|&t| region.contains(t)).collect();
    if pts.is_empty() {
        return 0.0;
    }
    pts.sort_by(f64::total_cmp);
    let vals: Vec<f64> = eval(&pts).iter().map(|v| v.norm()).collect();
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let mut best = vals[order[0]];
    for &k in order.iter().take(CANDIDATES) {
        let left = if k > 0 { pts[k - 1] } else { pts[k] - 1e-3 };
        let right = if k + 1 < pts.len() { pts[k + 1] } else { pts[k] + 1e-3 };
        let mut center = pts[k];
        let mut half = 0.5 * (right - left);
        let mut local = vals[k];
        for _ in 0..40 {
            let m = 8;
            let probe: Vec<f64> = (0..=m)
                .map(|i| center - half + 2.0 * half * i as f64 / m as f64)
                .filter(|&t| region.contains(t))
                .collect();
            if probe.is_empty() {
                break;
            }
            let pv = eval(&probe);
            let (arg, val) = probe
                .iter()
                .zip(pv.iter().map(|v| v.norm()))
                .fold((center, local), |acc, (&t, v)| if v > acc.1 { (t, v) } else { acc });
            let change = (val - local).abs() / val.max(f64::MIN_POSITIVE);
            center = arg;
            local = val;
            half /= 2.0;
            if change < REL_TOL && half < 1e-6 {
                break;
            }
        }
        best = best.max(local);
    }
    best
}

/// Product sup norm of a kernel field, refining each factor by re-evaluating the kernel.
pub fn sup_norm(field: &KernelField, region: &Region) -> Result<f64> {
    region.validate()?;
    let mut total = 1.0;
    for (j, f) in field.factors.iter().enumerate() {
        total *= sup_norm_by(|th| field.eval_factor(j, th), &f.quadrature.nodes, region);
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ResolutionReport {
    pub norm: f64,
    pub refined_norm: f64,
    pub rel_change: f64,
    pub pass: bool,
}

/// Recomputes the norm on a grid with twice the oversampling.
pub fn resolution_check(field: &KernelField, p: f64, region: &Region) -> Result<ResolutionReport> {
    const REL_TOL: f64 = 1e-5;
    let regions = vec![*region; field.factors.len()];
    let norm = lp_norm_unchecked(field, p, &regions)?;
    let refined = field.with_oversample(2 * field.oversample())?;
    let refined_norm = lp_norm_unchecked(&refined, p, &regions)?;
    let rel_change = (refined_norm - norm).abs() / refined_norm.abs().max(f64::MIN_POSITIVE);
    Ok(ResolutionReport { norm, refined_norm, rel_change, pass: rel_change < REL_TOL })
}

/// Bisects oversample factors in `[1, hi]` for the largest one whose doubling
/// check still fails. `None` when even oversample 1 passes.
pub fn failing_oversample(field: &KernelField, p: f64, region: &Region, hi: usize) -> Result<Option<usize>> {
    let passes = |o: usize| -> Result<bool> {
        Ok(resolution_check(&field.with_oversample(o)?, p, region)?.pass)
    };
    if passes(1)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (1usize, hi);
    if !passes(hi)? {
        return Ok(Some(hi));
    }
    // invariant: lo fails, hi passes
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if passes(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_pi_and_mass_is_exact() {
        for dim in [3u32, 5, 7] {
            let q = TorusQuadrature::new(dim, 40.0, 16, 0.05).unwrap();
            let s: f64 = q.weights.iter().sum();
            assert!((s - TAU).abs() < 1e-12);
            let mass: f64 = q.nodes.iter().zip(&q.weights).map(|(&t, &w)| w * q.density(t)).sum();
            assert!((mass - q.total_mass()).abs() < 1e-12 * mass);
        }
        assert!((total_mass(3) - PI).abs() < 1e-15);
    }

    #[test]
    fn constant_field_has_unit_norm() {
        let q = TorusQuadrature::new(5, 10.0, 16, 0.1).unwrap();
        let one = vec![Complex64::new(1.0, 0.0); q.len()];
        for p in [0.5, 1.0, 2.0, 7.0] {
            assert!((lp_norm_1d(&q, &one, p, &Region::Full) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn regions_partition_the_circle() {
        let r = 0.07;
        let q = TorusQuadrature::new(3, 30.0, 16, r).unwrap();
        let vals: Vec<Complex64> =
            q.nodes.iter().map(|&t| Complex64::new((5.0 * t).cos() + 0.3, t.sin())).collect();
        for p in [0.5, 2.0, 4.0] {
            let full = lp_power_1d(&q, &vals, p, &Region::Full);
            let parts = lp_power_1d(&q, &vals, p, &Region::Corner { pole: Pole::Identity, radius: r })
                + lp_power_1d(&q, &vals, p, &Region::Corner { pole: Pole::Antipode, radius: r })
                + lp_power_1d(&q, &vals, p, &Region::Away { radius: r });
            assert!((full - parts).abs() < 1e-12 * full);
        }
    }

    #[test]
    fn region_membership() {
        let c0 = Region::Corner { pole: Pole::Identity, radius: 0.1 };
        assert!(c0.contains(0.05) && c0.contains(TAU - 0.05) && !c0.contains(0.2));
        let cp = Region::Corner { pole: Pole::Antipode, radius: 0.1 };
        assert!(cp.contains(PI + 0.05) && !cp.contains(0.05));
        let away = Region::Away { radius: 0.1 };
        assert!(away.contains(1.0) && !away.contains(0.05) && !away.contains(PI));
        assert!(Region::Away { radius: 2.0 }.validate().is_err());
        assert!(Region::Corner { pole: Pole::Identity, radius: 0.0 }.validate().is_err());
    }

    #[test]
    fn corner_measure_matches_closed_form() {
        // S^3: ∫_0^r sin^2 = r/2 - sin(2r)/4, twice (two sides of 0), over π
        let r = 0.3;
        let m = region_measure(3, &Region::Corner { pole: Pole::Identity, radius: r }).unwrap();
        let want = 2.0 * (r / 2.0 - (2.0 * r).sin() / 4.0) / PI;
        assert!((m - want).abs() < 1e-14, "{m} vs {want}");
    }

    #[test]
    fn sup_refinement_finds_offgrid_peak() {
        let peak = 1.234_567;
        let f = |th: &[f64]| -> Vec<Complex64> {
            th.iter().map(|&t| Complex64::new((-(t - peak).powi(2) * 50.0).exp(), 0.0)).collect()
        };
        let grid: Vec<f64> = (0..64).map(|k| TAU * k as f64 / 64.0).collect();
        let s = sup_norm_by(f, &grid, &Region::Full);
        assert!((s - 1.0).abs() < 1e-6, "{s}");
        let s_corner = sup_norm_by(f, &grid, &Region::Corner { pole: Pole::Identity, radius: 0.5 });
        assert!(s_corner < 1e-6);
    }
}
