//! Farey fractions and major arcs on the time circle `t/T ∈ R/Z`.
//!
//! The arc around `a/q` at scale `N` is `‖t/T - a/q‖ < 1/(qN)` with `q < N`.

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Reduced fractions `a/q` with `0 ≤ a < q ≤ Q`, ascending; `0/1` first.
pub fn farey(big_q: u64) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = (1..=big_q)
        .flat_map(|q| (0..q).filter(move |&a| a.gcd(&q) == 1).map(move |a| (a, q)))
        .collect();
    out.sort_by(|x, y| (x.0 * y.1).cmp(&(y.0 * x.1)));
    out
}

/// Distance from `x` to the nearest integer.
pub fn dist_to_z(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Circle distance `‖τ - a/q‖`.
pub fn arc_distance(tau: f64, a: u64, q: u64) -> f64 {
    dist_to_z(tau - a as f64 / q as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MajorArc {
    pub a: u64,
    pub q: u64,
    #[serde(rename = "N")]
    pub n: f64,
}

/// Rational approximation of a real scale `N`, exact for integers and halves.
fn rationalize(n: f64) -> Rational {
    Rational::approximate_float(n).unwrap_or_else(|| Rational::from_integer(n.round() as i64))
}

impl MajorArc {
    pub fn new(a: u64, q: u64, n: f64) -> Result<Self> {
        if q == 0 || a >= q || a.gcd(&q) != 1 {
            return Err(Error::arg(format!("{a}/{q} is not a reduced fraction in [0, 1)")));
        }
        if (q as f64) >= n {
            return Err(Error::arg(format!("arc denominator q = {q} must be below N = {n}")));
        }
        Ok(Self { a, q, n })
    }

    pub fn center(&self) -> Rational {
        Rational::new(self.a as i64, self.q as i64)
    }

    pub fn halfwidth(&self) -> Rational {
        (rationalize(self.n) * Rational::from_integer(self.q as i64)).recip()
    }

    pub fn halfwidth_f64(&self) -> f64 {
        1.0 / (self.q as f64 * self.n)
    }

    pub fn contains(&self, tau: f64) -> bool {
        arc_distance(tau, self.a, self.q) * self.q as f64 * self.n < 1.0
    }

    pub fn record(&self, distance: f64) -> ArcRecord {
        ArcRecord {
            a: self.a,
            q: self.q,
            n: self.n,
            center: self.center(),
            halfwidth: self.halfwidth(),
            distance,
        }
    }
}

/// JSON shape `{a, q, N, center, halfwidth, distance}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcRecord {
    pub a: u64,
    pub q: u64,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(with = "rational::serde_str")]
    pub center: Rational,
    #[serde(with = "rational::serde_str")]
    pub halfwidth: Rational,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    Major { arc: MajorArc, distance: f64 },
    /// No arc contains the time; `(a, q)` is the best approximant with `q ≤ N`.
    Minor { a: u64, q: u64, distance: f64 },
}

impl Classification {
    pub fn arc(&self) -> Option<&MajorArc> {
        match self {
            Classification::Major { arc, .. } => Some(arc),
            Classification::Minor { .. } => None,
        }
    }
}

fn nearest(tau: f64, q: u64) -> u64 {
    ((tau * q as f64).round() as u64) % q
}

fn classify_tau(tau: f64, n: f64) -> Classification {
    let tau = tau.rem_euclid(1.0);
    let mut q = 1u64;
    while (q as f64) < n {
        let a = nearest(tau, q);
        // a non-reduced a/q was already tested at its reduced denominator
        if a.gcd(&q) == 1 {
            let arc = MajorArc { a, q, n };
            if arc.contains(tau) {
                return Classification::Major { arc, distance: arc_distance(tau, a, q) };
            }
        }
        q += 1;
    }
    let (mut best, mut best_d) = ((0, 1), f64::INFINITY);
    for q in 1..=(n.floor() as u64).max(1) {
        let d = dist_to_z(tau * q as f64);
        if d < best_d {
            let a = nearest(tau, q);
            let g = a.gcd(&q).max(1);
            best = (a / g, q / g);
            best_d = d;
        }
    }
    Classification::Minor { a: best.0, q: best.1, distance: arc_distance(tau, best.0, best.1) }
}

/// Major arc of `t/T` with the smallest `q`, or a minor-arc report.
pub fn classify(t: f64, big_t: f64, n: f64) -> Result<Classification> {
    if !(n > 1.0) || !(big_t > 0.0) {
        return Err(Error::arg("classification needs N > 1 and T > 0"));
    }
    Ok(classify_tau(t / big_t, n))
}

/// Exact classification of a rational time fraction `τ = t/T`.
pub fn classify_rational(tau: Rational, n: u64) -> Result<Classification> {
    if n < 2 {
        return Err(Error::arg("classification needs N > 1"));
    }
    let frac = tau - tau.floor();
    let big_n = Rational::from_integer(n as i64);
    let dist = |a: u64, q: u64| -> Rational {
        let d = (frac - Rational::new(a as i64, q as i64)).abs();
        d.min(Rational::from_integer(1) - d)
    };
    for q in 1..n {
        for a in 0..q {
            if a.gcd(&q) != 1 {
                continue;
            }
            let d = dist(a, q);
            if d * Rational::from_integer(q as i64) * big_n < Rational::from_integer(1) {
                let arc = MajorArc { a, q, n: n as f64 };
                return Ok(Classification::Major { arc, distance: d.to_f64().unwrap_or(0.0) });
            }
        }
    }
    let mut best: Option<(u64, u64, Rational)> = None;
    for q in 1..=n {
        for a in 0..q {
            if a.gcd(&q) != 1 {
                continue;
            }
            let d = dist(a, q);
            if best.as_ref().is_none_or(|b| d < b.2) {
                best = Some((a, q, d));
            }
        }
    }
    let (a, q, d) = best.expect("q = 1 always present");
    Ok(Classification::Minor { a, q, distance: d.to_f64().unwrap_or(0.0) })
}

/// `Σ_{|m| ≤ N} 1 / max(1/N, ‖m·tT + x‖)`.
pub fn denominator_sum(t_t: f64, x: f64, n: f64) -> Result<f64> {
    if !(n >= 2.0) {
        return Err(Error::arg("denominator sum needs N ≥ 2"));
    }
    let m_max = n.floor() as i64;
    let floor = 1.0 / n;
    Ok((-m_max..=m_max)
        .map(|m| 1.0 / dist_to_z(m as f64 * t_t + x).max(floor))
        .sum())
}

/// Same sum with `tT = a/q` and `x = 0` reduced exactly.
pub fn denominator_sum_at(a: u64, q: u64, n: f64) -> Result<f64> {
    if q == 0 {
        return Err(Error::arg("q must be positive"));
    }
    if !(n >= 2.0) {
        return Err(Error::arg("denominator sum needs N ≥ 2"));
    }
    let m_max = n.floor() as i64;
    let floor = 1.0 / n;
    Ok((-m_max..=m_max)
        .map(|m| {
            let r = (m * a as i64).rem_euclid(q as i64) as u64;
            let d = r.min(q - r) as f64 / q as f64;
            1.0 / d.max(floor)
        })
        .sum())
}

/// All arcs around `farey(Q)` at scale `N`, with zero distance.
pub fn arc_table(big_q: u64, n: f64) -> Result<Vec<ArcRecord>> {
    if (big_q as f64) >= n {
        return Err(Error::arg(format!("Q = {big_q} must be below N = {n}")));
    }
    farey(big_q)
        .into_iter()
        .map(|(a, q)| Ok(MajorArc::new(a, q, n)?.record(0.0)))
        .collect()
}

pub(crate) fn is_reduced(a: u64, q: u64) -> bool {
    q > 0 && a < q && a.gcd(&q) == 1 || (a.is_zero() && q == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euler_phi(q: u64) -> u64 {
        (1..=q).filter(|a| a.gcd(&q) == 1).count() as u64
    }

    #[test]
    fn farey_examples() {
        assert_eq!(farey(1), vec![(0, 1)]);
        assert_eq!(farey(3), vec![(0, 1), (1, 3), (1, 2), (2, 3)]);
        for big_q in 1..30 {
            let want = 1 + (2..=big_q).map(euler_phi).sum::<u64>();
            assert_eq!(farey(big_q).len() as u64, want);
        }
        // 1/1 is the same point of the circle as 0/1 and is not listed
        assert_eq!(farey(5).len(), 10);
    }

    #[test]
    fn classify_examples() {
        let c = classify(1.0, 3.0, 10.0).unwrap();
        assert_eq!(c.arc().map(|a| (a.a, a.q)), Some((1, 3)));
        let c = classify(0.337, 1.0, 10.0).unwrap();
        assert_eq!(c.arc().map(|a| (a.a, a.q)), Some((1, 3)));
        // the golden ratio is badly approximable, but a convergent F_k/F_{k+1}
        // with N/√5 < F_{k+1} < N always exists, so it still lies on an arc
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let c = classify(golden, 1.0, 1000.0).unwrap();
        assert_eq!(c.arc().map(|a| (a.a, a.q)), Some((377, 610)));
        let hits: Vec<u64> = (1..1000u64)
            .filter(|&q| {
                let a = (golden * q as f64).round() as u64;
                a.gcd(&q) == 1 && arc_distance(golden, a, q) * q as f64 * 1000.0 < 1.0
            })
            .collect();
        assert_eq!(hits, vec![610, 987]);
        // Dirichlet leaves only boundary points minor
        match classify(0.5, 1.0, 2.0).unwrap() {
            Classification::Minor { a, q, .. } => assert_eq!((a, q), (1, 2)),
            m => panic!("expected minor, got {m:?}"),
        }
        let m = classify_rational(Rational::new(1, 2), 2).unwrap();
        assert!(m.arc().is_none());
    }

    #[test]
    fn classification_is_stable_under_period_and_reflection() {
        for k in 0..2000 {
            let tau = (k as f64 * 0.618_033_988_7 + 0.01).fract();
            let n = 50.0;
            let c = classify(tau, 1.0, n).unwrap();
            assert_eq!(c.arc(), classify(tau + 1.0, 1.0, n).unwrap().arc());
            let m = classify(-tau, 1.0, n).unwrap();
            match (c.arc(), m.arc()) {
                (Some(x), Some(y)) => assert_eq!((y.a, y.q), ((x.q - x.a) % x.q, x.q)),
                (None, None) => {}
                _ => panic!("reflection changed major/minor at {tau}"),
            }
        }
    }

    #[test]
    fn rational_and_float_classification_agree() {
        for k in 0..500i64 {
            let tau = Rational::new(k * 7 + 3, 3511);
            let exact = classify_rational(tau, 64).unwrap();
            let float = classify(tau.to_f64().unwrap(), 1.0, 64.0).unwrap();
            assert_eq!(exact.arc().map(|a| (a.a, a.q)), float.arc().map(|a| (a.a, a.q)));
        }
    }

    #[test]
    fn denominator_sum_examples() {
        assert_eq!(denominator_sum(0.0, 0.5, 10.0).unwrap(), 42.0);
        assert_eq!(denominator_sum(0.0, 0.0, 10.0).unwrap(), 210.0);
        assert!(denominator_sum(0.1, 0.0, 1.0).is_err());
        let exact = denominator_sum_at(1, 3, 100.0).unwrap();
        let float = denominator_sum(1.0 / 3.0, 0.0, 100.0).unwrap();
        assert!((exact - float).abs() < 1e-9 * exact);
    }

    #[test]
    fn arc_geometry() {
        let arcs = arc_table(3, 10.0).unwrap();
        let hw: Vec<String> = arcs.iter().map(|r| rational::format_rational(&r.halfwidth)).collect();
        assert_eq!(hw, ["1/10", "1/30", "1/20", "1/30"]);
        assert!(arc_table(10, 10.0).is_err());
        let js = serde_json::to_string(&arcs[1]).unwrap();
        assert!(js.contains("\"center\":\"1/3\"") && js.contains("\"N\":10.0"));
        assert!(is_reduced(0, 1) && !is_reduced(2, 4));
    }

    proptest::proptest! {
        #[test]
        fn denominator_sum_bounds(tt in 0.0f64..1.0, x in 0.0f64..1.0, n in 2u32..300) {
            let n = n as f64;
            let s = denominator_sum(tt, x, n).unwrap();
            proptest::prop_assert!(s >= 2.0 * n + 1.0 - 1e-9);
            proptest::prop_assert!(s <= (2.0 * n + 1.0) * n * (1.0 + 1e-12));
        }
    }
}
