//! Double-double cosine with exact quadrant handling.
//!
//! Used by the explicit ultraspherical sum, whose terms cancel to roughly
//! `|2 sin θ|^{1-2λ}` near the corners.

use twofloat::TwoFloat;

// π/2 split into four doubles (fdlibm's pio2_1, pio2_2, pio2_3, pio2_3t).
#[allow(clippy::excessive_precision)]
const PIO2: [f64; 4] = [
    1.570_796_326_734_125_614_17e+00,
    6.077_100_506_303_965_976_60e-11,
    2.022_266_248_711_166_455_80e-21,
    8.478_427_660_368_899_569_97e-32,
];

const TAYLOR_TERMS: usize = 30;

fn inv_factorials() -> &'static [TwoFloat; TAYLOR_TERMS] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[TwoFloat; TAYLOR_TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [TwoFloat::from(1.0); TAYLOR_TERMS];
        for k in 1..TAYLOR_TERMS {
            t[k] = t[k - 1] / (k as f64);
        }
        t
    })
}

/// `(sin r, cos r)` for `|r| ≤ π/4`.
fn sin_cos_small(r: TwoFloat) -> (TwoFloat, TwoFloat) {
    let f = inv_factorials();
    let r2 = r * r;
    // sin r = r Σ (-1)^i r^{2i} / (2i+1)!,  cos r = Σ (-1)^i r^{2i} / (2i)!
    let mut s = TwoFloat::from(0.0);
    let mut c = TwoFloat::from(0.0);
    let top = (TAYLOR_TERMS - 2) / 2;
    for i in (0..=top).rev() {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        s = s * r2 + f[2 * i + 1] * sign;
        c = c * r2 + f[2 * i] * sign;
    }
    (s * r, c)
}

/// `cos(m·θ - k·π/2)` in double-double precision, with `m·θ` formed exactly.
pub(crate) fn cos_shifted(m: i64, theta: f64, k: i64) -> TwoFloat {
    let a = TwoFloat::new_mul(m as f64, theta);
    let j = (a.hi() / PIO2[0]).round();
    let mut r = a;
    for p in PIO2 {
        r -= TwoFloat::new_mul(j, p);
    }
    let quadrant = ((j as i64) - k).rem_euclid(4);
    let (s, c) = sin_cos_small(r);
    match quadrant {
        0 => c,
        1 => -s,
        2 => -c,
        _ => s,
    }
}

pub(crate) fn dd(hi: f64, lo: f64) -> TwoFloat {
    TwoFloat::new_add(hi, lo)
}

/// `sin θ` in double-double.
pub(crate) fn sin(theta: f64) -> TwoFloat {
    cos_shifted(1, theta, 1)
}

/// `1/b` by one Newton step from the double reciprocal.
///
/// twofloat's own `TwoFloat / TwoFloat` forms its residual without an fma and
/// only returns double accuracy, so it is not used here.
pub(crate) fn recip(b: TwoFloat) -> TwoFloat {
    let x0 = 1.0 / b.hi();
    let residual = TwoFloat::from(1.0) - b * x0;
    TwoFloat::from(x0) + residual * x0
}
