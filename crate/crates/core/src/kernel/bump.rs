use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpKind {
    Smooth,
    Sharp,
}

/// Littlewood–Paley cutoff in the variable `x = -eigenvalue / N²`.
///
/// The smooth kind is the usual `exp(-1/x)` gluing: zero outside `[lo, hi]`,
/// one on `[2lo, hi/2]`. The sharp kind is the indicator of `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub kind: BumpKind,
    pub lo: f64,
    pub hi: f64,
}

impl Default for Bump {
    fn default() -> Self {
        Self::smooth()
    }
}

fn psi(y: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else {
        (-1.0 / y).exp()
    }
}

/// Smooth step, 0 for `y ≤ 0` and 1 for `y ≥ 1`.
fn step(y: f64) -> f64 {
    let a = psi(y);
    let b = psi(1.0 - y);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

impl Bump {
    pub fn new(kind: BumpKind, lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::arg(format!("bump support [{lo}, {hi}] must satisfy 0 < lo < hi")));
        }
        if kind == BumpKind::Smooth && 4.0 * lo > hi {
            return Err(Error::arg("smooth bump needs 2·lo ≤ hi/2 for its plateau"));
        }
        Ok(Self { kind, lo, hi })
    }

    /// Support `[1/4, 4]`, plateau `[1/2, 2]`.
    pub fn smooth() -> Self {
        Self { kind: BumpKind::Smooth, lo: 0.25, hi: 4.0 }
    }

    pub fn sharp() -> Self {
        Self { kind: BumpKind::Sharp, lo: 0.25, hi: 4.0 }
    }

    pub fn with_kind(kind: BumpKind) -> Self {
        match kind {
            BumpKind::Smooth => Self::smooth(),
            BumpKind::Sharp => Self::sharp(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            return 0.0;
        }
        match self.kind {
            BumpKind::Sharp => 1.0,
            BumpKind::Smooth => {
                let up = step((x - self.lo) / self.lo);
                let down = step((self.hi - x) / (0.5 * self.hi));
                up * down
            }
        }
    }
}
