//! Weierstrass ℘ on the real line, parametrized by the invariants (g2, g3).
//!
//! With e1, e2, e3 the roots of 4x³ − g2·x − g3:
//!
//! * Δ > 0 (three real roots): ℘(z) = e3 + (e1 − e3) / sn²(z√(e1 − e3) | m),
//!   m = (e2 − e3)/(e1 − e3). The degenerate lattices Δ = 0 are the limits
//!   m = 0 and m = 1 of the same formula.
//! * Δ < 0 (one real root e2): ℘(z) = e2 + H·(1 + cn(2z√H | m)) / (1 − cn(2z√H | m)),
//!   H = √(3e2² − g2/4), m = 1/2 − 3e2/(4H).

use std::f64::consts::PI;

use super::jacobi::{elliptic_k, jacobi};
use crate::error::{Error, Result};

/// Default pole guard, relative to the real period.
pub const DEFAULT_POLE_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeierstrassInvariants {
    pub g2: f64,
    pub g3: f64,
}

impl WeierstrassInvariants {
    pub fn new(g2: f64, g3: f64) -> Result<Self> {
        if !g2.is_finite() || !g3.is_finite() {
            return Err(Error::Domain(format!("invariants must be finite: g2 = {g2}, g3 = {g3}")));
        }
        Ok(Self { g2, g3 })
    }

    /// g2³ − 27·g3².
    pub fn discriminant(&self) -> f64 {
        self.g2.powi(3) - 27.0 * self.g3 * self.g3
    }

    pub fn is_degenerate(&self) -> bool {
        let scale = self.g2.abs().powi(3).max(27.0 * self.g3 * self.g3);
        self.discriminant().abs() <= 1e-12 * scale
    }
}

#[derive(Debug, Clone, Copy)]
enum Repr {
    /// g2 = g3 = 0: ℘ = 1/z².
    Rational,
    ThreeRoots { e1: f64, e3: f64, m: f64 },
    OneRoot { e2: f64, h: f64, m: f64 },
}

/// ℘ prepared for repeated evaluation with fixed invariants.
#[derive(Debug, Clone, Copy)]
pub struct Weierstrass {
    invariants: WeierstrassInvariants,
    repr: Repr,
    /// Distance between consecutive real poles; infinite when 0 is the only one.
    real_period: f64,
    pole_epsilon: f64,
}

impl Weierstrass {
    pub fn new(invariants: WeierstrassInvariants) -> Result<Self> {
        let WeierstrassInvariants { g2, g3 } = invariants;
        let (repr, real_period) = if g2 == 0.0 && g3 == 0.0 {
            (Repr::Rational, f64::INFINITY)
        } else if invariants.discriminant() >= 0.0 || invariants.is_degenerate() {
            let (e1, e2, e3) = real_roots(g2, g3);
            let spread = e1 - e3;
            let m = ((e2 - e3) / spread).clamp(0.0, 1.0);
            let period = if m >= 1.0 {
                f64::INFINITY
            } else {
                2.0 * elliptic_k(m)? / spread.sqrt()
            };
            (Repr::ThreeRoots { e1, e3, m }, period)
        } else {
            let e2 = single_real_root(g2, g3);
            let h = (3.0 * e2 * e2 - 0.25 * g2).sqrt();
            let m = 0.5 - 0.75 * e2 / h;
            (Repr::OneRoot { e2, h, m }, 2.0 * elliptic_k(m)? / h.sqrt())
        };
        Ok(Self {
            invariants,
            repr,
            real_period,
            pole_epsilon: DEFAULT_POLE_EPSILON,
        })
    }

    /// Pole guard as a fraction of the real period (absolute when the period is infinite).
    pub fn with_pole_epsilon(mut self, epsilon: f64) -> Self {
        self.pole_epsilon = epsilon;
        self
    }

    pub fn invariants(&self) -> WeierstrassInvariants {
        self.invariants
    }

    pub fn real_period(&self) -> f64 {
        self.real_period
    }

    /// The real half-period ω: ℘ attains its real minimum at ω on the segment (0, 2ω).
    pub fn half_period(&self) -> f64 {
        0.5 * self.real_period
    }

    /// Reduces `z` to the period cell around the nearest pole, rejecting points too close to it.
    fn guard(&self, z: f64) -> Result<f64> {
        if !z.is_finite() {
            return Err(Error::Domain(format!("℘ argument must be finite, got {z}")));
        }
        let (reduced, pole, epsilon) = if self.real_period.is_finite() {
            let n = (z / self.real_period).round();
            (z - n * self.real_period, n * self.real_period, self.pole_epsilon * self.real_period)
        } else {
            (z, 0.0, self.pole_epsilon)
        };
        if reduced.abs() < epsilon {
            return Err(Error::Pole { z, pole, epsilon });
        }
        Ok(reduced)
    }

    pub fn p(&self, z: f64) -> Result<f64> {
        let z = self.guard(z)?.abs();
        Ok(match self.repr {
            Repr::Rational => 1.0 / (z * z),
            Repr::ThreeRoots { e1, e3, m } => {
                let s = jacobi((e1 - e3).sqrt() * z, m)?.sn;
                e3 + (e1 - e3) / (s * s)
            }
            Repr::OneRoot { e2, h, m } => {
                let j = jacobi(2.0 * h.sqrt() * z, m)?;
                e2 + h * cn_ratio(j.sn, j.cn)
            }
        })
    }

    /// ℘′(z).
    pub fn p_prime(&self, z: f64) -> Result<f64> {
        let reduced = self.guard(z)?;
        let (sign, z) = (reduced.signum(), reduced.abs());
        let value = match self.repr {
            Repr::Rational => -2.0 / (z * z * z),
            Repr::ThreeRoots { e1, e3, m } => {
                let spread = e1 - e3;
                let j = jacobi(spread.sqrt() * z, m)?;
                -2.0 * spread * spread.sqrt() * j.cn * j.dn / j.sn.powi(3)
            }
            Repr::OneRoot { e2: _, h, m } => {
                let j = jacobi(2.0 * h.sqrt() * z, m)?;
                // d/dx[(1+cn)/(1−cn)] = −2·sn·dn/(1−cn)²
                let one_minus_cn_sq = if j.cn >= 0.0 {
                    (j.sn * j.sn / (1.0 + j.cn)).powi(2)
                } else {
                    (1.0 - j.cn).powi(2)
                };
                -4.0 * h * h.sqrt() * j.sn * j.dn / one_minus_cn_sq
            }
        };
        Ok(sign * value)
    }

    /// ℘″(z) = 6℘² − g2/2.
    pub fn p_second(&self, z: f64) -> Result<f64> {
        let p = self.p(z)?;
        Ok(6.0 * p * p - 0.5 * self.invariants.g2)
    }
}

/// (1 + cn)/(1 − cn) without cancellation near cn = ±1.
fn cn_ratio(sn: f64, cn: f64) -> f64 {
    if cn >= 0.0 {
        (1.0 + cn).powi(2) / (sn * sn)
    } else {
        (sn * sn) / (1.0 - cn).powi(2)
    }
}

/// ℘(z; g2, g3) with the default pole guard.
pub fn weierstrass_p(z: f64, invariants: WeierstrassInvariants) -> Result<f64> {
    Weierstrass::new(invariants)?.p(z)
}

/// Roots e1 ≥ e2 ≥ e3 of 4x³ − g2·x − g3 when all three are real.
fn real_roots(g2: f64, g3: f64) -> (f64, f64, f64) {
    // x³ + p·x + q = 0 with p = −g2/4, q = −g3/4
    let p = -0.25 * g2;
    let q = -0.25 * g3;
    if p >= 0.0 {
        // only reachable for g2 = 0 = g3 after the caller's checks, or rounding
        let r = (-q).cbrt();
        return (r, r, r);
    }
    let radius = 2.0 * (-p / 3.0).sqrt();
    let arg = ((3.0 * q) / (p * radius)).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    let mut roots = [0, 1, 2].map(|k| polish(radius * (theta - 2.0 * PI * k as f64 / 3.0).cos(), g2, g3));
    roots.sort_by(|a, b| b.total_cmp(a));
    (roots[0], roots[1], roots[2])
}

fn single_real_root(g2: f64, g3: f64) -> f64 {
    let p = -0.25 * g2;
    let q = -0.25 * g3;
    let d = (0.25 * q * q + p * p * p / 27.0).max(0.0).sqrt();
    polish((-0.5 * q + d).cbrt() + (-0.5 * q - d).cbrt(), g2, g3)
}

fn polish(mut x: f64, g2: f64, g3: f64) -> f64 {
    for _ in 0..3 {
        let f = 4.0 * x * x * x - g2 * x - g3;
        let df = 12.0 * x * x - g2;
        if df == 0.0 {
            break;
        }
        x -= f / df;
    }
    x
}
