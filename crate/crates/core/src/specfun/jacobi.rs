//! Jacobi elliptic functions for real argument and real parameter m = k².
//!
//! The base case 0 ≤ m < 1 uses the descending Landen (AGM) scheme. Negative m
//! goes through the imaginary-modulus transformation and m > 1 through the
//! reciprocal-modulus transformation, so m = −1 (k = i) and m = 2 (k = √2)
//! both reduce to a parameter in [0, 1).

use std::f64::consts::PI;

use crate::error::{Error, Result};

const MAX_AGM_STEPS: usize = 64;

/// An argument/parameter pair for the Jacobi functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticArg {
    pub u: f64,
    pub modulus_squared: f64,
}

impl EllipticArg {
    pub fn new(u: f64, modulus_squared: f64) -> Result<Self> {
        if !u.is_finite() || !modulus_squared.is_finite() {
            return Err(Error::Domain(format!(
                "elliptic argument must be finite, got u = {u}, m = {modulus_squared}"
            )));
        }
        Ok(Self { u, modulus_squared })
    }

    pub fn eval(&self) -> Result<Jacobi> {
        jacobi(self.u, self.modulus_squared)
    }
}

/// sn, cn, dn and the amplitude at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobi {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
    pub am: f64,
}

pub fn jacobi_sn(u: f64, m: f64) -> Result<f64> {
    jacobi(u, m).map(|j| j.sn)
}

pub fn jacobi_cn(u: f64, m: f64) -> Result<f64> {
    jacobi(u, m).map(|j| j.cn)
}

pub fn jacobi_dn(u: f64, m: f64) -> Result<f64> {
    jacobi(u, m).map(|j| j.dn)
}

pub fn jacobi_am(u: f64, m: f64) -> Result<f64> {
    jacobi(u, m).map(|j| j.am)
}

/// Complete elliptic integral of the first kind, K(m) = π / (2·AGM(1, √(1−m))), for m < 1.
pub fn elliptic_k(m: f64) -> Result<f64> {
    if !(m < 1.0) {
        return Err(Error::Domain(format!("K(m) requires m < 1, got {m}")));
    }
    let (mut a, mut b) = (1.0_f64, (1.0 - m).sqrt());
    for _ in 0..MAX_AGM_STEPS {
        if (a - b).abs() <= f64::EPSILON * a {
            return Ok(PI / (2.0 * a));
        }
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    Err(Error::NonConvergence {
        what: "arithmetic-geometric mean",
        iterations: MAX_AGM_STEPS,
    })
}

/// All four Jacobi functions at (u, m).
pub fn jacobi(u: f64, m: f64) -> Result<Jacobi> {
    EllipticArg::new(u, m)?;
    if m < 0.0 {
        negative_parameter(u, m)
    } else if m < 1.0 {
        landen(u, m)
    } else if m == 1.0 {
        let sech = 1.0 / u.cosh();
        Ok(Jacobi {
            sn: u.tanh(),
            cn: sech,
            dn: sech,
            am: u.sinh().atan(),
        })
    } else {
        // sn(u|m) = sn(ku|1/m)/k, cn(u|m) = dn(ku|1/m), dn(u|m) = cn(ku|1/m)
        let k = m.sqrt();
        let base = landen(k * u, 1.0 / m)?;
        let sn = base.sn / k;
        let cn = base.dn;
        // cn > 0 here, so the amplitude stays in (−π/2, π/2) and atan2 is continuous
        Ok(Jacobi {
            sn,
            cn,
            dn: base.cn,
            am: sn.atan2(cn),
        })
    }
}

fn negative_parameter(u: f64, m: f64) -> Result<Jacobi> {
    // sn(u|m) = sd(v|μ)/√(1−m), cn(u|m) = cd(v|μ), dn(u|m) = nd(v|μ)
    // with μ = −m/(1−m), v = u√(1−m).
    let scale = (1.0 - m).sqrt();
    let mu = -m / (1.0 - m);
    let base = landen(u * scale, mu)?;
    let sn = base.sn / (base.dn * scale);
    let cn = base.cn / base.dn;
    let dn = 1.0 / base.dn;

    // dn ≥ 1 makes am strictly increasing; am(u + 2K) = am(u) + π with
    // K = K(μ)/√(1−m). Reduce to |r| ≤ K where cn ≥ 0.
    let half_period = 2.0 * elliptic_k(mu)? / scale;
    let turns = (u / half_period).round();
    let am = if turns == 0.0 {
        sn.atan2(cn)
    } else {
        let r = u - turns * half_period;
        let reduced = landen(r * scale, mu)?;
        let (s, c) = (reduced.sn / (reduced.dn * scale), reduced.cn / reduced.dn);
        turns * PI + s.atan2(c)
    };
    Ok(Jacobi { sn, cn, dn, am })
}

/// Descending Landen transformation for 0 ≤ m < 1.
fn landen(u: f64, m: f64) -> Result<Jacobi> {
    let mut ratios = [0.0_f64; MAX_AGM_STEPS];
    let (mut a, mut b, mut c) = (1.0_f64, (1.0 - m).sqrt(), m.sqrt());
    let mut n = 0;
    while c.abs() > f64::EPSILON * a {
        if n == MAX_AGM_STEPS {
            return Err(Error::NonConvergence {
                what: "Landen transformation",
                iterations: MAX_AGM_STEPS,
            });
        }
        (a, b, c) = (0.5 * (a + b), (a * b).sqrt(), 0.5 * (a - b));
        ratios[n] = c / a;
        n += 1;
    }
    let mut phi = (1u64 << n) as f64 * a * u;
    for ratio in ratios[..n].iter().rev() {
        phi = 0.5 * (phi + (ratio * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    Ok(Jacobi {
        sn,
        cn,
        dn: (1.0 - m * sn * sn).sqrt(),
        am: phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// F(φ|m) = ∫₀^φ dθ/√(1 − m sin²θ) by composite Simpson.
    fn incomplete_f(phi: f64, m: f64) -> f64 {
        let n = 4000;
        let h = phi / n as f64;
        let f = |t: f64| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt();
        let mut sum = f(0.0) + f(phi);
        for i in 1..n {
            sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        sum * h / 3.0
    }

    #[test]
    fn zero_argument() {
        assert_eq!(jacobi_am(0.0, 2.0).unwrap(), 0.0);
        assert_eq!(jacobi_sn(0.0, -1.0).unwrap(), 0.0);
    }

    #[test]
    fn circular_limit() {
        assert!(close(jacobi_am(0.5, 0.0).unwrap(), 0.5, 1e-15));
        assert!(close(jacobi_sn(0.3, 0.0).unwrap(), 0.3_f64.sin(), 1e-15));
        for i in 0..=60 {
            let u = -3.0 + 0.1 * i as f64;
            let j = jacobi(u, 0.0).unwrap();
            assert!(close(j.sn, u.sin(), 1e-10));
            assert!(close(j.am, u, 1e-10));
        }
    }

    #[test]
    fn amplitude_inverts_incomplete_integral() {
        for &m in &[0.1, 0.5, 0.9, 0.999, -1.0, -3.0] {
            for &u in &[0.2, 0.7, 1.3, 2.9] {
                let phi = jacobi_am(u, m).unwrap();
                assert!(close(incomplete_f(phi, m), u, 1e-9), "m = {m}, u = {u}");
            }
        }
    }

    #[test]
    fn pythagorean_identities_across_parameters() {
        for &m in &[-4.0, -1.0, -0.2, 0.0, 0.3, 0.99, 1.0, 1.5, 2.0, 7.0] {
            for i in 0..40 {
                let u = -5.0 + 0.27 * i as f64;
                let j = jacobi(u, m).unwrap();
                assert!(close(j.sn * j.sn + j.cn * j.cn, 1.0, 1e-13), "m = {m}, u = {u}");
                assert!(close(m * j.sn * j.sn + j.dn * j.dn, 1.0, 1e-12), "m = {m}, u = {u}");
                assert!(close(j.am.sin(), j.sn, 1e-13));
            }
        }
    }

    #[test]
    fn amplitude_is_continuous_for_negative_parameter() {
        let mut prev = jacobi_am(0.0, -1.0).unwrap();
        for i in 1..2000 {
            let u = 0.01 * i as f64;
            let am = jacobi_am(u, -1.0).unwrap();
            assert!(am > prev && am - prev < 0.02, "u = {u}");
            prev = am;
        }
    }

    #[test]
    fn quarter_period_values() {
        let m = 0.7;
        let k = elliptic_k(m).unwrap();
        let j = jacobi(k, m).unwrap();
        assert!(close(j.sn, 1.0, 1e-14));
        assert!(close(j.cn, 0.0, 1e-14));
        assert!(close(j.dn, (1.0 - m).sqrt(), 1e-14));
        assert!(close(elliptic_k(0.0).unwrap(), PI / 2.0, 1e-15));
        assert!(elliptic_k(1.0).is_err());
    }

    #[test]
    fn non_finite_is_rejected() {
        assert!(jacobi(f64::NAN, 0.5).is_err());
        assert!(jacobi(1.0, f64::INFINITY).is_err());
    }

    /// Max |G″ + N(G)| over a grid using a 4th-order central difference.
    fn fd_residual(g: impl Fn(f64) -> f64, n: impl Fn(f64) -> f64) -> f64 {
        let h = 1e-3;
        (1..=400)
            .map(|i| {
                let t = 0.01 * i as f64;
                let d2 = (-g(t + 2.0 * h) + 16.0 * g(t + h) - 30.0 * g(t) + 16.0 * g(t - h)
                    - g(t - 2.0 * h))
                    / (12.0 * h * h);
                (d2 + n(g(t))).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn sn_imaginary_modulus_solves_cubic_oscillator() {
        let a = 2f64.powf(0.25);
        let g = |t: f64| a * jacobi_sn(t / a, -1.0).unwrap();
        assert!(fd_residual(g, |w| w * w * w) < 1e-8);
        // oddness
        for &u in &[0.3, 1.0, 2.7] {
            assert_eq!(jacobi_sn(-u, -1.0).unwrap(), -jacobi_sn(u, -1.0).unwrap());
            assert_eq!(jacobi_am(-u, 2.0).unwrap(), -jacobi_am(u, 2.0).unwrap());
        }
    }

    #[test]
    fn am_reciprocal_modulus_solves_pendulum() {
        let r2 = 2f64.sqrt();
        let g = |t: f64| 2.0 * jacobi_am(t / r2, 2.0).unwrap();
        assert!(fd_residual(g, f64::sin) < 1e-8);
        // slope of am at the origin is one
        let h = 1e-6;
        assert!(close((jacobi_am(h, 2.0).unwrap() - jacobi_am(-h, 2.0).unwrap()) / (2.0 * h), 1.0, 1e-9));
    }
}
