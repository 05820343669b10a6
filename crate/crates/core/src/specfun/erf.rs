//! Error function and its inverses.
//!
//! The forward functions come from `libm`. The inverses are Newton
//! iterations seeded by Giles' single-precision approximation; for
//! |y| > 1/2 the iteration runs on `erfc` so the tail keeps full relative
//! accuracy.

use crate::error::{Error, Result};

const TOLERANCE: f64 = 1e-12;
const MAX_ITERATIONS: usize = 50;
const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
/// Beyond −ln(1 − y²) = 25 the single-precision seed is extrapolated too far.
const TAIL_LOG: f64 = 25.0;

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Inverse of [`erf`] on the open interval (−1, 1).
pub fn erf_inv(y: f64) -> Result<f64> {
    if !(y.abs() < 1.0) {
        return Err(Error::Domain(format!("erf_inv requires |y| < 1, got {y}")));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    if y.abs() <= 0.5 {
        newton(giles_seed(y, (1.0 - y) * (1.0 + y)), |x| erf(x) - y)
    } else {
        let x = erfc_inv(1.0 - y.abs())?;
        Ok(x.copysign(y))
    }
}

/// Inverse of [`erfc`] on the open interval (0, 2).
pub fn erfc_inv(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 2.0) {
        return Err(Error::Domain(format!("erfc_inv requires 0 < q < 2, got {q}")));
    }
    if q > 1.0 {
        // erfc(-x) = 2 - erfc(x)
        return erfc_inv(2.0 - q).map(|x| -x);
    }
    if q == 1.0 {
        return Ok(0.0);
    }
    let one_minus_y2 = q * (2.0 - q);
    let seed = if -one_minus_y2.ln() < TAIL_LOG {
        giles_seed(1.0 - q, one_minus_y2)
    } else {
        // erfc(x) ≈ e^{−x²}/(x√π): one fixed-point pass from x = √(−ln q)
        let x0 = (-q.ln()).sqrt();
        (-(q * x0 * std::f64::consts::PI.sqrt()).ln()).sqrt()
    };
    // Newton on ln erfc(x) = ln q, which stays well scaled deep in the tail
    // where erfc itself is tiny; d/dx ln erfc(x) = −erf′(x)/erfc(x).
    let target = q.ln();
    newton_with(seed, |x| erfc(x).ln() - target, |x| -TWO_OVER_SQRT_PI * (-x * x).exp() / erfc(x))
}

fn newton(seed: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
    newton_with(seed, f, |x| TWO_OVER_SQRT_PI * (-x * x).exp())
}

fn newton_with(seed: f64, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> Result<f64> {
    let mut x = seed;
    for _ in 0..MAX_ITERATIONS {
        let slope = df(x);
        if slope == 0.0 || !slope.is_finite() {
            break;
        }
        let step = f(x) / slope;
        x -= step;
        if step.abs() <= TOLERANCE * x.abs().max(f64::MIN_POSITIVE) {
            return Ok(x);
        }
    }
    Err(Error::NonConvergence {
        what: "inverse error function",
        iterations: MAX_ITERATIONS,
    })
}

/// Giles, "Approximating the erfinv function" (GPU Gems, 2010), single-precision
/// branch. `one_minus_y2` is passed separately so callers in the tail can
/// supply it without cancellation.
fn giles_seed(y: f64, one_minus_y2: f64) -> f64 {
    let mut w = -one_minus_y2.ln();
    let p = if w < 5.0 {
        w -= 2.5;
        let mut p = 2.810_226_36e-08;
        p = 3.432_739_39e-07 + p * w;
        p = -3.523_387_7e-06 + p * w;
        p = -4.391_506_54e-06 + p * w;
        p = 0.000_218_580_87 + p * w;
        p = -0.001_253_725_03 + p * w;
        p = -0.004_177_681_64 + p * w;
        p = 0.246_640_727 + p * w;
        1.501_409_41 + p * w
    } else {
        w = w.sqrt() - 3.0;
        let mut p = -0.000_200_214_257;
        p = 0.000_100_950_558 + p * w;
        p = 0.001_349_343_22 + p * w;
        p = -0.003_673_428_44 + p * w;
        p = 0.005_739_507_73 + p * w;
        p = -0.007_622_461_3 + p * w;
        p = 0.009_438_870_47 + p * w;
        p = 1.001_674_06 + p * w;
        2.832_976_82 + p * w
    };
    p * y
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson on (2/√π)∫₀ˣ e^{−τ²} dτ.
    fn erf_by_simpson(x: f64, n: usize) -> f64 {
        let h = x / n as f64;
        let f = |t: f64| (-t * t).exp();
        let mut sum = f(0.0) + f(x);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * f(i as f64 * h);
        }
        TWO_OVER_SQRT_PI * sum * h / 3.0
    }

    #[test]
    fn erf_basic_values() {
        assert_eq!(erf(0.0), 0.0);
        assert_eq!(erf(0.7), -erf(-0.7));
        assert!((erf(1.0) - erf_by_simpson(1.0, 2000)).abs() < 1e-10);
        assert!((erf(2.5) - erf_by_simpson(2.5, 4000)).abs() < 1e-10);
    }

    #[test]
    fn erf_inv_examples() {
        assert_eq!(erf_inv(0.0).unwrap(), 0.0);
        let y = erf(1.2345);
        assert!((erf_inv(y).unwrap() - 1.2345).abs() < 1e-10);
        let x = erf_inv(0.999_999).unwrap();
        assert!(x.is_finite());
        assert!((erf(x) - 0.999_999).abs() < 1e-9);
    }

    #[test]
    fn erf_inv_rejects_closed_endpoints() {
        for y in [1.0, -1.0, 1.5, f64::NAN] {
            assert!(matches!(erf_inv(y), Err(Error::Domain(_))), "y = {y}");
        }
        assert!(erfc_inv(0.0).is_err());
        assert!(erfc_inv(2.0).is_err());
    }

    #[test]
    fn erfc_inv_tail() {
        for q in [1e-3, 1e-8, 1e-15, 1e-100, 1e-250] {
            let x = erfc_inv(q).unwrap();
            assert!(((erfc(x) - q) / q).abs() < 1e-10, "q = {q}");
        }
        assert!((erfc_inv(1.5).unwrap() + erfc_inv(0.5).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn erf_inv_round_trip_dense() {
        let n = 1000;
        for i in 0..n {
            let y = -0.999 + 1.998 * (i as f64 + 0.5) / n as f64;
            let x = erf_inv(y).unwrap();
            assert!((erf(x) - y).abs() <= 1e-10 * y.abs().max(1e-300), "y = {y}");
        }
    }
}
