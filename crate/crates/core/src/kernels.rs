//! The nonlinear Green's function catalog.
//!
//! Each kernel solves `G″ + N(G, G′) = s1·δ(t)` with homogeneous Cauchy data,
//! so for t > 0 it is the free solution starting from `G(0⁺) = 0` with an
//! initial slope fixed by the delta amplitude. Closed forms exist for the six
//! nonlinearities below; [`numeric_kernel`] integrates the same problem
//! directly for any slope.

use std::f64::consts::{FRAC_2_SQRT_PI, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::frasca::SourceFunction;
use crate::grid::{TimeGrid, Trajectory};
use crate::oracle::{self, IvpProblem};
use crate::specfun::{erfc_inv, jacobi, Weierstrass, WeierstrassInvariants};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Nonlinearity {
    /// N = w³
    Cubic,
    /// N = sin w
    SineGordon,
    /// N = w²
    Quadratic,
    /// N = 1/w
    Reciprocal,
    /// N = eʷ
    Exponential,
    /// N = w·w′
    Advective,
}

impl Nonlinearity {
    pub const ALL: [Nonlinearity; 6] = [
        Nonlinearity::Cubic,
        Nonlinearity::SineGordon,
        Nonlinearity::Quadratic,
        Nonlinearity::Reciprocal,
        Nonlinearity::Exponential,
        Nonlinearity::Advective,
    ];

    /// N(w, w′). Reciprocal is undefined at w = 0 and returns ±∞ there.
    pub fn evaluate(self, w: f64, w_prime: f64) -> f64 {
        match self {
            Nonlinearity::Cubic => w * w * w,
            Nonlinearity::SineGordon => w.sin(),
            Nonlinearity::Quadratic => w * w,
            Nonlinearity::Reciprocal => 1.0 / w,
            Nonlinearity::Exponential => w.exp(),
            Nonlinearity::Advective => w * w_prime,
        }
    }

    /// Potential V with V′ = N, for the nonlinearities that do not depend on w′.
    pub fn potential(self, w: f64) -> Option<f64> {
        match self {
            Nonlinearity::Cubic => Some(0.25 * w.powi(4)),
            Nonlinearity::SineGordon => Some(1.0 - w.cos()),
            Nonlinearity::Quadratic => Some(w.powi(3) / 3.0),
            Nonlinearity::Reciprocal => Some(w.abs().ln()),
            Nonlinearity::Exponential => Some(w.exp()),
            Nonlinearity::Advective => None,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Nonlinearity::Cubic => "cubic",
            Nonlinearity::SineGordon => "sine-gordon",
            Nonlinearity::Quadratic => "quadratic",
            Nonlinearity::Reciprocal => "reciprocal",
            Nonlinearity::Exponential => "exponential",
            Nonlinearity::Advective => "advective",
        }
    }
}

impl fmt::Display for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Nonlinearity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Ok(match key.as_str() {
            "cubic" | "w3" => Nonlinearity::Cubic,
            "sine-gordon" | "sinegordon" | "sin" => Nonlinearity::SineGordon,
            "quadratic" | "w2" => Nonlinearity::Quadratic,
            "reciprocal" | "inverse" => Nonlinearity::Reciprocal,
            "exponential" | "exp" => Nonlinearity::Exponential,
            "advective" | "w-dw" => Nonlinearity::Advective,
            _ => return Err(Error::Config(format!("unknown nonlinearity '{s}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelForm {
    ClosedForm,
    Numeric,
}

/// A Green's function selection.
///
/// For [`KernelForm::Numeric`], `s1` is the initial slope `G′(0⁺)` (for the
/// reciprocal nonlinearity: the amplitude, see [`KernelSpec::homogeneous`]).
/// For [`KernelForm::ClosedForm`], `(c1, c2)` determine the kernel and `s1`
/// records the slope they imply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub nonlinearity: Nonlinearity,
    pub s1: f64,
    pub c1: f64,
    pub c2: f64,
    pub form: KernelForm,
}

impl KernelSpec {
    /// Closed form with explicit integration constants. Cubic and sine-Gordon ignore them.
    pub fn closed_form(nonlinearity: Nonlinearity, c1: f64, c2: f64) -> Self {
        let mut spec = Self {
            nonlinearity,
            s1: f64::NAN,
            c1,
            c2,
            form: KernelForm::ClosedForm,
        };
        spec.s1 = match nonlinearity {
            Nonlinearity::Reciprocal => c1,
            _ => closed_jet(&spec, 0.0).map(|j| j.slope).unwrap_or(f64::NAN),
        };
        spec
    }

    pub fn numeric(nonlinearity: Nonlinearity, s1: f64) -> Self {
        Self {
            nonlinearity,
            s1,
            c1: 0.0,
            c2: 0.0,
            form: KernelForm::Numeric,
        }
    }

    /// Closed form whose constants enforce `G(0⁺) = 0` and `G′(0⁺) = s1`.
    ///
    /// * Cubic and sine-Gordon have no free constants: only s1 = 1 and s1 = √2.
    /// * Quadratic: g3 = c2 = −s1², c1 the zero of ℘ where −℘′ = s1.
    /// * Reciprocal: the slope at the origin is infinite for every member, so
    ///   s1 is the amplitude c1 (the maximum of G) and c2 = −|c1|·√(π/2).
    /// * Exponential: c1 = 2 + s1², c2 solves (c1/2)·sech²(√c1·c2/2) = 1 with sign(c2) = −sign(s1).
    /// * Advective: c1 = √(2·s1), c2 = 0; s1 < 0 leaves the tanh family.
    pub fn homogeneous(nonlinearity: Nonlinearity, s1: f64) -> Result<Self> {
        if !s1.is_finite() {
            return Err(Error::Domain(format!("s1 must be finite, got {s1}")));
        }
        let (c1, c2) = match nonlinearity {
            Nonlinearity::Cubic | Nonlinearity::SineGordon => {
                let natural = natural_slope(nonlinearity).unwrap_or(1.0);
                if (s1 - natural).abs() > 1e-12 * natural {
                    return Err(Error::Domain(format!(
                        "the {nonlinearity} closed form has initial slope {natural}; use the numeric form for s1 = {s1}"
                    )));
                }
                (0.0, 0.0)
            }
            Nonlinearity::Quadratic => {
                if s1 == 0.0 {
                    return Err(Error::Domain("the quadratic closed form degenerates at s1 = 0".into()));
                }
                let g3 = -s1 * s1;
                let wp = Weierstrass::new(WeierstrassInvariants::new(0.0, g3)?)?;
                let z0 = decreasing_zero(&wp)?;
                let c1 = if s1 > 0.0 { z0 } else { wp.real_period() - z0 };
                (c1, g3)
            }
            Nonlinearity::Reciprocal => {
                if s1 == 0.0 {
                    return Err(Error::Domain("the reciprocal kernel needs a nonzero amplitude".into()));
                }
                (s1, -s1.abs() * (0.5 * PI).sqrt())
            }
            Nonlinearity::Exponential => {
                let c1 = 2.0 + s1 * s1;
                (c1, exponential_c2(c1, s1)?)
            }
            Nonlinearity::Advective => {
                if s1 < 0.0 {
                    return Err(Error::Domain(format!(
                        "advective kernel with negative slope {s1} has no tanh closed form"
                    )));
                }
                ((2.0 * s1).sqrt(), 0.0)
            }
        };
        Ok(Self {
            nonlinearity,
            s1,
            c1,
            c2,
            form: KernelForm::ClosedForm,
        })
    }

    /// The closed form with the constants used throughout: slope 1 for cubic
    /// and quadratic, √2 for sine-Gordon, unit amplitude for reciprocal,
    /// (c1, c2) = (2, 0) for exponential and (1, 0) for advective.
    pub fn standard(nonlinearity: Nonlinearity) -> Self {
        let s1 = match nonlinearity {
            Nonlinearity::SineGordon => SQRT_2,
            Nonlinearity::Exponential => 0.0,
            Nonlinearity::Advective => 0.5,
            _ => 1.0,
        };
        Self::homogeneous(nonlinearity, s1).expect("standard constants are valid")
    }
}

/// Slope fixed by the constant-free closed forms.
pub fn natural_slope(nonlinearity: Nonlinearity) -> Option<f64> {
    match nonlinearity {
        Nonlinearity::Cubic => Some(1.0),
        Nonlinearity::SineGordon => Some(SQRT_2),
        _ => None,
    }
}

/// Value, first and second derivative of a kernel at one lag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelJet {
    pub value: f64,
    pub slope: f64,
    pub curvature: f64,
}

/// G(delta_t) for a closed-form spec; zero for delta_t ≤ 0.
pub fn eval_kernel(spec: &KernelSpec, delta_t: f64) -> Result<f64> {
    if !delta_t.is_finite() {
        return Err(Error::Domain(format!("lag must be finite, got {delta_t}")));
    }
    if delta_t <= 0.0 {
        return Ok(0.0);
    }
    closed_jet(spec, delta_t).map(|j| j.value)
}

/// Analytic (G, G′, G″) at `delta_t > 0`.
pub fn kernel_jet(spec: &KernelSpec, delta_t: f64) -> Result<KernelJet> {
    if !(delta_t > 0.0) {
        return Ok(KernelJet {
            value: 0.0,
            slope: 0.0,
            curvature: 0.0,
        });
    }
    closed_jet(spec, delta_t)
}

/// Limits G(0⁺) and G′(0⁺) of the closed-form expression.
pub fn boundary_values(spec: &KernelSpec) -> Result<(f64, f64)> {
    if spec.nonlinearity == Nonlinearity::Reciprocal {
        let q = reciprocal_q(spec.c1, spec.c2, 0.0);
        if q <= 1e-15 {
            return Ok((0.0, f64::INFINITY.copysign(spec.c1)));
        }
    }
    closed_jet(spec, 0.0).map(|j| (j.value, j.slope))
}

/// The scale c in the quadratic kernel −(1/c)·℘(c·t + c1; 0, c2).
///
/// Selected from the real cube roots ±6^(−1/3) by the residual of
/// G″ + G² = 0 on a reference kernel. Only c³ = 1/6 passes.
pub fn quadratic_scale() -> f64 {
    static SCALE: OnceLock<f64> = OnceLock::new();
    *SCALE.get_or_init(|| {
        let root = (1.0_f64 / 6.0).cbrt();
        let wp = Weierstrass::new(WeierstrassInvariants { g2: 0.0, g3: -1.0 }).expect("finite invariants");
        let anchor = wp.half_period();
        let residual = |c: f64| -> f64 {
            (1..=100)
                .map(|i| {
                    let t = 0.002 * i as f64;
                    let g = |s: f64| -wp.p(c * s + anchor).unwrap_or(f64::NAN) / c;
                    let h = 1e-3;
                    let d2 = (g(t + h) - 2.0 * g(t) + g(t - h)) / (h * h);
                    (d2 + g(t) * g(t)).abs()
                })
                .fold(0.0, f64::max)
        };
        let candidates = [-root, root];
        candidates
            .into_iter()
            .min_by(|a, b| residual(*a).total_cmp(&residual(*b)))
            .unwrap_or(root)
    })
}

fn closed_jet(spec: &KernelSpec, t: f64) -> Result<KernelJet> {
    if spec.form != KernelForm::ClosedForm {
        return Err(Error::InvalidInput(
            "numeric kernels are tabulated with numeric_kernel, not evaluated pointwise".into(),
        ));
    }
    let (c1, c2) = (spec.c1, spec.c2);
    Ok(match spec.nonlinearity {
        Nonlinearity::Cubic => {
            // 2^{1/4}·sn(t/2^{1/4} | −1)
            let a = 2f64.powf(0.25);
            let m = -1.0;
            let j = jacobi(t / a, m)?;
            KernelJet {
                value: a * j.sn,
                slope: j.cn * j.dn,
                curvature: (-j.sn * j.dn * j.dn - m * j.sn * j.cn * j.cn) / a,
            }
        }
        Nonlinearity::SineGordon => {
            // 2·am(t/√2 | 2)
            let m = 2.0;
            let j = jacobi(t / SQRT_2, m)?;
            KernelJet {
                value: 2.0 * j.am,
                slope: SQRT_2 * j.dn,
                curvature: -m * j.sn * j.cn,
            }
        }
        Nonlinearity::Quadratic => {
            let c = quadratic_scale();
            let wp = Weierstrass::new(WeierstrassInvariants::new(0.0, c2)?)?;
            let z = c * t + c1;
            KernelJet {
                value: -wp.p(z)? / c,
                slope: -wp.p_prime(z)?,
                curvature: -c * wp.p_second(z)?,
            }
        }
        Nonlinearity::Reciprocal => reciprocal_jet(c1, c2, t)?,
        Nonlinearity::Exponential => {
            if !(c1 > 0.0) {
                return Err(Error::Domain(format!("exponential kernel needs c1 > 0, got {c1}")));
            }
            let root = c1.sqrt();
            let theta = 0.5 * root * (t + c2);
            let tanh = theta.tanh();
            let sech2 = 1.0 - tanh * tanh;
            KernelJet {
                value: (0.5 * c1).ln() - 2.0 * ln_cosh(theta),
                slope: -root * tanh,
                curvature: -0.5 * c1 * sech2,
            }
        }
        Nonlinearity::Advective => {
            let theta = 0.5 * c1 * (t + c2);
            let tanh = theta.tanh();
            let sech2 = 1.0 - tanh * tanh;
            KernelJet {
                value: c1 * tanh,
                slope: 0.5 * c1 * c1 * sech2,
                curvature: -0.5 * c1.powi(3) * sech2 * tanh,
            }
        }
    })
}

/// 1 − √(2/π)·|t + c2|/|c1|, the distance of the erf⁻¹ argument from −1.
fn reciprocal_q(c1: f64, c2: f64, t: f64) -> f64 {
    1.0 - (2.0 / PI).sqrt() * (t + c2).abs() / c1.abs()
}

fn reciprocal_jet(c1: f64, c2: f64, t: f64) -> Result<KernelJet> {
    if c1 == 0.0 || !c1.is_finite() {
        return Err(Error::Domain(format!("reciprocal kernel needs a finite nonzero c1, got {c1}")));
    }
    let q = reciprocal_q(c1, c2, t);
    if !(q > 0.0) {
        return Err(Error::Domain(format!(
            "reciprocal kernel: erf⁻¹ argument left (−1, 1) at t = {t} (c1 = {c1}, c2 = {c2})"
        )));
    }
    // φ = erf⁻¹(−κ|t + c2|) = −erfc⁻¹(q), κ = √(2/π)/|c1|
    let phi = -erfc_inv(q)?;
    let kappa = (2.0 / PI).sqrt() / c1.abs();
    let side = if t + c2 >= 0.0 { 1.0 } else { -1.0 };
    let sqrt_pi = 2.0 / FRAC_2_SQRT_PI;
    let e = (phi * phi).exp();
    Ok(KernelJet {
        value: c1 * (-phi * phi).exp(),
        slope: c1 * sqrt_pi * kappa * side * phi,
        curvature: -c1 * 0.5 * PI * kappa * kappa * e,
    })
}

/// ln cosh x without overflow.
fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    if a < 1.0 {
        a.cosh().ln()
    } else {
        a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
    }
}

/// c2 with (c1/2)·sech²(√c1·c2/2) = 1, by bisection to machine precision.
fn exponential_c2(c1: f64, s1: f64) -> Result<f64> {
    if s1 == 0.0 {
        return Ok(0.0);
    }
    let root = c1.sqrt();
    let defect = |c2: f64| 0.5 * c1 / (0.5 * root * c2).cosh().powi(2) - 1.0;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while defect(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NonConvergence {
                what: "exponential kernel constant bracket",
                iterations: 20,
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if defect(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(-0.5 * (lo + hi) * s1.signum())
}

/// Zero of ℘ on (0, ω), where ℘ decreases from +∞ to its real minimum.
fn decreasing_zero(wp: &Weierstrass) -> Result<f64> {
    let omega = wp.half_period();
    let (mut lo, mut hi) = (1e-3 * omega, omega);
    if !(wp.p(lo)? > 0.0 && wp.p(hi)? < 0.0) {
        return Err(Error::Domain("℘ has no real zero for these invariants".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if wp.p(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn grid_values(spec: &KernelSpec, grid: &TimeGrid) -> Result<Vec<f64>> {
    grid.times().map(|t| eval_kernel(spec, t)).collect()
}

/// Max over interior grid points of |G″ + N(G, G′)| with second-order central differences.
pub fn kernel_residual(spec: &KernelSpec, grid: &TimeGrid) -> Result<f64> {
    if !(grid.t0 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "kernel residual grid must start after the lag origin, got t0 = {}",
            grid.t0
        )));
    }
    let g = grid_values(spec, grid)?;
    let h = grid.dt;
    Ok(g.windows(3)
        .map(|w| {
            let d2 = (w[2] - 2.0 * w[1] + w[0]) / (h * h);
            let d1 = (w[2] - w[0]) / (2.0 * h);
            (d2 + spec.nonlinearity.evaluate(w[1], d1)).abs()
        })
        .fold(0.0, f64::max))
}

/// Central-difference residual at fixed points with spacing `h`.
pub fn kernel_residual_at(spec: &KernelSpec, points: &[f64], h: f64) -> Result<f64> {
    let mut worst = 0.0_f64;
    for &t in points {
        if !(t - h > 0.0) {
            return Err(Error::InvalidInput(format!("stencil at t = {t} reaches the lag origin")));
        }
        let (a, b, c) = (eval_kernel(spec, t - h)?, eval_kernel(spec, t)?, eval_kernel(spec, t + h)?);
        let d2 = (c - 2.0 * b + a) / (h * h);
        let d1 = (c - a) / (2.0 * h);
        worst = worst.max((d2 + spec.nonlinearity.evaluate(b, d1)).abs());
    }
    Ok(worst)
}

/// Max over grid points of |G″ + N(G, G′)| using the analytic jet.
pub fn kernel_residual_analytic(spec: &KernelSpec, grid: &TimeGrid) -> Result<f64> {
    let mut worst = 0.0_f64;
    for t in grid.times() {
        let j = kernel_jet(spec, t)?;
        worst = worst.max((j.curvature + spec.nonlinearity.evaluate(j.value, j.slope)).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericKernelOptions {
    pub tolerance: f64,
    pub blowup_bound: f64,
    /// Start offset ε for the reciprocal nonlinearity, whose kernel is singular at t = 0.
    pub regularization: Option<f64>,
}

impl Default for NumericKernelOptions {
    fn default() -> Self {
        Self {
            tolerance: oracle::DEFAULT_TOLERANCE,
            blowup_bound: oracle::DEFAULT_BLOWUP_BOUND,
            regularization: Some(1e-6),
        }
    }
}

/// Integrates G″ + N(G, G′) = 0 from G(0⁺) = 0, G′(0⁺) = s1 on a grid starting at 0.
///
/// For the reciprocal nonlinearity `s1` is the amplitude; the integration
/// starts at t = ε from the matching closed-form data.
pub fn numeric_kernel(nonlinearity: Nonlinearity, s1: f64, grid: &TimeGrid, options: &NumericKernelOptions) -> Result<Trajectory> {
    grid.require_origin("numeric_kernel")?;
    if nonlinearity != Nonlinearity::Reciprocal {
        let problem = IvpProblem::new(nonlinearity, SourceFunction::zero())
            .with_initial(0.0, s1)
            .with_tolerance(options.tolerance)
            .with_blowup_bound(options.blowup_bound);
        return oracle::reference_solve(&problem, grid);
    }

    let epsilon = options.regularization.ok_or_else(|| Error::Singularity {
        t: 0.0,
        reason: "the reciprocal kernel starts at w = 0; a regularization offset is required".into(),
    })?;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("regularization offset must be positive, got {epsilon}")));
    }
    let spec = KernelSpec::homogeneous(nonlinearity, s1)?;
    let start = kernel_jet(&spec, epsilon)?;
    let problem = IvpProblem::new(nonlinearity, SourceFunction::zero())
        .with_initial(start.value, start.slope)
        .with_tolerance(options.tolerance)
        .with_blowup_bound(options.blowup_bound);
    let later: Vec<f64> = grid.times().filter(|&t| t > epsilon).collect();
    let integrated = oracle::integrate_from(&problem, epsilon, &later)?;
    let early = grid.times().take_while(|&t| t <= epsilon).map(|t| eval_kernel(&spec, t));
    let values = early.chain(integrated.into_iter().map(Ok)).collect::<Result<Vec<_>>>()?;
    Trajectory::new(*grid, values)
}

/// Kernel samples G(k·dt), k = 0..n, on the lags of a grid starting at 0.
pub fn tabulate(spec: &KernelSpec, grid: &TimeGrid, options: &NumericKernelOptions) -> Result<Vec<f64>> {
    match spec.form {
        KernelForm::ClosedForm => (0..grid.n).map(|k| eval_kernel(spec, k as f64 * grid.dt)).collect(),
        KernelForm::Numeric => {
            let lags = TimeGrid::new(0.0, grid.dt, grid.n)?;
            Ok(numeric_kernel(spec.nonlinearity, spec.s1, &lags, options)?.values)
        }
    }
}
