//! Reference integrators for `w″ + N(w, w′) = f(t)`.
//!
//! The primary path is an adaptive Dormand–Prince 5(4) pair whose steps are
//! clipped so that every sample time and delta location is hit exactly. A
//! classical fixed-step RK4 serves as an independent cross-check.

use crate::error::{Error, Result};
use crate::frasca::{OrderEstimate, SourceFunction};
use crate::grid::{TimeGrid, Trajectory};
use crate::kernels::Nonlinearity;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_BLOWUP_BOUND: f64 = 1e6;

const MAX_STEPS: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvpProblem {
    pub nonlinearity: Nonlinearity,
    pub source: SourceFunction,
    pub w0: f64,
    pub v0: f64,
    pub tolerance: f64,
    pub blowup_bound: f64,
}

impl IvpProblem {
    pub fn new(nonlinearity: Nonlinearity, source: SourceFunction) -> Self {
        Self {
            nonlinearity,
            source,
            w0: 0.0,
            v0: 0.0,
            tolerance: DEFAULT_TOLERANCE,
            blowup_bound: DEFAULT_BLOWUP_BOUND,
        }
    }

    pub fn with_initial(mut self, w0: f64, v0: f64) -> Self {
        self.w0 = w0;
        self.v0 = v0;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_blowup_bound(mut self, bound: f64) -> Self {
        self.blowup_bound = bound;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || !self.tolerance.is_finite() {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if !(self.blowup_bound > 0.0) {
            return Err(Error::InvalidInput(format!("blow-up bound must be positive, got {}", self.blowup_bound)));
        }
        if !self.w0.is_finite() || !self.v0.is_finite() {
            return Err(Error::InvalidInput("initial data must be finite".into()));
        }
        Ok(())
    }

    /// (location, amplitude) of the slope jump, if the source is a delta.
    fn jump(&self) -> Option<(f64, f64)> {
        match self.source {
            SourceFunction::Delta { amplitude, location } => Some((location, amplitude)),
            _ => None,
        }
    }

    fn rhs(&self, t: f64, [w, v]: [f64; 2]) -> Result<[f64; 2]> {
        let a = self.source.smooth_part(t)? - self.nonlinearity.evaluate(w, v);
        if !a.is_finite() {
            return Err(Error::Singularity {
                t,
                reason: format!("{} nonlinearity is not finite at w = {w:e}", self.nonlinearity),
            });
        }
        Ok([v, a])
    }

    fn check_state(&self, t: f64, y: [f64; 2]) -> Result<()> {
        if !y[0].is_finite() || !y[1].is_finite() {
            return Err(Error::Singularity {
                t,
                reason: "state became non-finite".into(),
            });
        }
        if y[0].abs() > self.blowup_bound {
            return Err(Error::BlowUp {
                t,
                value: y[0].abs(),
                bound: self.blowup_bound,
            });
        }
        if self.nonlinearity == Nonlinearity::Reciprocal && y[0] == 0.0 {
            return Err(Error::Singularity {
                t,
                reason: "reciprocal nonlinearity reached w = 0".into(),
            });
        }
        Ok(())
    }
}

/// Adaptive solution sampled on every point of a grid starting at t = 0.
pub fn reference_solve(p: &IvpProblem, grid: &TimeGrid) -> Result<Trajectory> {
    grid.require_origin("reference_solve")?;
    let later: Vec<f64> = grid.times().skip(1).collect();
    let mut values = Vec::with_capacity(grid.n);
    values.push(p.w0);
    values.extend(integrate_from(p, 0.0, &later)?);
    Trajectory::new(*grid, values)
}

/// Integrates from `(t_start, w0, v0)` and returns w at each of `samples`,
/// which must be increasing and greater than `t_start`.
pub(crate) fn integrate_from(p: &IvpProblem, t_start: f64, samples: &[f64]) -> Result<Vec<f64>> {
    p.validate()?;
    if samples.windows(2).any(|w| !(w[1] > w[0])) || samples.first().is_some_and(|&s| !(s > t_start)) {
        return Err(Error::InvalidInput("sample times must increase past the start".into()));
    }
    let mut y = [p.w0, p.v0];
    let mut pending_jump = None;
    if let Some((loc, amplitude)) = p.jump() {
        if loc == t_start {
            y[1] += amplitude;
        } else if loc > t_start {
            pending_jump = Some((loc, amplitude));
        }
    }
    p.check_state(t_start, y)?;

    let mut out = Vec::with_capacity(samples.len());
    let mut stepper = Dopri5::new(p, t_start, y)?;
    for &target in samples {
        if let Some((loc, amplitude)) = pending_jump {
            if loc <= target {
                stepper.advance_to(loc)?;
                stepper.kick(amplitude)?;
                pending_jump = None;
            }
        }
        stepper.advance_to(target)?;
        out.push(stepper.y[0]);
    }
    Ok(out)
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Dopri5<'a> {
    p: &'a IvpProblem,
    t: f64,
    y: [f64; 2],
    /// Step the controller would like to take next, independent of clipping.
    h: f64,
    steps: usize,
}

impl<'a> Dopri5<'a> {
    fn new(p: &'a IvpProblem, t: f64, y: [f64; 2]) -> Result<Self> {
        p.rhs(t, y)?;
        // The controller adapts from here; rejected first steps are cheap.
        let h = 1e-3;
        Ok(Self { p, t, y, h, steps: 0 })
    }

    fn kick(&mut self, amplitude: f64) -> Result<()> {
        self.y[1] += amplitude;
        self.p.check_state(self.t, self.y)
    }

    fn advance_to(&mut self, target: f64) -> Result<()> {
        while self.t < target {
            let remaining = target - self.t;
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            let (y_new, err) = self.trial(h)?;
            if err <= 1.0 {
                self.t = if last { target } else { self.t + h };
                self.y = y_new;
                self.p.check_state(self.t, self.y)?;
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // A clipped step says nothing about how large the next one may be.
                self.h = if last { self.h.max(h * grow) } else { h * grow };
            } else {
                self.h = h * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            }
            if self.h < 1e-14 * self.t.abs().max(1.0) {
                return Err(Error::StepUnderflow { t: self.t, h: self.h });
            }
            self.steps += 1;
            if self.steps > MAX_STEPS {
                return Err(Error::NonConvergence {
                    what: "adaptive integrator",
                    iterations: MAX_STEPS,
                });
            }
        }
        Ok(())
    }

    /// One trial step; returns the 5th-order solution and the scaled error norm.
    fn trial(&self, h: f64) -> Result<([f64; 2], f64)> {
        let mut k = [[0.0; 2]; 7];
        for s in 0..7 {
            let mut ys = self.y;
            for (j, kj) in k.iter().enumerate().take(s) {
                ys[0] += h * A[s][j] * kj[0];
                ys[1] += h * A[s][j] * kj[1];
            }
            k[s] = match self.p.rhs(self.t + C[s] * h, ys) {
                Ok(f) => f,
                // A stage that lands on a singularity just means the step is too long.
                Err(Error::Singularity { .. }) => return Ok((self.y, f64::INFINITY)),
                Err(e) => return Err(e),
            };
        }
        let mut y5 = self.y;
        let mut err = 0.0_f64;
        for i in 0..2 {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            y5[i] += h * d5;
            let scale = self.p.tolerance * (1.0 + self.y[i].abs().max(y5[i].abs()));
            err = err.max((h * (d5 - d4)).abs() / scale);
        }
        if !y5[0].is_finite() || !y5[1].is_finite() {
            return Ok((self.y, f64::INFINITY));
        }
        Ok((y5, err))
    }
}

/// Classical RK4 with `substeps` equal steps per grid interval.
///
/// A delta source must sit on a step boundary.
pub fn fixed_step_solve(p: &IvpProblem, grid: &TimeGrid, substeps: usize) -> Result<Trajectory> {
    grid.require_origin("fixed_step_solve")?;
    p.validate()?;
    if substeps == 0 {
        return Err(Error::InvalidInput("substeps must be at least 1".into()));
    }
    let h = grid.dt / substeps as f64;
    let total = (grid.n - 1) * substeps;
    let jump_step = match p.jump() {
        Some((loc, amplitude)) if loc >= 0.0 => {
            let k = loc / h;
            if (k - k.round()).abs() > 1e-9 {
                return Err(Error::InvalidInput(format!("delta at {loc} is not on a step boundary")));
            }
            Some((k.round() as usize, amplitude))
        }
        _ => None,
    };

    let mut y = [p.w0, p.v0];
    let mut values = Vec::with_capacity(grid.n);
    values.push(y[0]);
    for step in 0..total {
        if let Some((k, amplitude)) = jump_step {
            if k == step {
                y[1] += amplitude;
            }
        }
        let t = step as f64 * h;
        let k1 = p.rhs(t, y)?;
        let k2 = p.rhs(t + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]])?;
        let k3 = p.rhs(t + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]])?;
        let k4 = p.rhs(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]])?;
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        p.check_state(t + h, y)?;
        if (step + 1) % substeps == 0 {
            values.push(y[0]);
        }
    }
    Trajectory::new(*grid, values)
}

/// Observed order of the RK4 fallback from runs with steps dt, dt/2, dt/4.
pub fn convergence_check(p: &IvpProblem, grid: &TimeGrid) -> Result<OrderEstimate> {
    let coarse = fixed_step_solve(p, grid, 1)?;
    let middle = fixed_step_solve(p, grid, 2)?;
    let fine = fixed_step_solve(p, grid, 4)?;
    let coarse_gap = coarse.max_abs_diff(&middle)?;
    let fine_gap = middle.max_abs_diff(&fine)?;
    let order = if coarse_gap == 0.0 && fine_gap == 0.0 {
        None
    } else {
        Some((coarse_gap / fine_gap).log2())
    };
    Ok(OrderEstimate {
        order,
        coarse_gap,
        fine_gap,
    })
}

/// E = ½(w′)² + V(w), for nonlinearities with a potential.
pub fn energy(nonlinearity: Nonlinearity, w: f64, v: f64) -> Option<f64> {
    nonlinearity.potential(w).map(|pot| 0.5 * v * v + pot)
}

/// Adaptive (w, w′) on a grid starting at 0; used by the energy checks.
pub fn reference_solve_with_slope(p: &IvpProblem, grid: &TimeGrid) -> Result<(Trajectory, Vec<f64>)> {
    grid.require_origin("reference_solve_with_slope")?;
    p.validate()?;
    let mut y = [p.w0, p.v0];
    let mut pending = None;
    if let Some((loc, amplitude)) = p.jump() {
        if loc == 0.0 {
            y[1] += amplitude;
        } else if loc > 0.0 {
            pending = Some((loc, amplitude));
        }
    }
    p.check_state(0.0, y)?;
    let mut stepper = Dopri5::new(p, 0.0, y)?;
    let mut w = vec![y[0]];
    let mut v = vec![y[1]];
    for t in grid.times().skip(1) {
        if let Some((loc, amplitude)) = pending {
            if loc <= t {
                stepper.advance_to(loc)?;
                stepper.kick(amplitude)?;
                pending = None;
            }
        }
        stepper.advance_to(t)?;
        w.push(stepper.y[0]);
        v.push(stepper.y[1]);
    }
    Ok((Trajectory::new(*grid, w)?, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{numeric_kernel, KernelSpec, NumericKernelOptions};

    #[test]
    fn equilibrium_stays_zero() {
        let grid = TimeGrid::from_horizon(2.0, 1e-2).unwrap();
        for nl in [Nonlinearity::Cubic, Nonlinearity::Quadratic, Nonlinearity::SineGordon, Nonlinearity::Advective] {
            let w = reference_solve(&IvpProblem::new(nl, SourceFunction::zero()), &grid).unwrap();
            assert!(w.values.iter().all(|v| *v == 0.0), "{nl}");
            let order = convergence_check(&IvpProblem::new(nl, SourceFunction::zero()), &grid).unwrap();
            assert_eq!(order.order, None);
        }
    }

    #[test]
    fn delta_at_origin_matches_numeric_kernel() {
        let grid = TimeGrid::from_horizon(1.0, 1e-3).unwrap();
        let p = IvpProblem::new(Nonlinearity::Exponential, SourceFunction::delta());
        let w = reference_solve(&p, &grid).unwrap();
        let g = numeric_kernel(Nonlinearity::Exponential, 1.0, &grid, &NumericKernelOptions::default()).unwrap();
        assert!(w.max_abs_diff(&g).unwrap() <= 10.0 * DEFAULT_TOLERANCE);
    }

    #[test]
    fn adaptive_tracks_closed_form_kernel() {
        // exponential kernel with slope 1 against its closed form
        let grid = TimeGrid::from_horizon(2.0, 1e-2).unwrap();
        let spec = KernelSpec::homogeneous(Nonlinearity::Exponential, 1.0).unwrap();
        let p = IvpProblem::new(Nonlinearity::Exponential, SourceFunction::zero()).with_initial(0.0, 1.0);
        let w = reference_solve(&p, &grid).unwrap();
        for (t, v) in w.iter() {
            let g = crate::kernels::eval_kernel(&spec, t).unwrap();
            assert!((v - g).abs() < 1e-9, "t = {t}: {v} vs {g}");
        }
    }

    #[test]
    fn delta_jump_equivalence_is_bitwise() {
        let grid = TimeGrid::from_horizon(3.0, 1e-2).unwrap();
        for nl in [Nonlinearity::Exponential, Nonlinearity::Cubic] {
            let a = reference_solve(&IvpProblem::new(nl, SourceFunction::Delta { amplitude: 0.7, location: 0.0 }), &grid).unwrap();
            let b = reference_solve(&IvpProblem::new(nl, SourceFunction::zero()).with_initial(0.0, 0.7), &grid).unwrap();
            assert_eq!(a.values, b.values);
        }
    }

    #[test]
    fn interior_delta_is_a_slope_jump() {
        let grid = TimeGrid::from_horizon(1.0, 1e-2).unwrap();
        let p = IvpProblem::new(Nonlinearity::Cubic, SourceFunction::Delta { amplitude: 1.0, location: 0.5 });
        let w = reference_solve(&p, &grid).unwrap();
        assert!(w.values[..=50].iter().all(|v| *v == 0.0));
        // just past the kick the solution is ≈ (t − 0.5)
        assert!((w.values[51] - 0.01).abs() < 1e-6);
        let rk = fixed_step_solve(&p, &grid, 4).unwrap();
        assert!(w.max_abs_diff(&rk).unwrap() < 1e-9);
    }

    #[test]
    fn richardson_ratio_against_adaptive() {
        let grid = TimeGrid::from_horizon(1.0, 5e-2).unwrap();
        let p = IvpProblem::new(Nonlinearity::Exponential, SourceFunction::Sine);
        let exact = reference_solve(&p.with_tolerance(1e-13), &grid).unwrap();
        let coarse = fixed_step_solve(&p, &grid, 1).unwrap().max_abs_diff(&exact).unwrap();
        let fine = fixed_step_solve(&p, &grid, 2).unwrap().max_abs_diff(&exact).unwrap();
        let ratio = coarse / fine;
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn fallback_order_examples() {
        let grid = TimeGrid::from_horizon(1.0, 1e-2).unwrap();
        for (nl, f) in [
            (Nonlinearity::Exponential, SourceFunction::Sine),
            (Nonlinearity::SineGordon, SourceFunction::step()),
        ] {
            let order = convergence_check(&IvpProblem::new(nl, f), &grid).unwrap().order.unwrap();
            assert!((3.6..=4.4).contains(&order), "{nl}/{f}: {order}");
        }
    }

    #[test]
    fn conservative_energy_is_conserved() {
        let grid = TimeGrid::from_horizon(10.0, 1e-2).unwrap();
        for nl in [Nonlinearity::Cubic, Nonlinearity::SineGordon] {
            let p = IvpProblem::new(nl, SourceFunction::zero()).with_initial(0.0, 1.0);
            let (w, v) = reference_solve_with_slope(&p, &grid).unwrap();
            let e0 = energy(nl, 0.0, 1.0).unwrap();
            let drift = w
                .values
                .iter()
                .zip(&v)
                .map(|(&w, &v)| (energy(nl, w, v).unwrap() - e0).abs())
                .fold(0.0, f64::max);
            assert!(drift < 100.0 * DEFAULT_TOLERANCE, "{nl}: {drift:e}");
        }
    }

    #[test]
    fn failure_modes() {
        let grid = TimeGrid::from_horizon(1.0, 1e-2).unwrap();
        let p = IvpProblem::new(Nonlinearity::Reciprocal, SourceFunction::zero());
        assert!(matches!(reference_solve(&p, &grid), Err(Error::Singularity { .. })));
        // w″ = −w² from w′ = −10 runs off to −∞ in finite time
        let p = IvpProblem::new(Nonlinearity::Quadratic, SourceFunction::zero())
            .with_initial(0.0, -10.0)
            .with_blowup_bound(1e3);
        assert!(matches!(
            reference_solve(&p, &TimeGrid::from_horizon(5.0, 1e-2).unwrap()),
            Err(Error::BlowUp { .. })
        ));
        let shifted = TimeGrid::new(0.5, 1e-2, 10).unwrap();
        assert!(reference_solve(&IvpProblem::new(Nonlinearity::Cubic, SourceFunction::Sine), &shifted).is_err());
        assert!(reference_solve(&IvpProblem::new(Nonlinearity::Cubic, SourceFunction::Sine).with_tolerance(0.0), &grid).is_err());
    }
}
