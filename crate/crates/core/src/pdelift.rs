//! Generalized separation of variables for `w_tt − α·e^{λx}·w_xx + N(w) = f`
//! through the auxiliary variable
//!
//! ```text
//! χ² = a1·[exp(−λx)/(αλ²) − (t + a2)²/4],
//! ```
//!
//! which turns the PDE into `w″(χ) + (4/a1)·N(w) = 0`. With
//! (α, λ, a1, a2) = (1, 2, 4, 0) the reduced equation is the exponential
//! oscillator itself and χ² = e^{−2x} − t².
//!
//! The lifted kernel is `G̃(x, t) = G(χ(x, t))`, zero where χ² < 0. The
//! double convolution uses the translation form `G̃(x − ξ, t − τ)` as written,
//! even though χ is not translation invariant.

use crate::error::{Error, Result};
use crate::kernels::{eval_kernel, KernelSpec};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeConfig {
    pub alpha: f64,
    pub lambda: f64,
    pub a1: f64,
    pub a2: f64,
}

impl PdeConfig {
    pub fn new(alpha: f64, lambda: f64, a1: f64, a2: f64) -> Result<Self> {
        let all_finite = [alpha, lambda, a1, a2].iter().all(|v| v.is_finite());
        if !all_finite || alpha == 0.0 || lambda == 0.0 || a1 == 0.0 {
            return Err(Error::InvalidInput(format!(
                "need finite α, λ, a1 ≠ 0 and finite a2, got ({alpha}, {lambda}, {a1}, {a2})"
            )));
        }
        Ok(Self { alpha, lambda, a1, a2 })
    }

    /// (α, λ, a1, a2) = (1, 2, 4, 0).
    pub const fn wave_exp() -> Self {
        Self {
            alpha: 1.0,
            lambda: 2.0,
            a1: 4.0,
            a2: 0.0,
        }
    }
}

impl Default for PdeConfig {
    fn default() -> Self {
        Self::wave_exp()
    }
}

/// χ² at (x, t); may be negative.
pub fn chi_squared(x: f64, t: f64, cfg: &PdeConfig) -> f64 {
    let s = t + cfg.a2;
    cfg.a1 * ((-cfg.lambda * x).exp() / (cfg.alpha * cfg.lambda * cfg.lambda) - s * s / 4.0)
}

/// The nonnegative root of χ², or `None` where χ² < 0.
pub fn chi(x: f64, t: f64, cfg: &PdeConfig) -> Option<f64> {
    let c2 = chi_squared(x, t, cfg);
    (c2 >= 0.0).then(|| c2.sqrt())
}

/// Factor multiplying N in the reduced equation.
pub fn reduced_ode_coefficient(cfg: &PdeConfig) -> Result<f64> {
    if cfg.a1 == 0.0 {
        return Err(Error::InvalidInput("a1 must be nonzero".into()));
    }
    Ok(4.0 / cfg.a1)
}

/// G(χ(x, t)), or 0 outside the region where χ is real.
pub fn lift_kernel(x: f64, t: f64, spec: &KernelSpec, cfg: &PdeConfig) -> Result<f64> {
    match chi(x, t, cfg) {
        Some(c) => eval_kernel(spec, c),
        None => Ok(0.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeGrid {
    pub x0: f64,
    pub dx: f64,
    pub nx: usize,
    pub t0: f64,
    pub dt: f64,
    pub nt: usize,
}

impl SpaceTimeGrid {
    pub fn new(x0: f64, dx: f64, nx: usize, t0: f64, dt: f64, nt: usize) -> Result<Self> {
        let ok = x0.is_finite() && t0.is_finite() && dx > 0.0 && dt > 0.0 && dx.is_finite() && dt.is_finite();
        if !ok || nx < 2 || nt < 2 {
            return Err(Error::InvalidInput(format!(
                "space-time grid needs dx, dt > 0 and at least 2 points per axis, got dx = {dx}, dt = {dt}, {nx}×{nt}"
            )));
        }
        Ok(Self { x0, dx, nx, t0, dt, nt })
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn t(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    pub fn x_end(&self) -> f64 {
        self.x(self.nx - 1)
    }

    pub fn t_end(&self) -> f64 {
        self.t(self.nt - 1)
    }
}

/// Values on a [`SpaceTimeGrid`], stored x-major: `values[i·nt + j]` at `(x_i, t_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub grid: SpaceTimeGrid,
    pub values: Vec<f64>,
    /// `true` where χ is not real; those values are 0.
    pub mask: Vec<bool>,
    /// The source has non-negligible magnitude at the edge of the integration window.
    pub truncation_warning: bool,
}

impl Field2D {
    pub fn new(grid: SpaceTimeGrid, values: Vec<f64>, mask: Vec<bool>) -> Result<Self> {
        let n = grid.nx * grid.nt;
        if values.len() != n || mask.len() != n {
            return Err(Error::GridMismatch(format!(
                "{} values and {} mask entries for a {}×{} grid",
                values.len(),
                mask.len(),
                grid.nx,
                grid.nt
            )));
        }
        for (v, m) in values.iter().zip(&mask) {
            if (*m && *v != 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput("masked values must be 0 and the rest finite".into()));
            }
        }
        Ok(Self {
            grid,
            values,
            mask,
            truncation_warning: false,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.nt + j]
    }

    pub fn is_masked(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.grid.nt + j]
    }
}

/// Default spatial margin on each side of the output window, as a fraction of its width.
pub const DEFAULT_MARGIN: f64 = 0.25;

/// Fraction of max |f| at the window edge above which truncation is flagged.
const EDGE_MASS_THRESHOLD: f64 = 1e-3;

/// `s2·∬ G̃(x − ξ, t − τ) f(ξ, τ) dξ dτ` on every unmasked node, by the 2-D
/// composite trapezoid rule: τ over [0, t], ξ over the output window widened
/// by `margin`·width on each side (same spacing).
pub fn pde_solve(
    f: &(dyn Fn(f64, f64) -> f64 + Sync),
    spec: &KernelSpec,
    cfg: &PdeConfig,
    s2: f64,
    grid: &SpaceTimeGrid,
    margin: f64,
) -> Result<Field2D> {
    if grid.t0 != 0.0 {
        return Err(Error::InvalidInput(format!("pde_solve requires t0 = 0, got {}", grid.t0)));
    }
    if !(margin >= 0.0) || !margin.is_finite() || !s2.is_finite() {
        return Err(Error::InvalidInput(format!("need margin ≥ 0 and finite s2, got {margin}, {s2}")));
    }
    let (nx, nt) = (grid.nx, grid.nt);
    let pad = (margin * (nx - 1) as f64).round() as usize;
    let nxi = nx + 2 * pad;
    let xi = |k: usize| grid.x0 + (k as f64 - pad as f64) * grid.dx;

    let source: Vec<f64> = (0..nxi * nt).map(|q| f(xi(q / nt), grid.t(q % nt))).collect();
    if let Some(q) = source.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "source is not finite at (ξ, τ) = ({}, {})",
            xi(q / nt),
            grid.t(q % nt)
        )));
    }
    let peak = source.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let edge = (0..nt)
        .flat_map(|l| [source[l], source[(nxi - 1) * nt + l]])
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    let truncation_warning = peak > 0.0 && edge > EDGE_MASS_THRESHOLD * peak;

    // Lifted kernel on every (spatial offset, time lag) pair: offset index
    // o = i − k + (nxi − 1) ranges over 0..nx + nxi − 1.
    let n_off = nx + nxi - 1;
    let lifted: Vec<f64> = par::map_indices(n_off * nt, |q| {
        let offset = (q / nt) as f64 - (nxi - 1) as f64 + pad as f64;
        lift_kernel(offset * grid.dx, (q % nt) as f64 * grid.dt, spec, cfg)
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let mask: Vec<bool> = (0..nx * nt).map(|q| chi(grid.x(q / nt), grid.t(q % nt), cfg).is_none()).collect();
    let cell = grid.dx * grid.dt;
    let values = par::map_indices(nx * nt, |q| {
        let (i, j) = (q / nt, q % nt);
        if mask[q] || j == 0 {
            return 0.0;
        }
        let mut total = 0.0;
        for l in 0..=j {
            let wt = if l == 0 || l == j { 0.5 } else { 1.0 };
            let lag = j - l;
            let mut row = 0.0;
            for k in 0..nxi {
                let wx = if k == 0 || k == nxi - 1 { 0.5 } else { 1.0 };
                let o = i + nxi - 1 - k;
                row += wx * lifted[o * nt + lag] * source[k * nt + l];
            }
            total += wt * row;
        }
        s2 * cell * total
    });

    let mut field = Field2D::new(*grid, values, mask)?;
    field.truncation_warning = truncation_warning;
    Ok(field)
}

/// Max spread of [`lift_kernel`] over `samples` points on the level set
/// χ(x, t) = χ0 inside `grid`. Exact separation gives rounding-level spread.
pub fn levelset_consistency(
    spec: &KernelSpec,
    cfg: &PdeConfig,
    chi0: f64,
    samples: usize,
    grid: &SpaceTimeGrid,
) -> Result<f64> {
    if samples < 2 || !(chi0 >= 0.0) {
        return Err(Error::InvalidInput(format!("need samples ≥ 2 and χ0 ≥ 0, got {samples}, {chi0}")));
    }
    let points = levelset_points(cfg, chi0, grid);
    if points.len() < samples {
        return Err(Error::NoValidPoints(format!(
            "only {} points with χ = {chi0} inside the grid, {samples} requested",
            points.len()
        )));
    }
    let picks = (0..samples).map(|s| points[s * (points.len() - 1) / (samples - 1)]);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (x, t) in picks {
        let g = lift_kernel(x, t, spec, cfg)?;
        lo = lo.min(g);
        hi = hi.max(g);
    }
    Ok(hi - lo)
}

/// Points (x(t), t) on the level set for finely spaced t in the grid's time
/// range, keeping those whose x falls inside the grid.
pub fn levelset_points(cfg: &PdeConfig, chi0: f64, grid: &SpaceTimeGrid) -> Vec<(f64, f64)> {
    const CANDIDATES: usize = 1000;
    let (t_lo, t_hi) = (grid.t0, grid.t_end());
    (0..=CANDIDATES)
        .filter_map(|c| {
            let t = t_lo + (t_hi - t_lo) * c as f64 / CANDIDATES as f64;
            let s = t + cfg.a2;
            let arg = cfg.alpha * cfg.lambda * cfg.lambda * (chi0 * chi0 / cfg.a1 + s * s / 4.0);
            if !(arg > 0.0) {
                return None;
            }
            let x = -arg.ln() / cfg.lambda;
            (x >= grid.x0 && x <= grid.x_end()).then_some((x, t))
        })
        .collect()
}
