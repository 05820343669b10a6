use crate::error::{Error, Result};

/// Uniform time grid `t0 + i·dt`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub n: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, n: usize) -> Result<Self> {
        if !t0.is_finite() || !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidInput(format!("time grid needs finite t0 and dt > 0, got t0 = {t0}, dt = {dt}")));
        }
        if n < 2 {
            return Err(Error::InvalidInput(format!("time grid needs at least 2 points, got {n}")));
        }
        Ok(Self { t0, dt, n })
    }

    /// Grid on `[0, horizon]` with step `dt`; the last point is `round(horizon/dt)·dt`.
    pub fn from_horizon(horizon: f64, dt: f64) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidInput(format!("horizon must be positive, got {horizon}")));
        }
        Self::new(0.0, dt, (horizon / dt).round() as usize + 1)
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.t(self.n - 1)
    }

    pub fn times(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.t(i))
    }

    /// Same span with the step divided by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            t0: self.t0,
            dt: self.dt / factor as f64,
            n: (self.n - 1) * factor + 1,
        }
    }

    pub(crate) fn require_origin(&self, what: &str) -> Result<()> {
        if self.t0 != 0.0 {
            return Err(Error::InvalidInput(format!("{what} requires a grid starting at t = 0, got t0 = {}", self.t0)));
        }
        Ok(())
    }
}

/// Real samples on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
}

impl Trajectory {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::GridMismatch(format!("{} values for a grid of {} points", values.len(), grid.n)));
        }
        if let Some(i) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::Domain(format!("NaN at t = {}", grid.t(i))));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.times().zip(self.values.iter().copied())
    }

    /// Every `factor`-th sample, i.e. the trajectory restricted to a grid `factor` times coarser.
    pub fn decimate(&self, factor: usize) -> Self {
        let values: Vec<f64> = self.values.iter().step_by(factor).copied().collect();
        Self {
            grid: TimeGrid {
                t0: self.grid.t0,
                dt: self.grid.dt * factor as f64,
                n: values.len(),
            },
            values,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horizon_grid_endpoints() {
        let g = TimeGrid::from_horizon(1.0, 1e-3).unwrap();
        assert_eq!(g.n, 1001);
        assert!((g.t_end() - 1.0).abs() < 1e-12);
        assert_eq!(g.refined(2).n, 2001);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(TimeGrid::new(0.0, 0.0, 10).is_err());
        assert!(TimeGrid::new(0.0, 0.1, 1).is_err());
        assert!(TimeGrid::new(f64::NAN, 0.1, 5).is_err());
    }

    #[test]
    fn trajectory_invariants() {
        let g = TimeGrid::new(0.0, 0.5, 3).unwrap();
        assert!(Trajectory::new(g, vec![0.0; 2]).is_err());
        assert!(Trajectory::new(g, vec![0.0, f64::NAN, 1.0]).is_err());
        let t = Trajectory::new(g, vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(t.decimate(2).values, vec![0.0, 2.0]);
    }
}
