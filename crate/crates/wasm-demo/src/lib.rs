//! Browser bindings for the demo page in `www/`.
//!
//! Three operations: a kernel curve, a calibration run against the reference
//! integrator, and the lifted kernel on a space-time grid.

use nlgreen::calibrate::{default_bracket, kernel_for, Calibration, CalibrationOptions};
use nlgreen::frasca::SourceFunction;
use nlgreen::kernels::{eval_kernel, KernelSpec, Nonlinearity};
use nlgreen::pdelift::{chi, PdeConfig};
use nlgreen::TimeGrid;
use wasm_bindgen::prelude::*;

fn js_err(e: nlgreen::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn spec_for(nonlinearity: &str, s1: Option<f64>) -> Result<KernelSpec, JsError> {
    let nl: Nonlinearity = nonlinearity.parse().map_err(js_err)?;
    match s1 {
        Some(s1) => KernelSpec::homogeneous(nl, s1)
            .or_else(|_| Ok(KernelSpec::numeric(nl, s1)))
            .map_err(js_err),
        None => Ok(KernelSpec::standard(nl)),
    }
}

/// G at `n` evenly spaced lags on [0, t_max]. A NaN `s1` selects the
/// catalog's standard constants.
#[wasm_bindgen]
pub fn kernel_curve(nonlinearity: &str, s1: f64, t_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    if n < 2 || !(t_max > 0.0) {
        return Err(JsError::new("need n ≥ 2 and t_max > 0"));
    }
    let spec = spec_for(nonlinearity, (!s1.is_nan()).then_some(s1))?;
    let grid = TimeGrid::new(0.0, t_max / (n - 1) as f64, n).map_err(js_err)?;
    match nlgreen::kernels::tabulate(&spec, &grid, &Default::default()) {
        Ok(g) => Ok(g),
        // closed forms with a finite interval of existence: NaN past its end
        Err(e) => {
            let g: Vec<f64> = grid.times().map(|t| eval_kernel(&spec, t).unwrap_or(f64::NAN)).collect();
            if g[0].is_nan() {
                Err(js_err(e))
            } else {
                Ok(g)
            }
        }
    }
}

/// Curves and summary of one calibration run.
#[wasm_bindgen]
pub struct CalibrationRun {
    app: Vec<f64>,
    exact: Vec<f64>,
    er: Vec<f64>,
    s2: f64,
    min_er: f64,
    max_er: f64,
}

#[wasm_bindgen]
impl CalibrationRun {
    #[wasm_bindgen(getter)]
    pub fn app(&self) -> Vec<f64> {
        self.app.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn exact(&self) -> Vec<f64> {
        self.exact.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn er(&self) -> Vec<f64> {
        self.er.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn s2(&self) -> f64 {
        self.s2
    }
    #[wasm_bindgen(getter)]
    pub fn min_er(&self) -> f64 {
        self.min_er
    }
    #[wasm_bindgen(getter)]
    pub fn max_er(&self) -> f64 {
        self.max_er
    }
}

/// Exponential nonlinearity with the given source: approximation at (s1, s2),
/// or with s2 optimized around the given value, against the reference solution.
#[wasm_bindgen]
pub fn calibrate(source: &str, s1: f64, s2: f64, optimize: bool, t_max: f64, dt: f64) -> Result<CalibrationRun, JsError> {
    let f: SourceFunction = source.parse().map_err(js_err)?;
    let grid = TimeGrid::from_horizon(t_max, dt).map_err(js_err)?;
    if grid.n > 20_001 {
        return Err(JsError::new("at most 20000 steps in the browser"));
    }
    let spec = kernel_for(Nonlinearity::Exponential, s1).map_err(js_err)?;
    let cal = Calibration::prepare(&spec, &f, &grid, &CalibrationOptions::default()).map_err(js_err)?;
    let report = if optimize {
        cal.optimize(default_bracket(s2), &[s2]).map_err(js_err)?.1
    } else {
        cal.report(s2, false).map_err(js_err)?
    };
    let trace = cal.error_trace(report.s2).map_err(js_err)?;
    Ok(CalibrationRun {
        app: cal.approximation(report.s2).values,
        exact: cal.exact.values,
        er: trace.er.values,
        s2: report.s2,
        min_er: report.min_er,
        max_er: report.max_er,
    })
}

/// G(χ(x, t)) for the exponential kernel on an nx × nt grid (x-major), NaN
/// where χ² < 0 so the page can shade that region.
#[wasm_bindgen]
pub fn lifted_kernel(s1: f64, x0: f64, x1: f64, nx: usize, t_max: f64, nt: usize) -> Result<Vec<f64>, JsError> {
    if nx < 2 || nt < 2 || !(x1 > x0) || !(t_max > 0.0) || nx * nt > 1_000_000 {
        return Err(JsError::new("need x1 > x0, t_max > 0 and 2 ≤ nx·nt ≤ 10⁶"));
    }
    let spec = kernel_for(Nonlinearity::Exponential, s1).map_err(js_err)?;
    let cfg = PdeConfig::wave_exp();
    let mut out = Vec::with_capacity(nx * nt);
    for i in 0..nx {
        let x = x0 + (x1 - x0) * i as f64 / (nx - 1) as f64;
        for j in 0..nt {
            let t = t_max * j as f64 / (nt - 1) as f64;
            out.push(match chi(x, t, &cfg) {
                Some(c) => eval_kernel(&spec, c).map_err(js_err)?,
                None => f64::NAN,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_curve_matches_library() {
        let curve = kernel_curve("advective", f64::NAN, 2.0, 5).unwrap();
        for (k, v) in curve.iter().enumerate() {
            assert!((v - (0.25 * k as f64).tanh()).abs() < 1e-15);
        }
        let recip = kernel_curve("reciprocal", f64::NAN, 4.0, 5).unwrap();
        assert!(recip[1].is_finite() && recip[4].is_nan());
    }

    #[test]
    fn calibrate_delta_row() {
        let run = calibrate("delta", 1.0, 2.0, false, 1.0, 1e-3).unwrap();
        assert_eq!(run.app.len(), 1001);
        assert!(run.max_er <= -5.0);
        let opt = calibrate("sin", 0.72126, -19.2534, true, 1.0, 1e-3).unwrap();
        assert!(opt.max_er < run.max_er + 20.0 && opt.s2 != -19.2534);
    }

    #[test]
    fn lifted_kernel_marks_invalid_region() {
        let field = lifted_kernel(0.0, 0.0, 1.0, 3, 2.0, 3).unwrap();
        let spec = kernel_for(Nonlinearity::Exponential, 0.0).unwrap();
        // χ² = e^{−2x} − t²: χ = 1 at the origin, negative at (0, 2)
        assert_eq!(field[0], eval_kernel(&spec, 1.0).unwrap());
        assert!(field[2].is_nan());
        assert!(field[3].is_finite() && field[5].is_nan()); // (0.5, 0) inside, (0.5, 2) outside
    }
}
