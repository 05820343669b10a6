//! `key = value` experiment files with `[section]` headers.
//!
//! ```text
//! [experiment]
//! nonlinearity = exponential
//! source = delta
//! s1 = 1
//! s2 = 2
//! t_max = 1
//! dt = 1e-3
//! tol = 1e-10
//!
//! [optimize]
//! enabled = true
//! s2_min = 0
//! s2_max = 4
//!
//! [pde]
//! nx = 41
//!
//! [output]
//! dir = out
//! ```
//!
//! Keys are looked up as `section.key`; keys before any header belong to
//! `experiment`. `#` and `;` start comments.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::frasca::{EndpointRule, SourceFunction};
use crate::kernels::Nonlinearity;
use crate::pdelift::{PdeConfig, DEFAULT_MARGIN};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawConfig(BTreeMap<String, String>);

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut section = "experiment".to_string();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_ascii_lowercase();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value, got '{raw}'", n + 1)))?;
            let key = key.trim().to_ascii_lowercase().replace('-', "_");
            map.insert(format!("{section}.{key}"), value.trim().to_string());
        }
        Ok(Self(map))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.0
            .get(key)
            .map(|v| v.parse().map_err(|_| Error::Config(format!("bad value '{v}' for {key}"))))
            .transpose()
    }

    fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        self.0
            .get(key)
            .map(|v| match v.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" | "on" => Ok(true),
                "false" | "no" | "0" | "off" => Ok(false),
                _ => Err(Error::Config(format!("bad boolean '{v}' for {key}"))),
            })
            .transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelChoice {
    /// Closed form when one exists for the requested slope, else numeric.
    #[default]
    Auto,
    Closed,
    Numeric,
}

impl FromStr for KernelChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(Self::Auto),
            "closed" | "closed-form" => Ok(Self::Closed),
            "numeric" => Ok(Self::Numeric),
            _ => Err(Error::Config(format!("unknown kernel form '{s}'"))),
        }
    }
}

fn parse_endpoint(s: &str) -> Result<EndpointRule> {
    match s.trim().to_ascii_lowercase().as_str() {
        "half" => Ok(EndpointRule::Half),
        "full" => Ok(EndpointRule::Full),
        _ => Err(Error::Config(format!("unknown endpoint rule '{s}'"))),
    }
}

/// Settings for the space-time lift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeSettings {
    pub config: PdeConfig,
    pub x0: f64,
    pub dx: f64,
    pub nx: usize,
    pub dt: f64,
    pub nt: usize,
    pub margin: f64,
    pub s2: f64,
    /// Gaussian source A·exp(−((x − xc)² + (t − tc)²)/width²).
    pub amplitude: f64,
    pub center_x: f64,
    pub center_t: f64,
    pub width: f64,
}

impl Default for PdeSettings {
    fn default() -> Self {
        Self {
            config: PdeConfig::wave_exp(),
            x0: -1.0,
            dx: 0.05,
            nx: 41,
            dt: 0.05,
            nt: 21,
            margin: DEFAULT_MARGIN,
            s2: 1.0,
            amplitude: 1.0,
            center_x: 0.0,
            center_t: 0.0,
            width: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub nonlinearity: Nonlinearity,
    pub source: SourceFunction,
    pub s1: Option<f64>,
    pub s2: f64,
    pub horizon: f64,
    pub dt: f64,
    pub tolerance: f64,
    pub kernel: KernelChoice,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub endpoint: EndpointRule,
    pub skip_initial: usize,
    pub optimize: bool,
    pub bracket: Option<(f64, f64)>,
    pub pde: PdeSettings,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            nonlinearity: Nonlinearity::Exponential,
            source: SourceFunction::delta(),
            s1: None,
            s2: 1.0,
            horizon: 1.0,
            dt: 1e-3,
            tolerance: crate::oracle::DEFAULT_TOLERANCE,
            kernel: KernelChoice::Auto,
            c1: None,
            c2: None,
            endpoint: EndpointRule::Half,
            skip_initial: 10,
            optimize: false,
            bracket: None,
            pde: PdeSettings::default(),
            out_dir: PathBuf::from("."),
        }
    }
}

impl ExperimentConfig {
    /// Applies every key present in `raw` on top of `self`.
    pub fn merge(mut self, raw: &RawConfig) -> Result<Self> {
        if let Some(v) = raw.get::<String>("experiment.nonlinearity")? {
            self.nonlinearity = v.parse()?;
        }
        if let Some(v) = raw.get::<String>("experiment.source")? {
            self.source = v.parse()?;
        }
        self.source = source_parameters(self.source, raw)?;
        if let Some(v) = raw.get("experiment.s1")? {
            self.s1 = Some(v);
        }
        if let Some(v) = raw.get("experiment.s2")? {
            self.s2 = v;
        }
        if let Some(v) = raw.get("experiment.t_max")? {
            self.horizon = v;
        }
        if let Some(v) = raw.get("experiment.dt")? {
            self.dt = v;
        }
        if let Some(v) = raw.get("experiment.tol")? {
            self.tolerance = v;
        }
        if let Some(v) = raw.get("experiment.kernel")? {
            self.kernel = v;
        }
        if let Some(v) = raw.get("experiment.c1")? {
            self.c1 = Some(v);
        }
        if let Some(v) = raw.get("experiment.c2")? {
            self.c2 = Some(v);
        }
        if let Some(v) = raw.get::<String>("experiment.endpoint")? {
            self.endpoint = parse_endpoint(&v)?;
        }
        if let Some(v) = raw.get("experiment.skip_initial")? {
            self.skip_initial = v;
        }
        if let Some(v) = raw.get_bool("optimize.enabled")? {
            self.optimize = v;
        }
        match (raw.get("optimize.s2_min")?, raw.get("optimize.s2_max")?) {
            (Some(lo), Some(hi)) => self.bracket = Some((lo, hi)),
            (None, None) => {}
            _ => return Err(Error::Config("optimize needs both s2_min and s2_max".into())),
        }

        let p = &mut self.pde;
        let c = &mut p.config;
        for (key, slot) in [
            ("pde.alpha", &mut c.alpha),
            ("pde.lambda", &mut c.lambda),
            ("pde.a1", &mut c.a1),
            ("pde.a2", &mut c.a2),
        ] {
            if let Some(v) = raw.get(key)? {
                *slot = v;
            }
        }
        for (key, slot) in [
            ("pde.x0", &mut p.x0),
            ("pde.dx", &mut p.dx),
            ("pde.dt", &mut p.dt),
            ("pde.margin", &mut p.margin),
            ("pde.s2", &mut p.s2),
            ("pde.amplitude", &mut p.amplitude),
            ("pde.center_x", &mut p.center_x),
            ("pde.center_t", &mut p.center_t),
            ("pde.width", &mut p.width),
        ] {
            if let Some(v) = raw.get(key)? {
                *slot = v;
            }
        }
        if let Some(v) = raw.get("pde.nx")? {
            p.nx = v;
        }
        if let Some(v) = raw.get("pde.nt")? {
            p.nt = v;
        }
        if let Some(v) = raw.get::<String>("output.dir")? {
            self.out_dir = PathBuf::from(v);
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.s2, self.horizon, self.dt, self.tolerance]
            .into_iter()
            .chain(self.s1)
            .chain(self.c1)
            .chain(self.c2)
            .all(f64::is_finite);
        if !finite {
            return Err(Error::Config("numeric settings must be finite".into()));
        }
        if !(self.dt > 0.0) || !(self.horizon > 0.0) || !(self.tolerance > 0.0) {
            return Err(Error::Config("dt, t_max and tol must be positive".into()));
        }
        if self.c1.is_some() != self.c2.is_some() {
            return Err(Error::Config("c1 and c2 must be given together".into()));
        }
        if let Some((lo, hi)) = self.bracket {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Config(format!("bad s2 bracket [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

/// Optional per-family parameters: `amplitude`, `location`, `poly = c0,c1,c2,c3`.
fn source_parameters(source: SourceFunction, raw: &RawConfig) -> Result<SourceFunction> {
    let amplitude: Option<f64> = raw.get("experiment.amplitude")?;
    Ok(match source {
        SourceFunction::Delta { amplitude: a, location: l } => SourceFunction::Delta {
            amplitude: amplitude.unwrap_or(a),
            location: raw.get("experiment.location")?.unwrap_or(l),
        },
        SourceFunction::Heaviside { amplitude: a } => SourceFunction::Heaviside {
            amplitude: amplitude.unwrap_or(a),
        },
        SourceFunction::CubicPoly(c) => match raw.0.get("experiment.poly") {
            Some(list) => {
                let parsed: Vec<f64> = list
                    .split(',')
                    .map(|v| v.trim().parse().map_err(|_| Error::Config(format!("bad poly coefficient '{v}'"))))
                    .collect::<Result<_>>()?;
                SourceFunction::CubicPoly(
                    parsed
                        .try_into()
                        .map_err(|_| Error::Config("poly needs exactly four coefficients".into()))?,
                )
            }
            None => SourceFunction::CubicPoly(c),
        },
        other => other,
    })
}
