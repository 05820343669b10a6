use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of a function or kernel.
    #[error("domain error: {0}")]
    Domain(String),

    /// `z` lies within the configured epsilon of a lattice pole of ℘.
    #[error("pole proximity: z = {z} is within {epsilon:e} of the pole at {pole}")]
    Pole { z: f64, pole: f64, epsilon: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("blow-up: |w| = {value:e} exceeded the bound {bound:e} at t = {t}")]
    BlowUp { t: f64, value: f64, bound: f64 },

    #[error("singular state at t = {t}: {reason}")]
    Singularity { t: f64, reason: String },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("empty window: {0}")]
    EmptyWindow(String),

    #[error("invalid bracket [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("no valid points: {0}")]
    NoValidPoints(String),

    /// Violated precondition on an otherwise well-formed call.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the CLI: 2 for configuration problems,
    /// 3 for numeric-domain failures, 4 for blow-up and convergence failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 2,
            Error::BlowUp { .. } | Error::NonConvergence { .. } | Error::StepUnderflow { .. } => 4,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
