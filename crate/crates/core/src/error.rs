use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("p = 0 is the degenerate linear case of the family")]
    DegenerateLinear,
    #[error("p = -1 leaves the family exponents undefined")]
    UndefinedExponent,
    #[error("parameter {name} = {value} is outside the admissible range ({reason})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("equation is singular at x = {x}")]
    Singularity { x: f64 },
    #[error("{what} = {value} leaves the real domain")]
    Domain { what: &'static str, value: f64 },
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("sample grid is not strictly monotone at index {index}")]
    NonMonotoneGrid { index: usize },
    #[error("t = {t} lies outside the solution span [{start}, {end}]")]
    OutOfSpan { t: f64, start: f64, end: f64 },
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step budget of {max_steps} exhausted at t = {t}")]
    MaxSteps { max_steps: usize, t: f64 },
    #[error("right-hand side failed at t = {t}, state = {state:?}: {source}")]
    Rhs {
        t: f64,
        state: Vec<f64>,
        source: Box<Error>,
    },
    #[error("no undershoot/overshoot bracket for p = {p} with slopes in [{lo}, {hi}]")]
    NoBracket { p: f64, lo: f64, hi: f64 },
    #[error("shot at slope {slope} failed: {source}")]
    Shot { slope: f64, source: Box<Error> },
    #[error("invariant vanishes at w = {w}; point excluded")]
    ExcludedPoint { w: f64 },
    #[error("(tau, u) = ({tau}, {u}) lies on the singular locus 1 - tau^(p(p+1)) u = 0")]
    SingularLocus { tau: f64, u: f64 },
    #[error("eigenvalues are complex; no real flow directions")]
    ComplexEigenvalues,
    #[error("n = 1: the interior fixed point does not exist")]
    NoInteriorFixedPoint,
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
