use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters p = {p}, q = {q}: need 0 < q < p <= 1")]
    InvalidParams { p: f64, q: f64 },
    #[error("degree {n} exceeds the supported ceiling {max}")]
    DegreeCeiling { n: usize, max: usize },
    #[error("binomial index k = {k} exceeds n = {n}")]
    BinomialIndex { n: usize, k: usize },
    #[error("invalid operator: m = {m} must be at least 1")]
    InvalidDegree { m: usize },
    #[error("evaluation point x = {0} lies outside [0, 1]")]
    PointOutOfRange(f64),
    #[error("function `{name}` evaluated at t = {t}, outside its domain [{lo}, {hi}]")]
    OutsideDomain { name: String, t: f64, lo: f64, hi: f64 },
    #[error("function `{name}` is not finite at t = {t}")]
    NonFinite { name: String, t: f64 },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("step must be positive, got {0}")]
    NonPositiveDelta(f64),
    #[error("grid needs at least 2 points, got {0}")]
    InvalidGrid(usize),
    #[error("Hoelder exponent nu = {0} outside (0, 1]")]
    InvalidExponent(f64),
    #[error("Hoelder constant must be positive, got {0}")]
    InvalidConstant(f64),
    #[error("function `{name}` has no registered derivative of order {order}")]
    MissingDerivative { name: String, order: u8 },
    #[error("schedule gives p = {p}, q = {q} at m = {m}: need 0 < q < p <= 1")]
    InvalidSchedule { m: usize, p: f64, q: f64 },
    #[error("invalid schedule: {0}")]
    ScheduleArgs(String),
    #[error("degree list must be nonempty and strictly increasing")]
    DegreeList,
    #[error("no grid point with |f''(x)| above the fitting threshold")]
    NoCurvature,
    #[error("invalid sampled data: {0}")]
    SampledData(String),
    #[error("invalid rational: {0}")]
    Rational(String),
}
