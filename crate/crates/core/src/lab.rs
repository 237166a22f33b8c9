//! Parameter sequences `(p_m, q_m)` and the experiments run along them.
//!
//! * [`korovkin_experiment`]: sup-norm error on a grid of `[0, 1]` together
//!   with the test-function errors `sup |B(e_j) - e_j|`, `j = 0, 1, 2`.
//! * [`voronovskaja_experiment`]: the scaled error `[m] (B(f) - f)` and a
//!   least-squares fit of `2 [m] (B(f) - f) / f''` against `x (lambda - alpha x)`.
//! * [`omega2_ratio_experiment`]: the bias-corrected error divided by the
//!   second modulus at `sqrt(delta_m^2)`.
//!
//! In the second-modulus experiment the derivative in the bias correction is
//! that of `f` itself.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::bounds::OmegaMode;
use crate::calculus::{pq_integer, pq_integer_ratio, PQParams};
use crate::error::{Error, Result};
use crate::function::{uniform_grid, FunctionHandle};
use crate::modulus::{SampledGrid, SecondModulusTable, DEFAULT_MODULUS_GRID};
use crate::moments::{delta_m, delta_m_squared_direct};
use crate::operator::{evaluate, OperatorSpec};

pub const DEFAULT_M_VALUES: [usize; 6] = [4, 8, 16, 32, 64, 128];
pub const DEFAULT_GRID: usize = 101;
/// Points with `|f''(x)|` at or below this are left out of the fit.
pub const CURVATURE_THRESHOLD: f64 = 0.1;
const RATIO_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    /// `p_m = alpha^{1/m}`, `q_m = beta^{1/m}`.
    PowerRoot,
    /// `p_m = 1 - 1/(m+1)^2`, `q_m = 1 - 1/(m+1)`.
    OneMinusInverse,
    /// `p_m = 1 - a/(m+1)^b`, `q_m = 1 - c/(m+1)^d`.
    Custom,
}

impl ScheduleKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScheduleKind::PowerRoot => "power_root",
            ScheduleKind::OneMinusInverse => "one_minus_inverse",
            ScheduleKind::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSchedule {
    kind: ScheduleKind,
    alpha: f64,
    beta: f64,
    // Custom only: (a, b, c, d).
    shape: [f64; 4],
}

/// `power_root` needs `0 < beta < alpha < 1`; the other kinds ignore `alpha`
/// and `beta`. Custom shapes come from [`ParamSchedule::custom`].
pub fn make_schedule(kind: ScheduleKind, alpha: f64, beta: f64) -> Result<ParamSchedule> {
    match kind {
        ScheduleKind::PowerRoot => {
            if !(0.0 < beta && beta < alpha && alpha < 1.0) {
                return Err(Error::ScheduleArgs(alloc::format!(
                    "power_root needs 0 < beta < alpha < 1, got alpha = {alpha}, beta = {beta}"
                )));
            }
            Ok(ParamSchedule { kind, alpha, beta, shape: [0.0; 4] })
        }
        ScheduleKind::OneMinusInverse => {
            Ok(ParamSchedule { kind, alpha: 1.0, beta: libm::exp(-1.0), shape: [1.0, 2.0, 1.0, 1.0] })
        }
        ScheduleKind::Custom => {
            Err(Error::ScheduleArgs("custom schedules take offsets and exponents, not alpha and beta".to_string()))
        }
    }
}

impl ParamSchedule {
    pub fn custom(p_offset: f64, p_exponent: f64, q_offset: f64, q_exponent: f64) -> Result<Self> {
        let shape = [p_offset, p_exponent, q_offset, q_exponent];
        if shape.iter().any(|v| !v.is_finite() || *v < 0.0) || q_offset == 0.0 || q_exponent == 0.0 {
            return Err(Error::ScheduleArgs(alloc::format!(
                "custom needs finite nonnegative offsets and exponents with q moving, got {shape:?}"
            )));
        }
        let limit = |a: f64, b: f64| {
            if a == 0.0 || b > 1.0 {
                1.0
            } else if b == 1.0 {
                libm::exp(-a)
            } else {
                0.0
            }
        };
        Ok(Self {
            kind: ScheduleKind::Custom,
            alpha: limit(p_offset, p_exponent),
            beta: limit(q_offset, q_exponent),
            shape,
        })
    }

    /// Parses `power_root:ALPHA:BETA`, `one_minus_inverse` or `custom:A:B:C:D`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut parts = text.split(':');
        let kind = parts.next().unwrap_or("");
        let nums = parts
            .map(|s| s.trim().parse::<f64>().map_err(|_| Error::ScheduleArgs(alloc::format!("bad number `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        match (kind, nums.as_slice()) {
            ("power_root", [a, b]) => make_schedule(ScheduleKind::PowerRoot, *a, *b),
            ("one_minus_inverse", []) => make_schedule(ScheduleKind::OneMinusInverse, 0.0, 0.0),
            ("custom", [a, b, c, d]) => Self::custom(*a, *b, *c, *d),
            _ => Err(Error::ScheduleArgs(alloc::format!(
                "expected power_root:ALPHA:BETA, one_minus_inverse or custom:A:B:C:D, got `{text}`"
            ))),
        }
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    /// `lim p_m^m`.
    pub fn alpha_limit(&self) -> f64 {
        self.alpha
    }

    /// `lim q_m^m`.
    pub fn beta_limit(&self) -> f64 {
        self.beta
    }

    /// Raw `(p_m, q_m)` without validation.
    pub fn raw_at(&self, m: usize) -> (f64, f64) {
        let mf = m as f64;
        match self.kind {
            ScheduleKind::PowerRoot => (libm::pow(self.alpha, 1.0 / mf), libm::pow(self.beta, 1.0 / mf)),
            _ => {
                let [a, b, c, d] = self.shape;
                (1.0 - a / libm::pow(mf + 1.0, b), 1.0 - c / libm::pow(mf + 1.0, d))
            }
        }
    }

    pub fn params_at(&self, m: usize) -> Result<PQParams> {
        let (p, q) = self.raw_at(m);
        PQParams::new(p, q).map_err(|_| Error::InvalidSchedule { m, p, q })
    }

    /// Checks that `m_values` is strictly increasing, that every `(p_m, q_m)`
    /// is admissible and that both sequences move toward 1.
    pub fn validate(&self, m_values: &[usize]) -> Result<Vec<PQParams>> {
        if m_values.is_empty() || m_values.contains(&0) || m_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::DegreeList);
        }
        let params = m_values.iter().map(|&m| self.params_at(m)).collect::<Result<Vec<_>>>()?;
        for (w, pair) in m_values.windows(2).zip(params.windows(2)) {
            if pair[1].p() < pair[0].p() || pair[1].q() < pair[0].q() {
                return Err(Error::InvalidSchedule { m: w[1], p: pair[1].p(), q: pair[1].q() });
            }
        }
        Ok(params)
    }
}

fn sup_abs(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |acc, v| acc.max(v.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub m: usize,
    pub p: f64,
    pub q: f64,
    /// `max_x |B(f; x) - f(x)|` over the grid.
    pub sup_error: f64,
    /// `max_x 2 omega(f, delta_m(x))` over the grid.
    pub bound_2w: f64,
    /// `[m] * sup_error`.
    pub scaled_error: f64,
    pub sup_e0: f64,
    pub sup_e1: f64,
    pub sup_e2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub function: String,
    pub ell: usize,
    pub grid: usize,
    pub schedule: ParamSchedule,
    pub omega_mode: OmegaMode,
}

pub fn korovkin_experiment(
    schedule: &ParamSchedule,
    ell: usize,
    f: &FunctionHandle,
    m_values: &[usize],
    grid: usize,
) -> Result<ConvergenceReport> {
    let params = schedule.validate(m_values)?;
    let xs = uniform_grid(0.0, 1.0, grid)?;
    let hi = (ell + 1) as f64;
    let tests: [FunctionHandle; 3] = core::array::from_fn(|j| FunctionHandle::monomial(j as u32, hi));
    let omega = SampledGrid::new(f, crate::function::Interval::schurer(ell), DEFAULT_MODULUS_GRID)?;
    let allowance = f.regularity().map(|h| 2.0 * h.oscillation(omega.step()));
    let omega_mode = if allowance.is_some() { OmegaMode::Inflated } else { OmegaMode::GridEstimate };

    let mut rows = Vec::with_capacity(m_values.len());
    for (&m, &pq) in m_values.iter().zip(&params) {
        let spec = OperatorSpec::new(m, ell, pq)?;
        let mut sup_error: f64 = 0.0;
        let mut bound_2w: f64 = 0.0;
        let mut sups = [0.0f64; 3];
        for &x in &xs {
            sup_error = sup_error.max((evaluate(&spec, f, x)? - f.eval(x)?).abs());
            let dm = delta_m(&spec, x)?;
            if dm > 0.0 {
                bound_2w = bound_2w.max(2.0 * (omega.modulus(dm) + allowance.unwrap_or(0.0)));
            }
            for (j, e) in tests.iter().enumerate() {
                sups[j] = sups[j].max((evaluate(&spec, e, x)? - e.value(x)).abs());
            }
        }
        rows.push(ConvergenceRow {
            m,
            p: pq.p(),
            q: pq.q(),
            sup_error,
            bound_2w,
            scaled_error: pq_integer(m, pq)? * sup_error,
            sup_e0: sups[0],
            sup_e1: sups[1],
            sup_e2: sups[2],
        });
    }
    Ok(ConvergenceReport { rows, function: f.name().to_string(), ell, grid, schedule: *schedule, omega_mode })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoronovskajaRow {
    pub m: usize,
    pub p: f64,
    pub q: f64,
    /// `max_x |[m] (B(f; x) - f(x))|`.
    pub sup_scaled_error: f64,
    pub lambda_hat: f64,
    /// `max |y - x (lambda_hat - alpha x)|` over the fitted points.
    pub fit_residual: f64,
    /// `|lambda_hat - previous lambda_hat|`; absent on the first row.
    pub cauchy_increment: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoronovskajaReport {
    pub rows: Vec<VoronovskajaRow>,
    pub function: String,
    pub ell: usize,
    pub grid: usize,
    pub alpha: f64,
    pub schedule: ParamSchedule,
}

/// Fits `y = x (lambda - alpha x)` with
/// `y = 2 [m] (B(f; x) - f(x)) / f''(x)` on grid points where `|f''|` exceeds
/// [`CURVATURE_THRESHOLD`]. The fit is linear in `lambda`:
/// `lambda_hat = sum x (y + alpha x^2) / sum x^2`.
pub fn voronovskaja_experiment(
    schedule: &ParamSchedule,
    ell: usize,
    f: &FunctionHandle,
    m_values: &[usize],
    grid: usize,
) -> Result<VoronovskajaReport> {
    f.require_second_derivative()?;
    let params = schedule.validate(m_values)?;
    let xs = uniform_grid(0.0, 1.0, grid)?;
    let alpha = schedule.alpha_limit();
    let curved: Vec<(f64, f64)> = xs
        .iter()
        .filter_map(|&x| f.second_derivative(x).filter(|d| d.abs() > CURVATURE_THRESHOLD).map(|d| (x, d)))
        .collect();
    let denom: f64 = curved.iter().map(|(x, _)| x * x).sum();
    if denom.is_nan() || denom <= 0.0 {
        return Err(Error::NoCurvature);
    }

    let mut rows: Vec<VoronovskajaRow> = Vec::with_capacity(m_values.len());
    for (&m, &pq) in m_values.iter().zip(&params) {
        let spec = OperatorSpec::new(m, ell, pq)?;
        let m_int = pq_integer(m, pq)?;
        let mut sup_scaled: f64 = 0.0;
        for &x in &xs {
            sup_scaled = sup_scaled.max((m_int * (evaluate(&spec, f, x)? - f.eval(x)?)).abs());
        }
        let mut targets = Vec::with_capacity(curved.len());
        let mut numer = 0.0;
        for &(x, d2) in &curved {
            let y = 2.0 * m_int * (evaluate(&spec, f, x)? - f.eval(x)?) / d2;
            numer += x * (y + alpha * x * x);
            targets.push((x, y));
        }
        let lambda_hat = numer / denom;
        let fit_residual = sup_abs(targets.iter().map(|(x, y)| y - x * (lambda_hat - alpha * x)));
        let cauchy_increment = rows.last().map(|prev| (lambda_hat - prev.lambda_hat).abs());
        rows.push(VoronovskajaRow {
            m,
            p: pq.p(),
            q: pq.q(),
            sup_scaled_error: sup_scaled,
            lambda_hat,
            fit_residual,
            cauchy_increment,
        });
    }
    Ok(VoronovskajaReport { rows, function: f.name().to_string(), ell, grid, alpha, schedule: *schedule })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Omega2Row {
    pub m: usize,
    pub p: f64,
    pub q: f64,
    pub max_ratio: f64,
    /// Largest bias-corrected error, the numerator of the ratio.
    pub max_numerator: f64,
    /// Grid point attaining `max_ratio`.
    pub argmax_x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Omega2Report {
    pub rows: Vec<Omega2Row>,
    pub function: String,
    pub ell: usize,
    pub grid: usize,
    pub schedule: ParamSchedule,
}

impl Omega2Report {
    /// `max_ratio` at the last row over that at the row for `m_from`.
    pub fn growth(&self, m_from: usize) -> Option<f64> {
        let from = self.rows.iter().find(|r| r.m == m_from)?;
        let last = self.rows.last()?;
        Some(last.max_ratio / from.max_ratio)
    }
}

/// Per `m`, the largest over the grid of
///
/// ```text
/// |B(f; x) - f(x) - x f'(x) ([m+ell]/[m] - 1)| / max(omega_2(f, sqrt(delta_m^2(x))), 1e-15)
/// ```
///
/// with the second modulus taken over the operator's domain.
pub fn omega2_ratio_experiment(
    schedule: &ParamSchedule,
    ell: usize,
    f: &FunctionHandle,
    m_values: &[usize],
    grid: usize,
) -> Result<Omega2Report> {
    f.require_derivative()?;
    let params = schedule.validate(m_values)?;
    let xs = uniform_grid(0.0, 1.0, grid)?;

    let mut rows = Vec::with_capacity(m_values.len());
    for (&m, &pq) in m_values.iter().zip(&params) {
        let spec = OperatorSpec::new(m, ell, pq)?;
        let bias = pq_integer_ratio(spec.degree(), m, pq) - 1.0;
        let radii = xs
            .iter()
            .map(|&x| delta_m_squared_direct(&spec, x).map(|d2| libm::sqrt(d2.max(0.0))))
            .collect::<Result<Vec<_>>>()?;
        let h_max = radii.iter().copied().fold(0.0, f64::max);
        let table = if h_max > 0.0 {
            Some(SecondModulusTable::new(f, spec.domain(), DEFAULT_MODULUS_GRID, h_max)?)
        } else {
            None
        };
        let (mut max_ratio, mut argmax_x, mut max_numerator) = (0.0f64, 0.0, 0.0f64);
        for (&x, &radius) in xs.iter().zip(&radii) {
            let slope = f.derivative(x).unwrap_or(0.0);
            let numer = (evaluate(&spec, f, x)? - f.eval(x)? - x * slope * bias).abs();
            let omega2 = match &table {
                Some(t) if radius > 0.0 => t.query(radius)?,
                _ => 0.0,
            };
            max_numerator = max_numerator.max(numer);
            let ratio = numer / omega2.max(RATIO_FLOOR);
            if ratio > max_ratio {
                max_ratio = ratio;
                argmax_x = x;
            }
        }
        rows.push(Omega2Row { m, p: pq.p(), q: pq.q(), max_ratio, max_numerator, argmax_x });
    }
    Ok(Omega2Report { rows, function: f.name().to_string(), ell, grid, schedule: *schedule })
}
