//! Pointwise checks of the two error bounds
//!
//! ```text
//! |B(f; x) - f(x)| <= 2 omega(f, delta_m(x))
//! |B(f; x) - f(x)| <= M delta_m^2(x)^{nu/2}      for f in Lip_M(nu)
//! ```
//!
//! The modulus on the right of the first bound is a grid estimate and can
//! only underestimate. When the function carries a Hoelder bound the estimate
//! is inflated by the oscillation over one grid cell at each end of the pair,
//! which turns it into a true upper bound; otherwise the raw estimate is used
//! and the report says so.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::function::FunctionHandle;
use crate::modulus::{SampledGrid, DEFAULT_MODULUS_GRID};
use crate::moments::{delta_m, delta_m_squared_direct};
use crate::operator::{evaluate, OperatorSpec};

/// A row passes when `lhs <= rhs + absolute + relative * rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTolerance {
    pub absolute: f64,
    pub relative: f64,
}

impl Default for BoundTolerance {
    fn default() -> Self {
        Self { absolute: 1e-9, relative: 1e-6 }
    }
}

impl BoundTolerance {
    pub fn slack(&self, rhs: f64) -> f64 {
        self.absolute + self.relative * rhs.abs()
    }
}

/// How the right-hand side was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmegaMode {
    /// Grid modulus plus the grid-cell oscillation allowance; a rigorous bound.
    Inflated,
    /// Raw grid modulus, which may sit below the true modulus.
    GridEstimate,
    /// Closed form, no modulus involved.
    Analytic,
}

impl OmegaMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            OmegaMode::Inflated => "inflated",
            OmegaMode::GridEstimate => "grid-estimate",
            OmegaMode::Analytic => "analytic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub x: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub delta_m: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
    pub mode: OmegaMode,
    pub tolerance: BoundTolerance,
}

impl BoundReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn violations(&self) -> impl Iterator<Item = &BoundRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    /// Largest `lhs / rhs` over rows with a positive right side.
    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().filter(|r| r.rhs > 0.0).map(|r| r.lhs / r.rhs).fold(0.0, f64::max)
    }
}

fn row(x: f64, lhs: f64, rhs: f64, delta_m: f64, tolerance: BoundTolerance) -> BoundRow {
    BoundRow { x, lhs, rhs, delta_m, pass: lhs <= rhs + tolerance.slack(rhs) }
}

/// `|B(f; x) - f(x)|` against `2 omega(f, delta_m(x))`, with the modulus taken
/// over the operator's domain on a 2001-point grid.
pub fn modulus_bound_check(
    spec: &OperatorSpec,
    f: &FunctionHandle,
    xs: &[f64],
    tolerance: BoundTolerance,
) -> Result<BoundReport> {
    modulus_bound_check_on_grid(spec, f, xs, tolerance, DEFAULT_MODULUS_GRID)
}

pub fn modulus_bound_check_on_grid(
    spec: &OperatorSpec,
    f: &FunctionHandle,
    xs: &[f64],
    tolerance: BoundTolerance,
    grid_points: usize,
) -> Result<BoundReport> {
    let grid = SampledGrid::new(f, spec.domain(), grid_points)?;
    let allowance = f.regularity().map(|h| 2.0 * h.oscillation(grid.step()));
    let mode = if allowance.is_some() { OmegaMode::Inflated } else { OmegaMode::GridEstimate };
    let rows = xs
        .iter()
        .map(|&x| {
            let dm = delta_m(spec, x)?;
            let lhs = (evaluate(spec, f, x)? - f.eval(x)?).abs();
            let rhs = if dm > 0.0 { 2.0 * (grid.modulus(dm) + allowance.unwrap_or(0.0)) } else { 0.0 };
            Ok(row(x, lhs, rhs, dm, tolerance))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundReport { rows, mode, tolerance })
}

/// `|B(f; x) - f(x)|` against `M delta_m^2(x)^{nu/2}`. Membership of `f` in
/// `Lip_M(nu)` is the caller's claim and is not verified.
pub fn lipschitz_bound_check(
    spec: &OperatorSpec,
    f: &FunctionHandle,
    constant: f64,
    nu: f64,
    xs: &[f64],
    tolerance: BoundTolerance,
) -> Result<BoundReport> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::InvalidExponent(nu));
    }
    if !(constant > 0.0 && constant.is_finite()) {
        return Err(Error::InvalidConstant(constant));
    }
    let rows = xs
        .iter()
        .map(|&x| {
            let d2 = delta_m_squared_direct(spec, x)?.max(0.0);
            let lhs = (evaluate(spec, f, x)? - f.eval(x)?).abs();
            let rhs = constant * libm::pow(d2, nu / 2.0);
            Ok(row(x, lhs, rhs, libm::sqrt(d2), tolerance))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundReport { rows, mode: OmegaMode::Analytic, tolerance })
}
