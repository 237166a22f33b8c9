//! Closed-form moments and the error radii built from them.
//!
//! With `R = [n]/[m]` (`n = m + ell`):
//!
//! ```text
//! B(e1; x)          = R x
//! B(e2; x)          = p^{n-1} [n] x / [m]^2 + q [n] [n-1] x^2 / [m]^2
//! B((t - x)^2; x)   = p^{n-1} [n] x / [m]^2 + (1 - 2R + q [n-1] [n] / [m]^2) x^2
//! ```
//!
//! Quotients of (p,q)-integers are formed through [`pq_integer_ratio`], so the
//! formulas stay finite where the integers themselves would underflow.

use crate::calculus::{pq_integer_ratio, r_integer};
use crate::error::{Error, Result};
use crate::operator::OperatorSpec;

/// `B(e_j; x)` for `j = 0, 1, 2` and the first two central moments at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub x: f64,
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    /// `B(t - x; x) = e1 - x`.
    pub central1: f64,
    /// `B((t - x)^2; x) = e2 - 2x e1 + x^2`.
    pub central2: f64,
}

/// The scalar coefficients every closed form is made of.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Coefficients {
    /// `[n] / [m]`
    pub ratio: f64,
    /// `p^{n-1} [n] / [m]^2`
    pub linear: f64,
    /// `q [n] [n-1] / [m]^2`
    pub quadratic: f64,
    /// `p^{n-1} / [m]`
    pub spread: f64,
}

impl Coefficients {
    pub(crate) fn new(spec: &OperatorSpec) -> Self {
        let params = spec.params();
        let (n, m) = (spec.degree(), spec.m());
        let ratio = pq_integer_ratio(n, m, params);
        // p^{n-1} / [m] = p^{ell} / [m]_r
        let spread = libm::pow(params.p(), spec.ell() as f64) / r_integer(m, params.ratio());
        let below = if n >= 1 { pq_integer_ratio(n - 1, m, params) } else { 0.0 };
        Self { ratio, linear: ratio * spread, quadratic: params.q() * ratio * below, spread }
    }
}

fn check_point(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::PointOutOfRange(x))
    }
}

pub fn moments_closed_form(spec: &OperatorSpec, x: f64) -> Result<MomentSet> {
    check_point(x)?;
    let c = Coefficients::new(spec);
    let e1 = c.ratio * x;
    let e2 = c.linear * x + c.quadratic * x * x;
    Ok(MomentSet {
        x,
        e0: 1.0,
        e1,
        e2,
        central1: (c.ratio - 1.0) * x,
        central2: c.linear * x + (1.0 - 2.0 * c.ratio + c.quadratic) * x * x,
    })
}

/// Radicand of the error radius in expanded form,
/// `(q [n-1] - [n]) x^2 + p^{n-1} x`.
pub fn radicand_expanded(spec: &OperatorSpec, x: f64) -> Result<f64> {
    check_point(x)?;
    let params = spec.params();
    let n = spec.degree();
    let big = crate::calculus::pq_integer(n, params)?;
    let below = crate::calculus::pq_integer(n - 1, params)?;
    let p_pow = libm::pow(params.p(), (n - 1) as f64);
    Ok((params.q() * below - big) * x * x + p_pow * x)
}

/// Same radicand after `[n] = p^{n-1} + q [n-1]`: `p^{n-1} x (1 - x)`.
pub fn radicand_simplified(spec: &OperatorSpec, x: f64) -> Result<f64> {
    check_point(x)?;
    let p_pow = libm::pow(spec.params().p(), (spec.degree() - 1) as f64);
    Ok(p_pow * x * (1.0 - x))
}

/// `delta_m(x) = x |R - 1| + sqrt(R) sqrt(radicand / [m])`.
///
/// Uses the simplified radicand, which is nonnegative on `[0, 1]`.
pub fn delta_m(spec: &OperatorSpec, x: f64) -> Result<f64> {
    check_point(x)?;
    let c = Coefficients::new(spec);
    // radicand / [m] = p^{n-1} x (1 - x) / [m]
    let scaled_radicand = c.spread * x * (1.0 - x);
    Ok(x * (c.ratio - 1.0).abs() + libm::sqrt(c.ratio) * libm::sqrt(scaled_radicand))
}

/// `delta_m(x)` with the expanded radicand; only for cross-checking
/// [`delta_m`], since the radicand here is a difference of close numbers.
pub fn delta_m_expanded(spec: &OperatorSpec, x: f64) -> Result<f64> {
    let params = spec.params();
    let ratio = pq_integer_ratio(spec.degree(), spec.m(), params);
    let m_int = crate::calculus::pq_integer(spec.m(), params)?;
    let radicand = radicand_expanded(spec, x)?;
    Ok(x * (ratio - 1.0).abs() + libm::sqrt(ratio) * libm::sqrt((radicand / m_int).max(0.0)))
}

/// `delta_m^2(x) = [n] p^{n-1} x / [m]^2 + ((R - 1)^2 + [n] (q [n-1] - [n]) / [m]^2) x^2`.
///
/// Algebraically this is the second central moment `B((t - x)^2; x)`.
pub fn delta_m_squared_direct(spec: &OperatorSpec, x: f64) -> Result<f64> {
    check_point(x)?;
    let c = Coefficients::new(spec);
    // [n] (q [n-1] - [n]) / [m]^2 = quadratic - ratio^2
    let bias = c.ratio - 1.0;
    Ok(c.linear * x + (bias * bias + c.quadratic - c.ratio * c.ratio) * x * x)
}
