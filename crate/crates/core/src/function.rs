//! Real functions on `[0, ell + 1]` and the built-in registry.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(Error::InvalidInterval { lo, hi })
        }
    }

    /// `[0, ell + 1]`, the domain of every operator with shift `ell`.
    pub fn schurer(ell: usize) -> Self {
        Self { lo: 0.0, hi: (ell + 1) as f64 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    fn slack(&self) -> f64 {
        1e-12 * self.lo.abs().max(self.hi.abs()).max(1.0)
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo - self.slack() && t <= self.hi + self.slack()
    }
}

/// `n` equally spaced points from `lo` to `hi`, endpoints exact.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidGrid(n));
    }
    let last = (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * (i as f64 / last) }).collect())
}

/// A Hoelder bound `|f(s) - f(t)| <= constant * |s - t|^exponent` on the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Holder {
    pub constant: f64,
    pub exponent: f64,
}

impl Holder {
    pub fn lipschitz(constant: f64) -> Self {
        Self { constant, exponent: 1.0 }
    }

    /// Largest change of `f` across a step of length `h`.
    pub fn oscillation(&self, h: f64) -> f64 {
        if self.constant == 0.0 || h <= 0.0 {
            0.0
        } else {
            self.constant * libm::pow(h, self.exponent)
        }
    }
}

/// Piecewise-linear interpolant through sorted samples, held constant
/// beyond the first and last abscissa.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PiecewiseLinear {
    /// Samples may come in any order; duplicate abscissae are rejected.
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::SampledData("no samples".to_string()));
        }
        if let Some((x, y)) = points.iter().find(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::SampledData(format!("non-finite sample ({x}, {y})")));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = points.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::SampledData(format!("duplicate abscissa {}", w[0].0)));
        }
        let (xs, ys) = points.into_iter().unzip();
        Ok(Self { xs, ys })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.xs.len();
        if t <= self.xs[0] {
            return self.ys[0];
        }
        if t >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = self.xs.partition_point(|&x| x <= t);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (y0, y1) = (self.ys[i - 1], self.ys[i]);
        y0 + (y1 - y0) * ((t - x0) / (x1 - x0))
    }

    /// Steepest segment slope; zero for a single sample.
    pub fn max_slope(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| ((y[1] - y[0]) / (x[1] - x[0])).abs())
            .fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Monomial(u32),
    Exp,
    /// `sin(pi t / (2 width))`.
    SinScaled {
        width: f64,
    },
    AbsHalf,
    SqrtAbs,
    Sampled(PiecewiseLinear),
    Custom {
        value: RealFn,
        first: Option<RealFn>,
        second: Option<RealFn>,
        regularity: Option<Holder>,
    },
}

/// A named real function on a closed interval.
///
/// Evaluation through [`FunctionHandle::eval`] checks the domain and rejects
/// non-finite values. Handles are cheap to clone and safe to share.
#[derive(Clone)]
pub struct FunctionHandle {
    name: String,
    domain: Interval,
    kind: Kind,
}

impl fmt::Debug for FunctionHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionHandle").field("name", &self.name).field("domain", &self.domain).finish_non_exhaustive()
    }
}

/// Names accepted by [`FunctionHandle::registry`].
pub const REGISTRY_NAMES: [&str; 8] = ["e0", "e1", "e2", "e3", "exp", "sin_scaled", "abs_half", "sqrt_abs"];

impl FunctionHandle {
    /// Built-in function by name, on the domain `[0, ell + 1]`.
    ///
    /// * `e0`..`e3`: monomials `t^j`
    /// * `exp`: `e^t`
    /// * `sin_scaled`: `sin(pi t / (2 (ell + 1)))`
    /// * `abs_half`: `|t - 1/2|`, Lipschitz with constant 1
    /// * `sqrt_abs`: `|t - 1/2|^{1/2}`, Hoelder of order 1/2 with constant 1
    pub fn registry(name: &str, ell: usize) -> Result<Self> {
        let domain = Interval::schurer(ell);
        let kind = match name {
            "e0" => Kind::Monomial(0),
            "e1" => Kind::Monomial(1),
            "e2" => Kind::Monomial(2),
            "e3" => Kind::Monomial(3),
            "exp" => Kind::Exp,
            "sin_scaled" => Kind::SinScaled { width: domain.hi },
            "abs_half" => Kind::AbsHalf,
            "sqrt_abs" => Kind::SqrtAbs,
            _ => return Err(Error::UnknownFunction(name.to_string())),
        };
        Ok(Self { name: name.to_string(), domain, kind })
    }

    /// `t^j` on `[0, hi]`.
    pub fn monomial(j: u32, hi: f64) -> Self {
        Self { name: format!("e{j}"), domain: Interval { lo: 0.0, hi }, kind: Kind::Monomial(j) }
    }

    pub fn constant(c: f64, domain: Interval) -> Self {
        Self::from_fn(format!("const({c})"), domain, move |_| c)
            .with_derivatives(|_| 0.0, |_| 0.0)
            .with_regularity(Holder::lipschitz(0.0))
    }

    pub fn sampled(name: impl Into<String>, data: PiecewiseLinear, domain: Interval) -> Self {
        Self { name: name.into(), domain, kind: Kind::Sampled(data) }
    }

    /// Arbitrary closure; attach derivatives or a Hoelder bound with the
    /// `with_*` builders.
    pub fn from_fn(name: impl Into<String>, domain: Interval, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            domain,
            kind: Kind::Custom { value: Arc::new(f), first: None, second: None, regularity: None },
        }
    }

    pub fn with_derivatives(
        mut self,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        if let Kind::Custom { first, second, .. } = &mut self.kind {
            *first = Some(Arc::new(d1));
            *second = Some(Arc::new(d2));
        }
        self
    }

    pub fn with_regularity(mut self, bound: Holder) -> Self {
        if let Kind::Custom { regularity, .. } = &mut self.kind {
            *regularity = Some(bound);
        }
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Raw value, no domain check.
    pub fn value(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Monomial(j) => libm::pow(t, *j as f64),
            Kind::Exp => libm::exp(t),
            Kind::SinScaled { width } => libm::sin(PI * t / (2.0 * width)),
            Kind::AbsHalf => (t - 0.5).abs(),
            Kind::SqrtAbs => libm::sqrt((t - 0.5).abs()),
            Kind::Sampled(data) => data.eval(t),
            Kind::Custom { value, .. } => value(t),
        }
    }

    /// Value at `t`, which must lie in the domain.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !self.domain.contains(t) {
            return Err(Error::OutsideDomain { name: self.name.clone(), t, lo: self.domain.lo, hi: self.domain.hi });
        }
        let v = self.value(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { name: self.name.clone(), t })
        }
    }

    /// `f'(t)` when known.
    pub fn derivative(&self, t: f64) -> Option<f64> {
        match &self.kind {
            Kind::Monomial(0) => Some(0.0),
            Kind::Monomial(j) => Some(*j as f64 * libm::pow(t, (*j - 1) as f64)),
            Kind::Exp => Some(libm::exp(t)),
            Kind::SinScaled { width } => {
                let c = PI / (2.0 * width);
                Some(c * libm::cos(c * t))
            }
            Kind::Custom { first: Some(d), .. } => Some(d(t)),
            _ => None,
        }
    }

    /// `f''(t)` when known.
    pub fn second_derivative(&self, t: f64) -> Option<f64> {
        match &self.kind {
            Kind::Monomial(j) if *j < 2 => Some(0.0),
            Kind::Monomial(j) => Some((*j * (*j - 1)) as f64 * libm::pow(t, (*j - 2) as f64)),
            Kind::Exp => Some(libm::exp(t)),
            Kind::SinScaled { width } => {
                let c = PI / (2.0 * width);
                Some(-c * c * libm::sin(c * t))
            }
            Kind::Custom { second: Some(d), .. } => Some(d(t)),
            _ => None,
        }
    }

    pub fn require_derivative(&self) -> Result<()> {
        match self.derivative(self.domain.lo) {
            Some(_) => Ok(()),
            None => Err(Error::MissingDerivative { name: self.name.clone(), order: 1 }),
        }
    }

    pub fn require_second_derivative(&self) -> Result<()> {
        match self.second_derivative(self.domain.lo) {
            Some(_) => Ok(()),
            None => Err(Error::MissingDerivative { name: self.name.clone(), order: 2 }),
        }
    }

    /// A Hoelder bound valid on the whole domain, when one is known.
    pub fn regularity(&self) -> Option<Holder> {
        let hi = self.domain.hi.abs().max(self.domain.lo.abs());
        match &self.kind {
            Kind::Monomial(0) => Some(Holder::lipschitz(0.0)),
            Kind::Monomial(j) => Some(Holder::lipschitz(*j as f64 * libm::pow(hi, (*j - 1) as f64))),
            Kind::Exp => Some(Holder::lipschitz(libm::exp(self.domain.hi))),
            Kind::SinScaled { width } => Some(Holder::lipschitz(PI / (2.0 * width))),
            Kind::AbsHalf => Some(Holder::lipschitz(1.0)),
            Kind::SqrtAbs => Some(Holder { constant: 1.0, exponent: 0.5 }),
            Kind::Sampled(data) => Some(Holder::lipschitz(data.max_slope())),
            Kind::Custom { regularity, .. } => *regularity,
        }
    }
}
