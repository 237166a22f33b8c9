//! Evaluation of the normalized (p,q)-Bernstein-Schurer operator and of the
//! operators it generalizes or replaces.
//!
//! For `n = m + ell` and `x` in `[0, 1]` the normalized basis is
//!
//! ```text
//! w_k(x) = [n k]_{p,q} p^{k(k-1)/2} x^k prod_{s<n-k} (p^s - q^s x) / p^{n(n-1)/2}
//! ```
//!
//! sampled at `t_k = [k]_{p,q} p^{n-k} / [m]_{p,q}`. Pulling `p^s` out of every
//! product factor and `p^{k(n-k)}` out of the binomial, all powers of `p`
//! cancel and the weight becomes the q-Bernstein weight in `r = q / p`:
//!
//! ```text
//! w_k(x) = [n k]_r x^k prod_{s<n-k} (1 - r^s x),    t_k = p^ell [k]_r / [m]_r.
//! ```
//!
//! Weights are formed from that expression in log space, which keeps them
//! finite for degrees where `p^{n(n-1)/2}` alone underflows. The endpoints
//! `x = 0` and `x = 1` have a single surviving term and are set exactly.

use alloc::vec::Vec;

use crate::calculus::{check_degree, falling_product, pq_binomial, pq_integer, r_integers, CompensatedSum, PQParams};
use crate::error::{Error, Result};
use crate::function::{FunctionHandle, Interval};

/// One concrete operator: degree `m`, shift `ell`, parameters `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSpec {
    m: usize,
    ell: usize,
    params: PQParams,
}

impl OperatorSpec {
    pub fn new(m: usize, ell: usize, params: PQParams) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDegree { m });
        }
        check_degree(m.saturating_add(ell))?;
        Ok(Self { m, ell, params })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn params(&self) -> PQParams {
        self.params
    }

    /// `m + ell`, the number of basis functions minus one.
    pub fn degree(&self) -> usize {
        self.m + self.ell
    }

    /// `[0, ell + 1]`.
    pub fn domain(&self) -> Interval {
        Interval::schurer(self.ell)
    }

    /// Sample points `t_0 < ... < t_n`.
    pub fn nodes(&self) -> Vec<f64> {
        let r = self.params.ratio();
        let ints = r_integers(self.degree(), r);
        let scale = libm::pow(self.params.p(), self.ell as f64) / ints[self.m];
        ints.iter().map(|v| v * scale).collect()
    }
}

/// Normalized weights and sample points for one `(spec, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    weights: Vec<f64>,
    nodes: Vec<f64>,
    x: f64,
}

impl WeightTable {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn weight_sum(&self) -> f64 {
        let mut sum = CompensatedSum::default();
        self.weights.iter().for_each(|w| sum.add(*w));
        sum.value()
    }

    /// `sum_k w_k g(t_k)` for an unchecked closure.
    pub fn apply(&self, g: impl Fn(f64) -> f64) -> f64 {
        let mut sum = CompensatedSum::default();
        for (w, t) in self.weights.iter().zip(&self.nodes) {
            if *w != 0.0 {
                sum.add(w * g(*t));
            }
        }
        sum.value()
    }
}

fn check_point(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::PointOutOfRange(x))
    }
}

pub fn weight_table(spec: &OperatorSpec, x: f64) -> Result<WeightTable> {
    check_point(x)?;
    let n = spec.degree();
    let r = spec.params.ratio();
    let ints = r_integers(n, r);
    let scale = libm::pow(spec.params.p(), spec.ell as f64) / ints[spec.m];
    let nodes: Vec<f64> = ints.iter().map(|v| v * scale).collect();

    let mut weights = alloc::vec![0.0; n + 1];
    if x == 0.0 {
        weights[0] = 1.0;
    } else if x == 1.0 {
        weights[n] = 1.0;
    } else {
        let ln_ints: Vec<f64> = ints.iter().map(|v| libm::log(*v)).collect();
        // tail[j] = sum_{s<j} ln(1 - r^s x)
        let mut tail = Vec::with_capacity(n + 1);
        let (mut acc, mut r_pow) = (0.0, 1.0);
        tail.push(acc);
        for _ in 0..n {
            acc += libm::log1p(-r_pow * x);
            r_pow *= r;
            tail.push(acc);
        }
        let ln_x = libm::log(x);
        let mut ln_binom = 0.0;
        for k in 0..=n {
            if k > 0 {
                ln_binom += ln_ints[n - k + 1] - ln_ints[k];
            }
            weights[k] = libm::exp(ln_binom + k as f64 * ln_x + tail[n - k]);
        }
    }
    Ok(WeightTable { weights, nodes, x })
}

/// `B(f; x)`.
pub fn evaluate(spec: &OperatorSpec, f: &FunctionHandle, x: f64) -> Result<f64> {
    let table = weight_table(spec, x)?;
    let mut sum = CompensatedSum::default();
    for (w, t) in table.weights.iter().zip(&table.nodes) {
        if *w != 0.0 {
            sum.add(w * f.eval(*t)?);
        }
    }
    Ok(sum.value())
}

/// [`evaluate`] over a list of points, order preserved.
pub fn evaluate_grid(spec: &OperatorSpec, f: &FunctionHandle, xs: &[f64]) -> Result<Vec<f64>> {
    xs.iter().map(|&x| evaluate(spec, f, x)).collect()
}

/// The two operators that lack the `p^{k(k-1)/2} / p^{n(n-1)/2}` normalization.
///
/// Neither reproduces constants when `p < 1`; they are kept to exhibit that.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnnormalizedVariant {
    /// Degree `n = m + ell` Bernstein form with nodes `[k] / [n]`.
    Bernstein,
    /// Schurer form with nodes `[k] / [m]`.
    Schurer,
}

/// `sum_k [n k]_{p,q} x^k prod_{s<n-k}(p^s - q^s x) f(t_k)`, summed directly.
///
/// For `p < 1` the (p,q)-integers need not increase with `k`, so nodes can
/// leave `[0, ell + 1]`; `f` is then evaluated by its formula outside the
/// declared domain.
pub fn evaluate_unnormalized(
    spec: &OperatorSpec,
    f: &FunctionHandle,
    x: f64,
    variant: UnnormalizedVariant,
) -> Result<f64> {
    check_point(x)?;
    let n = spec.degree();
    let params = spec.params;
    let denom = match variant {
        UnnormalizedVariant::Bernstein => pq_integer(n, params)?,
        UnnormalizedVariant::Schurer => pq_integer(spec.m, params)?,
    };
    let mut sum = CompensatedSum::default();
    for k in 0..=n {
        let w = pq_binomial(n, k, params)? * libm::pow(x, k as f64) * falling_product(x, n - k, params)?;
        if w != 0.0 {
            let t = pq_integer(k, params)? / denom;
            let v = f.value(t);
            if !v.is_finite() {
                return Err(Error::NonFinite { name: f.name().into(), t });
            }
            sum.add(w * v);
        }
    }
    Ok(sum.value())
}

fn check_schurer_args(m: usize, ell: usize, x: f64) -> Result<usize> {
    if m == 0 {
        return Err(Error::InvalidDegree { m });
    }
    let n = m.saturating_add(ell);
    check_degree(n)?;
    check_point(x)?;
    Ok(n)
}

/// q-Bernstein-Schurer operator
/// `sum_k [n k]_q x^k prod_{s<n-k}(1 - q^s x) f([k]_q / [m]_q)`.
///
/// Written independently of [`evaluate`]: Gaussian binomials come from the
/// q-Pascal rule and everything is summed in linear space.
pub fn q_schurer_evaluate(m: usize, ell: usize, q: f64, f: &FunctionHandle, x: f64) -> Result<f64> {
    let n = check_schurer_args(m, ell, x)?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParams { p: 1.0, q });
    }
    let q_int = |i: usize| (0..i).map(|j| libm::pow(q, j as f64)).sum::<f64>();
    // [i k]_q = [i-1 k-1]_q + q^k [i-1 k]_q
    let mut row = alloc::vec![0.0; n + 1];
    row[0] = 1.0;
    for i in 1..=n {
        for k in (1..=i).rev() {
            row[k] = row[k - 1] + libm::pow(q, k as f64) * row[k];
        }
    }
    let m_int = q_int(m);
    let mut sum = CompensatedSum::default();
    for (k, binom) in row.iter().enumerate() {
        let mut w = binom * libm::pow(x, k as f64);
        for s in 0..n - k {
            w *= 1.0 - libm::pow(q, s as f64) * x;
        }
        if w != 0.0 {
            sum.add(w * f.eval(q_int(k) / m_int)?);
        }
    }
    Ok(sum.value())
}

/// Classical Schurer operator `sum_k C(n, k) x^k (1-x)^{n-k} f(k/m)`.
pub fn classical_schurer_evaluate(m: usize, ell: usize, f: &FunctionHandle, x: f64) -> Result<f64> {
    let n = check_schurer_args(m, ell, x)?;
    let mut sum = CompensatedSum::default();
    let mut binom = 1.0;
    for k in 0..=n {
        if k > 0 {
            binom = binom * (n - k + 1) as f64 / k as f64;
        }
        let w = binom * libm::pow(x, k as f64) * libm::pow(1.0 - x, (n - k) as f64);
        if w != 0.0 {
            sum.add(w * f.eval(k as f64 / m as f64)?);
        }
    }
    Ok(sum.value())
}
