//! Exact rational reference implementation.
//!
//! Every formula the floating point paths implement is restated here over
//! arbitrary-size rationals, written directly from its defining sum or product
//! (normalizer, negative node powers and all) rather than from the rearranged
//! forms the float code uses. Identities checked here hold with zero tolerance.
//!
//! Only polynomial test functions are supported, and degrees are capped at
//! [`ORACLE_MAX_DEGREE`] because exact binomial products grow quickly.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::calculus::PQParams;
use crate::error::{Error, Result};
use crate::function::FunctionHandle;
use crate::operator::{self, OperatorSpec, UnnormalizedVariant};

pub type Rational = BigRational;

/// Largest `m + ell` the oracle accepts.
pub const ORACLE_MAX_DEGREE: usize = 16;

fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

fn pow(base: &Rational, exp: i64) -> Rational {
    base.pow(exp as i32)
}

/// Exact `(p, q)` with `0 < q < p <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalParams {
    p: Rational,
    q: Rational,
}

impl RationalParams {
    pub fn new(p: Rational, q: Rational) -> Result<Self> {
        if q.is_positive() && q < p && p <= Rational::one() {
            Ok(Self { p, q })
        } else {
            Err(Error::Rational(format!("need 0 < q < p <= 1, got p = {p}, q = {q}")))
        }
    }

    pub fn from_ratios(p_num: i64, p_den: i64, q_num: i64, q_den: i64) -> Result<Self> {
        if p_den == 0 || q_den == 0 {
            return Err(Error::Rational("zero denominator".to_string()));
        }
        Self::new(Rational::new(p_num.into(), p_den.into()), Rational::new(q_num.into(), q_den.into()))
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    /// Nearest floating point parameters.
    pub fn to_float(&self) -> Result<PQParams> {
        PQParams::new(to_f64(&self.p), to_f64(&self.q))
    }
}

/// An operator with exact parameters and `m + ell <= ORACLE_MAX_DEGREE`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSpec {
    pub m: usize,
    pub ell: usize,
    pub params: RationalParams,
}

impl RationalSpec {
    pub fn new(m: usize, ell: usize, params: RationalParams) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDegree { m });
        }
        if m + ell > ORACLE_MAX_DEGREE {
            return Err(Error::DegreeCeiling { n: m + ell, max: ORACLE_MAX_DEGREE });
        }
        Ok(Self { m, ell, params })
    }

    pub fn degree(&self) -> usize {
        self.m + self.ell
    }

    pub fn to_float(&self) -> Result<OperatorSpec> {
        OperatorSpec::new(self.m, self.ell, self.params.to_float()?)
    }
}

/// Polynomial with rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        Self { coeffs }
    }

    /// `t^j`.
    pub fn monomial(j: usize) -> Self {
        let mut coeffs = alloc::vec![Rational::zero(); j + 1];
        coeffs[j] = Rational::one();
        Self { coeffs }
    }

    /// `(t - c)^2`.
    pub fn centered_square(c: &Rational) -> Self {
        Self::new(alloc::vec![c * c, -(c * int(2)), Rational::one()])
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * t + c)
    }
}

/// Rational to the nearest-ish double (via `num-rational`).
pub fn to_f64(v: &Rational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"0.9"`, `"1"`, `"9/10"` or `"-0.25"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::Rational(format!("cannot parse `{text}` as an exact rational"));
    let s = text.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() || !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let mut all = alloc::string::String::from(whole);
    all.push_str(frac);
    let num: BigInt = all.parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let v = Rational::new(num, den);
    Ok(if neg { -v } else { v })
}

/// `[n]_{p,q}` as the exact sum `sum_{i<n} p^{n-1-i} q^i`.
pub fn oracle_pq_integer(n: usize, params: &RationalParams) -> Rational {
    (0..n).fold(Rational::zero(), |acc, i| acc + pow(&params.p, (n - 1 - i) as i64) * pow(&params.q, i as i64))
}

pub fn oracle_pq_factorial(n: usize, params: &RationalParams) -> Rational {
    (1..=n).fold(Rational::one(), |acc, i| acc * oracle_pq_integer(i, params))
}

/// `[n]! / ([k]! [n-k]!)` by brute force.
pub fn oracle_pq_binomial(n: usize, k: usize, params: &RationalParams) -> Result<Rational> {
    if k > n {
        return Err(Error::BinomialIndex { n, k });
    }
    Ok(oracle_pq_factorial(n, params) / (oracle_pq_factorial(k, params) * oracle_pq_factorial(n - k, params)))
}

/// `prod_{s<count} (p^s - q^s x)`.
pub fn oracle_falling_product(x: &Rational, count: usize, params: &RationalParams) -> Rational {
    (0..count).fold(Rational::one(), |acc, s| acc * (pow(&params.p, s as i64) - pow(&params.q, s as i64) * x))
}

fn check_unit(x: &Rational) -> Result<()> {
    if x.is_negative() || *x > Rational::one() {
        Err(Error::PointOutOfRange(to_f64(x)))
    } else {
        Ok(())
    }
}

/// Basis weights and nodes of the normalized operator at `x`:
/// `p^{-n(n-1)/2} [n k] p^{k(k-1)/2} x^k prod(p^s - q^s x)` and `[k] / (p^{k-n} [m])`.
pub fn oracle_basis(spec: &RationalSpec, x: &Rational) -> Result<Vec<(Rational, Rational)>> {
    check_unit(x)?;
    let n = spec.degree();
    let rp = &spec.params;
    let p = &rp.p;
    let ints: Vec<Rational> = (0..=n).map(|i| oracle_pq_integer(i, rp)).collect();
    let mut facts = alloc::vec![Rational::one()];
    for i in 1..=n {
        let next = &facts[i - 1] * &ints[i];
        facts.push(next);
    }
    let normalizer = pow(p, (n * n.saturating_sub(1) / 2) as i64);
    (0..=n)
        .map(|k| {
            let node = &ints[k] / (pow(p, k as i64 - n as i64) * &ints[spec.m]);
            let weight = &facts[n] / (&facts[k] * &facts[n - k])
                * pow(p, (k * k.saturating_sub(1) / 2) as i64)
                * pow(x, k as i64)
                * oracle_falling_product(x, n - k, rp)
                / &normalizer;
            Ok((weight, node))
        })
        .collect()
}

fn apply(basis: &[(Rational, Rational)], f: &Polynomial) -> Rational {
    basis.iter().fold(Rational::zero(), |acc, (w, t)| acc + w * f.eval(t))
}

/// The normalized operator applied to a polynomial, summed exactly:
/// `p^{-n(n-1)/2} sum_k [n k] p^{k(k-1)/2} x^k prod(p^s - q^s x) f([k] / (p^{k-n} [m]))`.
pub fn oracle_evaluate(spec: &RationalSpec, f: &Polynomial, x: &Rational) -> Result<Rational> {
    Ok(apply(&oracle_basis(spec, x)?, f))
}

/// The unnormalized predecessors, summed exactly.
pub fn oracle_evaluate_unnormalized(
    spec: &RationalSpec,
    variant: UnnormalizedVariant,
    f: &Polynomial,
    x: &Rational,
) -> Result<Rational> {
    check_unit(x)?;
    let n = spec.degree();
    let rp = &spec.params;
    let denom = match variant {
        UnnormalizedVariant::Bernstein => oracle_pq_integer(n, rp),
        UnnormalizedVariant::Schurer => oracle_pq_integer(spec.m, rp),
    };
    let mut sum = Rational::zero();
    for k in 0..=n {
        let node = oracle_pq_integer(k, rp) / &denom;
        sum += oracle_pq_binomial(n, k, rp)? * pow(x, k as i64) * oracle_falling_product(x, n - k, rp) * f.eval(&node);
    }
    Ok(sum)
}

fn q_schurer_basis(m: usize, ell: usize, q: &Rational, x: &Rational) -> Result<Vec<(Rational, Rational)>> {
    check_unit(x)?;
    let rp = RationalParams::new(Rational::one(), q.clone())?;
    let spec = RationalSpec::new(m, ell, rp)?;
    let n = spec.degree();
    let mut ints = alloc::vec![Rational::zero()];
    for j in 0..n {
        let next = &ints[j] + pow(q, j as i64);
        ints.push(next);
    }
    let mut facts = alloc::vec![Rational::one()];
    for i in 1..=n {
        let next = &facts[i - 1] * &ints[i];
        facts.push(next);
    }
    Ok((0..=n)
        .map(|k| {
            let binom = &facts[n] / (&facts[k] * &facts[n - k]);
            let prod = (0..n - k).fold(Rational::one(), |acc, s| acc * (Rational::one() - pow(q, s as i64) * x));
            (binom * pow(x, k as i64) * prod, &ints[k] / &ints[m])
        })
        .collect())
}

/// The q-Bernstein-Schurer operator (the `p = 1` form) with exact `q`,
/// built from q-integers `1 + q + ... + q^{k-1}` alone.
pub fn oracle_q_schurer_evaluate(m: usize, ell: usize, q: &Rational, f: &Polynomial, x: &Rational) -> Result<Rational> {
    Ok(apply(&q_schurer_basis(m, ell, q, x)?, f))
}

/// Closed forms `[B(e0), B(e1), B(e2)]` at `x`.
pub fn oracle_closed_form_moments(spec: &RationalSpec, x: &Rational) -> [Rational; 3] {
    let rp = &spec.params;
    let n = spec.degree();
    let big = oracle_pq_integer(n, rp);
    let below = oracle_pq_integer(n - 1, rp);
    let m_int = oracle_pq_integer(spec.m, rp);
    let m_sq = &m_int * &m_int;
    let e1 = &big / &m_int * x;
    let e2 = pow(&rp.p, (n - 1) as i64) * &big / &m_sq * x + &rp.q * &big * &below / &m_sq * x * x;
    [Rational::one(), e1, e2]
}

/// Closed forms of `B(t - 1)`, `B(t - x)` and `B((t - x)^2)` at `x`.
pub fn oracle_closed_form_central(spec: &RationalSpec, x: &Rational) -> [Rational; 3] {
    let rp = &spec.params;
    let n = spec.degree();
    let big = oracle_pq_integer(n, rp);
    let below = oracle_pq_integer(n - 1, rp);
    let m_int = oracle_pq_integer(spec.m, rp);
    let m_sq = &m_int * &m_int;
    let ratio = &big / &m_int;
    let shifted = &ratio * x - Rational::one();
    let first = (&ratio - Rational::one()) * x;
    let second = pow(&rp.p, (n - 1) as i64) * &big / &m_sq * x
        + (Rational::one() - int(2) * &ratio + &rp.q * &below * &big / &m_sq) * x * x;
    [shifted, first, second]
}

/// The squared error radius written out term by term:
/// `[n] p^{n-1} x / [m]^2 + (([n]/[m] - 1)^2 + [n](q[n-1] - [n]) / [m]^2) x^2`.
pub fn oracle_delta_squared(spec: &RationalSpec, x: &Rational) -> Rational {
    let rp = &spec.params;
    let n = spec.degree();
    let big = oracle_pq_integer(n, rp);
    let below = oracle_pq_integer(n - 1, rp);
    let m_int = oracle_pq_integer(spec.m, rp);
    let m_sq = &m_int * &m_int;
    let bias = &big / &m_int - Rational::one();
    &big / &m_sq * pow(&rp.p, (n - 1) as i64) * x + (&bias * &bias + &big * (&rp.q * &below - &big) / &m_sq) * x * x
}

/// Outcome of [`oracle_moment_identity_check`]; each flag is an exact equality
/// over the points `0, 1/4, 1/2, 3/4, 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    /// `B(e0) = 1`.
    pub partition_of_unity: bool,
    /// `B(e1) = [n]/[m] x`.
    pub first_moment: bool,
    /// `B(e2) = p^{n-1}[n] x/[m]^2 + q[n][n-1] x^2/[m]^2`.
    pub second_moment: bool,
    /// `B(e1) - B(e0) = [n]/[m] x - 1` and `B(e1) - x B(e0) = ([n]/[m] - 1) x`.
    pub first_central: bool,
    /// The expanded second central moment equals both
    /// `B(e2) - 2x B(e1) + x^2 B(e0)` and `B((t - x)^2)`.
    pub second_central: bool,
    /// The term-by-term squared radius equals `B((t - x)^2)`.
    pub delta_squared: bool,
    /// With `p = 1`: agreement with the q-Schurer operator for `e0, e1, e2`.
    pub q_reduction: Option<bool>,
}

impl IdentityReport {
    pub fn all_hold(&self) -> bool {
        self.partition_of_unity
            && self.first_moment
            && self.second_moment
            && self.first_central
            && self.second_central
            && self.delta_squared
            && self.q_reduction.unwrap_or(true)
    }
}

/// The rational sample points used by the identity check.
pub fn identity_points() -> [Rational; 5] {
    [
        int(0),
        Rational::new(1.into(), 4.into()),
        Rational::new(1.into(), 2.into()),
        Rational::new(3.into(), 4.into()),
        int(1),
    ]
}

pub fn oracle_moment_identity_check(spec: &RationalSpec) -> Result<IdentityReport> {
    let monos = [Polynomial::monomial(0), Polynomial::monomial(1), Polynomial::monomial(2)];
    let p_is_one = spec.params.p.is_one();
    let mut report = IdentityReport {
        partition_of_unity: true,
        first_moment: true,
        second_moment: true,
        first_central: true,
        second_central: true,
        delta_squared: true,
        q_reduction: p_is_one.then_some(true),
    };
    for x in identity_points() {
        let basis = oracle_basis(spec, &x)?;
        let b: Vec<Rational> = monos.iter().map(|f| apply(&basis, f)).collect();
        let closed = oracle_closed_form_moments(spec, &x);
        let central = oracle_closed_form_central(spec, &x);
        report.partition_of_unity &= b[0] == closed[0];
        report.first_moment &= b[1] == closed[1];
        report.second_moment &= b[2] == closed[2];
        report.first_central &= &b[1] - &b[0] == central[0] && &b[1] - &x * &b[0] == central[1];
        let by_linearity = &b[2] - int(2) * &x * &b[1] + &x * &x * &b[0];
        let direct = apply(&basis, &Polynomial::centered_square(&x));
        report.second_central &= by_linearity == central[2] && direct == central[2];
        report.delta_squared &= oracle_delta_squared(spec, &x) == direct;
        if p_is_one {
            let q_basis = q_schurer_basis(spec.m, spec.ell, &spec.params.q, &x)?;
            let agree = monos.iter().zip(&b).all(|(f, bj)| apply(&q_basis, f) == *bj);
            report.q_reduction = Some(report.q_reduction.unwrap_or(true) && agree);
        }
    }
    Ok(report)
}

/// Largest `|float - exact| / max(1, |exact|)` of the floating point operator
/// against the oracle, over `e0, e1, e2` and the identity points.
pub fn oracle_float_agreement(spec: &RationalSpec) -> Result<f64> {
    let fspec = spec.to_float()?;
    let domain_hi = (spec.ell + 1) as f64;
    let handles: Vec<FunctionHandle> = (0..3u32).map(|j| FunctionHandle::monomial(j, domain_hi)).collect();
    let mut worst: f64 = 0.0;
    for x in identity_points() {
        let basis = oracle_basis(spec, &x)?;
        for (j, handle) in handles.iter().enumerate() {
            let exact = to_f64(&apply(&basis, &Polynomial::monomial(j)));
            let got = operator::evaluate(&fspec, handle, to_f64(&x))?;
            worst = worst.max((got - exact).abs() / exact.abs().max(1.0));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn params(pn: i64, pd: i64, qn: i64, qd: i64) -> RationalParams {
        RationalParams::from_ratios(pn, pd, qn, qd).unwrap()
    }

    #[test]
    fn pq_integer_examples() {
        assert_eq!(oracle_pq_integer(3, &params(1, 1, 1, 2)), r(7, 4));
        assert_eq!(oracle_pq_integer(0, &params(1, 1, 1, 2)), r(0, 1));
        assert_eq!(oracle_pq_integer(4, &params(1, 2, 1, 4)), r(15, 64));
        // Agrees with (p^n - q^n) / (p - q).
        let rp = params(9, 10, 4, 5);
        for n in 0..20 {
            let closed = (pow(rp.p(), n) - pow(rp.q(), n)) / (rp.p() - rp.q());
            assert_eq!(oracle_pq_integer(n as usize, &rp), closed);
        }
    }

    #[test]
    fn rejects_bad_params_and_degrees() {
        assert!(RationalParams::from_ratios(1, 2, 1, 2).is_err());
        assert!(RationalParams::from_ratios(3, 2, 1, 2).is_err());
        assert!(RationalParams::from_ratios(1, 2, 0, 1).is_err());
        let rp = params(1, 1, 1, 2);
        assert!(matches!(RationalSpec::new(10, 7, rp.clone()), Err(Error::DegreeCeiling { .. })));
        assert!(RationalSpec::new(0, 3, rp).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let spec = RationalSpec::new(2, 1, params(9, 10, 4, 5)).unwrap();
        let half = r(1, 2);
        assert_eq!(oracle_evaluate(&spec, &Polynomial::monomial(0), &half).unwrap(), r(1, 1));
        let e1 = oracle_evaluate(&spec, &Polynomial::monomial(1), &half).unwrap();
        // [3] = 217/100, [2] = 17/10.
        assert_eq!(e1, r(217, 100) / r(17, 10) * &half);
        assert_eq!(e1, r(217, 340));
        let spec = RationalSpec::new(1, 0, params(1, 1, 1, 2)).unwrap();
        assert_eq!(oracle_evaluate(&spec, &Polynomial::monomial(2), &half).unwrap(), r(1, 2));
        assert!(oracle_evaluate(&spec, &Polynomial::monomial(2), &r(3, 2)).is_err());
    }

    #[test]
    fn q_schurer_example() {
        let v = oracle_q_schurer_evaluate(2, 1, &r(4, 5), &Polynomial::monomial(1), &r(1, 2)).unwrap();
        assert_eq!(v, r(244, 100) / r(18, 10) * r(1, 2));
    }

    #[test]
    fn identity_check_examples() {
        let cases = [
            RationalSpec::new(1, 0, params(9, 10, 4, 5)).unwrap(),
            RationalSpec::new(3, 2, params(9, 10, 4, 5)).unwrap(),
            RationalSpec::new(5, 1, params(1, 1, 1, 2)).unwrap(),
        ];
        for spec in &cases {
            let report = oracle_moment_identity_check(spec).unwrap();
            assert!(report.all_hold(), "{spec:?}: {report:?}");
        }
        assert_eq!(oracle_moment_identity_check(&cases[2]).unwrap().q_reduction, Some(true));
        assert_eq!(oracle_moment_identity_check(&cases[1]).unwrap().q_reduction, None);
    }

    #[test]
    fn squared_radius_is_the_second_central_moment_not_bias_plus_it() {
        // With ell > 0 the bias B(t - x) is nonzero, so adding its square to the
        // second central moment overshoots the squared radius.
        let spec = RationalSpec::new(2, 1, params(9, 10, 4, 5)).unwrap();
        let x = r(1, 2);
        let [_, bias, second] = oracle_closed_form_central(&spec, &x);
        let radius_sq = oracle_delta_squared(&spec, &x);
        assert_eq!(radius_sq, second);
        assert_ne!(radius_sq, &bias * &bias + &second);
    }

    #[test]
    fn unnormalized_defect() {
        let spec = RationalSpec::new(3, 0, params(1, 2, 1, 4)).unwrap();
        let v = oracle_evaluate_unnormalized(&spec, UnnormalizedVariant::Schurer, &Polynomial::monomial(0), &r(1, 2))
            .unwrap();
        assert_ne!(v, r(1, 1));
        // Same sum with the p^{k(k-1)/2} weights restored is p^{n(n-1)/2}.
        let mut restored = Rational::zero();
        let rp = &spec.params;
        for k in 0..=3usize {
            restored += oracle_pq_binomial(3, k, rp).unwrap()
                * pow(rp.p(), (k * k.saturating_sub(1) / 2) as i64)
                * pow(&r(1, 2), k as i64)
                * oracle_falling_product(&r(1, 2), 3 - k, rp);
        }
        assert_eq!(restored, pow(rp.p(), 3));
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("0.9").unwrap(), r(9, 10));
        assert_eq!(parse_rational("1").unwrap(), r(1, 1));
        assert_eq!(parse_rational("49/50").unwrap(), r(49, 50));
        assert_eq!(parse_rational("-0.25").unwrap(), r(-1, 4));
        assert_eq!(parse_rational(".5").unwrap(), r(1, 2));
        for bad in ["", "abc", "1/0", "0.9.1", "1e-3", "."] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn float_path_matches_oracle() {
        for rp in [params(1, 1, 1, 2), params(9, 10, 4, 5), params(99, 100, 49, 50)] {
            for (m, ell) in [(1, 0), (2, 1), (4, 3), (7, 5)] {
                let spec = RationalSpec::new(m, ell, rp.clone()).unwrap();
                let err = oracle_float_agreement(&spec).unwrap();
                assert!(err <= 1e-12, "m={m} ell={ell}: {err}");
            }
        }
    }
}
