//! (p,q)-integers and the quantities built from them.
//!
//! Everything here is evaluated in summation or product form. The closed form
//! `[n] = (p^n - q^n) / (p - q)` is never used in floating point because it
//! cancels catastrophically when `q` is close to `p`.
//!
//! Several helpers factor a power of `p` out of a (p,q)-quantity and work with
//! the ratio `r = q / p` instead, using `[n]_{p,q} = p^{n-1} [n]_r` where
//! `[n]_r = 1 + r + ... + r^{n-1}`. That keeps ratios of (p,q)-integers finite
//! even when the individual integers would underflow.

use crate::error::{Error, Result};

/// Largest degree accepted by any operation in this crate.
pub const MAX_DEGREE: usize = 500;

/// Products of more factors than this are accumulated with a separate
/// binary exponent.
const SCALED_PRODUCT_THRESHOLD: usize = 64;

/// Linear binomial recurrence switches to logarithms outside this band.
const BINOMIAL_HIGH: f64 = 1e300;
const BINOMIAL_LOW: f64 = 1e-300;

/// The deformation pair `(p, q)` with `0 < q < p <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PQParams {
    p: f64,
    q: f64,
}

impl PQParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        // Written so that NaN fails every comparison.
        if q > 0.0 && q < p && p <= 1.0 {
            Ok(Self { p, q })
        } else {
            Err(Error::InvalidParams { p, q })
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `q / p`, always in `(0, 1)`.
    pub fn ratio(&self) -> f64 {
        self.q / self.p
    }
}

pub(crate) fn check_degree(n: usize) -> Result<()> {
    if n > MAX_DEGREE {
        Err(Error::DegreeCeiling { n, max: MAX_DEGREE })
    } else {
        Ok(())
    }
}

/// `[n]_{p,q} = sum_{i=0}^{n-1} p^{n-1-i} q^i`; zero for `n = 0`.
pub fn pq_integer(n: usize, params: PQParams) -> Result<f64> {
    check_degree(n)?;
    let (p, q) = (params.p, params.q);
    // [k+1] = p [k] + q^k: a sum of nonnegative terms.
    let mut acc = 0.0;
    let mut q_pow = 1.0;
    for _ in 0..n {
        acc = p * acc + q_pow;
        q_pow *= q;
    }
    Ok(acc)
}

/// `[n]_r = 1 + r + ... + r^{n-1}` for `r` in `(0, 1]`.
pub(crate) fn r_integer(n: usize, r: f64) -> f64 {
    let mut acc = 0.0;
    let mut r_pow = 1.0;
    for _ in 0..n {
        acc += r_pow;
        r_pow *= r;
    }
    acc
}

/// `[i]_r` for `i = 0..=n`, built with `[i+1]_r = 1 + r [i]_r`.
pub(crate) fn r_integers(n: usize, r: f64) -> alloc::vec::Vec<f64> {
    let mut out = alloc::vec::Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(acc);
    for _ in 0..n {
        acc = 1.0 + r * acc;
        out.push(acc);
    }
    out
}

/// `[a]_{p,q} / [b]_{p,q}` without forming either integer. `b` must be at least 1.
pub fn pq_integer_ratio(a: usize, b: usize, params: PQParams) -> f64 {
    debug_assert!(b >= 1);
    let r = params.ratio();
    let shift = a as i32 - b as i32;
    libm::pow(params.p, shift as f64) * r_integer(a, r) / r_integer(b, r)
}

/// Natural log of `[n]_{p,q}`; `-inf` for `n = 0`.
pub fn ln_pq_integer(n: usize, params: PQParams) -> Result<f64> {
    check_degree(n)?;
    if n == 0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok((n - 1) as f64 * libm::log(params.p) + libm::log(r_integer(n, params.ratio())))
}

/// `[n]_{p,q}! = [1][2]...[n]`, with `[0]! = 1`.
pub fn pq_factorial(n: usize, params: PQParams) -> Result<f64> {
    check_degree(n)?;
    let mut product = Product::new(n > SCALED_PRODUCT_THRESHOLD);
    for i in 1..=n {
        product.mul(pq_integer(i, params)?);
    }
    Ok(product.value())
}

/// Natural log of `[n]_{p,q}!`.
pub fn ln_pq_factorial(n: usize, params: PQParams) -> Result<f64> {
    check_degree(n)?;
    let mut acc = 0.0;
    for i in 1..=n {
        acc += ln_pq_integer(i, params)?;
    }
    Ok(acc)
}

/// Gaussian (p,q)-binomial `[n]! / ([k]! [n-k]!)`.
///
/// Computed with `C(n, j) = C(n, j-1) [n-j+1] / [j]` over the shorter side, so
/// `pq_binomial(n, k)` and `pq_binomial(n, n - k)` agree bit for bit. If an
/// intermediate leaves `[1e-300, 1e300]` the value is recomputed in log space.
pub fn pq_binomial(n: usize, k: usize, params: PQParams) -> Result<f64> {
    check_degree(n)?;
    if k > n {
        return Err(Error::BinomialIndex { n, k });
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for j in 1..=k {
        acc *= pq_integer_ratio(n - j + 1, j, params);
        if !(BINOMIAL_LOW..=BINOMIAL_HIGH).contains(&acc) {
            return Ok(libm::exp(ln_pq_binomial(n, k, params)?));
        }
    }
    Ok(acc)
}

/// Natural log of the (p,q)-binomial.
pub fn ln_pq_binomial(n: usize, k: usize, params: PQParams) -> Result<f64> {
    check_degree(n)?;
    if k > n {
        return Err(Error::BinomialIndex { n, k });
    }
    let k = k.min(n - k);
    let ln_p = libm::log(params.p);
    let r = params.ratio();
    let mut acc = 0.0;
    for j in 1..=k {
        let shift = (n - j + 1) as f64 - j as f64;
        acc += shift * ln_p + libm::log(r_integer(n - j + 1, r)) - libm::log(r_integer(j, r));
    }
    Ok(acc)
}

/// `prod_{s=0}^{count-1} (p^s - q^s x)`.
///
/// Every factor is nonnegative for `x` in `[0, 1]`.
pub fn falling_product(x: f64, count: usize, params: PQParams) -> Result<f64> {
    check_degree(count)?;
    let mut product = Product::new(count > SCALED_PRODUCT_THRESHOLD);
    let (mut p_pow, mut q_pow) = (1.0, 1.0);
    for _ in 0..count {
        product.mul(p_pow - q_pow * x);
        p_pow *= params.p;
        q_pow *= params.q;
    }
    Ok(product.value())
}

/// The same product evaluated through the binomial expansion
/// `sum_k p^{(c-k)(c-k-1)/2} q^{k(k-1)/2} [c k]_{p,q} (-x)^k`.
///
/// The sum alternates in sign, so it is accumulated with Neumaier
/// compensation. Intended as a cross-check of [`falling_product`].
pub fn expand_product(x: f64, count: usize, params: PQParams) -> Result<f64> {
    check_degree(count)?;
    let mut sum = CompensatedSum::default();
    for k in 0..=count {
        let p_exp = ((count - k) * (count - k).saturating_sub(1) / 2) as i32;
        let q_exp = (k * k.saturating_sub(1) / 2) as i32;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = libm::pow(params.p, p_exp as f64)
            * libm::pow(params.q, q_exp as f64)
            * pq_binomial(count, k, params)?
            * libm::pow(x, k as f64)
            * sign;
        sum.add(term);
    }
    Ok(sum.value())
}

#[derive(Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Running product that optionally keeps its binary exponent apart from the
/// mantissa, so long products of small factors do not underflow midway.
enum Product {
    Plain(f64),
    Scaled { mantissa: f64, exponent: i32 },
}

impl Product {
    fn new(scaled: bool) -> Self {
        if scaled {
            Product::Scaled { mantissa: 1.0, exponent: 0 }
        } else {
            Product::Plain(1.0)
        }
    }

    fn mul(&mut self, v: f64) {
        match self {
            Product::Plain(acc) => *acc *= v,
            Product::Scaled { mantissa, exponent } => {
                let (vm, ve) = libm::frexp(v);
                let (m, e) = libm::frexp(*mantissa * vm);
                *mantissa = m;
                *exponent = exponent.saturating_add(ve).saturating_add(e);
            }
        }
    }

    fn value(&self) -> f64 {
        match *self {
            Product::Plain(acc) => acc,
            Product::Scaled { mantissa, exponent } => {
                if mantissa == 0.0 {
                    0.0
                } else {
                    libm::ldexp(mantissa, exponent)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{self, Rational, RationalParams};
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn params(p: f64, q: f64) -> PQParams {
        PQParams::new(p, q).unwrap()
    }

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    fn rational_sets() -> [(i64, i64, i64, i64); 4] {
        [(1, 1, 1, 2), (9, 10, 4, 5), (99, 100, 49, 50), (1, 2, 1, 4)]
    }

    #[test]
    fn rejects_invalid_params() {
        for (p, q) in [(0.5, 0.5), (0.5, 0.6), (1.1, 0.5), (1.0, 0.0), (f64::NAN, 0.5), (0.5, -0.1)] {
            assert!(PQParams::new(p, q).is_err(), "({p}, {q})");
        }
        assert!(PQParams::new(1.0, 0.999999).is_ok());
    }

    #[test]
    fn pq_integer_examples() {
        assert_eq!(pq_integer(0, params(0.9, 0.8)).unwrap(), 0.0);
        assert_eq!(pq_integer(3, params(1.0, 0.5)).unwrap(), 1.75);
        assert_eq!(pq_integer(4, params(0.5, 0.25)).unwrap(), 0.234375);
        assert!(pq_integer(MAX_DEGREE + 1, params(0.9, 0.8)).is_err());
    }

    #[test]
    fn pq_factorial_examples() {
        assert_eq!(pq_factorial(0, params(0.9, 0.8)).unwrap(), 1.0);
        assert_eq!(pq_factorial(2, params(1.0, 0.5)).unwrap(), 1.5);
        assert_eq!(pq_factorial(3, params(1.0, 0.5)).unwrap(), 2.625);
    }

    #[test]
    fn pq_binomial_examples() {
        for n in 0..6 {
            assert_eq!(pq_binomial(n, 0, params(0.9, 0.8)).unwrap(), 1.0);
        }
        assert_eq!(pq_binomial(3, 1, params(1.0, 0.5)).unwrap(), 1.75);
        let exact = oracle::oracle_pq_binomial(4, 2, &RationalParams::from_ratios(9, 10, 4, 5).unwrap())
            .unwrap()
            .to_f64()
            .unwrap();
        assert!(rel_err(pq_binomial(4, 2, params(0.9, 0.8)).unwrap(), exact) < 1e-14);
        assert_eq!(pq_binomial(3, 4, params(0.9, 0.8)), Err(Error::BinomialIndex { n: 3, k: 4 }));
    }

    #[test]
    fn falling_product_examples() {
        assert_eq!(falling_product(0.3, 0, params(0.9, 0.8)).unwrap(), 1.0);
        assert_eq!(falling_product(1.0, 2, params(1.0, 0.5)).unwrap(), 0.0);
        assert!((falling_product(0.0, 3, params(0.9, 0.8)).unwrap() - 0.729).abs() < 1e-15);
    }

    #[test]
    fn expand_product_examples() {
        assert_eq!(expand_product(0.4, 0, params(0.9, 0.8)).unwrap(), 1.0);
        for n in 0usize..8 {
            let want = libm::pow(0.9, (n * n.saturating_sub(1) / 2) as f64);
            assert!(rel_err(expand_product(0.0, n, params(0.9, 0.8)).unwrap(), want) < 1e-14);
        }
        let rp = RationalParams::from_ratios(9, 10, 4, 5).unwrap();
        let exact = oracle::oracle_falling_product(&Rational::new(1.into(), 2.into()), 3, &rp).to_f64().unwrap();
        assert!(rel_err(expand_product(0.5, 3, params(0.9, 0.8)).unwrap(), exact) < 1e-13);
        assert!(rel_err(falling_product(0.5, 3, params(0.9, 0.8)).unwrap(), exact) < 1e-14);
    }

    #[test]
    fn matches_exact_oracle_up_to_thirty() {
        for (pn, pd, qn, qd) in rational_sets() {
            let rp = RationalParams::from_ratios(pn, pd, qn, qd).unwrap();
            let fp = params(pn as f64 / pd as f64, qn as f64 / qd as f64);
            for n in 0..=30 {
                let exact = oracle::oracle_pq_integer(n, &rp).to_f64().unwrap();
                let got = pq_integer(n, fp).unwrap();
                if n == 0 {
                    assert_eq!(got, 0.0);
                } else {
                    assert!(rel_err(got, exact) <= 1e-12, "n = {n}: {got} vs {exact}");
                }
            }
            for n in 0..=12 {
                let exact = oracle::oracle_pq_factorial(n, &rp).to_f64().unwrap();
                assert!(rel_err(pq_factorial(n, fp).unwrap(), exact) <= 1e-12);
                for k in 0..=n {
                    let exact = oracle::oracle_pq_binomial(n, k, &rp).unwrap().to_f64().unwrap();
                    assert!(rel_err(pq_binomial(n, k, fp).unwrap(), exact) <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn long_products_do_not_underflow_midway() {
        // With p = 0.5 the factorial of 100 sits near the bottom of the f64
        // range; the direct product and exp of the log sum must agree or both
        // underflow.
        let pr = params(0.5, 0.25);
        let direct = pq_factorial(100, pr).unwrap();
        let via_log = libm::exp(ln_pq_factorial(100, pr).unwrap());
        assert!(direct == 0.0 && via_log == 0.0 || rel_err(direct, via_log) < 1e-10);
        let pr = params(0.999, 0.99);
        let direct = pq_factorial(150, pr).unwrap();
        let via_log = libm::exp(ln_pq_factorial(150, pr).unwrap());
        assert!(rel_err(direct, via_log) < 1e-10);
        // Falling product over many factors, compared with its own log.
        let x = 0.3;
        let mut ln = 0.0;
        for s in 0..400 {
            ln += libm::log(libm::pow(0.999, s as f64) - libm::pow(0.99, s as f64) * x);
        }
        let got = falling_product(x, 400, pr).unwrap();
        assert!(rel_err(got, libm::exp(ln)) < 1e-10);
    }

    #[test]
    fn binomial_log_path_is_consistent() {
        let pr = params(0.3, 0.1);
        // p^{k(n-k)} drives this below 1e-300.
        let v = pq_binomial(200, 100, pr).unwrap();
        let ln = ln_pq_binomial(200, 100, pr).unwrap();
        assert!(ln < -690.0);
        assert_eq!(v, libm::exp(ln));
        let pr = params(0.99, 0.98);
        let v = pq_binomial(60, 30, pr).unwrap();
        assert!(rel_err(v, libm::exp(ln_pq_binomial(60, 30, pr).unwrap())) < 1e-11);
    }

    #[test]
    fn p_one_gives_q_integers() {
        for q in [0.1, 0.5, 0.8, 0.999] {
            let pr = params(1.0, q);
            for n in 0..40 {
                let want: f64 = (0..n).map(|i| libm::pow(q, i as f64)).sum();
                assert!((pq_integer(n, pr).unwrap() - want).abs() <= 1e-13 * want.max(1.0));
            }
        }
    }

    fn valid_params() -> impl Strategy<Value = PQParams> {
        (0.05f64..=1.0, 0.01f64..0.99).prop_map(|(p, frac)| params(p, p * frac))
    }

    proptest! {
        #[test]
        fn binomial_symmetry(pr in valid_params(), n in 0usize..=30, k_seed in 0usize..=30) {
            let k = k_seed % (n + 1);
            prop_assert_eq!(pq_binomial(n, k, pr).unwrap(), pq_binomial(n, n - k, pr).unwrap());
        }

        #[test]
        fn binomial_times_factorials(pr in valid_params(), n in 0usize..=25, k_seed in 0usize..=25) {
            let k = k_seed % (n + 1);
            let lhs = pq_binomial(n, k, pr).unwrap()
                * pq_factorial(k, pr).unwrap()
                * pq_factorial(n - k, pr).unwrap();
            let rhs = pq_factorial(n, pr).unwrap();
            prop_assume!(rhs > 1e-250);
            prop_assert!(rel_err(lhs, rhs) <= 1e-10, "{} vs {}", lhs, rhs);
        }

        #[test]
        fn splitting_identity(pr in valid_params(), a in 0usize..=40, b in 0usize..=40) {
            let lhs = pq_integer(a + b, pr).unwrap();
            let rhs = libm::pow(pr.p(), b as f64) * pq_integer(a, pr).unwrap()
                + libm::pow(pr.q(), a as f64) * pq_integer(b, pr).unwrap();
            prop_assume!(lhs > 0.0);
            prop_assert!(rel_err(lhs, rhs) <= 1e-12);
        }

        #[test]
        fn ratio_matches_direct_quotient(pr in valid_params(), a in 0usize..=60, b in 1usize..=60) {
            let direct = pq_integer(a, pr).unwrap() / pq_integer(b, pr).unwrap();
            prop_assume!(direct.is_finite() && pq_integer(b, pr).unwrap() > 1e-200);
            let got = pq_integer_ratio(a, b, pr);
            prop_assert!((got - direct).abs() <= 1e-12 * direct.abs().max(1e-300));
        }
    }

    #[test]
    fn expansion_matches_product_on_grid() {
        for (p, q) in [(1.0, 0.5), (0.9, 0.8), (0.99, 0.98), (0.5, 0.25), (1.0, 0.999)] {
            let pr = params(p, q);
            for n in 0..=20 {
                for i in 0..=100 {
                    let x = i as f64 / 100.0;
                    let prod = falling_product(x, n, pr).unwrap();
                    let expd = expand_product(x, n, pr).unwrap();
                    assert!(
                        (prod - expd).abs() <= 1e-10 * prod.abs().max(1.0),
                        "p={p} q={q} n={n} x={x}: {prod} vs {expd}"
                    );
                }
            }
        }
    }
}
