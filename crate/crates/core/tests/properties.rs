use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;

use pqbs_core::oracle::{oracle_evaluate, parse_rational, Polynomial, RationalParams, RationalSpec};
use pqbs_core::{
    delta_m, evaluate, lipschitz_bound_check, modulus_bound_check, modulus_of_continuity, moments_closed_form,
    weight_table, BoundTolerance, FunctionHandle, Holder, Interval, OperatorSpec, PQParams, PiecewiseLinear,
};

/// (p, q) with 0 < q < p <= 1, kept away from the degenerate corners.
fn params() -> impl Strategy<Value = PQParams> {
    (0.3f64..=1.0, 0.05f64..0.99).prop_map(|(p, r)| PQParams::new(p, p * r).unwrap())
}

fn spec() -> impl Strategy<Value = OperatorSpec> {
    (1usize..40, 0usize..4, params()).prop_map(|(m, ell, pr)| OperatorSpec::new(m, ell, pr).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn weights_are_nonnegative_and_nodes_in_domain(spec in spec(), x in 0.0f64..=1.0) {
        let table = weight_table(&spec, x).unwrap();
        prop_assert!(table.weights().iter().all(|&w| w >= 0.0));
        prop_assert!((table.weight_sum() - 1.0).abs() < 1e-12);
        let hi = spec.domain().hi();
        prop_assert!(table.nodes().iter().all(|&t| (0.0..=hi * (1.0 + 1e-15)).contains(&t)));
    }

    #[test]
    fn operator_is_linear_and_monotone(spec in spec(), x in 0.0f64..=1.0, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let e1 = FunctionHandle::registry("e1", spec.ell()).unwrap();
        let e2 = FunctionHandle::registry("e2", spec.ell()).unwrap();
        let mix = FunctionHandle::from_fn("mix", spec.domain(), move |t| a * t + b * t * t);
        let lhs = evaluate(&spec, &mix, x).unwrap();
        let rhs = a * evaluate(&spec, &e1, x).unwrap() + b * evaluate(&spec, &e2, x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        // e2 <= (ell + 1) e1 on the domain, so the same holds after applying the operator.
        let hi = spec.domain().hi();
        prop_assert!(evaluate(&spec, &e2, x).unwrap() <= hi * evaluate(&spec, &e1, x).unwrap() + 1e-12);
    }

    #[test]
    fn radius_dominates_second_central_moment(spec in spec(), x in 0.0f64..=1.0) {
        let moments = moments_closed_form(&spec, x).unwrap();
        let radius = delta_m(&spec, x).unwrap();
        prop_assert!(moments.central2 >= -1e-15);
        prop_assert!(radius * radius >= moments.central2 * (1.0 - 1e-12) - 1e-15);
    }

    #[test]
    fn error_bounds_hold_for_random_parameters(spec in spec(), kink in 0.1f64..0.9) {
        let domain = spec.domain();
        let knots = vec![(0.0, kink), (kink, 0.0), (domain.hi(), domain.hi() - kink)];
        let f = FunctionHandle::sampled("kink", PiecewiseLinear::new(knots).unwrap(), domain);
        let xs: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let modulus = modulus_bound_check(&spec, &f, &xs, BoundTolerance::default()).unwrap();
        prop_assert!(modulus.all_pass(), "{:?}", modulus.violations().collect::<Vec<_>>());
        let lipschitz = lipschitz_bound_check(&spec, &f, 1.0, 1.0, &xs, BoundTolerance::default()).unwrap();
        prop_assert!(lipschitz.all_pass(), "{:?}", lipschitz.violations().collect::<Vec<_>>());
    }

    #[test]
    fn modulus_is_monotone_and_subadditive_up_to_a_cell(d1 in 0.01f64..0.6, d2 in 0.01f64..0.6) {
        let domain = Interval::new(0.0, 1.0).unwrap();
        let f = FunctionHandle::from_fn("wave", domain, |t| (7.0 * t).sin() + t * t)
            .with_regularity(Holder::lipschitz(9.0));
        let grid = 501;
        let w = |d: f64| modulus_of_continuity(&f, d, domain, grid).unwrap();
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(w(lo) <= w(hi));
        // One extra grid cell can appear when the window widths are rounded.
        prop_assert!(w(d1 + d2) <= w(d1) + w(d2) + 9.0 / (grid - 1) as f64 + 1e-12);
    }

    #[test]
    fn float_operator_matches_exact_oracle(
        m in 1usize..9, ell in 0usize..3,
        pn in 1i64..=10, qn in 1i64..10, xn in 0i64..=16, c in -4i64..=4,
    ) {
        prop_assume!(qn < pn);
        let rp = RationalParams::from_ratios(pn, 10, qn, 10).unwrap();
        let rspec = RationalSpec::new(m, ell, rp).unwrap();
        let x = BigRational::new(xn.into(), 16.into());
        // f(t) = t^3 + c t, checked against the float path on the same inputs.
        let poly = Polynomial::new(vec![
            parse_rational("0").unwrap(),
            BigRational::from_integer(c.into()),
            parse_rational("0").unwrap(),
            parse_rational("1").unwrap(),
        ]);
        let exact = oracle_evaluate(&rspec, &poly, &x).unwrap().to_f64().unwrap();
        let spec = rspec.to_float().unwrap();
        let cf = c as f64;
        let f = FunctionHandle::from_fn("cubic", spec.domain(), move |t| t * t * t + cf * t);
        let float = evaluate(&spec, &f, xn as f64 / 16.0).unwrap();
        prop_assert!((float - exact).abs() <= 1e-12 * (1.0 + exact.abs()), "{float} vs {exact}");
    }
}
