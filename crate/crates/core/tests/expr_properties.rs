mod common;

use common::expr;
use evolutes::expr::{parse, Expr};
use proptest::prelude::*;

fn eval(e: &Expr, t: f64) -> f64 {
    e.eval(t).expect("generated trees stay in their domain")
}

/// Fixed seed so every run checks the same cases.
fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x0e70_1e7e),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn derivative_matches_central_difference(e in expr(), t in -3.0f64..3.0) {
        prop_assume!(eval(&e, t).abs() < 1e6);
        let d = eval(&e.differentiate(), t);
        let fd = common::central_difference(&e, t, 1e-5, 1e-7 * (1.0 + d.abs()));
        prop_assume!(fd.is_some());
        let fd = fd.unwrap();
        prop_assert!((d - fd).abs() <= 1e-6 * (1.0 + d.abs()), "{e}: d={d} fd={fd} at t={t}");
    }

    #[test]
    fn second_derivative_is_second_order_accurate(e in expr(), t in -3.0f64..3.0) {
        let f = |x: f64| eval(&e, x);
        prop_assume!(f(t).abs() < 1e4);
        let d2 = eval(&e.differentiate().differentiate(), t);
        // Halving h must shrink the error by about 4 unless it is already at
        // the rounding floor. Only checked once h is small against the
        // function's own scale, i.e. the error is already below |f''|.
        let err = |h: f64| ((f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h) - d2).abs();
        let (e1, e2) = (err(1e-2), err(5e-3));
        prop_assume!(e1 <= 0.1 * (1.0 + d2.abs()));
        prop_assert!(e2 <= 0.3 * e1 + 1e-5 * (1.0 + d2.abs()), "{e}: errors {e1} {e2}");
    }

    #[test]
    fn print_parse_round_trip(e in expr(), ts in prop::collection::vec(-3.0f64..3.0, 100)) {
        let text = e.to_string();
        let back = parse(&text).unwrap();
        let twice = parse(&back.to_string()).unwrap();
        for t in ts {
            let v = e.eval(t).map(f64::to_bits);
            prop_assert_eq!(v, back.eval(t).map(f64::to_bits), "{}", text);
            prop_assert_eq!(v, twice.eval(t).map(f64::to_bits));
            prop_assert_eq!(v, e.eval(t).map(f64::to_bits));
        }
    }

    #[test]
    fn parser_never_panics(s in "[t0-9.+*/^() ,a-z-]{0,24}") {
        if let Err(err) = parse(&s) {
            prop_assert!(err.offset <= s.len());
        }
    }
}
