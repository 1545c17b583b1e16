//! Properties of the scalar-field calculus: commuting partials, agreement
//! with central finite differences, and parse/print round-trips.

use proptest::prelude::*;

use hiconn_core::{parse, Chart, SamplePlan, ScalarField};

const DIM: usize = 3;

fn chart() -> Chart {
    Chart::standard(DIM).unwrap()
}

/// Random polynomial/trig expression trees (no reciprocals, so evaluation
/// never faults).
fn smooth_expr() -> impl Strategy<Value = ScalarField> {
    let c = chart();
    let leaf = prop_oneof![
        (-2.0..2.0f64).prop_map({
            let c = c.clone();
            move |v| ScalarField::constant(&c, v)
        }),
        (0..DIM).prop_map({
            let c = c.clone();
            move |i| ScalarField::coord(&c, i)
        }),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a + &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a * &b),
            inner.clone().prop_map(|a| -&a),
            inner.clone().prop_map(|a| a.sin()),
            inner.clone().prop_map(|a| a.cos()),
            (inner.clone(), 2..4i32).prop_map(|(a, m)| a.powi(m)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partials_commute(f in smooth_expr(), i in 0..DIM, j in 0..DIM) {
        let plan = SamplePlan::default_for(&chart());
        let a = f.partial(i).partial(j);
        let b = f.partial(j).partial(i);
        for p in plan.points() {
            let va = a.eval(p).unwrap();
            let vb = b.eval(p).unwrap();
            prop_assert!((va - vb).abs() <= 1e-9 * (1.0 + va.abs().max(vb.abs())));
        }
    }

    #[test]
    fn partial_matches_central_differences(f in smooth_expr(), i in 0..DIM) {
        let plan = SamplePlan::default_for(&chart());
        let df = f.partial(i);
        // Smooth composites of bounded polynomials and trig on the unit box
        // keep third derivatives moderate; the O(h^2) truncation constant
        // is absorbed into the scale factor.
        let mut scale = 1.0f64;
        for p in plan.points() {
            scale = scale.max(f.eval(p).unwrap().abs());
        }
        for h in [1e-3, 1e-4] {
            for p in plan.points().iter().take(5) {
                let mut hi = p.clone();
                let mut lo = p.clone();
                hi[i] += h;
                lo[i] -= h;
                let numeric = (f.eval(&hi).unwrap() - f.eval(&lo).unwrap()) / (2.0 * h);
                let exact = df.eval(p).unwrap();
                let err = (numeric - exact).abs();
                prop_assert!(
                    err <= 5e3 * scale.max(1.0) * h * h + 1e-8,
                    "h = {h}, err = {err}, scale = {scale}"
                );
            }
        }
    }

    #[test]
    fn print_then_parse_is_evaluation_equivalent(f in smooth_expr()) {
        let c = chart();
        let plan = SamplePlan::default_for(&c);
        let printed = f.to_string();
        let reparsed = parse(&printed, &c)
            .unwrap_or_else(|e| panic!("printed field `{printed}` failed to parse: {e}"));
        for p in plan.points() {
            let a = f.eval(p).unwrap();
            let b = reparsed.eval(p).unwrap();
            prop_assert!(
                (a - b).abs() <= 1e-9 * (1.0 + a.abs()),
                "`{printed}` evaluates to {b}, original to {a}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    // The parser must reject or accept arbitrary input without panicking,
    // and what it accepts must evaluate without panicking.
    #[test]
    fn parser_never_panics(src in "[x0-9+*/^()\\-\\. einparc]{0,48}") {
        let c = chart();
        if let Ok(f) = parse(&src, &c) {
            let _ = f.eval(&[0.25, -0.5, 0.75]);
        }
    }
}

#[test]
fn deep_nesting_is_rejected_not_overflowed() {
    let c = chart();
    let deep = format!("{}x0{}", "(".repeat(5_000), ")".repeat(5_000));
    assert!(parse(&deep, &c).is_err());
    let minus_chain = format!("{}x0", "-".repeat(5_000));
    assert!(parse(&minus_chain, &c).is_err());
    // Moderate nesting still parses.
    let ok = format!("{}x0{}", "(".repeat(64), ")".repeat(64));
    assert!(parse(&ok, &c).is_ok());
}

#[test]
fn reciprocal_round_trip() {
    let c = chart();
    let plan = SamplePlan::default_for(&c);
    let src = "(x0 + 2) / (x1^2 + 3) - 1/(exp(x2) + 2)";
    let f = parse(src, &c).unwrap();
    let reparsed = parse(&f.to_string(), &c).unwrap();
    for p in plan.points() {
        let a = f.eval(p).unwrap();
        let b = reparsed.eval(p).unwrap();
        assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }
}
