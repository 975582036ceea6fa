use binquad::expr::{BinOp, Func};
use binquad::{builtin, parse, Expr, Polynomial};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::X),
        (0u32..1000).prop_map(|v| Expr::Num(v as f64)),
        (0.0f64..1e3).prop_map(Expr::Num),
        (1e-9f64..1e-3).prop_map(Expr::Num),
    ]
}

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let ops = prop_oneof![
        Just(BinOp::Add),
        Just(BinOp::Sub),
        Just(BinOp::Mul),
        Just(BinOp::Div)
    ];
    let funcs = prop::sample::select(Func::ALL.to_vec());
    leaf().prop_recursive(6, 48, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (ops.clone(), inner.clone(), inner.clone()).prop_map(|(op, l, r)| Expr::Binary(
                op,
                Box::new(l),
                Box::new(r)
            )),
            (inner.clone(), -8i32..=8).prop_map(|(e, n)| Expr::Pow(Box::new(e), n)),
            (funcs.clone(), inner).prop_map(|(f, e)| Expr::Call(f, Box::new(e))),
        ]
    })
}

fn poly_text(coeffs: &[f64]) -> String {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| match i {
            0 => format!("{c:?}"),
            1 => format!("{c:?}*x"),
            _ => format!("{c:?}*x^{i}"),
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(e in expr_strategy()) {
        let printed = e.to_string();
        let reparsed = parse(&printed).unwrap();
        prop_assert_eq!(&reparsed, &e);
        prop_assert_eq!(parse(&reparsed.to_string()).unwrap(), reparsed);
    }

    #[test]
    fn polynomial_text_agrees_with_coefficients(
        coeffs in prop::collection::vec(-10.0f64..10.0, 1..=12),
        seed in any::<u64>(),
    ) {
        let e = parse(&poly_text(&coeffs)).unwrap();
        let p = Polynomial::new(coeffs.clone());
        let scale: f64 = coeffs.iter().map(|c| c.abs()).sum();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..1000 {
            let x: f64 = rng.gen_range(0.0..=1.0);
            let got = e.eval(x).unwrap();
            prop_assert!((got - p.eval(x)).abs() <= 8.0 * f64::EPSILON * scale, "x = {}", x);
        }
        let extracted = e.as_polynomial().unwrap();
        prop_assert_eq!(extracted.coeffs(), p.coeffs());
    }

    #[test]
    fn malformed_input_reports_a_position(text in "[-+*/^()x0-9. a-z]{0,24}") {
        if let Err(err) = parse(&text) {
            prop_assert!(err.offset <= text.len());
            prop_assert!(!err.expected.is_empty());
        }
    }

    #[test]
    fn truncated_expressions_fail_at_end(e in expr_strategy()) {
        let printed = e.to_string();
        prop_assume!(printed.ends_with(')'));
        let cut = &printed[..printed.len() - 1];
        let err = parse(cut).unwrap_err();
        prop_assert_eq!(err.offset, cut.len());
    }
}

#[test]
fn builtins_match_their_text() {
    assert_eq!(builtin("f1").unwrap(), parse("(5*x^4+6*x^3-x)/10").unwrap());
    assert_eq!(builtin("f2").unwrap(), parse("x^20").unwrap());
    assert!(builtin("f3").is_err());
}

#[test]
fn documented_error_positions() {
    let cases = [
        ("2*(", 3),
        ("5x", 1),
        ("x^y", 2),
        ("(x", 2),
        ("x)", 1),
        ("sqrt()", 5),
        ("", 0),
    ];
    for (text, offset) in cases {
        assert_eq!(parse(text).unwrap_err().offset, offset, "{text:?}");
    }
}
