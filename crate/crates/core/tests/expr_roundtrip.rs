use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use sprayfin_core::expr::{BinOp, Func, Var, VarKind};
use sprayfin_core::{parse, Expr, PointTM};

const N: usize = 3;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-50i64..50, prop::sample::select(vec![1i64, 2, 4, 5, 8, 3, 7]))
            .prop_map(|(p, q)| Expr::Const(BigRational::new(BigInt::from(p), BigInt::from(q)))),
        (0..N, any::<bool>()).prop_map(|(i, x)| Expr::var(if x { VarKind::X } else { VarKind::Y }, i)),
    ]
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (inner.clone(), inner.clone(), prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div]))
                .prop_map(|(a, b, op)| Expr::Bin(op, Box::new(a), Box::new(b))),
            (inner.clone(), -3i64..4).prop_map(|(e, k)| Expr::Pow(Box::new(e), k)),
            (inner, prop::sample::select(vec![Func::Sin, Func::Cos, Func::Exp, Func::Log, Func::Sqrt]))
                .prop_map(|(e, f)| Expr::Func(f, Box::new(e))),
        ]
    })
}

proptest! {
    #[test]
    fn print_parse_is_stable(e in arb_expr()) {
        let printed = e.to_string();
        let p = parse(&printed, N).map_err(|err| TestCaseError::fail(format!("{printed}: {err}")))?;
        let again = parse(&p.to_string(), N).unwrap();
        prop_assert_eq!(&again, &p, "{}", printed);
    }

    #[test]
    fn printing_preserves_value(e in arb_expr()) {
        let u = PointTM::new(vec![0.3, -0.7, 1.1], vec![0.9, 1.4, -0.6]);
        let p = parse(&e.to_string(), N).unwrap();
        match (e.eval(&u), p.eval(&u)) {
            (Ok(a), Ok(b)) if a.is_finite() && b.is_finite() => {
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{} -> {} vs {}", e, a, b);
            }
            (Err(_), Err(_)) => {}
            (Ok(a), Ok(b)) => prop_assert!(!a.is_finite() || !b.is_finite() || a == b),
            (a, b) => prop_assert!(false, "{}: {:?} vs {:?}", e, a, b),
        }
    }
}

#[test]
fn nested_negation_round_trips() {
    let e = Expr::Neg(Box::new(Expr::Neg(Box::new(Expr::Var(Var { kind: VarKind::Y, index: 0 })))));
    let p = parse(&e.to_string(), N).unwrap();
    assert_eq!(p, e);
}
