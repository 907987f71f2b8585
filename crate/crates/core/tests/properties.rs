use ballkit::io::{from_bytes, parse_expr, to_bytes, BinOp, Constant, Expr, Func, Var};
use ballkit::{coeffs2vals, vals2coeffs, Ball, Coords, EulerAngles, Tensor, C};
use proptest::prelude::*;

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0.0f64..1e6).prop_map(Expr::Num),
        prop_oneof![Just(Var::X), Just(Var::Y), Just(Var::Z), Just(Var::R), Just(Var::Lam), Just(Var::Th)]
            .prop_map(Expr::Var),
        prop_oneof![Just(Constant::Pi), Just(Constant::E)].prop_map(Expr::Const),
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        let op = prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div), Just(BinOp::Pow)];
        let func = prop_oneof![
            Just(Func::Sin),
            Just(Func::Cos),
            Just(Func::Tan),
            Just(Func::Exp),
            Just(Func::Log),
            Just(Func::Sqrt),
            Just(Func::Sinh),
            Just(Func::Cosh),
        ];
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (op, inner.clone(), inner.clone()).prop_map(|(o, a, b)| Expr::Bin(o, Box::new(a), Box::new(b))),
            (func, inner).prop_map(|(f, a)| Expr::Call(f, Box::new(a))),
        ]
    })
}

fn tensor_strategy() -> impl Strategy<Value = Tensor> {
    (1usize..7, 1usize..5, 1usize..5).prop_flat_map(|(m, nh, ph)| {
        let (n, p) = (2 * nh, 2 * ph);
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), m * n * p)
            .prop_map(move |v| Tensor::from_vec(m, n, p, v.into_iter().map(|(a, b)| C::new(a, b)).collect()).unwrap())
    })
}

proptest! {
    #[test]
    fn printed_expressions_reparse(e in expr_strategy()) {
        let text = e.to_string();
        prop_assert_eq!(parse_expr(&text).unwrap(), e);
    }

    #[test]
    fn transforms_invert_each_other(t in tensor_strategy()) {
        let back = vals2coeffs(&coeffs2vals(&t)).unwrap();
        for (a, b) in back.data().iter().zip(t.data()) {
            prop_assert!((*a - *b).norm() <= 1e-12);
        }
    }

    #[test]
    fn integration_is_linear(a in tensor_strategy(), s in -3.0f64..3.0) {
        let b = Tensor::from_vec(a.m(), a.n(), a.p(), a.data().iter().map(|c| c * c).collect()).unwrap();
        let fa = Ball::from_coeffs_raw(a.clone(), false);
        let fb = Ball::from_coeffs_raw(b, false);
        let lhs = fa.scale(s).add(&fb).sum3();
        let rhs = fa.sum3() * s + fb.sum3();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn bfn1_rejects_corrupted_input(t in tensor_strategy(), cut in 0usize..2000, junk in prop::collection::vec(any::<u8>(), 0..64)) {
        let bytes = to_bytes(&t, Coords::Cartesian).unwrap();
        let cut = cut.min(bytes.len() - 1);
        prop_assert!(from_bytes::<f64>(&bytes[..cut]).is_err());
        let mut extended = bytes.clone();
        extended.push(0);
        prop_assert!(from_bytes::<f64>(&extended).is_err());
        // arbitrary bytes must fail cleanly, never panic
        let _ = from_bytes::<f64>(&junk);
        let (back, coords) = from_bytes::<f64>(&bytes).unwrap();
        prop_assert_eq!(coords, Coords::Cartesian);
        prop_assert_eq!(back.data(), t.data());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rotation_preserves_the_integral(
        c in prop::array::uniform4(-1.0f64..1.0),
        alpha in -3.0f64..3.0,
        beta in 0.0f64..3.0,
        gamma in -3.0f64..3.0,
    ) {
        let f = Ball::from_cart(move |x, y, z| c[0] + c[1] * x * x + c[2] * y * z + c[3] * (x + z).sin()).unwrap();
        let g = f.rotate(EulerAngles::new(alpha, beta, gamma)).unwrap();
        let (a, b) = (f.sum3().re, g.sum3().re);
        prop_assert!((a - b).abs() <= 1e-11 * (1.0 + a.abs()));
    }
}
