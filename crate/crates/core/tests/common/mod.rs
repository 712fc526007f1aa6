//! Random expression generators shared by the property and acceptance suites.

#![allow(dead_code)]

use jetsym::{commutator, Dependent, Expr, Kind, Problem, ScalarFn};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::strategy::BoxedStrategy;

/// Largest tree depth produced by [`expr`]: three levels of internal nodes
/// over leaves of depth at most three.
pub const MAX_DEPTH: usize = 6;

/// Scalar dependent `u(x, t)` with a constant and two base functions.
pub fn scalar_problem() -> Problem {
    Problem::new(&["x", "t"], Dependent::new("u", Kind::Scalar, false))
        .unwrap()
        .with_constant("c")
        .unwrap()
        .with_function("f", Kind::Scalar, &["x", "t"])
        .unwrap()
        .with_function("h", Kind::Scalar, &["x"])
        .unwrap()
}

/// Invertible matrix dependent `u(x, t)` with constant matrices and base
/// functions of both kinds.
pub fn matrix_problem() -> Problem {
    Problem::new(&["x", "t"], Dependent::new("u", Kind::Matrix, true))
        .unwrap()
        .with_constant("c")
        .unwrap()
        .with_matrix("M", false)
        .unwrap()
        .with_matrix("N", true)
        .unwrap()
        .with_function("a", Kind::Matrix, &["x", "t"])
        .unwrap()
        .with_function("f", Kind::Scalar, &["x", "t"])
        .unwrap()
}

fn parse_all(p: &Problem, texts: &[&str]) -> Vec<Expr> {
    texts.iter().map(|t| p.parse(t).unwrap()).collect()
}

const JETS: &[&str] = &["u", "u_x", "u_t", "u_xx", "u_xt", "u_tt"];

fn leaves(p: &Problem, matrix: bool) -> (Vec<Expr>, Vec<Expr>) {
    let mut scalars = parse_all(p, &["x", "t", "c", "f"]);
    scalars.push(Expr::int(2));
    scalars.push(Expr::int(-1));
    scalars.push(Expr::rational(BigRational::new(1.into(), 2.into())));
    let mut all = parse_all(p, JETS);
    if matrix {
        all.extend(parse_all(p, &["inv(u)", "M", "N", "inv(N)", "a"]));
    } else {
        scalars.extend(parse_all(p, &["h"]));
        scalars.extend(all.iter().cloned());
    }
    all.extend(scalars.iter().cloned());
    (all, scalars)
}

fn leaf(p: &Problem, matrix: bool) -> BoxedStrategy<Expr> {
    let (all, scalars) = leaves(p, matrix);
    let funcs = prop::sample::select(vec![ScalarFn::Sin, ScalarFn::Cos, ScalarFn::Exp]);
    let jets = parse_all(p, JETS);
    prop_oneof![
        3 => prop::sample::select(jets),
        3 => prop::sample::select(all),
        1 => (funcs, prop::sample::select(scalars))
            .prop_map(|(f, e)| Expr::func(f, e).unwrap()),
    ]
    .boxed()
}

fn ratio() -> impl Strategy<Value = BigRational> {
    (-3i64..=3, 1i64..=3)
        .prop_filter("nonzero", |(n, _)| *n != 0)
        .prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn tree(p: &Problem, matrix: bool, levels: u32, size: u32) -> BoxedStrategy<Expr> {
    leaf(p, matrix)
        .prop_recursive(levels, size, 3, |inner| {
            prop_oneof![
                3 => (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
                3 => (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
                2 => (inner.clone(), inner.clone(), inner.clone())
                    .prop_map(|(a, b, c)| Expr::Sum(vec![a, b, c])),
                2 => (inner.clone(), inner.clone()).prop_map(|(a, b)| commutator(a, b)),
                1 => (ratio(), inner.clone()).prop_map(|(r, e)| Expr::scaled(r, e)),
                1 => inner.prop_map(|e| -e),
            ]
        })
        .boxed()
}

/// Expressions of depth at most [`MAX_DEPTH`].
pub fn expr(p: &Problem, matrix: bool) -> BoxedStrategy<Expr> {
    tree(p, matrix, 3, 48)
        .prop_filter("depth bound", |e| depth(e) <= MAX_DEPTH)
        .boxed()
}

/// Smaller expressions used as characteristics, where nesting of
/// derivations multiplies sizes.
pub fn small_expr(p: &Problem, matrix: bool) -> BoxedStrategy<Expr> {
    tree(p, matrix, 2, 10)
}

pub fn depth(e: &Expr) -> usize {
    1 + match e {
        Expr::Atom(_) => 0,
        Expr::Sum(v) | Expr::Product(v) => v.iter().map(depth).max().unwrap_or(0),
        Expr::Scaled(_, a) | Expr::Inverse(a) | Expr::Func(_, a) => depth(a),
        Expr::Commutator(a, b) => depth(a).max(depth(b)),
    }
}

/// Law bodies, shared by the `proptest!` suites and the acceptance runner.
pub mod laws {
    use jetsym::{
        bracket_characteristic, char_derivative, normal_form, scalar_prolongation_apply,
        total_derivative, Characteristic, ConstFactor, Expr, NormalForm, Problem,
    };
    use num_rational::BigRational;
    use proptest::prelude::*;
    use proptest::test_runner::TestCaseError;

    use super::{depth, MAX_DEPTH};

    type Outcome = Result<(), TestCaseError>;

    fn nf(e: &Expr) -> NormalForm {
        NormalForm::from_expr(e).unwrap()
    }

    fn ch(p: &Problem, e: &Expr) -> Characteristic {
        Characteristic::new(p, "Q", e).unwrap()
    }

    fn d(p: &Problem, e: &NormalForm, i: usize) -> NormalForm {
        total_derivative(p, e, i).unwrap()
    }

    fn delta(p: &Problem, e: &NormalForm, q: &Characteristic) -> NormalForm {
        char_derivative(p, e, q).unwrap()
    }

    pub fn depth_is_bounded(e: &Expr) -> Outcome {
        prop_assert!(depth(e) <= MAX_DEPTH);
        Ok(())
    }

    pub fn total_derivatives_commute(p: &Problem, e: &Expr) -> Outcome {
        let e = nf(e);
        prop_assert_eq!(d(p, &d(p, &e, 0), 1), d(p, &d(p, &e, 1), 0));
        Ok(())
    }

    pub fn characteristic_derivative_commutes_with_totals(
        p: &Problem,
        e: &Expr,
        q: &Expr,
        i: usize,
    ) -> Outcome {
        let e = nf(e);
        let q = ch(p, q);
        prop_assert_eq!(delta(p, &d(p, &e, i), &q), d(p, &delta(p, &e, &q), i));
        Ok(())
    }

    pub fn leibniz(p: &Problem, a: &Expr, b: &Expr, q: &Expr, i: usize) -> Outcome {
        let (a, b) = (nf(a), nf(b));
        let q = ch(p, q);
        let ab = a.mul(&b);
        prop_assert_eq!(d(p, &ab, i), &d(p, &a, i).mul(&b) + &a.mul(&d(p, &b, i)));
        prop_assert_eq!(
            delta(p, &ab, &q),
            &delta(p, &a, &q).mul(&b) + &a.mul(&delta(p, &b, &q))
        );
        Ok(())
    }

    pub fn commutator_rule(p: &Problem, a: &Expr, b: &Expr, q: &Expr, i: usize) -> Outcome {
        let (a, b) = (nf(a), nf(b));
        let q = ch(p, q);
        let c = a.commutator(&b);
        prop_assert_eq!(
            d(p, &c, i),
            &d(p, &a, i).commutator(&b) + &a.commutator(&d(p, &b, i))
        );
        prop_assert_eq!(
            delta(p, &c, &q),
            &delta(p, &a, &q).commutator(&b) + &a.commutator(&delta(p, &b, &q))
        );
        Ok(())
    }

    /// Linearity in the argument and in the characteristic, including
    /// scaling by a rational and by the constant symbol `c`.
    pub fn linearity(p: &Problem, a: &Expr, b: &Expr, q1: &Expr, q2: &Expr, n: i64) -> Outcome {
        let (a, b) = (nf(a), nf(b));
        let (q1, q2) = (ch(p, q1), ch(p, q2));
        prop_assert_eq!(
            delta(p, &(&a + &b), &q1),
            &delta(p, &a, &q1) + &delta(p, &b, &q1)
        );
        prop_assert_eq!(
            delta(p, &a, &q1.sum(&q2)),
            &delta(p, &a, &q1) + &delta(p, &a, &q2)
        );
        let r = BigRational::from_integer(n.into());
        let scaled = q1.scale(p, &ConstFactor::Rational(r.clone())).unwrap();
        prop_assert_eq!(delta(p, &a, &scaled), delta(p, &a, &q1).scale(&r));
        let by_c = q1.scale(p, &ConstFactor::Symbol("c".into())).unwrap();
        let c = p.parse_nf("c").unwrap();
        prop_assert_eq!(delta(p, &a, &by_c), c.mul(&delta(p, &a, &q1)));
        Ok(())
    }

    pub fn bracket_antisymmetry_and_jacobi(
        p: &Problem,
        q1: &Expr,
        q2: &Expr,
        q3: &Expr,
    ) -> Outcome {
        let (q1, q2, q3) = (ch(p, q1), ch(p, q2), ch(p, q3));
        let br = |a: &Characteristic, b: &Characteristic| bracket_characteristic(p, a, b).unwrap();
        let (b12, b21) = (br(&q1, &q2), br(&q2, &q1));
        prop_assert_eq!(b12.q(), &-b21.q());
        let jacobi =
            &(br(&br(&q1, &q2), &q3).q() + br(&br(&q2, &q3), &q1).q()) + br(&br(&q3, &q1), &q2).q();
        prop_assert!(
            jacobi.is_zero(),
            "Jacobi residual has {} terms",
            jacobi.len()
        );
        Ok(())
    }

    pub fn normal_form_idempotent_and_deterministic(a: &Expr, b: &Expr) -> Outcome {
        let once = normal_form(a);
        prop_assert_eq!(normal_form(&once), once.clone());
        prop_assert_eq!(normal_form(&a.clone()), once);
        let ab = Expr::Sum(vec![a.clone(), b.clone()]);
        let ba = Expr::Sum(vec![b.clone(), a.clone()]);
        prop_assert_eq!(normal_form(&ab), normal_form(&ba));
        Ok(())
    }

    pub fn printing_round_trips(p: &Problem, e: &Expr) -> Outcome {
        let e = nf(e);
        let text = p.render(&e);
        prop_assert_eq!(p.parse_nf(&text).unwrap(), e, "printed as {}", text);
        Ok(())
    }

    pub fn prolongation_oracle(p: &Problem, e: &Expr, q: &Expr) -> Outcome {
        let e = nf(e);
        let q = ch(p, q);
        prop_assert_eq!(
            char_derivative(p, &e, &q).unwrap(),
            scalar_prolongation_apply(p, &e, &q, None).unwrap()
        );
        Ok(())
    }
}
