//! Algebraic laws of the derivations, checked on random expressions over a
//! scalar and a matrix-valued dependent.

mod common;

use common::{expr, laws, matrix_problem, scalar_problem, small_expr};
use jetsym::Problem;
use proptest::prelude::*;

const CASES: u32 = 256;

macro_rules! suite {
    ($module:ident, $problem:expr, $matrix:expr) => {
        mod $module {
            use super::*;

            fn problem() -> Problem {
                $problem
            }

            proptest! {
                #![proptest_config(ProptestConfig::with_cases(CASES))]

                #[test]
                fn generated_depth_is_bounded(e in expr(&problem(), $matrix)) {
                    laws::depth_is_bounded(&e)?;
                }

                #[test]
                fn total_derivatives_commute(e in expr(&problem(), $matrix)) {
                    laws::total_derivatives_commute(&problem(), &e)?;
                }

                #[test]
                fn characteristic_derivative_commutes_with_totals(
                    e in expr(&problem(), $matrix),
                    q in small_expr(&problem(), $matrix),
                    i in 0usize..2,
                ) {
                    laws::characteristic_derivative_commutes_with_totals(&problem(), &e, &q, i)?;
                }

                #[test]
                fn leibniz_rule(
                    a in expr(&problem(), $matrix),
                    b in expr(&problem(), $matrix),
                    q in small_expr(&problem(), $matrix),
                    i in 0usize..2,
                ) {
                    laws::leibniz(&problem(), &a, &b, &q, i)?;
                }

                #[test]
                fn commutator_rule(
                    a in expr(&problem(), $matrix),
                    b in expr(&problem(), $matrix),
                    q in small_expr(&problem(), $matrix),
                    i in 0usize..2,
                ) {
                    laws::commutator_rule(&problem(), &a, &b, &q, i)?;
                }

                #[test]
                fn linear_in_expression_and_characteristic(
                    a in expr(&problem(), $matrix),
                    b in expr(&problem(), $matrix),
                    q1 in small_expr(&problem(), $matrix),
                    q2 in small_expr(&problem(), $matrix),
                    n in -4i64..=4,
                ) {
                    laws::linearity(&problem(), &a, &b, &q1, &q2, n)?;
                }

                #[test]
                fn bracket_is_antisymmetric_and_satisfies_jacobi(
                    q1 in small_expr(&problem(), $matrix),
                    q2 in small_expr(&problem(), $matrix),
                    q3 in small_expr(&problem(), $matrix),
                ) {
                    laws::bracket_antisymmetry_and_jacobi(&problem(), &q1, &q2, &q3)?;
                }

                #[test]
                fn normal_form_is_idempotent_and_deterministic(
                    a in expr(&problem(), $matrix),
                    b in expr(&problem(), $matrix),
                ) {
                    laws::normal_form_idempotent_and_deterministic(&a, &b)?;
                }

                #[test]
                fn printing_round_trips(e in expr(&problem(), $matrix)) {
                    laws::printing_round_trips(&problem(), &e)?;
                }
            }
        }
    };
}

suite!(scalar, scalar_problem(), false);
suite!(matrix, matrix_problem(), true);

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn scalar_characteristic_derivative_matches_prolongation(
        e in expr(&scalar_problem(), false),
        q in small_expr(&scalar_problem(), false),
    ) {
        laws::prolongation_oracle(&scalar_problem(), &e, &q)?;
    }
}
