//! Elimination symord against the linear-system reference, Buchberger
//! idempotence and monotonicity of the independence check.

use conjugate_core::groebner::{buchberger, GroebnerBudget, MonomialOrder};
use conjugate_core::poly::{parse_polynomial, Exponents, SparsePolynomial};
use conjugate_core::rational::int;
use conjugate_core::reference::symord_by_linear_system;
use conjugate_core::symord::*;
use proptest::prelude::*;

fn univariate(coeffs: &[i64]) -> SparsePolynomial {
    let mut p = SparsePolynomial::zero(1);
    for (k, &c) in coeffs.iter().enumerate() {
        if c != 0 {
            p.add_term(Exponents::from_slice(&[k as u16]), int(c));
        }
    }
    p
}

fn nonconstant(max_degree: usize) -> impl Strategy<Value = SparsePolynomial> {
    prop::collection::vec(-3i64..=3, 2..=max_degree + 1)
        .prop_filter("nonconstant", |c| c[1..].iter().any(|&x| x != 0))
        .prop_map(|c| univariate(&c))
}

fn budget() -> GroebnerBudget {
    GroebnerBudget { max_pairs: 50_000, max_degree: 60, deadline: None }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn elimination_matches_linear_system(p0 in nonconstant(3), p1 in nonconstant(3)) {
        let map = PolynomialMap::new(vec![p0, p1]).unwrap();
        let elimination = symord_via_elimination(&map, &budget());
        prop_assume!(elimination.is_ok());
        let value = elimination.unwrap().value;
        let oracle = symord_by_linear_system(&map, 5).unwrap();
        match value {
            Symord::Finite(k) if k <= 5 => prop_assert_eq!(oracle, Some(k)),
            _ => prop_assert_eq!(oracle, None),
        }
    }

    #[test]
    fn independence_is_monotone_in_the_degree(p0 in nonconstant(3), p1 in nonconstant(3)) {
        let map = PolynomialMap::new(vec![p0, p1]).unwrap();
        let checks: Vec<bool> = (0..=5).map(|k| check_nonsymmetric_degree(&map, k).unwrap()).collect();
        for k in 1..checks.len() {
            prop_assert!(checks[k - 1] || !checks[k], "{:?}", checks);
        }
    }

    #[test]
    fn buchberger_is_idempotent(a in prop::collection::vec(-2i64..=2, 6), b in prop::collection::vec(-2i64..=2, 6)) {
        let monomials: [[u16; 2]; 6] = [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]];
        let build = |c: &[i64]| {
            let mut p = SparsePolynomial::zero(2);
            for (k, e) in c.iter().zip(monomials) {
                if *k != 0 {
                    p.add_term(Exponents::from_slice(&e), int(*k));
                }
            }
            p
        };
        let gens: Vec<SparsePolynomial> = [build(&a), build(&b)].into_iter().filter(|g| !g.is_zero()).collect();
        prop_assume!(!gens.is_empty());
        let order = MonomialOrder::grevlex(2);
        let g = buchberger(&gens, &order, &budget());
        prop_assume!(g.is_ok());
        let g = g.unwrap();
        prop_assert!(g.is_groebner());
        if g.generators.is_empty() {
            return Ok(());
        }
        let again = buchberger(&g.generators, &order, &budget()).unwrap();
        prop_assert_eq!(again.generators, g.generators);
    }
}

#[test]
fn veronese_table() {
    for (tau, expected) in [(2, 4), (3, 5), (4, 5)] {
        let cert = symord_via_elimination(&PolynomialMap::veronese(tau), &budget()).unwrap();
        assert_eq!(cert.value, Symord::Finite(expected), "tau = {tau}");
    }
}

#[test]
fn linear_system_agrees_on_the_veronese_pair() {
    assert_eq!(symord_by_linear_system(&PolynomialMap::veronese(2), 5).unwrap(), Some(4));
}

#[test]
fn independent_coordinates_have_infinite_order() {
    let x = parse_polynomial("x", &["x", "y"]).unwrap();
    let y = parse_polynomial("y", &["x", "y"]).unwrap();
    let cert = symord_via_elimination(&PolynomialMap::new(vec![x, y]).unwrap(), &budget()).unwrap();
    assert_eq!(cert.value, Symord::Infinite);
}

#[test]
fn upper_bound_from_a_restriction() {
    let p = PolynomialMap::veronese(3);
    let ub = symord_upper_bound(&p, &[0, 1], &budget()).unwrap();
    assert_eq!(ub.restricted, Symord::Finite(4));
    assert_eq!(ub.bound, Symord::Finite(15));
    let full = symord_via_elimination(&p, &budget()).unwrap().value;
    assert!(full < ub.bound);
}

#[test]
fn lower_bound_pair_against_elimination() {
    let p0 = parse_polynomial("x^2", &["x"]).unwrap();
    let p1 = parse_polynomial("x", &["x"]).unwrap();
    let bound = symord_lower_bound_pair(&p0, &p1).unwrap();
    assert_eq!(bound, int(2));
    let value = symord_via_elimination(&PolynomialMap::new(vec![p0, p1]).unwrap(), &budget()).unwrap().value;
    match value {
        Symord::Finite(k) => assert!(int(k as i64) >= bound),
        Symord::Infinite => {}
    }
}
