//! Properties of partitions, alternants, Schur polynomials and Schur-basis expansion.

use conjugate_core::poly::SparsePolynomial;
use conjugate_core::rational::{int, Rational};
use conjugate_core::symmetric::*;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn partition(max_part: u16, max_len: usize) -> impl Strategy<Value = Partition> {
    prop::collection::vec(1..=max_part, 0..=max_len).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(v).unwrap()
    })
}

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(a, b)| Rational::new(a.into(), b.into()))
}

fn combination(tau: usize, k: u32, coeffs: &[i64]) -> SparsePolynomial {
    let family = enumerate_partitions(k, tau, IndexMode::WeightBounded);
    family.iter().zip(coeffs).fold(SparsePolynomial::zero(tau), |acc, (lambda, &c)| {
        &acc + &monomial_symmetric(lambda, tau).unwrap().scale(&int(c))
    })
}

proptest! {
    #[test]
    fn schur_is_symmetric_and_homogeneous(lambda in partition(4, 4), extra in 0usize..2) {
        let tau = lambda.length().max(1) + extra;
        let s = schur(&lambda, tau).unwrap();
        for i in 0..tau - 1 {
            prop_assert_eq!(s.swap_vars(i, i + 1), s.clone());
        }
        prop_assert!(s.terms().all(|(e, _)| e.total_degree() == lambda.weight()));
    }

    #[test]
    fn schur_is_stable_under_trailing_zeros(lambda in partition(3, 3), point in prop::collection::vec(rational(), 3), zeros in 1usize..3) {
        let len = lambda.length().max(1);
        let prefix = &point[..len];
        let mut padded = prefix.to_vec();
        padded.extend(std::iter::repeat_n(Rational::zero(), zeros));
        let short = schur(&lambda, len).unwrap().eval(prefix).unwrap();
        let long = schur(&lambda, len + zeros).unwrap().eval(&padded).unwrap();
        prop_assert_eq!(short, long);
    }

    #[test]
    fn alternant_changes_sign_under_transpositions(lambda in partition(3, 3), i in 0usize..3, j in 0usize..3) {
        prop_assume!(i != j);
        let a = alternant(&lambda, 3).unwrap();
        prop_assert_eq!(a.swap_vars(i, j), -&a);
    }

    #[test]
    fn schur_expansion_reconstructs(tau in 1usize..=3, k in 0u32..=4, coeffs in prop::collection::vec(-5i64..=5, 40)) {
        let p = combination(tau, k, &coeffs);
        let expansion = expand_in_schur_basis(&p, k, tau).unwrap();
        let rebuilt = expansion.iter().fold(SparsePolynomial::zero(tau), |acc, (lambda, c)| {
            &acc + &schur(lambda, tau).unwrap().scale(c)
        });
        prop_assert_eq!(rebuilt, p);
    }

    #[test]
    fn first_schur_map_component_is_one(n in 1usize..5, point in prop::collection::vec(rational(), 1..4)) {
        let tau = point.len();
        prop_assume!(tau <= n + 1);
        for mode in [IndexMode::WeightBounded, IndexMode::BoxBounded] {
            let values = schur_map_eval(n, tau, &point, mode).unwrap();
            prop_assert_eq!(values[0].clone(), Rational::one());
        }
    }
}

#[test]
fn monomial_basis_expands_with_integer_coefficients() {
    for tau in 1..=3 {
        for k in 0..=4 {
            for lambda in enumerate_partitions(k, tau, IndexMode::WeightBounded) {
                let m = monomial_symmetric(&lambda, tau).unwrap();
                let expansion = expand_in_schur_basis(&m, k, tau).unwrap();
                assert!(expansion.values().all(|c| c.is_integer()), "{lambda} in {tau} variables");
                let rebuilt = expansion
                    .iter()
                    .fold(SparsePolynomial::zero(tau), |acc, (mu, c)| &acc + &schur(mu, tau).unwrap().scale(c));
                assert_eq!(rebuilt, m);
            }
        }
    }
}

#[test]
fn box_index_set_has_binomial_size() {
    for n in 1..=6usize {
        for tau in 1..=n + 1 {
            let set = SchurIndexSet::new(n, tau, IndexMode::BoxBounded).unwrap();
            let binom = (0..tau).fold(1usize, |acc, i| acc * (n + 1 - i) / (i + 1));
            assert_eq!(set.len(), binom, "n={n} tau={tau}");
        }
    }
}

#[test]
fn weight_bounded_enumeration_includes_the_empty_partition() {
    let parts = enumerate_partitions(2, 2, IndexMode::WeightBounded);
    let rendered: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
    assert_eq!(parts.len(), 4, "{rendered:?}");
    assert_eq!(parts[0], Partition::empty());
}
