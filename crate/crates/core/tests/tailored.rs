//! Tailored polynomial construction: end-to-end runs, certificate replay and
//! the number-theoretic building blocks.

use conjugate_core::matrix::RationalMatrix;
use conjugate_core::profile::{ApproximationProfile, PowerLaw};
use conjugate_core::rational::{int, ratio, Rational};
use conjugate_core::tailored::*;
use conjugate_core::univariate::{is_irreducible, IntegerPolynomial};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn profile() -> ApproximationProfile {
    let psi = PowerLaw::parse("1, -1").unwrap();
    let phi = PowerLaw::parse("1, 1").unwrap();
    ApproximationProfile::new(3, 1, 1, vec![psi.clone(), psi], vec![phi.clone(), phi]).unwrap()
}

fn settings() -> TailorSettings {
    TailorSettings {
        delta0: ratio(1, 4),
        delta_min: int(1),
        delta_max: int(1),
        c_f: int(1),
        precision: 40,
        max_nodes: 2_000_000,
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let den = 1_000_003i64;
    let x = ratio(rng.gen_range(den / 10..=9 * den / 10), den);
    vec![x.clone(), &x * &x + int(2)]
}

#[test]
fn pipeline_succeeds_and_replays() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (profile, settings, q) = (profile(), settings(), int(1000));
    for _ in 0..10 {
        let f = random_point(&mut rng);
        let TailorOutcome::Success(cert) = construct_tailored(&f, &profile, &q, &settings).unwrap() else {
            panic!("construction failed at {f:?}");
        };
        assert!(cert.is_valid());
        assert_eq!(cert.records.len(), 4);
        assert!(replay_certificate(&cert, &f, &profile, &q).unwrap());
        assert!(is_prime(&cert.prime));
        assert!(Rational::from_integer(cert.prime.clone()) > cert.constants.c_prime);
        for r in &cert.records {
            assert!(is_eisenstein(&r.polynomial, &cert.prime));
            assert_eq!(r.polynomial.degree(), Some(3));
        }
    }
}

#[test]
fn replay_rejects_a_tampered_certificate() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let (profile, settings, q) = (profile(), settings(), int(1000));
    let f = random_point(&mut rng);
    let TailorOutcome::Success(cert) = construct_tailored(&f, &profile, &q, &settings).unwrap() else {
        panic!("construction failed");
    };
    let mut bad = (*cert).clone();
    let mut coeffs = bad.records[0].polynomial.coeffs().to_vec();
    coeffs[0] += 1;
    bad.records[0].polynomial = IntegerPolynomial::new(coeffs);
    assert!(!replay_certificate(&bad, &f, &profile, &q).unwrap());
    let mut dup = (*cert).clone();
    dup.records[1] = dup.records[0].clone();
    assert!(!replay_certificate(&dup, &f, &profile, &q).unwrap());
}

#[test]
fn volume_condition_is_enforced() {
    let (profile, q) = (profile(), int(1000));
    let narrow = TailorSettings { delta_min: int(2), delta_max: int(3), ..settings() };
    let f = vec![ratio(1, 3), ratio(19, 9)];
    let out = construct_tailored(&f, &profile, &q, &narrow).unwrap();
    assert!(matches!(out, TailorOutcome::Failure { stage: TailorStage::VolumeCondition, .. }));
}

#[test]
fn bertrand_prime_lies_in_the_interval() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..200 {
        let c = ratio(rng.gen_range(2_000..=10_000_000), rng.gen_range(1..=1000));
        let p = Rational::from_integer(bertrand_prime(&c).unwrap());
        assert!(c < p && p < int(2) * &c);
    }
}

/// The congruences modulo `p²` do not force independence over `ℚ`, which is
/// why the pipeline checks the rank of the twisted family.
#[test]
fn twist_can_lose_rank() {
    let rows = [[3i64, 3, 3, 1], [-3, -8, 2, 0], [-4, 8, 3, 0], [9, 8, -1, 0]];
    let columns: Vec<Vec<BigInt>> = (0..4).map(|j| (0..4).map(|i| BigInt::from(rows[i][j])).collect()).collect();
    let twisted = eisenstein_twist(&columns, &BigInt::from(3)).unwrap();
    let coeff_rows: Vec<Vec<Rational>> =
        twisted.iter().map(|t| (0..4).map(|k| Rational::from_integer(t.polynomial.coeff(k))).collect()).collect();
    assert_eq!(RationalMatrix::from_rows(coeff_rows).unwrap().rank(), 3);
}

fn nonsingular(rows: &[Vec<i64>]) -> bool {
    !RationalMatrix::from_i64_rows(rows).unwrap().det().unwrap().is_zero()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn modular_solve_satisfies_the_system(
        rows in prop::collection::vec(prop::collection::vec(-50i64..50, 3), 3),
        b in prop::collection::vec(-50i64..50, 3),
        pi in 0usize..4,
    ) {
        let p = BigInt::from([5, 7, 11, 101][pi]);
        let a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let b: Vec<BigInt> = b.into_iter().map(BigInt::from).collect();
        if let Ok(x) = solve_mod_p(&a, &b, &p) {
            for (row, bi) in a.iter().zip(&b) {
                let lhs: BigInt = row.iter().zip(&x).map(|(r, xi)| r * xi).sum();
                prop_assert!((lhs - bi).mod_floor(&p).is_zero());
            }
        }
    }

    #[test]
    fn twist_gives_eisenstein_polynomials(
        rows in prop::collection::vec(prop::collection::vec(-9i64..10, 4), 4),
        pi in 0usize..4,
    ) {
        prop_assume!(nonsingular(&rows));
        let p = BigInt::from([3, 5, 7, 13][pi]);
        let det = RationalMatrix::from_i64_rows(&rows).unwrap().det().unwrap().to_integer();
        prop_assume!(!det.mod_floor(&p).is_zero());
        let columns: Vec<Vec<BigInt>> = (0..4).map(|j| (0..4).map(|i| BigInt::from(rows[i][j])).collect()).collect();
        let twisted = eisenstein_twist(&columns, &p).unwrap();
        prop_assert_eq!(twisted.len(), 4);
        let p2 = &p * &p;
        for (ell, t) in twisted.iter().enumerate() {
            prop_assert!(is_eisenstein(&t.polynomial, &p));
            prop_assert!(is_irreducible(&t.polynomial).unwrap());
            // coefficients agree with e_n + p·(1, …, 1, 0, …, 0) modulo p²
            for i in 0..4 {
                let expected = BigInt::from(u8::from(i == 3)) + &p * BigInt::from(u8::from(i < 4 - ell));
                prop_assert!((t.polynomial.coeff(i) - expected).mod_floor(&p2).is_zero());
            }
        }
    }
}
