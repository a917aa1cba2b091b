//! Vandermonde systems, Plücker coordinates, lattice minima and the bad-set
//! indicator against independent references.

use conjugate_core::lattice::*;
use conjugate_core::matrix::RationalMatrix;
use conjugate_core::profile::{ApproximationProfile, PowerLaw};
use conjugate_core::rational::{int, ratio, to_f64, Rational};
use conjugate_core::reference::shortest_vector_by_box;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_lattice(rng: &mut ChaCha8Rng, dim: usize, range: i64) -> RationalMatrix {
    loop {
        let rows: Vec<Vec<i64>> = (0..dim).map(|_| (0..dim).map(|_| rng.gen_range(-range..=range)).collect()).collect();
        let m = RationalMatrix::from_i64_rows(&rows).unwrap();
        if !m.det().unwrap().is_zero() {
            return m;
        }
    }
}

fn random_box(rng: &mut ChaCha8Rng, dim: usize) -> ConvexBody {
    let widths = (0..dim).map(|_| ratio(rng.gen_range(1..=12), rng.gen_range(1..=4))).collect();
    let strict = (0..dim).map(|_| rng.gen_bool(0.5)).collect();
    ConvexBody::new(widths, strict).unwrap()
}

fn distinct_rationals(rng: &mut ChaCha8Rng, k: usize) -> Vec<Rational> {
    loop {
        let v: Vec<Rational> = (0..k).map(|_| ratio(rng.gen_range(-20..=20), rng.gen_range(1..=7))).collect();
        if (0..k).all(|i| (0..i).all(|j| v[i] != v[j])) {
            return v;
        }
    }
}

#[test]
fn minkowski_sandwich_on_random_lattices() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..200 {
        let dim = rng.gen_range(1..=5);
        let basis = random_lattice(&mut rng, dim, 6);
        let body = random_box(&mut rng, dim);
        let sm = successive_minima(&basis, &body, DEFAULT_MAX_NODES).unwrap();
        assert!(sm.minima.windows(2).all(|w| w[0] <= w[1]), "trial {trial}");
        assert!(minkowski_sandwich(&basis, &body, &sm.minima).unwrap(), "trial {trial}");
    }
}

#[test]
fn shortest_vector_matches_box_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut compared = 0;
    for trial in 0.. {
        if compared == 100 {
            break;
        }
        let dim = rng.gen_range(1..=4);
        let basis = random_lattice(&mut rng, dim, 5);
        // ill-conditioned bases make the reference box too large to scan
        let Ok((coeffs, len)) = shortest_vector_by_box(&basis, 200_000) else {
            continue;
        };
        compared += 1;
        let bound = &len + int(1);
        let fast = shortest_vector(&basis, &bound, DEFAULT_MAX_NODES).unwrap().unwrap();
        assert_eq!(fast.length, len, "trial {trial}");
        assert_eq!(fast.coefficients, coeffs, "trial {trial}");
    }
}

#[test]
fn shortest_vector_beats_random_lattice_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..5 {
        let basis = random_lattice(&mut rng, 4, 9);
        let sv = shortest_vector(&basis, &int(1_000), DEFAULT_MAX_NODES).unwrap().unwrap();
        for _ in 0..10_000 {
            let a: Vec<Rational> = (0..4).map(|_| int(rng.gen_range(-6..=6))).collect();
            if a.iter().all(|x| x.is_zero()) {
                continue;
            }
            let v = basis.mul_vec(&a).unwrap();
            let len = v.iter().map(|x| x.abs()).max().unwrap();
            assert!(sv.length <= len);
        }
    }
}

#[test]
fn determinant_of_m_is_the_vandermonde() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for n in 1..=6 {
        for m1 in 1..=n {
            let f = distinct_rationals(&mut rng, m1);
            assert_eq!(build_m(n, &f).unwrap().det().unwrap(), vandermonde(&f));
        }
    }
    let repeated = vec![ratio(1, 3), ratio(1, 3), int(2)];
    assert!(build_m(4, &repeated).unwrap().det().unwrap().is_zero());
}

#[test]
fn cauchy_binet_through_the_wedge() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..30 {
        let k = rng.gen_range(2..=5);
        let tau = rng.gen_range(1..=k);
        let a = random_lattice(&mut rng, k, 4);
        let w_rows: Vec<Vec<i64>> = (0..k).map(|_| (0..tau).map(|_| rng.gen_range(-4..=4)).collect()).collect();
        let w = RationalMatrix::from_i64_rows(&w_rows).unwrap();
        let cols: Vec<usize> = (0..tau).collect();
        let wedge = grass(&w.transpose(), &cols).unwrap();
        let product = a.mul(&w).unwrap();
        for rows in subsets(k, tau) {
            assert_eq!(wedge_transform(&a, &wedge, &rows).unwrap(), product.minor(&rows, &cols).unwrap());
        }
    }
}

#[test]
fn schur_factorization_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for n in 1..=5 {
        for _ in 0..5 {
            let f = distinct_rationals(&mut rng, n);
            for tau in 1..=n {
                for rows in subsets(n, tau) {
                    let report = schur_factorization_check(n, &f, &rows).unwrap();
                    assert!(report.holds, "n={n} rows={rows:?} {:?}", report.mismatches);
                }
            }
        }
    }
}

#[test]
fn scaling_parameters_balance() {
    let laws = ["1/2, -1", "3, -3/2", "2, 1", "1/5, 2", "7, 1/2"];
    let profile = ApproximationProfile::new(
        4,
        1,
        1,
        laws[..2].iter().map(|s| PowerLaw::parse(s).unwrap()).collect(),
        laws[2..].iter().map(|s| PowerLaw::parse(s).unwrap()).collect(),
    )
    .unwrap();
    for q in [1.0, 10.0, 1234.5] {
        let s = scaling_parameters(&profile, q).unwrap();
        let product = profile.product().eval_f64(q);
        assert!((s.delta.ln() * 5.0 - product.ln()).abs() < 1e-9);
        let below: f64 = s.t[..2].iter().sum();
        let above: f64 = s.t[2..].iter().sum();
        assert!((below - above).abs() < 1e-9);
    }
}

#[test]
fn original_case_parameters() {
    let eps = ratio(1, 8);
    let profile = ApproximationProfile::original_case(3, &eps).unwrap();
    let q = 1000.0;
    let s = scaling_parameters(&profile, q).unwrap();
    assert!((s.delta - 0.125).abs() < 1e-12);
    assert!((s.t[0] - (0.125f64.ln() + q.ln())).abs() < 1e-9);
    assert!((s.t[2] - (3.0 * 0.125f64.ln() + q.ln())).abs() < 1e-9);
    assert!((s.t[3] - (q.ln() - 0.125f64.ln())).abs() < 1e-9);
}

/// Direct search over integer quadratics `a_0 + a_1 X + a_2 X²` for the
/// system with `n = 2`, `m = 1`.
fn indicator_by_polynomials(f: &[Rational], profile: &ApproximationProfile, q: &Rational) -> bool {
    let psi0 = profile.law(0).eval_f64(to_f64(q));
    let psi1 = profile.law(1).eval_f64(to_f64(q));
    let phi = profile.law(2).eval_f64(to_f64(q));
    let (f0, f1) = (to_f64(&f[0]), to_f64(&f[1]));
    let a2_max = phi.floor() as i64 + 1;
    let a1_max = ((psi0 + psi1 + phi * (f1 * f1 - f0 * f0).abs()) / (f1 - f0).abs()).ceil() as i64 + 2;
    let a0_max = (psi0 + a1_max as f64 * f0.abs() + phi * f0 * f0).ceil() as i64 + 2;
    (0..=1).all(|h| {
        let fh = &f[h];
        let mut found = false;
        'search: for a2 in -a2_max..=a2_max {
            for a1 in -a1_max..=a1_max {
                for a0 in -a0_max..=a0_max {
                    if a0 == 0 && a1 == 0 && a2 == 0 {
                        continue;
                    }
                    let p = |x: &Rational| int(a0) + int(a1) * x + int(a2) * x * x;
                    let der = int(a1) + int(2 * a2) * fh;
                    if profile.law(0).exceeds(&p(&f[0]), q)
                        && profile.law(1).exceeds(&p(&f[1]), q)
                        && profile.law(2).covers(&der, q)
                    {
                        found = true;
                        break 'search;
                    }
                }
            }
        }
        found
    })
}

#[test]
fn indicator_matches_polynomial_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut agreements = [0usize; 2];
    for _ in 0..60 {
        let x = ratio(rng.gen_range(1..=99), 100);
        let f = vec![x.clone(), &x * &x + int(2)];
        let psi = PowerLaw::parse(&format!("{}, -1", rng.gen_range(1..=4))).unwrap();
        let phi = PowerLaw::parse(&format!("{}/2, 1", rng.gen_range(1..=4))).unwrap();
        let profile = ApproximationProfile::new(2, 1, 1, vec![psi.clone(), psi], vec![phi]).unwrap();
        let q = int(rng.gen_range(2..=6));
        let fast = bad_set_indicator(&f, &profile, &q, DEFAULT_MAX_NODES).unwrap();
        assert_eq!(fast, indicator_by_polynomials(&f, &profile, &q), "x={x} q={q}");
        agreements[fast as usize] += 1;
    }
    assert!(agreements[0] > 0 && agreements[1] > 0, "{agreements:?}");
}

#[test]
fn measure_is_deterministic_and_bounded() {
    let chart = conjugate_core::profile::Chart::new(
        1,
        vec![conjugate_core::poly::parse_polynomial("x^2 + 2", &["x"]).unwrap()],
    )
    .unwrap();
    let profile = ApproximationProfile::original_case(3, &ratio(1, 2)).unwrap();
    let a = measure_estimate(&chart, &[0.0], &[1.0], &profile, &int(100), 300, 5).unwrap();
    let b = measure_estimate(&chart, &[0.0], &[1.0], &profile, &int(100), 300, 5).unwrap();
    assert_eq!(a, b);
    assert!((0.0..=1.0).contains(&a.fraction));
    assert_eq!(a.used + a.rejected, 300);
}
