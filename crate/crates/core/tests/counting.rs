//! Counting algebraic points near a curve, checked against an exact
//! quadratic-field oracle and for monotonicity.

use std::ops::ControlFlow;

use conjugate_core::counting::*;
use conjugate_core::poly::parse_polynomial;
use conjugate_core::profile::Chart;
use conjugate_core::rational::{int, ratio, Rational};
use conjugate_core::reference::quadratic_count_oracle;

fn chart(expr: &str) -> Chart {
    Chart::new(1, vec![parse_polynomial(expr, &["x"]).unwrap()]).unwrap()
}

fn query(q: i64, gamma: Rational, c: Rational, lo: Rational, hi: Rational) -> CountQuery {
    CountQuery { n: 2, q, gamma, c, lo: vec![lo], hi: vec![hi], retain: 0 }
}

#[test]
fn quadratic_counts_match_the_oracle() {
    // (chart, coefficients in increasing degree, J)
    let cases = [
        ("x^2 + 2", vec![int(2), int(0), int(1)], int(0), int(1)),
        ("1/3*x^2 - x + 1/2", vec![ratio(1, 2), int(-1), ratio(1, 3)], int(-2), int(3)),
        ("2*x - 1", vec![int(-1), int(2)], ratio(-1, 2), ratio(5, 2)),
    ];
    for (expr, coeffs, lo, hi) in &cases {
        let ch = chart(expr);
        for q in [3i64, 7, 12, 20] {
            for (gamma, c) in
                [(ratio(1, 2), int(4)), (int(1), int(2)), (ratio(3, 2), ratio(1, 3)), (ratio(1, 4), int(1))]
            {
                let fast = count_near_manifold(&ch, &query(q, gamma.clone(), c.clone(), lo.clone(), hi.clone()));
                let fast = fast.unwrap();
                let exact = quadratic_count_oracle(coeffs, q, &gamma, &c, lo, hi).unwrap();
                // ties with the threshold are settled exactly in the quadratic field
                assert_eq!(fast.undecidable, 0, "{expr} Q={q} gamma={gamma} c={c}");
                assert_eq!(fast.count, exact, "{expr} Q={q} gamma={gamma} c={c}");
            }
        }
    }
}

#[test]
fn exact_ties_are_decided() {
    // at Q = 1 the tolerance c·Q^{-1/2} is the integer c, and at Q = 3 with
    // γ = 1 it is 2/3; both admit points exactly on the boundary
    let ch = chart("x^2 + 2");
    let r = count_near_manifold(&ch, &query(1, ratio(1, 2), int(4), int(0), int(1))).unwrap();
    assert_eq!((r.count, r.undecidable), (0, 0));
    let ch = chart("1/3*x^2 - x + 1/2");
    let r = count_near_manifold(&ch, &query(3, int(1), int(2), int(-2), int(3))).unwrap();
    let exact = quadratic_count_oracle(&[ratio(1, 2), int(-1), ratio(1, 3)], 3, &int(1), &int(2), &int(-2), &int(3));
    assert_eq!((r.count, r.undecidable), (exact.unwrap(), 0));
}

#[test]
fn counts_are_monotone_in_c_and_q() {
    let ch = chart("x^2 + 2");
    let count = |q, c| count_near_manifold(&ch, &query(q, ratio(1, 2), c, int(0), int(1))).unwrap().count;
    let cs = [ratio(1, 4), int(1), int(4), int(16)];
    for q in [8i64, 16, 24] {
        let row: Vec<u64> = cs.iter().map(|c| count(q, c.clone())).collect();
        assert!(row.windows(2).all(|w| w[0] <= w[1]), "Q={q} {row:?}");
    }
    // with c = Q·t and γ = 1 the tolerance is t for every Q, so a larger Q only adds points
    let flat =
        |q: i64| count_near_manifold(&ch, &query(q, int(1), int(q) * ratio(1, 10), int(0), int(1))).unwrap().count;
    let series: Vec<u64> = [4i64, 8, 16, 32].iter().map(|&q| flat(q)).collect();
    assert!(series.windows(2).all(|w| w[0] <= w[1]), "{series:?}");
}

#[test]
fn empty_inputs_give_zero() {
    let ch = chart("x^2 + 2");
    assert_eq!(count_near_manifold(&ch, &query(10, ratio(1, 2), int(0), int(0), int(1))).unwrap().count, 0);
    assert_eq!(count_near_manifold(&ch, &query(10, ratio(1, 2), int(4), int(1), int(1))).unwrap().count, 0);
    assert!(count_near_manifold(&ch, &query(10, int(-1), int(4), int(0), int(1))).is_err());
}

#[test]
fn retained_samples_replay() {
    let ch = chart("x^2 + 2");
    let mut q = query(16, ratio(1, 2), int(4), int(0), int(1));
    q.retain = 25;
    let r = count_near_manifold(&ch, &q).unwrap();
    assert_eq!(r.samples.len(), 25.min(r.count as usize));
    for s in &r.samples {
        assert!(s.replay().unwrap(), "{}", s.render());
        assert_eq!(s.degree, 2);
    }
    let mut cubic = CountQuery { n: 3, ..q.clone() };
    cubic.q = 4;
    let r = count_near_manifold(&ch, &cubic).unwrap();
    assert!(r.samples.iter().all(|s| s.replay().unwrap()));
}

fn points(n: usize, m: usize, q: i64) -> Vec<AlgebraicPoint> {
    let mut out = Vec::new();
    enumerate_algebraic_points(n, m, q, |p| {
        out.push(p);
        ControlFlow::Continue(())
    })
    .unwrap();
    out
}

#[test]
fn enumeration_is_monotone_and_replays() {
    for (n, m) in [(2, 1), (3, 1), (3, 2)] {
        let mut prev = 0;
        for q in 1..=4 {
            let pts = points(n, m, q);
            assert!(pts.len() >= prev);
            prev = pts.len();
            for p in &pts {
                assert!(p.replay().unwrap(), "{}", p.render());
                assert!(p.height <= q.into() && p.degree <= n);
            }
        }
    }
    assert!(points(3, 1, 4).len() > points(2, 1, 4).len());
    // only quadratics carry ordered pairs of distinct roots when n = 2
    assert!(points(2, 1, 5).iter().all(|p| p.degree == 2 && p.coordinates.len() == 2));
}

#[test]
fn enumeration_matches_the_oracle_with_wide_tolerance() {
    // with J = (−Q−1, Q+1) and a huge c every ordered real pair counts
    let total = points(2, 1, 3).len() as u64;
    let all = quadratic_count_oracle(&[int(0), int(1)], 3, &int(0), &int(1_000), &int(-4), &int(4)).unwrap();
    assert_eq!(total, all);
}

#[test]
fn exponent_fit_recovers_a_power_law() {
    let pts: Vec<(f64, f64)> = [10.0f64, 20.0, 40.0, 80.0].iter().map(|&q| (q, 3.0 * q.powf(2.5))).collect();
    let fit = fit_exponent(&pts).unwrap();
    assert!((fit.slope - 2.5).abs() < 1e-9 && fit.residual < 1e-9);
    assert!(fit_exponent(&pts[..2]).is_err());
}
