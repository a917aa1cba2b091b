//! Slow, independent reference implementations used to cross-check the fast
//! paths: a linear-system symord, a double-loop quadratic point count in exact
//! quadratic-field arithmetic, and a bounding-box shortest-vector search.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::matrix::RationalMatrix;
use crate::poly::Exponents;
use crate::quadratic::QuadraticElement;
use crate::rational::{int, Rational};
use crate::symmetric::{enumerate_partitions, monomial_symmetric, IndexMode};
use crate::symord::PolynomialMap;

/// Smallest `k ≤ max_degree` such that the monomial symmetric polynomials
/// `m_λ(p)` with `|λ| ≤ k` are linearly dependent, found by exact rank.
/// `None` means no relation up to `max_degree`.
pub fn symord_by_linear_system(p: &PolynomialMap, max_degree: u32) -> Result<Option<u32>> {
    let tau = p.tau();
    for k in 1..=max_degree {
        let family = enumerate_partitions(k, tau, IndexMode::WeightBounded);
        let mut columns: Vec<BTreeMap<Exponents, Rational>> = Vec::with_capacity(family.len());
        for lambda in &family {
            let m = monomial_symmetric(lambda, tau)?;
            let image = m.substitute(p.components())?;
            columns.push(image.terms().map(|(e, c)| (*e, c.clone())).collect());
        }
        let monomials: Vec<Exponents> = {
            let mut all: Vec<Exponents> = columns.iter().flat_map(|c| c.keys().copied()).collect();
            all.sort();
            all.dedup();
            all
        };
        if monomials.len() < columns.len() {
            return Ok(Some(k));
        }
        let rows: Vec<Vec<Rational>> = monomials
            .iter()
            .map(|e| columns.iter().map(|c| c.get(e).cloned().unwrap_or_else(Rational::zero)).collect())
            .collect();
        if RationalMatrix::from_rows(rows)?.rank() < columns.len() {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Counts ordered root pairs `(α_0, α_1)` of primitive irreducible quadratics
/// `a_2 X² + a_1 X + a_0` with `0 < a_2 ≤ Q`, `|a_1|, |a_0| ≤ Q`, such that
/// `lo < α_0 < hi` and `|f(α_0) − α_1| < c·Q^{−γ}`, where `f` is given by its
/// coefficients in increasing degree. Every comparison is exact in `ℚ(√D)`.
pub fn quadratic_count_oracle(
    f: &[Rational],
    q: i64,
    gamma: &Rational,
    c: &Rational,
    lo: &Rational,
    hi: &Rational,
) -> Result<u64> {
    if q < 1 {
        return invalid("Q must be at least 1");
    }
    if !c.is_positive() || lo >= hi {
        return Ok(0);
    }
    // |e| < c·Q^{-γ}  iff  (e²)^r < c^{2r}·Q^{-2p}  for γ = p/r
    let r = gamma.denom().to_usize().ok_or_else(|| Error::Invalid("exponent denominator too large".into()))?;
    let p = gamma.numer().to_i64().ok_or_else(|| Error::Invalid("exponent numerator too large".into()))?;
    let threshold = num_traits::pow(c * c, r) * crate::rational::pow_i(&int(q), -2 * p);
    let mut count = 0u64;
    for a2 in -q..=q {
        for a1 in -q..=q {
            for a0 in -q..=q {
                if a2 <= 0 || BigInt::from(a2).gcd(&BigInt::from(a1)).gcd(&BigInt::from(a0)) != BigInt::one() {
                    continue;
                }
                let disc = BigInt::from(a1) * a1 - BigInt::from(4) * a2 * a0;
                if !disc.is_positive() || disc.sqrt().pow(2) == disc {
                    continue;
                }
                let d = Rational::from_integer(disc);
                let den = int(2 * a2);
                let root = |s: i64| QuadraticElement { x: int(-a1) / &den, y: int(s) / &den };
                for (s0, s1) in [(1, -1), (-1, 1)] {
                    let a = root(s0);
                    let b = root(s1);
                    let above = a.sub(&QuadraticElement::rational(lo.clone())).signum(&d) > 0;
                    let below = QuadraticElement::rational(hi.clone()).sub(&a).signum(&d) > 0;
                    if !(above && below) {
                        continue;
                    }
                    let fa = f.iter().rev().fold(QuadraticElement::rational(Rational::zero()), |acc, coeff| {
                        acc.mul(&a, &d).add(&QuadraticElement::rational(coeff.clone()))
                    });
                    let e = fa.sub(&b);
                    let e2 = e.mul(&e, &d);
                    let mut power = QuadraticElement::rational(Rational::one());
                    for _ in 0..r {
                        power = power.mul(&e2, &d);
                    }
                    if QuadraticElement::rational(threshold.clone()).sub(&power).signum(&d) > 0 {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

/// Shortest nonzero vector of `B·ℤ^k` in the sup norm by scanning the box of
/// coefficient vectors `a = B^{-1}v` over `‖v‖∞ ≤ R`, with `R` the shortest
/// basis column. Ties as in the fast search. Returns `(coefficients, length)`.
pub fn shortest_vector_by_box(basis: &RationalMatrix, max_points: u64) -> Result<(Vec<i64>, Rational)> {
    let k = basis.rows();
    let inv = basis.inverse()?;
    let radius = (0..k)
        .map(|j| basis.column(j).iter().map(|x| x.abs()).max().unwrap_or_else(Rational::zero))
        .min()
        .ok_or_else(|| Error::Invalid("empty basis".into()))?;
    let bounds: Vec<i64> = (0..k)
        .map(|i| {
            let s: Rational = inv.row(i).iter().map(|x| x.abs()).sum::<Rational>() * &radius;
            s.floor().to_integer().to_i64().ok_or_else(|| Error::Budget("coefficient box too large".into()))
        })
        .collect::<Result<_>>()?;
    let points: u64 = bounds.iter().try_fold(1u64, |acc, b| acc.checked_mul(2 * *b as u64 + 1)).unwrap_or(u64::MAX);
    if points > max_points {
        return Err(Error::Budget(format!("coefficient box has {points} points")));
    }
    let mut a: Vec<i64> = bounds.iter().map(|b| -b).collect();
    let mut best: Option<(Rational, Vec<i64>)> = None;
    loop {
        let canonical = a.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0);
        if canonical {
            let coeffs: Vec<Rational> = a.iter().map(|&x| int(x)).collect();
            let len = basis.mul_vec(&coeffs)?.iter().map(|x| x.abs()).max().unwrap_or_else(Rational::zero);
            let better = match &best {
                None => true,
                Some((l, c)) => len < *l || (len == *l && a < *c),
            };
            if better {
                best = Some((len, a.clone()));
            }
        }
        let mut i = 0;
        loop {
            if i == k {
                let (len, coeffs) = best.ok_or_else(|| Error::Internal("no lattice vector in the box".into()))?;
                return Ok((coeffs, len));
            }
            if a[i] < bounds[i] {
                a[i] += 1;
                break;
            }
            a[i] = -bounds[i];
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn linear_system_symord_of_small_veronese() {
        assert_eq!(symord_by_linear_system(&PolynomialMap::veronese(2), 5).unwrap(), Some(4));
        assert_eq!(symord_by_linear_system(&PolynomialMap::veronese(1), 5).unwrap(), None);
    }

    #[test]
    fn oracle_empty_cases() {
        let f = vec![int(2), int(0), int(1)];
        assert_eq!(quadratic_count_oracle(&f, 4, &ratio(1, 2), &int(0), &int(0), &int(1)).unwrap(), 0);
        assert_eq!(quadratic_count_oracle(&f, 4, &ratio(1, 2), &int(4), &int(1), &int(1)).unwrap(), 0);
    }

    #[test]
    fn box_search_on_a_diagonal_lattice() {
        let b = RationalMatrix::from_i64_rows(&[vec![3, 0], vec![0, 2]]).unwrap();
        let (a, len) = shortest_vector_by_box(&b, 1000).unwrap();
        assert_eq!(len, int(2));
        assert_eq!(a, vec![0, 1]);
    }
}
