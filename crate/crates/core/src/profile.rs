//! Power laws `c·Q^e`, approximation profiles and manifold charts.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::poly::SparsePolynomial;
use crate::rational::{format_rational, parse_rational, to_f64, Rational};

/// `Q ↦ coeff·Q^exponent` with a positive rational coefficient and a
/// rational exponent. Comparisons against it are exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerLaw {
    pub coeff: Rational,
    pub exponent: Rational,
}

impl PowerLaw {
    pub fn new(coeff: Rational, exponent: Rational) -> Result<Self> {
        if !coeff.is_positive() {
            return invalid(format!("power law coefficient must be positive, got {}", format_rational(&coeff)));
        }
        Ok(PowerLaw { coeff, exponent })
    }

    pub fn constant(c: Rational) -> Result<Self> {
        Self::new(c, Rational::zero())
    }

    /// Parses `"coeff, exponent"`, each a rational such as `1/2`.
    pub fn parse(s: &str) -> Result<Self> {
        let (c, e) =
            s.split_once(',').ok_or_else(|| Error::Invalid(format!("power law must be \"coeff, exponent\": {s:?}")))?;
        Self::new(parse_rational(c)?, parse_rational(e)?)
    }

    pub fn render(&self) -> String {
        format!("{}, {}", format_rational(&self.coeff), format_rational(&self.exponent))
    }

    pub fn eval_f64(&self, q: f64) -> f64 {
        to_f64(&self.coeff) * q.powf(to_f64(&self.exponent))
    }

    pub fn ln_at(&self, q: f64) -> f64 {
        to_f64(&self.coeff).ln() + to_f64(&self.exponent) * q.ln()
    }

    /// Product law: coefficients multiply, exponents add.
    pub fn product<'a>(laws: impl IntoIterator<Item = &'a PowerLaw>) -> PowerLaw {
        laws.into_iter().fold(PowerLaw { coeff: Rational::one(), exponent: Rational::zero() }, |acc, l| PowerLaw {
            coeff: acc.coeff * &l.coeff,
            exponent: acc.exponent + &l.exponent,
        })
    }

    pub fn scaled(&self, factor: &Rational) -> Result<PowerLaw> {
        Self::new(&self.coeff * factor, self.exponent.clone())
    }

    /// The exact value at `q` when it is rational (integral exponent, or
    /// `q` a perfect power).
    pub fn eval_exact(&self, q: &Rational) -> Option<Rational> {
        let e = &self.exponent;
        let root = exact_root(q, e.denom())?;
        let p = e.numer().to_i64()?;
        Some(&self.coeff * crate::rational::pow_i(&root, p))
    }

    /// Exact comparison of a nonnegative value with the law at `q > 0`.
    pub fn cmp_value(&self, v: &Rational, q: &Rational) -> Ordering {
        assert!(!v.is_negative(), "cmp_value expects a nonnegative value");
        assert!(q.is_positive(), "power laws are evaluated at positive Q");
        if let Some(exact) = self.eval_exact(q) {
            return v.cmp(&exact);
        }
        // v <=> c·Q^{p/r}  iff  v^r <=> c^r·Q^p  (r > 0, both sides positive)
        let r = self.exponent.denom().to_u32().expect("exponent denominator too large");
        let p = self.exponent.numer().to_i64().expect("exponent numerator too large");
        let lhs = num_traits::pow(v.clone(), r as usize);
        let rhs = num_traits::pow(self.coeff.clone(), r as usize) * crate::rational::pow_i(q, p);
        lhs.cmp(&rhs)
    }

    /// `|v| < law(q)` exactly.
    pub fn exceeds(&self, v: &Rational, q: &Rational) -> bool {
        self.cmp_value(&v.abs(), q) == Ordering::Less
    }

    /// `|v| ≤ law(q)` exactly.
    pub fn covers(&self, v: &Rational, q: &Rational) -> bool {
        self.cmp_value(&v.abs(), q) != Ordering::Greater
    }
}

/// Exact `r`-th root of a positive rational when it exists.
fn exact_root(q: &Rational, r: &BigInt) -> Option<Rational> {
    let r = r.to_u32()?;
    if r == 1 {
        return Some(q.clone());
    }
    let n = q.numer().nth_root(r);
    let d = q.denom().nth_root(r);
    (num_traits::pow(n.clone(), r as usize) == *q.numer() && num_traits::pow(d.clone(), r as usize) == *q.denom())
        .then(|| Rational::new(n, d))
}

/// The functions `ψ_0..ψ_m` (value bounds) and `φ_{m+1}..φ_n` (coefficient
/// bounds) of a Diophantine system of degree `n` on a `d`-dimensional chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproximationProfile {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub psi: Vec<PowerLaw>,
    pub phi: Vec<PowerLaw>,
}

impl ApproximationProfile {
    pub fn new(n: usize, m: usize, d: usize, psi: Vec<PowerLaw>, phi: Vec<PowerLaw>) -> Result<Self> {
        if m >= n {
            return invalid(format!("need n > m, got n={n}, m={m}"));
        }
        if d == 0 || d > m + 1 {
            return invalid(format!("need 1 <= d <= m+1, got d={d}, m={m}"));
        }
        if psi.len() != m + 1 {
            return Err(Error::ArityMismatch { expected: m + 1, found: psi.len() });
        }
        if phi.len() != n - m {
            return Err(Error::ArityMismatch { expected: n - m, found: phi.len() });
        }
        Ok(ApproximationProfile { n, m, d, psi, phi })
    }

    /// The curve profile with `d = m = 1`: `ψ_0 = ψ_1 = Q^{-(n-1)/2}`,
    /// `φ_2 = ε^{n+1}·Q` and `φ_k = Q` for `k ≥ 3`. The product is `ε^{n+1}`,
    /// so `δ = ε`.
    pub fn original_case(n: usize, eps: &Rational) -> Result<Self> {
        if n < 2 {
            return invalid(format!("the curve profile needs n >= 2, got {n}"));
        }
        let psi = vec![PowerLaw::new(Rational::one(), Rational::new(BigInt::from(1 - n as i64), BigInt::from(2)))?; 2];
        let mut phi = vec![PowerLaw::new(Rational::one(), Rational::one())?; n - 1];
        phi[0] = PowerLaw::new(num_traits::pow(eps.clone(), n + 1), Rational::one())?;
        Self::new(n, 1, 1, psi, phi)
    }

    /// Bound on axis `k` of the coefficient/value system (ψ for `k ≤ m`).
    pub fn law(&self, k: usize) -> &PowerLaw {
        if k <= self.m {
            &self.psi[k]
        } else {
            &self.phi[k - self.m - 1]
        }
    }

    /// `Πψ_k·Πφ_k` as a single power law.
    pub fn product(&self) -> PowerLaw {
        PowerLaw::product(self.psi.iter().chain(&self.phi))
    }
}

/// A `d`-dimensional chart `x ↦ (x_0, …, x_{d-1}, f_d(x), …, f_m(x))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub d: usize,
    /// `f_d..f_m`, polynomials in the `d` chart variables.
    pub components: Vec<SparsePolynomial>,
}

impl Chart {
    pub fn new(d: usize, components: Vec<SparsePolynomial>) -> Result<Self> {
        if d == 0 {
            return invalid("a chart needs at least one coordinate");
        }
        if let Some(c) = components.iter().find(|c| c.arity() != d) {
            return Err(Error::ArityMismatch { expected: d, found: c.arity() });
        }
        Ok(Chart { d, components })
    }

    /// `m`, the index of the last coordinate.
    pub fn m(&self) -> usize {
        self.d + self.components.len() - 1
    }

    /// `(f_0(x), …, f_m(x))` exactly.
    pub fn values(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.d {
            return Err(Error::ArityMismatch { expected: self.d, found: x.len() });
        }
        let mut out = x.to_vec();
        for c in &self.components {
            out.push(c.eval(x)?);
        }
        Ok(out)
    }

    pub fn values_f64(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        out.extend(self.components.iter().map(|c| c.eval_f64(x)));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn exact_comparison_with_fractional_exponent() {
        let law = PowerLaw::new(int(4), ratio(-1, 2)).unwrap();
        // 4·16^{-1/2} = 1
        assert_eq!(law.cmp_value(&int(1), &int(16)), Ordering::Equal);
        assert!(law.exceeds(&ratio(99, 100), &int(16)));
        assert!(!law.exceeds(&int(1), &int(16)));
        assert!(law.covers(&int(1), &int(16)));
        // 4·2^{-1/2} = 2.828…, not rational
        assert!(law.exceeds(&ratio(2828, 1000), &int(2)));
        assert!(!law.exceeds(&ratio(2829, 1000), &int(2)));
    }

    #[test]
    fn product_and_parse() {
        let a = PowerLaw::parse("1/2, -1").unwrap();
        let b = PowerLaw::parse("3, 2").unwrap();
        let p = PowerLaw::product([&a, &b]);
        assert_eq!(p.coeff, ratio(3, 2));
        assert_eq!(p.exponent, int(1));
        assert_eq!(p.render(), "3/2, 1");
        assert!(PowerLaw::parse("0, 1").is_err());
        assert!(PowerLaw::parse("1").is_err());
    }

    #[test]
    fn original_case_has_delta_eps() {
        let eps = ratio(1, 4);
        let p = ApproximationProfile::original_case(4, &eps).unwrap();
        let prod = p.product();
        assert_eq!(prod.exponent, int(0));
        assert_eq!(prod.coeff, num_traits::pow(eps, 5));
        assert_eq!(p.psi[0].exponent, ratio(-3, 2));
    }
}
