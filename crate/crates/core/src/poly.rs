//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Every polynomial carries a fixed arity (at most [`MAX_ARITY`]); terms are
//! keyed by dense exponent vectors and no stored coefficient is zero.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{invalid, Error, Result};
use crate::rational::{format_rational, Rational};

pub const MAX_ARITY: usize = 16;

/// Dense exponent vector. Entries past the owning polynomial's arity are zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Exponents(pub [u16; MAX_ARITY]);

impl Exponents {
    pub fn zero() -> Self {
        Exponents([0; MAX_ARITY])
    }

    pub fn from_slice(e: &[u16]) -> Self {
        let mut out = [0u16; MAX_ARITY];
        out[..e.len()].copy_from_slice(e);
        Exponents(out)
    }

    pub fn unit(var: usize) -> Self {
        let mut e = Self::zero();
        e.0[var] = 1;
        e
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&x| x as u32).sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0.iter()) {
            *a += *b;
        }
        out
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller guarantees divisibility.
    pub fn quotient_of(&self, other: &Self) -> Self {
        let mut out = *other;
        for (a, b) in out.0.iter_mut().zip(self.0.iter()) {
            *a -= *b;
        }
        out
    }

    pub fn lcm(&self, other: &Self) -> Self {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0.iter()) {
            *a = (*a).max(*b);
        }
        out
    }

    pub fn is_coprime(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }
}

impl fmt::Debug for Exponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.0.iter().rposition(|&e| e != 0).map_or(0, |i| i + 1);
        write!(f, "{:?}", &self.0[..last])
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparsePolynomial {
    arity: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl SparsePolynomial {
    pub fn zero(arity: usize) -> Self {
        assert!(arity <= MAX_ARITY, "arity {arity} exceeds {MAX_ARITY}");
        SparsePolynomial { arity, terms: BTreeMap::new() }
    }

    pub fn constant(arity: usize, c: Rational) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(Exponents::zero(), c);
        p
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, Rational::one())
    }

    pub fn var(arity: usize, i: usize) -> Self {
        assert!(i < arity);
        Self::monomial(arity, Exponents::unit(i), Rational::one())
    }

    pub fn monomial(arity: usize, e: Exponents, c: Rational) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(e, c);
        p
    }

    /// Builds from `(exponents, coefficient)` pairs, summing duplicates.
    pub fn from_terms<I>(arity: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u16>, Rational)>,
    {
        if arity > MAX_ARITY {
            return invalid(format!("arity {arity} exceeds {MAX_ARITY}"));
        }
        let mut p = Self::zero(arity);
        for (e, c) in terms {
            if e.len() != arity {
                return Err(Error::ArityMismatch { expected: arity, found: e.len() });
            }
            p.add_term(Exponents::from_slice(&e), c);
        }
        Ok(p)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &Exponents) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        debug_assert!(e.0[self.arity..].iter().all(|&x| x == 0));
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.total_degree()).max()
    }

    /// Degree with per-variable weights.
    pub fn weighted_degree(&self, weights: &[u32]) -> Option<u32> {
        self.terms.keys().map(|e| e.0.iter().zip(weights).map(|(&x, &w)| x as u32 * w).sum()).max()
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.keys().map(|e| e.0[var]).max().unwrap_or(0)
    }

    /// Largest exponent vector in lexicographic order (variable 0 most significant).
    pub fn lex_leading(&self) -> Option<(&Exponents, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.total_degree());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: other.arity });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = Self::zero(self.arity);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.mul(eb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.arity);
        }
        SparsePolynomial { arity: self.arity, terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect() }
    }

    pub fn mul_monomial(&self, e: &Exponents, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.arity);
        }
        SparsePolynomial { arity: self.arity, terms: self.terms.iter().map(|(x, v)| (x.mul(e), v * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.arity);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: point.len() });
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e.0.iter()) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = crate::rational::to_f64(c);
                for (x, &k) in point.iter().zip(e.0.iter()) {
                    t *= x.powi(k as i32);
                }
                t
            })
            .sum()
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.arity);
        for (e, c) in &self.terms {
            let k = e.0[var];
            if k > 0 {
                let mut d = *e;
                d.0[var] -= 1;
                out.add_term(d, c * Rational::from_integer(k.into()));
            }
        }
        out
    }

    /// Applies a multi-index differential operator `∂^j`.
    pub fn partial(&self, orders: &[u16]) -> Self {
        let mut out = self.clone();
        for (var, &k) in orders.iter().enumerate() {
            for _ in 0..k {
                out = out.derivative(var);
            }
        }
        out
    }

    /// Exchanges variables `i` and `j`.
    pub fn swap_vars(&self, i: usize, j: usize) -> Self {
        SparsePolynomial {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut f = *e;
                    f.0.swap(i, j);
                    (f, c.clone())
                })
                .collect(),
        }
    }

    /// Invariant under every adjacent transposition (hence every permutation).
    pub fn is_symmetric(&self) -> bool {
        (0..self.arity.saturating_sub(1)).all(|i| self.swap_vars(i, i + 1) == *self)
    }

    /// Substitutes `subs[i]` for variable `i`; the result has the arity of the substitutes.
    pub fn substitute(&self, subs: &[SparsePolynomial]) -> Result<Self> {
        if subs.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: subs.len() });
        }
        let target = subs.first().map_or(0, |s| s.arity);
        if let Some(s) = subs.iter().find(|s| s.arity != target) {
            return Err(Error::ArityMismatch { expected: target, found: s.arity });
        }
        let mut powers: Vec<Vec<SparsePolynomial>> = subs.iter().map(|s| vec![Self::one(target), s.clone()]).collect();
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut t = Self::constant(target, c.clone());
            for (i, &k) in e.0[..self.arity].iter().enumerate() {
                let k = k as usize;
                while powers[i].len() <= k {
                    let next = &powers[i][powers[i].len() - 1] * &subs[i];
                    powers[i].push(next);
                }
                if k > 0 {
                    t = &t * &powers[i][k];
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Re-embeds into a larger variable set: variable `i` becomes `map[i]`.
    pub fn embed(&self, arity: usize, map: &[usize]) -> Self {
        let mut out = Self::zero(arity);
        for (e, c) in &self.terms {
            let mut f = Exponents::zero();
            for (i, &k) in e.0[..self.arity].iter().enumerate() {
                f.0[map[i]] += k;
            }
            out.add_term(f, c.clone());
        }
        out
    }

    /// Lex-order multivariate division: returns `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        self.check_arity(divisor)?;
        let (lead_e, lead_c) = divisor
            .lex_leading()
            .map(|(e, c)| (*e, c.clone()))
            .ok_or_else(|| Error::Invalid("division by the zero polynomial".into()))?;
        let mut quotient = Self::zero(self.arity);
        let mut remainder = Self::zero(self.arity);
        let mut work = self.clone();
        while let Some((e, c)) = work.terms.iter().next_back().map(|(e, c)| (*e, c.clone())) {
            if lead_e.divides(&e) {
                let qe = lead_e.quotient_of(&e);
                let qc = &c / &lead_c;
                work = &work - &divisor.mul_monomial(&qe, &qc);
                quotient.add_term(qe, qc);
            } else {
                work.terms.remove(&e);
                remainder.add_term(e, c);
            }
        }
        Ok((quotient, remainder))
    }

    /// Exact quotient; errors if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(divisor)?;
        if !r.is_zero() {
            return Err(Error::Internal("polynomial division left a nonzero remainder".into()));
        }
        Ok(q)
    }

    /// Renders with variables named `{prefix}{index}`.
    pub fn to_string_with(&self, prefix: &str) -> String {
        let names: Vec<String> = (0..self.arity).map(|i| format!("{prefix}{i}")).collect();
        self.to_string_named(&names)
    }

    pub fn to_string_named(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &k) in e.0[..self.arity].iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(names[i].clone()),
                    _ => factors.push(format!("{}^{}", names[i], k)),
                }
            }
            if factors.is_empty() {
                out.push_str(&format_rational(&mag));
            } else {
                if !mag.is_one() {
                    out.push_str(&format_rational(&mag));
                    out.push('*');
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

impl fmt::Display for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_with("T"))
    }
}

impl fmt::Debug for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparsePolynomial[{}]({})", self.arity, self)
    }
}

// Operator impls panic on arity mismatch; use the `try_*` forms on untrusted input.
impl std::ops::Add for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn add(self, rhs: Self) -> SparsePolynomial {
        self.try_add(rhs).expect("arity mismatch in polynomial addition")
    }
}

impl std::ops::Sub for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn sub(self, rhs: Self) -> SparsePolynomial {
        self.try_sub(rhs).expect("arity mismatch in polynomial subtraction")
    }
}

impl std::ops::Mul for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn mul(self, rhs: Self) -> SparsePolynomial {
        self.try_mul(rhs).expect("arity mismatch in polynomial multiplication")
    }
}

impl std::ops::Neg for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn neg(self) -> SparsePolynomial {
        self.scale(&-Rational::one())
    }
}

/// Parses expressions such as `x^2 + 3/2*x*y - 1` over the given variable names.
pub fn parse_polynomial(src: &str, names: &[&str]) -> Result<SparsePolynomial> {
    let arity = names.len();
    let cleaned: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return invalid("empty polynomial expression");
    }
    let mut out = SparsePolynomial::zero(arity);
    let mut chunks: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    for (i, ch) in cleaned.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 && !current.ends_with('^') {
            chunks.push((negative, std::mem::take(&mut current)));
            negative = ch == '-';
        } else if (ch == '+' || ch == '-') && i == 0 {
            negative = ch == '-';
        } else {
            current.push(ch);
        }
    }
    chunks.push((negative, current));
    for (negative, chunk) in chunks {
        if chunk.is_empty() {
            return invalid(format!("malformed polynomial {src:?}"));
        }
        let mut coeff = Rational::one();
        let mut e = Exponents::zero();
        for factor in chunk.split('*') {
            let (base, power) = match factor.split_once('^') {
                Some((b, p)) => {
                    let p: u16 = p.parse().map_err(|_| Error::Invalid(format!("bad exponent in {factor:?}")))?;
                    (b, p)
                }
                None => (factor, 1),
            };
            if let Some(idx) = names.iter().position(|n| *n == base) {
                e.0[idx] += power;
            } else {
                let c = crate::rational::parse_rational(base)?;
                coeff *= num_traits::pow(c, power as usize);
            }
        }
        if negative {
            coeff = -coeff;
        }
        out.add_term(e, coeff);
    }
    Ok(out)
}
