//! Integer polynomials in one variable: exact evaluation, Sturm root
//! isolation, bisection enclosures and irreducibility up to degree five.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::rational::{format_rational, to_f64, Rational};

/// `a_0 + a_1 X + … + a_n X^n` with integer coefficients, trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntegerPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntegerPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    /// Naive height: the largest absolute coefficient.
    pub fn height(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides by the content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        let g = self.content();
        if g.is_zero() {
            return self.clone();
        }
        let g = if self.leading().is_negative() { -g } else { g };
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * BigInt::from(k)).collect())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        // Horner on numerator/denominator: Σ a_k p^k q^{n-k} / q^n
        let (p, q) = (x.numer(), x.denom());
        let n = self.coeffs.len();
        if n == 0 {
            return Rational::zero();
        }
        let mut acc = BigInt::zero();
        let mut qpow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * p + c * &qpow;
            qpow *= q;
        }
        // qpow = q^n, one factor too many
        Rational::new(acc, qpow / q)
    }

    /// Sign of `P(x)`: −1, 0 or 1.
    pub fn sign_at(&self, x: &Rational) -> i32 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    fn to_rational(&self) -> Vec<Rational> {
        self.coeffs.iter().map(|c| Rational::from_integer(c.clone())).collect()
    }

    /// Square-free part `P / gcd(P, P')`, made primitive.
    pub fn squarefree_part(&self) -> Self {
        if self.degree().unwrap_or(0) < 1 {
            return self.primitive_part();
        }
        let g = rgcd(self.to_rational(), self.derivative().to_rational());
        if g.len() <= 1 {
            return self.primitive_part();
        }
        let (q, _) = rdivrem(&self.to_rational(), &g);
        from_rational_coeffs(&q).primitive_part()
    }
}

impl fmt::Display for IntegerPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "X")?,
                (1, false) => write!(f, "{mag}*X")?,
                (_, true) => write!(f, "X^{k}")?,
                (_, false) => write!(f, "{mag}*X^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntegerPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn trim(mut v: Vec<Rational>) -> Vec<Rational> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn rdivrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead = b.last().expect("division by the zero polynomial").clone();
    let mut q = vec![Rational::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let f = r.last().unwrap() / &lead;
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] -= &f * bi;
        }
        q[shift] = f;
        r.pop();
        r = trim(r);
    }
    (trim(q), r)
}

fn rgcd(mut a: Vec<Rational>, mut b: Vec<Rational>) -> Vec<Rational> {
    a = trim(a);
    b = trim(b);
    while !b.is_empty() {
        let (_, r) = rdivrem(&a, &b);
        a = b;
        b = r;
    }
    a
}

fn from_rational_coeffs(v: &[Rational]) -> IntegerPolynomial {
    let lcm = v.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    IntegerPolynomial::new(v.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect())
}

/// An interval holding exactly one real root: open `(lo, hi)` with the
/// square-free part nonzero at both ends, or the single point `lo = hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootEnclosure {
    pub lo: Rational,
    pub hi: Rational,
}

impl RootEnclosure {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// Open enclosures may share an endpoint; only equal exact roots collide.
    pub fn is_disjoint(&self, other: &RootEnclosure) -> bool {
        self.hi < other.lo
            || other.hi < self.lo
            || ((self.hi == other.lo || other.hi == self.lo) && !(self.is_exact() && other.is_exact()))
    }

    pub fn midpoint_f64(&self) -> f64 {
        (to_f64(&self.lo) + to_f64(&self.hi)) / 2.0
    }

    pub fn render(&self) -> String {
        if self.is_exact() {
            format_rational(&self.lo)
        } else {
            format!("({}, {})", format_rational(&self.lo), format_rational(&self.hi))
        }
    }

    /// Halves the enclosure using exact signs of the square-free part `sqf`.
    pub fn bisect(&mut self, sqf: &IntegerPolynomial) {
        if self.is_exact() {
            return;
        }
        let mid = (&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2));
        let sm = sqf.sign_at(&mid);
        if sm == 0 {
            self.lo = mid.clone();
            self.hi = mid;
        } else if sm == sqf.sign_at(&self.lo) {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }

    /// Bisects until the width is at most `width`.
    pub fn refine_to(&mut self, sqf: &IntegerPolynomial, width: &Rational) {
        while !self.is_exact() && &self.width() > width {
            self.bisect(sqf);
        }
    }
}

/// Sturm sequence of a square-free polynomial.
pub struct SturmSequence {
    seq: Vec<IntegerPolynomial>,
}

impl SturmSequence {
    pub fn new(p: &IntegerPolynomial) -> Self {
        let mut seq = vec![p.clone(), p.derivative()];
        while seq.last().is_some_and(|q| q.degree().unwrap_or(0) > 0) {
            let a = seq[seq.len() - 2].to_rational();
            let b = seq[seq.len() - 1].to_rational();
            let (_, r) = rdivrem(&a, &b);
            if r.is_empty() {
                break;
            }
            // negate the remainder; scaling by a positive integer keeps signs
            let neg: Vec<Rational> = r.iter().map(|c| -c).collect();
            let ip = from_rational_coeffs(&neg);
            let g = ip.content();
            seq.push(IntegerPolynomial::new(ip.coeffs.iter().map(|c| c / &g).collect()));
        }
        seq.retain(|q| !q.is_zero());
        SturmSequence { seq }
    }

    /// Sign changes of the sequence at `x` (zeros skipped).
    pub fn variations(&self, x: &Rational) -> usize {
        let mut last = 0;
        let mut count = 0;
        for q in &self.seq {
            let s = q.sign_at(x);
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

/// Strict upper bound on the absolute value of every root (Cauchy).
pub fn root_bound(p: &IntegerPolynomial) -> Rational {
    let lead = Rational::from_integer(p.leading().abs());
    let max = p.coeffs[..p.coeffs.len() - 1].iter().map(|c| c.abs()).max().unwrap_or_default();
    Rational::one() + Rational::from_integer(max) / lead
}

/// Disjoint enclosures, sorted ascending, one per distinct real root.
/// Split points are chosen away from roots, so every enclosure is open.
pub fn sturm_isolate(p: &IntegerPolynomial) -> Result<Vec<RootEnclosure>> {
    let Some(deg) = p.degree() else {
        return invalid("cannot isolate the roots of the zero polynomial");
    };
    if deg == 0 {
        return Ok(Vec::new());
    }
    let sqf = p.squarefree_part();
    let sturm = SturmSequence::new(&sqf);
    let b = root_bound(&sqf);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        let c = sturm.count(&lo, &hi);
        if c == 0 {
            continue;
        }
        if c == 1 {
            out.push(RootEnclosure { lo, hi });
            continue;
        }
        let mid = split_point(&sqf, &lo, &hi);
        stack.push((mid.clone(), hi));
        stack.push((lo, mid));
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    Ok(out)
}

/// A point strictly inside `(lo, hi)` where `sqf` does not vanish.
fn split_point(sqf: &IntegerPolynomial, lo: &Rational, hi: &Rational) -> Rational {
    let mut k = 2i64;
    loop {
        for j in 1..k {
            let t = Rational::new(BigInt::from(j), BigInt::from(k));
            let x = lo + (hi - lo) * t;
            if sqf.sign_at(&x) != 0 {
                return x;
            }
        }
        k += 1;
    }
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let n = n.abs().to_u64().ok_or_else(|| Error::Budget("coefficient too large for divisor search".into()))?;
    if n > 1_000_000_000_000 {
        return Err(Error::Budget("coefficient too large for divisor search".into()));
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Ok(out)
}

/// Rational roots `p/q` of `P` with `p | a_0`, `q | a_n`.
fn has_rational_root(p: &IntegerPolynomial) -> Result<bool> {
    if p.coeff(0).is_zero() {
        return Ok(true);
    }
    for num in divisors(&p.coeff(0))? {
        for den in divisors(&p.leading())? {
            for s in [1, -1] {
                let x = Rational::new(&num * BigInt::from(s), den.clone());
                if p.sign_at(&x) == 0 {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// Whether `P` has a factor `b_2 X² + b_1 X + b_0` over ℤ. Assumes no
/// rational roots, so `P(±1) ≠ 0` and `b_2 ± b_1 + b_0` divide them.
fn has_quadratic_factor(p: &IntegerPolynomial) -> Result<bool> {
    let p1 = p.eval(&Rational::one()).to_integer();
    let pm1 = p.eval(&-Rational::one()).to_integer();
    let target = p.to_rational();
    for b2 in divisors(&p.leading())? {
        for b0abs in divisors(&p.coeff(0))? {
            for b0 in [b0abs.clone(), -b0abs] {
                for d in divisors(&p1)? {
                    for d in [d.clone(), -d] {
                        let b1 = &d - &b2 - &b0;
                        let at_m1 = &b2 - &b1 + &b0;
                        if at_m1.is_zero() || !(&pm1 % &at_m1).is_zero() {
                            continue;
                        }
                        let f: Vec<Rational> =
                            [&b0, &b1, &b2].iter().map(|c| Rational::from_integer((*c).clone())).collect();
                        let (q, r) = rdivrem(&target, &f);
                        if r.is_empty() && q.iter().all(|c| c.is_integer()) {
                            return Ok(true);
                        }
                    }
                }
            }
        }
    }
    Ok(false)
}

/// Irreducibility over ℚ for degree at most five.
pub fn is_irreducible(p: &IntegerPolynomial) -> Result<bool> {
    let Some(deg) = p.degree() else {
        return invalid("the zero polynomial is not irreducible");
    };
    if deg == 0 {
        return invalid("constants are neither reducible nor irreducible");
    }
    if deg > 5 {
        return invalid(format!("irreducibility test supports degree <= 5, got {deg}"));
    }
    let p = p.primitive_part();
    if deg == 1 {
        return Ok(true);
    }
    if has_rational_root(&p)? {
        return Ok(false);
    }
    if deg <= 3 {
        return Ok(true);
    }
    Ok(!has_quadratic_factor(&p)?)
}

/// Bisection enclosure of a root near a target, or the lack of a sign change.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootSearch {
    Found(RootEnclosure),
    NoSignChange,
}

/// Looks for a root of `P` in `[y − r, y + r]` by a sign change at the ends,
/// then bisects until the width is at most `2^{-precision}·r`.
pub fn bracket_root(p: &IntegerPolynomial, y: &Rational, r: &Rational, precision: u32) -> RootSearch {
    let mut lo = y - r;
    let mut hi = y + r;
    let (slo, shi) = (p.sign_at(&lo), p.sign_at(&hi));
    if slo == 0 {
        hi = lo.clone();
        return RootSearch::Found(RootEnclosure { lo, hi });
    }
    if shi == 0 {
        lo = hi.clone();
        return RootSearch::Found(RootEnclosure { lo, hi });
    }
    if slo == shi {
        return RootSearch::NoSignChange;
    }
    let target = r * Rational::new(BigInt::one(), BigInt::one() << precision);
    let mut enc = RootEnclosure { lo, hi };
    // plain bisection on P itself keeps the sign-change invariant
    while !enc.is_exact() && enc.width() > target {
        let mid = (&enc.lo + &enc.hi) / Rational::from_integer(BigInt::from(2));
        let sm = p.sign_at(&mid);
        if sm == 0 {
            enc = RootEnclosure { lo: mid.clone(), hi: mid };
        } else if sm == slo {
            enc.lo = mid;
        } else {
            enc.hi = mid;
        }
    }
    RootSearch::Found(enc)
}
