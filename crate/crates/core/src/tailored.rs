//! Tailored polynomials: `n+1` independent Eisenstein-irreducible integer
//! polynomials that are small at the points `f_0(x), …, f_m(x)`, built from
//! successive-minima witnesses, a Bertrand prime and an Eisenstein twist.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{invalid, Error, Result};
use crate::lattice::{build_m, successive_minima, ConvexBody};
use crate::matrix::RationalMatrix;
use crate::profile::ApproximationProfile;
use crate::rational::{format_rational, int, Rational};
use crate::univariate::{bracket_root, IntegerPolynomial, RootSearch};

/// The constants of the construction at one point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailoredConstants {
    pub delta0: Rational,
    pub delta_min: Rational,
    pub delta_max: Rational,
    pub det_m: Rational,
    /// `det(M)/(δ_min·δ_0^n)`
    pub delta_n: Rational,
    /// `2^{n+1}·δ_max·δ_n^{n+1}`
    pub c_prime: Rational,
    /// `4(n+1)·δ_n·c'^2`, the form used for every bound.
    pub c_y: Rational,
    /// `2^{2n+4}(n+1)·δ_max^2·δ_n^{2n+3}`, recorded for comparison only.
    pub c_y_alternative: Rational,
    pub c_f: Rational,
    /// `c_y / c_f`
    pub kappa: Rational,
}

impl TailoredConstants {
    pub fn new(
        n: usize,
        det_m: &Rational,
        delta0: &Rational,
        delta_min: &Rational,
        delta_max: &Rational,
        c_f: &Rational,
    ) -> Result<Self> {
        for (name, v) in [("delta0", delta0), ("delta_min", delta_min), ("delta_max", delta_max), ("c_f", c_f)] {
            if !v.is_positive() {
                return invalid(format!("{name} must be positive"));
            }
        }
        if det_m.is_zero() {
            return Err(Error::Singular("det M vanishes".into()));
        }
        let det_m = det_m.abs();
        let delta_n = &det_m / (delta_min * num_traits::pow(delta0.clone(), n));
        let two_pow = |k: usize| Rational::from_integer(BigInt::one() << k);
        let c_prime = two_pow(n + 1) * delta_max * num_traits::pow(delta_n.clone(), n + 1);
        let c_y = int(4 * (n as i64 + 1)) * &delta_n * &c_prime * &c_prime;
        let c_y_alternative = two_pow(2 * n + 4)
            * int(n as i64 + 1)
            * delta_max
            * delta_max
            * num_traits::pow(delta_n.clone(), 2 * n + 3);
        let kappa = &c_y / c_f;
        Ok(TailoredConstants {
            delta0: delta0.clone(),
            delta_min: delta_min.clone(),
            delta_max: delta_max.clone(),
            det_m,
            delta_n,
            c_prime,
            c_y,
            c_y_alternative,
            c_f: c_f.clone(),
            kappa,
        })
    }
}

fn mod_pow(base: &BigInt, exp: &BigInt, m: &BigInt) -> BigInt {
    base.modpow(exp, m)
}

/// Miller–Rabin. The first thirteen prime bases are deterministic below
/// `3.3·10^24`; larger inputs use extra bases and are probable primes.
pub fn is_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2);
    if n < &two {
        return false;
    }
    const SMALL: [u32; 25] =
        [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];
    for &p in &SMALL {
        let p = BigInt::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n1: BigInt = n - 1;
    let mut d = n1.clone();
    let mut s = 0;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'bases: for &a in &SMALL {
        let mut x = mod_pow(&BigInt::from(a), &d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `x`.
pub fn next_prime(x: &BigInt) -> BigInt {
    let mut c = x + 1;
    while !is_prime(&c) {
        c += 1;
    }
    c
}

/// Smallest prime in `(c', 2c')`; when that interval holds no prime (only
/// possible for `c' < 2`) the smallest prime above `c'`.
pub fn bertrand_prime(c_prime: &Rational) -> Result<BigInt> {
    if c_prime < &Rational::one() {
        return invalid("c' must be at least 1");
    }
    let p = next_prime(&c_prime.floor().to_integer());
    Ok(p)
}

/// Solves `A x ≡ b (mod p)` with representatives in `{0, …, p−1}`.
pub fn solve_mod_p(a: &[Vec<BigInt>], b: &[BigInt], p: &BigInt) -> Result<Vec<BigInt>> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) || b.len() != n {
        return invalid("solve_mod_p needs a square system");
    }
    let md = |v: &BigInt| v.mod_floor(p);
    let mut aug: Vec<Vec<BigInt>> =
        a.iter().zip(b).map(|(row, bi)| row.iter().map(md).chain(std::iter::once(md(bi))).collect()).collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !aug[r][col].is_zero())
            .ok_or_else(|| Error::Singular(format!("matrix is singular modulo {p}")))?;
        aug.swap(piv, col);
        let inv = mod_pow(&aug[col][col], &(p - 2), p);
        for j in col..=n {
            aug[col][j] = md(&(&aug[col][j] * &inv));
        }
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for j in col..=n {
                    let v = &aug[r][j] - &f * &aug[col][j];
                    aug[r][j] = md(&v);
                }
            }
        }
    }
    Ok(aug.into_iter().map(|r| r[n].clone()).collect())
}

/// `p ∤ a_n`, `p | a_i` for `i < n`, `p² ∤ a_0`.
pub fn is_eisenstein(poly: &IntegerPolynomial, p: &BigInt) -> bool {
    let Some(n) = poly.degree() else {
        return false;
    };
    if n == 0 {
        return false;
    }
    let c = poly.coeffs();
    !(c[n].mod_floor(p)).is_zero()
        && c[..n].iter().all(|a| a.mod_floor(p).is_zero())
        && !c[0].mod_floor(&(p * p)).is_zero()
}

fn mat_vec(cols: &[Vec<BigInt>], x: &[BigInt]) -> Vec<BigInt> {
    let n = cols.len();
    (0..n).map(|i| cols.iter().zip(x).map(|(c, xi)| &c[i] * xi).sum()).collect()
}

/// One twisted polynomial: the combination `η` and the coefficients `s = A·η`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Twisted {
    pub eta: Vec<BigInt>,
    pub polynomial: IntegerPolynomial,
}

/// Combines the columns of `A` (coefficient vectors `a_0..a_n`) into `n+1`
/// polynomials that are Eisenstein at `p`.
pub fn eisenstein_twist(columns: &[Vec<BigInt>], p: &BigInt) -> Result<Vec<Twisted>> {
    let n1 = columns.len();
    if n1 < 2 || columns.iter().any(|c| c.len() != n1) {
        return invalid("eisenstein_twist needs n+1 coefficient vectors of length n+1");
    }
    let rows: Vec<Vec<BigInt>> = (0..n1).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect();
    let mut b = vec![BigInt::zero(); n1];
    b[n1 - 1] = BigInt::one();
    let t = solve_mod_p(&rows, &b, p)?;
    let at = mat_vec(columns, &t);
    let w: Vec<BigInt> = at
        .iter()
        .zip(&b)
        .map(|(x, y)| {
            let d = x - y;
            debug_assert!(d.mod_floor(p).is_zero());
            d / p
        })
        .collect();
    let mut out = Vec::with_capacity(n1);
    for ell in 0..n1 {
        // ones in positions 0..n1-ell, then `ell` zeros
        let rhs: Vec<BigInt> = (0..n1).map(|i| -&w[i] + BigInt::from(u8::from(i < n1 - ell))).collect();
        let gamma = solve_mod_p(&rows, &rhs, p)?;
        let eta: Vec<BigInt> = t.iter().zip(&gamma).map(|(ti, gi)| ti + p * gi).collect();
        let polynomial = IntegerPolynomial::new(mat_vec(columns, &eta));
        if !is_eisenstein(&polynomial, p) {
            return Err(Error::Internal(format!("twisted polynomial {polynomial} is not Eisenstein at {p}")));
        }
        out.push(Twisted { eta, polynomial });
    }
    Ok(out)
}

/// The body `{|y_k| < ψ_k(Q)} × {|y_k| ≤ φ_k(Q)}` with exact half-widths.
pub fn profile_body(profile: &ApproximationProfile, q: &Rational) -> Result<ConvexBody> {
    let n = profile.n;
    let mut widths = Vec::with_capacity(n + 1);
    for k in 0..=n {
        widths.push(
            profile
                .law(k)
                .eval_exact(q)
                .ok_or_else(|| Error::Invalid(format!("profile value on axis {k} is irrational at Q")))?,
        );
    }
    ConvexBody::new(widths, (0..=n).map(|k| k <= profile.m).collect())
}

/// `n+1` independent integer vectors `a` with `M·a ∈ δ_n·K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinkowskiSolutions {
    pub minima: Vec<Rational>,
    pub vectors: Vec<Vec<i64>>,
}

/// Successive-minima witnesses, provided they all lie in `δ_n·K`.
pub fn minkowski_solutions(
    fvals: &[Rational],
    profile: &ApproximationProfile,
    q: &Rational,
    delta_n: &Rational,
    max_nodes: u64,
) -> Result<std::result::Result<MinkowskiSolutions, String>> {
    let m = build_m(profile.n, fvals)?;
    if m.det()?.is_zero() {
        return Err(Error::Singular("det M vanishes".into()));
    }
    let body = profile_body(profile, q)?;
    let sm = successive_minima(&m, &body, max_nodes)?;
    for (i, a) in sm.witnesses.iter().enumerate() {
        let v = m.mul_vec(&a.iter().map(|&x| int(x)).collect::<Vec<_>>())?;
        if !body.contains_scaled(&v, delta_n) {
            return Ok(Err(format!(
                "witness {i} has gauge {} outside delta_n = {}",
                format_rational(&sm.minima[i]),
                format_rational(delta_n)
            )));
        }
    }
    Ok(Ok(MinkowskiSolutions { minima: sm.minima, vectors: sm.witnesses }))
}

/// Exact record of one inequality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCheck {
    pub label: String,
    pub lhs: Rational,
    pub rhs: Rational,
    pub strict: bool,
    pub holds: bool,
}

impl BoundCheck {
    fn new(label: String, lhs: Rational, rhs: Rational, strict: bool) -> Self {
        let holds = if strict { lhs < rhs } else { lhs <= rhs };
        BoundCheck { label, lhs, rhs, strict, holds }
    }

    pub fn render(&self) -> String {
        format!(
            "{}: {} {} {} [{}]",
            self.label,
            format_rational(&self.lhs),
            if self.strict { "<" } else { "<=" },
            format_rational(&self.rhs),
            if self.holds { "ok" } else { "FAIL" }
        )
    }
}

/// Certificate for one tailored polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialRecord {
    pub polynomial: IntegerPolynomial,
    pub eta: Vec<BigInt>,
    pub eisenstein: bool,
    /// `|P(f_k)| < c_y ψ_k(Q)` and `|a_k| ≤ c_y φ_k(Q)`.
    pub bounds: Vec<BoundCheck>,
    /// `min_k |P'(f_k)| > c_f φ_{m+1}(Q)`, reported, not required.
    pub derivative: BoundCheck,
    /// Roots near each `f_k` within `κ ψ_k(Q) / φ_{m+1}(Q)`.
    pub conjugates: Vec<RootSearch>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailoredCertificate {
    pub constants: TailoredConstants,
    pub prime: BigInt,
    /// Primes skipped because `det A` vanished modulo them.
    pub skipped_primes: Vec<BigInt>,
    pub minima: Vec<Rational>,
    pub records: Vec<PolynomialRecord>,
    /// Rank of the output coefficient matrix over ℚ.
    pub rank: usize,
    /// `φ_{m+1}(Q) = max{Q, φ_{m+2}(Q), …}`
    pub phi_condition: bool,
    /// Whether the conjugate enclosures of each polynomial are pairwise disjoint.
    pub conjugates_disjoint: Vec<bool>,
}

impl TailoredCertificate {
    /// All polynomials are Eisenstein, meet every bound and are independent.
    pub fn is_valid(&self) -> bool {
        self.rank == self.records.len() && self.records.iter().all(|r| r.eisenstein && r.bounds.iter().all(|b| b.holds))
    }
}

/// Where the construction stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailorStage {
    VolumeCondition,
    Minima,
    Prime,
    Bounds,
    Independence,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailorOutcome {
    Success(Box<TailoredCertificate>),
    Failure { stage: TailorStage, detail: String },
}

/// Parameters of the construction that do not depend on the point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailorSettings {
    pub delta0: Rational,
    pub delta_min: Rational,
    pub delta_max: Rational,
    pub c_f: Rational,
    /// Bisection precision for conjugate enclosures, in bits.
    pub precision: u32,
    pub max_nodes: u64,
}

fn exact_law(profile: &ApproximationProfile, k: usize, q: &Rational) -> Result<Rational> {
    profile.law(k).eval_exact(q).ok_or_else(|| Error::Invalid(format!("profile value on axis {k} is irrational at Q")))
}

/// Exact checks of one polynomial against the bounds scaled by `c_y`.
pub fn polynomial_bounds(
    poly: &IntegerPolynomial,
    fvals: &[Rational],
    profile: &ApproximationProfile,
    q: &Rational,
    c_y: &Rational,
) -> Result<Vec<BoundCheck>> {
    let mut out = Vec::with_capacity(profile.n + 1);
    for (k, f) in fvals.iter().enumerate() {
        let v = poly.eval(f).abs();
        out.push(BoundCheck::new(format!("|P(f_{k})|"), v, c_y * exact_law(profile, k, q)?, true));
    }
    for k in profile.m + 1..=profile.n {
        let a = Rational::from_integer(poly.coeff(k).abs());
        out.push(BoundCheck::new(format!("|a_{k}|"), a, c_y * exact_law(profile, k, q)?, false));
    }
    Ok(out)
}

/// Root enclosures of `P` near each target `y_k` within radius `r_k`.
pub fn conjugate_points_from_polynomial(
    poly: &IntegerPolynomial,
    targets: &[Rational],
    radii: &[Rational],
    precision: u32,
) -> Result<Vec<RootSearch>> {
    if targets.len() != radii.len() {
        return Err(Error::ArityMismatch { expected: targets.len(), found: radii.len() });
    }
    if radii.iter().any(|r| !r.is_positive()) {
        return invalid("radii must be positive");
    }
    Ok(targets.iter().zip(radii).map(|(y, r)| bracket_root(poly, y, r, precision)).collect())
}

/// Whether the found enclosures are pairwise disjoint.
pub fn enclosures_disjoint(found: &[RootSearch]) -> bool {
    let encl: Vec<_> = found
        .iter()
        .filter_map(|s| match s {
            RootSearch::Found(e) => Some(e),
            RootSearch::NoSignChange => None,
        })
        .collect();
    for (i, a) in encl.iter().enumerate() {
        for b in &encl[i + 1..] {
            if !a.is_disjoint(b) {
                return false;
            }
        }
    }
    true
}

/// The full pipeline at one point with `f`-values `fvals`.
pub fn construct_tailored(
    fvals: &[Rational],
    profile: &ApproximationProfile,
    q: &Rational,
    settings: &TailorSettings,
) -> Result<TailorOutcome> {
    let n = profile.n;
    let m = profile.m;
    if fvals.len() != m + 1 {
        return Err(Error::ArityMismatch { expected: m + 1, found: fvals.len() });
    }
    let product = profile.product();
    let product_value =
        product.eval_exact(q).ok_or_else(|| Error::Invalid("profile product is irrational at Q".into()))?;
    if product_value < settings.delta_min || product_value > settings.delta_max {
        return Ok(TailorOutcome::Failure {
            stage: TailorStage::VolumeCondition,
            detail: format!(
                "psi*phi = {} outside [{}, {}]",
                format_rational(&product_value),
                format_rational(&settings.delta_min),
                format_rational(&settings.delta_max)
            ),
        });
    }
    let mat = build_m(n, fvals)?;
    let constants = TailoredConstants::new(
        n,
        &mat.det()?,
        &settings.delta0,
        &settings.delta_min,
        &settings.delta_max,
        &settings.c_f,
    )?;
    let sols = match minkowski_solutions(fvals, profile, q, &constants.delta_n, settings.max_nodes)? {
        Ok(s) => s,
        Err(detail) => return Ok(TailorOutcome::Failure { stage: TailorStage::Minima, detail }),
    };
    let columns: Vec<Vec<BigInt>> = sols.vectors.iter().map(|a| a.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let a_rows: Vec<Vec<i64>> = (0..=n).map(|i| sols.vectors.iter().map(|c| c[i]).collect()).collect();
    let det_a = RationalMatrix::from_i64_rows(&a_rows)?.det()?.to_integer();
    let mut prime = bertrand_prime(&constants.c_prime)?;
    let mut skipped = Vec::new();
    while det_a.mod_floor(&prime).is_zero() {
        skipped.push(prime.clone());
        if skipped.len() > 32 {
            return Ok(TailorOutcome::Failure {
                stage: TailorStage::Prime,
                detail: "det A vanishes modulo 32 primes".into(),
            });
        }
        prime = next_prime(&prime);
    }
    let twisted = eisenstein_twist(&columns, &prime)?;
    let phi_q = exact_law(profile, m + 1, q)?;
    let phi_condition = (m + 2..=n).try_fold(q.clone(), |acc, k| -> Result<Rational> {
        let v = exact_law(profile, k, q)?;
        Ok(if v > acc { v } else { acc })
    })? == phi_q;
    let radii: Vec<Rational> =
        (0..=m).map(|k| Ok(&constants.kappa * exact_law(profile, k, q)? / &phi_q)).collect::<Result<_>>()?;
    let mut records = Vec::with_capacity(n + 1);
    let mut conjugates_disjoint = Vec::with_capacity(n + 1);
    for tw in twisted {
        let poly = tw.polynomial;
        let bounds = polynomial_bounds(&poly, fvals, profile, q, &constants.c_y)?;
        let d = poly.derivative();
        let min_der = fvals.iter().map(|f| d.eval(f).abs()).min().unwrap_or_else(Rational::zero);
        let derivative = BoundCheck {
            label: "min |P'(f_k)| > c_f*phi".into(),
            holds: min_der > &settings.c_f * &phi_q,
            lhs: min_der,
            rhs: &settings.c_f * &phi_q,
            strict: true,
        };
        let conjugates = conjugate_points_from_polynomial(&poly, fvals, &radii, settings.precision)?;
        conjugates_disjoint.push(enclosures_disjoint(&conjugates));
        records.push(PolynomialRecord {
            eisenstein: is_eisenstein(&poly, &prime),
            polynomial: poly,
            eta: tw.eta,
            bounds,
            derivative,
            conjugates,
        });
    }
    let coeff_rows: Vec<Vec<Rational>> =
        records.iter().map(|r| (0..=n).map(|k| Rational::from_integer(r.polynomial.coeff(k))).collect()).collect();
    let rank = RationalMatrix::from_rows(coeff_rows)?.rank();
    let cert = TailoredCertificate {
        constants,
        prime,
        skipped_primes: skipped,
        minima: sols.minima,
        records,
        rank,
        phi_condition,
        conjugates_disjoint,
    };
    if cert.rank != n + 1 {
        return Ok(TailorOutcome::Failure {
            stage: TailorStage::Independence,
            detail: format!("tailored polynomials have rank {} < {}", cert.rank, n + 1),
        });
    }
    if let Some(b) = cert.records.iter().flat_map(|r| &r.bounds).find(|b| !b.holds) {
        return Ok(TailorOutcome::Failure { stage: TailorStage::Bounds, detail: b.render() });
    }
    Ok(TailorOutcome::Success(Box::new(cert)))
}

/// Recomputes every bound, the Eisenstein property and the rank from the
/// polynomials alone.
pub fn replay_certificate(
    cert: &TailoredCertificate,
    fvals: &[Rational],
    profile: &ApproximationProfile,
    q: &Rational,
) -> Result<bool> {
    for r in &cert.records {
        if !is_eisenstein(&r.polynomial, &cert.prime) {
            return Ok(false);
        }
        let bounds = polynomial_bounds(&r.polynomial, fvals, profile, q, &cert.constants.c_y)?;
        if bounds != r.bounds || bounds.iter().any(|b| !b.holds) {
            return Ok(false);
        }
    }
    let rows: Vec<Vec<Rational>> = cert
        .records
        .iter()
        .map(|r| (0..=profile.n).map(|k| Rational::from_integer(r.polynomial.coeff(k))).collect())
        .collect();
    Ok(RationalMatrix::from_rows(rows)?.rank() == profile.n + 1 && cert.records.len() == profile.n + 1)
}
