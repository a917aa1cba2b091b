//! Partitions and symmetric polynomials: alternants, Schur, monomial and
//! elementary symmetric polynomials, the Schur map and Schur-basis expansion.
//!
//! Schur polynomials are computed as exact quotients of alternants by the
//! Vandermonde alternant; the division doubles as a self-check.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};
use crate::poly::{Exponents, SparsePolynomial, MAX_ARITY};
use crate::rational::Rational;

/// A weakly decreasing sequence of positive integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition(Vec<u16>);

impl Partition {
    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// Validates the parts; zeros are rejected rather than trimmed.
    pub fn new(parts: Vec<u16>) -> Result<Self> {
        if parts.contains(&0) {
            return invalid(format!("partition parts must be positive: {parts:?}"));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return invalid(format!("partition parts must be weakly decreasing: {parts:?}"));
        }
        Ok(Partition(parts))
    }

    /// Parses `2,1` style lists; an empty string is the empty partition.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "()" || s == "∅" {
            return Ok(Self::empty());
        }
        let parts = s
            .trim_matches(|c| c == '(' || c == ')')
            .split(',')
            .map(|p| p.trim().parse::<u16>().map_err(|_| Error::Invalid(format!("malformed partition {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }

    pub fn parts(&self) -> &[u16] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().map(|&p| p as u32).sum()
    }

    pub fn length(&self) -> usize {
        self.0.len()
    }

    /// Parts padded with zeros to `len` entries.
    pub fn padded(&self, len: usize) -> Vec<u16> {
        let mut v = self.0.clone();
        v.resize(len.max(v.len()), 0);
        v
    }

    /// Ordering used for index sets: by weight, then lexicographically descending.
    pub fn graded_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.weight().cmp(&other.weight()).then_with(|| other.0.cmp(&self.0))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexMode {
    /// `|λ| ≤ bound`
    WeightBounded,
    /// `λ_1 ≤ bound` (partitions fitting in a `length × bound` box)
    BoxBounded,
}

/// All partitions with at most `length_bound` parts under the mode's bound,
/// ordered by weight and then lexicographically descending. Includes `∅`.
pub fn enumerate_partitions(bound: u32, length_bound: usize, mode: IndexMode) -> Vec<Partition> {
    fn rec(remaining: u32, max_part: u32, slots: usize, prefix: &mut Vec<u16>, out: &mut Vec<Partition>) {
        out.push(Partition(prefix.clone()));
        if slots == 0 {
            return;
        }
        for p in 1..=max_part.min(remaining) {
            prefix.push(p as u16);
            rec(remaining - p, p, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    let (remaining, max_part) = match mode {
        IndexMode::WeightBounded => (bound, bound),
        IndexMode::BoxBounded => (bound.saturating_mul(length_bound as u32), bound),
    };
    rec(remaining, max_part, length_bound, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.graded_cmp(b));
    out
}

/// The partitions indexing the Schur map for `(n, τ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchurIndexSet {
    pub n: usize,
    pub tau: usize,
    pub mode: IndexMode,
    pub partitions: Vec<Partition>,
}

impl SchurIndexSet {
    pub fn new(n: usize, tau: usize, mode: IndexMode) -> Result<Self> {
        if tau == 0 || tau > n + 1 {
            return invalid(format!("need 1 <= tau <= n+1, got n={n}, tau={tau}"));
        }
        let bound = (n + 1 - tau) as u32;
        Ok(SchurIndexSet { n, tau, mode, partitions: enumerate_partitions(bound, tau, mode) })
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }
}

fn check_tau(tau: usize) -> Result<()> {
    if tau == 0 || tau > MAX_ARITY {
        return invalid(format!("tau must be in 1..={MAX_ARITY}, got {tau}"));
    }
    Ok(())
}

/// Sign of a permutation given as a vector of images.
fn permutation_sign(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    let mut odd = false;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len % 2 == 0 {
            odd = !odd;
        }
    }
    odd
}

fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    // Heap's algorithm
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            f(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// `det(T_i^{e_j})` for a strictly decreasing exponent vector.
fn alternant_of_exponents(exps: &[u16]) -> SparsePolynomial {
    let tau = exps.len();
    let mut out = SparsePolynomial::zero(tau);
    for_each_permutation(tau, |perm| {
        let mut e = Exponents::zero();
        for (i, &j) in perm.iter().enumerate() {
            e.0[i] = exps[j];
        }
        let c = if permutation_sign(perm) { -Rational::one() } else { Rational::one() };
        out.add_term(e, c);
    });
    out
}

fn staircase(tau: usize) -> Vec<u16> {
    (0..tau).map(|i| (tau - 1 - i) as u16).collect()
}

/// The alternant `a_{λ+δ}(T_0, …, T_{τ-1}) = det(T_i^{λ_j + τ-1-j})`.
pub fn alternant(lambda: &Partition, tau: usize) -> Result<SparsePolynomial> {
    check_tau(tau)?;
    if lambda.length() > tau {
        return invalid(format!("partition {lambda} has more than {tau} parts"));
    }
    let exps: Vec<u16> = lambda.padded(tau).iter().zip(staircase(tau)).map(|(l, d)| l + d).collect();
    Ok(alternant_of_exponents(&exps))
}

/// Schur polynomial `s_λ` in `τ` variables; zero when `ℓ(λ) > τ`.
pub fn schur(lambda: &Partition, tau: usize) -> Result<SparsePolynomial> {
    check_tau(tau)?;
    if lambda.length() > tau {
        return Ok(SparsePolynomial::zero(tau));
    }
    type Cache = Mutex<HashMap<(Partition, usize), SparsePolynomial>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (lambda.clone(), tau);
    if let Some(s) = cache.lock().expect("schur cache poisoned").get(&key) {
        return Ok(s.clone());
    }
    let num = alternant(lambda, tau)?;
    let den = alternant(&Partition::empty(), tau)?;
    let s =
        num.div_exact(&den).map_err(|_| Error::Internal(format!("a_mu does not divide the alternant of {lambda}")))?;
    cache.lock().expect("schur cache poisoned").insert(key, s.clone());
    Ok(s)
}

/// Monomial symmetric polynomial: sum over distinct rearrangements of `λ`.
pub fn monomial_symmetric(lambda: &Partition, tau: usize) -> Result<SparsePolynomial> {
    check_tau(tau)?;
    if lambda.length() > tau {
        return invalid(format!("partition {lambda} has more than {tau} parts"));
    }
    let mut exps = lambda.padded(tau);
    exps.sort_unstable();
    let mut out = SparsePolynomial::zero(tau);
    loop {
        out.add_term(Exponents::from_slice(&exps), Rational::one());
        if !next_permutation(&mut exps) {
            break;
        }
    }
    Ok(out)
}

fn next_permutation(v: &mut [u16]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Elementary symmetric polynomial `e_k` in `τ` variables.
pub fn elementary_symmetric(k: usize, tau: usize) -> Result<SparsePolynomial> {
    check_tau(tau)?;
    if k > tau {
        return invalid(format!("e_{k} is undefined in {tau} variables"));
    }
    let ones: Vec<u16> = std::iter::repeat_n(1u16, k).collect();
    monomial_symmetric(&Partition(ones), tau)
}

/// Evaluates every Schur polynomial of the index set at `point`, in index order.
pub fn schur_map_eval(n: usize, tau: usize, point: &[Rational], mode: IndexMode) -> Result<Vec<Rational>> {
    if point.len() != tau {
        return Err(Error::ArityMismatch { expected: tau, found: point.len() });
    }
    let set = SchurIndexSet::new(n, tau, mode)?;
    set.partitions.iter().map(|lambda| schur(lambda, tau)?.eval(point)).collect()
}

/// Coefficients of a symmetric polynomial in the Schur basis `{s_λ : |λ| ≤ k, ℓ(λ) ≤ τ}`.
///
/// Peels off the lex-leading monomial `T^λ` with `s_λ`; the leading monomial
/// of `s_λ` in lex order is exactly `T^λ`, so the loop terminates.
pub fn expand_in_schur_basis(p: &SparsePolynomial, k: u32, tau: usize) -> Result<BTreeMap<Partition, Rational>> {
    check_tau(tau)?;
    if p.arity() != tau {
        return Err(Error::ArityMismatch { expected: tau, found: p.arity() });
    }
    if !p.is_symmetric() {
        return invalid("polynomial is not symmetric");
    }
    if let Some(d) = p.degree() {
        if d > k {
            return invalid(format!("degree {d} exceeds bound {k}"));
        }
    }
    let mut cache: BTreeMap<Partition, SparsePolynomial> = BTreeMap::new();
    let mut out = BTreeMap::new();
    let mut rest = p.clone();
    while let Some((e, c)) = rest.lex_leading().map(|(e, c)| (*e, c.clone())) {
        let parts: Vec<u16> = e.0[..tau].iter().copied().filter(|&x| x > 0).collect();
        let lambda = Partition::new(parts)
            .map_err(|_| Error::Internal("leading monomial of a symmetric polynomial is not a partition".into()))?;
        if !cache.contains_key(&lambda) {
            cache.insert(lambda.clone(), schur(&lambda, tau)?);
        }
        rest = &rest - &cache[&lambda].scale(&c);
        *out.entry(lambda).or_insert_with(Rational::zero) += c;
    }
    out.retain(|_, v: &mut Rational| !v.is_zero());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use crate::rational::{int, ratio};

    fn part(p: &[u16]) -> Partition {
        Partition::new(p.to_vec()).unwrap()
    }

    fn t(src: &str, tau: usize) -> SparsePolynomial {
        let names: Vec<String> = (0..tau).map(|i| format!("T{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        parse_polynomial(src, &refs).unwrap()
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
        assert_eq!(Partition::parse("2,1").unwrap(), part(&[2, 1]));
        assert!(Partition::parse("2,x").is_err());
        assert_eq!(part(&[3, 1, 1]).weight(), 5);
        assert_eq!(part(&[3, 1, 1]).length(), 3);
    }

    #[test]
    fn partition_enumeration_examples() {
        assert_eq!(enumerate_partitions(0, 3, IndexMode::WeightBounded), vec![Partition::empty()]);
        assert_eq!(
            enumerate_partitions(2, 2, IndexMode::WeightBounded),
            vec![Partition::empty(), part(&[1]), part(&[2]), part(&[1, 1])]
        );
        assert_eq!(
            enumerate_partitions(1, 2, IndexMode::BoxBounded),
            vec![Partition::empty(), part(&[1]), part(&[1, 1])]
        );
    }

    #[test]
    fn box_mode_has_binomial_cardinality() {
        for n in 1..=6usize {
            for tau in 1..=n + 1 {
                let set = SchurIndexSet::new(n, tau, IndexMode::BoxBounded).unwrap();
                let binom = (0..tau).fold(1usize, |acc, i| acc * (n + 1 - i) / (i + 1));
                assert_eq!(set.len(), binom, "n={n} tau={tau}");
            }
        }
    }

    #[test]
    fn alternant_examples() {
        assert_eq!(alternant(&Partition::empty(), 2).unwrap(), t("T0 - T1", 2));
        assert_eq!(alternant(&part(&[2, 1]), 2).unwrap(), t("T0^3*T1 - T0*T1^3", 2));
        assert_eq!(alternant(&part(&[1]), 1).unwrap(), t("T0", 1));
        assert!(alternant(&part(&[1, 1, 1]), 2).is_err());
    }

    #[test]
    fn schur_examples() {
        assert_eq!(schur(&part(&[1]), 2).unwrap(), t("T0 + T1", 2));
        assert_eq!(schur(&part(&[2, 1]), 2).unwrap(), t("T0^2*T1 + T0*T1^2", 2));
        assert!(schur(&part(&[1, 1, 1]), 2).unwrap().is_zero());
        assert_eq!(schur(&Partition::empty(), 3).unwrap(), SparsePolynomial::one(3));
    }

    #[test]
    fn monomial_and_elementary_examples() {
        assert_eq!(monomial_symmetric(&part(&[2, 1]), 2).unwrap(), t("T0^2*T1 + T0*T1^2", 2));
        assert_eq!(monomial_symmetric(&part(&[1]), 3).unwrap(), t("T0 + T1 + T2", 3));
        assert_eq!(monomial_symmetric(&part(&[1, 1]), 2).unwrap(), t("T0*T1", 2));
        assert_eq!(elementary_symmetric(2, 3).unwrap(), t("T0*T1 + T0*T2 + T1*T2", 3));
        assert_eq!(elementary_symmetric(0, 2).unwrap(), SparsePolynomial::one(2));
        assert_eq!(elementary_symmetric(2, 2).unwrap(), t("T0*T1", 2));
        assert!(elementary_symmetric(3, 2).is_err());
    }

    #[test]
    fn schur_map_examples() {
        let v = schur_map_eval(2, 2, &[int(0), int(1)], IndexMode::BoxBounded).unwrap();
        assert_eq!(v, vec![int(1), int(1), int(0)]);
        let v = schur_map_eval(3, 1, &[int(2)], IndexMode::WeightBounded).unwrap();
        assert_eq!(v, vec![int(1), int(2), int(4), int(8)]);
        let v = schur_map_eval(4, 2, &[int(0), int(0)], IndexMode::WeightBounded).unwrap();
        assert_eq!(v[0], int(1));
        assert!(v[1..].iter().all(|x| x.is_zero()));
        assert!(schur_map_eval(3, 2, &[int(1)], IndexMode::BoxBounded).is_err());
    }

    #[test]
    fn schur_expansion_examples() {
        let e2 = elementary_symmetric(2, 2).unwrap();
        let c = expand_in_schur_basis(&e2, 2, 2).unwrap();
        assert_eq!(c.into_iter().collect::<Vec<_>>(), vec![(part(&[1, 1]), int(1))]);
        assert!(expand_in_schur_basis(&SparsePolynomial::zero(2), 2, 2).unwrap().is_empty());
        let m2 = monomial_symmetric(&part(&[2]), 2).unwrap();
        let c = expand_in_schur_basis(&m2, 2, 2).unwrap();
        assert_eq!(c[&part(&[2])], int(1));
        assert_eq!(c[&part(&[1, 1])], int(-1));
        assert_eq!(c.len(), 2);
        assert!(expand_in_schur_basis(&t("T0", 2), 2, 2).is_err());
        assert!(expand_in_schur_basis(&t("T0^3 + T1^3", 2), 2, 2).is_err());
        let half = t("1/2*T0 + 1/2*T1", 2);
        assert_eq!(expand_in_schur_basis(&half, 1, 2).unwrap()[&part(&[1])], ratio(1, 2));
    }
}
