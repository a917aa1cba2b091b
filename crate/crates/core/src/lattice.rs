//! Vandermonde-system matrices, Plücker coordinates, scaling parameters and
//! exact shortest-vector / successive-minima computations under the sup norm.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::matrix::RationalMatrix;
use crate::profile::{ApproximationProfile, Chart};
use crate::rational::{from_f64, int, to_f64, Rational};
use crate::reduction::ReducedBasis;
use crate::symmetric::{schur_map_eval, IndexMode, Partition, SchurIndexSet};

/// Default cap on enumeration nodes for a single lattice search.
pub const DEFAULT_MAX_NODES: u64 = 20_000_000;

/// The matrix whose rows `0..=m` are `(1, f_i, …, f_i^n)` and whose remaining
/// rows select the coefficients `a_{m+1}..a_n`.
pub fn build_m(n: usize, fvals: &[Rational]) -> Result<RationalMatrix> {
    let m1 = fvals.len();
    if m1 == 0 || m1 > n {
        return invalid(format!("need 1 <= m+1 <= n, got m+1={m1}, n={n}"));
    }
    let mut out = RationalMatrix::zeros(n + 1, n + 1);
    for (i, f) in fvals.iter().enumerate() {
        let mut power = Rational::one();
        for j in 0..=n {
            out.set(i, j, power.clone());
            power *= f;
        }
    }
    for i in m1..=n {
        out.set(i, i, Rational::one());
    }
    Ok(out)
}

/// Rows `v_0..v_m`, then the derivative row `v'_h = (0, 1, 2f_h, …, n f_h^{n-1})`,
/// then rows selecting `a_{m+2}..a_n`.
pub fn build_u(n: usize, h: usize, fvals: &[Rational]) -> Result<RationalMatrix> {
    let m1 = fvals.len();
    if h >= m1 {
        return invalid(format!("derivative row index h={h} exceeds m={}", m1 as i64 - 1));
    }
    if m1 == 0 || m1 > n {
        return invalid(format!("need m+1 < n+1, got m+1={m1}, n={n}"));
    }
    let mut out = build_m(n, fvals)?;
    let f = &fvals[h];
    let mut power = Rational::one();
    out.set(m1, 0, Rational::zero());
    for j in 1..=n {
        out.set(m1, j, int(j as i64) * &power);
        power *= f;
    }
    Ok(out)
}

/// `Π_{i<j} (f_j − f_i)`.
pub fn vandermonde(fvals: &[Rational]) -> Rational {
    let mut out = Rational::one();
    for j in 0..fvals.len() {
        for i in 0..j {
            out *= &fvals[j] - &fvals[i];
        }
    }
    out
}

/// All increasing `k`-subsets of `0..n`, in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Plücker coordinates keyed by the column set `J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PluckerVector {
    pub tau: usize,
    pub components: BTreeMap<Vec<usize>, Rational>,
}

impl PluckerVector {
    pub fn get(&self, cols: &[usize]) -> Rational {
        self.components.get(cols).cloned().unwrap_or_else(Rational::zero)
    }
}

fn check_index_set(set: &[usize], bound: usize) -> Result<()> {
    if set.windows(2).any(|w| w[0] >= w[1]) || set.iter().any(|&i| i >= bound) {
        return invalid(format!("index set {set:?} must be increasing and below {bound}"));
    }
    Ok(())
}

/// All `τ×τ` minors of `a` on the rows `rows`.
pub fn grass(a: &RationalMatrix, rows: &[usize]) -> Result<PluckerVector> {
    let tau = rows.len();
    if tau == 0 || tau > a.cols() {
        return invalid(format!("row set of size {tau} for a matrix with {} columns", a.cols()));
    }
    check_index_set(rows, a.rows())?;
    let mut components = BTreeMap::new();
    for cols in subsets(a.cols(), tau) {
        let v = a.minor(rows, &cols)?;
        components.insert(cols, v);
    }
    Ok(PluckerVector { tau, components })
}

/// The `e_I` component of `A·w` where `w = w_1 ∧ … ∧ w_τ` is given by the
/// maximal minors `det W_{J,[τ]}`: `Σ_J det A_{I,J}·det W_{J,[τ]}`.
pub fn wedge_transform(a: &RationalMatrix, w: &PluckerVector, rows: &[usize]) -> Result<Rational> {
    if rows.len() != w.tau {
        return Err(Error::ArityMismatch { expected: w.tau, found: rows.len() });
    }
    if let Some(j) = w.components.keys().find(|j| j.len() != w.tau || j.iter().any(|&c| c >= a.cols())) {
        return invalid(format!("wedge component {j:?} does not fit a {}-column matrix", a.cols()));
    }
    check_index_set(rows, a.rows())?;
    let mut total = Rational::zero();
    for (cols, wj) in &w.components {
        if !wj.is_zero() {
            total += a.minor(rows, cols)? * wj;
        }
    }
    Ok(total)
}

/// The partition attached to the column set `J = (j_1 < … < j_τ)`:
/// `λ_i = j_{τ−i+1} − (τ−i)`.
pub fn partition_of_columns(cols: &[usize]) -> Result<Partition> {
    let tau = cols.len();
    let parts: Vec<u16> = (1..=tau).map(|i| (cols[tau - i] - (tau - i)) as u16).filter(|&p| p > 0).collect();
    Partition::new(parts)
}

/// Outcome of comparing minors of `M_f` with `V(f_I)·s_λ(f_I)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationReport {
    pub holds: bool,
    /// `(J, minor, V·s_λ)` for every mismatching component.
    pub mismatches: Vec<(Vec<usize>, Rational, Rational)>,
}

/// Checks `det (M_f)_{I,J} = V(f_I)·s_λ(f_I)` for every column set `J`.
pub fn schur_factorization_check(n: usize, fvals: &[Rational], rows: &[usize]) -> Result<FactorizationReport> {
    let tau = rows.len();
    check_index_set(rows, fvals.len())?;
    if tau == 0 {
        return invalid("empty row set");
    }
    let m = build_m(n, fvals)?;
    let g = grass(&m, rows)?;
    let sub: Vec<Rational> = rows.iter().map(|&i| fvals[i].clone()).collect();
    let v = vandermonde(&sub);
    let index = SchurIndexSet::new(n, tau, IndexMode::BoxBounded)?;
    let values = schur_map_eval(n, tau, &sub, IndexMode::BoxBounded)?;
    let by_partition: BTreeMap<&Partition, &Rational> = index.partitions.iter().zip(&values).collect();
    let mut mismatches = Vec::new();
    for (cols, minor) in &g.components {
        let lambda = partition_of_columns(cols)?;
        let s = by_partition
            .get(&lambda)
            .ok_or_else(|| Error::Internal(format!("partition {lambda} missing from the box index set")))?;
        let expected = &v * *s;
        if &expected != minor {
            mismatches.push((cols.clone(), minor.clone(), expected));
        }
    }
    if g.components.len() != index.len() {
        return Err(Error::Internal(format!("{} minors but {} box partitions", g.components.len(), index.len())));
    }
    Ok(FactorizationReport { holds: mismatches.is_empty(), mismatches })
}

/// `t` (natural-log scale) and `δ` for a profile at a given `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingParameters {
    pub t: Vec<f64>,
    pub delta: f64,
}

/// `δ = (Πψ·Πφ)^{1/(n+1)}`, `t_k = log δ − log ψ_k` for `k ≤ m` and
/// `t_k = log φ_k − log δ` for `k > m`.
pub fn scaling_parameters(profile: &ApproximationProfile, q: f64) -> Result<ScalingParameters> {
    if !(q >= 1.0) || !q.is_finite() {
        return invalid(format!("Q must be a finite number >= 1, got {q}"));
    }
    let n = profile.n;
    let logs: Vec<f64> = (0..=n).map(|k| profile.law(k).ln_at(q)).collect();
    if logs.iter().any(|v| !v.is_finite()) {
        return invalid("profile value is not a positive finite number");
    }
    let log_delta = logs.iter().sum::<f64>() / (n + 1) as f64;
    let t = logs.iter().enumerate().map(|(k, l)| if k <= profile.m { log_delta - l } else { l - log_delta }).collect();
    Ok(ScalingParameters { t, delta: log_delta.exp() })
}

/// The box `{y : |y_k| < w_k}` (or `≤` on non-strict axes).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexBody {
    pub half_widths: Vec<Rational>,
    pub strict: Vec<bool>,
}

impl ConvexBody {
    pub fn new(half_widths: Vec<Rational>, strict: Vec<bool>) -> Result<Self> {
        if half_widths.len() != strict.len() {
            return Err(Error::ArityMismatch { expected: half_widths.len(), found: strict.len() });
        }
        if half_widths.iter().any(|w| !w.is_positive()) {
            return invalid("convex body half-widths must be positive");
        }
        Ok(ConvexBody { half_widths, strict })
    }

    pub fn cube(dim: usize) -> Self {
        ConvexBody { half_widths: vec![Rational::one(); dim], strict: vec![false; dim] }
    }

    pub fn dim(&self) -> usize {
        self.half_widths.len()
    }

    pub fn volume(&self) -> Rational {
        self.half_widths.iter().fold(Rational::one(), |acc, w| acc * w * int(2))
    }

    /// Smallest `λ` with `y ∈ λ·K̄`: `max_k |y_k|/w_k`.
    pub fn gauge(&self, y: &[Rational]) -> Rational {
        y.iter().zip(&self.half_widths).map(|(v, w)| v.abs() / w).max().unwrap_or_else(Rational::zero)
    }

    /// Membership in `scale·K`, honouring strictness.
    pub fn contains_scaled(&self, y: &[Rational], scale: &Rational) -> bool {
        y.iter().zip(&self.half_widths).zip(&self.strict).all(|((v, w), &strict)| {
            let bound = w * scale;
            let a = v.abs();
            if strict {
                a < bound
            } else {
                a <= bound
            }
        })
    }
}

fn int_vector_product(basis: &RationalMatrix, a: &[i64]) -> Result<Vec<Rational>> {
    let v: Vec<Rational> = a.iter().map(|&x| int(x)).collect();
    basis.mul_vec(&v)
}

/// `‖rows·a‖∞` in floating point with an error bound covering rounding in
/// the rows and in the sums.
fn approx_gauge(rows: &[Vec<f64>], a: &[i64]) -> (f64, f64) {
    rows.iter().fold((0.0, 0.0), |(g, e), r| {
        let (sum, mag) = r.iter().zip(a).fold((0.0, 0.0), |(s, m), (x, &y)| {
            let t = x * y as f64;
            (s + t, m + t.abs())
        });
        (f64::max(g, sum.abs()), f64::max(e, 1e-10 * mag + 1e-9 * sum.abs()))
    })
}

/// Whether `‖rows·a‖∞ ≤ bound` might hold; a `false` answer is certain.
fn may_lie_within(rows: &[Vec<f64>], a: &[i64], bound: f64) -> bool {
    let (g, err) = approx_gauge(rows, a);
    g - err <= bound * (1.0 + 1e-9)
}

/// `diag(1/w)·B` in floating point.
fn normalised_rows(basis: &RationalMatrix, widths: &[f64]) -> Vec<Vec<f64>> {
    basis.to_f64_rows().into_iter().zip(widths).map(|(row, w)| row.into_iter().map(|v| v / w).collect()).collect()
}

fn check_lattice(basis: &RationalMatrix, max_dim: usize) -> Result<()> {
    if !basis.is_square() {
        return invalid("lattice basis must be square");
    }
    if basis.rows() == 0 || basis.rows() > max_dim {
        return invalid(format!("lattice dimension {} outside 1..={max_dim}", basis.rows()));
    }
    if basis.det()?.is_zero() {
        return Err(Error::Singular("lattice basis is singular".into()));
    }
    Ok(())
}

/// Coefficient vector normalised so its first nonzero entry is positive.
fn canonical_sign(a: &[i64]) -> Vec<i64> {
    match a.iter().find(|&&v| v != 0) {
        Some(&v) if v < 0 => a.iter().map(|x| -x).collect(),
        _ => a.to_vec(),
    }
}

/// A shortest nonzero vector of `B·ℤ^k` in the sup norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortVector {
    pub coefficients: Vec<i64>,
    pub vector: Vec<Rational>,
    pub length: Rational,
}

/// Minimal sup-norm nonzero lattice vector when its norm is below `bound`.
/// Ties go to the lexicographically smallest coefficient vector whose first
/// nonzero entry is positive.
pub fn shortest_vector(basis: &RationalMatrix, bound: &Rational, max_nodes: u64) -> Result<Option<ShortVector>> {
    check_lattice(basis, 10)?;
    if !bound.is_positive() {
        return invalid("bound must be positive");
    }
    let dim = basis.rows();
    let mut best: Option<ShortVector> = None;
    let mut radius = to_f64(bound);
    let rows = normalised_rows(basis, &vec![1.0; dim]);
    let reduced = ReducedBasis::new(&rows)?;
    // Restart with a shrunken radius whenever a shorter vector shows up.
    loop {
        let mut improved = false;
        let r2 = dim as f64 * radius * radius;
        reduced.enumerate(r2, max_nodes, |a| {
            let v = int_vector_product(basis, a)?;
            let len = v.iter().map(|x| x.abs()).max().unwrap_or_else(Rational::zero);
            if &len >= bound {
                return Ok(ControlFlow::Continue(()));
            }
            let coefficients = canonical_sign(a);
            let better = match &best {
                None => true,
                Some(b) => match len.cmp(&b.length) {
                    Ordering::Less => true,
                    Ordering::Equal => coefficients < b.coefficients,
                    Ordering::Greater => false,
                },
            };
            if better {
                let vector = if coefficients.as_slice() == a { v } else { v.iter().map(|x| -x).collect() };
                let shrink = best.as_ref().is_none_or(|b| len < b.length);
                best = Some(ShortVector { coefficients, vector, length: len });
                if shrink && to_f64(&best.as_ref().unwrap().length) < radius * 0.5 {
                    improved = true;
                    return Ok(ControlFlow::Break(()));
                }
            }
            Ok(ControlFlow::Continue(()))
        })?;
        match (&best, improved) {
            (Some(b), true) => radius = to_f64(&b.length),
            _ => break,
        }
    }
    Ok(best)
}

/// Successive minima `λ_0 ≤ … ≤ λ_{k-1}` of a box with respect to `B·ℤ^k`,
/// with linearly independent witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuccessiveMinima {
    pub minima: Vec<Rational>,
    pub witnesses: Vec<Vec<i64>>,
}

/// Integer vectors spanning the annihilator of a set of integer vectors, so
/// that membership in their span is a handful of dot products.
struct Span {
    vectors: Vec<Vec<i64>>,
    annihilator: Vec<Vec<BigInt>>,
}

impl Span {
    fn new(dim: usize) -> Self {
        let annihilator = (0..dim).map(|i| (0..dim).map(|j| BigInt::from(i64::from(i == j))).collect()).collect();
        Span { vectors: Vec::new(), annihilator }
    }

    fn len(&self) -> usize {
        self.vectors.len()
    }

    fn contains(&self, a: &[i64]) -> bool {
        self.annihilator.iter().all(|c| {
            let small = c.iter().zip(a).try_fold(0i128, |acc, (x, &y)| {
                let x = i128::try_from(x).ok()?;
                acc.checked_add(x.checked_mul(y as i128)?)
            });
            match small {
                Some(v) => v == 0,
                None => c.iter().zip(a).map(|(x, &y)| x * y).sum::<BigInt>().is_zero(),
            }
        })
    }

    /// Adds `a` when it lies outside the span.
    fn insert(&mut self, a: &[i64]) -> bool {
        if self.contains(a) {
            return false;
        }
        self.vectors.push(a.to_vec());
        self.annihilator = annihilator(&self.vectors, a.len());
        true
    }
}

/// Integer basis of `{c : c·w = 0 for every w}` from the reduced row echelon form.
fn annihilator(vectors: &[Vec<i64>], dim: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<Rational>> = vectors.iter().map(|v| v.iter().map(|&x| int(x)).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..dim {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    (0..dim)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut c = vec![Rational::zero(); dim];
            c[free] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                c[p] = -rows[i][free].clone();
            }
            let lcm = c.iter().fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
            c.iter().map(|x| (x * Rational::from_integer(lcm.clone())).to_integer()).collect()
        })
        .collect()
}

/// Successive minima by enumeration. All lattice vectors up to a gauge bound
/// are listed and independent vectors are taken greedily in order of exact
/// gauge. When fewer than `dim` are found, the bound grows to the smallest
/// gauge of an LLL vector outside their span, which bounds the next minimum.
pub fn successive_minima(basis: &RationalMatrix, body: &ConvexBody, max_nodes: u64) -> Result<SuccessiveMinima> {
    check_lattice(basis, 8)?;
    let dim = basis.rows();
    if body.dim() != dim {
        return Err(Error::ArityMismatch { expected: dim, found: body.dim() });
    }
    let widths: Vec<f64> = body.half_widths.iter().map(to_f64).collect();
    let rows = normalised_rows(basis, &widths);
    let reduced = ReducedBasis::new(&rows)?;
    let mut lll: Vec<(Rational, Vec<i64>)> = (0..dim)
        .map(|j| {
            let col: Vec<i64> = reduced.unimodular.iter().map(|r| r[j]).collect();
            Ok((body.gauge(&int_vector_product(basis, &col)?), col))
        })
        .collect::<Result<_>>()?;
    lll.sort();
    let mut span = Span::new(dim);
    let mut minima = Vec::with_capacity(dim);
    while span.len() < dim {
        let bound = lll
            .iter()
            .find(|(_, col)| !span.contains(col))
            .map(|(g, _)| g.clone())
            .ok_or_else(|| Error::Internal("LLL vectors are dependent".into()))?;
        let bound_f = to_f64(&bound);
        let mut candidates: Vec<(f64, f64, Vec<i64>)> = Vec::new();
        reduced.enumerate(dim as f64 * bound_f * bound_f, max_nodes, |a| {
            let (g, err) = approx_gauge(&rows, a);
            if g - err <= bound_f * (1.0 + 1e-9) {
                candidates.push((g - err, g + err, canonical_sign(a)));
            }
            Ok(ControlFlow::Continue(()))
        })?;
        candidates.sort_by(|x, y| x.0.total_cmp(&y.0));
        span = Span::new(dim);
        minima.clear();
        // Candidates whose error intervals overlap form a cluster; clusters are
        // strictly ordered, and only clusters that can extend the span need
        // exact gauges.
        let mut start = 0;
        while start < candidates.len() && span.len() < dim {
            let mut end = start + 1;
            let mut reach = candidates[start].1;
            while end < candidates.len() && candidates[end].0 <= reach {
                reach = reach.max(candidates[end].1);
                end += 1;
            }
            let cluster = &candidates[start..end];
            start = end;
            if cluster.iter().all(|(_, _, a)| span.contains(a)) {
                continue;
            }
            let mut exact: Vec<(Rational, &Vec<i64>)> = Vec::new();
            for (_, _, a) in cluster {
                let g = body.gauge(&int_vector_product(basis, a)?);
                if g <= bound {
                    exact.push((g, a));
                }
            }
            exact.sort();
            for (g, a) in exact {
                if span.len() < dim && span.insert(a) {
                    minima.push(g);
                }
            }
        }
    }
    Ok(SuccessiveMinima { minima, witnesses: span.vectors })
}

/// `2^k/k!·|det B| ≤ Πλ_i·vol(K) ≤ 2^k·|det B|`, checked exactly.
pub fn minkowski_sandwich(basis: &RationalMatrix, body: &ConvexBody, minima: &[Rational]) -> Result<bool> {
    let k = basis.rows();
    let det = basis.det()?.abs();
    let prod = minima.iter().fold(body.volume(), |acc, l| acc * l);
    let two_k = Rational::from_integer(BigInt::from(2u32).pow(k as u32));
    let fact: BigInt = (1..=k as u64).map(BigInt::from).product();
    let lower = &two_k * &det / Rational::from_integer(fact);
    Ok(lower <= prod && prod <= two_k * det)
}

/// True iff for every `0 ≤ h ≤ m` some nonzero integer polynomial `P` of
/// degree `≤ n` satisfies `|P(f_k)| < ψ_k(Q)` for `k ≤ m`,
/// `|P'(f_h)| ≤ φ_{m+1}(Q)` and `|a_k| ≤ φ_k(Q)` for `k ≥ m+2`.
///
/// The `f`-values are exact; the search runs in floating point on the
/// normalised lattice and every candidate is confirmed exactly.
pub fn bad_set_indicator(
    fvals: &[Rational],
    profile: &ApproximationProfile,
    q: &Rational,
    max_nodes: u64,
) -> Result<bool> {
    let n = profile.n;
    let m = profile.m;
    if fvals.len() != m + 1 {
        return Err(Error::ArityMismatch { expected: m + 1, found: fvals.len() });
    }
    if !q.is_positive() {
        return invalid("Q must be positive");
    }
    let qf = to_f64(q);
    let widths: Vec<f64> = (0..=n).map(|k| profile.law(k).eval_f64(qf)).collect();
    if widths.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return invalid("profile values must be positive and finite");
    }
    for h in 0..=m {
        let u = build_u(n, h, fvals)?;
        if u.det()?.is_zero() {
            return Err(Error::Singular(format!("det U^{h} vanishes at this point")));
        }
        let rows = normalised_rows(&u, &widths);
        let reduced = ReducedBasis::new(&rows)?;
        let mut found = false;
        reduced.enumerate((n + 1) as f64, max_nodes, |a| {
            if !may_lie_within(&rows, a, 1.0) {
                return Ok(ControlFlow::Continue(()));
            }
            let v = int_vector_product(&u, a)?;
            let ok = (0..=n).all(|k| {
                let law = profile.law(k);
                if k <= m {
                    law.exceeds(&v[k], q)
                } else {
                    law.covers(&v[k], q)
                }
            });
            if ok {
                found = true;
                Ok(ControlFlow::Break(()))
            } else {
                Ok(ControlFlow::Continue(()))
            }
        })?;
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Monte-Carlo estimate of the bad-set proportion of a box.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureEstimate {
    pub fraction: f64,
    pub hits: usize,
    pub used: usize,
    /// Sample points where some `det U^h` vanished.
    pub rejected: usize,
}

/// Sample `i` draws from ChaCha8 seeded with `seed` on stream `i`, so the
/// result does not depend on how samples are spread over threads.
pub fn sample_point(lo: &[f64], hi: &[f64], seed: u64, index: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    lo.iter().zip(hi).map(|(a, b)| a + (b - a) * rng.gen::<f64>()).collect()
}

pub fn measure_estimate(
    chart: &Chart,
    lo: &[f64],
    hi: &[f64],
    profile: &ApproximationProfile,
    q: &Rational,
    samples: usize,
    seed: u64,
) -> Result<MeasureEstimate> {
    if samples == 0 {
        return invalid("need at least one sample");
    }
    if lo.len() != chart.d || hi.len() != chart.d {
        return Err(Error::ArityMismatch { expected: chart.d, found: lo.len().min(hi.len()) });
    }
    if lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
        return invalid("sample box is empty");
    }
    if chart.m() != profile.m {
        return invalid(format!("chart has m={} but profile has m={}", chart.m(), profile.m));
    }
    let outcomes: Vec<Result<Option<bool>>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let x = sample_point(lo, hi, seed, i);
            let exact: Vec<Rational> = x.iter().map(|&v| from_f64(v)).collect::<Result<_>>()?;
            let fvals = chart.values(&exact)?;
            match bad_set_indicator(&fvals, profile, q, DEFAULT_MAX_NODES) {
                Ok(b) => Ok(Some(b)),
                Err(Error::Singular(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut hits = 0;
    let mut used = 0;
    let mut rejected = 0;
    for o in outcomes {
        match o? {
            Some(true) => {
                hits += 1;
                used += 1;
            }
            Some(false) => used += 1,
            None => rejected += 1,
        }
    }
    let fraction = if used == 0 { 0.0 } else { hits as f64 / used as f64 };
    Ok(MeasureEstimate { fraction, hits, used, rejected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn r(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn main_and_system_matrices() {
        let m = build_m(2, &r(&[0, 1])).unwrap();
        assert_eq!(m, RationalMatrix::from_i64_rows(&[vec![1, 0, 0], vec![1, 1, 1], vec![0, 0, 1]]).unwrap());
        assert_eq!(m.det().unwrap(), int(1));
        assert_eq!(build_m(2, &r(&[0, 0])).unwrap().det().unwrap(), int(0));
        let u0 = build_u(2, 0, &r(&[0, 1])).unwrap();
        assert_eq!(u0, RationalMatrix::from_i64_rows(&[vec![1, 0, 0], vec![1, 1, 1], vec![0, 1, 0]]).unwrap());
        assert_eq!(u0.det().unwrap(), int(-1));
        let u1 = build_u(2, 1, &r(&[0, 1])).unwrap();
        assert_eq!(u1.det().unwrap(), int(1));
        assert!(build_u(2, 2, &r(&[0, 1])).is_err());
    }

    #[test]
    fn vandermonde_values() {
        assert_eq!(vandermonde(&r(&[1, 2, 3])), int(2));
        assert_eq!(vandermonde(&r(&[5, 5])), int(0));
        assert_eq!(vandermonde(&r(&[7])), int(1));
    }

    #[test]
    fn grass_examples() {
        let g = grass(&RationalMatrix::identity(3), &[0, 1]).unwrap();
        assert_eq!(g.get(&[0, 1]), int(1));
        assert_eq!(g.get(&[0, 2]), int(0));
        let m = build_m(2, &r(&[0, 1])).unwrap();
        let g = grass(&m, &[0, 1]).unwrap();
        let vals: Vec<Rational> = g.components.values().cloned().collect();
        assert_eq!(vals, r(&[1, 1, 0]));
        let full = grass(&m, &[0, 1, 2]).unwrap();
        assert_eq!(full.components.len(), 1);
        assert_eq!(full.get(&[0, 1, 2]), m.det().unwrap());
    }

    #[test]
    fn factorization_small_cases() {
        assert!(schur_factorization_check(2, &r(&[0, 1]), &[0, 1]).unwrap().holds);
        assert!(schur_factorization_check(3, &r(&[1, 2]), &[0, 1]).unwrap().holds);
        assert!(schur_factorization_check(3, &r(&[3, 3]), &[0, 1]).unwrap().holds);
    }

    #[test]
    fn scaling_examples() {
        use crate::profile::PowerLaw;
        let one = PowerLaw::constant(int(1)).unwrap();
        let p = ApproximationProfile::new(2, 0, 1, vec![one.clone()], vec![one.clone(), one]).unwrap();
        let s = scaling_parameters(&p, 10.0).unwrap();
        assert_eq!(s.delta, 1.0);
        assert!(s.t.iter().all(|&t| t == 0.0));
        let p = ApproximationProfile::new(
            1,
            0,
            1,
            vec![PowerLaw::parse("1, -1").unwrap()],
            vec![PowerLaw::parse("1, 1").unwrap()],
        )
        .unwrap();
        let s = scaling_parameters(&p, 50.0).unwrap();
        assert!((s.delta - 1.0).abs() < 1e-12);
        assert!((s.t[0] - 50f64.ln()).abs() < 1e-12 && (s.t[1] - 50f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn shortest_vector_examples() {
        let d = RationalMatrix::from_i64_rows(&[vec![2, 0], vec![0, 3]]).unwrap();
        let sv = shortest_vector(&d, &int(10), DEFAULT_MAX_NODES).unwrap().unwrap();
        assert_eq!(sv.coefficients, vec![1, 0]);
        assert_eq!(sv.length, int(2));
        assert!(shortest_vector(&RationalMatrix::identity(2), &ratio(1, 2), DEFAULT_MAX_NODES).unwrap().is_none());
        let u = RationalMatrix::from_i64_rows(&[vec![1, 2, 3], vec![0, 1, 4], vec![0, 0, 1]]).unwrap();
        assert_eq!(shortest_vector(&u, &int(5), DEFAULT_MAX_NODES).unwrap().unwrap().length, int(1));
    }

    #[test]
    fn minima_examples() {
        let id = RationalMatrix::identity(3);
        let sm = successive_minima(&id, &ConvexBody::cube(3), DEFAULT_MAX_NODES).unwrap();
        assert_eq!(sm.minima, r(&[1, 1, 1]));
        let d = RationalMatrix::from_i64_rows(&[vec![1, 0], vec![0, 4]]).unwrap();
        let sm = successive_minima(&d, &ConvexBody::cube(2), DEFAULT_MAX_NODES).unwrap();
        assert_eq!(sm.minima, r(&[1, 4]));
        assert!(minkowski_sandwich(&d, &ConvexBody::cube(2), &sm.minima).unwrap());
    }

    #[test]
    fn indicator_trivial_profiles() {
        use crate::profile::PowerLaw;
        let fvals = vec![ratio(1, 3), ratio(19, 9)];
        let big = PowerLaw::constant(int(1000)).unwrap();
        let p = ApproximationProfile::new(3, 1, 1, vec![big.clone(); 2], vec![big.clone(); 2]).unwrap();
        assert!(bad_set_indicator(&fvals, &p, &int(10), DEFAULT_MAX_NODES).unwrap());
        let tiny = PowerLaw::constant(ratio(1, 1000)).unwrap();
        let p = ApproximationProfile::new(3, 1, 1, vec![tiny.clone(); 2], vec![tiny.clone(); 2]).unwrap();
        assert!(!bad_set_indicator(&fvals, &p, &int(10), DEFAULT_MAX_NODES).unwrap());
    }
}
