//! Enumeration of points with algebraic conjugate coordinates, counting near
//! a manifold with certified comparisons, and exponent fitting.

use std::cmp::Ordering;
use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::poly::SparsePolynomial;
use crate::profile::{Chart, PowerLaw};
use crate::quadratic::QuadraticElement;
use crate::rational::{format_rational, int, pow_i, Rational};
use crate::univariate::{is_irreducible, sturm_isolate, IntegerPolynomial, RootEnclosure, SturmSequence};

/// Largest degree for which irreducibility is decided exactly.
pub const MAX_DEGREE: usize = 5;

/// Enclosures are refined down to this many bits before a comparison is
/// declared undecidable.
pub const REFINEMENT_BITS: u32 = 80;

/// A tuple of distinct real roots of one irreducible integer polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraicPoint {
    pub minimal_polynomial: IntegerPolynomial,
    pub coordinates: Vec<RootEnclosure>,
    pub height: BigInt,
    pub degree: usize,
}

impl AlgebraicPoint {
    /// Re-checks irreducibility, the height and that every enclosure isolates
    /// one root, with pairwise disjoint enclosures.
    pub fn replay(&self) -> Result<bool> {
        let p = &self.minimal_polynomial;
        if p.degree() != Some(self.degree) || p.height() != self.height || !is_irreducible(p)? {
            return Ok(false);
        }
        let sturm = SturmSequence::new(&p.squarefree_part());
        let isolates = self.coordinates.iter().all(|e| {
            if e.is_exact() {
                p.sign_at(&e.lo) == 0
            } else {
                p.sign_at(&e.lo) != 0 && p.sign_at(&e.hi) != 0 && sturm.count(&e.lo, &e.hi) == 1
            }
        });
        let disjoint = self
            .coordinates
            .iter()
            .enumerate()
            .all(|(i, a)| self.coordinates[i + 1..].iter().all(|b| a.is_disjoint(b)));
        Ok(isolates && disjoint)
    }

    pub fn render(&self) -> String {
        let coords: Vec<String> = self.coordinates.iter().map(RootEnclosure::render).collect();
        format!("{} [{}]", self.minimal_polynomial, coords.join(", "))
    }
}

/// Every injective map `0..=m → 0..len`, in lexicographic order.
fn ordered_tuples(len: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(len: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in 0..len {
            if !cur.contains(&i) {
                cur.push(i);
                rec(len, size, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(len, size, &mut Vec::new(), &mut out);
    out
}

/// One shard of the enumeration: all coefficient vectors of degree `degree`
/// with leading coefficient `leading` and lower coefficients in `[-Q, Q]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Shard {
    degree: usize,
    leading: i64,
}

fn shards(n: usize, min_degree: usize, q: i64) -> Vec<Shard> {
    (min_degree.max(1)..=n).flat_map(|degree| (1..=q).map(move |leading| Shard { degree, leading })).collect()
}

/// Visits `(a_0, …, a_degree)` for every coefficient vector of the shard.
fn for_each_coefficients(shard: Shard, q: i64, mut visit: impl FnMut(&[i64]) -> Result<ControlFlow<()>>) -> Result<()> {
    let mut a = vec![-q; shard.degree + 1];
    a[shard.degree] = shard.leading;
    loop {
        if visit(&a)?.is_break() {
            return Ok(());
        }
        let mut i = 0;
        loop {
            if i == shard.degree {
                return Ok(());
            }
            if a[i] < q {
                a[i] += 1;
                break;
            }
            a[i] = -q;
            i += 1;
        }
    }
}

fn is_primitive(a: &[i64]) -> bool {
    a.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1
}

/// The primitive irreducible polynomial with coefficients `a`, if it is one.
fn minimal_polynomial(a: &[i64]) -> Result<Option<IntegerPolynomial>> {
    if !is_primitive(a) {
        return Ok(None);
    }
    let p = IntegerPolynomial::from_i64(a);
    Ok(is_irreducible(&p)?.then_some(p))
}

/// Root enclosures, exact for linear polynomials.
fn isolate(p: &IntegerPolynomial) -> Result<Vec<RootEnclosure>> {
    if p.degree() == Some(1) {
        let root = Rational::new(-p.coeff(0), p.coeff(1));
        return Ok(vec![RootEnclosure { lo: root.clone(), hi: root }]);
    }
    sturm_isolate(p)
}

fn check_degree(n: usize, m: usize) -> Result<()> {
    if n == 0 {
        return invalid("degree bound n must be at least 1");
    }
    if n > MAX_DEGREE {
        return invalid(format!("degree bound n = {n} exceeds the supported maximum {MAX_DEGREE}"));
    }
    if m + 1 > n {
        return invalid(format!("m + 1 = {} conjugates need degree at least m + 1, but n = {n}", m + 1));
    }
    Ok(())
}

/// Streams every ordered `(m+1)`-tuple of distinct real roots of every
/// primitive irreducible polynomial with degree `≤ n`, height `≤ Q` and
/// positive leading coefficient.
pub fn enumerate_algebraic_points(
    n: usize,
    m: usize,
    q: i64,
    mut visit: impl FnMut(AlgebraicPoint) -> ControlFlow<()>,
) -> Result<()> {
    if q < 1 {
        return invalid("Q must be at least 1");
    }
    if m + 1 > n {
        return Ok(());
    }
    check_degree(n, m)?;
    for shard in shards(n, m + 1, q) {
        let mut stop = false;
        for_each_coefficients(shard, q, |a| {
            let Some(p) = minimal_polynomial(a)? else {
                return Ok(ControlFlow::Continue(()));
            };
            let roots = isolate(&p)?;
            for tuple in ordered_tuples(roots.len(), m + 1) {
                let point = AlgebraicPoint {
                    coordinates: tuple.iter().map(|&i| roots[i].clone()).collect(),
                    height: p.height(),
                    degree: shard.degree,
                    minimal_polynomial: p.clone(),
                };
                if visit(point).is_break() {
                    stop = true;
                    return Ok(ControlFlow::Break(()));
                }
            }
            Ok(ControlFlow::Continue(()))
        })?;
        if stop {
            break;
        }
    }
    Ok(())
}

/// Parameters of one count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountQuery {
    pub n: usize,
    pub q: i64,
    pub gamma: Rational,
    pub c: Rational,
    /// Open box `J` for the first `d` coordinates.
    pub lo: Vec<Rational>,
    pub hi: Vec<Rational>,
    /// Number of counted points kept as samples.
    pub retain: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountResult {
    pub q: i64,
    pub gamma: Rational,
    pub c: Rational,
    pub count: u64,
    pub undecidable: u64,
    pub samples: Vec<AlgebraicPoint>,
}

impl CountResult {
    fn empty(query: &CountQuery) -> Self {
        CountResult {
            q: query.q,
            gamma: query.gamma.clone(),
            c: query.c.clone(),
            count: 0,
            undecidable: 0,
            samples: Vec::new(),
        }
    }

    /// `Q,gamma,c,count,undecidable` as CSV fields.
    pub fn csv_fields(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.q,
            format_rational(&self.gamma),
            format_rational(&self.c),
            self.count,
            self.undecidable
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Decision {
    In,
    Out,
    Unsure,
}

/// `[lo, hi]^e`.
fn interval_pow(lo: &Rational, hi: &Rational, e: u16) -> (Rational, Rational) {
    let a = num_traits::pow(lo.clone(), e as usize);
    let b = num_traits::pow(hi.clone(), e as usize);
    if e.is_multiple_of(2) && lo.is_negative() && hi.is_positive() {
        (Rational::zero(), if a > b { a } else { b })
    } else if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn interval_mul(a: &(Rational, Rational), b: &(Rational, Rational)) -> (Rational, Rational) {
    let products = [&a.0 * &b.0, &a.0 * &b.1, &a.1 * &b.0, &a.1 * &b.1];
    let lo = products.iter().min().cloned().unwrap_or_else(Rational::zero);
    let hi = products.iter().max().cloned().unwrap_or_else(Rational::zero);
    (lo, hi)
}

/// An interval containing `poly` over the box `boxes`.
fn interval_eval(poly: &SparsePolynomial, boxes: &[(Rational, Rational)]) -> (Rational, Rational) {
    let mut total = (Rational::zero(), Rational::zero());
    for (e, c) in poly.terms() {
        let mut term = (c.clone(), c.clone());
        for (var, (lo, hi)) in boxes.iter().enumerate() {
            if e.0[var] > 0 {
                term = interval_mul(&term, &interval_pow(lo, hi, e.0[var]));
            }
        }
        total = (total.0 + term.0, total.1 + term.1);
    }
    total
}

/// Exact decision for one ordered tuple on the current enclosures.
fn decide_exact(chart: &Chart, coords: &[RootEnclosure], query: &CountQuery, eps: &PowerLaw) -> Decision {
    let q = int(query.q);
    let mut unsure = false;
    for (k, e) in coords.iter().take(chart.d).enumerate() {
        if e.hi <= query.lo[k] || e.lo >= query.hi[k] {
            return Decision::Out;
        }
        if !(e.lo > query.lo[k] && e.hi < query.hi[k]) {
            unsure = true;
        }
    }
    let boxes: Vec<(Rational, Rational)> = coords.iter().take(chart.d).map(|e| (e.lo.clone(), e.hi.clone())).collect();
    for (j, component) in chart.components.iter().enumerate() {
        let (flo, fhi) = interval_eval(component, &boxes);
        let target = &coords[chart.d + j];
        let lo = flo - &target.hi;
        let hi = fhi - &target.lo;
        // |v| ≥ ε for every v in [lo, hi]
        if (lo.is_positive() && !eps.exceeds(&lo, &q)) || (hi.is_negative() && !eps.exceeds(&hi, &q)) {
            return Decision::Out;
        }
        if !(eps.exceeds(&lo, &q) && eps.exceeds(&hi, &q)) {
            unsure = true;
        }
    }
    if unsure {
        Decision::Unsure
    } else {
        Decision::In
    }
}

/// Refines the enclosures until the tuple's comparison is decided or every
/// enclosure is narrower than `2^-REFINEMENT_BITS`.
fn decide_refining(
    chart: &Chart,
    p: &IntegerPolynomial,
    mut coords: Vec<RootEnclosure>,
    query: &CountQuery,
    eps: &PowerLaw,
) -> (Decision, Vec<RootEnclosure>) {
    let floor = Rational::new(BigInt::one(), BigInt::one() << REFINEMENT_BITS);
    loop {
        let d = decide_exact(chart, &coords, query, eps);
        if d != Decision::Unsure {
            return (d, coords);
        }
        let mut refined = false;
        for e in coords.iter_mut() {
            if !e.is_exact() && e.width() > floor {
                e.bisect(p);
                refined = true;
            }
        }
        if !refined {
            let exact = decide_quadratic(chart, p, &coords, query, eps).unwrap_or(Decision::Unsure);
            return (exact, coords);
        }
    }
}

/// Exact decision in `ℚ(√D)` for a pair of conjugate quadratic roots, which
/// settles ties such as `|f(α_0) − α_1| = c·Q^{−γ}` that no enclosure can.
/// `None` when the tuple is not of that shape.
fn decide_quadratic(
    chart: &Chart,
    p: &IntegerPolynomial,
    coords: &[RootEnclosure],
    query: &CountQuery,
    eps: &PowerLaw,
) -> Option<Decision> {
    if p.degree() != Some(2) || coords.len() != 2 {
        return None;
    }
    let (a0, a1, a2) = (p.coeff(0), p.coeff(1), p.coeff(2));
    let disc = Rational::from_integer(&a1 * &a1 - BigInt::from(4) * &a2 * &a0);
    let den = Rational::from_integer(BigInt::from(2) * &a2);
    let base = Rational::from_integer(-a1) / &den;
    let root = |plus: bool| {
        let y = Rational::one() / &den;
        QuadraticElement { x: base.clone(), y: if plus { y } else { -y } }
    };
    // with a positive leading coefficient the `+√D` root is the larger one
    let first_is_plus = (a2.is_positive()) == (coords[0].lo > coords[1].lo);
    let alpha = [root(first_is_plus), root(!first_is_plus)];
    for k in 0..chart.d {
        let above = alpha[k].sub(&QuadraticElement::rational(query.lo[k].clone())).signum(&disc) > 0;
        let below = QuadraticElement::rational(query.hi[k].clone()).sub(&alpha[k]).signum(&disc) > 0;
        if !(above && below) {
            return Some(Decision::Out);
        }
    }
    // |e| < coeff·Q^{s/r}  iff  (e²)^r < coeff^{2r}·Q^{2s}
    let r = eps.exponent.denom().to_usize()?;
    let s = eps.exponent.numer().to_i64()?;
    let threshold = num_traits::pow(&eps.coeff * &eps.coeff, r) * pow_i(&int(query.q), 2 * s);
    for (j, component) in chart.components.iter().enumerate() {
        let mut value = QuadraticElement::rational(Rational::zero());
        for (e, c) in component.terms() {
            let mut term = QuadraticElement::rational(c.clone());
            for (var, a) in alpha.iter().take(chart.d).enumerate() {
                term = term.mul(&a.pow(e.0[var] as usize, &disc), &disc);
            }
            value = value.add(&term);
        }
        let err = value.sub(&alpha[chart.d + j]);
        let lhs = err.mul(&err, &disc).pow(r, &disc);
        if QuadraticElement::rational(threshold.clone()).sub(&lhs).signum(&disc) <= 0 {
            return Some(Decision::Out);
        }
    }
    Some(Decision::In)
}

#[derive(Default)]
struct Tally {
    count: u64,
    undecidable: u64,
    samples: Vec<AlgebraicPoint>,
}

impl Tally {
    fn merge(mut self, other: Tally, retain: usize) -> Tally {
        self.count += other.count;
        self.undecidable += other.undecidable;
        self.samples.extend(other.samples);
        self.samples.truncate(retain);
        self
    }
}

/// Exact path: isolate the roots and decide every ordered tuple.
fn count_polynomial_exact(
    chart: &Chart,
    p: &IntegerPolynomial,
    query: &CountQuery,
    eps: &PowerLaw,
    tally: &mut Tally,
) -> Result<()> {
    let m = chart.m();
    let roots = isolate(p)?;
    for tuple in ordered_tuples(roots.len(), m + 1) {
        let coords: Vec<RootEnclosure> = tuple.iter().map(|&i| roots[i].clone()).collect();
        match decide_refining(chart, p, coords, query, eps) {
            (Decision::In, coords) => {
                tally.count += 1;
                if tally.samples.len() < query.retain {
                    tally.samples.push(AlgebraicPoint {
                        minimal_polynomial: p.clone(),
                        coordinates: coords,
                        height: p.height(),
                        degree: p.degree().unwrap_or(0),
                    });
                }
            }
            (Decision::Out, _) => {}
            (Decision::Unsure, _) => tally.undecidable += 1,
        }
    }
    Ok(())
}

/// Floating-point chart data for the quadratic fast path.
struct FastChart {
    d: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    eps: f64,
    /// `(coefficient, exponents)` of every term of every component.
    components: Vec<Vec<(f64, Vec<i32>)>>,
}

/// Relative margin of the floating-point filter. Rounding errors of the
/// quadratic formula and of the chart evaluation are below `1e-14` relative
/// to the magnitudes involved, so anything decided outside this margin is
/// decided correctly; the rest goes through the exact path.
const FAST_MARGIN: f64 = 1e-9;

impl FastChart {
    fn new(chart: &Chart, query: &CountQuery, eps: &PowerLaw) -> Self {
        let to = crate::rational::to_f64;
        FastChart {
            d: chart.d,
            lo: query.lo.iter().map(to).collect(),
            hi: query.hi.iter().map(to).collect(),
            eps: eps.eval_f64(query.q as f64),
            components: chart
                .components
                .iter()
                .map(|c| c.terms().map(|(e, k)| (to(k), e.0[..chart.d].iter().map(|&x| x as i32).collect())).collect())
                .collect(),
        }
    }

    /// Decision for the tuple `x` of approximate roots, each with relative error below the margin.
    fn decide(&self, x: &[f64]) -> Decision {
        let mut unsure = false;
        for k in 0..self.d {
            let tol = FAST_MARGIN * (1.0 + x[k].abs() + self.lo[k].abs().max(self.hi[k].abs()));
            if x[k] <= self.lo[k] - tol || x[k] >= self.hi[k] + tol {
                return Decision::Out;
            }
            if x[k] <= self.lo[k] + tol || x[k] >= self.hi[k] - tol {
                unsure = true;
            }
        }
        for (j, terms) in self.components.iter().enumerate() {
            let mut value = 0.0;
            let mut magnitude = 0.0;
            for (c, e) in terms {
                let t = c * e.iter().zip(x).map(|(&p, v)| v.powi(p)).product::<f64>();
                let order: i32 = e.iter().sum();
                value += t;
                magnitude += t.abs() * (1.0 + order as f64);
            }
            let target = x[self.d + j];
            let diff = (value - target).abs();
            let tol = FAST_MARGIN * (1.0 + magnitude + target.abs() + self.eps);
            if diff >= self.eps + tol {
                return Decision::Out;
            }
            if diff >= self.eps - tol {
                unsure = true;
            }
        }
        if unsure {
            Decision::Unsure
        } else {
            Decision::In
        }
    }
}

/// Real roots of `a2 X² + a1 X + a0` (positive discriminant), ascending.
fn quadratic_roots(a2: i64, a1: i64, a0: i64) -> Option<[f64; 2]> {
    let disc = a1 as i128 * a1 as i128 - 4 * a2 as i128 * a0 as i128;
    if disc <= 0 {
        return None;
    }
    let s = (disc as f64).sqrt();
    // stable form: q = -(a1 + sign(a1)·√D)/2, roots q/a2 and a0/q
    let q = -0.5 * (a1 as f64 + if a1 >= 0 { s } else { -s });
    let (r, t) = (q / a2 as f64, a0 as f64 / q);
    Some(if r < t { [r, t] } else { [t, r] })
}

fn is_square(v: i128) -> bool {
    if v < 0 {
        return false;
    }
    let r = (v as f64).sqrt() as i128;
    (r.saturating_sub(2)..=r + 2).any(|s| s >= 0 && s * s == v)
}

/// Quadratic shard with the floating-point filter.
fn count_quadratic_shard(
    chart: &Chart,
    fast: &FastChart,
    shard: Shard,
    query: &CountQuery,
    eps: &PowerLaw,
) -> Result<Tally> {
    let q = query.q;
    let a2 = shard.leading;
    let tuples = ordered_tuples(2, chart.m() + 1);
    let mut tally = Tally::default();
    for a1 in -q..=q {
        for a0 in -q..=q {
            let Some(roots) = quadratic_roots(a2, a1, a0) else {
                continue;
            };
            let mut hits = 0u64;
            let mut unsure = false;
            for t in &tuples {
                let x: Vec<f64> = t.iter().map(|&i| roots[i]).collect();
                match fast.decide(&x) {
                    Decision::In => hits += 1,
                    Decision::Unsure => unsure = true,
                    Decision::Out => {}
                }
            }
            if hits == 0 && !unsure {
                continue;
            }
            let disc = a1 as i128 * a1 as i128 - 4 * a2 as i128 * a0 as i128;
            if !is_primitive(&[a0, a1, a2]) || is_square(disc) {
                continue;
            }
            if unsure || tally.samples.len() < query.retain {
                count_polynomial_exact(chart, &IntegerPolynomial::from_i64(&[a0, a1, a2]), query, eps, &mut tally)?;
            } else {
                tally.count += hits;
            }
        }
    }
    Ok(tally)
}

fn count_generic_shard(chart: &Chart, shard: Shard, query: &CountQuery, eps: &PowerLaw) -> Result<Tally> {
    let mut tally = Tally::default();
    for_each_coefficients(shard, query.q, |a| {
        if let Some(p) = minimal_polynomial(a)? {
            count_polynomial_exact(chart, &p, query, eps, &mut tally)?;
        }
        Ok(ControlFlow::Continue(()))
    })?;
    Ok(tally)
}

/// Counts ordered conjugate tuples `α` with `α̂ = (α_0..α_{d-1})` in the open
/// box `J` and `|f_j(α̂) − α_j| < c·Q^{−γ}` for `d ≤ j ≤ m`. Sharded over
/// `(degree, leading coefficient)` with rayon; shards merge by addition.
pub fn count_near_manifold(chart: &Chart, query: &CountQuery) -> Result<CountResult> {
    let m = chart.m();
    check_degree(query.n, m)?;
    if query.q < 1 {
        return invalid("Q must be at least 1");
    }
    if !query.gamma.is_positive() {
        return invalid("gamma must be positive");
    }
    if query.lo.len() != chart.d || query.hi.len() != chart.d {
        return Err(Error::ArityMismatch { expected: chart.d, found: query.lo.len().min(query.hi.len()) });
    }
    let empty_box = query.lo.iter().zip(&query.hi).any(|(a, b)| a >= b);
    if !query.c.is_positive() || empty_box {
        return Ok(CountResult::empty(query));
    }
    let eps = PowerLaw::new(query.c.clone(), -query.gamma.clone())?;
    let fast = FastChart::new(chart, query, &eps);
    let tallies: Vec<Tally> = shards(query.n, m + 1, query.q)
        .into_par_iter()
        .map(|shard| {
            if shard.degree == 2 {
                count_quadratic_shard(chart, &fast, shard, query, &eps)
            } else {
                count_generic_shard(chart, shard, query, &eps)
            }
        })
        .collect::<Result<_>>()?;
    let tally = tallies.into_iter().fold(Tally::default(), |acc, t| acc.merge(t, query.retain));
    Ok(CountResult {
        q: query.q,
        gamma: query.gamma.clone(),
        c: query.c.clone(),
        count: tally.count,
        undecidable: tally.undecidable,
        samples: tally.samples,
    })
}

/// Least-squares line through `(log Q, log count)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

pub fn fit_exponent(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.len() < 3 {
        return invalid(format!("need at least 3 points, got {}", points.len()));
    }
    if let Some((q, c)) = points.iter().find(|(q, c)| !(*q > 0.0) || !(*c > 0.0)) {
        return invalid(format!("fit needs positive Q and counts, got ({q}, {c})"));
    }
    let xs: Vec<f64> = points.iter().map(|(q, _)| q.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, c)| c.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return invalid("fit needs at least two distinct Q values");
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs.iter().zip(&ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum::<f64>() / k).sqrt();
    Ok(ExponentFit { slope, intercept, residual })
}

/// Orders results by `Q` then `c`, the row order of the count CSV.
pub fn row_order(a: &CountResult, b: &CountResult) -> Ordering {
    a.q.cmp(&b.q).then_with(|| a.c.cmp(&b.c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use crate::rational::ratio;

    fn parabola() -> Chart {
        Chart::new(1, vec![parse_polynomial("x^2 + 2", &["x"]).unwrap()]).unwrap()
    }

    fn query(q: i64, c: Rational) -> CountQuery {
        CountQuery { n: 2, q, gamma: ratio(1, 2), c, lo: vec![int(0)], hi: vec![int(1)], retain: 4 }
    }

    #[test]
    fn height_one_linear_points() {
        let mut roots = Vec::new();
        enumerate_algebraic_points(1, 0, 1, |p| {
            roots.push(p.coordinates[0].lo.clone());
            ControlFlow::Continue(())
        })
        .unwrap();
        roots.sort();
        assert_eq!(roots, vec![int(-1), int(0), int(1)]);
    }

    #[test]
    fn linear_polynomials_cannot_fill_two_coordinates() {
        let mut k = 0;
        enumerate_algebraic_points(1, 1, 5, |_| {
            k += 1;
            ControlFlow::Continue(())
        })
        .unwrap();
        assert_eq!(k, 0);
    }

    #[test]
    fn trivial_counts() {
        let chart = parabola();
        assert_eq!(count_near_manifold(&chart, &query(8, int(0))).unwrap().count, 0);
        let mut q = query(8, int(4));
        q.hi = vec![int(0)];
        assert_eq!(count_near_manifold(&chart, &q).unwrap().count, 0);
    }

    #[test]
    fn samples_replay() {
        let r = count_near_manifold(&parabola(), &query(8, int(4))).unwrap();
        assert!(r.count > 0);
        assert!(!r.samples.is_empty());
        for s in &r.samples {
            assert!(s.replay().unwrap(), "{}", s.render());
        }
    }

    #[test]
    fn fit_recovers_exact_power_law() {
        let pts: Vec<(f64, f64)> = [2.0f64, 4.0, 8.0].iter().map(|q| (*q, 3.0 * q.powf(2.5))).collect();
        assert!((fit_exponent(&pts).unwrap().slope - 2.5).abs() < 1e-9);
        let flat = [(2.0, 5.0), (4.0, 5.0), (8.0, 5.0)];
        assert!(fit_exponent(&flat).unwrap().slope.abs() < 1e-12);
        assert!(fit_exponent(&[(2.0, 0.0), (4.0, 1.0), (8.0, 2.0)]).is_err());
    }
}
