//! Order of symmetric independence of a polynomial map: Gröbner elimination,
//! generalised Wronskians and the two elementary bounds.

use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::groebner::{buchberger, GroebnerBasis, GroebnerBudget, MonomialOrder};
use crate::matrix::{polynomial_determinant, RationalMatrix};
use crate::poly::{Exponents, SparsePolynomial, MAX_ARITY};
use crate::rational::Rational;
use crate::symmetric::{elementary_symmetric, enumerate_partitions, schur, IndexMode};

/// Polynomial components sharing the input variables `x_0..x_{d-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialMap {
    components: Vec<SparsePolynomial>,
}

impl PolynomialMap {
    pub fn new(components: Vec<SparsePolynomial>) -> Result<Self> {
        let Some(first) = components.first() else {
            return invalid("a polynomial map needs at least one component");
        };
        let d = first.arity();
        if d == 0 {
            return invalid("polynomial map components need at least one input variable");
        }
        if let Some(c) = components.iter().find(|c| c.arity() != d) {
            return Err(Error::ArityMismatch { expected: d, found: c.arity() });
        }
        Ok(PolynomialMap { components })
    }

    /// `(x, x^2, …, x^τ)`
    pub fn veronese(tau: usize) -> Self {
        let x = SparsePolynomial::var(1, 0);
        PolynomialMap { components: (1..=tau as u32).map(|k| x.pow(k)).collect() }
    }

    pub fn components(&self) -> &[SparsePolynomial] {
        &self.components
    }

    pub fn input_arity(&self) -> usize {
        self.components[0].arity()
    }

    pub fn tau(&self) -> usize {
        self.components.len()
    }

    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        if indices.iter().any(|&i| i >= self.tau()) {
            return invalid("index subset out of range");
        }
        Self::new(indices.iter().map(|&i| self.components[i].clone()).collect())
    }

    pub fn degree(&self) -> u32 {
        self.components.iter().filter_map(|c| c.degree()).max().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Symord {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Symord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symord::Finite(k) => write!(f, "{k}"),
            Symord::Infinite => write!(f, "infinite"),
        }
    }
}

/// Outcome of the elimination, kept for certificates.
#[derive(Clone, Debug)]
pub struct EliminationCertificate {
    pub value: Symord,
    pub basis: GroebnerBasis,
    /// Basis elements free of the input variables, in `Y_1..Y_τ`.
    pub elimination_ideal: Vec<SparsePolynomial>,
    /// Weighted degree (`deg Y_k = k`) of each elimination element.
    pub weighted_degrees: Vec<u32>,
    pub input_arity: usize,
}

impl EliminationCertificate {
    /// Human-readable listing of the basis and the elimination ideal.
    pub fn render(&self) -> String {
        let d = self.input_arity;
        let tau = self.weighted_degrees.len().max(self.basis.order.arity() - d);
        let mut names: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
        names.extend((1..=tau).map(|k| format!("Y{k}")));
        let mut out = format!("symord = {}\n", self.value);
        out.push_str(&format!("groebner basis ({} elements):\n", self.basis.generators.len()));
        for g in &self.basis.generators {
            out.push_str(&format!("  {}\n", g.to_string_named(&names)));
        }
        out.push_str("elimination ideal:\n");
        for (g, w) in self.elimination_ideal.iter().zip(&self.weighted_degrees) {
            out.push_str(&format!("  [weighted degree {w}] {}\n", g.to_string_named(&names)));
        }
        out
    }
}

/// Computes symord via the elimination ideal of `⟨Y_k − e_k(p)⟩ ∩ ℚ[Y]`.
///
/// The `Y` block uses weighted grevlex with `deg Y_k = k`, which is degree
/// compatible, so the minimal weighted degree in the ideal is attained on a
/// basis element.
pub fn symord_via_elimination(p: &PolynomialMap, budget: &GroebnerBudget) -> Result<EliminationCertificate> {
    let d = p.input_arity();
    let tau = p.tau();
    let arity = d + tau;
    if arity > MAX_ARITY {
        return invalid(format!("{d} inputs + {tau} tags exceeds {MAX_ARITY} variables"));
    }
    let x_map: Vec<usize> = (0..d).collect();
    let mut generators = Vec::with_capacity(tau);
    for k in 1..=tau {
        let ek = elementary_symmetric(k, tau)?.substitute(p.components())?;
        let y = SparsePolynomial::var(arity, d + k - 1);
        generators.push(&y - &ek.embed(arity, &x_map));
    }
    let weights: Vec<u32> = (1..=tau as u32).collect();
    let order = MonomialOrder::elimination(d, weights.clone());
    let basis = buchberger(&generators, &order, budget)?;
    let mut full_weights = vec![0u32; d];
    full_weights.extend(&weights);
    let elimination_ideal: Vec<SparsePolynomial> =
        basis.generators.iter().filter(|g| (0..d).all(|v| g.degree_in(v) == 0)).cloned().collect();
    let weighted_degrees: Vec<u32> =
        elimination_ideal.iter().map(|g| g.weighted_degree(&full_weights).unwrap_or(0)).collect();
    let value = weighted_degrees.iter().copied().min().map_or(Symord::Infinite, Symord::Finite);
    Ok(EliminationCertificate { value, basis, elimination_ideal, weighted_degrees, input_arity: d })
}

fn check_op(op: &[u16], d: usize, max_order: usize) -> Result<()> {
    if op.len() != d {
        return Err(Error::ArityMismatch { expected: d, found: op.len() });
    }
    let order: usize = op.iter().map(|&j| j as usize).sum();
    if order > max_order {
        return invalid(format!("operator {op:?} has order {order} > {max_order}"));
    }
    Ok(())
}

/// `det(∂^{ops[s]} g_j)` for admissible operators (`|ops[s]| ≤ s`).
pub fn generalized_wronskian(g: &[SparsePolynomial], ops: &[Vec<u16>]) -> Result<SparsePolynomial> {
    let Some(first) = g.first() else {
        return invalid("empty function family");
    };
    let d = first.arity();
    if let Some(c) = g.iter().find(|c| c.arity() != d) {
        return Err(Error::ArityMismatch { expected: d, found: c.arity() });
    }
    if ops.len() != g.len() {
        return Err(Error::ArityMismatch { expected: g.len(), found: ops.len() });
    }
    for (s, op) in ops.iter().enumerate() {
        check_op(op, d, s)?;
    }
    let rows: Vec<Vec<SparsePolynomial>> = ops.iter().map(|op| g.iter().map(|gj| gj.partial(op)).collect()).collect();
    polynomial_determinant(rows, d)
}

/// Multi-indices in `d` variables of total order `≤ max`, sorted by order then lex.
fn multi_indices(d: usize, max: usize) -> Vec<Vec<u16>> {
    fn rec(d: usize, left: usize, prefix: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if prefix.len() == d {
            out.push(prefix.clone());
            return;
        }
        for j in 0..=left {
            prefix.push(j as u16);
            rec(d, left - j, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, max, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| {
        let oa: u32 = a.iter().map(|&x| x as u32).sum();
        let ob: u32 = b.iter().map(|&x| x as u32).sum();
        oa.cmp(&ob).then_with(|| b.cmp(a))
    });
    out
}

/// Searches admissible operator lists for a nonzero generalised Wronskian.
///
/// Returns the first witness found in a fixed order, or `None` when every
/// admissible Wronskian vanishes.
pub fn wronskian_nondegenerate(g: &[SparsePolynomial], max_candidates: usize) -> Result<Option<Vec<Vec<u16>>>> {
    let Some(first) = g.first() else {
        return invalid("empty function family");
    };
    let d = first.arity();
    let n = g.len();
    let ops = multi_indices(d, n - 1);
    let orders: Vec<usize> = ops.iter().map(|o| o.iter().map(|&x| x as usize).sum()).collect();
    let mut tried = 0usize;

    fn rec(
        pos: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        ops: &[Vec<u16>],
        orders: &[usize],
        g: &[SparsePolynomial],
        tried: &mut usize,
        max: usize,
    ) -> Result<Option<Vec<Vec<u16>>>> {
        if pos == g.len() {
            *tried += 1;
            if *tried > max {
                return Err(Error::Budget(format!("more than {max} Wronskian candidates")));
            }
            let list: Vec<Vec<u16>> = chosen.iter().map(|&i| ops[i].clone()).collect();
            let w = generalized_wronskian(g, &list)?;
            return Ok(if w.is_zero() { None } else { Some(list) });
        }
        for i in start..ops.len() {
            if orders[i] > pos {
                break;
            }
            chosen.push(i);
            let found = rec(pos + 1, i + 1, chosen, ops, orders, g, tried, max)?;
            chosen.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    rec(0, 0, &mut Vec::new(), &ops, &orders, g, &mut tried, max_candidates)
}

/// Coefficient vectors of a family of polynomials, as rows of a matrix.
pub(crate) fn coefficient_matrix(family: &[SparsePolynomial]) -> Result<RationalMatrix> {
    let mut monomials: Vec<Exponents> = family.iter().flat_map(|f| f.terms().map(|(e, _)| *e)).collect();
    monomials.sort();
    monomials.dedup();
    let rows = family.iter().map(|f| monomials.iter().map(|e| f.coefficient(e)).collect()).collect();
    if monomials.is_empty() {
        return Ok(RationalMatrix::zeros(family.len(), 0));
    }
    RationalMatrix::from_rows(rows)
}

/// True iff `{s_λ(p) : |λ| ≤ k, ℓ(λ) ≤ τ}` is linearly independent over ℚ.
pub fn check_nonsymmetric_degree(p: &PolynomialMap, k: u32) -> Result<bool> {
    let family = schur_family(p, k)?;
    let m = coefficient_matrix(&family)?;
    Ok(m.rank() == family.len())
}

/// `s_λ(p)` for every partition in the weight-bounded index set.
pub fn schur_family(p: &PolynomialMap, k: u32) -> Result<Vec<SparsePolynomial>> {
    let tau = p.tau();
    enumerate_partitions(k, tau, IndexMode::WeightBounded)
        .iter()
        .map(|lambda| schur(lambda, tau)?.substitute(p.components()))
        .collect()
}

/// The lower bound `deg p0 / deg p1` for a pair with `deg p0 > deg p1 ≥ 1`.
pub fn symord_lower_bound_pair(p0: &SparsePolynomial, p1: &SparsePolynomial) -> Result<Rational> {
    let d0 = p0.degree().unwrap_or(0);
    let d1 = p1.degree().unwrap_or(0);
    if d1 < 1 || d0 <= d1 {
        return invalid(format!("need deg p0 > deg p1 >= 1, got {d0} and {d1}"));
    }
    Ok(Rational::new(d0.into(), d1.into()))
}

/// Upper bound `(τ!/t!)·(symord(p_I)+1)` derived from a restriction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpperBound {
    pub restricted: Symord,
    pub bound: Symord,
}

pub fn symord_upper_bound(p: &PolynomialMap, indices: &[usize], budget: &GroebnerBudget) -> Result<UpperBound> {
    let t = indices.len();
    if t < 2 || t > p.tau() {
        return invalid(format!("need 2 <= |I| <= tau, got {t}"));
    }
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != t {
        return invalid("index subset has repeated entries");
    }
    let restricted = symord_via_elimination(&p.restrict(indices)?, budget)?.value;
    let factor: u64 = ((t + 1)..=p.tau()).map(|i| i as u64).product();
    let bound = match restricted {
        Symord::Finite(k) => Symord::Finite((factor * (k as u64 + 1)) as u32),
        Symord::Infinite => Symord::Infinite,
    };
    Ok(UpperBound { restricted, bound })
}
