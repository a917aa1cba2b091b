//! Buchberger's algorithm over ℚ with sugar pair selection and the
//! Gebauer–Möller criteria.

use std::cmp::Ordering;
use std::ops::Range;
use std::time::Instant;

use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};
use crate::poly::{Exponents, SparsePolynomial};
use crate::rational::Rational;

/// A block of variables compared by weighted degree, then reverse lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderBlock {
    pub vars: Range<usize>,
    pub weights: Vec<u32>,
}

/// Block monomial order: earlier blocks dominate later ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialOrder {
    pub blocks: Vec<OrderBlock>,
}

impl MonomialOrder {
    pub fn grevlex(arity: usize) -> Self {
        MonomialOrder { blocks: vec![OrderBlock { vars: 0..arity, weights: vec![1; arity] }] }
    }

    /// Pure lexicographic order with variable 0 largest.
    pub fn lex(arity: usize) -> Self {
        MonomialOrder { blocks: (0..arity).map(|i| OrderBlock { vars: i..i + 1, weights: vec![1] }).collect() }
    }

    /// Eliminates the first `eliminated` variables: they form a grevlex block that
    /// dominates a weighted-grevlex block on the remaining variables.
    pub fn elimination(eliminated: usize, kept_weights: Vec<u32>) -> Self {
        let total = eliminated + kept_weights.len();
        MonomialOrder {
            blocks: vec![
                OrderBlock { vars: 0..eliminated, weights: vec![1; eliminated] },
                OrderBlock { vars: eliminated..total, weights: kept_weights },
            ],
        }
    }

    pub fn arity(&self) -> usize {
        self.blocks.iter().map(|b| b.vars.end).max().unwrap_or(0)
    }

    pub fn cmp(&self, a: &Exponents, b: &Exponents) -> Ordering {
        for block in &self.blocks {
            let wdeg = |e: &Exponents| -> u64 {
                block.vars.clone().zip(&block.weights).map(|(v, &w)| e.0[v] as u64 * w as u64).sum()
            };
            match wdeg(a).cmp(&wdeg(b)) {
                Ordering::Equal => {}
                o => return o,
            }
            for v in block.vars.clone().rev() {
                match a.0[v].cmp(&b.0[v]) {
                    Ordering::Equal => {}
                    o => return o.reverse(),
                }
            }
        }
        Ordering::Equal
    }
}

/// Limits on a Gröbner computation. Exhaustion is reported as [`Error::Budget`].
#[derive(Clone, Debug)]
pub struct GroebnerBudget {
    pub max_pairs: usize,
    pub max_degree: u32,
    pub deadline: Option<Instant>,
}

impl Default for GroebnerBudget {
    fn default() -> Self {
        GroebnerBudget { max_pairs: 200_000, max_degree: 200, deadline: None }
    }
}

/// Terms sorted in decreasing monomial order.
#[derive(Clone, Debug, PartialEq, Eq)]
struct OrderedPoly {
    terms: Vec<(Exponents, Rational)>,
    sugar: u32,
}

impl OrderedPoly {
    fn from_sparse(p: &SparsePolynomial, order: &MonomialOrder) -> Self {
        let mut terms: Vec<(Exponents, Rational)> = p.terms().map(|(e, c)| (*e, c.clone())).collect();
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        let sugar = terms.iter().map(|(e, _)| e.total_degree()).max().unwrap_or(0);
        OrderedPoly { terms, sugar }
    }

    fn to_sparse(&self, arity: usize) -> SparsePolynomial {
        let mut p = SparsePolynomial::zero(arity);
        for (e, c) in &self.terms {
            p.add_term(*e, c.clone());
        }
        p
    }

    fn lm(&self) -> &Exponents {
        &self.terms[0].0
    }

    fn make_monic(&mut self) {
        if let Some((_, lc)) = self.terms.first() {
            if !lc.is_one() {
                let inv = lc.recip();
                for (_, c) in &mut self.terms {
                    *c *= &inv;
                }
            }
        }
    }

    /// `self - c * m * other`, merging sorted term lists.
    fn sub_scaled(
        &self,
        c: &Rational,
        m: &Exponents,
        other: &OrderedPoly,
        order: &MonomialOrder,
    ) -> Vec<(Exponents, Rational)> {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut i = 0;
        let mut j = 0;
        let a = &self.terms;
        let b = &other.terms;
        while i < a.len() || j < b.len() {
            if j == b.len() {
                out.push(a[i].clone());
                i += 1;
                continue;
            }
            let bm = b[j].0.mul(m);
            if i == a.len() {
                out.push((bm, -(c * &b[j].1)));
                j += 1;
                continue;
            }
            match order.cmp(&a[i].0, &bm) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((bm, -(c * &b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let v = &a[i].1 - c * &b[j].1;
                    if !v.is_zero() {
                        out.push((bm, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }
}

/// Full normal form of `p` modulo the listed basis elements.
fn normal_form(p: &OrderedPoly, basis: &[&OrderedPoly], order: &MonomialOrder) -> OrderedPoly {
    match normal_form_until(p, basis, order, None) {
        Ok(r) => r,
        Err(_) => unreachable!("no deadline was set"),
    }
}

/// Normal form that gives up once `deadline` has passed.
fn normal_form_until(
    p: &OrderedPoly,
    basis: &[&OrderedPoly],
    order: &MonomialOrder,
    deadline: Option<Instant>,
) -> Result<OrderedPoly> {
    let mut work = p.clone();
    let mut done: Vec<(Exponents, Rational)> = Vec::new();
    let mut steps = 0u32;
    while !work.terms.is_empty() {
        steps = steps.wrapping_add(1);
        if let Some(deadline) = deadline {
            if steps.is_multiple_of(16) && Instant::now() > deadline {
                return Err(Error::Budget("time limit reached during reduction".into()));
            }
        }
        let (lm, lc) = work.terms[0].clone();
        if let Some(g) = basis.iter().find(|g| g.lm().divides(&lm)) {
            let m = g.lm().quotient_of(&lm);
            let c = &lc / &g.terms[0].1;
            work.sugar = work.sugar.max(g.sugar + m.total_degree());
            work.terms = work.sub_scaled(&c, &m, g, order);
        } else {
            done.push((lm, lc));
            work.terms.remove(0);
        }
    }
    Ok(OrderedPoly { terms: done, sugar: work.sugar })
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Exponents,
    sugar: u32,
}

/// A reduced Gröbner basis together with its order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    pub generators: Vec<SparsePolynomial>,
    pub order: MonomialOrder,
}

impl GroebnerBasis {
    fn ordered(&self) -> Vec<OrderedPoly> {
        self.generators.iter().map(|g| OrderedPoly::from_sparse(g, &self.order)).collect()
    }

    /// Normal form of `p` modulo the basis.
    pub fn reduce(&self, p: &SparsePolynomial) -> SparsePolynomial {
        let basis = self.ordered();
        let refs: Vec<&OrderedPoly> = basis.iter().collect();
        normal_form(&OrderedPoly::from_sparse(p, &self.order), &refs, &self.order).to_sparse(p.arity())
    }

    /// Leading monomial of `p` under the basis order.
    pub fn leading_monomial(&self, p: &SparsePolynomial) -> Option<Exponents> {
        let o = OrderedPoly::from_sparse(p, &self.order);
        o.terms.first().map(|t| t.0)
    }

    /// Checks Buchberger's criterion: every S-polynomial reduces to zero.
    pub fn is_groebner(&self) -> bool {
        let basis = self.ordered();
        let refs: Vec<&OrderedPoly> = basis.iter().collect();
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                let s = s_polynomial(&basis[i], &basis[j], &self.order);
                if !normal_form(&s, &refs, &self.order).terms.is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

fn s_polynomial(f: &OrderedPoly, g: &OrderedPoly, order: &MonomialOrder) -> OrderedPoly {
    let lcm = f.lm().lcm(g.lm());
    let mf = f.lm().quotient_of(&lcm);
    let mg = g.lm().quotient_of(&lcm);
    let lf = f.terms[0].1.clone();
    let lg = g.terms[0].1.clone();
    // lg * mf * f - lf * mg * g, scaled by 1 / (lf * lg)
    let scaled_f = OrderedPoly {
        terms: f.terms.iter().map(|(e, c)| (e.mul(&mf), c / &lf)).collect(),
        sugar: f.sugar + mf.total_degree(),
    };
    let terms = scaled_f.sub_scaled(&lg.recip(), &mg, g, order);
    OrderedPoly { terms, sugar: scaled_f.sugar.max(g.sugar + mg.total_degree()) }
}

/// Computes the reduced Gröbner basis of the ideal generated by `generators`.
pub fn buchberger(
    generators: &[SparsePolynomial],
    order: &MonomialOrder,
    budget: &GroebnerBudget,
) -> Result<GroebnerBasis> {
    let arity = match generators.first() {
        Some(g) => g.arity(),
        None => return invalid("Buchberger needs at least one generator"),
    };
    if generators.iter().any(|g| g.arity() != arity) {
        return invalid("generators have mismatched arity");
    }
    if order.arity() != arity {
        return Err(Error::ArityMismatch { expected: arity, found: order.arity() });
    }

    let mut store: Vec<OrderedPoly> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();

    let insert = |h: OrderedPoly, store: &mut Vec<OrderedPoly>, active: &mut Vec<usize>, pairs: &mut Vec<Pair>| {
        let hi = store.len();
        let hlm = *h.lm();
        let hsugar = h.sugar;
        store.push(h);
        let make = |g: usize, store: &Vec<OrderedPoly>| {
            let lcm = hlm.lcm(store[g].lm());
            let sugar = (hsugar + hlm.quotient_of(&lcm).total_degree())
                .max(store[g].sugar + store[g].lm().quotient_of(&lcm).total_degree());
            Pair { i: g, j: hi, lcm, sugar }
        };
        // Gebauer–Möller update
        let candidates: Vec<Pair> = active.iter().map(|&g| make(g, store)).collect();
        let mut kept: Vec<Pair> = Vec::new();
        for (idx, p) in candidates.iter().enumerate() {
            let coprime = hlm.is_coprime(store[p.i].lm());
            let dominated = candidates[idx + 1..].iter().any(|q| q.lcm.divides(&p.lcm))
                || kept.iter().any(|q| q.lcm.divides(&p.lcm));
            if coprime || !dominated {
                kept.push(p.clone());
            }
        }
        kept.retain(|p| !hlm.is_coprime(store[p.i].lm()));
        pairs.retain(|p| {
            !(hlm.divides(&p.lcm) && hlm.lcm(store[p.i].lm()) != p.lcm && hlm.lcm(store[p.j].lm()) != p.lcm)
        });
        pairs.extend(kept);
        active.retain(|&g| !hlm.divides(store[g].lm()));
        active.push(hi);
    };

    // Seed with the inter-reduced, monic generators.
    let mut seeds: Vec<OrderedPoly> =
        generators.iter().map(|g| OrderedPoly::from_sparse(g, order)).filter(|g| !g.terms.is_empty()).collect();
    seeds.sort_by(|a, b| order.cmp(a.lm(), b.lm()));
    for s in seeds {
        let refs: Vec<&OrderedPoly> = active.iter().map(|&i| &store[i]).collect();
        let mut h = normal_form_until(&s, &refs, order, budget.deadline)?;
        if h.terms.is_empty() {
            continue;
        }
        h.make_monic();
        insert(h, &mut store, &mut active, &mut pairs);
    }

    let mut processed = 0usize;
    while !pairs.is_empty() {
        let best = (0..pairs.len())
            .min_by(|&a, &b| {
                pairs[a]
                    .sugar
                    .cmp(&pairs[b].sugar)
                    .then_with(|| order.cmp(&pairs[a].lcm, &pairs[b].lcm))
                    .then_with(|| (pairs[a].i, pairs[a].j).cmp(&(pairs[b].i, pairs[b].j)))
            })
            .unwrap();
        let pair = pairs.swap_remove(best);
        processed += 1;
        if processed > budget.max_pairs {
            return Err(Error::Budget(format!("more than {} S-pairs", budget.max_pairs)));
        }
        if pair.sugar > budget.max_degree {
            return Err(Error::Budget(format!("sugar degree {} exceeds {}", pair.sugar, budget.max_degree)));
        }
        if let Some(deadline) = budget.deadline {
            if Instant::now() > deadline {
                return Err(Error::Budget("time limit reached during Buchberger".into()));
            }
        }
        let s = s_polynomial(&store[pair.i], &store[pair.j], order);
        let refs: Vec<&OrderedPoly> = active.iter().map(|&i| &store[i]).collect();
        let mut h = normal_form_until(&s, &refs, order, budget.deadline)?;
        if h.terms.is_empty() {
            continue;
        }
        h.make_monic();
        insert(h, &mut store, &mut active, &mut pairs);
    }

    // Minimal basis, then inter-reduce.
    let mut minimal: Vec<OrderedPoly> = active.iter().map(|&i| store[i].clone()).collect();
    minimal.sort_by(|a, b| order.cmp(a.lm(), b.lm()));
    let mut keep: Vec<OrderedPoly> = Vec::new();
    for g in minimal {
        if !keep.iter().any(|k| k.lm().divides(g.lm())) {
            keep.push(g);
        }
    }
    let mut reduced = Vec::with_capacity(keep.len());
    for i in 0..keep.len() {
        let others: Vec<&OrderedPoly> = keep.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g).collect();
        let mut r = normal_form(&keep[i], &others, order);
        if r.terms.is_empty() || r.lm() != keep[i].lm() {
            return Err(Error::Internal("inter-reduction changed a leading monomial".into()));
        }
        r.make_monic();
        reduced.push(r);
    }
    Ok(GroebnerBasis { generators: reduced.iter().map(|g| g.to_sparse(arity)).collect(), order: order.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;

    fn p(src: &str) -> SparsePolynomial {
        parse_polynomial(src, &["x", "y", "z"]).unwrap()
    }

    fn names() -> Vec<String> {
        vec!["x".into(), "y".into(), "z".into()]
    }

    fn rendered(gb: &GroebnerBasis) -> Vec<String> {
        gb.generators.iter().map(|g| g.to_string_named(&names())).collect()
    }

    #[test]
    fn grevlex_and_lex_comparisons() {
        let o = MonomialOrder::grevlex(3);
        let e = |v: &[u16]| Exponents::from_slice(v);
        assert_eq!(o.cmp(&e(&[1, 1, 0]), &e(&[2, 0, 0])), Ordering::Less);
        assert_eq!(o.cmp(&e(&[1, 0, 1]), &e(&[0, 2, 0])), Ordering::Less);
        assert_eq!(o.cmp(&e(&[0, 0, 3]), &e(&[1, 0, 0])), Ordering::Greater);
        let l = MonomialOrder::lex(3);
        assert_eq!(l.cmp(&e(&[1, 0, 0]), &e(&[0, 0, 3])), Ordering::Greater);
    }

    #[test]
    fn single_linear_generator() {
        let gb = buchberger(&[p("x - 1")], &MonomialOrder::grevlex(3), &GroebnerBudget::default()).unwrap();
        assert_eq!(rendered(&gb), vec!["x - 1"]);
    }

    #[test]
    fn monomial_ideal_is_already_reduced() {
        let gb = buchberger(&[p("x^2"), p("x*y")], &MonomialOrder::grevlex(3), &GroebnerBudget::default()).unwrap();
        assert_eq!(rendered(&gb), vec!["x*y", "x^2"]);
    }

    #[test]
    fn linear_elimination() {
        let gb = buchberger(&[p("x - y"), p("y - 1")], &MonomialOrder::lex(3), &GroebnerBudget::default()).unwrap();
        assert_eq!(rendered(&gb), vec!["y - 1", "x - 1"]);
    }

    #[test]
    fn idempotent_and_generators_reduce_to_zero() {
        let gens = vec![p("x^2*y - z"), p("x*y^2 - x"), p("y*z - x^2")];
        let order = MonomialOrder::grevlex(3);
        let gb = buchberger(&gens, &order, &GroebnerBudget::default()).unwrap();
        assert!(gb.is_groebner());
        for g in &gens {
            assert!(gb.reduce(g).is_zero());
        }
        let again = buchberger(&gb.generators, &order, &GroebnerBudget::default()).unwrap();
        assert_eq!(again, gb);
    }

    #[test]
    fn twisted_cubic_elimination() {
        // x = t, y = t^2, z = t^3; eliminate t (variable 0 of a 4-variable ring)
        let names = ["t", "x", "y", "z"];
        let gens: Vec<_> =
            ["x - t", "y - t^2", "z - t^3"].iter().map(|s| parse_polynomial(s, &names).unwrap()).collect();
        let order = MonomialOrder::elimination(1, vec![1, 1, 1]);
        let gb = buchberger(&gens, &order, &GroebnerBudget::default()).unwrap();
        let elim: Vec<_> = gb.generators.iter().filter(|g| g.degree_in(0) == 0).collect();
        let expect = parse_polynomial("y - x^2", &names).unwrap();
        assert!(elim.iter().any(|g| **g == expect || **g == -&expect));
        assert!(elim.iter().all(|g| g.eval(&[0, 2, 4, 8].map(crate::rational::int)).unwrap().is_zero()));
    }

    #[test]
    fn budget_failure_is_loud() {
        let gens = vec![p("x^2*y - z"), p("x*y^2 - x"), p("y*z - x^2")];
        let tiny = GroebnerBudget { max_pairs: 1, ..Default::default() };
        assert!(matches!(buchberger(&gens, &MonomialOrder::grevlex(3), &tiny), Err(Error::Budget(_))));
        assert!(buchberger(&[], &MonomialOrder::grevlex(3), &tiny).is_err());
    }
}
