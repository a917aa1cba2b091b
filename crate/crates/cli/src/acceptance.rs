//! The acceptance suite: nine end-to-end checks with one pass/fail line each.

use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use conjugate_core::counting::fit_exponent;
use conjugate_core::error::Error;
use conjugate_core::groebner::GroebnerBudget;
use conjugate_core::lattice::{
    minkowski_sandwich, schur_factorization_check, shortest_vector, subsets, successive_minima, ConvexBody,
    DEFAULT_MAX_NODES,
};
use conjugate_core::matrix::RationalMatrix;
use conjugate_core::poly::{Exponents, SparsePolynomial};
use conjugate_core::rational::{int, Rational};
use conjugate_core::reference::{quadratic_count_oracle, shortest_vector_by_box, symord_by_linear_system};
use conjugate_core::symmetric::{enumerate_partitions, expand_in_schur_basis, monomial_symmetric, schur, IndexMode};
use conjugate_core::symord::{symord_via_elimination, PolynomialMap, Symord};

use crate::config::ExperimentConfig;
use crate::exit::{CliError, CliResult, Stage};

pub const COUNT_CONFIG: &str = include_str!("../../../configs/count_exponent.toml");
pub const TAILOR_CONFIG: &str = include_str!("../../../configs/tailor.toml");
pub const MEASURE_CONFIG: &str = include_str!("../../../configs/measure.toml");
pub const GOODNESS_CONFIG: &str = include_str!("../../../configs/goodness.toml");

/// Seed for the randomized criteria that have no config file.
const SEED: u64 = 20_240_601;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub wall_ms: u128,
}

impl Outcome {
    pub fn render(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        format!("criterion {} {status} {}: {} [{} ms]", self.id, self.name, self.detail, self.wall_ms)
    }
}

/// Budget for the stretch case of the Veronese table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budgets {
    pub veronese: Duration,
    pub veronese_stretch: Duration,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { veronese: Duration::from_secs(300), veronese_stretch: Duration::from_secs(60) }
    }
}

pub const NAMES: [&str; 9] = [
    "veronese symord table",
    "schur factorization",
    "schur basis round trip",
    "tailored construction",
    "counting exponent",
    "goodness bound",
    "minkowski sandwich",
    "non-divergence trend",
    "oracle equivalences",
];

pub fn run(id: u8, budgets: &Budgets) -> Outcome {
    let start = Instant::now();
    let result = match id {
        1 => veronese(budgets),
        2 => factorization(),
        3 => round_trip(),
        4 => tailored(),
        5 => counting_exponent(),
        6 => goodness(),
        7 => sandwich(),
        8 => trend(),
        9 => oracles(),
        _ => Err(CliError::Validation(format!("no criterion {id}"))),
    };
    let (passed, detail) = match result {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    let name = NAMES.get(id.wrapping_sub(1) as usize).copied().unwrap_or("unknown");
    Outcome { id, name, passed, detail, wall_ms: start.elapsed().as_millis() }
}

pub fn run_all(budgets: &Budgets, mut report: impl FnMut(&Outcome)) -> Vec<Outcome> {
    (1..=9)
        .map(|id| {
            let o = run(id, budgets);
            report(&o);
            o
        })
        .collect()
}

type Check = CliResult<(bool, String)>;

fn veronese(budgets: &Budgets) -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for (tau, expected) in [(2usize, 4u32), (3, 5), (4, 5)] {
        let budget = GroebnerBudget { deadline: Some(Instant::now() + budgets.veronese), ..Default::default() };
        let value = symord_via_elimination(&PolynomialMap::veronese(tau), &budget).stage("symord")?.value;
        ok &= value == Symord::Finite(expected);
        parts.push(format!("tau={tau}: {value}"));
    }
    let budget = GroebnerBudget { deadline: Some(Instant::now() + budgets.veronese_stretch), ..Default::default() };
    match symord_via_elimination(&PolynomialMap::veronese(5), &budget) {
        Ok(c) => {
            ok &= c.value == Symord::Finite(6);
            parts.push(format!("tau=5: {}", c.value));
        }
        Err(Error::Budget(_)) => {
            parts.push(format!("tau=5: budget of {} s reached", budgets.veronese_stretch.as_secs()))
        }
        Err(e) => return Err(CliError::from_core("symord", e)),
    }
    Ok((ok, parts.join(", ")))
}

fn distinct_point(rng: &mut ChaCha8Rng, k: usize) -> Vec<Rational> {
    loop {
        let v: Vec<Rational> =
            (0..k).map(|_| Rational::new(rng.gen_range(-30..=30).into(), rng.gen_range(1..=9).into())).collect();
        if (0..k).all(|i| (0..i).all(|j| v[i] != v[j])) {
            return v;
        }
    }
}

fn factorization() -> Check {
    let mut checks = 0usize;
    let mut failures = 0usize;
    for n in 1..=6 {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        rng.set_stream(n as u64);
        for _ in 0..100 {
            let f = distinct_point(&mut rng, n);
            for tau in 1..=n {
                for rows in subsets(n, tau) {
                    checks += 1;
                    if !schur_factorization_check(n, &f, &rows).stage("factorization")?.holds {
                        failures += 1;
                    }
                }
            }
        }
    }
    Ok((failures == 0, format!("{checks} row sets over n <= 6, {failures} mismatches")))
}

fn round_trip() -> Check {
    let mut checked = 0;
    for tau in 1..=3 {
        for k in 0..=4u32 {
            for lambda in enumerate_partitions(k, tau, IndexMode::WeightBounded) {
                if lambda.weight() != k {
                    continue;
                }
                let m = monomial_symmetric(&lambda, tau).stage("schur")?;
                let coeffs = expand_in_schur_basis(&m, k, tau).stage("schur")?;
                if coeffs.values().any(|c| !c.is_integer()) {
                    return Ok((false, format!("non-integer coefficient for m_{lambda} in {tau} variables")));
                }
                let mut back = SparsePolynomial::zero(tau);
                for (mu, c) in &coeffs {
                    back = &back + &schur(mu, tau).stage("schur")?.scale(c);
                }
                if back != m {
                    return Ok((false, format!("m_{lambda} in {tau} variables does not reconstruct")));
                }
                checked += 1;
            }
        }
    }
    Ok((true, format!("{checked} monomial symmetric polynomials expand integrally and reconstruct")))
}

fn tailored() -> Check {
    let cfg = ExperimentConfig::from_toml(TAILOR_CONFIG)?;
    let v = cfg.validate()?;
    let samples = cfg.tailor.as_ref().map_or(0, |t| t.samples) as u64;
    let indices: Vec<u64> = (0..samples).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for &q in &cfg.run.q {
        let rows = crate::commands::tailor_rows(&cfg, &v, q, &indices)?;
        let good = rows.iter().filter(|r| r.succeeded()).count();
        ok &= good * 10 >= rows.len() * 9;
        parts.push(format!("Q={q}: {good}/{}", rows.len()));
    }
    Ok((ok, format!("{} certified and replayed (need 90%)", parts.join(", "))))
}

fn count_config() -> CliResult<(ExperimentConfig, crate::config::Validated)> {
    let cfg = ExperimentConfig::from_toml(COUNT_CONFIG)?;
    let v = cfg.validate()?;
    Ok((cfg, v))
}

fn counting_exponent() -> Check {
    let (cfg, v) = count_config()?;
    let mut pts = Vec::new();
    let mut counts = Vec::new();
    for &q in &cfg.run.q {
        let query = conjugate_core::counting::CountQuery {
            n: cfg.profile.n,
            q,
            gamma: v.gamma.clone().expect("count section"),
            c: v.c[0].clone(),
            lo: v.lo.clone(),
            hi: v.hi.clone(),
            retain: 0,
        };
        let r = conjugate_core::counting::count_near_manifold(&v.chart, &query).stage("count")?;
        counts.push(r.count.to_string());
        pts.push((q as f64, r.count as f64));
    }
    let fit = fit_exponent(&pts).stage("count")?;
    let ok = (fit.slope - 2.5).abs() <= 0.35;
    Ok((ok, format!("counts {} give slope {:.4} (target 2.5 +- 0.35)", counts.join("/"), fit.slope)))
}

fn goodness() -> Check {
    let cfg = ExperimentConfig::from_toml(GOODNESS_CONFIG)?;
    cfg.validate()?;
    let maps = cfg.goodness.as_ref().map_or(0, |g| g.maps) as u64;
    let indices: Vec<u64> = (0..maps).collect();
    let (table, violations) = crate::commands::goodness_table(&cfg, &indices)?;
    Ok((violations == 0, format!("{maps} maps, {} rows, {violations} violations", table.rows.len())))
}

fn random_lattice(rng: &mut ChaCha8Rng, dim: usize, range: i64) -> CliResult<RationalMatrix> {
    loop {
        let rows: Vec<Vec<i64>> = (0..dim).map(|_| (0..dim).map(|_| rng.gen_range(-range..=range)).collect()).collect();
        let m = RationalMatrix::from_i64_rows(&rows).stage("lattice")?;
        if !m.det().stage("lattice")?.is_zero() {
            return Ok(m);
        }
    }
}

fn sandwich() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = 0;
    for _ in 0..200 {
        let dim = rng.gen_range(1..=5);
        let basis = random_lattice(&mut rng, dim, 8)?;
        let widths =
            (0..dim).map(|_| Rational::new(rng.gen_range(1..=20).into(), rng.gen_range(1..=6).into())).collect();
        let strict = (0..dim).map(|_| rng.gen_bool(0.5)).collect();
        let body = ConvexBody::new(widths, strict).stage("lattice")?;
        let sm = successive_minima(&basis, &body, DEFAULT_MAX_NODES).stage("lattice")?;
        if !minkowski_sandwich(&basis, &body, &sm.minima).stage("lattice")? {
            failures += 1;
        }
    }
    Ok((failures == 0, format!("200 lattices of dimension <= 5, {failures} violations")))
}

fn trend() -> Check {
    let cfg = ExperimentConfig::from_toml(MEASURE_CONFIG)?;
    let v = cfg.validate()?;
    let rows = crate::commands::measure_rows(&cfg, &v, &v.eps)?;
    let fractions: Vec<f64> = rows.iter().map(|r| r.fraction).collect();
    let monotone = fractions.windows(2).all(|w| w[1] <= w[0]);
    let last = fractions.last().copied().unwrap_or(1.0);
    let shown: Vec<String> = fractions.iter().map(|f| format!("{f:.4}")).collect();
    Ok((monotone && last < 0.05, format!("fractions {} for eps = 1/2 .. 1/16", shown.join(", "))))
}

fn oracles() -> Check {
    let mut parts = Vec::new();
    let mut ok = true;
    // counting against the quadratic-field enumeration
    let (_, v) = count_config()?;
    let coeffs = [int(2), int(0), int(1)];
    let gamma = v.gamma.clone().expect("count section");
    let mut compared = 0;
    let mut mismatches = 0;
    for q in [1i64, 2, 3, 5, 8, 13, 21, 32] {
        for c in [int(1), int(4), int(16)] {
            let query = conjugate_core::counting::CountQuery {
                n: 2,
                q,
                gamma: gamma.clone(),
                c: c.clone(),
                lo: v.lo.clone(),
                hi: v.hi.clone(),
                retain: 0,
            };
            let fast = conjugate_core::counting::count_near_manifold(&v.chart, &query).stage("count")?;
            let exact = quadratic_count_oracle(&coeffs, q, &gamma, &c, &v.lo[0], &v.hi[0]).stage("oracle")?;
            if fast.count != exact || fast.undecidable != 0 {
                mismatches += 1;
            }
            compared += 1;
        }
    }
    ok &= mismatches == 0;
    parts.push(format!("counts {mismatches}/{compared} differ"));
    // symord by elimination against the linear system, τ = 2 and k <= 5
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut maps = vec![PolynomialMap::veronese(2)];
    while maps.len() < 20 {
        let comps = (0..2)
            .map(|_| {
                let mut p = SparsePolynomial::zero(1);
                for _ in 0..rng.gen_range(1..=3) {
                    p.add_term(Exponents::from_slice(&[rng.gen_range(0..=3)]), int(rng.gen_range(-3..=3)));
                }
                p
            })
            .collect();
        maps.push(PolynomialMap::new(comps).stage("symord")?);
    }
    let mut mismatches = 0;
    for p in &maps {
        let elim = symord_via_elimination(p, &GroebnerBudget::default()).stage("symord")?.value;
        let linear = symord_by_linear_system(p, 5).stage("symord")?;
        let expected = match elim {
            Symord::Finite(k) if k <= 5 => Some(k),
            _ => None,
        };
        if linear != expected {
            mismatches += 1;
        }
    }
    ok &= mismatches == 0;
    parts.push(format!("symord {mismatches}/{} differ", maps.len()));
    // shortest vector against the bounding-box scan
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut compared = 0;
    let mut skipped = 0;
    let mut mismatches = 0;
    while compared < 100 {
        let dim = rng.gen_range(1..=4);
        let basis = random_lattice(&mut rng, dim, 5)?;
        let (coeffs, len) = match shortest_vector_by_box(&basis, 200_000) {
            Ok(r) => r,
            Err(Error::Budget(_)) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(CliError::from_core("oracle", e)),
        };
        let fast = shortest_vector(&basis, &(&len + int(1)), DEFAULT_MAX_NODES).stage("lattice")?;
        if !fast.is_some_and(|s| s.length == len && s.coefficients == coeffs) {
            mismatches += 1;
        }
        compared += 1;
    }
    ok &= mismatches == 0;
    parts.push(format!("shortest vectors {mismatches}/100 differ ({skipped} ill-conditioned lattices redrawn)"));
    Ok((ok, parts.join(", ")))
}
