//! The subcommands. Each returns the lines it prints and writes its CSV and
//! run record under the output directory.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use conjugate_core::counting::{count_near_manifold, fit_exponent, CountQuery};
use conjugate_core::goodness::{goodness_bound_check, log_grid};
use conjugate_core::groebner::GroebnerBudget;
use conjugate_core::lattice::{measure_estimate, scaling_parameters};
use conjugate_core::poly::{parse_polynomial, Exponents, SparsePolynomial};
use conjugate_core::profile::ApproximationProfile;
use conjugate_core::rational::{format_rational, int, parse_rational, to_f64, Rational};
use conjugate_core::symmetric::{schur, Partition};
use conjugate_core::symord::{symord_via_elimination, PolynomialMap};
use conjugate_core::tailored::{construct_tailored, replay_certificate, TailorOutcome, TailorSettings};

use crate::config::{ExperimentConfig, MeasureFamily, Validated};
use crate::exit::{CliError, CliResult, Stage};
use crate::record::{RunRecord, Table};

/// Options shared by every subcommand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Common {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub deadline: Option<Instant>,
}

impl Common {
    fn load(&self) -> CliResult<(ExperimentConfig, Validated)> {
        let path = self.config.as_ref().ok_or_else(|| CliError::Validation("--config is required".into()))?;
        let mut cfg = ExperimentConfig::load(path)?;
        if let Some(seed) = self.seed {
            cfg.run.seed = seed;
        }
        let v = cfg.validate()?;
        Ok((cfg, v))
    }

    fn out_dir(&self, cfg: Option<&ExperimentConfig>) -> PathBuf {
        self.out
            .clone()
            .or_else(|| cfg.and_then(|c| c.run.out.as_ref().map(PathBuf::from)))
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

fn ms(t: Instant) -> String {
    t.elapsed().as_millis().to_string()
}

fn finish(mut record: RunRecord, start: Instant, dir: &Path, tables: Vec<(&str, Table)>) -> CliResult<Vec<String>> {
    let mut lines = Vec::new();
    for (name, table) in tables {
        let entry = table.write(&dir.join(name))?;
        lines.push(format!("wrote {} ({} rows)", entry.path.display(), entry.rows));
        record.outputs.push(entry);
    }
    record.wall_ms = start.elapsed().as_millis();
    let path = record.write(dir)?;
    lines.push(format!("wrote {}", path.display()));
    Ok(lines)
}

/// `s_λ` in `τ` variables, or its value at a point.
pub fn cmd_schur(lambda: &str, tau: usize, point: Option<&str>) -> CliResult<Vec<String>> {
    let lambda = Partition::parse(lambda).stage("schur")?;
    let s = schur(&lambda, tau).stage("schur")?;
    match point {
        None => Ok(vec![s.to_string()]),
        Some(p) => {
            let values = parse_list(p)?;
            Ok(vec![format_rational(&s.eval(&values).stage("schur")?)])
        }
    }
}

fn parse_list(s: &str) -> CliResult<Vec<Rational>> {
    s.split(',').map(|x| parse_rational(x).stage("parse")).collect()
}

/// Parses `"x, x^2"` over the comma-separated `vars`.
pub fn parse_map(map: &str, vars: &str) -> CliResult<PolynomialMap> {
    let names: Vec<&str> = vars.split(',').map(str::trim).collect();
    let comps = map.split(',').map(|c| parse_polynomial(c, &names).stage("parse")).collect::<CliResult<Vec<_>>>()?;
    PolynomialMap::new(comps).stage("parse")
}

/// symord by elimination; writes the Gröbner certificate.
pub fn cmd_symord(p: &PolynomialMap, common: &Common) -> CliResult<Vec<String>> {
    let budget = GroebnerBudget { deadline: common.deadline, ..GroebnerBudget::default() };
    let cert = symord_via_elimination(p, &budget).stage("symord")?;
    let dir = common.out_dir(None);
    let path = dir.join("symord_certificate.txt");
    crate::record::write_file(&path, &cert.render())?;
    Ok(vec![cert.value.to_string(), format!("certificate {}", path.display())])
}

/// Count rows for every `(Q, c)`, an exponent fit per `c`.
pub fn cmd_count(common: &Common, q_override: Option<i64>, c_override: Option<&str>) -> CliResult<Vec<String>> {
    let start = Instant::now();
    let (cfg, v) = common.load()?;
    let spec = cfg.count.as_ref().ok_or_else(|| CliError::Validation("config has no [count] section".into()))?;
    let gamma = v.gamma.clone().expect("validated");
    let qs = q_override.map_or_else(|| cfg.run.q.clone(), |q| vec![q]);
    let cs = match c_override {
        Some(c) => vec![parse_rational(c).stage("count")?],
        None => v.c.clone(),
    };
    let mut table = Table::new(&["Q", "gamma", "c", "count", "undecidable", "wall_ms"]);
    let mut samples = Vec::new();
    let mut series: Vec<Vec<(f64, f64)>> = vec![Vec::new(); cs.len()];
    for &q in &qs {
        for (ci, c) in cs.iter().enumerate() {
            let t = Instant::now();
            let query = CountQuery {
                n: cfg.profile.n,
                q,
                gamma: gamma.clone(),
                c: c.clone(),
                lo: v.lo.clone(),
                hi: v.hi.clone(),
                retain: spec.retain,
            };
            let r = count_near_manifold(&v.chart, &query).stage("count")?;
            let mut row: Vec<String> = r.csv_fields().split(',').map(String::from).collect();
            row.push(ms(t));
            table.push(row);
            series[ci].push((q as f64, r.count as f64));
            samples.extend(r.samples.iter().map(|s| format!("{q},{},{}", format_rational(c), s.render())));
        }
    }
    let mut fits = Table::new(&["c", "points", "slope", "intercept", "residual"]);
    for (c, pts) in cs.iter().zip(&series) {
        let positive: Vec<(f64, f64)> = pts.iter().copied().filter(|p| p.1 > 0.0).collect();
        if let Ok(fit) = fit_exponent(&positive) {
            fits.push(vec![
                format_rational(c),
                positive.len().to_string(),
                format!("{:.6}", fit.slope),
                format!("{:.6}", fit.intercept),
                format!("{:.6}", fit.residual),
            ]);
        }
    }
    let dir = common.out_dir(Some(&cfg));
    let mut lines: Vec<String> = table.render().lines().map(String::from).collect();
    lines.extend(fits.render().lines().map(String::from));
    if !samples.is_empty() {
        let path = dir.join("count_samples.txt");
        crate::record::write_file(&path, &(samples.join("\n") + "\n"))?;
    }
    let record = RunRecord::new("count", Some(cfg.hash()?), cfg.run.seed);
    lines.extend(finish(record, start, &dir, vec![("count.csv", table), ("count_fit.csv", fits)])?);
    Ok(lines)
}

/// Sample point `index`: each coordinate is `k/den` with `k` uniform over the
/// box, drawn from stream `index` of the seeded generator.
pub fn tailor_point(v: &Validated, den: i64, seed: u64, index: u64) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let den_r = int(den);
    v.lo.iter()
        .zip(&v.hi)
        .map(|(lo, hi)| {
            let a = (lo * &den_r).ceil().to_integer();
            let b = (hi * &den_r).floor().to_integer();
            let a: i64 = a.try_into().unwrap_or(i64::MIN / 2);
            let b: i64 = b.try_into().unwrap_or(i64::MAX / 2);
            Rational::new(rng.gen_range(a..=b).into(), den.into())
        })
        .collect()
}

/// Outcome of the pipeline at one sample point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailorRow {
    pub q: i64,
    pub index: u64,
    pub point: Vec<Rational>,
    pub status: String,
    pub stage: String,
    pub prime: String,
    pub replayed: bool,
    pub certificate: Option<serde_json::Value>,
    pub wall_ms: u128,
}

impl TailorRow {
    pub fn succeeded(&self) -> bool {
        self.status == "success" && self.replayed
    }
}

pub fn tailor_settings(cfg: &ExperimentConfig) -> CliResult<TailorSettings> {
    let t = cfg.tailor.as_ref().ok_or_else(|| CliError::Validation("config has no [tailor] section".into()))?;
    let r = |s: &str| parse_rational(s).stage("tailor");
    Ok(TailorSettings {
        delta0: r(&t.delta0)?,
        delta_min: r(&t.delta_min)?,
        delta_max: r(&t.delta_max)?,
        c_f: r(&t.c_f)?,
        precision: t.precision,
        max_nodes: t.max_nodes,
    })
}

pub fn tailor_one(
    v: &Validated,
    profile: &ApproximationProfile,
    settings: &TailorSettings,
    den: i64,
    seed: u64,
    q: i64,
    index: u64,
) -> CliResult<TailorRow> {
    let t = Instant::now();
    let point = tailor_point(v, den, seed, index);
    let fvals = v.chart.values(&point).stage("tailor")?;
    let qr = int(q);
    let mut row = TailorRow {
        q,
        index,
        point,
        status: String::new(),
        stage: String::new(),
        prime: String::new(),
        replayed: false,
        certificate: None,
        wall_ms: 0,
    };
    match construct_tailored(&fvals, profile, &qr, settings) {
        Ok(TailorOutcome::Success(cert)) => {
            row.status = "success".into();
            row.prime = cert.prime.to_string();
            row.replayed = replay_certificate(&cert, &fvals, profile, &qr).stage("tailor")?;
            row.certificate = Some(certificate_json(&cert, q, index));
        }
        Ok(TailorOutcome::Failure { stage, .. }) => {
            row.status = "failure".into();
            row.stage = format!("{stage:?}");
        }
        Err(conjugate_core::error::Error::Budget(_)) => {
            row.status = "failure".into();
            row.stage = "Budget".into();
        }
        Err(e) => return Err(CliError::from_core("tailor", e)),
    }
    row.wall_ms = t.elapsed().as_millis();
    Ok(row)
}

fn certificate_json(cert: &conjugate_core::tailored::TailoredCertificate, q: i64, index: u64) -> serde_json::Value {
    let records: Vec<serde_json::Value> = cert
        .records
        .iter()
        .map(|r| {
            serde_json::json!({
                "polynomial": r.polynomial.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "eta": r.eta.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "eisenstein": r.eisenstein,
                "bounds": r.bounds.iter().map(|b| serde_json::json!({
                    "label": b.label,
                    "lhs": format_rational(&b.lhs),
                    "rhs": format_rational(&b.rhs),
                    "strict": b.strict,
                    "holds": b.holds,
                })).collect::<Vec<_>>(),
                "derivative_holds": r.derivative.holds,
            })
        })
        .collect();
    serde_json::json!({
        "Q": q,
        "index": index,
        "prime": cert.prime.to_string(),
        "c_y": format_rational(&cert.constants.c_y),
        "minima": cert.minima.iter().map(format_rational).collect::<Vec<_>>(),
        "rank": cert.rank,
        "records": records,
    })
}

pub fn tailor_rows(cfg: &ExperimentConfig, v: &Validated, q: i64, indices: &[u64]) -> CliResult<Vec<TailorRow>> {
    let settings = tailor_settings(cfg)?;
    let profile = v.profile.as_ref().ok_or_else(|| CliError::Validation("tailor needs a profile".into()))?;
    let den = cfg.tailor.as_ref().expect("checked").denominator;
    indices.par_iter().map(|&i| tailor_one(v, profile, &settings, den, cfg.run.seed, q, i)).collect()
}

pub fn cmd_tailor(common: &Common, index: Option<u64>) -> CliResult<Vec<String>> {
    let start = Instant::now();
    let (cfg, v) = common.load()?;
    let samples =
        cfg.tailor.as_ref().ok_or_else(|| CliError::Validation("config has no [tailor] section".into()))?.samples;
    let indices: Vec<u64> = index.map_or_else(|| (0..samples as u64).collect(), |i| vec![i]);
    let mut table = Table::new(&["Q", "index", "point", "status", "stage", "prime", "replayed", "wall_ms"]);
    let mut certs = Vec::new();
    let mut summary = Vec::new();
    for &q in &cfg.run.q {
        let rows = tailor_rows(&cfg, &v, q, &indices)?;
        let ok = rows.iter().filter(|r| r.succeeded()).count();
        summary.push(format!("Q={q}: {ok}/{} points certified", rows.len()));
        for r in rows {
            let point: Vec<String> = r.point.iter().map(format_rational).collect();
            table.push(vec![
                q.to_string(),
                r.index.to_string(),
                point.join(";"),
                r.status.clone(),
                r.stage.clone(),
                r.prime.clone(),
                r.replayed.to_string(),
                r.wall_ms.to_string(),
            ]);
            if let Some(c) = r.certificate {
                certs.push(c.to_string());
            }
        }
    }
    let dir = common.out_dir(Some(&cfg));
    crate::record::write_file(
        &dir.join("tailor_certificates.jsonl"),
        &certs.iter().map(|c| format!("{c}\n")).collect::<String>(),
    )?;
    let record = RunRecord::new("tailor", Some(cfg.hash()?), cfg.run.seed);
    summary.extend(finish(record, start, &dir, vec![("tailor.csv", table)])?);
    Ok(summary)
}

pub fn cmd_scaling(common: &Common, q_override: Option<f64>) -> CliResult<Vec<String>> {
    let start = Instant::now();
    let (cfg, v) = common.load()?;
    let profile = v.profile.as_ref().ok_or_else(|| CliError::Validation("scaling needs a profile".into()))?;
    let qs: Vec<f64> = q_override.map_or_else(|| cfg.run.q.iter().map(|&q| q as f64).collect(), |q| vec![q]);
    let mut header = vec!["Q".to_string(), "delta".to_string()];
    header.extend((0..=profile.n).map(|k| format!("t_{k}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut table = Table::new(&header_refs);
    for q in qs {
        let s = scaling_parameters(profile, q).stage("scaling")?;
        let mut row = vec![q.to_string(), format!("{:.12e}", s.delta)];
        row.extend(s.t.iter().map(|t| format!("{t:.12e}")));
        table.push(row);
    }
    let dir = common.out_dir(Some(&cfg));
    let mut lines: Vec<String> = table.render().lines().map(String::from).collect();
    let record = RunRecord::new("scaling", Some(cfg.hash()?), cfg.run.seed);
    lines.extend(finish(record, start, &dir, vec![("scaling.csv", table)])?);
    Ok(lines)
}

/// Profile of the measure experiment at one `ε`.
pub fn measure_profile(cfg: &ExperimentConfig, v: &Validated, eps: &Rational) -> CliResult<ApproximationProfile> {
    let spec = cfg.measure.as_ref().ok_or_else(|| CliError::Validation("config has no [measure] section".into()))?;
    match spec.family {
        MeasureFamily::OriginalCase => ApproximationProfile::original_case(cfg.profile.n, eps).stage("measure"),
        MeasureFamily::ScaledPsi => {
            let p = v.profile.clone().expect("validated");
            let psi = p.psi.iter().map(|l| l.scaled(eps)).collect::<conjugate_core::error::Result<Vec<_>>>();
            ApproximationProfile::new(p.n, p.m, p.d, psi.stage("measure")?, p.phi).stage("measure")
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureRow {
    pub eps: Rational,
    pub q: i64,
    pub fraction: f64,
    pub hits: usize,
    pub used: usize,
    pub rejected: usize,
    pub wall_ms: u128,
}

pub fn measure_rows(cfg: &ExperimentConfig, v: &Validated, eps: &[Rational]) -> CliResult<Vec<MeasureRow>> {
    let spec = cfg.measure.as_ref().ok_or_else(|| CliError::Validation("config has no [measure] section".into()))?;
    let lo: Vec<f64> = v.lo.iter().map(to_f64).collect();
    let hi: Vec<f64> = v.hi.iter().map(to_f64).collect();
    let mut rows = Vec::new();
    for &q in &cfg.run.q {
        for e in eps {
            let t = Instant::now();
            let profile = measure_profile(cfg, v, e)?;
            let est =
                measure_estimate(&v.chart, &lo, &hi, &profile, &int(q), spec.samples, cfg.run.seed).stage("measure")?;
            rows.push(MeasureRow {
                eps: e.clone(),
                q,
                fraction: est.fraction,
                hits: est.hits,
                used: est.used,
                rejected: est.rejected,
                wall_ms: t.elapsed().as_millis(),
            });
        }
    }
    Ok(rows)
}

pub fn cmd_measure(common: &Common, eps_override: Option<&str>) -> CliResult<Vec<String>> {
    let start = Instant::now();
    let (cfg, v) = common.load()?;
    let eps = match eps_override {
        Some(e) => vec![parse_rational(e).stage("measure")?],
        None => v.eps.clone(),
    };
    let rows = measure_rows(&cfg, &v, &eps)?;
    let mut table = Table::new(&["Q", "eps", "samples", "hits", "rejected", "fraction", "wall_ms"]);
    for r in &rows {
        table.push(vec![
            r.q.to_string(),
            format_rational(&r.eps),
            r.used.to_string(),
            r.hits.to_string(),
            r.rejected.to_string(),
            format!("{:.6}", r.fraction),
            r.wall_ms.to_string(),
        ]);
    }
    let dir = common.out_dir(Some(&cfg));
    let mut lines: Vec<String> = table.render().lines().map(String::from).collect();
    let record = RunRecord::new("measure", Some(cfg.hash()?), cfg.run.seed);
    lines.extend(finish(record, start, &dir, vec![("measure.csv", table)])?);
    Ok(lines)
}

/// A random polynomial map and box for the goodness sweep, from stream `index`.
pub fn random_goodness_map(
    seed: u64,
    index: u64,
    max_dimension: usize,
    max_degree: u32,
    max_components: usize,
) -> (PolynomialMap, Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let d = rng.gen_range(1..=max_dimension);
    let comps = (0..rng.gen_range(1..=max_components))
        .map(|_| {
            let mut p = SparsePolynomial::zero(d);
            for _ in 0..rng.gen_range(1..=5) {
                let mut e = vec![0u16; d];
                let total = rng.gen_range(0..=max_degree);
                for _ in 0..total {
                    e[rng.gen_range(0..d)] += 1;
                }
                p.add_term(
                    Exponents::from_slice(&e),
                    Rational::new(rng.gen_range(-9..=9).into(), rng.gen_range(1..=4).into()),
                );
            }
            p
        })
        .collect();
    let lo: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..1.0)).collect();
    let hi: Vec<f64> = lo.iter().map(|a| a + rng.gen_range(0.25..2.0)).collect();
    (PolynomialMap::new(comps).expect("arity is consistent"), lo, hi)
}

pub fn goodness_table(cfg: &ExperimentConfig, indices: &[u64]) -> CliResult<(Table, usize)> {
    let g = cfg.goodness.as_ref().ok_or_else(|| CliError::Validation("config has no [goodness] section".into()))?;
    let r = |s: &str| parse_rational(s).map(|x| to_f64(&x)).stage("goodness");
    let eps = log_grid(r(&g.eps_lo)?, r(&g.eps_hi)?, g.eps_points);
    let slack = r(&g.slack)?;
    let mut table = Table::new(&["map", "d", "degree", "eps", "measure", "bound", "violation"]);
    let mut violations = 0;
    for &i in indices {
        let (map, lo, hi) = random_goodness_map(cfg.run.seed, i, g.max_dimension, g.max_degree, g.max_components);
        let report = goodness_bound_check(&map, &lo, &hi, &eps, g.resolution, slack).stage("goodness")?;
        violations += report.violations();
        for row in &report.rows {
            table.push(vec![
                i.to_string(),
                map.input_arity().to_string(),
                report.degree.to_string(),
                format!("{:.6e}", row.eps),
                format!("{:.6e}", row.measure),
                format!("{:.6e}", row.bound),
                row.violation.to_string(),
            ]);
        }
    }
    Ok((table, violations))
}

pub fn cmd_goodness(common: &Common, index: Option<u64>) -> CliResult<Vec<String>> {
    let start = Instant::now();
    let (cfg, _) = common.load()?;
    let maps =
        cfg.goodness.as_ref().ok_or_else(|| CliError::Validation("config has no [goodness] section".into()))?.maps;
    let indices: Vec<u64> = index.map_or_else(|| (0..maps as u64).collect(), |i| vec![i]);
    let (table, violations) = goodness_table(&cfg, &indices)?;
    let dir = common.out_dir(Some(&cfg));
    let mut lines = vec![format!("{} maps, {violations} violations", indices.len())];
    let record = RunRecord::new("goodness", Some(cfg.hash()?), cfg.run.seed);
    lines.extend(finish(record, start, &dir, vec![("goodness.csv", table)])?);
    Ok(lines)
}
