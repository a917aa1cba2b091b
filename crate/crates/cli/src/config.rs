//! Experiment configuration: a TOML file with exact rationals as `"p/q"`
//! strings and power laws as `"coeff, exponent"` pairs.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use conjugate_core::poly::parse_polynomial;
use conjugate_core::profile::{ApproximationProfile, Chart, PowerLaw};
use conjugate_core::rational::{format_rational, parse_rational, Rational};

use crate::exit::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub run: RunSpec,
    pub manifold: ManifoldSpec,
    pub profile: ProfileSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<CountSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tailor: Option<TailorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goodness: Option<GoodnessSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub seed: u64,
    /// Q schedule.
    pub q: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_ms: Option<u64>,
}

/// A chart `x ↦ (x, f_d(x), …, f_m(x))` over the box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub variables: Vec<String>,
    pub components: Vec<String>,
    pub lo: Vec<String>,
    pub hi: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub n: usize,
    /// `ψ_0..ψ_m`; may be empty for experiments that only need `n`.
    #[serde(default)]
    pub psi: Vec<String>,
    /// `φ_{m+1}..φ_n`.
    #[serde(default)]
    pub phi: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountSpec {
    pub gamma: String,
    pub c: Vec<String>,
    #[serde(default)]
    pub retain: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailorSpec {
    pub delta0: String,
    pub delta_min: String,
    pub delta_max: String,
    pub c_f: String,
    pub samples: usize,
    /// Sample points are `k/denominator` inside the manifold box.
    pub denominator: i64,
    #[serde(default = "default_precision")]
    pub precision: u32,
    #[serde(default = "default_max_nodes")]
    pub max_nodes: u64,
}

fn default_precision() -> u32 {
    40
}

fn default_max_nodes() -> u64 {
    2_000_000
}

/// How the measure profile is built for each `ε`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureFamily {
    /// The curve profile with `δ = ε`.
    OriginalCase,
    /// The `[profile]` laws with every `ψ_k` scaled by `ε`.
    ScaledPsi,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub family: MeasureFamily,
    pub eps: Vec<String>,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoodnessSpec {
    pub maps: usize,
    pub max_dimension: usize,
    pub max_degree: u32,
    pub max_components: usize,
    pub resolution: usize,
    pub slack: String,
    pub eps_lo: String,
    pub eps_hi: String,
    pub eps_points: usize,
}

/// A config with every field parsed and checked.
#[derive(Clone, Debug)]
pub struct Validated {
    pub chart: Chart,
    pub lo: Vec<Rational>,
    pub hi: Vec<Rational>,
    /// `None` when `[profile]` lists no power laws.
    pub profile: Option<ApproximationProfile>,
    pub gamma: Option<Rational>,
    pub c: Vec<Rational>,
    pub eps: Vec<Rational>,
}

fn rational(field: &str, s: &str) -> CliResult<Rational> {
    parse_rational(s).map_err(|e| CliError::Validation(format!("{field}: {e}")))
}

fn positive(field: &str, s: &str) -> CliResult<Rational> {
    let r = rational(field, s)?;
    if r <= Rational::from_integer(0.into()) {
        return Err(CliError::Validation(format!("{field} must be positive, got {s}")));
    }
    Ok(r)
}

impl ExperimentConfig {
    pub fn from_toml(src: &str) -> CliResult<Self> {
        toml::from_str(src).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> CliResult<String> {
        toml::to_string(self).map_err(|e| CliError::Internal(format!("config serialisation: {e}")))
    }

    pub fn load(path: &std::path::Path) -> CliResult<Self> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&src)
    }

    pub fn validate(&self) -> CliResult<Validated> {
        let m = &self.manifold;
        let d = m.variables.len();
        if d == 0 {
            return Err(CliError::Validation("manifold needs at least one variable".into()));
        }
        if m.lo.len() != d || m.hi.len() != d {
            return Err(CliError::Validation(format!("manifold box must have {d} bounds per side")));
        }
        let names: Vec<&str> = m.variables.iter().map(String::as_str).collect();
        let components = m
            .components
            .iter()
            .map(|c| parse_polynomial(c, &names).map_err(|e| CliError::Validation(format!("manifold component: {e}"))))
            .collect::<CliResult<Vec<_>>>()?;
        let chart = Chart::new(d, components).map_err(|e| CliError::Validation(e.to_string()))?;
        let lo = m.lo.iter().map(|s| rational("manifold.lo", s)).collect::<CliResult<Vec<_>>>()?;
        let hi = m.hi.iter().map(|s| rational("manifold.hi", s)).collect::<CliResult<Vec<_>>>()?;
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(CliError::Validation("manifold box is empty".into()));
        }
        let n = self.profile.n;
        let chart_m = chart.m();
        if n <= chart_m {
            return Err(CliError::Validation(format!("need n > m, got n={n}, m={chart_m}")));
        }
        let profile = if self.profile.psi.is_empty() && self.profile.phi.is_empty() {
            None
        } else {
            let law = |s: &String| PowerLaw::parse(s).map_err(|e| CliError::Validation(format!("profile: {e}")));
            let psi = self.profile.psi.iter().map(law).collect::<CliResult<Vec<_>>>()?;
            let phi = self.profile.phi.iter().map(law).collect::<CliResult<Vec<_>>>()?;
            Some(
                ApproximationProfile::new(n, chart_m, d, psi, phi)
                    .map_err(|e| CliError::Validation(format!("profile: {e}")))?,
            )
        };
        if self.run.q.is_empty() {
            return Err(CliError::Validation("the Q schedule is empty".into()));
        }
        if let Some(q) = self.run.q.iter().find(|&&q| q < 1) {
            return Err(CliError::Validation(format!("Q must be at least 1, got {q}")));
        }
        let (gamma, c) = match &self.count {
            Some(spec) => {
                if spec.c.is_empty() {
                    return Err(CliError::Validation("the c sweep is empty".into()));
                }
                let c = spec.c.iter().map(|s| positive("count.c", s)).collect::<CliResult<Vec<_>>>()?;
                (Some(positive("count.gamma", &spec.gamma)?), c)
            }
            None => (None, Vec::new()),
        };
        if let Some(t) = &self.tailor {
            for (f, v) in
                [("delta0", &t.delta0), ("delta_min", &t.delta_min), ("delta_max", &t.delta_max), ("c_f", &t.c_f)]
            {
                positive(&format!("tailor.{f}"), v)?;
            }
            if t.samples == 0 || t.denominator < 2 {
                return Err(CliError::Validation("tailor needs samples > 0 and denominator >= 2".into()));
            }
            if profile.is_none() {
                return Err(CliError::Validation("tailor needs the profile power laws".into()));
            }
        }
        let eps = match &self.measure {
            Some(spec) => {
                if spec.eps.is_empty() || spec.samples == 0 {
                    return Err(CliError::Validation("measure needs eps values and samples > 0".into()));
                }
                if spec.family == MeasureFamily::ScaledPsi && profile.is_none() {
                    return Err(CliError::Validation("measure family scaled_psi needs the profile power laws".into()));
                }
                if spec.family == MeasureFamily::OriginalCase && (d != 1 || chart_m != 1) {
                    return Err(CliError::Validation("measure family original_case needs a curve with m = 1".into()));
                }
                spec.eps.iter().map(|s| positive("measure.eps", s)).collect::<CliResult<Vec<_>>>()?
            }
            None => Vec::new(),
        };
        if let Some(g) = &self.goodness {
            if g.maps == 0 || g.max_dimension == 0 || g.max_components == 0 || g.resolution == 0 || g.eps_points == 0 {
                return Err(CliError::Validation("goodness sizes must be positive".into()));
            }
            let lo = positive("goodness.eps_lo", &g.eps_lo)?;
            let hi = positive("goodness.eps_hi", &g.eps_hi)?;
            if lo > hi {
                return Err(CliError::Validation("goodness.eps_lo exceeds eps_hi".into()));
            }
            rational("goodness.slack", &g.slack)?;
        }
        Ok(Validated { chart, lo, hi, profile, gamma, c, eps })
    }

    /// SHA-256 over the semantic content: rationals, laws and polynomials in
    /// canonical form, variable names and output location excluded.
    pub fn hash(&self) -> CliResult<String> {
        let v = self.validate()?;
        let mut canon = self.clone();
        canon.run.out = None;
        canon.run.budget_ms = None;
        canon.manifold.name = None;
        canon.manifold.variables = (0..v.chart.d).map(|i| format!("x{i}")).collect();
        canon.manifold.components = v.chart.components.iter().map(|p| p.to_string_with("x")).collect();
        canon.manifold.lo = v.lo.iter().map(format_rational).collect();
        canon.manifold.hi = v.hi.iter().map(format_rational).collect();
        if let Some(p) = &v.profile {
            canon.profile.psi = p.psi.iter().map(PowerLaw::render).collect();
            canon.profile.phi = p.phi.iter().map(PowerLaw::render).collect();
        }
        let norm = |s: &String| parse_rational(s).map(|r| format_rational(&r)).unwrap_or_else(|_| s.clone());
        if let Some(c) = &mut canon.count {
            c.gamma = norm(&c.gamma);
            c.c = c.c.iter().map(norm).collect();
        }
        if let Some(t) = &mut canon.tailor {
            for f in [&mut t.delta0, &mut t.delta_min, &mut t.delta_max, &mut t.c_f] {
                *f = norm(f);
            }
        }
        if let Some(m) = &mut canon.measure {
            m.eps = m.eps.iter().map(norm).collect();
        }
        if let Some(g) = &mut canon.goodness {
            for f in [&mut g.slack, &mut g.eps_lo, &mut g.eps_hi] {
                *f = norm(f);
            }
        }
        let bytes = serde_json::to_vec(&canon).map_err(|e| CliError::Internal(format!("config hash: {e}")))?;
        Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
    }
}
