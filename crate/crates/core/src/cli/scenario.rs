//! Scenario documents. Positions and lengths are in units of `1/k`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::algebra::{group_element, psi0, ThreeVector};
use crate::berry::cyclic_initial_state;
use crate::envelope::{Descriptor, EnvelopeState, PotentialProfile, DEFAULT_STEP_KX, DEFAULT_SVEA_LIMIT};
use crate::gauge::GaugeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Propagate,
    Bloch,
    Classify,
    Gauge,
    Berry,
    Validate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    /// Constant `(ε₁, ε₂, ε₃)`; excludes the per-component descriptors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps0: Option<Descriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsc: Option<Descriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epss: Option<Descriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svea_limit: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaySpec {
    pub mu: f64,
    pub nu: f64,
    #[serde(default)]
    pub phi0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// `(A, B)`.
    Real([f64; 2]),
    /// `[[Re α, Im α], [Re β, Im β]]`.
    Complex([[f64; 2]; 2]),
    /// `exp(−iφ₀/2)·g(μ, ν, 0)ψ₀`.
    Ray(RaySpec),
    /// Monodromy eigenvector with `s₀ = 1`.
    Cyclic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default = "unit")]
    pub k: f64,
    pub profile: ProfileSpec,
    pub initial: InitialSpec,
    #[serde(default)]
    pub start: f64,
    pub length: f64,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_analyses")]
    pub analyses: Vec<Analysis>,
    /// Also propagate the sign-reversed modulation `−ε` from the same state.
    #[serde(default)]
    pub negated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<GaugeMap>,
    /// Output file stem; defaults to `name`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

fn unit() -> f64 {
    1.0
}

fn default_step() -> f64 {
    DEFAULT_STEP_KX
}

fn default_analyses() -> Vec<Analysis> {
    vec![Analysis::Propagate]
}

/// Parses one scenario or a batch (JSON array) and validates each.
pub fn parse_scenarios(text: &str, source: &str) -> Result<Vec<Scenario>, CliError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::parse(source, &e))?;
    // parse again from text so serde reports positions in the document
    let list = if value.is_array() {
        serde_json::from_str::<Vec<Scenario>>(text).map_err(|e| CliError::parse(source, &e))?
    } else {
        vec![serde_json::from_str::<Scenario>(text).map_err(|e| CliError::parse(source, &e))?]
    };
    if list.is_empty() {
        return Err(CliError::Invalid(format!("{source}: batch is empty")));
    }
    for s in &list {
        s.validate()?;
    }
    Ok(list)
}

/// Parses a single scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, CliError> {
    let mut v = parse_scenarios(text, "<scenario>")?;
    if v.len() != 1 {
        return Err(CliError::Invalid(format!("expected one scenario, found {}", v.len())));
    }
    Ok(v.remove(0))
}

impl Scenario {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Invalid(format!("scenario `{}`: {m}", self.name)));
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return bad("name must be a non-empty file stem".into());
        }
        if let Some(o) = &self.output {
            if o.is_empty() || o.contains(['/', '\\']) {
                return bad("output must be a non-empty file stem".into());
            }
        }
        if !(self.k > 0.0) || !self.k.is_finite() {
            return bad(format!("k must be positive, got {}", self.k));
        }
        if !(self.length > 0.0) || !self.length.is_finite() {
            return bad(format!("length must be positive, got {}", self.length));
        }
        if !(self.step > 0.0) || !self.step.is_finite() {
            return bad(format!("step must be positive, got {}", self.step));
        }
        if self.analyses.contains(&Analysis::Gauge) && self.gauge.is_none() {
            return bad("analysis `gauge` needs a `gauge` map".into());
        }
        let p = &self.profile;
        if p.epsilon.is_some() && (p.eps0.is_some() || p.epsc.is_some() || p.epss.is_some()) {
            return bad("profile: `epsilon` excludes `eps0`/`epsc`/`epss`".into());
        }
        if let Some(g) = &self.gauge {
            g.validate().or_else(|e| bad(e.to_string()))?;
        }
        self.profile().map(|_| ()).or_else(|e| bad(e.to_string()))
    }

    pub fn stem(&self) -> &str {
        self.output.as_deref().unwrap_or(&self.name)
    }

    /// Physical-unit profile.
    pub fn profile(&self) -> crate::Result<PotentialProfile> {
        let p = &self.profile;
        let unit = 1.0 / self.k;
        let conv = |d: &Option<Descriptor>| d.as_ref().map_or(Descriptor::zero(), |d| d.with_length_unit(unit));
        let prof = match p.epsilon {
            Some(e) => PotentialProfile::constant(self.k, ThreeVector::new(e[0], e[1], e[2]))?,
            None => PotentialProfile::new(self.k, conv(&p.eps0), conv(&p.epsc), conv(&p.epss))?,
        };
        Ok(prof.with_svea_limit(p.svea_limit.unwrap_or(DEFAULT_SVEA_LIMIT)))
    }

    pub fn gauge_map(&self) -> Option<GaugeMap> {
        self.gauge.as_ref().map(|g| g.with_length_unit(1.0 / self.k))
    }

    pub fn x_start(&self) -> f64 {
        self.start / self.k
    }

    pub fn x_end(&self) -> f64 {
        (self.start + self.length) / self.k
    }

    pub fn step_length(&self) -> f64 {
        self.step / self.k
    }

    pub fn initial_state(&self, profile: &PotentialProfile) -> crate::Result<EnvelopeState> {
        let x0 = self.x_start();
        Ok(match self.initial {
            InitialSpec::Real([a, b]) => EnvelopeState::real(x0, a, b),
            InitialSpec::Complex([a, b]) => {
                EnvelopeState::new(x0, Complex64::new(a[0], a[1]), Complex64::new(b[0], b[1]))
            }
            InitialSpec::Ray(r) => {
                let v = group_element(r.mu, r.nu, r.phi0).apply(psi0());
                EnvelopeState::from_vec(x0, v)
            }
            InitialSpec::Cyclic => {
                cyclic_initial_state(profile, x0, self.x_end() - x0, self.step_length())?
            }
        })
    }
}
