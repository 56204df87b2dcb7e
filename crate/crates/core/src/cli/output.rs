//! CSV tables and the JSON summary.

use std::fmt::Write as _;

use serde::Serialize;

use crate::bloch::{bloch_of, BlochState};
use crate::envelope::{EnvelopeState, Trajectory};
use crate::algebra::ThreeVector;

pub const TRAJECTORY_HEADER: &str = "x,re_alpha,im_alpha,re_beta,im_beta,s0,s1,s2,s3";

/// Trajectory table; positions in units of `1/k`.
pub fn trajectory_csv(traj: &Trajectory, k: f64) -> String {
    let mut out = String::with_capacity(traj.len() * 160);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for s in &traj.samples {
        let b = bloch_of(s);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            s.x * k,
            s.alpha.re,
            s.alpha.im,
            s.beta.re,
            s.beta.im,
            b.s0,
            b.s1,
            b.s2,
            b.s3
        );
    }
    out
}

pub fn bloch_csv(path: &[(f64, BlochState)], k: f64) -> String {
    let mut out = String::from("x,s0,s1,s2,s3\n");
    for (x, s) in path {
        let _ = writeln!(out, "{},{},{},{},{}", x * k, s.s0, s.s1, s.s2, s.s3);
    }
    out
}

pub fn cone_csv(rows: &[(f64, ThreeVector)], k: f64) -> String {
    let mut out = String::from("x,sbar1,sbar2,sbar3\n");
    for (x, v) in rows {
        let _ = writeln!(out, "{},{},{},{}", x * k, v.v1, v.v2, v.v3);
    }
    out
}

/// `(x, Ψ from the envelope, Ψ from the oracle, full ε)`.
pub fn wave_csv(rows: &[[f64; 4]], k: f64) -> String {
    let mut out = String::from("x,psi_envelope,psi_oracle,epsilon\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r[0] * k, r[1], r[2], r[3]);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct Phases {
    pub total: f64,
    pub dynamical: f64,
    pub geometric: f64,
    pub residual: f64,
    pub closure_error: f64,
    pub eigenphase: f64,
    pub winding: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sector: Option<i32>,
    pub convention: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub class: &'static str,
    pub band: &'static str,
    pub discriminant: f64,
    pub degenerate: bool,
    /// Whether the modulation is the same everywhere.
    pub uniform: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Validation {
    pub rms: f64,
    pub max: f64,
    pub bloch: f64,
    pub growth_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_growth_rate: Option<f64>,
    pub wronskian_drift: f64,
    pub oracle_step: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlochSummary {
    /// Largest `|s·̃s + s₀²|/s₃²` along the trajectory.
    pub invariant_residual: f64,
    pub s0_drift: f64,
    /// Largest distance between the envelope's Bloch vector and the directly
    /// integrated one, relative to the largest `s₃`.
    pub picture_discrepancy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winding: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holonomy_sign: Option<i32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GaugeSummary {
    pub commuting_square: f64,
    pub guard_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flux_length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flux_sign: Option<i32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Endpoint {
    pub x: f64,
    pub re_alpha: f64,
    pub im_alpha: f64,
    pub re_beta: f64,
    pub im_beta: f64,
    pub s: [f64; 4],
}

impl Endpoint {
    pub fn new(s: &EnvelopeState, k: f64) -> Self {
        let b = bloch_of(s);
        Self {
            x: s.x * k,
            re_alpha: s.alpha.re,
            im_alpha: s.alpha.im,
            re_beta: s.beta.re,
            im_beta: s.beta.im,
            s: [b.s0, b.s1, b.s2, b.s3],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub k: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phases: Option<Phases>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<Validation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bloch: Option<BlochSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauge: Option<GaugeSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<Endpoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negated_endpoint: Option<Endpoint>,
    pub warnings: Vec<String>,
}

impl Summary {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }
}
