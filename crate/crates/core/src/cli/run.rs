use std::fs;
use std::path::{Path, PathBuf};

use super::output::{
    bloch_csv, cone_csv, trajectory_csv, wave_csv, BlochSummary, Classification, Endpoint, GaugeSummary, Phases,
    Summary, Validation,
};
use super::scenario::{Analysis, Scenario};
use super::CliError;
use crate::berry::analyze_trajectory;
use crate::bloch::{bloch_of, classify, cone_map, holonomy_sign, propagate_bloch, winding_number, BlochState, ConicKind};
use crate::algebra::ThreeVector;
use crate::envelope::{propagate, Descriptor, Medium, PotentialProfile, Trajectory};
use crate::error::Error;
use crate::gauge::{gauge_flux, guard_ratio, transform_envelope, transform_potential, GaugeApproximation};
use crate::oracle;

const PHASE_CONVENTION: &str = "doubled units: total = 2 arg(lambda) lifted along the trajectory, \
dynamical = -2k integral <phi|N|psi>/<phi|psi>, geometric = loop integral of (s3 - 1) dmu with \
counterclockwise (s1, s2) circulation positive; winding counts turns in the precession sense of positive eps3";

const GUARD_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: PathBuf,
    /// Overrides the scenario step (units of `1/k`).
    pub step: Option<f64>,
    /// Reserved for randomized suites; physics is deterministic.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub scenario: String,
    pub files: Vec<PathBuf>,
    pub summary: Summary,
}

/// Runs the scenarios concurrently; results come back in input order.
pub fn run_batch(list: &[Scenario], opts: &RunOptions) -> Vec<Result<RunOutcome, CliError>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = list.iter().map(|s| scope.spawn(move || run_scenario(s, opts))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(CliError::Invalid("scenario worker panicked".into()))))
            .collect()
    })
}

struct Writer<'a> {
    dir: &'a Path,
    stem: &'a str,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn write(&mut self, suffix: &str, body: &str) -> Result<(), CliError> {
        let path = self.dir.join(format!("{}_{suffix}", self.stem));
        fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        self.files.push(path);
        Ok(())
    }
}

pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> Result<RunOutcome, CliError> {
    let mut s = s.clone();
    if let Some(step) = opts.step {
        s.step = step;
    }
    s.validate()?;
    fs::create_dir_all(&opts.out).map_err(|e| CliError::io(&opts.out, e))?;
    let phys = |source: Error| CliError::Physics { scenario: s.name.clone(), source };
    let k = s.k;
    let profile = s.profile().map_err(phys)?;
    let state = s.initial_state(&profile).map_err(phys)?;
    let traj = propagate(&state, &profile, s.x_end(), s.step_length()).map_err(phys)?;

    let mut w = Writer { dir: &opts.out, stem: s.stem(), files: Vec::new() };
    let mut summary = Summary {
        scenario: s.name.clone(),
        k,
        phases: None,
        classification: None,
        validation: None,
        bloch: None,
        gauge: None,
        endpoint: Some(Endpoint::new(traj.last(), k)),
        negated_endpoint: None,
        warnings: traj.warnings(),
    };
    w.write("trajectory.csv", &trajectory_csv(&traj, k))?;

    let negated = if s.negated {
        let neg = profile.scaled(-1.0);
        let t = propagate(&state, &neg, s.x_end(), s.step_length()).map_err(phys)?;
        w.write("negated_trajectory.csv", &trajectory_csv(&t, k))?;
        summary.negated_endpoint = Some(Endpoint::new(t.last(), k));
        Some((neg, t))
    } else {
        None
    };

    for analysis in &s.analyses {
        match analysis {
            Analysis::Propagate => {}
            Analysis::Bloch => {
                let (b, cone) = bloch_analysis(&traj, &profile, &mut summary.warnings).map_err(phys)?;
                w.write("bloch.csv", &bloch_csv(&b.1, k))?;
                if let Some(rows) = cone {
                    w.write("cone.csv", &cone_csv(&rows, k))?;
                }
                summary.bloch = Some(b.0);
            }
            Analysis::Classify => {
                let c = classify(profile.epsilon_vector(s.x_start()).map_err(phys)?);
                summary.classification = Some(Classification {
                    class: c.kind.name(),
                    band: c.kind.band(),
                    discriminant: c.discriminant,
                    degenerate: c.degenerate,
                    uniform: is_uniform(&profile),
                });
            }
            Analysis::Validate => {
                let step = oracle::default_step(k);
                let report = oracle::compare(&traj, &profile, step).map_err(phys)?;
                w.write("wave.csv", &wave_csv(&wave_rows(&traj, &profile, step).map_err(phys)?, k))?;
                if let Some((neg, t)) = &negated {
                    w.write("negated_wave.csv", &wave_csv(&wave_rows(t, neg, step).map_err(phys)?, k))?;
                }
                let c = classify(profile.epsilon_vector(s.x_start()).map_err(phys)?);
                let expected = (is_uniform(&profile) && c.kind == ConicKind::Hyperbolic).then(|| c.growth_rate(k));
                summary.validation = Some(Validation {
                    rms: report.rms,
                    max: report.max,
                    bloch: report.bloch,
                    growth_rate: report.growth_rate,
                    expected_growth_rate: expected,
                    wronskian_drift: report.wronskian_drift,
                    oracle_step: step * k,
                });
            }
            Analysis::Berry => {
                let b = analyze_trajectory(&profile, &traj).map_err(phys)?;
                summary.phases = Some(Phases {
                    total: b.total,
                    dynamical: b.dynamical,
                    geometric: b.geometric,
                    residual: b.residual,
                    closure_error: b.closure_error,
                    eigenphase: b.eigenphase,
                    winding: b.winding,
                    sector: b.sector(),
                    convention: PHASE_CONVENTION,
                });
            }
            Analysis::Gauge => {
                let map = s.gauge_map().expect("validated");
                let (x0, x1) = (s.x_start(), s.x_end());
                let primed = transform_potential(&profile, &map, GaugeApproximation::Exact).map_err(phys)?;
                let s0 = transform_envelope(&state, map.xi(x0), k, map.forward(x0));
                let t = propagate(&s0, &primed, map.forward(x1), s.step_length()).map_err(phys)?;
                let back = transform_envelope(t.last(), -map.xi(x1), k, x1);
                let d = traj.last();
                let scale = d.norm().max(f64::MIN_POSITIVE);
                let square = (back.alpha - d.alpha).norm().max((back.beta - d.beta).norm()) / scale;
                let ratio = guard_ratio(&profile, &map, x0, x1).map_err(phys)?;
                if ratio > GUARD_THRESHOLD {
                    summary.warnings.push(format!(
                        "gauge deviation outside small-xi regime: ratio {ratio:.3e} > {GUARD_THRESHOLD}"
                    ));
                }
                let flux = match gauge_flux(&map, x0, x1, k) {
                    Ok(f) => Some(f),
                    Err(Error::NotPlateau { x, .. }) => {
                        summary.warnings.push(format!("gauge flux skipped: no plateau at x = {}", x * k));
                        None
                    }
                    Err(e) => return Err(phys(e)),
                };
                summary.gauge = Some(GaugeSummary {
                    commuting_square: square,
                    guard_ratio: ratio,
                    flux_length: flux.map(|f| f.length * k),
                    flux_sign: flux.and_then(|f| f.sign()),
                });
            }
        }
    }

    w.write("summary.json", &summary.to_json())?;
    Ok(RunOutcome { scenario: s.name.clone(), files: w.files, summary })
}

fn is_uniform(p: &PotentialProfile) -> bool {
    [&p.eps0, &p.epsc, &p.epss].iter().all(|d| matches!(d, Descriptor::Constant(_)))
}

type BlochRows = (BlochSummary, Vec<(f64, BlochState)>);
type ConeRows = Vec<(f64, ThreeVector)>;

fn bloch_analysis(
    traj: &Trajectory,
    profile: &PotentialProfile,
    warnings: &mut Vec<String>,
) -> crate::Result<(BlochRows, Option<ConeRows>)> {
    let first = traj.first();
    let s_start = bloch_of(first);
    let direct = propagate_bloch(s_start, profile, first.x, traj.last().x, traj.step)?;
    let from_env: Vec<BlochState> = traj.samples.iter().map(bloch_of).collect();
    let s3max = from_env.iter().map(|b| b.s3).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let picture = from_env
        .iter()
        .zip(&direct)
        .map(|(a, (_, b))| a.distance(b))
        .fold(0.0, f64::max)
        / s3max;
    let invariant = from_env.iter().map(BlochState::relative_residual).fold(0.0, f64::max);
    let s0_drift = from_env.iter().map(|b| (b.s0 - s_start.s0).abs()).fold(0.0, f64::max);
    let winding = if from_env[0].distance(&from_env[from_env.len() - 1]) <= 1e-6 * s3max {
        winding_number(&from_env).ok()
    } else {
        None
    };
    let is_real = traj.samples.iter().all(|s| s.max_imag() == 0.0);
    let cone = if is_real {
        let rows: crate::Result<Vec<_>> = traj
            .samples
            .iter()
            .filter(|s| bloch_of(s).s3 > 0.0)
            .map(|s| Ok((s.x, cone_map(&bloch_of(s))?)))
            .collect();
        match rows {
            Ok(r) => Some(r),
            Err(e) => {
                warnings.push(format!("cone map skipped: {e}"));
                None
            }
        }
    } else {
        None
    };
    let summary = BlochSummary {
        invariant_residual: invariant,
        s0_drift,
        picture_discrepancy: picture,
        winding,
        holonomy_sign: winding.map(holonomy_sign),
    };
    Ok(((summary, direct), cone))
}

/// Oracle wave next to the envelope wave on the oracle grid.
fn wave_rows<M: Medium + ?Sized>(traj: &Trajectory, medium: &M, step: f64) -> crate::Result<Vec<[f64; 4]>> {
    let k = medium.k();
    oracle::oracle_wave(traj, medium, step)?
        .iter()
        .map(|w| {
            let (a, b) = oracle::envelope_at(traj, w.x)?;
            let (sn, cs) = (k * w.x).sin_cos();
            Ok([w.x, a * cs + b * sn, w.psi, medium.full_epsilon(w.x)?])
        })
        .collect()
}
