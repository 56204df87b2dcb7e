//! Rays on the `s₀ = 1` hyperboloid and the phases of cyclic evolutions.
//!
//! A state `ψ` with `s₀ > 0` is written `ψ = √s₀·e^{iχ}·g(μ, ν, 0)ψ₀`, where
//! `μ` is the counterclockwise azimuth of `(s₁, s₂)` and `cosh ν = s₃/s₀`.
//! For a cyclic evolution `ψ(L) = λψ(0)` the phases reported by
//! [`analyze_cycle`] are in doubled units (`2·arg λ`, the scale of the ray
//! angle of `exp(−iφJ₃)ψ₀`), in which
//!
//! ```text
//! total = dynamical + geometric,   geometric = ∮(s₃ − 1) dμ.
//! ```
//!
//! The geometric phase is positive for loops traversed counterclockwise in
//! `(s₁, s₂)`. A positive `ε₃` precesses the Bloch vector clockwise, so a
//! positive-`ε₃` orbit has a negative geometric phase and a positive winding.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::algebra::{group_element, psi0, r_matrix, Matrix2};
use crate::bloch::{bloch_from_complex, bloch_of, turn_angle, BlochState};
use crate::envelope::{monodromy, pair, propagate, EnvelopeState, Medium, Trajectory};
use crate::error::{Error, Result};

/// Default closure tolerance for loops and cyclicity checks.
pub const CLOSURE_TOLERANCE: f64 = 1e-6;

/// Phase-space label of a state up to its internal phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub s: BlochState,
    pub mu: f64,
    pub nu: f64,
}

impl Ray {
    /// Requires `s₀ = 1` and `s₃ ≥ 1`.
    pub fn from_bloch(s: &BlochState) -> Result<Self> {
        if (s.s0 - 1.0).abs() > 1e-9 {
            return Err(Error::RayNormalization { s0: s.s0 });
        }
        if s.s3 < 1.0 - 1e-9 {
            return Err(Error::BelowHyperboloid { s3: s.s3, index: 0 });
        }
        Ok(Self { s: *s, mu: azimuth(s), nu: s.s3.max(1.0).acosh() })
    }

    /// `g(μ, ν, 0)·ψ₀`.
    pub fn representative(&self) -> [Complex64; 2] {
        representative(self.mu, self.nu)
    }
}

/// Counterclockwise azimuth measured from the `−s₂` axis; 0 on the axis.
fn azimuth(s: &BlochState) -> f64 {
    if s.radius() == 0.0 {
        0.0
    } else {
        s.s1.atan2(-s.s2)
    }
}

fn representative(mu: f64, nu: f64) -> [Complex64; 2] {
    group_element(mu, nu, 0.0).apply(psi0())
}

/// The state `g(μ, ν, 0)ψ₀` whose Bloch vector is `s` (which must have `s₀ = 1`).
pub fn ray_representative(s: &BlochState) -> Result<EnvelopeState> {
    Ok(EnvelopeState::from_vec(0.0, Ray::from_bloch(s)?.representative()))
}

/// `exp(−iφJ₃)ψ₀`.
pub fn ray_phase_state(phi: f64) -> EnvelopeState {
    EnvelopeState::from_vec(0.0, group_element(0.0, 0.0, phi).apply(psi0()))
}

/// Multiplies a state by `e^{−iφ₀/2}`, the action of `exp(−iφ₀J₃)` on the
/// reference state of its ray.
pub fn shift_ray_phase(state: &EnvelopeState, phi0: f64) -> EnvelopeState {
    state.scaled(Complex64::from_polar(1.0, -0.5 * phi0))
}

/// Closed path on the `s₀ = 1` sheet.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopPath {
    samples: Vec<BlochState>,
    closure_error: f64,
}

impl LoopPath {
    pub fn new(samples: Vec<BlochState>, closure_tol: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidArgument("loop needs at least two samples".into()));
        }
        for (i, s) in samples.iter().enumerate() {
            if (s.s0 - 1.0).abs() > 1e-9 {
                return Err(Error::RayNormalization { s0: s.s0 });
            }
            if s.s3 < 1.0 - 1e-9 {
                return Err(Error::BelowHyperboloid { s3: s.s3, index: i });
            }
        }
        let gap = samples[0].distance(&samples[samples.len() - 1]);
        if gap > closure_tol {
            return Err(Error::OpenLoop { gap });
        }
        Ok(Self { samples, closure_error: gap })
    }

    /// Bloch vectors of the states, each normalized to `s₀ = 1`.
    pub fn from_states(states: &[EnvelopeState], closure_tol: f64) -> Result<Self> {
        let samples = states.iter().map(normalized_bloch).collect::<Result<Vec<_>>>()?;
        Self::new(samples, closure_tol)
    }

    /// Circle at `s₃ = cosh ν` traversed once counterclockwise, with `n`
    /// segments.
    pub fn circle(nu: f64, n: usize) -> Result<Self> {
        let (r, h) = (nu.sinh(), nu.cosh());
        let samples = (0..=n)
            .map(|i| {
                let t = TAU * (i % n) as f64 / n as f64;
                BlochState::new(1.0, r * t.cos(), r * t.sin(), h)
            })
            .collect();
        Self::new(samples, CLOSURE_TOLERANCE)
    }

    pub fn samples(&self) -> &[BlochState] {
        &self.samples
    }

    pub fn closure_error(&self) -> f64 {
        self.closure_error
    }

    pub fn reversed(&self) -> Self {
        let mut samples = self.samples.clone();
        samples.reverse();
        Self { samples, closure_error: self.closure_error }
    }

    /// Counterclockwise azimuth increments of consecutive samples. Segments
    /// touching the axis contribute nothing; their weight `s₃ − 1` vanishes.
    fn azimuth_steps(&self) -> impl Iterator<Item = (&BlochState, &BlochState, f64)> + '_ {
        self.samples.windows(2).map(|w| {
            let d = turn_angle((w[0].s1, w[0].s2), (w[1].s1, w[1].s2)).map_or(0.0, |t| -t);
            (&w[0], &w[1], d)
        })
    }

    /// `∮ G(s₃) dμ` with trapezoidal weights.
    fn line_integral(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.azimuth_steps()
            .map(|(a, b, d)| 0.5 * (g(a.s3) + g(b.s3)) * d)
            .sum()
    }

    /// Net counterclockwise turns around the `s₃` axis.
    pub fn net_azimuth(&self) -> f64 {
        self.azimuth_steps().map(|(_, _, d)| d).sum()
    }
}

fn normalized_bloch(state: &EnvelopeState) -> Result<BlochState> {
    let s = bloch_of(state);
    if !(s.s0 > 1e-12) {
        return Err(if s.s0.abs() <= 1e-12 {
            Error::DegeneratePairing { magnitude: s.s0.abs() }
        } else {
            Error::RayNormalization { s0: s.s0 }
        });
    }
    Ok(BlochState::new(1.0, s.s1 / s.s0, s.s2 / s.s0, s.s3 / s.s0))
}

/// `φ_G = ∫ s₃⁻¹ ds₁∧ds₂` over the cap bounded by the loop, as `∮(s₃ − 1)dμ`.
pub fn geometric_phase(path: &LoopPath) -> f64 {
    path.line_integral(|s3| s3 - 1.0)
}

/// Integrals of three invariant-looking two-forms over the same cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContrastForms {
    /// `s₃⁻¹ ds₁∧ds₂`
    pub phase_form: f64,
    /// `(2s₃² − 1)⁻² ds₁∧ds₂`
    pub curvature_form: f64,
    /// `(2 − s₃⁻³)^{1/2} ds₁∧ds₂`
    pub area_form: f64,
}

/// On the sheet `ds₁∧ds₂ = s₃ ds₃∧dμ`, so a form `f(s₃)ds₁∧ds₂` integrates
/// to `∮ G(s₃)dμ` with `G(s₃) = ∫₁^{s₃} f(u)u du`.
pub fn contrast_forms(path: &LoopPath) -> ContrastForms {
    ContrastForms {
        phase_form: geometric_phase(path),
        curvature_form: path.line_integral(|s3| 0.25 * (1.0 - 1.0 / (2.0 * s3 * s3 - 1.0))),
        area_form: path.line_integral(|s3| {
            simpson(|u| (2.0 - u.powi(-3)).sqrt() * u, 1.0, s3, 200)
        }),
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// `arg λ` for `Mψ = λψ`, in `(−π, π]`.
pub fn total_phase(m: &Matrix2, state: &EnvelopeState) -> Result<f64> {
    let v = state.vec();
    let nrm = state.norm_sqr();
    if nrm == 0.0 {
        return Err(Error::InvalidArgument("zero state".into()));
    }
    let mv = m.apply(v);
    let lambda = pair(v, Matrix2::identity(), mv) / nrm;
    let residual = ((mv[0] - lambda * v[0]).norm_sqr() + (mv[1] - lambda * v[1]).norm_sqr()).sqrt()
        / nrm.sqrt();
    if residual > CLOSURE_TOLERANCE {
        return Err(Error::NotCyclic { residual });
    }
    if (lambda.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidArgument(format!(
            "eigenvalue modulus {} is not 1; the evolution is not elliptic",
            lambda.norm()
        )));
    }
    Ok(lambda.arg())
}

/// `φ_D = −k∫⟨φ|N|ψ⟩/⟨φ|ψ⟩ dx` with `N = −ε·K` and `⟨φ| = ψ†R`
/// (trapezoidal rule over the trajectory samples), in units of envelope
/// phase.
pub fn dynamical_phase<M: Medium + ?Sized>(traj: &Trajectory, medium: &M) -> Result<f64> {
    Ok(dynamical_phase_complex(traj, medium)?.re)
}

pub(crate) fn dynamical_phase_complex<M: Medium + ?Sized>(traj: &Trajectory, medium: &M) -> Result<Complex64> {
    let r = r_matrix();
    let k = medium.k();
    let integrand = |s: &EnvelopeState| -> Result<Complex64> {
        let p = s.pairing();
        if p.norm() < 1e-12 {
            return Err(Error::DegeneratePairing { magnitude: p.norm() });
        }
        let n = -medium.epsilon(s.x)?.dot_generators();
        Ok(pair(s.vec(), r * n, s.vec()) / p)
    };
    let vals = traj.samples.iter().map(integrand).collect::<Result<Vec<_>>>()?;
    let integral: Complex64 = traj
        .samples
        .windows(2)
        .zip(vals.windows(2))
        .map(|(s, v)| (v[0] + v[1]) * (0.5 * (s[1].x - s[0].x)))
        .sum();
    Ok(-integral * k)
}

/// Lifted envelope phase `Φ` with `ψ(L) = e^{iΦ}ψ(0)`, following the
/// internal phase `χ` and the azimuth `μ` continuously along the samples.
fn lifted_phase(traj: &Trajectory) -> Result<(f64, f64)> {
    let r = r_matrix();
    let mut chi = 0.0;
    let mut mu = 0.0;
    let mut prev_arg: Option<f64> = None;
    let mut prev_s: Option<BlochState> = None;
    for state in &traj.samples {
        let s = normalized_bloch(state)?;
        match prev_s {
            None => mu = azimuth(&s),
            Some(p) => mu -= turn_angle((p.s1, p.s2), (s.s1, s.s2)).unwrap_or(0.0),
        }
        prev_s = Some(s);
        let u = representative(mu, s.s3.max(1.0).acosh());
        // ψ = c·u with ⟨u|u⟩ = i
        let c = pair(u, r, state.vec()) / Complex64::new(0.0, 1.0);
        let a = c.arg();
        match prev_arg {
            None => chi = a,
            Some(p) => chi += wrap(a - p),
        }
        prev_arg = Some(a);
    }
    let first = normalized_bloch(traj.first())?;
    let mu0 = azimuth(&first);
    let u0 = representative(mu0, first.s3.max(1.0).acosh());
    let chi0 = (pair(u0, r, traj.first().vec()) / Complex64::new(0.0, 1.0)).arg();
    let dmu = mu - mu0;
    Ok((chi - chi0 - 0.5 * dmu, dmu))
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Phases of one cyclic evolution, in doubled units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBreakdown {
    /// `2Φ` with `Φ` lifted along the trajectory.
    pub total: f64,
    pub dynamical: f64,
    pub geometric: f64,
    /// Normalized Bloch distance between the loop ends.
    pub closure_error: f64,
    /// `total − dynamical − geometric` wrapped to `(−π, π]`.
    pub residual: f64,
    /// Turns around the `s₃` axis in the precession sense of positive `ε₃`.
    pub winding: i64,
    /// `arg λ` of the monodromy eigenvalue.
    pub eigenphase: f64,
}

impl PhaseBreakdown {
    /// Sign `e^{iΦ}` reduces to when the evolution returns the state to
    /// itself up to sign; `None` otherwise.
    pub fn sector(&self) -> Option<i32> {
        let c = (0.5 * self.total).cos();
        let s = (0.5 * self.total).sin();
        if s.abs() > 1e-6 {
            None
        } else {
            Some(if c > 0.0 { 1 } else { -1 })
        }
    }
}

/// Propagates `state` over `[state.x, state.x + length]`, checks that the
/// ray returns, and splits the phase into dynamical and geometric parts.
pub fn analyze_cycle<M: Medium + ?Sized>(
    medium: &M,
    state: &EnvelopeState,
    length: f64,
    step: f64,
) -> Result<PhaseBreakdown> {
    let traj = propagate(state, medium, state.x + length, step)?;
    analyze_trajectory(medium, &traj)
}

/// [`analyze_cycle`] on an already propagated trajectory.
pub fn analyze_trajectory<M: Medium + ?Sized>(medium: &M, traj: &Trajectory) -> Result<PhaseBreakdown> {
    let start = normalized_bloch(traj.first())?;
    let end = normalized_bloch(traj.last())?;
    let scale = bloch_of(traj.first()).s0;
    let raw_gap = bloch_of(traj.first()).distance(&bloch_of(traj.last())) / scale;
    if raw_gap > CLOSURE_TOLERANCE {
        return Err(Error::NotCyclic { residual: raw_gap });
    }
    let m = monodromy(medium, traj.first().x, traj.last().x, traj.step)?;
    let eigenphase = total_phase(&m, traj.first())?;
    let (lifted, dmu) = lifted_phase(traj)?;
    let path = LoopPath::from_states(&traj.samples, CLOSURE_TOLERANCE.max(2.0 * raw_gap))?;
    let geometric = geometric_phase(&path);
    let dynamical = 2.0 * dynamical_phase(traj, medium)?;
    let total = 2.0 * lifted;
    let winding = (-dmu / TAU).round() as i64;
    Ok(PhaseBreakdown {
        total,
        dynamical,
        geometric,
        closure_error: start.distance(&end),
        residual: wrap(total - dynamical - geometric),
        winding,
        eigenphase,
    })
}

/// Eigenvector of the monodromy over `[x0, x0 + length]` with `s₀ = 1`,
/// which makes the evolution cyclic. `ψ₀` when the monodromy is `±I`.
pub fn cyclic_initial_state<M: Medium + ?Sized>(
    medium: &M,
    x0: f64,
    length: f64,
    step: f64,
) -> Result<EnvelopeState> {
    let m = monodromy(medium, x0, x0 + length, step)?;
    if m.max_abs_diff(&Matrix2::identity()) < 1e-9 || m.max_abs_diff(&-Matrix2::identity()) < 1e-9 {
        return Ok(EnvelopeState::from_vec(x0, psi0()));
    }
    let half = 0.5 * m.trace().re;
    if half.abs() >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "monodromy trace {} is not elliptic; no cyclic state with s0 ≠ 0",
            2.0 * half
        )));
    }
    let w = (1.0 - half * half).sqrt();
    for lambda in [Complex64::new(half, w), Complex64::new(half, -w)] {
        let v = if m.a12.norm() >= m.a21.norm() {
            [m.a12, lambda - m.a11]
        } else {
            [lambda - m.a22, m.a21]
        };
        let s = bloch_from_complex(v[0], v[1]);
        if s.s0 > 0.0 {
            let f = 1.0 / s.s0.sqrt();
            return Ok(EnvelopeState::new(x0, v[0] * f, v[1] * f));
        }
    }
    Err(Error::DegeneratePairing { magnitude: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{exp_generator, ThreeVector};
    use crate::envelope::{Descriptor, PotentialProfile};
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn representative_examples() {
        let r = ray_representative(&BlochState::new(1.0, 0.0, 0.0, 1.0)).unwrap();
        let p = psi0();
        assert!((r.alpha - p[0]).norm() < 1e-15 && (r.beta - p[1]).norm() < 1e-15);
        let s = bloch_from_complex(r.alpha, r.beta);
        assert!((s.s0 - 1.0).abs() < 1e-15);

        let g = EnvelopeState::from_vec(0.0, group_element(0.0, 1.0, 0.0).apply(psi0()));
        let s = bloch_of(&g);
        assert!((s.s3 - 1.0f64.cosh()).abs() < 1e-12);
        assert!((s.s3 - 1.5430806).abs() < 1e-7);
        assert!(matches!(
            ray_representative(&BlochState::new(2.0, 0.0, 0.0, 2.0)),
            Err(Error::RayNormalization { .. })
        ));
    }

    #[test]
    fn representative_roundtrip() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for _ in 0..200 {
            let (mu, nu, phi) = (rng.gen_range(-PI..PI), rng.gen_range(0.0..2.5), rng.gen_range(-TAU..TAU));
            let psi = group_element(mu, nu, phi).apply(psi0());
            let s = bloch_from_complex(psi[0], psi[1]);
            let rep = ray_representative(&s).unwrap();
            assert!(bloch_of(&rep).distance(&s) < 1e-9 * s.s3);
            // same ray: ψ = e^{−iφ/2}·rep
            let phase = Complex64::from_polar(1.0, -0.5 * phi);
            let ok = (psi[0] - rep.alpha * phase).norm() < 1e-9 * s.s3
                && (psi[1] - rep.beta * phase).norm() < 1e-9 * s.s3;
            assert!(ok, "mu {mu} nu {nu} phi {phi}");
        }
    }

    #[test]
    fn phase_states() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let s = ray_phase_state(0.0);
        assert!((s.alpha - c(r, 0.0)).norm() < 1e-15 && (s.beta - c(0.0, r)).norm() < 1e-15);
        let s = ray_phase_state(TAU);
        assert!((s.alpha + c(r, 0.0)).norm() < 1e-15 && (s.beta + c(0.0, r)).norm() < 1e-15);
        for phi in [PI, 0.7, -2.1] {
            let s = ray_phase_state(phi);
            let (h, q) = (0.5 * phi).sin_cos();
            // real part (cos φ/2, sin φ/2), imaginary part (−sin φ/2, cos φ/2), up to 2^{−1/2}
            assert!((s.alpha - c(q, -h) * r).norm() < 1e-15);
            assert!((s.beta - c(h, q) * r).norm() < 1e-15);
        }
    }

    #[test]
    fn total_phase_examples() {
        let p = EnvelopeState::from_vec(0.0, psi0());
        assert!((total_phase(&-Matrix2::identity(), &p).unwrap() - PI).abs() < 1e-15);
        assert_eq!(total_phase(&Matrix2::identity(), &p).unwrap(), 0.0);
        let theta = 1.1;
        let m = exp_generator(ThreeVector::new(0.0, 0.0, 1.0), -theta);
        assert!((total_phase(&m, &p).unwrap() + 0.5 * theta).abs() < 1e-14);
        let bad = EnvelopeState::real(0.0, 1.0, 0.0);
        assert!(matches!(total_phase(&m, &bad), Err(Error::NotCyclic { .. })));
    }

    #[test]
    fn total_phase_matches_propagation() {
        let (k, e0, len) = (1.0, 0.02, 120.0);
        let prof = PotentialProfile::constant(k, ThreeVector::new(0.0, 0.0, e0)).unwrap();
        let p = EnvelopeState::from_vec(0.0, psi0());
        let m = monodromy(&prof, 0.0, len, 0.01).unwrap();
        let ph = total_phase(&m, &p).unwrap();
        assert!((ph - wrap(0.5 * k * e0 * len)).abs() < 1e-9);
        let t = propagate(&p, &prof, len, 0.01).unwrap();
        assert!((t.last().alpha - p.alpha * Complex64::from_polar(1.0, ph)).norm() < 1e-9);
    }

    #[test]
    fn dynamical_phase_cases() {
        let k = 1.0;
        let free = PotentialProfile::free(k).unwrap();
        let p = EnvelopeState::new(0.0, c(0.3, 0.2), c(-0.1, 0.9));
        let t = propagate(&p, &free, 50.0, 0.05).unwrap();
        assert_eq!(dynamical_phase(&t, &free).unwrap(), 0.0);

        let e0 = 0.02;
        let prof = PotentialProfile::constant(k, ThreeVector::new(0.0, 0.0, e0)).unwrap();
        let t = propagate(&EnvelopeState::from_vec(0.0, psi0()), &prof, 77.0, 0.01).unwrap();
        assert!((dynamical_phase(&t, &prof).unwrap() - 0.5 * k * e0 * 77.0).abs() < 1e-12);

        let real = propagate(&EnvelopeState::real(0.0, 1.0, 0.0), &prof, 10.0, 0.01).unwrap();
        assert!(matches!(dynamical_phase(&real, &prof), Err(Error::DegeneratePairing { .. })));
    }

    #[test]
    fn dynamical_integrand_is_real() {
        let prof = PotentialProfile::new(
            1.0,
            Descriptor::Constant(0.02),
            Descriptor::Bump { center: 30.0, width: 40.0, height: 0.03, base: 0.0 },
            Descriptor::Constant(-0.01),
        )
        .unwrap();
        let t = propagate(&EnvelopeState::new(0.0, c(0.4, 0.5), c(-0.3, 0.8)), &prof, 60.0, 0.01).unwrap();
        let d = dynamical_phase_complex(&t, &prof).unwrap();
        assert!(d.im.abs() < 1e-8, "{d}");
    }

    #[test]
    fn pairing_is_conserved() {
        let prof = PotentialProfile::new(
            1.3,
            Descriptor::Ramp { x0: 0.0, x1: 80.0, v0: -0.03, v1: 0.04 },
            Descriptor::Constant(0.02),
            Descriptor::Bump { center: 40.0, width: 50.0, height: 0.05, base: 0.0 },
        )
        .unwrap();
        let t = propagate(&EnvelopeState::new(0.0, c(1.0, -0.2), c(0.1, 0.7)), &prof, 80.0, 0.01).unwrap();
        let p0 = t.first().pairing();
        assert!(t.samples.iter().all(|s| (s.pairing() - p0).norm() < 1e-8));
    }

    #[test]
    fn circle_geometric_phase() {
        let expected = TAU * (1.0f64.cosh() - 1.0);
        let l = LoopPath::circle(1.0, 1000).unwrap();
        assert!((geometric_phase(&l) - expected).abs() < 1e-12);
        assert!((geometric_phase(&l.reversed()) + expected).abs() < 1e-12);
        let point = LoopPath::new(vec![BlochState::new(1.0, 0.0, 0.0, 1.0); 5], 1e-6).unwrap();
        assert_eq!(geometric_phase(&point), 0.0);
    }

    #[test]
    fn loop_errors() {
        let open = vec![BlochState::new(1.0, 0.0, 0.0, 1.0), BlochState::new(1.0, 1.0, 0.0, 2f64.sqrt())];
        assert!(matches!(LoopPath::new(open, 1e-6), Err(Error::OpenLoop { .. })));
        let below = vec![BlochState::new(1.0, 0.0, 0.0, 0.5); 3];
        assert!(matches!(LoopPath::new(below, 1e-6), Err(Error::BelowHyperboloid { .. })));
    }

    #[test]
    fn contrast_form_values() {
        let f = contrast_forms(&LoopPath::circle(1.0, 1000).unwrap());
        // radial quadrature of f(s₃)·s₃ ds₃ from 1 to cosh 1
        let h = 1.0f64.cosh();
        let quad = |g: &dyn Fn(f64) -> f64| TAU * simpson(|u| g(u) * u, 1.0, h, 2000);
        assert!((f.phase_form - quad(&|u| 1.0 / u)).abs() < 1e-9);
        assert!((f.curvature_form - quad(&|u| (2.0 * u * u - 1.0).powi(-2))).abs() < 1e-9);
        assert!((f.area_form - quad(&|u| (2.0 - u.powi(-3)).sqrt())).abs() < 1e-9);
        let vals = [f.phase_form, f.curvature_form, f.area_form];
        for i in 0..3 {
            for j in i + 1..3 {
                assert!((vals[i] - vals[j]).abs() > 0.01 * vals[i].abs().max(vals[j].abs()));
            }
        }
        let tiny = contrast_forms(&LoopPath::circle(1e-4, 100).unwrap());
        assert!(tiny.phase_form.abs() < 1e-7 && tiny.curvature_form.abs() < 1e-7 && tiny.area_form.abs() < 1e-7);
    }

    /// `∫ s₃⁻¹ ds₁∧ds₂` over the region bounded by a closed curve in the
    /// `(s₁, s₂)` plane, by fan triangulation and centroid rule.
    fn triangulated(path: &LoopPath, n: usize) -> f64 {
        let f = |x: f64, y: f64| 1.0 / (1.0 + x * x + y * y).sqrt();
        let mut total = 0.0;
        for w in path.samples().windows(2) {
            let (a, b) = ((w[0].s1, w[0].s2), (w[1].s1, w[1].s2));
            let area = 0.5 * (a.0 * b.1 - a.1 * b.0);
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n - i {
                    let pt = |u: f64, v: f64| (u * a.0 + v * b.0, u * a.1 + v * b.1);
                    let h = 1.0 / n as f64;
                    let (u, v) = (i as f64 * h, j as f64 * h);
                    let c = pt(u + h / 3.0, v + h / 3.0);
                    acc += f(c.0, c.1);
                    if i + j + 1 < n {
                        let c = pt(u + 2.0 * h / 3.0, v + 2.0 * h / 3.0);
                        acc += f(c.0, c.1);
                    }
                }
            }
            total += area * acc / (n * n) as f64;
        }
        total
    }

    #[test]
    fn geometric_phase_matches_triangulation() {
        // off-axis ellipse, not enclosing the axis, and a large one that does
        for (cx, cy, rx, ry) in [(1.5, 0.3, 0.6, 0.4), (0.2, -0.1, 1.7, 1.1)] {
            let n = 400;
            let samples: Vec<BlochState> = (0..=n)
                .map(|i| {
                    let t = TAU * (i % n) as f64 / n as f64;
                    let (x, y) = (cx + rx * t.cos(), cy + ry * t.sin());
                    BlochState::new(1.0, x, y, (1.0 + x * x + y * y).sqrt())
                })
                .collect();
            let l = LoopPath::new(samples, 1e-9).unwrap();
            let g = geometric_phase(&l);
            let t = triangulated(&l, 40);
            assert!((g - t).abs() < 1e-4 * t.abs().max(1.0), "{g} vs {t}");
        }
    }

    #[test]
    fn refinement_converges() {
        let samples = |n: usize| -> LoopPath {
            let s: Vec<BlochState> = (0..=n)
                .map(|i| {
                    let t = TAU * (i % n) as f64 / n as f64;
                    let (x, y) = (0.4 + 0.9 * t.cos(), 0.7 * t.sin());
                    BlochState::new(1.0, x, y, (1.0 + x * x + y * y).sqrt())
                })
                .collect();
            LoopPath::new(s, 1e-9).unwrap()
        };
        let a = geometric_phase(&samples(4000));
        let b = geometric_phase(&samples(8000));
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn free_cycle_is_trivial() {
        let free = PotentialProfile::free(1.0).unwrap();
        let b = analyze_cycle(&free, &EnvelopeState::from_vec(0.0, psi0()), 37.0, 0.01).unwrap();
        assert_eq!((b.total, b.dynamical, b.geometric), (0.0, 0.0, 0.0));
    }

    #[test]
    fn aligned_constant_cycle() {
        let (k, e0) = (1.0, 0.05);
        let prof = PotentialProfile::constant(k, ThreeVector::new(0.0, 0.0, e0)).unwrap();
        let len = TAU / (k * e0);
        let b = analyze_cycle(&prof, &EnvelopeState::from_vec(0.0, psi0()), len, 0.01).unwrap();
        assert!((b.total - TAU).abs() < 1e-9);
        assert!((b.dynamical - TAU).abs() < 1e-9);
        assert!(b.geometric.abs() < 1e-12);
        assert!(b.residual.abs() < 1e-9);
        assert_eq!(b.sector(), Some(-1));
    }

    #[test]
    fn circular_orbit_cycle() {
        // ψ = g(0, ν₀, 0)ψ₀ circles the ε₃ axis at s₃ = cosh ν₀
        let (k, e0, nu0) = (1.0, 0.05, 0.8);
        let prof = PotentialProfile::constant(k, ThreeVector::new(0.0, 0.0, e0)).unwrap();
        let start = EnvelopeState::from_vec(0.0, group_element(0.0, nu0, 0.0).apply(psi0()));
        let b = analyze_cycle(&prof, &start, TAU / (k * e0), 0.01).unwrap();
        assert!((b.geometric + TAU * (nu0.cosh() - 1.0)).abs() < 1e-6);
        assert!((b.total + TAU).abs() < 1e-6 || (b.total - TAU).abs() < 1e-6);
        assert!(b.residual.abs() < 1e-6, "{b:?}");
        assert_eq!(b.winding, 1);
    }

    fn bumpy() -> PotentialProfile {
        PotentialProfile::new(
            1.0,
            Descriptor::Bump { center: 60.0, width: 120.0, height: 0.04, base: 0.05 },
            Descriptor::Bump { center: 40.0, width: 60.0, height: 0.02, base: 0.0 },
            Descriptor::Bump { center: 80.0, width: 60.0, height: -0.015, base: 0.0 },
        )
        .unwrap()
    }

    #[test]
    fn general_cycle_is_additive_and_phase_independent() {
        let prof = bumpy();
        let len = 120.0;
        let s = cyclic_initial_state(&prof, 0.0, len, 0.01).unwrap();
        assert!((bloch_of(&s).s0 - 1.0).abs() < 1e-12);
        let b = analyze_cycle(&prof, &s, len, 0.01).unwrap();
        assert!(b.residual.abs() < 1e-3, "{b:?}");
        assert!((wrap(0.5 * b.total) - b.eigenphase).abs() < 1e-6);
        for phi0 in [PI / 3.0, PI, 1.5 * PI] {
            let shifted = analyze_cycle(&prof, &shift_ray_phase(&s, phi0), len, 0.01).unwrap();
            assert!((shifted.total - b.total).abs() < 1e-6);
        }
    }

    #[test]
    fn reversal_negates_phases() {
        let prof = bumpy();
        let len = 120.0;
        let s = cyclic_initial_state(&prof, 0.0, len, 0.01).unwrap();
        let fwd = analyze_cycle(&prof, &s, len, 0.01).unwrap();
        let end = *propagate(&s, &prof, len, 0.01).unwrap().last();
        let rev = prof.reversed(0.0, len);
        let back = analyze_cycle(&rev, &EnvelopeState::new(0.0, end.alpha, end.beta), len, 0.01).unwrap();
        assert!((back.geometric + fwd.geometric).abs() < 1e-6);
        assert!((back.total + fwd.total).abs() < 1e-6);
    }

    #[test]
    fn non_cyclic_is_rejected() {
        let prof = bumpy();
        let r = analyze_cycle(&prof, &EnvelopeState::from_vec(0.0, psi0()), 120.0, 0.01);
        assert!(matches!(r, Err(Error::NotCyclic { .. })));
    }
}
