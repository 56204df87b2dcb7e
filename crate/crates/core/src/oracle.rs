//! Reference solutions of the full wave equation `Ψ″ + k²(1 + ε(x))Ψ = 0`,
//! synthesis of waves from envelopes and lock-in style demodulation back to
//! envelopes.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::bloch::bloch_from_real;
use crate::envelope::{rhs, EnvelopeState, Medium, Trajectory};
use crate::error::{Error, Result};
use crate::ode;

/// Default oracle resolution in points per carrier wavelength.
pub const POINTS_PER_WAVELENGTH: f64 = 400.0;

/// Coarsest step accepted by [`helmholtz_solve`], in points per wavelength.
pub const MIN_POINTS_PER_WAVELENGTH: f64 = 40.0;

pub fn default_step(k: f64) -> f64 {
    TAU / (POINTS_PER_WAVELENGTH * k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveSample {
    pub x: f64,
    pub psi: f64,
    pub dpsi: f64,
}

/// Demodulated envelope pair at one position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeSample {
    pub x: f64,
    pub a: f64,
    pub b: f64,
}

impl EnvelopeSample {
    pub fn amplitude(&self) -> f64 {
        self.a.hypot(self.b)
    }
}

pub fn full_epsilon<M: Medium + ?Sized>(medium: &M, x: f64) -> Result<f64> {
    medium.full_epsilon(x)
}

/// Integrates the wave equation from `(x0, Ψ, Ψ′)` to `x_end`.
pub fn helmholtz_solve<M: Medium + ?Sized>(
    medium: &M,
    x0: f64,
    psi0: f64,
    dpsi0: f64,
    x_end: f64,
    step: f64,
) -> Result<Vec<WaveSample>> {
    let k = medium.k();
    if step > TAU / (MIN_POINTS_PER_WAVELENGTH * k) * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "oracle step {step} resolves fewer than {MIN_POINTS_PER_WAVELENGTH} points per wavelength"
        )));
    }
    let xs = ode::grid(x0, x_end, step)?;
    let k2 = k * k;
    let f = |x: f64, y: &[f64; 2]| -> Result<[f64; 2]> {
        Ok([y[1], -k2 * (1.0 + medium.full_epsilon(x)?) * y[0]])
    };
    let ys = ode::integrate(f, &xs, [psi0, dpsi0])?;
    Ok(xs
        .into_iter()
        .zip(ys)
        .map(|(x, y)| WaveSample { x, psi: y[0], dpsi: y[1] })
        .collect())
}

/// Largest relative change of the Wronskian of the solutions seeded with
/// `(1, 0)` and `(0, k)`.
pub fn wronskian_drift<M: Medium + ?Sized>(medium: &M, x0: f64, x_end: f64, step: f64) -> Result<f64> {
    let u = helmholtz_solve(medium, x0, 1.0, 0.0, x_end, step)?;
    let v = helmholtz_solve(medium, x0, 0.0, medium.k(), x_end, step)?;
    let w = |a: &WaveSample, b: &WaveSample| a.psi * b.dpsi - b.psi * a.dpsi;
    let w0 = w(&u[0], &v[0]);
    Ok(u.iter()
        .zip(&v)
        .map(|(a, b)| ((w(a, b) - w0) / w0).abs())
        .fold(0.0, f64::max))
}

/// `Ψ = A cos kx + B sin kx` at the trajectory positions, with
/// `Ψ′ = (A′ + kB) cos kx + (B′ − kA) sin kx` including the envelope
/// derivatives. Uses the real parts of `(α, β)`.
pub fn synthesize<M: Medium + ?Sized>(traj: &Trajectory, medium: &M) -> Result<Vec<WaveSample>> {
    traj.samples.iter().map(|s| synthesize_state(s, medium)).collect()
}

fn synthesize_state<M: Medium + ?Sized>(s: &EnvelopeState, medium: &M) -> Result<WaveSample> {
    let k = medium.k();
    let (da, db) = rhs(s, medium)?;
    let (a, b) = (s.alpha.re, s.beta.re);
    let (sn, cs) = (k * s.x).sin_cos();
    Ok(WaveSample {
        x: s.x,
        psi: a * cs + b * sn,
        dpsi: (da.re + k * b) * cs + (db.re - k * a) * sn,
    })
}

/// `A = 2⟨Ψ cos kx⟩`, `B = 2⟨Ψ sin kx⟩` with `⟨·⟩` the moving average over
/// one carrier period. The running integrals use the endpoint-corrected
/// trapezoid rule and cubic Hermite interpolation, so the window need not
/// contain an integer number of samples. Half a window is trimmed at each end.
pub fn demodulate(wave: &[WaveSample], k: f64) -> Result<Vec<EnvelopeSample>> {
    let period = TAU / k;
    let n = wave.len();
    if n < 2 || wave[n - 1].x - wave[0].x < 2.0 * period {
        return Err(Error::RecordTooShort(format!(
            "need at least two carrier periods ({}), got {}",
            2.0 * period,
            if n < 2 { 0.0 } else { wave[n - 1].x - wave[0].x }
        )));
    }
    let coarsest = wave.windows(2).map(|w| w[1].x - w[0].x).fold(0.0, f64::max);
    if coarsest > period / MIN_POINTS_PER_WAVELENGTH * (1.0 + 1e-9) {
        return Err(Error::InvalidArgument(format!(
            "record resolves fewer than {MIN_POINTS_PER_WAVELENGTH} points per wavelength"
        )));
    }
    // integrands and their derivatives
    let parts: Vec<[f64; 4]> = wave
        .iter()
        .map(|w| {
            let (s, c) = (k * w.x).sin_cos();
            [
                w.psi * c,
                w.dpsi * c - k * w.psi * s,
                w.psi * s,
                w.dpsi * s + k * w.psi * c,
            ]
        })
        .collect();
    let mut cum = vec![[0.0f64; 2]; n];
    for i in 1..n {
        let h = wave[i].x - wave[i - 1].x;
        for (j, o) in [(0usize, 0usize), (1, 2)] {
            let (f0, d0, f1, d1) = (parts[i - 1][o], parts[i - 1][o + 1], parts[i][o], parts[i][o + 1]);
            cum[i][j] = cum[i - 1][j] + 0.5 * h * (f0 + f1) - h * h / 12.0 * (d1 - d0);
        }
    }
    let at = |x: f64| -> [f64; 2] {
        let i = wave.partition_point(|w| w.x <= x).clamp(1, n - 1) - 1;
        let (x0, x1) = (wave[i].x, wave[i + 1].x);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (h00, h10, h01, h11) = (
            2.0 * t * t * t - 3.0 * t * t + 1.0,
            t * t * t - 2.0 * t * t + t,
            -2.0 * t * t * t + 3.0 * t * t,
            t * t * t - t * t,
        );
        let mut out = [0.0; 2];
        for (j, o) in [(0usize, 0usize), (1, 2)] {
            out[j] = h00 * cum[i][j] + h10 * h * parts[i][o] + h01 * cum[i + 1][j] + h11 * h * parts[i + 1][o];
        }
        out
    };
    let (lo, hi) = (wave[0].x + 0.5 * period, wave[n - 1].x - 0.5 * period);
    Ok(wave
        .iter()
        .filter(|w| w.x >= lo && w.x <= hi)
        .map(|w| {
            let (l, r) = (at(w.x - 0.5 * period), at(w.x + 0.5 * period));
            EnvelopeSample { x: w.x, a: 2.0 * (r[0] - l[0]) / period, b: 2.0 * (r[1] - l[1]) / period }
        })
        .collect())
}

/// Initial data `(Ψ, Ψ′)` matching the first trajectory sample.
pub fn seed<M: Medium + ?Sized>(traj: &Trajectory, medium: &M) -> Result<(f64, f64)> {
    let w = synthesize_state(traj.first(), medium)?;
    Ok((w.psi, w.dpsi))
}

/// Oracle wave seeded from the trajectory's initial envelope.
pub fn oracle_wave<M: Medium + ?Sized>(traj: &Trajectory, medium: &M, step: f64) -> Result<Vec<WaveSample>> {
    let (p, d) = seed(traj, medium)?;
    helmholtz_solve(medium, traj.first().x, p, d, traj.last().x, step)
}

/// Linear interpolation of the real envelope of a trajectory.
pub fn envelope_at(traj: &Trajectory, x: f64) -> Result<(f64, f64)> {
    let s = &traj.samples;
    let (lo, hi) = (s[0].x, s[s.len() - 1].x);
    if !(x >= lo && x <= hi) {
        return Err(Error::OutOfDomain { x, lo, hi });
    }
    let i = s.partition_point(|p| p.x <= x).clamp(1, s.len() - 1) - 1;
    let t = (x - s[i].x) / (s[i + 1].x - s[i].x);
    let lerp = |a: f64, b: f64| a + t * (b - a);
    Ok((lerp(s[i].alpha.re, s[i + 1].alpha.re), lerp(s[i].beta.re, s[i + 1].beta.re)))
}

/// Envelope-versus-oracle discrepancies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorReport {
    /// RMS of `|(A, B)_env − (A, B)_oracle|` over the demodulated record,
    /// relative to the largest oracle amplitude.
    pub rms: f64,
    pub max: f64,
    /// Largest Bloch-vector distance relative to the largest `s₃`.
    pub bloch: f64,
    /// Slope of `ln|(A, B)|` of the demodulated oracle over the second half
    /// of the record.
    pub growth_rate: f64,
    pub wronskian_drift: f64,
    pub samples: usize,
}

/// Compares a real trajectory against the oracle started from the same
/// initial data.
pub fn compare<M: Medium + ?Sized>(traj: &Trajectory, medium: &M, step: f64) -> Result<ErrorReport> {
    let wave = oracle_wave(traj, medium, step)?;
    let demod = demodulate(&wave, medium.k())?;
    let amp = demod.iter().map(EnvelopeSample::amplitude).fold(0.0, f64::max);
    let s3max = demod.iter().map(|d| d.a * d.a + d.b * d.b).fold(0.0, f64::max);
    let (mut sq, mut mx, mut bl) = (0.0, 0.0f64, 0.0f64);
    for d in &demod {
        let (a, b) = envelope_at(traj, d.x)?;
        let e = (a - d.a).hypot(b - d.b);
        sq += e * e;
        mx = mx.max(e);
        bl = bl.max(bloch_from_real(a, b).distance(&bloch_from_real(d.a, d.b)));
    }
    let nrm = if amp > 0.0 { amp } else { 1.0 };
    Ok(ErrorReport {
        rms: (sq / demod.len() as f64).sqrt() / nrm,
        max: mx / nrm,
        bloch: bl / if s3max > 0.0 { s3max } else { 1.0 },
        growth_rate: growth_rate(&demod),
        wronskian_drift: wronskian_drift(medium, traj.first().x, traj.last().x, step)?,
        samples: demod.len(),
    })
}

/// Least-squares slope of `ln|(A, B)|` over the second half of the record.
pub fn growth_rate(demod: &[EnvelopeSample]) -> f64 {
    let tail = &demod[demod.len() / 2..];
    let pts: Vec<(f64, f64)> = tail
        .iter()
        .filter(|d| d.amplitude() > 0.0)
        .map(|d| (d.x, d.amplitude().ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// The same wave described from a carrier origin moved by `shift`:
/// sample `i` of the result sits at `x_i − shift`.
pub fn translate(wave: &[WaveSample], shift: f64) -> Vec<WaveSample> {
    wave.iter().map(|w| WaveSample { x: w.x - shift, ..*w }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ThreeVector;
    use crate::envelope::{propagate, Descriptor, PotentialProfile};
    use std::f64::consts::PI;

    fn fig4(k: f64) -> PotentialProfile {
        PotentialProfile::constant(k, ThreeVector::new(-2.0, 1.0, 3.0) * (PI / 400.0)).unwrap()
    }

    #[test]
    fn full_epsilon_examples() {
        let k = 1.0;
        let p = PotentialProfile::constant(k, ThreeVector::new(0.0, 0.0, 0.01)).unwrap();
        assert_eq!(full_epsilon(&p, 3.7).unwrap(), 0.01);
        let p = PotentialProfile::constant(k, ThreeVector::new(0.0, 0.01, 0.0)).unwrap();
        assert_eq!(full_epsilon(&p, 0.0).unwrap(), 0.02);
        let f = fig4(k);
        let e = f.epsilon_vector(0.0).unwrap();
        let v = full_epsilon(&f, PI / (4.0 * k)).unwrap();
        assert!((v - (e.v3 - 2.0 * e.v1)).abs() < 1e-15);
    }

    #[test]
    fn free_space_cosine() {
        let k = 1.0;
        let free = PotentialProfile::free(k).unwrap();
        let w = helmholtz_solve(&free, 0.0, 1.0, 0.0, 100.0 * TAU / k, default_step(k)).unwrap();
        let err = w.iter().map(|s| (s.psi - (k * s.x).cos()).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn constant_index() {
        let (k, e0) = (2.0, 0.05);
        let p = PotentialProfile::constant(k, ThreeVector::new(0.0, 0.0, e0)).unwrap();
        let w = helmholtz_solve(&p, 0.0, 1.0, 0.0, 30.0, default_step(k)).unwrap();
        let q = k * (1.0 + e0).sqrt();
        let err = w.iter().map(|s| (s.psi - (q * s.x).cos()).abs()).fold(0.0, f64::max);
        assert!(err < 1e-7, "{err}");
    }

    #[test]
    fn coarse_step_rejected() {
        let p = PotentialProfile::free(1.0).unwrap();
        assert!(helmholtz_solve(&p, 0.0, 1.0, 0.0, 10.0, TAU / 30.0).is_err());
    }

    #[test]
    fn wronskian_is_conserved() {
        let p = PotentialProfile::new(
            1.0,
            Descriptor::Constant(0.02),
            Descriptor::Bump { center: 50.0, width: 60.0, height: 0.03, base: 0.0 },
            Descriptor::zero(),
        )
        .unwrap();
        assert!(wronskian_drift(&p, 0.0, 100.0, default_step(1.0)).unwrap() < 1e-6);
    }

    #[test]
    fn synthesize_constant_envelopes() {
        let k = 1.0;
        let free = PotentialProfile::free(k).unwrap();
        for (a, b) in [(1.0, 0.0), (0.0, 1.0)] {
            let t = propagate(&EnvelopeState::real(0.0, a, b), &free, 20.0, 0.01).unwrap();
            let w = synthesize(&t, &free).unwrap();
            for s in &w {
                let expect = a * (k * s.x).cos() + b * (k * s.x).sin();
                assert!((s.psi - expect).abs() < 1e-14);
            }
        }
    }

    fn sampled(k: f64, f: impl Fn(f64) -> (f64, f64), periods: f64) -> Vec<WaveSample> {
        let h = TAU / (137.0 * k);
        let n = (periods * TAU / k / h) as usize;
        (0..=n)
            .map(|i| {
                let x = i as f64 * h;
                let (p, d) = f(x);
                WaveSample { x, psi: p, dpsi: d }
            })
            .collect()
    }

    #[test]
    fn demodulate_pure_tones() {
        let k = 1.3;
        let w = sampled(k, |x| ((k * x).cos(), -k * (k * x).sin()), 5.0);
        for d in demodulate(&w, k).unwrap() {
            assert!((d.a - 1.0).abs() < 1e-6 && d.b.abs() < 1e-6, "{d:?}");
        }
        let w = sampled(
            k,
            |x| {
                let (s, c) = (k * x).sin_cos();
                (0.3 * c + 0.4 * s, k * (-0.3 * s + 0.4 * c))
            },
            5.0,
        );
        for d in demodulate(&w, k).unwrap() {
            assert!((d.a - 0.3).abs() < 1e-6 && (d.b - 0.4).abs() < 1e-6);
        }
        assert!(matches!(demodulate(&sampled(k, |_| (1.0, 0.0), 1.5), k), Err(Error::RecordTooShort(_))));
    }

    #[test]
    fn roundtrip_fig4() {
        let k = 1.0;
        let p = fig4(k);
        let t = propagate(&EnvelopeState::real(0.0, 1.0, 0.0), &p, 100.0, 0.01).unwrap();
        let w = synthesize(&t, &p).unwrap();
        let d = demodulate(&w, k).unwrap();
        let mut sq = 0.0;
        for s in &d {
            let (a, b) = envelope_at(&t, s.x).unwrap();
            sq += (a - s.a).powi(2) + (b - s.b).powi(2);
        }
        assert!((sq / d.len() as f64).sqrt() < 0.01);
    }

    #[test]
    fn compare_free_and_fig4() {
        let k = 1.0;
        let free = PotentialProfile::free(k).unwrap();
        let t = propagate(&EnvelopeState::real(0.0, 0.6, 0.8), &free, 60.0, 0.01).unwrap();
        let r = compare(&t, &free, default_step(k)).unwrap();
        assert!(r.rms < 1e-7 && r.max < 1e-7, "{r:?}");

        let p = fig4(k);
        let t = propagate(&EnvelopeState::real(0.0, 1.0, 0.0), &p, 100.0, 0.01).unwrap();
        let r = compare(&t, &p, default_step(k)).unwrap();
        assert!(r.rms < 0.05, "{r:?}");
        assert!(r.wronskian_drift < 1e-6);
    }
}
