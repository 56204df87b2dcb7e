//! Envelope dynamics `d(α, β)/dx = (k/2)·[[ε_s, −ε_c + ε₀], [−ε_c − ε₀, −ε_s]]·(α, β)`
//! and monodromy matrices of finite intervals.
//!
//! In generator form this reads `i k⁻¹ dψ/dx = −ε·K ψ`, so a constant
//! modulation propagates by `exp_generator(ε, k·Δx)`.

mod profile;

pub use profile::{Descriptor, Medium, PotentialProfile, DEFAULT_SVEA_LIMIT};

use num_complex::Complex64;

use crate::algebra::{r_matrix, Matrix2, ThreeVector};
use crate::error::{Error, Result};
use crate::ode;

/// Default integration step in units of `1/k`.
pub const DEFAULT_STEP_KX: f64 = 0.01;

/// Global accuracy the default step is expected to deliver on unit-amplitude
/// envelopes over a few hundred `1/k`.
pub const INTEGRATOR_TOL: f64 = 1e-8;

/// Complex envelope pair `(α, β)` at position `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeState {
    pub x: f64,
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl EnvelopeState {
    pub fn new(x: f64, alpha: Complex64, beta: Complex64) -> Self {
        Self { x, alpha, beta }
    }

    /// Real amplitudes `(A, B)`.
    pub fn real(x: f64, a: f64, b: f64) -> Self {
        Self::new(x, a.into(), b.into())
    }

    pub fn from_vec(x: f64, v: [Complex64; 2]) -> Self {
        Self::new(x, v[0], v[1])
    }

    pub fn vec(&self) -> [Complex64; 2] {
        [self.alpha, self.beta]
    }

    pub fn is_finite(&self) -> bool {
        self.alpha.is_finite() && self.beta.is_finite()
    }

    pub fn max_imag(&self) -> f64 {
        self.alpha.im.abs().max(self.beta.im.abs())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        (self.alpha.norm_sqr() + self.beta.norm_sqr()).sqrt()
    }

    /// `⟨φ|ψ⟩ = ψ†Rψ` for the adjoint partner `|φ⟩ = R⁻¹|ψ⟩`; equals `i·s₀`.
    pub fn pairing(&self) -> Complex64 {
        pair(self.vec(), r_matrix(), self.vec())
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self::new(self.x, self.alpha * c, self.beta * c)
    }

    fn pack(&self) -> [f64; 4] {
        [self.alpha.re, self.alpha.im, self.beta.re, self.beta.im]
    }

    fn unpack(x: f64, y: &[f64; 4]) -> Self {
        Self::new(x, Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]))
    }
}

/// `u† X v`.
pub fn pair(u: [Complex64; 2], x: Matrix2, v: [Complex64; 2]) -> Complex64 {
    let xv = x.apply(v);
    u[0].conj() * xv[0] + u[1].conj() * xv[1]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClassicalRk4,
}

/// Largest modulation component seen above the envelope-approximation bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SveaViolation {
    pub max_component: f64,
    pub at: f64,
    pub limit: f64,
}

/// Ordered envelope samples from one propagation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<EnvelopeState>,
    pub method: Method,
    pub step: f64,
    pub svea_violation: Option<SveaViolation>,
}

impl Trajectory {
    pub fn first(&self) -> &EnvelopeState {
        &self.samples[0]
    }

    pub fn last(&self) -> &EnvelopeState {
        &self.samples[self.samples.len() - 1]
    }

    pub fn positions(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.x).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn warnings(&self) -> Vec<String> {
        self.svea_violation
            .iter()
            .map(|v| {
                format!(
                    "modulation component {:.4} at x = {:.4} exceeds the envelope-approximation bound {}",
                    v.max_component, v.at, v.limit
                )
            })
            .collect()
    }
}

/// The real 2×2 matrix `(k/2)·[[−ε₁, −ε₂ + ε₃], [−ε₂ − ε₃, ε₁]]`.
fn envelope_matrix(k: f64, e: ThreeVector) -> [[f64; 2]; 2] {
    let h = 0.5 * k;
    [
        [-h * e.v1, h * (-e.v2 + e.v3)],
        [h * (-e.v2 - e.v3), h * e.v1],
    ]
}

/// `d(α, β)/dx` at the state's position.
pub fn rhs<M: Medium + ?Sized>(state: &EnvelopeState, medium: &M) -> Result<(Complex64, Complex64)> {
    let g = envelope_matrix(medium.k(), medium.epsilon(state.x)?);
    Ok((
        state.alpha * g[0][0] + state.beta * g[0][1],
        state.alpha * g[1][0] + state.beta * g[1][1],
    ))
}

/// `d𝒜/dx = (k/2i)(ℰ𝒜* + ε₀𝒜)` with `𝒜 = (A + iB)/2`, `ℰ = ε_c + iε_s`.
pub fn scalar_rhs<M: Medium + ?Sized>(amp: Complex64, medium: &M, x: f64) -> Result<Complex64> {
    let e = medium.epsilon(x)?;
    let cal_e = Complex64::new(e.v2, -e.v1);
    let k = medium.k();
    Ok(Complex64::new(0.0, -0.5 * k) * (cal_e * amp.conj() + amp * e.v3))
}

/// `𝒜 = (A + iB)/2` for a real envelope pair.
pub fn su11_amplitude(a: f64, b: f64) -> Complex64 {
    Complex64::new(0.5 * a, 0.5 * b)
}

/// Inverse of [`su11_amplitude`].
pub fn from_su11_amplitude(amp: Complex64) -> (f64, f64) {
    (2.0 * amp.re, 2.0 * amp.im)
}

fn packed_rhs<M: Medium + ?Sized>(medium: &M) -> impl Fn(f64, &[f64; 4]) -> Result<[f64; 4]> + '_ {
    move |x, y| {
        let g = envelope_matrix(medium.k(), medium.epsilon(x)?);
        Ok([
            g[0][0] * y[0] + g[0][1] * y[2],
            g[0][0] * y[1] + g[0][1] * y[3],
            g[1][0] * y[0] + g[1][1] * y[2],
            g[1][0] * y[1] + g[1][1] * y[3],
        ])
    }
}

pub(crate) fn svea_scan<M: Medium + ?Sized>(medium: &M, xs: &[f64]) -> Result<Option<SveaViolation>> {
    let limit = medium.svea_limit();
    let mut worst: Option<SveaViolation> = None;
    for &x in xs {
        let e = medium.epsilon(x)?;
        let m = e.v1.abs().max(e.v2.abs()).max(e.v3.abs());
        if m > limit && worst.is_none_or(|w| m > w.max_component) {
            worst = Some(SveaViolation { max_component: m, at: x, limit });
        }
    }
    Ok(worst)
}

/// Integrates the envelope equation from `state0.x` to `x_end` with fixed
/// classical RK4 steps; the last step is shortened to end on `x_end`.
pub fn propagate<M: Medium + ?Sized>(
    state0: &EnvelopeState,
    medium: &M,
    x_end: f64,
    step: f64,
) -> Result<Trajectory> {
    if !state0.is_finite() {
        return Err(Error::InvalidArgument("initial state must be finite".into()));
    }
    let xs = ode::grid(state0.x, x_end, step)?;
    let ys = ode::integrate(packed_rhs(medium), &xs, state0.pack())?;
    let samples = xs
        .iter()
        .zip(&ys)
        .map(|(&x, y)| EnvelopeState::unpack(x, y))
        .collect();
    Ok(Trajectory {
        samples,
        method: Method::ClassicalRk4,
        step,
        svea_violation: svea_scan(medium, &xs)?,
    })
}

/// Real matrix `M` with `ψ(x1) = M ψ(x0)` for every solution.
pub fn monodromy<M: Medium + ?Sized>(medium: &M, x0: f64, x1: f64, step: f64) -> Result<Matrix2> {
    let c1 = propagate(&EnvelopeState::real(x0, 1.0, 0.0), medium, x1, step)?;
    let c2 = propagate(&EnvelopeState::real(x0, 0.0, 1.0), medium, x1, step)?;
    let (a, b) = (c1.last(), c2.last());
    Ok(Matrix2::new(a.alpha, b.alpha, a.beta, b.beta))
}
