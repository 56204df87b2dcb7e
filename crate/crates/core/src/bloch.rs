//! Bloch vectors of envelope states, their direct evolution, the conic
//! classification of constant-modulation orbits, and the two-valuedness
//! machinery (wrapped-cone coordinates and winding numbers).
//!
//! Orientation convention: turning angles in the `(s₁, s₂)` plane are
//! positive in the sense a positive `ε₃` precesses the Bloch vector, which is
//! clockwise when viewed from `+s₃`.

use num_complex::Complex64;

use crate::algebra::{generators_sl2r, minkowski_cross, minkowski_dot, r_matrix, Matrix2, ThreeVector};
use crate::envelope::{EnvelopeState, Medium};
use crate::error::{Error, Result};
use crate::ode;

/// Relative tolerance used for cone membership checks.
pub const CONE_TOLERANCE: f64 = 1e-9;

/// Bloch vector `(s₀; s₁, s₂, s₃)`. `s₀ = 0` on the cone.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochState {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl BlochState {
    pub const fn new(s0: f64, s1: f64, s2: f64, s3: f64) -> Self {
        Self { s0, s1, s2, s3 }
    }

    pub fn vector(&self) -> ThreeVector {
        ThreeVector::new(self.s1, self.s2, self.s3)
    }

    pub fn with_vector(s0: f64, v: ThreeVector) -> Self {
        Self::new(s0, v.v1, v.v2, v.v3)
    }

    /// `s·̃s + s₀²`; zero on the cone or hyperboloid sheet.
    pub fn invariant_residual(&self) -> f64 {
        let v = self.vector();
        minkowski_dot(v, v) + self.s0 * self.s0
    }

    /// `|s·̃s + s₀²| / s₃²`, or 0 at the origin.
    pub fn relative_residual(&self) -> f64 {
        if self.s3 == 0.0 {
            return self.invariant_residual().abs();
        }
        self.invariant_residual().abs() / (self.s3 * self.s3)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let d = [
            self.s0 - other.s0,
            self.s1 - other.s1,
            self.s2 - other.s2,
            self.s3 - other.s3,
        ];
        d.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn radius(&self) -> f64 {
        self.s1.hypot(self.s2)
    }
}

/// `s = (2AB, −A² + B², A² + B²)`, `s₀ = 0`.
pub fn bloch_from_real(a: f64, b: f64) -> BlochState {
    BlochState::new(0.0, 2.0 * a * b, -a * a + b * b, a * a + b * b)
}

/// Bloch vector of a complex envelope pair.
pub fn bloch_from_complex(alpha: Complex64, beta: Complex64) -> BlochState {
    let cross = alpha.conj() * beta;
    let na = alpha.norm_sqr();
    let nb = beta.norm_sqr();
    // α*β − αβ* = 2i·Im(α*β), α*β + αβ* = 2·Re(α*β)
    BlochState::new(2.0 * cross.im, 2.0 * cross.re, -na + nb, na + nb)
}

pub fn bloch_of(state: &EnvelopeState) -> BlochState {
    bloch_from_complex(state.alpha, state.beta)
}

/// `ρ = 2i|ψ⟩⟨ψ|J₃` for real amplitudes, with `⟨ψ| = (A, B)`.
pub fn density_matrix_real(a: f64, b: f64) -> Matrix2 {
    let (_, _, j3) = generators_sl2r();
    let outer = Matrix2::real(a * a, a * b, b * a, b * b);
    outer * Complex64::new(0.0, 2.0) * j3
}

/// `ρ = |ψ⟩⟨ψ|R` with `⟨ψ| = ψ†` and `R = 2iJ₃`.
pub fn density_matrix_complex(alpha: Complex64, beta: Complex64) -> Matrix2 {
    let outer = Matrix2::new(
        alpha * alpha.conj(),
        alpha * beta.conj(),
        beta * alpha.conj(),
        beta * beta.conj(),
    );
    outer * r_matrix()
}

/// `ρ = i(s₀I/2 + s₁K₁ + s₂K₂ + s₃J₃)`.
pub fn density_from_bloch(s: &BlochState) -> Matrix2 {
    let sk = s.vector().dot_generators();
    (Matrix2::identity() * (0.5 * s.s0) + sk) * Complex64::new(0.0, 1.0)
}

/// Recovers `(s₀, s)` from a density matrix using the trace-orthogonality
/// of `{I, K₁, K₂, J₃}`.
pub fn decompose_density(rho: &Matrix2) -> BlochState {
    let (k1, k2, j3) = generators_sl2r();
    let i = Complex64::new(0.0, 1.0);
    let s0 = (-i * rho.trace()).re;
    let s1 = (i * 2.0 * (*rho * k1).trace()).re;
    let s2 = (i * 2.0 * (*rho * k2).trace()).re;
    let s3 = (-i * 2.0 * (*rho * j3).trace()).re;
    BlochState::new(s0, s1, s2, s3)
}

/// `ds/dx = k·(s ×̃ ε) = −k·(ε ×̃ s)`; `s₀` is constant.
///
/// This is the sign that makes the Bloch vector of a propagated envelope
/// equal the directly propagated Bloch vector.
pub fn bloch_rhs(s: ThreeVector, eps: ThreeVector, k: f64) -> ThreeVector {
    minkowski_cross(eps, s) * -k
}

/// Integrates the Bloch equation with the envelope integrator's grid.
pub fn propagate_bloch<M: Medium + ?Sized>(
    s: BlochState,
    medium: &M,
    x_start: f64,
    x_end: f64,
    step: f64,
) -> Result<Vec<(f64, BlochState)>> {
    let k = medium.k();
    let xs = ode::grid(x_start, x_end, step)?;
    let f = |x: f64, y: &[f64; 3]| -> Result<[f64; 3]> {
        let e = medium.epsilon(x)?;
        Ok(bloch_rhs(ThreeVector::new(y[0], y[1], y[2]), e, k).to_array())
    };
    let ys = ode::integrate(f, &xs, s.vector().to_array())?;
    Ok(xs
        .into_iter()
        .zip(ys)
        .map(|(x, y)| (x, BlochState::new(s.s0, y[0], y[1], y[2])))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConicKind {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl ConicKind {
    pub fn name(&self) -> &'static str {
        match self {
            ConicKind::Elliptic => "elliptic",
            ConicKind::Parabolic => "parabolic",
            ConicKind::Hyperbolic => "hyperbolic",
        }
    }

    /// Band interpretation of the orbit type.
    pub fn band(&self) -> &'static str {
        match self {
            ConicKind::Elliptic => "conduction",
            ConicKind::Parabolic => "band edge",
            ConicKind::Hyperbolic => "forbidden",
        }
    }
}

/// Orbit type of a constant modulation, with discriminant `ε₃² − ε₁² − ε₂²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConicClass {
    pub kind: ConicKind,
    pub discriminant: f64,
    /// Set for the zero vector (no dynamics at all).
    pub degenerate: bool,
}

impl ConicClass {
    /// Precession rate `k·√|disc|`: angular rate for elliptic orbits and
    /// twice the envelope growth rate for hyperbolic ones.
    pub fn rate(&self, k: f64) -> f64 {
        k * self.discriminant.abs().sqrt()
    }

    /// Exponential growth rate `k·√(ε₁² + ε₂² − ε₃²)/2` of envelope
    /// amplitudes in a forbidden band; zero otherwise.
    pub fn growth_rate(&self, k: f64) -> f64 {
        match self.kind {
            ConicKind::Hyperbolic => 0.5 * k * (-self.discriminant).sqrt(),
            _ => 0.0,
        }
    }
}

pub fn classify(eps: ThreeVector) -> ConicClass {
    let disc = eps.v3 * eps.v3 - eps.v1 * eps.v1 - eps.v2 * eps.v2;
    let scale = eps.dot(eps);
    if scale == 0.0 {
        return ConicClass { kind: ConicKind::Parabolic, discriminant: 0.0, degenerate: true };
    }
    let kind = if disc.abs() <= 1e-12 * scale {
        ConicKind::Parabolic
    } else if disc > 0.0 {
        ConicKind::Elliptic
    } else {
        ConicKind::Hyperbolic
    };
    ConicClass { kind, discriminant: disc, degenerate: false }
}

/// Coordinates `s̄ = (s₁, s₂, √3·s₃)/(2√s₃)` on the 60° wrapped cone.
pub fn cone_map(s: &BlochState) -> Result<ThreeVector> {
    if !(s.s3 > 0.0) {
        return Err(Error::Apex { s3: s.s3 });
    }
    if s.s0 != 0.0 || s.relative_residual() > CONE_TOLERANCE {
        return Err(Error::NotOnCone { s0: s.s0, residual: s.invariant_residual() });
    }
    let d = 2.0 * s.s3.sqrt();
    Ok(ThreeVector::new(s.s1 / d, s.s2 / d, 3f64.sqrt() * s.s3 / d))
}

/// Turning angle from `(a₁, a₂)` to `(b₁, b₂)` about the `s₃` axis, positive
/// in the precession sense of a positive `ε₃`. `None` when the chord passes
/// through the axis.
pub fn turn_angle(a: (f64, f64), b: (f64, f64)) -> Option<f64> {
    let cross = a.0 * b.1 - a.1 * b.0;
    let dot = a.0 * b.0 + a.1 * b.1;
    if cross == 0.0 && dot <= 0.0 {
        return None;
    }
    Some(-cross.atan2(dot))
}

/// Signed number of turns of a closed path around the cone axis.
pub fn winding_number(samples: &[BlochState]) -> Result<i64> {
    let turns = total_turn(samples)? / std::f64::consts::TAU;
    let n = turns.round();
    if (turns - n).abs() > 1e-3 {
        return Err(Error::OpenLoop { gap: (turns - n).abs() });
    }
    Ok(n as i64)
}

/// Accumulated turning angle of a closed path (checks closure and apex).
pub(crate) fn total_turn(samples: &[BlochState]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let first = samples[0];
    let last = samples[samples.len() - 1];
    let scale = first.s3.abs().max(1e-300);
    let gap = first.distance(&last);
    if gap > 1e-6 * scale.max(1.0) {
        return Err(Error::OpenLoop { gap });
    }
    let mut total = 0.0;
    for (i, w) in samples.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if a.radius() == 0.0 || b.radius() == 0.0 {
            return Err(Error::ApexCrossing { index: i });
        }
        let d = turn_angle((a.s1, a.s2), (b.s1, b.s2)).ok_or(Error::ApexCrossing { index: i })?;
        if d.abs() > std::f64::consts::PI - 1e-6 {
            return Err(Error::ApexCrossing { index: i });
        }
        total += d;
    }
    Ok(total)
}

/// `(−1)ⁿ`: the sign an envelope pair acquires along a loop of winding `n`.
pub fn holonomy_sign(n: i64) -> i32 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}
