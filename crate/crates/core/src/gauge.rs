//! Local coordinate deformations `x′ = x − ξ(x)` of the scalar amplitude
//! equation `2ik⁻¹ d𝒜/dx = ℰ𝒜* + ε₀𝒜`.
//!
//! Under `𝒜′ = 𝒜·e^{−ikξ}` the equation keeps its form with
//! `ℰ′ = ℰ·e^{−2ikξ}` and `ε₀′ = ε₀ + 2dξ/dx`. [`GaugedProfile`] carries this
//! out without dropping terms: derivatives are taken in `x′`, which divides
//! both coefficients by `1 − dξ/dx`, and the coefficients are evaluated at the
//! preimage `x(x′)`. [`GaugeApproximation::FirstOrder`] keeps only the leading
//! terms.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::ThreeVector;
use crate::envelope::{EnvelopeState, Medium, PotentialProfile};
use crate::error::{Error, Result};

/// Panels of the composite Simpson rule in [`gauge_flux`].
pub const FLUX_PANELS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepShape {
    /// `3t² − 2t³`
    #[default]
    Cubic,
    /// `10t³ − 15t⁴ + 6t⁵`
    Quintic,
    /// `(1 − cos πt)/2`
    RaisedCosine,
}

impl StepShape {
    fn value(self, t: f64) -> f64 {
        match self {
            StepShape::Cubic => t * t * (3.0 - 2.0 * t),
            StepShape::Quintic => t * t * t * (10.0 + t * (-15.0 + 6.0 * t)),
            StepShape::RaisedCosine => 0.5 * (1.0 - (PI * t).cos()),
        }
    }

    fn slope(self, t: f64) -> f64 {
        match self {
            StepShape::Cubic => 6.0 * t * (1.0 - t),
            StepShape::Quintic => 30.0 * t * t * (1.0 - t) * (1.0 - t),
            StepShape::RaisedCosine => 0.5 * PI * (PI * t).sin(),
        }
    }
}

/// Coordinate deviation `ξ(x)` with an analytic derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GaugeMap {
    Constant(f64),
    Linear {
        slope: f64,
        #[serde(default)]
        offset: f64,
    },
    /// Plateau `xi0` for `x ≤ x0`, plateau `xi1` for `x ≥ x1`.
    Smoothstep {
        x0: f64,
        x1: f64,
        xi0: f64,
        xi1: f64,
        #[serde(default)]
        shape: StepShape,
    },
    /// Linear interpolation of `(x, ξ)` nodes, constant beyond the ends.
    PiecewiseLinear { points: Vec<[f64; 2]> },
}

impl GaugeMap {
    pub fn validate(&self) -> Result<()> {
        match self {
            GaugeMap::Smoothstep { x0, x1, .. } if !(x1 > x0) => Err(Error::InvalidArgument(
                format!("smoothstep needs x1 > x0, got [{x0}, {x1}]"),
            )),
            GaugeMap::PiecewiseLinear { points } => {
                if points.len() < 2 {
                    return Err(Error::InvalidArgument("piecewise_linear needs two points".into()));
                }
                if points.windows(2).any(|w| !(w[1][0] > w[0][0])) {
                    return Err(Error::InvalidArgument(
                        "piecewise_linear nodes must be strictly increasing".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn xi(&self, x: f64) -> f64 {
        match self {
            GaugeMap::Constant(c) => *c,
            GaugeMap::Linear { slope, offset } => offset + slope * x,
            GaugeMap::Smoothstep { x0, x1, xi0, xi1, shape } => {
                let t = ((x - x0) / (x1 - x0)).clamp(0.0, 1.0);
                xi0 + (xi1 - xi0) * shape.value(t)
            }
            GaugeMap::PiecewiseLinear { points } => {
                let (i, t) = segment(points, x);
                match i {
                    None => t,
                    Some(i) => points[i][1] + t * (points[i + 1][1] - points[i][1]),
                }
            }
        }
    }

    pub fn dxi(&self, x: f64) -> f64 {
        match self {
            GaugeMap::Constant(_) => 0.0,
            GaugeMap::Linear { slope, .. } => *slope,
            GaugeMap::Smoothstep { x0, x1, xi0, xi1, shape } => {
                if x <= *x0 || x >= *x1 {
                    return 0.0;
                }
                let w = x1 - x0;
                (xi1 - xi0) / w * shape.slope((x - x0) / w)
            }
            GaugeMap::PiecewiseLinear { points } => match segment(points, x).0 {
                None => 0.0,
                Some(i) => (points[i + 1][1] - points[i][1]) / (points[i + 1][0] - points[i][0]),
            },
        }
    }

    /// Rescales positions and deviations by `f`.
    pub fn with_length_unit(&self, f: f64) -> Self {
        match self {
            GaugeMap::Constant(c) => GaugeMap::Constant(c * f),
            GaugeMap::Linear { slope, offset } => GaugeMap::Linear { slope: *slope, offset: offset * f },
            GaugeMap::Smoothstep { x0, x1, xi0, xi1, shape } => GaugeMap::Smoothstep {
                x0: x0 * f,
                x1: x1 * f,
                xi0: xi0 * f,
                xi1: xi1 * f,
                shape: *shape,
            },
            GaugeMap::PiecewiseLinear { points } => GaugeMap::PiecewiseLinear {
                points: points.iter().map(|p| [p[0] * f, p[1] * f]).collect(),
            },
        }
    }

    /// Positions where `dξ/dx` is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            GaugeMap::Smoothstep { x0, x1, .. } => vec![*x0, *x1],
            GaugeMap::PiecewiseLinear { points } => points.iter().map(|p| p[0]).collect(),
            _ => Vec::new(),
        }
    }

    /// `x′ = x − ξ(x)`.
    pub fn forward(&self, x: f64) -> f64 {
        x - self.xi(x)
    }

    /// Solves `x − ξ(x) = x′` by Newton iteration.
    pub fn inverse(&self, xp: f64) -> Result<f64> {
        let mut x = xp + self.xi(xp);
        for _ in 0..60 {
            let f = x - self.xi(x) - xp;
            let d = 1.0 - self.dxi(x);
            if !(d > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "coordinate map not monotone at x = {x} (dξ/dx = {})",
                    self.dxi(x)
                )));
            }
            let dx = f / d;
            x -= dx;
            if dx.abs() <= 1e-15 * (1.0 + x.abs()) {
                return Ok(x);
            }
        }
        let f = x - self.xi(x) - xp;
        if f.abs() <= 1e-12 * (1.0 + x.abs()) {
            Ok(x)
        } else {
            Err(Error::InvalidArgument(format!("coordinate inversion failed at x′ = {xp}")))
        }
    }
}

/// `(segment index, parameter)` or `(None, plateau value)` beyond the nodes.
fn segment(points: &[[f64; 2]], x: f64) -> (Option<usize>, f64) {
    let n = points.len();
    if x <= points[0][0] {
        return (None, points[0][1]);
    }
    if x >= points[n - 1][0] {
        return (None, points[n - 1][1]);
    }
    let i = points.partition_point(|p| p[0] <= x) - 1;
    (Some(i), (x - points[i][0]) / (points[i + 1][0] - points[i][0]))
}

/// `𝒜′ = 𝒜·e^{−ikξ}`.
pub fn transform_state(amp: Complex64, xi: f64, k: f64) -> Complex64 {
    amp * Complex64::from_polar(1.0, -k * xi)
}

/// The same phase shift acting on an envelope pair: with `𝒜 = (A + iB)/2`
/// it rotates `(A, B)` by `−kξ`. Real-linear, so it extends to complex pairs.
pub fn transform_envelope(state: &EnvelopeState, xi: f64, k: f64, x_new: f64) -> EnvelopeState {
    let (s, c) = (k * xi).sin_cos();
    EnvelopeState::new(
        x_new,
        state.alpha * c + state.beta * s,
        -state.alpha * s + state.beta * c,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaugeApproximation {
    /// All terms retained; the primed-frame solution is the exact image of
    /// the unprimed one.
    #[default]
    Exact,
    /// `ε₀′ = ε₀ + 2ξ′`, `ℰ′ = ℰe^{−2ikξ}` evaluated at `x = x′`.
    FirstOrder,
}

/// A profile seen from the deformed coordinate `x′`.
#[derive(Debug, Clone)]
pub struct GaugedProfile {
    pub base: PotentialProfile,
    pub map: GaugeMap,
    pub approximation: GaugeApproximation,
}

impl GaugedProfile {
    /// Primed-frame domain.
    pub fn domain(&self) -> (f64, f64) {
        let (a, b) = self.base.domain();
        let f = |x: f64| if x.is_finite() { self.map.forward(x) } else { x };
        (f(a), f(b))
    }
}

impl Medium for GaugedProfile {
    fn k(&self) -> f64 {
        self.base.k
    }

    fn epsilon(&self, xp: f64) -> Result<ThreeVector> {
        let k = self.base.k;
        let (x, jac) = match self.approximation {
            GaugeApproximation::Exact => {
                let x = self.map.inverse(xp)?;
                (x, 1.0 / (1.0 - self.map.dxi(x)))
            }
            GaugeApproximation::FirstOrder => (xp, 1.0),
        };
        let e = self.base.epsilon_vector(x)?;
        let xi = self.map.xi(x);
        let cal_e = Complex64::new(e.v2, -e.v1) * Complex64::from_polar(jac, -2.0 * k * xi);
        let eps0 = (e.v3 + 2.0 * self.map.dxi(x)) * jac;
        Ok(ThreeVector::new(-cal_e.im, cal_e.re, eps0))
    }

    fn svea_limit(&self) -> f64 {
        self.base.svea_limit
    }
}

/// Builds the primed-frame medium.
pub fn transform_potential(
    profile: &PotentialProfile,
    map: &GaugeMap,
    approximation: GaugeApproximation,
) -> Result<GaugedProfile> {
    map.validate()?;
    Ok(GaugedProfile { base: profile.clone(), map: map.clone(), approximation })
}

/// Gauge-flux length `l = ∫2ξ′dx` and the factor `e^{−ikl/2}` it imprints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeFlux {
    pub length: f64,
    pub phase_factor: Complex64,
}

impl GaugeFlux {
    /// `±1` when the factor is real to `1e−9`.
    pub fn sign(&self) -> Option<i32> {
        let p = self.phase_factor;
        if p.im.abs() > 1e-9 {
            None
        } else if (p.re - 1.0).abs() < 1e-9 {
            Some(1)
        } else if (p.re + 1.0).abs() < 1e-9 {
            Some(-1)
        } else {
            None
        }
    }
}

/// Integrates the gauge field `2dξ/dx` between two plateaus.
pub fn gauge_flux(map: &GaugeMap, x1: f64, x2: f64, k: f64) -> Result<GaugeFlux> {
    map.validate()?;
    for x in [x1, x2] {
        let d = map.dxi(x);
        if d.abs() > 1e-12 {
            return Err(Error::NotPlateau { x, dxi: d });
        }
    }
    let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
    let mut cuts = vec![lo];
    cuts.extend(map.breakpoints().into_iter().filter(|&b| b > lo && b < hi));
    cuts.push(hi);
    let f = |x: f64| 2.0 * map.dxi(x);
    let mut length: f64 = cuts.windows(2).map(|w| simpson(&f, w[0], w[1], FLUX_PANELS)).sum();
    if x2 < x1 {
        length = -length;
    }
    Ok(GaugeFlux { length, phase_factor: Complex64::from_polar(1.0, -0.5 * k * length) })
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// `k·max|ξ|·max|dε/dx|/max|ε|` over `[a, b]`; the deformation is within the
/// small-deviation regime when this is well below one.
pub fn guard_ratio(profile: &PotentialProfile, map: &GaugeMap, a: f64, b: f64) -> Result<f64> {
    let n = 2000;
    let (mut xi, mut de, mut e) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..=n {
        let x = a + (b - a) * i as f64 / n as f64;
        xi = xi.max(map.xi(x).abs());
        let d = profile.epsilon_derivative(x)?;
        de = de.max(d.v1.abs()).max(d.v2.abs()).max(d.v3.abs());
        let v = profile.epsilon_vector(x)?;
        e = e.max(v.v1.abs()).max(v.v2.abs()).max(v.v3.abs());
    }
    if e == 0.0 {
        return Ok(0.0);
    }
    Ok(profile.k * xi * de / e)
}

/// Warning text when [`guard_ratio`] exceeds `threshold`.
pub fn guard(profile: &PotentialProfile, map: &GaugeMap, a: f64, b: f64, threshold: f64) -> Result<Option<String>> {
    let r = guard_ratio(profile, map, a, b)?;
    Ok((r > threshold).then(|| {
        format!("gauge deviation outside small-ξ regime: k·max|ξ|·max|ε′|/max|ε| = {r:.3e} > {threshold}")
    }))
}
