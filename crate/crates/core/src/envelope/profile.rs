use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::algebra::ThreeVector;
use crate::error::{Error, Result};

/// Default bound on `|ε₀|, |ε_c|, |ε_s|` beyond which the envelope
/// approximation is flagged.
pub const DEFAULT_SVEA_LIMIT: f64 = 0.1;

/// A medium seen by the envelope integrator: carrier wavenumber plus the
/// modulation vector `ε(x) = (−ε_s, ε_c, ε₀)`.
pub trait Medium: Sync {
    fn k(&self) -> f64;

    fn epsilon(&self, x: f64) -> Result<ThreeVector>;

    fn svea_limit(&self) -> f64 {
        DEFAULT_SVEA_LIMIT
    }

    /// Full potential `ε₀ + 2ε_c cos 2kx + 2ε_s sin 2kx`.
    fn full_epsilon(&self, x: f64) -> Result<f64> {
        let e = self.epsilon(x)?;
        let kx2 = 2.0 * self.k() * x;
        Ok(e.v3 + 2.0 * e.v2 * kx2.cos() - 2.0 * e.v1 * kx2.sin())
    }
}

/// One scalar modulation component as a function of position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Descriptor {
    Constant(f64),
    /// Linear between `(x0, v0)` and `(x1, v1)`, constant outside.
    Ramp { x0: f64, x1: f64, v0: f64, v1: f64 },
    /// `base + height·(1 + cos(2π(x − center)/width))/2` on
    /// `|x − center| < width/2`, `base` elsewhere.
    Bump {
        center: f64,
        width: f64,
        height: f64,
        #[serde(default)]
        base: f64,
    },
    /// Piecewise-linear interpolation of `(x, v)` nodes; undefined outside.
    Table { points: Vec<[f64; 2]> },
    Sum(Vec<Descriptor>),
}

impl Descriptor {
    pub fn zero() -> Self {
        Descriptor::Constant(0.0)
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        Ok(match self {
            Descriptor::Constant(v) => *v,
            Descriptor::Ramp { x0, x1, v0, v1 } => {
                if x <= *x0 {
                    *v0
                } else if x >= *x1 {
                    *v1
                } else {
                    v0 + (v1 - v0) * (x - x0) / (x1 - x0)
                }
            }
            Descriptor::Bump { center, width, height, base } => {
                let u = (x - center) / width;
                if u.abs() < 0.5 {
                    base + height * 0.5 * (1.0 + (2.0 * PI * u).cos())
                } else {
                    *base
                }
            }
            Descriptor::Table { points } => {
                let (i, t) = locate(points, x)?;
                points[i][1] + t * (points[i + 1][1] - points[i][1])
            }
            Descriptor::Sum(parts) => {
                let mut acc = 0.0;
                for p in parts {
                    acc += p.value(x)?;
                }
                acc
            }
        })
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        Ok(match self {
            Descriptor::Constant(_) => 0.0,
            Descriptor::Ramp { x0, x1, v0, v1 } => {
                if x > *x0 && x < *x1 {
                    (v1 - v0) / (x1 - x0)
                } else {
                    0.0
                }
            }
            Descriptor::Bump { center, width, height, .. } => {
                let u = (x - center) / width;
                if u.abs() < 0.5 {
                    -height * PI / width * (2.0 * PI * u).sin()
                } else {
                    0.0
                }
            }
            Descriptor::Table { points } => {
                let (i, _) = locate(points, x)?;
                (points[i + 1][1] - points[i][1]) / (points[i + 1][0] - points[i][0])
            }
            Descriptor::Sum(parts) => {
                let mut acc = 0.0;
                for p in parts {
                    acc += p.derivative(x)?;
                }
                acc
            }
        })
    }

    /// Interval on which the descriptor is defined.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Descriptor::Table { points } if !points.is_empty() => {
                (points[0][0], points[points.len() - 1][0])
            }
            Descriptor::Sum(parts) => parts.iter().fold(
                (f64::NEG_INFINITY, f64::INFINITY),
                |(lo, hi), p| {
                    let (a, b) = p.domain();
                    (lo.max(a), hi.min(b))
                },
            ),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Descriptor::Constant(v) if !v.is_finite() => bad("constant must be finite"),
            Descriptor::Ramp { x0, x1, .. } if !(x1 > x0) => bad("ramp needs x1 > x0"),
            Descriptor::Bump { width, .. } if !(*width > 0.0) => bad("bump width must be positive"),
            Descriptor::Table { points } => {
                if points.len() < 2 {
                    return bad("table needs at least two points");
                }
                if points.windows(2).any(|w| !(w[1][0] > w[0][0])) {
                    return bad("table positions must be strictly increasing");
                }
                Ok(())
            }
            Descriptor::Sum(parts) => parts.iter().try_for_each(Descriptor::validate),
            _ => Ok(()),
        }
    }

    /// `f·d(x)`.
    pub fn scaled(&self, f: f64) -> Self {
        match self {
            Descriptor::Constant(v) => Descriptor::Constant(v * f),
            Descriptor::Ramp { x0, x1, v0, v1 } => Descriptor::Ramp {
                x0: *x0,
                x1: *x1,
                v0: v0 * f,
                v1: v1 * f,
            },
            Descriptor::Bump { center, width, height, base } => Descriptor::Bump {
                center: *center,
                width: *width,
                height: height * f,
                base: base * f,
            },
            Descriptor::Table { points } => Descriptor::Table {
                points: points.iter().map(|p| [p[0], p[1] * f]).collect(),
            },
            Descriptor::Sum(parts) => Descriptor::Sum(parts.iter().map(|p| p.scaled(f)).collect()),
        }
    }

    /// `d(c − x)`: the mirror image about `c/2`.
    pub fn reflected(&self, c: f64) -> Self {
        match self {
            Descriptor::Constant(v) => Descriptor::Constant(*v),
            Descriptor::Ramp { x0, x1, v0, v1 } => Descriptor::Ramp {
                x0: c - x1,
                x1: c - x0,
                v0: *v1,
                v1: *v0,
            },
            Descriptor::Bump { center, width, height, base } => Descriptor::Bump {
                center: c - center,
                width: *width,
                height: *height,
                base: *base,
            },
            Descriptor::Table { points } => Descriptor::Table {
                points: points.iter().rev().map(|p| [c - p[0], p[1]]).collect(),
            },
            Descriptor::Sum(parts) => {
                Descriptor::Sum(parts.iter().map(|p| p.reflected(c)).collect())
            }
        }
    }

    /// Rescales every position by `f` (values untouched).
    pub fn with_length_unit(&self, f: f64) -> Self {
        match self {
            Descriptor::Constant(v) => Descriptor::Constant(*v),
            Descriptor::Ramp { x0, x1, v0, v1 } => Descriptor::Ramp {
                x0: x0 * f,
                x1: x1 * f,
                v0: *v0,
                v1: *v1,
            },
            Descriptor::Bump { center, width, height, base } => Descriptor::Bump {
                center: center * f,
                width: width * f,
                height: *height,
                base: *base,
            },
            Descriptor::Table { points } => Descriptor::Table {
                points: points.iter().map(|p| [p[0] * f, p[1]]).collect(),
            },
            Descriptor::Sum(parts) => {
                Descriptor::Sum(parts.iter().map(|p| p.with_length_unit(f)).collect())
            }
        }
    }

    /// Upper bound of `|d|` sampled on a grid over `[a, b]` plus the nodes.
    pub(crate) fn max_abs_on(&self, a: f64, b: f64) -> Result<f64> {
        let n = 2000;
        let mut m: f64 = 0.0;
        for i in 0..=n {
            let x = a + (b - a) * i as f64 / n as f64;
            m = m.max(self.value(x)?.abs());
        }
        Ok(m)
    }
}

fn bad<T>(msg: &str) -> Result<T> {
    Err(Error::InvalidArgument(msg.to_string()))
}

fn locate(points: &[[f64; 2]], x: f64) -> Result<(usize, f64)> {
    let lo = points[0][0];
    let hi = points[points.len() - 1][0];
    if !(x >= lo && x <= hi) {
        return Err(Error::OutOfDomain { x, lo, hi });
    }
    let i = match points.partition_point(|p| p[0] <= x) {
        0 => 0,
        j if j >= points.len() => points.len() - 2,
        j => j - 1,
    };
    let t = (x - points[i][0]) / (points[i + 1][0] - points[i][0]);
    Ok((i, t))
}

/// The modulation triple `(ε₀, ε_c, ε_s)(x)` together with the carrier
/// wavenumber `k`. Positions are physical lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialProfile {
    pub k: f64,
    pub eps0: Descriptor,
    pub epsc: Descriptor,
    pub epss: Descriptor,
    pub svea_limit: f64,
}

impl PotentialProfile {
    pub fn new(k: f64, eps0: Descriptor, epsc: Descriptor, epss: Descriptor) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return bad("carrier wavenumber must be positive");
        }
        for d in [&eps0, &epsc, &epss] {
            d.validate()?;
        }
        Ok(Self { k, eps0, epsc, epss, svea_limit: DEFAULT_SVEA_LIMIT })
    }

    /// Constant modulation from `ε = (ε₁, ε₂, ε₃) = (−ε_s, ε_c, ε₀)`.
    pub fn constant(k: f64, eps: ThreeVector) -> Result<Self> {
        Self::new(
            k,
            Descriptor::Constant(eps.v3),
            Descriptor::Constant(eps.v2),
            Descriptor::Constant(-eps.v1),
        )
    }

    pub fn free(k: f64) -> Result<Self> {
        Self::constant(k, ThreeVector::zero())
    }

    pub fn with_svea_limit(mut self, limit: f64) -> Self {
        self.svea_limit = limit;
        self
    }

    pub fn domain(&self) -> (f64, f64) {
        let (a0, b0) = self.eps0.domain();
        let (a1, b1) = self.epsc.domain();
        let (a2, b2) = self.epss.domain();
        (a0.max(a1).max(a2), b0.min(b1).min(b2))
    }

    /// `ε(x) = (−ε_s, ε_c, ε₀)`.
    pub fn epsilon_vector(&self, x: f64) -> Result<ThreeVector> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return Err(Error::OutOfDomain { x, lo, hi });
        }
        Ok(ThreeVector::new(
            -self.epss.value(x)?,
            self.epsc.value(x)?,
            self.eps0.value(x)?,
        ))
    }

    pub fn epsilon_derivative(&self, x: f64) -> Result<ThreeVector> {
        Ok(ThreeVector::new(
            -self.epss.derivative(x)?,
            self.epsc.derivative(x)?,
            self.eps0.derivative(x)?,
        ))
    }

    /// Every component multiplied by `f`.
    pub fn scaled(&self, f: f64) -> Self {
        Self {
            eps0: self.eps0.scaled(f),
            epsc: self.epsc.scaled(f),
            epss: self.epss.scaled(f),
            ..self.clone()
        }
    }

    /// The medium that carries a state from `x1` back to `x0`: on the same
    /// interval, `ε′(y) = −ε(x0 + x1 − y)`.
    pub fn reversed(&self, x0: f64, x1: f64) -> Self {
        let c = x0 + x1;
        Self {
            eps0: self.eps0.reflected(c).scaled(-1.0),
            epsc: self.epsc.reflected(c).scaled(-1.0),
            epss: self.epss.reflected(c).scaled(-1.0),
            ..self.clone()
        }
    }

    /// Largest modulation component magnitude over `[a, b]`.
    pub fn max_component(&self, a: f64, b: f64) -> Result<f64> {
        Ok(self
            .eps0
            .max_abs_on(a, b)?
            .max(self.epsc.max_abs_on(a, b)?)
            .max(self.epss.max_abs_on(a, b)?))
    }
}

impl Medium for PotentialProfile {
    fn k(&self) -> f64 {
        self.k
    }

    fn epsilon(&self, x: f64) -> Result<ThreeVector> {
        self.epsilon_vector(x)
    }

    fn svea_limit(&self) -> f64 {
        self.svea_limit
    }
}
