//! 2×2 complex matrices, the SL(2,R) and SU(1,1) generator triples, and the
//! signature (+,+,−) vector products used by the Bloch equations.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense 2×2 complex matrix stored row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Matrix2 {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl Matrix2 {
    pub const fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn real(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self::new(a11.into(), a12.into(), a21.into(), a22.into())
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> Complex64 {
        self.a11 + self.a22
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a11, self.a21, self.a12, self.a22)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::new(
            self.a11.conj(),
            self.a21.conj(),
            self.a12.conj(),
            self.a22.conj(),
        )
    }

    /// Inverse; `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        Some(Self::new(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.a11 * c, self.a12 * c, self.a21 * c, self.a22 * c)
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.a11 * v[0] + self.a12 * v[1],
            self.a21 * v[0] + self.a22 * v[1],
        ]
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other)
            .entries()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.entries().iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

impl fmt::Debug for Matrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.a11, self.a12, self.a21, self.a22
        )
    }
}

impl Add for Matrix2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a11 + o.a11, self.a12 + o.a12, self.a21 + o.a21, self.a22 + o.a22)
    }
}

impl Sub for Matrix2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22)
    }
}

impl Neg for Matrix2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a11, -self.a12, -self.a21, -self.a22)
    }
}

impl Mul for Matrix2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

impl Mul<Complex64> for Matrix2 {
    type Output = Self;
    fn mul(self, c: Complex64) -> Self {
        self.scale(c)
    }
}

impl Mul<f64> for Matrix2 {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        self.scale(c.into())
    }
}

/// Pauli matrices σ₁, σ₂, σ₃.
pub fn pauli() -> (Matrix2, Matrix2, Matrix2) {
    (
        Matrix2::new(ZERO, ONE, ONE, ZERO),
        Matrix2::new(ZERO, -I, I, ZERO),
        Matrix2::new(ONE, ZERO, ZERO, -ONE),
    )
}

/// SL(2,R) generators `(K₁, K₂, J₃) = (iσ₃/2, iσ₁/2, σ₂/2)`.
pub fn generators_sl2r() -> (Matrix2, Matrix2, Matrix2) {
    let ih = Complex64::new(0.0, 0.5);
    (
        Matrix2::new(ih, ZERO, ZERO, -ih),
        Matrix2::new(ZERO, ih, ih, ZERO),
        Matrix2::new(ZERO, -ih, ih, ZERO),
    )
}

/// SU(1,1) generators `(K′₁, K′₂, J′₃) = (iσ₁/2, iσ₂/2, σ₃/2)`.
///
/// These are the SL(2,R) generators expressed in the counter-rotating
/// amplitude basis `(ℬ, 𝒜) = ((A − iB)/2, (A + iB)/2)`; see
/// [`su11_basis_change`]. With this ordering `J′₃ = diag(1/2, −1/2)` and the
/// triple obeys the same commutation relations as the SL(2,R) one.
pub fn generators_su11() -> (Matrix2, Matrix2, Matrix2) {
    let ih = Complex64::new(0.0, 0.5);
    let h = Complex64::new(0.5, 0.0);
    (
        Matrix2::new(ZERO, ih, ih, ZERO),
        Matrix2::new(ZERO, Complex64::new(0.5, 0.0), Complex64::new(-0.5, 0.0), ZERO),
        Matrix2::new(h, ZERO, ZERO, -h),
    )
}

/// Matrix `U` taking `(A, B)` to `(ℬ, 𝒜)`; `K′ = U K U⁻¹` for each generator.
pub fn su11_basis_change() -> Matrix2 {
    let h = Complex64::new(0.5, 0.0);
    let ih = Complex64::new(0.0, 0.5);
    Matrix2::new(h, -ih, h, ih)
}

/// `x y − y x`.
pub fn commutator(x: Matrix2, y: Matrix2) -> Matrix2 {
    x * y - y * x
}

/// Real three-component vector `(v₁, v₂, v₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThreeVector {
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
}

impl ThreeVector {
    pub const fn new(v1: f64, v2: f64, v3: f64) -> Self {
        Self { v1, v2, v3 }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.v1, self.v2, self.v3]
    }

    /// Euclidean dot product.
    pub fn dot(self, o: Self) -> f64 {
        self.v1 * o.v1 + self.v2 * o.v2 + self.v3 * o.v3
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Reflection of the third component, `ã = (a₁, a₂, −a₃)`.
    pub fn twist(self) -> Self {
        Self::new(self.v1, self.v2, -self.v3)
    }

    pub fn is_finite(self) -> bool {
        self.v1.is_finite() && self.v2.is_finite() && self.v3.is_finite()
    }

    /// `c₁K₁ + c₂K₂ + c₃J₃`.
    pub fn dot_generators(self) -> Matrix2 {
        let (k1, k2, j3) = generators_sl2r();
        k1 * self.v1 + k2 * self.v2 + j3 * self.v3
    }
}

impl Add for ThreeVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.v1 + o.v1, self.v2 + o.v2, self.v3 + o.v3)
    }
}

impl Sub for ThreeVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.v1 - o.v1, self.v2 - o.v2, self.v3 - o.v3)
    }
}

impl Neg for ThreeVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.v1, -self.v2, -self.v3)
    }
}

impl Mul<f64> for ThreeVector {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        Self::new(self.v1 * c, self.v2 * c, self.v3 * c)
    }
}

/// `a₁b₁ + a₂b₂ − a₃b₃`.
pub fn minkowski_dot(a: ThreeVector, b: ThreeVector) -> f64 {
    a.v1 * b.v1 + a.v2 * b.v2 - a.v3 * b.v3
}

/// `(a₂b₃ − a₃b₂, a₃b₁ − a₁b₃, −a₁b₂ + a₂b₁)`.
pub fn minkowski_cross(a: ThreeVector, b: ThreeVector) -> ThreeVector {
    ThreeVector::new(
        a.v2 * b.v3 - a.v3 * b.v2,
        a.v3 * b.v1 - a.v1 * b.v3,
        -a.v1 * b.v2 + a.v2 * b.v1,
    )
}

// Below this |θ²| the closed form switches to its power series.
const SERIES_THRESHOLD: f64 = 1e-12;

/// `exp(i·scale·(c₁K₁ + c₂K₂ + c₃J₃))`.
///
/// The exponent `M` squares to `q·I` with `q = scale²(c₁² + c₂² − c₃²)/4`, so
/// `exp(M) = C(q)·I + S(q)·M` where `C = cosh √q` and `S = sinh √q / √q`
/// (their trigonometric continuations for `q < 0`). The result is a real
/// SL(2,R) matrix.
pub fn exp_generator(coeffs: ThreeVector, scale: f64) -> Matrix2 {
    let m = coeffs.dot_generators() * Complex64::new(0.0, scale);
    let q = scale * scale
        * (coeffs.v1 * coeffs.v1 + coeffs.v2 * coeffs.v2 - coeffs.v3 * coeffs.v3)
        / 4.0;
    let (c, s) = if q.abs() < SERIES_THRESHOLD {
        (1.0 + q / 2.0 + q * q / 24.0, 1.0 + q / 6.0 + q * q / 120.0)
    } else if q > 0.0 {
        let t = q.sqrt();
        (t.cosh(), t.sinh() / t)
    } else {
        let t = (-q).sqrt();
        (t.cos(), t.sin() / t)
    };
    let mut out = Matrix2::identity() * c + m * s;
    // exact zeros in the imaginary parts: every term of exp(M) is real
    for z in [&mut out.a11, &mut out.a12, &mut out.a21, &mut out.a22] {
        z.im = 0.0;
    }
    out
}

/// Group element `exp(−iμJ₃)·exp(−iνK₁)·exp(−iφJ₃)`.
pub fn group_element(mu: f64, nu: f64, phi: f64) -> Matrix2 {
    let j3 = ThreeVector::new(0.0, 0.0, 1.0);
    let k1 = ThreeVector::new(1.0, 0.0, 0.0);
    exp_generator(j3, -mu) * exp_generator(k1, -nu) * exp_generator(j3, -phi)
}

/// The fixed reference state `ψ₀ = 2^{−1/2}(1, i)` with Bloch vector `(0,0,1)`.
pub fn psi0() -> [Complex64; 2] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [Complex64::new(r, 0.0), Complex64::new(0.0, r)]
}

/// `R = 2iJ₃ = [[0, 1], [−1, 0]]`, the intertwiner with `N† = R N R⁻¹`.
pub fn r_matrix() -> Matrix2 {
    Matrix2::real(0.0, 1.0, -1.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sl2r_generators_literal_entries() {
        let (k1, k2, j3) = generators_sl2r();
        assert_eq!(k1, Matrix2::new(c(0.0, 0.5), ZERO, ZERO, c(0.0, -0.5)));
        assert_eq!(k2, Matrix2::new(ZERO, c(0.0, 0.5), c(0.0, 0.5), ZERO));
        assert_eq!(j3, Matrix2::new(ZERO, c(0.0, -0.5), c(0.0, 0.5), ZERO));
        let (s1, s2, s3) = pauli();
        assert_eq!(k1, s3 * c(0.0, 0.5));
        assert_eq!(k2, s1 * c(0.0, 0.5));
        assert_eq!(j3, s2 * 0.5);
    }

    #[test]
    fn sl2r_commutators() {
        let (k1, k2, j3) = generators_sl2r();
        assert_eq!(commutator(k1, k2), j3 * -I);
        assert_eq!(commutator(k2, j3), k1 * I);
        assert_eq!(commutator(j3, k1), k2 * I);
        assert_eq!(commutator(k1, k1), Matrix2::zero());
    }

    #[test]
    fn su11_generators_and_commutators() {
        let (k1, k2, j3) = generators_su11();
        assert_eq!(j3, Matrix2::real(0.5, 0.0, 0.0, -0.5));
        assert_eq!(commutator(k1, k2), j3 * -I);
        assert_eq!(commutator(k2, j3), k1 * I);
        assert_eq!(commutator(j3, k1), k2 * I);
    }

    #[test]
    fn su11_is_conjugate_to_sl2r() {
        let u = su11_basis_change();
        let ui = u.inverse().unwrap();
        let (k1, k2, j3) = generators_sl2r();
        let (p1, p2, p3) = generators_su11();
        assert!((u * k1 * ui).max_abs_diff(&p1) < 1e-15);
        assert!((u * k2 * ui).max_abs_diff(&p2) < 1e-15);
        assert!((u * j3 * ui).max_abs_diff(&p3) < 1e-15);
    }

    #[test]
    fn minkowski_products() {
        let t = ThreeVector::new(0.0, 0.0, 1.0);
        let x = ThreeVector::new(1.0, 0.0, 0.0);
        assert_eq!(minkowski_dot(t, t), -1.0);
        assert_eq!(minkowski_dot(x, x), 1.0);
        let s = ThreeVector::new(0.0, -1.0, 1.0);
        assert_eq!(minkowski_dot(s, s), 0.0);
        assert_eq!(minkowski_cross(t, x), ThreeVector::new(0.0, 1.0, 0.0));
        let a = ThreeVector::new(0.3, -1.2, 2.5);
        assert_eq!(minkowski_cross(a, a), ThreeVector::zero());
    }

    #[test]
    fn exp_generator_cases() {
        let j3 = ThreeVector::new(0.0, 0.0, 1.0);
        assert!(exp_generator(j3, 2.0 * PI).max_abs_diff(&-Matrix2::identity()) < 1e-15);
        assert_eq!(exp_generator(ThreeVector::zero(), 3.0), Matrix2::identity());
        let t = 0.7;
        let e = exp_generator(ThreeVector::new(1.0, 0.0, 0.0), t);
        let expect = Matrix2::real((-t / 2.0).exp(), 0.0, 0.0, (t / 2.0).exp());
        assert!(e.max_abs_diff(&expect) < 1e-15);
        // cosh/sinh form of the same entries
        assert!((e.a11.re - ((t / 2.0).cosh() - (t / 2.0).sinh())).abs() < 1e-15);
    }

    #[test]
    fn exp_generator_small_angle_is_continuous() {
        let v = ThreeVector::new(0.3, 0.2, 0.1);
        for scale in [1e-9, 1e-7, 2e-6, 1e-5] {
            let e = exp_generator(v, scale);
            let m = v.dot_generators() * c(0.0, scale);
            let series = Matrix2::identity() + m + m * m * 0.5 + m * m * m * (1.0 / 6.0);
            assert!(e.max_abs_diff(&series) < 1e-15, "scale {scale}");
        }
    }

    #[test]
    fn group_element_cases() {
        assert!(group_element(0.0, 0.0, 0.0).max_abs_diff(&Matrix2::identity()) < 1e-15);
        assert!(group_element(0.0, 0.0, 2.0 * PI).max_abs_diff(&-Matrix2::identity()) < 1e-15);
        let g = group_element(0.4, 1.3, -2.2);
        assert!(g.max_imag() < 1e-12);
        assert!((g.det() - ONE).norm() < 1e-12);
    }

    #[test]
    fn psi0_is_j3_eigenvector() {
        let (_, _, j3) = generators_sl2r();
        let p = psi0();
        let jp = j3.apply(p);
        assert!((jp[0] - p[0] * 0.5).norm() < 1e-16);
        assert!((jp[1] - p[1] * 0.5).norm() < 1e-16);
    }
}
