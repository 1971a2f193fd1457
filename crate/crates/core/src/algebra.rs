//! Quaternion and biquaternion values.
//!
//! A [`BiQuat`] carries four complex coordinates `w + xI + yJ + zK`. Real
//! quaternions are the special case with vanishing imaginary parts and are not
//! a separate type; [`BiQuat::is_quaternion`] is the predicate.

use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO_C: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE_C: C64 = C64::new(1.0, 0.0);
pub(crate) const I_C: C64 = C64::new(0.0, 1.0);

/// Relative size below which a norm is treated as zero.
pub const DEGENERACY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiQuat {
    pub w: C64,
    pub x: C64,
    pub y: C64,
    pub z: C64,
}

impl Default for BiQuat {
    fn default() -> Self {
        Self::ZERO
    }
}

impl BiQuat {
    pub const ZERO: BiQuat = BiQuat { w: ZERO_C, x: ZERO_C, y: ZERO_C, z: ZERO_C };
    pub const ONE: BiQuat = BiQuat { w: ONE_C, x: ZERO_C, y: ZERO_C, z: ZERO_C };
    pub const I: BiQuat = BiQuat { w: ZERO_C, x: ONE_C, y: ZERO_C, z: ZERO_C };
    pub const J: BiQuat = BiQuat { w: ZERO_C, x: ZERO_C, y: ONE_C, z: ZERO_C };
    pub const K: BiQuat = BiQuat { w: ZERO_C, x: ZERO_C, y: ZERO_C, z: ONE_C };
    /// The commuting imaginary unit `i`.
    pub const IMAG: BiQuat = BiQuat { w: I_C, x: ZERO_C, y: ZERO_C, z: ZERO_C };

    pub const fn new(w: C64, x: C64, y: C64, z: C64) -> Self {
        Self { w, x, y, z }
    }

    pub const fn real(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self {
            w: C64::new(w, 0.0),
            x: C64::new(x, 0.0),
            y: C64::new(y, 0.0),
            z: C64::new(z, 0.0),
        }
    }

    pub const fn scalar(s: C64) -> Self {
        Self { w: s, x: ZERO_C, y: ZERO_C, z: ZERO_C }
    }

    /// Basis element by index: 0 → 1, 1 → I, 2 → J, 3 → K.
    pub const fn basis(index: usize) -> Self {
        match index {
            0 => Self::ONE,
            1 => Self::I,
            2 => Self::J,
            _ => Self::K,
        }
    }

    /// Pure vector `aI + bJ + cK`.
    pub fn vector(v: [C64; 3]) -> Self {
        Self { w: ZERO_C, x: v[0], y: v[1], z: v[2] }
    }

    /// The Hermitian biquaternion `t + i(xI + yJ + zK)` of a spacetime event.
    pub fn hermitian(t: f64, r: [f64; 3]) -> Self {
        Self {
            w: C64::new(t, 0.0),
            x: C64::new(0.0, r[0]),
            y: C64::new(0.0, r[1]),
            z: C64::new(0.0, r[2]),
        }
    }

    pub fn coords(&self) -> [C64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn from_coords(c: [C64; 4]) -> Self {
        Self { w: c[0], x: c[1], y: c[2], z: c[3] }
    }

    /// Components in the fixed layout `[Re w, Im w, Re x, Im x, Re y, Im y, Re z, Im z]`.
    pub fn components(&self) -> [f64; 8] {
        [
            self.w.re, self.w.im, self.x.re, self.x.im, self.y.re, self.y.im, self.z.re, self.z.im,
        ]
    }

    pub fn from_components(c: [f64; 8]) -> Self {
        Self {
            w: C64::new(c[0], c[1]),
            x: C64::new(c[2], c[3]),
            y: C64::new(c[4], c[5]),
            z: C64::new(c[6], c[7]),
        }
    }

    pub fn scalar_part(&self) -> C64 {
        self.w
    }

    pub fn vector_part(&self) -> [C64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.is_finite())
    }

    /// True iff every coordinate has an exactly zero imaginary part.
    pub fn is_quaternion(&self) -> bool {
        self.w.im == 0.0 && self.x.im == 0.0 && self.y.im == 0.0 && self.z.im == 0.0
    }

    /// True iff the scalar part is real and the vector part purely imaginary.
    pub fn is_hermitian(&self) -> bool {
        self.w.im == 0.0 && self.x.re == 0.0 && self.y.re == 0.0 && self.z.re == 0.0
    }

    /// Quaternion conjugate `q♯`: negates the vector part.
    pub fn qconj(&self) -> Self {
        Self { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    /// Complex conjugate `q*`: conjugates each coordinate.
    pub fn cconj(&self) -> Self {
        Self { w: self.w.conj(), x: self.x.conj(), y: self.y.conj(), z: self.z.conj() }
    }

    /// Hermitian conjugate `q♯*`.
    pub fn hconj(&self) -> Self {
        self.qconj().cconj()
    }

    /// `q q♯ = w² + x² + y² + z²`, complex in general.
    pub fn norm2(&self) -> C64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// Largest modulus among the four coordinates.
    pub fn max_coord(&self) -> f64 {
        self.coords().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute difference over the eight real components.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let a = self.components();
        let b = other.components();
        a.iter().zip(b.iter()).map(|(p, q)| libm::fabs(p - q)).fold(0.0, f64::max)
    }

    /// Largest absolute real component.
    pub fn max_abs(&self) -> f64 {
        self.max_abs_diff(&Self::ZERO)
    }

    /// Euclidean norm of the eight real components.
    pub fn euclid(&self) -> f64 {
        libm::sqrt(self.components().iter().map(|c| c * c).sum())
    }

    fn degenerate(&self, n: C64) -> bool {
        let scale = self.max_coord();
        n.norm() <= DEGENERACY * scale * scale
    }

    /// `a⁻¹ = a♯ / N(a)`.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.norm2();
        if self.degenerate(n) {
            return Err(Error::NonInvertible);
        }
        Ok(self.qconj() * (ONE_C / n))
    }

    /// Polar form `r(cos θ + n̂ sin θ)` of a real quaternion.
    ///
    /// A pure scalar gets the canonical axis `I`; a negative scalar maps to
    /// `θ = π`, the single value the half-open range cannot represent.
    pub fn polar(&self) -> Result<PolarQuat> {
        if !self.is_quaternion() {
            return Err(Error::BadParameters("polar form requires a real quaternion"));
        }
        let w = self.w.re;
        let v = [self.x.re, self.y.re, self.z.re];
        let vn = libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        let r = libm::sqrt(w * w + vn * vn);
        let theta = libm::atan2(vn, w);
        let n = if vn > 0.0 { [v[0] / vn, v[1] / vn, v[2] / vn] } else { [1.0, 0.0, 0.0] };
        Ok(PolarQuat { r, theta, n })
    }

    /// Minkowskian polar form of a Hermitian biquaternion `t + i r̄`.
    pub fn polar_h(&self) -> Result<PolarHermitian> {
        if !self.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        let t = self.w.re;
        let v = [self.x.im, self.y.im, self.z.im];
        let vn = libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        let n2 = t * t - vn * vn;
        let scale = libm::fmax(libm::fabs(t), vn);
        if libm::fabs(n2) <= DEGENERACY * scale * scale {
            return Err(Error::NullDisplacement);
        }
        let sign = |s: f64| if s < 0.0 { -1.0 } else { 1.0 };
        let unit = |k: f64| {
            if vn > 0.0 {
                [k * v[0] / vn, k * v[1] / vn, k * v[2] / vn]
            } else {
                [1.0, 0.0, 0.0]
            }
        };
        if n2 > 0.0 {
            // t = r cosh θ, r̄ = r sinh θ n̂
            let r = sign(t) * libm::sqrt(n2);
            let theta = libm::asinh(vn / libm::fabs(r));
            Ok(PolarHermitian { r, theta, n: unit(sign(r)), kind: Displacement::Timelike })
        } else {
            // t = r sinh θ, r̄ = r cosh θ n̂
            let r = sign(t) * libm::sqrt(-n2);
            let theta = libm::asinh(libm::fabs(t) / libm::fabs(r));
            Ok(PolarHermitian { r, theta, n: unit(sign(r)), kind: Displacement::Spacelike })
        }
    }

    /// Lorentz transformation `p → q p q♯*` of a Hermitian event `self`.
    pub fn lorentz(&self, q: &BiQuat) -> Result<Self> {
        if !self.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        if (q.norm2() - ONE_C).norm() >= 1e-10 {
            return Err(Error::NotUnitNorm);
        }
        let mut out = *q * *self * q.hconj();
        // Products leave rounding-level debris in the non-Hermitian slots.
        out.w.im = 0.0;
        out.x.re = 0.0;
        out.y.re = 0.0;
        out.z.re = 0.0;
        Ok(out)
    }

    /// Rotation `e^{θn̂/2} p e^{−θn̂/2}` about the unit axis `n`.
    pub fn rotate(&self, theta: f64, n: [f64; 3]) -> Self {
        let (s, c) = (libm::sin(0.5 * theta), libm::cos(0.5 * theta));
        let q = BiQuat::real(c, s * n[0], s * n[1], s * n[2]);
        q * *self * q.qconj()
    }
}

impl Add for BiQuat {
    type Output = BiQuat;
    fn add(self, o: BiQuat) -> BiQuat {
        BiQuat { w: self.w + o.w, x: self.x + o.x, y: self.y + o.y, z: self.z + o.z }
    }
}

impl AddAssign for BiQuat {
    fn add_assign(&mut self, o: BiQuat) {
        *self = *self + o;
    }
}

impl Sub for BiQuat {
    type Output = BiQuat;
    fn sub(self, o: BiQuat) -> BiQuat {
        BiQuat { w: self.w - o.w, x: self.x - o.x, y: self.y - o.y, z: self.z - o.z }
    }
}

impl SubAssign for BiQuat {
    fn sub_assign(&mut self, o: BiQuat) {
        *self = *self - o;
    }
}

impl Neg for BiQuat {
    type Output = BiQuat;
    fn neg(self) -> BiQuat {
        BiQuat { w: -self.w, x: -self.x, y: -self.y, z: -self.z }
    }
}

/// Hamilton product: `(a_w b_w − ā·b̄) + (a_w b̄ + b_w ā + ā×b̄)`.
impl Mul for BiQuat {
    type Output = BiQuat;
    fn mul(self, b: BiQuat) -> BiQuat {
        let a = self;
        BiQuat {
            w: a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            x: a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            y: a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            z: a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        }
    }
}

impl Mul<C64> for BiQuat {
    type Output = BiQuat;
    fn mul(self, s: C64) -> BiQuat {
        BiQuat { w: self.w * s, x: self.x * s, y: self.y * s, z: self.z * s }
    }
}

impl Mul<f64> for BiQuat {
    type Output = BiQuat;
    fn mul(self, s: f64) -> BiQuat {
        BiQuat { w: self.w * s, x: self.x * s, y: self.y * s, z: self.z * s }
    }
}

impl Mul<BiQuat> for C64 {
    type Output = BiQuat;
    fn mul(self, q: BiQuat) -> BiQuat {
        q * self
    }
}

impl Mul<BiQuat> for f64 {
    type Output = BiQuat;
    fn mul(self, q: BiQuat) -> BiQuat {
        q * self
    }
}

impl Div<f64> for BiQuat {
    type Output = BiQuat;
    fn div(self, s: f64) -> BiQuat {
        self * (1.0 / s)
    }
}

impl Div<C64> for BiQuat {
    type Output = BiQuat;
    fn div(self, s: C64) -> BiQuat {
        self * (ONE_C / s)
    }
}

impl core::iter::Sum for BiQuat {
    fn sum<It: Iterator<Item = BiQuat>>(iter: It) -> BiQuat {
        iter.fold(BiQuat::ZERO, |a, b| a + b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarQuat {
    pub r: f64,
    pub theta: f64,
    pub n: [f64; 3],
}

impl PolarQuat {
    pub fn to_quat(&self) -> BiQuat {
        let (s, c) = (libm::sin(self.theta), libm::cos(self.theta));
        BiQuat::real(self.r * c, self.r * s * self.n[0], self.r * s * self.n[1], self.r * s * self.n[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Displacement {
    Timelike,
    Spacelike,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarHermitian {
    pub r: f64,
    pub theta: f64,
    pub n: [f64; 3],
    pub kind: Displacement,
}

impl PolarHermitian {
    pub fn to_biquat(&self) -> BiQuat {
        let (ch, sh) = (libm::cosh(self.theta), libm::sinh(self.theta));
        let (a, b) = match self.kind {
            Displacement::Timelike => (ch, sh),
            Displacement::Spacelike => (sh, ch),
        };
        let r = self.r;
        BiQuat::hermitian(r * a, [r * b * self.n[0], r * b * self.n[1], r * b * self.n[2]])
    }
}

/// Coordinates `(w, x, y, z)` of a point of R⁴, possibly continued into the
/// complex domain along deformed integration surfaces. For biquaternion fields
/// `w` plays the role of the time coordinate `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point(pub [C64; 4]);

impl Point {
    pub fn real(w: f64, x: f64, y: f64, z: f64) -> Self {
        Point([C64::new(w, 0.0), C64::new(x, 0.0), C64::new(y, 0.0), C64::new(z, 0.0)])
    }

    pub fn from_real(c: [f64; 4]) -> Self {
        Self::real(c[0], c[1], c[2], c[3])
    }

    pub fn w(&self) -> C64 {
        self.0[0]
    }

    pub fn spatial(&self) -> [C64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    pub fn re(&self) -> [f64; 4] {
        [self.0[0].re, self.0[1].re, self.0[2].re, self.0[3].re]
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|c| c.im == 0.0)
    }

    /// Shift coordinate `axis` by the real amount `h`.
    pub fn shifted(&self, axis: usize, h: f64) -> Self {
        let mut p = *self;
        p.0[axis] += h;
        p
    }

    pub fn sub(&self, o: &Point) -> Self {
        Point([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2], self.0[3] - o.0[3]])
    }

    pub fn add(&self, o: &Point) -> Self {
        Point([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2], self.0[3] + o.0[3]])
    }

    /// Euclidean magnitude of the real parts.
    pub fn norm_re(&self) -> f64 {
        let r = self.re();
        libm::sqrt(r.iter().map(|c| c * c).sum())
    }

    /// The position quaternion `w + xI + yJ + zK`.
    pub fn quaternion(&self) -> BiQuat {
        BiQuat::from_coords(self.0)
    }

    /// The Hermitian position `t + i(xI + yJ + zK)`.
    pub fn hermitian(&self) -> BiQuat {
        BiQuat::new(self.0[0], I_C * self.0[1], I_C * self.0[2], I_C * self.0[3])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &BiQuat, b: &BiQuat, tol: f64) -> bool {
        a.max_abs_diff(b) <= tol
    }

    #[test]
    fn basis_products() {
        assert_eq!(BiQuat::I * BiQuat::J, BiQuat::K);
        assert_eq!(BiQuat::J * BiQuat::I, -BiQuat::K);
        assert_eq!(BiQuat::J * BiQuat::K, BiQuat::I);
        assert_eq!(BiQuat::K * BiQuat::I, BiQuat::J);
        assert_eq!(BiQuat::I * BiQuat::I, -BiQuat::ONE);
        assert_eq!(BiQuat::I * BiQuat::J * BiQuat::K, -BiQuat::ONE);
        let q = BiQuat::new(C64::new(1.0, 2.0), C64::new(-0.5, 0.1), C64::new(3.0, 0.0), C64::new(0.0, -1.0));
        assert_eq!(q * BiQuat::ONE, q);
        assert_eq!(BiQuat::ONE * q, q);
    }

    #[test]
    fn zero_divisor() {
        let a = BiQuat::ONE + BiQuat::IMAG * BiQuat::I;
        let b = BiQuat::ONE - BiQuat::IMAG * BiQuat::I;
        assert_eq!(a * b, BiQuat::ZERO);
        assert_eq!(a.norm2(), C64::new(0.0, 0.0));
        assert_eq!(a.inverse(), Err(Error::NonInvertible));
    }

    #[test]
    fn conjugates() {
        let a = BiQuat::real(1.0, 2.0, 0.0, 0.0);
        assert_eq!(a.qconj(), BiQuat::real(1.0, -2.0, 0.0, 0.0));
        let h = BiQuat::hermitian(0.7, [1.3, 0.0, 0.0]);
        assert_eq!(h.hconj(), h);
        assert!(h.is_hermitian());
        assert!(!h.is_quaternion());
        assert!(a.is_quaternion());
    }

    #[test]
    fn norms() {
        assert_eq!(BiQuat::real(1.0, 1.0, 0.0, 0.0).norm2(), C64::new(2.0, 0.0));
        let phi: f64 = 0.7;
        let b = BiQuat::hermitian(phi.cosh(), [phi.sinh(), 0.0, 0.0]);
        assert!((b.norm2() - ONE_C).norm() < 1e-14);
    }

    #[test]
    fn inverses() {
        assert_eq!(BiQuat::real(2.0, 0.0, 0.0, 0.0).inverse().unwrap(), BiQuat::real(0.5, 0.0, 0.0, 0.0));
        assert_eq!(BiQuat::I.inverse().unwrap(), -BiQuat::I);
        let q = BiQuat::new(C64::new(1.0, 0.3), C64::new(0.2, -1.0), C64::new(0.5, 0.5), C64::new(-2.0, 0.1));
        assert!(close(&(q * q.inverse().unwrap()), &BiQuat::ONE, 1e-12));
    }

    #[test]
    fn polar_examples() {
        let p = BiQuat::ONE.polar().unwrap();
        assert_eq!((p.r, p.theta, p.n), (1.0, 0.0, [1.0, 0.0, 0.0]));
        let p = BiQuat::I.polar().unwrap();
        assert_eq!(p.r, 1.0);
        assert!((p.theta - core::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(p.n, [1.0, 0.0, 0.0]);
        let q = BiQuat::real(-0.3, 1.2, -0.4, 2.0);
        let p = q.polar().unwrap();
        assert!(p.theta >= 0.0 && p.theta < core::f64::consts::PI);
        assert!(close(&p.to_quat(), &q, 1e-12 * 2.5));
    }

    #[test]
    fn polar_hermitian_examples() {
        let p = BiQuat::hermitian(1f64.cosh(), [1f64.sinh(), 0.0, 0.0]).polar_h().unwrap();
        assert_eq!(p.kind, Displacement::Timelike);
        assert!((p.r - 1.0).abs() < 1e-14 && (p.theta - 1.0).abs() < 1e-14);
        assert!((p.n[0] - 1.0).abs() < 1e-15);
        for (t, r) in [(-2.0, [0.3, -0.4, 1.0]), (0.5, [1.0, 2.0, -0.1]), (-0.2, [0.0, 0.0, 3.0]), (0.0, [1.0, 0.0, 0.0])] {
            let h = BiQuat::hermitian(t, r);
            let p = h.polar_h().unwrap();
            assert!(p.theta >= 0.0);
            assert!(close(&p.to_biquat(), &h, 1e-12 * 3.0), "{t} {r:?}");
        }
        assert_eq!(BiQuat::hermitian(1.0, [0.0, 1.0, 0.0]).polar_h(), Err(Error::NullDisplacement));
        assert_eq!(BiQuat::I.polar_h(), Err(Error::NotHermitian));
    }

    #[test]
    fn lorentz_boost() {
        let p = BiQuat::hermitian(0.4, [1.0, -2.0, 0.5]);
        assert_eq!(p.lorentz(&BiQuat::ONE).unwrap(), p);
        let phi: f64 = 0.3;
        let q = BiQuat::hermitian(phi.cosh(), [phi.sinh(), 0.0, 0.0]);
        let out = BiQuat::ONE.lorentz(&q).unwrap();
        let want = BiQuat::hermitian((2.0 * phi).cosh(), [(2.0 * phi).sinh(), 0.0, 0.0]);
        assert!(close(&out, &want, 1e-14));
        assert_eq!(p.lorentz(&BiQuat::real(2.0, 0.0, 0.0, 0.0)), Err(Error::NotUnitNorm));
        assert_eq!(BiQuat::I.lorentz(&BiQuat::ONE), Err(Error::NotHermitian));
    }

    #[test]
    fn rotation_fixes_axis() {
        let n = [0.0, 0.6, 0.8];
        let axis = BiQuat::real(0.0, n[0], n[1], n[2]);
        assert!(close(&axis.rotate(1.1, n), &axis, 1e-15));
        let v = BiQuat::real(0.0, 1.0, 0.0, 0.0).rotate(core::f64::consts::FRAC_PI_2, [0.0, 0.0, 1.0]);
        assert!(close(&v, &BiQuat::J, 1e-15));
    }
}
