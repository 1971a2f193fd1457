//! Quaternion- and biquaternion-valued fields on R⁴.
//!
//! Every integrand handed to the operators and the surface quadrature is a
//! [`QField`]. Polynomial fields ([`PolyField`]) are differentiated exactly;
//! the singular kernels ([`Kernel`]) are evaluated from their closed forms.

mod kernel;
mod poly;
mod radial;

pub use kernel::{bi_alt_atanh_coefficients, Kernel, KernelKind};
pub use poly::{gen_exp_poly, PolyField};
pub use radial::{kernel_series_oracle, RadialRational, SERIES_MAX_RATIO, SERIES_MAX_TERMS};

use crate::algebra::{BiQuat, Point};
use crate::error::Result;

/// Which first-order operator annihilates a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regularity {
    /// `D f = 0` (left-regular).
    Left,
    /// `D♯ f = 0`.
    Conjugate,
    /// `D̃ f = 0`.
    Right,
    /// `D̃♯ f = 0`.
    RightConjugate,
    /// `D_H f = 0` (biregular).
    Bi,
    BiConjugate,
    BiRight,
    BiRightConjugate,
}

impl Regularity {
    pub const ALL: [Regularity; 8] = [
        Regularity::Left,
        Regularity::Conjugate,
        Regularity::Right,
        Regularity::RightConjugate,
        Regularity::Bi,
        Regularity::BiConjugate,
        Regularity::BiRight,
        Regularity::BiRightConjugate,
    ];

    pub fn is_right(self) -> bool {
        matches!(
            self,
            Regularity::Right | Regularity::RightConjugate | Regularity::BiRight | Regularity::BiRightConjugate
        )
    }

    pub fn is_conjugate(self) -> bool {
        matches!(
            self,
            Regularity::Conjugate | Regularity::RightConjugate | Regularity::BiConjugate | Regularity::BiRightConjugate
        )
    }

    pub fn is_bi(self) -> bool {
        matches!(
            self,
            Regularity::Bi | Regularity::BiConjugate | Regularity::BiRight | Regularity::BiRightConjugate
        )
    }
}

/// Where a field fails to be defined. Coordinates are real.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SingularLocus {
    /// An isolated singular point.
    pub point: Option<[f64; 4]>,
    /// The line `r̄ = r̄₀` parallel to the w (time) axis.
    pub axis_line: Option<[f64; 3]>,
    /// The light cone `(t − t₀)² = |r̄ − r̄₀|²` with the given apex.
    pub light_cone: Option<[f64; 4]>,
}

impl SingularLocus {
    pub const NONE: SingularLocus = SingularLocus { point: None, axis_line: None, light_cone: None };

    pub fn is_empty(&self) -> bool {
        self.point.is_none() && self.axis_line.is_none() && self.light_cone.is_none()
    }

    /// Euclidean distance from the real part of `p` to the locus.
    pub fn clearance(&self, p: &Point) -> f64 {
        let q = p.re();
        let mut d = f64::INFINITY;
        if let Some(c) = self.point {
            let s: f64 = (0..4).map(|i| (q[i] - c[i]) * (q[i] - c[i])).sum();
            d = d.min(libm::sqrt(s));
        }
        if let Some(c) = self.axis_line {
            let s: f64 = (0..3).map(|i| (q[i + 1] - c[i]) * (q[i + 1] - c[i])).sum();
            d = d.min(libm::sqrt(s));
        }
        if let Some(c) = self.light_cone {
            let dt = libm::fabs(q[0] - c[0]);
            let s: f64 = (0..3).map(|i| (q[i + 1] - c[i + 1]) * (q[i + 1] - c[i + 1])).sum();
            d = d.min(libm::fabs(dt - libm::sqrt(s)) * core::f64::consts::FRAC_1_SQRT_2);
        }
        d
    }

    pub fn union(&self, o: &SingularLocus) -> SingularLocus {
        SingularLocus {
            point: self.point.or(o.point),
            axis_line: self.axis_line.or(o.axis_line),
            light_cone: self.light_cone.or(o.light_cone),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldMeta {
    /// The regularity the field is declared to have, if any.
    pub regularity: Option<Regularity>,
    pub locus: SingularLocus,
}

/// A (bi)quaternion-valued function of a point of R⁴.
pub trait QField {
    fn eval(&self, p: &Point) -> Result<BiQuat>;

    fn meta(&self) -> FieldMeta {
        FieldMeta::default()
    }

    /// Exact polynomial representation, when the field has one.
    fn as_poly(&self) -> Option<&PolyField> {
        None
    }
}

impl<T: QField + ?Sized> QField for &T {
    fn eval(&self, p: &Point) -> Result<BiQuat> {
        (**self).eval(p)
    }
    fn meta(&self) -> FieldMeta {
        (**self).meta()
    }
    fn as_poly(&self) -> Option<&PolyField> {
        (**self).as_poly()
    }
}

/// Constant field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub BiQuat);

impl QField for Constant {
    fn eval(&self, _p: &Point) -> Result<BiQuat> {
        Ok(self.0)
    }
}

/// Pointwise ordered product `a(p)·b(p)`.
#[derive(Debug, Clone, Copy)]
pub struct Product<A, B>(pub A, pub B);

impl<A: QField, B: QField> QField for Product<A, B> {
    fn eval(&self, p: &Point) -> Result<BiQuat> {
        Ok(self.0.eval(p)? * self.1.eval(p)?)
    }

    fn meta(&self) -> FieldMeta {
        let (a, b) = (self.0.meta(), self.1.meta());
        FieldMeta { regularity: None, locus: a.locus.union(&b.locus) }
    }
}

/// A field backed by a closure.
pub struct FnField<F> {
    f: F,
    meta: FieldMeta,
}

impl<F: Fn(&Point) -> Result<BiQuat>> FnField<F> {
    pub fn new(f: F) -> Self {
        Self { f, meta: FieldMeta::default() }
    }

    pub fn with_meta(f: F, meta: FieldMeta) -> Self {
        Self { f, meta }
    }
}

impl<F: Fn(&Point) -> Result<BiQuat>> QField for FnField<F> {
    fn eval(&self, p: &Point) -> Result<BiQuat> {
        (self.f)(p)
    }
    fn meta(&self) -> FieldMeta {
        self.meta
    }
}
