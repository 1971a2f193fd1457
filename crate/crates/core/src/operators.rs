//! The eight first-order regularity operators and second-order checks.
//!
//! Polynomial fields are differentiated exactly; everything else goes through
//! central finite differences stepping along the real coordinate axes.

use crate::algebra::{BiQuat, Point, I_C};
use crate::error::{Error, Result};
use crate::fields::{QField, Regularity};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdScheme {
    /// Central-difference order: 2, 4 or 6.
    pub order: u8,
    /// Base step; `None` selects `1e-3·(1 + |p|)`.
    pub h: Option<f64>,
    /// Per-axis multipliers of the step.
    pub scale: [f64; 4],
}

impl Default for FdScheme {
    fn default() -> Self {
        Self { order: 4, h: None, scale: [1.0; 4] }
    }
}

impl FdScheme {
    pub fn new(order: u8, h: f64) -> Result<Self> {
        if !matches!(order, 2 | 4 | 6) {
            return Err(Error::BadParameters("finite-difference order must be 2, 4 or 6"));
        }
        if !(h > 0.0) {
            return Err(Error::BadParameters("finite-difference step must be positive"));
        }
        Ok(Self { order, h: Some(h), scale: [1.0; 4] })
    }

    fn step(&self, p: &Point, axis: usize) -> f64 {
        let base = self.h.unwrap_or_else(|| 1e-3 * (1.0 + p.norm_re()));
        base * self.scale[axis]
    }

    fn first_weights(&self) -> &'static [(i32, f64)] {
        match self.order {
            2 => &[(1, 0.5), (-1, -0.5)],
            6 => &[(3, 1.0 / 60.0), (2, -9.0 / 60.0), (1, 45.0 / 60.0), (-1, -45.0 / 60.0), (-2, 9.0 / 60.0), (-3, -1.0 / 60.0)],
            _ => &[(2, -1.0 / 12.0), (1, 8.0 / 12.0), (-1, -8.0 / 12.0), (-2, 1.0 / 12.0)],
        }
    }

    fn second_weights(&self) -> &'static [(i32, f64)] {
        match self.order {
            2 => &[(1, 1.0), (0, -2.0), (-1, 1.0)],
            6 => &[
                (3, 2.0 / 180.0),
                (2, -27.0 / 180.0),
                (1, 270.0 / 180.0),
                (0, -490.0 / 180.0),
                (-1, 270.0 / 180.0),
                (-2, -27.0 / 180.0),
                (-3, 2.0 / 180.0),
            ],
            _ => &[(2, -1.0 / 12.0), (1, 16.0 / 12.0), (0, -30.0 / 12.0), (-1, 16.0 / 12.0), (-2, -1.0 / 12.0)],
        }
    }

    fn reach(&self) -> f64 {
        (self.order / 2) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorId {
    /// `∂_w + I∂_x + J∂_y + K∂_z`, basis on the left.
    D,
    DSharp,
    /// `∂_w f + ∂_x f I + ∂_y f J + ∂_z f K`.
    DTilde,
    DTildeSharp,
    /// `∂_t + i(I∂_x + J∂_y + K∂_z)`.
    DH,
    DHSharp,
    DHTilde,
    DHTildeSharp,
}

impl OperatorId {
    pub const ALL: [OperatorId; 8] = [
        OperatorId::D,
        OperatorId::DSharp,
        OperatorId::DTilde,
        OperatorId::DTildeSharp,
        OperatorId::DH,
        OperatorId::DHSharp,
        OperatorId::DHTilde,
        OperatorId::DHTildeSharp,
    ];

    /// The operator annihilating fields of the given regularity.
    pub fn for_regularity(r: Regularity) -> Self {
        match r {
            Regularity::Left => OperatorId::D,
            Regularity::Conjugate => OperatorId::DSharp,
            Regularity::Right => OperatorId::DTilde,
            Regularity::RightConjugate => OperatorId::DTildeSharp,
            Regularity::Bi => OperatorId::DH,
            Regularity::BiConjugate => OperatorId::DHSharp,
            Regularity::BiRight => OperatorId::DHTilde,
            Regularity::BiRightConjugate => OperatorId::DHTildeSharp,
        }
    }

    /// Combine the four partial derivatives `[∂_w f, ∂_x f, ∂_y f, ∂_z f]`.
    pub fn combine(self, d: &[BiQuat; 4]) -> BiQuat {
        let (right, sign, bi) = match self {
            OperatorId::D => (false, 1.0, false),
            OperatorId::DSharp => (false, -1.0, false),
            OperatorId::DTilde => (true, 1.0, false),
            OperatorId::DTildeSharp => (true, -1.0, false),
            OperatorId::DH => (false, 1.0, true),
            OperatorId::DHSharp => (false, -1.0, true),
            OperatorId::DHTilde => (true, 1.0, true),
            OperatorId::DHTildeSharp => (true, -1.0, true),
        };
        let mut v = BiQuat::ZERO;
        for a in 1..4 {
            let e = BiQuat::basis(a);
            v += if right { d[a] * e } else { e * d[a] };
        }
        if bi {
            v = v * I_C;
        }
        d[0] + v * sign
    }
}

fn check_stencil<F: QField + ?Sized>(f: &F, p: &Point, scheme: &FdScheme) -> Result<()> {
    let locus = f.meta().locus;
    if locus.is_empty() {
        return Ok(());
    }
    let reach = (0..4).map(|a| scheme.step(p, a)).fold(0.0, f64::max) * scheme.reach();
    if locus.clearance(p) <= reach {
        return Err(Error::StencilHitsSingularity);
    }
    Ok(())
}

/// `∂f/∂(axis)` at `p`: exact for polynomials, central differences otherwise.
pub fn partial<F: QField + ?Sized>(f: &F, p: &Point, axis: usize, scheme: &FdScheme) -> Result<BiQuat> {
    if let Some(poly) = f.as_poly() {
        return Ok(poly.derivative(axis).eval_at(p));
    }
    check_stencil(f, p, scheme)?;
    let h = scheme.step(p, axis);
    let mut acc = crate::sum::Accumulator::new();
    for &(k, c) in scheme.first_weights() {
        acc.add(f.eval(&p.shifted(axis, k as f64 * h))? * c);
    }
    let s: BiQuat = acc.total();
    Ok(s / h)
}

/// `∂²f/∂(axis)²` at `p`.
pub fn second_partial<F: QField + ?Sized>(f: &F, p: &Point, axis: usize, scheme: &FdScheme) -> Result<BiQuat> {
    if let Some(poly) = f.as_poly() {
        return Ok(poly.derivative(axis).derivative(axis).eval_at(p));
    }
    check_stencil(f, p, scheme)?;
    let h = scheme.step(p, axis);
    let mut acc = crate::sum::Accumulator::new();
    for &(k, c) in scheme.second_weights() {
        acc.add(f.eval(&p.shifted(axis, k as f64 * h))? * c);
    }
    let s: BiQuat = acc.total();
    Ok(s / (h * h))
}

pub fn gradient<F: QField + ?Sized>(f: &F, p: &Point, scheme: &FdScheme) -> Result<[BiQuat; 4]> {
    Ok([
        partial(f, p, 0, scheme)?,
        partial(f, p, 1, scheme)?,
        partial(f, p, 2, scheme)?,
        partial(f, p, 3, scheme)?,
    ])
}

pub fn apply_operator<F: QField + ?Sized>(op: OperatorId, f: &F, p: &Point, scheme: &FdScheme) -> Result<BiQuat> {
    Ok(op.combine(&gradient(f, p, scheme)?))
}

/// Euclidean norm of the eight components of the annihilating operator applied to `f`.
pub fn regularity_residual<F: QField + ?Sized>(f: &F, p: &Point, variant: Regularity, scheme: &FdScheme) -> Result<f64> {
    Ok(apply_operator(OperatorId::for_regularity(variant), f, p, scheme)?.euclid())
}

/// `∂_w² + ∂_x² + ∂_y² + ∂_z²`.
pub fn laplace4<F: QField + ?Sized>(f: &F, p: &Point, scheme: &FdScheme) -> Result<BiQuat> {
    let mut v = BiQuat::ZERO;
    for a in 0..4 {
        v += second_partial(f, p, a, scheme)?;
    }
    Ok(v)
}

/// `∂_t² − ∂_x² − ∂_y² − ∂_z²`.
pub fn wave_op<F: QField + ?Sized>(f: &F, p: &Point, scheme: &FdScheme) -> Result<BiQuat> {
    let mut v = second_partial(f, p, 0, scheme)?;
    for a in 1..4 {
        v -= second_partial(f, p, a, scheme)?;
    }
    Ok(v)
}

/// Relative agreement demanded of the two finite-difference derivative estimates.
pub const FD_TOL: f64 = 1e-6;

/// The derivative `∇̄f` of a left-regular field, checked against `−∂_w f`.
pub fn derivative_regular<F: QField + ?Sized>(f: &F, p: &Point, scheme: &FdScheme) -> Result<BiQuat> {
    let d = gradient(f, p, scheme)?;
    let nabla = BiQuat::I * d[1] + BiQuat::J * d[2] + BiQuat::K * d[3];
    let tol = if f.as_poly().is_some() { 1e-12 } else { 10.0 * FD_TOL };
    let scale = nabla.max_abs().max(1.0);
    if (nabla + d[0]).max_abs() > tol * scale {
        return Err(Error::NotRegularHere);
    }
    Ok(nabla)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Constant, Kernel, KernelKind, PolyField};

    fn poly(s: &str) -> PolyField {
        s.parse().unwrap()
    }

    #[test]
    fn exact_polynomial_operators() {
        let p = Point::real(0.3, -1.0, 2.0, 0.5);
        let s = FdScheme::default();
        let q = PolyField::position();
        assert_eq!(apply_operator(OperatorId::D, &q, &p, &s).unwrap(), BiQuat::real(-2.0, 0.0, 0.0, 0.0));
        let qs = poly("w - x*I - y*J - z*K");
        assert_eq!(regularity_residual(&qs, &p, Regularity::Left, &s).unwrap(), 4.0);
        assert_eq!(regularity_residual(&poly("x - w*I"), &p, Regularity::Left, &s).unwrap(), 0.0);
        assert_eq!(apply_operator(OperatorId::D, &Constant(BiQuat::J), &p, &s).unwrap(), BiQuat::ZERO);
        assert_eq!(laplace4(&poly("w^2 + x^2"), &p, &s).unwrap(), BiQuat::real(4.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn fueter_kernel_is_left_regular() {
        let h = Kernel::new(KernelKind::FueterH, [0.0; 4]);
        let p = Point::real(1.0, 1.0, 0.0, 0.0);
        let v = apply_operator(OperatorId::D, &h, &p, &FdScheme::default()).unwrap();
        assert!(v.euclid() < 1e-6);
        let g = derivative_regular(&h, &p, &FdScheme::default()).unwrap();
        let dw = partial(&h, &p, 0, &FdScheme::default()).unwrap();
        assert!((g + dw).max_abs() < 1e-6);
    }

    #[test]
    fn stencil_clearance() {
        let h = Kernel::new(KernelKind::FueterH, [0.0; 4]);
        let p = Point::real(1e-4, 0.0, 0.0, 0.0);
        assert_eq!(
            apply_operator(OperatorId::D, &h, &p, &FdScheme::default()),
            Err(Error::StencilHitsSingularity)
        );
    }

    #[test]
    fn derivative_of_regular_polynomial() {
        let p = Point::real(0.2, 0.1, 0.0, -0.3);
        assert_eq!(derivative_regular(&poly("x - w*I"), &p, &FdScheme::default()).unwrap(), BiQuat::I);
        assert_eq!(derivative_regular(&poly("x"), &p, &FdScheme::default()), Err(Error::NotRegularHere));
    }

    #[test]
    fn scheme_validation() {
        assert!(FdScheme::new(3, 1e-3).is_err());
        assert!(FdScheme::new(4, 0.0).is_err());
    }
}
