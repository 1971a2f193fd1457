use super::kernel::{Kernel, KernelKind};
use super::PolyField;
use crate::algebra::{BiQuat, Point, C64, I_C, ONE_C};
use crate::error::{Error, Result};

/// Largest `|w|/r` accepted by [`kernel_series_oracle`].
pub const SERIES_MAX_RATIO: f64 = 0.5;
pub const SERIES_MAX_TERMS: usize = 12;

/// `P(x, y, z) / r^m` with a spatial polynomial numerator.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialRational {
    pub num: PolyField,
    pub m: u32,
}

impl RadialRational {
    pub fn new(num: PolyField, m: u32) -> Result<Self> {
        if num.depends_on_w() {
            return Err(Error::NotSpatial);
        }
        Ok(Self { num, m })
    }

    /// `∇̄(P r^{−m}) = [(∇̄P) r² − m r̄ P] r^{−m−2}`, basis quaternions on the left.
    pub fn nabla_left(&self) -> Self {
        let r2: PolyField = "x^2 + y^2 + z^2".parse().expect("static polynomial");
        let rbar = PolyField::position() - PolyField::coordinate(0);
        let num = self.num.nabla_left().mul(&r2) - rbar.mul(&self.num).scale(C64::new(self.m as f64, 0.0));
        Self { num, m: self.m + 2 }
    }

    pub fn eval(&self, p: &Point) -> Result<BiQuat> {
        let s = p.spatial();
        let r2 = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
        if r2.norm() == 0.0 {
            return Err(Error::OnSingularLocus);
        }
        let r = r2.sqrt();
        Ok(self.num.eval_at(p) / r.powu(self.m))
    }
}

/// Generator of a kernel: `(sign, G)` with kernel `= sign · e^{−w∇̄} G`.
fn generator(kind: KernelKind) -> (f64, RadialRational) {
    let poly = |s: &str| s.parse::<PolyField>().expect("static polynomial");
    match kind {
        KernelKind::FueterH | KernelKind::BiFueter => (-1.0, RadialRational { num: poly("x*I + y*J + z*K"), m: 4 }),
        KernelKind::FueterHSharp => (1.0, RadialRational { num: poly("x*I + y*J + z*K"), m: 4 }),
        KernelKind::AltAxis(a) | KernelKind::BiAltAxis(a) => {
            (1.0, RadialRational { num: PolyField::coordinate(a), m: 4 })
        }
        KernelKind::ZeroRadial => (1.0, RadialRational { num: poly("1"), m: 3 }),
    }
}

/// Truncated series `Σ_{n<N} (−w)ⁿ/n! ∇̄ⁿ G` for a kernel's generator.
///
/// Bi kernels use `−it` in place of `−w`; conjugate and reflected kernels use `+w`.
pub fn kernel_series_oracle(k: &Kernel, p: &Point, n_terms: usize) -> Result<BiQuat> {
    if n_terms == 0 || n_terms > SERIES_MAX_TERMS {
        return Err(Error::BadParameters("series term count must be in 1..=12"));
    }
    let local = Point(p.sub(&Point::from_real(k.offset)).0);
    let s = local.spatial();
    let r = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
    let w = local.w();
    if r.norm() == 0.0 || w.norm() / r.norm() > SERIES_MAX_RATIO {
        return Err(Error::ConvergenceDomain);
    }
    let (sign, mut g) = generator(k.kind);
    // The expansion variable multiplying ∇̄ in the exponent.
    let mut step = if k.kind.is_bi() { -I_C * w } else { -w };
    if k.kind == KernelKind::FueterHSharp {
        step = -step;
    }
    if k.reflected {
        step = -step;
    }
    let mut coeff = ONE_C;
    let mut acc = crate::sum::Accumulator::new();
    for n in 0..n_terms {
        acc.add(g.eval(&local)? * coeff);
        coeff = coeff * step / ((n + 1) as f64);
        g = g.nabla_left();
    }
    let total: BiQuat = acc.total();
    Ok(total * sign)
}
