use super::{FieldMeta, QField, Regularity, SingularLocus};
use crate::algebra::{BiQuat, Point, C64, I_C, ONE_C};
use crate::contour::AtanhBranch;
use crate::error::{Error, Result};

/// Relative size below which a kernel denominator counts as vanishing.
const LOCUS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// `H(q) = q♯/|q|⁴`, both left- and right-regular.
    FueterH,
    /// `H♯(q) = q/|q|⁴`, the conjugate-regular partner of `H`.
    FueterHSharp,
    /// `e^{−w∇̄}(x_a/r⁴)` for spatial axis `a ∈ {1, 2, 3}`.
    AltAxis(usize),
    /// `e^{−w∇̄}(1/r³)`.
    ZeroRadial,
    /// `e^{−it∇̄}(x_a/r⁴)`.
    BiAltAxis(usize),
    /// `−e^{−it∇̄}(r̄/r⁴) = i q/|q|⁴` with `q = t + i r̄`.
    BiFueter,
}

impl KernelKind {
    pub fn is_bi(self) -> bool {
        matches!(self, KernelKind::BiAltAxis(_) | KernelKind::BiFueter)
    }

    /// Kernels singular on the whole line `r̄ = r̄₀` rather than at a point.
    pub fn is_axis_singular(self) -> bool {
        matches!(self, KernelKind::AltAxis(_) | KernelKind::ZeroRadial | KernelKind::BiAltAxis(_))
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::FueterH => "fueter",
            KernelKind::FueterHSharp => "fueter-sharp",
            KernelKind::AltAxis(1) => "alt-x",
            KernelKind::AltAxis(2) => "alt-y",
            KernelKind::AltAxis(_) => "alt-z",
            KernelKind::ZeroRadial => "zero-radial",
            KernelKind::BiAltAxis(1) => "bialt-x",
            KernelKind::BiAltAxis(2) => "bialt-y",
            KernelKind::BiAltAxis(_) => "bialt-z",
            KernelKind::BiFueter => "bifueter",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "fueter" => KernelKind::FueterH,
            "fueter-sharp" => KernelKind::FueterHSharp,
            "alt-x" => KernelKind::AltAxis(1),
            "alt-y" => KernelKind::AltAxis(2),
            "alt-z" => KernelKind::AltAxis(3),
            "zero-radial" => KernelKind::ZeroRadial,
            "bialt-x" => KernelKind::BiAltAxis(1),
            "bialt-y" => KernelKind::BiAltAxis(2),
            "bialt-z" => KernelKind::BiAltAxis(3),
            "bifueter" => KernelKind::BiFueter,
            _ => return None,
        })
    }
}

/// A singular kernel centred at `offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    pub kind: KernelKind,
    pub offset: [f64; 4],
    /// Cut placement for `atanh(t/r)` when time or radius is complex.
    pub branch: AtanhBranch,
    /// Evaluate at `w → −w`, i.e. `e^{+w∇̄}` instead of `e^{−w∇̄}`.
    pub reflected: bool,
}

impl Kernel {
    pub fn new(kind: KernelKind, offset: [f64; 4]) -> Self {
        if let KernelKind::AltAxis(a) | KernelKind::BiAltAxis(a) = kind {
            assert!((1..=3).contains(&a), "kernel axis must be 1, 2 or 3");
        }
        Self { kind, offset, branch: AtanhBranch::DEFAULT, reflected: false }
    }

    pub fn reflected(mut self) -> Self {
        self.reflected = !self.reflected;
        self
    }

    pub fn with_branch(mut self, branch: AtanhBranch) -> Self {
        self.branch = branch;
        self
    }

    /// Displacement from the centre, with the time reflection applied.
    fn local(&self, p: &Point) -> [C64; 4] {
        let mut d = p.sub(&Point::from_real(self.offset)).0;
        if self.reflected {
            d[0] = -d[0];
        }
        d
    }

    pub fn eval_kernel(&self, p: &Point) -> Result<BiQuat> {
        let d = self.local(p);
        let scale = d.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let rbar = BiQuat::vector([d[1], d[2], d[3]]);
        let r2 = d[1] * d[1] + d[2] * d[2] + d[3] * d[3];
        let w = d[0];
        match self.kind {
            KernelKind::FueterH | KernelKind::FueterHSharp => {
                let q = BiQuat::from_coords(d);
                let n = q.norm2();
                if n.norm() <= LOCUS_TOL * scale * scale || scale == 0.0 {
                    return Err(Error::OnSingularLocus);
                }
                let top = if self.kind == KernelKind::FueterH { q.qconj() } else { q };
                Ok(top / (n * n))
            }
            KernelKind::AltAxis(a) => {
                let r = axis_radius(r2, scale)?;
                let s = w / r;
                let q2 = w * w + r2;
                if q2.norm() <= LOCUS_TOL * scale * scale {
                    return Err(Error::OnSingularLocus);
                }
                let one_s2 = ONE_C + s * s;
                let at = s.atan();
                let r3 = r * r2;
                let big_a = (s / one_s2 + at) / (r3 * 2.0);
                let xa = d[a];
                let big_b = xa * (s * (5.0 + 3.0 * s * s) / (one_s2 * one_s2) + at * 3.0) / (r3 * r2 * 2.0);
                Ok(BiQuat::scalar(xa / (q2 * q2)) - BiQuat::basis(a) * big_a + rbar * big_b)
            }
            KernelKind::ZeroRadial => {
                let r = axis_radius(r2, scale)?;
                let q2 = r2 + w * w;
                if q2.norm() <= LOCUS_TOL * scale * scale {
                    return Err(Error::OnSingularLocus);
                }
                let q4 = q2 * q2;
                let scalar = (r2 - w * w) / (r * q4);
                let vec = w * (3.0 * r2 + w * w) / (r * r2 * q4);
                Ok(BiQuat::scalar(scalar) + rbar * vec)
            }
            KernelKind::BiAltAxis(a) => {
                let r = axis_radius(r2, scale)?;
                let m = w * w - r2;
                if m.norm() <= LOCUS_TOL * scale * scale {
                    return Err(Error::OnSingularLocus);
                }
                let tau = w / r;
                let one_t2 = ONE_C - tau * tau;
                let ath = self.branch.atanh(tau);
                let r3 = r * r2;
                let xa = d[a];
                let big_a = I_C * (tau / one_t2 + ath) / (r3 * 2.0);
                let big_b = I_C * xa * (tau * (5.0 - 3.0 * tau * tau) / (one_t2 * one_t2) + ath * 3.0) / (r3 * r2 * 2.0);
                Ok(BiQuat::scalar(xa / (m * m)) - BiQuat::basis(a) * big_a + rbar * big_b)
            }
            KernelKind::BiFueter => {
                let m = w * w - r2;
                if m.norm() <= LOCUS_TOL * scale * scale || scale == 0.0 {
                    return Err(Error::OnSingularLocus);
                }
                let qh = BiQuat::scalar(w) + rbar * I_C;
                Ok(qh * (I_C / (m * m)))
            }
        }
    }

    pub fn locus(&self) -> SingularLocus {
        let o = self.offset;
        let mut l = SingularLocus::NONE;
        match self.kind {
            KernelKind::FueterH | KernelKind::FueterHSharp => l.point = Some(o),
            KernelKind::AltAxis(_) | KernelKind::ZeroRadial => l.axis_line = Some([o[1], o[2], o[3]]),
            KernelKind::BiAltAxis(_) => {
                l.axis_line = Some([o[1], o[2], o[3]]);
                l.light_cone = Some(o);
            }
            KernelKind::BiFueter => l.light_cone = Some(o),
        }
        l
    }

    pub fn regularity(&self) -> Regularity {
        let base = match self.kind {
            KernelKind::FueterH | KernelKind::AltAxis(_) | KernelKind::ZeroRadial => Regularity::Left,
            KernelKind::FueterHSharp => Regularity::Conjugate,
            KernelKind::BiAltAxis(_) | KernelKind::BiFueter => Regularity::Bi,
        };
        if !self.reflected {
            return base;
        }
        match base {
            Regularity::Left => Regularity::Conjugate,
            Regularity::Conjugate => Regularity::Left,
            _ => Regularity::BiConjugate,
        }
    }
}

/// Coefficients multiplying `atanh τ` in the two transcendental terms of the
/// `BiAltAxis(axis)` kernel at spatial offset `r̄`: `−e_a·i/(2r³)` and `i x_a r̄·3/(2r⁵)`.
pub fn bi_alt_atanh_coefficients(axis: usize, rbar: [C64; 3]) -> [BiQuat; 2] {
    let r2 = rbar[0] * rbar[0] + rbar[1] * rbar[1] + rbar[2] * rbar[2];
    let r = r2.sqrt();
    let r3 = r * r2;
    let first = BiQuat::basis(axis) * (-I_C / (r3 * 2.0));
    let second = BiQuat::vector(rbar) * (I_C * rbar[axis - 1] * 3.0 / (r3 * r2 * 2.0));
    [first, second]
}

/// Spatial radius on the complexified axis; principal square root.
fn axis_radius(r2: C64, scale: f64) -> Result<C64> {
    if r2.norm() <= LOCUS_TOL * scale * scale || scale == 0.0 {
        return Err(Error::OnSingularLocus);
    }
    Ok(r2.sqrt())
}

impl QField for Kernel {
    fn eval(&self, p: &Point) -> Result<BiQuat> {
        self.eval_kernel(p)
    }

    fn meta(&self) -> FieldMeta {
        FieldMeta { regularity: Some(self.regularity()), locus: self.locus() }
    }
}
