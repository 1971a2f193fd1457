//! Closed oriented 3-surfaces in R⁴ and sandwich quadrature of the 3-forms.
//!
//! A patch is an analytic chart `u ↦ p(u)` together with a node list per
//! parameter axis. Parameters are complex in general: a deformed prism runs
//! one axis along a detoured contour, and the same pullback formula applies.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::algebra::{BiQuat, Point, C64, I_C, ZERO_C};
use crate::contour::{self, AtanhBranch, Contour, ContourRule, PolePolicy};
use crate::error::{Error, Result};
use crate::fields::{QField, SingularLocus};
use crate::quad;
use crate::sum::Accumulator;

/// Which 3-form is pulled back.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormKind {
    Sq,
    SqSharp,
    SH,
    SHSharp,
}

impl FormKind {
    /// Assemble the form from the oriented cofactor vector.
    pub fn from_cofactors(self, c: [C64; 4]) -> BiQuat {
        let (sign, factor) = match self {
            FormKind::Sq => (1.0, C64::new(1.0, 0.0)),
            FormKind::SqSharp => (-1.0, C64::new(1.0, 0.0)),
            FormKind::SH => (1.0, I_C),
            FormKind::SHSharp => (-1.0, I_C),
        };
        let f = factor * sign;
        BiQuat::new(c[0], c[1] * f, c[2] * f, c[3] * f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadRule {
    /// Gauss–Legendre order per panel on every non-periodic axis.
    pub order: usize,
    /// Panels per Gauss–Legendre axis.
    pub panels: usize,
    /// Uniform azimuthal nodes; `0` selects `2·order`.
    pub azimuth: usize,
}

impl QuadRule {
    pub fn new(order: usize) -> Self {
        Self { order, panels: 1, azimuth: 0 }
    }

    fn azimuth_nodes(&self) -> usize {
        if self.azimuth == 0 {
            2 * self.order
        } else {
            self.azimuth
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 || self.panels == 0 {
            return Err(Error::BadParameters("quadrature order and panel count must be positive"));
        }
        if self.azimuth_nodes() < 4 {
            return Err(Error::BadParameters("azimuthal rule needs at least four nodes"));
        }
        Ok(())
    }
}

impl Default for QuadRule {
    fn default() -> Self {
        Self::new(32)
    }
}

/// Analytic parametrizations used by the surface constructors.
#[derive(Debug, Clone, PartialEq)]
pub enum Chart {
    /// `c + R(cos χ, sin χ n̂)` with `u = (χ, cos θ, φ)`.
    Hyper { center: [f64; 4], radius: f64 },
    /// Spatial ball at fixed `w`: `(w, c̄ + r n̂)` with `u = (r, cos θ, φ)`.
    Ball { center: [f64; 4], w: f64, side: f64 },
    /// Time-extruded 2-sphere: `(c_w + t, c̄ + ρ n̂)` with `u = (t, cos θ, φ)`.
    Tube { center: [f64; 4], rho: f64 },
    /// Box face at `p[axis] = offset`; the other coordinates in increasing axis order.
    Face { center: [f64; 4], axis: usize, offset: f64, side: f64 },
}

/// Unit direction `(sin θ cos φ, sin θ sin φ, cos θ)` with `c = cos θ`, plus derivatives.
fn direction(c: C64, phi: C64) -> ([C64; 3], [C64; 3], [C64; 3]) {
    let s = (C64::new(1.0, 0.0) - c * c).sqrt();
    let (cp, sp) = (phi.cos(), phi.sin());
    let n = [s * cp, s * sp, c];
    let dc = [-(c / s) * cp, -(c / s) * sp, C64::new(1.0, 0.0)];
    let dphi = [-s * sp, s * cp, ZERO_C];
    (n, dc, dphi)
}

impl Chart {
    /// Point and Jacobian columns `∂p/∂u_k`.
    pub fn eval(&self, u: [C64; 3]) -> (Point, [[C64; 4]; 3]) {
        let re = |v: f64| C64::new(v, 0.0);
        match *self {
            Chart::Hyper { center, radius } => {
                let (n, dc, dphi) = direction(u[1], u[2]);
                let (sx, cx) = (u[0].sin(), u[0].cos());
                let r = re(radius);
                let p = Point([
                    re(center[0]) + r * cx,
                    re(center[1]) + r * sx * n[0],
                    re(center[2]) + r * sx * n[1],
                    re(center[3]) + r * sx * n[2],
                ]);
                let j0 = [-r * sx, r * cx * n[0], r * cx * n[1], r * cx * n[2]];
                let j1 = [ZERO_C, r * sx * dc[0], r * sx * dc[1], r * sx * dc[2]];
                let j2 = [ZERO_C, r * sx * dphi[0], r * sx * dphi[1], r * sx * dphi[2]];
                (p, [j0, j1, j2])
            }
            Chart::Ball { center, w, .. } => {
                let (n, dc, dphi) = direction(u[1], u[2]);
                let r = u[0];
                let p = Point([re(w), re(center[1]) + r * n[0], re(center[2]) + r * n[1], re(center[3]) + r * n[2]]);
                let j0 = [ZERO_C, n[0], n[1], n[2]];
                let j1 = [ZERO_C, r * dc[0], r * dc[1], r * dc[2]];
                let j2 = [ZERO_C, r * dphi[0], r * dphi[1], r * dphi[2]];
                (p, [j0, j1, j2])
            }
            Chart::Tube { center, rho } => {
                let (n, dc, dphi) = direction(u[1], u[2]);
                let r = re(rho);
                let p = Point([
                    re(center[0]) + u[0],
                    re(center[1]) + r * n[0],
                    re(center[2]) + r * n[1],
                    re(center[3]) + r * n[2],
                ]);
                let j0 = [re(1.0), ZERO_C, ZERO_C, ZERO_C];
                let j1 = [ZERO_C, r * dc[0], r * dc[1], r * dc[2]];
                let j2 = [ZERO_C, r * dphi[0], r * dphi[1], r * dphi[2]];
                (p, [j0, j1, j2])
            }
            Chart::Face { center, axis, offset, .. } => {
                let mut p = [re(center[0]), re(center[1]), re(center[2]), re(center[3])];
                p[axis] += offset;
                let mut cols = [[ZERO_C; 4]; 3];
                let mut k = 0;
                for a in 0..4 {
                    if a == axis {
                        continue;
                    }
                    p[a] += u[k];
                    cols[k][a] = re(1.0);
                    k += 1;
                }
                (Point(p), cols)
            }
        }
    }

    /// A real parameter value inside the chart and the outward direction there.
    fn reference(&self) -> ([f64; 3], [f64; 4]) {
        match *self {
            Chart::Hyper { center, .. } => {
                let u = [1.0, 0.2, 0.3];
                let (p, _) = self.eval(u.map(|v| C64::new(v, 0.0)));
                let r = p.re();
                (u, [r[0] - center[0], r[1] - center[1], r[2] - center[2], r[3] - center[3]])
            }
            Chart::Ball { side, .. } => ([0.5, 0.2, 0.3], [side, 0.0, 0.0, 0.0]),
            Chart::Tube { center, .. } => {
                let u = [0.0, 0.2, 0.3];
                let (p, _) = self.eval(u.map(|v| C64::new(v, 0.0)));
                let r = p.re();
                (u, [0.0, r[1] - center[1], r[2] - center[2], r[3] - center[3]])
            }
            Chart::Face { axis, side, .. } => {
                let mut o = [0.0; 4];
                o[axis] = side;
                ([0.0; 3], o)
            }
        }
    }
}

fn det3(a: [C64; 3], b: [C64; 3], c: [C64; 3]) -> C64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// Signed 3×3 minors of the Jacobian: the slots of `S_q` before orientation.
///
/// Scalar slot `∂(x,y,z)/∂u`, then `−∂(w,y,z)/∂u`, `−∂(w,z,x)/∂u`, `−∂(w,x,y)/∂u`.
pub fn raw_minors(cols: &[[C64; 4]; 3]) -> [C64; 4] {
    let row = |a: usize| [cols[0][a], cols[1][a], cols[2][a]];
    let (w, x, y, z) = (row(0), row(1), row(2), row(3));
    let m0 = det3(x, y, z);
    let m1 = -det3(w, y, z);
    let m2 = -det3(w, z, x);
    let m3 = -det3(w, x, y);
    [m0, m1, m2, m3]
}

/// Node generator for one parameter axis.
#[derive(Debug, Clone, PartialEq)]
pub enum AxisSpec {
    Gauss { lo: f64, hi: f64 },
    Periodic,
    /// Complex path, typically a detoured segment.
    Path(Contour),
}

impl AxisSpec {
    pub fn nodes(&self, rule: &QuadRule) -> Vec<(C64, C64)> {
        match self {
            AxisSpec::Gauss { lo, hi } => quad::composite(rule.order, rule.panels, *lo, *hi)
                .into_iter()
                .map(|(x, w)| (C64::new(x, 0.0), C64::new(w, 0.0)))
                .collect(),
            AxisSpec::Periodic => quad::periodic(rule.azimuth_nodes())
                .into_iter()
                .map(|(x, w)| (C64::new(x, 0.0), C64::new(w, 0.0)))
                .collect(),
            AxisSpec::Path(c) => {
                contour::contour_nodes(c, &ContourRule { order: rule.order.clamp(8, 32), panels: rule.panels.max(2) })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub chart: Chart,
    pub axes: [AxisSpec; 3],
    /// `±1`, making the cofactor vector point outward.
    pub orientation: f64,
}

impl Patch {
    pub fn new(chart: Chart, axes: [AxisSpec; 3]) -> Result<Self> {
        let (u, out) = chart.reference();
        let (_, cols) = chart.eval(u.map(|v| C64::new(v, 0.0)));
        let m = raw_minors(&cols);
        let dot: f64 = (0..4).map(|a| m[a].re * out[a]).sum();
        if dot == 0.0 || !dot.is_finite() {
            return Err(Error::DegenerateJacobian);
        }
        Ok(Self { chart, axes, orientation: if dot > 0.0 { 1.0 } else { -1.0 } })
    }

    /// Oriented quadrature nodes: point and weighted cofactor vector.
    pub fn nodes(&self, rule: &QuadRule) -> Vec<(Point, [C64; 4])> {
        let n: Vec<Vec<(C64, C64)>> = self.axes.iter().map(|a| a.nodes(rule)).collect();
        let mut out = Vec::with_capacity(n[0].len() * n[1].len() * n[2].len());
        for &(u0, w0) in &n[0] {
            for &(u1, w1) in &n[1] {
                for &(u2, w2) in &n[2] {
                    let (p, cols) = self.chart.eval([u0, u1, u2]);
                    let m = raw_minors(&cols);
                    let w = w0 * w1 * w2 * self.orientation;
                    out.push((p, m.map(|c| c * w)));
                }
            }
        }
        out
    }
}

/// Pullback of the 3-form to `patch` at parameter `u`.
pub fn pullback_form(patch: &Patch, u: [C64; 3], kind: FormKind) -> Result<BiQuat> {
    let (_, cols) = patch.chart.eval(u);
    let m = raw_minors(&cols);
    let scale: f64 = cols.iter().flat_map(|c| c.iter()).map(|v| v.norm()).fold(0.0, f64::max);
    if m.iter().all(|v| v.norm() <= 1e-14 * scale * scale * scale) {
        return Err(Error::DegenerateJacobian);
    }
    Ok(kind.from_cofactors(m.map(|c| c * patch.orientation)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceKind {
    Sphere3 { center: [f64; 4], radius: f64 },
    /// Hypersphere with polar caps of half-angle `delta` around the w-axis
    /// replaced by flat spatial balls.
    CappedSphere { center: [f64; 4], radius: f64, delta: f64 },
    HyperBox { center: [f64; 4], half: [f64; 4] },
    /// Spatial 2-sphere of radius `rho` extruded along w over `[−t1, t1]`, plus end caps.
    Prism { center: [f64; 4], rho: f64, t1: f64 },
    /// Prism whose time path (narrow, `t1 > rho`) or cap radius (wide, `rho > t1`)
    /// detours around the light cone of the centre.
    DeformedPrism { center: [f64; 4], rho: f64, t1: f64, eps: f64, branch: AtanhBranch },
}

impl SurfaceKind {
    pub fn center(&self) -> [f64; 4] {
        match *self {
            SurfaceKind::Sphere3 { center, .. }
            | SurfaceKind::CappedSphere { center, .. }
            | SurfaceKind::HyperBox { center, .. }
            | SurfaceKind::Prism { center, .. }
            | SurfaceKind::DeformedPrism { center, .. } => center,
        }
    }

    pub fn is_deformed(&self) -> bool {
        matches!(self, SurfaceKind::DeformedPrism { .. })
    }

    /// Same surface shifted by `d`.
    pub fn translated(&self, d: [f64; 4]) -> SurfaceKind {
        let mut s = *self;
        let c = match &mut s {
            SurfaceKind::Sphere3 { center, .. }
            | SurfaceKind::CappedSphere { center, .. }
            | SurfaceKind::HyperBox { center, .. }
            | SurfaceKind::Prism { center, .. }
            | SurfaceKind::DeformedPrism { center, .. } => center,
        };
        for a in 0..4 {
            c[a] += d[a];
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    pub kind: SurfaceKind,
    pub patches: Vec<Patch>,
}

fn positive(v: f64) -> bool {
    v > 0.0 && v.is_finite()
}

fn finite_center(c: &[f64; 4]) -> Result<()> {
    if c.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::BadParameters("surface centre must be finite"))
    }
}

fn ball_axes(r: AxisSpec) -> [AxisSpec; 3] {
    [r, AxisSpec::Gauss { lo: -1.0, hi: 1.0 }, AxisSpec::Periodic]
}

pub fn sphere3(center: [f64; 4], radius: f64) -> Result<Surface> {
    finite_center(&center)?;
    if !positive(radius) {
        return Err(Error::BadParameters("sphere radius must be positive"));
    }
    let patch = Patch::new(
        Chart::Hyper { center, radius },
        [AxisSpec::Gauss { lo: 0.0, hi: PI }, AxisSpec::Gauss { lo: -1.0, hi: 1.0 }, AxisSpec::Periodic],
    )?;
    Ok(Surface { kind: SurfaceKind::Sphere3 { center, radius }, patches: alloc::vec![patch] })
}

/// Default polar-cap half-angle of [`capped_sphere`].
pub const CAP_DELTA: f64 = PI / 6.0;

pub fn capped_sphere(center: [f64; 4], radius: f64, delta: f64) -> Result<Surface> {
    finite_center(&center)?;
    if !positive(radius) {
        return Err(Error::BadParameters("sphere radius must be positive"));
    }
    if !(delta > 0.0 && delta < 0.5 * PI) {
        return Err(Error::BadParameters("cap half-angle must lie in (0, π/2)"));
    }
    let band = Patch::new(
        Chart::Hyper { center, radius },
        [
            AxisSpec::Gauss { lo: delta, hi: PI - delta },
            AxisSpec::Gauss { lo: -1.0, hi: 1.0 },
            AxisSpec::Periodic,
        ],
    )?;
    let (h, a) = (radius * libm::cos(delta), radius * libm::sin(delta));
    let top = Patch::new(Chart::Ball { center, w: center[0] + h, side: 1.0 }, ball_axes(AxisSpec::Gauss { lo: 0.0, hi: a }))?;
    let bottom =
        Patch::new(Chart::Ball { center, w: center[0] - h, side: -1.0 }, ball_axes(AxisSpec::Gauss { lo: 0.0, hi: a }))?;
    Ok(Surface { kind: SurfaceKind::CappedSphere { center, radius, delta }, patches: alloc::vec![band, top, bottom] })
}

pub fn hyperbox(center: [f64; 4], half: [f64; 4]) -> Result<Surface> {
    finite_center(&center)?;
    if !half.iter().all(|h| positive(*h)) {
        return Err(Error::BadParameters("box half-widths must be positive"));
    }
    let mut patches = Vec::with_capacity(8);
    for axis in 0..4 {
        for side in [1.0, -1.0] {
            let mut axes = Vec::new();
            for a in 0..4 {
                if a != axis {
                    axes.push(AxisSpec::Gauss { lo: -half[a], hi: half[a] });
                }
            }
            let axes: [AxisSpec; 3] = [axes[0].clone(), axes[1].clone(), axes[2].clone()];
            patches.push(Patch::new(Chart::Face { center, axis, offset: side * half[axis], side }, axes)?);
        }
    }
    Ok(Surface { kind: SurfaceKind::HyperBox { center, half }, patches })
}

pub fn prism(center: [f64; 4], rho: f64, t1: f64) -> Result<Surface> {
    finite_center(&center)?;
    if !positive(rho) || !positive(t1) {
        return Err(Error::BadParameters("prism radius and half-length must be positive"));
    }
    let side = Patch::new(
        Chart::Tube { center, rho },
        [AxisSpec::Gauss { lo: -t1, hi: t1 }, AxisSpec::Gauss { lo: -1.0, hi: 1.0 }, AxisSpec::Periodic],
    )?;
    let top = Patch::new(Chart::Ball { center, w: center[0] + t1, side: 1.0 }, ball_axes(AxisSpec::Gauss { lo: 0.0, hi: rho }))?;
    let bottom =
        Patch::new(Chart::Ball { center, w: center[0] - t1, side: -1.0 }, ball_axes(AxisSpec::Gauss { lo: 0.0, hi: rho }))?;
    Ok(Surface { kind: SurfaceKind::Prism { center, rho, t1 }, patches: alloc::vec![side, top, bottom] })
}

/// Whether a deformed prism with these proportions is narrow (`t1 > rho`).
pub fn is_narrow(rho: f64, t1: f64) -> bool {
    t1 > rho
}

pub fn deformed_prism(center: [f64; 4], rho: f64, t1: f64, eps: f64, branch: AtanhBranch) -> Result<Surface> {
    finite_center(&center)?;
    if !positive(rho) || !positive(t1) {
        return Err(Error::BadParameters("prism radius and half-length must be positive"));
    }
    if !(eps > 0.0 && eps < rho) {
        return Err(Error::BadParameters("detour radius must satisfy 0 < eps < rho"));
    }
    if t1 == rho {
        return Err(Error::BadParameters("the light cone meets the prism rim when t1 = rho"));
    }
    let kind = SurfaceKind::DeformedPrism { center, rho, t1, eps, branch };
    let geometry = |_| Error::BadParameters("detour radius too large for the prism proportions");
    let patches = if is_narrow(rho, t1) {
        // τ = t/ρ: the time path meets the cone at t = ±ρ.
        let path = contour::detoured_segment(-t1, t1, &[(-rho, branch.minus_one), (rho, branch.plus_one)], eps)
            .map_err(geometry)?;
        let side = Patch::new(
            Chart::Tube { center, rho },
            [AxisSpec::Path(path), AxisSpec::Gauss { lo: -1.0, hi: 1.0 }, AxisSpec::Periodic],
        )?;
        let top =
            Patch::new(Chart::Ball { center, w: center[0] + t1, side: 1.0 }, ball_axes(AxisSpec::Gauss { lo: 0.0, hi: rho }))?;
        let bottom = Patch::new(
            Chart::Ball { center, w: center[0] - t1, side: -1.0 },
            ball_axes(AxisSpec::Gauss { lo: 0.0, hi: rho }),
        )?;
        alloc::vec![side, top, bottom]
    } else {
        // On the caps τ = ±t1/r: the radius meets the cone at r = t1, and a radius
        // passing above t1 sends τ below +1 on the top cap and above −1 on the bottom.
        let top_policy = branch.plus_one.flip();
        let bottom_policy = branch.minus_one;
        let path = |p: PolePolicy| contour::detoured_segment(0.0, rho, &[(t1, p)], eps).map_err(geometry);
        let side = Patch::new(
            Chart::Tube { center, rho },
            [AxisSpec::Gauss { lo: -t1, hi: t1 }, AxisSpec::Gauss { lo: -1.0, hi: 1.0 }, AxisSpec::Periodic],
        )?;
        let top = Patch::new(Chart::Ball { center, w: center[0] + t1, side: 1.0 }, ball_axes(AxisSpec::Path(path(top_policy)?)))?;
        let bottom = Patch::new(
            Chart::Ball { center, w: center[0] - t1, side: -1.0 },
            ball_axes(AxisSpec::Path(path(bottom_policy)?)),
        )?;
        alloc::vec![side, top, bottom]
    };
    Ok(Surface { kind, patches })
}

impl Surface {
    pub fn rebuild(kind: SurfaceKind) -> Result<Surface> {
        match kind {
            SurfaceKind::Sphere3 { center, radius } => sphere3(center, radius),
            SurfaceKind::CappedSphere { center, radius, delta } => capped_sphere(center, radius, delta),
            SurfaceKind::HyperBox { center, half } => hyperbox(center, half),
            SurfaceKind::Prism { center, rho, t1 } => prism(center, rho, t1),
            SurfaceKind::DeformedPrism { center, rho, t1, eps, branch } => deformed_prism(center, rho, t1, eps, branch),
        }
    }

    /// Unweighted 3-volume of a real surface.
    pub fn area(&self, rule: &QuadRule) -> f64 {
        let mut acc = crate::sum::Compensated::<1>::new();
        for patch in &self.patches {
            for (_, m) in patch.nodes(rule) {
                acc.add([libm::sqrt(m.iter().map(|c| c.norm_sqr()).sum())]);
            }
        }
        acc.total()[0]
    }

    /// Whether a real point lies strictly inside the surface.
    pub fn encloses(&self, q: [f64; 4]) -> bool {
        let c = self.kind.center();
        let d: [f64; 4] = core::array::from_fn(|a| q[a] - c[a]);
        let s = libm::sqrt(d[1] * d[1] + d[2] * d[2] + d[3] * d[3]);
        match self.kind {
            SurfaceKind::Sphere3 { radius, .. } => libm::sqrt(d[0] * d[0] + s * s) < radius,
            SurfaceKind::CappedSphere { radius, delta, .. } => {
                libm::sqrt(d[0] * d[0] + s * s) < radius && libm::fabs(d[0]) < radius * libm::cos(delta)
            }
            SurfaceKind::HyperBox { half, .. } => (0..4).all(|a| libm::fabs(d[a]) < half[a]),
            SurfaceKind::Prism { rho, t1, .. } | SurfaceKind::DeformedPrism { rho, t1, .. } => {
                s < rho && libm::fabs(d[0]) < t1
            }
        }
    }

    /// Euclidean distance from a real point to a real surface.
    fn distance(&self, q: [f64; 4]) -> Option<f64> {
        let d = |c: [f64; 4], a: usize| q[a] - c[a];
        match self.kind {
            SurfaceKind::Sphere3 { center, radius } => {
                let s: f64 = (0..4).map(|a| d(center, a) * d(center, a)).sum();
                Some(libm::fabs(libm::sqrt(s) - radius))
            }
            SurfaceKind::HyperBox { center, half } => {
                // Distance to the boundary of the box (inside or outside).
                let inside = (0..4).all(|a| libm::fabs(d(center, a)) <= half[a]);
                if inside {
                    Some((0..4).map(|a| half[a] - libm::fabs(d(center, a))).fold(f64::INFINITY, f64::min))
                } else {
                    let s: f64 = (0..4)
                        .map(|a| {
                            let e = libm::fmax(libm::fabs(d(center, a)) - half[a], 0.0);
                            e * e
                        })
                        .sum();
                    Some(libm::sqrt(s))
                }
            }
            SurfaceKind::Prism { center, rho, t1 } => {
                let s = libm::sqrt((1..4).map(|a| d(center, a) * d(center, a)).sum());
                let t = libm::fabs(d(center, 0));
                let side = if t <= t1 { libm::fabs(s - rho) } else { f64::INFINITY };
                let cap = if s <= rho { libm::fabs(t - t1) } else { f64::INFINITY };
                Some(side.min(cap).min(libm::hypot(s - rho, t - t1)))
            }
            SurfaceKind::CappedSphere { .. } => None,
            SurfaceKind::DeformedPrism { .. } => None,
        }
    }
}

/// Check that the integrand's singular set is compatible with the surface.
pub fn check_admissible(surface: &Surface, locus: &SingularLocus) -> Result<()> {
    let c = surface.kind.center();
    let spatial_match = |a: [f64; 3]| (0..3).all(|k| libm::fabs(a[k] - c[k + 1]) <= 1e-9 * (1.0 + libm::fabs(c[k + 1])));
    if let Some(axis) = locus.axis_line {
        let ok = matches!(
            surface.kind,
            SurfaceKind::CappedSphere { .. } | SurfaceKind::Prism { .. } | SurfaceKind::DeformedPrism { .. }
        ) && spatial_match(axis);
        if !ok {
            return Err(Error::Inadmissible(
                "an axis-singular kernel needs a capped sphere or prism centred on its axis",
            ));
        }
    }
    if let Some(apex) = locus.light_cone {
        let ok = surface.kind.is_deformed() && (0..4).all(|k| libm::fabs(apex[k] - c[k]) <= 1e-9 * (1.0 + libm::fabs(c[k])));
        if !ok {
            return Err(Error::Inadmissible("a light-cone singular kernel needs a deformed prism centred on its apex"));
        }
    }
    if let Some(p) = locus.point {
        if let Some(d) = surface.distance(p) {
            let scale = 1.0 + p.iter().map(|v| libm::fabs(*v)).fold(0.0, f64::max);
            if d <= 1e-9 * scale {
                return Err(Error::SingularityOnSurface);
            }
        }
    }
    Ok(())
}

fn eval_side(f: Option<&dyn QField>, p: &Point) -> Result<BiQuat> {
    match f {
        None => Ok(BiQuat::ONE),
        Some(f) => f.eval(p).map_err(|e| match e {
            Error::OnSingularLocus => Error::SingularityOnSurface,
            e => e,
        }),
    }
}

fn sandwich_at(left: Option<&dyn QField>, kind: FormKind, right: Option<&dyn QField>, p: &Point, m: [C64; 4]) -> Result<BiQuat> {
    let v = eval_side(left, p)? * kind.from_cofactors(m) * eval_side(right, p)?;
    if !v.is_finite() {
        return Err(Error::SingularityOnSurface);
    }
    Ok(v)
}

/// Integral of `left · S · right` over one patch.
pub fn integrate_patch(
    left: Option<&dyn QField>,
    kind: FormKind,
    right: Option<&dyn QField>,
    patch: &Patch,
    rule: &QuadRule,
) -> Result<BiQuat> {
    let mut acc = Accumulator::new();
    for (p, m) in patch.nodes(rule) {
        acc.add(sandwich_at(left, kind, right, &p, m)?);
    }
    Ok(acc.total())
}

/// Integral over the second and third parameters of a patch with the first
/// held at `u0`; integrating the result against `du0` recovers the patch integral.
pub fn integrate_slice(
    left: Option<&dyn QField>,
    kind: FormKind,
    right: Option<&dyn QField>,
    patch: &Patch,
    u0: C64,
    rule: &QuadRule,
) -> Result<BiQuat> {
    let n1 = patch.axes[1].nodes(rule);
    let n2 = patch.axes[2].nodes(rule);
    let mut acc = Accumulator::new();
    for &(u1, w1) in &n1 {
        for &(u2, w2) in &n2 {
            let (p, cols) = patch.chart.eval([u0, u1, u2]);
            let w = w1 * w2 * patch.orientation;
            acc.add(sandwich_at(left, kind, right, &p, raw_minors(&cols).map(|c| c * w))?);
        }
    }
    Ok(acc.total())
}

/// `∮ left · S · right` with the multiplication order kept as written.
pub fn integrate_sandwich(
    left: Option<&dyn QField>,
    kind: FormKind,
    right: Option<&dyn QField>,
    surface: &Surface,
    rule: &QuadRule,
) -> Result<BiQuat> {
    rule.validate()?;
    let mut locus = SingularLocus::NONE;
    for f in [left, right].into_iter().flatten() {
        locus = locus.union(&f.meta().locus);
    }
    check_admissible(surface, &locus)?;
    let mut total = Accumulator::new();
    for patch in &surface.patches {
        let mut acc = Accumulator::new();
        for (p, m) in patch.nodes(rule) {
            acc.add(sandwich_at(left, kind, right, &p, m)?);
        }
        total.merge(&acc);
    }
    Ok(total.total())
}
