//! Complex path integration with pole detours, residues and branch tracking.
//!
//! Under upper-half-plane closure, *including* a real pole means the path dips
//! below it and *excluding* it means the path arcs above.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Mul;

use crate::algebra::{C64, I_C, ONE_C, ZERO_C};
use crate::error::{Error, Result};
use crate::quad;
use crate::sum::{Accumulator, Lanes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolePolicy {
    Include,
    Exclude,
}

impl PolePolicy {
    /// Which side of the real axis the detour sits on: −1 below, +1 above.
    pub fn side(self) -> f64 {
        match self {
            PolePolicy::Include => -1.0,
            PolePolicy::Exclude => 1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            PolePolicy::Include => PolePolicy::Exclude,
            PolePolicy::Exclude => PolePolicy::Include,
        }
    }
}

/// Cut placement for `atanh τ = ½[log(1+τ) − log(1−τ)]`.
///
/// Each branch point `τ = ±1` gets its cut on the side away from the path
/// that the policy prescribes, so every node of a detoured path evaluates on
/// the same sheet without having to be visited in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AtanhBranch {
    pub plus_one: PolePolicy,
    pub minus_one: PolePolicy,
}

impl AtanhBranch {
    pub const DEFAULT: AtanhBranch = AtanhBranch { plus_one: PolePolicy::Include, minus_one: PolePolicy::Exclude };

    pub fn atanh(&self, tau: C64) -> C64 {
        // Path below +1 sends arg(1−τ) through +π/2: keep the cut at −π/2.
        let lo_minus = match self.plus_one {
            PolePolicy::Include => -0.5 * PI,
            PolePolicy::Exclude => -1.5 * PI,
        };
        let lo_plus = match self.minus_one {
            PolePolicy::Include => -1.5 * PI,
            PolePolicy::Exclude => -0.5 * PI,
        };
        (log_in_range(ONE_C + tau, lo_plus) - log_in_range(ONE_C - tau, lo_minus)) * 0.5
    }
}

impl Default for AtanhBranch {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Logarithm with argument in `(lo, lo + 2π]`.
pub fn log_in_range(z: C64, lo: f64) -> C64 {
    let mut arg = libm::atan2(z.im, z.re);
    while arg <= lo {
        arg += 2.0 * PI;
    }
    while arg > lo + 2.0 * PI {
        arg -= 2.0 * PI;
    }
    C64::new(libm::log(z.norm()), arg)
}

/// Continuation state for multivalued factors along a path.
///
/// Slot values start on the sheet given by the anchor policy and are then
/// continued node to node; a jump of more than π/2 between consecutive
/// evaluations is an error.
#[derive(Debug, Clone)]
pub struct BranchState {
    anchor: AtanhBranch,
    last: [Option<f64>; 4],
}

impl BranchState {
    pub fn new(anchor: AtanhBranch) -> Self {
        Self { anchor, last: [None; 4] }
    }

    /// Continuous logarithm in `slot`, first evaluation using the cut starting at `lo`.
    pub fn log(&mut self, slot: usize, z: C64, lo: f64) -> Result<C64> {
        let mut l = log_in_range(z, lo);
        if let Some(prev) = self.last[slot] {
            let k = libm::round((prev - l.im) / (2.0 * PI));
            l.im += 2.0 * PI * k;
            if libm::fabs(l.im - prev) > 0.5 * PI {
                return Err(Error::BranchJump);
            }
        }
        self.last[slot] = Some(l.im);
        Ok(l)
    }

    /// `atanh τ` continued along the path (slots 0 and 1).
    pub fn atanh(&mut self, tau: C64) -> Result<C64> {
        let lo_minus = if self.anchor.plus_one == PolePolicy::Include { -0.5 * PI } else { -1.5 * PI };
        let lo_plus = if self.anchor.minus_one == PolePolicy::Include { -1.5 * PI } else { -0.5 * PI };
        let a = self.log(0, ONE_C + tau, lo_plus)?;
        let b = self.log(1, ONE_C - tau, lo_minus)?;
        Ok((a - b) * 0.5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    /// Straight segment; `grade` marks ends that meet a detour of radius `eps`.
    Line { a: C64, b: C64, grade: [bool; 2] },
    /// `center + radius·e^{iθ}` for θ from `start` to `start + sweep`.
    Arc { center: C64, radius: f64, start: f64, sweep: f64 },
    /// Real ray from `a` to `dir·∞` (`dir = +1`) or from `dir·∞` to `a` (`dir = −1`).
    Ray { a: f64, dir: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub segments: Vec<Segment>,
    pub poles: Vec<(f64, PolePolicy)>,
    pub eps: f64,
    /// True when the path runs along the whole real line and is closed at infinity.
    pub closed_at_infinity: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourRule {
    /// Gauss–Legendre order per panel.
    pub order: usize,
    /// Uniform panels on each line, ray and arc.
    pub panels: usize,
}

impl Default for ContourRule {
    fn default() -> Self {
        Self { order: 20, panels: 4 }
    }
}

fn check_poles(poles: &[(f64, PolePolicy)], eps: f64) -> Result<Vec<(f64, PolePolicy)>> {
    if !(eps > 0.0) {
        return Err(Error::BadGeometry("detour radius must be positive"));
    }
    let mut ps = poles.to_vec();
    ps.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in ps.windows(2) {
        if w[1].0 - w[0].0 < 2.0 * eps * (1.0 + 1e-12) || w[1].0 == w[0].0 {
            return Err(Error::BadGeometry("detour radius must be below half the pole separation"));
        }
    }
    if ps.iter().any(|p| !p.0.is_finite()) {
        return Err(Error::BadGeometry("poles must be finite"));
    }
    Ok(ps)
}

/// Finite real segment `a → b` with semicircular detours of radius `eps`.
pub fn detoured_segment(a: f64, b: f64, poles: &[(f64, PolePolicy)], eps: f64) -> Result<Contour> {
    let ps = check_poles(poles, eps)?;
    if !(a < b) {
        return Err(Error::BadGeometry("segment must run left to right"));
    }
    if ps.iter().any(|p| p.0 - eps <= a || p.0 + eps >= b) {
        return Err(Error::BadGeometry("detours must lie strictly inside the segment"));
    }
    let mut segments = Vec::new();
    let mut cursor = a;
    let mut graded_start = false;
    for &(p, policy) in &ps {
        segments.push(Segment::Line {
            a: C64::new(cursor, 0.0),
            b: C64::new(p - eps, 0.0),
            grade: [graded_start, true],
        });
        // Counter-clockwise from π passes below the pole; clockwise passes above.
        let sweep = match policy {
            PolePolicy::Include => PI,
            PolePolicy::Exclude => -PI,
        };
        segments.push(Segment::Arc { center: C64::new(p, 0.0), radius: eps, start: PI, sweep });
        cursor = p + eps;
        graded_start = true;
    }
    segments.push(Segment::Line { a: C64::new(cursor, 0.0), b: C64::new(b, 0.0), grade: [graded_start, false] });
    Ok(Contour { segments, poles: ps, eps, closed_at_infinity: false })
}

/// The whole real line with detours around `poles`, closed in the upper half plane.
///
/// The tails are rays to ±∞ mapped onto finite intervals, so no cutoff radius
/// is needed; the closing arc contributes nothing for integrands decaying at
/// least like `|z|^{-2}`.
pub fn real_line_contour(poles: &[(f64, PolePolicy)], eps: f64) -> Result<Contour> {
    let ps = check_poles(poles, eps)?;
    let (lo, hi) = match (ps.first(), ps.last()) {
        (Some(f), Some(l)) => (f.0 - 1.0, l.0 + 1.0),
        _ => (-1.0, 1.0),
    };
    let mut segments = alloc::vec![Segment::Ray { a: lo, dir: -1.0 }];
    if ps.is_empty() {
        segments.push(Segment::Line { a: C64::new(lo, 0.0), b: C64::new(hi, 0.0), grade: [false; 2] });
    } else {
        segments.extend(detoured_segment(lo, hi, &ps, eps)?.segments);
    }
    segments.push(Segment::Ray { a: hi, dir: 1.0 });
    Ok(Contour { segments, poles: ps, eps, closed_at_infinity: true })
}

/// The circle `|z − c| = radius`, counter-clockwise.
pub fn circle(center: C64, radius: f64) -> Contour {
    Contour {
        segments: alloc::vec![Segment::Arc { center, radius, start: 0.0, sweep: 2.0 * PI }],
        poles: Vec::new(),
        eps: radius,
        closed_at_infinity: false,
    }
}

/// Graded panel breakpoints on `[0, len]` refined geometrically toward ends
/// lying `eps` from a pole.
fn line_breaks(len: f64, eps: f64, grade: [bool; 2], panels: usize) -> Vec<f64> {
    let mut left = Vec::new();
    let mut right = Vec::new();
    let half = 0.5 * len;
    let mut span_l = 0.0;
    let mut span_r = 0.0;
    if grade[0] {
        let mut d = eps;
        while d - eps < half {
            left.push(d - eps);
            d *= 2.0;
        }
        span_l = left.last().copied().unwrap_or(0.0);
    }
    if grade[1] {
        let mut d = eps;
        while d - eps < half {
            right.push(len - (d - eps));
            d *= 2.0;
        }
        span_r = len - right.last().copied().unwrap_or(len);
    }
    let mut out = left;
    if out.is_empty() {
        out.push(0.0);
    }
    let (a, b) = (span_l, len - span_r);
    for k in 1..panels {
        out.push(a + (b - a) * k as f64 / panels as f64);
    }
    right.reverse();
    if right.is_empty() {
        out.push(len);
    } else {
        out.extend(right);
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|x, y| libm::fabs(*x - *y) <= 1e-15 * len);
    out
}

/// Nodes `(z, dz-weight)` along the contour in path order.
pub fn contour_nodes(c: &Contour, rule: &ContourRule) -> Vec<(C64, C64)> {
    let (gx, gw) = quad::gauss_legendre(rule.order);
    let mut out = Vec::new();
    let panel = |lo: f64, hi: f64, out: &mut Vec<(C64, C64)>, map: &dyn Fn(f64) -> (C64, C64)| {
        let (m, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for (x, w) in gx.iter().zip(&gw) {
            let (z, dz) = map(m + h * x);
            out.push((z, dz * (h * w)));
        }
    };
    for seg in &c.segments {
        match *seg {
            Segment::Line { a, b, grade } => {
                let len = (b - a).norm();
                let dir = (b - a) / len;
                let breaks = line_breaks(len, c.eps, grade, rule.panels);
                for pair in breaks.windows(2) {
                    panel(pair[0], pair[1], &mut out, &|s| (a + dir * s, dir));
                }
            }
            Segment::Arc { center, radius, start, sweep } => {
                let n = if libm::fabs(sweep) > PI + 1e-12 { 2 * rule.panels } else { rule.panels.max(2) };
                for k in 0..n {
                    let lo = start + sweep * k as f64 / n as f64;
                    let hi = start + sweep * (k + 1) as f64 / n as f64;
                    panel(lo, hi, &mut out, &|th| {
                        let e = C64::new(libm::cos(th), libm::sin(th));
                        (center + e * radius, I_C * e * radius)
                    });
                }
            }
            Segment::Ray { a, dir } => {
                // z = a + dir·(1/s − 1), s ∈ (0, 1]; ordered along the path.
                let n = rule.panels.max(2);
                let map = |s: f64| {
                    let z = C64::new(a + dir * (1.0 / s - 1.0), 0.0);
                    // path orientation: toward +∞ when dir = +1 means s decreasing
                    (z, C64::new(1.0 / (s * s), 0.0))
                };
                let mut nodes = Vec::new();
                for k in 0..n {
                    panel(k as f64 / n as f64, (k + 1) as f64 / n as f64, &mut nodes, &map);
                }
                // |dz/ds| = 1/s²; the path runs left to right on the real axis either way.
                if dir > 0.0 {
                    nodes.reverse();
                }
                out.extend(nodes);
            }
        }
    }
    out
}

/// `∮ f(z) dz` along `c`, visiting nodes in path order with a shared [`BranchState`].
pub fn contour_integrate<V, F>(mut f: F, c: &Contour, rule: &ContourRule, anchor: AtanhBranch) -> Result<V>
where
    V: Lanes + Mul<C64, Output = V>,
    F: FnMut(C64, &mut BranchState) -> Result<V>,
{
    let mut state = BranchState::new(anchor);
    let mut acc = Accumulator::new();
    for (z, dz) in contour_nodes(c, rule) {
        acc.add(f(z, &mut state)? * dz);
    }
    Ok(acc.total())
}

/// Numerical check that `|f(R e^{iθ})|·R → 0` on the upper half plane.
pub fn check_decay(f: impl Fn(C64) -> C64) -> Result<()> {
    let mut prev = f64::INFINITY;
    for r in [1e2, 1e3, 1e4, 1e5] {
        let m = (1..8)
            .map(|k| {
                let th = PI * k as f64 / 8.0;
                f(C64::new(r * libm::cos(th), r * libm::sin(th))).norm() * r
            })
            .fold(0.0, f64::max);
        if !(m < 0.5 * prev || m < 1e-12) {
            return Err(Error::NonDecaying);
        }
        prev = m;
    }
    Ok(())
}

/// Principal value `∫_a^b f` with symmetric `ε`-excisions around real `poles`.
pub fn principal_value(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    poles: &[f64],
    eps: f64,
    rule: &ContourRule,
) -> Result<f64> {
    let mut cuts: Vec<f64> = poles.to_vec();
    cuts.sort_by(f64::total_cmp);
    let mut pieces = Vec::new();
    let mut lo = a;
    for &p in &cuts {
        if p - eps <= lo || p + eps >= b {
            return Err(Error::BadGeometry("excision must lie inside the interval"));
        }
        pieces.push((lo, p - eps, [lo != a, true]));
        lo = p + eps;
    }
    pieces.push((lo, b, [lo != a, false]));
    let (gx, gw) = quad::gauss_legendre(rule.order);
    let mut acc = crate::sum::Compensated::<1>::new();
    for (lo, hi, grade) in pieces {
        let breaks = line_breaks(hi - lo, eps, grade, rule.panels);
        for pair in breaks.windows(2) {
            let (m, h) = (lo + 0.5 * (pair[0] + pair[1]), 0.5 * (pair[1] - pair[0]));
            for (x, w) in gx.iter().zip(&gw) {
                acc.add([f(m + h * x) * h * w]);
            }
        }
    }
    Ok(acc.total()[0])
}

/// Polynomial with complex coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<C64>);

impl Poly {
    pub fn real(c: &[f64]) -> Self {
        Poly(c.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.0.iter().rev().fold(ZERO_C, |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Poly(self.0.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect())
    }

    /// Quotient by `(z − p)`, dropping the remainder.
    pub fn deflate(&self, p: C64) -> Self {
        let n = self.0.len();
        if n <= 1 {
            return Poly(alloc::vec![]);
        }
        let mut q = alloc::vec![ZERO_C; n - 1];
        let mut carry = ZERO_C;
        for k in (1..n).rev() {
            carry = self.0[k] + carry * p;
            q[k - 1] = carry;
        }
        Poly(q)
    }
}

/// Rational function `num/den`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rational {
    pub num: Poly,
    pub den: Poly,
}

impl Rational {
    pub fn new(num: Poly, den: Poly) -> Self {
        Self { num, den }
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.num.eval(z) / self.den.eval(z)
    }

    /// `1/(z²−1)²`.
    pub fn inv_sq_minus_one_sq() -> Self {
        Self::new(Poly::real(&[1.0]), Poly::real(&[1.0, 0.0, -2.0, 0.0, 1.0]))
    }

    /// `1/(z²−1)`.
    pub fn inv_sq_minus_one() -> Self {
        Self::new(Poly::real(&[1.0]), Poly::real(&[-1.0, 0.0, 1.0]))
    }

    /// `(5z²−3)/(z²−1)²`.
    pub fn wide_cap_rational() -> Self {
        Self::new(Poly::real(&[-3.0, 0.0, 5.0]), Poly::real(&[1.0, 0.0, -2.0, 0.0, 1.0]))
    }
}

/// Residue from the derivative formula (order 2) or the limit formula (order 1).
pub fn residue_analytic(f: &Rational, pole: C64, order: u32) -> Result<C64> {
    match order {
        1 => Ok(f.num.eval(pole) / f.den.derivative().eval(pole)),
        2 => {
            let q = f.den.deflate(pole).deflate(pole);
            let (n, dn) = (f.num.eval(pole), f.num.derivative().eval(pole));
            let (qv, dq) = (q.eval(pole), q.derivative().eval(pole));
            Ok((dn * qv - n * dq) / (qv * qv))
        }
        _ => Err(Error::BadParameters("pole order must be 1 or 2")),
    }
}

/// Residue as the mean of `f(z)(z − p)` over a small circle (trapezoid rule).
pub fn residue_numerical(f: &Rational, pole: C64, radius: f64, nodes: usize) -> C64 {
    let mut acc = Accumulator::new();
    for k in 0..nodes {
        let th = 2.0 * PI * k as f64 / nodes as f64;
        let dz = C64::new(libm::cos(th), libm::sin(th)) * radius;
        acc.add(f.eval(pole + dz) * dz);
    }
    let total: C64 = acc.total();
    total / nodes as f64
}

/// Analytic residue, cross-checked against the small-circle integral.
pub fn residue(f: &Rational, pole: C64, order: u32) -> Result<C64> {
    let analytic = residue_analytic(f, pole, order)?;
    let numerical = residue_numerical(f, pole, 0.05, 256);
    let tol = 1e-8 * numerical.norm().max(1.0);
    if !analytic.is_finite() || (analytic - numerical).norm() > tol {
        return Err(Error::OrderMismatch {
            analytic: [analytic.re, analytic.im],
            numerical: [numerical.re, numerical.im],
        });
    }
    Ok(analytic)
}
