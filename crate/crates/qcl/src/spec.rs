//! Text descriptors for fields and surfaces, as typed on the command line.
//!
//! Fields: `const:<poly>`, `poly:<poly>`, `gen:<variant>:<poly>`,
//! `kernel:<name>[:reflected][@w,x,y,z]`, `random:deg=<n>`.
//!
//! Surfaces: `sphere:r=1`, `capped:r=1,delta=0.5`, `box:h=1,hx=0.5`,
//! `prism:rho=1,t1=1`, `deformed:rho=1,t1=2,eps=0.2`, plus the two bi routes
//! `narrow:rho=1` and `wide:t1=1`. Any surface may end in `@w,x,y,z` to pin
//! its centre; otherwise it is centred on q₀.

use std::fmt;
use std::str::FromStr;

use qcl_core::contour::{AtanhBranch, PolePolicy};
use qcl_core::fields::{gen_exp_poly, Kernel, KernelKind, PolyField, QField, Regularity};
use qcl_core::geometry::{self, Surface, SurfaceKind, CAP_DELTA};
use qcl_core::theorems::TheoremId;
use qcl_core::BiQuat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub fn parse_vec4(s: &str) -> Result<[f64; 4], CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(CliError::usage(format!("expected four comma-separated numbers, got `{s}`")));
    }
    let mut out = [0.0; 4];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = parse_f64(p)?;
    }
    Ok(out)
}

pub fn parse_f64(s: &str) -> Result<f64, CliError> {
    let v: f64 = s.trim().parse().map_err(|_| CliError::usage(format!("`{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::usage(format!("`{s}` is not finite")));
    }
    Ok(v)
}

fn fmt_vec4(v: &[f64; 4]) -> String {
    format!("{},{},{},{}", v[0], v[1], v[2], v[3])
}

fn regularity_name(r: Regularity) -> &'static str {
    match r {
        Regularity::Left => "left",
        Regularity::Conjugate => "conj",
        Regularity::Right => "right",
        Regularity::RightConjugate => "right-conj",
        Regularity::Bi => "bi",
        Regularity::BiConjugate => "bi-conj",
        Regularity::BiRight => "bi-right",
        Regularity::BiRightConjugate => "bi-right-conj",
    }
}

fn parse_regularity(s: &str) -> Option<Regularity> {
    [
        Regularity::Left,
        Regularity::Conjugate,
        Regularity::Right,
        Regularity::RightConjugate,
        Regularity::Bi,
        Regularity::BiConjugate,
        Regularity::BiRight,
        Regularity::BiRightConjugate,
    ]
    .into_iter()
    .find(|r| regularity_name(*r) == s)
}

/// Comma-separated `key=value` pairs.
fn key_values(s: &str) -> Result<Vec<(&str, &str)>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| CliError::usage(format!("expected key=value, got `{kv}`")))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FieldSpec {
    /// Constant polynomial; stored as written.
    Const(String),
    Poly(String),
    /// Regular field generated from a spatial polynomial.
    Gen(Regularity, String),
    Kernel { kind: KernelKind, reflected: bool, offset: [f64; 4] },
    /// Seeded random field of the regularity the theorem asks for.
    Random { degree: u32 },
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::Const("1".into())
    }
}

impl FieldSpec {
    /// Materialise the field. `random` fields draw from `seed` and take the
    /// regularity `t` requires.
    pub fn build(&self, t: Option<TheoremId>, seed: u64) -> Result<(Box<dyn QField + Send + Sync>, String), CliError> {
        match self {
            FieldSpec::Const(s) | FieldSpec::Poly(s) => {
                let p: PolyField = s.parse()?;
                if matches!(self, FieldSpec::Const(_)) && p.degree() > 0 {
                    return Err(CliError::usage(format!("`{s}` is not constant")));
                }
                Ok((Box::new(p), self.to_string()))
            }
            FieldSpec::Gen(r, s) => {
                let g: PolyField = s.parse()?;
                let p = gen_exp_poly(&g, *r)?;
                let text = format!("poly:{p}");
                Ok((Box::new(p), text))
            }
            FieldSpec::Kernel { kind, reflected, offset } => {
                let mut k = Kernel::new(*kind, *offset);
                if *reflected {
                    k = k.reflected();
                }
                Ok((Box::new(k), self.to_string()))
            }
            FieldSpec::Random { degree } => {
                let r = t.map(|t| t.f_regularity()).unwrap_or(Regularity::Left);
                let p = random_regular(*degree, r, seed)?;
                let text = format!("poly:{p}");
                Ok((Box::new(p), text))
            }
        }
    }
}

/// Random regular polynomial of total degree `degree` in the spatial
/// generator; coefficients are multiples of 1/8 so the text form is exact.
pub fn random_regular(degree: u32, variant: Regularity, seed: u64) -> Result<PolyField, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = PolyField::zero();
    for a in 0..=degree {
        for b in 0..=degree - a {
            for c in 0..=degree - a - b {
                let mut coeff = [0.0; 8];
                for k in [0, 2, 4, 6] {
                    coeff[k] = rng.random_range(-8i32..=8) as f64 / 8.0;
                }
                g.add_term([0, a, b, c], BiQuat::from_components(coeff));
            }
        }
    }
    Ok(gen_exp_poly(&g, variant)?)
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Const(s) => write!(f, "const:{s}"),
            FieldSpec::Poly(s) => write!(f, "poly:{s}"),
            FieldSpec::Gen(r, s) => write!(f, "gen:{}:{s}", regularity_name(*r)),
            FieldSpec::Kernel { kind, reflected, offset } => {
                write!(f, "kernel:{}", kind.name())?;
                if *reflected {
                    write!(f, ":reflected")?;
                }
                if *offset != [0.0; 4] {
                    write!(f, "@{}", fmt_vec4(offset))?;
                }
                Ok(())
            }
            FieldSpec::Random { degree } => write!(f, "random:deg={degree}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let (head, rest) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| CliError::usage(format!("field `{s}` needs a kind prefix such as const: or poly:")))?;
        let check = |text: &str| -> Result<String, CliError> {
            text.parse::<PolyField>()?;
            Ok(text.trim().to_string())
        };
        match head {
            "const" => Ok(FieldSpec::Const(check(rest)?)),
            "poly" => Ok(FieldSpec::Poly(check(rest)?)),
            "gen" => {
                let (r, text) = rest.split_once(':').ok_or_else(|| CliError::usage("gen: expects gen:<variant>:<poly>"))?;
                let r = parse_regularity(r.trim()).ok_or_else(|| CliError::usage(format!("unknown regularity `{r}`")))?;
                Ok(FieldSpec::Gen(r, check(text)?))
            }
            "kernel" => {
                let (body, offset) = match rest.split_once('@') {
                    Some((b, o)) => (b, parse_vec4(o)?),
                    None => (rest, [0.0; 4]),
                };
                let (name, reflected) = match body.split_once(':') {
                    Some((n, "reflected")) => (n, true),
                    Some((_, flag)) => return Err(CliError::usage(format!("unknown kernel flag `{flag}`"))),
                    None => (body, false),
                };
                let kind = KernelKind::from_name(name.trim())
                    .ok_or_else(|| CliError::usage(format!("unknown kernel `{name}`")))?;
                Ok(FieldSpec::Kernel { kind, reflected, offset })
            }
            "random" => {
                let mut degree = 1;
                for (k, v) in key_values(rest)? {
                    match k {
                        "deg" => degree = v.parse().map_err(|_| CliError::usage(format!("bad degree `{v}`")))?,
                        _ => return Err(CliError::usage(format!("unknown random-field key `{k}`"))),
                    }
                }
                Ok(FieldSpec::Random { degree })
            }
            _ => Err(CliError::usage(format!("unknown field kind `{head}`"))),
        }
    }
}

impl TryFrom<String> for FieldSpec {
    type Error = CliError;
    fn try_from(s: String) -> Result<Self, CliError> {
        s.parse()
    }
}

impl From<FieldSpec> for String {
    fn from(f: FieldSpec) -> String {
        f.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Sphere { r: f64 },
    Capped { r: f64, delta: f64 },
    Box { half: [f64; 4] },
    Prism { rho: f64, t1: f64 },
    /// `eps = None` picks the default detour radius.
    Deformed { rho: f64, t1: f64, eps: Option<f64>, branch: AtanhBranch },
    /// Bi route with `t1 = 2ρ`.
    Narrow { rho: f64 },
    /// Bi route with `ρ = 2·t1`.
    Wide { t1: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SurfaceSpec {
    pub shape: Shape,
    /// Explicit centre; `None` centres the surface on q₀.
    pub center: Option<[f64; 4]>,
}

/// How a run integrates: over a fixed surface or along one of the bi routes.
#[derive(Debug, Clone, PartialEq)]
pub enum Route {
    Surface(Surface),
    Narrow { rho: f64 },
    Wide { t1: f64 },
}

impl Route {
    pub fn name(&self) -> &'static str {
        match self {
            Route::Surface(_) => "surface",
            Route::Narrow { .. } => "narrow",
            Route::Wide { .. } => "wide",
        }
    }
}

impl SurfaceSpec {
    pub fn centred(shape: Shape) -> Self {
        Self { shape, center: None }
    }

    pub fn from_kind(kind: &SurfaceKind) -> Self {
        let shape = match *kind {
            SurfaceKind::Sphere3 { radius, .. } => Shape::Sphere { r: radius },
            SurfaceKind::CappedSphere { radius, delta, .. } => Shape::Capped { r: radius, delta },
            SurfaceKind::HyperBox { half, .. } => Shape::Box { half },
            SurfaceKind::Prism { rho, t1, .. } => Shape::Prism { rho, t1 },
            SurfaceKind::DeformedPrism { rho, t1, eps, branch, .. } => {
                Shape::Deformed { rho, t1, eps: Some(eps), branch }
            }
        };
        Self { shape, center: Some(kind.center()) }
    }

    pub fn route(&self, q0: [f64; 4]) -> Result<Route, CliError> {
        let c = self.center.unwrap_or(q0);
        let s = match self.shape {
            Shape::Sphere { r } => geometry::sphere3(c, r)?,
            Shape::Capped { r, delta } => geometry::capped_sphere(c, r, delta)?,
            Shape::Box { half } => geometry::hyperbox(c, half)?,
            Shape::Prism { rho, t1 } => geometry::prism(c, rho, t1)?,
            Shape::Deformed { rho, t1, eps, branch } => {
                geometry::deformed_prism(c, rho, t1, eps.unwrap_or(0.2 * rho.min(t1)), branch)?
            }
            Shape::Narrow { .. } | Shape::Wide { .. } if self.center.is_some_and(|c| c != q0) => {
                return Err(CliError::usage("the narrow and wide routes are always centred on q0"));
            }
            Shape::Narrow { rho } => return Ok(Route::Narrow { rho }),
            Shape::Wide { t1 } => return Ok(Route::Wide { t1 }),
        };
        Ok(Route::Surface(s))
    }
}

fn policy_name(p: PolePolicy) -> &'static str {
    match p {
        PolePolicy::Include => "in",
        PolePolicy::Exclude => "out",
    }
}

fn parse_policy(s: &str) -> Result<PolePolicy, CliError> {
    match s {
        "in" => Ok(PolePolicy::Include),
        "out" => Ok(PolePolicy::Exclude),
        _ => Err(CliError::usage(format!("pole policy must be `in` or `out`, got `{s}`"))),
    }
}

impl fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.shape {
            Shape::Sphere { r } => write!(f, "sphere:r={r}")?,
            Shape::Capped { r, delta } => write!(f, "capped:r={r},delta={delta}")?,
            Shape::Box { half } => {
                if half.iter().all(|h| *h == half[0]) {
                    write!(f, "box:h={}", half[0])?
                } else {
                    write!(f, "box:hw={},hx={},hy={},hz={}", half[0], half[1], half[2], half[3])?
                }
            }
            Shape::Prism { rho, t1 } => write!(f, "prism:rho={rho},t1={t1}")?,
            Shape::Deformed { rho, t1, eps, branch } => {
                write!(f, "deformed:rho={rho},t1={t1}")?;
                if let Some(e) = eps {
                    write!(f, ",eps={e}")?;
                }
                if branch != AtanhBranch::DEFAULT {
                    write!(f, ",plus={},minus={}", policy_name(branch.plus_one), policy_name(branch.minus_one))?;
                }
            }
            Shape::Narrow { rho } => write!(f, "narrow:rho={rho}")?,
            Shape::Wide { t1 } => write!(f, "wide:t1={t1}")?,
        }
        if let Some(c) = &self.center {
            write!(f, "@{}", fmt_vec4(c))?;
        }
        Ok(())
    }
}

impl FromStr for SurfaceSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let (body, center) = match s.trim().split_once('@') {
            Some((b, c)) => (b, Some(parse_vec4(c)?)),
            None => (s.trim(), None),
        };
        let (head, rest) = body.split_once(':').unwrap_or((body, ""));
        let mut kv = std::collections::BTreeMap::new();
        for (k, v) in key_values(rest)? {
            if kv.insert(k, v).is_some() {
                return Err(CliError::usage(format!("surface key `{k}` given twice")));
            }
        }
        let take = |kv: &mut std::collections::BTreeMap<&str, &str>, k: &str| -> Result<Option<f64>, CliError> {
            kv.remove(k).map(parse_f64).transpose()
        };
        let need = |v: Option<f64>, k: &str| v.ok_or_else(|| CliError::usage(format!("surface `{head}` needs `{k}=`")));
        let shape = match head.trim() {
            "sphere" => Shape::Sphere { r: need(take(&mut kv, "r")?, "r")? },
            "capped" => Shape::Capped { r: need(take(&mut kv, "r")?, "r")?, delta: take(&mut kv, "delta")?.unwrap_or(CAP_DELTA) },
            "box" => {
                let h = take(&mut kv, "h")?;
                let mut half = [0.0; 4];
                for (a, k) in ["hw", "hx", "hy", "hz"].iter().enumerate() {
                    half[a] = need(take(&mut kv, k)?.or(h), "h")?;
                }
                Shape::Box { half }
            }
            "prism" => {
                let rho = need(take(&mut kv, "rho")?, "rho")?;
                Shape::Prism { rho, t1: take(&mut kv, "t1")?.unwrap_or(rho) }
            }
            "deformed" => {
                let rho = need(take(&mut kv, "rho")?, "rho")?;
                let t1 = need(take(&mut kv, "t1")?, "t1")?;
                let eps = take(&mut kv, "eps")?;
                let mut branch = AtanhBranch::DEFAULT;
                if let Some(p) = kv.remove("plus") {
                    branch.plus_one = parse_policy(p)?;
                }
                if let Some(m) = kv.remove("minus") {
                    branch.minus_one = parse_policy(m)?;
                }
                Shape::Deformed { rho, t1, eps, branch }
            }
            "narrow" => Shape::Narrow { rho: need(take(&mut kv, "rho")?, "rho")? },
            "wide" => Shape::Wide { t1: need(take(&mut kv, "t1")?, "t1")? },
            other => return Err(CliError::usage(format!("unknown surface kind `{other}`"))),
        };
        if let Some(k) = kv.keys().next() {
            return Err(CliError::usage(format!("unknown key `{k}` for surface `{head}`")));
        }
        Ok(Self { shape, center })
    }
}

impl TryFrom<String> for SurfaceSpec {
    type Error = CliError;
    fn try_from(s: String) -> Result<Self, CliError> {
        s.parse()
    }
}

impl From<SurfaceSpec> for String {
    fn from(s: SurfaceSpec) -> String {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surface_round_trip() {
        for s in [
            "sphere:r=1",
            "sphere:r=0.5@0,1,0,0",
            "capped:r=1,delta=0.25",
            "box:h=1",
            "box:hw=1,hx=0.5,hy=1,hz=2",
            "prism:rho=1,t1=1.5",
            "deformed:rho=1,t1=2,eps=0.2",
            "deformed:rho=1,t1=2,plus=out,minus=in",
            "narrow:rho=1",
            "wide:t1=0.5",
        ] {
            let spec: SurfaceSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        let p: SurfaceSpec = "prism:rho=2".parse().unwrap();
        assert_eq!(p.shape, Shape::Prism { rho: 2.0, t1: 2.0 });
        assert!("sphere:r=1,x=2".parse::<SurfaceSpec>().is_err());
        assert!("sphere".parse::<SurfaceSpec>().is_err());
        assert!("box:h=1,h=2".parse::<SurfaceSpec>().is_err());
    }

    #[test]
    fn field_round_trip() {
        for s in ["const:1", "poly:x - w*I", "gen:bi:x + y*J", "kernel:alt-x:reflected@0,0,0,3", "kernel:fueter", "random:deg=2"] {
            let f: FieldSpec = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!("const:x".parse::<FieldSpec>().unwrap().build(None, 0).is_err());
        assert!("kernel:nope".parse::<FieldSpec>().is_err());
        assert!("x - w*I".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn random_fields_are_seeded_and_regular() {
        let a = random_regular(1, Regularity::Bi, 7).unwrap();
        let b = random_regular(1, Regularity::Bi, 7).unwrap();
        let c = random_regular(1, Regularity::Bi, 8).unwrap();
        assert_eq!(a.to_string(), b.to_string());
        assert_ne!(a.to_string(), c.to_string());
        let p = qcl_core::Point::real(0.3, -0.2, 0.1, 0.5);
        let r = qcl_core::operators::regularity_residual(&a, &p, Regularity::Bi, &Default::default()).unwrap();
        assert!(r < 1e-12);
    }
}
