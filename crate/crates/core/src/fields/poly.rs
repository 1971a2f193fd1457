use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::{FieldMeta, QField, Regularity};
use crate::algebra::{BiQuat, Point, C64, I_C, ONE_C};
use crate::error::{Error, Result};

/// Exponents of `w^a x^b y^c z^d`.
pub type Monomial = [u32; 4];

/// Polynomial in `(w, x, y, z)` with biquaternion coefficients standing to the
/// left of each monomial.
#[derive(Debug, Clone, Default)]
pub struct PolyField {
    terms: BTreeMap<Monomial, BiQuat>,
    regularity: Option<Regularity>,
}

impl PolyField {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BiQuat) -> Self {
        let mut p = Self::zero();
        p.add_term([0; 4], c);
        p
    }

    /// The coordinate `axis` (0 = w, 1 = x, 2 = y, 3 = z).
    pub fn coordinate(axis: usize) -> Self {
        let mut m = [0; 4];
        m[axis] = 1;
        Self::monomial(m, BiQuat::ONE)
    }

    pub fn monomial(m: Monomial, c: BiQuat) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    /// The identity field `q = w + xI + yJ + zK`.
    pub fn position() -> Self {
        (0..4).fold(Self::zero(), |acc, a| acc + Self::coordinate(a).left_mul(&BiQuat::basis(a)))
    }

    pub fn add_term(&mut self, m: Monomial, c: BiQuat) {
        let e = self.terms.entry(m).or_insert(BiQuat::ZERO);
        *e += c;
        if *e == BiQuat::ZERO {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BiQuat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    pub fn depends_on_w(&self) -> bool {
        self.terms.keys().any(|m| m[0] > 0)
    }

    /// Declare the regularity the field is known to have.
    pub fn with_regularity(mut self, r: Option<Regularity>) -> Self {
        self.regularity = r;
        self
    }

    pub fn declared_regularity(&self) -> Option<Regularity> {
        self.regularity
    }

    pub fn left_mul(&self, q: &BiQuat) -> Self {
        self.map_coeffs(|c| *q * c)
    }

    pub fn right_mul(&self, q: &BiQuat) -> Self {
        self.map_coeffs(|c| c * *q)
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map_coeffs(|c| c * s)
    }

    fn map_coeffs(&self, f: impl Fn(BiQuat) -> BiQuat) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, f(*c));
        }
        out
    }

    /// Ordered product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = [ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2], ma[3] + mb[3]];
                out.add_term(m, *ca * *cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(BiQuat::ONE), |acc, _| acc.mul(self))
    }

    /// `∂/∂(axis)`.
    pub fn derivative(&self, axis: usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if m[axis] == 0 {
                continue;
            }
            let mut d = *m;
            d[axis] -= 1;
            out.add_term(d, *c * (m[axis] as f64));
        }
        out
    }

    /// `∇̄f = I ∂_x f + J ∂_y f + K ∂_z f` with basis quaternions on the left.
    pub fn nabla_left(&self) -> Self {
        (1..4).fold(Self::zero(), |acc, a| acc + self.derivative(a).left_mul(&BiQuat::basis(a)))
    }

    /// `f∇̄ = ∂_x f I + ∂_y f J + ∂_z f K` with basis quaternions on the right.
    pub fn nabla_right(&self) -> Self {
        (1..4).fold(Self::zero(), |acc, a| acc + self.derivative(a).right_mul(&BiQuat::basis(a)))
    }

    /// `f(−w, x, y, z)`.
    pub fn reflect_time(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let s = if m[0] % 2 == 1 { -1.0 } else { 1.0 };
            out.add_term(*m, *c * s);
        }
        out.regularity = self.regularity.map(reflect_regularity);
        out
    }

    /// `f(w + a, x + b, ...)`: re-expand about a shifted origin.
    pub fn translate(&self, by: [f64; 4]) -> Self {
        let mut out = Self::zero();
        let shifted: Vec<PolyField> = (0..4)
            .map(|a| Self::coordinate(a) + Self::constant(BiQuat::real(by[a], 0.0, 0.0, 0.0)))
            .collect();
        for (m, c) in &self.terms {
            let mut term = Self::constant(*c);
            for a in 0..4 {
                term = term.mul(&shifted[a].pow(m[a]));
            }
            out = out + term;
        }
        out.regularity = self.regularity;
        out
    }

    pub fn eval_at(&self, p: &Point) -> BiQuat {
        let mut acc = crate::sum::Accumulator::new();
        for (m, c) in &self.terms {
            let mut s = ONE_C;
            for a in 0..4 {
                for _ in 0..m[a] {
                    s *= p.0[a];
                }
            }
            acc.add(*c * s);
        }
        acc.total()
    }
}

/// Equality of the polynomials; the declared regularity tag is ignored.
impl PartialEq for PolyField {
    fn eq(&self, o: &Self) -> bool {
        self.terms == o.terms
    }
}

fn reflect_regularity(r: Regularity) -> Regularity {
    use Regularity::*;
    match r {
        Left => Conjugate,
        Conjugate => Left,
        Right => RightConjugate,
        RightConjugate => Right,
        Bi => BiConjugate,
        BiConjugate => Bi,
        BiRight => BiRightConjugate,
        BiRightConjugate => BiRight,
    }
}

impl core::ops::Add for PolyField {
    type Output = PolyField;
    fn add(mut self, o: PolyField) -> PolyField {
        for (m, c) in o.terms {
            self.add_term(m, c);
        }
        self.regularity = None;
        self
    }
}

impl core::ops::Sub for PolyField {
    type Output = PolyField;
    fn sub(self, o: PolyField) -> PolyField {
        self + o.scale(C64::new(-1.0, 0.0))
    }
}

impl QField for PolyField {
    fn eval(&self, p: &Point) -> Result<BiQuat> {
        Ok(self.eval_at(p))
    }

    fn meta(&self) -> FieldMeta {
        FieldMeta { regularity: self.regularity, locus: Default::default() }
    }

    fn as_poly(&self) -> Option<&PolyField> {
        Some(self)
    }
}

/// Build a regular field from a spatial generating function `G(x, y, z)`.
///
/// The exponential is expanded as a terminating series, e.g.
/// `e^{−w∇̄}G = Σ (−w)ⁿ/n! ∇̄ⁿG`. Right variants apply `∇̄` from the right,
/// bi variants replace `w` by `i t`.
pub fn gen_exp_poly(g: &PolyField, variant: Regularity) -> Result<PolyField> {
    if g.depends_on_w() {
        return Err(Error::NotSpatial);
    }
    // e^{s w ∇̄}: the coefficient multiplying w
    let s = match variant {
        Regularity::Left | Regularity::Right => C64::new(-1.0, 0.0),
        Regularity::Conjugate | Regularity::RightConjugate => ONE_C,
        Regularity::Bi | Regularity::BiRight => -I_C,
        Regularity::BiConjugate | Regularity::BiRightConjugate => I_C,
    };
    let w = PolyField::coordinate(0);
    let mut out = PolyField::zero();
    let mut nabla_n = g.clone();
    let mut w_n = PolyField::constant(BiQuat::ONE);
    let mut coeff = ONE_C;
    let mut n = 0u32;
    while !nabla_n.is_zero() {
        // (s w)^n / n! applied as a scalar factor; scalars commute with everything.
        out = out + nabla_n.mul(&w_n).scale(coeff);
        n += 1;
        coeff = coeff * s / (n as f64);
        w_n = w_n.mul(&w);
        nabla_n = if variant.is_right() { nabla_n.nabla_right() } else { nabla_n.nabla_left() };
    }
    Ok(out.with_regularity(Some(variant)))
}

// ---------------------------------------------------------------------------
// Text format: sums of `coeff*w^a*x^b*y^c*z^d`, e.g. `x^2 - 2*w*x*I - w^2`.

impl FromStr for PolyField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tokens = tokenize(s)?;
        let mut parser = Parser { tokens, pos: 0 };
        let p = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(Error::Parse(format!("unexpected trailing input in `{s}`")));
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text.parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{text}`")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<PolyField> {
        let mut acc = PolyField::zero();
        let mut first = true;
        loop {
            let neg = if self.eat('-') {
                true
            } else {
                if !self.eat('+') && !first {
                    break;
                }
                false
            };
            let t = self.term()?;
            acc = if neg { acc - t } else { acc + t };
            first = false;
            match self.peek() {
                Some(Tok::Op('+')) | Some(Tok::Op('-')) => continue,
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<PolyField> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.power()?);
            } else if self.eat('/') {
                let d = self.power()?;
                let c = match (d.len(), d.terms().next()) {
                    (1, Some((m, c))) if *m == [0; 4] && c.x == C64::new(0.0, 0.0)
                        && c.y == C64::new(0.0, 0.0) && c.z == C64::new(0.0, 0.0) && c.w != C64::new(0.0, 0.0) => c.w,
                    _ => return Err(Error::Parse("can only divide by a nonzero scalar constant".to_string())),
                };
                acc = acc.scale(ONE_C / c);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<PolyField> {
        let base = self.primary()?;
        if self.eat('^') {
            match self.tokens.get(self.pos) {
                Some(Tok::Num(n)) if *n >= 0.0 && *n == libm::floor(*n) && *n <= 64.0 => {
                    let n = *n as u32;
                    self.pos += 1;
                    Ok(base.pow(n))
                }
                _ => Err(Error::Parse("exponent must be a small nonnegative integer".to_string())),
            }
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<PolyField> {
        match self.tokens.get(self.pos).cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(PolyField::constant(BiQuat::real(v, 0.0, 0.0, 0.0)))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing `)`".to_string()));
                }
                Ok(e)
            }
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(self.power()?.scale(C64::new(-1.0, 0.0)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                ident(&name)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

fn ident(name: &str) -> Result<PolyField> {
    let unit = |q: BiQuat| Ok(PolyField::constant(q));
    match name {
        "w" | "t" => Ok(PolyField::coordinate(0)),
        "x" => Ok(PolyField::coordinate(1)),
        "y" => Ok(PolyField::coordinate(2)),
        "z" => Ok(PolyField::coordinate(3)),
        "i" => unit(BiQuat::IMAG),
        "I" => unit(BiQuat::I),
        "J" => unit(BiQuat::J),
        "K" => unit(BiQuat::K),
        "iI" => unit(BiQuat::I * I_C),
        "iJ" => unit(BiQuat::J * I_C),
        "iK" => unit(BiQuat::K * I_C),
        _ => Err(Error::Parse(format!("unknown symbol `{name}`"))),
    }
}

impl fmt::Display for PolyField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let units = [("", c.w), ("*I", c.x), ("*J", c.y), ("*K", c.z)];
            for (unit, v) in units {
                for (part, val) in [("", v.re), ("*i", v.im)] {
                    if val == 0.0 {
                        continue;
                    }
                    let sign = if val < 0.0 { "-" } else { "+" };
                    if first {
                        if val < 0.0 {
                            write!(f, "-")?;
                        }
                    } else {
                        write!(f, " {sign} ")?;
                    }
                    first = false;
                    write!(f, "{}{part}{unit}", libm::fabs(val))?;
                    for (a, var) in ["w", "x", "y", "z"].iter().enumerate() {
                        match m[a] {
                            0 => {}
                            1 => write!(f, "*{var}")?,
                            k => write!(f, "*{var}^{k}")?,
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PolyField {
        s.parse().unwrap()
    }

    #[test]
    fn parses_terms() {
        let f = p("x - w*I");
        let mut want = PolyField::coordinate(1);
        want.add_term([1, 0, 0, 0], -BiQuat::I);
        assert_eq!(f, want);
        assert_eq!(p("3/2*iI*t*x^2"), PolyField::monomial([1, 2, 0, 0], BiQuat::I * C64::new(0.0, 1.5)));
        assert_eq!(p("(1 + J)*x"), PolyField::monomial([0, 1, 0, 0], BiQuat::ONE + BiQuat::J));
        assert!("x^-1".parse::<PolyField>().is_err());
        assert!("x/y".parse::<PolyField>().is_err());
        assert!("q".parse::<PolyField>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["x^2 - 2*w*x*I - w^2", "1.5*iJ*y*z + 3*K - 0.25*i", "0"] {
            let f = p(s);
            assert_eq!(p(&f.to_string()), f, "{s} -> {f}");
        }
    }

    #[test]
    fn generating_function_series() {
        assert_eq!(gen_exp_poly(&p("1"), Regularity::Left).unwrap(), p("1"));
        assert_eq!(gen_exp_poly(&p("x"), Regularity::Left).unwrap(), p("x - w*I"));
        assert_eq!(gen_exp_poly(&p("x^2"), Regularity::Left).unwrap(), p("x^2 - 2*w*x*I - w^2"));
        assert_eq!(gen_exp_poly(&p("x"), Regularity::Bi).unwrap(), p("x - iI*t"));
        assert_eq!(gen_exp_poly(&p("w*x"), Regularity::Left), Err(Error::NotSpatial));
    }

    #[test]
    fn nabla_identities_on_polynomials() {
        // ∇̄ r̄ = −3
        let rbar = p("x*I + y*J + z*K");
        assert_eq!(rbar.nabla_left(), p("-3"));
        assert_eq!(rbar.nabla_right(), p("-3"));
        // ∇̄∇̄ = −∇²
        let g = p("x^2*y + z^3");
        let lap = g.derivative(1).derivative(1) + g.derivative(2).derivative(2) + g.derivative(3).derivative(3);
        assert_eq!(g.nabla_left().nabla_left(), lap.scale(C64::new(-1.0, 0.0)));
    }

    #[test]
    fn translate_and_reflect() {
        let f = p("x*w + I*y^2");
        let g = f.translate([1.0, -2.0, 0.5, 0.0]);
        let at = Point::real(0.3, 0.1, -0.7, 2.0);
        let shifted = Point::real(1.3, -1.9, -0.2, 2.0);
        assert!(g.eval_at(&at).max_abs_diff(&f.eval_at(&shifted)) < 1e-14);
        let r = f.reflect_time();
        assert_eq!(r.eval_at(&at), f.eval_at(&Point::real(-0.3, 0.1, -0.7, 2.0)));
    }
}
