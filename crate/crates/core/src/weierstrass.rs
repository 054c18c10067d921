//! Long Weierstrass curves `y^2 + a1*x*y + a3*y = x^3 + a2*x^2 + a4*x + a6`
//! over the rationals.
//!
//! Points are plain coordinate values. Every public group operation checks
//! that its inputs satisfy the curve it is called on, so a point carried over
//! from a different curve is rejected with [`Error::NotOnCurve`] instead of
//! producing garbage.

use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{rational_sqrt, Rational};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCurve")]
pub struct LongWeierstrass {
    pub a1: Rational,
    pub a2: Rational,
    pub a3: Rational,
    pub a4: Rational,
    pub a6: Rational,
}

#[derive(Deserialize)]
struct RawCurve {
    #[serde(default)]
    a1: Rational,
    #[serde(default)]
    a2: Rational,
    #[serde(default)]
    a3: Rational,
    #[serde(default)]
    a4: Rational,
    #[serde(default)]
    a6: Rational,
}

impl TryFrom<RawCurve> for LongWeierstrass {
    type Error = Error;

    fn try_from(raw: RawCurve) -> Result<Self> {
        LongWeierstrass::new(raw.a1, raw.a2, raw.a3, raw.a4, raw.a6)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum CurvePoint {
    Infinity,
    Affine { x: Rational, y: Rational },
}

impl CurvePoint {
    pub fn affine(x: Rational, y: Rational) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn coords(&self) -> Option<(&Rational, &Rational)> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { x, y } => Some((x, y)),
        }
    }

    pub fn x(&self) -> Option<&Rational> {
        self.coords().map(|(x, _)| x)
    }

    pub fn y(&self) -> Option<&Rational> {
        self.coords().map(|(_, y)| y)
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => f.write_str("inf"),
            CurvePoint::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

impl fmt::Debug for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawPoint {
    Tag(String),
    Affine { x: Rational, y: Rational },
}

impl Serialize for CurvePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CurvePoint::Infinity => RawPoint::Tag("inf".into()).serialize(s),
            CurvePoint::Affine { x, y } => RawPoint::Affine { x: x.clone(), y: y.clone() }.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for CurvePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match RawPoint::deserialize(d)? {
            RawPoint::Tag(t) if t == "inf" => Ok(CurvePoint::Infinity),
            RawPoint::Tag(t) => Err(serde::de::Error::custom(format!("expected \"inf\", got {t:?}"))),
            RawPoint::Affine { x, y } => Ok(CurvePoint::Affine { x, y }),
        }
    }
}

impl LongWeierstrass {
    /// Builds a curve, rejecting singular coefficient sets.
    pub fn new(a1: Rational, a2: Rational, a3: Rational, a4: Rational, a6: Rational) -> Result<Self> {
        let curve = LongWeierstrass { a1, a2, a3, a4, a6 };
        if curve.discriminant().is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(curve)
    }

    /// `y^2 = x^3 + a4*x + a6`.
    pub fn short(a4: Rational, a6: Rational) -> Result<Self> {
        Self::new(Rational::zero(), Rational::zero(), Rational::zero(), a4, a6)
    }

    pub fn b_invariants(&self) -> [Rational; 4] {
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let four = Rational::from(4);
        let b2 = a1 * a1 + &four * a2;
        let b4 = Rational::from(2) * a4 + a1 * a3;
        let b6 = a3 * a3 + &four * a6;
        let b8 = a1 * a1 * a6 + &four * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        [b2, b4, b6, b8]
    }

    pub fn discriminant(&self) -> Rational {
        let [b2, b4, b6, b8] = self.b_invariants();
        -(&b2 * &b2 * &b8) - Rational::from(8) * b4.pow(3) - Rational::from(27) * &b6 * &b6
            + Rational::from(9) * b2 * b4 * b6
    }

    /// True when `a1 = a3 = 0`, i.e. the left side is a bare `y^2`.
    pub fn has_square_lhs(&self) -> bool {
        self.a1.is_zero() && self.a3.is_zero()
    }

    /// `x^3 + a2*x^2 + a4*x + a6`.
    pub fn rhs_at(&self, x: &Rational) -> Rational {
        ((x + &self.a2) * x + &self.a4) * x + &self.a6
    }

    /// `y^2 + a1*x*y + a3*y`.
    pub fn lhs_at(&self, x: &Rational, y: &Rational) -> Rational {
        (y + &self.a1 * x + &self.a3) * y
    }

    fn satisfies(&self, x: &Rational, y: &Rational) -> bool {
        self.lhs_at(x, y) == self.rhs_at(x)
    }

    pub fn contains(&self, pt: &CurvePoint) -> bool {
        match pt {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => self.satisfies(x, y),
        }
    }

    fn check(&self, pt: &CurvePoint) -> Result<()> {
        if self.contains(pt) {
            Ok(())
        } else {
            Err(Error::NotOnCurve(pt.to_string()))
        }
    }

    pub fn negate(&self, pt: &CurvePoint) -> Result<CurvePoint> {
        self.check(pt)?;
        Ok(self.negate_unchecked(pt))
    }

    pub fn add(&self, p: &CurvePoint, q: &CurvePoint) -> Result<CurvePoint> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    pub fn double(&self, p: &CurvePoint) -> Result<CurvePoint> {
        self.check(p)?;
        Ok(self.add_unchecked(p, p))
    }

    /// `n * p` by double-and-add; negative `n` goes through negation.
    pub fn scalar_mul(&self, n: i64, p: &CurvePoint) -> Result<CurvePoint> {
        self.check(p)?;
        let base = if n < 0 { self.negate_unchecked(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = CurvePoint::Infinity;
        let mut addend = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_unchecked(&acc, &addend);
            }
            k >>= 1;
            if k > 0 {
                addend = self.add_unchecked(&addend, &addend);
            }
        }
        Ok(acc)
    }

    pub(crate) fn negate_unchecked(&self, pt: &CurvePoint) -> CurvePoint {
        match pt {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine { x: x.clone(), y: -y - &self.a1 * x - &self.a3 },
        }
    }

    pub(crate) fn add_unchecked(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        let ((x1, y1), (x2, y2)) = match (p.coords(), q.coords()) {
            (None, _) => return q.clone(),
            (_, None) => return p.clone(),
            (Some(a), Some(b)) => (a, b),
        };
        let (slope, intercept) = if x1 != x2 {
            let dx = x2 - x1;
            ((y2 - y1) / &dx, (y1 * x2 - y2 * x1) / dx)
        } else {
            // Same x: either q = -p or q = p.
            let denom = y1 + y2 + &self.a1 * x2 + &self.a3;
            if denom.is_zero() {
                return CurvePoint::Infinity;
            }
            let denom = Rational::from(2) * y1 + &self.a1 * x1 + &self.a3;
            let num = Rational::from(3) * x1 * x1 + Rational::from(2) * &self.a2 * x1 + &self.a4 - &self.a1 * y1;
            let icpt = -(x1.pow(3)) + &self.a4 * x1 + Rational::from(2) * &self.a6 - &self.a3 * y1;
            (num / &denom, icpt / denom)
        };
        let x3 = &slope * &slope + &self.a1 * &slope - &self.a2 - x1 - x2;
        let y3 = -(slope + &self.a1) * &x3 - intercept - &self.a3;
        CurvePoint::Affine { x: x3, y: y3 }
    }

    /// Substitutes `y = M - (a1*x + a3)/2`, giving
    /// `M^2 = x^3 + (a2 + a1^2/4) x^2 + (a4 + a1*a3/2) x + (a6 + a3^2/4)`.
    pub fn complete_square(&self) -> CompletedSquare {
        let half = Rational::frac(1, 2);
        let quarter = Rational::frac(1, 4);
        let target = LongWeierstrass {
            a1: Rational::zero(),
            a2: &self.a2 + &quarter * &self.a1 * &self.a1,
            a3: Rational::zero(),
            a4: &self.a4 + &half * &self.a1 * &self.a3,
            a6: &self.a6 + &quarter * &self.a3 * &self.a3,
        };
        CompletedSquare { source: self.clone(), target }
    }

    /// Points with `x = m/n` in lowest terms, `1 <= n <= den_bound` and
    /// `|x| <= num_bound` (so `|m| <= num_bound * n`), ordered by `n`, then
    /// `m`, then the `+sqrt` branch before the `-sqrt` branch.
    pub fn naive_search(&self, num_bound: u64, den_bound: u64) -> Vec<CurvePoint> {
        let num_bound = i64::try_from(num_bound).unwrap_or(i64::MAX);
        (1..=den_bound).into_par_iter().map(|n| self.points_with_denominator(n, num_bound)).collect::<Vec<_>>().concat()
    }

    fn points_with_denominator(&self, n: u64, num_bound: i64) -> Vec<CurvePoint> {
        let mut out = Vec::new();
        let n_i = n as i64;
        let bound = num_bound.saturating_mul(n_i);
        for m in -bound..=bound {
            if m.unsigned_abs().gcd(&n) != 1 {
                continue;
            }
            let x = Rational::frac(m, n_i);
            let linear = &self.a1 * &x + &self.a3;
            // y^2 + linear*y - rhs = 0 has a rational root iff the
            // discriminant linear^2 + 4*rhs is a rational square.
            let disc = &linear * &linear + Rational::from(4) * self.rhs_at(&x);
            let Some(root) = rational_sqrt(&disc) else { continue };
            let half = Rational::frac(1, 2);
            out.push(CurvePoint::affine(x.clone(), &half * (&root - &linear)));
            if !root.is_zero() {
                out.push(CurvePoint::affine(x, half * (-root - linear)));
            }
        }
        out
    }
}

impl fmt::Display for LongWeierstrass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn term(f: &mut fmt::Formatter<'_>, c: &Rational, mono: &str, first: &mut bool) -> fmt::Result {
            if c.is_zero() {
                return Ok(());
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            let body = match (mag == Rational::one(), mono.is_empty()) {
                (_, true) => mag.to_string(),
                (true, false) => mono.to_string(),
                (false, false) => format!("{mag}*{mono}"),
            };
            if *first {
                *first = false;
                if sign == "-" {
                    write!(f, "-{body}")
                } else {
                    write!(f, "{body}")
                }
            } else {
                write!(f, " {sign} {body}")
            }
        }
        write!(f, "y^2")?;
        let mut first = false;
        term(f, &self.a1, "x*y", &mut first)?;
        term(f, &self.a3, "y", &mut first)?;
        write!(f, " = x^3")?;
        term(f, &self.a2, "x^2", &mut first)?;
        term(f, &self.a4, "x", &mut first)?;
        term(f, &self.a6, "", &mut first)
    }
}

impl fmt::Debug for LongWeierstrass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A long curve together with its completed-square model and the point maps
/// between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletedSquare {
    pub source: LongWeierstrass,
    pub target: LongWeierstrass,
}

impl CompletedSquare {
    fn shift(&self, x: &Rational) -> Rational {
        (&self.source.a1 * x + &self.source.a3) * Rational::frac(1, 2)
    }

    /// Source point to target point: `M = y + (a1*x + a3)/2`.
    pub fn forward(&self, pt: &CurvePoint) -> Result<CurvePoint> {
        self.source.check(pt)?;
        Ok(match pt {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::affine(x.clone(), y + self.shift(x)),
        })
    }

    /// Target point to source point: `y = M - (a1*x + a3)/2`.
    pub fn inverse(&self, pt: &CurvePoint) -> Result<CurvePoint> {
        self.target.check(pt)?;
        Ok(match pt {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::affine(x.clone(), y - self.shift(x)),
        })
    }
}
