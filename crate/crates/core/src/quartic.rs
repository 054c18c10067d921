//! Quartic models `v^2 = a*u^4 + b*u^3 + c*u^2 + d*u + e` and their
//! birational map to a long Weierstrass cubic when `e = q^2` is a nonzero
//! rational square.
//!
//! With `q = +sqrt(e)` the cubic is
//! `y^2 + a1*x*y + a3*y = x^3 + a2*x^2 + a4*x + a6` where
//! `a1 = d/q`, `a2 = c - d^2/(4q^2)`, `a3 = 2qb`, `a4 = -4q^2*a`, `a6 = a2*a4`.
//! The quartic point `(0, q)` goes to infinity and `(0, -q)` to
//! `(-a2, a1*a2 - a3)`.
//!
//! When `e` is not a square but some rational point `(u0, v0)` is known,
//! [`Quartic::shift_by`] recentres the model at `u0` so that the new constant
//! term is `v0^2`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{rational_sqrt, Rational};
use crate::weierstrass::{CurvePoint, LongWeierstrass};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawQuartic")]
pub struct Quartic {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
    pub e: Rational,
}

#[derive(Deserialize)]
struct RawQuartic {
    a: Rational,
    #[serde(default)]
    b: Rational,
    #[serde(default)]
    c: Rational,
    #[serde(default)]
    d: Rational,
    #[serde(default)]
    e: Rational,
}

impl TryFrom<RawQuartic> for Quartic {
    type Error = Error;

    fn try_from(r: RawQuartic) -> Result<Self> {
        Quartic::new(r.a, r.b, r.c, r.d, r.e)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuarticPoint {
    pub u: Rational,
    pub v: Rational,
}

impl QuarticPoint {
    pub fn new(u: Rational, v: Rational) -> Self {
        QuarticPoint { u, v }
    }
}

impl fmt::Display for QuarticPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

impl fmt::Debug for QuarticPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Quartic {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational, e: Rational) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::DegenerateQuartic);
        }
        Ok(Quartic { a, b, c, d, e })
    }

    pub fn eval(&self, u: &Rational) -> Rational {
        (((&self.a * u + &self.b) * u + &self.c) * u + &self.d) * u + &self.e
    }

    pub fn contains(&self, pt: &QuarticPoint) -> bool {
        &pt.v * &pt.v == self.eval(&pt.u)
    }

    /// The same curve written in `T = u - u0`.
    pub fn shift_by(&self, u0: &Rational) -> Quartic {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let u2 = u0 * u0;
        let u3 = &u2 * u0;
        let k = |n: i64| Rational::from(n);
        Quartic {
            a: a.clone(),
            b: k(4) * a * u0 + b,
            c: k(6) * a * &u2 + k(3) * b * u0 + c,
            d: k(4) * a * &u3 + k(3) * b * &u2 + k(2) * c * u0 + d,
            e: self.eval(u0),
        }
    }

    /// Recentres at a known point, so the new constant term is `pt.v^2`.
    pub fn shift_to_point(&self, pt: &QuarticPoint) -> Result<Quartic> {
        if !self.contains(pt) {
            return Err(Error::NotOnQuartic(pt.to_string()));
        }
        Ok(self.shift_by(&pt.u))
    }

    /// Weierstrass model of this quartic. Needs `e` to be a nonzero square.
    pub fn to_cubic(&self) -> Result<QuarticToCubic> {
        let q = rational_sqrt(&self.e).filter(|q| !q.is_zero()).ok_or_else(|| Error::NotSquare(self.e.to_string()))?;
        let two_q = Rational::from(2) * &q;
        let q_sq = &q * &q;
        let a1 = &self.d / &q;
        let a2 = &self.c - &self.d * &self.d / (Rational::from(4) * &q_sq);
        let a3 = &two_q * &self.b;
        let a4 = -(Rational::from(4) * &q_sq * &self.a);
        let a6 = &a2 * &a4;
        let curve = LongWeierstrass::new(a1, a2, a3, a4, a6)?;
        Ok(QuarticToCubic { quartic: self.clone(), root: q, curve })
    }
}

impl fmt::Display for Quartic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v^2 = ({})*u^4 + ({})*u^3 + ({})*u^2 + ({})*u + ({})", self.a, self.b, self.c, self.d, self.e)
    }
}

impl fmt::Debug for Quartic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A quartic with square constant term, its cubic model, and the chosen
/// root `q > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuarticToCubic {
    pub quartic: Quartic,
    pub root: Rational,
    pub curve: LongWeierstrass,
}

impl QuarticToCubic {
    pub fn to_cubic_point(&self, pt: &QuarticPoint) -> Result<CurvePoint> {
        if !self.quartic.contains(pt) {
            return Err(Error::NotOnQuartic(pt.to_string()));
        }
        let q = &self.root;
        let (u, v) = (&pt.u, &pt.v);
        if u.is_zero() {
            // v = q or v = -q
            if v == q {
                return Ok(CurvePoint::Infinity);
            }
            let c = &self.curve;
            return Ok(CurvePoint::affine(-&c.a2, &c.a1 * &c.a2 - &c.a3));
        }
        let Quartic { c, d, .. } = &self.quartic;
        let two = Rational::from(2);
        let v_plus_q = v + q;
        let u2 = u * u;
        let x = (&two * q * &v_plus_q + d * u) / &u2;
        let y = (Rational::from(4) * q * q * &v_plus_q + &two * q * (d * u + c * &u2) - d * d * &u2 / (&two * q))
            / (&u2 * u);
        Ok(CurvePoint::affine(x, y))
    }

    pub fn to_quartic_point(&self, pt: &CurvePoint) -> Result<QuarticPoint> {
        if !self.curve.contains(pt) {
            return Err(Error::NotOnCurve(pt.to_string()));
        }
        let (x, y) = match pt.coords() {
            None => return Err(Error::ExceptionalPoint("infinity has no affine preimage".into())),
            Some((_, y)) if y.is_zero() => return Err(Error::ExceptionalPoint(format!("{pt} has y = 0"))),
            Some(xy) => xy,
        };
        let q = &self.root;
        let Quartic { c, d, .. } = &self.quartic;
        let two_q = Rational::from(2) * q;
        let u = (&two_q * (x + c) - d * d / &two_q) / y;
        let v = -q + &u * (&u * x - d) / &two_q;
        let out = QuarticPoint { u, v };
        if !self.quartic.contains(&out) {
            return Err(Error::IdentityFailed(format!("inverse image {out} of {pt} is off the quartic")));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn quartic(c: [&str; 5]) -> Quartic {
        Quartic::new(q(c[0]), q(c[1]), q(c[2]), q(c[3]), q(c[4])).unwrap()
    }

    fn eq26() -> Quartic {
        quartic(["17/3", "0", "5/3", "0", "5/3"])
    }

    fn eq27() -> Quartic {
        quartic(["17/3", "68/3", "107/3", "26", "9"])
    }

    fn qp(u: &str, v: &str) -> QuarticPoint {
        QuarticPoint::new(q(u), q(v))
    }

    #[test]
    fn contains_checks_equation() {
        assert!(eq26().contains(&qp("1", "3")));
        assert!(eq26().contains(&qp("7", "117")));
        assert!(!eq26().contains(&qp("0", "1")));
    }

    #[test]
    fn zero_leading_coefficient_is_rejected() {
        assert!(matches!(Quartic::new(q("0"), q("1"), q("0"), q("0"), q("1")), Err(Error::DegenerateQuartic)));
    }

    #[test]
    fn shifting() {
        assert_eq!(eq26().shift_by(&q("1")), eq27());
        assert_eq!(eq26().shift_by(&q("0")), eq26());
        // 17/3*7^4 + 5/3*7^2 + 5/3 = (40817 + 245 + 5)/3 = 13689 = 117^2
        assert_eq!(eq26().shift_by(&q("7")).e, q("13689"));
        assert_eq!(eq26().shift_to_point(&qp("1", "3")).unwrap(), eq27());
        assert!(eq26().shift_to_point(&qp("1", "4")).is_err());
    }

    #[test]
    fn cubic_for_shifted_quartic() {
        let m = eq27().to_cubic().unwrap();
        assert_eq!(m.root, q("3"));
        let expected = LongWeierstrass::new(q("26/3"), q("152/9"), q("136"), q("-204"), q("-10336/3")).unwrap();
        assert_eq!(m.curve, expected);
    }

    #[test]
    fn pure_quartic_specialisation() {
        // v^2 = A u^4 + q^2  ->  y^2 = x^3 - 4 q^2 A x
        let m = quartic(["1", "0", "0", "0", "1"]).to_cubic().unwrap();
        assert_eq!(m.curve, LongWeierstrass::short(q("-4"), q("0")).unwrap());
        let m = quartic(["1/6", "0", "0", "0", "144"]).to_cubic().unwrap();
        assert_eq!(m.curve, LongWeierstrass::short(q("-96"), q("0")).unwrap());
    }

    #[test]
    fn non_square_constant_is_rejected() {
        assert!(matches!(eq26().to_cubic(), Err(Error::NotSquare(_))));
        assert!(matches!(quartic(["1", "0", "1", "0", "0"]).to_cubic(), Err(Error::NotSquare(_))));
    }

    #[test]
    fn exceptional_points() {
        let m = eq27().to_cubic().unwrap();
        assert_eq!(m.to_cubic_point(&qp("0", "3")).unwrap(), CurvePoint::Infinity);
        let c = &m.curve;
        let image = m.to_cubic_point(&qp("0", "-3")).unwrap();
        assert_eq!(image, CurvePoint::affine(-&c.a2, &c.a1 * &c.a2 - &c.a3));
        assert!(c.contains(&image));
        assert_eq!(m.to_quartic_point(&image).unwrap(), qp("0", "-3"));
        assert!(matches!(m.to_quartic_point(&CurvePoint::Infinity), Err(Error::ExceptionalPoint(_))));
    }

    #[test]
    fn forward_image_lies_on_cubic() {
        let m = eq27().to_cubic().unwrap();
        let p = qp("6", "117");
        let image = m.to_cubic_point(&p).unwrap();
        assert!(m.curve.contains(&image));
        assert_eq!(m.to_quartic_point(&image).unwrap(), p);
    }

    #[test]
    fn inverse_recovers_printed_points() {
        let m = eq27().to_cubic().unwrap();
        let back = m.to_quartic_point(&CurvePoint::affine(q("-44/3"), q("20/9"))).unwrap();
        assert_eq!(back, qp("6", "-117"));
        assert_eq!(&back.u + q("1"), q("7"));
    }

    #[test]
    fn quartic_json() {
        let s = serde_json::to_string(&eq27()).unwrap();
        assert_eq!(s, r#"{"a":"17/3","b":"68/3","c":"107/3","d":"26","e":"9"}"#);
        assert_eq!(serde_json::from_str::<Quartic>(&s).unwrap(), eq27());
        assert_eq!(serde_json::to_string(&qp("1", "3")).unwrap(), r#"{"u":"1","v":"3"}"#);
    }
}
