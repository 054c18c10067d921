//! Reductions of `X^3 + Y^3 + Z^3 + a*U^k = sum a_i * U_i^t_i` (k = 3, 4) to
//! elliptic curves, and of the cubes-versus-fifth-powers family to a quartic.
//!
//! Both reductions substitute `X = -Z + t`, `Y = -Z - t`, which turns the
//! left side into `-Z^3 - 6*Z*t^2 + a*U^k`. With `Z = s` fixed and
//! `S = sum a_i * P_i^t_i` this gives
//!
//! ```text
//! t^2 = (a/(6s)) U^k - s^2/6 - S/(6s)
//! ```
//!
//! For k = 3 the scaling `X' = U*a/(6s)`, `Y' = -t*a/(6s)` produces the short
//! curve `Y'^2 = X'^3 - a^2/216 - a^2*S/(216 s^3)`. For k = 4 the right side is a
//! quartic in `U`; when its constant `Q` is a square `q^2` it maps to
//! `Y'^2 = X'^3 + (a*s/9 + a*S/(9 s^2)) X'` with `U = 2q X'/Y'` and
//! `t = -q + U^2 X'/(2q)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quartic::{Quartic, QuarticPoint};
use crate::rational::{rational_sqrt, Rational};
use crate::weierstrass::{CurvePoint, LongWeierstrass};

/// One summand `coeff * value^exp`. `exp = 0` encodes a constant (`0^0 = 1`).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    pub coeff: Rational,
    pub exp: u32,
    pub value: Rational,
}

impl Term {
    pub fn new(coeff: Rational, exp: u32, value: Rational) -> Self {
        Term { coeff, exp, value }
    }

    /// Unit-coefficient term.
    pub fn power(exp: u32, value: Rational) -> Self {
        Term::new(Rational::one(), exp, value)
    }

    pub fn eval(&self) -> Rational {
        &self.coeff * self.value.pow(self.exp)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*({})^{}", self.coeff, self.value, self.exp)
    }
}

pub fn sum_terms(terms: &[Term]) -> Rational {
    terms.iter().map(Term::eval).sum()
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawProblem")]
pub struct DeProblem {
    /// Coefficient of `U^k`.
    pub a: Rational,
    pub k: u32,
    /// The fixed value of `Z`.
    pub z: Rational,
    pub terms: Vec<Term>,
}

#[derive(Deserialize)]
struct RawProblem {
    a: Rational,
    k: u32,
    z: Rational,
    #[serde(default)]
    terms: Vec<Term>,
}

impl TryFrom<RawProblem> for DeProblem {
    type Error = Error;

    fn try_from(r: RawProblem) -> Result<Self> {
        DeProblem::new(r.a, r.k, r.z, r.terms)
    }
}

impl DeProblem {
    pub fn new(a: Rational, k: u32, z: Rational, terms: Vec<Term>) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::InvalidProblem("coefficient a must be nonzero".into()));
        }
        if z.is_zero() {
            return Err(Error::InvalidProblem("Z must be nonzero".into()));
        }
        if k != 3 && k != 4 {
            return Err(Error::InvalidProblem(format!("k must be 3 or 4, got {k}")));
        }
        Ok(DeProblem { a, k, z, terms })
    }

    fn expect_k(&self, k: u32) -> Result<()> {
        if self.k != k {
            return Err(Error::WrongPipeline { expected: k, found: self.k });
        }
        Ok(())
    }

    /// Provenance prefix such as `k3:Z=5`.
    pub fn label(&self) -> String {
        format!("k{}:Z={}", self.k, self.z)
    }
}

/// `S = sum a_i * P_i^t_i`.
pub fn rhs_sum(p: &DeProblem) -> Rational {
    sum_terms(&p.terms)
}

/// `y^2 = x^3 + H` with `H = -a^2/216 - a^2*S/(216 s^3)`.
pub fn build_k3(p: &DeProblem) -> Result<LongWeierstrass> {
    p.expect_k(3)?;
    let a2 = &p.a * &p.a;
    let c216 = Rational::from(216);
    let h = -(&a2 / &c216) - a2 * rhs_sum(p) / (c216 * p.z.pow(3));
    LongWeierstrass::short(Rational::zero(), h)
}

/// `(t, U)` for a point on [`build_k3`]: `t = -6s*Y'/a`, `U = 6s*X'/a`.
pub fn k3_preimage(p: &DeProblem, pt: &CurvePoint) -> Result<(Rational, Rational)> {
    let (x, y) = pt.coords().ok_or(Error::NoSolution)?;
    let scale = Rational::from(6) * &p.z / &p.a;
    Ok((-(&scale * y), scale * x))
}

pub fn k3_point_to_solution(p: &DeProblem, pt: &CurvePoint) -> Result<RationalSolution> {
    let curve = build_k3(p)?;
    if !curve.contains(pt) {
        return Err(Error::NotOnCurve(pt.to_string()));
    }
    let (t, u) = k3_preimage(p, pt)?;
    RationalSolution::from_substitution(p, t, u, p.label())
}

/// `t^2 = (a/(6s)) U^4 + Q` with `Q = -s^2/6 - S/(6s)`.
pub fn build_k4_quartic(p: &DeProblem) -> Result<Quartic> {
    p.expect_k(4)?;
    let six = Rational::from(6);
    let lead = &p.a / (&six * &p.z);
    let zero = Rational::zero();
    Quartic::new(lead, zero.clone(), zero.clone(), zero, k4_constant(p))
}

/// The constant `Q` of the k = 4 quartic.
pub fn k4_constant(p: &DeProblem) -> Rational {
    let six = Rational::from(6);
    -(&p.z * &p.z) / &six - rhs_sum(p) / (six * &p.z)
}

/// `y^2 = x^3 + (a*s/9 + a*S/(9 s^2)) x` and `q = +sqrt(Q)`.
pub fn build_k4_cubic(p: &DeProblem) -> Result<(LongWeierstrass, Rational)> {
    p.expect_k(4)?;
    let big_q = k4_constant(p);
    let q = rational_sqrt(&big_q).filter(|q| !q.is_zero()).ok_or_else(|| Error::NotSquare(big_q.to_string()))?;
    let nine = Rational::from(9);
    let a4 = &p.a * &p.z / &nine + &p.a * rhs_sum(p) / (nine * &p.z * &p.z);
    Ok((LongWeierstrass::short(a4, Rational::zero())?, q))
}

/// `(t, U)` for a point on [`build_k4_cubic`]: `U = 2qX'/Y'`, `t = -q + U^2 X'/(2q)`.
pub fn k4_preimage(q: &Rational, pt: &CurvePoint) -> Result<(Rational, Rational)> {
    let (x, y) = pt.coords().ok_or(Error::NoSolution)?;
    if y.is_zero() {
        return Err(Error::ExceptionalPoint(format!("{pt} has y = 0")));
    }
    let two_q = Rational::from(2) * q;
    let u = &two_q * x / y;
    let t = -q + &u * &u * x / two_q;
    Ok((t, u))
}

pub fn k4_point_to_solution(p: &DeProblem, q: &Rational, pt: &CurvePoint) -> Result<RationalSolution> {
    let (curve, root) = build_k4_cubic(p)?;
    if &root != q && &-&root != q {
        return Err(Error::InvalidProblem(format!("q = {q} does not square to Q = {}", k4_constant(p))));
    }
    if !curve.contains(pt) {
        return Err(Error::NotOnCurve(pt.to_string()));
    }
    let (t, u) = k4_preimage(q, pt)?;
    RationalSolution::from_substitution(p, t, u, p.label())
}

/// Solution from a point `(U, t)` on [`build_k4_quartic`].
pub fn k4_quartic_point_to_solution(p: &DeProblem, pt: &QuarticPoint) -> Result<RationalSolution> {
    let quartic = build_k4_quartic(p)?;
    if !quartic.contains(pt) {
        return Err(Error::NotOnQuartic(pt.to_string()));
    }
    RationalSolution::from_substitution(p, pt.v.clone(), pt.u.clone(), p.label())
}

/// Parameters of `Y1 = t+v, Y2 = t-v, Y3 = beta*t, X1 = t+x1, X2 = t-x1, X3 = alpha*t`
/// for `Y1^3 + Y2^3 + Y3^3 = X1^5 + X2^5 + X3^5`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CubesFifthsParams {
    pub x1: Rational,
    pub alpha: Rational,
    pub beta: Rational,
}

impl CubesFifthsParams {
    pub fn label(&self) -> String {
        format!("cubes-fifths:x1={},alpha={},beta={}", self.x1, self.alpha, self.beta)
    }
}

/// `v^2 = ((2+alpha^5)/6) t^4 + ((20 x1^2 - 2 - beta^3)/6) t^2 + (5/3) x1^4`.
pub fn build_cubes_fifths(cp: &CubesFifthsParams) -> Result<Quartic> {
    let six = Rational::from(6);
    let two = Rational::from(2);
    // 2 + alpha^5 vanishes for no rational alpha, so Quartic::new cannot fail here.
    let lead = (&two + cp.alpha.pow(5)) / &six;
    let mid = (Rational::from(20) * cp.x1.pow(2) - &two - cp.beta.pow(3)) / six;
    let constant = Rational::frac(5, 3) * cp.x1.pow(4);
    let zero = Rational::zero();
    Quartic::new(lead, zero.clone(), mid, zero, constant)
}

pub fn cubes_fifths_point_to_solution(cp: &CubesFifthsParams, pt: &QuarticPoint) -> Result<RationalSolution> {
    let quartic = build_cubes_fifths(cp)?;
    if !quartic.contains(pt) {
        return Err(Error::NotOnQuartic(pt.to_string()));
    }
    let (t, v) = (&pt.u, &pt.v);
    if t.is_zero() {
        return Err(Error::Degenerate("t = 0".into()));
    }
    let lhs = vec![Term::power(3, t + v), Term::power(3, t - v), Term::power(3, &cp.beta * t)];
    let rhs = vec![Term::power(5, t + &cp.x1), Term::power(5, t - &cp.x1), Term::power(5, &cp.alpha * t)];
    let variables = BTreeMap::from([("t".to_string(), t.clone()), ("v".to_string(), v.clone())]);
    RationalSolution::checked(lhs, rhs, variables, cp.label(), false)
}

/// A verified rational identity `sum(lhs) = sum(rhs)`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RationalSolution {
    pub lhs: Vec<Term>,
    pub rhs: Vec<Term>,
    /// Substitution variables such as `t`, `U`, `X`, `Y`.
    #[serde(default)]
    pub variables: BTreeMap<String, Rational>,
    pub provenance: String,
    #[serde(default)]
    pub trivial: bool,
}

impl RationalSolution {
    fn from_substitution(p: &DeProblem, t: Rational, u: Rational, provenance: String) -> Result<Self> {
        let x = -&p.z + &t;
        let y = -&p.z - &t;
        let lhs = vec![
            Term::power(3, x.clone()),
            Term::power(3, y.clone()),
            Term::power(3, p.z.clone()),
            Term::new(p.a.clone(), p.k, u.clone()),
        ];
        let u_zero = u.is_zero();
        let variables = BTreeMap::from([
            ("t".to_string(), t),
            ("U".to_string(), u),
            ("X".to_string(), x),
            ("Y".to_string(), y),
            ("Z".to_string(), p.z.clone()),
        ]);
        Self::checked(lhs, p.terms.clone(), variables, provenance, u_zero)
    }

    fn checked(
        lhs: Vec<Term>,
        rhs: Vec<Term>,
        variables: BTreeMap<String, Rational>,
        provenance: String,
        force_trivial: bool,
    ) -> Result<Self> {
        let trivial = force_trivial || lhs.iter().any(|l| rhs.contains(l));
        let sol = RationalSolution { lhs, rhs, variables, provenance, trivial };
        if !sol.verify() {
            return Err(Error::IdentityFailed(sol.provenance));
        }
        Ok(sol)
    }

    pub fn verify(&self) -> bool {
        sum_terms(&self.lhs) == sum_terms(&self.rhs)
    }

    pub fn variable(&self, name: &str) -> Option<&Rational> {
        self.variables.get(name)
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }
}
