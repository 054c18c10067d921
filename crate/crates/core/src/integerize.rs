//! Clearing denominators from rational identities.
//!
//! For an identity whose terms carry exponents `e`, let `L` be the lcm of the
//! positive exponents. Multiplying both sides by `mu^L` and replacing every
//! value `x` of exponent `e` by `mu^(L/e) * x` keeps the identity true while
//! coefficients stay untouched. The scale `mu` is the least positive integer
//! making every new value integral, i.e. per prime
//! `v_p(mu) = max ceil(v_p(den(x)) * e / L)`.
//!
//! A constant term (exponent 0, contributing `coeff`) becomes `coeff * mu^L`
//! and is written out as the term `(coeff, L, mu)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{coprime_base, factor_atoms};
use crate::rational::{bigint_string, Rational};
use crate::reduction::{sum_terms, RationalSolution, Term};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntTerm {
    pub coeff: Rational,
    pub exp: u32,
    #[serde(with = "bigint_string")]
    pub value: BigInt,
}

impl IntTerm {
    pub fn new(coeff: Rational, exp: u32, value: BigInt) -> Self {
        IntTerm { coeff, exp, value }
    }

    pub fn eval(&self) -> Rational {
        &self.coeff * Rational::from_integer(num_traits::pow(self.value.clone(), self.exp as usize))
    }
}

impl fmt::Display for IntTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = if self.value < BigInt::zero() { format!("({})", self.value) } else { self.value.to_string() };
        if self.coeff == Rational::one() {
            write!(f, "{base}^{}", self.exp)
        } else {
            write!(f, "{}*{base}^{}", self.coeff, self.exp)
        }
    }
}

impl fmt::Debug for IntTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct IntegerSolution {
    pub lhs: Vec<IntTerm>,
    pub rhs: Vec<IntTerm>,
    #[serde(with = "bigint_string", default = "BigInt::one")]
    pub mu: BigInt,
    /// Set only by code that has checked the identity; never trusted on input.
    #[serde(default)]
    pub verified: bool,
    #[serde(default)]
    pub trivial: bool,
    #[serde(default)]
    pub provenance: String,
    #[serde(skip)]
    pub source: Option<RationalSolution>,
}

impl fmt::Display for IntegerSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |terms: &[IntTerm]| {
            if terms.is_empty() {
                return "0".to_string();
            }
            terms.iter().map(ToString::to_string).collect::<Vec<_>>().join(" + ")
        };
        write!(f, "{} = {}", side(&self.lhs), side(&self.rhs))
    }
}

/// Anything of the form `sum(lhs) = sum(rhs)` that can be checked exactly.
pub trait Identity {
    fn lhs_total(&self) -> Rational;
    fn rhs_total(&self) -> Rational;
    /// Term values with the right side negated; they sum to zero iff the identity holds.
    fn signed_terms(&self) -> Vec<Rational>;
}

impl Identity for RationalSolution {
    fn lhs_total(&self) -> Rational {
        sum_terms(&self.lhs)
    }

    fn rhs_total(&self) -> Rational {
        sum_terms(&self.rhs)
    }

    fn signed_terms(&self) -> Vec<Rational> {
        signed(self.lhs.iter().map(Term::eval), self.rhs.iter().map(Term::eval))
    }
}

impl Identity for IntegerSolution {
    fn lhs_total(&self) -> Rational {
        self.lhs.iter().map(IntTerm::eval).sum()
    }

    fn rhs_total(&self) -> Rational {
        self.rhs.iter().map(IntTerm::eval).sum()
    }

    fn signed_terms(&self) -> Vec<Rational> {
        signed(self.lhs.iter().map(IntTerm::eval), self.rhs.iter().map(IntTerm::eval))
    }
}

fn signed(lhs: impl Iterator<Item = Rational>, rhs: impl Iterator<Item = Rational>) -> Vec<Rational> {
    lhs.chain(rhs.map(|r| -r)).collect()
}

/// Exact check of `sum(lhs) = sum(rhs)`.
pub fn verify<I: Identity + ?Sized>(sol: &I) -> bool {
    sol.lhs_total() == sol.rhs_total()
}

/// Representation of an identity that ignores term order, which side a term
/// sits on, how a number is written as `coeff * value^exp`, and zero terms.
/// Equal term values are merged (so `x + x` and `2x` agree), and the overall
/// sign is fixed by taking the smaller of the form and its negation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CanonicalForm(Vec<Rational>);

impl CanonicalForm {
    pub fn of<I: Identity + ?Sized>(sol: &I) -> Self {
        let mut terms: Vec<Rational> = sol.signed_terms().into_iter().filter(|t| !t.is_zero()).collect();
        terms.sort();
        let mut merged: Vec<Rational> = Vec::with_capacity(terms.len());
        let mut i = 0;
        while i < terms.len() {
            let mut j = i;
            while j < terms.len() && terms[j] == terms[i] {
                j += 1;
            }
            merged.push(&terms[i] * Rational::from((j - i) as i64));
            i = j;
        }
        merged.sort();
        let mut negated: Vec<Rational> = merged.iter().map(|t| -t).collect();
        negated.sort();
        CanonicalForm(merged.min(negated))
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    /// Ratio `r` with `self = r * other`, if the two identities differ only
    /// by an overall scale factor.
    pub fn scale_from(&self, other: &CanonicalForm) -> Option<Rational> {
        if self.0.len() != other.0.len() || self.0.is_empty() {
            return None;
        }
        let r = &self.0[0] / &other.0[0];
        if r.is_negative() || r.is_zero() {
            return None;
        }
        self.0.iter().zip(&other.0).all(|(a, b)| *a == &r * b).then_some(r)
    }

    /// Stable text key, used for dedup indexes.
    pub fn key(&self) -> String {
        self.0.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    }
}

/// Least common multiple of the positive exponents (1 if there are none).
fn exponent_lcm(terms: &[&Term]) -> u32 {
    terms.iter().filter(|t| t.exp > 0).fold(1, |l, t| l.lcm(&t.exp))
}

/// Least `mu` with `den_i | mu^(k_i)` for every requirement `(den_i, k_i)`.
pub fn minimal_scale(requirements: &[(BigInt, u32)]) -> BigInt {
    let base = coprime_base(requirements.iter().map(|(d, _)| d.clone()));
    let mut mu = BigInt::one();
    for b in base {
        // (multiplicity of b in den_i, k_i)
        let hits: Vec<(u32, u32)> = requirements
            .iter()
            .filter_map(|(d, k)| {
                let v = multiplicity(d, &b);
                (v > 0).then_some((v, *k))
            })
            .collect();
        if hits.iter().all(|&(_, k)| k == 1) {
            // No rounding involved, so b need not be factored.
            let e = hits.iter().map(|&(v, _)| v).max().unwrap_or(0);
            mu *= num_traits::pow(b, e as usize);
            continue;
        }
        for (atom, m) in factor_atoms(&b) {
            let e = hits.iter().map(|&(v, k)| (m * v).div_ceil(k)).max().unwrap_or(0);
            mu *= num_traits::pow(atom, e as usize);
        }
    }
    mu
}

fn multiplicity(n: &BigInt, b: &BigInt) -> u32 {
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(b);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Clears denominators with the minimal integer scale.
pub fn scale_to_integers(sol: &RationalSolution) -> Result<IntegerSolution> {
    if !sol.verify() {
        return Err(Error::Unverified);
    }
    let all: Vec<&Term> = sol.lhs.iter().chain(&sol.rhs).collect();
    let l = exponent_lcm(&all);
    let requirements: Vec<(BigInt, u32)> = all
        .iter()
        .filter(|t| t.exp > 0 && !t.value.is_integer())
        .map(|t| (t.value.denom().clone(), l / t.exp))
        .collect();
    let mu = minimal_scale(&requirements);
    let mu_q = Rational::from_integer(mu.clone());

    let scale = |t: &Term| -> Result<IntTerm> {
        if t.exp == 0 {
            return Ok(IntTerm::new(t.coeff.clone(), l, mu.clone()));
        }
        let v = &t.value * mu_q.pow(l / t.exp);
        let v = v.to_integer().ok_or_else(|| Error::IdentityFailed(format!("scaled value {v} is not integral")))?;
        Ok(IntTerm::new(t.coeff.clone(), t.exp, v))
    };
    let lhs = sol.lhs.iter().map(scale).collect::<Result<Vec<_>>>()?;
    let rhs = sol.rhs.iter().map(scale).collect::<Result<Vec<_>>>()?;
    let mut out = IntegerSolution {
        lhs,
        rhs,
        mu,
        verified: false,
        trivial: sol.trivial,
        provenance: sol.provenance.clone(),
        source: Some(sol.clone()),
    };
    if !verify(&out) {
        return Err(Error::IdentityFailed(format!("scaled identity for {}", sol.provenance)));
    }
    out.verified = true;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::{k3_point_to_solution, DeProblem};
    use crate::weierstrass::CurvePoint;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn big(s: &str) -> BigInt {
        s.parse().unwrap()
    }

    fn int_terms(exp: u32, values: &[&str]) -> Vec<IntTerm> {
        values.iter().map(|v| IntTerm::new(q("1"), exp, big(v))).collect()
    }

    fn identity(lhs: Vec<IntTerm>, rhs: Vec<IntTerm>) -> IntegerSolution {
        IntegerSolution {
            lhs,
            rhs,
            mu: big("1"),
            verified: false,
            trivial: false,
            provenance: String::new(),
            source: None,
        }
    }

    fn ex23() -> RationalSolution {
        let p =
            DeProblem::new(q("1"), 3, q("5"), ["1", "2", "3"].iter().map(|v| Term::power(3, q(v))).collect()).unwrap();
        k3_point_to_solution(&p, &CurvePoint::affine(q("643/90"), q("2578/135"))).unwrap()
    }

    #[test]
    fn scaling_example_with_single_exponent() {
        let out = scale_to_integers(&ex23()).unwrap();
        assert_eq!(out.mu, big("9"));
        let values: Vec<_> = out.lhs.iter().chain(&out.rhs).map(|t| t.value.clone()).collect();
        assert_eq!(values, ["-5201", "5111", "45", "1929", "9", "18", "27"].map(big));
        assert!(out.verified && verify(&out));
    }

    #[test]
    fn scaling_with_mixed_exponents() {
        let p = DeProblem::new(q("1"), 3, q("-2"), vec![Term::power(4, q("7"))]).unwrap();
        let sol = k3_point_to_solution(&p, &CurvePoint::affine(q("115/48"), q("249/64"))).unwrap();
        let out = scale_to_integers(&sol).unwrap();
        assert_eq!(out.mu, big("2"));
        let values: Vec<_> = out.lhs.iter().chain(&out.rhs).map(|t| t.value.clone()).collect();
        assert_eq!(values, ["779", "-715", "-32", "-460", "56"].map(big));
    }

    #[test]
    fn integral_input_is_unchanged() {
        let sol = RationalSolution {
            lhs: vec![Term::power(3, q("-110")), Term::power(3, q("124")), Term::power(3, q("14"))],
            rhs: vec![Term::power(5, q("8")), Term::power(5, q("6")), Term::power(5, q("14"))],
            variables: Default::default(),
            provenance: "test".into(),
            trivial: false,
        };
        let out = scale_to_integers(&sol).unwrap();
        assert_eq!(out.mu, big("1"));
        assert_eq!(out.lhs[0].value, big("-110"));
    }

    #[test]
    fn constants_become_powers_of_the_scale() {
        // 8*(1/2)^3 = 5^0
        let sol = RationalSolution {
            lhs: vec![Term::new(q("8"), 3, q("1/2"))],
            rhs: vec![Term::new(q("1"), 0, q("5"))],
            variables: Default::default(),
            provenance: "test".into(),
            trivial: false,
        };
        let out = scale_to_integers(&sol).unwrap();
        assert_eq!(out.mu, big("2"));
        assert_eq!(out.rhs[0], IntTerm::new(q("1"), 3, big("2")));
        assert!(verify(&out));
    }

    #[test]
    fn unverified_input_is_rejected() {
        let sol = RationalSolution {
            lhs: vec![Term::power(3, q("1")), Term::power(3, q("2"))],
            rhs: vec![Term::power(3, q("3"))],
            variables: Default::default(),
            provenance: "bad".into(),
            trivial: false,
        };
        assert!(matches!(scale_to_integers(&sol), Err(Error::Unverified)));
    }

    #[test]
    fn verify_printed_identities() {
        let ok = identity(int_terms(3, &["9", "18", "27", "5201"]), int_terms(3, &["45", "1929", "5111"]));
        assert!(verify(&ok));
        assert_eq!(ok.lhs_total(), q("140689161845"));
        let ok = identity(int_terms(3, &["-110", "124", "14"]), int_terms(5, &["8", "6", "14"]));
        assert!(verify(&ok));
        assert_eq!(ok.lhs_total(), q("578368"));
        let bad = identity(int_terms(3, &["1", "2"]), int_terms(3, &["3"]));
        assert!(!verify(&bad));
    }

    #[test]
    fn canonical_form_ignores_arrangement() {
        let printed = identity(int_terms(3, &["9", "18", "27", "5201"]), int_terms(3, &["45", "1929", "5111"]));
        let pipeline = scale_to_integers(&ex23()).unwrap();
        assert_eq!(CanonicalForm::of(&printed), CanonicalForm::of(&pipeline));

        // 2*a^6 against a^6 + a^6
        let merged = identity(vec![IntTerm::new(q("2"), 6, big("3"))], int_terms(6, &["3", "3"]));
        let split = identity(int_terms(6, &["3", "3"]), vec![IntTerm::new(q("2"), 6, big("3"))]);
        assert_eq!(CanonicalForm::of(&merged), CanonicalForm::of(&split));

        let other = identity(int_terms(3, &["1", "2"]), int_terms(3, &["9"]));
        assert_ne!(CanonicalForm::of(&printed), CanonicalForm::of(&other));
    }

    #[test]
    fn rescaled_identities_are_recognised() {
        let small = identity(int_terms(3, &["1", "12"]), int_terms(3, &["9", "10"]));
        let big3 = identity(int_terms(3, &["-2", "-24"]), int_terms(3, &["-18", "-20"]));
        let (a, b) = (CanonicalForm::of(&big3), CanonicalForm::of(&small));
        assert_eq!(a.scale_from(&b), Some(q("8")));
        assert_eq!(b.scale_from(&a), Some(q("1/8")));
        let other = identity(int_terms(3, &["1", "2"]), int_terms(3, &["9"]));
        assert_eq!(a.scale_from(&CanonicalForm::of(&other)), None);
    }

    #[test]
    fn minimal_scale_cases() {
        assert_eq!(minimal_scale(&[]), big("1"));
        assert_eq!(minimal_scale(&[(big("16"), 4), (big("4"), 3)]), big("2"));
        assert_eq!(minimal_scale(&[(big("16"), 1), (big("9"), 1)]), big("144"));
        // 2^3 needs mu^2 to cover it: v_2(mu) = 2
        assert_eq!(minimal_scale(&[(big("8"), 2)]), big("4"));
    }

    #[test]
    fn integer_solution_json() {
        let out = scale_to_integers(&ex23()).unwrap().clone();
        let json = serde_json::to_string(&out).unwrap();
        assert!(json.starts_with(r#"{"lhs":[{"coeff":"1","exp":3,"value":"-5201"}"#));
        assert!(json.contains(r#""mu":"9","verified":true,"trivial":false"#));
        let back: IntegerSolution = serde_json::from_str(&json).unwrap();
        assert_eq!(back.lhs, out.lhs);
        assert_eq!(back.mu, out.mu);
    }
}
